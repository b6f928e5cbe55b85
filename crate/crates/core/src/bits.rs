//! Dense bit sets and square bit matrices over activity indices.

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; words_for(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = BitSet::new(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn remove_all(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + tz)
            })
        })
    }
}

/// An n×n boolean matrix stored row-major as 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        BitMatrix {
            n,
            stride,
            words: vec![0; stride * n],
        }
    }

    /// All pairs except the diagonal.
    pub fn full_irreflexive(n: usize) -> Self {
        let mut m = BitMatrix::new(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.set(i, j);
                }
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.stride + j / 64] & (1 << (j % 64)) != 0
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.words[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    pub fn unset(&mut self, i: usize, j: usize) {
        self.words[i * self.stride + j / 64] &= !(1 << (j % 64));
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Intersects row `i` with `mask`.
    pub fn and_row(&mut self, i: usize, mask: &[u64]) {
        let row = &mut self.words[i * self.stride..(i + 1) * self.stride];
        for (w, m) in row.iter_mut().zip(mask) {
            *w &= m;
        }
    }

    /// First (row-major) pair set in `self` but not in `other`.
    pub fn first_missing_from(&self, other: &BitMatrix) -> Option<(usize, usize)> {
        debug_assert_eq!(self.n, other.n);
        for i in 0..self.n {
            for (w, (a, b)) in self.row(i).iter().zip(other.row(i)).enumerate() {
                let diff = a & !b;
                if diff != 0 {
                    return Some((i, w * 64 + diff.trailing_zeros() as usize));
                }
            }
        }
        None
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.get(i, j)).map(move |j| (i, j)))
    }

    /// Warshall's algorithm, in place.
    pub fn close_transitively(&mut self) {
        for k in 0..self.n {
            let row_k = self.row(k).to_vec();
            for i in 0..self.n {
                if self.get(i, k) {
                    let start = i * self.stride;
                    for (w, m) in self.words[start..start + self.stride].iter_mut().zip(&row_k) {
                        *w |= m;
                    }
                }
            }
        }
    }
}
