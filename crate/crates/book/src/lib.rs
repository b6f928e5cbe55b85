//! The guide in `book/`, one module per chapter, so that `cargo test`
//! runs its code blocks.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/logs.md")]
pub mod logs {}
#[doc = include_str!("../../../book/src/skeleton.md")]
pub mod skeleton {}
#[doc = include_str!("../../../book/src/views.md")]
pub mod views {}
#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}
#[doc = include_str!("../../../book/src/service.md")]
pub mod service {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
