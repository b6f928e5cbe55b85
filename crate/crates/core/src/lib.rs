//! Log skeletons: declarative process models built from event logs, with
//! subsumption-based trace classification, graph rendering and log
//! ingestion.
//!
//! ```
//! use log_skeleton::{ActivityLog, ActivityTrace, LogSkeleton, Activity};
//!
//! let log = ActivityLog::from_traces([
//!     (ActivityTrace::from_names(["register", "check", "pay"])?, 3),
//!     (ActivityTrace::from_names(["register", "pay", "check"])?, 2),
//! ])?;
//! let sk = LogSkeleton::build(&log);
//! let (register, pay) = (Activity::new("register")?, Activity::new("pay")?);
//! assert!(sk.always_before(&pay, &register)?);
//! assert!(sk.are_equivalent(&register, &pay)?);
//! # Ok::<(), log_skeleton::Error>(())
//! ```

mod bag;
mod bits;
pub mod classifier;
mod error;
pub mod ingestion;
pub mod log_model;
pub mod reduction;
pub mod render;
pub mod skeleton;

pub use bag::Bag;
pub use classifier::{
    classify_batch, enumerate_filters, subsumes_log, subsumes_trace, ClassificationVerdict, Classifier,
    ClassifierConfig, BatchReport, Label, Reason, SubsumptionVerdict, Tier, TierStats, Violation, Witness,
};
pub use error::{Error, Location, ParseError, Result};
pub use log_model::{Activity, ActivityLog, ActivityTrace, ExtendedLog, ExtendedTrace, FilterSpec, LabeledTrace};
pub use skeleton::{ActivityIndex, LogSkeleton, Relation};
