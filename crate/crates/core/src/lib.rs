//! Word error rates for multi-speaker meeting transcription.

pub mod assignment;
pub mod benchgen;
pub mod editdist;
pub mod error;
pub mod io;
pub mod metrics;
pub mod transcript;

pub use error::{Error, Location, Result};
pub use metrics::{ErrorRateReport, Metric, Scoring, TimeConstraint};
pub use transcript::{CostModel, GroupKey, Interval, Segment, TimedWord, Transcript, ValidationPolicy};
