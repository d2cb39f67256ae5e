//! Synthetic meetings with known error counts, and a timing harness.

mod generate;
mod profile;

pub use generate::{generate, Meeting, MeetingSpec};
pub use profile::{profile, MetricTiming, Profile};
