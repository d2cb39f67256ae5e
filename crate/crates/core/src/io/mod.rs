//! Transcript file formats and report serialization.

mod report;
mod seglst;
mod stm;

pub use report::{read_report, write_report, Detail};
pub use seglst::{read_seglst, write_seglst};
pub use stm::read_stm;

use crate::error::{Error, Location, Result};
use crate::transcript::{GroupKey, Transcript};

/// Supported transcript formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    SegLst,
    Stm,
}

impl Format {
    /// Guesses the format from the file name, then from the content.
    pub fn detect(name: &str, bytes: &[u8]) -> Format {
        let lower = name.to_ascii_lowercase();
        if lower.ends_with(".stm") {
            return Format::Stm;
        }
        if [".json", ".jsonl", ".seglst"].iter().any(|ext| lower.ends_with(ext)) {
            return Format::SegLst;
        }
        match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'[') | Some(b'{') => Format::SegLst,
            _ => Format::Stm,
        }
    }
}

/// Reads a transcript in the given format.
pub fn read_transcript(bytes: &[u8], format: Format, key: GroupKey) -> Result<Transcript> {
    match format {
        Format::SegLst => read_seglst(bytes, key),
        Format::Stm => read_stm(bytes, key),
    }
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::Parse {
            location: Location::Line(line),
            message: "invalid UTF-8".to_owned(),
        }
    })
}

/// Parses a time written as decimal text: digits, optionally followed by a
/// point and at most nine fractional digits.
fn parse_decimal(text: &str) -> std::result::Result<f64, String> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (text, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return Err(format!("{text:?} is not a nonnegative decimal number"));
    }
    if frac.is_some_and(|f| f.len() > 9) {
        return Err(format!("{text:?} has more than 9 fractional digits"));
    }
    text.parse::<f64>().map_err(|e| format!("{text:?}: {e}"))
}
