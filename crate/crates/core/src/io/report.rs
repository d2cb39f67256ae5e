use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};
use crate::metrics::{AlignmentBlock, Assignment, ErrorRateReport};

/// How much of a report is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detail {
    /// Totals and, for a single session, the assignment.
    #[default]
    Summary,
    /// Also one block per session.
    PerSession,
    /// Also the word alignments.
    Alignment,
}

impl std::str::FromStr for Detail {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().replace('-', "_").as_str() {
            "summary" => Ok(Detail::Summary),
            "per_session" => Ok(Detail::PerSession),
            "alignment" => Ok(Detail::Alignment),
            _ => Err(format!("unknown detail level {s:?} (expected summary, per_session or alignment)")),
        }
    }
}

// field order here is the key order of the document
#[derive(Serialize, Deserialize)]
struct Doc {
    error_rate: Option<f64>,
    errors: u64,
    length: u64,
    insertions: u64,
    deletions: u64,
    substitutions: u64,
    #[serde(default)]
    assignment: Option<Assignment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    per_session: Option<BTreeMap<String, Doc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alignment: Option<Vec<AlignmentBlock>>,
}

impl Doc {
    fn new(r: &ErrorRateReport, detail: Detail) -> Doc {
        let nested = detail != Detail::Summary && !r.per_session.is_empty();
        Doc {
            error_rate: r.error_rate(),
            errors: r.errors,
            length: r.length,
            insertions: r.insertions,
            deletions: r.deletions,
            substitutions: r.substitutions,
            assignment: r.assignment.clone(),
            per_session: nested.then(|| {
                r.per_session
                    .iter()
                    .map(|(k, v)| (k.clone(), Doc::new(v, detail)))
                    .collect()
            }),
            alignment: (detail == Detail::Alignment).then(|| r.alignment.clone()),
        }
    }

    fn into_report(self) -> ErrorRateReport {
        ErrorRateReport {
            errors: self.errors,
            length: self.length,
            insertions: self.insertions,
            deletions: self.deletions,
            substitutions: self.substitutions,
            assignment: self.assignment,
            per_session: self
                .per_session
                .unwrap_or_default()
                .into_iter()
                .map(|(k, v)| (k, v.into_report()))
                .collect(),
            alignment: self.alignment.unwrap_or_default(),
        }
    }
}

/// Pretty-printed JSON with a fixed key order: `error_rate`, `errors`,
/// `length`, `insertions`, `deletions`, `substitutions`, `assignment`, then
/// `per_session` and `alignment` depending on `detail`. An undefined rate is
/// written as `null`.
pub fn write_report(report: &ErrorRateReport, detail: Detail) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&Doc::new(report, detail)).expect("reports always serialize");
    out.push(b'\n');
    out
}

/// Reads a document written by [`write_report`].
pub fn read_report(bytes: &[u8]) -> Result<ErrorRateReport> {
    let doc: Doc = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        location: Location::Line(e.line().max(1)),
        message: e.to_string(),
    })?;
    Ok(doc.into_report())
}
