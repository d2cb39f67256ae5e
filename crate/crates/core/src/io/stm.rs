use crate::error::{Error, Location, Result};
use crate::transcript::{tokenize, GroupKey, Interval, Segment, Transcript};

use super::{parse_decimal, utf8};

/// Reads NIST STM: `file channel speaker begin end [<label>] text...`.
///
/// Lines starting with `;;` are comments. The file field becomes the
/// session id.
pub fn read_stm(bytes: &[u8], key: GroupKey) -> Result<Transcript> {
    let text = utf8(bytes)?;
    let mut segments = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(";;") {
            continue;
        }
        let err = |message: String| Error::Parse {
            location: Location::Line(lineno),
            message,
        };

        let mut rest = trimmed;
        let mut fields = Vec::with_capacity(5);
        while fields.len() < 5 {
            let Some(start) = rest.find(|c: char| !c.is_whitespace()) else { break };
            rest = &rest[start..];
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            fields.push(&rest[..end]);
            rest = &rest[end..];
        }
        if fields.len() < 5 {
            return Err(err(format!(
                "expected at least 5 fields (file channel speaker begin end), found {}",
                fields.len()
            )));
        }
        let begin = parse_decimal(fields[3]).map_err(|m| err(format!("begin time: {m}")))?;
        let end = parse_decimal(fields[4]).map_err(|m| err(format!("end time: {m}")))?;
        Interval::new(begin, end).map_err(|e| err(e.to_string()))?;

        let mut transcript = rest.trim_start();
        if transcript.starts_with('<') {
            let label_end = transcript.find(char::is_whitespace).unwrap_or(transcript.len());
            if transcript[..label_end].ends_with('>') {
                transcript = &transcript[label_end..];
            }
        }

        segments.push(Segment {
            session_id: fields[0].to_owned(),
            speaker: Some(fields[2].to_owned()),
            stream: None,
            begin: Some(begin),
            end: Some(end),
            words: tokenize(transcript),
            extra: Default::default(),
        });
    }
    Ok(Transcript::new(segments, key))
}
