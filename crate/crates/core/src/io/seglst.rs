use serde_json::{Map, Value};

use crate::error::{Error, Location, Result};
use crate::transcript::{tokenize, GroupKey, Interval, Segment, Transcript};

use super::{parse_decimal, utf8};

const KNOWN: [&str; 7] = ["session_id", "speaker", "stream", "start_time", "end_time", "words", "word_times"];

/// Reads a segment list: either a JSON array of records or one JSON record
/// per line.
///
/// Required fields are `session_id`, `speaker` and `words`. `start_time` and
/// `end_time` must be given together or not at all; times are numbers or
/// decimal strings. `stream` and `word_times` (one `[begin, end]` or `null`
/// per word) are optional. Other fields are kept in [`Segment::extra`].
pub fn read_seglst(bytes: &[u8], key: GroupKey) -> Result<Transcript> {
    let text = utf8(bytes)?;
    let trimmed = text.trim_start();
    let mut segments = Vec::new();
    if trimmed.starts_with('[') {
        let values: Vec<Value> = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: Location::Line(e.line().max(1)),
            message: e.to_string(),
        })?;
        for (idx, v) in values.into_iter().enumerate() {
            segments.push(record(v, Location::Record(idx))?);
        }
    } else {
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let location = Location::Line(idx + 1);
            let v: Value = serde_json::from_str(line).map_err(|e| Error::Parse {
                location,
                message: e.to_string(),
            })?;
            segments.push(record(v, location)?);
        }
    }
    Ok(Transcript::new(segments, key))
}

fn record(value: Value, location: Location) -> Result<Segment> {
    let parse = |message: String| Error::Parse { location, message };
    let schema = |field: &str| Error::Schema {
        location,
        field: field.to_owned(),
    };
    let Value::Object(mut map) = value else {
        return Err(parse("expected a JSON object".to_owned()));
    };

    let text_field = |map: &mut Map<String, Value>, name: &str, required: bool| -> Result<Option<String>> {
        match map.remove(name) {
            Some(Value::String(s)) => Ok(Some(s)),
            None | Some(Value::Null) if !required => Ok(None),
            _ => Err(schema(name)),
        }
    };
    let session_id = text_field(&mut map, "session_id", true)?.unwrap();
    if session_id.is_empty() {
        return Err(parse("session_id is empty".to_owned()));
    }
    let speaker = text_field(&mut map, "speaker", true)?;
    let stream = text_field(&mut map, "stream", false)?;
    let words_text = text_field(&mut map, "words", true)?.unwrap();

    let begin = take_time(&mut map, "start_time", location)?;
    let end = take_time(&mut map, "end_time", location)?;
    match (begin, end) {
        (Some(b), Some(e)) => {
            Interval::new(b, e).map_err(|e| parse(e.to_string()))?;
        }
        (Some(_), None) => return Err(schema("end_time")),
        (None, Some(_)) => return Err(schema("start_time")),
        (None, None) => {}
    }

    let mut words = tokenize(&words_text);
    match map.remove("word_times") {
        None | Some(Value::Null) => {}
        Some(Value::Array(times)) => {
            if times.len() != words.len() {
                return Err(parse(format!(
                    "word_times has {} entries for {} words",
                    times.len(),
                    words.len()
                )));
            }
            for (w, t) in words.iter_mut().zip(times) {
                let iv = match t {
                    Value::Null => None,
                    Value::Array(pair) if pair.len() == 2 => {
                        let b = time_value(&pair[0]).map_err(|m| parse(format!("word_times: {m}")))?;
                        let e = time_value(&pair[1]).map_err(|m| parse(format!("word_times: {m}")))?;
                        Some(Interval::new(b, e).map_err(|e| parse(e.to_string()))?)
                    }
                    _ => return Err(schema("word_times")),
                };
                *w = w.clone().with_interval(iv);
            }
        }
        Some(_) => return Err(schema("word_times")),
    }

    Ok(Segment {
        session_id,
        speaker,
        stream,
        begin,
        end,
        words,
        extra: map,
    })
}

fn take_time(map: &mut Map<String, Value>, name: &str, location: Location) -> Result<Option<f64>> {
    match map.remove(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => time_value(&v).map(Some).map_err(|m| Error::Parse {
            location,
            message: format!("{name}: {m}"),
        }),
    }
}

fn time_value(v: &Value) -> std::result::Result<f64, String> {
    match v {
        Value::String(s) => parse_decimal(s.trim()),
        // Display prints the shortest round-trip digits without exponent
        Value::Number(n) => match n.as_f64() {
            Some(x) if x.is_finite() && x >= 0.0 => parse_decimal(&format!("{x}")),
            _ => Err(format!("{n} is not a nonnegative time")),
        },
        other => Err(format!("expected a number or decimal string, found {other}")),
    }
}

/// Writes a JSON array with one record per line, keys in a fixed order.
/// Times use the shortest decimal that reads back to the same value; times
/// needing more than nine fractional digits are rounded to the nanosecond.
pub fn write_seglst(transcript: &Transcript) -> Vec<u8> {
    let mut out = String::from("[");
    for (idx, s) in transcript.segments.iter().enumerate() {
        out.push_str(if idx == 0 { "\n" } else { ",\n" });
        out.push_str(&record_json(s));
    }
    out.push_str(if transcript.segments.is_empty() { "]\n" } else { "\n]\n" });
    out.into_bytes()
}

fn record_json(s: &Segment) -> String {
    let mut fields: Vec<(String, Value)> = vec![("session_id".into(), Value::from(s.session_id.as_str()))];
    if let Some(spk) = &s.speaker {
        fields.push(("speaker".into(), Value::from(spk.as_str())));
    }
    if let Some(stream) = &s.stream {
        fields.push(("stream".into(), Value::from(stream.as_str())));
    }
    if let (Some(b), Some(e)) = (s.begin, s.end) {
        fields.push(("start_time".into(), time_json(b)));
        fields.push(("end_time".into(), time_json(e)));
    }
    let words: Vec<&str> = s.words.iter().map(|w| w.token()).collect();
    fields.push(("words".into(), Value::from(words.join(" "))));
    if s.words.iter().any(|w| w.interval().is_some()) {
        let times = s
            .words
            .iter()
            .map(|w| match w.interval() {
                Some(iv) => Value::Array(vec![time_json(iv.begin), time_json(iv.end)]),
                None => Value::Null,
            })
            .collect();
        fields.push(("word_times".into(), Value::Array(times)));
    }
    for (k, v) in &s.extra {
        if !KNOWN.contains(&k.as_str()) {
            fields.push((k.clone(), v.clone()));
        }
    }

    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{}: {}", Value::from(k.as_str()), v))
        .collect();
    format!("{{{}}}", body.join(", "))
}

fn time_json(t: f64) -> Value {
    if parse_decimal(&format!("{t}")).is_ok() {
        Value::from(t)
    } else {
        Value::from((t * 1e9).round() / 1e9)
    }
}
