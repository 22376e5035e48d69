//! JSON multiplier tables.
//!
//! ```json
//! {"channels": 1, "entries": [{"index": [1, 2], "s": 0, "value": 0.5}]}
//! ```
//!
//! Graded families add `"grade": j` to every entry.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::harmonics::MultiIndex;
use crate::multiplier::{GradedMultiplierFamily, MultiplierTable};

struct RawEntry {
    grade: Option<usize>,
    index: MultiIndex,
    s: usize,
    value: f64,
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, at: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| Error::Parse(format!("{at}: missing field `{name}`")))
}

fn nonneg_int(v: &Value, at: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Parse(format!("{at}: expected a nonnegative integer, got {v}")))
}

fn parse_raw(doc: &Value, graded: bool) -> Result<(usize, Vec<RawEntry>)> {
    let obj = doc.as_object().ok_or_else(|| Error::Parse("document: expected an object".into()))?;
    let channels = nonneg_int(field(obj, "channels", "document")?, "channels")?;
    if channels == 0 {
        return Err(Error::ZeroChannels);
    }
    let entries = field(obj, "entries", "document")?
        .as_array()
        .ok_or_else(|| Error::Parse("entries: expected a list".into()))?;
    let mut out = Vec::with_capacity(entries.len());
    let mut seen: BTreeMap<(Option<usize>, MultiIndex, usize), usize> = BTreeMap::new();
    for (pos, e) in entries.iter().enumerate() {
        let at = format!("entries[{pos}]");
        let e = e.as_object().ok_or_else(|| Error::Parse(format!("{at}: expected an object")))?;
        let index = field(e, "index", &at)?
            .as_array()
            .ok_or_else(|| Error::Parse(format!("{at}.index: malformed index, expected an integer list")))?
            .iter()
            .map(|n| n.as_i64().ok_or_else(|| Error::Parse(format!("{at}.index: malformed index entry {n}"))))
            .collect::<Result<Vec<i64>>>()?;
        let index = MultiIndex::new(index);
        let s = nonneg_int(field(e, "s", &at)?, &format!("{at}.s"))?;
        let value = field(e, "value", &at)?
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("{at}.value: expected a number")))?;
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Parse(format!("{at}.value: negative or non-finite multiplier {value}")));
        }
        let grade = if graded { Some(nonneg_int(field(e, "grade", &at)?, &format!("{at}.grade"))?) } else { None };
        if let Some(first) = seen.insert((grade, index.clone(), s), pos) {
            return Err(Error::Parse(format!(
                "{at}: duplicate key (index {:?}, s {s}) first given at entries[{first}]",
                index.entries()
            )));
        }
        out.push(RawEntry { grade, index, s, value });
    }
    Ok((channels, out))
}

pub fn parse_multiplier_table(doc: &Value) -> Result<MultiplierTable> {
    let (channels, entries) = parse_raw(doc, false)?;
    let mut t = MultiplierTable::new(channels)?;
    for e in entries {
        t.insert(e.index, e.s, e.value)?;
    }
    Ok(t)
}

pub fn parse_graded_family(doc: &Value) -> Result<GradedMultiplierFamily> {
    let (channels, entries) = parse_raw(doc, true)?;
    let mut f = GradedMultiplierFamily::new(channels)?;
    for e in entries {
        f.insert(e.grade.expect("graded parse"), e.index, e.s, e.value)?;
    }
    Ok(f)
}

pub fn parse_multiplier_table_str(text: &str) -> Result<MultiplierTable> {
    parse_multiplier_table(&serde_json::from_str(text)?)
}

pub fn parse_graded_family_str(text: &str) -> Result<GradedMultiplierFamily> {
    parse_graded_family(&serde_json::from_str(text)?)
}

pub fn emit_multiplier_table(table: &MultiplierTable) -> Value {
    let entries: Vec<Value> = table
        .iter()
        .map(|(i, s, v)| json!({"index": i.entries(), "s": s, "value": v}))
        .collect();
    json!({"channels": table.channels(), "entries": entries})
}

pub fn emit_graded_family(family: &GradedMultiplierFamily) -> Value {
    let entries: Vec<Value> = family
        .iter()
        .map(|(j, i, s, v)| json!({"grade": j, "index": i.entries(), "s": s, "value": v}))
        .collect();
    json!({"channels": family.channels(), "entries": entries})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_delta() {
        let t = parse_multiplier_table_str(r#"{"channels":1,"entries":[]}"#).unwrap();
        assert!(t.is_empty());
        let t = parse_multiplier_table_str(r#"{"channels":1,"entries":[{"index":[1],"s":0,"value":1.0}]}"#).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&MultiIndex::new(vec![1]), 0), 1.0);
    }

    #[test]
    fn trailing_zeros_are_stripped() {
        let t = parse_multiplier_table_str(r#"{"channels":1,"entries":[{"index":[2,0,0],"s":0,"value":3}]}"#).unwrap();
        assert_eq!(t.get(&MultiIndex::new(vec![2]), 0), 3.0);
    }

    #[test]
    fn duplicate_names_both_positions() {
        let doc = r#"{"channels":1,"entries":[
            {"index":[1],"s":0,"value":1.0},
            {"index":[2],"s":0,"value":1.0},
            {"index":[1,0],"s":0,"value":2.0}]}"#;
        let msg = parse_multiplier_table_str(doc).unwrap_err().to_string();
        assert!(msg.contains("entries[2]") && msg.contains("entries[0]"), "{msg}");
    }

    #[test]
    fn rejects_bad_values_and_indices() {
        for doc in [
            r#"{"channels":1,"entries":[{"index":[1],"s":0,"value":-1.0}]}"#,
            r#"{"channels":1,"entries":[{"index":[1.5],"s":0,"value":1.0}]}"#,
            r#"{"channels":1,"entries":[{"index":"1","s":0,"value":1.0}]}"#,
            r#"{"channels":1,"entries":[{"index":[1],"s":1,"value":1.0}]}"#,
            r#"{"channels":0,"entries":[]}"#,
            r#"{"entries":[]}"#,
        ] {
            assert!(parse_multiplier_table_str(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn graded_round_trip() {
        let doc = r#"{"channels":2,"entries":[
            {"grade":1,"index":[1],"s":1,"value":0.25},
            {"grade":2,"index":[0,1],"s":0,"value":0.5}]}"#;
        let f = parse_graded_family_str(doc).unwrap();
        assert_eq!(parse_graded_family(&emit_graded_family(&f)).unwrap(), f);
        assert!(parse_graded_family_str(r#"{"channels":1,"entries":[{"index":[1],"s":0,"value":1}]}"#).is_err());
    }
}
