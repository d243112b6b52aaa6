//! JSONL corpora and pools.

use std::collections::BTreeMap;

use naqkit_core::complexity::Caps;
use naqkit_core::naq::{MValue, Pool, PoolEntry};
use naqkit_core::validity::{Instance, Predicate};
use naqkit_core::{BitString, KtValue};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct DataError(pub String);

impl std::fmt::Display for DataError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DataError {}

fn data(msg: impl Into<String>) -> DataError {
    DataError(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub id: String,
    /// Instance bits as a 0/1 string.
    pub x: BitString,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub annotations: BTreeMap<String, String>,
}

impl CorpusRecord {
    pub fn instance(&self) -> Instance {
        Instance::binary(self.x.clone())
    }
}

/// One record per nonblank line; errors carry the 1-based line number.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusRecord>, DataError> {
    let mut out: Vec<CorpusRecord> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusRecord =
            serde_json::from_str(line).map_err(|e| data(format!("line {}: {e}", i + 1)))?;
        if !seen.insert(rec.id.clone()) {
            return Err(data(format!("line {}: duplicate id `{}`", i + 1, rec.id)));
        }
        out.push(rec);
    }
    Ok(out)
}

/// Predicates by symbol (`odd_parity`, `equals:101`, `hamming:x:1`, ...) or
/// as a JSON object.
pub fn parse_predicate(s: &str) -> Result<Predicate, DataError> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| data(format!("predicate: {e}")));
    }
    let parts: Vec<&str> = s.split(':').collect();
    let bits = |t: &str| t.parse::<BitString>().map_err(|e| data(format!("predicate `{s}`: {e}")));
    let num = |t: &str| t.parse::<u64>().map_err(|e| data(format!("predicate `{s}`: {e}")));
    let p = match parts.as_slice() {
        ["always"] => Predicate::Always,
        ["never"] => Predicate::Never,
        ["empty"] => Predicate::Empty,
        ["nonempty"] => Predicate::Nonempty,
        ["ends_with_one"] => Predicate::EndsWithOne,
        ["odd_parity"] => Predicate::OddParity,
        ["equals_instance"] => Predicate::EqualsInstance,
        ["contains_instance"] => Predicate::ContainsInstance,
        ["identity_family"] => Predicate::IdentityFamily,
        ["min_length", n] => Predicate::MinLength { min: num(n)? as usize },
        ["equals", t] => Predicate::Equals { target: bits(t)? },
        ["hamming", "x", r] => Predicate::HammingBall { center: None, radius: num(r)? as usize },
        ["hamming", c, r] => Predicate::HammingBall { center: Some(bits(c)?), radius: num(r)? as usize },
        ["fixture_ce", b] => Predicate::FixtureCe { halting_budget: num(b)? },
        _ => return Err(data(format!("unknown predicate `{s}`"))),
    };
    Ok(p)
}

pub fn predicate_of(rec: &CorpusRecord, default: Option<&Predicate>) -> Result<Predicate, DataError> {
    match (&rec.predicate, default) {
        (Some(serde_json::Value::String(s)), _) => parse_predicate(s),
        (Some(v), _) => serde_json::from_value(v.clone()).map_err(|e| data(format!("{}: predicate: {e}", rec.id))),
        (None, Some(p)) => Ok(p.clone()),
        (None, None) => Err(data(format!("{}: no predicate given", rec.id))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolStatus {
    Exact,
    Proxy,
    Infinite,
    /// Not found within the caps; never silently read as infinite.
    UnknownAtBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolRecord {
    pub id: String,
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_steps: Option<u64>,
    pub method: String,
    pub caps: Option<Caps>,
    pub status: PoolStatus,
}

pub fn parse_pool(text: &str) -> Result<Vec<PoolRecord>, DataError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| data(format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

pub fn pool_to_jsonl(records: &[PoolRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("pool records serialize") + "\n")
        .collect()
}

/// Pool for ranking. Unknown-at-budget records are left out and counted.
pub fn to_pool(records: &[PoolRecord]) -> (Pool, usize) {
    let mut unknown = 0;
    let entries = records
        .iter()
        .filter_map(|r| {
            let m = match (r.status, r.m) {
                (PoolStatus::Infinite, _) => MValue::Infinite,
                (PoolStatus::UnknownAtBudget, _) => {
                    unknown += 1;
                    return None;
                }
                (_, Some(b)) => MValue::Finite(KtValue::timed(b, r.time_steps.unwrap_or(0))),
                (_, None) => MValue::Infinite,
            };
            Some(PoolEntry { id: r.id.clone(), m, method: r.method.clone() })
        })
        .collect();
    (Pool::new(entries), unknown)
}
