//! Machine-relative constants, measured on the shipped fixtures and frozen.
//!
//! Changing the machine, the header registry or a fixture may move these;
//! the verify suites report the observed values next to the pinned ones.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitcode::PAIR_OVERHEAD_BITS;
use crate::compress::LZ78_VERSION;
use crate::executor::{REGISTRY_VERSION, TRANSLATION_A, TRANSLATION_B};
use crate::machine::MACHINE_VERSION;

/// Two-part upper bound slack: `M̂ ≤ min_y(K̂(y) + ⌈log i⌉) + C_DSEL`.
pub const C_DSEL: u64 = 0;
/// Conditional lower bound slack: fiber min `≥ K̂(y|x) − C_COND`.
/// Dominated by fibers holding the empty response (`K̂("") = 1`).
pub const C_COND: u64 = 9;
/// Finite-ambiguity collapse: `|M̂ − min_y K̂(y)| ≤ C_FA`.
pub const C_FA: u64 = 0;
/// Tightness on generic pairs.
pub const C_TIGHT: u64 = 7;
/// Enumeration change: difference `≤ ⌈log2 D⌉ + C_EN`.
pub const C_EN: u64 = 0;
/// Identity family: `sup burden ≥ n − C_ID`.
pub const C_ID: u64 = 0;
/// Variant panel: `max M̂ ≥ ⌈log2|S|⌉ − C_VP`.
pub const C_VP: u64 = 0;
/// Kraft slack in the Fano converse.
pub const KRAFT_SLACK: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub versions: BTreeMap<String, String>,
    pub constants: BTreeMap<String, f64>,
}

/// Snapshot embedded in every report.
pub fn registry() -> Registry {
    let versions = [
        ("machine", MACHINE_VERSION),
        ("header_registry", REGISTRY_VERSION),
        ("lz78", LZ78_VERSION),
        ("artifact", env!("CARGO_PKG_VERSION")),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    let constants = [
        ("a", TRANSLATION_A as f64),
        ("b", TRANSLATION_B as f64),
        ("pair_overhead_bits", PAIR_OVERHEAD_BITS as f64),
        ("c_dsel", C_DSEL as f64),
        ("c_cond", C_COND as f64),
        ("c_fa", C_FA as f64),
        ("c_tight", C_TIGHT as f64),
        ("c_en", C_EN as f64),
        ("c_id", C_ID as f64),
        ("c_vp", C_VP as f64),
        ("kraft_slack", KRAFT_SLACK),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    Registry { versions, constants }
}
