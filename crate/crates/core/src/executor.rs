//! Input-blind executors: the literal reference executor, the bounded machine
//! as an executor, and the universal executor dispatching on a header.
//!
//! The evaluation signature takes only the advice `w`; no executor can see
//! the instance.

use serde::{Deserialize, Serialize};

use crate::bitcode::{decode_nat, encode_nat, gamma_len, BitString, HeaderTable, PAIR_OVERHEAD_BITS};
use crate::error::{Error, Result};
use crate::machine::{self, framed_len, run_machine, RunOutcome, DEFAULT_STEP_BUDGET, MACHINE_VERSION};
use crate::validity::{Instance, Predicate, Verdict};

pub const REGISTRY_VERSION: &str = "hdr-v1";

/// Header dispatching to the bounded machine.
pub const MACHINE_HEADER: &str = "1";
/// Header dispatching to the reference executor.
pub const REFERENCE_HEADER: &str = "010";

/// Translation constant `a`: a shortest machine program `p` for `r` becomes the
/// universal advice `⟨h_MACHINE, p⟩`, costing exactly `|h_MACHINE|` extra bits.
pub const TRANSLATION_A: u64 = 1;

/// Translation constant `b`: any universal advice `w` yields a machine program
/// for `E_univ(w)` of length at most `|w| + b`. The machine branch is the
/// program itself after dropping the 1-bit header. The reference branch
/// `010·γ(ℓ+1)·s` is replaced by the `LIT s` program `γ(ℓ+3)·00·s`, and
/// `|γ(ℓ+3)| + 2 ≤ |γ(ℓ+1)| + 3 + 1` for every `ℓ`. Malformed advice maps to
/// the empty output, whose program `1` is never longer than the advice.
pub const TRANSLATION_B: u64 = 1;

/// A fixed total map from advice to responses.
pub trait Executor: Send + Sync {
    fn id(&self) -> &str;

    /// Timed run. On success the output is `E(w)` and `steps` is `τ_E(w)`.
    /// A timeout means `τ_E(w) > budget`.
    fn run(&self, w: &BitString, budget: u64) -> RunOutcome;

    /// `E(w)`; total.
    fn eval(&self, w: &BitString) -> BitString {
        self.run(w, u64::MAX).output.expect("executors are total")
    }

    /// Advice strings of length exactly `len` in the executor's prefix-free
    /// domain, in lexicographic order.
    fn domain_of_length(&self, len: usize) -> Vec<BitString>;
}

/// `w = encode_nat(ℓ+1)·s` with `|s| = ℓ` outputs `s`; anything else outputs
/// the empty response. Time is `|w|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceExecutor;

pub fn exec_reference(w: &BitString) -> BitString {
    reference_parse(w).unwrap_or_default()
}

fn reference_parse(w: &BitString) -> Option<BitString> {
    let (n, used) = decode_nat(w.bits())?;
    let len = usize::try_from(n - 1).ok()?;
    (w.len().checked_sub(used)? == len).then(|| w.slice(used, w.len()))
}

/// Reference advice printing `s`.
pub fn reference_advice(s: &BitString) -> BitString {
    encode_nat(s.len() as u64 + 1).expect("len + 1 >= 1").concat(s)
}

impl Executor for ReferenceExecutor {
    fn id(&self) -> &str {
        "reference"
    }

    fn run(&self, w: &BitString, budget: u64) -> RunOutcome {
        let t = w.len() as u64;
        if t > budget {
            return RunOutcome::timeout(budget);
        }
        RunOutcome::halted(exec_reference(w), t)
    }

    fn domain_of_length(&self, len: usize) -> Vec<BitString> {
        // lengths gamma(l+1) + l; all payloads of a fitting l
        (0..=len)
            .filter(|&l| gamma_len(l as u64 + 1) + l == len)
            .flat_map(|l| BitString::all_of_length(l).map(|s| reference_advice(&s)).collect::<Vec<_>>())
            .collect()
    }
}

/// The bounded machine viewed as an executor with a fixed step budget. A
/// timeout is mapped to the empty output at time `budget`, which keeps it
/// total.
#[derive(Clone, Copy, Debug)]
pub struct MachineExecutor {
    pub budget: u64,
}

impl Default for MachineExecutor {
    fn default() -> Self {
        Self { budget: DEFAULT_STEP_BUDGET }
    }
}

impl MachineExecutor {
    fn run_total(&self, p: &BitString, budget: u64) -> RunOutcome {
        let inner = budget.min(self.budget);
        let out = run_machine(p, inner);
        if out.is_halted() {
            out
        } else if inner == self.budget && self.budget <= budget {
            // fallback: machine budget exhausted, total by convention
            RunOutcome::halted(BitString::new(), self.budget)
        } else {
            RunOutcome::timeout(budget)
        }
    }
}

impl Executor for MachineExecutor {
    fn id(&self) -> &str {
        "machine"
    }

    fn run(&self, w: &BitString, budget: u64) -> RunOutcome {
        self.run_total(w, budget)
    }

    fn domain_of_length(&self, len: usize) -> Vec<BitString> {
        (0..=len)
            .filter(|&l| framed_len(l) == len)
            .flat_map(|l| BitString::all_of_length(l).map(|b| machine::frame_program(&b)).collect::<Vec<_>>())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Machine,
    Reference,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub id: String,
    pub header: BitString,
    pub target: Target,
    #[serde(default)]
    pub reserved: bool,
}

/// Versioned header registry of the universal executor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderRegistry {
    pub version: String,
    pub machine_version: String,
    pub machine_budget: u64,
    pub pair_overhead_bits: u64,
    pub translation_a: u64,
    pub translation_b: u64,
    pub entries: Vec<RegistryEntry>,
}

impl Default for HeaderRegistry {
    fn default() -> Self {
        Self {
            version: REGISTRY_VERSION.into(),
            machine_version: MACHINE_VERSION.into(),
            machine_budget: DEFAULT_STEP_BUDGET,
            pair_overhead_bits: PAIR_OVERHEAD_BITS as u64,
            translation_a: TRANSLATION_A,
            translation_b: TRANSLATION_B,
            entries: vec![
                RegistryEntry { id: "machine".into(), header: MACHINE_HEADER.into(), target: Target::Machine, reserved: true },
                RegistryEntry { id: "reference".into(), header: REFERENCE_HEADER.into(), target: Target::Reference, reserved: false },
            ],
        }
    }
}

impl HeaderRegistry {
    pub fn from_json(s: &str) -> Result<Self> {
        let reg: HeaderRegistry = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        reg.table()?;
        Ok(reg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn table(&self) -> Result<HeaderTable> {
        HeaderTable::new(self.entries.iter().map(|e| e.header.clone()).collect())
    }

    pub fn header_of(&self, id: &str) -> Result<&BitString> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .map(|e| &e.header)
            .ok_or_else(|| Error::InvalidHeader(id.to_string()))
    }
}

/// `E_univ(⟨h_F, w⟩) = F(w)`; unknown headers give the empty response.
#[derive(Clone, Debug)]
pub struct UniversalExecutor {
    registry: HeaderRegistry,
    table: HeaderTable,
    machine: MachineExecutor,
}

impl Default for UniversalExecutor {
    fn default() -> Self {
        Self::new(HeaderRegistry::default()).expect("default registry is prefix-free")
    }
}

impl UniversalExecutor {
    pub fn new(registry: HeaderRegistry) -> Result<Self> {
        let table = registry.table()?;
        let machine = MachineExecutor { budget: registry.machine_budget };
        Ok(Self { registry, table, machine })
    }

    pub fn registry(&self) -> &HeaderRegistry {
        &self.registry
    }

    pub fn pair(&self, id: &str, payload: &BitString) -> Result<BitString> {
        self.table.pair(self.registry.header_of(id)?, payload)
    }

    fn target(&self, header: &BitString) -> Option<Target> {
        self.registry.entries.iter().find(|e| e.header == *header).map(|e| e.target)
    }
}

pub fn exec_universal(w: &BitString) -> BitString {
    UniversalExecutor::default().eval(w)
}

impl Executor for UniversalExecutor {
    fn id(&self) -> &str {
        "universal"
    }

    fn run(&self, w: &BitString, budget: u64) -> RunOutcome {
        let Some((h, payload)) = self.table.unpair(w) else {
            return RunOutcome::halted(BitString::new(), 0);
        };
        let hl = h.len() as u64;
        if hl > budget {
            return RunOutcome::timeout(budget);
        }
        let inner = match self.target(&h) {
            Some(Target::Machine) => self.machine.run(&payload, budget - hl),
            Some(Target::Reference) => ReferenceExecutor.run(&payload, budget - hl),
            None => RunOutcome::halted(BitString::new(), 0),
        };
        if inner.is_halted() {
            RunOutcome::halted(inner.output.expect("halted"), hl + inner.steps)
        } else {
            RunOutcome::timeout(budget)
        }
    }

    fn domain_of_length(&self, len: usize) -> Vec<BitString> {
        let mut out = Vec::new();
        for e in &self.registry.entries {
            let h = e.header.len();
            if h > len {
                continue;
            }
            let inner = match e.target {
                Target::Machine => self.machine.domain_of_length(len - h),
                Target::Reference => ReferenceExecutor.domain_of_length(len - h),
            };
            out.extend(inner.iter().map(|p| e.header.concat(p)));
        }
        out.sort();
        out
    }
}

/// Outputs of every domain advice string up to a length, in (length, lex) order.
#[derive(Clone, Debug)]
pub struct AdviceTable {
    pub executor_id: String,
    pub max_len: usize,
    pub entries: Vec<(BitString, BitString)>,
}

impl AdviceTable {
    pub fn build(e: &dyn Executor, max_len: usize) -> Self {
        use rayon::prelude::*;
        let advice: Vec<BitString> = (0..=max_len).flat_map(|l| e.domain_of_length(l)).collect();
        let entries = advice.into_par_iter().map(|w| {
            let r = e.eval(&w);
            (w, r)
        });
        Self { executor_id: e.id().to_string(), max_len, entries: entries.collect() }
    }
}

/// Advice burden within a length cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Burden {
    Exact { value: u64, advice: BitString, response: BitString },
    /// No advice up to the cap yields an accepted response.
    Infinite { max_len: usize },
    /// A staged predicate left some shorter candidate undecided.
    UnknownAtBudget { max_len: usize, stage_budget: u64, upper: Option<u64> },
}

impl Burden {
    pub fn value(&self) -> Option<u64> {
        match self {
            Burden::Exact { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// `min{|w| : V(x, E(w)) = 1}` over a prebuilt advice table.
pub fn advice_burden_in(table: &AdviceTable, v: &Predicate, x: &Instance, stage_budget: u64) -> Burden {
    let vb = v.bind(x);
    let mut pending: Option<usize> = None;
    for (w, r) in &table.entries {
        match vb(r, stage_budget) {
            Verdict::Accepted => {
                return match pending {
                    Some(_) if pending < Some(w.len()) => Burden::UnknownAtBudget {
                        max_len: table.max_len,
                        stage_budget,
                        upper: Some(w.len() as u64),
                    },
                    _ => Burden::Exact { value: w.len() as u64, advice: w.clone(), response: r.clone() },
                };
            }
            Verdict::Unknown => {
                pending.get_or_insert(w.len());
            }
            Verdict::Rejected => {}
        }
    }
    match pending {
        Some(_) => Burden::UnknownAtBudget { max_len: table.max_len, stage_budget, upper: None },
        None => Burden::Infinite { max_len: table.max_len },
    }
}

pub fn advice_burden(e: &dyn Executor, v: &Predicate, x: &Instance, max_len: usize, stage_budget: u64) -> Burden {
    advice_burden_in(&AdviceTable::build(e, max_len), v, x, stage_budget)
}
