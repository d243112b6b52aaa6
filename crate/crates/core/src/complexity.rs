//! Complexity estimators relative to the bounded machine.
//!
//! Exact values come from a full enumeration of programs up to a length cap,
//! each run for a fixed step budget. Ties among programs are broken by
//! length, then step count, then lexicographic order, so every reported
//! witness is independent of scheduling.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitcode::BitString;
use crate::compress::{self, framed_value};
use crate::error::{Error, Result};
use crate::executor::{advice_burden_in, AdviceTable, Burden, Executor, UniversalExecutor, TRANSLATION_A, TRANSLATION_B};
use crate::kt::KtValue;
use crate::machine::{programs_up_to, run_machine, run_machine_with_aux, RunOutcome, DEFAULT_STEP_BUDGET};
use crate::validity::{Instance, Predicate, Verdict};

/// Largest length cap accepted by the exact estimators.
pub const HARD_LENGTH_CAP: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Caps {
    pub length_cap: usize,
    pub step_budget: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self { length_cap: 20, step_budget: DEFAULT_STEP_BUDGET }
    }
}

impl Caps {
    pub fn new(length_cap: usize, step_budget: u64) -> Self {
        Self { length_cap, step_budget }
    }

    pub fn interactive() -> Self {
        Self { length_cap: 16, step_budget: DEFAULT_STEP_BUDGET }
    }

    fn check(&self) -> Result<()> {
        if self.length_cap > HARD_LENGTH_CAP {
            return Err(Error::invalid(format!("length cap {} exceeds hard cap {HARD_LENGTH_CAP}", self.length_cap)));
        }
        if self.step_budget == 0 {
            return Err(Error::invalid("step budget must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactBounded,
    Levin,
    Compressor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Exact,
    /// Nothing found within the caps.
    Infinite,
    /// A staged predicate left a shorter candidate undecided.
    UnknownAtBudget,
    /// A proxy value with no optimality claim.
    Proxy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    /// `None` is the infinity marker (or unknown, see `status`).
    pub value: Option<KtValue>,
    pub status: EstimateStatus,
    pub method: Method,
    pub caps: Caps,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compressor_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BitString>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub response: Option<BitString>,
    /// Steps of the witness; for `khat_exact` this is `τ*(r)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_star: Option<u64>,
    /// Best value found when the status is unknown.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<KtValue>,
}

impl ComplexityEstimate {
    fn base(method: Method, caps: Caps) -> Self {
        Self {
            value: None,
            status: EstimateStatus::Infinite,
            method,
            caps,
            compressor_id: None,
            witness: None,
            response: None,
            tau_star: None,
            upper: None,
        }
    }

    /// Integer bits of an exact untimed value.
    pub fn bits(&self) -> Option<u64> {
        self.value.map(|v| v.bits)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_some()
    }
}

/// Shortest program for one output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Best {
    pub program: BitString,
    pub steps: u64,
}

impl Best {
    pub fn len(&self) -> u64 {
        self.program.len() as u64
    }

    fn key(&self) -> (usize, u64, &BitString) {
        (self.program.len(), self.steps, &self.program)
    }
}

/// Every program up to the length cap with its outcome, plus the best
/// program for each output.
#[derive(Debug)]
pub struct ProgramTable {
    pub caps: Caps,
    pub aux: Option<BitString>,
    runs: Vec<(BitString, RunOutcome)>,
    best: HashMap<BitString, Best>,
    /// Distinct outputs ordered by their best program.
    ranked: Vec<BitString>,
}

impl ProgramTable {
    pub fn build(caps: Caps, aux: Option<BitString>) -> Result<Self> {
        caps.check()?;
        let programs: Vec<BitString> = programs_up_to(caps.length_cap).collect();
        let runs: Vec<(BitString, RunOutcome)> = programs
            .into_par_iter()
            .map(|p| {
                let out = match &aux {
                    Some(a) => run_machine_with_aux(&p, a, caps.step_budget),
                    None => run_machine(&p, caps.step_budget),
                };
                (p, out)
            })
            .collect();
        let mut best: HashMap<BitString, Best> = HashMap::new();
        for (p, out) in &runs {
            let Some(r) = &out.output else { continue };
            let cand = Best { program: p.clone(), steps: out.steps };
            match best.get_mut(r) {
                Some(b) if cand.key() < b.key() => *b = cand,
                Some(_) => {}
                None => {
                    best.insert(r.clone(), cand);
                }
            }
        }
        let mut ranked: Vec<BitString> = best.keys().cloned().collect();
        ranked.sort_by(|a, b| best[a].key().cmp(&best[b].key()));
        Ok(Self { caps, aux, runs, best, ranked })
    }

    /// Shared table for the given caps, built once per process.
    pub fn shared(caps: Caps) -> Result<Arc<Self>> {
        Self::shared_with_aux(caps, None)
    }

    pub fn shared_with_aux(caps: Caps, aux: Option<BitString>) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(Caps, Option<BitString>), Arc<ProgramTable>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (caps, aux.clone());
        if let Some(t) = cache.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::build(caps, aux)?);
        cache.lock().expect("cache lock").entry(key).or_insert(t.clone());
        Ok(t)
    }

    pub fn runs(&self) -> &[(BitString, RunOutcome)] {
        &self.runs
    }

    pub fn best(&self, r: &BitString) -> Option<&Best> {
        self.best.get(r)
    }

    /// Distinct outputs in increasing order of their best program.
    pub fn ranked_outputs(&self) -> impl Iterator<Item = (&BitString, &Best)> {
        self.ranked.iter().map(|r| (r, &self.best[r]))
    }

    pub fn distinct_outputs(&self) -> usize {
        self.ranked.len()
    }

    pub fn khat(&self, r: &BitString) -> Option<u64> {
        self.best(r).map(Best::len)
    }
}

pub fn khat_in(table: &ProgramTable, r: &BitString) -> ComplexityEstimate {
    let mut est = ComplexityEstimate::base(Method::ExactBounded, table.caps);
    est.response = Some(r.clone());
    if let Some(b) = table.best(r) {
        est.value = Some(KtValue::bits(b.len()));
        est.status = EstimateStatus::Exact;
        est.witness = Some(b.program.clone());
        est.tau_star = Some(b.steps);
    }
    est
}

/// `min{|p| : U_B(p) = r within the caps}` with witness and `τ*(r)`.
pub fn khat_exact(r: &BitString, caps: Caps) -> Result<ComplexityEstimate> {
    Ok(khat_in(&*ProgramTable::shared(caps)?, r))
}

/// Conditional `K̂(r | x)`: the machine tape starts with `φ(x)`.
pub fn khat_conditional(r: &BitString, x: &Instance, caps: Caps) -> Result<ComplexityEstimate> {
    Ok(khat_in(&*ProgramTable::shared_with_aux(caps, Some(x.bits().clone()))?, r))
}

fn search_outputs(
    table: &ProgramTable,
    v: &Predicate,
    x: &Instance,
    stage_budget: u64,
    cost: impl Fn(&Best) -> KtValue,
    method: Method,
) -> ComplexityEstimate {
    let vb = v.bind(x);
    let mut found: Option<(KtValue, &BitString, &Best)> = None;
    let mut pending: Option<KtValue> = None;
    for (r, b) in table.ranked_outputs() {
        let c = cost(b);
        match vb(r, stage_budget) {
            Verdict::Accepted => {
                let better = match &found {
                    None => true,
                    Some((fc, _, fb)) => (c, b.key()) < (*fc, fb.key()),
                };
                if better {
                    found = Some((c, r, b));
                }
            }
            Verdict::Unknown => pending = Some(pending.map_or(c, |p| p.min(c))),
            Verdict::Rejected => {}
        }
    }
    let mut est = ComplexityEstimate::base(method, table.caps);
    match (found, pending) {
        (Some((c, r, b)), p) if p.is_none_or(|p| p >= c) => {
            est.value = Some(c);
            est.status = EstimateStatus::Exact;
            est.witness = Some(b.program.clone());
            est.response = Some(r.clone());
            est.tau_star = Some(b.steps);
        }
        (found, Some(_)) => {
            est.status = EstimateStatus::UnknownAtBudget;
            est.upper = found.map(|(c, _, _)| c);
        }
        (None, None) => {}
        (Some(_), None) => unreachable!("covered by the first arm"),
    }
    est
}

/// `M̂(x) = min{K̂(r) : V(x, r)}` with witness program and response.
pub fn m_exact_in(table: &ProgramTable, x: &Instance, v: &Predicate, stage_budget: u64) -> ComplexityEstimate {
    search_outputs(table, v, x, stage_budget, |b| KtValue::bits(b.len()), Method::ExactBounded)
}

pub fn m_exact(x: &Instance, v: &Predicate, caps: Caps, stage_budget: u64) -> Result<ComplexityEstimate> {
    Ok(m_exact_in(&*ProgramTable::shared(caps)?, x, v, stage_budget))
}

/// `M̂_T(x) = min{K̂(r) + log2(1 + τ*(r)) : V(x, r)}`.
pub fn mt_exact_in(table: &ProgramTable, x: &Instance, v: &Predicate, stage_budget: u64) -> ComplexityEstimate {
    search_outputs(table, v, x, stage_budget, |b| KtValue::timed(b.len(), b.steps), Method::ExactBounded)
}

pub fn mt_exact(x: &Instance, v: &Predicate, caps: Caps, stage_budget: u64) -> Result<ComplexityEstimate> {
    Ok(mt_exact_in(&*ProgramTable::shared(caps)?, x, v, stage_budget))
}

/// The value `B(|x|)` with its per-advice cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub b: u64,
}

impl SearchBudget {
    pub const MAX_B: u64 = 62;

    pub fn new(b: u64) -> Result<Self> {
        if b > Self::MAX_B {
            return Err(Error::invalid(format!("B = {b} exceeds {}", Self::MAX_B)));
        }
        Ok(Self { b })
    }

    /// `Θ(x, w) = 2^(B − |w|) − 1`, or `None` when `|w| > B`.
    pub fn theta(&self, w_len: u64) -> Option<u64> {
        (w_len <= self.b).then(|| (1u64 << (self.b - w_len)) - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevinResult {
    pub b: u64,
    /// `None` is the infinity marker: no witness under `B`.
    pub value: Option<KtValue>,
    pub witness: Option<BitString>,
    pub response: Option<BitString>,
    pub tau: Option<u64>,
    pub runs: u64,
}

/// Truncated advice-plus-time search: every domain advice `w` with `|w| ≤ B`
/// runs for exactly `Θ(x, w)` steps.
pub fn levin_value(x: &Instance, e: &dyn Executor, v: &Predicate, b: u64, stage_budget: u64) -> Result<LevinResult> {
    let budget = SearchBudget::new(b)?;
    let vb = v.bind(x);
    let advice: Vec<BitString> = (0..=b as usize).flat_map(|l| e.domain_of_length(l)).collect();
    let runs = advice.len() as u64;
    let hits: Vec<(KtValue, BitString, BitString, u64)> = advice
        .into_par_iter()
        .filter_map(|w| {
            let theta = budget.theta(w.len() as u64)?;
            let out = e.run(&w, theta);
            let r = out.output?;
            (vb(&r, stage_budget) == Verdict::Accepted).then(|| (KtValue::timed(w.len() as u64, out.steps), w, r, out.steps))
        })
        .collect();
    let best = hits.into_iter().min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(match best {
        Some((c, w, r, t)) => LevinResult { b, value: Some(c), witness: Some(w), response: Some(r), tau: Some(t), runs },
        None => LevinResult { b, value: None, witness: None, response: None, tau: None, runs },
    })
}

/// Compressor proxy: compressed size of `r` plus the self-delimiting charge.
pub fn khat_compressor(r: &BitString, compressor_id: &str) -> Result<ComplexityEstimate> {
    let c = compress::compressor(compressor_id)?;
    let payload = c.compressed_bits(r)?;
    let mut est = ComplexityEstimate::base(Method::Compressor, Caps::new(0, 0));
    est.value = Some(KtValue::bits(framed_value(payload)));
    est.status = EstimateStatus::Proxy;
    est.compressor_id = Some(c.version());
    est.response = Some(r.clone());
    Ok(est)
}

/// Proxy `M̂` through a compressor: the minimum proxy value over the valid
/// responses of the response universe up to `max_response_len`.
pub fn m_compressor(x: &Instance, v: &Predicate, compressor_id: &str, max_response_len: usize) -> Result<ComplexityEstimate> {
    let c = compress::compressor(compressor_id)?;
    let vb = v.bind(x);
    let mut best: Option<(u64, BitString)> = None;
    for r in BitString::all_up_to(max_response_len) {
        if vb(&r, u64::MAX) != Verdict::Accepted {
            continue;
        }
        let val = framed_value(c.compressed_bits(&r)?);
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, r));
        }
    }
    let mut est = ComplexityEstimate::base(Method::Compressor, Caps::new(max_response_len, 0));
    est.compressor_id = Some(c.version());
    if let Some((val, r)) = best {
        est.value = Some(KtValue::bits(val));
        est.status = EstimateStatus::Proxy;
        est.response = Some(r);
    }
    Ok(est)
}

/// One row of the realizer-identity audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub id: String,
    pub predicate: String,
    pub burden: Burden,
    pub m_exact: Option<u64>,
    /// `burden − m_exact`.
    pub gap: Option<i64>,
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub caps: Caps,
    pub advice_cap: usize,
    pub a: u64,
    pub b: u64,
    pub rows: Vec<IdentityRow>,
    pub max_abs_gap: Option<u64>,
    pub upper_direction_ok: bool,
    pub excluded: usize,
    pub pass: bool,
}

/// Compare `C^adv` under the universal executor with `M̂` on a corpus.
/// Advice is searched up to `length_cap + a` bits so that every machine
/// program within the cap is reachable through its header.
pub fn realizer_identity_audit(corpus: &[(String, Instance, Predicate)], caps: Caps) -> Result<IdentityReport> {
    let table = ProgramTable::shared(caps)?;
    let univ = UniversalExecutor::default();
    let advice_cap = caps.length_cap + TRANSLATION_A as usize;
    let advice = AdviceTable::build(&univ, advice_cap);
    let rows: Vec<IdentityRow> = corpus
        .par_iter()
        .map(|(id, x, v)| {
            let burden = advice_burden_in(&advice, v, x, u64::MAX);
            let m = m_exact_in(&table, x, v, u64::MAX);
            let (bv, mv) = (burden.value(), m.bits());
            let gap = match (bv, mv) {
                (Some(b), Some(m)) => Some(b as i64 - m as i64),
                _ => None,
            };
            IdentityRow { id: id.clone(), predicate: v.id(), burden, m_exact: mv, gap, excluded: gap.is_none() }
        })
        .collect();
    let max_abs_gap = rows.iter().filter_map(|r| r.gap).map(|g| g.unsigned_abs()).max();
    let upper_direction_ok = rows.iter().filter_map(|r| r.gap).all(|g| g <= TRANSLATION_A as i64);
    let excluded = rows.iter().filter(|r| r.excluded).count();
    let pass = excluded == 0 && !rows.is_empty() && max_abs_gap.is_some_and(|g| g <= TRANSLATION_A + TRANSLATION_B);
    Ok(IdentityReport {
        caps,
        advice_cap,
        a: TRANSLATION_A,
        b: TRANSLATION_B,
        rows,
        max_abs_gap,
        upper_direction_ok,
        excluded,
        pass,
    })
}

/// Spearman rank correlation with mid-ranks for ties. `None` for fewer than
/// two points or a constant vector.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut out = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let mid = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                out[k] = mid;
            }
            i = j + 1;
        }
        out
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    (va > 0.0 && vb > 0.0).then(|| cov / (va * vb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{assemble_text, frame_program};

    fn small() -> Caps {
        Caps::new(14, 1 << 12)
    }

    #[test]
    fn khat_of_empty_is_the_empty_program() {
        let est = khat_exact(&BitString::new(), small()).unwrap();
        assert_eq!(est.bits(), Some(1));
        assert_eq!(est.witness, Some(BitString::from("1")));
        assert_eq!(est.tau_star, Some(0));
    }

    #[test]
    fn witnesses_reproduce_their_output() {
        let t = ProgramTable::shared(small()).unwrap();
        for (r, b) in t.ranked_outputs().take(500) {
            let out = run_machine(&b.program, small().step_budget);
            assert_eq!(out.output.as_ref(), Some(r));
            assert_eq!(out.steps, b.steps);
        }
    }

    #[test]
    fn halting_programs_bound_their_output() {
        let t = ProgramTable::shared(small()).unwrap();
        for (p, out) in t.runs() {
            if let Some(r) = &out.output {
                assert!(t.khat(r).unwrap() <= p.len() as u64);
            }
        }
    }

    #[test]
    fn caps_are_monotone() {
        let lo = ProgramTable::build(Caps::new(12, 256), None).unwrap();
        let hi = ProgramTable::build(Caps::new(14, 512), None).unwrap();
        for (r, b) in lo.ranked_outputs() {
            assert!(hi.khat(r).unwrap() <= b.len());
        }
    }

    #[test]
    fn hard_cap_is_enforced() {
        assert!(khat_exact(&BitString::new(), Caps::new(HARD_LENGTH_CAP + 1, 10)).is_err());
        assert!(ProgramTable::build(Caps::new(4, 0), None).is_err());
    }

    #[test]
    fn m_exact_examples() {
        let t = ProgramTable::shared(small()).unwrap();
        let x = Instance::from("01");
        let r0 = BitString::from("0110");
        let eq = m_exact_in(&t, &x, &Predicate::Equals { target: r0.clone() }, 0);
        assert_eq!(eq.value, khat_in(&t, &r0).value);
        let never = m_exact_in(&t, &x, &Predicate::Never, 0);
        assert_eq!(never.status, EstimateStatus::Infinite);
        assert_eq!(never.value, None);
        // brute force over all programs for nonempty responses
        let want = t
            .runs()
            .iter()
            .filter(|(_, o)| o.output.as_ref().is_some_and(|r| !r.is_empty()))
            .map(|(p, _)| p.len() as u64)
            .min();
        assert_eq!(m_exact_in(&t, &x, &Predicate::Nonempty, 0).bits(), want);
    }

    #[test]
    fn m_exact_reports_unknown_for_pending_stage() {
        let t = ProgramTable::shared(small()).unwrap();
        let x = Instance::from("000000001");
        // r_{8,1} pending below stage 2048; r_{8,0} costs at least as much
        let v = Predicate::FixtureCe { halting_budget: 4096 };
        let at_budget = m_exact_in(&t, &x, &v, 4096);
        let early = m_exact_in(&t, &x, &v, 10);
        assert!(at_budget.status == EstimateStatus::Exact || at_budget.status == EstimateStatus::Infinite);
        if at_budget.is_finite() && early.status != EstimateStatus::Exact {
            assert_eq!(early.status, EstimateStatus::UnknownAtBudget);
        }
    }

    #[test]
    fn mt_with_zero_time_matches_m() {
        let t = ProgramTable::shared(small()).unwrap();
        let x = Instance::from("1");
        let m = m_exact_in(&t, &x, &Predicate::Empty, 0);
        let mt = mt_exact_in(&t, &x, &Predicate::Empty, 0);
        assert_eq!(m.value, mt.value);
    }

    #[test]
    fn search_budget_theta() {
        let sb = SearchBudget::new(10).unwrap();
        assert_eq!(sb.theta(4), Some(63));
        assert_eq!(sb.theta(10), Some(0));
        assert_eq!(sb.theta(11), None);
        assert!(SearchBudget::new(63).is_err());
    }

    #[test]
    fn levin_finds_reference_witness() {
        use crate::executor::ReferenceExecutor;
        let x = Instance::from("0");
        let v = Predicate::Equals { target: "101".into() };
        let res = levin_value(&x, &ReferenceExecutor, &v, 12, 0).unwrap();
        // |w| = 8, tau = 8: 8 + log2(9) <= 12
        assert_eq!(res.value, Some(KtValue::timed(8, 8)));
        assert_eq!(res.witness, Some(BitString::from("00100101")));
        let res = levin_value(&x, &ReferenceExecutor, &v, 11, 0).unwrap();
        assert_eq!(res.value, None);
    }

    #[test]
    fn compressor_proxy() {
        let est = khat_compressor(&BitString::repeat(false, 1024), "lz78").unwrap();
        assert!(est.bits().unwrap() < 1024);
        // payload "1" plus |γ(2)| = 3
        assert_eq!(khat_compressor(&BitString::new(), "lz78").unwrap().bits(), Some(4));
        assert!(khat_compressor(&BitString::new(), "nope").is_err());
    }

    #[test]
    fn identity_audit_small() {
        let caps = small();
        let corpus: Vec<(String, Instance, Predicate)> = ["", "1", "0110", "111"]
            .iter()
            .map(|s| (format!("x{s}"), Instance::from(*s), Predicate::EqualsInstance))
            .chain([("empty".to_string(), Instance::from("0"), Predicate::Empty)])
            .collect();
        let rep = realizer_identity_audit(&corpus, caps).unwrap();
        assert!(rep.pass, "{rep:#?}");
        assert!(rep.upper_direction_ok);
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
    }

    #[test]
    fn literal_program_witness() {
        let t = ProgramTable::shared(small()).unwrap();
        let lit = frame_program(&assemble_text("LIT 1011").unwrap());
        assert!(t.khat(&"1011".into()).unwrap() <= lit.len() as u64);
    }
}
