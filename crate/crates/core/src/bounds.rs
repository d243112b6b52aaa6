//! Converse bounds and the selection model.
//!
//! Entropy and code lengths are in bits. `gc_required` uses the natural log.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitcode::BitString;
use crate::complexity::{m_exact_in, ProgramTable};
use crate::descsel::{ceil_log2, ceil_log2_ratio, selection_index, Enumeration, FeatureSystem};
use crate::error::{Error, Result};
use crate::executor::{advice_burden_in, AdviceTable, Burden, Executor};
use crate::naq::{naq_midrank, MValue, Pool, Rational};
use crate::validity::{Instance, Predicate};

const PROB_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    atoms: Vec<(String, f64)>,
    support_size: usize,
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<(String, f64)>) -> Result<Self> {
        let n = atoms.len();
        Self::with_support(atoms, n)
    }

    /// `support_size` may exceed the number of listed atoms (zero-mass labels).
    pub fn with_support(atoms: Vec<(String, f64)>, support_size: usize) -> Result<Self> {
        if atoms.iter().any(|(_, p)| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid("probabilities must be finite and nonnegative"));
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        if support_size < atoms.len() {
            return Err(Error::invalid("support smaller than the atom list"));
        }
        Ok(Self { atoms, support_size })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("empty support"));
        }
        Self::new((0..n).map(|i| (i.to_string(), 1.0 / n as f64)).collect())
    }

    pub fn atoms(&self) -> &[(String, f64)] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.support_size
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

pub fn entropy(d: &DiscreteDistribution) -> f64 {
    d.atoms.iter().map(|(_, p)| plogp(*p)).sum()
}

pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::invalid("binary entropy needs 0 <= eps <= 1"));
    }
    Ok(plogp(eps) + plogp(1.0 - eps))
}

pub const DEFAULT_KRAFT_SLACK: f64 = 1.0;

/// `max(0, H − h(ε) − ε log2(|Y|−1) − slack)`.
pub fn fano_lower_bound(h: f64, epsilon: f64, support: u64, kraft_slack: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid("need 0 <= epsilon < 1"));
    }
    if support < 2 {
        return Err(Error::invalid("support must have at least two labels"));
    }
    if !(h >= 0.0) || h > (support as f64).log2() + PROB_TOL {
        return Err(Error::invalid(format!("entropy {h} is inconsistent with support {support}")));
    }
    let v = h - binary_entropy(epsilon)? - epsilon * ((support - 1) as f64).log2() - kraft_slack;
    Ok(v.max(0.0))
}

/// Certified lower bound on a burden. Beyond the advice cap it is `max_len + 1`;
/// an undecided staged search certifies nothing.
fn burden_floor(b: &Burden) -> u64 {
    match b {
        Burden::Exact { value, .. } => *value,
        Burden::Infinite { max_len } => *max_len as u64 + 1,
        Burden::UnknownAtBudget { .. } => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionCertificate {
    pub n: u32,
    pub c: u64,
    /// Strings shorter than `n − c`: `2^(n−c) − 1`.
    pub short_advice: u64,
    pub identifiers: u64,
    /// Two identifiers the canonical map `s ↦ π(rank(s) mod short_advice)`
    /// sends to the same short advice string.
    pub s: BitString,
    pub s_prime: BitString,
    pub shared_advice: BitString,
    /// An identifier no short advice reaches under the executor.
    pub uncovered: Option<BitString>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityFamilyReport {
    pub n: u32,
    pub executor: String,
    pub max_len: usize,
    pub c_id: u64,
    pub burdens: Vec<(BitString, Burden)>,
    /// Supremum of the burden, counting out-of-cap instances as `max_len + 1`.
    pub sup_lower: u64,
    pub argmax: BitString,
    /// Mid-rank of the argmax within the family pool.
    pub argmax_naq: Rational,
    pub certificate: CollisionCertificate,
    pub pass: bool,
}

fn short_string(k: u64) -> BitString {
    crate::validity::length_lex_nth(k)
}

/// Exhaustive burden over `x_s = s`, `F_s = {s·1}`, for `s ∈ {0,1}^n`.
pub fn identity_family_bound(n: u32, e: &dyn Executor, max_len: usize, c_id: u64) -> Result<IdentityFamilyReport> {
    if n > 12 {
        return Err(Error::invalid("identity family is exhaustive only up to n = 12"));
    }
    if max_len < n as usize {
        return Err(Error::invalid("max_len must be at least n"));
    }
    let table = AdviceTable::build(e, max_len);
    let v = Predicate::IdentityFamily;
    let burdens: Vec<(BitString, Burden)> = BitString::all_of_length(n as usize)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|s| {
            let b = advice_burden_in(&table, &v, &Instance::binary(s.clone()), 0);
            (s, b)
        })
        .collect();
    let (argmax, sup_lower) = burdens
        .iter()
        .map(|(s, b)| (s.clone(), burden_floor(b)))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .expect("family is nonempty");
    let pool = Pool::from_bits(&burdens.iter().map(|(_, b)| burden_floor(b)).collect::<Vec<_>>());
    let argmax_naq = naq_midrank(MValue::bits(sup_lower), &pool)?;
    let certificate = pigeonhole_certificate(n, c_id, &table);
    Ok(IdentityFamilyReport {
        n,
        executor: e.id().to_string(),
        max_len,
        c_id,
        pass: sup_lower + c_id >= n as u64,
        burdens,
        sup_lower,
        argmax,
        argmax_naq,
        certificate,
    })
}

fn pigeonhole_certificate(n: u32, c: u64, table: &AdviceTable) -> CollisionCertificate {
    let k = (n as u64).saturating_sub(c);
    let short_advice = (1u64 << k) - 1;
    let identifiers = 1u64 << n;
    // identifiers 0 and short_advice collide once there are more identifiers than
    // short strings; with no short strings at all, everything maps to nothing
    let (s, s_prime, shared) = if short_advice == 0 {
        (BitString::from_u64(0, n as usize), BitString::from_u64(1 % identifiers, n as usize), BitString::new())
    } else {
        (
            BitString::from_u64(0, n as usize),
            BitString::from_u64(short_advice % identifiers, n as usize),
            short_string(0),
        )
    };
    let reached: std::collections::BTreeSet<BitString> = table
        .entries
        .iter()
        .filter(|(w, _)| (w.len() as u64) < k)
        .filter_map(|(_, r)| {
            let b = r.bits();
            (b.len() == n as usize + 1 && b[n as usize]).then(|| r.slice(0, n as usize))
        })
        .collect();
    let uncovered = BitString::all_of_length(n as usize).find(|s| !reached.contains(s));
    CollisionCertificate {
        n,
        c,
        short_advice,
        identifiers,
        s,
        s_prime,
        shared_advice: shared,
        uncovered,
    }
}

/// Rechecks a certificate from scratch against an executor.
pub fn verify_certificate(cert: &CollisionCertificate, e: &dyn Executor) -> bool {
    let n = cert.n as usize;
    let k = (cert.n as u64).saturating_sub(cert.c);
    let count_ok = cert.short_advice == (1u64 << k) - 1
        && cert.identifiers == 1u64 << n
        && cert.short_advice < cert.identifiers;
    let canon = |s: &BitString| {
        if cert.short_advice == 0 {
            BitString::new()
        } else {
            short_string(s.to_u64() % cert.short_advice)
        }
    };
    let collide = cert.s != cert.s_prime
        && cert.s.len() == n
        && cert.s_prime.len() == n
        && canon(&cert.s) == cert.shared_advice
        && canon(&cert.s_prime) == cert.shared_advice;
    // one response cannot satisfy two disjoint singleton targets
    let disjoint = cert.s.concat(&"1".into()) != cert.s_prime.concat(&"1".into());
    let uncovered_ok = match &cert.uncovered {
        None => false,
        Some(s) => {
            let target = s.concat(&"1".into());
            (0..k as usize).all(|l| e.domain_of_length(l).iter().all(|w| e.eval(w) != target))
        }
    };
    count_ok && collide && disjoint && uncovered_ok
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub x: Instance,
    pub m: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PanelReport {
    Checked {
        size: usize,
        c_vp: u64,
        rows: Vec<PanelRow>,
        max_m: Option<u64>,
        bound: u64,
        pass: bool,
    },
    /// Some response is feasible for two panel members.
    PreconditionViolated { overlap: usize, response: BitString, members: Vec<Instance> },
}

impl PanelReport {
    pub fn pass(&self) -> bool {
        matches!(self, PanelReport::Checked { pass: true, .. })
    }
}

/// `max_{x∈S} M̂(x) ≥ ⌈log2|S|⌉ − c_vp`, after checking `Δ(S) = 1` over every
/// response the table can produce.
pub fn variant_panel_bound(panel: &[(Instance, Predicate)], table: &ProgramTable, c_vp: u64) -> Result<PanelReport> {
    if panel.is_empty() {
        return Err(Error::invalid("empty panel"));
    }
    for (r, _) in table.ranked_outputs() {
        let members: Vec<Instance> = panel.iter().filter(|(x, v)| v.accepts(x, r)).map(|(x, _)| x.clone()).collect();
        if members.len() > 1 {
            return Ok(PanelReport::PreconditionViolated { overlap: members.len(), response: r.clone(), members });
        }
    }
    let rows: Vec<PanelRow> = panel
        .iter()
        .map(|(x, v)| PanelRow { x: x.clone(), m: m_exact_in(table, x, v, 0).bits() })
        .collect();
    let max_m = rows.iter().filter_map(|r| r.m).max();
    let bound = ceil_log2(panel.len() as u64).saturating_sub(c_vp);
    Ok(PanelReport::Checked {
        size: panel.len(),
        c_vp,
        pass: max_m.is_some_and(|m| m >= bound),
        rows,
        max_m,
        bound,
    })
}

/// Greedy lexicode: the first `count` words of length `len` at pairwise
/// Hamming distance at least `dist`.
pub fn lexicode(len: usize, dist: usize, count: usize) -> Vec<BitString> {
    let mut code: Vec<BitString> = Vec::new();
    for w in BitString::all_of_length(len) {
        if code.len() == count {
            break;
        }
        if code.iter().all(|c| crate::validity::hamming(c, &w) >= dist) {
            code.push(w);
        }
    }
    code
}

/// Panel of lexicode centers with Hamming-ball feasibility of radius `rho`.
pub fn separated_panel(size: usize, len: usize, rho: usize) -> Vec<(Instance, Predicate)> {
    lexicode(len, 2 * rho + 1, size)
        .into_iter()
        .map(|c| (Instance::binary(c), Predicate::HammingBall { center: None, radius: rho }))
        .collect()
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("success probability must satisfy 0 < p <= 1"))
    }
}

/// `1 − (1 − p)^n`.
pub fn gc_success(p: f64, n: u64) -> Result<f64> {
    check_p(p)?;
    if n == 0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    Ok(-((-p).ln_1p() * n as f64).exp_m1())
}

/// `⌈(1/p) ln(1/ε)⌉`.
pub fn gc_required(p: f64, eps: f64) -> Result<u64> {
    check_p(p)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("need 0 < eps < 1"));
    }
    Ok(((1.0 / eps).ln() / p).ceil() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateCount {
    Fixed { n: u64 },
    /// Uniform on `lo..=hi`.
    Uniform { lo: u64, hi: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionModel {
    pub p: f64,
    pub candidates: CandidateCount,
    pub epsilon: f64,
}

impl SelectionModel {
    pub fn fixed(p: f64, n: u64) -> Self {
        Self { p, candidates: CandidateCount::Fixed { n }, epsilon: 0.05 }
    }

    pub fn closed_form(&self) -> Result<f64> {
        match self.candidates {
            CandidateCount::Fixed { n } => gc_success(self.p, n),
            CandidateCount::Uniform { lo, hi } => {
                if lo > hi {
                    return Err(Error::invalid("empty candidate range"));
                }
                let mut total = 0.0;
                for n in lo..=hi {
                    total += gc_success(self.p, n)?;
                }
                Ok(total / (hi - lo + 1) as f64)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcSimulation {
    pub model: SelectionModel,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
    pub closed_form: f64,
    pub sigma: f64,
    pub z: f64,
    pub within_3_sigma: bool,
    pub required: u64,
}

fn trial(model: &SelectionModel, seed: u64, t: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    let n = match model.candidates {
        CandidateCount::Fixed { n } => n,
        CandidateCount::Uniform { lo, hi } => rng.gen_range(lo..=hi),
    };
    (0..n).any(|_| rng.gen_bool(model.p))
}

/// Seeded Monte Carlo of the selection model. Trial `t` uses its own stream,
/// so the result does not depend on the worker count.
pub fn gc_simulate(model: SelectionModel, trials: u64, seed: u64) -> Result<GcSimulation> {
    check_p(model.p)?;
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let closed_form = model.closed_form()?;
    let successes = (0..trials).into_par_iter().filter(|&t| trial(&model, seed, t)).count() as u64;
    let frequency = successes as f64 / trials as f64;
    let sigma = (closed_form * (1.0 - closed_form) / trials as f64).sqrt();
    let diff = (frequency - closed_form).abs();
    let z = if sigma > 0.0 { diff / sigma } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
    Ok(GcSimulation {
        model,
        seed,
        trials,
        successes,
        frequency,
        closed_form,
        sigma,
        z,
        within_3_sigma: diff <= 3.0 * sigma + 1e-12,
        required: gc_required(model.p, model.epsilon)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexVsP {
    pub x: Instance,
    pub y: BitString,
    pub enumeration: String,
    pub length_cap: usize,
    pub index: Option<u64>,
    pub log_index: Option<u64>,
    /// `p` as an exact ratio of masses scaled by `2^cap`.
    pub fiber_mass: BigUint,
    pub total_mass: BigUint,
    pub log_inv_p: Option<u64>,
    pub gap: Option<i64>,
    /// Zero fiber mass or no selection index within the caps.
    pub incomplete: bool,
}

/// Compares `⌈log2 i⌉` with `⌈log2(1/p)⌉` under the semimeasure
/// `2^(−K̂(r))` truncated to the table and renormalized.
pub fn gc_index_vs_p(
    table: &ProgramTable,
    x: &Instance,
    y: &BitString,
    fs: &FeatureSystem,
    en: Enumeration,
    index_cap: u64,
) -> IndexVsP {
    let cap = table.caps.length_cap as u64;
    let mut fiber = BigUint::zero();
    let mut total = BigUint::zero();
    for (r, b) in table.ranked_outputs() {
        let mass = BigUint::one() << (cap - b.len()) as usize;
        if fs.phi(x, r) == *y {
            fiber += &mass;
        }
        total += mass;
    }
    let index = selection_index(x, y, fs, en, index_cap);
    let log_index = index.map(ceil_log2);
    let log_inv_p = (!fiber.is_zero()).then(|| {
        let q = BigRational::new(total.clone().into(), fiber.clone().into());
        ceil_log2_ratio(&q)
    });
    let gap = match (log_index, log_inv_p) {
        (Some(a), Some(b)) => Some(a as i64 - b as i64),
        _ => None,
    };
    IndexVsP {
        x: x.clone(),
        y: y.clone(),
        enumeration: en.id().to_string(),
        length_cap: table.caps.length_cap,
        index,
        log_index,
        incomplete: gap.is_none(),
        fiber_mass: fiber,
        total_mass: total,
        log_inv_p,
        gap,
    }
}
