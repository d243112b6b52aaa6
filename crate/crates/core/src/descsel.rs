//! Feature description plus selection.
//!
//! A feature system pairs a map `Φ(x, r) ∈ {0,1}^m` with a circuit `C`, so
//! that `V(x, r) = C(Φ(x, r))`. Realizers are ordered by an enumeration `π`
//! and `i_y(x)` is the first index realizing `y`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bitcode::BitString;
use crate::complexity::{khat_in, m_exact_in, Caps, ProgramTable};
use crate::error::{Error, Result};
use crate::validity::{Instance, Predicate};

/// Largest supported feature width.
pub const MAX_FEATURE_BITS: usize = 12;

/// Finite prototype sets `R_y`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrototypeTable {
    pub m: usize,
    pub entries: BTreeMap<BitString, Vec<BitString>>,
}

impl PrototypeTable {
    /// `R_y = {f(y)}` for every nonzero `y` of width `m`.
    pub fn from_fn(m: usize, f: impl Fn(&BitString) -> Vec<BitString>) -> Self {
        let entries = BitString::all_of_length(m).filter(|y| y.count_ones() > 0).map(|y| {
            let rs = f(&y);
            (y, rs)
        });
        Self { m, entries: entries.collect() }
    }

    /// The feature vector a response prototypes, if any.
    pub fn feature_of(&self, r: &BitString) -> Option<&BitString> {
        self.entries.iter().find(|(_, rs)| rs.contains(r)).map(|(y, _)| y)
    }

    pub fn members(&self) -> impl Iterator<Item = &BitString> {
        self.entries.values().flatten()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Availability {
    Always,
    /// `y` is available at `x` iff `val(y) ≥ val(φ(x))`.
    GeInstance,
}

/// Registered feature maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureMap {
    /// `m = 1`: parity of `r`.
    Parity,
    /// `m = 1`: whether `r` ends with `φ(x)`.
    SuffixMatch,
    /// First `m` bits of `r`, zero padded.
    PrefixWindow { m: usize },
    /// First `m` bits of `r` XOR first `m` bits of `φ(x)`, both zero padded.
    XorWindow { m: usize },
    /// `y` when `r ∈ R_y` and `y` is available at `x`, else `0^m`.
    Prototype { table: PrototypeTable, availability: Availability },
    /// `Φ(x, planted) = y`, otherwise the base map.
    Planted { base: Box<FeatureMap>, planted: BitString, y: BitString },
}

fn window(r: &BitString, m: usize) -> BitString {
    BitString::from_bits((0..m).map(|i| r.get(i).unwrap_or(false)).collect())
}

impl FeatureMap {
    pub fn m(&self) -> usize {
        match self {
            FeatureMap::Parity | FeatureMap::SuffixMatch => 1,
            FeatureMap::PrefixWindow { m } | FeatureMap::XorWindow { m } => *m,
            FeatureMap::Prototype { table, .. } => table.m,
            FeatureMap::Planted { base, .. } => base.m(),
        }
    }

    pub fn id(&self) -> String {
        match self {
            FeatureMap::Parity => "parity".into(),
            FeatureMap::SuffixMatch => "suffix_match".into(),
            FeatureMap::PrefixWindow { m } => format!("prefix_window{m}"),
            FeatureMap::XorWindow { m } => format!("xor_window{m}"),
            FeatureMap::Prototype { table, availability } => {
                format!("prototype{}:{}:{:?}", table.m, table.entries.len(), availability).to_lowercase()
            }
            FeatureMap::Planted { base, planted, y } => format!("planted:{}:{planted}:{y}", base.id()),
        }
    }

    pub fn eval(&self, x: &Instance, r: &BitString) -> BitString {
        match self {
            FeatureMap::Parity => BitString::from_bits(vec![r.count_ones() % 2 == 1]),
            FeatureMap::SuffixMatch => BitString::from_bits(vec![r.ends_with(x.bits())]),
            FeatureMap::PrefixWindow { m } => window(r, *m),
            FeatureMap::XorWindow { m } => {
                let (a, b) = (window(r, *m), window(x.bits(), *m));
                BitString::from_bits(a.bits().iter().zip(b.bits()).map(|(p, q)| p ^ q).collect())
            }
            FeatureMap::Prototype { table, availability } => {
                let zero = BitString::repeat(false, table.m);
                match table.feature_of(r) {
                    Some(y) if available(*availability, y, x) => y.clone(),
                    _ => zero,
                }
            }
            FeatureMap::Planted { base, planted, y } => {
                if r == planted {
                    y.clone()
                } else {
                    base.eval(x, r)
                }
            }
        }
    }
}

fn available(a: Availability, y: &BitString, x: &Instance) -> bool {
    match a {
        Availability::Always => true,
        Availability::GeInstance => {
            let xb = x.bits();
            // compare as integers of width max(|y|, |x|)
            let w = y.len().max(xb.len());
            let pad = |s: &BitString| BitString::repeat(false, w - s.len()).concat(s);
            pad(y).bits() >= pad(xb).bits()
        }
    }
}

/// Acceptance circuits over feature vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Circuit {
    Equals { y: BitString },
    AcceptSet { ys: Vec<BitString> },
    Nonzero,
    Any,
}

impl Circuit {
    pub fn accepts(&self, y: &BitString) -> bool {
        match self {
            Circuit::Equals { y: t } => y == t,
            Circuit::AcceptSet { ys } => ys.contains(y),
            Circuit::Nonzero => y.count_ones() > 0,
            Circuit::Any => true,
        }
    }

    fn id(&self) -> String {
        match self {
            Circuit::Equals { y } => format!("eq{y}"),
            Circuit::AcceptSet { ys } => format!("set{}", ys.len()),
            Circuit::Nonzero => "nonzero".into(),
            Circuit::Any => "any".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSystem {
    pub feature: FeatureMap,
    pub circuit: Circuit,
}

impl FeatureSystem {
    pub fn new(feature: FeatureMap, circuit: Circuit) -> Result<Self> {
        if feature.m() == 0 || feature.m() > MAX_FEATURE_BITS {
            return Err(Error::invalid(format!("feature width must be in 1..={MAX_FEATURE_BITS}")));
        }
        Ok(Self { feature, circuit })
    }

    pub fn id(&self) -> String {
        format!("{}/{}", self.feature.id(), self.circuit.id())
    }

    pub fn m(&self) -> usize {
        self.feature.m()
    }

    pub fn phi(&self, x: &Instance, r: &BitString) -> BitString {
        self.feature.eval(x, r)
    }

    pub fn accepts(&self, x: &Instance, r: &BitString) -> bool {
        self.circuit.accepts(&self.phi(x, r))
    }

    pub fn bind<'a>(&'a self, x: &'a Instance) -> impl Fn(&BitString) -> bool + Send + Sync + 'a {
        move |r| self.accepts(x, r)
    }

    pub fn predicate(&self) -> Predicate {
        Predicate::Feature { system: self.clone() }
    }

    /// Feature vectors accepted by the circuit.
    pub fn accepted_ys(&self) -> Vec<BitString> {
        BitString::all_of_length(self.m()).filter(|y| self.circuit.accepts(y)).collect()
    }
}

/// Computable bijections `π: ℕ≥1 → {0,1}*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Enumeration {
    /// `π(i)` is `bin(i)` without its leading 1.
    LengthLex,
    /// Length-lex with positions `2k−1` and `2k` exchanged.
    AdjacentSwap,
    /// Length-lex with each length block reversed.
    BlockReverse,
}

impl Enumeration {
    pub fn id(&self) -> &'static str {
        match self {
            Enumeration::LengthLex => "length_lex",
            Enumeration::AdjacentSwap => "adjacent_swap",
            Enumeration::BlockReverse => "block_reverse",
        }
    }

    fn base(i: u64) -> BitString {
        let len = 63 - i.leading_zeros() as usize;
        BitString::from_u64(i - (1u64 << len), len)
    }

    fn base_index(r: &BitString) -> u64 {
        (1u64 << r.len()) + r.to_u64()
    }

    pub fn pi(&self, i: u64) -> BitString {
        assert!(i >= 1, "enumerations start at 1");
        match self {
            Enumeration::LengthLex => Self::base(i),
            Enumeration::AdjacentSwap => Self::base(if i % 2 == 1 { i + 1 } else { i - 1 }),
            Enumeration::BlockReverse => {
                let len = 63 - i.leading_zeros();
                let lo = 1u64 << len;
                Self::base(lo + (2 * lo - 1 - i))
            }
        }
    }

    pub fn index_of(&self, r: &BitString) -> u64 {
        let i = Self::base_index(r);
        match self {
            Enumeration::LengthLex => i,
            Enumeration::AdjacentSwap => {
                if i % 2 == 1 {
                    i + 1
                } else {
                    i - 1
                }
            }
            Enumeration::BlockReverse => {
                let lo = 1u64 << r.len();
                lo + (2 * lo - 1 - i)
            }
        }
    }
}

/// `i_y(x) = min{i ≥ 1 : Φ(x, π(i)) = y}`, scanning at most `cap` indices.
pub fn selection_index(x: &Instance, y: &BitString, fs: &FeatureSystem, en: Enumeration, cap: u64) -> Option<u64> {
    (1..=cap).find(|&i| fs.phi(x, &en.pi(i)) == *y)
}

/// `⌈log2 i⌉` for `i ≥ 1`.
pub fn ceil_log2(i: u64) -> u64 {
    assert!(i >= 1);
    (64 - (i - 1).leading_zeros()) as u64
}

/// First indices of every feature vector at `x` within the cap, in one pass.
fn first_indices(x: &Instance, fs: &FeatureSystem, en: Enumeration, cap: u64) -> BTreeMap<BitString, u64> {
    let mut first = BTreeMap::new();
    let total = 1usize << fs.m();
    for i in 1..=cap {
        first.entry(fs.phi(x, &en.pi(i))).or_insert(i);
        if first.len() == total {
            break;
        }
    }
    first
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPartRow {
    pub y: BitString,
    pub khat_y: Option<u64>,
    pub index: Option<u64>,
    pub log_index: Option<u64>,
    pub total: Option<u64>,
    /// Infinite `K̂(y)` or index within the caps.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPartReport {
    pub enumeration: String,
    pub rows: Vec<TwoPartRow>,
    pub bound: Option<u64>,
    pub argmin_y: Option<BitString>,
    pub m_exact: Option<u64>,
    /// `m_exact − bound`.
    pub excess: Option<i64>,
    pub c_dsel: u64,
    pub pass: bool,
}

/// `min_y (K̂(y) + ⌈log i_y(x)⌉)` over accepted `y`, compared with `M̂(x)`.
pub fn two_part_bound(
    table: &ProgramTable,
    x: &Instance,
    fs: &FeatureSystem,
    en: Enumeration,
    index_cap: u64,
    c_dsel: u64,
) -> TwoPartReport {
    let first = first_indices(x, fs, en, index_cap);
    let rows: Vec<TwoPartRow> = fs
        .accepted_ys()
        .into_iter()
        .filter_map(|y| {
            let index = first.get(&y).copied()?;
            let khat_y = table.khat(&y);
            let log_index = ceil_log2(index);
            let total = khat_y.map(|k| k + log_index);
            Some(TwoPartRow { y, khat_y, index: Some(index), log_index: Some(log_index), total, flagged: khat_y.is_none() })
        })
        .collect();
    let best = rows.iter().filter_map(|r| r.total.map(|t| (t, &r.y))).min();
    let m = m_exact_in(table, x, &fs.predicate(), u64::MAX).bits();
    let bound = best.map(|b| b.0);
    let excess = match (m, bound) {
        (Some(m), Some(b)) => Some(m as i64 - b as i64),
        _ => None,
    };
    TwoPartReport {
        enumeration: en.id().into(),
        argmin_y: best.map(|b| b.1.clone()),
        rows,
        bound,
        m_exact: m,
        excess,
        c_dsel,
        pass: excess.is_some_and(|e| e <= c_dsel as i64),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalReport {
    pub y: BitString,
    pub khat_y_given_x: Option<u64>,
    pub fiber_min: Option<u64>,
    pub fiber_witness: Option<BitString>,
    /// `fiber_min − K̂(y|x)`.
    pub slack: Option<i64>,
    pub c_cond: u64,
    pub incomplete: bool,
    pub pass: bool,
}

/// Fiber minimum of `K̂(r)` against the conditional `K̂(y | x)`.
pub fn conditional_lb_audit(
    table: &ProgramTable,
    cond: &ProgramTable,
    x: &Instance,
    y: &BitString,
    fs: &FeatureSystem,
    c_cond: u64,
) -> ConditionalReport {
    let kyx = khat_in(cond, y).bits();
    let fiber = table.ranked_outputs().find(|(r, _)| fs.phi(x, r) == *y);
    let fiber_min = fiber.map(|(_, b)| b.len());
    let slack = match (fiber_min, kyx) {
        (Some(f), Some(k)) => Some(f as i64 - k as i64),
        _ => None,
    };
    ConditionalReport {
        y: y.clone(),
        khat_y_given_x: kyx,
        fiber_min,
        fiber_witness: fiber.map(|(r, _)| r.clone()),
        slack,
        c_cond,
        incomplete: slack.is_none(),
        pass: slack.is_some_and(|s| s >= -(c_cond as i64)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAmbiguityRow {
    pub x: Instance,
    pub feasible: Vec<BitString>,
    pub covered: bool,
    pub m_exact: Option<u64>,
    pub min_khat_y: Option<u64>,
    pub gap: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAmbiguityReport {
    pub rows: Vec<FiniteAmbiguityRow>,
    pub coverage_ok: bool,
    pub observed_c_fa: Option<u64>,
    pub c_fa: u64,
    pub excluded: usize,
    pub pass: bool,
}

/// Checks prototype coverage and `|M̂(x) − min_y K̂(y)| ≤ c_fa`.
///
/// Coverage is checked over the response universe up to `max_response_len`:
/// every feasible `y` seen there must also be realized by a prototype.
pub fn finite_ambiguity_check(
    table: &ProgramTable,
    xs: &[Instance],
    fs: &FeatureSystem,
    prototypes: &PrototypeTable,
    max_response_len: usize,
    c_fa: u64,
) -> FiniteAmbiguityReport {
    let mut rows = Vec::new();
    for x in xs {
        let mut feasible: Vec<BitString> = BitString::all_up_to(max_response_len)
            .map(|r| fs.phi(x, &r))
            .filter(|y| fs.circuit.accepts(y))
            .collect();
        feasible.sort();
        feasible.dedup();
        let covered = feasible.iter().all(|y| {
            prototypes.entries.get(y).is_some_and(|rs| rs.iter().any(|r| fs.phi(x, r) == *y))
        });
        let m = m_exact_in(table, x, &fs.predicate(), u64::MAX).bits();
        let min_khat_y = feasible.iter().filter_map(|y| table.khat(y)).min();
        let gap = match (m, min_khat_y) {
            (Some(m), Some(k)) => Some(m as i64 - k as i64),
            _ => None,
        };
        rows.push(FiniteAmbiguityRow { x: x.clone(), feasible, covered, m_exact: m, min_khat_y, gap });
    }
    let coverage_ok = rows.iter().all(|r| r.covered);
    let observed = rows.iter().filter_map(|r| r.gap).map(|g| g.unsigned_abs()).max();
    let excluded = rows.iter().filter(|r| r.gap.is_none()).count();
    let pass = coverage_ok && observed.is_some_and(|o| o <= c_fa);
    FiniteAmbiguityReport { rows, coverage_ok, observed_c_fa: observed, c_fa, excluded, pass }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub y: BitString,
    pub index: Option<u64>,
    pub threshold: Option<i64>,
    /// Fiber members (within the caps) with `K̂(r) ≤ threshold`.
    pub outliers: Vec<BitString>,
    /// `⌊i^(−α)⌋`, except that `i = 1` allows one.
    pub allowed: u64,
    pub generic: bool,
}

/// Counts compressed outliers in the fiber of `y` at `x`. The count is
/// compared with the bound read literally, so it allows zero outliers for
/// every `i ≥ 2`.
pub fn fiber_genericity_audit(
    table: &ProgramTable,
    x: &Instance,
    y: &BitString,
    fs: &FeatureSystem,
    en: Enumeration,
    index_cap: u64,
    c: u64,
    alpha: f64,
) -> GenericityReport {
    let index = selection_index(x, y, fs, en, index_cap);
    let threshold = match (index, table.khat(y)) {
        (Some(i), Some(k)) => Some(k as i64 + ceil_log2(i) as i64 - c as i64),
        _ => None,
    };
    let outliers: Vec<BitString> = match threshold {
        Some(t) => table
            .ranked_outputs()
            .take_while(|(_, b)| (b.len() as i64) <= t)
            .filter(|(r, _)| fs.phi(x, r) == *y)
            .map(|(r, _)| r.clone())
            .collect(),
        None => Vec::new(),
    };
    let allowed = match index {
        Some(i) => (i as f64).powf(-alpha).floor() as u64,
        None => 0,
    };
    GenericityReport {
        y: y.clone(),
        index,
        threshold,
        generic: outliers.len() as u64 <= allowed,
        outliers,
        allowed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionRow {
    pub x: Instance,
    pub min_base: Option<u64>,
    pub min_alt: Option<u64>,
    pub max_ratio: Option<BigRational>,
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub base: String,
    pub alt: String,
    /// `D` as an exact ratio.
    pub d: BigRational,
    pub ceil_log2_d: u64,
    pub max_difference: u64,
    pub c_en: u64,
    pub rows: Vec<DistortionRow>,
    pub pass: bool,
}

/// `⌈log2 q⌉` for a rational `q ≥ 1`.
pub fn ceil_log2_ratio(q: &BigRational) -> u64 {
    assert!(*q >= BigRational::one());
    let mut k = 0u64;
    let mut pow = BigRational::one();
    while pow < *q {
        pow *= BigRational::from_integer(2.into());
        k += 1;
    }
    k
}

/// Measures the index distortion `D` between two enumerations over the
/// instances and checks the shift of the two-part minimum.
pub fn enumeration_distortion(
    table: &ProgramTable,
    xs: &[Instance],
    fs: &FeatureSystem,
    base: Enumeration,
    alt: Enumeration,
    index_cap: u64,
    c_en: u64,
) -> DistortionReport {
    let mut d = BigRational::one();
    let mut rows = Vec::new();
    let mut max_difference = 0u64;
    let min_of = |first: &BTreeMap<BitString, u64>| {
        fs.accepted_ys()
            .iter()
            .filter_map(|y| Some(table.khat(y)? + ceil_log2(*first.get(y)?)))
            .min()
    };
    for x in xs {
        let f1 = first_indices(x, fs, base, index_cap);
        let f2 = first_indices(x, fs, alt, index_cap);
        let mut row_ratio: Option<BigRational> = None;
        let mut excluded = false;
        for y in fs.accepted_ys() {
            match (f1.get(&y), f2.get(&y)) {
                (Some(&i), Some(&j)) => {
                    let (i, j) = (BigUint::from(i), BigUint::from(j));
                    let r = if i >= j {
                        BigRational::new(i.into(), j.into())
                    } else {
                        BigRational::new(j.into(), i.into())
                    };
                    if row_ratio.as_ref().is_none_or(|m| r > *m) {
                        row_ratio = Some(r);
                    }
                }
                (None, None) => {}
                _ => excluded = true,
            }
        }
        let (m1, m2) = (min_of(&f1), min_of(&f2));
        if let (Some(a), Some(b)) = (m1, m2) {
            max_difference = max_difference.max(a.abs_diff(b));
        }
        if let Some(r) = &row_ratio {
            if *r > d {
                d = r.clone();
            }
        }
        rows.push(DistortionRow { x: x.clone(), min_base: m1, min_alt: m2, max_ratio: row_ratio, excluded });
    }
    let ceil_log2_d = ceil_log2_ratio(&d);
    DistortionReport {
        base: base.id().into(),
        alt: alt.id().into(),
        d,
        ceil_log2_d,
        max_difference,
        c_en,
        pass: max_difference <= ceil_log2_d + c_en,
        rows,
    }
}

/// Lossy conversion for display.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    if q.denom().is_zero() {
        return f64::NAN;
    }
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// Tables shared by the descsel audits.
pub fn tables(caps: Caps) -> Result<std::sync::Arc<ProgramTable>> {
    ProgramTable::shared(caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parity() -> FeatureSystem {
        FeatureSystem::new(FeatureMap::Parity, Circuit::Equals { y: "1".into() }).unwrap()
    }

    #[test]
    fn selection_index_examples() {
        let fs = parity();
        let x = Instance::from("0");
        assert_eq!(selection_index(&x, &"1".into(), &fs, Enumeration::LengthLex, 100), Some(3));
        assert_eq!(selection_index(&x, &"0".into(), &fs, Enumeration::LengthLex, 100), Some(1));
        let suffix = FeatureSystem::new(FeatureMap::SuffixMatch, Circuit::Equals { y: "1".into() }).unwrap();
        let x = Instance::from("0110");
        // the first string ending in 0110 is 0110 itself
        assert_eq!(selection_index(&x, &"1".into(), &suffix, Enumeration::LengthLex, 1000), Some(0b10110));
        assert_eq!(selection_index(&x, &"1".into(), &suffix, Enumeration::LengthLex, 10), None);
        let xor = FeatureSystem::new(FeatureMap::XorWindow { m: 2 }, Circuit::Any).unwrap();
        // y = 11 needs a response of length 2 differing from x in both bits
        assert_eq!(selection_index(&Instance::from("0"), &"11".into(), &xor, Enumeration::LengthLex, 2), None);
    }

    #[test]
    fn selection_index_stable_under_larger_cap() {
        let fs = FeatureSystem::new(FeatureMap::PrefixWindow { m: 3 }, Circuit::Any).unwrap();
        let x = Instance::from("1");
        for y in BitString::all_of_length(3) {
            let a = selection_index(&x, &y, &fs, Enumeration::BlockReverse, 40);
            if a.is_some() {
                assert_eq!(selection_index(&x, &y, &fs, Enumeration::BlockReverse, 4000), a);
            }
        }
    }

    #[test]
    fn enumerations_are_bijections_on_a_prefix() {
        for en in [Enumeration::LengthLex, Enumeration::AdjacentSwap, Enumeration::BlockReverse] {
            let mut seen = std::collections::HashSet::new();
            for i in 1..=(1u64 << 16) {
                let r = en.pi(i);
                assert_eq!(en.index_of(&r), i, "{}", en.id());
                assert!(seen.insert(r));
            }
        }
        // a full block maps onto itself
        let block: std::collections::BTreeSet<_> = (8..16).map(|i| Enumeration::BlockReverse.pi(i)).collect();
        assert_eq!(block, BitString::all_of_length(3).collect());
    }

    #[test]
    fn ceil_logs() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        let q = BigRational::new(3.into(), 2.into());
        assert_eq!(ceil_log2_ratio(&q), 1);
        assert_eq!(ceil_log2_ratio(&BigRational::one()), 0);
        assert_eq!(ceil_log2_ratio(&BigRational::new(9.into(), 2.into())), 3);
    }

    #[test]
    fn availability_ge_instance() {
        let y: BitString = "0101".into();
        assert!(available(Availability::GeInstance, &y, &Instance::from("101")));
        assert!(available(Availability::GeInstance, &y, &Instance::from("0101")));
        assert!(!available(Availability::GeInstance, &y, &Instance::from("110")));
    }

    #[test]
    fn circuit_and_feature_agree_with_registered_predicates() {
        let fs = parity();
        let v = fs.predicate();
        for xs in ["", "01", "1101"] {
            let x = Instance::from(xs);
            for r in BitString::all_up_to(10) {
                assert_eq!(v.accepts(&x, &r), Predicate::OddParity.accepts(&x, &r));
            }
        }
        let suffix = FeatureSystem::new(FeatureMap::SuffixMatch, Circuit::Equals { y: "1".into() }).unwrap();
        let x = Instance::from("01");
        let want = |r: &BitString| r.ends_with(&"01".into());
        for r in BitString::all_up_to(10) {
            assert_eq!(suffix.accepts(&x, &r), want(&r));
        }
    }

    #[test]
    fn planted_realizer_is_detected() {
        // 0^16 is cheap at cap 20 but sits far past the suffix selection
        let planted = BitString::repeat(false, 16);
        let fs = FeatureSystem::new(
            FeatureMap::Planted { base: Box::new(FeatureMap::SuffixMatch), planted: planted.clone(), y: "1".into() },
            Circuit::Equals { y: "1".into() },
        )
        .unwrap();
        let t = ProgramTable::shared(Caps::default()).unwrap();
        let x = Instance::from("1011011101");
        let rep = fiber_genericity_audit(&t, &x, &"1".into(), &fs, Enumeration::LengthLex, 1 << 12, 0, 1.0);
        assert_eq!(rep.index, Some(1757));
        assert!(rep.outliers.contains(&planted), "{rep:?}");
        assert!(!rep.generic);
    }

    #[test]
    fn identical_enumerations_have_unit_distortion() {
        let t = ProgramTable::shared(Caps::new(14, 1 << 12)).unwrap();
        let fs = FeatureSystem::new(FeatureMap::PrefixWindow { m: 2 }, Circuit::Nonzero).unwrap();
        let xs = [Instance::from("0"), Instance::from("11")];
        let rep = enumeration_distortion(&t, &xs, &fs, Enumeration::LengthLex, Enumeration::LengthLex, 64, 0);
        assert_eq!(rep.d, BigRational::one());
        assert_eq!(rep.max_difference, 0);
        assert!(rep.pass);
        let rep = enumeration_distortion(&t, &xs, &fs, Enumeration::LengthLex, Enumeration::AdjacentSwap, 64, 0);
        assert!(rep.d <= BigRational::from_integer(2.into()));
    }

    #[test]
    fn feature_system_json() {
        let fs: FeatureSystem = serde_json::from_str(
            r#"{"feature":{"kind":"xor_window","m":3},"circuit":{"kind":"equals","y":"000"}}"#,
        )
        .unwrap();
        assert_eq!(fs.m(), 3);
        assert!(fs.accepts(&Instance::from("101"), &"101".into()));
        assert!(FeatureSystem::new(FeatureMap::PrefixWindow { m: 13 }, Circuit::Any).is_err());
    }

    proptest! {
        #[test]
        fn selection_index_is_first_hit(xs in "[01]{0,4}", m in 1usize..4, seed in 0u64..8) {
            let x = Instance::from(xs.as_str());
            let fs = FeatureSystem::new(FeatureMap::XorWindow { m }, Circuit::Any).unwrap();
            let y = BitString::from_u64(seed % (1 << m), m);
            if let Some(i) = selection_index(&x, &y, &fs, Enumeration::AdjacentSwap, 200) {
                prop_assert_eq!(fs.phi(&x, &Enumeration::AdjacentSwap.pi(i)), y.clone());
                for j in 1..i {
                    prop_assert_ne!(fs.phi(&x, &Enumeration::AdjacentSwap.pi(j)), y.clone());
                }
            }
        }
    }
}
