//! Mid-rank quantiles over pools of complexity values.
//!
//! All cdf and rank arithmetic is exact; floating point appears only in the
//! DKW exponentials.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kt::KtValue;

pub type Rational = Ratio<u64>;

/// A pool value: finite (bits, optionally with a time term) or infinite.
/// Infinite entries are excluded from every quantile and counted apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MValue {
    Finite(KtValue),
    Infinite,
}

impl MValue {
    pub fn bits(b: u64) -> Self {
        MValue::Finite(KtValue::bits(b))
    }

    pub fn finite(&self) -> Option<KtValue> {
        match self {
            MValue::Finite(v) => Some(*v),
            MValue::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub id: String,
    pub m: MValue,
    pub method: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pool {
    entries: Vec<PoolEntry>,
}

impl Pool {
    pub fn new(entries: Vec<PoolEntry>) -> Self {
        Self { entries }
    }

    /// Anonymous pool of plain bit values.
    pub fn from_bits(values: &[u64]) -> Self {
        Self::from_values(values.iter().map(|&b| MValue::bits(b)))
    }

    pub fn from_values(values: impl IntoIterator<Item = MValue>) -> Self {
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(i, m)| PoolEntry { id: format!("e{i}"), m, method: "given".into() })
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    /// Finite values, sorted.
    pub fn finite_values(&self) -> Vec<KtValue> {
        let mut v: Vec<KtValue> = self.entries.iter().filter_map(|e| e.m.finite()).collect();
        v.sort();
        v
    }

    /// Number of finite entries; the `|T|` of every quantile.
    pub fn size(&self) -> usize {
        self.entries.iter().filter(|e| e.m.finite().is_some()).count()
    }

    pub fn infinite_count(&self) -> usize {
        self.entries.len() - self.size()
    }

    pub fn get(&self, id: &str) -> Option<&PoolEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    fn nonempty(&self) -> Result<u64> {
        match self.size() {
            0 => Err(Error::invalid("pool has no finite entries")),
            n => Ok(n as u64),
        }
    }

    /// `(#less, #equal)` for a value, over finite entries.
    fn counts(&self, m: KtValue) -> (u64, u64) {
        let mut less = 0;
        let mut equal = 0;
        for v in self.entries.iter().filter_map(|e| e.m.finite()) {
            if v < m {
                less += 1;
            } else if v == m {
                equal += 1;
            }
        }
        (less, equal)
    }
}

/// A query point of the cdf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Z {
    Value(KtValue),
    Infinity,
}

/// `F̂_T(z) = #{m ≤ z} / |T|` over finite entries.
pub fn empirical_cdf(pool: &Pool, z: Z) -> Result<Rational> {
    let n = pool.nonempty()?;
    let count = match z {
        Z::Infinity => n,
        Z::Value(z) => {
            let (less, equal) = pool.counts(z);
            less + equal
        }
    };
    Ok(Rational::new(count, n))
}

/// `(#{m' < m} + ½ #{m' = m}) / |T|`.
pub fn naq_midrank(m: MValue, pool: &Pool) -> Result<Rational> {
    let MValue::Finite(m) = m else {
        return Err(Error::invalid("an infinite value has no quantile; the instance lies outside the domain"));
    };
    let n = pool.nonempty()?;
    let (less, equal) = pool.counts(m);
    Ok(Rational::new(2 * less + equal, 2 * n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub size: u64,
    pub max_gap: Rational,
    pub tie_free_bound: Rational,
    /// Largest tie multiplicity `k`; the gap at a tied value is `k / (2|T|)`.
    pub max_tie_multiplicity: u64,
    pub tie_adjusted_bound: Rational,
    pub within_tie_free_bound: bool,
    pub within_tie_adjusted_bound: bool,
}

/// Max over members of `|NAQ − F̂(m)|`, with tie multiplicities.
pub fn midrank_vs_cdf_gap(pool: &Pool) -> Result<GapReport> {
    let n = pool.nonempty()?;
    let values = pool.finite_values();
    let mut max_gap = Rational::from_integer(0);
    let mut max_tie = 0;
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        while j < values.len() && values[j] == values[i] {
            j += 1;
        }
        let k = (j - i) as u64;
        max_tie = max_tie.max(k);
        let naq = naq_midrank(MValue::Finite(values[i]), pool)?;
        let cdf = empirical_cdf(pool, Z::Value(values[i]))?;
        let gap = if cdf > naq { cdf - naq } else { naq - cdf };
        max_gap = max_gap.max(gap);
        i = j;
    }
    let tie_free_bound = Rational::new(1, 2 * n);
    let tie_adjusted_bound = Rational::new(max_tie, 2 * n);
    Ok(GapReport {
        size: n,
        max_gap,
        tie_free_bound,
        max_tie_multiplicity: max_tie,
        tie_adjusted_bound,
        within_tie_free_bound: max_gap <= tie_free_bound,
        within_tie_adjusted_bound: max_gap <= tie_adjusted_bound,
    })
}

pub fn bucket_of(bits: u64, width: u64) -> u64 {
    bits / width
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketAudit {
    pub width: u64,
    pub c: u64,
    pub buckets_a: Vec<u64>,
    pub buckets_b: Vec<u64>,
    /// Entries whose bucket differs between the vectors.
    pub crossed: Vec<usize>,
    /// Entries of `a` within `c` of a bucket boundary.
    pub near_boundary: Vec<usize>,
    pub max_perturbation: u64,
    pub orders_coincide: bool,
    /// No near-boundary entries and perturbation within `c < b`.
    pub precondition_holds: bool,
}

/// Bucket indices `⌊m/b⌋` for a vector of values.
pub fn bucketize(values: &[u64], width: u64) -> Result<Vec<u64>> {
    if width == 0 {
        return Err(Error::invalid("bucket width must be at least 1"));
    }
    Ok(values.iter().map(|&v| bucket_of(v, width)).collect())
}

/// Coarse-invariance audit between two value vectors with a certified
/// perturbation `c`. Rank coincidence is only promised when no entry sits
/// within `c` of a bucket boundary.
pub fn bucket_audit(a: &[u64], b: &[u64], width: u64, c: u64) -> Result<BucketAudit> {
    if a.len() != b.len() {
        return Err(Error::invalid("value vectors differ in length"));
    }
    let ba = bucketize(a, width)?;
    let bb = bucketize(b, width)?;
    let crossed = (0..a.len()).filter(|&i| ba[i] != bb[i]).collect();
    let near_boundary: Vec<usize> = (0..a.len())
        .filter(|&i| {
            let r = a[i] % width;
            r < c || width - r <= c
        })
        .collect();
    let max_perturbation = a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0);
    let order = |v: &[u64]| -> Vec<std::cmp::Ordering> {
        let mut out = Vec::new();
        for i in 0..v.len() {
            for j in 0..v.len() {
                out.push(v[i].cmp(&v[j]));
            }
        }
        out
    };
    Ok(BucketAudit {
        width,
        c,
        orders_coincide: order(&ba) == order(&bb),
        precondition_holds: near_boundary.is_empty() && max_perturbation <= c && c < width,
        buckets_a: ba,
        buckets_b: bb,
        crossed,
        near_boundary,
        max_perturbation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub z: KtValue,
    pub cdf_t: Rational,
    pub cdf_t_prime: Rational,
    pub lower: Rational,
    pub upper: Rational,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub size_t: u64,
    pub size_t_prime: u64,
    pub rows: Vec<StabilityRow>,
    pub violations: usize,
    /// Smallest slack across both inequalities and all grid points.
    pub worst_slack: Rational,
    pub pass: bool,
}

/// Both inputs sorted; equality is value equality.
fn is_submultiset(t: &[KtValue], tp: &[KtValue]) -> bool {
    let mut j = 0;
    for v in t {
        while j < tp.len() && tp[j] < *v {
            j += 1;
        }
        if j == tp.len() || tp[j] != *v {
            return false;
        }
        j += 1;
    }
    true
}

/// Checks `(|T|/|T'|) F̂_T(z) ≤ F̂_T'(z) ≤ F̂_T(z) + (|T'|−|T|)/|T'|` on a grid.
pub fn pool_stability_check(t: &Pool, t_prime: &Pool, z_grid: &[KtValue]) -> Result<StabilityReport> {
    let n = t.nonempty()?;
    let np = t_prime.nonempty()?;
    if !is_submultiset(&t.finite_values(), &t_prime.finite_values()) {
        return Err(Error::Pool("pools are not nested".into()));
    }
    let scale = Rational::new(n, np);
    let extra = Rational::new(np - n, np);
    let mut rows = Vec::new();
    let mut worst: Option<Rational> = None;
    let mut violations = 0;
    for &z in z_grid {
        let f = empirical_cdf(t, Z::Value(z))?;
        let fp = empirical_cdf(t_prime, Z::Value(z))?;
        let lower = scale * f;
        let upper = f + extra;
        let ok = lower <= fp && fp <= upper;
        if !ok {
            violations += 1;
        }
        if ok {
            let s = (fp - lower).min(upper - fp);
            worst = Some(worst.map_or(s, |w| w.min(s)));
        }
        rows.push(StabilityRow { z, cdf_t: f, cdf_t_prime: fp, lower, upper, ok });
    }
    Ok(StabilityReport {
        size_t: n,
        size_t_prime: np,
        rows,
        violations,
        worst_slack: worst.unwrap_or_default(),
        pass: violations == 0,
    })
}

/// `min(1, 2 e^(−2 n ε²))`.
pub fn dkw_band(n: u64, epsilon: f64) -> Result<f64> {
    if n == 0 || !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid("need n >= 1 and epsilon > 0"));
    }
    Ok((2.0 * (-2.0 * n as f64 * epsilon * epsilon).exp()).min(1.0))
}

/// `sqrt(ln(2/δ) / (2n))`.
pub fn dkw_epsilon(n: u64, delta: f64) -> Result<f64> {
    if n == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("need n >= 1 and 0 < delta < 1"));
    }
    Ok(((2.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DkwMonteCarlo {
    pub probabilities: Vec<f64>,
    pub n: u64,
    pub replications: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub exceedances: u64,
    pub frequency: f64,
    pub band: f64,
    /// `band + 3 sqrt(band (1 − band) / replications)`.
    pub threshold: f64,
    pub max_sup_gap: f64,
    pub pass: bool,
}

/// Sup distance between the empirical and true cdf of a sample from a
/// finite distribution on `0..k`; the supremum is attained at an atom.
fn sup_gap(counts: &[u64], cdf: &[f64], n: u64) -> f64 {
    let mut acc = 0u64;
    let mut worst = 0.0f64;
    for (c, f) in counts.iter().zip(cdf) {
        acc += c;
        worst = worst.max((acc as f64 / n as f64 - f).abs());
    }
    worst
}

/// Replicates `Pr(sup |F̂_n − F| > ε)` for a known atomic distribution.
/// Replication `i` draws from its own ChaCha stream.
pub fn dkw_monte_carlo(probabilities: &[f64], n: u64, replications: u64, epsilon: f64, seed: u64) -> Result<DkwMonteCarlo> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rayon::prelude::*;
    let total: f64 = probabilities.iter().sum();
    if probabilities.is_empty() || probabilities.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("probabilities must be nonnegative and sum to 1"));
    }
    if replications == 0 {
        return Err(Error::invalid("need at least one replication"));
    }
    let band = dkw_band(n, epsilon)?;
    let cdf: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let gaps: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut counts = vec![0u64; cdf.len()];
            for _ in 0..n {
                let u: f64 = rng.gen();
                let k = cdf.iter().position(|&f| u < f).unwrap_or(cdf.len() - 1);
                counts[k] += 1;
            }
            sup_gap(&counts, &cdf, n)
        })
        .collect();
    let exceedances = gaps.iter().filter(|&&g| g > epsilon).count() as u64;
    let frequency = exceedances as f64 / replications as f64;
    let threshold = band + 3.0 * (band * (1.0 - band) / replications as f64).sqrt();
    Ok(DkwMonteCarlo {
        probabilities: probabilities.to_vec(),
        n,
        replications,
        epsilon,
        seed,
        exceedances,
        frequency,
        band,
        threshold,
        max_sup_gap: gaps.iter().cloned().fold(0.0, f64::max),
        pass: frequency <= threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub id: String,
    pub m: MValue,
    pub naq: Option<Rational>,
    pub bucket: Option<u64>,
    pub bucket_naq: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaqReport {
    pub size: u64,
    pub infinite: u64,
    pub bucket_width: u64,
    pub confidence: f64,
    pub epsilon: f64,
    pub entries: Vec<RankedEntry>,
}

/// Per-entry mid-rank NAQ, bucket and the DKW half-width at `confidence`.
/// Bucketing uses the floor of the value in bits.
pub fn rank_pool(pool: &Pool, bucket_width: u64, confidence: f64) -> Result<NaqReport> {
    let n = pool.nonempty()?;
    if bucket_width == 0 {
        return Err(Error::invalid("bucket width must be at least 1"));
    }
    let epsilon = dkw_epsilon(n, 1.0 - confidence)?;
    let buckets = Pool::from_values(pool.entries().iter().map(|e| match e.m {
        MValue::Finite(v) => MValue::bits(v.floor() / bucket_width),
        MValue::Infinite => MValue::Infinite,
    }));
    let mut entries = Vec::new();
    for (e, b) in pool.entries().iter().zip(buckets.entries()) {
        let naq = e.m.finite().map(|_| naq_midrank(e.m, pool)).transpose()?;
        let bucket_naq = b.m.finite().map(|_| naq_midrank(b.m, &buckets)).transpose()?;
        entries.push(RankedEntry {
            id: e.id.clone(),
            m: e.m,
            naq,
            bucket: b.m.finite().map(|v| v.bits),
            bucket_naq,
        });
    }
    Ok(NaqReport {
        size: n,
        infinite: pool.infinite_count() as u64,
        bucket_width,
        confidence,
        epsilon,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn cdf_examples() {
        let p = Pool::from_bits(&[3, 5, 5, 8]);
        assert_eq!(empirical_cdf(&p, Z::Value(KtValue::bits(5))).unwrap(), r(3, 4));
        assert_eq!(empirical_cdf(&p, Z::Value(KtValue::bits(2))).unwrap(), r(0, 1));
        let q = Pool::from_values([MValue::bits(3), MValue::Infinite]);
        assert_eq!(empirical_cdf(&q, Z::Value(KtValue::bits(3))).unwrap(), r(1, 1));
        assert_eq!(q.infinite_count(), 1);
        assert!(empirical_cdf(&Pool::default(), Z::Infinity).is_err());
    }

    #[test]
    fn midrank_examples() {
        let p = Pool::from_bits(&[3, 5, 5, 8]);
        assert_eq!(naq_midrank(MValue::bits(5), &p).unwrap(), r(1, 2));
        assert_eq!(naq_midrank(MValue::bits(9), &p).unwrap(), r(1, 1));
        assert_eq!(naq_midrank(MValue::bits(7), &Pool::from_bits(&[7])).unwrap(), r(1, 2));
        assert!(naq_midrank(MValue::Infinite, &p).is_err());
    }

    #[test]
    fn gap_examples() {
        let g = midrank_vs_cdf_gap(&Pool::from_bits(&[3, 5, 5, 8])).unwrap();
        assert_eq!(g.max_gap, r(1, 4));
        assert!(!g.within_tie_free_bound);
        assert!(g.within_tie_adjusted_bound);
        assert_eq!(g.max_tie_multiplicity, 2);
        let g = midrank_vs_cdf_gap(&Pool::from_bits(&[1, 2, 3, 4, 5])).unwrap();
        assert_eq!(g.max_gap, r(1, 10));
        assert!(g.within_tie_free_bound);
        let g = midrank_vs_cdf_gap(&Pool::from_bits(&[4; 6])).unwrap();
        assert_eq!(g.max_gap, r(1, 2));
    }

    #[test]
    fn bucket_examples() {
        assert_eq!(bucketize(&[10, 23], 8).unwrap(), vec![1, 2]);
        let a = bucket_audit(&[15], &[17], 8, 3).unwrap();
        assert_eq!(a.crossed, vec![0]);
        assert!(!a.precondition_holds);
        let a = bucket_audit(&[3, 9, 20], &[3, 9, 20], 8, 1).unwrap();
        assert!(a.orders_coincide);
        assert!(a.crossed.is_empty());
        assert!(bucketize(&[1], 0).is_err());
    }

    #[test]
    fn stability_examples() {
        let t = Pool::from_bits(&[1, 2]);
        let tp = Pool::from_bits(&[1, 2, 3]);
        let rep = pool_stability_check(&t, &tp, &[KtValue::bits(2)]).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.rows[0].lower, r(2, 3));
        assert_eq!(rep.rows[0].cdf_t_prime, r(2, 3));
        assert_eq!(rep.rows[0].upper, r(4, 3));
        let same = pool_stability_check(&t, &t, &[KtValue::bits(1), KtValue::bits(2)]).unwrap();
        assert!(same.rows.iter().all(|row| row.lower == row.cdf_t_prime && row.upper == row.cdf_t_prime));
        assert!(pool_stability_check(&Pool::from_bits(&[9]), &tp, &[]).is_err());
    }

    #[test]
    fn dkw_examples() {
        assert!((dkw_band(1000, 0.05).unwrap() - 2.0 * (-5.0f64).exp()).abs() < 1e-15);
        assert!((dkw_band(1000, 0.05).unwrap() - 0.01348).abs() < 1e-5);
        assert_eq!(dkw_band(1, 1e-3).unwrap(), 1.0);
        assert!((dkw_epsilon(1000, 0.05).unwrap() - 0.0430).abs() < 1e-4);
        assert!(dkw_band(0, 0.1).is_err());
        assert!(dkw_epsilon(10, 1.0).is_err());
    }

    #[test]
    fn timed_values_rank_exactly() {
        // 4 + log2(64) = 10 ties with a plain 10
        let p = Pool::from_values([MValue::Finite(KtValue::timed(4, 63)), MValue::bits(10), MValue::bits(11)]);
        assert_eq!(naq_midrank(MValue::bits(10), &p).unwrap(), r(1, 3));
    }

    #[test]
    fn rank_pool_attaches_band() {
        let p = Pool::from_bits(&[3, 5, 5, 8]);
        let rep = rank_pool(&p, 1, 0.95).unwrap();
        assert_eq!(rep.entries[1].naq, Some(r(1, 2)));
        assert_eq!(rep.entries[1].bucket, Some(5));
        assert_eq!(rep.entries[1].bucket_naq, rep.entries[1].naq);
    }

    #[test]
    fn dkw_monte_carlo_small() {
        let p = [0.25; 4];
        let a = dkw_monte_carlo(&p, 200, 200, 0.1, 3).unwrap();
        assert_eq!(a, dkw_monte_carlo(&p, 200, 200, 0.1, 3).unwrap());
        assert!(a.pass, "{a:?}");
        assert!(dkw_monte_carlo(&[0.5, 0.4], 10, 10, 0.1, 0).is_err());
    }

    proptest! {
        #[test]
        fn midrank_is_monotone(vals in proptest::collection::vec(0u64..20, 1..30), a in 0u64..22, b in 0u64..22) {
            let p = Pool::from_bits(&vals);
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(naq_midrank(MValue::bits(lo), &p).unwrap() <= naq_midrank(MValue::bits(hi), &p).unwrap());
        }

        #[test]
        fn midrank_ignores_relabeling(mut vals in proptest::collection::vec(0u64..20, 1..30), q in 0u64..22) {
            let before = naq_midrank(MValue::bits(q), &Pool::from_bits(&vals)).unwrap();
            vals.reverse();
            prop_assert_eq!(naq_midrank(MValue::bits(q), &Pool::from_bits(&vals)).unwrap(), before);
        }

        #[test]
        fn naq_near_cdf(vals in proptest::collection::vec(0u64..10, 1..30)) {
            let p = Pool::from_bits(&vals);
            let n = p.size() as u64;
            for &v in &vals {
                let naq = naq_midrank(MValue::bits(v), &p).unwrap();
                let cdf = empirical_cdf(&p, Z::Value(KtValue::bits(v))).unwrap();
                let k = vals.iter().filter(|&&w| w == v).count() as u64;
                prop_assert_eq!(cdf - naq, Rational::new(k, 2 * n));
            }
        }

        #[test]
        fn nested_pools_are_stable(base in proptest::collection::vec(0u64..15, 1..20), extra in proptest::collection::vec(0u64..15, 0..20)) {
            let t = Pool::from_bits(&base);
            let mut all = base.clone();
            all.extend(&extra);
            let tp = Pool::from_bits(&all);
            let grid: Vec<KtValue> = (0..16).map(KtValue::bits).collect();
            prop_assert!(pool_stability_check(&t, &tp, &grid).unwrap().pass);
        }

        #[test]
        fn no_crossing_without_near_boundary(vals in proptest::collection::vec(0u64..100, 1..20), deltas in proptest::collection::vec(-2i64..=2, 20), width in 6u64..12) {
            let c = 2;
            let a = vals.clone();
            let b: Vec<u64> = vals.iter().zip(&deltas).map(|(v, d)| (*v as i64 + d).max(0) as u64).collect();
            let audit = bucket_audit(&a, &b, width, c).unwrap();
            if audit.near_boundary.is_empty() {
                prop_assert!(audit.crossed.is_empty());
                prop_assert!(audit.orders_coincide);
            }
        }
    }
}
