//! Brute-force references, kept deliberately naive.
//!
//! None of these share code paths with the estimators they check beyond the
//! machine interpreter and the predicates themselves.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bitcode::BitString;
use crate::complexity::SearchBudget;
use crate::executor::Executor;
use crate::kt::KtValue;
use crate::machine::{programs_up_to, run_machine};
use crate::validity::{Instance, Predicate};

/// Untruncated `min{|w| + log2(1 + τ_E(w)) : V(x, E(w))}` over advice of
/// length at most `b`, keeping only values `≤ b`. Each advice runs to
/// completion; there is no per-advice cutoff.
pub fn kt_oracle(x: &Instance, e: &dyn Executor, v: &Predicate, b: u64) -> Option<(KtValue, BitString)> {
    let mut best: Option<(KtValue, BitString)> = None;
    for l in 0..=b as usize {
        for w in e.domain_of_length(l) {
            let out = e.run(&w, u64::MAX);
            let (Some(r), steps) = (out.output, out.steps) else { continue };
            if !v.accepts(x, &r) {
                continue;
            }
            if steps > i64::MAX as u64 {
                continue;
            }
            let kt = KtValue::timed(w.len() as u64, steps);
            if kt > KtValue::bits(b) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((k, bw)) => kt < *k || (kt == *k && w < *bw),
            };
            if better {
                best = Some((kt, w));
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeepDiscardException {
    pub advice: BitString,
    pub b: u64,
    pub tau: u64,
    pub kept_by_cutoff: bool,
    pub kept_by_value: bool,
}

/// For every domain advice up to `max_len` and each `B`: running with the
/// cutoff `Θ = 2^(B−|w|) − 1` halts iff `|w| + log2(1+τ) ≤ B`.
pub fn keep_discard_exceptions(e: &dyn Executor, max_len: usize, bs: &[u64]) -> (u64, Vec<KeepDiscardException>) {
    use rayon::prelude::*;
    let advice: Vec<BitString> = (0..=max_len).flat_map(|l| e.domain_of_length(l)).collect();
    let checked = (advice.len() * bs.len()) as u64;
    let exceptions = advice
        .par_iter()
        .flat_map_iter(|w| {
            let full = e.run(w, u64::MAX);
            let tau = full.steps;
            bs.iter().filter_map(move |&b| {
                let kept_by_value = full.output.is_some() && KtValue::timed(w.len() as u64, tau) <= KtValue::bits(b);
                let theta = SearchBudget { b }.theta(w.len() as u64);
                let kept_by_cutoff = match theta {
                    Some(theta) => e.run(w, theta).output.is_some(),
                    None => false,
                };
                (kept_by_cutoff != kept_by_value).then(|| KeepDiscardException {
                    advice: w.clone(),
                    b,
                    tau,
                    kept_by_cutoff,
                    kept_by_value,
                })
            })
        })
        .collect();
    (checked, exceptions)
}

/// `min K̂(r)` over valid outputs, running every program up to the cap
/// directly. Returns `(value, program)`.
pub fn m_oracle(x: &Instance, v: &Predicate, length_cap: usize, step_budget: u64) -> Option<(u64, BitString)> {
    let mut best: Option<(u64, BitString)> = None;
    for p in programs_up_to(length_cap) {
        let out = run_machine(&p, step_budget);
        let Some(r) = out.output else { continue };
        if v.accepts(x, &r) && best.as_ref().is_none_or(|(l, _)| (p.len() as u64) < *l) {
            best = Some((p.len() as u64, p));
        }
    }
    best
}

/// `K̂(r)` by direct enumeration.
pub fn khat_oracle(r: &BitString, length_cap: usize, step_budget: u64) -> Option<u64> {
    programs_up_to(length_cap)
        .find(|p| run_machine(p, step_budget).output.as_ref() == Some(r))
        .map(|p| p.len() as u64)
}

/// Mid-rank by counting half-units: every smaller value scores 2, every
/// equal value scores 1.
pub fn midrank_oracle(m: u64, pool: &[u64]) -> Option<Ratio<u64>> {
    if pool.is_empty() {
        return None;
    }
    let score: u64 = pool
        .iter()
        .map(|&v| match v.cmp(&m) {
            std::cmp::Ordering::Less => 2,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Greater => 0,
        })
        .sum();
    Some(Ratio::new(score, 2 * pool.len() as u64))
}

/// Empirical cdf by counting.
pub fn cdf_oracle(z: u64, pool: &[u64]) -> Option<Ratio<u64>> {
    if pool.is_empty() {
        return None;
    }
    Some(Ratio::new(pool.iter().filter(|&&v| v <= z).count() as u64, pool.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::{khat_exact, levin_value, m_exact, Caps};
    use crate::executor::{ReferenceExecutor, UniversalExecutor};

    #[test]
    fn oracles_agree_with_estimators_on_small_caps() {
        let caps = Caps::new(12, 1 << 10);
        for s in ["", "0", "1", "01", "110"] {
            let r = BitString::from(s);
            assert_eq!(khat_oracle(&r, 12, 1 << 10), khat_exact(&r, caps).unwrap().bits());
        }
        let x = Instance::from("0");
        assert_eq!(
            m_oracle(&x, &Predicate::Nonempty, 12, 1 << 10).map(|p| p.0),
            m_exact(&x, &Predicate::Nonempty, caps, 0).unwrap().bits()
        );
    }

    #[test]
    fn levin_matches_oracle_reference() {
        let x = Instance::from("0");
        let v = Predicate::Equals { target: "101".into() };
        for b in 8..=12 {
            let got = levin_value(&x, &ReferenceExecutor, &v, b, 0).unwrap().value;
            assert_eq!(got, kt_oracle(&x, &ReferenceExecutor, &v, b).map(|p| p.0), "B = {b}");
        }
    }

    #[test]
    fn keep_discard_small() {
        let (checked, ex) = keep_discard_exceptions(&UniversalExecutor::default(), 8, &[4, 6, 8]);
        assert!(checked > 0);
        assert!(ex.is_empty(), "{ex:?}");
    }

    #[test]
    fn midrank_oracle_example() {
        assert_eq!(midrank_oracle(5, &[3, 5, 5, 8]), Some(Ratio::new(1, 2)));
        assert_eq!(cdf_oracle(5, &[3, 5, 5, 8]), Some(Ratio::new(3, 4)));
        assert_eq!(midrank_oracle(1, &[]), None);
    }
}
