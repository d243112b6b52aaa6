//! Validity predicates, discrete losses, tie orders and the dovetailed argmin.
//!
//! Halting appears only in budgeted form: "p halts" always means "p halts on
//! the bounded machine within the stated budget".

use std::cmp::Ordering;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bitcode::{decode_nat, encode_nat, AlphabetCodec, BitString};
use crate::descsel::FeatureSystem;
use crate::error::{Error, Result};
use crate::machine::{assemble_text, nth_program, run_machine, RunOutcome};

pub type Rational = Ratio<u64>;

/// An instance `x`, held as its bit image `φ(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Instance {
    bits: BitString,
}

impl Instance {
    pub fn binary(bits: BitString) -> Self {
        Self { bits }
    }

    pub fn from_symbols(symbols: &[u32], codec: &AlphabetCodec) -> Result<Self> {
        Ok(Self { bits: codec.encode_instance(symbols)? })
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    /// `n` from an instance of the promise form `0^n 1 u` with `n >= 1`.
    pub fn promise_n(&self) -> Option<u64> {
        let n = self.bits.bits().iter().position(|&b| b)?;
        (n >= 1).then_some(n as u64)
    }
}

impl From<&str> for Instance {
    fn from(s: &str) -> Self {
        Instance::binary(BitString::from(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
    /// Not accepted yet at this stage; a later stage may accept.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredicateMode {
    Decidable,
    CeStaged,
}

/// Registered validity predicates. Constructible from JSON (`{"kind": ...}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    Always,
    Never,
    Empty,
    Nonempty,
    MinLength { min: usize },
    EndsWithOne,
    OddParity,
    Equals { target: BitString },
    EqualsInstance,
    ContainsInstance,
    /// Same length as the center and within `radius` flips of it. The center
    /// defaults to `φ(x)`.
    HammingBall {
        #[serde(default)]
        center: Option<BitString>,
        radius: usize,
    },
    /// `r = φ(x)·1`: one feasible response per instance, pairwise disjoint.
    IdentityFamily,
    /// `V(x, r) = C(Φ(x, r))`.
    Feature { system: FeatureSystem },
    /// The staged c.e. fixture predicate; the stage is a step count.
    FixtureCe { halting_budget: u64 },
}

impl Predicate {
    pub fn id(&self) -> String {
        match self {
            Predicate::Always => "always".into(),
            Predicate::Never => "never".into(),
            Predicate::Empty => "empty".into(),
            Predicate::Nonempty => "nonempty".into(),
            Predicate::MinLength { min } => format!("min_length:{min}"),
            Predicate::EndsWithOne => "ends_with_one".into(),
            Predicate::OddParity => "odd_parity".into(),
            Predicate::Equals { target } => format!("equals:{target}"),
            Predicate::EqualsInstance => "equals_instance".into(),
            Predicate::ContainsInstance => "contains_instance".into(),
            Predicate::HammingBall { center: Some(c), radius } => format!("hamming:{c}:{radius}"),
            Predicate::HammingBall { center: None, radius } => format!("hamming:x:{radius}"),
            Predicate::IdentityFamily => "identity_family".into(),
            Predicate::Feature { system } => format!("feature:{}", system.id()),
            Predicate::FixtureCe { halting_budget } => format!("fixture_ce:{halting_budget}"),
        }
    }

    pub fn mode(&self) -> PredicateMode {
        match self {
            Predicate::FixtureCe { .. } => PredicateMode::CeStaged,
            _ => PredicateMode::Decidable,
        }
    }

    /// Evaluate at a stage. Decidable predicates ignore the stage.
    pub fn eval(&self, x: &Instance, r: &BitString, stage: u64) -> Verdict {
        self.bind(x)(r, stage)
    }

    /// Fully resolved evaluation (a c.e. predicate is resolved at its budget).
    pub fn accepts(&self, x: &Instance, r: &BitString) -> bool {
        self.eval(x, r, u64::MAX) == Verdict::Accepted
    }

    /// Specialize to one instance, doing per-instance work once.
    pub fn bind<'a>(&'a self, x: &'a Instance) -> Box<dyn Fn(&BitString, u64) -> Verdict + Send + Sync + 'a> {
        let yes = |b: bool| if b { Verdict::Accepted } else { Verdict::Rejected };
        let xb = x.bits();
        match self {
            Predicate::Always => Box::new(|_, _| Verdict::Accepted),
            Predicate::Never => Box::new(|_, _| Verdict::Rejected),
            Predicate::Empty => Box::new(move |r, _| yes(r.is_empty())),
            Predicate::Nonempty => Box::new(move |r, _| yes(!r.is_empty())),
            Predicate::MinLength { min } => Box::new(move |r, _| yes(r.len() >= *min)),
            Predicate::EndsWithOne => Box::new(move |r, _| yes(r.bits().last() == Some(&true))),
            Predicate::OddParity => Box::new(move |r, _| yes(r.count_ones() % 2 == 1)),
            Predicate::Equals { target } => Box::new(move |r, _| yes(r == target)),
            Predicate::EqualsInstance => Box::new(move |r, _| yes(r == xb)),
            Predicate::ContainsInstance => Box::new(move |r, _| yes(contains(r, xb))),
            Predicate::HammingBall { center, radius } => {
                let c = center.as_ref().unwrap_or(xb);
                Box::new(move |r, _| yes(r.len() == c.len() && hamming(r, c) <= *radius))
            }
            Predicate::IdentityFamily => {
                let target = xb.concat(&BitString::from("1"));
                Box::new(move |r, _| yes(*r == target))
            }
            Predicate::Feature { system } => {
                let bound = system.bind(x);
                Box::new(move |r, _| yes(bound(r)))
            }
            Predicate::FixtureCe { halting_budget } => {
                let Some(n) = x.promise_n() else {
                    return Box::new(|_, _| Verdict::Rejected);
                };
                let (r0, r1) = fixture_pair(n);
                let halt = fixture_halting_steps(n, *halting_budget);
                let budget = *halting_budget;
                Box::new(move |r, stage| {
                    if *r == r0 {
                        Verdict::Accepted
                    } else if *r == r1 {
                        match halt {
                            Some(t) if t <= stage => Verdict::Accepted,
                            _ if stage >= budget => Verdict::Rejected,
                            _ => Verdict::Unknown,
                        }
                    } else {
                        Verdict::Rejected
                    }
                })
            }
        }
    }
}

fn contains(hay: &BitString, needle: &BitString) -> bool {
    let (h, n) = (hay.bits(), needle.bits());
    n.is_empty() || h.windows(n.len()).any(|w| w == n)
}

pub fn hamming(a: &BitString, b: &BitString) -> usize {
    a.bits().iter().zip(b.bits()).filter(|(p, q)| p != q).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    Computable,
    UscStaged,
}

/// Discrete losses. All registered losses take values in the naturals, so the
/// codomain enumeration is `λ_j = j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscreteLoss {
    Length,
    Constant { value: u64 },
    /// Hamming distance to `φ(x)` plus the length difference.
    DistanceToInstance,
    /// Upper-semicomputable fixture loss: `2n` for `r_{n,0}`, `2n+1` for
    /// `r_{n,1}` until `p_n` halts and `2n` afterwards, `2n+2+|r|` otherwise.
    FixtureUsc { halting_budget: u64 },
    /// `0` for `r_{n,1}`, `1` for `r_{n,0}`, `2+|r|` otherwise.
    FixtureCe,
}

impl DiscreteLoss {
    pub fn id(&self) -> String {
        match self {
            DiscreteLoss::Length => "length".into(),
            DiscreteLoss::Constant { value } => format!("constant:{value}"),
            DiscreteLoss::DistanceToInstance => "distance_to_instance".into(),
            DiscreteLoss::FixtureUsc { halting_budget } => format!("fixture_usc:{halting_budget}"),
            DiscreteLoss::FixtureCe => "fixture_ce".into(),
        }
    }

    pub fn mode(&self) -> LossMode {
        match self {
            DiscreteLoss::FixtureUsc { .. } => LossMode::UscStaged,
            _ => LossMode::Computable,
        }
    }

    /// `λ_j`, the `j`-th codomain value in increasing order.
    pub fn lambda(&self, j: u64) -> Rational {
        Rational::from_integer(j)
    }

    /// Codomain index of a value, if it is a member.
    pub fn codomain_index(&self, v: Rational) -> Option<u64> {
        v.is_integer().then(|| v.to_integer())
    }

    /// The limit value (stage resolved at the halting budget for usc losses).
    pub fn eval(&self, x: &Instance, r: &BitString) -> Rational {
        self.bind(x)(r, u64::MAX)
    }

    /// The staged approximation `q_s(x, r)`; nonincreasing in `stage`.
    pub fn eval_staged(&self, x: &Instance, r: &BitString, stage: u64) -> Rational {
        self.bind(x)(r, stage)
    }

    pub fn bind<'a>(&'a self, x: &'a Instance) -> Box<dyn Fn(&BitString, u64) -> Rational + Send + Sync + 'a> {
        let int = |v: u64| Rational::from_integer(v);
        match self {
            DiscreteLoss::Length => Box::new(move |r, _| int(r.len() as u64)),
            DiscreteLoss::Constant { value } => Box::new(move |_, _| int(*value)),
            DiscreteLoss::DistanceToInstance => {
                let xb = x.bits();
                Box::new(move |r, _| int((hamming(r, xb) + r.len().abs_diff(xb.len())) as u64))
            }
            DiscreteLoss::FixtureUsc { halting_budget } => {
                let Some(n) = x.promise_n() else {
                    return Box::new(move |r, _| int(r.len() as u64));
                };
                let (r0, r1) = fixture_pair(n);
                let halt = fixture_halting_steps(n, *halting_budget);
                Box::new(move |r, stage| {
                    if *r == r0 {
                        int(2 * n)
                    } else if *r == r1 {
                        match halt {
                            Some(t) if t <= stage => int(2 * n),
                            _ => int(2 * n + 1),
                        }
                    } else {
                        int(2 * n + 2 + r.len() as u64)
                    }
                })
            }
            DiscreteLoss::FixtureCe => {
                let Some(n) = x.promise_n() else {
                    return Box::new(move |r, _| int(2 + r.len() as u64));
                };
                let (r0, r1) = fixture_pair(n);
                Box::new(move |r, _| {
                    if *r == r1 {
                        int(0)
                    } else if *r == r0 {
                        int(1)
                    } else {
                        int(2 + r.len() as u64)
                    }
                })
            }
        }
    }
}

/// Tie-breaking order on responses, given by its enumeration `(e_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TieOrder {
    LengthLex,
    /// Length-lex with two responses exchanged.
    Swap { a: BitString, b: BitString },
}

impl TieOrder {
    /// `e_k`, starting from `e_0 = ε`.
    pub fn nth(&self, k: u64) -> BitString {
        let base = length_lex_nth(k);
        match self {
            TieOrder::LengthLex => base,
            TieOrder::Swap { a, b } => {
                if base == *a {
                    b.clone()
                } else if base == *b {
                    a.clone()
                } else {
                    base
                }
            }
        }
    }

    /// The index `k` with `e_k = r`.
    pub fn rank(&self, r: &BitString) -> u64 {
        let r = match self {
            TieOrder::LengthLex => r,
            TieOrder::Swap { a, b } => {
                if r == a {
                    b
                } else if r == b {
                    a
                } else {
                    r
                }
            }
        };
        length_lex_rank(r)
    }

    pub fn cmp(&self, a: &BitString, b: &BitString) -> Ordering {
        self.rank(a).cmp(&self.rank(b))
    }
}

/// Position of `r` in length-lex order from 0.
pub fn length_lex_rank(r: &BitString) -> u64 {
    assert!(r.len() < 64, "response too long to rank");
    (1u64 << r.len()) - 1 + r.to_u64()
}

pub fn length_lex_nth(k: u64) -> BitString {
    let len = 63 - (k + 1).leading_zeros() as usize;
    BitString::from_u64(k + 1 - (1u64 << len), len)
}

/// Result of a resolved dovetail scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DovetailResult {
    pub response: BitString,
    pub j: u64,
    pub k: u64,
    pub stage: u64,
    pub evaluations: u64,
}

/// `argmin_≺ {L(x,r) : V(x,r)=1}` by dovetailing over `(j, k)`.
///
/// Responses are restricted to the first `N` elements of the order, where
/// `N` counts all strings of length at most `max_response_len`. A hit
/// `L(x, e_k) ≤ λ_j` is only trusted once no earlier pair can still beat it:
/// either `j = 0`, or the stage has covered every `k < N`. Without that
/// certification the scan can stop on a pair with `j` above the least
/// feasible level. `fuel` bounds the number of pair evaluations.
pub fn argmin_dovetail(
    x: &Instance,
    v: &Predicate,
    loss: &DiscreteLoss,
    order: &TieOrder,
    max_response_len: usize,
    fuel: u64,
) -> Result<DovetailResult> {
    if v.mode() != PredicateMode::Decidable && !matches!(v, Predicate::FixtureCe { .. }) {
        return Err(Error::invalid("dovetail needs a decidable predicate"));
    }
    let universe = (1u64 << (max_response_len + 1)) - 1;
    let vb = v.bind(x);
    let lb = loss.bind(x);
    // Cache (valid, loss) per k; evaluation is pure, and fuel still counts
    // every pair visit.
    let mut cache: Vec<(BitString, bool, Rational)> = Vec::new();
    let mut evaluations = 0u64;
    for s in 0u64.. {
        let k_hi = s.min(universe - 1);
        while cache.len() as u64 <= k_hi {
            let r = order.nth(cache.len() as u64);
            let ok = vb(&r, u64::MAX) == Verdict::Accepted;
            let l = lb(&r, u64::MAX);
            cache.push((r, ok, l));
        }
        let certified_stage = s + 1 >= universe;
        for j in 0..=s {
            let lambda = loss.lambda(j);
            for k in 0..=k_hi {
                if evaluations >= fuel {
                    return Err(Error::UnresolvedAtFuel { fuel });
                }
                evaluations += 1;
                let (r, ok, l) = &cache[k as usize];
                if *ok && *l <= lambda && (j == 0 || certified_stage) {
                    return Ok(DovetailResult { response: r.clone(), j, k, stage: s, evaluations });
                }
            }
        }
    }
    unreachable!("stage counter is unbounded")
}

// ---------------------------------------------------------------------------
// Budgeted-halting fixtures.

/// Programs placed at the head of the fixture enumeration `(p_n)`, so that
/// small `n` already mixes fast halting, slow halting and looping programs.
/// The enumeration continues with every program in length-lex order.
pub const FIXTURE_PROGRAM_HEAD: &[&str] = &[
    "",                                    // halts at once
    "FLIP LOOP END",                       // loops
    "OUT FLIP OUT",                        // halts, output 01
    "FLIP LOOP RIGHT FLIP END",            // walks right forever
    "FLIP OUT DUP DUP DUP DUP DUP DUP DUP", // halts after 129 steps
    "FLIP LOOP FLIP END",                  // loop body runs once
    "FLIP LOOP OUT END",                   // loops, emitting ones
    "OUT DUP DUP DUP DUP DUP DUP DUP DUP DUP DUP DUP", // halts after 2048 steps
];

/// The `n`-th fixture program (1-based).
pub fn fixture_program(n: u64) -> Result<crate::bitcode::BitString> {
    if n == 0 {
        return Err(Error::invalid("fixture programs start at n = 1"));
    }
    let head = FIXTURE_PROGRAM_HEAD.len() as u64;
    if n <= head {
        let body = assemble_text(FIXTURE_PROGRAM_HEAD[(n - 1) as usize])?;
        Ok(crate::machine::frame_program(&body))
    } else {
        nth_program(n - head)
    }
}

fn fixture_run(n: u64, budget: u64) -> RunOutcome {
    run_machine(&fixture_program(n).expect("n >= 1"), budget)
}

/// Steps to halt if `p_n` halts within `budget`.
pub fn fixture_halting_steps(n: u64, budget: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let out = fixture_run(n, budget);
    out.is_halted().then_some(out.steps)
}

/// `enc(n, b) = encode_nat(n)·b`, prefix-free over `n >= 1`.
pub fn fixture_enc(n: u64, b: bool) -> BitString {
    let mut s = encode_nat(n).expect("fixture index n >= 1");
    s.push(b);
    s
}

fn fixture_pair(n: u64) -> (BitString, BitString) {
    (fixture_enc(n, false), fixture_enc(n, true))
}

/// Inverse of [`fixture_enc`] for `n >= 1`.
pub fn fixture_dec(r: &BitString) -> Option<(u64, bool)> {
    let (n, used) = decode_nat(r.bits())?;
    (used + 1 == r.len()).then(|| (n, r.bits()[used]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    /// Decidable `V ≡ 1` with the upper-semicomputable loss.
    Usc,
    /// Staged c.e. `V` with the computable loss.
    Ce,
}

/// Declarative fixture description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub kind: FixtureKind,
    pub n: u64,
    pub halting_budget: u64,
    /// Free suffix `u` in `x = 0^n 1 u`.
    #[serde(default)]
    pub u: BitString,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub instance: Instance,
    pub predicate: Predicate,
    pub loss: DiscreteLoss,
    pub order: TieOrder,
    pub expected: BitString,
    pub halts: bool,
    /// Length bound of the response universe used by exhaustive checks.
    pub max_response_len: usize,
}

impl FixtureSpec {
    pub fn build(&self) -> Result<Fixture> {
        if self.n == 0 {
            return Err(Error::Fixture("n must be at least 1".into()));
        }
        let mut xb = BitString::repeat(false, self.n as usize);
        xb.push(true);
        let instance = Instance::binary(xb.concat(&self.u));
        let (r0, r1) = fixture_pair(self.n);
        let halts = fixture_halting_steps(self.n, self.halting_budget).is_some();
        let (predicate, loss) = match self.kind {
            FixtureKind::Usc => {
                (Predicate::Always, DiscreteLoss::FixtureUsc { halting_budget: self.halting_budget })
            }
            FixtureKind::Ce => (Predicate::FixtureCe { halting_budget: self.halting_budget }, DiscreteLoss::FixtureCe),
        };
        Ok(Fixture {
            spec: self.clone(),
            instance,
            predicate,
            loss,
            order: TieOrder::Swap { a: r0.clone(), b: r1.clone() },
            expected: if halts { r1.clone() } else { r0 },
            halts,
            max_response_len: r1.len(),
        })
    }
}

pub fn make_fixture_usc(n: u64, halting_budget: u64) -> Result<Fixture> {
    FixtureSpec { kind: FixtureKind::Usc, n, halting_budget, u: BitString::new() }.build()
}

pub fn make_fixture_ce(n: u64, halting_budget: u64) -> Result<Fixture> {
    FixtureSpec { kind: FixtureKind::Ce, n, halting_budget, u: BitString::new() }.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent oracle: sort every response up to the bound by (loss, rank).
    fn brute_argmin(x: &Instance, v: &Predicate, l: &DiscreteLoss, o: &TieOrder, max_len: usize) -> Option<BitString> {
        BitString::all_up_to(max_len)
            .filter(|r| v.accepts(x, r))
            .min_by(|a, b| l.eval(x, a).cmp(&l.eval(x, b)).then(o.cmp(a, b)))
    }

    const FUEL: u64 = 1 << 30;

    #[test]
    fn dovetail_examples() {
        let x = Instance::from("0110");
        let res = argmin_dovetail(&x, &Predicate::Always, &DiscreteLoss::Length, &TieOrder::LengthLex, 6, FUEL).unwrap();
        assert_eq!(res.response, BitString::new());
        let res = argmin_dovetail(&x, &Predicate::EndsWithOne, &DiscreteLoss::Length, &TieOrder::LengthLex, 6, FUEL).unwrap();
        assert_eq!(res.response, BitString::from("1"));
        // four-way tie at loss 2
        let v = Predicate::MinLength { min: 2 };
        let res = argmin_dovetail(&x, &v, &DiscreteLoss::Length, &TieOrder::LengthLex, 4, FUEL).unwrap();
        assert_eq!(res.response, BitString::from("00"));
    }

    #[test]
    fn dovetail_matches_brute_force_on_registered_pairs() {
        let preds = [
            Predicate::Always,
            Predicate::EndsWithOne,
            Predicate::OddParity,
            Predicate::ContainsInstance,
            Predicate::HammingBall { center: None, radius: 1 },
            Predicate::Equals { target: "1011".into() },
        ];
        let losses = [DiscreteLoss::Length, DiscreteLoss::DistanceToInstance, DiscreteLoss::Constant { value: 3 }];
        for xs in ["", "1", "01", "110"] {
            let x = Instance::from(xs);
            for v in &preds {
                for l in &losses {
                    let want = brute_argmin(&x, v, l, &TieOrder::LengthLex, 5);
                    let got = argmin_dovetail(&x, v, l, &TieOrder::LengthLex, 5, FUEL).ok().map(|d| d.response);
                    assert_eq!(got, want, "x={xs} v={} l={}", v.id(), l.id());
                }
            }
        }
    }

    #[test]
    fn uncertified_dovetail_would_overshoot() {
        // Loss 0 only deep in the order, loss 1 early: a stage-limited scan
        // meets (1, k_small) before (0, k_deep).
        let x = Instance::from("111");
        let l = DiscreteLoss::DistanceToInstance;
        let res = argmin_dovetail(&x, &Predicate::Always, &l, &TieOrder::LengthLex, 3, FUEL).unwrap();
        assert_eq!(res.response, BitString::from("111"));
    }

    #[test]
    fn infeasible_instance_runs_out_of_fuel() {
        let x = Instance::from("1");
        let err = argmin_dovetail(&x, &Predicate::Never, &DiscreteLoss::Length, &TieOrder::LengthLex, 3, 10_000);
        assert_eq!(err, Err(Error::UnresolvedAtFuel { fuel: 10_000 }));
    }

    #[test]
    fn dovetail_is_fuel_invariant_once_resolved() {
        let x = Instance::from("10");
        let v = Predicate::HammingBall { center: None, radius: 1 };
        let first = argmin_dovetail(&x, &v, &DiscreteLoss::Length, &TieOrder::LengthLex, 4, FUEL).unwrap();
        for fuel in [first.evaluations, first.evaluations * 2, FUEL] {
            let again = argmin_dovetail(&x, &v, &DiscreteLoss::Length, &TieOrder::LengthLex, 4, fuel).unwrap();
            assert_eq!(again, first);
        }
        assert!(argmin_dovetail(&x, &v, &DiscreteLoss::Length, &TieOrder::LengthLex, 4, first.evaluations - 1).is_err());
    }

    #[test]
    fn length_lex_enumeration() {
        let seq: Vec<String> = (0..7).map(|k| length_lex_nth(k).to_string()).collect();
        assert_eq!(seq, ["", "0", "1", "00", "01", "10", "11"]);
        for k in 0..5000 {
            assert_eq!(length_lex_rank(&length_lex_nth(k)), k);
        }
    }

    #[test]
    fn swap_order_puts_r1_first() {
        let f = make_fixture_usc(3, 1000).unwrap();
        let (r0, r1) = fixture_pair(3);
        assert_eq!(f.order.cmp(&r1, &r0), Ordering::Less);
        for k in 0..200 {
            assert_eq!(f.order.rank(&f.order.nth(k)), k);
        }
    }

    #[test]
    fn fixture_programs_have_intended_behaviour() {
        let budget = 1000;
        let halts: Vec<bool> = (1..=8).map(|n| fixture_halting_steps(n, budget).is_some()).collect();
        assert_eq!(halts, [true, false, true, false, true, true, false, false]);
        assert_eq!(fixture_halting_steps(5, 1000), Some(129));
        assert_eq!(fixture_halting_steps(8, 4096), Some(2048));
        assert_eq!(fixture_program(9).unwrap(), nth_program(1).unwrap());
    }

    #[test]
    fn fixture_selector_is_budgeted_halting() {
        for n in 1..=8 {
            for budget in [10, 300, 5000] {
                for f in [make_fixture_usc(n, budget).unwrap(), make_fixture_ce(n, budget).unwrap()] {
                    let want = brute_argmin(&f.instance, &f.predicate, &f.loss, &f.order, f.max_response_len).unwrap();
                    assert_eq!(want, f.expected, "n={n} budget={budget}");
                    let got = argmin_dovetail(&f.instance, &f.predicate, &f.loss, &f.order, f.max_response_len, FUEL).unwrap();
                    assert_eq!(got.response, f.expected);
                    assert_eq!(f.expected == fixture_enc(n, true), f.halts);
                }
            }
        }
    }

    #[test]
    fn fixture_losses_exclude_other_responses() {
        let f = make_fixture_usc(4, 1000).unwrap();
        let (r0, r1) = fixture_pair(4);
        for r in BitString::all_up_to(8) {
            if r != r0 && r != r1 {
                assert!(f.loss.eval(&f.instance, &r) >= Rational::from_integer(10));
            }
        }
    }

    #[test]
    fn staged_acceptance_is_monotone() {
        let v = Predicate::FixtureCe { halting_budget: 4096 };
        let x = Instance::from("000000001");
        let r1 = fixture_enc(8, true);
        let mut accepted = false;
        for stage in (0..5000).step_by(7) {
            let verdict = v.eval(&x, &r1, stage);
            if accepted {
                assert_eq!(verdict, Verdict::Accepted);
            }
            accepted |= verdict == Verdict::Accepted;
        }
        assert!(accepted);
        assert_eq!(v.eval(&x, &r1, 100), Verdict::Unknown);
    }

    #[test]
    fn usc_loss_is_nonincreasing_and_stabilizes() {
        let l = DiscreteLoss::FixtureUsc { halting_budget: 4096 };
        let x = Instance::from("000000001");
        let r1 = fixture_enc(8, true);
        let vals: Vec<Rational> = (0..5000).step_by(50).map(|s| l.eval_staged(&x, &r1, s)).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*vals.last().unwrap(), l.eval(&x, &r1));
        assert_eq!(l.eval(&x, &r1), Rational::from_integer(16));
    }

    #[test]
    fn fixture_spec_from_json() {
        let spec: FixtureSpec = serde_json::from_str(r#"{"kind":"ce","n":2,"halting_budget":500}"#).unwrap();
        let f = spec.build().unwrap();
        assert!(!f.halts);
        assert_eq!(f.expected, fixture_enc(2, false));
        let p: Predicate = serde_json::from_str(r#"{"kind":"hamming_ball","radius":2}"#).unwrap();
        assert_eq!(p, Predicate::HammingBall { center: None, radius: 2 });
    }

    #[test]
    fn fixture_enc_round_trips() {
        for n in 1..300 {
            for b in [false, true] {
                assert_eq!(fixture_dec(&fixture_enc(n, b)), Some((n, b)));
            }
        }
    }

    proptest! {
        #[test]
        fn dovetail_equals_brute_force(x in "[01]{0,4}", target in "[01]{0,3}", radius in 0usize..3) {
            let x = Instance::from(x.as_str());
            let v = Predicate::HammingBall { center: Some(BitString::from(target.as_str())), radius };
            let want = brute_argmin(&x, &v, &DiscreteLoss::DistanceToInstance, &TieOrder::LengthLex, 4);
            let got = argmin_dovetail(&x, &v, &DiscreteLoss::DistanceToInstance, &TieOrder::LengthLex, 4, FUEL).unwrap();
            prop_assert_eq!(Some(got.response), want);
        }
    }
}
