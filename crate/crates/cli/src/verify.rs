//! Verify suites. Each suite returns a list of named checks; gated checks
//! decide pass/fail, ungated ones are reported for the record.

use naqkit_core::bounds::{
    binary_entropy, fano_lower_bound, gc_index_vs_p, gc_required, gc_simulate, identity_family_bound, lexicode,
    separated_panel, variant_panel_bound, verify_certificate, PanelReport, SelectionModel,
};
use naqkit_core::complexity::{levin_value, m_exact_in, realizer_identity_audit, Caps, ProgramTable};
use naqkit_core::constants::{C_COND, C_DSEL, C_EN, C_FA, C_ID, C_TIGHT, C_VP, KRAFT_SLACK};
use naqkit_core::descsel::{
    conditional_lb_audit, enumeration_distortion, fiber_genericity_audit, finite_ambiguity_check, two_part_bound,
    Enumeration, FeatureMap, FeatureSystem, PrototypeTable,
};
use naqkit_core::executor::{ReferenceExecutor, UniversalExecutor};
use naqkit_core::naq::{dkw_monte_carlo, empirical_cdf, naq_midrank, pool_stability_check, MValue, Pool, Z};
use naqkit_core::oracle::{cdf_oracle, keep_discard_exceptions, kt_oracle, midrank_oracle};
use naqkit_core::validity::{Instance, Predicate};
use naqkit_core::KtValue;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::fixtures::{labeled, Fixtures};
use crate::io::DataError;

pub const SUITES: &[&str] =
    &["identity", "levin", "naq", "stability", "dkw", "descsel", "pigeonhole", "panel", "gc", "fano"];

/// Scan limit for selection indices.
pub const INDEX_CAP: u64 = 1 << 16;
/// `c` in the genericity audit.
pub const GENERICITY_C: u64 = 4;
pub const GENERICITY_ALPHA: f64 = 1.0;
pub const DKW_ATOMS: [f64; 8] = [0.05, 0.1, 0.2, 0.15, 0.1, 0.25, 0.1, 0.05];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub gated: bool,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn gate(name: impl Into<String>, pass: bool, detail: impl Serialize) -> Self {
        Self { name: name.into(), gated: true, pass, detail: to_value(detail) }
    }

    fn record(name: impl Into<String>, detail: impl Serialize) -> Self {
        Self { name: name.into(), gated: false, pass: true, detail: to_value(detail) }
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> Self {
        Self { suite: suite.into(), pass: checks.iter().all(|c| !c.gated || c.pass), checks }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub caps: Caps,
    pub seed: u64,
    pub fixtures: Fixtures,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { caps: Caps::default(), seed: 20240611, fixtures: Fixtures::shipped() }
    }
}

#[derive(Debug)]
pub enum VerifyError {
    UnknownSuite(String),
    Data(DataError),
    Core(naqkit_core::Error),
}

impl std::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyError::UnknownSuite(s) => write!(f, "unknown suite `{s}`; expected all or one of {}", SUITES.join(", ")),
            VerifyError::Data(e) => write!(f, "{e}"),
            VerifyError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<DataError> for VerifyError {
    fn from(e: DataError) -> Self {
        VerifyError::Data(e)
    }
}

impl From<naqkit_core::Error> for VerifyError {
    fn from(e: naqkit_core::Error) -> Self {
        VerifyError::Core(e)
    }
}

type R<T> = Result<T, VerifyError>;

pub fn run(suite: &str, opts: &VerifyOptions) -> R<Vec<SuiteReport>> {
    if suite == "all" {
        return SUITES.iter().map(|s| run_one(s, opts)).collect();
    }
    Ok(vec![run_one(suite, opts)?])
}

pub fn run_one(suite: &str, opts: &VerifyOptions) -> R<SuiteReport> {
    let checks = match suite {
        "identity" => identity(opts)?,
        "levin" => levin(opts)?,
        "naq" => naq(opts)?,
        "stability" => stability(opts)?,
        "dkw" => dkw(opts)?,
        "descsel" => descsel(opts)?,
        "pigeonhole" => pigeonhole(opts)?,
        "panel" => panel(opts)?,
        "gc" => gc(opts)?,
        "fano" => fano()?,
        other => return Err(VerifyError::UnknownSuite(other.into())),
    };
    Ok(SuiteReport::new(suite, checks))
}

fn identity(opts: &VerifyOptions) -> R<Vec<Check>> {
    let corpus = labeled(&opts.fixtures.identity_corpus()?);
    let rep = realizer_identity_audit(&corpus, opts.caps)?;
    Ok(vec![Check::gate("realizer_identity", rep.pass, &rep)])
}

pub const LEVIN_BS: std::ops::RangeInclusive<u64> = 8..=14;
pub const LEVIN_ADVICE_CAP: usize = 12;

fn levin(opts: &VerifyOptions) -> R<Vec<Check>> {
    let e = UniversalExecutor::default();
    let bs: Vec<u64> = LEVIN_BS.collect();
    let (checked, exceptions) = keep_discard_exceptions(&e, LEVIN_ADVICE_CAP, &bs);
    let mut checks = vec![Check::gate(
        "keep_discard",
        exceptions.is_empty(),
        json!({"executor": "universal", "max_advice_len": LEVIN_ADVICE_CAP, "bs": bs, "checked": checked, "exceptions": exceptions}),
    )];
    let mut rows = Vec::new();
    let mut mismatches = 0;
    for l in opts.fixtures.levin()? {
        let x = Instance::binary(l.x.clone());
        for &b in &bs {
            let got = levin_value(&x, &e, &l.predicate, b, u64::MAX)?;
            let want = kt_oracle(&x, &e, &l.predicate, b);
            let agree = got.value == want.as_ref().map(|w| w.0);
            if !agree {
                mismatches += 1;
            }
            rows.push(json!({
                "id": l.id, "b": b, "value": got.value, "witness": got.witness,
                "oracle": want.as_ref().map(|w| w.0), "agree": agree,
            }));
        }
    }
    checks.push(Check::gate("levin_equals_oracle", mismatches == 0, json!({"mismatches": mismatches, "rows": rows})));
    Ok(checks)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn naq(opts: &VerifyOptions) -> R<Vec<Check>> {
    use num_rational::Ratio;
    let p = Pool::from_bits(&[3, 5, 5, 8]);
    let hand = [(3, Ratio::new(1, 8)), (5, Ratio::new(1, 2)), (8, Ratio::new(7, 8)), (4, Ratio::new(1, 4))];
    let mut hand_ok = true;
    let mut hand_rows = Vec::new();
    for (m, want) in hand {
        let got = naq_midrank(MValue::bits(m), &p)?;
        hand_ok &= got == want;
        hand_rows.push(json!({"m": m, "naq": crate::report::ratio(&got), "expected": crate::report::ratio(&want)}));
    }
    hand_ok &= empirical_cdf(&p, Z::Value(KtValue::bits(5)))? == Ratio::new(3, 4);
    let mut mismatches = 0u64;
    let mut compared = 0u64;
    for i in 0..100 {
        let mut g = rng(opts.seed, i);
        let size = g.gen_range(1..=50);
        let vals: Vec<u64> = (0..size).map(|_| g.gen_range(0..20)).collect();
        let pool = Pool::from_bits(&vals);
        for q in 0..=21 {
            compared += 1;
            if naq_midrank(MValue::bits(q), &pool)? != midrank_oracle(q, &vals).expect("nonempty")
                || empirical_cdf(&pool, Z::Value(KtValue::bits(q)))? != cdf_oracle(q, &vals).expect("nonempty")
            {
                mismatches += 1;
            }
        }
    }
    Ok(vec![
        Check::gate("hand_values", hand_ok, hand_rows),
        Check::gate("random_pools", mismatches == 0, json!({"pools": 100, "queries": compared, "mismatches": mismatches})),
    ])
}

fn stability(opts: &VerifyOptions) -> R<Vec<Check>> {
    let mut violations = 0usize;
    let mut grid_points = 0usize;
    for i in 0..1000u64 {
        let mut g = rng(opts.seed ^ 0x5eed, i);
        let draw = |g: &mut ChaCha8Rng| KtValue::timed(g.gen_range(0..16), if g.gen_bool(0.2) { g.gen_range(0..4) } else { 0 });
        let base: Vec<KtValue> = (0..g.gen_range(1..=30)).map(|_| draw(&mut g)).collect();
        let mut all = base.clone();
        all.extend((0..g.gen_range(0..=30)).map(|_| draw(&mut g)));
        let t = Pool::from_values(base.into_iter().map(MValue::Finite));
        let tp = Pool::from_values(all.into_iter().map(MValue::Finite));
        let grid: Vec<KtValue> = (0..=17).map(KtValue::bits).chain([KtValue::timed(3, 1), KtValue::timed(7, 2)]).collect();
        let rep = pool_stability_check(&t, &tp, &grid)?;
        violations += rep.violations;
        grid_points += grid.len();
    }
    Ok(vec![Check::gate(
        "nested_pools",
        violations == 0,
        json!({"pools": 1000, "grid_points": grid_points, "violations": violations}),
    )])
}

fn dkw(opts: &VerifyOptions) -> R<Vec<Check>> {
    let mc = dkw_monte_carlo(&DKW_ATOMS, 1000, 2000, 0.05, opts.seed)?;
    Ok(vec![Check::gate("dkw_monte_carlo", mc.pass, &mc)])
}

fn prototypes_of(fs: &FeatureSystem) -> Option<&PrototypeTable> {
    match &fs.feature {
        FeatureMap::Prototype { table, .. } => Some(table),
        _ => None,
    }
}

fn descsel(opts: &VerifyOptions) -> R<Vec<Check>> {
    let f = opts.fixtures.descsel()?;
    let table = ProgramTable::shared(opts.caps)?;
    let en = Enumeration::LengthLex;
    let mut checks = Vec::new();

    let mut two_part = Vec::new();
    let mut generic_rows = Vec::new();
    let mut tight_rows = Vec::new();
    for c in &f.two_part {
        let fs = f.system(&c.system)?;
        let x = Instance::binary(c.x.clone());
        let rep = two_part_bound(&table, &x, fs, en, INDEX_CAP, C_DSEL);
        let mut all_generic = true;
        for row in rep.rows.iter().filter(|r| r.index.is_some()) {
            let g = fiber_genericity_audit(&table, &x, &row.y, fs, en, INDEX_CAP, GENERICITY_C, GENERICITY_ALPHA);
            all_generic &= g.generic;
            generic_rows.push(json!({"id": c.id, "y": row.y, "index": g.index, "outliers": g.outliers.len(), "allowed": g.allowed, "generic": g.generic}));
        }
        if all_generic {
            let diff = match (rep.m_exact, rep.bound) {
                (Some(m), Some(b)) => Some((m as i64 - b as i64).unsigned_abs()),
                _ => None,
            };
            tight_rows.push(json!({"id": c.id, "m_exact": rep.m_exact, "bound": rep.bound, "abs_diff": diff, "ok": diff.is_some_and(|d| d <= C_TIGHT)}));
        }
        two_part.push(json!({"id": c.id, "report": rep}));
    }
    let two_part_ok = two_part.iter().all(|r| r["report"]["pass"] == json!(true));
    let max_excess = two_part.iter().filter_map(|r| r["report"]["excess"].as_i64()).max();
    checks.push(Check::gate("two_part_bound", two_part_ok, json!({"c_dsel": C_DSEL, "observed_max_excess": max_excess, "cases": two_part})));

    let mut fa = Vec::new();
    let mut fa_ok = true;
    for c in &f.finite_ambiguity {
        let fs = f.system(&c.system)?;
        let protos = prototypes_of(fs).ok_or_else(|| DataError(format!("finite-ambiguity case `{}` needs a prototype system", c.id)))?;
        let xs: Vec<Instance> = c.xs.iter().cloned().map(Instance::binary).collect();
        let rep = finite_ambiguity_check(&table, &xs, fs, protos, c.max_response_len, C_FA);
        if !rep.coverage_ok {
            return Err(DataError(format!("finite-ambiguity case `{}`: prototype coverage violated", c.id)).into());
        }
        fa_ok &= rep.pass;
        fa.push(json!({"id": c.id, "report": rep}));
    }
    checks.push(Check::gate("finite_ambiguity", fa_ok, json!({"c_fa": C_FA, "cases": fa})));

    let mut cond = Vec::new();
    let mut cond_ok = true;
    let mut min_slack: Option<i64> = None;
    for c in &f.conditional {
        let fs = f.system(&c.system)?;
        let x = Instance::binary(c.x.clone());
        let ct = ProgramTable::shared_with_aux(opts.caps, Some(c.x.clone()))?;
        let rep = conditional_lb_audit(&table, &ct, &x, &c.y, fs, C_COND);
        cond_ok &= rep.pass;
        if let Some(s) = rep.slack {
            min_slack = Some(min_slack.map_or(s, |m| m.min(s)));
        }
        cond.push(json!({"id": c.id, "report": rep}));
    }
    checks.push(Check::gate("conditional_lower_bound", cond_ok, json!({"c_cond": C_COND, "observed_min_slack": min_slack, "cases": cond})));

    let tight_ok = tight_rows.iter().all(|r| r["ok"] == json!(true));
    checks.push(Check::record("fiber_genericity", json!({"c": GENERICITY_C, "alpha": GENERICITY_ALPHA, "reading": "literal", "pairs": generic_rows})));
    checks.push(Check::gate("tightness_on_generic", tight_ok, json!({"c_tight": C_TIGHT, "cases": tight_rows})));

    let p = &f.planted;
    let base = f.system(&p.base)?;
    let planted_fs = FeatureSystem::new(
        FeatureMap::Planted { base: Box::new(base.feature.clone()), planted: p.planted.clone(), y: p.y.clone() },
        base.circuit.clone(),
    )?;
    let g = fiber_genericity_audit(&table, &Instance::binary(p.x.clone()), &p.y, &planted_fs, en, INDEX_CAP, 0, GENERICITY_ALPHA);
    checks.push(Check::gate("planted_outlier_flagged", !g.generic && g.outliers.contains(&p.planted), &g));

    let mut dist = Vec::new();
    let mut dist_ok = true;
    for c in &f.distortion {
        let fs = f.system(&c.system)?;
        let xs: Vec<Instance> = c.xs.iter().cloned().map(Instance::binary).collect();
        let rep = enumeration_distortion(&table, &xs, fs, en, c.alt, INDEX_CAP, C_EN);
        dist_ok &= rep.pass;
        dist.push(json!({"id": c.id, "report": rep}));
    }
    checks.push(Check::gate("enumeration_distortion", dist_ok, json!({"c_en": C_EN, "cases": dist})));
    Ok(checks)
}

pub const PIGEONHOLE_NS: [u32; 3] = [2, 4, 8];

fn pigeonhole(_opts: &VerifyOptions) -> R<Vec<Check>> {
    let mut checks = Vec::new();
    for n in PIGEONHOLE_NS {
        let max_len = 2 * n as usize + 4;
        let rep = identity_family_bound(n, &ReferenceExecutor, max_len, C_ID)?;
        let cert_ok = verify_certificate(&rep.certificate, &ReferenceExecutor);
        let summary = json!({
            "n": n, "executor": rep.executor, "max_len": max_len, "c_id": C_ID,
            "sup_lower": rep.sup_lower, "argmax": rep.argmax,
            "argmax_naq": crate::report::ratio(&rep.argmax_naq),
            "certificate": rep.certificate, "certificate_verified": cert_ok,
        });
        checks.push(Check::gate(format!("identity_family_n{n}"), rep.pass && cert_ok, summary));
    }
    Ok(checks)
}

pub const PANEL_SIZES: [usize; 3] = [2, 4, 8];

fn panel(opts: &VerifyOptions) -> R<Vec<Check>> {
    let table = ProgramTable::shared(opts.caps)?;
    let mut checks = Vec::new();
    for size in PANEL_SIZES {
        let panel = separated_panel(size, 7, 1);
        let rep = variant_panel_bound(&panel, &table, C_VP)?;
        checks.push(Check::gate(format!("separated_panel_{size}"), rep.pass(), &rep));
    }
    let overlapping: Vec<(Instance, Predicate)> = lexicode(6, 3, 4)
        .into_iter()
        .map(|c| (Instance::binary(c), Predicate::HammingBall { center: None, radius: 2 }))
        .collect();
    let rep = variant_panel_bound(&overlapping, &table, C_VP)?;
    let surfaced = matches!(rep, PanelReport::PreconditionViolated { .. });
    checks.push(Check::gate("overlap_surfaced", surfaced, &rep));
    Ok(checks)
}

pub const GC_PS: [f64; 3] = [0.5, 0.1, 0.01];
pub const GC_NS: [u64; 3] = [1, 10, 100];
pub const GC_TRIALS: u64 = 10_000;

fn gc(opts: &VerifyOptions) -> R<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for (i, &p) in GC_PS.iter().enumerate() {
        for (j, &n) in GC_NS.iter().enumerate() {
            let seed = opts.seed.wrapping_add((i * GC_NS.len() + j) as u64);
            let sim = gc_simulate(SelectionModel::fixed(p, n), GC_TRIALS, seed)?;
            ok &= sim.within_3_sigma;
            rows.push(sim);
        }
    }
    checks.push(Check::gate("closed_form_vs_simulation", ok, &rows));
    let req = gc_required(0.01, 0.05)?;
    checks.push(Check::gate("required_candidates", req == 300, json!({"p": 0.01, "eps": 0.05, "required": req})));

    let f = opts.fixtures.descsel()?;
    let table = ProgramTable::shared(opts.caps)?;
    let mut gaps = Vec::new();
    for c in &f.conditional {
        let fs = f.system(&c.system)?;
        let r = gc_index_vs_p(&table, &Instance::binary(c.x.clone()), &c.y, fs, Enumeration::LengthLex, INDEX_CAP);
        gaps.push(json!({"id": c.id, "index": r.index, "log_index": r.log_index, "log_inv_p": r.log_inv_p, "gap": r.gap, "incomplete": r.incomplete}));
    }
    checks.push(Check::record("index_vs_probability", json!({"semimeasure": "truncated to the length cap and renormalized", "cases": gaps})));
    Ok(checks)
}

fn fano() -> R<Vec<Check>> {
    let exact = fano_lower_bound(3.0, 0.0, 8, KRAFT_SLACK)?;
    let noisy = fano_lower_bound(3.0, 0.1, 8, KRAFT_SLACK)?;
    let zero = fano_lower_bound(0.0, 0.1, 8, KRAFT_SLACK)?;
    let h = binary_entropy(0.1)?;
    Ok(vec![
        Check::gate("eps_zero", exact == 2.0, json!({"h": 3.0, "eps": 0.0, "support": 8, "slack": KRAFT_SLACK, "bound": exact})),
        Check::gate("eps_tenth", (noisy - 1.2503).abs() <= 1e-3, json!({"h": 3.0, "eps": 0.1, "support": 8, "slack": KRAFT_SLACK, "bound": noisy, "binary_entropy": h, "expected": 1.2503})),
        Check::gate("zero_entropy", zero == 0.0, json!({"bound": zero})),
    ])
}

/// The pool of `M̂` values for a labeled corpus; used by `profile` and tests.
pub fn m_values(corpus: &[(String, Instance, Predicate)], table: &ProgramTable) -> Vec<(String, Option<u64>)> {
    corpus.iter().map(|(id, x, v)| (id.clone(), m_exact_in(table, x, v, u64::MAX).bits())).collect()
}

pub fn summary_csv(reports: &[SuiteReport]) -> String {
    let mut rows = vec![vec!["suite".to_string(), "check".into(), "gated".into(), "pass".into()]];
    for s in reports {
        for c in &s.checks {
            rows.push(vec![s.suite.clone(), c.name.clone(), c.gated.to_string(), c.pass.to_string()]);
        }
    }
    crate::report::to_csv(&rows)
}
