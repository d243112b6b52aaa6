use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use naqkit_core::bitcode::{decode_nat, encode_nat, PrefixCodeSet};
use naqkit_core::bounds::{
    fano_lower_bound, gc_simulate, identity_family_bound, separated_panel, variant_panel_bound, verify_certificate,
    SelectionModel,
};
use naqkit_core::complexity::{
    khat_compressor, khat_in, levin_value, m_compressor, m_exact_in, mt_exact_in, Caps, EstimateStatus, ProgramTable,
};
use naqkit_core::constants::{registry, C_ID, C_VP, KRAFT_SLACK};
use naqkit_core::executor::{Executor, MachineExecutor, ReferenceExecutor, UniversalExecutor};
use naqkit_core::naq::{dkw_band, dkw_epsilon, naq_midrank, pool_stability_check, rank_pool, MValue};
use naqkit_core::validity::Instance;
use naqkit_core::{BitString, KtValue};
use naqkit_cli::exit;
use naqkit_cli::fixtures::Fixtures;
use naqkit_cli::io::{parse_corpus, parse_pool, parse_predicate, pool_to_jsonl, predicate_of, to_pool, PoolRecord, PoolStatus};
use naqkit_cli::report::{ratio, to_csv, to_json, RunManifest};
use naqkit_cli::verify::{self, VerifyError, VerifyOptions};
use serde_json::json;

#[derive(Parser)]
#[command(name = "naqkit", version, about = "Advice complexity and mid-rank quantiles on a bounded reference machine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct CapArgs {
    /// Program length cap in bits.
    #[arg(long = "caps-len", default_value_t = 20)]
    caps_len: usize,
    /// Step budget per program.
    #[arg(long = "caps-steps", default_value_t = 1 << 16)]
    caps_steps: u64,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps::new(self.caps_len, self.caps_steps)
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecutorId {
    Reference,
    Universal,
    Machine,
}

impl ExecutorId {
    fn get(self) -> Box<dyn Executor> {
        match self {
            ExecutorId::Reference => Box::new(ReferenceExecutor),
            ExecutorId::Universal => Box::new(UniversalExecutor::default()),
            ExecutorId::Machine => Box::new(MachineExecutor::default()),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Self-delimiting code of a natural number.
    Encode { n: u64 },
    /// Prefix-freeness and Kraft sum of a codeword set.
    PrefixCheck { codewords: Vec<BitString> },
    /// Run an executor on advice.
    Exec {
        w: BitString,
        #[arg(long, value_enum, default_value = "universal")]
        executor: ExecutorId,
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
    },
    /// `K̂(r)`, exact within caps or through a compressor.
    Khat {
        r: Vec<BitString>,
        #[arg(long, default_value = "exact")]
        method: String,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// `M̂(x)` for a predicate.
    Mexact {
        #[arg(long)]
        x: BitString,
        #[arg(long)]
        predicate: String,
        /// Add the time term.
        #[arg(long)]
        timed: bool,
        #[arg(long, default_value_t = u64::MAX)]
        stage: u64,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Truncated advice-plus-time search.
    Levin {
        #[arg(long)]
        x: BitString,
        #[arg(long)]
        predicate: String,
        #[arg(long = "budget-B")]
        budget_b: u64,
        #[arg(long, value_enum, default_value = "universal")]
        executor: ExecutorId,
    },
    /// Estimate `M̂` for every record of a JSONL corpus and emit a pool.
    Profile {
        corpus: PathBuf,
        /// Default predicate for records without one.
        #[arg(long)]
        predicate: Option<String>,
        /// exact, levin or compressor:<id>
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long = "budget-B", default_value_t = 16)]
        budget_b: u64,
        /// Response length limit for compressor proxies.
        #[arg(long, default_value_t = 12)]
        max_response_len: usize,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Naq(NaqCmd),
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Run a verify suite: all, identity, levin, naq, stability, dkw,
    /// descsel, pigeonhole, panel, gc or fano.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the versions and constants embedded in every report.
    Registry,
}

#[derive(Subcommand)]
enum NaqCmd {
    /// Mid-rank quantile of an id or a value within a pool.
    Rank {
        pool: PathBuf,
        #[arg(long, conflicts_with = "m")]
        id: Option<String>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, default_value_t = 1)]
        bucket: u64,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// DKW tail bound or half-width.
    Band {
        #[arg(long)]
        n: u64,
        #[arg(long, conflicts_with = "confidence")]
        epsilon: Option<f64>,
        #[arg(long)]
        confidence: Option<f64>,
    },
    /// Nested-pool stability inequalities on the union of both value sets.
    Stability { t: PathBuf, t_prime: PathBuf },
}

#[derive(Subcommand)]
enum BoundsCmd {
    Fano {
        #[arg(long)]
        h: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        support: u64,
        #[arg(long, default_value_t = KRAFT_SLACK)]
        slack: f64,
    },
    Identity {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "reference")]
        executor: ExecutorId,
        #[arg(long)]
        max_len: Option<usize>,
    },
    Panel {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 7)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        rho: usize,
        #[command(flatten)]
        caps: CapArgs,
    },
    Gc {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<naqkit_core::Error> for Failure {
    fn from(e: naqkit_core::Error) -> Self {
        match e {
            naqkit_core::Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<naqkit_cli::io::DataError> for Failure {
    fn from(e: naqkit_cli::io::DataError) -> Self {
        Failure::Data(e.0)
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::UnknownSuite(_) => Failure::Usage(e.to_string()),
            VerifyError::Core(c) => c.into(),
            VerifyError::Data(d) => d.into(),
        }
    }
}

/// Output plus the process status it implies.
struct Outcome {
    text: String,
    out: Option<PathBuf>,
    pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, out: None, pass: true }
    }
}

fn read(p: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure::Data(format!("{}: {e}", p.display())))
}

fn table(caps: Caps) -> Result<std::sync::Arc<ProgramTable>, Failure> {
    Ok(ProgramTable::shared(caps)?)
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.cmd {
        Cmd::Encode { n } => {
            let code = encode_nat(n)?;
            let back = decode_nat(code.bits()).map(|d| d.0);
            let m = RunManifest::new("encode").param("n", n);
            Ok(Outcome::ok(to_json(&m, &json!({"n": n, "code": code, "len": code.len(), "decodes_to": back}))))
        }
        Cmd::PrefixCheck { codewords } => {
            let set = PrefixCodeSet::new(codewords.clone());
            let (prefix_free, kraft) = set.check();
            let m = RunManifest::new("prefix-check").param("codewords", codewords.len());
            let body = json!({
                "prefix_free": prefix_free,
                "kraft_sum": format!("{}/{}", kraft.numer(), kraft.denom()),
            });
            let pass = body["prefix_free"] == json!(true);
            Ok(Outcome { text: to_json(&m, &body), out: None, pass })
        }
        Cmd::Exec { w, executor, budget } => {
            let e = executor.get();
            let out = e.run(&w, budget);
            let m = RunManifest::new("exec").param("executor", e.id()).param("w", &w).param("budget", budget);
            Ok(Outcome::ok(to_json(&m, &out)))
        }
        Cmd::Khat { r, method, caps, format } => {
            let caps = caps.caps();
            let m = RunManifest::new("khat").param("method", &method).caps(caps);
            let mut ests = Vec::new();
            if method == "exact" {
                let t = table(caps)?;
                for s in &r {
                    ests.push(khat_in(&t, s));
                }
            } else if let Some(id) = method.strip_prefix("compressor:") {
                for s in &r {
                    ests.push(khat_compressor(s, id)?);
                }
            } else {
                return Err(Failure::Usage(format!("khat method must be exact or compressor:<id>, got `{method}`")));
            }
            if format == Format::Csv {
                let mut rows = vec![vec!["r".to_string(), "method".into(), "caps".into(), "value".into(), "witness_hex".into()]];
                for (s, e) in r.iter().zip(&ests) {
                    rows.push(vec![
                        s.to_string(),
                        method.clone(),
                        format!("{}/{}", caps.length_cap, caps.step_budget),
                        e.bits().map_or("inf".into(), |b| b.to_string()),
                        e.witness.as_ref().map_or(String::new(), |w| w.to_hex()),
                    ]);
                }
                return Ok(Outcome::ok(to_csv(&rows)));
            }
            let body: Vec<_> = r.iter().zip(&ests).map(|(s, e)| json!({"r": s, "estimate": e})).collect();
            Ok(Outcome::ok(to_json(&m, &body)))
        }
        Cmd::Mexact { x, predicate, timed, stage, caps } => {
            let v = parse_predicate(&predicate)?;
            let caps = caps.caps();
            let t = table(caps)?;
            let xi = Instance::binary(x.clone());
            let est = if timed { mt_exact_in(&t, &xi, &v, stage) } else { m_exact_in(&t, &xi, &v, stage) };
            let m = RunManifest::new("mexact").param("x", &x).param("predicate", v.id()).param("timed", timed).caps(caps);
            Ok(Outcome::ok(to_json(&m, &est)))
        }
        Cmd::Levin { x, predicate, budget_b, executor } => {
            let v = parse_predicate(&predicate)?;
            let e = executor.get();
            let res = levin_value(&Instance::binary(x.clone()), &*e, &v, budget_b, u64::MAX)?;
            let m = RunManifest::new("levin").param("x", &x).param("predicate", v.id()).param("B", budget_b).param("executor", e.id());
            Ok(Outcome::ok(to_json(&m, &res)))
        }
        Cmd::Profile { corpus, predicate, method, budget_b, max_response_len, caps, format, out } => {
            let records = parse_corpus(&read(&corpus)?)?;
            let default = predicate.as_deref().map(parse_predicate).transpose()?;
            let caps = caps.caps();
            if records.is_empty() {
                eprintln!("warning: empty corpus; the pool is empty");
            }
            let mut pool = Vec::new();
            let exact_table = if method == "exact" { Some(table(caps)?) } else { None };
            for rec in &records {
                let v = predicate_of(rec, default.as_ref())?;
                let x = rec.instance();
                let rec_out = match method.as_str() {
                    "exact" => {
                        let est = m_exact_in(exact_table.as_ref().expect("built above"), &x, &v, u64::MAX);
                        let status = match est.status {
                            EstimateStatus::Exact => PoolStatus::Exact,
                            EstimateStatus::UnknownAtBudget => PoolStatus::UnknownAtBudget,
                            // not found within caps is not the same as infeasible
                            _ => PoolStatus::UnknownAtBudget,
                        };
                        PoolRecord { id: rec.id.clone(), m: est.bits(), time_steps: None, method: "exact".into(), caps: Some(caps), status }
                    }
                    "levin" => {
                        let res = levin_value(&x, &UniversalExecutor::default(), &v, budget_b, u64::MAX)?;
                        let status = if res.value.is_some() { PoolStatus::Exact } else { PoolStatus::UnknownAtBudget };
                        PoolRecord {
                            id: rec.id.clone(),
                            m: res.witness.as_ref().map(|w| w.len() as u64),
                            time_steps: res.tau,
                            method: format!("levin:B={budget_b}"),
                            caps: None,
                            status,
                        }
                    }
                    other => {
                        let Some(id) = other.strip_prefix("compressor:") else {
                            return Err(Failure::Usage(format!("unknown method `{other}`")));
                        };
                        let est = m_compressor(&x, &v, id, max_response_len)?;
                        let status = if est.is_finite() { PoolStatus::Proxy } else { PoolStatus::UnknownAtBudget };
                        PoolRecord { id: rec.id.clone(), m: est.bits(), time_steps: None, method: other.into(), caps: None, status }
                    }
                };
                pool.push(rec_out);
            }
            let text = if format == Format::Csv {
                let mut rows = vec![vec!["id".to_string(), "m".into(), "time_steps".into(), "method".into(), "status".into()]];
                for r in &pool {
                    rows.push(vec![
                        r.id.clone(),
                        r.m.map_or(String::new(), |v| v.to_string()),
                        r.time_steps.map_or(String::new(), |v| v.to_string()),
                        r.method.clone(),
                        serde_json::to_value(r.status).expect("status").as_str().expect("string").into(),
                    ]);
                }
                to_csv(&rows)
            } else {
                pool_to_jsonl(&pool)
            };
            Ok(Outcome { text, out, pass: true })
        }
        Cmd::Naq(NaqCmd::Rank { pool, id, m, bucket, confidence, format }) => {
            let records = parse_pool(&read(&pool)?)?;
            let (p, unknown) = to_pool(&records);
            if p.size() == 0 {
                return Err(Failure::Data("pool has no finite entries".into()));
            }
            let manifest = RunManifest::new("naq rank")
                .param("pool", pool.display())
                .param("bucket", bucket)
                .param("confidence", confidence);
            let rep = rank_pool(&p, bucket, confidence)?;
            let query = match (&id, m) {
                (Some(id), _) => {
                    let e = p.get(id).ok_or_else(|| match records.iter().find(|r| &r.id == id) {
                        Some(_) => Failure::Data(format!("`{id}` is unknown at budget and was left out of the pool")),
                        None => Failure::Data(format!("unknown id `{id}`")),
                    })?;
                    if e.m == MValue::Infinite {
                        return Err(Failure::Data(format!("`{id}` has infinite M; it lies outside the domain and has no quantile")));
                    }
                    Some(json!({"id": id, "naq": ratio(&naq_midrank(e.m, &p)?)}))
                }
                (None, Some(v)) => Some(json!({"m": v, "naq": ratio(&naq_midrank(MValue::bits(v), &p)?), "bucket": v / bucket})),
                (None, None) => None,
            };
            if format == Format::Csv {
                let mut rows = vec![vec!["id".to_string(), "m".into(), "naq".into(), "bucket".into(), "bucket_naq".into()]];
                for e in &rep.entries {
                    rows.push(vec![
                        e.id.clone(),
                        e.m.finite().map_or("inf".into(), |v| v.bits.to_string()),
                        e.naq.as_ref().map_or(String::new(), ratio),
                        e.bucket.map_or(String::new(), |b| b.to_string()),
                        e.bucket_naq.as_ref().map_or(String::new(), ratio),
                    ]);
                }
                return Ok(Outcome::ok(to_csv(&rows)));
            }
            let body = json!({
                "query": query,
                "size": rep.size,
                "infinite": rep.infinite,
                "unknown_at_budget": unknown,
                "epsilon": rep.epsilon,
                "entries": rep.entries.iter().map(|e| json!({
                    "id": e.id, "m": e.m, "naq": e.naq.as_ref().map(ratio),
                    "bucket": e.bucket, "bucket_naq": e.bucket_naq.as_ref().map(ratio),
                })).collect::<Vec<_>>(),
            });
            Ok(Outcome::ok(to_json(&manifest, &body)))
        }
        Cmd::Naq(NaqCmd::Band { n, epsilon, confidence }) => {
            let m = RunManifest::new("naq band").param("n", n);
            let body = match (epsilon, confidence) {
                (Some(e), _) => json!({"n": n, "epsilon": e, "tail_bound": dkw_band(n, e)?}),
                (None, Some(c)) => json!({"n": n, "confidence": c, "epsilon": dkw_epsilon(n, 1.0 - c)?}),
                (None, None) => return Err(Failure::Usage("give --epsilon or --confidence".into())),
            };
            Ok(Outcome::ok(to_json(&m, &body)))
        }
        Cmd::Naq(NaqCmd::Stability { t, t_prime }) => {
            let (a, _) = to_pool(&parse_pool(&read(&t)?)?);
            let (b, _) = to_pool(&parse_pool(&read(&t_prime)?)?);
            let mut grid: Vec<KtValue> = a.finite_values().into_iter().chain(b.finite_values()).collect();
            grid.sort();
            grid.dedup();
            let rep = pool_stability_check(&a, &b, &grid)?;
            let m = RunManifest::new("naq stability").param("t", t.display()).param("t_prime", t_prime.display());
            let pass = rep.pass;
            Ok(Outcome { text: to_json(&m, &rep), out: None, pass })
        }
        Cmd::Bounds(BoundsCmd::Fano { h, epsilon, support, slack }) => {
            let b = fano_lower_bound(h, epsilon, support, slack)?;
            let m = RunManifest::new("bounds fano").param("h", h).param("epsilon", epsilon).param("support", support).param("slack", slack);
            Ok(Outcome::ok(to_json(&m, &json!({"bound_bits": b}))))
        }
        Cmd::Bounds(BoundsCmd::Identity { n, executor, max_len }) => {
            let e = executor.get();
            let max_len = max_len.unwrap_or(2 * n as usize + 4);
            let rep = identity_family_bound(n, &*e, max_len, C_ID)?;
            let verified = verify_certificate(&rep.certificate, &*e);
            let m = RunManifest::new("bounds identity").param("n", n).param("executor", e.id()).param("max_len", max_len);
            let pass = rep.pass && verified;
            let body = json!({"report": rep, "certificate_verified": verified});
            Ok(Outcome { text: to_json(&m, &body), out: None, pass })
        }
        Cmd::Bounds(BoundsCmd::Panel { size, len, rho, caps }) => {
            let caps = caps.caps();
            let rep = variant_panel_bound(&separated_panel(size, len, rho), &*table(caps)?, C_VP)?;
            let m = RunManifest::new("bounds panel").param("size", size).param("len", len).param("rho", rho).caps(caps);
            let pass = rep.pass();
            Ok(Outcome { text: to_json(&m, &rep), out: None, pass })
        }
        Cmd::Bounds(BoundsCmd::Gc { p, n, trials, eps, seed }) => {
            let model = SelectionModel { epsilon: eps, ..SelectionModel::fixed(p, n) };
            let sim = gc_simulate(model, trials, seed)?;
            let m = RunManifest::new("bounds gc").param("p", p).param("n", n).param("trials", trials).param("eps", eps).seed(seed);
            let pass = sim.within_3_sigma;
            Ok(Outcome { text: to_json(&m, &sim), out: None, pass })
        }
        Cmd::Verify { suite, seed, fixtures, caps, format, out } => {
            let opts = VerifyOptions {
                caps: caps.caps(),
                seed,
                fixtures: fixtures.clone().map_or_else(Fixtures::shipped, Fixtures::from_dir),
            };
            let reports = verify::run(&suite, &opts)?;
            let pass = reports.iter().all(|r| r.pass);
            let mut m = RunManifest::new("verify").param("suite", &suite).caps(opts.caps).seed(seed);
            if let Some(d) = &fixtures {
                m = m.param("fixtures", d.display());
            }
            let text = match format {
                Format::Json => to_json(&m, &json!({"pass": pass, "suites": reports})),
                Format::Csv => verify::summary_csv(&reports),
            };
            Ok(Outcome { text, out, pass })
        }
        Cmd::Registry => Ok(Outcome::ok(to_json(&RunManifest::new("registry"), &registry()))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::PASS as u8 });
        }
    };
    match run(cli) {
        Ok(o) => {
            if let Some(p) = &o.out {
                if let Err(e) = std::fs::write(p, &o.text) {
                    eprintln!("error: {}: {e}", p.display());
                    return ExitCode::from(exit::DATA as u8);
                }
            } else {
                print!("{}", o.text);
            }
            ExitCode::from(if o.pass { exit::PASS } else { exit::FAIL } as u8)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(exit::USAGE as u8)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(exit::DATA as u8)
        }
    }
}
