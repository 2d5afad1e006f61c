use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use opcalc::acceptance::{self, CRITERIA};
use opcalc::bar::{bar, bar_bimodule};
use opcalc::calculus_examples::{chain_rule_spaces_check, derivatives_of_identity, mapping_space_derivatives, smash_functor_derivatives, spaces_spaces_s0, EXAMPLES};
use opcalc::chaincore::Field;
use opcalc::genfun::verify_fa_di_bruno;
use opcalc::koszul::{ext_right, gamma_map, koszul_dual_module, koszul_dual_operad, KoszulModule, ModuleInput};
use opcalc::operad::{com_operad, LeftModule, Operad, RightModule, SimplicialSet};
use opcalc::symseq::compose;
use serde_json::{json, Map, Value};

use crate::schema::{self, bar_json, homology_json, left_module_json, operad_json, right_module_json, symseq_json};

#[derive(Parser, Debug)]
#[command(name = "opcalc", version, about = "Exact chain-level operads, bar constructions and Koszul duality")]
pub struct Cli {
    #[command(flatten)]
    pub config: JobConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct JobConfig {
    /// Q or F<p>
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    /// Arity bound N for constructed examples
    #[arg(long, global = true, default_value_t = 4)]
    pub arity_max: usize,
    /// Lowest degree reported in homology tables
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub degree_min: Option<i32>,
    /// Highest degree reported in homology tables
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub degree_max: Option<i32>,
    /// Worker threads (OPCALC_JOBS takes precedence)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file; standard output when absent
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// A∘B of two sequences
    Compose { a: PathBuf, b: PathBuf },
    /// The normalized bar B(R,P,L) or B(R,P,M,P,L)
    Bar {
        #[arg(long)]
        right: Option<PathBuf>,
        #[arg(long)]
        operad: PathBuf,
        #[arg(long)]
        left: Option<PathBuf>,
        #[arg(long)]
        bimodule: Option<PathBuf>,
        #[arg(long)]
        homology: bool,
    },
    /// K(P) = D B(P)
    Koszul { operad: PathBuf },
    /// Koszul dual of a module over P, as a module over K(P)
    KoszulModule {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        operad: PathBuf,
        #[arg(long, value_enum)]
        side: Side,
    },
    /// Per-arity quasi-isomorphism verdicts for Γ
    Gamma {
        #[arg(long)]
        right: Option<PathBuf>,
        #[arg(long)]
        operad: PathBuf,
        #[arg(long)]
        left: Option<PathBuf>,
    },
    /// Derived maps of right modules
    ExtRight {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        operad: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        homology: bool,
    },
    /// Packaged examples: com, derivatives-of-identity, mapping-space, smash-functor, chain-rule, spaces-spaces
    Example {
        name: String,
        /// s0, s1-minimal or s1-square
        #[arg(long, default_value = "s0")]
        space: String,
    },
    /// χ(A∘B) against the composed generating functions
    FaDiBruno { a: PathBuf, b: PathBuf },
    /// Acceptance suite: `all`, a criterion number or a criterion name
    Verify { suite: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Side {
    Right,
    Left,
    Bi,
}

/// Exit status: success, failed verification, bad input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failed = 1,
    Input = 2,
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load<T>(path: &Path, parse: impl FnOnce(&Value) -> Result<T, schema::SchemaError>) -> anyhow::Result<T> {
    let v = read_json(path)?;
    parse(&v).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_operad(path: &Path) -> anyhow::Result<Arc<Operad>> {
    Ok(Arc::new(load(path, schema::parse_operad)?))
}

fn load_right(path: Option<&PathBuf>, p: &Arc<Operad>) -> anyhow::Result<RightModule> {
    match path {
        Some(f) => load(f, |v| schema::parse_right_module(v, p)),
        None => Ok(RightModule::unit(p)),
    }
}

fn load_left(path: Option<&PathBuf>, p: &Arc<Operad>) -> anyhow::Result<LeftModule> {
    match path {
        Some(f) => load(f, |v| schema::parse_left_module(v, p)),
        None => Ok(LeftModule::unit(p)),
    }
}

impl JobConfig {
    fn field(&self) -> anyhow::Result<Field> {
        self.field.parse().map_err(|e| anyhow!("--field: {e}"))
    }

    fn window(&self, h: Vec<BTreeMap<i32, usize>>) -> Vec<BTreeMap<i32, usize>> {
        h.into_iter()
            .map(|m| m.into_iter().filter(|(q, _)| self.degree_min.map_or(true, |d| *q >= d) && self.degree_max.map_or(true, |d| *q <= d)).collect())
            .collect()
    }

    /// Thread count: OPCALC_JOBS, then --jobs, then rayon's default.
    pub fn threads(&self) -> anyhow::Result<Option<usize>> {
        if let Ok(s) = std::env::var("OPCALC_JOBS") {
            let n: usize = s.trim().parse().map_err(|_| anyhow!("OPCALC_JOBS must be a positive integer, got {s:?}"))?;
            if n == 0 {
                bail!("OPCALC_JOBS must be a positive integer");
            }
            return Ok(Some(n));
        }
        Ok(self.jobs)
    }
}

fn report(kind_field: Field, n: usize, body: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!("report"));
    m.insert("field".into(), json!(kind_field.to_string()));
    m.insert("arity_max".into(), json!(n));
    m.extend(body);
    Value::Object(m)
}

/// Runs one command, returning the JSON to emit and the verdict.
pub fn execute(cfg: &JobConfig, cmd: &Command) -> anyhow::Result<(Value, Status)> {
    match cmd {
        Command::Compose { a, b } => {
            let a = load(a, schema::parse_symseq)?;
            let b = load(b, schema::parse_symseq)?;
            let c = compose(&a, &b).map_err(|e| anyhow!("{e}"))?;
            Ok((symseq_json(&c, "A∘B"), Status::Ok))
        }
        Command::Bar { right, operad, left, bimodule, homology } => {
            let p = load_operad(operad)?;
            let r = load_right(right.as_ref(), &p)?;
            let l = load_left(left.as_ref(), &p)?;
            let b = match bimodule {
                Some(m) => {
                    let m = load(m, |v| schema::parse_bimodule(v, &p))?;
                    bar_bimodule(&r, &p, &m, &l)
                }
                None => bar(&r, &p, &l),
            }
            .map_err(|e| anyhow!("{e}"))?;
            let mut v = bar_json(&b);
            if *homology {
                let mut h = Vec::new();
                for n in 1..=b.seq.arity_max {
                    let hn = b.seq.comp(n).complex.homology();
                    eprintln!("bar arity {n}: dim {} homology {hn:?}", b.seq.dim(n));
                    h.push(hn);
                }
                v["homology"] = homology_json(&cfg.window(h));
            }
            Ok((v, Status::Ok))
        }
        Command::Koszul { operad } => {
            let p = load_operad(operad)?;
            let k = koszul_dual_operad(&p).map_err(|e| anyhow!("{e}"))?;
            Ok((operad_json(&k), Status::Ok))
        }
        Command::KoszulModule { module, operad, side } => {
            let p = load_operad(operad)?;
            let kp = koszul_dual_operad(&p).map_err(|e| anyhow!("{e}"))?;
            let out = match side {
                Side::Right => koszul_dual_module(ModuleInput::Right(&load(module, |v| schema::parse_right_module(v, &p))?), &kp),
                Side::Left => koszul_dual_module(ModuleInput::Left(&load(module, |v| schema::parse_left_module(v, &p))?), &kp),
                Side::Bi => koszul_dual_module(ModuleInput::Bi(&load(module, |v| schema::parse_bimodule(v, &p))?), &kp),
            }
            .map_err(|e| anyhow!("{e}"))?;
            Ok((
                match out {
                    KoszulModule::Right(r) => right_module_json(&r),
                    KoszulModule::Left(l) => left_module_json(&l),
                },
                Status::Ok,
            ))
        }
        Command::Gamma { right, operad, left } => {
            let p = load_operad(operad)?;
            let r = load_right(right.as_ref(), &p)?;
            let l = load_left(left.as_ref(), &p)?;
            let g = gamma_map(&r, &p, &l).map_err(|e| anyhow!("{e}"))?;
            let mut verdicts = Map::new();
            let mut all = true;
            for (i, m) in g.maps.maps.iter().enumerate() {
                let q = m.is_quasi_iso().map_err(|e| anyhow!("{e}"))?;
                eprintln!("gamma arity {}: {}", i + 1, if q { "quasi-iso" } else { "NOT a quasi-iso" });
                all &= q;
                verdicts.insert((i + 1).to_string(), json!(q));
            }
            let body = Map::from_iter([("check".into(), json!("gamma")), ("quasi_iso".into(), Value::Object(verdicts)), ("passed".into(), json!(all))]);
            Ok((report(p.field(), p.arity_max(), body), if all { Status::Ok } else { Status::Failed }))
        }
        Command::ExtRight { module, operad, target, homology } => {
            let p = load_operad(operad)?;
            p.field().check_char(p.arity_max()).map_err(|e| anyhow!("{e}"))?;
            let r = load(module, |v| schema::parse_right_module(v, &p))?;
            let n2 = load(target, |v| schema::parse_right_module(v, &p))?;
            let c = ext_right(&r, &n2).map_err(|e| anyhow!("{e}"))?;
            let dims: Map<String, Value> = c.dims().into_iter().map(|(q, d)| (q.to_string(), json!(d))).collect();
            let mut body = Map::from_iter([("check".into(), json!("ext-right")), ("dims".into(), Value::Object(dims)), ("euler".into(), json!(c.euler()))]);
            if *homology {
                let h = cfg.window(vec![c.homology()]).remove(0);
                body.insert("homology".into(), Value::Object(h.into_iter().map(|(q, d)| (q.to_string(), json!(d))).collect()));
            }
            Ok((report(p.field(), p.arity_max(), body), Status::Ok))
        }
        Command::Example { name, space } => example(cfg, name, space),
        Command::FaDiBruno { a, b } => {
            let a = load(a, schema::parse_symseq)?;
            let b = load(b, schema::parse_symseq)?;
            let r = verify_fa_di_bruno(&a, &b).map_err(|e| anyhow!("{e}"))?;
            let rows: Vec<Value> = r.rows.iter().map(|x| json!({"n": x.n, "composite": x.composite, "predicted": format!("{}/{}", x.predicted.numer(), x.predicted.denom())})).collect();
            let passed = r.passed();
            let body = Map::from_iter([("check".into(), json!("fa-di-bruno")), ("rows".into(), json!(rows)), ("passed".into(), json!(passed))]);
            Ok((report(a.field, a.arity_max, body), if passed { Status::Ok } else { Status::Failed }))
        }
        Command::Verify { suite } => verify(suite),
    }
}

fn example(cfg: &JobConfig, name: &str, space: &str) -> anyhow::Result<(Value, Status)> {
    let field = cfg.field()?;
    let n = cfg.arity_max;
    if n == 0 {
        bail!("--arity-max must be at least 1");
    }
    if name == "com" {
        return Ok((operad_json(&com_operad(field, n)), Status::Ok));
    }
    if !EXAMPLES.contains(&name) {
        bail!("unknown example {name:?}; expected com or one of {}", EXAMPLES.join(", "));
    }
    let di = derivatives_of_identity(field, n).map_err(|e| anyhow!("{e}"))?;
    let k = || SimplicialSet::named(space).map_err(|e| anyhow!("{e}"));
    let v = match name {
        "derivatives-of-identity" => operad_json(&di),
        "mapping-space" => right_module_json(&mapping_space_derivatives(&k()?, &di).map_err(|e| anyhow!("{e}"))?),
        "smash-functor" => left_module_json(&smash_functor_derivatives(&k()?, &di).map_err(|e| anyhow!("{e}"))?),
        "chain-rule" => {
            let g = smash_functor_derivatives(&k()?, &di).map_err(|e| anyhow!("{e}"))?;
            let rep = chain_rule_spaces_check(&RightModule::from_operad(&di), &g).map_err(|e| anyhow!("{e}"))?;
            let computed = cfg.window(rep.rows.iter().map(|r| r.computed.clone()).collect());
            let reference = cfg.window(rep.rows.iter().filter_map(|r| r.reference.clone()).collect());
            let passed = rep.passed();
            let body = Map::from_iter([
                ("check".into(), json!("chain-rule")),
                ("homology".into(), homology_json(&computed)),
                ("reference".into(), homology_json(&reference)),
                ("passed".into(), json!(passed)),
            ]);
            return Ok((report(field, n, body), if passed { Status::Ok } else { Status::Failed }));
        }
        _ => {
            let (lhs, rhs) = spaces_spaces_s0(field, n).map_err(|e| anyhow!("{e}"))?;
            let agree = lhs == rhs;
            let body = Map::from_iter([
                ("check".into(), json!("spaces-spaces")),
                ("bar".into(), homology_json(&cfg.window(lhs))),
                ("map".into(), homology_json(&cfg.window(rhs))),
                ("agree".into(), json!(agree)),
            ]);
            return Ok((report(field, n, body), Status::Ok));
        }
    };
    Ok((v, Status::Ok))
}

fn verify(suite: &str) -> anyhow::Result<(Value, Status)> {
    let start = Instant::now();
    let names: Vec<&str> = if suite == "all" {
        CRITERIA.iter().map(|c| c.1).collect()
    } else if CRITERIA.iter().any(|c| c.0.to_string() == suite || c.1 == suite) {
        vec![suite]
    } else {
        bail!("unknown suite {suite:?}; expected all, 1..9 or one of {}", CRITERIA.iter().map(|c| c.1).collect::<Vec<_>>().join(", "));
    };
    let mut rows = Vec::new();
    let mut all = true;
    for name in names {
        let v = acceptance::run(name).expect("known criterion");
        eprintln!("[{}] criterion {} {}: {:.2}s", if v.passed { "PASS" } else { "FAIL" }, v.id, v.name, v.seconds);
        all &= v.passed;
        rows.push(json!({"id": v.id, "name": v.name, "title": v.title, "passed": v.passed, "detail": v.detail, "seconds": v.seconds}));
    }
    let body = Map::from_iter([
        ("check".into(), json!("verify")),
        ("suite".into(), json!(suite)),
        ("criteria".into(), json!(rows)),
        ("passed".into(), json!(all)),
        ("seconds".into(), json!(start.elapsed().as_secs_f64())),
    ]);
    Ok((report(Field::Q, 5, body), if all { Status::Ok } else { Status::Failed }))
}

/// Parses arguments, runs the command and writes its output; returns the exit status.
pub fn run(args: impl IntoIterator<Item = std::ffi::OsString>) -> Status {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Input } else { Status::Ok };
        }
    };
    match run_parsed(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            Status::Input
        }
    }
}

fn run_parsed(cli: &Cli) -> anyhow::Result<Status> {
    cli.config.field()?;
    if let Some(n) = cli.config.threads()? {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (v, status) = execute(&cli.config, &cli.command)?;
    let text = schema::render(&v);
    match &cli.config.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(status)
}
