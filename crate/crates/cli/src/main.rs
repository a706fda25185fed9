//! `spstab`: batch runner writing one JSON report per command.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use spstab_core::ring::Ring;
use spstab_core::suites::{self, SuiteOutcome};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const SCHEMA: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "spstab", version, about = "Exact verification suites for symplectic homology stability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Ring Z/p^k, written `p` or `p^k`.
    #[arg(long, global = true, env = "SPSTAB_RING", default_value = "3")]
    ring: String,
    #[arg(long, global = true, env = "SPSTAB_N")]
    n: Option<usize>,
    #[arg(long, global = true, env = "SPSTAB_Q")]
    q: Option<usize>,
    #[arg(long, global = true, env = "SPSTAB_R")]
    r: Option<usize>,
    #[arg(long = "p-max", global = true, env = "SPSTAB_P_MAX")]
    p_max: Option<usize>,
    #[arg(long, global = true, env = "SPSTAB_M")]
    m: Option<usize>,
    #[arg(long, global = true, env = "SPSTAB_TRIALS")]
    trials: Option<usize>,
    #[arg(long, global = true, env = "SPSTAB_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true, env = "SPSTAB_THREADS")]
    threads: Option<usize>,
    /// Directory for `<command>.json`; the report goes to stdout when absent.
    #[arg(long, global = true, env = "SPSTAB_OUT")]
    out: Option<PathBuf>,
    /// Run only the named suite.
    #[arg(long, global = true, env = "SPSTAB_SUITE")]
    suite: Option<String>,
    /// Record wall-clock timings (reports are then no longer reproducible byte for byte).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Identity suites: multlin, ffitpa, pfaffian, snf.
    Verify,
    /// Orbit counts of Sp_2n on U_q against |Skew+_q|.
    Orbits,
    /// Complexes of unimodular sequences and skew matrices, auxiliary complexes.
    Complexes,
    /// Shapiro, d1 square, vindep, conjugation, relative decomposition.
    GroupHomology,
    /// Endgame limits and admissible-function limits.
    Limits,
    /// Milnor and Milnor-Witt K-groups.
    Mwk,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Orbits => "orbits",
            Command::Complexes => "complexes",
            Command::GroupHomology => "group-homology",
            Command::Limits => "limits",
            Command::Mwk => "mwk",
        }
    }

    fn randomized(self) -> bool {
        matches!(self, Command::Verify | Command::Limits | Command::GroupHomology)
    }
}

#[derive(Debug)]
struct ConfigError(String);

type Job = Box<dyn Fn() -> spstab_core::Result<Vec<SuiteOutcome>>>;

fn one(o: spstab_core::Result<SuiteOutcome>) -> spstab_core::Result<Vec<SuiteOutcome>> {
    o.map(|x| vec![x])
}

fn bound(name: &str, v: usize, max: usize) -> Result<usize, ConfigError> {
    if v > max {
        return Err(ConfigError(format!("--{name} {v} exceeds the supported bound {max}")));
    }
    Ok(v)
}

fn jobs(cmd: Command, c: &Common, ring: Ring) -> Result<Vec<(&'static str, Job)>, ConfigError> {
    let seed = c.seed.unwrap_or(0);
    let mut out: Vec<(&'static str, Job)> = Vec::new();
    match cmd {
        Command::Verify => {
            let t = bound("trials", c.trials.unwrap_or(200), 100_000)?;
            out.push(("multlin", Box::new(move || one(suites::multlin_suite(&ring, t, seed)))));
            out.push(("ffitpa", Box::new(move || one(suites::ffitpa_suite(&ring, t, seed)))));
            out.push(("pfaffian", Box::new(move || one(suites::pfaffian_suite(&ring, t, seed)))));
            out.push(("snf", Box::new(move || one(suites::snf_suite(t, seed)))));
        }
        Command::Orbits => {
            let n = bound("n", c.n.unwrap_or(1), 2)?;
            let q = bound("q", c.q.unwrap_or(2), 2 * n + 1)?;
            out.push(("orbits", Box::new(move || suites::orbit_suite(&ring, n, q))));
        }
        Command::Complexes => {
            let n = bound("n", c.n.unwrap_or(1), 2)?;
            let q = bound("q", c.q.unwrap_or(2 * n), 2 * n + 1)?;
            out.push(("u_complex", Box::new(move || suites::u_complex_suite(&ring, n, q, true))));
            out.push(("skew_complex", Box::new(move || suites::skew_complex_suite(&ring, q, true))));
            match c.r {
                Some(r) => {
                    let r = bound("r", r, n)?;
                    out.push((
                        "aux_complex",
                        Box::new(move || {
                            let a = spstab_core::complexes::check_aux(&ring, n, r)?;
                            Ok(vec![SuiteOutcome {
                                suite: "aux_complex".into(),
                                params: json!({"ring": ring.to_string(), "n": n, "r": r}),
                                result: serde_json::to_value(&a).expect("serializable"),
                                pass: Some(a.pass()),
                            }])
                        }),
                    ));
                }
                None => out.push(("aux_complex", Box::new(move || one(suites::aux_suite(&ring, n))))),
            }
        }
        Command::GroupHomology => {
            let p_max = bound("p-max", c.p_max.unwrap_or(1), 2)?;
            let m = bound("m", c.m.unwrap_or(3), 12)?;
            let t = bound("trials", c.trials.unwrap_or(20), 10_000)?;
            out.push(("shapiro", Box::new(move || one(suites::shapiro_suite(&ring, p_max)))));
            out.push(("d1_square", Box::new(move || one(suites::d1_suite(&ring, p_max)))));
            out.push(("vindep", Box::new(move || one(suites::vindep_suite(&ring, p_max.min(1))))));
            out.push(("conjugation", Box::new(move || one(suites::conjugation_suite(&ring, p_max)))));
            out.push(("relative", Box::new(move || suites::relative_suite(&ring, 1, p_max.min(1), m, t, seed))));
        }
        Command::Limits => {
            let t = bound("trials", c.trials.unwrap_or(50), 100_000)?;
            out.push(("endgame", Box::new(move || one(suites::endgame_suite(&ring, t, seed)))));
            out.push(("admissible_limits", Box::new(move || one(suites::admissible_suite(&ring, t, seed)))));
        }
        Command::Mwk => {
            let n = bound("n", c.n.unwrap_or(2), 4)?;
            out.push(("mwk", Box::new(move || suites::mwk_suite(&ring, n))));
        }
    }
    if let Some(name) = &c.suite {
        out.retain(|(k, _)| k == name);
        if out.is_empty() {
            return Err(ConfigError(format!("no suite named {name} in {}", cmd.name())));
        }
    }
    Ok(out)
}

fn params(cmd: Command, c: &Common) -> Value {
    let mut p = Map::new();
    p.insert("ring".into(), json!(c.ring));
    for (k, v) in [("n", c.n), ("q", c.q), ("r", c.r), ("p_max", c.p_max), ("m", c.m), ("trials", c.trials)] {
        if let Some(v) = v {
            p.insert(k.into(), json!(v));
        }
    }
    if let Some(s) = c.seed {
        p.insert("seed".into(), json!(s));
    }
    if let Some(s) = &c.suite {
        p.insert("suite".into(), json!(s));
    }
    p.insert("command".into(), json!(cmd.name()));
    Value::Object(p)
}

/// Suite outcome as a flat object: result fields are lifted to the top level.
fn flatten(o: &SuiteOutcome) -> Value {
    let mut m = Map::new();
    m.insert("suite".into(), json!(o.suite));
    m.insert("params".into(), o.params.clone());
    match &o.result {
        Value::Object(fields) => {
            for (k, v) in fields {
                m.insert(k.clone(), v.clone());
            }
        }
        other => {
            m.insert("result".into(), other.clone());
        }
    }
    m.insert("pass".into(), o.pass.map_or(Value::Null, Value::Bool));
    Value::Object(m)
}

fn run(cli: &Cli) -> Result<bool, ConfigError> {
    let c = &cli.common;
    let cmd = cli.command;
    let ring = Ring::parse(&c.ring).map_err(|e| ConfigError(e.to_string()))?;
    if cmd.randomized() && c.seed.is_none() {
        return Err(ConfigError(format!("{} runs randomized suites and needs --seed", cmd.name())));
    }
    if let Some(t) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    }
    let mut results = Vec::new();
    let mut timings = Map::new();
    for (name, job) in jobs(cmd, c, ring)? {
        let t = Instant::now();
        let outcomes = job().map_err(|e| ConfigError(format!("{name}: {e}")))?;
        timings.insert(name.into(), json!(t.elapsed().as_secs_f64()));
        results.extend(outcomes);
    }
    let pass = results.iter().all(|o| o.passed());
    let report = json!({
        "schema": SCHEMA,
        "command": cmd.name(),
        "params": params(cmd, c),
        "results": results.iter().map(flatten).collect::<Vec<_>>(),
        "pass": pass,
        "timings": if c.timings { Value::Object(timings) } else { Value::Null },
    });
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    match &c.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| ConfigError(format!("{}: {e}", dir.display())))?;
            let path = dir.join(format!("{}.json", cmd.name()));
            std::fs::write(&path, text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            println!("{} {} -> {}", cmd.name(), if pass { "pass" } else { "FAIL" }, path.display());
        }
        None => print!("{text}"),
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
