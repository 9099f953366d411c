//! Command-line front end. Every command returns an [`Outcome`] holding its
//! stdout, stderr and exit code: 0 pass, 1 verification failure, 2 input
//! error, 3 dimension cap exceeded.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::canonical::counts::{by_defect, canonical_total};
use crate::canonical::{canonicalize, enumerate_canonical, enumerate_equivalence_class};
use crate::error::{Error, Result};
use crate::json::{big_to_value, element_from_json, element_to_json, elements_from_json, elements_to_json};
use crate::modp::Prime;
use crate::ss_basis::{class_sum_basis, ss_nullspace_oracle, verify_basis, CountReport, OracleMode};
use crate::supersymmetry::is_supersymmetric;
use crate::torus::{ExponentVector, TorusSpec, DEFAULT_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// The built-in verification grid `(m, n, p, r)`.
pub const DEFAULT_GRID: [(usize, usize, u64, u32); 9] = [
    (1, 1, 2, 1),
    (1, 1, 2, 2),
    (1, 1, 3, 1),
    (2, 1, 2, 1),
    (2, 1, 3, 1),
    (1, 2, 3, 1),
    (3, 1, 2, 1),
    (2, 2, 2, 1),
    (2, 2, 3, 1),
];

#[derive(Parser, Debug)]
#[command(name = "dist-torus", version, about = "Exact computations in Dist(T_r) for GL(m|n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Number of even variables.
    #[arg(long)]
    pub m: usize,
    /// Number of odd variables.
    #[arg(long)]
    pub n: usize,
    /// The characteristic.
    #[arg(long)]
    pub p: u64,
    /// Frobenius kernel height; q = p^r.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Largest allowed number of basis labels.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
}

impl SpecArgs {
    fn spec(&self) -> Result<TorusSpec> {
        TorusSpec::with_cap(self.m, self.n, self.p, self.r, self.cap)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Multiply two binomial-basis elements given as JSON files (`-` for stdin).
    Mul {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Canonical label, defect and class size of a label such as `1,2|0`.
    Canonical {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(allow_hyphen_values = true)]
        label: String,
    },
    /// The class-sum basis of SS_r, or the nullspace basis with `--oracle`.
    Basis {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        oracle: bool,
    },
    /// Verify counts and the basis theorem for one spec or a grid.
    Verify(VerifyArgs),
    /// Closed-form counts of canonical labels, with enumeration when within the cap.
    Count {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        by_defect: bool,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, requires_all = ["n", "p"])]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Run the built-in grid (or the grid from `--config`).
    #[arg(long, conflicts_with = "m")]
    pub grid: bool,
    /// JSON file with `{"grid": [{"m":..,"n":..,"p":..,"r":..}], "cap": N}`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub cap: Option<u64>,
    /// Test the elements in a JSON file (`-` for stdin) for supersymmetry.
    #[arg(long, value_name = "PATH")]
    pub check_ss: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: EXIT_OK }
    }

    fn from_error(e: &Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INPUT,
        };
        Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code }
    }
}

fn finish(r: Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| Outcome::from_error(&e))
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Mul { a, b, cap } => finish(cmd_mul(&a, &b, cap)),
        Command::Canonical { spec, label } => finish(cmd_canonical(&spec, &label)),
        Command::Basis { spec, oracle } => finish(cmd_basis(&spec, oracle)),
        Command::Verify(args) => finish(cmd_verify(&args)),
        Command::Count { spec, by_defect } => finish(cmd_count(&spec, by_defect)),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

pub fn cmd_mul(a: &Path, b: &Path, cap: u64) -> Result<Outcome> {
    let f = element_from_json(&read_input(a)?, cap)?;
    let g = element_from_json(&read_input(b)?, cap)?;
    Ok(Outcome::ok(element_to_json(&f.multiply(&g)?) + "\n"))
}

pub fn cmd_canonical(args: &SpecArgs, label: &str) -> Result<Outcome> {
    let spec = args.spec()?;
    let ev: ExponentVector = label.parse()?;
    let c = canonicalize(&ev, &spec)?;
    let class = enumerate_equivalence_class(&c, &spec)?;
    let out = json!({
        "input": {"a": ev.a, "b": ev.b},
        "canonical": {"a": c.ev.a, "b": c.ev.b},
        "defect": c.defect,
        "e": c.e,
        "f": c.f,
        "class_size": class.members.len(),
    });
    Ok(Outcome::ok(pretty(&out)))
}

pub fn cmd_basis(args: &SpecArgs, oracle: bool) -> Result<Outcome> {
    let spec = args.spec()?;
    let basis = if oracle { ss_nullspace_oracle(&spec, OracleMode::FirstPair)? } else { class_sum_basis(&spec)? };
    Ok(Outcome::ok(elements_to_json(&basis) + "\n"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridEntry {
    m: usize,
    n: usize,
    p: u64,
    #[serde(default = "one")]
    r: u32,
}

fn one() -> u32 {
    1
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct VerifyConfig {
    grid: Option<Vec<GridEntry>>,
    cap: Option<u64>,
}

fn load_config(path: Option<&Path>) -> Result<VerifyConfig> {
    match path {
        None => Ok(VerifyConfig::default()),
        Some(p) => serde_json::from_str(&read_input(p)?).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
    }
}

fn report_failures(report: &CountReport, stderr: &mut String) {
    let s = &report.spec;
    for c in report.failures() {
        stderr.push_str(&format!("FAIL GL({}|{}) p={} r={}: {}: {}\n", s.m, s.n, s.p, s.r, c.name, c.detail));
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let config = load_config(args.config.as_deref())?;
    let cap = args.cap.or(config.cap).unwrap_or(DEFAULT_CAP);

    if let Some(path) = &args.check_ss {
        return check_ss(path, cap);
    }

    let single = match (args.m, args.n, args.p) {
        (Some(m), Some(n), Some(p)) => Some((m, n, p, args.r)),
        (None, None, None) => None,
        _ => return Err(Error::InvalidSpec("--m, --n and --p must be given together".into())),
    };
    let grid: Vec<(usize, usize, u64, u32)> = match single {
        Some(s) => vec![s],
        None if args.grid || config.grid.is_some() => match config.grid {
            Some(entries) => entries.into_iter().map(|g| (g.m, g.n, g.p, g.r)).collect(),
            None => DEFAULT_GRID.to_vec(),
        },
        None => return Err(Error::InvalidSpec("give --m/--n/--p, --grid, --config or --check-ss".into())),
    };
    let specs: Vec<TorusSpec> = grid
        .iter()
        .map(|&(m, n, p, r)| TorusSpec::with_cap(m, n, p, r, cap))
        .collect::<Result<_>>()?;
    let reports: Vec<CountReport> = specs.par_iter().map(verify_basis).collect::<Result<_>>()?;

    let mut stderr = String::new();
    for r in &reports {
        report_failures(r, &mut stderr);
    }
    let code = if reports.iter().all(CountReport::passed) { EXIT_OK } else { EXIT_FAILED };
    let value = if single.is_some() {
        serde_json::to_value(&reports[0])
    } else {
        serde_json::to_value(&reports)
    }
    .expect("reports encode");
    Ok(Outcome { stdout: pretty(&value), stderr, code })
}

fn check_ss(path: &Path, cap: u64) -> Result<Outcome> {
    let elements = elements_from_json(&read_input(path)?, cap)?;
    let mut results = Vec::with_capacity(elements.len());
    let mut stderr = String::new();
    for (i, f) in elements.iter().enumerate() {
        let ok = is_supersymmetric(f)?;
        if !ok {
            stderr.push_str(&format!("FAIL element {i}: not supersymmetric\n"));
        }
        results.push(json!({"element": i, "supersymmetric": ok}));
    }
    let code = if stderr.is_empty() { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { stdout: pretty(&Value::Array(results)), stderr, code })
}

pub fn cmd_count(args: &SpecArgs, show_by_defect: bool) -> Result<Outcome> {
    let p = Prime::new(args.p)?;
    if args.m == 0 || args.r == 0 {
        return Err(Error::InvalidSpec("m and r must be at least 1".into()));
    }
    let q = p
        .as_u64()
        .checked_pow(args.r)
        .ok_or_else(|| Error::InvalidSpec(format!("q = {p}^{} overflows", args.r)))?;
    let (m, n) = (args.m, args.n);
    let total = canonical_total(m, n, q, p);
    let defects = by_defect(m, n, q, p);

    let defect_map = |counts: Vec<Value>| -> Value {
        Value::Object(counts.into_iter().enumerate().map(|(d, v)| (d.to_string(), v)).collect::<Map<_, _>>())
    };
    let mut out = Map::new();
    out.insert("spec".into(), json!({"m": m, "n": n, "p": p.get(), "r": args.r}));
    out.insert("total".into(), big_to_value(&total));
    if show_by_defect {
        out.insert("by_defect".into(), defect_map(defects.iter().map(big_to_value).collect()));
    }
    let enumerated = match args.spec() {
        Ok(spec) => {
            let canon = enumerate_canonical(&spec);
            let mut counts = vec![0u64; m.min(n) + 1];
            for c in &canon {
                counts[c.defect] += 1;
            }
            let mut e = Map::new();
            e.insert("total".into(), json!(canon.len()));
            if show_by_defect {
                e.insert("by_defect".into(), defect_map(counts.into_iter().map(Value::from).collect()));
            }
            Value::Object(e)
        }
        Err(Error::CapExceeded { .. }) => Value::Null,
        Err(e) => return Err(e),
    };
    out.insert("enumerated".into(), enumerated);
    Ok(Outcome::ok(pretty(&Value::Object(out))))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json encodes") + "\n"
}
