//! Command-line front end. Exit codes: 0 success, 1 usage, 2 input,
//! 3 numeric, 4 failed verification.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gelfand::mean_ergodicity_verdict;
use crate::graph::StateSet;
use crate::means::{
    cesaro_projection, decay_trace_csv, radical_membership_via_means, visit_frequency, ErgodicNetConfig,
};
use crate::scalar::format_rational;
use crate::spectrum::{prim_spectrum, radical_witness_measure, Radical};
use crate::system::{load_system_with, FnK, MarkovSemigroup, Mode, SystemSpec, Tolerances};
use crate::systems::{
    build_koopman, build_product, build_rotation, build_ulam, random_instance, Branch, MapSpec, ProductKind,
    RandomConfig, UlamMap, UlamSpec,
};
use crate::verify::{run_suite_on, suite_instances};

pub const REPORT_VERSION: u32 = 1;
const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "invariant-ideals", version, about = "Invariant ideals of finite abelian Markov semigroups")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a Graphviz rendering of the spectrum here.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Write the decay trace here (`radical`).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[arg(long, global = true)]
    tol_conv: Option<f64>,
    #[arg(long, global = true)]
    tol_supp: Option<f64>,
    /// Arithmetic mode; overrides the mode recorded in a system file.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Rational => Mode::Rational,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectrum, radical of zero, center, projection and verdict.
    Analyze { path: PathBuf },
    /// Radical of `I_L` and the Cesàro decay of a probe function.
    Radical {
        path: PathBuf,
        /// Comma-separated support `L`.
        #[arg(long)]
        set: String,
        /// Comma-separated probe values (default: indicator of `L` minus the radical support).
        #[arg(long = "fn")]
        probe: Option<String>,
    },
    /// The minimal center of attraction `M(S)`.
    Center { path: PathBuf },
    /// The mean-ergodicity verdict.
    Meanergodic { path: PathBuf },
    /// Emit a system file.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Run the proposition suite.
    Verify {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Extra fixtures: a JSON array of system files.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum BuildCommand {
    Rotation {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
    },
    Koopman {
        /// Comma-separated images `φ(0),…,φ(n-1)`.
        #[arg(long)]
        image: String,
    },
    Ulam {
        #[arg(long, value_enum)]
        map: UlamKind,
        #[arg(long)]
        cells: usize,
        /// Rotation angle, `p/q` or decimal.
        #[arg(long)]
        alpha: Option<String>,
        /// JSON array of branches `{start, end, slope, offset}` for `custom`.
        #[arg(long)]
        branches: Option<String>,
    },
    Product {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "synchronous")]
        kind: ProductArg,
    },
    Random {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
        #[arg(long, default_value_t = 0.3)]
        koopman_bias: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum UlamKind {
    Doubling,
    Rotation,
    Custom,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProductArg {
    Synchronous,
    Independent,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let g = &cli.global;
    let net = net_config(g)?;
    match &cli.command {
        Command::Analyze { path } => {
            let s = load(path, g)?;
            let report = analyze(&s, &net)?;
            if let Some(dot) = &g.dot {
                write_atomic(dot, &prim_spectrum(&s)?.to_dot())?;
            }
            emit(g, &report)?;
        }
        Command::Radical { path, set, probe } => {
            let s = load(path, g)?;
            let l = parse_set(set, s.n())?;
            let probe = probe.as_deref().map(|p| parse_values(p, s.n())).transpose()?;
            let (report, csv) = radical_report(&s, &l, probe, &net)?;
            if let Some(p) = &g.csv {
                write_atomic(p, &csv)?;
            }
            emit(g, &report)?;
        }
        Command::Center { path } => {
            let s = load(path, g)?;
            emit(g, &center_report(&s)?)?;
        }
        Command::Meanergodic { path } => {
            let s = load(path, g)?;
            let v = mean_ergodicity_verdict(&s, &net)?;
            let mut value = serde_json::to_value(&v)?;
            value["report_version"] = json!(REPORT_VERSION);
            emit(g, &value)?;
        }
        Command::Build(b) => {
            let s = build(b, g)?;
            let text = s.to_spec().to_json() + "\n";
            match &g.out {
                Some(p) => write_atomic(p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Verify {
            count,
            max_n,
            fixtures,
        } => {
            let seed = g.seed.unwrap_or(42);
            let mut instances = suite_instances(seed, *count, *max_n)?;
            if let Some(path) = fixtures {
                let text = fs::read_to_string(path)?;
                let specs: Vec<SystemSpec> = serde_json::from_str(&text)?;
                for (i, spec) in specs.iter().enumerate() {
                    instances.push((format!("{}[{i}]", path.display()), load_system_with(spec, tolerances(g))?));
                }
            }
            let report = run_suite_on(instances, seed);
            print!("{}", report.table());
            if let Some(p) = &g.out {
                write_atomic(p, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
            if !report.passed {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(0)
}

fn tolerances(g: &GlobalOpts) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(t) = g.tol_supp {
        tol.supp = t;
    }
    tol
}

fn net_config(g: &GlobalOpts) -> Result<ErgodicNetConfig> {
    let mut cfg = ErgodicNetConfig::default();
    if let Some(t) = g.tol_conv {
        cfg.tol_conv = t;
    }
    cfg.validate()?;
    if let Some(t) = g.tol_supp {
        if !(0.0..1.0).contains(&t) {
            return Err(Error::InvalidConfig("tol_supp must lie in [0, 1)".into()));
        }
    }
    Ok(cfg)
}

fn load(path: &Path, g: &GlobalOpts) -> Result<MarkovSemigroup> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut spec = SystemSpec::from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if let Some(m) = g.mode {
        spec.mode = m.into();
    }
    load_system_with(&spec, tolerances(g))
}

fn parse_set(text: &str, n: usize) -> Result<StateSet> {
    let states = text
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let x: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad state {t:?} in set")))?;
            if x >= n {
                return Err(Error::OutOfRange { value: x, n });
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StateSet::new(states))
}

fn parse_values(text: &str, n: usize) -> Result<FnK> {
    let v = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad value {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    Ok(FnK(v))
}

/// Rounds every float to 12 significant digits so float-mode reports are
/// stable against last-digit noise.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(num) if !num.is_i64() && !num.is_u64() => {
            if let Some(x) = num.as_f64() {
                let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
                *v = json!(r);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn emit(g: &GlobalOpts, value: &Value) -> Result<()> {
    let mut value = value.clone();
    round_floats(&mut value);
    let text = serde_json::to_string_pretty(&value)? + "\n";
    match &g.out {
        Some(p) => write_atomic(p, &text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, text).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn prim_json(s: &MarkovSemigroup) -> Result<Vec<Value>> {
    Ok(prim_spectrum(s)?
        .points()
        .iter()
        .map(|p| {
            let w = p.witness.as_ref().expect("genuine spectrum");
            let mut o = json!({"support": p.support, "measure": w.measure.weights()});
            if let Some(ex) = &w.exact {
                o["measure_exact"] = json!(ex.iter().map(format_rational).collect::<Vec<_>>());
            }
            o
        })
        .collect())
}

/// The full analysis report (schema version 1).
pub fn analyze(s: &MarkovSemigroup, net: &ErgodicNetConfig) -> Result<Value> {
    let spectrum = prim_spectrum(s)?;
    let center = spectrum.union_of_supports();
    let projection = cesaro_projection(s, net)?;
    let verdict = mean_ergodicity_verdict(s, net)?;
    Ok(json!({
        "report_version": REPORT_VERSION,
        "system": s.to_spec(),
        "prim": prim_json(s)?,
        "radical_free": center.len() == s.n(),
        "center": center,
        "specialization": spectrum.specialization_order(),
        "projection": projection.matrix.to_rows(),
        "converged_at": projection.final_n,
        "projection_residual": projection.residual,
        "verdict": verdict,
    }))
}

/// Radical of `I_L`, its witness measure and the decay of a probe; the
/// second component is the decay trace as CSV.
pub fn radical_report(
    s: &MarkovSemigroup,
    set: &StateSet,
    probe: Option<FnK>,
    net: &ErgodicNetConfig,
) -> Result<(Value, String)> {
    if set.is_empty() {
        return Err(Error::EmptySupport);
    }
    if let Some((from, to)) = s.digraph().leaving_edge(set) {
        return Err(Error::NotSelfSupporting { from, to });
    }
    let spectrum = prim_spectrum(s)?;
    let rad = spectrum.radical_of(set);
    let (support, witness) = match &rad {
        Radical::Ideal(r) => (Some(r.support.clone()), Some(radical_witness_measure(s, r)?)),
        Radical::FullAlgebra => (None, None),
    };
    let probe = probe.unwrap_or_else(|| {
        let rest = match &support {
            Some(r) => set.difference(r),
            None => set.clone(),
        };
        FnK::indicator(s.n(), if rest.is_empty() { set } else { &rest })
    });
    let m = radical_membership_via_means(s, set, &probe, net)?;
    let csv = decay_trace_csv(&m.trace);
    Ok((
        json!({
            "report_version": REPORT_VERSION,
            "set": set,
            "radical_support": support,
            "witness_measure": witness.as_ref().map(|w| w.weights().to_vec()),
            "probe": probe.0,
            "member": m.member,
            "limit_max": m.limit_max,
            "converged_at": m.converged_at,
            "trace": m.trace,
        }),
        csv,
    ))
}

/// `M(S)`, plus orbit visit frequencies when the system is a single
/// Koopman generator.
pub fn center_report(s: &MarkovSemigroup) -> Result<Value> {
    let center = prim_spectrum(s)?.union_of_supports();
    let mut out = json!({
        "report_version": REPORT_VERSION,
        "center": center,
        "radical_free": center.len() == s.n(),
    });
    if s.generators().len() == 1 && s.generators()[0].koopman_map().is_some() {
        let n_steps = 10_000;
        let freq = (0..s.n())
            .map(|x| visit_frequency(s, x, &center, n_steps))
            .collect::<Result<Vec<_>>>()?;
        out["visit_frequency"] = json!({"N": n_steps, "by_state": freq});
    }
    Ok(out)
}

fn build(b: &BuildCommand, g: &GlobalOpts) -> Result<MarkovSemigroup> {
    let mode: Mode = g.mode.map(Into::into).unwrap_or_default();
    match b {
        BuildCommand::Rotation { n, a } => build_rotation(*n, *a, mode),
        BuildCommand::Koopman { image } => {
            let image = image
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad image {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            build_koopman(&MapSpec { n: image.len(), image }, mode)
        }
        BuildCommand::Ulam {
            map,
            cells,
            alpha,
            branches,
        } => {
            let map = match map {
                UlamKind::Doubling => UlamMap::Doubling,
                UlamKind::Rotation => UlamMap::Rotation {
                    alpha: crate::system::Entry::Text(
                        alpha
                            .clone()
                            .ok_or_else(|| Error::InvalidUlam("rotation needs --alpha".into()))?,
                    ),
                },
                UlamKind::Custom => {
                    let text = branches
                        .as_deref()
                        .ok_or_else(|| Error::InvalidUlam("custom map needs --branches".into()))?;
                    let branches: Vec<Branch> = serde_json::from_str(text)?;
                    UlamMap::Custom { branches }
                }
            };
            build_ulam(&UlamSpec { map, cells: *cells }, mode)
        }
        BuildCommand::Product { left, right, kind } => {
            let kind = match kind {
                ProductArg::Synchronous => ProductKind::Synchronous,
                ProductArg::Independent => ProductKind::Independent,
            };
            build_product(&load(left, g)?, &load(right, g)?, kind)
        }
        BuildCommand::Random {
            n_max,
            m_max,
            koopman_bias,
        } => random_instance(
            g.seed.unwrap_or(0),
            &RandomConfig {
                n_max: *n_max,
                m_max: *m_max,
                koopman_bias: *koopman_bias,
                mode,
            },
        ),
    }
}
