//! Command-line front end for theta expansions, the Igusa form, stability
//! checks and the numeric operator suites.
//!
//! Exit status: 0 when every check passed, 1 on a computational failure
//! (bad input, exhausted budget, I/O), 2 when an identity did not hold.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use stableforms::fourier::{Engine, EngineConfig, Expansion};
use stableforms::grenier::{self, PowerParameters, SpecialPositiveMatrix};
use stableforms::qforms::form_by_label;
use stableforms::siegel;
use stableforms::symplectic::{self, SuiteConfig};
use stableforms::Execution;

#[derive(Parser, Debug)]
#[command(name = "stableforms", version, about = "Siegel theta series, the Siegel operator and the Grenier operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truncated theta series of a lattice; writes the expansion file.
    Theta(ThetaArgs),
    /// The Igusa form E8E8 − D16PLUS: vanishing verdict, witness, cusp check.
    Igusa(IgusaArgs),
    /// Φ-coherence of the theta family up to a genus.
    StableCheck(StableArgs),
    /// Numeric checks of the lift, descent and Siegel-limit operators.
    Operators(OperatorArgs),
    /// Decomposition and limit checks on the SL(n) symmetric space.
    Grenier(GrenierArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Work limit in enumeration nodes.
    #[arg(long, default_value_t = EngineConfig::default().budget)]
    budget: u64,
    /// Directory of reusable expansion files.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct ThetaArgs {
    #[arg(long, default_value = "E8")]
    form: String,
    #[arg(long, default_value_t = 1)]
    genus: usize,
    #[arg(long, default_value_t = 6)]
    trace_bound: i64,
    /// Expansion file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct IgusaArgs {
    #[arg(long, default_value_t = 2)]
    genus: usize,
    #[arg(long, default_value_t = 6)]
    trace_bound: i64,
    /// Expansion file for the difference.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct StableArgs {
    #[arg(long, default_value = "E8")]
    form: String,
    /// Largest genus of the family.
    #[arg(long, default_value_t = 3)]
    genus: usize,
    #[arg(long, default_value_t = 6)]
    trace_bound: i64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct OperatorArgs {
    #[arg(long, default_value = "E8")]
    form: String,
    /// Largest genus; pairs (n−1, n) are checked for 2 ≤ n ≤ genus.
    #[arg(long, default_value_t = 3)]
    genus: usize,
    #[arg(long, default_value_t = 6)]
    trace_bound: i64,
    /// Values of t for the Siegel limit.
    #[arg(long, value_delimiter = ',', default_values_t = [1e2, 1e3, 1e4])]
    t_schedule: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GrenierArgs {
    #[command(subcommand)]
    action: GrenierAction,
}

#[derive(Subcommand, Debug)]
enum GrenierAction {
    /// Splits Y into (v, x, W) and reports the round-trip error.
    Decompose {
        /// Row-major entries of Y.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        matrix: Vec<f64>,
    },
    /// Checks 𝔏 p_{−s} = p_{−(s₂,…)} along a schedule of v.
    Limit {
        /// Power-function parameters s₁, …, s_{n−1}.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Vec<f64>,
        /// Row-major entries of W (default: identity).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        w: Vec<f64>,
        /// Offset x (default: zero).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [1e1, 1e2, 1e4])]
        v_schedule: Vec<f64>,
    },
}

enum Failure {
    Compute(String),
    Verify(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn engine(common: &Common) -> Engine {
    Engine::new(EngineConfig {
        budget: common.budget,
        execution: if common.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        ..EngineConfig::default()
    })
}

fn cache_path(dir: &Path, label: &str, genus: usize, bound: i64) -> PathBuf {
    dir.join(format!("theta_{label}_g{genus}_b{bound}.txt"))
}

/// Writes through a temporary sibling so an interrupted run leaves no
/// partial file.
fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)
}

/// A theta expansion, from the cache directory when a verified file exists.
fn theta(engine: &Engine, common: &Common, form: &str, genus: usize, bound: i64, log: &mut String) -> Result<Expansion, Failure> {
    let q = form_by_label(form)?;
    if let Some(dir) = &common.cache {
        let path = cache_path(dir, q.label(), genus, bound);
        if path.exists() {
            match Expansion::read_cache(&path) {
                Ok(e) if e.genus() == genus && e.trace_bound() == bound && e.label() == q.label() => {
                    let _ = writeln!(log, "using cached {}", path.display());
                    return Ok(e);
                }
                Ok(_) => {
                    let _ = writeln!(log, "ignoring {}: header does not match the request", path.display());
                }
                Err(e) => {
                    let _ = writeln!(log, "rejecting {}: {e}", path.display());
                }
            }
        }
        let e = engine.theta_expansion(&q, genus, bound)?;
        write_atomic(&path, &e.to_cache_string())?;
        return Ok(e);
    }
    Ok(engine.theta_expansion(&q, genus, bound)?)
}

fn table(e: &Expansion) -> String {
    let mut out = format!(
        "genus {} weight {} trace bound {} form {}\n",
        e.genus(),
        e.weight(),
        e.trace_bound(),
        e.label()
    );
    for (t, c) in e.coefficients() {
        let _ = writeln!(out, "{:<40} {}", t.to_string(), c);
    }
    out
}

fn cmd_theta(a: &ThetaArgs) -> Outcome {
    let eng = engine(&a.common);
    let mut log = String::new();
    let e = theta(&eng, &a.common, &a.form, a.genus, a.trace_bound, &mut log)?;
    let out = a.out.clone().unwrap_or_else(|| {
        PathBuf::from(format!("theta_{}_g{}_b{}.txt", e.label(), a.genus, a.trace_bound))
    });
    write_atomic(&out, &e.to_cache_string())?;
    Ok(format!("{log}{}wrote {}\n", table(&e), out.display()))
}

fn cmd_igusa(a: &IgusaArgs) -> Outcome {
    let eng = engine(&a.common);
    let mut log = String::new();
    let x = theta(&eng, &a.common, "E8E8", a.genus, a.trace_bound, &mut log)?;
    let y = theta(&eng, &a.common, "D16PLUS", a.genus, a.trace_bound, &mut log)?;
    let phi = stableforms::fourier::expansion_sub(&x, &y)?;
    if let Some(out) = &a.out {
        write_atomic(out, &phi.to_cache_string())?;
    }
    let cusp = siegel::cusp_surrogate_check(&phi);
    if phi.is_zero() {
        let verdict = if a.genus == 0 { "zero" } else { "identically zero" };
        return Ok(format!(
            "{log}igusa genus {} trace bound {}: {verdict}\n{cusp}\n",
            a.genus, a.trace_bound
        ));
    }
    let first = phi
        .coefficients()
        .find(|(_, c)| **c != 0.into())
        .map(|(t, c)| format!("{t} -> {c}"))
        .unwrap_or_default();
    let mut text = format!(
        "{log}igusa genus {} trace bound {}: nonzero; first nonzero coefficient {first}\n",
        a.genus, a.trace_bound
    );
    if a.genus == 4 {
        if let Some((t, d)) = siegel::schottky_witness_with(&eng, a.trace_bound)? {
            let _ = writeln!(text, "witness T = {t}; difference {d}");
        }
    }
    let _ = writeln!(text, "{cusp}");
    if a.genus <= 3 || !cusp.is_cusp() {
        return Err(Failure::Verify(text));
    }
    Ok(text)
}

fn cmd_stable(a: &StableArgs) -> Outcome {
    let eng = engine(&a.common);
    let mut log = String::new();
    let members = (0..=a.genus)
        .map(|n| theta(&eng, &a.common, &a.form, n, a.trace_bound, &mut log))
        .collect::<Result<Vec<_>, _>>()?;
    let report = siegel::check_stability(&members)?;
    let text = format!("{log}form {} up to genus {} at trace bound {}\n{report}", a.form, a.genus, a.trace_bound);
    if report.is_stable() {
        Ok(text)
    } else {
        Err(Failure::Verify(text))
    }
}

fn cmd_operators(a: &OperatorArgs) -> Outcome {
    if a.genus < 2 {
        return Err(Failure::Compute("operators needs --genus ≥ 2".into()));
    }
    let eng = engine(&a.common);
    let mut log = String::new();
    let members = (0..=a.genus)
        .map(|n| theta(&eng, &a.common, &a.form, n, a.trace_bound, &mut log))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = SuiteConfig {
        t_schedule: a.t_schedule.clone(),
        cocycle_pairs: a.pairs,
        sample_points: a.samples,
        seed: a.seed,
    };
    let report = symplectic::operator_suite(&members, &cfg)?;
    let text = format!("{log}{report}");
    if report.passed() {
        Ok(text)
    } else {
        Err(Failure::Verify(text))
    }
}

fn square(entries: &[f64]) -> Result<usize, Failure> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != entries.len() {
        return Err(Failure::Compute(format!("{} entries do not form a square matrix", entries.len())));
    }
    Ok(n)
}

fn cmd_grenier(a: &GrenierArgs) -> Outcome {
    match &a.action {
        GrenierAction::Decompose { matrix } => {
            let n = square(matrix)?;
            let y = SpecialPositiveMatrix::from_rows(n, matrix)?;
            let mut text = String::new();
            if y.was_renormalized() {
                let _ = writeln!(
                    text,
                    "note: det = {:.6e}; input rescaled by det^(-1/{n}) to determinant one",
                    y.input_determinant()
                );
            }
            let d = grenier::decompose(&y)?;
            let back = grenier::recompose(&d)?;
            let err = back.max_difference(&y);
            let _ = writeln!(text, "v = {:.15e}", d.v);
            let _ = writeln!(text, "x = {:?}", d.x.as_slice());
            let _ = writeln!(text, "W = {:?}", d.w.matrix().transpose().as_slice());
            let _ = writeln!(text, "round-trip error = {err:.3e}");
            if err > 1e-12 * y.matrix().amax().max(1.0) {
                return Err(Failure::Verify(text));
            }
            Ok(text)
        }
        GrenierAction::Limit { s, w, x, v_schedule } => {
            let n = s.len() + 1;
            if n < 2 {
                return Err(Failure::Compute("--s needs at least one parameter".into()));
            }
            let p = PowerParameters::real(n, s)?;
            let w = if w.is_empty() {
                SpecialPositiveMatrix::identity(n - 1)
            } else {
                let k = square(w)?;
                if k != n - 1 {
                    return Err(Failure::Compute(format!("W must be {0}×{0}", n - 1)));
                }
                SpecialPositiveMatrix::from_rows(k, w)?
            };
            let x = if x.is_empty() {
                DVector::zeros(n - 1)
            } else if x.len() == n - 1 {
                DVector::from_column_slice(x)
            } else {
                return Err(Failure::Compute(format!("x must have {} entries", n - 1)));
            };
            let f = |y: &SpecialPositiveMatrix| grenier::power_function(y, &p);
            let report = grenier::grenier_l_numeric(&f, &p, &w, &x, v_schedule)?;
            let shifted = grenier::grenier_l_power(&p)?;
            let exact = if shifted.s.is_empty() {
                1.0.into()
            } else {
                grenier::power_function(&w, &shifted)?
            };
            let dev = (report.value() - exact).norm() / exact.norm().max(1.0);
            let text = format!(
                "n = {n}, s1 + xi1 = {:.6}\n{report}closed form p_-(s2..)(W) = {:.12e}\ndeviation = {dev:.3e}\n",
                p.limit_exponent().re,
                exact.re
            );
            if report.converged && dev <= 1e-6 {
                Ok(text)
            } else {
                Err(Failure::Verify(text))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Theta(a) => cmd_theta(a),
        Command::Igusa(a) => cmd_igusa(a),
        Command::StableCheck(a) => cmd_stable(a),
        Command::Operators(a) => cmd_operators(a),
        Command::Grenier(a) => cmd_grenier(a),
    };
    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verify(text)) => {
            print!("{text}");
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
