use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use jbh::compactify::{phi_boundary, phi_boundary_preimage, phi_interior};
use jbh::error::JbhError;
use jbh::exp_bridge::{exp_extend, exp_extend_inverse};
use jbh::extended::Extended;
use jbh::horo_v::{horofunction_v_eval, horofunction_v_limit, same_part_v, BoundaryDatumV};
use jbh::json::{from_json, to_json, AnyDatum};
use jbh::metric_d::{
    caratheodory_distance, detour_cost_d, horofunction_d_eval_detailed, BoundaryDatumD, DetourMethod,
    ExtrapolationOptions, HoroMethod,
};
use jbh::spectral::{spectral_decompose, unique_spectral};
use jbh::triple::{Element, TripleSpace};
use jbh::verify::{run_suite, Report, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "jbh", version, about = "Caratheodory geometry of bounded symmetric domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral decomposition of an element.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        space: SpaceArg,
        /// Group equal coefficients.
        #[arg(long)]
        grouped: bool,
    },
    /// Run a randomized verification suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replaces every property threshold.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Caratheodory distance between two points of the ball.
    Dist {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Horofunction evaluation.
    Horo {
        #[command(subcommand)]
        which: Horo,
    },
    /// The map into the dual ball, at an element or at a boundary datum.
    Phi {
        #[arg(long, conflicts_with = "datum", required_unless_present = "datum")]
        input: Option<PathBuf>,
        #[arg(long)]
        datum: Option<PathBuf>,
        #[command(flatten)]
        space: SpaceArg,
        /// Read `--input` as a boundary point and print its datum.
        #[arg(long, requires = "input")]
        preimage: bool,
    },
    /// Detour costs between two data of the same kind.
    Detour {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_parser = parse_detour, default_value = "closed")]
        method: DetourMethod,
    },
    /// Boundary extension of the exponential map; a D-datum is mapped back.
    ExpExtend {
        #[arg(long)]
        datum: PathBuf,
    },
}

#[derive(Subcommand)]
enum Horo {
    /// Horofunction of the ball.
    EvalD {
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long, value_parser = parse_horo, default_value = "induced_norm")]
        method: HoroMethod,
    },
    /// Horofunction of the normed space.
    EvalV {
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long, value_parser = ["closed", "extrapolate"], default_value = "closed")]
        method: String,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    datum: PathBuf,
    #[arg(long)]
    at: PathBuf,
    #[command(flatten)]
    space: SpaceArg,
    /// Largest sequence index used by extrapolation.
    #[arg(long)]
    kmax: Option<f64>,
    /// Convergence tolerance of extrapolation.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SpaceArg {
    /// Space file for elements given without one; must agree otherwise.
    #[arg(long = "space")]
    path: Option<PathBuf>,
}

fn parse_horo(s: &str) -> Result<HoroMethod, String> {
    s.parse().map_err(|e: JbhError| e.to_string())
}

fn parse_detour(s: &str) -> Result<DetourMethod, String> {
    s.parse().map_err(|e: JbhError| e.to_string())
}

enum Failure {
    Usage(String),
    Property,
    NonConvergence(String),
}

impl From<JbhError> for Failure {
    fn from(e: JbhError) -> Self {
        match e {
            JbhError::NonConvergence(m) => Failure::NonConvergence(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_space(arg: &SpaceArg) -> Result<Option<TripleSpace>, Failure> {
    arg.path.as_deref().map(|p| Ok(from_json(&read(p)?)?)).transpose()
}

fn load_element(path: &Path, space: Option<&TripleSpace>) -> Result<Element, Failure> {
    let mut v: Value = from_json(&read(path)?)?;
    if let (Some(s), Some(obj)) = (space, v.as_object_mut()) {
        match obj.get("space") {
            None => {
                obj.insert("space".into(), serde_json::to_value(s).map_err(JbhError::from)?);
            }
            Some(given) => {
                let given: TripleSpace = serde_json::from_value(given.clone()).map_err(JbhError::from)?;
                if &given != s {
                    return Err(Failure::Usage(format!("{}: space {given} differs from --space {s}", path.display())));
                }
            }
        }
    }
    Ok(serde_json::from_value(v).map_err(JbhError::from)?)
}

fn load_datum(path: &Path) -> Result<AnyDatum, Failure> {
    Ok(from_json(&read(path)?)?)
}

fn load_v(path: &Path) -> Result<BoundaryDatumV, Failure> {
    match load_datum(path)? {
        AnyDatum::V(h) => Ok(h),
        AnyDatum::D(_) => Err(Failure::Usage(format!("{}: expected a datum with \"alpha\"", path.display()))),
    }
}

fn load_d(path: &Path) -> Result<BoundaryDatumD, Failure> {
    match load_datum(path)? {
        AnyDatum::D(h) => Ok(h),
        AnyDatum::V(_) => Err(Failure::Usage(format!("{}: expected a datum with \"lambda\"", path.display()))),
    }
}

fn emit<T: Serialize>(value: &T) -> Outcome {
    print!("{}", to_json(value)?);
    Ok(())
}

fn extended_json(x: Extended) -> Value {
    match x {
        Extended::Finite(v) => json!(v),
        Extended::Infinite => json!("inf"),
    }
}

fn ladder_up_to(kmax: Option<f64>, ladder: Vec<f64>) -> Result<Vec<f64>, Failure> {
    let Some(kmax) = kmax else { return Ok(ladder) };
    let ks: Vec<f64> = ladder.into_iter().filter(|&k| k <= kmax).collect();
    if ks.len() < 2 {
        return Err(Failure::Usage(format!("--kmax {kmax} leaves fewer than two sequence indices")));
    }
    Ok(ks)
}

#[derive(Serialize)]
struct TimedReport<'a> {
    #[serde(flatten)]
    report: &'a Report,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp_unix: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_seconds: Option<f64>,
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Decompose { input, space, grouped } => {
            let x = load_element(&input, load_space(&space)?.as_ref())?;
            if grouped {
                emit(&unique_spectral(&x))
            } else {
                emit(&spectral_decompose(&x))
            }
        }
        Command::Verify { suite, trials, seed, tol, no_timestamp } => {
            let start = Instant::now();
            let report = run_suite(suite, &VerifyOptions { trials, seed, tol });
            let (timestamp_unix, runtime_seconds) = if no_timestamp {
                (None, None)
            } else {
                let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                (Some(now), Some(start.elapsed().as_secs_f64()))
            };
            emit(&TimedReport { report: &report, timestamp_unix, runtime_seconds })?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Property)
            }
        }
        Command::Dist { x, y, space } => {
            let s = load_space(&space)?;
            let x = load_element(&x, s.as_ref())?;
            let y = load_element(&y, s.as_ref())?;
            emit(&json!({ "rho": caratheodory_distance(&x, &y)? }))
        }
        Command::Horo { which: Horo::EvalD { eval, method } } => {
            let datum = load_d(&eval.datum)?;
            let z = load_element(&eval.at, load_space(&eval.space)?.as_ref())?;
            let mut opts = ExtrapolationOptions::default();
            opts.ks = ladder_up_to(eval.kmax, opts.ks)?;
            if let Some(t) = eval.tol {
                opts.tol = t;
            }
            let ev = horofunction_d_eval_detailed(&datum, &z, method, &opts)?;
            emit(&ev)?;
            match &ev.extrapolation {
                Some(e) if !e.converged => Err(Failure::NonConvergence(format!(
                    "extrapolation error estimate {:.3e} exceeds {:.3e}",
                    e.error_estimate, opts.tol
                ))),
                _ => Ok(()),
            }
        }
        Command::Horo { which: Horo::EvalV { eval, method } } => {
            let datum = load_v(&eval.datum)?;
            let x = load_element(&eval.at, load_space(&eval.space)?.as_ref())?;
            if method == "closed" {
                return emit(&json!({ "value": horofunction_v_eval(&datum, &x)?, "method": "closed" }));
            }
            let ks = ladder_up_to(eval.kmax, jbh::horo_v::default_k_ladder_v())?;
            let tol = eval.tol.unwrap_or(1e-6);
            let lim = horofunction_v_limit(&datum, &x, &ks, tol)?;
            let e = &lim.extrapolation;
            emit(&json!({
                "value": e.value,
                "method": "extrapolate",
                "ladder": lim.ladder,
                "extrapolation": e,
            }))?;
            if e.converged {
                Ok(())
            } else {
                Err(Failure::NonConvergence(format!("extrapolation error estimate {:.3e} exceeds {tol:.3e}", e.error_estimate)))
            }
        }
        Command::Phi { input, datum, space, preimage } => {
            if let Some(d) = datum {
                return emit(&phi_boundary(&load_v(&d)?));
            }
            let x = load_element(input.as_deref().expect("required by clap"), load_space(&space)?.as_ref())?;
            if preimage {
                emit(&phi_boundary_preimage(&x)?)
            } else {
                emit(&phi_interior(&x))
            }
        }
        Command::Detour { first, second, method } => match (load_datum(&first)?, load_datum(&second)?) {
            (AnyDatum::V(a), AnyDatum::V(b)) => {
                let ab = jbh::horo_v::detour_cost_v(&a, &b)?;
                let ba = jbh::horo_v::detour_cost_v(&b, &a)?;
                emit(&json!({
                    "kind": "v",
                    "cost": extended_json(ab),
                    "reverse_cost": extended_json(ba),
                    "distance": extended_json(ab.add(ba)),
                    "same_part": same_part_v(&a, &b),
                }))
            }
            (AnyDatum::D(a), AnyDatum::D(b)) => {
                let ab = detour_cost_d(&a, &b, method)?;
                let ba = detour_cost_d(&b, &a, method)?;
                emit(&json!({
                    "kind": "d",
                    "method": method,
                    "cost": extended_json(ab),
                    "reverse_cost": extended_json(ba),
                    "distance": extended_json(ab.add(ba)),
                    "same_part": ab.is_finite() && ba.is_finite(),
                }))
            }
            _ => Err(Failure::Usage("detour needs two data of the same kind".into())),
        },
        Command::ExpExtend { datum } => match load_datum(&datum)? {
            AnyDatum::V(h) => emit(&exp_extend(&h)),
            AnyDatum::D(h) => emit(&exp_extend_inverse(&h)),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::NonConvergence(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
