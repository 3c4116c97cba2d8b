use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use orbitfisher::fibration::{self, fibre_orbit};
use orbitfisher::fisher::{fisher_structure_from_tensor, fisher_tensor, fisher_tensor_chart};
use orbitfisher::herm::max_abs_real;
use orbitfisher::json::{form_to_json, parse_matrix, real_matrix_rows, LambdaStateJson};
use orbitfisher::linfisher::{is_fisher_structure, normal_form, scaling_action};
use orbitfisher::orbit::{exp_chart, ChartVector, LambdaState, OrbitPoint, RootIndex};
use orbitfisher::verify::{self, Scope, VerifyConfig};
use orbitfisher::{Error, RealMatrix, Tolerances};

const EXIT_CHECK: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_SINGULAR: u8 = 4;

#[derive(Parser)]
#[command(
    name = "orbitfisher",
    version,
    about = "Fisher geometry of mixed-state orbits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Read the JSON input from a file
    #[arg(long, global = true, conflicts_with = "json")]
    input: Option<PathBuf>,

    /// Inline JSON input
    #[arg(long, global = true)]
    json: Option<String>,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Threshold override (verify) or membership tolerance (linfisher)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Random states per suite and dimension
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,

    /// Largest matrix size swept by verify
    #[arg(long, global = true, default_value_t = 6)]
    max_n: usize,

    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions, degeneracy partition and active roots of a state
    OrbitInfo,
    /// Fisher tensor and Fisher structure at the reference point or a chart point
    Fisher,
    /// Run verification suites
    Verify {
        #[arg(value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
    },
    /// Fibration between two states and its compatibility checks
    Fibration,
    /// Linear Fisher structures given as matrices
    Linfisher {
        #[arg(value_enum)]
        action: LinAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    All,
    Kks,
    Fisher,
    Fibration,
    Linfisher,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::All => Scope::All,
            ScopeArg::Kks => Scope::Kks,
            ScopeArg::Fisher => Scope::Fisher,
            ScopeArg::Fibration => Scope::Fibration,
            ScopeArg::Linfisher => Scope::Linfisher,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LinAction {
    Check,
    NormalForm,
    Scale,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Singular { .. } | Error::NotPositiveDefinite { .. } => EXIT_SINGULAR,
            Error::NotFisherStructure(_) => EXIT_CHECK,
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// A report and whether every check in it passed.
struct Output {
    value: Value,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        emit(&out.value, cli.out.as_ref())?;
        Ok(out.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(value: &Value, out: Option<&PathBuf>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::io(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_input(cli: &Cli) -> Result<Option<Value>, Failure> {
    let text = match (&cli.input, &cli.json) {
        (Some(path), _) => {
            fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?
        }
        (None, Some(s)) => s.clone(),
        (None, None) => return Ok(None),
    };
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Failure::io(format!("invalid JSON: {e}")))
}

fn require_input(cli: &Cli) -> Result<Value, Failure> {
    read_input(cli)?.ok_or_else(|| Failure::io("this command needs --input FILE or --json STR"))
}

fn decode<T: for<'de> Deserialize<'de>>(value: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(value).map_err(|e| Failure::validation(format!("{what}: {e}")))
}

fn tolerances(cli: &Cli) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        tol.verification = t;
    }
    tol
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::OrbitInfo => orbit_info(cli),
        Command::Fisher => fisher(cli),
        Command::Verify { scope } => verify_cmd(cli, (*scope).into()),
        Command::Fibration => fibration_cmd(cli),
        Command::Linfisher { action } => linfisher(cli, *action),
    }
}

fn roots_json(roots: &[RootIndex]) -> Value {
    Value::Array(
        roots
            .iter()
            .map(|r| json!({"ij": [r.i + 1, r.j + 1], "alpha": r.alpha, "beta": r.beta}))
            .collect(),
    )
}

fn state_json(s: &LambdaState) -> Value {
    serde_json::to_value(LambdaStateJson::from(s)).expect("finite spectrum")
}

fn orbit_info(cli: &Cli) -> Result<Output, Failure> {
    let state = decode::<LambdaStateJson>(require_input(cli)?, "state")?
        .into_state(&Tolerances::default())?;
    Ok(Output {
        value: json!({
            "state": state_json(&state),
            "orbit_dim": state.orbit_dim(),
            "stabilizer_dim": state.stabilizer_dim(),
            "partition": state.partition_labels(),
            "roots": roots_json(&state.active_roots()),
            "frame": state.frame_labels(),
        }),
        pass: true,
    })
}

#[derive(Deserialize)]
struct FisherInput {
    n: usize,
    lambda: Vec<f64>,
    #[serde(default)]
    chart: Option<Vec<[f64; 2]>>,
}

fn fisher(cli: &Cli) -> Result<Output, Failure> {
    let input: FisherInput = decode(require_input(cli)?, "state")?;
    let state = LambdaStateJson {
        n: input.n,
        lambda: input.lambda,
    }
    .into_state(&Tolerances::default())?;
    let point = match input.chart {
        Some(coords) => exp_chart(&state, &ChartVector { coords })?,
        None => OrbitPoint::reference(&state),
    };
    let ft = fisher_tensor(&point)?;
    let closed = fisher_tensor_chart(&state);
    let structure = fisher_structure_from_tensor(&state, &ft)?;
    let mut value = serde_json::to_value(&ft).expect("finite tensor");
    let obj = value
        .as_object_mut()
        .expect("tensor serializes as an object");
    obj.insert("J".into(), json!(real_matrix_rows(&structure.j)));
    obj.insert("delta".into(), json!(structure.delta));
    obj.insert(
        "residuals".into(),
        json!({
            "closed_form": max_abs_real(&(&ft.f - &closed.f)),
            "structure_square": structure.square_residual,
        }),
    );
    Ok(Output { value, pass: true })
}

#[derive(Deserialize)]
struct PairInput {
    total: LambdaStateJson,
    base: LambdaStateJson,
}

fn pair(value: Value) -> Result<fibration::OrbitFibration, Failure> {
    let input: PairInput = decode(value, "fibration pair")?;
    let tol = Tolerances::default();
    let total = input.total.into_state(&tol)?;
    let base = input.base.into_state(&tol)?;
    Ok(fibration::fibration_new(total, base)?)
}

fn verify_cmd(cli: &Cli, scope: Scope) -> Result<Output, Failure> {
    let config = VerifyConfig {
        seed: cli.seed,
        samples: cli.samples,
        max_n: cli.max_n,
        tol: cli.tol,
        ..VerifyConfig::default()
    };
    if let (Scope::Fibration, Some(input)) = (scope, read_input(cli)?) {
        let fib = pair(input)?;
        let checks = verify::fibration_pair_checks(&fib, &config, 0)?;
        return Ok(Output {
            pass: checks.all_pass(),
            value: json!({"scope": "fibration", "seed": cli.seed, "pass": checks.all_pass(), "checks": checks}),
        });
    }
    let report = verify::run(scope, &config)?;
    Ok(Output {
        pass: report.pass,
        value: serde_json::to_value(&report).expect("finite report"),
    })
}

fn fibration_cmd(cli: &Cli) -> Result<Output, Failure> {
    let fib = pair(require_input(cli)?)?;
    let checks = fibration::check_all(&fib, 20, cli.seed, cli.tol)?;
    // reference point only, for the informational horizontal comparison
    let blocks =
        fibration::check_tensor_block_diagonality(&fib, 0, cli.seed, cli.tol.unwrap_or(1e-10))?;
    let pass = checks.all_pass();
    Ok(Output {
        value: json!({
            "total": state_json(&fib.total),
            "base": state_json(&fib.base),
            "dims": fib.dims,
            "vertical_roots": roots_json(&fib.vertical_roots),
            "horizontal_roots": roots_json(&fib.horizontal_roots),
            "fibre": fibre_orbit(&fib),
            "horizontal_vs_base": blocks.horizontal_vs_base,
            "pass": pass,
            "checks": checks,
        }),
        pass,
    })
}

#[derive(Deserialize)]
struct LinInput {
    matrix: Value,
    #[serde(default)]
    q: Option<Vec<f64>>,
    #[serde(default)]
    planes: Option<Value>,
}

fn linfisher(cli: &Cli, action: LinAction) -> Result<Output, Failure> {
    let raw = require_input(cli)?;
    let input = if raw.is_array() {
        LinInput {
            matrix: raw,
            q: None,
            planes: None,
        }
    } else {
        decode(raw, "linear Fisher input")?
    };
    let m = parse_matrix(&input.matrix)?;
    let tol = tolerances(cli);
    match action {
        LinAction::Check => {
            let diag = is_fisher_structure(&m, tol.verification);
            Ok(Output {
                pass: diag.is_fisher,
                value: serde_json::to_value(&diag).expect("finite diagnostics"),
            })
        }
        LinAction::NormalForm => {
            let nf = normal_form(&m, &tol)?;
            Ok(Output {
                pass: true,
                value: serde_json::to_value(&nf).expect("finite normal form"),
            })
        }
        LinAction::Scale => {
            let q = input
                .q
                .ok_or_else(|| Failure::validation("scale needs a \"q\" array"))?;
            let planes: Option<RealMatrix> = match input.planes {
                None => None,
                Some(v) => match parse_matrix(&v)? {
                    orbitfisher::FisherForm::Real(r) => Some(r),
                    orbitfisher::FisherForm::Complex(_) => {
                        return Err(Failure::validation("plane frame must be a real matrix"))
                    }
                },
            };
            let scaled = scaling_action(&q, &m, planes.as_ref(), &tol)?;
            Ok(Output {
                pass: true,
                value: json!({
                    "form": m.kind(),
                    "matrix": form_to_json(&scaled.repr),
                    "roots": scaled.roots,
                }),
            })
        }
    }
}
