//! Batch front end: entropic quantities on state files, verification suites,
//! leakage curves, key-rate penalties and channel leakage suprema.
//!
//! [`run`] never panics on bad input and never exits the process; it returns
//! the exit code together with everything that would be printed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use renyi_core::accumulation::{
    channel_sup_mi, closed_form_sup, keyrate_penalty, leakage_curve, prob_leakage_bound, CurveRow, EstimateStatus, LeakageModel,
    PenaltyInput,
};
use renyi_core::chain::{run_suite, Suite, TrialSpec, VerificationReport};
use renyi_core::divergence::{renyi_divergence, smooth_max_divergence_upper, RenyiOrder, SmoothingParam};
use renyi_core::entropic::{
    evaluate, hmin_up, imax_family, EntropyRequest, EntropyResult, ImaxVariant, OptimizerConfig, Variant,
};
use renyi_core::io::{self, ext_f64, ext_f64_opt, ResultRepr, WitnessRepr};
use renyi_core::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Slack allowed when comparing a searched supremum with its closed form.
pub const BRACKET_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "renyi-leakage",
    version,
    about = "Rényi entropies, chain-rule checks and leakage penalties"
)]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one quantity on state files.
    Compute(ComputeArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
    /// Tabulate the probabilistic-leakage bound over δ and α.
    LeakageCurve(CurveArgs),
    /// Key-rate arithmetic n·h − Σξ − (α/(α−1)) log₂(1/p_Ω).
    Penalty(PenaltyArgs),
    /// Search sup I↓_α(Z̃;L) over inputs of a leakage channel.
    ChannelSup(ChannelSupArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// D_α(ρ‖σ); takes two files.
    #[value(name = "D")]
    D,
    /// Upper bound on the ε-smooth max-divergence via D_α, α > 1; takes two files.
    #[value(name = "D_smooth_max")]
    DSmoothMax,
    #[value(name = "H", alias = "H_down")]
    H,
    #[value(name = "H_up")]
    HUp,
    #[value(name = "I")]
    I,
    #[value(name = "I_down")]
    IDown,
    #[value(name = "I_downdown")]
    IDownDown,
    /// I↓(A;BC) − I↓(A;C); needs --cond.
    #[value(name = "I_cond")]
    ICond,
    #[value(name = "Hmin_up")]
    HminUp,
    #[value(name = "Imax_none")]
    ImaxNone,
    #[value(name = "Imax_down")]
    ImaxDown,
}

impl Quantity {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Args, Debug, Clone)]
pub struct OptimizerArgs {
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Target optimality residual in bits.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl OptimizerArgs {
    fn config(&self) -> Result<OptimizerConfig, Error> {
        let d = OptimizerConfig::default();
        let cfg = OptimizerConfig {
            restarts: self.restarts.unwrap_or(d.restarts),
            seed: self.seed.unwrap_or(d.seed),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            tol_objective: self.tol.unwrap_or(d.tol_objective),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Order α; accepts `inf`.
    #[arg(long, default_value = "1")]
    pub alpha: String,
    /// First register set, comma separated; defaults to the first register.
    #[arg(long)]
    pub target: Option<String>,
    /// Conditioning set for entropies, partner for mutual informations; defaults to the remaining registers.
    #[arg(long, visible_alias = "partner")]
    pub given: Option<String>,
    /// Conditioning register set C of I_cond.
    #[arg(long)]
    pub cond: Option<String>,
    /// Smoothing parameter for D_smooth_max.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub opt: OptimizerArgs,
    /// State file, then σ file for D and D_smooth_max.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub suite: String,
    /// Trials per order.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Register dimensions, e.g. `2,2,2`.
    #[arg(long)]
    pub dims: Option<String>,
    /// Orders, e.g. `0.6,1.5,inf`.
    #[arg(long)]
    pub alphas: Option<String>,
    /// Override for the suite's primary tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(long, default_value = "1.1,1.01,1.001")]
    pub alphas: String,
    /// `log:a:b:n`, `linear:a:b:n` or a list.
    #[arg(long, default_value = "log:-4:0:50", conflicts_with = "delta")]
    pub delta_grid: String,
    /// A single leakage probability instead of a grid.
    #[arg(long)]
    pub delta: Option<f64>,
    /// min(dim Z̃, dim L).
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub zeta: u8,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("leak").required(true).args(["xi", "model"]))]
pub struct PenaltyArgs {
    #[arg(long)]
    pub n: usize,
    /// Single-round rate h in bits.
    #[arg(long, allow_hyphen_values = true)]
    pub h: f64,
    /// Per-round ξ list; `0.01x100` repeats.
    #[arg(long)]
    pub xi: Option<String>,
    /// `δ,dim_r,ζ`: every ξ_j from the closed-form probabilistic-leakage bound.
    #[arg(long)]
    pub model: Option<String>,
    /// dim Z̃ for --model; defaults to dim_r.
    #[arg(long)]
    pub dim_z: Option<usize>,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_omega: f64,
}

#[derive(Args, Debug)]
pub struct ChannelSupArgs {
    pub channel: PathBuf,
    #[arg(long)]
    pub alpha: String,
    /// Leaked output registers; defaults to `L` when present, otherwise all outputs.
    #[arg(long)]
    pub leaked: Option<String>,
    #[command(flatten)]
    pub opt: OptimizerArgs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iters: usize,
    #[serde(with = "ext_f64")]
    pub residual: f64,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComputeOutput {
    pub quantity: String,
    #[serde(with = "ext_f64")]
    pub alpha: f64,
    pub target: Vec<String>,
    pub given: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cond: Vec<String>,
    #[serde(with = "ext_f64")]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<WitnessRepr>>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveOutput {
    pub version: String,
    pub dim: usize,
    pub zeta: u8,
    pub rows: Vec<CurveRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyOutput {
    pub penalty: f64,
    pub rate: f64,
    pub leakage: f64,
    pub conditioning: f64,
    pub n: usize,
    pub h: f64,
    pub alpha: f64,
    pub p_omega: f64,
    /// `"list"` or `"model"`.
    pub xi_source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSupOutput {
    #[serde(with = "ext_f64")]
    pub alpha: f64,
    pub leaked: Vec<String>,
    #[serde(with = "ext_f64")]
    pub estimate: f64,
    pub status: String,
    pub converged: bool,
    pub restarts: usize,
    #[serde(with = "ext_f64_opt")]
    pub closed_form: Option<f64>,
    /// `estimate ≤ closed_form + 1e-6` when a closed form exists.
    pub within_closed_form: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorOutput {
    pub error: ErrorBody,
}

/// Exit code and printed text of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Stable name and exit code of a library error.
pub fn classify(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Layout(_) => ("layout", EXIT_INPUT),
        Error::NotHermitian(_) => ("not_hermitian", EXIT_INPUT),
        Error::NotPositive(_) => ("not_positive", EXIT_INPUT),
        Error::Normalization(_) => ("normalization", EXIT_INPUT),
        Error::ZeroProbabilityEvent => ("zero_probability_event", EXIT_INPUT),
        Error::Classicality(_) => ("classicality", EXIT_INPUT),
        Error::ZeroState => ("zero_state", EXIT_INPUT),
        Error::UnsupportedOrder(_) => ("unsupported_order", EXIT_INPUT),
        Error::DivergentCorrection => ("divergent_correction", EXIT_INPUT),
        Error::EmptyInput => ("empty_input", EXIT_INPUT),
        Error::DimensionLimit(_) => ("dimension_limit", EXIT_INPUT),
        Error::InvalidArgument(_) => ("invalid_argument", EXIT_INPUT),
        Error::Parse(_) => ("parse", EXIT_INPUT),
        Error::SingularOperator => ("singular_operator", EXIT_NUMERICAL),
        Error::StalledOptimizer { .. } => ("stalled_optimizer", EXIT_NUMERICAL),
        Error::Infeasible(_) => ("infeasible", EXIT_NUMERICAL),
        Error::Unbounded(_) => ("unbounded", EXIT_NUMERICAL),
        Error::NumericalFailure(_) => ("numerical_failure", EXIT_NUMERICAL),
    }
}

fn error_json(kind: &str, message: String, exit_code: i32) -> String {
    let body = ErrorOutput {
        error: ErrorBody {
            kind: kind.into(),
            message,
            exit_code,
        },
    };
    serde_json::to_string(&body).expect("error serializes") + "\n"
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn split_labels(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn order(s: &str) -> Result<RenyiOrder, Error> {
    RenyiOrder::new(io::parse_real(s)?)
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn compute(a: &ComputeArgs) -> Result<String, Failure> {
    let two_files = matches!(a.quantity, Quantity::D | Quantity::DSmoothMax);
    let want = if two_files { 2 } else { 1 };
    if a.files.len() != want {
        return Err(Error::InvalidArgument(format!("{} takes {want} file(s), got {}", a.quantity.name(), a.files.len())).into());
    }
    let rho = io::parse_state(&read(&a.files[0])?)?;
    let order = order(&a.alpha)?;
    let cfg = a.opt.config()?;
    let labels: Vec<String> = rho.layout().labels().iter().map(|s| s.to_string()).collect();
    let target = match &a.target {
        Some(t) => split_labels(t),
        None => labels.first().cloned().into_iter().collect(),
    };
    let cond = a.cond.as_deref().map(split_labels).unwrap_or_default();
    let given = match &a.given {
        Some(g) => split_labels(g),
        None => labels
            .iter()
            .filter(|l| !target.contains(l) && !cond.contains(l))
            .cloned()
            .collect(),
    };
    let mut out = ComputeOutput {
        quantity: a.quantity.name(),
        alpha: order.value(),
        target: target.clone(),
        given: given.clone(),
        cond: cond.clone(),
        value: 0.0,
        witness: None,
        diagnostics: Diagnostics {
            iters: 0,
            residual: 0.0,
            flags: vec![],
        },
    };
    let result: EntropyResult = match a.quantity {
        Quantity::D | Quantity::DSmoothMax => {
            let sigma = io::parse_operator(&read(&a.files[1])?)?;
            out.target = vec![];
            out.given = vec![];
            let v = if a.quantity == Quantity::D {
                renyi_divergence(&rho, &sigma, order)?
            } else {
                let eps = a
                    .epsilon
                    .ok_or_else(|| Error::InvalidArgument("D_smooth_max needs --epsilon".into()))?;
                smooth_max_divergence_upper(&rho, &sigma, SmoothingParam::new(eps)?, order)?
            };
            closed(v)
        }
        Quantity::HminUp => {
            out.alpha = f64::INFINITY;
            hmin_up(&rho, &strs(&target), &strs(&given))?
        }
        Quantity::ImaxNone | Quantity::ImaxDown => {
            out.alpha = f64::INFINITY;
            let v = if a.quantity == Quantity::ImaxNone {
                ImaxVariant::None
            } else {
                ImaxVariant::Down
            };
            imax_family(&rho, &strs(&target), &strs(&given), v)?
        }
        q => {
            let variant = match q {
                Quantity::H => Variant::HDown,
                Quantity::HUp => Variant::HUp,
                Quantity::I => Variant::IPlain,
                Quantity::IDown => Variant::IDown,
                Quantity::IDownDown => Variant::IDownDown,
                _ => Variant::IDiffCond,
            };
            if variant == Variant::IDiffCond && cond.is_empty() {
                return Err(Error::InvalidArgument("I_cond needs --cond".into()).into());
            }
            let req = EntropyRequest {
                state: rho,
                target,
                partner: given,
                given: cond,
                order,
                variant,
            };
            evaluate(&req, &cfg)?
        }
    };
    let repr = ResultRepr::from(&result);
    out.value = repr.value;
    out.diagnostics = Diagnostics {
        iters: repr.iterations,
        residual: repr.residual,
        flags: repr.flags,
    };
    if !repr.witnesses.is_empty() {
        out.witness = Some(repr.witnesses);
    }
    Ok(to_json(&out))
}

fn closed(value: f64) -> EntropyResult {
    EntropyResult {
        value,
        witnesses: vec![],
        residual: 0.0,
        iterations: 0,
        flags: vec![],
    }
}

fn verify(a: &VerifyArgs) -> Result<(String, bool), Failure> {
    let suite = Suite::from_str(&a.suite)?;
    let mut spec = TrialSpec::new(suite, a.trials, a.seed);
    if let Some(d) = &a.dims {
        spec.dims = io::parse_dims(d)?;
    }
    if let Some(al) = &a.alphas {
        spec.alphas = io::parse_real_list(al)?;
    }
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {t} must be positive")).into());
        }
        spec.tol = Some(t);
    }
    if let Some(r) = a.restarts {
        spec.cfg.restarts = r;
    }
    let report: VerificationReport = run_suite(suite, &spec)?;
    Ok((to_json(&report), report.pass))
}

pub const CSV_HEADER: &str = "delta,alpha,bound,vn_limit";

pub fn version_line() -> String {
    format!("# renyi-leakage-toolkit v{VERSION}")
}

pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut s = version_line();
    s.push('\n');
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.delta, r.alpha, r.bound, r.vn_limit));
    }
    s
}

/// Parses output of [`curve_csv`], checking the version and column lines.
pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>, Error> {
    let mut lines = text.lines();
    if lines.next() != Some(version_line().as_str()) {
        return Err(Error::Parse("missing or foreign version line".into()));
    }
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse("unexpected column header".into()));
    }
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(io::parse_real).collect::<Result<_, _>>()?;
            match v[..] {
                [delta, alpha, bound, vn_limit] => Ok(CurveRow {
                    delta,
                    alpha,
                    bound,
                    vn_limit,
                }),
                _ => Err(Error::Parse(format!("row '{l}' does not have 4 columns"))),
            }
        })
        .collect()
}

fn leakage_curve_cmd(a: &CurveArgs) -> Result<String, Failure> {
    let alphas = io::parse_real_list(&a.alphas)?;
    let deltas = match a.delta {
        Some(d) => vec![d],
        None => io::parse_grid(&a.delta_grid)?,
    };
    let rows = leakage_curve(&deltas, &alphas, a.dim, a.zeta)?;
    Ok(match a.format {
        Format::Csv => curve_csv(&rows),
        Format::Json => to_json(&CurveOutput {
            version: VERSION.into(),
            dim: a.dim,
            zeta: a.zeta,
            rows,
        }),
    })
}

fn penalty_cmd(a: &PenaltyArgs) -> Result<String, Failure> {
    let (xi, source) = match (&a.xi, &a.model) {
        (Some(list), None) => (io::parse_real_list(list)?, "list"),
        (None, Some(m)) => {
            let parts: Vec<&str> = m.split(',').map(str::trim).collect();
            let [d, r, z] = parts[..] else {
                return Err(Error::Parse(format!("--model '{m}' needs delta,dim_r,zeta")).into());
            };
            let delta = io::parse_real(d)?;
            let dim_r: usize = r.parse().map_err(|_| Error::Parse(format!("bad dim_r '{r}'")))?;
            let zeta: u8 = z.parse().map_err(|_| Error::Parse(format!("bad zeta '{z}'")))?;
            let model = LeakageModel::new(delta, dim_r, zeta)?;
            let v = prob_leakage_bound(&model, a.alpha, a.dim_z.unwrap_or(dim_r))?;
            (vec![v; a.n], "model")
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --xi and --model".into()).into()),
    };
    let b = keyrate_penalty(&PenaltyInput {
        n: a.n,
        h_min: a.h,
        xi,
        alpha: a.alpha,
        p_omega: a.p_omega,
    })?;
    Ok(to_json(&PenaltyOutput {
        penalty: b.total,
        rate: b.rate,
        leakage: b.leakage,
        conditioning: b.conditioning,
        n: a.n,
        h: a.h,
        alpha: a.alpha,
        p_omega: a.p_omega,
        xi_source: source.into(),
    }))
}

fn channel_sup_cmd(a: &ChannelSupArgs) -> Result<String, Failure> {
    let ch = io::parse_channel(&read(&a.channel)?)?;
    let order = order(&a.alpha)?;
    let cfg = a.opt.config()?;
    let leaked = match &a.leaked {
        Some(l) => split_labels(l),
        None if ch.out_layout().labels().contains(&"L") => vec!["L".to_string()],
        None => ch.out_layout().labels().iter().map(|s| s.to_string()).collect(),
    };
    let sup = channel_sup_mi(&ch, &strs(&leaked), order, &cfg)?;
    let closed = closed_form_sup(&ch, order.value());
    let status = match sup.status {
        EstimateStatus::LowerEstimate => "LOWER_ESTIMATE",
    };
    Ok(to_json(&ChannelSupOutput {
        alpha: order.value(),
        leaked,
        estimate: sup.estimate,
        status: status.into(),
        converged: sup.converged,
        restarts: sup.restarts,
        closed_form: closed,
        within_closed_form: closed.map(|c| sup.estimate <= c + BRACKET_TOL),
    }))
}

fn dispatch(cli: &Cli) -> Result<(String, i32), Failure> {
    Ok(match &cli.command {
        Command::Compute(a) => (compute(a)?, EXIT_OK),
        Command::Verify(a) => {
            let (text, pass) = verify(a)?;
            (text, if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::LeakageCurve(a) => (leakage_curve_cmd(a)?, EXIT_OK),
        Command::Penalty(a) => (penalty_cmd(a)?, EXIT_OK),
        Command::ChannelSup(a) => (channel_sup_cmd(a)?, EXIT_OK),
    })
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Outcome {
                        code: EXIT_OK,
                        stdout: e.to_string(),
                        stderr: String::new(),
                    }
                }
                _ => Outcome {
                    code: EXIT_INPUT,
                    stdout: error_json("usage", e.to_string(), EXIT_INPUT),
                    stderr: e.render().to_string(),
                },
            };
        }
    };
    let (text, code) = match dispatch(&cli) {
        Ok(r) => r,
        Err(Failure::Core(e)) => {
            let (kind, code) = classify(&e);
            return Outcome {
                code,
                stdout: error_json(kind, e.to_string(), code),
                stderr: String::new(),
            };
        }
        Err(Failure::Io(m)) => {
            return Outcome {
                code: EXIT_INPUT,
                stdout: error_json("io", m, EXIT_INPUT),
                stderr: String::new(),
            }
        }
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: EXIT_INPUT,
                stdout: error_json("io", format!("{}: {e}", path.display()), EXIT_INPUT),
                stderr: String::new(),
            },
        },
        None => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}
