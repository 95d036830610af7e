//! Subcommands of the `ddeuc` binary. Each command returns the text for
//! stdout and writes data files under `--out` when given.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddeuc::acs::{auto_omega_max, sample_branches};
use ddeuc::classify::{classify, UniversalityClass};
use ddeuc::delays::{all_sequences, steady_state_exchange, unstable_dimension_at_zero, unstable_dimension_from};
use ddeuc::error::DdeError;
use ddeuc::spectrum::{count_unstable, roots_near_axis, spectrum_vs_acs_distance, spectrum_window, Region};
use ddeuc::stuart_landau::{sl_branches, sl_growth_rate, sl_hopf_sequence, sl_simulate, write_branches_csv, SlParams};
use ddeuc::system::{LinearDde, SystemDocument};
use ddeuc::verify::{run_verification, VerifyConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ddeuc", version, about = "Universality classes and critical delays of x' = Ax + Bx(t - tau)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the ACS and evaluate the closed-form criteria.
    Classify(CommonArgs),
    /// Sample ACS branches and locate their zeros.
    Acs(CommonArgs),
    /// Critical delay sequences and the unstable dimension at --tau.
    Delays(CommonArgs),
    /// Characteristic roots at --tau, the contour count and the ACS distance.
    Spectrum(SpectrumArgs),
    /// Delayed Stuart-Landau oscillator: Hopf delays, periodic branches, simulation.
    Sl(SlArgs),
    /// Seeded cross-check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaMax {
    Auto,
    Value(f64),
}

impl FromStr for OmegaMax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(OmegaMax::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(OmegaMax::Value(v)),
            _ => Err(format!("expected a positive number or 'auto', got '{s}'")),
        }
    }
}

impl OmegaMax {
    pub fn resolve(self, sys: &LinearDde) -> f64 {
        match self {
            OmegaMax::Auto => auto_omega_max(sys),
            OmegaMax::Value(v) => v,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// System as a JSON file path or inline JSON: {"A": [[..]], "B": [[..]], "tau": ..}.
    #[arg(long)]
    pub input: Option<String>,
    /// Frequency window half-width, or "auto" for 4 (1 + |A| + |B|).
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub omega_max: OmegaMax,
    /// Initial ACS grid size.
    #[arg(long, default_value_t = 2001, value_parser = clap::value_parser!(u32).range(64..))]
    pub samples: u32,
    #[arg(long, default_value_t = 10)]
    pub kmax: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Directory for data files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Seed for randomized subroutines.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub re_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub re_max: Option<f64>,
    /// Window is |Im lambda| <= im_max; defaults to omega_max.
    #[arg(long)]
    pub im_max: Option<f64>,
    /// Collocation order; chosen from the window when absent.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SlArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 720)]
    pub phi_samples: usize,
    /// Simulation length; defaults to 40 tau.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Step; defaults to tau / 50.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Constant history z(t) = z0 for t <= 0.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub z0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 40)]
    pub instances: usize,
}

/// Text for stdout and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Dde(DdeError),
}

impl From<DdeError> for CliError {
    fn from(e: DdeError) -> Self {
        CliError::Dde(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Dde(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Dde(e) => exit_code(e),
        }
    }
}

pub fn exit_code(e: &DdeError) -> i32 {
    use DdeError::*;
    match e {
        Input(_) | InvalidSystem(_) | PreconditionViolated(_) | StepTooLarge { .. } | ZeroDelayCoupling => EXIT_INPUT,
        Inconclusive { .. } | Degenerate(_) | Unclassified | OnBifurcation { .. } | NonTransverseCrossing { .. } => {
            EXIT_INCONCLUSIVE
        }
        DegenerateFrequency { .. }
        | BranchCollision { .. }
        | NoConvergence { .. }
        | RootOnContour { .. }
        | QuadratureStall(_)
        | ResidualTooLarge { .. } => EXIT_NUMERICAL,
    }
}

type CliResult<T> = Result<T, CliError>;

/// Reads `--input`: inline JSON when it starts with `{`, a file path otherwise.
pub fn load_system(input: Option<&str>) -> CliResult<(LinearDde, Option<f64>)> {
    let src = input.ok_or_else(|| CliError::Input("--input is required".into()))?;
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        fs::read_to_string(src).map_err(|e| CliError::Input(format!("{src}: {e}")))?
    };
    Ok(LinearDde::from_json(&text)?)
}

fn resolve_tau(flag: Option<f64>, doc: Option<f64>) -> CliResult<Option<f64>> {
    match flag.or(doc) {
        Some(t) if !(t.is_finite() && t >= 0.0) => Err(CliError::Input(format!("tau must be finite and >= 0, got {t}"))),
        t => Ok(t),
    }
}

fn write_out(dir: &Option<PathBuf>, name: &str, contents: &[u8]) -> CliResult<Option<PathBuf>> {
    let Some(dir) = dir else { return Ok(None) };
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(Some(path))
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> ddeuc::error::Result<()>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn path_list(paths: &[Option<PathBuf>]) -> Vec<String> {
    paths.iter().flatten().map(|p| p.display().to_string()).collect()
}

/// JSON emitted by `classify`: the system, the sampling parameters and the
/// verdict. Feeding it back through `--input` reproduces it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    #[serde(flatten)]
    pub system: SystemDocument,
    pub omega_max: f64,
    pub samples: u32,
    #[serde(flatten)]
    pub verdict: UniversalityClass,
}

pub fn cmd_classify(args: &CommonArgs) -> CliResult<Outcome> {
    let (sys, doc_tau) = load_system(args.input.as_deref())?;
    let omega_max = args.omega_max.resolve(&sys);
    let verdict = classify(&sys, omega_max, args.samples as usize)?;
    let report = ClassifyReport {
        system: sys.to_document(doc_tau),
        omega_max,
        samples: args.samples,
        verdict,
    };
    let text = to_json(&report)?;
    write_out(&args.out, "classify.json", text.as_bytes())?;
    Ok(Outcome { stdout: text, code: EXIT_OK })
}

pub fn cmd_acs(args: &CommonArgs) -> CliResult<Outcome> {
    let (sys, _) = load_system(args.input.as_deref())?;
    let omega_max = args.omega_max.resolve(&sys);
    let acs = sample_branches(&sys, omega_max, args.samples as usize)?;
    let crossings = acs.find_crossings()?;
    let csv = csv_bytes(|b| acs.write_csv(b))?;
    let summary = json!({
        "omega_max": omega_max,
        "degree": acs.degree(),
        "branches": acs.branches().len(),
        "samples": acs.omegas().len(),
        "crossings": crossings,
    });
    let json_text = to_json(&summary)?;
    let files = [
        write_out(&args.out, "acs_branches.csv", &csv)?,
        write_out(&args.out, "acs_crossings.json", json_text.as_bytes())?,
    ];
    let stdout = match (args.format, &args.out) {
        (Format::Csv, None) => String::from_utf8_lossy(&csv).into_owned(),
        (_, None) => json_text,
        (_, Some(_)) => to_json(&json!({ "written": path_list(&files), "crossings": summary["crossings"] }))?,
    };
    Ok(Outcome { stdout, code: EXIT_OK })
}

pub fn cmd_delays(args: &CommonArgs) -> CliResult<Outcome> {
    let (sys, doc_tau) = load_system(args.input.as_deref())?;
    let tau = resolve_tau(args.tau, doc_tau)?;
    let (tag, seqs) = all_sequences(&sys, args.kmax)?;
    if tag == ddeuc::classify::ClassTag::Other {
        return Err(DdeError::Unclassified.into());
    }
    let du = tau.map(|t| unstable_dimension_from(&sys, &seqs, t)).transpose()?;
    let report = json!({
        "class": tag,
        "sequences": seqs,
        "steady_state_exchange": steady_state_exchange(&sys),
        "unstable_dimension_at_zero": unstable_dimension_at_zero(&sys),
        "tau": tau,
        "unstable_dimension": du,
    });
    let text = match args.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from("sequence,omega_H,phi_H,direction,k,tau\n");
            for (i, q) in seqs.iter().enumerate() {
                let dir = serde_json::to_value(q.direction)?;
                for (k, t) in q.indexed() {
                    let _ = writeln!(s, "{i},{},{},{},{k},{t}", q.omega_h, q.phi_h, dir.as_str().unwrap_or(""));
                }
            }
            s
        }
    };
    let name = if args.format == Format::Csv { "delays.csv" } else { "delays.json" };
    write_out(&args.out, name, text.as_bytes())?;
    Ok(Outcome { stdout: text, code: EXIT_OK })
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> CliResult<Outcome> {
    let c = &args.common;
    let (sys, doc_tau) = load_system(c.input.as_deref())?;
    let tau = resolve_tau(c.tau, doc_tau)?
        .filter(|t| *t > 0.0)
        .ok_or_else(|| CliError::Input("spectrum needs --tau > 0 (or tau in the input)".into()))?;
    let omega_max = c.omega_max.resolve(&sys);
    let im_max = args.im_max.unwrap_or(omega_max);
    let region = Region {
        re_min: args.re_min.unwrap_or(-1.0),
        re_max: args.re_max.unwrap_or(sys.scale()),
        im_min: -im_max,
        im_max,
    };
    let window = spectrum_window(&sys, tau, region, args.order)?;
    let count = count_unstable(&sys, tau)?;
    let acs = sample_branches(&sys, omega_max, c.samples as usize)?;
    let distance = if acs.is_empty() {
        None
    } else {
        let near: Vec<Complex64> = roots_near_axis(&sys, tau, &acs)?;
        Some(spectrum_vs_acs_distance(&near, tau, &acs)).filter(|d| d.is_finite())
    };
    let csv = csv_bytes(|b| window.write_csv(b))?;
    let report = json!({
        "tau": tau,
        "region": window.region,
        "order": window.order,
        "newton_max_iterations": window.newton_max_iterations,
        "unstable_count": count,
        "acs_distance": distance,
        "roots": window.roots,
    });
    let json_text = to_json(&report)?;
    let files = [
        write_out(&c.out, "spectrum_roots.csv", &csv)?,
        write_out(&c.out, "spectrum.json", json_text.as_bytes())?,
    ];
    let stdout = match (c.format, &c.out) {
        (Format::Csv, None) => String::from_utf8_lossy(&csv).into_owned(),
        (_, None) => json_text,
        (_, Some(_)) => to_json(&json!({
            "written": path_list(&files),
            "unstable_count": count,
            "acs_distance": distance,
            "roots": window.roots.len(),
        }))?,
    };
    Ok(Outcome { stdout, code: EXIT_OK })
}

pub fn cmd_sl(args: &SlArgs) -> CliResult<Outcome> {
    let c = &args.common;
    let p = SlParams::new(args.alpha, args.beta)?;
    let hopf = sl_hopf_sequence(p, c.kmax);
    let branches = sl_branches(p, c.kmax, args.phi_samples);
    let csv = csv_bytes(|b| write_branches_csv(&branches, b))?;
    let mut files = vec![write_out(&c.out, "sl_branches.csv", &csv)?];

    let mut trajectory_summary = serde_json::Value::Null;
    if let Some(tau) = resolve_tau(c.tau, None)? {
        let t_end = args.t_end.unwrap_or(40.0 * tau);
        let dt = args.dt.unwrap_or(tau / 50.0);
        let traj = sl_simulate(p, tau, Complex64::new(args.z0, 0.0), t_end, dt)?;
        let probe = sl_growth_rate(p, tau, t_end, dt)?;
        let tcsv = csv_bytes(|b| traj.write_csv(b))?;
        files.push(write_out(&c.out, "sl_trajectory.csv", &tcsv)?);
        let last = traj.points.last().map(|q| q.abs_z);
        trajectory_summary = json!({ "tau": tau, "t_end": t_end, "dt": dt, "final_abs_z": last, "growth_probe": probe });
    }
    let components: Vec<_> = branches
        .iter()
        .map(|b| json!({ "k": b.k, "component_id": b.component_id, "start": b.start, "end": b.end, "samples": b.samples.len() }))
        .collect();
    let report = json!({
        "params": p,
        "hopf": hopf,
        "components": components,
        "bridges": branches.iter().filter(|b| b.is_bridge()).count(),
        "disconnected": ddeuc::stuart_landau::branches_disconnected(&branches),
        "simulation": trajectory_summary,
    });
    let json_text = to_json(&report)?;
    files.push(write_out(&c.out, "sl_hopf.json", json_text.as_bytes())?);
    let stdout = match (c.format, &c.out) {
        (Format::Csv, None) => String::from_utf8_lossy(&csv).into_owned(),
        (_, None) => json_text,
        (_, Some(_)) => to_json(&json!({ "written": path_list(&files), "hopf": report["hopf"] }))?,
    };
    Ok(Outcome { stdout, code: EXIT_OK })
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<Outcome> {
    let cfg = VerifyConfig {
        seed: args.common.seed,
        instances: args.instances,
    };
    let report = run_verification(&cfg);
    let json_text = to_json(&report)?;
    write_out(&args.common.out, "verify.json", json_text.as_bytes())?;
    let stdout = match args.common.format {
        Format::Json => json_text,
        Format::Csv => report.to_string(),
    };
    let code = if report.all_passed() { EXIT_OK } else { EXIT_NUMERICAL };
    Ok(Outcome { stdout, code })
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Acs(a) => cmd_acs(a),
        Command::Delays(a) => cmd_delays(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Sl(a) => cmd_sl(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Parses `argv`, runs the command, and maps failures to exit codes.
/// Returns `(stdout, stderr, code)`.
pub fn main_with_args<I, T>(argv: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() { (String::new(), text, code) } else { (text, String::new(), code) };
        }
    };
    match run(&cli) {
        Ok(o) => (o.stdout, String::new(), o.code),
        Err(e) => (String::new(), format!("ddeuc: {e}\n"), e.exit_code()),
    }
}
