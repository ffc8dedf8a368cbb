//! `ulocal` command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use ulocal_core::calibrate::{self, Candidate};
use ulocal_core::lti::{discretize_zoh, library};
use ulocal_core::suite;
use ulocal_core::trace_io::{self, MetricsReport};
use ulocal_core::{
    run_closed_loop, Complex64, ControllerConfig, Error, Metrics, PlantRef, Scenario, ScenarioFile,
    StateSpaceModel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INVALID: i32 = 4;
pub const EXIT_DIVERGED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "ulocal", version, about = "Model-free control scenario runner")]
struct Cli {
    /// Override the sample period of every scenario (seconds).
    #[arg(long, global = true, value_name = "SECONDS")]
    ts: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario file or a shipped suite.
    Run(RunArgs),
    /// Print poles, zeros, DC gain and phase classification of a plant.
    Analyze(AnalyzeArgs),
    /// Grid-search the controller gains of a scenario.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "suite", required_unless_present = "suite", value_name = "FILE")]
    scenario: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    suite: Option<String>,
    #[arg(long, env = "ULOCAL_OUT", default_value = "out", value_name = "DIR")]
    out: PathBuf,
    /// Scenarios run concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(usize))]
    parallel: usize,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Built-in plant name or a JSON plant file.
    #[arg(long)]
    plant: String,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Scenario whose controller is tuned; its controller kind picks the grid.
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,
    /// Further scenarios the same gains must handle (IAE is summed).
    #[arg(long = "also", value_name = "FILE")]
    also: Vec<PathBuf>,
    /// Candidates to print.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Admissibility bound on max |u|.
    #[arg(long, default_value_t = calibrate::DEFAULT_U_BOUND)]
    u_bound: f64,
    /// Write the scenario with the best gains to this file.
    #[arg(long, value_name = "FILE")]
    write: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

fn classify(context: &str, e: Error) -> CliError {
    match e {
        Error::Io(io) if io.kind() == std::io::ErrorKind::NotFound => {
            CliError::new(EXIT_IO, format!("{context}: file not found"))
        }
        Error::Io(io) => CliError::new(EXIT_IO, format!("{context}: {io}")),
        other => CliError::new(EXIT_INVALID, format!("{context}: {other}")),
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command without
/// touching the process streams.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                CliOutput { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli) {
        Ok(out) => CliOutput { code: out.code, stdout: out.stdout, stderr: out.stderr },
        Err(e) => {
            CliOutput { code: e.code, stdout: String::new(), stderr: format!("error: {}\n", e.message) }
        }
    }
}

/// [`run_cli`], forwarding output to stdout and stderr. Returns the exit code.
pub fn cli_run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let out = run_cli(args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

struct Outcome {
    stdout: String,
    stderr: String,
    code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, stderr: String::new(), code: EXIT_OK }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(ts) = cli.ts {
        if !(ts > 0.0 && ts.is_finite()) {
            return Err(CliError::new(EXIT_USAGE, format!("--ts must be > 0, got {ts}")));
        }
    }
    match cli.command {
        Command::Run(a) => run(a, cli.ts),
        Command::Analyze(a) => analyze(a, cli.ts),
        Command::Calibrate(a) => calibrate_cmd(a, cli.ts),
    }
}

// ---------------------------------------------------------------------------
// run

struct Job {
    entry: Option<String>,
    stem: String,
    scenario: Scenario,
}

struct JobResult {
    entry: Option<String>,
    stem: String,
    report: MetricsReport,
}

fn apply_ts(mut file: ScenarioFile, ts: Option<f64>) -> ScenarioFile {
    if let Some(ts) = ts {
        file.ts = ts;
    }
    file
}

fn load_jobs(a: &RunArgs, ts: Option<f64>) -> Result<Vec<Job>, CliError> {
    if let Some(path) = &a.scenario {
        let ctx = path.display().to_string();
        let file = ScenarioFile::load(path).map_err(|e| classify(&ctx, e))?;
        let scenario = apply_ts(file, ts).to_scenario().map_err(|e| classify(&ctx, e))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| scenario.label.clone());
        return Ok(vec![Job { entry: None, stem, scenario }]);
    }
    let name = a.suite.as_deref().expect("clap requires --scenario or --suite");
    let all = suite::scenarios(name).map_err(|e| classify("suite", e))?;
    all.into_iter()
        .map(|s| {
            let scenario = apply_ts(s.file, ts).to_scenario().map_err(|e| classify(&s.stem, e))?;
            Ok(Job { entry: Some(s.entry), stem: s.stem, scenario })
        })
        .collect()
}

fn execute(job: Job, out: &Path) -> Result<JobResult, CliError> {
    let trace = run_closed_loop(&job.scenario).map_err(|e| classify(&job.stem, e))?;
    let report = MetricsReport::new(&trace, &job.scenario);
    let io = |e: std::io::Error| CliError::new(EXIT_IO, format!("{}: {e}", out.display()));
    fs::write(out.join(format!("{}.csv", job.stem)), trace_io::csv_string(&trace.rows)).map_err(io)?;
    fs::write(out.join(format!("{}.metrics.json", job.stem)), report.to_json()).map_err(io)?;
    Ok(JobResult { entry: job.entry, stem: job.stem, report })
}

fn opt_time(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |t| format!("{t:.4e}"))
}

fn recovery(m: &Metrics) -> String {
    if m.post_switch_recovery.is_empty() {
        return "n/a".into();
    }
    m.post_switch_recovery.iter().map(|r| opt_time(*r)).collect::<Vec<_>>().join(";")
}

/// Fixed-width summary table.
fn summary_table(results: &[JobResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<6} {:<10} {:<9} {:>12} {:>12} {:>10} {:>12} {:>12} {:>8}",
        "entry", "scenario", "control", "iae", "max|u|", "overshoot", "settling", "recovery", "diverged"
    );
    for r in results {
        let m = &r.report.metrics;
        let _ = writeln!(
            s,
            "{:<6} {:<10} {:<9} {:>12.4e} {:>12.4e} {:>10.4} {:>12} {:>12} {:>8}",
            r.entry.as_deref().unwrap_or("-"),
            r.stem,
            r.report.controller,
            m.iae,
            m.max_abs_u,
            m.max_overshoot,
            opt_time(m.settling_time),
            recovery(m),
            if m.diverged { "yes" } else { "no" },
        );
    }
    s
}

fn run(a: RunArgs, ts: Option<f64>) -> Result<Outcome, CliError> {
    if a.parallel == 0 {
        return Err(CliError::new(EXIT_USAGE, "--parallel must be at least 1"));
    }
    let jobs = load_jobs(&a, ts)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", a.out.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.parallel)
        .build()
        .map_err(|e| CliError::new(EXIT_IO, e.to_string()))?;
    let out = a.out.as_path();
    let results: Vec<JobResult> =
        pool.install(|| jobs.into_par_iter().map(|j| execute(j, out)).collect::<Result<_, _>>())?;

    let table = summary_table(&results);
    if let Some(name) = &a.suite {
        let summary = json!({
            "suite": name,
            "scenarios": results.iter().map(|r| json!({
                "entry": r.entry,
                "scenario": r.stem,
                "csv": format!("{}.csv", r.stem),
                "report": r.report,
            })).collect::<Vec<_>>(),
        });
        let text = serde_json::to_string_pretty(&summary).expect("summary is plain data") + "\n";
        let io = |e: std::io::Error| CliError::new(EXIT_IO, format!("{}: {e}", out.display()));
        fs::write(out.join(format!("{name}.summary.json")), text).map_err(io)?;
        fs::write(out.join(format!("{name}.summary.txt")), &table).map_err(io)?;
    }

    let diverged: Vec<&str> =
        results.iter().filter(|r| r.report.metrics.diverged).map(|r| r.stem.as_str()).collect();
    if diverged.is_empty() {
        return Ok(Outcome::ok(table));
    }
    Ok(Outcome {
        stdout: table,
        stderr: format!("error: diverged: {}\n", diverged.join(", ")),
        code: EXIT_DIVERGED,
    })
}

// ---------------------------------------------------------------------------
// analyze

fn load_plant(spec: &str) -> Result<StateSpaceModel, CliError> {
    if let Some(m) = library::plant_by_name(spec) {
        return Ok(m);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::new(
            EXIT_IO,
            format!(
                "{spec}: neither a built-in plant ({}) nor an existing file",
                library::PLANT_NAMES.join(", ")
            ),
        ));
    }
    let text = fs::read_to_string(path).map_err(|e| classify(spec, e.into()))?;
    let plant: PlantRef = serde_json::from_str(&text).map_err(|e| classify(spec, e.into()))?;
    plant.resolve().map_err(|e| classify(spec, e))
}

fn complex_str(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:+.10e}", z.re)
    } else {
        format!("{:+.10e} {} {:.10e}j", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
    }
}

fn analyze(a: AnalyzeArgs, ts: Option<f64>) -> Result<Outcome, CliError> {
    let m = load_plant(&a.plant)?;
    let tf = m.to_transfer_function();
    let poles = m.poles();
    let zeros = m.zeros();
    let dc = m.dc_gain().ok();
    let discrete = match ts {
        Some(ts) => {
            let d = discretize_zoh(&m, ts).map_err(|e| classify(&a.plant, e))?;
            Some((ts, d.eigenvalues(), d.spectral_radius()))
        }
        None => None,
    };

    let stdout = if a.json {
        let pairs = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        let mut doc = json!({
            "plant": m.name,
            "order": m.order(),
            "num": tf.num(),
            "den": tf.den(),
            "poles": pairs(&poles),
            "zeros": pairs(&zeros),
            "dc_gain": dc,
            "minimum_phase": m.is_minimum_phase(),
            "stable": m.is_stable(),
        });
        if let Some((ts, eig, rho)) = &discrete {
            doc["discrete"] = json!({ "ts": ts, "eigenvalues": pairs(eig), "spectral_radius": rho });
        }
        serde_json::to_string_pretty(&doc).expect("plain data") + "\n"
    } else {
        let mut s = String::new();
        let list = |v: &[Complex64]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter().map(|z| complex_str(*z)).collect::<Vec<_>>().join(", ")
            }
        };
        let _ = writeln!(s, "plant:    {}", m.name);
        let _ = writeln!(s, "order:    {}", m.order());
        let _ = writeln!(s, "num:      {:?}", tf.num());
        let _ = writeln!(s, "den:      {:?}", tf.den());
        let _ = writeln!(s, "poles:    {}", list(&poles));
        let _ = writeln!(s, "zeros:    {}", list(&zeros));
        let _ = writeln!(
            s,
            "dc gain:  {}",
            dc.map_or("undefined (pole at origin)".into(), |g| format!("{g:.10e}"))
        );
        let _ = writeln!(
            s,
            "phase:    {}",
            if m.is_minimum_phase() { "minimum" } else { "non-minimum (zero with Re > 0)" }
        );
        let _ = writeln!(s, "stable:   {}", if m.is_stable() { "yes" } else { "no" });
        if let Some((ts, eig, rho)) = &discrete {
            let _ = writeln!(s, "sampled at ts = {ts:e}:");
            let _ = writeln!(s, "  eigenvalues:     {}", list(eig));
            let _ = writeln!(s, "  spectral radius: {rho:.15}");
        }
        s
    };
    Ok(Outcome::ok(stdout))
}

// ---------------------------------------------------------------------------
// calibrate

fn calibrate_cmd(a: CalibrateArgs, ts: Option<f64>) -> Result<Outcome, CliError> {
    let ctx = a.scenario.display().to_string();
    let file = apply_ts(ScenarioFile::load(&a.scenario).map_err(|e| classify(&ctx, e))?, ts);
    let base = file.to_scenario().map_err(|e| classify(&ctx, e))?;
    let grid = match base.controller {
        ControllerConfig::IstarPi(c) => calibrate::istar_grid(c.memory),
        ControllerConfig::Ipi(c) => calibrate::ipi_grid(c.alpha, c.order),
        ControllerConfig::Pid(_) => {
            return Err(CliError::new(
                EXIT_INVALID,
                format!("{ctx}: PID gains come from Broïda tuning, nothing to calibrate"),
            ))
        }
    };
    let mut bases = vec![base];
    for path in &a.also {
        let ctx = path.display().to_string();
        let f = apply_ts(ScenarioFile::load(path).map_err(|e| classify(&ctx, e))?, ts);
        bases.push(f.to_scenario().map_err(|e| classify(&ctx, e))?);
    }
    let ranked = calibrate::calibrate(&bases, &grid, a.u_bound);
    let mut s = String::new();
    let admissible = ranked.iter().filter(|c| c.admissible).count();
    let _ = writeln!(
        s,
        "{} candidates, {} admissible (no divergence, max|u| <= {})",
        ranked.len(),
        admissible,
        a.u_bound
    );
    for (i, c) in ranked.iter().take(a.top).enumerate() {
        let Candidate { controller, iae, max_abs_u, diverged, admissible } = c;
        let _ = writeln!(
            s,
            "{:>3}. iae={iae:.6e} max|u|={max_abs_u:.3e} diverged={diverged} admissible={admissible} {}",
            i + 1,
            serde_json::to_string(controller).expect("plain data")
        );
    }
    if let (Some(path), Some(best)) = (&a.write, ranked.first()) {
        let mut out = file.clone();
        out.controller = best.controller;
        let text = out.to_json().map_err(|e| classify(&ctx, e))?;
        fs::write(path, text).map_err(|e| CliError::new(EXIT_IO, format!("{}: {e}", path.display())))?;
        let _ = writeln!(s, "wrote {}", path.display());
    }
    Ok(Outcome::ok(s))
}
