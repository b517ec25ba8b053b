//! Command-line front end. Flags take display units (nm, ps, m/s, K, GPa);
//! everything below this module is SI.
//!
//! Exit codes: 0 success, 1 partial sweep failure, 2 configuration, input or
//! shape error, 3 numerical abort.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{
    self, band_report, dominant_band, field_pdf, haar_highfreq_energy, haar_loss, lp_error, max_temperature,
    measure_shock_speed, pdf_report, pore_area, pore_collapse_time, profile_report, radial_power_spectrum,
    report_file_name, rmse_report, rollout_rmse, spectrum_relative_error, spectrum_report, vertical_cut,
    AnalysisError, BandOutcome, BinEdges, Report,
};
use crate::dataset::{
    fit_norm, normalize, read_header, read_series, split_velocities, write_series, Channel, DatasetError, Manifest,
    NormStats, SeriesRecorder, SnapshotSeries, Split, DEFAULT_SPLIT_SEED,
};
use crate::solver::{ConfigError, RunConfig, Simulation, SolverError};
use crate::units;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PORECOLLAPSE_OUT_DIR";

/// File name of the manifest a sweep writes next to its series.
pub const SWEEP_MANIFEST: &str = "manifest.txt";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Input(String),
    #[error("{failed} of {total} runs failed; see {manifest}")]
    PartialSweep { failed: usize, total: usize, manifest: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::PartialSweep { .. } => 1,
            CliError::Solver(e) => match e.root() {
                SolverError::Config(_) | SolverError::Material(_) => 2,
                _ => 3,
            },
            _ => 2,
        }
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "porecollapse", version, about = "2D Eulerian pore-collapse simulator and analysis toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one impact velocity and write its series and manifest.
    Run(RunArgs),
    /// Simulate a list or preset of impact velocities.
    Sweep(SweepArgs),
    /// Normalize the series of a sweep with statistics fitted on its training split.
    ExportDataset(ExportArgs),
    /// Metrics of single series.
    Analyze(AnalyzeArgs),
    /// Metrics between a prediction and the ground truth.
    Compare(CompareArgs),
    /// Print the header of a series file.
    Info(InfoArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run configuration with sections [material], [geometry], [solver], [output].
    pub config: PathBuf,
    /// Impact velocity, m/s; overrides the configuration.
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    /// Output series path [default: $PORECOLLAPSE_OUT_DIR/v<v0>.shrb].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Progress line every N steps on standard error; 0 silences it.
    #[arg(long, default_value_t = 200)]
    pub progress_every: u64,
    /// Seed of the train/validation shuffle recorded in the manifest.
    #[arg(long, default_value_t = DEFAULT_SPLIT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// `paper-trainval`, `paper-test`, or a comma-separated list in m/s.
    #[arg(long, allow_hyphen_values = true)]
    pub velocities: String,
    /// Output directory [default: $PORECOLLAPSE_OUT_DIR].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Concurrent single-threaded runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = DEFAULT_SPLIT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Manifest written by `sweep`.
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeMetric {
    Pdf,
    Band,
    Collapse,
    Spectrum,
    Haar,
    Shock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareMetric {
    Rmse,
    Spectrum,
    Haar,
    Lp,
}

/// Frame selector: an index, `collapse`, `prominent` or `last`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameSel {
    Index(usize),
    Collapse,
    Prominent,
    Last,
}

impl FromStr for FrameSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "collapse" => Ok(FrameSel::Collapse),
            "prominent" => Ok(FrameSel::Prominent),
            "last" => Ok(FrameSel::Last),
            n => n
                .parse()
                .map(FrameSel::Index)
                .map_err(|_| format!("expected a frame index, collapse, prominent or last; got {n:?}")),
        }
    }
}

fn parse_channel(s: &str) -> Result<Channel, String> {
    s.parse().map_err(|e: DatasetError| e.to_string())
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(required = true)]
    pub series: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub metric: AnalyzeMetric,
    #[arg(long, default_value = "T", value_parser = parse_channel)]
    pub channel: Channel,
    /// Defaults: `collapse` for pdf, `prominent` for band, `last` for spectrum.
    #[arg(long)]
    pub frame: Option<FrameSel>,
    /// Abscissa of the vertical cut, nm.
    #[arg(long, default_value_t = 29.30)]
    pub x_nm: f64,
    /// Open interval of the vertical cut, nm.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [29.30, 175.79])]
    pub y_nm: Vec<f64>,
    /// Minimum peak excess over the median for a band, K.
    #[arg(long, default_value_t = analysis::DEFAULT_BAND_CONTRAST)]
    pub min_contrast: f64,
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    /// Remaining pore area, relative to the initial one, counted as collapse.
    #[arg(long, default_value_t = analysis::DEFAULT_COLLAPSE_FRACTION)]
    pub collapse_fraction: f64,
    /// Report directory [default: $PORECOLLAPSE_OUT_DIR].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub pred: PathBuf,
    pub truth: PathBuf,
    #[arg(long, value_enum)]
    pub metric: CompareMetric,
    #[arg(long, default_value = "T", value_parser = parse_channel)]
    pub channel: Channel,
    /// Single frame; spectrum defaults to the last one, haar and lp report every frame.
    #[arg(long)]
    pub frame: Option<usize>,
    /// Exponent of the generalized Lp norm.
    #[arg(long, default_value_t = 10.0)]
    pub p: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    pub series: PathBuf,
}

/// Parse `args` (program name first), execute, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::ExportDataset(a) => cmd_export(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Info(a) => cmd_info(a),
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

/// `v<v0>.shrb`
pub fn series_file_name(v0: f64) -> String {
    format!("v{v0}.shrb")
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| input(format!("cannot create {}: {e}", parent.display())))?;
    }
    Ok(())
}

/// Run a configuration to its last snapshot and return the recorded series.
/// With `progress_every`, progress lines go to standard error.
pub fn simulate(config: &RunConfig, progress_every: Option<u64>) -> Result<SnapshotSeries, SolverError> {
    let mut sim = Simulation::new(*config)?;
    let material = sim.material.clone();
    let g = &config.geometry;
    let series = SnapshotSeries::new(g.nx, g.ny, g.dx, config.output.snapshot_dt, g.impact_velocity);
    let mut recorder = SeriesRecorder::new(series, &material);
    if let Some(every) = progress_every {
        recorder = recorder.with_progress(every, Box::new(std::io::stderr()));
    }
    sim.run(&mut recorder)?;
    Ok(recorder.series)
}

fn load_config(path: &Path, v0: Option<f64>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(v0) = v0 {
        cfg = cfg.with_impact_velocity(v0);
        cfg.validate()?;
    }
    Ok(cfg)
}

fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.config, a.v0)?;
    let v0 = cfg.geometry.impact_velocity;
    let out = a.out.clone().unwrap_or_else(|| default_out_dir().join(series_file_name(v0)));
    ensure_parent(&out)?;
    let series = simulate(&cfg, (a.progress_every > 0).then_some(a.progress_every))?;
    write_series(&series, &out)?;

    let split = split_velocities(a.seed);
    let mut m = Manifest::new();
    m.set("series", out.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()));
    m.set("v0_ms", v0);
    m.set("split", split.membership(v0).name());
    m.set("split_seed", a.seed);
    m.set("n_frames", series.n_frames());
    m.set("dx_m", series.dx);
    m.set("dt_snap_s", series.dt_snap);
    let manifest_path = out.with_extension("manifest");
    m.write(&manifest_path)?;
    eprintln!("wrote {} ({} frames) and {}", out.display(), series.n_frames(), manifest_path.display());
    Ok(())
}

/// Velocities named by a preset or listed explicitly, m/s.
pub fn parse_velocities(spec: &str, seed: u64) -> Result<Vec<f64>, CliError> {
    match spec {
        "paper-trainval" => Ok(split_velocities(seed).train_and_validation()),
        "paper-test" => Ok(split_velocities(seed).test),
        list => {
            let vals = list
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| input(format!("bad velocity {s:?} in --velocities"))))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.is_empty() {
                return Err(input("--velocities is empty"));
            }
            Ok(vals)
        }
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let base = RunConfig::load(&a.config)?;
    let velocities = parse_velocities(&a.velocities, a.seed)?;
    let configs = velocities
        .iter()
        .map(|&v| {
            let cfg = base.with_impact_velocity(v);
            cfg.validate().map(|_| cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out_dir = a.out.clone().unwrap_or_else(default_out_dir);
    std::fs::create_dir_all(&out_dir).map_err(|e| input(format!("cannot create {}: {e}", out_dir.display())))?;

    let jobs = a.jobs.clamp(1, configs.len());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<usize, String>>>> = Mutex::new(vec![None; configs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = configs.get(i) else { break };
                let v0 = cfg.geometry.impact_velocity;
                let path = out_dir.join(series_file_name(v0));
                let outcome = simulate(cfg, None)
                    .map_err(CliError::from)
                    .and_then(|s| write_series(&s, &path).map(|_| s.n_frames()).map_err(CliError::from))
                    .map_err(|e| e.to_string());
                match &outcome {
                    Ok(n) => eprintln!("v0={v0} m/s: {n} frames -> {}", path.display()),
                    Err(e) => eprintln!("v0={v0} m/s: failed: {e}"),
                }
                results.lock().expect("no worker panicked")[i] = Some(outcome);
            });
        }
    });

    let split = split_velocities(a.seed);
    let mut m = Manifest::new();
    m.set("split_seed", a.seed);
    m.set("n_runs", configs.len());
    let mut failed = 0;
    for (i, (cfg, result)) in configs.iter().zip(results.into_inner().expect("no worker panicked")).enumerate() {
        let v0 = cfg.geometry.impact_velocity;
        m.set(format!("run.{i}.v0_ms"), v0);
        m.set(format!("run.{i}.series"), series_file_name(v0));
        m.set(format!("run.{i}.split"), split.membership(v0).name());
        match result.expect("every run reported") {
            Ok(_) => m.set(format!("run.{i}.status"), "ok"),
            Err(e) => {
                failed += 1;
                m.set(format!("run.{i}.status"), format!("failed: {e}"));
            }
        }
    }
    m.set("n_failed", failed);
    let manifest_path = out_dir.join(SWEEP_MANIFEST);
    m.write(&manifest_path)?;
    if failed > 0 {
        return Err(CliError::PartialSweep { failed, total: configs.len(), manifest: manifest_path.display().to_string() });
    }
    Ok(())
}

/// Successful runs listed in a sweep manifest: `(v0, split, series file)`.
fn manifest_runs(m: &Manifest) -> Result<Vec<(f64, String, String)>, CliError> {
    let n: usize = m
        .get("n_runs")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| input("manifest lacks n_runs"))?;
    let mut runs = Vec::new();
    for i in 0..n {
        let get = |key: &str| m.get(&format!("run.{i}.{key}")).ok_or_else(|| input(format!("manifest lacks run.{i}.{key}")));
        if get("status")? != "ok" {
            continue;
        }
        let v0 = get("v0_ms")?.parse().map_err(|_| input(format!("run.{i}.v0_ms is not a number")))?;
        runs.push((v0, get("split")?.to_string(), get("series")?.to_string()));
    }
    Ok(runs)
}

fn cmd_export(a: &ExportArgs) -> Result<(), CliError> {
    let m = Manifest::read(&a.manifest)?;
    let src = a.manifest.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    let out_dir = a.out.clone().unwrap_or_else(default_out_dir);
    if out_dir.canonicalize().ok().is_some_and(|o| src.canonicalize().ok() == Some(o)) {
        return Err(input("export directory must differ from the sweep directory"));
    }
    std::fs::create_dir_all(&out_dir).map_err(|e| input(format!("cannot create {}: {e}", out_dir.display())))?;
    let runs = manifest_runs(&m)?;

    let train = Split::Train.name();
    let mut stats: Option<NormStats> = None;
    for (_, _, file) in runs.iter().filter(|r| r.1 == train) {
        let fitted = fit_norm(&[&read_series(&src.join(file))?])?;
        stats = Some(stats.map_or(fitted, |s| s.merge(&fitted)));
    }
    let stats = stats.ok_or_else(|| input("no successful training runs to fit normalization on"))?;
    stats.validate()?;

    let mut out = Manifest::new();
    out.set("split_seed", m.get("split_seed").unwrap_or("unknown"));
    out.set("normalized", "true");
    out.set_norm(&stats);
    out.set("n_runs", runs.len());
    for (i, (v0, split, file)) in runs.iter().enumerate() {
        write_series(&normalize(&read_series(&src.join(file))?, &stats)?, &out_dir.join(file))?;
        out.set(format!("run.{i}.v0_ms"), v0);
        out.set(format!("run.{i}.series"), file);
        out.set(format!("run.{i}.split"), split);
        out.set(format!("run.{i}.status"), "ok");
    }
    out.write(&out_dir.join(SWEEP_MANIFEST))?;
    eprintln!("exported {} series to {}", runs.len(), out_dir.display());
    Ok(())
}

fn resolve_frame(series: &SnapshotSeries, sel: FrameSel, collapse_fraction: f64) -> Result<usize, CliError> {
    let frame = match sel {
        FrameSel::Index(f) => f,
        FrameSel::Last | FrameSel::Prominent => series.n_frames().saturating_sub(1),
        FrameSel::Collapse => pore_collapse_time(series, collapse_fraction)
            .frame()
            .ok_or_else(|| input(format!("pore does not collapse in the v0 = {} m/s series", series.v0)))?,
    };
    series.check_frame_index(frame)?;
    Ok(frame)
}

fn emit(report: &Report, dir: &Path, name: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    report.write(&path)?;
    print!("{report}");
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let dir = a.out.clone().unwrap_or_else(default_out_dir);
    let metric = a.metric.to_possible_value().expect("no skipped variants").get_name().to_string();
    for path in &a.series {
        let s = read_series(path)?;
        match a.metric {
            AnalyzeMetric::Pdf => {
                let frame = resolve_frame(&s, a.frame.unwrap_or(FrameSel::Collapse), a.collapse_fraction)?;
                let edges = BinEdges::spanning([s.channel(frame, a.channel)], a.bins)?;
                let pdf = field_pdf(&s, a.channel, frame, &edges)?;
                emit(&pdf_report(&pdf), &dir, &report_file_name(&format!("pdf_{}", a.channel), s.v0, Some(frame)))?;
            }
            AnalyzeMetric::Band => {
                let x = units::nm_to_m(a.x_nm);
                let y_range = (units::nm_to_m(a.y_nm[0]), units::nm_to_m(a.y_nm[1]));
                let (frame, outcome) = match a.frame.unwrap_or(FrameSel::Prominent) {
                    FrameSel::Prominent => strongest_band(&s, x, y_range, a.min_contrast)?,
                    sel => {
                        let f = resolve_frame(&s, sel, a.collapse_fraction)?;
                        (f, dominant_band(&vertical_cut(&s, f, x, y_range)?, a.min_contrast))
                    }
                };
                let profile = vertical_cut(&s, frame, x, y_range)?;
                profile_report(&profile).write(&dir.join(report_file_name("profile", s.v0, Some(frame))))?;
                emit(&band_report(frame, &outcome), &dir, &report_file_name(&metric, s.v0, None))?;
            }
            AnalyzeMetric::Collapse => {
                let collapse = pore_collapse_time(&s, a.collapse_fraction);
                let t_max = max_temperature(&s);
                let mut r = Report::new(&["frame", "t_ps", "pore_cells", "Tmax_K", "collapsed"]);
                for f in 0..s.n_frames() {
                    let collapsed = collapse.frame().is_some_and(|c| f >= c);
                    r.push(vec![
                        f.to_string(),
                        format!("{}", units::s_to_ps(s.time(f))),
                        pore_area(&s, f).to_string(),
                        format!("{}", t_max[f]),
                        collapsed.to_string(),
                    ]);
                }
                emit(&r, &dir, &report_file_name(&metric, s.v0, None))?;
                println!("collapse_frame = {collapse}");
            }
            AnalyzeMetric::Spectrum => {
                let frame = resolve_frame(&s, a.frame.unwrap_or(FrameSel::Last), a.collapse_fraction)?;
                let spectrum = radial_power_spectrum(&s.field(frame, a.channel));
                let mut r = Report::new(&["k_per_m", "power"]);
                for (k, p) in spectrum.k.iter().zip(&spectrum.power) {
                    r.push(vec![format!("{k:e}"), format!("{p:e}")]);
                }
                emit(&r, &dir, &report_file_name(&format!("spectrum_{}", a.channel), s.v0, Some(frame)))?;
            }
            AnalyzeMetric::Haar => {
                let mut r = Report::new(&["frame", "haar_energy"]);
                let frames = match a.frame {
                    Some(sel) => vec![resolve_frame(&s, sel, a.collapse_fraction)?],
                    None => (0..s.n_frames()).collect(),
                };
                for f in frames {
                    r.push(vec![f.to_string(), format!("{:e}", haar_highfreq_energy(&s.field(f, a.channel))?)]);
                }
                emit(&r, &dir, &report_file_name(&format!("haar_{}", a.channel), s.v0, None))?;
            }
            AnalyzeMetric::Shock => {
                let speed = measure_shock_speed(&s, None)?;
                let mut r = Report::new(&["uw_ms", "us_ms", "frames_used"]);
                r.push(vec![format!("{}", speed.uw), format!("{}", speed.us), speed.frames_used.to_string()]);
                emit(&r, &dir, &report_file_name(&metric, s.v0, None))?;
            }
        }
    }
    Ok(())
}

/// Frame whose cut carries the strongest band, or the strongest failure.
fn strongest_band(
    s: &SnapshotSeries,
    x: f64,
    y_range: (f64, f64),
    min_contrast: f64,
) -> Result<(usize, BandOutcome), CliError> {
    let mut best: Option<(usize, BandOutcome)> = None;
    for f in 0..s.n_frames() {
        let outcome = dominant_band(&vertical_cut(s, f, x, y_range)?, min_contrast);
        let better = match (&best, &outcome) {
            (None, _) => true,
            (Some((_, BandOutcome::Band(old))), BandOutcome::Band(new)) => new.delta_t > old.delta_t,
            (Some((_, BandOutcome::Fail { .. })), BandOutcome::Band(_)) => true,
            (Some((_, BandOutcome::Fail { delta_t: old })), BandOutcome::Fail { delta_t: new }) => new > old,
            (Some((_, BandOutcome::Band(_))), BandOutcome::Fail { .. }) => false,
        };
        if better {
            best = Some((f, outcome));
        }
    }
    best.ok_or_else(|| input("series has no frames"))
}

fn frames_of(s: &SnapshotSeries, frame: Option<usize>) -> Result<Vec<usize>, CliError> {
    match frame {
        Some(f) => {
            s.check_frame_index(f)?;
            Ok(vec![f])
        }
        None => Ok((0..s.n_frames()).collect()),
    }
}

fn cmd_compare(a: &CompareArgs) -> Result<(), CliError> {
    let dir = a.out.clone().unwrap_or_else(default_out_dir);
    let pred = read_series(&a.pred)?;
    let truth = read_series(&a.truth)?;
    pred.check_compatible(&truth)?;
    let name = |metric: &str, frame| report_file_name(&format!("compare_{metric}"), truth.v0, frame);
    match a.metric {
        CompareMetric::Rmse => emit(&rmse_report(&rollout_rmse(&pred, &truth)?), &dir, &name("rmse", None)),
        CompareMetric::Spectrum => {
            let frame = a.frame.unwrap_or(truth.n_frames().saturating_sub(1));
            truth.check_frame_index(frame)?;
            let err = spectrum_relative_error(&pred.field(frame, a.channel), &truth.field(frame, a.channel))?;
            emit(&spectrum_report(&err), &dir, &name(&format!("spectrum_{}", a.channel), Some(frame)))
        }
        CompareMetric::Haar => {
            let mut r = Report::new(&["frame", "haar_loss"]);
            for f in frames_of(&truth, a.frame)? {
                let loss = haar_loss(&pred.field(f, a.channel), &truth.field(f, a.channel))?;
                r.push(vec![f.to_string(), format!("{loss:e}")]);
            }
            emit(&r, &dir, &name(&format!("haar_{}", a.channel), a.frame))
        }
        CompareMetric::Lp => {
            let mut r = Report::new(&["frame", "p", "lp_error"]);
            for f in frames_of(&truth, a.frame)? {
                let e = lp_error(pred.channel(f, a.channel), truth.channel(f, a.channel), a.p)?;
                r.push(vec![f.to_string(), format!("{}", a.p), format!("{e:e}")]);
            }
            emit(&r, &dir, &name(&format!("lp_{}", a.channel), a.frame))
        }
    }
}

fn cmd_info(a: &InfoArgs) -> Result<(), CliError> {
    let h = read_header(&a.series)?;
    println!("magic = SHRB");
    println!("version = {}", h.version);
    println!("nx = {}", h.nx);
    println!("ny = {}", h.ny);
    println!("n_channels = {}", h.n_channels);
    println!("n_frames = {}", h.n_frames);
    println!("dx_m = {:e}", h.dx);
    println!("dt_snap_s = {:e}", h.dt_snap);
    println!("v0_ms = {}", h.v0);
    println!("channels = {}", h.channel_names.join(","));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_selectors_parse() {
        assert_eq!("collapse".parse(), Ok(FrameSel::Collapse));
        assert_eq!("12".parse(), Ok(FrameSel::Index(12)));
        assert!("-1".parse::<FrameSel>().is_err());
    }

    #[test]
    fn presets_have_published_sizes() {
        assert_eq!(parse_velocities("paper-trainval", DEFAULT_SPLIT_SEED).unwrap().len(), 88);
        assert_eq!(parse_velocities("paper-test", DEFAULT_SPLIT_SEED).unwrap().len(), 26);
        assert_eq!(parse_velocities("1800, 2000", 0).unwrap(), vec![1800.0, 2000.0]);
        assert!(parse_velocities("fast", 0).is_err());
    }

    #[test]
    fn negative_velocity_reaches_validation() {
        let cli = Cli::try_parse_from(["porecollapse", "run", "base.cfg", "--v0", "-5"]).unwrap();
        match cli.command {
            Command::Run(a) => assert_eq!(a.v0, Some(-5.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exit_codes() {
        let numerical = CliError::Solver(SolverError::EmptyMaterial);
        assert_eq!(numerical.exit_code(), 3);
        let config = CliError::Solver(SolverError::Config(ConfigError::Invalid { key: "solver.cfl", reason: String::new() }));
        assert_eq!(config.exit_code(), 2);
        assert_eq!(input("x").exit_code(), 2);
        assert_eq!(CliError::PartialSweep { failed: 1, total: 2, manifest: String::new() }.exit_code(), 1);
    }

    #[test]
    fn series_names() {
        assert_eq!(series_file_name(1800.0), "v1800.shrb");
        assert_eq!(series_file_name(720.5), "v720.5.shrb");
    }
}
