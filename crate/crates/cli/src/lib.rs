//! Run orchestration, reports and file output for the `twomode` binary.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use thiserror::Error;
use toml::{Table, Value};
use twomode_core::envelope::{metric_profiles, MetricProfile};
use twomode_core::fock::{self, FockRun};
use twomode_core::gaussian;
use twomode_core::modes::{project_initial, solve_secular, ModalCoefficients, StableModes};
use twomode_core::series::ChannelStats;
use twomode_core::{Channel, InitialConditions, ModelParams, ObservableSeries};

pub use config::{parse_config, ConfigError, Emit, Engine, RunConfig, Tolerances};
use output::{columns, write_heatmap_csv, write_series_csv, ENERGY_CHANNELS, ENTROPY_CHANNELS, OCCUPATION_CHANNELS};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TWOMODE_OUT_DIR";

pub const DEFAULT_OUT_DIR: &str = "twomode-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical error: {0}")]
    Numerical(#[from] twomode_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad input: {0}")]
    Input(String),
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Io {
            path: PathBuf::new(),
            source,
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Csv(_) | CliError::Input(_) => 4,
        }
    }

    fn at(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Engine outputs for one configuration.
#[derive(Debug, Clone)]
pub struct Runs {
    pub gaussian: Option<ObservableSeries>,
    pub fock: Option<FockRun>,
}

impl Runs {
    pub fn warnings(&self) -> Vec<String> {
        self.fock.iter().filter_map(|f| f.warning.clone()).collect()
    }

    fn labelled(&self) -> Vec<(&'static str, &ObservableSeries)> {
        let mut out = Vec::new();
        if let Some(g) = &self.gaussian {
            out.push(("gaussian", g));
        }
        if let Some(f) = &self.fock {
            out.push(("fock", &f.series));
        }
        out
    }
}

pub fn execute(config: &RunConfig) -> Result<Runs, CliError> {
    let grid = config.grid();
    let gaussian = config
        .engine
        .runs_gaussian()
        .then(|| gaussian::simulate(&config.params, &config.init, &grid))
        .transpose()?;
    let fock = config
        .engine
        .runs_fock()
        .then(|| fock::simulate(&config.params, &config.init, config.n_cut, &grid))
        .transpose()?;
    Ok(Runs { gaussian, fock })
}

/// Output directory: explicit flag, then the config, then the environment.
pub fn resolve_out_dir(flag: Option<&Path>, config: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub runs: Runs,
    pub files: Vec<PathBuf>,
}

/// Execute the configured engines and write CSV files plus `manifest.toml`
/// into `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunOutput, CliError> {
    let runs = execute(config)?;
    let files = write_outputs(config, &runs, out_dir)?;
    Ok(RunOutput { runs, files })
}

pub fn write_outputs(config: &RunConfig, runs: &Runs, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(CliError::at(out_dir))?;
    let grid = config.grid();
    let labelled = runs.labelled();
    let mut files = Vec::new();
    let groups: [(&str, &[Channel]); 3] = [
        ("occupations.csv", &OCCUPATION_CHANNELS),
        ("entropy.csv", &ENTROPY_CHANNELS),
        ("energies.csv", &ENERGY_CHANNELS),
    ];
    for (name, group) in groups {
        let cols = columns(&labelled, group, |c| config.emit.wants(c));
        if cols.is_empty() {
            continue;
        }
        let path = out_dir.join(name);
        let file = File::create(&path).map_err(CliError::at(&path))?;
        write_series_csv(BufWriter::new(file), &grid, &cols)?;
        files.push(path);
    }
    if let (Some(f), true) = (&runs.fock, config.emit.heatmap) {
        let path = out_dir.join("heatmap.csv");
        let file = File::create(&path).map_err(CliError::at(&path))?;
        write_heatmap_csv(BufWriter::new(file), &f.series)?;
        files.push(path);
    }
    let path = out_dir.join("manifest.toml");
    fs::write(&path, manifest(config, runs, &files)).map_err(CliError::at(&path))?;
    files.push(path);
    Ok(files)
}

/// `[config]` echo, `[run]` facts and `[tolerances]`.
pub fn manifest(config: &RunConfig, runs: &Runs, files: &[PathBuf]) -> String {
    let mut run = Table::new();
    run.insert("library".into(), Value::String("twomode-core".into()));
    run.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    let names = files
        .iter()
        .filter_map(|p| p.file_name())
        .map(|n| Value::String(n.to_string_lossy().into_owned()))
        .collect();
    run.insert("files".into(), Value::Array(names));
    for (engine, series) in runs.labelled() {
        if let Some(stats) = series.get(Channel::ETot).and_then(ChannelStats::of) {
            run.insert(format!("{engine}_e_tot_drift"), Value::Float(stats.drift));
        }
    }
    if let Some(f) = &runs.fock {
        run.insert("fock_truncated_weight".into(), Value::Float(f.truncated_weight));
        run.insert("fock_norm_drift".into(), Value::Float(f.norm_drift));
    }

    let mut tol = Table::new();
    for (k, v) in [
        ("occupation", config.tolerances.occupation),
        ("entropy", config.tolerances.entropy),
        ("energy_drift", config.tolerances.energy_drift),
        ("degenerate_discriminant", twomode_core::model::TOL_DEGENERATE),
        ("symplectic", twomode_core::modes::SYMPLECTIC_TOL),
        ("eps_nu", gaussian::EPS_NU),
        ("eps_lambda", fock::EPS_LAMBDA),
        ("density", fock::DENSITY_TOL),
        ("truncation_warning", fock::TRUNCATION_WARN),
    ] {
        tol.insert(k.into(), Value::Float(v));
    }

    let mut doc = Table::new();
    doc.insert("config".into(), Value::Table(config.to_table()));
    doc.insert("run".into(), Value::Table(run));
    doc.insert("tolerances".into(), Value::Table(tol));
    toml::to_string(&doc).expect("manifest serializes")
}

/// Recover the [`RunConfig`] echoed in a manifest.
pub fn parse_manifest_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
    match doc.get("config") {
        Some(Value::Table(t)) => config::from_table(t),
        _ => Err(ConfigError::Parse("manifest has no [config] table".into())),
    }
}

/// Normal-mode data and modal coefficients for one setup.
#[derive(Debug, Clone, PartialEq)]
pub struct ModesReport {
    pub modes: StableModes,
    pub coeffs: ModalCoefficients,
}

pub fn report_modes(params: &ModelParams, init: &InitialConditions) -> Result<ModesReport, CliError> {
    let modes = solve_secular(params)?.into_stable()?;
    let coeffs = project_initial(&modes, init)?;
    Ok(ModesReport { modes, coeffs })
}

impl fmt::Display for ModesReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>4} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "mode", "Omega^2", "Omega", "X_j", "Y_j", "A_j", "B_j"
        )?;
        for j in 0..2 {
            let [x, y] = self.modes.eigvec[j];
            writeln!(
                f,
                "{:>4} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
                j + 1,
                self.modes.omega_sq[j],
                self.modes.omega[j],
                x,
                y,
                self.coeffs.a[j],
                self.coeffs.b[j]
            )?;
        }
        write!(f, "det V = {:.6}", self.modes.det_v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub channel: Channel,
    pub max: f64,
    pub rms: f64,
    pub tolerance: f64,
}

impl Deviation {
    pub fn passed(&self) -> bool {
        self.max <= self.tolerance
    }
}

fn deviation(
    a: &ObservableSeries,
    b: &ObservableSeries,
    channel: Channel,
    tolerance: f64,
) -> Result<Deviation, CliError> {
    let (a, b) = (a.require(channel)?, b.require(channel)?);
    let (mut max, mut sq) = (0.0f64, 0.0);
    for (x, y) in a.iter().zip(b) {
        let d = (x - y).abs();
        max = max.max(d);
        sq += d * d;
    }
    Ok(Deviation {
        channel,
        max,
        rms: (sq / a.len() as f64).sqrt(),
        tolerance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossvalReport {
    pub deviations: Vec<Deviation>,
    pub gaussian_energy_drift: f64,
    pub fock_energy_drift: f64,
    pub energy_tolerance: f64,
    pub d_drift: f64,
    pub q_drift: f64,
    pub warnings: Vec<String>,
}

impl CrossvalReport {
    pub fn energy_passed(&self) -> bool {
        self.gaussian_energy_drift <= self.energy_tolerance && self.fock_energy_drift <= self.energy_tolerance
    }

    pub fn passed(&self) -> bool {
        self.energy_passed() && self.deviations.iter().all(Deviation::passed)
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl fmt::Display for CrossvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<8} {:>12} {:>12} {:>12}  result",
            "channel", "max", "rms", "tolerance"
        )?;
        for d in &self.deviations {
            writeln!(
                f,
                "{:<8} {:>12.4e} {:>12.4e} {:>12.4e}  {}",
                d.channel.as_str(),
                d.max,
                d.rms,
                d.tolerance,
                verdict(d.passed())
            )?;
        }
        writeln!(
            f,
            "e_tot drift: gaussian {:.4e}, fock {:.4e} (tolerance {:.4e})  {}",
            self.gaussian_energy_drift,
            self.fock_energy_drift,
            self.energy_tolerance,
            verdict(self.energy_passed())
        )?;
        writeln!(f, "fock drift: d {:.4e}, q {:.4e}", self.d_drift, self.q_drift)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        write!(f, "overall: {}", verdict(self.passed()))
    }
}

/// Run both engines on the config's grid and compare them.
pub fn crossval(config: &RunConfig) -> Result<CrossvalReport, CliError> {
    if config.engine != Engine::Both {
        return Err(ConfigError::Validation("crossval needs engine = \"both\"".into()).into());
    }
    let runs = execute(config)?;
    let g = runs.gaussian.as_ref().expect("both engines ran");
    let f = runs.fock.as_ref().expect("both engines ran");
    let tol = &config.tolerances;
    let deviations = vec![
        deviation(g, &f.series, Channel::NX, tol.occupation)?,
        deviation(g, &f.series, Channel::NY, tol.occupation)?,
        deviation(g, &f.series, Channel::SX, tol.entropy)?,
        deviation(g, &f.series, Channel::SY, tol.entropy)?,
    ];
    let drift = |s: &ObservableSeries, c| s.require(c).map(|v| ChannelStats::of(v).map_or(0.0, |st| st.drift));
    Ok(CrossvalReport {
        deviations,
        gaussian_energy_drift: drift(g, Channel::ETot)?,
        fock_energy_drift: drift(&f.series, Channel::ETot)?,
        energy_tolerance: tol.energy_drift,
        d_drift: drift(&f.series, Channel::D)?,
        q_drift: drift(&f.series, Channel::Q)?,
        warnings: runs.warnings(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub stats: ChannelStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary(pub Vec<SummaryRow>);

impl Summary {
    pub fn get(&self, name: &str) -> Option<&ChannelStats> {
        self.0.iter().find(|r| r.name == name).map(|r| &r.stats)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<16} {:>14} {:>14}", "quantity", "mean", "amplitude")?;
        for row in &self.0 {
            write!(
                f,
                "\n{:<16} {:>14.6} {:>14.6}",
                row.name, row.stats.mean, row.stats.amplitude
            )?;
        }
        Ok(())
    }
}

pub fn summarize(series: &ObservableSeries) -> Summary {
    Summary(
        series
            .channels()
            .filter_map(|(c, v)| {
                ChannelStats::of(v).map(|stats| SummaryRow {
                    name: c.to_string(),
                    stats,
                })
            })
            .collect(),
    )
}

pub fn summarize_csv(path: &Path) -> Result<Summary, CliError> {
    let file = File::open(path).map_err(CliError::at(path))?;
    let table = output::read_csv(file)?;
    Ok(Summary(
        table
            .names
            .into_iter()
            .zip(&table.columns)
            .filter_map(|(name, col)| ChannelStats::of(col).map(|stats| SummaryRow { name, stats }))
            .collect(),
    ))
}

/// `x, a, b` samples of the metric profiles on a uniform grid.
pub fn envelope_csv<W: io::Write>(
    writer: W,
    profile: &MetricProfile,
    x_min: f64,
    x_max: f64,
    samples: usize,
) -> Result<(), CliError> {
    if !(x_max > x_min) || samples < 2 {
        return Err(ConfigError::Validation("need x_max > x_min and at least 2 samples".into()).into());
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x", "a", "b"])?;
    for i in 0..samples {
        let x = if i + 1 == samples {
            x_max
        } else {
            x_min + (x_max - x_min) * i as f64 / (samples - 1) as f64
        };
        let (a, b) = metric_profiles(profile, x)?;
        w.write_record([x, a, b].map(output::format_value))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use twomode_core::TimeGrid;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(ConfigError::Parse("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(twomode_core::Error::NotStable).exit_code(), 3);
        assert_eq!(CliError::from(io::Error::other("x")).exit_code(), 4);
    }

    #[test]
    fn summary_of_constant_and_sine() {
        let grid = TimeGrid::new(0.0, std::f64::consts::TAU, 1001).unwrap();
        let mut s = ObservableSeries::new(grid);
        s.insert(Channel::NX, vec![0.25; 1001]).unwrap();
        s.insert(Channel::NY, grid.times().iter().map(|t| t.sin()).collect())
            .unwrap();
        let sum = summarize(&s);
        let nx = sum.get("n_x").unwrap();
        assert_eq!((nx.mean, nx.amplitude), (0.25, 0.0));
        assert!((sum.get("n_y").unwrap().amplitude - 1.0).abs() < 1e-5);
    }

    #[test]
    fn modes_table_layout() {
        let p = ModelParams::new(1.0, 0.8, 0.0).unwrap();
        let r = report_modes(&p, &InitialConditions::classical(0.0, 0.0, 0.0, 0.0)).unwrap();
        let text = r.to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].contains("1.000000") && lines[1].contains("0.000000"));
        assert!(lines[2].contains("0.640000") && lines[2].contains("0.800000"));
        assert_eq!(lines[3], "det V = 1.000000");
        assert_eq!(r.modes.eigvec, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn envelope_samples() {
        let mut buf = Vec::new();
        envelope_csv(&mut buf, &MetricProfile::new(1.0, 0.1).unwrap(), 1.0, 3.0, 3).unwrap();
        let table = output::read_csv(buf.as_slice()).unwrap();
        assert_eq!(table.time, vec![1.0, 2.0, 3.0]);
        assert_eq!(table.columns[0][1], 0.0);
        assert!(envelope_csv(io::sink(), &MetricProfile::new(1.0, 0.1).unwrap(), 0.0, 3.0, 3).is_err());
        assert!(envelope_csv(io::sink(), &MetricProfile::new(1.0, 0.1).unwrap(), 1.0, 3.0, 1).is_err());
    }
}
