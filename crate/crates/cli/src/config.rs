//! Flat `key = value` run configuration.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;
use toml::{Table, Value};
use twomode_core::{Channel, Complex64, InitialConditions, ModelParams, TimeGrid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
}

pub const KEYS: [&str; 19] = [
    "omega_x",
    "omega_y",
    "g",
    "alpha",
    "alpha_im",
    "x0",
    "px0",
    "y0",
    "py0",
    "engine",
    "t_start",
    "t_end",
    "n_t",
    "n_cut",
    "output_dir",
    "emit",
    "tol_occupation",
    "tol_entropy",
    "tol_energy_drift",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    Gaussian,
    Fock,
    #[default]
    Both,
}

impl Engine {
    pub fn runs_gaussian(&self) -> bool {
        matches!(self, Engine::Gaussian | Engine::Both)
    }

    pub fn runs_fock(&self) -> bool {
        matches!(self, Engine::Fock | Engine::Both)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Gaussian => "gaussian",
            Engine::Fock => "fock",
            Engine::Both => "both",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "gaussian" => Ok(Engine::Gaussian),
            "fock" => Ok(Engine::Fock),
            "both" => Ok(Engine::Both),
            other => Err(ConfigError::Validation(format!(
                "engine must be gaussian, fock or both, got `{other}`"
            ))),
        }
    }
}

/// Which outputs to write. An empty channel set means every channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emit {
    pub channels: BTreeSet<Channel>,
    pub heatmap: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self {
            channels: Channel::ALL.into_iter().collect(),
            heatmap: true,
        }
    }
}

impl Emit {
    pub fn wants(&self, channel: Channel) -> bool {
        self.channels.contains(&channel)
    }

    fn is_all(&self) -> bool {
        *self == Emit::default()
    }
}

impl FromStr for Emit {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let mut emit = Emit {
            channels: BTreeSet::new(),
            heatmap: false,
        };
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token {
                "all" => return Ok(Emit::default()),
                "heatmap" => emit.heatmap = true,
                name => {
                    let channel = name
                        .parse::<Channel>()
                        .map_err(|_| ConfigError::Validation(format!("unknown emit entry `{name}`")))?;
                    emit.channels.insert(channel);
                }
            }
        }
        if emit.channels.is_empty() && !emit.heatmap {
            return Err(ConfigError::Validation("emit selects nothing".into()));
        }
        Ok(emit)
    }
}

impl fmt::Display for Emit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all() {
            return f.write_str("all");
        }
        let mut parts: Vec<&str> = self.channels.iter().map(|c| c.as_str()).collect();
        if self.heatmap {
            parts.push("heatmap");
        }
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub occupation: f64,
    pub entropy: f64,
    pub energy_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            occupation: 1e-3,
            entropy: 1e-3,
            energy_drift: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub init: InitialConditions,
    pub engine: Engine,
    pub t_start: f64,
    pub t_end: f64,
    pub n_t: usize,
    pub n_cut: usize,
    pub output_dir: Option<PathBuf>,
    pub emit: Emit,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.t_start, self.t_end, self.n_t).expect("validated at parse time")
    }

    /// Flat document that [`parse_config`] maps back to `self`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new();
        t.insert("omega_x".into(), Value::Float(self.params.omega_x()));
        t.insert("omega_y".into(), Value::Float(self.params.omega_y()));
        t.insert("g".into(), Value::Float(self.params.g()));
        match self.init {
            InitialConditions::Coherent { alpha } => {
                t.insert("alpha".into(), Value::Float(alpha.re));
                t.insert("alpha_im".into(), Value::Float(alpha.im));
            }
            InitialConditions::Classical { x0, px0, y0, py0 } => {
                for (k, v) in [("x0", x0), ("px0", px0), ("y0", y0), ("py0", py0)] {
                    t.insert(k.into(), Value::Float(v));
                }
            }
        }
        t.insert("engine".into(), Value::String(self.engine.to_string()));
        t.insert("t_start".into(), Value::Float(self.t_start));
        t.insert("t_end".into(), Value::Float(self.t_end));
        t.insert("n_t".into(), Value::Integer(self.n_t as i64));
        t.insert("n_cut".into(), Value::Integer(self.n_cut as i64));
        if let Some(dir) = &self.output_dir {
            t.insert("output_dir".into(), Value::String(dir.display().to_string()));
        }
        t.insert("emit".into(), Value::String(self.emit.to_string()));
        t.insert("tol_occupation".into(), Value::Float(self.tolerances.occupation));
        t.insert("tol_entropy".into(), Value::Float(self.tolerances.entropy));
        t.insert("tol_energy_drift".into(), Value::Float(self.tolerances.energy_drift));
        t
    }

    pub fn to_text(&self) -> String {
        toml::to_string(&self.to_table()).expect("flat table serializes")
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
    from_table(&table)
}

pub fn from_table(table: &Table) -> Result<RunConfig, ConfigError> {
    for (key, value) in table {
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key.clone()));
        }
        if matches!(value, Value::Table(_) | Value::Array(_)) {
            return Err(ConfigError::Parse(format!("`{key}` must be a scalar")));
        }
    }
    let r = Reader(table);

    let omega_x = r.required_float("omega_x")?;
    let omega_y = r.required_float("omega_y")?;
    let g = r.required_float("g")?;
    let params = ModelParams::new(omega_x, omega_y, g).map_err(|e| ConfigError::Validation(e.to_string()))?;

    let classical = ["x0", "px0", "y0", "py0"].iter().any(|k| table.contains_key(*k));
    let coherent = ["alpha", "alpha_im"].iter().any(|k| table.contains_key(*k));
    let init = if classical {
        if coherent {
            return Err(ConfigError::Validation(
                "give either alpha/alpha_im or x0/px0/y0/py0, not both".into(),
            ));
        }
        InitialConditions::classical(
            r.float("x0")?.unwrap_or(0.0),
            r.float("px0")?.unwrap_or(0.0),
            r.float("y0")?.unwrap_or(0.0),
            r.float("py0")?.unwrap_or(0.0),
        )
    } else {
        InitialConditions::coherent(Complex64::new(
            r.float("alpha")?.unwrap_or(1.0),
            r.float("alpha_im")?.unwrap_or(0.0),
        ))
    };
    if init.phase_space().iter().any(|v| !v.is_finite()) {
        return Err(ConfigError::Validation("initial data must be finite".into()));
    }

    let engine = match r.string("engine")? {
        Some(s) => s.parse()?,
        None => Engine::default(),
    };
    let t_start = r.float("t_start")?.unwrap_or(0.0);
    let t_end = r.float("t_end")?.unwrap_or(50.0);
    let n_t = r.count("n_t")?.unwrap_or(801);
    let n_cut = r.count("n_cut")?.unwrap_or(8);
    TimeGrid::new(t_start, t_end, n_t).map_err(|e| ConfigError::Validation(e.to_string()))?;
    if engine.runs_fock() {
        if n_cut < 2 {
            return Err(ConfigError::Validation(format!(
                "n_cut must be at least 2, got {n_cut}"
            )));
        }
        init.alpha().map_err(|e| ConfigError::Validation(e.to_string()))?;
    }

    let emit = match r.string("emit")? {
        Some(s) => s.parse()?,
        None => Emit::default(),
    };

    let defaults = Tolerances::default();
    let tolerances = Tolerances {
        occupation: r.float("tol_occupation")?.unwrap_or(defaults.occupation),
        entropy: r.float("tol_entropy")?.unwrap_or(defaults.entropy),
        energy_drift: r.float("tol_energy_drift")?.unwrap_or(defaults.energy_drift),
    };
    for (name, v) in [
        ("tol_occupation", tolerances.occupation),
        ("tol_entropy", tolerances.entropy),
        ("tol_energy_drift", tolerances.energy_drift),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(ConfigError::Validation(format!("{name} must be positive")));
        }
    }

    Ok(RunConfig {
        params,
        init,
        engine,
        t_start,
        t_end,
        n_t,
        n_cut,
        output_dir: r.string("output_dir")?.map(PathBuf::from),
        emit,
        tolerances,
    })
}

struct Reader<'a>(&'a Table);

impl Reader<'_> {
    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(ConfigError::Parse(format!(
                "`{key}` must be a number, got {}",
                other.type_str()
            ))),
        }
    }

    fn required_float(&self, key: &str) -> Result<f64, ConfigError> {
        self.float(key)?
            .ok_or_else(|| ConfigError::Validation(format!("missing required key `{key}`")))
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) => usize::try_from(*v)
                .map(Some)
                .map_err(|_| ConfigError::Validation(format!("`{key}` must be non-negative"))),
            Some(other) => Err(ConfigError::Parse(format!(
                "`{key}` must be an integer, got {}",
                other.type_str()
            ))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(ConfigError::Parse(format!(
                "`{key}` must be a string, got {}",
                other.type_str()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("omega_x = 1.0\nomega_y = 0.8\ng = 0.1\nalpha = 1.0\n").unwrap();
        assert_eq!((c.t_start, c.t_end, c.n_t, c.n_cut), (0.0, 50.0, 801, 8));
        assert_eq!(c.engine, Engine::Both);
        assert_eq!(c.init, InitialConditions::coherent_real(1.0));
        assert_eq!(c.emit, Emit::default());
        assert_eq!(c.output_dir, None);
    }

    #[test]
    fn error_kinds() {
        let base = "omega_x = 1.0\nomega_y = 0.8\ng = 0.1\n";
        assert!(matches!(
            parse_config(&format!("{base}n_t = 1\n")),
            Err(ConfigError::Validation(_))
        ));
        assert!(matches!(
            parse_config("omega_x = \"abc\"\nomega_y = 0.8\ng = 0.1\n"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(parse_config("omega_x = = 1"), Err(ConfigError::Parse(_))));
        assert_eq!(
            parse_config(&format!("{base}colour = 1\n")),
            Err(ConfigError::UnknownKey("colour".into()))
        );
        assert!(matches!(
            parse_config(&format!("{base}t_end = 0.0\n")),
            Err(ConfigError::Validation(_))
        ));
        assert!(matches!(
            parse_config(&format!("{base}[nested]\nx = 1\n")),
            Err(ConfigError::UnknownKey(_)) | Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            parse_config("omega_x = -1.0\nomega_y = 0.8\ng = 0.1\n"),
            Err(ConfigError::Validation(_))
        ));
        assert!(matches!(
            parse_config(&format!("{base}n_cut = 1\n")),
            Err(ConfigError::Validation(_))
        ));
        // a Gaussian-only run does not care about the cutoff
        assert!(parse_config(&format!("{base}n_cut = 1\nengine = \"gaussian\"\n")).is_ok());
        assert!(matches!(
            parse_config(&format!("{base}alpha = 1.0\nx0 = 1.0\n")),
            Err(ConfigError::Validation(_))
        ));
        assert!(matches!(
            parse_config(&format!("{base}y0 = 1.0\n")),
            Err(ConfigError::Validation(_))
        ));
    }

    #[test]
    fn comments_and_classical_start() {
        let c = parse_config(
            "# comment\nomega_x = 1.0\nomega_y = 0.8\ng = 0.15\nx0 = 1.4142135623730951 # trailing\npx0 = 0.5\nengine = \"gaussian\"\n",
        )
        .unwrap();
        assert_eq!(
            c.init,
            InitialConditions::classical(std::f64::consts::SQRT_2, 0.5, 0.0, 0.0)
        );
        assert_eq!(c.engine, Engine::Gaussian);
    }

    #[test]
    fn emit_selection() {
        let e: Emit = "n_x, s_x,heatmap".parse().unwrap();
        assert!(e.wants(Channel::NX) && e.wants(Channel::SX) && !e.wants(Channel::NY));
        assert!(e.heatmap);
        assert_eq!(e.to_string(), "n_x,s_x,heatmap");
        assert_eq!("all".parse::<Emit>().unwrap(), Emit::default());
        assert!("bogus".parse::<Emit>().is_err());
        assert!("".parse::<Emit>().is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "omega_x = 1.0\nomega_y = 0.8\ng = 0.1\nalpha = 0.3\nalpha_im = -0.2\nengine = \"fock\"\n\
                    n_t = 11\nt_end = 2.5\nemit = \"n_y,heatmap\"\noutput_dir = \"runs/a\"\ntol_entropy = 0.01\n";
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }
}
