//! Run configuration: a sectioned `key = value` file (TOML syntax) with
//! sections domain, beta, nonlinearity, variational, solver and output.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// A number or the literal "auto".
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Auto<T> {
    #[default]
    Auto,
    Value(T),
}

impl<T: Clone> Auto<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Auto::Auto => None,
            Auto::Value(v) => Some(v.clone()),
        }
    }
}

impl<T: Serialize> Serialize for Auto<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Auto::Auto => s.serialize_str("auto"),
            Auto::Value(v) => v.serialize(s),
        }
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Auto<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            Word(String),
            Value(T),
        }
        match Raw::<T>::deserialize(d)? {
            Raw::Word(w) if w == "auto" => Ok(Auto::Auto),
            Raw::Word(w) => Err(de::Error::custom(format!("expected a number or \"auto\", got \"{w}\""))),
            Raw::Value(v) => Ok(Auto::Value(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainName {
    Rectangle,
    Disk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub kind: DomainName,
    /// Side lengths of the rectangle, or the disk radius.
    pub sizes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    /// CSV with header `x1,x2,beta` on a uniform grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_file: Option<PathBuf>,
}

impl Default for BetaSection {
    fn default() -> Self {
        BetaSection { constant: Some(1.0), grid_file: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityName {
    Power,
    Bump,
    TruncatedBump,
    Cubic,
    Tabulated,
}

/// `"none"` or `[b, l]`.
#[derive(Debug, Clone, PartialEq)]
pub enum SubquadraticChoice {
    None,
    Bound([f64; 2]),
}

impl Serialize for SubquadraticChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SubquadraticChoice::None => s.serialize_str("none"),
            SubquadraticChoice::Bound(b) => b.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SubquadraticChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Bound([f64; 2]),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "none" => Ok(SubquadraticChoice::None),
            Raw::Word(w) => Err(de::Error::custom(format!("expected [b, l] or \"none\", got \"{w}\""))),
            Raw::Bound(b) => Ok(SubquadraticChoice::Bound(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySection {
    pub kind: NonlinearityName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cub: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamp: Option<f64>,
    /// CSV with header `t,f`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_file: Option<PathBuf>,
    /// Growth certificate [a1, a2, q] replacing the derived one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subquadratic: Option<SubquadraticChoice>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationalSection {
    pub x0: Auto<Vec<f64>>,
    pub tau: Auto<f64>,
    pub gamma: Auto<f64>,
    pub rho: Auto<f64>,
    pub lambda: Auto<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub modes: usize,
    pub order: usize,
    pub tol_res: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub restarts: usize,
    pub path_nodes: usize,
    pub mp_max_iter: usize,
    pub embedding_modes: usize,
    pub embedding_restarts: usize,
    pub embedding_steps: usize,
    pub c1: Auto<f64>,
    pub cq: Auto<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            modes: 64,
            order: 48,
            tol_res: 1e-8,
            max_iter: 100_000,
            seed: 0,
            restarts: 1,
            path_nodes: 40,
            mp_max_iter: 20_000,
            embedding_modes: 32,
            embedding_restarts: 8,
            embedding_steps: 100,
            c1: Auto::Auto,
            cq: Auto::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Points per axis of the trace grids.
    pub grid: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: PathBuf::from("out"), grid: 201 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSection,
    #[serde(default)]
    pub beta: BetaSection,
    pub nonlinearity: NonlinearitySection,
    #[serde(default)]
    pub variational: VariationalSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub const SECTIONS: [&str; 6] = ["domain", "beta", "nonlinearity", "variational", "solver", "output"];
const REQUIRED: [(&str, &str); 3] = [("domain", "kind"), ("domain", "sizes"), ("nonlinearity", "kind")];

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError(e.message().trim().to_string()))?;
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self, ConfigError> {
        for key in table.keys() {
            if !SECTIONS.contains(&key.as_str()) {
                return Err(ConfigError(format!("unknown section or key `{key}`")));
            }
        }
        for (section, key) in REQUIRED {
            let present = table.get(section).and_then(|s| s.as_table()).is_some_and(|t| t.contains_key(key));
            if !present {
                return Err(ConfigError(format!("missing required key `{section}.{key}`")));
            }
        }
        // name the section in serde's messages
        for section in SECTIONS {
            if let Some(v) = table.get(section) {
                let one: toml::Table = [(section.to_string(), v.clone())].into_iter().collect();
                if let Err(e) = Self::check_section(section, one) {
                    return Err(ConfigError(format!("[{section}]: {e}")));
                }
            }
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn check_section(section: &str, one: toml::Table) -> Result<(), String> {
        let v = toml::Value::Table(one);
        let r = match section {
            "domain" => v.try_into::<Wrap<DomainSection>>().map(|_| ()),
            "beta" => v.try_into::<Wrap<BetaSection>>().map(|_| ()),
            "nonlinearity" => v.try_into::<Wrap<NonlinearitySection>>().map(|_| ()),
            "variational" => v.try_into::<Wrap<VariationalSection>>().map(|_| ()),
            "solver" => v.try_into::<Wrap<SolverSection>>().map(|_| ()),
            _ => v.try_into::<Wrap<OutputSection>>().map(|_| ()),
        };
        r.map_err(|e| e.message().to_string())
    }

    /// The configuration echoed at the top of a report: every table of the
    /// report that belongs to the config grammar.
    pub fn from_report(report: &str) -> Result<Self, ConfigError> {
        let mut table: toml::Table = report.parse().map_err(|e: toml::de::Error| ConfigError(e.message().to_string()))?;
        table.retain(|k, _| SECTIONS.contains(&k));
        Self::from_table(table)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError(m));
        match (self.domain.kind, self.domain.sizes.len()) {
            (DomainName::Disk, 1) | (DomainName::Rectangle, 2) => {}
            (DomainName::Disk, n) => return bad(format!("`domain.sizes` for a disk is [radius], got {n} values")),
            (DomainName::Rectangle, n) => return bad(format!("`domain.sizes` for a rectangle is [a, b], got {n} values")),
        }
        if self.beta.constant.is_some() == self.beta.grid_file.is_some() {
            return bad("[beta] needs exactly one of `constant` and `grid_file`".into());
        }
        let nl = &self.nonlinearity;
        let need = |key: &str, v: Option<f64>| -> Result<(), ConfigError> {
            if v.is_none() {
                return Err(ConfigError(format!("missing required key `nonlinearity.{key}`")));
            }
            Ok(())
        };
        let allowed: &[&str] = match nl.kind {
            NonlinearityName::Power => {
                need("c", nl.c)?;
                need("q", nl.q)?;
                &["c", "q"]
            }
            NonlinearityName::Bump | NonlinearityName::TruncatedBump => {
                need("m", nl.m)?;
                need("zeta", nl.zeta)?;
                &["m", "zeta"]
            }
            NonlinearityName::Cubic => {
                need("lin", nl.lin)?;
                need("cub", nl.cub)?;
                need("clamp", nl.clamp)?;
                &["lin", "cub", "clamp"]
            }
            NonlinearityName::Tabulated => {
                if nl.table_file.is_none() {
                    return bad("missing required key `nonlinearity.table_file`".into());
                }
                &["table_file"]
            }
        };
        let given = [
            ("c", nl.c.is_some()),
            ("q", nl.q.is_some()),
            ("m", nl.m.is_some()),
            ("zeta", nl.zeta.is_some()),
            ("lin", nl.lin.is_some()),
            ("cub", nl.cub.is_some()),
            ("clamp", nl.clamp.is_some()),
            ("table_file", nl.table_file.is_some()),
        ];
        for (key, present) in given {
            if present && !allowed.contains(&key) {
                return bad(format!("`nonlinearity.{key}` does not apply to this kind"));
            }
        }
        let s = &self.solver;
        if s.modes == 0 || s.order < 2 || !(s.tol_res > 0.0) || s.path_nodes < 2 || s.embedding_modes == 0 {
            return bad("[solver] needs modes ≥ 1, order ≥ 2, tol_res > 0, path_nodes ≥ 2, embedding_modes ≥ 1".into());
        }
        if self.output.grid < 2 {
            return bad("`output.grid` must be at least 2".into());
        }
        Ok(())
    }

    /// Files named by the configuration, resolved against `base`.
    pub fn referenced_files(&self, base: &Path) -> Vec<(String, PathBuf)> {
        let mut out = Vec::new();
        if let Some(p) = &self.beta.grid_file {
            out.push(("beta.grid_file".to_string(), base.join(p)));
        }
        if let Some(p) = &self.nonlinearity.table_file {
            out.push(("nonlinearity.table_file".to_string(), base.join(p)));
        }
        out
    }
}

#[derive(Deserialize)]
struct Wrap<T> {
    #[serde(flatten)]
    _inner: std::collections::BTreeMap<String, T>,
}
