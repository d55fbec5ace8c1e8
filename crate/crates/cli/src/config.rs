use std::path::Path;
use std::sync::Arc;

use gl2ind::{FieldCtx, InductionCtx, LocalRingCtx, WeightCtx};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::suites::Suite;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("config error at {location}: {message}")]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            location: location.into(),
            message: message.into(),
        }
    }
}

/// A resolved run configuration. Field elements of `K` are coordinate lists
/// over the prime field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub p: u32,
    pub f: u32,
    pub e: u32,
    /// `c_0, …, c_{e-1}` of the Eisenstein polynomial; `None` means `x^e - p`.
    pub eisenstein: Option<Vec<i64>>,
    pub r: Vec<u32>,
    pub chi: u32,
    pub nu: Vec<i64>,
    pub m: u32,
    pub precision: u32,
    pub trunc: usize,
    pub suites: Vec<Suite>,
    /// Where the report goes; not echoed, so the same run written to two
    /// places yields identical bytes.
    #[serde(skip)]
    pub out: Option<String>,
    pub seed: u64,
}

/// What a config file may set; everything is optional so that files can
/// override presets.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub p: Option<u32>,
    pub f: Option<u32>,
    pub e: Option<u32>,
    pub eisenstein: Option<Vec<i64>>,
    pub r: Option<Vec<u32>>,
    pub chi: Option<u32>,
    pub nu: Option<Vec<i64>>,
    pub m: Option<u32>,
    pub precision: Option<u32>,
    pub trunc: Option<usize>,
    pub suites: Option<Vec<Suite>>,
    pub out: Option<String>,
    pub seed: Option<u64>,
}

pub const PRESETS: &[&str] = &[
    "ramified-dim-gt1",
    "ramified-dim1",
    "unramified-generic",
    "unramified-maximal",
    "qp-control",
];

pub fn preset(name: &str) -> Result<PartialConfig, ConfigError> {
    let (p, f, e, r) = match name {
        "ramified-dim-gt1" => (3, 1, 2, vec![1]),
        "ramified-dim1" => (3, 1, 2, vec![0]),
        "unramified-generic" => (3, 2, 1, vec![0, 0]),
        "unramified-maximal" => (2, 2, 1, vec![1, 1]),
        "qp-control" => (3, 1, 1, vec![0]),
        _ => {
            return Err(ConfigError::new(
                "--preset",
                format!("unknown preset `{name}` (expected one of {})", PRESETS.join(", ")),
            ))
        }
    };
    Ok(PartialConfig {
        p: Some(p),
        f: Some(f),
        e: Some(e),
        r: Some(r),
        ..PartialConfig::default()
    })
}

impl PartialConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|err| {
            let location = match err.span() {
                Some(span) => {
                    let line = text[..span.start].matches('\n').count() + 1;
                    let col = span.start - text[..span.start].rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!("line {line}, column {col}")
                }
                None => "config".into(),
            };
            ConfigError::new(location, err.message())
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|err| ConfigError::new(path.display().to_string(), err.to_string()))?;
        Self::parse(&text).map_err(|err| ConfigError::new(format!("{}: {}", path.display(), err.location), err.message))
    }

    /// `other` wins wherever it sets a field.
    pub fn overlay(self, other: PartialConfig) -> PartialConfig {
        PartialConfig {
            p: other.p.or(self.p),
            f: other.f.or(self.f),
            e: other.e.or(self.e),
            eisenstein: other.eisenstein.or(self.eisenstein),
            r: other.r.or(self.r),
            chi: other.chi.or(self.chi),
            nu: other.nu.or(self.nu),
            m: other.m.or(self.m),
            precision: other.precision.or(self.precision),
            trunc: other.trunc.or(self.trunc),
            suites: other.suites.or(self.suites),
            out: other.out.or(self.out),
            seed: other.seed.or(self.seed),
        }
    }

    pub fn resolve(self) -> Result<Config, ConfigError> {
        let p = self.p.ok_or_else(|| ConfigError::new("p", "missing"))?;
        let f = self.f.unwrap_or(1);
        let e = self.e.unwrap_or(1);
        let r = self.r.ok_or_else(|| ConfigError::new("r", "missing"))?;
        let trunc = self.trunc.unwrap_or(3);
        let m = self.m.unwrap_or(1);
        let nu = self.nu.unwrap_or_else(|| {
            let mut v = vec![0; (f * m).max(1) as usize];
            v[0] = 1;
            v
        });
        let config = Config {
            p,
            f,
            e,
            eisenstein: self.eisenstein,
            r,
            chi: self.chi.unwrap_or(0),
            nu,
            m,
            precision: self.precision.unwrap_or((2 * trunc as u32 + 1).max(5)),
            trunc,
            suites: self.suites.unwrap_or_else(|| Suite::ALL.to_vec()),
            out: self.out,
            seed: self.seed.unwrap_or(0),
        };
        config.build()?;
        Ok(config)
    }
}

impl Config {
    /// Builds the algebraic contexts, re-validating every field.
    pub fn build(&self) -> Result<Arc<InductionCtx>, ConfigError> {
        if self.e == 0 {
            return Err(ConfigError::new("e", "ramification index must be at least 1"));
        }
        if self.f == 0 {
            return Err(ConfigError::new("f", "residue degree must be at least 1"));
        }
        if self.m == 0 {
            return Err(ConfigError::new("m", "coefficient extension degree must be at least 1"));
        }
        if self.precision == 0 {
            return Err(ConfigError::new("precision", "must be at least 1"));
        }
        let fields = Arc::new(FieldCtx::new(self.p, self.f, self.m).map_err(|err| {
            let key = match err {
                gl2ind::GfError::NotPrime(_) => "p",
                _ => "f",
            };
            ConfigError::new(key, err.to_string())
        })?);
        let nu = fields
            .k()
            .from_coords(&self.nu)
            .map_err(|err| ConfigError::new("nu", err.to_string()))?;
        let weight = WeightCtx::new(fields.clone(), self.r.clone(), self.chi, nu).map_err(|err| {
            let key = match err {
                gl2ind::WeightError::ChiOutOfRange(_) => "chi",
                gl2ind::WeightError::NuZero => "nu",
                _ => "r",
            };
            ConfigError::new(key, err.to_string())
        })?;
        let ring = match &self.eisenstein {
            Some(c) => {
                if c.len() != self.e as usize {
                    return Err(ConfigError::new(
                        "eisenstein",
                        format!("expected {} coefficients, got {}", self.e, c.len()),
                    ));
                }
                LocalRingCtx::with_eisenstein(fields.fq().clone(), c, self.precision)
            }
            None => LocalRingCtx::new(fields.fq().clone(), self.e, self.precision),
        }
        .map_err(|err| {
            let key = match err {
                gl2ind::LocalRingError::NotEisenstein(_) => "eisenstein",
                gl2ind::LocalRingError::ZeroRamification => "e",
                _ => "precision",
            };
            ConfigError::new(key, err.to_string())
        })?;
        InductionCtx::new(Arc::new(weight), Arc::new(ring))
            .map(Arc::new)
            .map_err(|err| ConfigError::new("precision", err.to_string()))
    }
}
