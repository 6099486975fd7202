//! Run configuration (TOML). Unknown keys are rejected everywhere.
//!
//! ```toml
//! transitions = ["nnn-0-to-6", "nn-0-to-3"]
//! epsilon_sym = 0.01
//!
//! [device]
//! omega_r = 6.9
//! g = 0.087
//!
//! [device.spectroscopy]
//! omega_10 = 5.5522
//! eta = -0.2
//! ```

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ladder::StarkConvention;
use crate::params::{DeviceParams, DEFAULT_CHARGE_CUTOFF, DEFAULT_K_MAX};
use crate::resonance::{linspace, TransitionFamily};
use crate::tls::TlsSpec;
use crate::transmon::{params_from_spectroscopy, solve_transmon};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    device: Option<RawDevice>,
    #[serde(default)]
    epsilon_sym: f64,
    transitions: Option<Vec<String>>,
    #[serde(default)]
    ranges: RawRanges,
    sweep: Option<RawSweep>,
    #[serde(default)]
    stark: RawStark,
    tls: Option<TlsSpec>,
    #[serde(default)]
    oracle: RawOracle,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDevice {
    omega_r: f64,
    g: f64,
    #[serde(default)]
    n_g: f64,
    #[serde(default = "default_k_max")]
    k_max: usize,
    #[serde(default = "default_cutoff")]
    charge_cutoff: usize,
    transmon: Option<RawTransmon>,
    spectroscopy: Option<RawSpectroscopy>,
}

fn default_k_max() -> usize {
    DEFAULT_K_MAX
}

fn default_cutoff() -> usize {
    DEFAULT_CHARGE_CUTOFF
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransmon {
    e_c: f64,
    e_j: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectroscopy {
    omega_10: f64,
    eta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRanges {
    #[serde(default = "default_n_range")]
    n_range: [usize; 2],
    #[serde(default = "default_n_total_range")]
    n_total_range: [usize; 2],
}

impl Default for RawRanges {
    fn default() -> Self {
        Self {
            n_range: default_n_range(),
            n_total_range: default_n_total_range(),
        }
    }
}

fn default_n_range() -> [usize; 2] {
    [0, 400]
}

fn default_n_total_range() -> [usize; 2] {
    [0, 120]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    start: f64,
    stop: f64,
    count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStark {
    #[serde(default)]
    convention: StarkConvention,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOracle {
    #[serde(default = "default_lambdas")]
    lambdas: Vec<f64>,
}

impl Default for RawOracle {
    fn default() -> Self {
        Self {
            lambdas: default_lambdas(),
        }
    }
}

fn default_lambdas() -> Vec<f64> {
    vec![0.3, 0.1, 0.03]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default = "default_dir")]
    dir: PathBuf,
    #[serde(default = "default_format")]
    format: String,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: default_format(),
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_format() -> String {
    "csv".into()
}

/// How the transmon is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeviceSource {
    Transmon { e_c: f64, e_j: f64 },
    Spectroscopy { omega_10: f64, eta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DeviceSource,
    /// Everything except (E_C, E_J), which come from `source`.
    pub template: DeviceParams,
    pub transitions: Vec<TransitionFamily>,
    pub n_range: RangeInclusive<usize>,
    pub n_total_range: RangeInclusive<usize>,
    pub sweep: Option<SweepGrid>,
    pub stark_convention: StarkConvention,
    pub tls: Option<TlsSpec>,
    pub oracle_lambdas: Vec<f64>,
    pub output_dir: PathBuf,
}

fn cfg_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        reason: reason.into(),
    }
}

fn finite(path: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(cfg_err(path, format!("must be finite, got {x}")))
    }
}

fn range(path: &str, [lo, hi]: [usize; 2]) -> Result<RangeInclusive<usize>> {
    if lo > hi {
        return Err(cfg_err(path, format!("start {lo} exceeds stop {hi}")));
    }
    Ok(lo..=hi)
}

/// Parses and validates a TOML document, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let span = e
            .span()
            .map(|s| format!(" (bytes {}..{})", s.start, s.end))
            .unwrap_or_default();
        cfg_err("<document>", format!("{}{span}", e.message()))
    })?;

    let device = raw
        .device
        .ok_or_else(|| cfg_err("device", "missing required block"))?;
    let source = match (device.transmon, device.spectroscopy) {
        (Some(_), Some(_)) => return Err(cfg_err(
            "device.transmon, device.spectroscopy",
            "conflicting device blocks: give exactly one of device.transmon or device.spectroscopy",
        )),
        (None, None) => {
            return Err(cfg_err(
                "device",
                "missing device.transmon or device.spectroscopy block",
            ))
        }
        (Some(t), None) => DeviceSource::Transmon {
            e_c: finite("device.transmon.e_c", t.e_c)?,
            e_j: finite("device.transmon.e_j", t.e_j)?,
        },
        (None, Some(s)) => DeviceSource::Spectroscopy {
            omega_10: finite("device.spectroscopy.omega_10", s.omega_10)?,
            eta: finite("device.spectroscopy.eta", s.eta)?,
        },
    };

    let omega_r = finite("device.omega_r", device.omega_r)?;
    if omega_r <= 0.0 {
        return Err(cfg_err("device.omega_r", "must be positive"));
    }
    let g = finite("device.g", device.g)?;
    if g < 0.0 {
        return Err(cfg_err("device.g", "must be non-negative"));
    }
    let eps = finite("epsilon_sym", raw.epsilon_sym)?;
    if eps < 0.0 {
        return Err(cfg_err("epsilon_sym", "must be non-negative"));
    }
    let (e_c, e_j) = match source {
        DeviceSource::Transmon { e_c, e_j } => (e_c, e_j),
        // placeholders, replaced by the fit
        DeviceSource::Spectroscopy { .. } => (0.2, 20.0),
    };
    let template = DeviceParams::new(e_c, e_j, omega_r, g)
        .with_offset_charge(finite("device.n_g", device.n_g)?)
        .with_truncation(device.k_max, device.charge_cutoff)
        .with_epsilon(eps);
    template.validate().map_err(|e| match e {
        Error::InvalidParam { field, reason } => {
            let path = match field {
                "e_c" | "e_j" => format!("device.transmon.{field}"),
                "epsilon_sym" => field.to_string(),
                _ => format!("device.{field}"),
            };
            cfg_err(&path, reason)
        }
        other => other,
    })?;

    let transitions = match raw.transitions {
        None => vec![TransitionFamily::feature_b(), TransitionFamily::feature_a()],
        Some(tags) => tags
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.parse().map_err(|e: Error| match e {
                    Error::Config { reason, .. } => cfg_err(&format!("transitions[{i}]"), reason),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    if transitions.is_empty() {
        return Err(cfg_err("transitions", "must not be empty"));
    }

    let sweep = match raw.sweep {
        None => None,
        Some(s) => {
            let start = finite("sweep.start", s.start)?;
            let stop = finite("sweep.stop", s.stop)?;
            if s.count < 1 {
                return Err(cfg_err("sweep.count", "must be at least 1"));
            }
            if start <= 0.0 || stop <= 0.0 {
                return Err(cfg_err("sweep", "qubit frequencies must be positive"));
            }
            Some(SweepGrid {
                start,
                stop,
                count: s.count,
            })
        }
    };

    if let Some(tls) = &raw.tls {
        tls.validate().map_err(|e| match e {
            Error::InvalidParam { field, reason } => cfg_err(&format!("tls.{field}"), reason),
            other => other,
        })?;
    }

    if raw.oracle.lambdas.is_empty() {
        return Err(cfg_err("oracle.lambdas", "must not be empty"));
    }
    for (i, &l) in raw.oracle.lambdas.iter().enumerate() {
        if !(l > 0.0 && l <= 1.0) {
            return Err(cfg_err(
                &format!("oracle.lambdas[{i}]"),
                "must lie in (0, 1]",
            ));
        }
    }

    if raw.output.format != "csv" {
        return Err(cfg_err(
            "output.format",
            format!("unsupported format `{}` (only `csv`)", raw.output.format),
        ));
    }

    Ok(RunConfig {
        source,
        template,
        transitions,
        n_range: range("ranges.n_range", raw.ranges.n_range)?,
        n_total_range: range("ranges.n_total_range", raw.ranges.n_total_range)?,
        sweep,
        stark_convention: raw.stark.convention,
        tls: raw.tls,
        oracle_lambdas: raw.oracle.lambdas,
        output_dir: raw.output.dir,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| cfg_err(&path.display().to_string(), e.to_string()))?;
    parse_config(&text)
}

impl RunConfig {
    /// Device parameters, running the spectroscopy fit when needed.
    pub fn device_params(&self) -> Result<DeviceParams> {
        match self.source {
            DeviceSource::Transmon { .. } => Ok(self.template),
            DeviceSource::Spectroscopy { omega_10, eta } => {
                Ok(params_from_spectroscopy(omega_10, eta, &self.template)?.params)
            }
        }
    }

    /// Anharmonicity held fixed along an omega_10 sweep.
    pub fn sweep_eta(&self) -> Result<f64> {
        match self.source {
            DeviceSource::Spectroscopy { eta, .. } => Ok(eta),
            DeviceSource::Transmon { .. } => Ok(solve_transmon(&self.template)?.eta),
        }
    }
}
