//! Crossings between the initial dressed level and a final level in another
//! strip, and sweeps of those crossings over the qubit frequency.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::Serialize;

use crate::coupling::{geff_coherent, CouplingResult, StripOffset, TransitionSpec};
use crate::error::{Error, Result};
use crate::ladder::{critical_photon_number, dressed_energy, LadderModel};
use crate::params::DeviceParams;
use crate::transmon::params_from_spectroscopy;
use crate::Execution;

/// More sign changes than this in one scan marks the configuration suspicious.
const MAX_CLEAN_CROSSINGS: usize = 5;

/// A transition as a function of photon number: `|k_i, n> -> |k_f, n + k_i - k_f + m>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TransitionFamily {
    pub k_i: usize,
    pub k_f: usize,
    pub offset: StripOffset,
}

impl TransitionFamily {
    pub fn new(k_i: usize, k_f: usize, offset: StripOffset) -> Self {
        Self { k_i, k_f, offset }
    }

    /// |0,n> -> |6,n-4>.
    pub fn feature_b() -> Self {
        Self::new(0, 6, StripOffset::NextNearest)
    }

    /// |0,n> -> |3,n-2>.
    pub fn feature_a() -> Self {
        Self::new(0, 3, StripOffset::Nearest)
    }

    /// Smallest n for which the final state exists.
    pub fn min_photons(&self) -> usize {
        self.k_f.saturating_sub(self.k_i + self.offset.value())
    }

    pub fn at(&self, n: usize) -> Option<TransitionSpec> {
        let n_f = (self.k_i + n + self.offset.value()).checked_sub(self.k_f)?;
        Some(TransitionSpec::new(self.k_i, n, self.k_f, n_f))
    }
}

impl fmt::Display for TransitionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.offset {
            StripOffset::Nearest => "nn",
            StripOffset::NextNearest => "nnn",
        };
        write!(f, "{kind}-{}-to-{}", self.k_i, self.k_f)
    }
}

impl FromStr for TransitionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config {
            path: "transitions".into(),
            reason: format!(
                "cannot parse transition tag `{s}` (expected nn-<ki>-to-<kf> or nnn-<ki>-to-<kf>)"
            ),
        };
        let (kind, rest) = s.split_once('-').ok_or_else(bad)?;
        let offset = match kind {
            "nn" => StripOffset::Nearest,
            "nnn" => StripOffset::NextNearest,
            _ => return Err(bad()),
        };
        let (ki, kf) = rest.split_once("-to-").ok_or_else(bad)?;
        let k_i = ki.parse().map_err(|_| bad())?;
        let k_f = kf.parse().map_err(|_| bad())?;
        if k_f <= k_i {
            return Err(bad());
        }
        Ok(Self { k_i, k_f, offset })
    }
}

/// (E_final - E_initial) for the family member with `n` photons initially.
pub fn energy_mismatch(model: &LadderModel, family: &TransitionFamily, n: usize) -> Result<f64> {
    let t = family.at(n).ok_or(Error::LabelUnavailable {
        label: family.k_f,
        n_total: family.k_i + n + family.offset.value(),
        dim: (family.k_i + n + family.offset.value()).min(model.k_max()) + 1,
    })?;
    Ok(dressed_energy(model, t.k_f, t.n_f)? - dressed_energy(model, t.k_i, t.n_i)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    /// Linearly interpolated crossing photon number.
    pub n_star: f64,
    /// Bracketing integer with the smaller |mismatch|.
    pub n_res: usize,
    pub mismatch_at_n_res: f64,
    /// Integer bracket [lo, lo + 1] (or [n, n] when the mismatch vanishes exactly).
    pub bracket: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceScan {
    /// Ordered by n.
    pub crossings: Vec<Crossing>,
    pub suspicious: bool,
}

impl ResonanceScan {
    pub fn primary(&self) -> Option<&Crossing> {
        self.crossings.first()
    }
}

/// Sign-change scan of any sampled curve `values[i]` taken at `n = start + i`.
pub(crate) fn scan_sign_changes(start: usize, values: &[f64]) -> Vec<Crossing> {
    let mut out = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let n = start + i;
        if v == 0.0 {
            out.push(Crossing {
                n_star: n as f64,
                n_res: n,
                mismatch_at_n_res: 0.0,
                bracket: (n, n),
            });
            continue;
        }
        let Some(&next) = values.get(i + 1) else {
            break;
        };
        if next != 0.0 && v.signum() != next.signum() {
            let n_star = n as f64 + v / (v - next);
            let (n_res, m) = if v.abs() <= next.abs() {
                (n, v)
            } else {
                (n + 1, next)
            };
            out.push(Crossing {
                n_star,
                n_res,
                mismatch_at_n_res: m,
                bracket: (n, n + 1),
            });
        }
    }
    out
}

/// Scans integer photon numbers in `range` for sign changes of the mismatch.
pub fn find_resonant_photon_number(
    model: &LadderModel,
    family: &TransitionFamily,
    range: Range<usize>,
) -> Result<ResonanceScan> {
    let start = range.start.max(family.min_photons());
    let values = (start..range.end.max(start))
        .map(|n| energy_mismatch(model, family, n))
        .collect::<Result<Vec<_>>>()?;
    let crossings = scan_sign_changes(start, &values);
    Ok(ResonanceScan {
        suspicious: crossings.len() > MAX_CLEAN_CROSSINGS,
        crossings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonancePoint {
    pub omega_10: f64,
    pub delta: f64,
    pub n_star: f64,
    pub n_res: usize,
    pub mismatch_at_n_res: f64,
    pub n_c: f64,
    pub coupling: CouplingResult,
}

/// Primary resonance of `family` in `model` with its coupling at `n_res`.
pub fn resonance_point(
    model: &LadderModel,
    family: &TransitionFamily,
    range: Range<usize>,
) -> Result<Option<ResonancePoint>> {
    let scan = find_resonant_photon_number(model, family, range)?;
    let Some(c) = scan.primary() else {
        return Ok(None);
    };
    let t = family.at(c.n_res).expect("crossing lies above min_photons");
    Ok(Some(ResonancePoint {
        omega_10: model.spec().omega_10,
        delta: model.detuning(),
        n_star: c.n_star,
        n_res: c.n_res,
        mismatch_at_n_res: c.mismatch_at_n_res,
        n_c: critical_photon_number(model.params(), model.spec())?,
        coupling: geff_coherent(model, &t)?,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SweepOutcome {
    Resonance(ResonancePoint),
    NoCrossing,
    /// The grid point could not be evaluated; kept as a gap.
    Gap(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub grid_index: usize,
    pub omega_10: f64,
    pub family: TransitionFamily,
    pub outcome: SweepOutcome,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// omega_r, g, truncation, epsilon; E_C and E_J are refit per grid point.
    pub template: DeviceParams,
    pub eta: f64,
    pub omega_10_grid: Vec<f64>,
    pub families: Vec<TransitionFamily>,
    pub n_range: Range<usize>,
}

/// Evenly spaced grid including both ends.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

fn sweep_point(cfg: &SweepConfig, grid_index: usize, omega_10: f64) -> Vec<SweepEntry> {
    let entry = |family: TransitionFamily, outcome| SweepEntry {
        grid_index,
        omega_10,
        family,
        outcome,
    };
    let model = params_from_spectroscopy(omega_10, cfg.eta, &cfg.template)
        .and_then(|fit| LadderModel::new(&fit.params));
    let model = match model {
        Ok(m) => m,
        Err(e) => {
            return cfg
                .families
                .iter()
                .map(|&f| entry(f, SweepOutcome::Gap(e.to_string())))
                .collect()
        }
    };
    cfg.families
        .iter()
        .map(|&family| {
            let outcome = match resonance_point(&model, &family, cfg.n_range.clone()) {
                Ok(Some(p)) => SweepOutcome::Resonance(p),
                Ok(None) => SweepOutcome::NoCrossing,
                Err(e) => SweepOutcome::Gap(e.to_string()),
            };
            entry(family, outcome)
        })
        .collect()
}

/// One entry per (grid point, family), ordered by grid index then family
/// order. Grid points are independent jobs.
pub fn sweep_qubit_frequency(cfg: &SweepConfig, exec: Execution) -> Vec<SweepEntry> {
    let jobs: Vec<(usize, f64)> = cfg.omega_10_grid.iter().copied().enumerate().collect();
    crate::par_map(jobs, exec, |(i, w)| sweep_point(cfg, i, w))
        .into_iter()
        .flatten()
        .collect()
}
