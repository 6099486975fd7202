//! TLS-assisted transitions.
//!
//! The TLS enters only as a spectator energy: the composite level
//! `|k_f, n_f> (x) |1>_TLS` sits at `E(|k_f, n_f>) + omega_tls`. No qubit-TLS
//! coupling strength is modeled.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{critical_photon_number, dressed_energy, LadderModel};
use crate::resonance::{scan_sign_changes, Crossing};

/// Process `|k_i, n> (x) |0> -> |k_f, n - photons_lost> (x) |1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TlsSpec {
    pub omega_tls: f64,
    #[serde(default)]
    pub k_i: usize,
    #[serde(default = "default_k_f")]
    pub k_f: usize,
    /// Photons absorbed from the resonator; one more than the qubit gains,
    /// the surplus quantum going to the TLS.
    #[serde(default = "default_photons_lost")]
    pub photons_lost: usize,
}

fn default_k_f() -> usize {
    2
}

fn default_photons_lost() -> usize {
    3
}

impl TlsSpec {
    /// Default process |0,n>|0> -> |2,n-3>|1>.
    pub fn new(omega_tls: f64) -> Self {
        Self {
            omega_tls,
            k_i: 0,
            k_f: default_k_f(),
            photons_lost: default_photons_lost(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_tls.is_finite() && self.omega_tls > 0.0) {
            return Err(crate::error::invalid(
                "omega_tls",
                "must be finite and positive",
            ));
        }
        if self.k_f <= self.k_i {
            return Err(crate::error::invalid("k_f", "must exceed k_i"));
        }
        if self.photons_lost != self.k_f - self.k_i + 1 {
            return Err(crate::error::invalid(
                "photons_lost",
                "must equal k_f - k_i + 1 (the TLS takes one quantum)",
            ));
        }
        Ok(())
    }

    pub fn min_photons(&self) -> usize {
        self.photons_lost
    }
}

/// Condition estimate omega_r + 2|Delta| + |eta| for the default process.
/// The exact crossing lies a little higher because the dressed levels repel.
pub fn tls_resonance_condition(model: &LadderModel) -> f64 {
    model.params().omega_r + 2.0 * model.detuning().abs() + model.spec().eta.abs()
}

/// E(|k_i, n>) - E(|k_f, n - photons_lost>): the TLS frequency that would
/// make the composite levels degenerate at photon number `n`.
pub fn crossing_frequency(model: &LadderModel, tls: &TlsSpec, n: usize) -> Result<f64> {
    let n_f = n
        .checked_sub(tls.photons_lost)
        .ok_or(Error::IndexOutOfRange {
            index: n,
            max: tls.photons_lost,
        })?;
    Ok(dressed_energy(model, tls.k_i, n)? - dressed_energy(model, tls.k_f, n_f)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TlsRow {
    pub n: usize,
    pub e_initial: f64,
    pub e_final: f64,
    pub n_over_nc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TlsDiagram {
    pub rows: Vec<TlsRow>,
    pub crossing: Option<Crossing>,
    pub n_c: f64,
    pub condition_estimate: f64,
}

impl TlsDiagram {
    pub fn crossing_n_over_nc(&self) -> Option<f64> {
        self.crossing.map(|c| c.n_star / self.n_c)
    }
}

/// Composite energies per n and the first crossing by the same bracketing
/// scheme as the resonance finder.
pub fn tls_crossing_diagram(
    model: &LadderModel,
    tls: &TlsSpec,
    n_range: Range<usize>,
) -> Result<TlsDiagram> {
    tls.validate()?;
    let n_c = critical_photon_number(model.params(), model.spec())?;
    let start = n_range.start.max(tls.min_photons());
    let rows = (start..n_range.end.max(start))
        .map(|n| {
            Ok(TlsRow {
                n,
                e_initial: dressed_energy(model, tls.k_i, n)?,
                e_final: dressed_energy(model, tls.k_f, n - tls.photons_lost)? + tls.omega_tls,
                n_over_nc: n as f64 / n_c,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatch: Vec<f64> = rows.iter().map(|r| r.e_final - r.e_initial).collect();
    Ok(TlsDiagram {
        crossing: scan_sign_changes(start, &mismatch).into_iter().next(),
        rows,
        n_c,
        condition_estimate: tls_resonance_condition(model),
    })
}

/// c_l^{(0,n)}.
pub fn bare_amplitude(model: &LadderModel, n: usize, l: usize) -> Result<f64> {
    let strip = model.strip(n)?;
    if l >= strip.dim() {
        return Err(Error::IndexOutOfRange {
            index: l,
            max: strip.dim() - 1,
        });
    }
    Ok(strip.coeff(0, l))
}
