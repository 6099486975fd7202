//! Device parameters. All energies are ordinary frequencies in GHz (E/h).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const DEFAULT_K_MAX: usize = 9;
pub const DEFAULT_CHARGE_CUTOFF: usize = 30;
pub const MIN_CHARGE_CUTOFF: usize = 15;
pub const MIN_EJ_OVER_EC: f64 = 10.0;

/// Reconstructed device used throughout the tests and the bundled config:
/// g/2pi = 87 MHz, eta/2pi = -200 MHz, omega_r/2pi = 6.9 GHz and a detuning
/// chosen so that the critical photon number is 60.
pub mod reference {
    pub const G: f64 = 0.087;
    pub const ETA: f64 = -0.2;
    pub const OMEGA_R: f64 = 6.9;
    pub const N_CRIT: f64 = 60.0;
    /// Broken-symmetry ratio g_02 / g.
    pub const EPSILON_SYM: f64 = 0.01;

    /// Qubit frequency with |Delta| = 2 g sqrt(n_c), Delta < 0.
    pub fn omega_10() -> f64 {
        OMEGA_R - 2.0 * G * N_CRIT.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Charging energy E_C/h.
    pub e_c: f64,
    /// Josephson energy E_J/h.
    pub e_j: f64,
    /// Offset charge in units of 2e.
    pub n_g: f64,
    /// Bare resonator frequency.
    pub omega_r: f64,
    /// Qubit-resonator coupling g/2pi, normalizing the 0-1 charge element.
    pub g: f64,
    /// Highest retained transmon level.
    pub k_max: usize,
    /// Charge basis spans n = -cutoff ..= cutoff.
    pub charge_cutoff: usize,
    /// Phenomenological g_{0,2}/g.
    pub epsilon_sym: f64,
}

impl DeviceParams {
    pub fn new(e_c: f64, e_j: f64, omega_r: f64, g: f64) -> Self {
        Self {
            e_c,
            e_j,
            n_g: 0.0,
            omega_r,
            g,
            k_max: DEFAULT_K_MAX,
            charge_cutoff: DEFAULT_CHARGE_CUTOFF,
            epsilon_sym: 0.0,
        }
    }

    pub fn with_epsilon(mut self, epsilon_sym: f64) -> Self {
        self.epsilon_sym = epsilon_sym;
        self
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_offset_charge(mut self, n_g: f64) -> Self {
        self.n_g = n_g;
        self
    }

    pub fn with_truncation(mut self, k_max: usize, charge_cutoff: usize) -> Self {
        self.k_max = k_max;
        self.charge_cutoff = charge_cutoff;
        self
    }

    pub fn ej_over_ec(&self) -> f64 {
        self.e_j / self.e_c
    }

    /// Checks the invariants. `g = 0` is accepted so the decoupled limit can
    /// be evaluated directly.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("e_c", self.e_c),
            ("e_j", self.e_j),
            ("n_g", self.n_g),
            ("omega_r", self.omega_r),
            ("g", self.g),
            ("epsilon_sym", self.epsilon_sym),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(invalid(field, format!("must be finite, got {value}")));
            }
        }
        if self.e_c <= 0.0 {
            return Err(invalid("e_c", "must be positive"));
        }
        if self.e_j <= 0.0 {
            return Err(invalid("e_j", "must be positive"));
        }
        if self.ej_over_ec() < MIN_EJ_OVER_EC {
            return Err(invalid(
                "e_j",
                format!(
                    "E_J/E_C = {:.3} is below the transmon regime ({MIN_EJ_OVER_EC})",
                    self.ej_over_ec()
                ),
            ));
        }
        if self.omega_r <= 0.0 {
            return Err(invalid("omega_r", "must be positive"));
        }
        if self.g < 0.0 {
            return Err(invalid("g", "must be non-negative"));
        }
        if self.charge_cutoff < MIN_CHARGE_CUTOFF {
            return Err(invalid(
                "charge_cutoff",
                format!("must be at least {MIN_CHARGE_CUTOFF}"),
            ));
        }
        if self.k_max > self.charge_cutoff {
            return Err(invalid("k_max", "must not exceed charge_cutoff"));
        }
        if self.epsilon_sym < 0.0 {
            return Err(invalid("epsilon_sym", "must be non-negative"));
        }
        Ok(())
    }
}
