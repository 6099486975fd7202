//! RWA strips of the Jaynes-Cummings ladder.
//!
//! Strip `N` holds the bare states `|k, N - k>` for `k = 0..=min(N, k_max)`.
//! Within it `H_b + H_RWA` is tridiagonal with diagonal `E_k + (N - k) omega_r`
//! and off-diagonal `g_{k,k+1} sqrt(N - k)`.
//!
//! Dressed labels follow adiabatic continuation from `g = 0`: the strip
//! matrix is irreducible for `g > 0`, so its eigenvalues never cross as the
//! coupling is switched on and the dressed state `|k, N - k>` is the
//! eigenvector whose energy rank matches the rank of the bare diagonal entry.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, RwLock};

use nalgebra::DMatrix;

use crate::eigen::{tridiagonal_eigen, tridiagonal_residual};
use crate::error::{Error, Result};
use crate::params::DeviceParams;
use crate::transmon::{normalized_charge_coupling, solve_transmon, TransmonSpectrum};
use crate::Execution;

/// Two overlaps closer than this (squared magnitude) make a strip "strongly mixed".
const AMBIGUITY: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct StripEigensystem {
    pub n_total: usize,
    /// Dressed energies indexed by label k.
    pub energies: Vec<f64>,
    /// Row k, column l: c_l^{(k, N-k)}.
    pub coeffs: DMatrix<f64>,
    /// |c_k^{(k)}|^2 per label.
    pub assignment_quality: Vec<f64>,
    /// Some label's own bare component no longer dominates its row.
    pub strongly_mixed: bool,
    pub bare_diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    /// Max-norm eigen-residual of the solve.
    pub residual: f64,
}

impl StripEigensystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn coeff(&self, label: usize, bare: usize) -> f64 {
        self.coeffs[(label, bare)]
    }

    /// Smallest separation between dressed energies.
    pub fn min_gap(&self) -> f64 {
        let mut sorted = self.energies.clone();
        sorted.sort_by(f64::total_cmp);
        sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Infinity norm of the strip Hamiltonian (max absolute row sum).
    pub fn hamiltonian_norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.bare_diagonal[i].abs();
                if i > 0 {
                    s += self.off_diagonal[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off_diagonal[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    fn check_label(&self, label: usize) -> Result<()> {
        if label >= self.dim() {
            Err(Error::LabelUnavailable {
                label,
                n_total: self.n_total,
                dim: self.dim(),
            })
        } else {
            Ok(())
        }
    }
}

/// Transmon plus resonator, with lazily solved strips.
#[derive(Debug)]
pub struct LadderModel {
    spec: TransmonSpectrum,
    /// g_{k,k+1}, cached from the spectrum.
    chain: Vec<f64>,
    strips: RwLock<HashMap<usize, Arc<StripEigensystem>>>,
}

impl Clone for LadderModel {
    fn clone(&self) -> Self {
        Self::from_spectrum(self.spec.clone())
    }
}

impl LadderModel {
    pub fn new(params: &DeviceParams) -> Result<Self> {
        Ok(Self::from_spectrum(solve_transmon(params)?))
    }

    pub fn from_spectrum(spec: TransmonSpectrum) -> Self {
        let chain = (0..spec.k_max())
            .map(|k| normalized_charge_coupling(&spec, k, k + 1).unwrap_or(0.0))
            .collect();
        Self {
            spec,
            chain,
            strips: RwLock::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &TransmonSpectrum {
        &self.spec
    }

    pub fn params(&self) -> &DeviceParams {
        &self.spec.params_used
    }

    pub fn k_max(&self) -> usize {
        self.spec.k_max()
    }

    /// Delta = omega_10 - omega_r.
    pub fn detuning(&self) -> f64 {
        self.spec.omega_10 - self.params().omega_r
    }

    pub fn cached_strips(&self) -> usize {
        self.strips.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn clear_cache(&self) {
        if let Ok(mut m) = self.strips.write() {
            m.clear();
        }
    }

    /// Memoized strip solve.
    pub fn strip(&self, n_total: usize) -> Result<Arc<StripEigensystem>> {
        if let Some(s) = self
            .strips
            .read()
            .ok()
            .and_then(|m| m.get(&n_total).cloned())
        {
            return Ok(s);
        }
        let solved = Arc::new(self.solve_strip(n_total)?);
        let mut map = self.strips.write().expect("strip cache poisoned");
        Ok(map.entry(n_total).or_insert(solved).clone())
    }

    /// Solves a range of strips up front, in parallel when enabled.
    pub fn prefetch(&self, range: Range<usize>, exec: Execution) -> Result<()> {
        let solved: Vec<Result<StripEigensystem>> =
            crate::par_map(range.collect::<Vec<_>>(), exec, |n| self.solve_strip(n));
        let mut map = self.strips.write().expect("strip cache poisoned");
        for s in solved {
            let s = s?;
            map.entry(s.n_total).or_insert_with(|| Arc::new(s));
        }
        Ok(())
    }

    /// Bare diagonal and RWA off-diagonal of strip `n_total`.
    pub fn strip_hamiltonian(&self, n_total: usize) -> (Vec<f64>, Vec<f64>) {
        let dim = n_total.min(self.k_max()) + 1;
        let omega_r = self.params().omega_r;
        let diag = (0..dim)
            .map(|k| self.spec.levels[k] + (n_total - k) as f64 * omega_r)
            .collect();
        let off = (0..dim - 1)
            .map(|k| self.chain[k] * ((n_total - k) as f64).sqrt())
            .collect();
        (diag, off)
    }

    fn solve_strip(&self, n_total: usize) -> Result<StripEigensystem> {
        let (diag, off) = self.strip_hamiltonian(n_total);
        let dim = diag.len();
        let eig = tridiagonal_eigen(&diag, &off)?;
        let residual = tridiagonal_residual(&diag, &off, &eig);

        // rank of each bare level in the strip; ties broken by index
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
        let mut rank = vec![0; dim];
        for (r, &k) in order.iter().enumerate() {
            rank[k] = r;
        }

        let mut coeffs = DMatrix::zeros(dim, dim);
        let mut energies = Vec::with_capacity(dim);
        for k in 0..dim {
            let v = &eig.vectors[rank[k]];
            let sign = if v[k] < 0.0 { -1.0 } else { 1.0 };
            for l in 0..dim {
                coeffs[(k, l)] = sign * v[l];
            }
            energies.push(eig.values[rank[k]]);
        }

        let assignment_quality: Vec<f64> = (0..dim).map(|k| coeffs[(k, k)].powi(2)).collect();
        let strongly_mixed = (0..dim).any(|k| {
            (0..dim)
                .filter(|&l| l != k)
                .any(|l| coeffs[(k, l)].powi(2) > assignment_quality[k] - AMBIGUITY)
        });

        Ok(StripEigensystem {
            n_total,
            energies,
            coeffs,
            assignment_quality,
            strongly_mixed,
            bare_diagonal: diag,
            off_diagonal: off,
            residual,
        })
    }
}

pub fn diagonalize_strip(model: &LadderModel, n_total: usize) -> Result<Arc<StripEigensystem>> {
    model.strip(n_total)
}

/// E of the dressed state |k, n> (strip N = k + n).
pub fn dressed_energy(model: &LadderModel, k: usize, n: usize) -> Result<f64> {
    let strip = model.strip(k + n)?;
    strip.check_label(k)?;
    Ok(strip.energies[k])
}

/// Fan ordinate omega_bar_k(N) = E(|k, N - k>) - N omega_r.
pub fn fan_frequency(model: &LadderModel, k: usize, n_total: usize) -> Result<f64> {
    if k > n_total {
        return Err(Error::LabelUnavailable {
            label: k,
            n_total,
            dim: n_total.min(model.k_max()) + 1,
        });
    }
    let strip = model.strip(n_total)?;
    strip.check_label(k)?;
    Ok(strip.energies[k] - n_total as f64 * model.params().omega_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarkConvention {
    /// Relative to bare omega_10; n = 0 carries the Lamb-type shift.
    #[default]
    Raw,
    /// delta(n) - delta(0).
    Rezeroed,
}

/// delta omega_10(n) = E(|1,n>) - E(|0,n>) - omega_10.
pub fn stark_shift(model: &LadderModel, n: usize, convention: StarkConvention) -> Result<f64> {
    let raw = |n: usize| -> Result<f64> {
        Ok(dressed_energy(model, 1, n)? - dressed_energy(model, 0, n)? - model.spec().omega_10)
    };
    match convention {
        StarkConvention::Raw => raw(n),
        StarkConvention::Rezeroed => Ok(raw(n)? - raw(0)?),
    }
}

/// Transmon dispersive shift chi = chi_01 - chi_12 / 2 with
/// chi_ij = g_ij^2 / (omega_ij - omega_r), using the numeric g_12.
/// The qubit frequency moves by 2 chi per photon.
pub fn dispersive_chi(spec: &TransmonSpectrum, params: &DeviceParams) -> Result<f64> {
    let delta = spec.omega_10 - params.omega_r;
    let delta_12 = spec.omega(2, 1) - params.omega_r;
    check_poles(delta, delta_12)?;
    let g01 = params.g;
    let g12 = normalized_charge_coupling(spec, 1, 2)? * params.g / spec.g();
    Ok(g01 * g01 / delta - 0.5 * g12 * g12 / delta_12)
}

/// Closed form g^2 eta / (Delta (Delta + eta)); equals [`dispersive_chi`]
/// when g_12 = sqrt(2) g.
pub fn dispersive_chi_closed_form(spec: &TransmonSpectrum, params: &DeviceParams) -> Result<f64> {
    let delta = spec.omega_10 - params.omega_r;
    check_poles(delta, delta + spec.eta)?;
    Ok(params.g * params.g * spec.eta / (delta * (delta + spec.eta)))
}

fn check_poles(delta: f64, delta_12: f64) -> Result<()> {
    if delta.abs() < 1e-12 {
        return Err(Error::DispersivePole(
            "Delta = 0 (qubit resonant with resonator)".into(),
        ));
    }
    if delta_12.abs() < 1e-12 {
        return Err(Error::DispersivePole(
            "Delta + eta = 0 (1-2 transition resonant with resonator)".into(),
        ));
    }
    Ok(())
}

/// n_c = (Delta / 2g)^2.
pub fn critical_photon_number(params: &DeviceParams, spec: &TransmonSpectrum) -> Result<f64> {
    if params.g.is_nan() || params.g <= 0.0 {
        return Err(crate::error::invalid("g", "must be positive for n_c"));
    }
    let delta = spec.omega_10 - params.omega_r;
    Ok((delta / (2.0 * params.g)).powi(2))
}
