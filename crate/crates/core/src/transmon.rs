//! Isolated transmon: levels and charge matrix elements from the
//! Cooper-pair-box Hamiltonian `4 E_C (n - n_g)^2 - (E_J/2) sum |n><n+1| + h.c.`
//! in a truncated charge basis.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::eigen::{tridiagonal_eigen, tridiagonal_eigenvalues};
use crate::error::{Error, Result};
use crate::params::{DeviceParams, MIN_EJ_OVER_EC};

/// Spacings smaller than this fraction of omega_10 mark the onset of the
/// above-barrier rotor doublets.
const DOUBLET_FRACTION: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct TransmonSpectrum {
    /// E_k in GHz for k = 0..=k_max (absolute, the well bottom sits at -E_J).
    pub levels: Vec<f64>,
    /// <k|n - n_g|k'> for k, k' <= k_max.
    pub charge_elems: DMatrix<f64>,
    pub omega_10: f64,
    pub eta: f64,
    pub params_used: DeviceParams,
}

impl TransmonSpectrum {
    pub fn k_max(&self) -> usize {
        self.levels.len() - 1
    }

    /// Transition frequency omega_{kl} = E_k - E_l.
    pub fn omega(&self, k: usize, l: usize) -> f64 {
        self.levels[k] - self.levels[l]
    }

    pub fn g(&self) -> f64 {
        self.params_used.g
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k > self.k_max() {
            Err(Error::IndexOutOfRange {
                index: k,
                max: self.k_max(),
            })
        } else {
            Ok(())
        }
    }
}

fn charge_hamiltonian(e_c: f64, e_j: f64, n_g: f64, cutoff: usize) -> (Vec<f64>, Vec<f64>) {
    let c = cutoff as i64;
    let diag = (-c..=c)
        .map(|n| 4.0 * e_c * (n as f64 - n_g).powi(2))
        .collect();
    let off = vec![-0.5 * e_j; 2 * cutoff];
    (diag, off)
}

/// Lowest `count` transmon levels, eigenvalues only.
pub fn transmon_levels(
    e_c: f64,
    e_j: f64,
    n_g: f64,
    cutoff: usize,
    count: usize,
) -> Result<Vec<f64>> {
    let (diag, off) = charge_hamiltonian(e_c, e_j, n_g, cutoff);
    let mut values = tridiagonal_eigenvalues(&diag, &off)?;
    values.truncate(count);
    Ok(values)
}

pub fn solve_transmon(params: &DeviceParams) -> Result<TransmonSpectrum> {
    params.validate()?;
    let (diag, off) = charge_hamiltonian(params.e_c, params.e_j, params.n_g, params.charge_cutoff);
    let eig = tridiagonal_eigen(&diag, &off)?;
    let k_max = params.k_max;

    // one extra level to judge whether k_max is still below the doublets
    let omega_10 = eig.values[1] - eig.values[0];
    let bound = (0..=k_max)
        .find(|&k| eig.values[k + 1] - eig.values[k] < DOUBLET_FRACTION * omega_10)
        .unwrap_or(k_max + 1);
    if k_max >= bound {
        return Err(Error::TooManyLevels { k_max, bound });
    }

    let charge: Vec<f64> = (0..diag.len())
        .map(|i| i as f64 - params.charge_cutoff as f64 - params.n_g)
        .collect();
    let mut vectors: Vec<Vec<f64>> = eig.vectors[..=k_max].to_vec();
    let element = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(&charge)
            .map(|((x, y), q)| x * q * y)
            .sum()
    };

    let largest = vectors[0]
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if largest < 0.0 {
        vectors[0].iter_mut().for_each(|x| *x = -*x);
    }
    // <k-1|Q|k> > 0 along the chain
    for k in 1..=k_max {
        if element(&vectors[k - 1], &vectors[k]) < 0.0 {
            vectors[k].iter_mut().for_each(|x| *x = -*x);
        }
    }

    let dim = k_max + 1;
    let mut charge_elems = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        for kp in k..dim {
            let q = element(&vectors[k], &vectors[kp]);
            charge_elems[(k, kp)] = q;
            charge_elems[(kp, k)] = q;
        }
    }

    let levels = eig.values[..=k_max].to_vec();
    let eta = if k_max >= 2 {
        levels[2] - 2.0 * levels[1] + levels[0]
    } else {
        eig.values[2] - 2.0 * eig.values[1] + eig.values[0]
    };
    Ok(TransmonSpectrum {
        levels,
        charge_elems,
        omega_10,
        eta,
        params_used: *params,
    })
}

/// g_{k,k'} = g <k|Q|k'> / <0|Q|1>, signed.
pub fn normalized_charge_coupling(spec: &TransmonSpectrum, k: usize, kp: usize) -> Result<f64> {
    spec.check_index(k)?;
    spec.check_index(kp)?;
    if spec.k_max() < 1 {
        return Err(Error::IndexOutOfRange { index: 1, max: 0 });
    }
    Ok(spec.g() * spec.charge_elems[(k, kp)] / spec.charge_elems[(0, 1)])
}

/// Leading-order transmon expressions for g_{k,k+1} (offset 1) and
/// g_{k,k+3} (offset 3).
pub fn asymptotic_coupling(spec: &TransmonSpectrum, k: usize, offset: usize) -> Result<f64> {
    let g = spec.g();
    let kf = k as f64;
    let ratio = spec.eta / spec.omega_10;
    let value = match offset {
        1 => g * (kf + 1.0).sqrt() * (1.0 + 0.5 * ratio * kf),
        3 => g * ((kf + 1.0) * (kf + 2.0) * (kf + 3.0)).sqrt() * (-0.25 * ratio),
        other => return Err(Error::UnsupportedOffset(other)),
    };
    spec.check_index(k + offset)?;
    Ok(value)
}

/// Phenomenological selection-rule violation g_{k,k+2} = eps g sqrt((k+1)(k+2)).
pub fn broken_symmetry_coupling(
    spec: &TransmonSpectrum,
    k: usize,
    epsilon_sym: f64,
) -> Result<f64> {
    spec.check_index(k + 2)?;
    if epsilon_sym.is_nan() || epsilon_sym < 0.0 {
        return Err(crate::error::invalid("epsilon_sym", "must be non-negative"));
    }
    let kf = k as f64;
    Ok(epsilon_sym * spec.g() * ((kf + 1.0) * (kf + 2.0)).sqrt())
}

#[derive(Debug, Clone)]
pub struct SpectroscopyFit {
    pub params: DeviceParams,
    /// max(|omega_10 error|, |eta error|) at the seed and after every accepted step.
    pub residual_history: Vec<f64>,
}

const FIT_TOL: f64 = 1e-12;
const FIT_ACCEPT: f64 = 1e-9;
const FIT_MAX_STEPS: usize = 50;

/// Finds (E_C, E_J) reproducing `omega_10` and `eta`. The rest of the
/// parameters (omega_r, g, truncation, n_g, epsilon) come from `template`.
///
/// Seeded with E_C = -eta and omega_10 = sqrt(8 E_C E_J) - E_C, then refined
/// by damped Newton in (ln E_C, ln E_J).
pub fn params_from_spectroscopy(
    omega_10: f64,
    eta: f64,
    template: &DeviceParams,
) -> Result<SpectroscopyFit> {
    let fail = |reason: String| Error::NoTransmonSolution {
        omega_10,
        eta,
        reason,
    };
    if omega_10.is_nan() || omega_10 <= 0.0 {
        return Err(fail("omega_10 must be positive".into()));
    }
    if eta.is_nan() || eta >= 0.0 {
        return Err(fail("eta must be negative".into()));
    }
    if eta.abs() >= omega_10 {
        return Err(fail("|eta| must be smaller than omega_10".into()));
    }

    let cutoff = template.charge_cutoff;
    let n_g = template.n_g;
    let residual = |x: &Vector2<f64>| -> Result<Vector2<f64>> {
        let levels = transmon_levels(x[0].exp(), x[1].exp(), n_g, cutoff, 3)?;
        Ok(Vector2::new(
            levels[1] - levels[0] - omega_10,
            levels[2] - 2.0 * levels[1] + levels[0] - eta,
        ))
    };
    let norm = |r: &Vector2<f64>| r[0].abs().max(r[1].abs());

    let e_c0 = -eta;
    let e_j0 = (omega_10 + e_c0).powi(2) / (8.0 * e_c0);
    let mut x = Vector2::new(e_c0.ln(), e_j0.ln());
    let mut r = residual(&x)?;
    let mut history = vec![norm(&r)];

    for _ in 0..FIT_MAX_STEPS {
        if norm(&r) < FIT_TOL {
            break;
        }
        let h = 1e-6;
        let mut jac = Matrix2::zeros();
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let col = (residual(&xp)? - residual(&xm)?) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let step = match jac.lu().solve(&(-r)) {
            Some(s) => s,
            None => return Err(fail("singular Jacobian".into())),
        };
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-8 {
            let trial = x + step * alpha;
            let rt = residual(&trial)?;
            if norm(&rt) < norm(&r) {
                accepted = Some((trial, rt));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((xt, rt)) => {
                x = xt;
                r = rt;
                history.push(norm(&r));
            }
            None => break,
        }
    }

    if norm(&r) > FIT_ACCEPT {
        return Err(fail(format!(
            "root finder stalled at residual {:.3e} GHz",
            norm(&r)
        )));
    }
    let mut params = *template;
    params.e_c = x[0].exp();
    params.e_j = x[1].exp();
    if params.ej_over_ec() < MIN_EJ_OVER_EC {
        return Err(fail(format!(
            "solution has E_J/E_C = {:.3}, outside the transmon regime",
            params.ej_over_ec()
        )));
    }
    Ok(SpectroscopyFit {
        params,
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ratio: f64) -> DeviceParams {
        // low ratios hold only a few levels below the doublet onset
        let k_max = if ratio >= 100.0 { 9 } else { 3 };
        DeviceParams::new(0.2, 0.2 * ratio, 6.9, 0.087).with_truncation(k_max, 30)
    }

    #[test]
    fn levels_increase_and_eta_negative() {
        let spec = solve_transmon(&params(120.0)).unwrap();
        assert!(spec.levels.windows(2).all(|w| w[1] > w[0]));
        assert!(spec.eta < 0.0);
        assert_eq!(spec.levels.len(), 10);
    }

    #[test]
    fn charge_elements_symmetric_and_chain_positive() {
        for ratio in [20.0, 50.0, 120.0] {
            let spec = solve_transmon(&params(ratio)).unwrap();
            let q = &spec.charge_elems;
            assert!((q - q.transpose()).amax() < 1e-12);
            for k in 0..spec.k_max() {
                assert!(q[(k, k + 1)] > 0.0, "ratio {ratio}, k {k}");
            }
        }
    }

    #[test]
    fn normalization_is_exact() {
        let spec = solve_transmon(&params(120.0)).unwrap();
        assert_eq!(normalized_charge_coupling(&spec, 0, 1).unwrap(), 0.087);
        assert_eq!(
            normalized_charge_coupling(&spec, 3, 5).unwrap(),
            normalized_charge_coupling(&spec, 5, 3).unwrap()
        );
    }

    #[test]
    fn parity_selection_rule_at_zero_offset() {
        let spec = solve_transmon(&params(120.0)).unwrap();
        for k in 0..=spec.k_max() {
            for kp in (k + 2..=spec.k_max()).step_by(2) {
                let v = normalized_charge_coupling(&spec, k, kp).unwrap();
                assert!(v.abs() < 1e-10 * spec.g(), "g_{k},{kp} = {v}");
            }
        }
    }

    #[test]
    fn offset_charge_breaks_parity() {
        let spec = solve_transmon(&params(20.0).with_offset_charge(0.25)).unwrap();
        let v = normalized_charge_coupling(&spec, 0, 2).unwrap();
        assert!(v.abs() > 1e-10 * spec.g());
    }

    #[test]
    fn index_errors() {
        let spec = solve_transmon(&params(120.0)).unwrap();
        assert_eq!(
            normalized_charge_coupling(&spec, 10, 0),
            Err(Error::IndexOutOfRange { index: 10, max: 9 })
        );
        assert_eq!(
            asymptotic_coupling(&spec, 0, 2),
            Err(Error::UnsupportedOffset(2))
        );
        assert!(asymptotic_coupling(&spec, 7, 3).is_err());
        assert!(broken_symmetry_coupling(&spec, 8, 0.01).is_err());
    }

    #[test]
    fn asymptotic_offsets() {
        let spec = solve_transmon(&params(120.0)).unwrap();
        assert_eq!(asymptotic_coupling(&spec, 0, 1).unwrap(), spec.g());
        let expected = spec.g() * 6f64.sqrt() * (-spec.eta) / (4.0 * spec.omega_10);
        let got = asymptotic_coupling(&spec, 0, 3).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!(got > 0.0);
        for k in 0..=spec.k_max() - 3 {
            let one = asymptotic_coupling(&spec, k, 1).unwrap();
            let three = asymptotic_coupling(&spec, k, 3).unwrap();
            assert!(three.abs() < one.abs(), "k = {k}");
        }
    }

    #[test]
    fn broken_symmetry_values() {
        let spec = solve_transmon(&params(120.0)).unwrap();
        let v = broken_symmetry_coupling(&spec, 0, 0.01).unwrap();
        assert!((v * 1e3 - 0.87 * 2f64.sqrt()).abs() < 1e-12);
        assert!((v * 1e3 - 1.23).abs() < 0.005);
        let v1 = broken_symmetry_coupling(&spec, 1, 0.01).unwrap();
        assert!((v1 / spec.g() - 0.01 * 6f64.sqrt()).abs() < 1e-15);
        for k in 0..=spec.k_max() - 2 {
            assert_eq!(broken_symmetry_coupling(&spec, k, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn too_many_levels_flagged() {
        // E_J/E_C = 10 holds only a handful of levels below the barrier
        let p = DeviceParams::new(1.0, 10.0, 6.9, 0.087).with_truncation(20, 30);
        assert!(matches!(
            solve_transmon(&p),
            Err(Error::TooManyLevels { k_max: 20, .. })
        ));
    }

    #[test]
    fn spectroscopy_fit_round_trip() {
        let template = params(120.0);
        let fit = params_from_spectroscopy(5.4, -0.2, &template).unwrap();
        let spec = solve_transmon(&fit.params).unwrap();
        assert!((spec.omega_10 - 5.4).abs() < 1e-6);
        assert!((spec.eta + 0.2).abs() < 1e-6);
        assert!(fit.params.ej_over_ec() >= 10.0);
        assert_eq!(fit.params.omega_r, template.omega_r);
    }

    #[test]
    fn spectroscopy_fit_residuals_decrease() {
        let fit = params_from_spectroscopy(5.4, -0.2, &params(120.0)).unwrap();
        let h = &fit.residual_history;
        assert!(h.len() >= 2);
        assert!(h.windows(2).skip(1).all(|w| w[1] < w[0]), "{h:?}");
        assert!(h.last().unwrap() < &h[0]);
    }

    #[test]
    fn spectroscopy_fit_rejects_bad_targets() {
        let t = params(120.0);
        assert!(params_from_spectroscopy(5.0, 0.1, &t).is_err());
        assert!(params_from_spectroscopy(0.15, -0.2, &t).is_err());
        assert!(params_from_spectroscopy(-1.0, -0.2, &t).is_err());
        // strongly anharmonic: E_J/E_C would fall below 10
        assert!(matches!(
            params_from_spectroscopy(2.0, -1.2, &t),
            Err(Error::NoTransmonSolution { .. })
        ));
    }
}
