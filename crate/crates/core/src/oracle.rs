//! Independent checks on the path sums.
//!
//! The interaction here is assembled from the full charge operator
//! `sum_{l,l'} g_{l,l'} |l'><l| (a + a^dagger)` restricted to two strips,
//! without the family bookkeeping of [`crate::coupling`]. The splitting
//! oracle diagonalizes both strips jointly with the block scaled by `lambda`
//! and scans a rigid offset of the final strip through the crossing; at weak
//! coupling the minimum splitting approaches `2 lambda |g_eff_coh|`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::coupling::{StripOffset, TransitionSpec};
use crate::error::{Error, Result};
use crate::ladder::LadderModel;
use crate::transmon::normalized_charge_coupling;

const GRID: usize = 801;
const STAGES: usize = 6;
const SHRINK: f64 = 50.0;
/// Both tracked branches must keep at least this combined weight in
/// span{initial, final}; below it a third state takes part in the crossing.
const MIN_BRANCH_WEIGHT: f64 = 1.5;

/// Charge coupling matrix that connects the two strips: the numeric
/// g_{l,l'} for offset 2, the broken-symmetry model (|l - l'| = 2 only) for
/// offset 1.
fn coupling_matrix(model: &LadderModel, offset: StripOffset) -> Result<DMatrix<f64>> {
    let dim = model.k_max() + 1;
    let spec = model.spec();
    let mut g = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            g[(a, b)] = match offset {
                StripOffset::NextNearest => normalized_charge_coupling(spec, a, b)?,
                StripOffset::Nearest if a.abs_diff(b) == 2 => {
                    let low = a.min(b) as f64;
                    model.params().epsilon_sym
                        * model.params().g
                        * ((low + 1.0) * (low + 2.0)).sqrt()
                }
                StripOffset::Nearest => 0.0,
            };
        }
    }
    Ok(g)
}

/// Block of `G (a + a^dagger)` between strip `n_initial` (columns) and strip
/// `n_initial + offset` (rows), in the bare bases.
pub fn interaction_block(
    model: &LadderModel,
    n_initial: usize,
    offset: StripOffset,
) -> Result<DMatrix<f64>> {
    let n_final = n_initial + offset.value();
    let dim_i = n_initial.min(model.k_max()) + 1;
    let dim_f = n_final.min(model.k_max()) + 1;
    let g = coupling_matrix(model, offset)?;
    Ok(DMatrix::from_fn(dim_f, dim_i, |lf, li| {
        let p = n_initial - li;
        let pf = n_final - lf;
        let photon = if pf == p + 1 {
            ((p + 1) as f64).sqrt()
        } else if pf + 1 == p {
            (p as f64).sqrt()
        } else {
            0.0
        };
        g[(lf, li)] * photon
    }))
}

fn dressed_vectors(
    model: &LadderModel,
    t: &TransitionSpec,
) -> Result<(DVector<f64>, DVector<f64>, f64)> {
    let initial = model.strip(t.initial_strip())?;
    let fin = model.strip(t.final_strip())?;
    if t.k_i >= initial.dim() {
        return Err(Error::LabelUnavailable {
            label: t.k_i,
            n_total: initial.n_total,
            dim: initial.dim(),
        });
    }
    if t.k_f >= fin.dim() {
        return Err(Error::LabelUnavailable {
            label: t.k_f,
            n_total: fin.n_total,
            dim: fin.dim(),
        });
    }
    let ci = DVector::from_iterator(initial.dim(), initial.coeffs.row(t.k_i).iter().copied());
    let cf = DVector::from_iterator(fin.dim(), fin.coeffs.row(t.k_f).iter().copied());
    Ok((ci, cf, fin.energies[t.k_f] - initial.energies[t.k_i]))
}

/// `<f| V |i>` by dense matrix application.
pub fn direct_matrix_element(model: &LadderModel, t: &TransitionSpec) -> Result<f64> {
    let offset = t.offset()?;
    let (ci, cf, _) = dressed_vectors(model, t)?;
    let v = interaction_block(model, t.initial_strip(), offset)?;
    Ok(cf.dot(&(v * ci)))
}

fn dense_strip(model: &LadderModel, n_total: usize) -> DMatrix<f64> {
    let (diag, off) = model.strip_hamiltonian(n_total);
    let n = diag.len();
    let mut h = DMatrix::from_diagonal(&DVector::from_vec(diag));
    for (i, x) in off.into_iter().enumerate() {
        h[(i, i + 1)] = x;
        h[(i + 1, i)] = x;
    }
    debug_assert_eq!(h.nrows(), n);
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub lambda: f64,
    /// Minimum splitting between the two tracked branches, GHz.
    pub splitting: f64,
    /// Final-strip offset at which the minimum occurs, GHz.
    pub offset_at_min: f64,
    /// Combined weight of the two branches in span{initial, final}, at most 2.
    pub branch_weight: f64,
}

impl OracleResult {
    /// splitting / (2 lambda), the oracle's estimate of |g_eff_coh|.
    pub fn coupling_estimate(&self) -> f64 {
        self.splitting / (2.0 * self.lambda)
    }
}

struct JointProblem {
    h0: DMatrix<f64>,
    dim_i: usize,
    vi: DVector<f64>,
    vf: DVector<f64>,
}

impl JointProblem {
    fn gap(&self, offset: f64) -> (f64, f64) {
        let mut h = self.h0.clone();
        let n = h.nrows();
        for j in self.dim_i..n {
            h[(j, j)] += offset;
        }
        let eig = SymmetricEigen::new(h);
        let mut weights: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let v = eig.eigenvectors.column(j);
                let w = self.vi.dot(&v).powi(2) + self.vf.dot(&v).powi(2);
                (w, eig.eigenvalues[j])
            })
            .collect();
        weights.sort_by(|a, b| b.0.total_cmp(&a.0));
        (
            (weights[0].1 - weights[1].1).abs(),
            weights[0].0 + weights[1].0,
        )
    }
}

/// Minimum avoided-crossing splitting between the dressed initial and final
/// states with the inter-strip block scaled by `lambda`.
pub fn two_strip_splitting_oracle(
    model: &LadderModel,
    t: &TransitionSpec,
    lambda: f64,
) -> Result<OracleResult> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(crate::error::invalid("lambda", "must lie in [0, 1]"));
    }
    let offset = t.offset()?;
    let (ci, cf, mismatch) = dressed_vectors(model, t)?;
    let hi = dense_strip(model, t.initial_strip());
    let hf = dense_strip(model, t.final_strip());
    let v = interaction_block(model, t.initial_strip(), offset)? * lambda;
    let (dim_i, dim_f) = (hi.nrows(), hf.nrows());
    let n = dim_i + dim_f;
    let mut h0 = DMatrix::zeros(n, n);
    h0.view_mut((0, 0), (dim_i, dim_i)).copy_from(&hi);
    h0.view_mut((dim_i, dim_i), (dim_f, dim_f)).copy_from(&hf);
    h0.view_mut((dim_i, 0), (dim_f, dim_i)).copy_from(&v);
    h0.view_mut((0, dim_i), (dim_i, dim_f))
        .copy_from(&v.transpose());

    let mut vi = DVector::zeros(n);
    vi.rows_mut(0, dim_i).copy_from(&ci);
    let mut vf = DVector::zeros(n);
    vf.rows_mut(dim_i, dim_f).copy_from(&cf);
    let problem = JointProblem { h0, dim_i, vi, vf };

    // second-order shifts move the crossing by at most ~ |V|^2 / gap
    let v_norm = v.norm();
    let mut half_width = (v_norm * v_norm + 0.1 * v_norm).max(1e-3);
    let mut center = -mismatch;
    let mut best = (f64::INFINITY, 0.0, center);
    for _ in 0..STAGES {
        for i in 0..GRID {
            let x = center - half_width + 2.0 * half_width * i as f64 / (GRID - 1) as f64;
            let (gap, weight) = problem.gap(x);
            if gap < best.0 {
                best = (gap, weight, x);
            }
        }
        center = best.2;
        half_width /= SHRINK;
    }
    let (splitting, branch_weight, offset_at_min) = best;
    if branch_weight < MIN_BRANCH_WEIGHT {
        return Err(Error::OracleInapplicable(format!(
            "tracked branches hold only {branch_weight:.3} of the two-state weight"
        )));
    }
    Ok(OracleResult {
        lambda,
        splitting,
        offset_at_min,
        branch_weight,
    })
}
