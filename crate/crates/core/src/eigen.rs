//! Symmetric tridiagonal eigensolver (implicit-shift QL).
//!
//! Every Hamiltonian block solved in this crate outside the oracle is
//! tridiagonal: the Cooper-pair-box in the charge basis and each RWA strip in
//! the bare basis. Dimensions are small (at most a few dozen), so the full
//! eigenvector matrix is accumulated.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenpairs sorted by ascending eigenvalue. `vectors[j]` is the unit
/// eigenvector belonging to `values[j]`.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Diagonalizes the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagEigen> {
    solve(diag, off, true)
}

/// Eigenvalues only, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    solve(diag, off, false).map(|e| e.values)
}

fn solve(diag: &[f64], off: &[f64], want_vectors: bool) -> Result<TridiagEigen> {
    let n = diag.len();
    assert_eq!(
        off.len() + 1,
        n.max(1),
        "off-diagonal must have length n - 1"
    );
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z[k][i]: component k of eigenvector i
    let mut z: Vec<Vec<f64>> = if want_vectors {
        (0..n)
            .map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        Vec::new()
    };

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    dim: n,
                    iterations: sweeps,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if want_vectors {
                    for row in z.iter_mut() {
                        let f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = if want_vectors {
        order
            .iter()
            .map(|&i| z.iter().map(|row| row[i]).collect())
            .collect()
    } else {
        Vec::new()
    };
    Ok(TridiagEigen { values, vectors })
}

/// Max-norm residual `max_j |H v_j - lambda_j v_j|` for a tridiagonal `H`.
pub fn tridiagonal_residual(diag: &[f64], off: &[f64], eig: &TridiagEigen) -> f64 {
    let n = diag.len();
    let mut worst: f64 = 0.0;
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        for i in 0..n {
            let mut hv = diag[i] * v[i];
            if i > 0 {
                hv += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                hv += off[i] * v[i + 1];
            }
            worst = worst.max((hv - lambda * v[i]).abs());
        }
    }
    worst
}
