//! Small dense kernels: cyclic Jacobi symmetric eigensolver, the symmetrized
//! spectrum of the map's Jacobian, LU determinant sign, and linear solves.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::jacobian::FullJacobian;
use crate::simplex::SimplexPoint;

/// Relative pivot threshold below which a matrix counts as singular.
pub const PIVOT_TOL: f64 = 1e-13;

/// An eigenvalue counts as zero when its magnitude is at most this.
pub const ZERO_EIG_TOL: f64 = 1e-9;

/// The next-smallest eigenvalue magnitude must be at least this.
pub const SPECTRAL_GAP_MIN: f64 = 1e-6;

const SYMMETRY_TOL: f64 = 1e-10;
const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("symmetrized Jacobian failed its structural check (asymmetry {asymmetry:e})")]
    AsymmetryDetected { asymmetry: f64 },
    #[error("cannot isolate a zero eigenvalue: smallest |λ| = {smallest:e}, next = {next:e}")]
    SpectralGapTooSmall { smallest: f64, next: f64 },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors matching `eigenvalues`.
    pub eigenvectors: Option<DMatrix<f64>>,
}

/// Sign and log-magnitude of a determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedDeterminant {
    pub sign: i8,
    pub log_magnitude: f64,
}

impl SignedDeterminant {
    pub fn value(&self) -> f64 {
        f64::from(self.sign) * self.log_magnitude.exp()
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Max-row-sum norm.
fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<SymmetricSpectrum, LinalgError> {
    jacobi_eigen(m, false)
}

pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricSpectrum, LinalgError> {
    jacobi_eigen(m, true)
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass drops to
/// `1e-14 · ‖M‖_F`.
fn jacobi_eigen(m: &DMatrix<f64>, vectors: bool) -> Result<SymmetricSpectrum, LinalgError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(LinalgError::Dimension(format!(
            "expected square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    let norm = inf_norm(m);
    let asymmetry = inf_norm(&(m - m.transpose()));
    if asymmetry > SYMMETRY_TOL * norm {
        return Err(LinalgError::NotSymmetric { asymmetry });
    }

    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = a.norm();
    let target = JACOBI_TOL * frob;

    let off = |a: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J with J the (p, q) rotation
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                if vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = vectors.then(|| DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok(SymmetricSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Real spectrum of the full Jacobian at `x`, ascending.
///
/// With `A = diag(1 − x_i)` the product `B = J·A` is symmetric (a weighted graph
/// Laplacian), so `J = B·A⁻¹` is similar to the symmetric `A^{-1/2} B A^{-1/2}`.
pub fn df_spectrum_via_symmetrization(full: &FullJacobian, x: &SimplexPoint) -> Result<Vec<f64>, LinalgError> {
    let j = full.matrix();
    let n = j.nrows();
    if x.dim() != n {
        return Err(LinalgError::Dimension(format!(
            "point has {} coordinates, Jacobian is {}x{}",
            x.dim(),
            n,
            n
        )));
    }
    let scale: Vec<f64> = x.coords().iter().map(|c| 1.0 - c).collect();
    let b = DMatrix::from_fn(n, n, |r, c| j[(r, c)] * scale[c]);
    let asymmetry = max_abs(&(&b - b.transpose()));
    if asymmetry > SYMMETRY_TOL * max_abs(&b).max(f64::MIN_POSITIVE) {
        return Err(LinalgError::AsymmetryDetected { asymmetry });
    }
    let root: Vec<f64> = scale.iter().map(|s| s.sqrt()).collect();
    let sym = DMatrix::from_fn(n, n, |r, c| 0.5 * (b[(r, c)] + b[(c, r)]) / (root[r] * root[c]));
    Ok(symmetric_eigenvalues(&sym)?.eigenvalues)
}

/// Splits an ascending spectrum into its single near-zero eigenvalue and the rest.
pub fn split_zero_eigenvalue(spectrum: &[f64]) -> Result<(f64, Vec<f64>), LinalgError> {
    let mut by_mag: Vec<usize> = (0..spectrum.len()).collect();
    by_mag.sort_by(|&a, &b| spectrum[a].abs().total_cmp(&spectrum[b].abs()));
    let smallest = spectrum[by_mag[0]].abs();
    let next = by_mag.get(1).map_or(f64::INFINITY, |&i| spectrum[i].abs());
    if smallest > ZERO_EIG_TOL || next < SPECTRAL_GAP_MIN {
        return Err(LinalgError::SpectralGapTooSmall { smallest, next });
    }
    let zero = spectrum[by_mag[0]];
    let rest = spectrum
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != by_mag[0])
        .map(|(_, &v)| v)
        .collect();
    Ok((zero, rest))
}

/// LU with partial pivoting, in place on a copy.
fn lu_factor(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<usize>, usize, bool) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let threshold = PIVOT_TOL * max_abs(m);
    let mut singular = n > 0 && max_abs(m) == 0.0;
    for k in 0..n {
        let (piv, piv_abs) =
            (k..n)
                .map(|r| (r, a[(r, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= threshold {
            singular = true;
            continue;
        }
        if piv != k {
            a.swap_rows(piv, k);
            perm.swap(piv, k);
            swaps += 1;
        }
        let pivot = a[(k, k)];
        for r in (k + 1)..n {
            let factor = a[(r, k)] / pivot;
            a[(r, k)] = factor;
            for c in (k + 1)..n {
                a[(r, c)] -= factor * a[(k, c)];
            }
        }
    }
    (a, perm, swaps, singular)
}

pub fn signed_det(m: &DMatrix<f64>) -> SignedDeterminant {
    assert_eq!(m.nrows(), m.ncols(), "determinant of a non-square matrix");
    let (lu, _, swaps, singular) = lu_factor(m);
    if singular {
        return SignedDeterminant {
            sign: 0,
            log_magnitude: f64::NEG_INFINITY,
        };
    }
    let mut sign: i8 = if swaps % 2 == 0 { 1 } else { -1 };
    let mut log_magnitude = 0.0;
    for k in 0..m.nrows() {
        let p = lu[(k, k)];
        if p < 0.0 {
            sign = -sign;
        }
        log_magnitude += p.abs().ln();
    }
    SignedDeterminant { sign, log_magnitude }
}

pub fn linear_solve(m: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = m.nrows();
    if m.ncols() != n || b.len() != n {
        return Err(LinalgError::Dimension(format!(
            "{}x{} system with right-hand side of length {}",
            n,
            m.ncols(),
            b.len()
        )));
    }
    let (lu, perm, _, singular) = lu_factor(m);
    if singular {
        return Err(LinalgError::SingularMatrix);
    }
    let mut y: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for r in 0..n {
        for c in 0..r {
            y[r] -= lu[(r, c)] * y[c];
        }
    }
    for r in (0..n).rev() {
        for c in (r + 1)..n {
            y[r] -= lu[(r, c)] * y[c];
        }
        y[r] /= lu[(r, r)];
    }
    // one step of iterative refinement
    let mv = m * DVector::from_column_slice(&y);
    let resid: Vec<f64> = b.iter().zip(mv.iter()).map(|(bi, mi)| bi - mi).collect();
    let mut d: Vec<f64> = perm.iter().map(|&p| resid[p]).collect();
    for r in 0..n {
        for c in 0..r {
            d[r] -= lu[(r, c)] * d[c];
        }
    }
    for r in (0..n).rev() {
        for c in (r + 1)..n {
            d[r] -= lu[(r, c)] * d[c];
        }
        d[r] /= lu[(r, r)];
    }
    Ok(y.iter().zip(d).map(|(a, b)| a + b).collect())
}
