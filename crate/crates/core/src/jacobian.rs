//! Jacobians of the map: the ambient `n×n` matrix `∂F/∂x`, the `(n−1)×(n−1)`
//! matrix in the chart `y_i = x_i (i < n)`, the closed form at fixed points, and a
//! central finite-difference oracle.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::df_map::{AmbientMap, DfMap};
use crate::simplex::SimplexPoint;

/// Residual above which a point is not accepted as a fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-10;

const MIN_FD_STEP: f64 = 1e-7;
const MAX_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobianError {
    #[error("coordinate {index} = {value} is within delta of a corner")]
    CornerPoint { index: usize, value: f64 },
    #[error("residual {residual:e} exceeds the fixed-point tolerance")]
    NotAFixedPoint { residual: f64 },
    #[error("finite-difference step {h} would leave the analytic-extension region")]
    StepTooLarge { h: f64 },
    #[error("finite-difference step {h} outside [1e-7, 1e-4]")]
    StepOutOfRange { h: f64 },
}

/// `∂F/∂x` in ambient coordinates. Columns sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FullJacobian(DMatrix<f64>);

/// `dG_y` in the chart that eliminates the last coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedJacobian(DMatrix<f64>);

impl FullJacobian {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn column_sum_max_abs(&self) -> f64 {
        self.0.column_iter().map(|c| c.sum().abs()).fold(0.0, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.0)
    }
}

impl ReducedJacobian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.0)
    }
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn check_interior(x: &SimplexPoint, delta: f64) -> Result<(), JacobianError> {
    match x.coords().iter().enumerate().find(|(_, &c)| c > 1.0 - delta) {
        Some((index, &value)) => Err(JacobianError::CornerPoint { index, value }),
        None => Ok(()),
    }
}

/// `(i,i) = F_i(1−F_i)/(1−x_i)`, `(i,j) = −F_i F_j/(1−x_j)`.
pub fn full_jacobian(map: &DfMap, x: &SimplexPoint, delta: f64) -> Result<FullJacobian, JacobianError> {
    check_interior(x, delta)?;
    let f = map.evaluate(x);
    let f = f.coords();
    let x = x.coords();
    let n = x.len();
    Ok(FullJacobian(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            f[i] * (1.0 - f[i]) / (1.0 - x[i])
        } else {
            -f[i] * f[j] / (1.0 - x[j])
        }
    })))
}

/// `∂G_i/∂y_j = ∂F_i/∂x_j − ∂F_i/∂x_n` for `i, j < n`.
pub fn reduced_jacobian(full: &FullJacobian) -> ReducedJacobian {
    let j = &full.0;
    let m = j.nrows() - 1;
    ReducedJacobian(DMatrix::from_fn(m, m, |r, c| j[(r, c)] - j[(r, m)]))
}

/// Closed form at a fixed point: `(i,i) = x̄_i`, `(i,j) = −x̄_i x̄_j/(1−x̄_j)`.
pub fn fixed_point_jacobian(map: &DfMap, xbar: &SimplexPoint, delta: f64) -> Result<FullJacobian, JacobianError> {
    check_interior(xbar, delta)?;
    let residual = map.residual(xbar);
    if residual > FIXED_POINT_TOL {
        return Err(JacobianError::NotAFixedPoint { residual });
    }
    let x = xbar.coords();
    let n = x.len();
    Ok(FullJacobian(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            x[i]
        } else {
            -x[i] * x[j] / (1.0 - x[j])
        }
    })))
}

/// Central differences in ambient `ℝⁿ`, using the map's analytic extension off the simplex.
pub fn finite_difference_jacobian<M: AmbientMap>(
    map: &M,
    x: &SimplexPoint,
    h: f64,
) -> Result<FullJacobian, JacobianError> {
    if x.max_coord() + h >= 1.0 {
        return Err(JacobianError::StepTooLarge { h });
    }
    if !(MIN_FD_STEP..=MAX_FD_STEP).contains(&h) {
        return Err(JacobianError::StepOutOfRange { h });
    }
    let n = map.dim();
    let mut out = DMatrix::zeros(n, n);
    let mut probe = x.coords().to_vec();
    for j in 0..n {
        let orig = probe[j];
        probe[j] = orig + h;
        let fp = map.eval_ambient(&probe);
        probe[j] = orig - h;
        let fm = map.eval_ambient(&probe);
        probe[j] = orig;
        for i in 0..n {
            out[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(FullJacobian(out))
}
