//! Local Lefschetz indices, stability classification, corner spectra, rate
//! estimates, and the uniqueness certificate.
//!
//! The certified domain is the shrunken simplex, a compact convex set with Euler
//! characteristic 1. The map is homotopic to the identity through
//! `t·x + (1 − t)·F(x)`, so the local indices `sign det(I − dG_y)` over all fixed
//! points in the domain must sum to 1. When every fixed point is exponentially
//! stable each index is +1, which forces exactly one fixed point.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::df_map::DfMap;
use crate::jacobian::{fixed_point_jacobian, reduced_jacobian, JacobianError, FIXED_POINT_TOL};
use crate::linalg::{df_spectrum_via_symmetrization, signed_det, split_zero_eigenvalue, LinalgError};
use crate::parallel::Execution;
use crate::simplex::SimplexPoint;
use crate::solver::{enumerate_fixed_points, FixedPointRecord, SolverConfig, SolverError};

/// Euler characteristic of the shrunken simplex.
pub const EULER_CHARACTERISTIC: i32 = 1;

/// Eigenvalues within this distance of 1 make a fixed point non-Lefschetz.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Tolerance for trace and determinant cross-checks against the explicit `dG_y`.
pub const SPECTRAL_CROSSCHECK_TOL: f64 = 1e-8;

/// Trajectory distances above this are treated as pre-asymptotic.
pub const RATE_HEAD_CUTOFF: f64 = 1e-3;
/// Trajectory distances below this are dominated by rounding.
pub const RATE_TAIL_FLOOR: f64 = 1e-12;
pub const RATE_MIN_TAIL: usize = 10;
pub const RATE_MIN_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("record is a corner; use corner_spectrum")]
    CornerRecord,
    #[error("explicit dG_y disagrees with the symmetrized spectrum ({what}: {gap:e})")]
    SpectralMismatch { what: &'static str, gap: f64 },
    #[error("trajectory never came within 1e-3 of the fixed point")]
    NotInBasin,
    #[error("only {points} usable tail points (need at least 10)")]
    TailTooShort { points: usize },
    #[error("rate estimation needs at least 50 steps, got {0}")]
    TooFewSteps(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    ExpStable,
    Unstable,
    /// Some eigenvalue within 1e-9 of 1; not a Lefschetz fixed point.
    Marginal,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::ExpStable => "ExpStable",
            Stability::Unstable => "Unstable",
            Stability::Marginal => "Marginal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// The `n − 1` eigenvalues of `dG_y`, ascending.
    pub reduced_eigenvalues: Vec<f64>,
    /// All `n` eigenvalues of `∂F/∂x`, ascending.
    pub full_eigenvalues: Vec<f64>,
    pub spectral_radius: f64,
    pub stability: Stability,
    /// `sign det(I − dG_y)`, or 0 when marginal.
    pub lefschetz_index: i8,
}

/// Spectrum of `∂F/∂x` at a fixed point and the resulting index.
pub fn stability_report(map: &DfMap, record: &FixedPointRecord, delta: f64) -> Result<StabilityReport, CertifyError> {
    if record.is_corner {
        return Err(CertifyError::CornerRecord);
    }
    let x = &record.location;
    let full = fixed_point_jacobian(map, x, delta)?;
    let full_eigenvalues = df_spectrum_via_symmetrization(&full, x)?;
    let (_, reduced_eigenvalues) = split_zero_eigenvalue(&full_eigenvalues)?;

    let dg = reduced_jacobian(&full);
    let trace_gap = (reduced_eigenvalues.iter().sum::<f64>() - dg.trace()).abs();
    if trace_gap > SPECTRAL_CROSSCHECK_TOL {
        return Err(CertifyError::SpectralMismatch {
            what: "trace",
            gap: trace_gap,
        });
    }
    let det_gap = (reduced_eigenvalues.iter().product::<f64>() - signed_det(dg.matrix()).value()).abs();
    if det_gap > SPECTRAL_CROSSCHECK_TOL {
        return Err(CertifyError::SpectralMismatch {
            what: "determinant",
            gap: det_gap,
        });
    }

    let spectral_radius = reduced_eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let marginal = reduced_eigenvalues.iter().any(|l| (l - 1.0).abs() <= MARGINAL_TOL);
    let (stability, lefschetz_index) = if marginal {
        (Stability::Marginal, 0)
    } else {
        let m = dg.dim();
        let index = signed_det(&(DMatrix::<f64>::identity(m, m) - dg.matrix())).sign;
        let stability = if spectral_radius < 1.0 - MARGINAL_TOL {
            Stability::ExpStable
        } else {
            Stability::Unstable
        };
        (stability, index)
    };
    Ok(StabilityReport {
        reduced_eigenvalues,
        full_eigenvalues,
        spectral_radius,
        stability,
        lefschetz_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerSpectrum {
    /// `(1 − γ_i)/γ_i`; exceeds 1 for admissible weights.
    pub unstable_eigenvalue: f64,
    /// Number of zero eigenvalues (`n − 1`).
    pub zero_multiplicity: usize,
}

/// Spectrum of `∂F/∂x` at the corner `e_i` (0-based).
pub fn corner_spectrum(map: &DfMap, i: usize) -> CornerSpectrum {
    let g = map.gamma()[i];
    CornerSpectrum {
        unstable_eigenvalue: (1.0 - g) / g,
        zero_multiplicity: map.dim() - 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    UniqueExpStable,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::UniqueExpStable => "UniqueExpStable",
            Verdict::Inconsistent => "Inconsistent",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerReport {
    pub corner: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LefschetzCertificate {
    pub interior_points: Vec<(FixedPointRecord, StabilityReport)>,
    pub corner_reports: Vec<CornerReport>,
    pub index_sum: i32,
    pub euler_characteristic: i32,
    pub verdict: Verdict,
    pub nonconverged_starts: usize,
    /// Interior points whose spectrum could not be classified.
    pub unclassified_points: usize,
}

pub fn certify(map: &DfMap, cfg: &SolverConfig) -> Result<LefschetzCertificate, CertifyError> {
    let enumeration = enumerate_fixed_points(map, cfg)?;
    let mut interior_points = Vec::new();
    let mut unclassified_points = 0;
    for record in enumeration.interior() {
        match stability_report(map, record, cfg.delta) {
            Ok(report) => interior_points.push((record.clone(), report)),
            Err(_) => unclassified_points += 1,
        }
    }
    let corner_reports: Vec<CornerReport> = (0..map.dim())
        .map(|i| CornerReport {
            corner: i,
            eigenvalue: corner_spectrum(map, i).unstable_eigenvalue,
        })
        .collect();
    debug_assert!(corner_reports.iter().all(|c| c.eigenvalue > 1.0));

    let index_sum: i32 = interior_points.iter().map(|(_, r)| i32::from(r.lefschetz_index)).sum();
    let any_marginal = interior_points.iter().any(|(_, r)| r.stability == Stability::Marginal);
    let found = interior_points.len() + unclassified_points;

    let verdict = if found == 0 {
        Verdict::Inconclusive
    } else if found > 1 {
        Verdict::Inconsistent
    } else if any_marginal || unclassified_points > 0 {
        Verdict::Inconclusive
    } else if index_sum != EULER_CHARACTERISTIC {
        Verdict::Inconsistent
    } else if enumeration.nonconverged_starts > 0 {
        Verdict::Inconclusive
    } else if interior_points[0].1.stability == Stability::ExpStable {
        Verdict::UniqueExpStable
    } else {
        Verdict::Inconsistent
    };

    Ok(LefschetzCertificate {
        interior_points,
        corner_reports,
        index_sum,
        euler_characteristic: EULER_CHARACTERISTIC,
        verdict,
        nonconverged_starts: enumeration.nonconverged_starts,
        unclassified_points,
    })
}

/// Certifies several maps; results come back in input order.
pub fn certify_many(
    maps: &[DfMap],
    cfg: &SolverConfig,
    exec: Execution,
) -> Vec<Result<LefschetzCertificate, CertifyError>> {
    // inner multistart loops stay sequential when the sweep itself is parallel
    let inner = SolverConfig {
        execution: if exec == Execution::Parallel {
            Execution::Sequential
        } else {
            cfg.execution
        },
        ..cfg.clone()
    };
    exec.map(maps, |m| certify(m, &inner))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    /// Spectral radius of `dG_y` at the fixed point.
    pub spectral_rate: f64,
    /// `exp` of the least-squares slope of `log ‖x(k) − x̄‖₁` over the tail.
    pub empirical_rate: f64,
    pub tail_window: usize,
}

impl RateEstimate {
    pub fn relative_gap(&self) -> f64 {
        (self.empirical_rate - self.spectral_rate).abs() / self.spectral_rate
    }
}

pub fn rate_estimate(
    map: &DfMap,
    xbar: &SimplexPoint,
    x0: &SimplexPoint,
    steps: usize,
    delta: f64,
) -> Result<RateEstimate, CertifyError> {
    if steps < RATE_MIN_STEPS {
        return Err(CertifyError::TooFewSteps(steps));
    }
    let record = FixedPointRecord {
        location: xbar.clone(),
        residual: map.residual(xbar),
        basin_hits: 0,
        is_corner: xbar.corner_index().is_some(),
    };
    if record.residual > FIXED_POINT_TOL {
        return Err(JacobianError::NotAFixedPoint {
            residual: record.residual,
        }
        .into());
    }

    let traj = map.simulate(x0, steps);
    let dist: Vec<f64> = traj.states.iter().map(|s| s.l1_distance(xbar)).collect();
    let head = dist
        .iter()
        .position(|&d| d <= RATE_HEAD_CUTOFF)
        .ok_or(CertifyError::NotInBasin)?;
    let tail: Vec<(f64, f64)> = dist[head..]
        .iter()
        .enumerate()
        .take_while(|(_, &d)| d >= RATE_TAIL_FLOOR)
        .map(|(k, &d)| (k as f64, d.ln()))
        .collect();
    if tail.len() < RATE_MIN_TAIL {
        return Err(CertifyError::TailTooShort { points: tail.len() });
    }
    let spectral_rate = stability_report(map, &record, delta)?.spectral_radius;
    Ok(RateEstimate {
        spectral_rate,
        empirical_rate: least_squares_slope(&tail).exp(),
        tail_window: tail.len(),
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
