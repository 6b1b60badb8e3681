//! Fixed-point location: Picard iteration, Newton refinement in the reduced
//! chart, and seeded multistart enumeration with sup-norm clustering.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::df_map::DfMap;
use crate::jacobian::{full_jacobian, reduced_jacobian, JacobianError};
use crate::linalg::{linear_solve, LinalgError};
use crate::parallel::Execution;
use crate::simplex::{sample_interior, ShrunkenSimplex, SimplexError, SimplexPoint, DEFAULT_DELTA};

/// Largest starting residual accepted by [`newton_refine`].
pub const NEWTON_START_MAX_RESIDUAL: f64 = 1e-3;

const MAX_BACKTRACKS: usize = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("starting residual {residual:e} is too large for Newton refinement")]
    ResidualTooLarge { residual: f64 },
    #[error("dG_y - I is singular at the current iterate")]
    SingularNewtonMatrix,
    #[error("Newton iterate left the shrunken simplex")]
    LeftDomain,
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Sup-norm of `x − F(x)` at which Picard iteration stops.
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub multistart_count: usize,
    /// Sup-norm radius within which two located points are the same fixed point.
    pub cluster_radius: f64,
    pub seed: u64,
    /// Corner-exclusion margin of the shrunken simplex.
    pub delta: f64,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            picard_tol: 1e-13,
            picard_max_iters: 100_000,
            newton_tol: 1e-14,
            newton_max_iters: 50,
            multistart_count: 50,
            cluster_radius: 1e-7,
            seed: 0,
            delta: DEFAULT_DELTA,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = [
            ("picard_tol", self.picard_tol),
            ("newton_tol", self.newton_tol),
            ("cluster_radius", self.cluster_radius),
            ("delta", self.delta),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.cluster_radius <= self.newton_tol {
            return Err(SolverError::InvalidConfig(
                "cluster_radius must exceed newton_tol".into(),
            ));
        }
        if self.delta >= 1.0 {
            return Err(SolverError::InvalidConfig(format!(
                "delta {} must be below 1",
                self.delta
            )));
        }
        Ok(())
    }

    fn domain(&self) -> ShrunkenSimplex {
        ShrunkenSimplex::new(self.delta).expect("validated delta")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointRecord {
    pub location: SimplexPoint,
    /// `‖F(x̄) − x̄‖∞`.
    pub residual: f64,
    /// Number of multistart runs that converged here.
    pub basin_hits: usize,
    pub is_corner: bool,
}

impl FixedPointRecord {
    fn corner(n: usize, i: usize) -> Self {
        Self {
            location: SimplexPoint::vertex(n, i).expect("valid dimension"),
            residual: 0.0,
            basin_hits: 0,
            is_corner: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PicardOutcome {
    Converged {
        record: FixedPointRecord,
        iterations: usize,
    },
    /// Budget exhausted; carries the last iterate and its residual.
    NonConvergence {
        point: SimplexPoint,
        residual: f64,
        iterations: usize,
    },
}

impl PicardOutcome {
    pub fn record(&self) -> Option<&FixedPointRecord> {
        match self {
            PicardOutcome::Converged { record, .. } => Some(record),
            PicardOutcome::NonConvergence { .. } => None,
        }
    }
}

/// Iterates `x ← F(x)` until `‖F(x) − x‖∞ ≤ picard_tol`.
pub fn picard_solve(map: &DfMap, x0: &SimplexPoint, cfg: &SolverConfig) -> PicardOutcome {
    if let Some(i) = x0.corner_index() {
        return PicardOutcome::Converged {
            record: FixedPointRecord::corner(x0.dim(), i),
            iterations: 0,
        };
    }
    let mut x = x0.clone();
    let mut iterations = 0;
    loop {
        let fx = map.evaluate(&x);
        let residual = fx.sup_distance(&x);
        if residual <= cfg.picard_tol {
            return PicardOutcome::Converged {
                record: FixedPointRecord {
                    location: x,
                    residual,
                    basin_hits: 1,
                    is_corner: false,
                },
                iterations,
            };
        }
        if iterations == cfg.picard_max_iters {
            return PicardOutcome::NonConvergence {
                point: x,
                residual,
                iterations,
            };
        }
        x = fx;
        iterations += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub record: FixedPointRecord,
    pub steps: usize,
    /// Residual before each step and after the last.
    pub residual_history: Vec<f64>,
}

fn within(domain: &ShrunkenSimplex, coords: &[f64]) -> bool {
    coords.iter().all(|&c| c >= 0.0 && c <= 1.0 - domain.delta())
}

/// Newton's method on `G(y) − y = 0` with `y_i = x_i`, `i < n`, and halving
/// backtracking so the residual never increases.
pub fn newton_refine(map: &DfMap, x_approx: &SimplexPoint, cfg: &SolverConfig) -> Result<Refinement, SolverError> {
    let domain = cfg.domain();
    let n = x_approx.dim();
    let mut x = x_approx.clone();
    let mut residual = map.residual(&x);
    if residual > NEWTON_START_MAX_RESIDUAL {
        return Err(SolverError::ResidualTooLarge { residual });
    }
    if !domain.contains(&x) {
        return Err(SolverError::LeftDomain);
    }
    let mut history = vec![residual];
    let mut steps = 0;
    while residual > cfg.newton_tol && steps < cfg.newton_max_iters {
        let full = full_jacobian(map, &x, domain.delta()).map_err(|e| match e {
            JacobianError::CornerPoint { .. } => SolverError::LeftDomain,
            other => unreachable!("full_jacobian only fails on corners: {other}"),
        })?;
        let newton = reduced_jacobian(&full).matrix() - DMatrix::<f64>::identity(n - 1, n - 1);
        let fx = map.evaluate(&x);
        let g: Vec<f64> = (0..n - 1).map(|i| fx.coords()[i] - x.coords()[i]).collect();
        let step = linear_solve(&newton, &g).map_err(|e| match e {
            LinalgError::SingularMatrix => SolverError::SingularNewtonMatrix,
            other => unreachable!("square Newton system: {other}"),
        })?;

        let mut scale = 1.0;
        let mut in_domain_seen = false;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let mut trial: Vec<f64> = (0..n - 1).map(|i| x.coords()[i] - scale * step[i]).collect();
            trial.push(1.0 - trial.iter().sum::<f64>());
            if within(&domain, &trial) {
                in_domain_seen = true;
                let candidate = SimplexPoint::new(trial)?;
                let r = map.residual(&candidate);
                if r < residual {
                    accepted = Some((candidate, r));
                    break;
                }
            }
            scale *= 0.5;
        }
        match accepted {
            Some((candidate, r)) => {
                x = candidate;
                residual = r;
                steps += 1;
                history.push(r);
            }
            // at the rounding floor no step can lower the residual further
            None if in_domain_seen => break,
            None => return Err(SolverError::LeftDomain),
        }
    }
    Ok(Refinement {
        record: FixedPointRecord {
            location: x,
            residual,
            basin_hits: 1,
            is_corner: false,
        },
        steps,
        residual_history: history,
    })
}

/// Enumerated fixed points plus multistart accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    /// Interior clusters followed by the `n` corners, sorted by first coordinate.
    pub records: Vec<FixedPointRecord>,
    pub starts: usize,
    pub converged_starts: usize,
    pub nonconverged_starts: usize,
}

impl Enumeration {
    pub fn interior(&self) -> impl Iterator<Item = &FixedPointRecord> {
        self.records.iter().filter(|r| !r.is_corner)
    }

    pub fn corners(&self) -> impl Iterator<Item = &FixedPointRecord> {
        self.records.iter().filter(|r| r.is_corner)
    }
}

fn solve_from(map: &DfMap, x0: &SimplexPoint, cfg: &SolverConfig) -> Option<FixedPointRecord> {
    let record = match picard_solve(map, x0, cfg) {
        PicardOutcome::Converged { record, .. } if !record.is_corner => record,
        _ => return None,
    };
    if !cfg.domain().contains(&record.location) {
        return None;
    }
    match newton_refine(map, &record.location, cfg) {
        Ok(refined) if refined.record.residual <= record.residual => Some(refined.record),
        _ => Some(record),
    }
}

/// Multistart enumeration: the barycenter plus `multistart_count` seeded interior
/// starts, each solved by Picard then Newton, clustered, with the corners appended.
///
/// A zero `multistart_count` runs no starts at all.
pub fn enumerate_fixed_points(map: &DfMap, cfg: &SolverConfig) -> Result<Enumeration, SolverError> {
    cfg.validate()?;
    let n = map.dim();
    let mut starts = Vec::new();
    if cfg.multistart_count > 0 {
        starts.push(SimplexPoint::barycenter(n)?);
        starts.extend(sample_interior(n, cfg.multistart_count, cfg.seed, cfg.delta)?);
    }
    let solved: Vec<Option<FixedPointRecord>> = cfg.execution.map(&starts, |x0| solve_from(map, x0, cfg));
    let converged: Vec<FixedPointRecord> = solved.into_iter().flatten().collect();
    let converged_starts = converged.len();

    let mut records = cluster(converged, cfg.cluster_radius);
    records.extend((0..n).map(|i| FixedPointRecord::corner(n, i)));
    records.sort_by(|a, b| a.location.coords()[0].total_cmp(&b.location.coords()[0]));

    Ok(Enumeration {
        records,
        starts: starts.len(),
        converged_starts,
        nonconverged_starts: starts.len() - converged_starts,
    })
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Union–find on pairwise sup-norm distance. Each cluster is represented by its
/// lowest-residual member (earliest start on ties).
fn cluster(points: Vec<FixedPointRecord>, radius: f64) -> Vec<FixedPointRecord> {
    let m = points.len();
    let mut parent: Vec<usize> = (0..m).collect();
    for i in 0..m {
        for j in (i + 1)..m {
            if points[i].location.sup_distance(&points[j].location) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; m];
    let mut hits = vec![0usize; m];
    for i in 0..m {
        let root = find(&mut parent, i);
        hits[root] += 1;
        best[root] = match best[root] {
            Some(b) if points[b].residual <= points[i].residual => Some(b),
            _ => Some(i),
        };
    }
    (0..m)
        .filter(|&i| find(&mut parent, i) == i)
        .map(|root| {
            let mut rec = points[best[root].expect("root has a member")].clone();
            rec.basin_hits = hits[root];
            rec
        })
        .collect()
}
