//! Influence weights from a relative interaction matrix.
//!
//! `γ` is the dominant left eigenvector of the row-stochastic matrix `C`
//! (`γᵀC = γᵀ`, `Σ γ_i = 1`). It is found by power iteration on the lazy chain
//! `(I + Cᵀ)/2`, which has the same fixed vector but is aperiodic, so bipartite
//! supports such as the star graph converge instead of oscillating.

use std::collections::VecDeque;

use thiserror::Error;

use crate::simplex::{InfluenceWeights, SimplexError, STAR_TOL, SUM_TOL};

const POWER_TOL: f64 = 1e-13;
const POWER_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("interaction matrix must be square with n >= 3 (got {rows} rows, row {bad_row} has {cols} entries)")]
    Shape { rows: usize, bad_row: usize, cols: usize },
    #[error("entry ({row}, {col}) = {value} is negative or not finite")]
    BadEntry { row: usize, col: usize, value: f64 },
    #[error("diagonal entry {0} is nonzero")]
    NonzeroDiagonal(usize),
    #[error("row {row} sums to {sum}, not 1")]
    NotRowStochastic { row: usize, sum: f64 },
    #[error("interaction graph is not strongly connected")]
    NotStronglyConnected,
    #[error("influence weight {index} = {value} is at or above 1/2: star graph")]
    StarGraphDetected { index: usize, value: f64 },
    #[error("power iteration did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error(transparent)]
    Weights(#[from] SimplexError),
}

/// Row-stochastic, zero-diagonal, nonnegative `n×n` matrix. Entry `(i, j) > 0`
/// is an edge `j → i`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    rows: Vec<Vec<f64>>,
}

impl InteractionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        let n = rows.len();
        if n < 3 {
            return Err(GraphError::Shape {
                rows: n,
                bad_row: 0,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::Shape {
                    rows: n,
                    bad_row: i,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(GraphError::BadEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
            if row[i] != 0.0 {
                return Err(GraphError::NonzeroDiagonal(i));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SUM_TOL {
                return Err(GraphError::NotRowStochastic { row: i, sum });
            }
        }
        Ok(Self { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }
}

fn reaches_all(n: usize, neighbours: impl Fn(usize) -> Vec<usize>) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for w in neighbours(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Strong connectivity of the support graph: node 0 reaches everything and
/// everything reaches node 0.
pub fn validate_connectivity(c: &InteractionMatrix) -> bool {
    let n = c.dim();
    let forward = |j: usize| (0..n).filter(|&i| c.get(i, j) > 0.0).collect();
    let backward = |i: usize| (0..n).filter(|&j| c.get(i, j) > 0.0).collect();
    reaches_all(n, forward) && reaches_all(n, backward)
}

pub fn gamma_from_matrix(c: &InteractionMatrix) -> Result<InfluenceWeights, GraphError> {
    if !validate_connectivity(c) {
        return Err(GraphError::NotStronglyConnected);
    }
    let n = c.dim();
    let mut gamma = vec![1.0 / n as f64; n];
    let mut converged = false;
    for _ in 0..POWER_MAX_ITERS {
        let mut next: Vec<f64> = (0..n)
            .map(|j| {
                let ct: f64 = (0..n).map(|i| c.get(i, j) * gamma[i]).sum();
                0.5 * (gamma[j] + ct)
            })
            .collect();
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|g| *g /= sum);
        let change = gamma.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        gamma = next;
        if change <= POWER_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(GraphError::NoConvergence(POWER_MAX_ITERS));
    }
    if let Some((index, &value)) = gamma.iter().enumerate().find(|(_, &g)| g >= 0.5 - STAR_TOL) {
        return Err(GraphError::StarGraphDetected { index, value });
    }
    Ok(InfluenceWeights::normalized(gamma)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ring(n: usize) -> InteractionMatrix {
        InteractionMatrix::new(
            (0..n)
                .map(|i| {
                    let mut r = vec![0.0; n];
                    r[(i + 1) % n] = 1.0;
                    r
                })
                .collect(),
        )
        .unwrap()
    }

    fn star(n: usize) -> InteractionMatrix {
        let mut rows = vec![vec![0.0; n]; n];
        for row in rows.iter_mut().skip(1) {
            row[0] = 1.0;
        }
        rows[0][1..].fill(1.0 / (n - 1) as f64);
        InteractionMatrix::new(rows).unwrap()
    }

    #[test]
    fn ring_gives_uniform() {
        let g = gamma_from_matrix(&ring(3)).unwrap();
        for &v in g.as_slice() {
            assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn complete_graph_gives_uniform() {
        let n = 5;
        let c = InteractionMatrix::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 0.25 }).collect())
                .collect(),
        )
        .unwrap();
        for &v in gamma_from_matrix(&c).unwrap().as_slice() {
            assert_abs_diff_eq!(v, 0.2, epsilon = 1e-14);
        }
    }

    #[test]
    fn star_is_rejected() {
        match gamma_from_matrix(&star(4)) {
            Err(GraphError::StarGraphDetected { index, value }) => {
                assert_eq!(index, 0);
                assert_abs_diff_eq!(value, 0.5, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn connectivity_examples() {
        assert!(validate_connectivity(&ring(4)));
        let blocks = InteractionMatrix::new(vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(!validate_connectivity(&blocks));
        // nobody listens to node 0
        let absorbing =
            InteractionMatrix::new(vec![vec![0.0, 0.5, 0.5], vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(!validate_connectivity(&absorbing));
        assert_eq!(gamma_from_matrix(&absorbing), Err(GraphError::NotStronglyConnected));
    }

    #[test]
    fn malformed_matrices() {
        assert!(matches!(
            InteractionMatrix::new(vec![vec![0.5, 0.5, 0.0]; 3]),
            Err(GraphError::NonzeroDiagonal(0))
        ));
        assert!(matches!(
            InteractionMatrix::new(vec![vec![0.0, 0.5, 0.4], vec![0.5, 0.0, 0.5], vec![0.5, 0.5, 0.0]]),
            Err(GraphError::NotRowStochastic { row: 0, .. })
        ));
        assert!(matches!(
            InteractionMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            Err(GraphError::Shape { .. })
        ));
    }
}
