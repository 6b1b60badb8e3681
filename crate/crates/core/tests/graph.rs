mod common;

use common::{random_interaction, rng};
use dfcert::{gamma_from_matrix, GraphError, InteractionMatrix, Permutation};
use rand::seq::SliceRandom;
use rand::Rng;

fn left_residual(c: &InteractionMatrix, gamma: &[f64]) -> f64 {
    let n = c.dim();
    (0..n)
        .map(|j| ((0..n).map(|i| gamma[i] * c.get(i, j)).sum::<f64>() - gamma[j]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn random_graphs_give_left_eigenvectors() {
    let mut r = rng(42);
    for _ in 0..100 {
        let n = r.random_range(3..=10);
        let c = InteractionMatrix::new(random_interaction(n, &mut r)).unwrap();
        match gamma_from_matrix(&c) {
            Ok(g) => {
                assert!(left_residual(&c, g.as_slice()) <= 1e-11);
                assert!(g.as_slice().iter().all(|&v| v > 0.0 && v < 0.5));
                assert!((g.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
            Err(GraphError::StarGraphDetected { value, .. }) => assert!(value >= 0.5 - 1e-12),
            Err(e) => panic!("unexpected {e}"),
        }
    }
}

#[test]
fn gamma_is_permutation_equivariant() {
    let mut r = rng(43);
    for _ in 0..50 {
        let n = r.random_range(3..=8);
        let rows = random_interaction(n, &mut r);
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(&mut r);
        let p = Permutation::new(image.clone()).unwrap();
        // (P C Pᵀ)[p(i)][p(j)] = C[i][j]
        let mut permuted = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                permuted[image[i]][image[j]] = rows[i][j];
            }
        }
        let g = gamma_from_matrix(&InteractionMatrix::new(rows).unwrap()).unwrap();
        let gp = gamma_from_matrix(&InteractionMatrix::new(permuted).unwrap()).unwrap();
        let expected = p.apply(g.as_slice()).unwrap();
        for (a, b) in gp.as_slice().iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-11);
        }
    }
}

#[test]
fn near_star_topology_is_admitted() {
    // leaves also listen a little to each other, so the centre stays below 1/2
    let n = 4;
    let mut rows = vec![vec![0.0; n]; n];
    rows[0][1..].fill(1.0 / 3.0);
    rows[0][3] = 1.0 - 2.0 / 3.0;
    for (i, row) in rows.iter_mut().enumerate().skip(1) {
        row[0] = 0.8;
        let other = if i == 1 { 2 } else { 1 };
        row[other] = 0.2;
    }
    let g = gamma_from_matrix(&InteractionMatrix::new(rows).unwrap()).unwrap();
    assert!(g.as_slice()[0] < 0.5);
    assert!(g.as_slice()[0] > g.as_slice()[1]);
}
