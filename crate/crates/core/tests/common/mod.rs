//! Independent oracles and generators shared by the integration suites.
#![allow(dead_code)]

use dfcert::{InfluenceWeights, SimplexPoint};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_weights(n: usize, rng: &mut impl Rng) -> InfluenceWeights {
    InfluenceWeights::random(n, rng).unwrap()
}

/// Uniform on the simplex, rejected until every coordinate is at most `1 - margin`.
pub fn random_point(n: usize, margin: f64, rng: &mut impl Rng) -> SimplexPoint {
    loop {
        let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let p = SimplexPoint::new(raw).unwrap();
        if p.max_coord() <= 1.0 - margin {
            return p;
        }
    }
}

/// `α(x) γ_i / (1 − x_i)` evaluated literally.
pub fn direct_map(gamma: &[f64], x: &[f64]) -> Vec<f64> {
    let w: Vec<f64> = gamma.iter().zip(x).map(|(g, xi)| g / (1.0 - xi)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    match n {
        0 => 1.0,
        1 => m[(0, 0)],
        _ => (0..n)
            .map(|c| {
                let minor = m.clone().remove_row(0).remove_column(c);
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, c)] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// Coefficients of `det(λI − M)`, highest degree first, via Faddeev–LeVerrier.
pub fn char_poly(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![1.0];
    let mut mk = DMatrix::<f64>::zeros(n, n);
    let id = DMatrix::<f64>::identity(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        mk = m * (&mk + &id * c_prev);
        let c = -mk.trace() / k as f64;
        coeffs.push(c);
        c_prev = c;
    }
    coeffs
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// All roots of a monic polynomial by Durand–Kerner, polished with Newton steps.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let delta = horner(coeffs, roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    let deriv: Vec<f64> = coeffs[..deg]
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (deg - k) as f64)
        .collect();
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let d = horner(&deriv, *r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= horner(coeffs, *r) / d;
        }
    }
    roots
}

/// Real eigenvalues of a small matrix via its characteristic polynomial, ascending.
pub fn charpoly_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut re: Vec<f64> = poly_roots(&char_poly(m))
        .into_iter()
        .map(|z| {
            assert!(z.im.abs() < 1e-7, "complex root {z}");
            z.re
        })
        .collect();
    re.sort_by(f64::total_cmp);
    re
}

pub fn max_multiset_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

/// Random fully supported interaction matrix: positive off-diagonal entries, rows summing to 1.
pub fn random_interaction(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let raw: Vec<f64> = (0..n)
                .map(|j| if i == j { 0.0 } else { rng.random_range(0.05..1.0) })
                .collect();
            let s: f64 = raw.iter().sum();
            let mut row: Vec<f64> = raw.iter().map(|v| v / s).collect();
            // force an exact unit row sum
            let last = if i == n - 1 { n - 2 } else { n - 1 };
            let rest: f64 = row.iter().enumerate().filter(|&(j, _)| j != last).map(|(_, v)| v).sum();
            row[last] = 1.0 - rest;
            row
        })
        .collect()
}
