//! Points of the unit simplex, the corner-excluding shrunken simplex, influence
//! weights, and coordinate permutations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

/// Absolute tolerance for "sums to one".
pub const SUM_TOL: f64 = 1e-12;

/// Most negative entry accepted (and clamped to zero) on construction.
pub const NEGATIVE_TOL: f64 = 1e-12;

/// Default corner-exclusion margin.
pub const DEFAULT_DELTA: f64 = 1e-9;

/// Band below 1/2 inside which a weight is treated as the star-graph case.
pub const STAR_TOL: f64 = 1e-12;

const MIN_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("entries sum to zero")]
    ZeroSum,
    #[error("dimension {0} is below the minimum of 3")]
    DimensionTooSmall(usize),
    #[error("delta {delta} must lie in (0, 1/{n})")]
    BadDelta { delta: f64, n: usize },
    #[error("influence weight {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("influence weights sum to {0}, not 1")]
    WeightsNotNormalized(f64),
    #[error("influence weight {index} = {value} is at or above 1/2 (star-graph case)")]
    StarGraphWeight { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
}

/// A point of the unit simplex: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Clamps tiny negatives to zero and renormalizes onto the simplex.
    pub fn new(raw: Vec<f64>) -> Result<Self, SimplexError> {
        if raw.len() < MIN_DIM {
            return Err(SimplexError::DimensionTooSmall(raw.len()));
        }
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(SimplexError::NonFinite { index });
            }
            if value < -NEGATIVE_TOL {
                return Err(SimplexError::NegativeEntry { index, value });
            }
        }
        let mut coords = raw;
        for c in coords.iter_mut() {
            *c = c.max(0.0);
        }
        let sum: f64 = coords.iter().sum();
        if sum <= 0.0 {
            return Err(SimplexError::ZeroSum);
        }
        for c in coords.iter_mut() {
            *c = (*c / sum).min(1.0);
        }
        Ok(Self { coords })
    }

    /// Wraps coordinates already known to be nonnegative with positive sum.
    pub(crate) fn from_nonnegative(mut coords: Vec<f64>) -> Self {
        let sum: f64 = coords.iter().sum();
        debug_assert!(sum > 0.0);
        for c in coords.iter_mut() {
            *c = (*c / sum).min(1.0);
        }
        Self { coords }
    }

    /// Wraps coordinates the caller has already placed on the simplex.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn barycenter(n: usize) -> Result<Self, SimplexError> {
        Self::new(vec![1.0; n])
    }

    /// The corner e_i (0-based).
    pub fn vertex(n: usize, i: usize) -> Result<Self, SimplexError> {
        if n < MIN_DIM {
            return Err(SimplexError::DimensionTooSmall(n));
        }
        assert!(i < n, "vertex index {i} out of range for n = {n}");
        let mut coords = vec![0.0; n];
        coords[i] = 1.0;
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    pub fn max_coord(&self) -> f64 {
        self.coords.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the corner this point sits on, if any.
    pub fn corner_index(&self) -> Option<usize> {
        self.coords.iter().position(|&c| c == 1.0)
    }

    pub fn sup_distance(&self, other: &SimplexPoint) -> f64 {
        sup_norm_diff(&self.coords, &other.coords)
    }

    pub fn l1_distance(&self, other: &SimplexPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).sum()
    }
}

pub(crate) fn sup_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// The shrunken simplex: simplex points with every coordinate at most `1 - delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrunkenSimplex {
    delta: f64,
}

impl ShrunkenSimplex {
    pub fn new(delta: f64) -> Result<Self, SimplexError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(SimplexError::BadDelta { delta, n: 1 });
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn contains(&self, x: &SimplexPoint) -> bool {
        let sum: f64 = x.coords.iter().sum();
        (sum - 1.0).abs() <= SUM_TOL && x.coords.iter().all(|&c| c >= 0.0) && x.max_coord() <= 1.0 - self.delta
    }
}

impl Default for ShrunkenSimplex {
    fn default() -> Self {
        Self { delta: DEFAULT_DELTA }
    }
}

/// Deterministic, exchangeable samples from the interior of the shrunken simplex.
///
/// Exponential draws are renormalized (a flat Dirichlet sample) and rejected when
/// any coordinate exceeds `1 - delta`.
pub fn sample_interior(n: usize, count: usize, seed: u64, delta: f64) -> Result<Vec<SimplexPoint>, SimplexError> {
    if n < MIN_DIM {
        return Err(SimplexError::DimensionTooSmall(n));
    }
    if !(delta > 0.0 && delta < 1.0 / n as f64) {
        return Err(SimplexError::BadDelta { delta, n });
    }
    let domain = ShrunkenSimplex { delta };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let draw: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
        if draw.iter().sum::<f64>() <= 0.0 {
            continue;
        }
        let p = SimplexPoint::from_nonnegative(draw);
        if domain.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// The influence vector: positive, summing to one, every entry below 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceWeights {
    gamma: Vec<f64>,
}

impl InfluenceWeights {
    pub fn new(gamma: Vec<f64>) -> Result<Self, SimplexError> {
        if gamma.len() < MIN_DIM {
            return Err(SimplexError::DimensionTooSmall(gamma.len()));
        }
        for (index, &value) in gamma.iter().enumerate() {
            if !value.is_finite() {
                return Err(SimplexError::NonFinite { index });
            }
            if value <= 0.0 {
                return Err(SimplexError::NonPositiveWeight { index, value });
            }
        }
        let sum: f64 = gamma.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(SimplexError::WeightsNotNormalized(sum));
        }
        if let Some((index, &value)) = gamma.iter().enumerate().find(|(_, &g)| g >= 0.5 - STAR_TOL) {
            return Err(SimplexError::StarGraphWeight { index, value });
        }
        Ok(Self { gamma })
    }

    /// Scales a positive vector to unit sum, then validates.
    pub fn normalized(raw: Vec<f64>) -> Result<Self, SimplexError> {
        let sum: f64 = raw.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(SimplexError::ZeroSum);
        }
        Self::new(raw.into_iter().map(|g| g / sum).collect())
    }

    pub fn uniform(n: usize) -> Result<Self, SimplexError> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// Random admissible weights: flat Dirichlet draws rejected until all entries are below 1/2.
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Result<Self, SimplexError> {
        if n < MIN_DIM {
            return Err(SimplexError::DimensionTooSmall(n));
        }
        loop {
            let draw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
            if draw.iter().any(|&g| g <= 0.0) {
                continue;
            }
            if let Ok(w) = Self::normalized(draw) {
                return Ok(w);
            }
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Weights relabelled by `p`, so that `γ'[p(i)] = γ[i]`.
    pub fn permuted(&self, p: &Permutation) -> Result<Self, SimplexError> {
        Ok(Self {
            gamma: p.apply(&self.gamma)?,
        })
    }
}

/// A bijection on `0..n`; `p[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self, SimplexError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &j in &image {
            if j >= n || seen[j] {
                return Err(SimplexError::NotAPermutation(n));
            }
            seen[j] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(a, b);
        Self { image }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: other.image.iter().map(|&j| self.image[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            image[j] = i;
        }
        Permutation { image }
    }

    /// Moves entry `i` to position `p(i)`.
    pub fn apply<T: Copy + Default>(&self, v: &[T]) -> Result<Vec<T>, SimplexError> {
        if v.len() != self.image.len() {
            return Err(SimplexError::DimensionMismatch {
                expected: self.image.len(),
                got: v.len(),
            });
        }
        let mut out = vec![T::default(); v.len()];
        for (i, &j) in self.image.iter().enumerate() {
            out[j] = v[i];
        }
        Ok(out)
    }
}

/// Reorders the coordinates of `x` by `p`; no renormalization is needed.
pub fn permute(p: &Permutation, x: &SimplexPoint) -> Result<SimplexPoint, SimplexError> {
    Ok(SimplexPoint {
        coords: p.apply(&x.coords)?,
    })
}
