//! Counts, hyperparameters, and the correspondence `u_i = (n_i + s t_i) / (n + s)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for simplex membership checks.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Observed category counts `n_i`. Fractional counts are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountVector {
    counts: Vec<f64>,
    total: f64,
}

impl CountVector {
    pub fn new(counts: Vec<f64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in counts.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeCount { index, value });
            }
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// Sample size `n`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// The baseline point `u_i^0 = n_i / (n + s)`.
    pub fn baseline(&self, cfg: &IdmConfig) -> Vec<f64> {
        let denom = self.total + cfg.s();
        self.counts.iter().map(|&n| n / denom).collect()
    }

    /// `true` when every count is a whole number.
    pub fn is_integral(&self) -> bool {
        self.counts.iter().all(|c| c.fract() == 0.0)
    }
}

/// Prior strength `s` of the IDM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdmConfig {
    s: f64,
    limit: bool,
}

impl IdmConfig {
    pub fn new(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidStrength(s));
        }
        Ok(Self { s, limit: false })
    }

    /// The `s -> 0` limit, where every robust interval collapses to a point.
    /// Only meaningful with a positive sample size.
    pub fn zero_strength_limit() -> Self {
        Self { s: 0.0, limit: true }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn is_limit(&self) -> bool {
        self.limit
    }
}

impl Default for IdmConfig {
    fn default() -> Self {
        Self { s: 1.0, limit: false }
    }
}

/// A point `t` of the closed probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    t: Vec<f64>,
}

impl SimplexPoint {
    /// Validates against [`SIMPLEX_TOL`]; tiny negative entries are clamped
    /// to zero and the result is renormalized.
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in t.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
        }
        if !validate_simplex(&t, SIMPLEX_TOL) {
            return Err(Error::NotOnSimplex);
        }
        Ok(Self::normalized(t))
    }

    fn normalized(mut t: Vec<f64>) -> Self {
        for x in t.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let sum: f64 = t.iter().sum();
        if sum != 1.0 {
            for x in t.iter_mut() {
                *x /= sum;
            }
        }
        Self { t }
    }

    /// Wraps weights already known to be non-negative and normalized.
    pub(crate) fn from_weights(t: Vec<f64>) -> Self {
        debug_assert!(validate_simplex(&t, SIMPLEX_TOL));
        Self { t }
    }

    /// The vertex `t_j = delta_ij`.
    pub fn vertex(dim: usize, i: usize) -> Self {
        assert!(i < dim, "vertex index {i} out of range for dimension {dim}");
        let mut t = vec![0.0; dim];
        t[i] = 1.0;
        Self { t }
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0);
        Self { t: vec![1.0 / dim as f64; dim] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.t
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    /// Index of the single non-zero coordinate, if `t` is a vertex.
    pub fn vertex_index(&self) -> Option<usize> {
        let mut nonzero = self.t.iter().enumerate().filter(|(_, &x)| x > 0.0);
        match (nonzero.next(), nonzero.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }
}

/// Posterior mean `u` together with the baseline `u^0` and `sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorMean {
    pub u: Vec<f64>,
    pub u0: Vec<f64>,
    pub sigma: f64,
}

impl PosteriorMean {
    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// An ordered pair `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    /// # Panics
    /// If `lower > upper` or either end is NaN.
    pub fn new(lower: f64, upper: f64) -> Self {
        assert!(lower <= upper, "interval [{lower}, {upper}] is not ordered");
        Self { lower, upper }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    /// Containment with slack `tol` on both ends.
    pub fn contains_interval_tol(&self, other: &Interval, tol: f64) -> bool {
        self.lower - tol <= other.lower && other.upper <= self.upper + tol
    }
}

/// Maps a hyperparameter `t` to the posterior mean `u`.
pub fn u_from_t(counts: &CountVector, cfg: &IdmConfig, t: &SimplexPoint) -> Result<PosteriorMean> {
    if t.dim() != counts.dim() {
        return Err(Error::DimensionMismatch { expected: counts.dim(), got: t.dim() });
    }
    let s = cfg.s();
    let denom = counts.total() + s;
    if denom <= 0.0 || denom.is_nan() {
        return Err(Error::InvalidStrength(s));
    }
    let u0 = counts.baseline(cfg);
    let u = counts
        .counts()
        .iter()
        .zip(t.as_slice())
        .map(|(&n, &ti)| (n + s * ti) / denom)
        .collect();
    Ok(PosteriorMean { u, u0, sigma: sigma_of(counts, cfg) })
}

/// `sigma = s / (n + s)`, the width scale of every robust interval.
pub fn sigma_of(counts: &CountVector, cfg: &IdmConfig) -> f64 {
    if cfg.s() == 0.0 {
        return 0.0;
    }
    cfg.s() / (counts.total() + cfg.s())
}

/// `true` iff all components are `>= -tol` and the sum is within `tol` of one.
pub fn validate_simplex(t: &[f64], tol: f64) -> bool {
    if t.is_empty() || t.iter().any(|x| !x.is_finite()) {
        return false;
    }
    t.iter().all(|&x| x >= -tol) && (t.iter().sum::<f64>() - 1.0).abs() <= tol
}
