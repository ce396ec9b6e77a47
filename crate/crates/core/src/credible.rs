//! Robust credible sets.
//!
//! A robust `alpha`-credible set must cover the quantity with probability at
//! least `alpha` under every posterior in the IDM. The general minimal set is
//! hard; this module provides the solvable cases: the triangular location
//! family `p_t(x) = max(0, 1 - |x - t|)` for `t` in `[-gamma, gamma]`, one-sided
//! bounds, and a Gaussian approximation for expected mutual information.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutual_info::{mi_interval_bounds, mi_variance_leading, ContingencyCounts};
use crate::simplex::{IdmConfig, Interval, SimplexPoint};
use crate::special::kappa_from_alpha;

/// Coverage level and its Gaussian multiplier, `alpha = erf(kappa / sqrt 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleSpec {
    pub alpha: f64,
    pub kappa: f64,
}

impl CredibleSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self { alpha, kappa: kappa_from_alpha(alpha)? })
    }
}

/// Triangular densities translated by `t` in `[-gamma, gamma]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangularFamily {
    gamma: f64,
}

impl TriangularFamily {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn union(&self, alpha: f64) -> Result<Interval> {
        triangular_robust_union(self.gamma, alpha)
    }

    pub fn minimal(&self, alpha: f64) -> Result<Interval> {
        triangular_minimal_robust(self.gamma, alpha)
    }

    /// Lower end of the robust one-sided interval `[a, inf)`.
    pub fn one_sided(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(triangular_one_sided(-self.gamma, alpha))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::Domain { value: alpha, domain: "alpha must lie in [0.5, 1)" });
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain { value: gamma, domain: "gamma must be positive" });
    }
    Ok(())
}

/// `p_t(x) = max(0, 1 - |x - t|)`.
pub fn triangular_density(t: f64, x: f64) -> f64 {
    (1.0 - (x - t).abs()).max(0.0)
}

/// Mass of `[a, b]` under `p_t`.
pub fn triangular_mass(t: f64, a: f64, b: f64) -> Result<f64> {
    if a > b || a.is_nan() || b.is_nan() {
        return Err(Error::Domain { value: a, domain: "interval start must not exceed its end" });
    }
    let clamp = |x: f64| (x - t).clamp(-1.0, 1.0);
    let primitive = |y: f64| y * (1.0 - 0.5 * y.abs());
    Ok((primitive(clamp(b)) - primitive(clamp(a))).clamp(0.0, 1.0))
}

/// Shortest interval of `p_t` with mass `alpha`.
pub fn triangular_shortest_interval(t: f64, alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    let r = 1.0 - (1.0 - alpha).sqrt();
    Ok(Interval::new(t - r, t + r))
}

/// Union of the shortest intervals over `t` in `[-gamma, gamma]`.
pub fn triangular_robust_union(gamma: f64, alpha: f64) -> Result<Interval> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    let r = gamma + 1.0 - (1.0 - alpha).sqrt();
    Ok(Interval::new(-r, r))
}

/// Shortest symmetric interval with mass at least `alpha` under every `p_t`.
pub fn triangular_minimal_robust(gamma: f64, alpha: f64) -> Result<Interval> {
    check_gamma(gamma)?;
    check_alpha(alpha)?;
    let r = if gamma * gamma <= 0.5 * (1.0 - alpha) {
        let radicand = 1.0 - alpha - gamma * gamma;
        assert!(radicand >= 0.0);
        1.0 - radicand.sqrt()
    } else {
        gamma + 1.0 - (2.0 * (1.0 - alpha)).sqrt()
    };
    Ok(Interval::new(-r, r))
}

/// `a_t` with `p_t([a_t, inf)) = alpha`.
pub fn triangular_one_sided(t: f64, alpha: f64) -> f64 {
    t - 1.0 + (2.0 * (1.0 - alpha)).sqrt()
}

/// `min_t a_t` over the grid: `[a_min, inf)` covers under every grid `t`.
pub fn one_sided_robust_bound(per_t_lower: &dyn Fn(f64) -> f64, t_grid: &[f64]) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(Error::Empty);
    }
    let mut best = f64::INFINITY;
    for (index, &t) in t_grid.iter().enumerate() {
        let a = per_t_lower(t);
        if !a.is_finite() {
            return Err(Error::NonFinite { index, value: a });
        }
        best = best.min(a);
    }
    Ok(best)
}

/// Both sides of the union bound `max_t (E_t + dx_t) <= max_t E_t + max_t dx_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnionBound {
    pub exact: f64,
    pub bound: f64,
}

pub fn union_upper_bound(centers: &[f64], half_widths: &[f64]) -> Result<UnionBound> {
    if centers.is_empty() {
        return Err(Error::Empty);
    }
    if centers.len() != half_widths.len() {
        return Err(Error::DimensionMismatch { expected: centers.len(), got: half_widths.len() });
    }
    let max = |xs: &mut dyn Iterator<Item = f64>| xs.fold(f64::NEG_INFINITY, f64::max);
    Ok(UnionBound {
        exact: max(&mut centers.iter().zip(half_widths).map(|(e, d)| e + d)),
        bound: max(&mut centers.iter().copied()) + max(&mut half_widths.iter().copied()),
    })
}

/// Approximate robust credible interval for mutual information:
/// `[I0 + I_R^lb - kappa sd, I0 + I_R^ub + kappa sd]`, with the standard
/// deviation from the leading variance term at `t_star`. Not guaranteed
/// conservative: the variance is only the leading-order term and is held at
/// a single `t_star`.
pub fn robust_credible_mi(
    tbl: &ContingencyCounts,
    cfg: &IdmConfig,
    spec: &CredibleSpec,
    t_star: &SimplexPoint,
) -> Result<Interval> {
    let sd = mi_variance_leading(tbl, cfg, t_star)?.sqrt();
    let b = mi_interval_bounds(tbl, cfg)?;
    Ok(Interval::new(b.i0 + b.r_lb - spec.kappa * sd, b.i0 + b.r_ub + spec.kappa * sd))
}
