//! Conservative first-order bounds for general `F` on the IDM posterior means.
//!
//! Expanding around `t = 0` (the point `u^0`, just outside the simplex) gives
//! `F(u) = F(u^0) + sigma * sum_i dF/du_i(u') t_i` for some `u'` in the
//! extended set `{u_i >= u_i^0, sum u <= 1}`. Bounding each partial
//! derivative over that set yields an outer interval that is off by at most
//! `O(sigma^2)`; evaluating `F` at the selected vertices gives the matching
//! inner bounds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrema::{ConcaveSummand, Curvature};
use crate::simplex::{sigma_of, u_from_t, CountVector, IdmConfig, Interval, SimplexPoint};

/// The extended region `{u : u_i >= u_i^0, sum_i u_i <= 1}`; its projection on
/// every axis is `[u_i^0, u_i^0 + sigma]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSimplex {
    pub u0: Vec<f64>,
    pub sigma: f64,
}

impl ExtendedSimplex {
    pub fn new(counts: &CountVector, cfg: &IdmConfig) -> Self {
        Self { u0: counts.baseline(cfg), sigma: sigma_of(counts, cfg) }
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    /// Axis range `[u_i^0, u_i^0 + sigma]`.
    pub fn axis(&self, i: usize) -> (f64, f64) {
        (self.u0[i], self.u0[i] + self.sigma)
    }
}

/// Bounds on the partial derivatives of `F` over an [`ExtendedSimplex`].
///
/// Implementations must be re-entrant. A provider that cannot extremize over
/// the extended simplex exactly may bound over the enclosing box instead and
/// report it through [`DerivativeBounds::uses_box`].
pub trait DerivativeBounds {
    fn value(&self, u: &[f64]) -> f64;
    fn partial_max(&self, i: usize, region: &ExtendedSimplex) -> f64;
    fn partial_min(&self, i: usize, region: &ExtendedSimplex) -> f64;
    fn uses_box(&self) -> bool {
        false
    }
}

impl DerivativeBounds for ConcaveSummand<'_> {
    fn value(&self, u: &[f64]) -> f64 {
        self.sum(u)
    }

    fn partial_max(&self, i: usize, region: &ExtendedSimplex) -> f64 {
        let (lo, hi) = region.axis(i);
        match self.curvature() {
            Curvature::Concave => self.derivative(lo),
            Curvature::Convex => self.derivative(hi),
        }
    }

    fn partial_min(&self, i: usize, region: &ExtendedSimplex) -> f64 {
        let (lo, hi) = region.axis(i);
        match self.curvature() {
            Curvature::Concave => self.derivative(hi),
            Curvature::Convex => self.derivative(lo),
        }
    }
}

type ValueFn<'a> = Box<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>;
type RangeFn<'a> = Box<dyn Fn(usize, &ExtendedSimplex) -> (f64, f64) + Send + Sync + 'a>;

/// A provider assembled from closures: `value(u)` and
/// `partial_range(i, region) -> (min, max)`.
pub struct ClosureBounds<'a> {
    value: ValueFn<'a>,
    partial_range: RangeFn<'a>,
    boxed: bool,
}

impl fmt::Debug for ClosureBounds<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosureBounds").field("boxed", &self.boxed).finish_non_exhaustive()
    }
}

impl<'a> ClosureBounds<'a> {
    pub fn new<V, R>(value: V, partial_range: R) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'a,
        R: Fn(usize, &ExtendedSimplex) -> (f64, f64) + Send + Sync + 'a,
    {
        Self { value: Box::new(value), partial_range: Box::new(partial_range), boxed: false }
    }

    /// Marks the derivative ranges as taken over the box `[u^0, u^0 + sigma]`.
    pub fn over_box(mut self) -> Self {
        self.boxed = true;
        self
    }
}

impl DerivativeBounds for ClosureBounds<'_> {
    fn value(&self, u: &[f64]) -> f64 {
        (self.value)(u)
    }

    fn partial_max(&self, i: usize, region: &ExtendedSimplex) -> f64 {
        (self.partial_range)(i, region).1
    }

    fn partial_min(&self, i: usize, region: &ExtendedSimplex) -> f64 {
        (self.partial_range)(i, region).0
    }

    fn uses_box(&self) -> bool {
        self.boxed
    }
}

/// Outer and inner bounds on `[min F, max F]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustEstimate {
    /// `F(u^0)`.
    pub f0: f64,
    pub r_ub_per_i: Vec<f64>,
    pub r_lb_per_i: Vec<f64>,
    pub r_ub: f64,
    pub r_lb: f64,
    /// `F` at the vertex `i1`, a lower bound on `max F`.
    pub inner_upper: f64,
    /// `F` at the vertex `i2`, an upper bound on `min F`.
    pub inner_lower: f64,
    pub i1: usize,
    pub i2: usize,
    pub sigma: f64,
    /// `F` at every vertex `t = e_i`.
    pub vertex_values: Vec<f64>,
    /// Caller-certified `F >= 0` and `dF/du_i >= 0` on the extended simplex.
    pub nonnegative: bool,
    /// Derivative bounds were taken over the enclosing box.
    pub enlarged_to_box: bool,
}

fn first_argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

fn first_argmin(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x < xs[best] {
            best = i;
        }
    }
    best
}

impl RobustEstimate {
    fn assemble(
        f0: f64,
        r_ub_per_i: Vec<f64>,
        r_lb_per_i: Vec<f64>,
        vertex_values: Vec<f64>,
        sigma: f64,
        enlarged_to_box: bool,
    ) -> Result<Self> {
        for (index, (&ub, &lb)) in r_ub_per_i.iter().zip(&r_lb_per_i).enumerate() {
            if !ub.is_finite() || !lb.is_finite() {
                return Err(Error::UnboundedDerivative { index });
            }
        }
        if !f0.is_finite() {
            return Err(Error::NonFinite { index: 0, value: f0 });
        }
        let i1 = first_argmax(&r_ub_per_i);
        let i2 = first_argmin(&r_lb_per_i);
        Ok(Self {
            f0,
            r_ub: r_ub_per_i[i1],
            r_lb: r_lb_per_i[i2],
            inner_upper: vertex_values[i1],
            inner_lower: vertex_values[i2],
            i1,
            i2,
            r_ub_per_i,
            r_lb_per_i,
            sigma,
            vertex_values,
            nonnegative: false,
            enlarged_to_box,
        })
    }

    pub fn dim(&self) -> usize {
        self.r_ub_per_i.len()
    }

    /// `[F0 + F_R^lb, F0 + F_R^ub]`, guaranteed to contain `[min F, max F]`.
    pub fn conservative(&self) -> Interval {
        Interval::new(self.f0 + self.r_lb, self.f0 + self.r_ub)
    }

    /// `(F(u^2), F(u^1))`. Not necessarily ordered for arbitrary `F`.
    pub fn inner(&self) -> (f64, f64) {
        (self.inner_lower, self.inner_upper)
    }

    /// `F0 + r_lb <= F(u^2) <= F(u^1) <= F0 + r_ub`, up to `tol`.
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        self.f0 + self.r_lb <= self.inner_lower + tol
            && self.inner_lower <= self.inner_upper + tol
            && self.inner_upper <= self.f0 + self.r_ub + tol
    }

    /// Certifies `F >= 0` with non-negative partial derivatives, as required
    /// by [`propagate_product`]. Checks the necessary conditions visible on
    /// the estimate; the rest is the caller's analytic knowledge.
    pub fn certify_nonnegative(mut self) -> Result<Self> {
        let visible_ok = self.f0 >= 0.0
            && self.r_lb_per_i.iter().all(|&x| x >= 0.0)
            && self.vertex_values.iter().all(|&x| x >= 0.0);
        if !visible_ok {
            return Err(Error::NotCertifiedNonNegative);
        }
        self.nonnegative = true;
        Ok(self)
    }
}

fn vertex_values(counts: &CountVector, cfg: &IdmConfig, value: &dyn Fn(&[f64]) -> f64) -> Result<Vec<f64>> {
    (0..counts.dim())
        .map(|i| Ok(value(&u_from_t(counts, cfg, &SimplexPoint::vertex(counts.dim(), i))?.u)))
        .collect()
}

/// Outer bounds from per-coordinate derivative extremes supplied by `provider`.
pub fn approx_interval_general(
    counts: &CountVector,
    cfg: &IdmConfig,
    provider: &dyn DerivativeBounds,
) -> Result<RobustEstimate> {
    let region = ExtendedSimplex::new(counts, cfg);
    let sigma = region.sigma;
    let d = region.dim();
    let mut ub = Vec::with_capacity(d);
    let mut lb = Vec::with_capacity(d);
    for i in 0..d {
        let hi = provider.partial_max(i, &region);
        let lo = provider.partial_min(i, &region);
        if !hi.is_finite() || !lo.is_finite() {
            return Err(Error::UnboundedDerivative { index: i });
        }
        ub.push(sigma * hi);
        lb.push(sigma * lo);
    }
    let f0 = provider.value(&region.u0);
    let verts = vertex_values(counts, cfg, &|u| provider.value(u))?;
    RobustEstimate::assemble(f0, ub, lb, verts, sigma, provider.uses_box())
}

/// Bounds for separable `F = sum_i f(u_i)`: `sigma f'(u_i^0)` and
/// `sigma f'(u_i^0 + sigma)` per component for concave `f`.
pub fn concave_remainder_bounds(counts: &CountVector, cfg: &IdmConfig, f: &ConcaveSummand) -> Result<RobustEstimate> {
    approx_interval_general(counts, cfg, f)
}

fn compatible(g: &RobustEstimate, h: &RobustEstimate) -> Result<()> {
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: h.dim() });
    }
    if (g.sigma - h.sigma).abs() > 1e-15 * g.sigma.max(1.0) {
        return Err(Error::Incompatible("sigma differs"));
    }
    Ok(())
}

/// Bounds for `alpha G + beta H` with `alpha, beta >= 0`.
///
/// Per-component remainders are combined before taking max/min; combining
/// the aggregates instead would lose `O(sigma)`.
pub fn propagate_sum(g: &RobustEstimate, h: &RobustEstimate, alpha: f64, beta: f64) -> Result<RobustEstimate> {
    for w in [alpha, beta] {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::Domain { value: w, domain: "sum weights must be >= 0" });
        }
    }
    compatible(g, h)?;
    let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect::<Vec<_>>();
    let mut out = RobustEstimate::assemble(
        alpha * g.f0 + beta * h.f0,
        mix(&g.r_ub_per_i, &h.r_ub_per_i),
        mix(&g.r_lb_per_i, &h.r_lb_per_i),
        mix(&g.vertex_values, &h.vertex_values),
        g.sigma,
        g.enlarged_to_box || h.enlarged_to_box,
    )?;
    out.nonnegative = g.nonnegative && h.nonnegative;
    Ok(out)
}

/// Bounds for `G * H` with both operands certified non-negative and
/// non-decreasing.
pub fn propagate_product(g: &RobustEstimate, h: &RobustEstimate) -> Result<RobustEstimate> {
    if !g.nonnegative || !h.nonnegative {
        return Err(Error::NotCertifiedNonNegative);
    }
    compatible(g, h)?;
    // extremes of each factor over the extended simplex (t summing to <= 1)
    let g_max = g.f0 + g.r_ub.max(0.0);
    let h_max = h.f0 + h.r_ub.max(0.0);
    let g_min = g.f0 + g.r_lb.min(0.0);
    let h_min = h.f0 + h.r_lb.min(0.0);
    let ub = g.r_ub_per_i.iter().zip(&h.r_ub_per_i).map(|(gi, hi)| gi * h_max + g_max * hi).collect();
    let lb = g.r_lb_per_i.iter().zip(&h.r_lb_per_i).map(|(gi, hi)| gi * h_min + g_min * hi).collect();
    let verts = g.vertex_values.iter().zip(&h.vertex_values).map(|(a, b)| a * b).collect();
    let mut out = RobustEstimate::assemble(g.f0 * h.f0, ub, lb, verts, g.sigma, g.enlarged_to_box || h.enlarged_to_box)?;
    out.nonnegative = true;
    Ok(out)
}
