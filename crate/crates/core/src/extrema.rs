//! Exact extrema of separable `F(u) = sum_i f(u_i)` over the shifted simplex
//! `{u : u_i >= n_i/(n+s), sum u = 1}` for concave (or convex) `f`.
//!
//! For concave `f` the minimum sits at the vertex that adds all prior mass
//! to the most frequent category. The maximum is found by water-filling:
//! lift the smallest `u_i` to a common level `u~` chosen as
//! `min_m (s + sum_{k<=m} n_(k)) / (m (n + s))` over the ascending order
//! statistics `n_(k)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{u_from_t, CountVector, IdmConfig, Interval, PosteriorMean, SimplexPoint};
use crate::special::EntropyKernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Concave,
    Convex,
}

impl Curvature {
    fn sign(self) -> f64 {
        match self {
            Curvature::Concave => 1.0,
            Curvature::Convex => -1.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Curvature::Concave => "concave",
            Curvature::Convex => "convex",
        }
    }
}

type Scalar<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;

/// A summand `f` on `[0, 1]` with its derivative and declared curvature.
///
/// The closures must be re-entrant; they may be called from several threads.
pub struct ConcaveSummand<'a> {
    eval: Scalar<'a>,
    deriv: Scalar<'a>,
    curvature: Curvature,
}

impl fmt::Debug for ConcaveSummand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConcaveSummand").field("curvature", &self.curvature).finish_non_exhaustive()
    }
}

impl<'a> ConcaveSummand<'a> {
    /// Spot-checks that `deriv` is monotone in the direction implied by
    /// `curvature` on ten interior points of `[0, 1]`.
    pub fn new<F, D>(eval: F, deriv: D, curvature: Curvature) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'a,
        D: Fn(f64) -> f64 + Send + Sync + 'a,
    {
        let sign = curvature.sign();
        let slopes: Vec<f64> = (0..10).map(|k| sign * deriv((k as f64 + 0.5) / 10.0)).collect();
        let monotone = slopes.windows(2).all(|w| {
            let slack = 1e-12 * w[0].abs().max(1.0);
            w[1] <= w[0] + slack
        });
        if !monotone || slopes.iter().any(|x| x.is_nan()) {
            return Err(Error::CurvatureMismatch { declared: curvature.name() });
        }
        Ok(Self { eval: Box::new(eval), deriv: Box::new(deriv), curvature })
    }

    /// The expected-entropy summand `h` for the given kernel.
    pub fn entropy(kernel: EntropyKernel) -> Self {
        Self {
            eval: Box::new(move |u| kernel.value(u)),
            deriv: Box::new(move |u| kernel.derivative(u)),
            curvature: Curvature::Concave,
        }
    }

    pub fn value(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        (self.deriv)(u)
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    /// `sum_i f(u_i)`.
    pub fn sum(&self, u: &[f64]) -> f64 {
        u.iter().map(|&x| self.value(x)).sum()
    }
}

/// An extremum of a separable objective and the point attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumResult {
    pub value: f64,
    pub u_star: PosteriorMean,
    pub t_star: SimplexPoint,
    /// Set when `t_star` is a vertex.
    pub vertex_index: Option<usize>,
    /// Number of lifted categories in the water-filling solution.
    pub m_star: Option<usize>,
    /// Common level of the lifted categories.
    pub water_level: Option<f64>,
}

/// Index of the largest count; ties go to the smallest index.
fn argmax_count(counts: &[f64]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// `u~(m)` for `m = 1..=d` over counts sorted ascending (stable).
pub fn water_level_profile(counts: &CountVector, cfg: &IdmConfig) -> Vec<f64> {
    let (_, profile) = sorted_profile(counts, cfg);
    profile
}

fn sorted_profile(counts: &CountVector, cfg: &IdmConfig) -> (Vec<usize>, Vec<f64>) {
    let n = counts.counts();
    let mut order: Vec<usize> = (0..n.len()).collect();
    order.sort_by(|&a, &b| n[a].total_cmp(&n[b]));
    let denom = counts.total() + cfg.s();
    let mut prefix = 0.0;
    let profile = order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            prefix += n[i];
            (cfg.s() + prefix) / ((k + 1) as f64 * denom)
        })
        .collect();
    (order, profile)
}

fn vertex_result(counts: &CountVector, cfg: &IdmConfig, i: usize, g: &dyn Fn(&[f64]) -> f64) -> Result<ExtremumResult> {
    let t = SimplexPoint::vertex(counts.dim(), i);
    let u_star = u_from_t(counts, cfg, &t)?;
    Ok(ExtremumResult {
        value: g(&u_star.u),
        u_star,
        t_star: t,
        vertex_index: Some(i),
        m_star: None,
        water_level: None,
    })
}

fn water_filled_result(counts: &CountVector, cfg: &IdmConfig, g: &dyn Fn(&[f64]) -> f64) -> Result<ExtremumResult> {
    let (_, profile) = sorted_profile(counts, cfg);
    // full enumeration over m; ties resolved towards the smaller m
    let mut m = 0;
    for (k, &level) in profile.iter().enumerate() {
        if level < profile[m] {
            m = k;
        }
    }
    let level = profile[m];
    let t_star = if cfg.s() == 0.0 {
        SimplexPoint::uniform(counts.dim())
    } else {
        let denom = counts.total() + cfg.s();
        let raw: Vec<f64> = counts
            .counts()
            .iter()
            .map(|&n| ((level * denom - n) / cfg.s()).max(0.0))
            .collect();
        let sum: f64 = raw.iter().sum();
        SimplexPoint::new(raw.into_iter().map(|x| x / sum).collect())?
    };
    let u_star = u_from_t(counts, cfg, &t_star)?;
    Ok(ExtremumResult {
        value: g(&u_star.u),
        vertex_index: t_star.vertex_index(),
        u_star,
        t_star,
        m_star: Some(m + 1),
        water_level: Some(level),
    })
}

/// Global minimum of `sum_i f(u_i)` over the IDM posterior means.
pub fn min_concave_sum(counts: &CountVector, cfg: &IdmConfig, f: &ConcaveSummand) -> Result<ExtremumResult> {
    let g = |u: &[f64]| f.sum(u);
    match f.curvature() {
        Curvature::Concave => vertex_result(counts, cfg, argmax_count(counts.counts()), &g),
        Curvature::Convex => water_filled_result(counts, cfg, &g),
    }
}

/// Global maximum of `sum_i f(u_i)` over the IDM posterior means.
pub fn max_concave_sum(counts: &CountVector, cfg: &IdmConfig, f: &ConcaveSummand) -> Result<ExtremumResult> {
    let g = |u: &[f64]| f.sum(u);
    match f.curvature() {
        Curvature::Concave => water_filled_result(counts, cfg, &g),
        Curvature::Convex => vertex_result(counts, cfg, argmax_count(counts.counts()), &g),
    }
}

/// Kernel `n + s` used for expected entropies of these counts.
pub fn entropy_kernel(counts: &CountVector, cfg: &IdmConfig) -> EntropyKernel {
    EntropyKernel::new(counts.total() + cfg.s()).expect("n + s > 0")
}

/// Minimizer and maximizer of the expected entropy.
pub fn entropy_extrema(counts: &CountVector, cfg: &IdmConfig) -> (ExtremumResult, ExtremumResult) {
    let f = ConcaveSummand::entropy(entropy_kernel(counts, cfg));
    let lo = min_concave_sum(counts, cfg, &f).expect("dimensions agree");
    let hi = max_concave_sum(counts, cfg, &f).expect("dimensions agree");
    (lo, hi)
}

/// Exact robust interval of the expected entropy.
pub fn entropy_interval_exact(counts: &CountVector, cfg: &IdmConfig) -> Interval {
    let (lo, hi) = entropy_extrema(counts, cfg);
    Interval::new(lo.value, hi.value.max(lo.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{separable_grid_extrema, GridSpec};
    use crate::special::EntropyKernel;
    use proptest::prelude::*;

    fn cv(c: &[f64]) -> CountVector {
        CountVector::new(c.to_vec()).unwrap()
    }

    fn s(x: f64) -> IdmConfig {
        IdmConfig::new(x).unwrap()
    }

    #[test]
    fn minimum_for_counts_3_6() {
        let counts = cv(&[3.0, 6.0]);
        let (lo, _) = entropy_extrema(&counts, &s(1.0));
        assert_eq!(lo.vertex_index, Some(1));
        assert!((lo.u_star.u[0] - 0.3).abs() < 1e-15);
        assert!((lo.u_star.u[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn tie_break_picks_first_index() {
        let counts = cv(&[5.0, 5.0]);
        let (lo, _) = entropy_extrema(&counts, &s(1.0));
        assert_eq!(lo.vertex_index, Some(0));
        assert!((lo.u_star.u[0] - 6.0 / 11.0).abs() < 1e-15);
        assert!((lo.u_star.u[1] - 5.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn maximum_for_counts_3_6() {
        let counts = cv(&[3.0, 6.0]);
        let (_, hi) = entropy_extrema(&counts, &s(1.0));
        assert!((hi.water_level.unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(hi.m_star, Some(1));
        assert_eq!(hi.vertex_index, Some(0));
        assert!((hi.u_star.u[0] - 0.4).abs() < 1e-15);
        assert!((hi.u_star.u[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn no_data_maximum_is_center() {
        let (_, hi) = entropy_extrema(&cv(&[0.0, 0.0, 0.0]), &s(1.0));
        assert_eq!(hi.m_star, Some(3));
        for u in &hi.u_star.u {
            assert!((u - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gap_at_least_s_gives_corner() {
        let counts = cv(&[1.0, 6.0]);
        let profile = water_level_profile(&counts, &s(1.0));
        assert!((profile[0] - 0.25).abs() < 1e-15 && (profile[1] - 0.5).abs() < 1e-15);
        let (_, hi) = entropy_extrema(&counts, &s(1.0));
        assert_eq!(hi.t_star.as_slice(), &[1.0, 0.0]);
        assert!((hi.u_star.u[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn entropy_interval_for_counts_3_6() {
        let iv = entropy_interval_exact(&cv(&[3.0, 6.0]), &s(1.0));
        assert!((iv.lower - 7106.0 / 12600.0).abs() < 1e-15);
        assert!((iv.upper - 7883.0 / 12600.0).abs() < 1e-15);
        assert!((iv.width() - 37.0 / 600.0).abs() < 1e-15);
    }

    #[test]
    fn single_category_collapses() {
        let iv = entropy_interval_exact(&cv(&[7.0]), &s(1.0));
        assert_eq!((iv.lower, iv.upper), (0.0, 0.0));
    }

    #[test]
    fn agrees_with_grid_oracle_on_fixed_cases() {
        let cases: [(&[f64], f64); 2] = [(&[1.0, 6.0], 1.0), (&[2.0, 2.0, 2.0], 2.0)];
        for (counts, strength) in cases {
            let counts = cv(counts);
            let cfg = s(strength);
            let kernel = EntropyKernel::new(counts.total() + strength).unwrap();
            let iv = entropy_interval_exact(&counts, &cfg);
            let grid = GridSpec::new(if counts.dim() == 2 { 2000 } else { 400 });
            let oracle = separable_grid_extrema(&|_, u| kernel.value(u), &counts, &cfg, &grid).unwrap();
            assert!(iv.contains_interval_tol(&oracle, 1e-12));
            assert!((iv.lower - oracle.lower).abs() < 1e-6, "{iv:?} {oracle:?}");
            assert!((iv.upper - oracle.upper).abs() < 1e-5, "{iv:?} {oracle:?}");
        }
        let center = entropy_interval_exact(&cv(&[2.0, 2.0, 2.0]), &s(2.0));
        let k = EntropyKernel::new(8.0).unwrap();
        assert!(center.contains(3.0 * k.value(1.0 / 3.0)));
    }

    #[test]
    fn convex_summand_dispatch() {
        let counts = cv(&[3.0, 6.0]);
        let cfg = s(1.0);
        let f = ConcaveSummand::new(|u| u * u, |u| 2.0 * u, Curvature::Convex).unwrap();
        let lo = min_concave_sum(&counts, &cfg, &f).unwrap();
        let hi = max_concave_sum(&counts, &cfg, &f).unwrap();
        // min of sum u_i^2 is at the most uniform point
        assert!((lo.value - (0.4f64.powi(2) + 0.6f64.powi(2))).abs() < 1e-15);
        assert!((hi.value - (0.3f64.powi(2) + 0.7f64.powi(2))).abs() < 1e-15);
    }

    #[test]
    fn curvature_mismatch_rejected() {
        let err = ConcaveSummand::new(|u| u * u, |u| 2.0 * u, Curvature::Concave).unwrap_err();
        assert_eq!(err, Error::CurvatureMismatch { declared: "concave" });
        assert!(ConcaveSummand::new(|u: f64| -u * u.ln(), |u: f64| -u.ln() - 1.0, Curvature::Concave).is_ok());
    }

    #[test]
    fn width_scales_with_sigma() {
        let mut ratios = vec![];
        for scale in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let counts = cv(&[3.0 * scale, 6.0 * scale]);
            let cfg = s(1.0);
            let iv = entropy_interval_exact(&counts, &cfg);
            let sigma = crate::simplex::sigma_of(&counts, &cfg);
            ratios.push(iv.width() / sigma);
        }
        let k = EntropyKernel::new(10.0).unwrap();
        let bound = 2.0 * k.derivative(0.0);
        assert!(ratios.iter().all(|&r| r > 0.0 && r <= bound), "{ratios:?}");
    }

    proptest! {
        #[test]
        fn water_level_is_unimodal(n in prop::collection::vec(0u32..30, 1..7), strength in 0.5f64..3.0) {
            let counts = CountVector::new(n.iter().map(|&x| x as f64).collect()).unwrap();
            let p = water_level_profile(&counts, &s(strength));
            let m = p.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            for k in 0..m {
                prop_assert!(p[k + 1] <= p[k] + 1e-15);
            }
            for k in m..p.len() - 1 {
                prop_assert!(p[k + 1] >= p[k] - 1e-15);
            }
        }

        #[test]
        fn extrema_bracket_random_points(n in prop::collection::vec(0.0f64..20.0, 2..5), w in prop::collection::vec(0.01f64..1.0, 4)) {
            let counts = CountVector::new(n.clone()).unwrap();
            let cfg = s(1.5);
            let iv = entropy_interval_exact(&counts, &cfg);
            let w = &w[..n.len()];
            let total: f64 = w.iter().sum();
            let t = SimplexPoint::new(w.iter().map(|x| x / total).collect()).unwrap();
            let u = u_from_t(&counts, &cfg, &t).unwrap();
            let k = entropy_kernel(&counts, &cfg);
            let value: f64 = u.u.iter().map(|&x| k.value(x)).sum();
            prop_assert!(iv.lower <= value + 1e-12 && value <= iv.upper + 1e-12);
        }

        #[test]
        fn width_grows_with_s(n in prop::collection::vec(0u32..20, 2..5), strength in 0.5f64..2.0) {
            let counts = CountVector::new(n.iter().map(|&x| x as f64).collect()).unwrap();
            let a = entropy_interval_exact(&counts, &s(strength));
            let b = entropy_interval_exact(&counts, &s(2.0 * strength));
            prop_assert!(b.width() >= a.width() - 1e-12);
        }
    }
}
