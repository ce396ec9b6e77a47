//! Robust interval estimates under the imprecise Dirichlet model (IDM).
//!
//! Given categorical counts `n_i` and a prior strength `s`, the IDM considers
//! every Dirichlet prior with mean `t` on the probability simplex. Any
//! Bayesian estimator `F` then becomes a function of the posterior mean
//! `u_i = (n_i + s t_i) / (n + s)`, and the robust answer is the interval
//! `[min_t F, max_t F]`.
//!
//! The crate provides
//!
//! | Module | What it computes |
//! |--------|------------------|
//! | [`simplex`] | counts, hyperparameters, the `t -> u` map and `sigma = s/(n+s)` |
//! | [`special`] | digamma/trigamma, the expected-entropy summand `h` and `h'` |
//! | [`extrema`] | exact extrema of concave separable `F`, expected entropy interval |
//! | [`taylor`] | conservative first-order bounds and sum/product propagation |
//! | [`mutual_info`] | expected mutual information: crude and first-order bounds, variance |
//! | [`credible`] | robust credible intervals (triangular family, one-sided, MI) |
//! | [`oracle`] | brute-force lattice extrema and seeded Dirichlet Monte Carlo |
//!
//! ```
//! use idm_core::{entropy_interval_exact, CountVector, IdmConfig};
//!
//! let counts = CountVector::new(vec![3.0, 6.0]).unwrap();
//! let cfg = IdmConfig::new(1.0).unwrap();
//! let iv = entropy_interval_exact(&counts, &cfg);
//! assert!((iv.lower - 7106.0 / 12600.0).abs() < 1e-12);
//! assert!((iv.upper - 7883.0 / 12600.0).abs() < 1e-12);
//! ```

pub mod credible;
pub mod error;
pub mod extrema;
pub mod mutual_info;
pub mod oracle;
pub mod simplex;
pub mod special;
pub mod taylor;

pub use credible::{
    one_sided_robust_bound, robust_credible_mi, triangular_mass, triangular_minimal_robust,
    triangular_robust_union, triangular_shortest_interval, CredibleSpec, TriangularFamily,
};
pub use error::{Error, Result};
pub use extrema::{
    entropy_interval_exact, max_concave_sum, min_concave_sum, ConcaveSummand, Curvature,
    ExtremumResult,
};
pub use mutual_info::{
    expected_mi, mi_interval_bounds, mi_interval_crude, mi_variance_leading, product_idm_check,
    ContingencyCounts, MiBounds,
};
pub use simplex::{
    sigma_of, u_from_t, validate_simplex, CountVector, IdmConfig, Interval, PosteriorMean,
    SimplexPoint, SIMPLEX_TOL,
};
pub use special::{digamma, h, h_prime, kappa_from_alpha, trigamma, EntropyKernel};
pub use taylor::{
    approx_interval_general, concave_remainder_bounds, propagate_product, propagate_sum,
    DerivativeBounds, ExtendedSimplex, RobustEstimate,
};
