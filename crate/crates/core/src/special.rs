//! Digamma and trigamma, and the expected-entropy summand
//! `h(u) = u [psi(N + 1) - psi(N u + 1)]` with `N = n + s`.
//!
//! Integer arguments go through the harmonic closed forms
//! `psi(n + 1) = -gamma + H_n` and `psi'(n + 1) = pi^2/6 - H_n^(2)`.
//! Everything else is shifted upward by the recurrence and finished with the
//! Bernoulli asymptotic series.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest integer argument evaluated by the harmonic closed form.
const HARMONIC_LIMIT: f64 = 1000.0;

/// Below this the recurrence is applied before the asymptotic series.
const ASYMPTOTIC_FROM: f64 = 10.0;

// B_{2k} / (2k), k = 1..7
const DIGAMMA_SERIES: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

// B_{2k}, k = 1..7
const TRIGAMMA_SERIES: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Harmonic number `H_n` summed smallest-term first.
fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|i| 1.0 / i as f64).sum()
}

/// `sum_{i=1}^n 1/i^2`, smallest term first.
fn harmonic2(n: u64) -> f64 {
    (1..=n).rev().map(|i| {
        let i = i as f64;
        1.0 / (i * i)
    }).sum()
}

fn small_integer(x: f64) -> Option<u64> {
    (x.fract() == 0.0 && x <= HARMONIC_LIMIT).then_some(x as u64)
}

/// Digamma for `x > 0` without argument checks.
pub(crate) fn psi(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if let Some(k) = small_integer(x) {
        return -EULER_GAMMA + harmonic(k - 1);
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut tail = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_SERIES {
        tail += c * pow;
        pow *= inv2;
    }
    x.ln() - 0.5 / x - tail - shift
}

/// Trigamma for `x > 0` without argument checks.
pub(crate) fn psi1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if let Some(k) = small_integer(x) {
        return PI * PI / 6.0 - harmonic2(k - 1);
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < ASYMPTOTIC_FROM {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut tail = 0.0;
    let mut pow = inv2 * inv;
    for b in TRIGAMMA_SERIES {
        tail += b * pow;
        pow *= inv2;
    }
    inv + 0.5 * inv2 + tail + shift
}

/// The digamma function `psi(x) = d/dx ln Gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain { value: x, domain: "digamma requires x > 0" });
    }
    Ok(psi(x))
}

/// The trigamma function `psi'(x)` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain { value: x, domain: "trigamma requires x > 0" });
    }
    Ok(psi1(x))
}

/// Three-term expansion `psi(z + 1) ~ ln z + 1/(2z) - 1/(12 z^2)`, error
/// `O(z^-4)`. Intended for `z >= 6`; [`digamma`] uses a longer series.
pub fn digamma_asymptotic(z: f64) -> f64 {
    z.ln() + 0.5 / z - 1.0 / (12.0 * z * z)
}

/// Parameterizes `h` by the posterior sample size `N = n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyKernel {
    total: f64,
    psi_top: f64,
}

impl EntropyKernel {
    pub fn new(total: f64) -> Result<Self> {
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Domain { value: total, domain: "kernel total must be > 0" });
        }
        Ok(Self { total, psi_top: psi(total + 1.0) })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// `h(u)`; `u` is assumed to lie in `[0, 1]`.
    pub fn value(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let c = self.total * u;
        if let (Some(top), true) = (small_integer(self.total), c.fract() == 0.0) {
            // exact tail of the harmonic series, no cancellation
            let lo = c as u64;
            if lo >= top {
                return 0.0;
            }
            let tail: f64 = (lo + 1..=top).rev().map(|k| 1.0 / k as f64).sum();
            return u * tail;
        }
        u * (self.psi_top - psi(c + 1.0))
    }

    /// `h'(u) = psi(N + 1) - psi(N u + 1) - N u psi'(N u + 1)`.
    pub fn derivative(&self, u: f64) -> f64 {
        let c = self.total * u.max(0.0);
        self.psi_top - psi(c + 1.0) - c * psi1(c + 1.0)
    }
}

fn check_unit(u: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&u) {
        return Err(Error::Domain { value: u, domain: "h requires 0 <= u <= 1" });
    }
    Ok(u.clamp(0.0, 1.0))
}

/// Expected-entropy summand `h(u)`.
pub fn h(u: f64, kernel: &EntropyKernel) -> Result<f64> {
    Ok(kernel.value(check_unit(u)?))
}

/// Derivative `h'(u)`.
pub fn h_prime(u: f64, kernel: &EntropyKernel) -> Result<f64> {
    Ok(kernel.derivative(check_unit(u)?))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    // a minimum split guards against symmetric integrands fooling the first estimate
    let q1 = a + 0.25 * (b - a);
    let q3 = a + 0.75 * (b - a);
    let (fq1, fq3) = (f(q1), f(q3));
    let left = (m - a) / 6.0 * (fa + 4.0 * fq1 + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * fq3 + fb);
    rec(f, a, m, fa, fq1, fm, left, 0.5 * tol, 48) + rec(f, m, b, fm, fq3, fb, right, 0.5 * tol, 48)
}

/// `erf(x)` by quadrature of the Gaussian density.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    let upper = x.min(10.0);
    let density = |t: f64| (-t * t).exp();
    (2.0 / PI.sqrt() * adaptive_simpson(&density, 0.0, upper, 1e-15)).min(1.0)
}

/// Gaussian multiplier `kappa` with `alpha = erf(kappa / sqrt 2)`.
pub fn kappa_from_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { value: alpha, domain: "alpha must lie in (0, 1)" });
    }
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if erf(mid / std::f64::consts::SQRT_2) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact rational arithmetic for integral arguments.
pub mod exact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    /// `sum_{k=lo+1}^{hi} 1/k`.
    pub fn harmonic_tail(lo: u64, hi: u64) -> BigRational {
        let mut acc = BigRational::zero();
        for k in lo + 1..=hi {
            acc += BigRational::new(BigInt::one(), BigInt::from(k));
        }
        acc
    }

    /// `h(count / total)` with kernel `total`, as an exact rational.
    pub fn h_rational(count: u64, total: u64) -> BigRational {
        assert!(count <= total && total > 0);
        BigRational::new(BigInt::from(count), BigInt::from(total)) * harmonic_tail(count, total)
    }

    /// `sum_{i=1}^{n} 1/i^2`.
    pub fn harmonic2(n: u64) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 1..=n {
            acc += BigRational::new(BigInt::one(), BigInt::from(i * i));
        }
        acc
    }
}
