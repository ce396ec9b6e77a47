//! Brute-force references: exhaustive lattice extremization over the simplex
//! (and over the product set `v (x) w`), plus seeded Dirichlet Monte Carlo.
//!
//! Lattice points are the compositions of `resolution` into `d` parts,
//! `t_i = k_i / resolution`, visited in colexicographic order: the first
//! coordinate varies fastest and `(0, ..., 0, r)` comes first.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutual_info::ContingencyCounts;
use crate::simplex::{CountVector, IdmConfig, Interval, SimplexPoint};
use crate::special::EntropyKernel;

pub use crate::special::adaptive_simpson;

/// Default cap on enumerated lattice points.
pub const DEFAULT_MAX_POINTS: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub max_points: u128,
}

impl GridSpec {
    pub fn new(resolution: usize) -> Self {
        assert!(resolution >= 1, "resolution must be positive");
        Self { resolution, max_points: DEFAULT_MAX_POINTS }
    }

    pub fn with_cap(mut self, max_points: u128) -> Self {
        self.max_points = max_points;
        self
    }

    fn check(&self, points: u128) -> Result<()> {
        if points > self.max_points {
            return Err(Error::LatticeTooLarge { points, cap: self.max_points });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSpec {
    pub draws: usize,
    pub seed: u64,
}

impl McSpec {
    pub fn new(draws: usize, seed: u64) -> Self {
        assert!(draws >= 1, "need at least one draw");
        Self { draws, seed }
    }
}

/// Number of compositions of `r` into `d` non-negative parts.
pub fn lattice_size(r: usize, d: usize) -> u128 {
    if d == 0 {
        return 0;
    }
    // C(r + d - 1, d - 1), built incrementally to stay exact
    let k = (d - 1) as u128;
    let mut acc: u128 = 1;
    for j in 1..=k {
        acc = acc * (r as u128 + j) / j;
    }
    acc
}

/// Visits every composition of `r` into `d` parts in colex order.
pub fn for_each_composition(r: usize, d: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(k: &mut [usize], pos: usize, left: usize, visit: &mut dyn FnMut(&[usize])) {
        if pos == 0 {
            k[0] = left;
            visit(k);
            return;
        }
        for v in 0..=left {
            k[pos] = v;
            rec(k, pos - 1, left - v, visit);
        }
    }
    if d == 0 {
        return;
    }
    let mut k = vec![0; d];
    rec(&mut k, d - 1, r, visit);
}

struct MinMax {
    lo: f64,
    hi: f64,
}

impl MinMax {
    fn new() -> Self {
        Self { lo: f64::INFINITY, hi: f64::NEG_INFINITY }
    }

    fn push(&mut self, x: f64) {
        self.lo = self.lo.min(x);
        self.hi = self.hi.max(x);
    }

    fn interval(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }
}

/// `[min, max]` of `objective(t, u)` over the lattice, with `u` from `t`.
pub fn grid_extrema(
    objective: &dyn Fn(&[f64], &[f64]) -> f64,
    counts: &CountVector,
    cfg: &IdmConfig,
    grid: &GridSpec,
) -> Result<Interval> {
    let d = counts.dim();
    grid.check(lattice_size(grid.resolution, d))?;
    let r = grid.resolution as f64;
    let denom = counts.total() + cfg.s();
    let mut t = vec![0.0; d];
    let mut u = vec![0.0; d];
    let mut acc = MinMax::new();
    for_each_composition(grid.resolution, d, &mut |k| {
        for i in 0..d {
            t[i] = k[i] as f64 / r;
            u[i] = (counts.counts()[i] + cfg.s() * t[i]) / denom;
        }
        acc.push(objective(&t, &u));
    });
    Ok(acc.interval())
}

/// Lattice extrema of a separable objective `sum_i f(i, u_i)`.
///
/// Tabulates each summand once per lattice level, so the enumeration
/// itself costs one addition per point.
pub fn separable_grid_extrema(
    summand: &dyn Fn(usize, f64) -> f64,
    counts: &CountVector,
    cfg: &IdmConfig,
    grid: &GridSpec,
) -> Result<Interval> {
    let d = counts.dim();
    grid.check(lattice_size(grid.resolution, d))?;
    let r = grid.resolution;
    let denom = counts.total() + cfg.s();
    let table: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..=r)
                .map(|k| summand(i, (counts.counts()[i] + cfg.s() * k as f64 / r as f64) / denom))
                .collect()
        })
        .collect();

    fn rec(table: &[Vec<f64>], pos: usize, left: usize, partial: f64, acc: &mut MinMax) {
        if pos == 0 {
            acc.push(partial + table[0][left]);
            return;
        }
        for v in 0..=left {
            rec(table, pos - 1, left - v, partial + table[pos][v], acc);
        }
    }
    let mut acc = MinMax::new();
    rec(&table, d - 1, r, 0.0, &mut acc);
    Ok(acc.interval())
}

/// Lattice extrema over the product set `t_ij = v_i w_j` with `v`, `w` on
/// their own lattices. `objective` receives the row-major cell `t` and `u`.
pub fn product_grid_extrema(
    objective: &dyn Fn(&[f64], &[f64]) -> f64,
    tbl: &ContingencyCounts,
    cfg: &IdmConfig,
    grid: &GridSpec,
) -> Result<Interval> {
    let (d1, d2) = tbl.shape();
    let (p1, p2) = (lattice_size(grid.resolution, d1), lattice_size(grid.resolution, d2));
    grid.check(p1)?;
    grid.check(p2)?;
    grid.check(p1 * p2)?;
    let r = grid.resolution as f64;
    let collect = |d: usize| {
        let mut out = Vec::new();
        for_each_composition(grid.resolution, d, &mut |k| out.push(k.iter().map(|&x| x as f64 / r).collect::<Vec<_>>()));
        out
    };
    let vs = collect(d1);
    let ws = collect(d2);
    let cells = tbl.cells();
    let denom = tbl.total() + cfg.s();
    let mut t = vec![0.0; d1 * d2];
    let mut u = vec![0.0; d1 * d2];
    let mut acc = MinMax::new();
    for v in &vs {
        for w in &ws {
            for (i, vi) in v.iter().enumerate() {
                for (j, wj) in w.iter().enumerate() {
                    let c = i * d2 + j;
                    t[c] = vi * wj;
                    u[c] = (cells[c] + cfg.s() * t[c]) / denom;
                }
            }
            acc.push(objective(&t, &u));
        }
    }
    Ok(acc.interval())
}

/// Tabulated expected mutual information on the full cell lattice.
///
/// Independent of the bound machinery: it evaluates
/// `sum h(u_i+) + sum h(u_+j) - sum h(u_ij)` at every lattice point.
pub fn mi_grid_extrema(tbl: &ContingencyCounts, cfg: &IdmConfig, grid: &GridSpec) -> Result<Interval> {
    let (d1, d2) = tbl.shape();
    let cells = d1 * d2;
    grid.check(lattice_size(grid.resolution, cells))?;
    let r = grid.resolution;
    let s = cfg.s();
    let denom = tbl.total() + s;
    let kernel = EntropyKernel::new(denom)?;
    let level = |base: f64, k: usize| kernel.value((base + s * k as f64 / r as f64) / denom);
    let joint: Vec<Vec<f64>> = tbl.cells().iter().map(|&n| (0..=r).map(|k| level(n, k)).collect()).collect();
    let rows: Vec<Vec<f64>> = tbl.row_sums().iter().map(|&n| (0..=r).map(|k| level(n, k)).collect()).collect();
    let cols: Vec<Vec<f64>> = tbl.col_sums().iter().map(|&n| (0..=r).map(|k| level(n, k)).collect()).collect();

    let mut acc = MinMax::new();
    let mut row_k = vec![0usize; d1];
    let mut col_k = vec![0usize; d2];
    for_each_composition(r, cells, &mut |k| {
        row_k.iter_mut().for_each(|x| *x = 0);
        col_k.iter_mut().for_each(|x| *x = 0);
        let mut value = 0.0;
        for (c, &kc) in k.iter().enumerate() {
            row_k[c / d2] += kc;
            col_k[c % d2] += kc;
            value -= joint[c][kc];
        }
        for (i, &ki) in row_k.iter().enumerate() {
            value += rows[i][ki];
        }
        for (j, &kj) in col_k.iter().enumerate() {
            value += cols[j][kj];
        }
        acc.push(value);
    });
    Ok(acc.interval())
}

/// Seeded Dirichlet samples built from normalized Gamma variates.
pub fn dirichlet_draws(params: &[f64], mc: &McSpec) -> Result<Vec<SimplexPoint>> {
    if params.is_empty() {
        return Err(Error::Empty);
    }
    let gammas = params
        .iter()
        .enumerate()
        .map(|(index, &a)| {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Domain { value: a, domain: "Dirichlet parameters must be > 0" });
            }
            Gamma::new(a, 1.0).map_err(|_| Error::NonFinite { index, value: a })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let mut out = Vec::with_capacity(mc.draws);
    let mut x = vec![0.0; params.len()];
    while out.len() < mc.draws {
        for (xi, g) in x.iter_mut().zip(&gammas) {
            *xi = g.sample(&mut rng);
        }
        let sum: f64 = x.iter().sum();
        if sum <= 0.0 || sum.is_nan() {
            // every variate underflowed; draw again
            continue;
        }
        out.push(SimplexPoint::from_weights(x.iter().map(|v| v / sum).collect()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Delete-one jackknife standard error of `variance`; needs three samples.
    pub variance_stderr: Option<f64>,
}

/// Sample statistics of `functional` over `samples`.
pub fn mc_functional_stats(samples: &[SimplexPoint], functional: &dyn Fn(&[f64]) -> f64) -> Result<McStats> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let values: Vec<f64> = samples.iter().map(|p| functional(p.as_slice())).collect();
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let s1: f64 = dev.iter().sum();
    let s2: f64 = dev.iter().map(|d| d * d).sum();
    let variance = (s2 - s1 * s1 / nf) / (nf - 1.0);
    let stderr = (variance / nf).sqrt();

    let variance_stderr = (n >= 3).then(|| {
        let m = nf - 1.0;
        let loo: Vec<f64> = dev
            .iter()
            .map(|&d| {
                let a = s1 - d;
                let b = s2 - d * d;
                (b - a * a / m) / (m - 1.0)
            })
            .collect();
        let avg = loo.iter().sum::<f64>() / nf;
        let ss: f64 = loo.iter().map(|v| (v - avg) * (v - avg)).sum();
        ((nf - 1.0) / nf * ss).sqrt()
    });
    Ok(McStats { mean, variance, stderr, variance_stderr })
}
