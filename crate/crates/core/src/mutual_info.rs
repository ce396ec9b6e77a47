//! Expected mutual information on a `d1 x d2` contingency table.
//!
//! With `u` the posterior mean over cells, the expected mutual information is
//! `I(u) = sum_i h(u_i+) + sum_j h(u_+j) - sum_ij h(u_ij)`, every `h` with the
//! same kernel `n + s` (marginals of a Dirichlet are Dirichlet).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrema::entropy_interval_exact;
use crate::oracle::{product_grid_extrema, GridSpec};
use crate::simplex::{sigma_of, CountVector, IdmConfig, Interval, SimplexPoint};
use crate::special::EntropyKernel;

/// Non-negative cell counts `n_ij`, stored row-major, with cached marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyCounts {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
    row_sums: Vec<f64>,
    col_sums: Vec<f64>,
    total: f64,
}

impl ContingencyCounts {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        let rows = table.len();
        let cols = table.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for (r, row) in table.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Ragged { row: r, expected: cols, got: row.len() });
            }
            cells.extend_from_slice(row);
        }
        for (index, &value) in cells.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeCount { index, value });
            }
        }
        let row_sums = (0..rows).map(|i| cells[i * cols..(i + 1) * cols].iter().sum()).collect();
        let col_sums = (0..cols).map(|j| (0..rows).map(|i| cells[i * cols + j]).sum()).collect();
        let total = cells.iter().sum();
        Ok(Self { rows, cols, cells, row_sums, col_sums, total })
    }

    /// `(d1, d2)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn cell(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.cols + j]
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[f64] {
        &self.col_sums
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn transpose(&self) -> Self {
        let table = (0..self.cols).map(|j| (0..self.rows).map(|i| self.cell(i, j)).collect()).collect();
        Self::new(table).expect("transpose of a valid table")
    }

    pub fn joint(&self) -> CountVector {
        CountVector::new(self.cells.clone()).expect("validated")
    }

    pub fn row_marginal(&self) -> CountVector {
        CountVector::new(self.row_sums.clone()).expect("validated")
    }

    pub fn col_marginal(&self) -> CountVector {
        CountVector::new(self.col_sums.clone()).expect("validated")
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.cells.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }
}

fn kernel_for(tbl: &ContingencyCounts, cfg: &IdmConfig) -> Result<EntropyKernel> {
    EntropyKernel::new(tbl.total() + cfg.s())
}

/// `I(u)` for a row-major cell mean `u`.
pub fn mi_from_u(kernel: &EntropyKernel, shape: (usize, usize), u: &[f64]) -> f64 {
    let (d1, d2) = shape;
    let mut value = 0.0;
    for i in 0..d1 {
        value += kernel.value(u[i * d2..(i + 1) * d2].iter().sum());
    }
    for j in 0..d2 {
        value += kernel.value((0..d1).map(|i| u[i * d2 + j]).sum());
    }
    value - u.iter().map(|&x| kernel.value(x)).sum::<f64>()
}

/// Shannon mutual information of a row-major joint distribution `p`.
pub fn mutual_information(shape: (usize, usize), p: &[f64]) -> f64 {
    let (d1, d2) = shape;
    let rows: Vec<f64> = (0..d1).map(|i| p[i * d2..(i + 1) * d2].iter().sum()).collect();
    let cols: Vec<f64> = (0..d2).map(|j| (0..d1).map(|i| p[i * d2 + j]).sum()).collect();
    let mut acc = 0.0;
    for i in 0..d1 {
        for j in 0..d2 {
            let pij = p[i * d2 + j];
            if pij > 0.0 {
                acc += pij * (pij / (rows[i] * cols[j])).ln();
            }
        }
    }
    acc
}

fn cell_means(tbl: &ContingencyCounts, cfg: &IdmConfig, t: &SimplexPoint) -> Result<Vec<f64>> {
    let cells = tbl.cells().len();
    if t.dim() != cells {
        return Err(Error::DimensionMismatch { expected: cells, got: t.dim() });
    }
    let denom = tbl.total() + cfg.s();
    Ok(tbl.cells().iter().zip(t.as_slice()).map(|(&n, &ti)| (n + cfg.s() * ti) / denom).collect())
}

/// Expected mutual information under the posterior with hyperparameter `t`
/// (row-major over cells).
pub fn expected_mi(tbl: &ContingencyCounts, cfg: &IdmConfig, t: &SimplexPoint) -> Result<f64> {
    let u = cell_means(tbl, cfg, t)?;
    Ok(mi_from_u(&kernel_for(tbl, cfg)?, tbl.shape(), &u))
}

/// `[H_row_lo + H_col_lo - H_joint_hi, H_row_hi + H_col_hi - H_joint_lo]`
/// from three independent exact entropy intervals.
pub fn mi_interval_crude(tbl: &ContingencyCounts, cfg: &IdmConfig) -> Interval {
    let row = entropy_interval_exact(&tbl.row_marginal(), cfg);
    let col = entropy_interval_exact(&tbl.col_marginal(), cfg);
    let joint = entropy_interval_exact(&tbl.joint(), cfg);
    Interval::new(row.lower + col.lower - joint.upper, row.upper + col.upper - joint.lower)
}

/// First-order robust bounds on the expected mutual information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiBounds {
    pub i0: f64,
    pub r_ub_per_ij: Vec<Vec<f64>>,
    pub r_lb_per_ij: Vec<Vec<f64>>,
    pub r_ub: f64,
    pub r_lb: f64,
    pub inner_upper: f64,
    pub inner_lower: f64,
    /// Cell whose vertex maximizes the upper remainder.
    pub cell1: (usize, usize),
    /// Cell whose vertex minimizes the lower remainder.
    pub cell2: (usize, usize),
    pub crude: Interval,
    pub sigma: f64,
}

impl MiBounds {
    pub fn conservative(&self) -> Interval {
        Interval::new(self.i0 + self.r_lb, self.i0 + self.r_ub)
    }

    pub fn sandwich_holds(&self, tol: f64) -> bool {
        self.i0 + self.r_lb <= self.inner_lower + tol
            && self.inner_lower <= self.inner_upper + tol
            && self.inner_upper <= self.i0 + self.r_ub + tol
    }
}

/// Outer bounds `[I0 + I_R^lb, I0 + I_R^ub]`, inner bounds at the selected
/// vertex cells, and the crude interval.
pub fn mi_interval_bounds(tbl: &ContingencyCounts, cfg: &IdmConfig) -> Result<MiBounds> {
    let (d1, d2) = tbl.shape();
    let kernel = kernel_for(tbl, cfg)?;
    let denom = tbl.total() + cfg.s();
    let sigma = sigma_of(&tbl.joint(), cfg);
    let u0: Vec<f64> = tbl.cells().iter().map(|&n| n / denom).collect();
    let r0: Vec<f64> = tbl.row_sums().iter().map(|&n| n / denom).collect();
    let c0: Vec<f64> = tbl.col_sums().iter().map(|&n| n / denom).collect();
    let dh = |u: f64| kernel.derivative(u);

    let mut ub = vec![vec![0.0; d2]; d1];
    let mut lb = vec![vec![0.0; d2]; d1];
    let (mut cell1, mut cell2) = ((0, 0), (0, 0));
    for i in 0..d1 {
        for j in 0..d2 {
            let c = u0[i * d2 + j];
            ub[i][j] = sigma * (dh(r0[i]) + dh(c0[j]) - dh(c + sigma));
            lb[i][j] = sigma * (dh(r0[i] + sigma) + dh(c0[j] + sigma) - dh(c));
            if ub[i][j] > ub[cell1.0][cell1.1] {
                cell1 = (i, j);
            }
            if lb[i][j] < lb[cell2.0][cell2.1] {
                cell2 = (i, j);
            }
        }
    }
    let vertex = |(i, j): (usize, usize)| expected_mi(tbl, cfg, &SimplexPoint::vertex(d1 * d2, i * d2 + j));
    Ok(MiBounds {
        i0: mi_from_u(&kernel, (d1, d2), &u0),
        r_ub: ub[cell1.0][cell1.1],
        r_lb: lb[cell2.0][cell2.1],
        inner_upper: vertex(cell1)?,
        inner_lower: vertex(cell2)?,
        r_ub_per_ij: ub,
        r_lb_per_ij: lb,
        cell1,
        cell2,
        crude: mi_interval_crude(tbl, cfg),
        sigma,
    })
}

/// Leading `O(1/n)` term of the posterior variance of the mutual information.
pub fn mi_variance_leading(tbl: &ContingencyCounts, cfg: &IdmConfig, t: &SimplexPoint) -> Result<f64> {
    let (d1, d2) = tbl.shape();
    let u = cell_means(tbl, cfg, t)?;
    if let Some(c) = u.iter().position(|&x| x <= 0.0 || x.is_nan()) {
        return Err(Error::ZeroCell { row: c / d2, col: c % d2 });
    }
    if d1 == 1 || d2 == 1 {
        return Ok(0.0);
    }
    let rows: Vec<f64> = (0..d1).map(|i| u[i * d2..(i + 1) * d2].iter().sum()).collect();
    let cols: Vec<f64> = (0..d2).map(|j| (0..d1).map(|i| u[i * d2 + j]).sum()).collect();
    let (mut first, mut second) = (0.0, 0.0);
    for i in 0..d1 {
        for j in 0..d2 {
            let x = u[i * d2 + j];
            let l = (x / (rows[i] * cols[j])).ln();
            first += x * l;
            second += x * l * l;
        }
    }
    Ok(((second - first * first) / (tbl.total() + cfg.s())).max(0.0))
}

/// Checks the conservative bounds against the product set `t = v (x) w` on a
/// lattice of the given resolution: every lattice value must fall inside
/// `[I0 + I_R^lb, I0 + I_R^ub]`, and the inner bounds (attained at vertices,
/// which are lattice points) must be reached.
pub fn product_idm_check(tbl: &ContingencyCounts, cfg: &IdmConfig, bounds: &MiBounds, resolution: usize) -> Result<bool> {
    const TOL: f64 = 1e-12;
    if resolution < 2 {
        return Err(Error::Domain { value: resolution as f64, domain: "resolution must be >= 2" });
    }
    let kernel = kernel_for(tbl, cfg)?;
    let shape = tbl.shape();
    let lattice = product_grid_extrema(&|_, u| mi_from_u(&kernel, shape, u), tbl, cfg, &GridSpec::new(resolution))?;
    let outer = bounds.conservative();
    Ok(outer.contains_interval_tol(&lattice, TOL)
        && lattice.upper >= bounds.inner_upper - TOL
        && lattice.lower <= bounds.inner_lower + TOL)
}
