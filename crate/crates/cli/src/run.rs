//! The four commands.

use idm_core::extrema::{entropy_extrema, entropy_kernel, ExtremumResult};
use idm_core::mutual_info::mutual_information;
use idm_core::oracle::{dirichlet_draws, mi_grid_extrema, separable_grid_extrema, GridSpec, McSpec};
use idm_core::special::exact::h_rational;
use idm_core::{
    concave_remainder_bounds, entropy_interval_exact, mi_interval_bounds, mi_variance_leading,
    product_idm_check, robust_credible_mi, ConcaveSummand, ContingencyCounts, CountVector, CredibleSpec,
    EntropyKernel, IdmConfig, Interval, SimplexPoint,
};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::CliError;
use crate::input::{parse_counts, parse_table};
use crate::report::{common_denominator, round12, Extremizer, InputEcho, IntervalOut, RunResult, SweepRow, Term};
use crate::request::{Command, RunRequest, SweepSpec};

const CONTAIN_TOL: f64 = 1e-12;
const MAX_RATIONAL_TOTAL: f64 = 400.0;
const COVERAGE_DRAWS: usize = 20_000;

fn echo(req: &RunRequest) -> InputEcho {
    InputEcho {
        counts: None,
        table: None,
        s: req.s,
        alpha: req.alpha,
        mode: req.mode,
        grid_check: req.grid_check,
        seed: req.seed,
        sweep: req.sweep.as_ref().map(ToString::to_string),
    }
}

fn ordered(kind: &str, lower: f64, upper: f64) -> Result<Interval, CliError> {
    if lower <= upper {
        Ok(Interval::new(lower, upper))
    } else {
        Err(CliError::Compute(format!("{kind} bounds out of order: {lower} > {upper}")))
    }
}

fn required(text: Option<String>) -> Result<String, CliError> {
    text.ok_or(CliError::InputSource)
}

/// Runs a validated request.
pub fn run(req: &RunRequest) -> Result<RunResult, CliError> {
    let text = req.source.read()?;
    match req.command {
        Command::Entropy => run_entropy(req, &required(text)?),
        Command::Mutinfo => run_mutinfo(req, &required(text)?),
        Command::Credible => run_credible(req, &required(text)?),
        Command::Sweep => run_sweep(req, text.as_deref()),
    }
}

/// `N u_i` as integers when the whole problem is integral and small enough
/// for exact harmonic sums.
fn integral_scaled(counts: &CountVector, cfg: &IdmConfig, u: &[f64]) -> Option<(u64, Vec<u64>)> {
    let total = counts.total() + cfg.s();
    if !counts.is_integral() || cfg.s().fract() != 0.0 || total > MAX_RATIONAL_TOTAL {
        return None;
    }
    let scaled: Option<Vec<u64>> = u
        .iter()
        .map(|&x| {
            let k = (x * total).round();
            ((x * total - k).abs() < 1e-9).then_some(k as u64)
        })
        .collect();
    Some((total as u64, scaled?))
}

fn extremizer(side: &str, ext: &ExtremumResult, kernel: &EntropyKernel, scaled: Option<&(u64, Vec<u64>)>) -> Extremizer {
    let terms = ext
        .u_star
        .u
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let exact = scaled.map(|(total, ks)| {
                let u = BigRational::new(BigInt::from(ks[i]), BigInt::from(*total));
                (u.to_string(), h_rational(ks[i], *total).to_string())
            });
            Term {
                u: round12(u),
                h: round12(kernel.value(u)),
                u_rational: exact.as_ref().map(|e| e.0.clone()),
                h_rational: exact.map(|e| e.1),
            }
        })
        .collect();
    Extremizer { side: side.to_string(), t: ext.t_star.as_slice().iter().map(|&t| round12(t)).collect(), terms }
}

pub fn run_entropy(req: &RunRequest, text: &str) -> Result<RunResult, CliError> {
    let counts = CountVector::new(parse_counts(text)?)?;
    let cfg = IdmConfig::new(req.s)?;
    let kernel = entropy_kernel(&counts, &cfg);
    let mut out = RunResult::new(Command::Entropy, InputEcho { counts: Some(counts.counts().to_vec()), ..echo(req) });
    let d = &mut out.diagnostics;
    d.n = Some(counts.total());
    d.sigma = Some(round12(idm_core::sigma_of(&counts, &cfg)));
    d.dim = Some(counts.dim());

    let mut exact = None;
    if req.mode.exact() {
        let (lo, hi) = entropy_extrema(&counts, &cfg);
        let iv = entropy_interval_exact(&counts, &cfg);
        let scaled_lo = integral_scaled(&counts, &cfg, &lo.u_star.u);
        let scaled_hi = integral_scaled(&counts, &cfg, &hi.u_star.u);
        let mut entry = IntervalOut::new(iv);
        if let (Some((total, lo_k)), Some((_, hi_k))) = (&scaled_lo, &scaled_hi) {
            let sum = |ks: &[u64]| ks.iter().map(|&k| h_rational(k, *total)).sum::<BigRational>();
            let strings = common_denominator(&[sum(lo_k), sum(hi_k)]);
            entry = entry.with_rationals(strings[0].clone(), strings[1].clone());
        }
        out.intervals.insert("exact".into(), entry);
        out.extremizers.push(extremizer("lower", &lo, &kernel, scaled_lo.as_ref()));
        out.extremizers.push(extremizer("upper", &hi, &kernel, scaled_hi.as_ref()));
        out.diagnostics.min_vertex = lo.vertex_index;
        out.diagnostics.m_star = hi.m_star;
        out.diagnostics.water_level = hi.water_level.map(round12);
        exact = Some(iv);
    }
    let mut conservative = None;
    if req.mode.approx() {
        let est = concave_remainder_bounds(&counts, &cfg, &ConcaveSummand::entropy(kernel))?;
        let cons = est.conservative();
        out.intervals.insert("conservative".into(), IntervalOut::new(cons));
        out.intervals.insert("inner".into(), IntervalOut::new(ordered("inner", est.inner_lower, est.inner_upper)?));
        let d = &mut out.diagnostics;
        d.center = Some(round12(est.f0));
        d.r_ub = Some(round12(est.r_ub));
        d.r_lb = Some(round12(est.r_lb));
        d.i1 = Some(est.i1);
        d.i2 = Some(est.i2);
        d.checks.insert("sandwich".into(), est.sandwich_holds(CONTAIN_TOL));
        conservative = Some(cons);
    }
    if let (Some(e), Some(c)) = (exact, conservative) {
        out.diagnostics.checks.insert("exact_within_conservative".into(), c.contains_interval_tol(&e, CONTAIN_TOL));
    }
    if let Some(res) = req.grid_check {
        let oracle = separable_grid_extrema(&|_, u| kernel.value(u), &counts, &cfg, &GridSpec::new(res))?;
        out.intervals.insert("oracle".into(), IntervalOut::new(oracle));
        if let Some(e) = exact {
            out.diagnostics.checks.insert("exact_contains_oracle".into(), e.contains_interval_tol(&oracle, CONTAIN_TOL));
        }
        if let Some(c) = conservative {
            out.diagnostics.checks.insert("conservative_contains_oracle".into(), c.contains_interval_tol(&oracle, CONTAIN_TOL));
        }
    }
    Ok(out)
}

fn table_result(req: &RunRequest, command: Command, tbl: &ContingencyCounts) -> RunResult {
    let mut out = RunResult::new(command, InputEcho { table: Some(tbl.to_rows()), ..echo(req) });
    let (d1, d2) = tbl.shape();
    out.diagnostics.n = Some(tbl.total());
    out.diagnostics.shape = Some([d1, d2]);
    out
}

pub fn run_mutinfo(req: &RunRequest, text: &str) -> Result<RunResult, CliError> {
    let tbl = ContingencyCounts::new(parse_table(text)?)?;
    let cfg = IdmConfig::new(req.s)?;
    let bounds = mi_interval_bounds(&tbl, &cfg)?;
    let mut out = table_result(req, Command::Mutinfo, &tbl);
    let d = &mut out.diagnostics;
    d.sigma = Some(round12(bounds.sigma));
    d.center = Some(round12(bounds.i0));
    if req.mode.exact() {
        out.intervals.insert("crude".into(), IntervalOut::new(bounds.crude));
    }
    if req.mode.approx() {
        out.intervals.insert("conservative".into(), IntervalOut::new(bounds.conservative()));
        out.intervals.insert("inner".into(), IntervalOut::new(ordered("inner", bounds.inner_lower, bounds.inner_upper)?));
        let d = &mut out.diagnostics;
        d.r_ub = Some(round12(bounds.r_ub));
        d.r_lb = Some(round12(bounds.r_lb));
        d.cell1 = Some([bounds.cell1.0, bounds.cell1.1]);
        d.cell2 = Some([bounds.cell2.0, bounds.cell2.1]);
        d.checks.insert("sandwich".into(), bounds.sandwich_holds(CONTAIN_TOL));
    }
    if let Some(res) = req.grid_check {
        let oracle = mi_grid_extrema(&tbl, &cfg, &GridSpec::new(res))?;
        out.intervals.insert("oracle".into(), IntervalOut::new(oracle));
        let checks = &mut out.diagnostics.checks;
        if req.mode.exact() {
            checks.insert("crude_contains_oracle".into(), bounds.crude.contains_interval_tol(&oracle, CONTAIN_TOL));
        }
        if req.mode.approx() {
            let cons = bounds.conservative();
            checks.insert("conservative_contains_oracle".into(), cons.contains_interval_tol(&oracle, CONTAIN_TOL));
            checks.insert("product_idm".into(), product_idm_check(&tbl, &cfg, &bounds, res)?);
        }
    }
    Ok(out)
}

pub fn run_credible(req: &RunRequest, text: &str) -> Result<RunResult, CliError> {
    let tbl = ContingencyCounts::new(parse_table(text)?)?;
    let cfg = IdmConfig::new(req.s)?;
    let alpha = req.alpha.ok_or(CliError::MissingAlpha)?;
    let spec = CredibleSpec::new(alpha).map_err(|_| CliError::InvalidAlpha(alpha))?;
    let cells = tbl.cells().len();
    let t_star = SimplexPoint::uniform(cells);
    let credible = robust_credible_mi(&tbl, &cfg, &spec, &t_star)?;
    let bounds = mi_interval_bounds(&tbl, &cfg)?;
    let mut out = table_result(req, Command::Credible, &tbl);
    out.intervals.insert("credible".into(), IntervalOut::new(credible));
    out.intervals.insert("conservative".into(), IntervalOut::new(bounds.conservative()));
    let d = &mut out.diagnostics;
    d.sigma = Some(round12(bounds.sigma));
    d.center = Some(round12(bounds.i0));
    d.r_ub = Some(round12(bounds.r_ub));
    d.r_lb = Some(round12(bounds.r_lb));
    d.kappa = Some(round12(spec.kappa));
    d.variance = Some(round12(mi_variance_leading(&tbl, &cfg, &t_star)?));
    if let Some(seed) = req.seed {
        let params: Vec<f64> = tbl.cells().iter().zip(t_star.as_slice()).map(|(n, t)| n + cfg.s() * t).collect();
        let draws = dirichlet_draws(&params, &McSpec::new(COVERAGE_DRAWS, seed))?;
        let shape = tbl.shape();
        let hits = draws.iter().filter(|p| credible.contains(mutual_information(shape, p.as_slice()))).count();
        d.mc_coverage = Some(round12(hits as f64 / COVERAGE_DRAWS as f64));
    }
    Ok(out)
}

fn sweep_row(x: f64, counts: &[f64], cfg: &IdmConfig) -> Result<SweepRow, CliError> {
    let cv = CountVector::new(counts.to_vec())?;
    let n = cv.total();
    let exact = entropy_interval_exact(&cv, cfg);
    let kernel = entropy_kernel(&cv, cfg);
    let cons = concave_remainder_bounds(&cv, cfg, &ConcaveSummand::entropy(kernel))?.conservative();
    let ml_kernel = EntropyKernel::new(n)?;
    let ml: f64 = counts.iter().map(|&c| ml_kernel.value(c / n)).sum();
    let centre = idm_core::u_from_t(&cv, cfg, &SimplexPoint::uniform(cv.dim()))?;
    let half: f64 = centre.u.iter().map(|&u| kernel.value(u)).sum();
    let plugin: f64 = counts.iter().filter(|&&c| c > 0.0).map(|&c| (c / n) * (n / c).ln()).sum();
    Ok(SweepRow {
        x: round12(x),
        h_exact_lo: round12(exact.lower),
        h_exact_hi: round12(exact.upper),
        h_cons_lo: round12(cons.lower),
        h_cons_hi: round12(cons.upper),
        h_point_ml: round12(ml),
        h_point_half: round12(half),
        h_plugin: round12(plugin),
    })
}

pub fn run_sweep(req: &RunRequest, text: Option<&str>) -> Result<RunResult, CliError> {
    let spec = req.sweep.as_ref().ok_or(CliError::MissingSweep)?;
    let cfg = IdmConfig::new(req.s)?;
    let mut out = RunResult::new(Command::Sweep, echo(req));
    match spec {
        SweepSpec::N { min, max, step } => {
            let ratios = match text {
                Some(t) => {
                    let counts = parse_counts(t)?;
                    let total: f64 = counts.iter().sum();
                    if total <= 0.0 {
                        return Err(CliError::InvalidSweep("n sweep needs counts with a positive total".into()));
                    }
                    out.input.counts = Some(counts.clone());
                    counts.iter().map(|c| c / total).collect()
                }
                None => vec![1.0 / 3.0, 2.0 / 3.0],
            };
            let steps = ((max - min) / step + 1e-9).floor() as usize;
            for k in 0..=steps {
                let n = min + k as f64 * step;
                let counts: Vec<f64> = ratios.iter().map(|r| r * n).collect();
                out.series.push(sweep_row(n, &counts, &cfg)?);
            }
        }
        SweepSpec::Ratio { n, steps } => {
            let n1s: Vec<f64> = match steps {
                Some(k) => (0..=*k).map(|j| 0.5 * n * j as f64 / *k as f64).collect(),
                None => (0..=(n / 2.0).floor() as usize).map(|j| j as f64).collect(),
            };
            for n1 in n1s {
                out.series.push(sweep_row(n1 / n, &[n1, n - n1], &cfg)?);
            }
        }
    }
    Ok(out)
}
