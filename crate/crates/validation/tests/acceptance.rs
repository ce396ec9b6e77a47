//! Acceptance checks. Each check prints one PASS/FAIL line; the process
//! exits non-zero if any check fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use idm_core::extrema::entropy_kernel;
use idm_core::mutual_info::{mi_from_u, mutual_information};
use idm_core::oracle::{
    adaptive_simpson, dirichlet_draws, mc_functional_stats, mi_grid_extrema, product_grid_extrema,
    separable_grid_extrema, GridSpec, McSpec,
};
use idm_core::special::exact::{h_rational, harmonic2, harmonic_tail};
use idm_core::{
    concave_remainder_bounds, digamma, entropy_interval_exact, h, kappa_from_alpha, mi_interval_bounds,
    mi_variance_leading, trigamma, triangular_mass, triangular_minimal_robust, triangular_robust_union,
    triangular_shortest_interval, ConcaveSummand, ContingencyCounts, CountVector, EntropyKernel, IdmConfig,
    SimplexPoint,
};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    check((got - want).abs() <= tol, format!("{what}: got {got}, want {want} (tol {tol:e})"))
}

fn cfg(s: f64) -> IdmConfig {
    IdmConfig::new(s).unwrap()
}

fn table(rows: &[&[f64]]) -> ContingencyCounts {
    ContingencyCounts::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

fn exact_entropy_golden() -> Outcome {
    let counts = CountVector::new(vec![3.0, 6.0]).unwrap();
    let c = cfg(1.0);
    let k = EntropyKernel::new(10.0).unwrap();
    let terms = [(0.3, 3, 2761.0 / 8400.0), (0.4, 4, 2131.0 / 6300.0), (0.6, 6, 1207.0 / 4200.0), (0.7, 7, 847.0 / 3600.0)];
    for (u, k10, want) in terms {
        close(h(u, &k).unwrap(), want, 1e-12, &format!("h({u})"))?;
        close(h_rational(k10, 10).to_f64().unwrap(), want, 0.0, &format!("rational h({u})"))?;
    }
    let iv = entropy_interval_exact(&counts, &c);
    close(iv.lower, 7106.0 / 12600.0, 1e-12, "lower")?;
    close(iv.upper, 7883.0 / 12600.0, 1e-12, "upper")?;
    close(iv.width(), 37.0 / 600.0, 1e-12, "width")?;
    let reps = 1000;
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(entropy_interval_exact(std::hint::black_box(&counts), &c));
    }
    let per_call = start.elapsed() / reps;
    check(per_call < Duration::from_millis(1), format!("{per_call:?} per call"))?;
    Ok(format!("[{}, {}], {per_call:?} per call", iv.lower, iv.upper))
}

fn first_order_golden() -> Outcome {
    let counts = CountVector::new(vec![3.0, 6.0]).unwrap();
    let c = cfg(1.0);
    let est = concave_remainder_bounds(&counts, &c, &ConcaveSummand::entropy(entropy_kernel(&counts, &c))).unwrap();
    close(est.f0, 69.0 / 112.0, 1e-12, "centre")?;
    close(est.r_ub, 0.1 * (13051.0 / 2520.0 - PI * PI / 2.0), 1e-12, "upper remainder")?;
    close(est.r_lb, 0.1 * (91717.0 / 8400.0 - 7.0 * PI * PI / 6.0), 1e-12, "lower remainder")?;
    let cons = est.conservative();
    close(cons.lower, 0.5564, 2e-4, "conservative lower")?;
    close(cons.upper, 0.6404, 2e-4, "conservative upper")?;
    let exact = entropy_interval_exact(&counts, &c);
    close(cons.upper - exact.upper, 0.0148, 2e-4, "upper gap")?;
    close(exact.lower - cons.lower, 0.0074, 2e-4, "lower gap")?;
    Ok(format!("[{:.6}, {:.6}]", cons.lower, cons.upper))
}

fn oracle_containment() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0f64;
    let mut contained = 0;
    let cases = 200;
    for case in 0..cases {
        let d = rng.random_range(2..=4usize);
        let counts: Vec<f64> = (0..d).map(|_| rng.random_range(0..=20u32) as f64).collect();
        let s = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
        let cv = CountVector::new(counts.clone()).unwrap();
        let c = cfg(s);
        let kernel = entropy_kernel(&cv, &c);
        let oracle = separable_grid_extrema(&|_, u| kernel.value(u), &cv, &c, &GridSpec::new(400)).unwrap();
        let exact = entropy_interval_exact(&cv, &c);
        let err = (exact.lower - oracle.lower).abs().max((exact.upper - oracle.upper).abs());
        worst = worst.max(err);
        check(err <= 5e-3, format!("case {case} {counts:?} s={s}: exact {exact:?} vs oracle {oracle:?}"))?;
        let cons = concave_remainder_bounds(&cv, &c, &ConcaveSummand::entropy(kernel)).unwrap().conservative();
        if cons.contains_interval(&oracle) {
            contained += 1;
        }
    }
    let elapsed = start.elapsed();
    check(contained == cases, format!("conservative contained oracle in {contained}/{cases}"))?;
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("max |exact - grid| = {worst:.2e}, containment {contained}/{cases}, {elapsed:?}"))
}

fn widening_shrinks() -> Outcome {
    let c = cfg(1.0);
    let widening = |n: f64| {
        let cv = CountVector::new(vec![n / 3.0, 2.0 * n / 3.0]).unwrap();
        let est = concave_remainder_bounds(&cv, &c, &ConcaveSummand::entropy(entropy_kernel(&cv, &c))).unwrap();
        est.f0 + est.r_ub - est.inner_upper
    };
    let w: Vec<f64> = [8.0, 16.0, 32.0, 64.0].into_iter().map(widening).collect();
    let ratios: Vec<f64> = w.windows(2).map(|p| p[1] / p[0]).collect();
    for r in &ratios {
        check(*r <= 0.35 && *r > 0.0, format!("shrink ratios {ratios:?}"))?;
    }
    Ok(format!("shrink ratios {:?}", ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>()))
}

fn mutual_information_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7_031);
    let c = cfg(1.0);
    let (mut gridded, mut total) = (0, 0);
    for case in 0..120 {
        let d1 = rng.random_range(1..=3usize);
        let d2 = rng.random_range(1..=3usize);
        let rows: Vec<Vec<f64>> = (0..d1).map(|_| (0..d2).map(|_| rng.random_range(0..=6u32) as f64).collect()).collect();
        let tbl = ContingencyCounts::new(rows.clone()).unwrap();
        let b = mi_interval_bounds(&tbl, &c).unwrap();
        total += 1;
        check(b.sandwich_holds(1e-12), format!("case {case} {rows:?}: sandwich fails {b:?}"))?;
        if d1 * d2 - 1 > 5 {
            continue;
        }
        let oracle = mi_grid_extrema(&tbl, &c, &GridSpec::new(60)).unwrap();
        check(
            b.conservative().contains_interval_tol(&oracle, 1e-12),
            format!("case {case} {rows:?}: conservative {:?} misses oracle {oracle:?}", b.conservative()),
        )?;
        check(
            b.crude.contains_interval_tol(&oracle, 1e-12),
            format!("case {case} {rows:?}: crude {:?} misses oracle {oracle:?}", b.crude),
        )?;
        gridded += 1;
    }
    Ok(format!("{total} tables, {gridded} grid-checked"))
}

fn product_set_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let c = cfg(1.0);
    let grid = GridSpec::new(60);
    for case in 0..20 {
        let rows: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random_range(0..=10u32) as f64).collect()).collect();
        let tbl = ContingencyCounts::new(rows.clone()).unwrap();
        let kernel = EntropyKernel::new(tbl.total() + 1.0).unwrap();
        let prod = product_grid_extrema(&|_, u| mi_from_u(&kernel, (2, 2), u), &tbl, &c, &grid).unwrap();
        let full = mi_grid_extrema(&tbl, &c, &grid).unwrap();
        check(full.contains_interval_tol(&prod, 1e-12), format!("case {case} {rows:?}: {prod:?} not in {full:?}"))?;
        let cons = mi_interval_bounds(&tbl, &c).unwrap().conservative();
        check(cons.contains_interval_tol(&prod, 1e-12), format!("case {case} {rows:?}: {prod:?} not in {cons:?}"))?;
    }
    Ok("20/20 tables".into())
}

fn variance_leading_term() -> Outcome {
    let start = Instant::now();
    let tbl = table(&[&[5.0, 1.0], &[1.0, 5.0]]);
    let c = cfg(1.0);
    let t = SimplexPoint::uniform(4);
    let leading = mi_variance_leading(&tbl, &c, &t).unwrap();
    let params: Vec<f64> = tbl.cells().iter().map(|n| n + 0.25).collect();
    let draws = dirichlet_draws(&params, &McSpec::new(100_000, 8_128)).unwrap();
    let st = mc_functional_stats(&draws, &|p| mutual_information((2, 2), p)).unwrap();
    let se = st.variance_stderr.unwrap();
    let z = (leading - st.variance) / se;
    let elapsed = start.elapsed();
    let detail = format!(
        "leading {leading:.5}, sampled {:.5} +- {se:.5} ({z:.1} standard errors), {elapsed:?}",
        st.variance
    );
    check(z.abs() <= 3.0 && elapsed < Duration::from_secs(10), detail.clone())?;
    Ok(detail)
}

fn triangular_family() -> Outcome {
    let quad = |t: f64, a: f64, b: f64| {
        let f = |x: f64| (1.0 - (x - t).abs()).max(0.0);
        let mut knots = vec![a, b];
        knots.extend([t - 1.0, t, t + 1.0].into_iter().filter(|&k| a < k && k < b));
        knots.sort_by(f64::total_cmp);
        knots.windows(2).map(|w| adaptive_simpson(&f, w[0], w[1], 1e-11)).sum::<f64>()
    };
    let alphas = [0.5, 0.75, 0.9, 0.95];
    for alpha in alphas {
        for t in [-1.0, -0.3, 0.0, 0.25, 1.0] {
            let iv = triangular_shortest_interval(t, alpha).unwrap();
            close(triangular_mass(t, iv.lower, iv.upper).unwrap(), alpha, 1e-12, "closed-form coverage")?;
            close(quad(t, iv.lower, iv.upper), alpha, 1e-9, "quadrature coverage")?;
        }
        for gamma in [0.25, 0.5, 1.0] {
            let m = triangular_minimal_robust(gamma, alpha).unwrap();
            let u = triangular_robust_union(gamma, alpha).unwrap();
            check(m.width() < u.width() && u.contains_interval(&m), format!("gamma {gamma} alpha {alpha}: {m:?} vs {u:?}"))?;
            for t in [-gamma, 0.0, gamma] {
                let mass = triangular_mass(t, m.lower, m.upper).unwrap();
                check(mass >= alpha - 1e-9, format!("gamma {gamma} alpha {alpha} t {t}: mass {mass}"))?;
            }
        }
        let seam = (0.5 * (1.0 - alpha)).sqrt();
        let at = triangular_minimal_robust(seam, alpha).unwrap().upper;
        let beyond = seam + 1.0 - (2.0 * (1.0 - alpha)).sqrt();
        close(at, beyond, 1e-12, "seam")?;
    }
    Ok("coverage, containment and seam hold".into())
}

fn special_functions() -> Outcome {
    const EULER: f64 = 0.577_215_664_901_532_9;
    for k in 1..=60u64 {
        let psi = -EULER + harmonic_tail(0, k - 1).to_f64().unwrap();
        close(digamma(k as f64).unwrap(), psi, 1e-13, &format!("digamma({k})"))?;
        let psi1 = PI * PI / 6.0 - harmonic2(k - 1).to_f64().unwrap();
        close(trigamma(k as f64).unwrap(), psi1, 1e-13, &format!("trigamma({k})"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let total = rng.random_range(2..=100u32) as f64;
        let k = EntropyKernel::new(total).unwrap();
        let u = rng.random_range(0.01..0.99);
        let step = 1e-4;
        let second = (k.derivative(u + step) - k.derivative(u - step)) / (2.0 * step);
        check(second < 0.0, format!("h'' = {second} at u = {u}, kernel {total}"))?;
    }
    let kappa = kappa_from_alpha(0.9545).unwrap();
    close(kappa, 2.0, 1e-3, "kappa")?;
    Ok(format!("kappa(0.9545) = {kappa:.6}"))
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = idm_cli::execute(std::iter::once("idm").chain(args.iter().copied()));
    (out.code, out.stdout, out.stderr)
}

fn cli_golden() -> Outcome {
    let (code, stdout, stderr) = run_cli(&["--inline", "3,6", "--s", "1", "--mode", "both", "--format", "json"]);
    check(code == 0, format!("exit {code}: {stderr}"))?;
    let v: serde_json::Value = serde_json::from_str(&stdout).map_err(|e| e.to_string())?;
    let exact = &v["intervals"]["exact"];
    check(exact["lower_rational"] == "7106/12600", format!("lower rational {}", exact["lower_rational"]))?;
    check(exact["upper_rational"] == "7883/12600", format!("upper rational {}", exact["upper_rational"]))?;
    close(exact["lower"].as_f64().unwrap_or(f64::NAN), 7106.0 / 12600.0, 1e-12, "exact lower")?;
    close(exact["upper"].as_f64().unwrap_or(f64::NAN), 7883.0 / 12600.0, 1e-12, "exact upper")?;
    let cons = &v["intervals"]["conservative"];
    close(cons["lower"].as_f64().unwrap_or(f64::NAN), 0.5564, 2e-4, "conservative lower")?;
    close(cons["upper"].as_f64().unwrap_or(f64::NAN), 0.6404, 2e-4, "conservative upper")?;
    close(v["diagnostics"]["center"].as_f64().unwrap_or(f64::NAN), 69.0 / 112.0, 1e-12, "centre")?;
    let mut h_terms: Vec<String> = v["extremizers"]
        .as_array()
        .into_iter()
        .flatten()
        .flat_map(|e| e["terms"].as_array().cloned().unwrap_or_default())
        .map(|t| t["h_rational"].as_str().unwrap_or("").to_string())
        .collect();
    h_terms.sort();
    check(h_terms == ["1207/4200", "2131/6300", "2761/8400", "847/3600"], format!("terms {h_terms:?}"))?;
    let bad: [(&[&str], &str); 5] = [
        (&["--inline", ""], "EMPTY_INPUT"),
        (&["--inline", "3,-6"], "NEGATIVE_COUNT"),
        (&["--inline", "3,x"], "PARSE_ERROR"),
        (&["mutinfo", "--inline", "1,2\n3"], "RAGGED_TABLE"),
        (&["credible", "--inline", "1,2"], "MISSING_ALPHA"),
    ];
    for (args, want) in bad {
        let (code, _, stderr) = run_cli(args);
        check(code != 0 && stderr.contains(&format!("error[{want}]")), format!("{args:?}: exit {code}, stderr {stderr}"))?;
    }
    Ok("golden JSON and error codes".into())
}

fn main() {
    let checks: [Check; 10] = [
        ("exact entropy interval for counts (3,6)", exact_entropy_golden),
        ("first-order bounds for counts (3,6)", first_order_golden),
        ("exact and conservative intervals vs lattice oracle", oracle_containment),
        ("second-order shrinkage of the widening", widening_shrinks),
        ("mutual information bounds vs lattice oracle", mutual_information_suite),
        ("product-set lattice inside bounds", product_set_check),
        ("leading variance vs Monte Carlo", variance_leading_term),
        ("triangular credible family", triangular_family),
        ("special functions", special_functions),
        ("command-line golden run", cli_golden),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
