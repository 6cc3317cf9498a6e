//! One test per acceptance criterion; each prints a single PASS/FAIL line.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratelab_core::bounds::{bound_general, bound_simplified, default_k, phi_n, BoundInputs};
use ratelab_core::continuum::{heat_evolve, magnetic_evolve, GeneratorSpec, RefGrid, TestFunction};
use ratelab_core::crystal::{
    harmonic_realization, harmonic_residual, invariant_measure, limit_covariance, monte_carlo_covariance,
    EdgePair, PeriodicRealization, QuotientGraph,
};
use ratelab_core::grid::{
    discrete_generator, discrete_resolvent, embed, iterate, poisson_smooth, sup_distance, GridFunction,
};
use ratelab_core::lab::{run_clt, run_harper, run_voronovskaja, Experiment, ExperimentConfig, RateReport};
use ratelab_core::lattice::simple_walk;
use ratelab_core::Complex64;

fn report(n: u32, pass: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn clt_runs() -> Vec<(usize, f64, RateReport, f64)> {
    let mut out = Vec::new();
    for d in [1, 2] {
        for t in [0.5, 1.0] {
            let mut cfg = ExperimentConfig::new(Experiment::Clt, d);
            cfg.t = t;
            let start = Instant::now();
            let r = run_clt(&cfg).expect("clt run");
            out.push((d, t, r, start.elapsed().as_secs_f64()));
        }
    }
    out
}

#[test]
fn criterion_01_clt_rate() {
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, t, r, secs) in clt_runs() {
        let s = r.slope();
        let limit = if d == 1 { 60.0 } else { 300.0 };
        let ok = (-0.7..=-0.3).contains(&s) && secs <= limit;
        pass &= ok;
        parts.push(format!("d={d} t={t} slope={s:.4} time={secs:.1}s"));
    }
    report(1, pass, &parts.join("; "));
    assert!(pass, "fitted slopes outside [-0.7, -0.3]: {parts:?}");
}

#[test]
fn criterion_02_bound_domination() {
    let mut violations = 0;
    let mut rows = 0;
    let mut worst: f64 = 0.0;
    for (_, _, r, _) in clt_runs() {
        for row in &r.rows {
            rows += 1;
            let b = row.bound.expect("clt rows carry a bound").total;
            worst = worst.max(row.error.hi / b);
            if row.error.hi > b {
                violations += 1;
            }
        }
    }
    report(2, violations == 0, &format!("{violations} violations in {rows} rows, max err/bound {worst:.4}"));
    assert_eq!(violations, 0);
}

#[test]
fn criterion_03_voronovskaja() {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in [1, 2] {
        let cfg = ExperimentConfig::new(Experiment::Voronovskaja, d);
        let r = run_voronovskaja(&cfg).unwrap();
        let f = TestFunction::gaussian(d);
        for row in &r.rows {
            let psi = ratelab_core::bounds::psi_n(&f, row.n, d).unwrap();
            if row.error.hi > psi + 1e-6 {
                pass = false;
                parts.push(format!("d={d} n={} residual {:.3e} > {:.3e}", row.n, row.error.hi, psi + 1e-6));
            }
        }
        let c_star = r.extras.iter().find(|(k, _)| k == "c_star").unwrap().1;
        let target = 1.0 / (2 * d) as f64;
        let ok = c_star >= 0.98 * target && c_star <= 1.02 * target;
        pass &= ok;
        parts.push(format!("d={d} c*={c_star:.6}"));
    }
    report(3, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_04_chernoff_gap() {
    let f = TestFunction::gaussian(1);
    let g = GeneratorSpec::heat(1, 0.5, 1.0);
    let walk = simple_walk(1);
    let tol = 1e-10;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for n in [16u64, 64, 256] {
        let pf = embed(&f, n, 1e-12).unwrap();
        let phi = phi_n(&f, &g, n, 1).unwrap();
        for k in [1, n / 2, n, 2 * n] {
            let smooth = poisson_smooth(&walk, &pf, k as f64 / n as f64, n, tol).unwrap();
            let power = iterate(&walk, &pf, k as usize).unwrap();
            let gap = sup_distance(&smooth, &power).unwrap();
            let bound = (k as f64).sqrt() / n as f64 * phi + 2.0 * tol;
            worst = worst.max(gap.lo / bound);
            if gap.lo > bound {
                violations += 1;
            }
        }
    }
    report(4, violations == 0, &format!("{violations} violations of 12, max gap/bound {worst:.4}"));
    assert_eq!(violations, 0);
}

#[test]
fn criterion_05_resolvent() {
    let f = TestFunction::gaussian(1);
    let walk = simple_walk(1);
    let tol = 1e-10;
    let mut pass = true;
    let mut parts = Vec::new();
    for lambda in [1.0, 5.0] {
        for n in [4u64, 64] {
            let pf = embed(&f, n, 1e-12).unwrap();
            let r = discrete_resolvent(&walk, &pf, lambda, n, tol).unwrap();
            let gen = discrete_generator(&walk, &r, n).unwrap();
            let lhs = r.axpby(Complex64::new(lambda, 0.0), &gen, Complex64::new(-1.0, 0.0)).unwrap();
            let m = sup_distance(&lhs, &pf).unwrap().lo;
            let stated = (lambda + 2.0 * n as f64) * tol;
            pass &= m <= stated;
            parts.push(format!("lambda={lambda} n={n} residual={m:.2e}"));
        }
    }
    let bessel = poisson_smooth(&walk, &GridFunction::delta(&[0]), 1.0, 1, 1e-13).unwrap().get(&[0]).re;
    let series = discrete_resolvent(&walk, &GridFunction::delta(&[0]), 1.0, 1, 1e-13).unwrap().get(&[0]).re;
    let ok_b = (bessel - 0.465_759_607_593_640_4).abs() <= 1e-9;
    let ok_s = (series - 1.0 / 3.0f64.sqrt()).abs() <= 1e-9;
    pass &= ok_b && ok_s;
    parts.push(format!("bessel={bessel:.12} inv_sqrt3={series:.12}"));
    report(5, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_06_heat_oracle() {
    let f = TestFunction::gaussian(1);
    let mut worst: f64 = 0.0;
    let t = 1.0;
    let e = heat_evolve(&f, t, 0.5, 1e-10).unwrap();
    for i in 0..20 {
        let x = -4.0 + 8.0 * i as f64 / 19.0;
        let want = (1.0 + t).powf(-0.5) * (-x * x / (2.0 * (1.0 + t))).exp();
        worst = worst.max((e.eval(&[x]).unwrap() - Complex64::new(want, 0.0)).norm());
    }
    // semigroup law through the closed-form intermediate state
    let (s, r) = (0.4, 0.7);
    let mid = TestFunction::gaussian_at(vec![0.0], (1.0f64 + s).sqrt()).scale(Complex64::new((1.0 + s).powf(-0.5), 0.0));
    let direct_mid = heat_evolve(&f, s, 0.5, 1e-10).unwrap();
    let two_step = heat_evolve(&mid, r, 0.5, 1e-10).unwrap();
    let one_step = heat_evolve(&f, s + r, 0.5, 1e-10).unwrap();
    let mut law: f64 = 0.0;
    for i in 0..20 {
        let x = [-3.0 + 6.0 * i as f64 / 19.0];
        law = law.max((direct_mid.eval(&x).unwrap() - mid.eval(&x)).norm());
        law = law.max((two_step.eval(&x).unwrap() - one_step.eval(&x).unwrap()).norm());
    }
    let pass = worst <= 1e-8 && law <= 2e-8;
    report(6, pass, &format!("closed form max err {worst:.2e}, semigroup law {law:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_07_magnetic_cross_validation() {
    let f = TestFunction::gaussian_at(vec![0.5, 0.0], 1.0);
    let grid = RefGrid::new(2, 8.0, 33, 3);
    let mut pass = true;
    let mut parts = Vec::new();
    for b in [0.5, 1.0] {
        let m = magnetic_evolve(&f, 0.25, b, 0.25, 1e-12).unwrap();
        match m.validate(0.25, &grid, 8.0) {
            Ok(worst) => parts.push(format!("b={b} discrepancy={worst:.2e}")),
            Err(e) => {
                pass = false;
                parts.push(format!("b={b} {e}"));
            }
        }
    }
    parts.push(format!("validation grid {} points", grid.points * grid.points));
    report(7, pass, &parts.join("; "));
    assert!(pass);
}

#[test]
fn criterion_08_harper_rate() {
    let cfg = ExperimentConfig::new(Experiment::Harper, 2);
    let start = Instant::now();
    let r = run_harper(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let s = r.slope();
    let ratio = r.max_ratio.unwrap_or(f64::NAN);
    let pass = (-0.7..=-0.3).contains(&s) && ratio <= 3.0 && secs <= 600.0;
    report(8, pass, &format!("b=1 t=0.5 slope={s:.4} max/min sqrt(n)*err={ratio:.3} time={secs:.1}s"));
    assert!(pass, "slope {s}, ratio {ratio}");
}

#[test]
fn criterion_09_bound_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..1000 {
        let t = rng.random_range(0.0..10.0);
        let n = rng.random_range(1u64..100_000);
        let inp = BoundInputs::contraction(
            rng.random_range(0.1..10.0),
            t,
            n,
            rng.random_range(0.0..5.0),
            rng.random_range(0.0..5.0),
            rng.random_range(0.0..5.0),
        );
        if bound_general(&inp).unwrap().total > bound_simplified(&inp).unwrap() * (1.0 + 1e-15) {
            violations += 1;
        }
    }
    let mut mono = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1u64..10_000);
        let t = rng.random_range(0.0..5.0);
        let omega = rng.random_range(0.0..0.5);
        let base = BoundInputs {
            big_m: rng.random_range(1.0..3.0),
            omega,
            lambda: omega * (omega / n as f64).exp() + rng.random_range(0.05..5.0),
            t,
            n,
            k: rng.random_range(0..=2 * n),
            phi: rng.random_range(0.0..3.0),
            psi: rng.random_range(0.0..3.0),
            psi_lambda: rng.random_range(0.0..3.0),
        };
        let total = bound_general(&base).unwrap().total;
        let bump = rng.random_range(0.0..1.0);
        let up = [
            BoundInputs { phi: base.phi + bump, ..base },
            BoundInputs { psi: base.psi + bump, ..base },
            BoundInputs { psi_lambda: base.psi_lambda + bump, ..base },
            BoundInputs { big_m: base.big_m + bump, ..base },
        ];
        for u in up {
            if bound_general(&u).unwrap().total < total {
                mono += 1;
            }
        }
        let lam = BoundInputs { lambda: base.lambda + bump, ..base };
        if bound_general(&lam).unwrap().total > total {
            mono += 1;
        }
    }
    let mut cont = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1u64..10_000);
        let t = rng.random_range(0.0..5.0);
        let a = BoundInputs {
            big_m: rng.random_range(1.0..3.0),
            omega: 0.0,
            lambda: rng.random_range(0.1..5.0),
            t,
            n,
            k: default_k(n, t),
            phi: rng.random_range(0.01..3.0),
            psi: rng.random_range(0.01..3.0),
            psi_lambda: rng.random_range(0.01..3.0),
        };
        let b = BoundInputs { omega: 1e-12, ..a };
        let (x, y) = (bound_general(&a).unwrap().total, bound_general(&b).unwrap().total);
        if (x - y).abs() > 1e-8 * x {
            cont += 1;
        }
    }
    let pass = violations == 0 && mono == 0 && cont == 0;
    report(
        9,
        pass,
        &format!("dominance violations {violations}, monotonicity {mono}, continuity {cont}"),
    );
    assert!(pass);
}

#[test]
fn criterion_10_crystal_geometry() {
    let mut parts = Vec::new();
    let mut pass = true;
    let z2 = QuotientGraph::zd(2);
    let hex = QuotientGraph::hexagonal();
    let asym = QuotientGraph::from_pairs(
        1,
        &[
            EdgePair { origin: 0, terminus: 0, p: 0.2, p_reverse: None, shift: vec![1] },
            EdgePair { origin: 0, terminus: 1, p: 0.6, p_reverse: Some(0.3), shift: vec![0] },
            EdgePair { origin: 1, terminus: 1, p: 0.35, p_reverse: None, shift: vec![1] },
        ],
    )
    .unwrap();
    for (name, g) in [("Z2", &z2), ("hexagonal", &hex), ("asymmetric", &asym)] {
        let m = invariant_measure(g, 1e-14).unwrap();
        let resid = (0..g.vertex_count())
            .map(|x| {
                let s: f64 = g
                    .out_edges(x)
                    .iter()
                    .map(|&k| {
                        let e = &g.edges()[k];
                        g.edges()[e.inverse].p * m[e.terminus]
                    })
                    .sum();
                (s - m[x]).abs()
            })
            .fold(0.0, f64::max);
        pass &= resid <= 1e-12;
        parts.push(format!("{name} measure residual {resid:.1e}"));
    }
    // dense null vector of P^T - I, normalized
    let m = invariant_measure(&asym, 1e-14).unwrap();
    let mut p = DMatrix::<f64>::zeros(2, 2);
    for e in asym.edges() {
        p[(e.origin, e.terminus)] += e.p;
    }
    let mut a = p.transpose() - DMatrix::<f64>::identity(2, 2);
    a.row_mut(1).fill(1.0);
    let rhs = nalgebra::DVector::from_vec(vec![0.0, 1.0]);
    let dense = a.lu().solve(&rhs).unwrap();
    let gap = (dense[0] - m[0]).abs().max((dense[1] - m[1]).abs());
    pass &= gap <= 1e-12;
    parts.push(format!("asymmetric vs dense {gap:.1e}"));

    let mh = invariant_measure(&hex, 1e-14).unwrap();
    let phi = harmonic_realization(&hex, &mh, 1e-12).unwrap();
    let hres = harmonic_residual(&hex, &phi);
    pass &= hres <= 1e-12;
    parts.push(format!("hexagonal harmonic residual {hres:.1e}"));

    let mut zd_err: f64 = 0.0;
    for d in 1..=4 {
        let cov = limit_covariance(&QuotientGraph::zd(d), &[1.0], &PeriodicRealization::origin(d)).unwrap();
        zd_err = zd_err.max((cov - DMatrix::<f64>::identity(d, d) / d as f64).abs().max());
    }
    pass &= zd_err <= 1e-14;
    parts.push(format!("Z^d covariance err {zd_err:.1e}"));

    let cov = limit_covariance(&hex, &mh, &phi).unwrap();
    let mc = monte_carlo_covariance(&hex, &mh, &phi, 20_000, 500, 10).unwrap();
    let mut worst_z: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst_z = worst_z.max((mc.covariance[(i, j)] - cov[(i, j)]).abs() / mc.std_error[(i, j)]);
        }
    }
    pass &= worst_z <= 3.0;
    parts.push(format!("hexagonal Monte Carlo max |z| {worst_z:.2}"));
    report(10, pass, &parts.join("; "));
    assert!(pass);
}
