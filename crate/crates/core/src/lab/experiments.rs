use std::fmt::Write as _;

use num_complex::Complex64;

use super::config::{Experiment, ExperimentConfig};
use super::report::{Gate, RateReport, ReportRow};
use crate::bounds::{bound_general, bound_simplified, bound_simplified_breakdown, default_k, psi_n, BoundBreakdown, BoundInputs, CltSeminorms};
use crate::continuum::{
    heat_evolve, magnetic_evolve, semigroup_generator_apply, GeneratorSpec, RefGrid, TestFunction,
};
use crate::grid::{discrete_generator, embed, embed_radius, iterate, sup_distance, Block, GridFunction, StencilOperator};
use crate::lattice::{harper, simple_walk};
use crate::Result;

/// Accepted window for fitted log-log slopes.
pub const SLOPE_WINDOW: (f64, f64) = (-0.7, -0.3);
/// Largest accepted `max / min` of `sqrt(n) * error`.
pub const MAX_SQRT_N_RATIO: f64 = 3.0;
/// Relative window for the fitted generator constant.
pub const C_STAR_WINDOW: f64 = 0.02;

fn map_rows<T: Send>(ns: &[u64], f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ns.par_iter().map(|&n| f(n)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ns.iter().map(|&n| f(n)).collect()
    }
}

/// Samples `eval(x / sqrt(n))` on the centered block of the given radius.
fn sample_evaluator(
    d: usize,
    n: u64,
    radius: usize,
    tail: f64,
    eval: impl Fn(&[f64]) -> Result<Complex64>,
) -> Result<GridFunction> {
    let block = Block::centered(d, radius);
    let inv = 1.0 / (n as f64).sqrt();
    let mut y = vec![0.0; d];
    let mut values = Vec::with_capacity(block.len());
    for x in block.sites() {
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi = *xi as f64 * inv;
        }
        values.push(eval(&y)?);
    }
    GridFunction::new(block, values, tail, n)
}

fn test_function(cfg: &ExperimentConfig) -> Result<TestFunction> {
    TestFunction::by_id(&cfg.test_function, cfg.d)
}

fn reference_radius(f: &TestFunction, s: f64, n: u64, eps: f64) -> usize {
    (f.evolved_tail_radius(s, eps) * (n as f64).sqrt()).ceil() as usize
}

fn slope_gate(report: &RateReport) -> Gate {
    let s = report.slope();
    Gate::new(
        "slope",
        s >= SLOPE_WINDOW.0 && s <= SLOPE_WINDOW.1,
        format!("slope {s:.4} window [{}, {}]", SLOPE_WINDOW.0, SLOPE_WINDOW.1),
    )
}

fn ratio_gate(report: &RateReport) -> Gate {
    let r = report.max_ratio.unwrap_or(f64::NAN);
    Gate::new(
        "sqrt_n_ratio",
        r <= MAX_SQRT_N_RATIO,
        format!("max/min sqrt(n)*error {r:.4} limit {MAX_SQRT_N_RATIO}"),
    )
}

fn conclusive_gate(report: &RateReport) -> Gate {
    Gate::new(
        "conclusive",
        !report.inconclusive,
        "error intervals within 10% of midpoints".to_string(),
    )
}

/// Lattice walk `L^{floor(nt)}` against `e^{c t Delta}` at scale `n`.
pub fn run_clt(cfg: &ExperimentConfig) -> Result<RateReport> {
    cfg.validate()?;
    let f = test_function(cfg)?;
    let d = cfg.d;
    let g = GeneratorSpec::heat(d, cfg.c, cfg.lambda);
    let seminorms = CltSeminorms::compute(&f, &g)?;
    let walk = simple_walk(d);
    let half_tol = 0.5 * cfg.semigroup_tol;
    let heat = heat_evolve(&f, cfg.t, cfg.c, half_tol)?;
    let rows = map_rows(&cfg.n_list, |n| {
        let k = default_k(n, cfg.t);
        let lattice = iterate(&walk, &embed(&f, n, cfg.tail_eps)?, k as usize)?;
        let radius = reference_radius(&f, cfg.c * cfg.t, n, half_tol);
        let reference = sample_evaluator(d, n, radius, cfg.semigroup_tol, |y| heat.eval(y))?;
        Ok(ReportRow {
            n,
            k,
            t: cfg.t,
            error: sup_distance(&lattice, &reference)?,
            bound: Some(bound_simplified_breakdown(&seminorms.inputs(cfg.t, n, cfg.lambda, d))?),
        })
    })?;
    let mut report = RateReport::assemble("clt", d, cfg.t, rows);
    report.extras.push(("c".into(), cfg.c));
    report.extras.push(("lambda".into(), cfg.lambda));
    let violations = report.rows.iter().filter(|r| r.ok() == Some(false)).count();
    report.gates = vec![
        slope_gate(&report),
        Gate::new("bound", violations == 0, format!("{violations} rows above the bound")),
        conclusive_gate(&report),
    ];
    Ok(report)
}

/// Harper operator with flux `b/n` iterated `floor(nt)` times against the
/// constant-field magnetic semigroup.
pub fn run_harper(cfg: &ExperimentConfig) -> Result<RateReport> {
    cfg.validate()?;
    let f = test_function(cfg)?;
    let half_tol = 0.5 * cfg.semigroup_tol;
    let mag = magnetic_evolve(&f, cfg.t, cfg.b, cfg.c, half_tol)?;
    let validation = mag.validate(cfg.c, &RefGrid::new(2, 8.0, 33, 3), 8.0)?;
    let base = harper(cfg.b);
    let rows = map_rows(&cfg.n_list, |n| {
        let k = default_k(n, cfg.t);
        let op = base.scaled_phase(1.0 / n as f64);
        let lattice = iterate(&op, &embed(&f, n, cfg.tail_eps)?, k as usize)?;
        let radius = reference_radius(&f, cfg.c * cfg.t, n, half_tol);
        let reference = sample_evaluator(2, n, radius, cfg.semigroup_tol, |y| mag.eval(y))?;
        Ok(ReportRow {
            n,
            k,
            t: cfg.t,
            error: sup_distance(&lattice, &reference)?,
            bound: None,
        })
    })?;
    let mut report = RateReport::assemble("harper", 2, cfg.t, rows);
    report.extras.push(("b".into(), cfg.b));
    report.extras.push(("c".into(), cfg.c));
    report.extras.push(("kernel_validation".into(), validation));
    report.gates = vec![slope_gate(&report), ratio_gate(&report), conclusive_gate(&report)];
    Ok(report)
}

/// `|| n (T - I) P_n f - P_n A f ||` per `n`, plus the fitted constant `c*`
/// in `n (T - I) P_n f ~ c* P_n Delta f` at the largest `n` (zero field).
pub fn run_voronovskaja(cfg: &ExperimentConfig) -> Result<RateReport> {
    cfg.validate()?;
    let f = test_function(cfg)?;
    let d = cfg.d;
    let magnetic = cfg.b != 0.0;
    if magnetic && d != 2 {
        return Err(crate::Error::InvalidArgument("a magnetic field needs d=2".into()));
    }
    let g = if magnetic {
        GeneratorSpec::constant_field(cfg.b, cfg.c, cfg.lambda)
    } else {
        GeneratorSpec::heat(d, cfg.c, cfg.lambda)
    };
    let af = semigroup_generator_apply(&g, &f)?;
    let base: StencilOperator = if magnetic { harper(cfg.b) } else { simple_walk(d) };
    let rows = map_rows(&cfg.n_list, |n| {
        let op = base.scaled_phase(1.0 / n as f64);
        let gen = discrete_generator(&op, &embed(&f, n, cfg.tail_eps)?, n)?;
        let target = crate::grid::embed(&af, n, cfg.tail_eps)?;
        let error = sup_distance(&gen, &target)?;
        let bound = if magnetic {
            None
        } else {
            let psi = psi_n(&f, n, d)?;
            let slack = error.width();
            Some(BoundBreakdown {
                term_chernoff: psi,
                term_timeshift: slack,
                term_res_static: 0.0,
                term_res_dynamic: 0.0,
                total: psi + slack,
                t_n: 1.0 / n as f64,
            })
        };
        Ok(ReportRow {
            n,
            k: 1,
            t: 1.0 / n as f64,
            error,
            bound,
        })
    })?;
    let mut report = RateReport::assemble("voronovskaja", d, cfg.t, rows);
    report.extras.push(("b".into(), cfg.b));
    if magnetic {
        report.gates = vec![ratio_gate(&report), conclusive_gate(&report)];
    } else {
        let n = *cfg.n_list.last().unwrap();
        let c_star = fit_constant(&f, n, cfg.tail_eps)?;
        let target = 1.0 / (2 * d) as f64;
        report.extras.push(("c_star".into(), c_star));
        let violations = report.rows.iter().filter(|r| r.ok() == Some(false)).count();
        report.gates = vec![
            Gate::new("psi_bound", violations == 0, format!("{violations} rows above psi_n")),
            Gate::new(
                "c_star",
                (c_star - target).abs() <= C_STAR_WINDOW * target,
                format!("c* {c_star:.6} expected {target} +- {}%", C_STAR_WINDOW * 100.0),
            ),
        ];
    }
    Ok(report)
}

/// Least-squares `c*` with `n (L - I) P_n f ~ c* P_n Delta f`.
pub fn fit_constant(f: &TestFunction, n: u64, tail_eps: f64) -> Result<f64> {
    let d = f.dim();
    let gen = discrete_generator(&simple_walk(d), &embed(f, n, tail_eps)?, n)?;
    let lap = f.laplacian();
    let radius = embed_radius(&lap, n, tail_eps).max(gen.radius());
    let lap_n = crate::grid::sample_scaled(d, n, radius, tail_eps, |y| lap.eval(y))?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, l) in lap_n.block().sites().zip(lap_n.values()) {
        num += (l.conj() * gen.get(&x)).re;
        den += l.norm_sqr();
    }
    Ok(num / den)
}

pub const BOUND_TABLE_HEADER: &str =
    "n,k,t,big_m,omega,general_total,term1,term2,term3,term4,simplified_total,ok";

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTableRow {
    pub n: u64,
    pub k: u64,
    pub t: f64,
    pub big_m: f64,
    pub omega: f64,
    /// General bound at the configured `(M, omega)`.
    pub general: BoundBreakdown,
    pub simplified: f64,
    /// General bound at `M = 1, omega = 0` is at most the simplified one.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub d: usize,
    pub rows: Vec<BoundTableRow>,
    pub gates: Vec<Gate>,
}

impl BoundTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(BOUND_TABLE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let [a, b, c, d] = r.general.terms();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{}",
                r.n, r.k, r.t, r.big_m, r.omega, r.general.total, a, b, c, d, r.simplified, r.ok
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment=bound-table");
        let _ = writeln!(s, "d={}", self.d);
        let _ = writeln!(s, "rows={}", self.rows.len());
        for g in &self.gates {
            let _ = writeln!(s, "gate.{}={} {}", g.name, if g.passed { "pass" } else { "fail" }, g.detail);
        }
        let _ = writeln!(s, "passed={}", self.passed());
        s
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }
}

/// Bound evaluators over `t in {0, t/4, t/2, t}` and the configured `n`.
pub fn run_bound_table(cfg: &ExperimentConfig) -> Result<BoundTable> {
    cfg.validate()?;
    let f = test_function(cfg)?;
    let d = cfg.d;
    let s = CltSeminorms::compute(&f, &GeneratorSpec::heat(d, cfg.c, cfg.lambda))?;
    let mut times = vec![0.0, 0.25 * cfg.t, 0.5 * cfg.t, cfg.t];
    times.dedup();
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for &t in &times {
            let base = s.inputs(t, n, cfg.lambda, d);
            let configured = BoundInputs {
                big_m: cfg.big_m,
                omega: cfg.omega,
                ..base
            };
            let simplified = bound_simplified(&base)?;
            rows.push(BoundTableRow {
                n,
                k: base.k,
                t,
                big_m: cfg.big_m,
                omega: cfg.omega,
                general: bound_general(&configured)?,
                simplified,
                ok: bound_general(&base)?.total <= simplified,
            });
        }
    }
    let violations = rows.iter().filter(|r| !r.ok).count();
    Ok(BoundTable {
        d,
        rows,
        gates: vec![Gate::new(
            "dominance",
            violations == 0,
            format!("{violations} points with general > simplified"),
        )],
    })
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Rates(RateReport),
    Table(BoundTable),
}

impl Outcome {
    pub fn to_csv(&self) -> String {
        match self {
            Outcome::Rates(r) => r.to_csv(),
            Outcome::Table(t) => t.to_csv(),
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Outcome::Rates(r) => r.summary(),
            Outcome::Table(t) => t.summary(),
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            Outcome::Rates(r) => r.passed(),
            Outcome::Table(t) => t.passed(),
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    Ok(match cfg.experiment {
        Experiment::Clt => Outcome::Rates(run_clt(cfg)?),
        Experiment::Harper => Outcome::Rates(run_harper(cfg)?),
        Experiment::Voronovskaja => Outcome::Rates(run_voronovskaja(cfg)?),
        Experiment::BoundTable => Outcome::Table(run_bound_table(cfg)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(exp: Experiment, d: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(exp, d);
        c.n_list = vec![16, 32, 64];
        c
    }

    #[test]
    fn clt_time_zero_is_exact() {
        let mut c = small(Experiment::Clt, 1);
        c.t = 0.0;
        let r = run_clt(&c).unwrap();
        for row in &r.rows {
            assert_eq!(row.k, 0);
            // only truncation and quadrature remain
            assert!(row.error.lo <= c.tail_eps);
            assert!(row.error.hi <= 2.0 * c.tail_eps + c.semigroup_tol);
        }
    }

    #[test]
    fn clt_rows_respect_bound() {
        let r = run_clt(&small(Experiment::Clt, 1)).unwrap();
        assert!(r.rows.iter().all(|row| row.ok() == Some(true)));
        assert!(r.rows.iter().all(|row| (row.error.width() - 1e-12 - 1e-10).abs() < 1e-16));
    }

    #[test]
    fn harper_zero_field_matches_clt() {
        let mut h = small(Experiment::Harper, 2);
        h.b = 0.0;
        h.c = 0.25;
        let mut c = small(Experiment::Clt, 2);
        c.t = h.t;
        let a = run_harper(&h).unwrap();
        let b = run_clt(&c).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x.error.mid() - y.error.mid()).abs() <= x.error.width() + y.error.width());
        }
    }

    #[test]
    fn deterministic_csv() {
        let c = small(Experiment::Clt, 1);
        assert_eq!(run(&c).unwrap().to_csv(), run(&c).unwrap().to_csv());
    }

    #[test]
    fn bound_table_dominance() {
        let t = run_bound_table(&small(Experiment::BoundTable, 1)).unwrap();
        assert!(t.passed());
        assert_eq!(t.rows.len(), 12);
        assert!(t.to_csv().starts_with(BOUND_TABLE_HEADER));
    }
}
