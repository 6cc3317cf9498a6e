//! Computable right-hand sides of the Trotter rate estimate.

use crate::continuum::{resolvent_argument, semigroup_generator_apply, sup_norm, third_seminorm, GeneratorSpec, TestFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub big_m: f64,
    pub omega: f64,
    pub lambda: f64,
    pub t: f64,
    pub n: u64,
    pub k: u64,
    pub phi: f64,
    pub psi: f64,
    pub psi_lambda: f64,
}

impl BoundInputs {
    /// `M = 1`, `omega = 0`, `k = floor(n t)`.
    pub fn contraction(lambda: f64, t: f64, n: u64, phi: f64, psi: f64, psi_lambda: f64) -> Self {
        BoundInputs {
            big_m: 1.0,
            omega: 0.0,
            lambda,
            t,
            n,
            k: default_k(n, t),
            phi,
            psi,
            psi_lambda,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidBoundInputs(m.into()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if !(self.big_m >= 1.0 && self.big_m.is_finite()) {
            return bad("M must be at least 1");
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            return bad("omega must be nonnegative");
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad("t must be nonnegative");
        }
        for (name, v) in [("phi", self.phi), ("psi", self.psi), ("psi_lambda", self.psi_lambda)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidBoundInputs(format!("{name} must be nonnegative")));
            }
        }
        if !(self.lambda.is_finite() && self.denominator() > 0.0) {
            return bad("lambda must exceed omega e^{omega/n}");
        }
        Ok(())
    }

    fn denominator(&self) -> f64 {
        self.lambda - self.omega * (self.omega / self.n as f64).exp()
    }
}

/// `k(n) = floor(n t)`.
pub fn default_k(n: u64, t: f64) -> u64 {
    (n as f64 * t).floor() as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundBreakdown {
    pub term_chernoff: f64,
    pub term_timeshift: f64,
    pub term_res_static: f64,
    pub term_res_dynamic: f64,
    pub total: f64,
    pub t_n: f64,
}

impl BoundBreakdown {
    fn from_terms(terms: [f64; 4], t_n: f64) -> Self {
        BoundBreakdown {
            term_chernoff: terms[0],
            term_timeshift: terms[1],
            term_res_static: terms[2],
            term_res_dynamic: terms[3],
            total: terms[0] + terms[1] + terms[2] + terms[3],
            t_n,
        }
    }

    pub fn terms(&self) -> [f64; 4] {
        [
            self.term_chernoff,
            self.term_timeshift,
            self.term_res_static,
            self.term_res_dynamic,
        ]
    }
}

pub fn bound_general(inp: &BoundInputs) -> Result<BoundBreakdown> {
    inp.validate()?;
    let m = inp.big_m;
    let w = inp.omega;
    let n = inp.n as f64;
    let kn = inp.k as f64 / n;
    let ew = (w / n).exp();
    let t = inp.t;
    let t_n = t.max(kn);
    let den = inp.denominator();
    let term1 = m * (2.0 * w * ew * kn).exp() * ((w / n) * kn + (inp.k as f64).sqrt() / n) * inp.phi;
    let term2 = m * (w * t_n * ew).exp() * (kn - t).abs() * inp.phi;
    let term3 = m * m * ((w * t).exp() + (w * t * ew).exp()) / den * inp.psi;
    let term4 = m * m * m * t * (w * t * (ew + 1.0)).exp() / den * inp.psi_lambda;
    Ok(BoundBreakdown::from_terms([term1, term2, term3, term4], t_n))
}

/// Four terms of `sqrt(t/n) phi + phi/n + 2 psi/lambda + t psi_lambda/lambda`.
pub fn bound_simplified_breakdown(inp: &BoundInputs) -> Result<BoundBreakdown> {
    inp.validate()?;
    if inp.big_m != 1.0 || inp.omega != 0.0 {
        return Err(Error::InvalidBoundInputs(
            "simplified bound requires M = 1 and omega = 0".into(),
        ));
    }
    let n = inp.n as f64;
    let t = inp.t;
    let terms = [
        (t / n).sqrt() * inp.phi,
        inp.phi / n,
        2.0 * inp.psi / inp.lambda,
        t * inp.psi_lambda / inp.lambda,
    ];
    Ok(BoundBreakdown::from_terms(terms, t.max(inp.k as f64 / n)))
}

pub fn bound_simplified(inp: &BoundInputs) -> Result<f64> {
    Ok(bound_simplified_breakdown(inp)?.total)
}

/// `d / (6 sqrt n) * max_i || d^3 f / dx_i^3 ||`.
pub fn psi_n(f: &TestFunction, n: u64, d: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(psi_from_third(third_seminorm(f)?, n, d))
}

pub fn psi_from_third(third: f64, n: u64, d: usize) -> f64 {
    d as f64 / (6.0 * (n as f64).sqrt()) * third
}

/// `|| A f || + psi_n(f)` with `A` the semigroup generator of `g`.
pub fn phi_n(f: &TestFunction, g: &GeneratorSpec, n: u64, d: usize) -> Result<f64> {
    let af = semigroup_generator_apply(g, f)?;
    Ok(sup_norm(&af) + psi_n(f, n, d)?)
}

/// Seminorms entering the limit-theorem bound, reusable across `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltSeminorms {
    pub generator_sup: f64,
    pub third: f64,
    pub third_resolvent: f64,
}

impl CltSeminorms {
    pub fn compute(f: &TestFunction, g: &GeneratorSpec) -> Result<Self> {
        let af = semigroup_generator_apply(g, f)?;
        Ok(CltSeminorms {
            generator_sup: sup_norm(&af),
            third: third_seminorm(f)?,
            third_resolvent: third_seminorm(&resolvent_argument(g, f)?)?,
        })
    }

    pub fn inputs(&self, t: f64, n: u64, lambda: f64, d: usize) -> BoundInputs {
        let psi = psi_from_third(self.third, n, d);
        BoundInputs::contraction(
            lambda,
            t,
            n,
            self.generator_sup + psi,
            psi,
            psi_from_third(self.third_resolvent, n, d),
        )
    }
}

/// Simplified bound with `phi_n(f)`, `psi_n(f)` and `psi_n((lambda - A) f)`.
pub fn clt_bound(f: &TestFunction, t: f64, n: u64, lambda: f64, d: usize, g: &GeneratorSpec) -> Result<f64> {
    let mut g = g.clone();
    g.lambda = lambda;
    let s = CltSeminorms::compute(f, &g)?;
    bound_simplified(&s.inputs(t, n, lambda, d))
}
