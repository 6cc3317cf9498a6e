use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::integrate_gaussian;
use super::{dense_reference, GeneratorSpec, RefGrid, TestFunction};
use crate::{Error, Result};

/// Largest admissible disagreement between the kernel evaluator and the
/// finite-difference reference.
pub const KERNEL_VALIDATION_LIMIT: f64 = 1e-6;

/// Shared quadrature for a Gaussian kernel `pref * exp(-a |x - y|^2) * e^{i phase(y)}`
/// against one term of `f`.
fn kernel_term(
    term: &super::Term,
    x: &[f64],
    a: f64,
    pref: f64,
    tol: f64,
    phase: impl Fn(&[f64]) -> f64,
) -> Result<Complex64> {
    let d = x.len();
    let beta = 0.5 / (term.width * term.width);
    let p = a + beta;
    let r2: f64 = x.iter().zip(&term.center).map(|(xi, ci)| (xi - ci).powi(2)).sum();
    let outer = pref * (-a * beta / p * r2).exp() * p.powf(-0.5 * d as f64);
    if outer == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m: Vec<f64> = x.iter().zip(&term.center).map(|(xi, ci)| (a * xi + beta * ci) / p).collect();
    let sp = p.sqrt();
    let mut y = vec![0.0; d];
    let inner_tol = tol / (outer * term.coeff.norm()).max(1e-300);
    let sum = integrate_gaussian(d, inner_tol, |z| {
        for k in 0..d {
            y[k] = m[k] + z[k] / sp;
        }
        Complex64::from_polar(term.poly(&y), phase(&y))
    })?;
    Ok(term.coeff * outer * sum)
}

/// Evaluator for `e^{c t Delta} f`.
#[derive(Debug, Clone)]
pub struct HeatEvolution {
    f: TestFunction,
    s: f64,
    tol: f64,
}

impl HeatEvolution {
    pub fn time_scale(&self) -> f64 {
        self.s
    }

    pub fn function(&self) -> &TestFunction {
        &self.f
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.f.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.f.dim(),
                got: x.len(),
            });
        }
        if self.s == 0.0 {
            return Ok(self.f.eval(x));
        }
        let d = x.len() as f64;
        let a = 0.25 / self.s;
        let pref = (4.0 * PI * self.s).powf(-0.5 * d);
        let per = self.tol / self.f.terms().len().max(1) as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for t in self.f.terms() {
            total += kernel_term(t, x, a, pref, per, |_| 0.0)?;
        }
        Ok(total)
    }
}

/// `x -> (e^{c t Delta} f)(x)` with absolute error at most `tol`.
pub fn heat_evolve(f: &TestFunction, t: f64, c: f64, tol: f64) -> Result<HeatEvolution> {
    check_time(t, c, tol)?;
    Ok(HeatEvolution {
        f: f.clone(),
        s: c * t,
        tol,
    })
}

fn check_time(t: f64, c: f64, tol: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c = {c} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    Ok(())
}

/// `u / sinh(u)`
fn u_over_sinh(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u / u.sinh()
    }
}

/// `u * coth(u)`
fn u_coth(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 + u * u / 3.0
    } else {
        u / u.tanh()
    }
}

/// Evaluator for `e^{-c t (nabla - iA)^*(nabla - iA)} f` with the symmetric
/// constant-field potential `A = (-b x_2 / 2, b x_1 / 2)` on `R^2`.
///
/// Kernel with `s = c t`:
/// `b / (4 pi sinh(b s)) exp(-(b/4) coth(b s) |x-y|^2) exp(i (b/2)(x_2 y_1 - x_1 y_2))`.
#[derive(Debug, Clone)]
pub struct MagneticEvolution {
    f: TestFunction,
    b: f64,
    s: f64,
    tol: f64,
}

impl MagneticEvolution {
    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: x.len() });
        }
        if self.s == 0.0 {
            return Ok(self.f.eval(x));
        }
        let u = self.b * self.s;
        let a = 0.25 / self.s * u_coth(u);
        let pref = u_over_sinh(u) / (4.0 * PI * self.s);
        let half_b = 0.5 * self.b;
        let per = self.tol / self.f.terms().len().max(1) as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for t in self.f.terms() {
            total += kernel_term(t, x, a, pref, per, |y| half_b * (x[1] * y[0] - x[0] * y[1]))?;
        }
        Ok(total)
    }

    pub fn field(&self) -> f64 {
        self.b
    }

    /// Largest discrepancy against [`dense_reference`] on the coarse nodes of
    /// `grid` inside `window`; fails hard above [`KERNEL_VALIDATION_LIMIT`].
    pub fn validate(&self, c: f64, grid: &RefGrid, window: f64) -> Result<f64> {
        let spec = GeneratorSpec::constant_field(self.b, c, 1.0);
        let t = self.s / c;
        let f = &self.f;
        let reference = dense_reference(&spec, |x| f.eval(x), t, grid)?;
        let mut worst: f64 = 0.0;
        for (x, v) in reference.points().zip(reference.values()) {
            if x.iter().all(|xi| xi.abs() <= window) {
                worst = worst.max((self.eval(&x)? - v).norm());
            }
        }
        if worst > KERNEL_VALIDATION_LIMIT {
            return Err(Error::KernelValidation {
                discrepancy: worst,
                limit: KERNEL_VALIDATION_LIMIT,
            });
        }
        Ok(worst)
    }
}

pub fn magnetic_evolve(f: &TestFunction, t: f64, b: f64, c: f64, tol: f64) -> Result<MagneticEvolution> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
    }
    check_time(t, c, tol)?;
    if !b.is_finite() {
        return Err(Error::InvalidArgument("field must be finite".into()));
    }
    Ok(MagneticEvolution {
        f: f.clone(),
        b,
        s: c * t,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_gaussian_closed_form() {
        let f = TestFunction::gaussian(1);
        for &t in &[0.1, 0.5, 1.0, 3.0] {
            let e = heat_evolve(&f, t, 0.5, 1e-12).unwrap();
            for k in -20..=20 {
                let x = k as f64 * 0.3;
                let want = (1.0 + t).powf(-0.5) * (-x * x / (2.0 * (1.0 + t))).exp();
                assert!((e.eval(&[x]).unwrap() - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn heat_time_zero_is_identity() {
        let f = TestFunction::by_id("mixture", 2).unwrap();
        let e = heat_evolve(&f, 0.0, 0.25, 1e-10).unwrap();
        assert_eq!(e.eval(&[0.3, 0.1]).unwrap(), f.eval(&[0.3, 0.1]));
    }

    #[test]
    fn heat_negative_time_rejected() {
        assert!(heat_evolve(&TestFunction::gaussian(1), -1.0, 0.5, 1e-10).is_err());
    }

    #[test]
    fn magnetic_zero_field_matches_heat() {
        let f = TestFunction::by_id("mixture", 2).unwrap();
        let m = magnetic_evolve(&f, 0.7, 0.0, 0.25, 1e-11).unwrap();
        let h = heat_evolve(&f, 0.7, 0.25, 1e-11).unwrap();
        for &x in &[[0.0, 0.0], [0.5, -1.0], [2.0, 1.5]] {
            assert!((m.eval(&x).unwrap() - h.eval(&x).unwrap()).norm() < 2e-11);
        }
    }

    #[test]
    fn magnetic_contracts() {
        let f = TestFunction::gaussian_at(vec![0.5, 0.0], 1.0);
        let m = magnetic_evolve(&f, 1.0, 1.5, 0.25, 1e-11).unwrap();
        for i in -6..=6 {
            for j in -6..=6 {
                let x = [i as f64 * 0.5, j as f64 * 0.5];
                assert!(m.eval(&x).unwrap().norm() <= 1.0 + 1e-11);
            }
        }
    }

    #[test]
    fn magnetic_semigroup_limit_small_field() {
        let f = TestFunction::gaussian(2);
        let a = magnetic_evolve(&f, 0.4, 1e-7, 0.25, 1e-12).unwrap();
        let b = heat_evolve(&f, 0.4, 0.25, 1e-12).unwrap();
        assert!((a.eval(&[0.3, 0.2]).unwrap() - b.eval(&[0.3, 0.2]).unwrap()).norm() < 1e-7);
    }
}
