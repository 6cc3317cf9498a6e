use num_complex::Complex64;

use super::TestFunction;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `c * Delta`, semigroup `e^{+t G}`.
    Heat,
    /// `c * (nabla - iA)^*(nabla - iA)`, semigroup `e^{-t G}`.
    Magnetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub dim: usize,
    pub c: f64,
    /// Row-major `dim x dim`, `A_i(x) = sum_j a_ij x_j`. Ignored for heat.
    pub a: Vec<f64>,
    pub lambda: f64,
}

impl GeneratorSpec {
    pub fn heat(dim: usize, c: f64, lambda: f64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Heat,
            dim,
            c,
            a: vec![0.0; dim * dim],
            lambda,
        }
    }

    pub fn magnetic(dim: usize, c: f64, a: Vec<f64>, lambda: f64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Magnetic,
            dim,
            c,
            a,
            lambda,
        }
    }

    /// Constant field `b` on `R^2` in the symmetric gauge.
    pub fn constant_field(b: f64, c: f64, lambda: f64) -> Self {
        GeneratorSpec::magnetic(2, c, vec![0.0, -0.5 * b, 0.5 * b, 0.0], lambda)
    }

    /// Limit constant `1/(2d)` of the simple walk on `Z^d`.
    pub fn walk_constant(dim: usize) -> f64 {
        1.0 / (2 * dim) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidArgument(format!("c = {} must be positive", self.c)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda = {} must be positive", self.lambda)));
        }
        if self.kind == GeneratorKind::Magnetic && self.a.len() != self.dim * self.dim {
            return Err(Error::InvalidArgument("potential matrix has wrong size".into()));
        }
        Ok(())
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.dim + j]
    }

    /// Sign `s` with semigroup `e^{s t G}`.
    pub fn semigroup_sign(&self) -> f64 {
        match self.kind {
            GeneratorKind::Heat => 1.0,
            GeneratorKind::Magnetic => -1.0,
        }
    }
}

/// `A_i(x) f`.
fn potential_times(g: &GeneratorSpec, i: usize, f: &TestFunction) -> TestFunction {
    let mut out = f.scale(Complex64::new(0.0, 0.0));
    for j in 0..g.dim {
        let a = g.a(i, j);
        if a != 0.0 {
            out = out.add(&f.mul_coord(j).scale(Complex64::new(a, 0.0)));
        }
    }
    out
}

/// `G f`, exactly, in the test-function family.
pub fn generator_apply(g: &GeneratorSpec, f: &TestFunction) -> Result<TestFunction> {
    if f.dim() != g.dim {
        return Err(Error::DimensionMismatch {
            expected: g.dim,
            got: f.dim(),
        });
    }
    let c = Complex64::new(g.c, 0.0);
    match g.kind {
        GeneratorKind::Heat => Ok(f.laplacian().scale(c)),
        GeneratorKind::Magnetic => {
            let i = Complex64::new(0.0, 1.0);
            let mut out = f.laplacian().scale(Complex64::new(-1.0, 0.0));
            let mut trace = 0.0;
            for k in 0..g.dim {
                trace += g.a(k, k);
                let drift = potential_times(g, k, &f.partial(k));
                out = out.add(&drift.scale(2.0 * i));
                let ak = potential_times(g, k, f);
                out = out.add(&potential_times(g, k, &ak));
            }
            if trace != 0.0 {
                out = out.add(&f.scale(i * trace));
            }
            Ok(out.scale(c))
        }
    }
}

/// Generator of the semigroup actually evolved: `G` for heat, `-G` for magnetic.
pub fn semigroup_generator_apply(g: &GeneratorSpec, f: &TestFunction) -> Result<TestFunction> {
    let gf = generator_apply(g, f)?;
    Ok(gf.scale(Complex64::new(g.semigroup_sign(), 0.0)))
}

/// `(lambda - A) f` with `A` the semigroup generator.
pub fn resolvent_argument(g: &GeneratorSpec, f: &TestFunction) -> Result<TestFunction> {
    let af = semigroup_generator_apply(g, f)?;
    Ok(f.scale(Complex64::new(g.lambda, 0.0)).add(&af.scale(Complex64::new(-1.0, 0.0))))
}
