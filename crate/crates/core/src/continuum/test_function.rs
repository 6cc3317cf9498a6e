use num_complex::Complex64;

use crate::{Error, Result};

/// Highest derivative order accepted by [`TestFunction::derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 5;

/// `coeff * (x - center)^alpha * exp(-|x - center|^2 / (2 width^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub alpha: Vec<u32>,
    pub center: Vec<f64>,
    pub width: f64,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum()
    }

    fn same_shape(&self, other: &Term) -> bool {
        self.alpha == other.alpha
            && self.width.to_bits() == other.width.to_bits()
            && self.center.len() == other.center.len()
            && self.center.iter().zip(&other.center).all(|(a, b)| a.to_bits() == b.to_bits())
    }

    fn center_norm(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut r2 = 0.0;
        let mut poly = 1.0;
        for ((&xi, &ci), &ai) in x.iter().zip(&self.center).zip(&self.alpha) {
            let u = xi - ci;
            r2 += u * u;
            if ai > 0 {
                poly *= u.powi(ai as i32);
            }
        }
        self.coeff * (poly * (-0.5 * r2 / (self.width * self.width)).exp())
    }

    /// Polynomial factor `(y - center)^alpha` alone.
    #[inline]
    pub fn poly(&self, y: &[f64]) -> f64 {
        let mut p = 1.0;
        for ((&yi, &ci), &ai) in y.iter().zip(&self.center).zip(&self.alpha) {
            if ai > 0 {
                p *= (yi - ci).powi(ai as i32);
            }
        }
        p
    }
}

/// Finite sum of Hermite-Gaussian terms on `R^d`.
///
/// The family is closed under partial derivatives and multiplication by
/// coordinates, so every operator used here maps it into itself exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    dim: usize,
    terms: Vec<Term>,
}

impl TestFunction {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTestFunction("dimension must be at least 1".into()));
        }
        for t in &terms {
            if t.alpha.len() != dim || t.center.len() != dim {
                return Err(Error::InvalidTestFunction("term rank does not match dimension".into()));
            }
            if !(t.width > 0.0 && t.width.is_finite()) {
                return Err(Error::InvalidTestFunction(format!("width {} must be positive", t.width)));
            }
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() || t.center.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidTestFunction("non-finite parameter".into()));
            }
        }
        Ok(TestFunction { dim, terms }.simplified())
    }

    /// `exp(-|x|^2 / 2)`.
    pub fn gaussian(dim: usize) -> Self {
        TestFunction::gaussian_at(vec![0.0; dim], 1.0)
    }

    pub fn gaussian_at(center: Vec<f64>, width: f64) -> Self {
        let dim = center.len();
        TestFunction::new(
            dim,
            vec![Term {
                coeff: Complex64::new(1.0, 0.0),
                alpha: vec![0; dim],
                center,
                width,
            }],
        )
        .expect("valid gaussian")
    }

    /// Named members used by the experiments: `gaussian`, `shifted-gaussian`,
    /// `hermite`, `mixture`.
    pub fn by_id(id: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTestFunction("dimension must be at least 1".into()));
        }
        let mut shift = vec![0.0; dim];
        shift[0] = 0.5;
        match id {
            "gaussian" => Ok(TestFunction::gaussian(dim)),
            "shifted-gaussian" => Ok(TestFunction::gaussian_at(shift, 1.0)),
            "hermite" => {
                let mut alpha = vec![0; dim];
                alpha[0] = 1;
                TestFunction::new(
                    dim,
                    vec![Term {
                        coeff: Complex64::new(1.0, 0.0),
                        alpha,
                        center: vec![0.0; dim],
                        width: 1.0,
                    }],
                )
            }
            "mixture" => {
                let a = TestFunction::gaussian(dim);
                let b = TestFunction::gaussian_at(shift, 0.7).scale(Complex64::new(0.5, 0.25));
                Ok(a.add(&b))
            }
            other => Err(Error::InvalidTestFunction(format!("unknown test function id {other:?}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Merge equal-shape terms and drop zero coefficients.
    fn simplified(mut self) -> Self {
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if let Some(existing) = out.iter_mut().find(|e| e.same_shape(&t)) {
                existing.coeff += t.coeff;
            } else {
                out.push(t);
            }
        }
        out.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        TestFunction {
            dim: self.dim,
            terms: out,
        }
    }

    pub fn add(&self, other: &TestFunction) -> TestFunction {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TestFunction { dim: self.dim, terms }.simplified()
    }

    pub fn scale(&self, a: Complex64) -> TestFunction {
        TestFunction {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * a,
                    ..t.clone()
                })
                .collect(),
        }
        .simplified()
    }

    /// `x_axis * f`.
    pub fn mul_coord(&self, axis: usize) -> TestFunction {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let mut raised = t.clone();
            raised.alpha[axis] += 1;
            terms.push(raised);
            if t.center[axis] != 0.0 {
                terms.push(Term {
                    coeff: t.coeff * t.center[axis],
                    ..t.clone()
                });
            }
        }
        TestFunction { dim: self.dim, terms }.simplified()
    }

    /// First partial derivative along `axis`.
    pub fn partial(&self, axis: usize) -> TestFunction {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            let a = t.alpha[axis];
            if a > 0 {
                let mut lowered = t.clone();
                lowered.alpha[axis] -= 1;
                lowered.coeff *= a as f64;
                terms.push(lowered);
            }
            let mut raised = t.clone();
            raised.alpha[axis] += 1;
            raised.coeff *= -1.0 / (t.width * t.width);
            terms.push(raised);
        }
        TestFunction { dim: self.dim, terms }.simplified()
    }

    /// Exact partial derivative `d^alpha f`, `|alpha| <= 5`.
    pub fn derivative(&self, alpha: &[u32]) -> Result<TestFunction> {
        if alpha.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: alpha.len(),
            });
        }
        let order: u32 = alpha.iter().sum();
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::InvalidArgument(format!(
                "derivative order {order} exceeds {MAX_DERIVATIVE_ORDER}"
            )));
        }
        let mut g = self.clone();
        for (axis, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                g = g.partial(axis);
            }
        }
        Ok(g)
    }

    /// `sum_i d^2 f / dx_i^2`.
    pub fn laplacian(&self) -> TestFunction {
        let mut out = TestFunction {
            dim: self.dim,
            terms: Vec::new(),
        };
        for i in 0..self.dim {
            out = out.add(&self.partial(i).partial(i));
        }
        out
    }

    /// Upper bound for `sup_{|x| >= r} |f(x)|`, nonincreasing in `r`.
    ///
    /// Uses `|(x-c)^alpha| <= |x-c|^{|alpha|}` and the fact that
    /// `s^k exp(-s^2/(2w^2))` decreases for `s >= w sqrt(k)`.
    pub fn tail_envelope(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k = t.degree() as f64;
                let s = (r - t.center_norm()).max(0.0).max(t.width * k.sqrt());
                let pow = if k == 0.0 { 1.0 } else { s.powf(k) };
                t.coeff.norm() * pow * (-0.5 * s * s / (t.width * t.width)).exp()
            })
            .sum()
    }

    /// Smallest radius (to bisection precision) beyond which `|f| <= eps`.
    pub fn tail_radius(&self, eps: f64) -> f64 {
        radius_where(|r| self.tail_envelope(r), eps)
    }

    /// Gaussian majorants `|f(x)| <= sum amp * exp(-|x - c|^2 / (2 var))`.
    pub fn gaussian_majorant(&self) -> Vec<(f64, Vec<f64>, f64)> {
        self.terms
            .iter()
            .map(|t| {
                let k = t.degree() as f64;
                let w2 = t.width * t.width;
                // sup_s s^k exp(-s^2/(4w^2)) = (2 w^2 k)^{k/2} e^{-k/2}
                let amp = if k == 0.0 {
                    1.0
                } else {
                    (2.0 * w2 * k).powf(0.5 * k) * (-0.5 * k).exp()
                };
                (t.coeff.norm() * amp, t.center.clone(), 2.0 * w2)
            })
            .collect()
    }

    /// Upper bound for `sup_{|x| >= r} (e^{s Delta} |f|)(x)`; by domination this
    /// also bounds the magnetic semigroup with the same `s`.
    pub fn evolved_envelope(&self, s: f64, r: f64) -> f64 {
        let d = self.dim as f64;
        self.gaussian_majorant()
            .into_iter()
            .map(|(amp, c, var)| {
                let cn = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                let v = var + 2.0 * s;
                let q = (r - cn).max(0.0);
                amp * (var / v).powf(0.5 * d) * (-0.5 * q * q / v).exp()
            })
            .sum()
    }

    pub fn evolved_tail_radius(&self, s: f64, eps: f64) -> f64 {
        radius_where(|r| self.evolved_envelope(s, r), eps)
    }

    pub(crate) fn min_width(&self) -> f64 {
        self.terms.iter().map(|t| t.width).fold(f64::INFINITY, f64::min)
    }
}

fn radius_where(env: impl Fn(f64) -> f64, eps: f64) -> f64 {
    if env(0.0) <= eps {
        return 0.0;
    }
    let mut hi = 1.0;
    while env(hi) > eps {
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if env(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    hi
}
