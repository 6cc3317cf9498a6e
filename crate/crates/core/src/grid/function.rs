use num_complex::Complex64;

use crate::continuum::TestFunction;
use crate::{Error, Result};

/// Axis-aligned box of lattice sites `origin[i] .. origin[i] + extent[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub origin: Vec<i64>,
    pub extent: Vec<usize>,
}

impl Block {
    pub fn new(origin: Vec<i64>, extent: Vec<usize>) -> Self {
        assert_eq!(origin.len(), extent.len(), "origin/extent rank mismatch");
        Block { origin, extent }
    }

    /// The cube `[-radius, radius]^dim`.
    pub fn centered(dim: usize, radius: usize) -> Self {
        Block {
            origin: vec![-(radius as i64); dim],
            extent: vec![2 * radius + 1; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn len(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides, last axis contiguous.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.dim()];
        for i in (0..self.dim().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.extent[i + 1];
        }
        s
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.iter()
            .zip(&self.origin)
            .zip(&self.extent)
            .all(|((&xi, &o), &e)| xi >= o && xi < o + e as i64)
    }

    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let mut idx = 0usize;
        for i in 0..self.dim() {
            idx = idx * self.extent[i] + (x[i] - self.origin[i]) as usize;
        }
        Some(idx)
    }

    pub fn site_of(&self, mut idx: usize) -> Vec<i64> {
        let mut x = vec![0i64; self.dim()];
        for i in (0..self.dim()).rev() {
            let e = self.extent[i];
            x[i] = self.origin[i] + (idx % e) as i64;
            idx /= e;
        }
        x
    }

    pub fn grow(&self, r: usize) -> Block {
        Block {
            origin: self.origin.iter().map(|&o| o - r as i64).collect(),
            extent: self.extent.iter().map(|&e| e + 2 * r).collect(),
        }
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &Block) -> Block {
        let mut origin = Vec::with_capacity(self.dim());
        let mut extent = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let lo = self.origin[i].min(other.origin[i]);
            let hi = (self.origin[i] + self.extent[i] as i64).max(other.origin[i] + other.extent[i] as i64);
            origin.push(lo);
            extent.push((hi - lo) as usize);
        }
        Block { origin, extent }
    }

    /// Largest sup-norm of a site in the box (distance of the farthest face from 0).
    pub fn radius(&self) -> usize {
        self.origin
            .iter()
            .zip(&self.extent)
            .map(|(&o, &e)| o.unsigned_abs().max((o + e as i64 - 1).unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }

    /// Iterator over all sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |i| self.site_of(i))
    }
}

/// Certified enclosure of a nonnegative quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// A complex function on a finite block of `Z^d`, with a recorded bound on
/// everything the dense block does not capture.
///
/// `tail_bound` bounds the represented function outside the block; for
/// approximately computed functions it also absorbs the approximation error,
/// so the true sup-norm lies in `[sup_norm(), sup_norm() + tail_bound]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    block: Block,
    values: Vec<Complex64>,
    tail_bound: f64,
    scale_n: u64,
}

impl GridFunction {
    pub fn new(block: Block, values: Vec<Complex64>, tail_bound: f64, scale_n: u64) -> Result<Self> {
        if block.dim() == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if values.len() != block.len() {
            return Err(Error::InvalidArgument(format!(
                "block has {} cells but {} values were given",
                block.len(),
                values.len()
            )));
        }
        if !(tail_bound >= 0.0 && tail_bound.is_finite()) {
            return Err(Error::InvalidArgument(format!("tail bound {tail_bound} must be finite and >= 0")));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite value".into()));
        }
        Ok(GridFunction {
            block,
            values,
            tail_bound,
            scale_n,
        })
    }

    pub fn zeros(block: Block) -> Self {
        let len = block.len();
        GridFunction {
            block,
            values: vec![Complex64::new(0.0, 0.0); len],
            tail_bound: 0.0,
            scale_n: 0,
        }
    }

    /// Unit mass at `site`, exactly supported.
    pub fn delta(site: &[i64]) -> Self {
        let block = Block::new(site.to_vec(), vec![1; site.len()]);
        GridFunction {
            block,
            values: vec![Complex64::new(1.0, 0.0)],
            tail_bound: 0.0,
            scale_n: 0,
        }
    }

    pub fn from_fn(block: Block, mut f: impl FnMut(&[i64]) -> Complex64) -> Result<Self> {
        let values: Vec<Complex64> = block.sites().map(|x| f(&x)).collect();
        GridFunction::new(block, values, 0.0, 0)
    }

    pub fn dim(&self) -> usize {
        self.block.dim()
    }

    pub fn block(&self) -> &Block {
        &self.block
    }

    pub fn origin(&self) -> &[i64] {
        &self.block.origin
    }

    pub fn extent(&self) -> &[usize] {
        &self.block.extent
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn scale_n(&self) -> u64 {
        self.scale_n
    }

    pub fn with_tail_bound(mut self, tail_bound: f64) -> Self {
        assert!(tail_bound >= 0.0 && tail_bound.is_finite());
        self.tail_bound = tail_bound;
        self
    }

    pub fn with_scale_n(mut self, n: u64) -> Self {
        self.scale_n = n;
        self
    }

    /// Value at `x`; zero outside the block.
    pub fn get(&self, x: &[i64]) -> Complex64 {
        self.block
            .index_of(x)
            .map(|i| self.values[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn radius(&self) -> usize {
        self.block.radius()
    }

    /// Pointwise linear combination `a*self + b*other` on the union block.
    pub fn axpby(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<GridFunction> {
        check_dim(self, other)?;
        let block = self.block.union(&other.block);
        let values = block.sites().map(|x| a * self.get(&x) + b * other.get(&x)).collect();
        GridFunction::new(
            block,
            values,
            a.norm() * self.tail_bound + b.norm() * other.tail_bound,
            self.scale_n,
        )
    }

    pub fn scale(&self, a: Complex64) -> GridFunction {
        GridFunction {
            block: self.block.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
            tail_bound: a.norm() * self.tail_bound,
            scale_n: self.scale_n,
        }
    }
}

fn check_dim(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    Ok(())
}

/// Sample `f(x / sqrt(n))` on the smallest centered block outside which
/// `|f| <= tail_eps`.
pub fn embed(f: &TestFunction, n: u64, tail_eps: f64) -> Result<GridFunction> {
    if !(tail_eps > 0.0) {
        return Err(Error::InvalidArgument(format!("tail_eps must be positive, got {tail_eps}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let rho = f.tail_radius(tail_eps);
    let radius = (rho * (n as f64).sqrt()).ceil() as usize;
    sample_scaled(f.dim(), n, radius, tail_eps, |y| f.eval(y))
}

/// Block radius [`embed`] uses for `f` at scale `n`.
pub fn embed_radius(f: &TestFunction, n: u64, tail_eps: f64) -> usize {
    (f.tail_radius(tail_eps) * (n as f64).sqrt()).ceil() as usize
}

/// Sample an arbitrary continuum function at `x / sqrt(n)` over `[-radius, radius]^dim`.
pub fn sample_scaled(
    dim: usize,
    n: u64,
    radius: usize,
    tail_bound: f64,
    mut f: impl FnMut(&[f64]) -> Complex64,
) -> Result<GridFunction> {
    let block = Block::centered(dim, radius);
    let inv = 1.0 / (n as f64).sqrt();
    let mut y = vec![0.0; dim];
    let mut values = Vec::with_capacity(block.len());
    for x in block.sites() {
        for (yi, &xi) in y.iter_mut().zip(&x) {
            *yi = xi as f64 * inv;
        }
        let v = f(&y);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::InvalidTestFunction(format!("non-finite sample at {x:?}")));
        }
        values.push(v);
    }
    GridFunction::new(block, values, tail_bound, n)
}

/// `[m, m + f.tail + g.tail]` with `m` the max of `|f - g|` over the union block.
pub fn sup_distance(f: &GridFunction, g: &GridFunction) -> Result<Interval> {
    check_dim(f, g)?;
    let block = f.block.union(&g.block);
    let m = if block == f.block && block == g.block {
        f.values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    } else {
        block
            .sites()
            .map(|x| (f.get(&x) - g.get(&x)).norm())
            .fold(0.0, f64::max)
    };
    Ok(Interval::new(m, m + f.tail_bound + g.tail_bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn block_indexing_round_trips() {
        let b = Block::new(vec![-2, 3, 0], vec![4, 2, 5]);
        for i in 0..b.len() {
            let x = b.site_of(i);
            assert_eq!(b.index_of(&x), Some(i));
        }
        assert_eq!(b.index_of(&[2, 3, 0]), None);
        assert_eq!(b.radius(), 4);
    }

    #[test]
    fn embed_gaussian_values_and_radius() {
        let g = TestFunction::gaussian(1);
        let f = embed(&g, 4, 1e-12).unwrap();
        let v = f.get(&[2]);
        assert!((v.re - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(f.tail_bound(), 1e-12);
        assert_eq!(f.scale_n(), 4);

        let f1 = embed(&g, 1, 1e-12).unwrap();
        // integer-radius scan: smallest r with exp(-r^2/2) <= 1e-12
        let mut r = 0usize;
        while (-(r as f64).powi(2) / 2.0).exp() > 1e-12 {
            r += 1;
        }
        assert_eq!(r, 8);
        assert_eq!(f1.radius(), r);
        for x in -8..=8i64 {
            assert_eq!(f1.get(&[x]).re, (-(x as f64).powi(2) / 2.0).exp());
        }
    }

    #[test]
    fn embed_rejects_bad_tolerance() {
        let g = TestFunction::gaussian(1);
        assert!(embed(&g, 1, 0.0).is_err());
        assert!(embed(&g, 0, 1e-3).is_err());
    }

    #[test]
    fn sup_distance_examples() {
        let f = GridFunction::delta(&[0]).with_tail_bound(0.25);
        let d = sup_distance(&f, &f).unwrap();
        assert_eq!((d.lo, d.hi), (0.0, 0.5));

        let a = GridFunction::delta(&[0]);
        let b = a.scale(c(2.0));
        let d = sup_distance(&a, &b).unwrap();
        assert_eq!((d.lo, d.hi), (1.0, 1.0));

        let p = GridFunction::delta(&[3]);
        let q = GridFunction::delta(&[-5]).scale(c(0.5));
        let d = sup_distance(&p, &q).unwrap();
        assert_eq!((d.lo, d.hi), (1.0, 1.0));
    }

    #[test]
    fn sup_distance_rejects_dimension_mismatch() {
        let a = GridFunction::delta(&[0]);
        let b = GridFunction::delta(&[0, 0]);
        assert!(matches!(sup_distance(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constructor_validates() {
        let b = Block::centered(1, 1);
        assert!(GridFunction::new(b.clone(), vec![c(1.0); 2], 0.0, 0).is_err());
        assert!(GridFunction::new(b.clone(), vec![c(f64::NAN); 3], 0.0, 0).is_err());
        assert!(GridFunction::new(b, vec![c(1.0); 3], -1.0, 0).is_err());
    }
}
