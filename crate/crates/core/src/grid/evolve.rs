use num_complex::Complex64;

use super::function::{Block, GridFunction};
use super::stencil::StencilOperator;
use crate::{Error, Result};

/// Resource guards for discrete evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvolveLimits {
    /// Largest working block (cells) any evolution may allocate.
    pub max_cells: usize,
    /// Largest number of operator applications in one call.
    pub max_steps: usize,
}

impl Default for EvolveLimits {
    fn default() -> Self {
        EvolveLimits {
            max_cells: 8_000_000,
            max_steps: 1_000_000,
        }
    }
}

/// Repeated stencil application inside a preallocated block.
///
/// The working buffer is the initial block grown by `(steps + 1) * radius`,
/// so every neighbour read stays in bounds and no reallocation happens.
struct Propagator<'a> {
    op: &'a StencilOperator,
    buf: Block,
    active: Block,
    cur: Vec<Complex64>,
    next: Vec<Complex64>,
    shifts: Vec<isize>,
    weights: Option<Vec<Complex64>>,
    r: usize,
}

impl<'a> Propagator<'a> {
    fn new(op: &'a StencilOperator, f: &GridFunction, steps: usize, limits: &EvolveLimits) -> Result<Self> {
        if op.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                got: f.dim(),
            });
        }
        if steps > limits.max_steps {
            return Err(Error::IterationBudget {
                needed: steps,
                budget: limits.max_steps,
            });
        }
        let r = op.radius();
        let grow = steps
            .checked_add(1)
            .and_then(|s| s.checked_mul(r))
            .ok_or(Error::CellBudget {
                needed: usize::MAX,
                budget: limits.max_cells,
            })?;
        let buf = f.block().grow(grow);
        let needed = buf
            .extent
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .unwrap_or(usize::MAX);
        if needed > limits.max_cells {
            return Err(Error::CellBudget {
                needed,
                budget: limits.max_cells,
            });
        }
        let strides = buf.strides();
        let shifts = op
            .offsets()
            .iter()
            .map(|e| e.iter().zip(&strides).map(|(&ei, &s)| ei as isize * s as isize).sum())
            .collect();
        let mut cur = vec![Complex64::new(0.0, 0.0); buf.len()];
        let src = f.block();
        for (i, v) in f.values().iter().enumerate() {
            let x = src.site_of(i);
            let j = buf.index_of(&x).expect("source block inside buffer");
            cur[j] = *v;
        }
        let weights = op.has_phase().then(|| {
            let m = op.offsets().len();
            let mut w = Vec::with_capacity(buf.len() * m);
            for x in buf.sites() {
                for j in 0..m {
                    w.push(op.weight(&x, j));
                }
            }
            w
        });
        Ok(Propagator {
            op,
            next: vec![Complex64::new(0.0, 0.0); buf.len()],
            buf,
            active: src.clone(),
            cur,
            shifts,
            weights,
            r,
        })
    }

    /// Calls `visit(buffer_index)` for every cell of `region`, row by row.
    fn for_each_row(buf: &Block, region: &Block, mut visit: impl FnMut(usize, usize)) {
        let d = buf.dim();
        let strides = buf.strides();
        let row_len = region.extent[d - 1];
        if region.is_empty() {
            return;
        }
        let outer: usize = region.extent[..d - 1].iter().product();
        let mut idx = vec![0usize; d - 1];
        for _ in 0..outer {
            let mut base = 0usize;
            for a in 0..d - 1 {
                base += (region.origin[a] - buf.origin[a]) as usize * strides[a] + idx[a] * strides[a];
            }
            base += (region.origin[d - 1] - buf.origin[d - 1]) as usize;
            visit(base, row_len);
            for a in (0..d - 1).rev() {
                idx[a] += 1;
                if idx[a] < region.extent[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    fn step(&mut self) {
        let new_active = self.active.grow(self.r);
        let probs = self.op.probs();
        let m = probs.len();
        let cur = &self.cur;
        let next = &mut self.next;
        let shifts = &self.shifts;
        let weights = self.weights.as_deref();
        Self::for_each_row(&self.buf, &new_active, |base, len| {
            for i in base..base + len {
                let mut acc = Complex64::new(0.0, 0.0);
                match weights {
                    None => {
                        for j in 0..m {
                            acc += cur[(i as isize + shifts[j]) as usize] * probs[j];
                        }
                    }
                    Some(w) => {
                        let row = &w[i * m..i * m + m];
                        for j in 0..m {
                            acc += row[j] * cur[(i as isize + shifts[j]) as usize];
                        }
                    }
                }
                next[i] = acc;
            }
        });
        std::mem::swap(&mut self.cur, &mut self.next);
        self.active = new_active;
    }

    fn accumulate(&self, acc: &mut [Complex64], w: f64) {
        let cur = &self.cur;
        Self::for_each_row(&self.buf, &self.active, |base, len| {
            for i in base..base + len {
                acc[i] += cur[i] * w;
            }
        });
    }

    fn extract(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.active.len());
        Self::for_each_row(&self.buf, &self.active, |base, len| {
            out.extend_from_slice(&data[base..base + len]);
        });
        out
    }
}

/// One application of `op`; the block grows by the stencil radius.
pub fn apply(op: &StencilOperator, f: &GridFunction) -> Result<GridFunction> {
    iterate_with(op, f, 1, &EvolveLimits::default())
}

/// `op^k f`.
pub fn iterate(op: &StencilOperator, f: &GridFunction, k: usize) -> Result<GridFunction> {
    iterate_with(op, f, k, &EvolveLimits::default())
}

pub fn iterate_with(op: &StencilOperator, f: &GridFunction, k: usize, limits: &EvolveLimits) -> Result<GridFunction> {
    if k == 0 {
        if op.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                got: f.dim(),
            });
        }
        return Ok(f.clone());
    }
    let mut p = Propagator::new(op, f, k, limits)?;
    for _ in 0..k {
        p.step();
    }
    let values = p.extract(&p.cur);
    GridFunction::new(p.active.clone(), values, f.tail_bound(), f.scale_n())
}

/// `n (op f - f)`, the discrete generator applied to `f`.
pub fn discrete_generator(op: &StencilOperator, f: &GridFunction, n: u64) -> Result<GridFunction> {
    let tf = apply(op, f)?;
    let nf = n as f64;
    let block = tf.block().clone();
    let values = block
        .sites()
        .zip(tf.values())
        .map(|(x, v)| (v - f.get(&x)) * nf)
        .collect();
    GridFunction::new(block, values, 2.0 * nf * f.tail_bound(), f.scale_n())
}

/// Truncation window `[lo, hi]` of a Poisson(`mean`) law whose two tails each
/// carry mass at most `eps`, from the Chernoff bounds
/// `P(N >= k), P(N <= k) <= exp(-mean) (e mean / k)^k` on either side of the mean.
pub fn poisson_window(mean: f64, eps: f64) -> (usize, usize) {
    let log_eps = eps.ln();
    let log_bound = |k: f64| -> f64 {
        if k == 0.0 {
            -mean
        } else {
            -mean + k * (1.0 + mean.ln() - k.ln())
        }
    };
    // upper: smallest hi >= mean with P(N >= hi + 1) <= eps
    let mut hi = mean.ceil() as usize;
    while log_bound((hi + 1) as f64) > log_eps {
        hi += 1;
    }
    // lower: largest lo <= mean with P(N <= lo - 1) <= eps
    let mut lo = mean.floor() as usize;
    while lo > 0 && log_bound((lo - 1) as f64) > log_eps {
        lo -= 1;
    }
    (lo, hi)
}

/// Poisson-smoothed semigroup `exp(-nt) sum_k (nt)^k / k! op^k f`, truncated
/// so that the discarded Poisson mass times `||f||` is at most `tol`.
pub fn poisson_smooth(op: &StencilOperator, f: &GridFunction, t: f64, n: u64, tol: f64) -> Result<GridFunction> {
    poisson_smooth_with(op, f, t, n, tol, &EvolveLimits::default())
}

pub fn poisson_smooth_with(
    op: &StencilOperator,
    f: &GridFunction,
    t: f64,
    n: u64,
    tol: f64,
    limits: &EvolveLimits,
) -> Result<GridFunction> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    if !(tol > 0.0) || n == 0 {
        return Err(Error::InvalidArgument("tol and n must be positive".into()));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let norm = f.sup_norm();
    if norm == 0.0 {
        return Ok(f.clone().with_tail_bound(f.tail_bound() + tol));
    }
    let mean = n as f64 * t;
    let (lo, hi) = poisson_window(mean, 0.5 * tol / norm);
    if hi > limits.max_steps {
        return Err(Error::IterationBudget {
            needed: hi,
            budget: limits.max_steps,
        });
    }
    let mut p = Propagator::new(op, f, hi, limits)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); p.buf.len()];
    let log_mean = mean.ln();
    let mut log_w = -mean;
    for k in 0..=hi {
        if k > 0 {
            p.step();
            log_w += log_mean - (k as f64).ln();
        }
        if k >= lo {
            p.accumulate(&mut acc, log_w.exp());
        }
    }
    let values = p.extract(&acc);
    GridFunction::new(p.active.clone(), values, f.tail_bound() + tol, f.scale_n())
}

/// `(lambda - n(op - I))^{-1} f = sum_k n^k / (lambda + n)^{k+1} op^k f`,
/// truncated once the geometric tail `(n/(lambda+n))^{K+1} ||f|| / lambda` is below `tol`.
pub fn discrete_resolvent(
    op: &StencilOperator,
    f: &GridFunction,
    lambda: f64,
    n: u64,
    tol: f64,
) -> Result<GridFunction> {
    discrete_resolvent_with(op, f, lambda, n, tol, &EvolveLimits::default())
}

pub fn discrete_resolvent_with(
    op: &StencilOperator,
    f: &GridFunction,
    lambda: f64,
    n: u64,
    tol: f64,
    limits: &EvolveLimits,
) -> Result<GridFunction> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if !(tol > 0.0) || n == 0 {
        return Err(Error::InvalidArgument("tol and n must be positive".into()));
    }
    let norm = f.sup_norm();
    let nf = n as f64;
    let q = nf / (lambda + nf);
    let steps = if norm == 0.0 || norm / lambda <= tol {
        0
    } else {
        // smallest K with q^{K+1} norm / lambda <= tol
        let need = ((tol * lambda / norm).ln() / q.ln()).ceil();
        if !need.is_finite() || need > limits.max_steps as f64 + 1.0 {
            return Err(Error::IterationBudget {
                needed: if need.is_finite() { need as usize } else { usize::MAX },
                budget: limits.max_steps,
            });
        }
        (need as usize).saturating_sub(1)
    };
    let mut p = Propagator::new(op, f, steps, limits)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); p.buf.len()];
    let mut c = 1.0 / (lambda + nf);
    for k in 0..=steps {
        if k > 0 {
            p.step();
            c *= q;
        }
        p.accumulate(&mut acc, c);
    }
    let values = p.extract(&acc);
    GridFunction::new(p.active.clone(), values, f.tail_bound() / lambda + tol, f.scale_n())
}
