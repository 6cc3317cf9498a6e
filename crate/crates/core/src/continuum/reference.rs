use num_complex::Complex64;

use super::{GeneratorKind, GeneratorSpec};
use crate::linalg::{expm, expm_action, CsrMatrix};
use crate::{Error, Result};

/// Grids at or below this size use the dense Pade exponential.
pub const DENSE_LIMIT: usize = 1024;

/// Nested finite-difference grids on `[-L, L]^d`.
///
/// Level `j` has `(points - 1) 2^j + 1` nodes per axis; results are reported
/// on the coarsest level after Richardson extrapolation across all levels.
#[derive(Debug, Clone, PartialEq)]
pub struct RefGrid {
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
    pub levels: usize,
    /// Cap on the node count of the finest level.
    pub max_points: usize,
}

impl RefGrid {
    pub fn new(dim: usize, half_width: f64, points: usize, levels: usize) -> Self {
        RefGrid {
            dim,
            half_width,
            points,
            levels,
            max_points: 20_000,
        }
    }

    pub fn level_points(&self, level: usize) -> usize {
        (self.points - 1) * (1 << level) + 1
    }

    pub fn step(&self, level: usize) -> f64 {
        2.0 * self.half_width / (self.level_points(level) - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.points < 3 || self.points % 2 == 0 || self.levels < 2 {
            return Err(Error::InvalidArgument(
                "reference grid needs dim >= 1, an odd point count >= 3 and at least two levels".into(),
            ));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidArgument("half width must be positive".into()));
        }
        let finest = self
            .level_points(self.levels - 1)
            .checked_pow(self.dim as u32)
            .unwrap_or(usize::MAX);
        if finest > self.max_points {
            return Err(Error::GridBudget {
                points: finest,
                budget: self.max_points,
            });
        }
        Ok(())
    }
}

/// Extrapolated samples on the coarse level of a [`RefGrid`].
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    dim: usize,
    n: usize,
    h: f64,
    half_width: f64,
    values: Vec<Complex64>,
    error_estimate: f64,
}

impl ReferenceSolution {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Max change made by the last extrapolation step.
    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn per_axis(&self) -> usize {
        self.n
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        grid_point(self.dim, self.n, self.h, self.half_width, idx)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.values.len()).map(move |i| self.point(i))
    }
}

fn grid_point(dim: usize, n: usize, h: f64, l: f64, idx: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim];
    let mut rem = idx;
    for a in (0..dim).rev() {
        x[a] = -l + (rem % n) as f64 * h;
        rem /= n;
    }
    x
}

/// Second-order central-difference matrix of `G` on `n^d` nodes of spacing `h`
/// centred at the origin, with zero values outside the grid.
pub fn fd_operator(g: &GeneratorSpec, n: usize, h: f64) -> Result<CsrMatrix> {
    g.validate()?;
    let d = g.dim;
    let total = n.pow(d as u32);
    let l = 0.5 * (n - 1) as f64 * h;
    let mut stride = vec![1usize; d];
    for a in (0..d.saturating_sub(1)).rev() {
        stride[a] = stride[a + 1] * n;
    }
    let h2 = 1.0 / (h * h);
    let zero = Complex64::new(0.0, 0.0);
    let mut rows = Vec::with_capacity(total);
    for idx in 0..total {
        let x = grid_point(d, n, h, l, idx);
        let mut row: Vec<(usize, Complex64)> = Vec::with_capacity(2 * d + 1);
        let mut diag = zero;
        // Laplacian part, signed so that heat -> c Delta and magnetic -> -c Delta
        let lap_sign = match g.kind {
            GeneratorKind::Heat => 1.0,
            GeneratorKind::Magnetic => -1.0,
        };
        for a in 0..d {
            let pos = (idx / stride[a]) % n;
            let ax = if g.kind == GeneratorKind::Magnetic {
                (0..d).map(|j| g.a(a, j) * x[j]).sum::<f64>()
            } else {
                0.0
            };
            // 2i A_a(x) D_a
            let drift = Complex64::new(0.0, 2.0 * ax / (2.0 * h));
            diag += -2.0 * lap_sign * h2;
            if pos + 1 < n {
                row.push((idx + stride[a], Complex64::new(lap_sign * h2, 0.0) + drift));
            }
            if pos > 0 {
                row.push((idx - stride[a], Complex64::new(lap_sign * h2, 0.0) - drift));
            }
            if g.kind == GeneratorKind::Magnetic {
                diag += Complex64::new(ax * ax, g.a(a, a));
            }
        }
        row.push((idx, diag));
        for e in row.iter_mut() {
            e.1 *= g.c;
        }
        rows.push(row);
    }
    Ok(CsrMatrix::from_rows(rows))
}

/// Finite-difference reference for the semigroup of `g` at time `t`, applied
/// to samples of `f`.
pub fn dense_reference(
    g: &GeneratorSpec,
    f: impl Fn(&[f64]) -> Complex64,
    t: f64,
    grid: &RefGrid,
) -> Result<ReferenceSolution> {
    grid.validate()?;
    g.validate()?;
    if grid.dim != g.dim {
        return Err(Error::DimensionMismatch {
            expected: g.dim,
            got: grid.dim,
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    let d = grid.dim;
    let n0 = grid.points;
    let coarse_total = n0.pow(d as u32);
    let h0 = grid.step(0);
    let sample = |n: usize, h: f64| -> Vec<Complex64> {
        (0..n.pow(d as u32))
            .map(|i| f(&grid_point(d, n, h, grid.half_width, i)))
            .collect()
    };
    if t == 0.0 {
        return Ok(ReferenceSolution {
            dim: d,
            n: n0,
            h: h0,
            half_width: grid.half_width,
            values: sample(n0, h0),
            error_estimate: 0.0,
        });
    }

    let mut table: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(grid.levels);
    for level in 0..grid.levels {
        let n = grid.level_points(level);
        let h = grid.step(level);
        let m = fd_operator(g, n, h)?.scaled(Complex64::new(g.semigroup_sign() * t, 0.0));
        let v = sample(n, h);
        let u = if m.n() <= DENSE_LIMIT {
            let e = expm(&m.to_dense());
            (e * nalgebra::DVector::from_vec(v)).iter().copied().collect()
        } else {
            expm_action(&m, &v)
        };
        // restrict to coarse nodes
        let ratio = 1usize << level;
        let coarse: Vec<Complex64> = (0..coarse_total)
            .map(|ci| {
                let mut rem = ci;
                let mut fine = 0usize;
                let mut mul = 1usize;
                for _ in 0..d {
                    fine += (rem % n0) * ratio * mul;
                    rem /= n0;
                    mul *= n;
                }
                u[fine]
            })
            .collect();
        let mut row = vec![coarse];
        for k in 1..=level {
            let p = 4f64.powi(k as i32);
            let prev = &table[level - 1][k - 1];
            let cur = &row[k - 1];
            row.push(cur.iter().zip(prev).map(|(a, b)| (a * p - b) / (p - 1.0)).collect());
        }
        table.push(row);
    }
    let last = table.pop().unwrap();
    let best = &last[last.len() - 1];
    let before = &last[last.len() - 2];
    let error_estimate = best.iter().zip(before).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(ReferenceSolution {
        dim: d,
        n: n0,
        h: h0,
        half_width: grid.half_width,
        values: best.clone(),
        error_estimate,
    })
}
