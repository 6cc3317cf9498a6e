use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::{Error, Result};

/// Signature of a user-supplied phase rule: `(site, offset) -> phase`.
pub type PhaseFn = dyn Fn(&[i64], &[i64]) -> f64 + Send + Sync;

/// Site-dependent edge phase `omega(x, e)` of a nearest-neighbour operator.
#[derive(Clone)]
pub enum PhaseRule {
    Zero,
    /// Classical Harper phases on `Z^2`: `(b/2) * (x2*e1 - x1*e2)`.
    Harper { b: f64 },
    /// Phases of a linear vector potential `A = sum a_ij x_j dx_i` with the
    /// identity realization, plus a periodic part indexed by offset:
    /// `-<A x, e> - <A e, e>/2 + omega0[e]`.
    Linear { a: Vec<f64>, omega0: Vec<f64> },
    Custom(Arc<PhaseFn>),
}

impl fmt::Debug for PhaseRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseRule::Zero => write!(f, "Zero"),
            PhaseRule::Harper { b } => write!(f, "Harper {{ b: {b} }}"),
            PhaseRule::Linear { a, omega0 } => write!(f, "Linear {{ a: {a:?}, omega0: {omega0:?} }}"),
            PhaseRule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Nearest-neighbour transition operator
/// `(T f)(x) = sum_e p(e) exp(i omega(x, e)) f(x + e)`.
#[derive(Debug, Clone)]
pub struct StencilOperator {
    dim: usize,
    offsets: Vec<Vec<i64>>,
    probs: Vec<f64>,
    phase: PhaseRule,
}

pub(crate) const PROB_SUM_TOL: f64 = 1e-15;

impl StencilOperator {
    pub fn new(dim: usize, offsets: Vec<Vec<i64>>, probs: Vec<f64>, phase: PhaseRule) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if offsets.is_empty() || offsets.len() != probs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} offsets but {} probabilities",
                offsets.len(),
                probs.len()
            )));
        }
        if let Some(o) = offsets.iter().find(|o| o.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: o.len(),
            });
        }
        if probs.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidArgument("probabilities must be positive".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
        }
        match &phase {
            PhaseRule::Harper { .. } if dim != 2 => {
                return Err(Error::DimensionMismatch { expected: 2, got: dim });
            }
            PhaseRule::Linear { a, omega0 } => {
                if a.len() != dim * dim {
                    return Err(Error::InvalidArgument(format!("potential matrix needs {} entries", dim * dim)));
                }
                if omega0.len() != offsets.len() {
                    return Err(Error::InvalidArgument("omega0 needs one entry per offset".into()));
                }
            }
            _ => {}
        }
        Ok(StencilOperator {
            dim,
            offsets,
            probs,
            phase,
        })
    }

    /// Single zero offset with probability one.
    pub fn identity(dim: usize) -> Self {
        StencilOperator {
            dim,
            offsets: vec![vec![0; dim]],
            probs: vec![1.0],
            phase: PhaseRule::Zero,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn phase_rule(&self) -> &PhaseRule {
        &self.phase
    }

    pub fn has_phase(&self) -> bool {
        !matches!(self.phase, PhaseRule::Zero)
    }

    /// Max sup-norm of an offset.
    pub fn radius(&self) -> usize {
        self.offsets
            .iter()
            .flat_map(|o| o.iter().map(|v| v.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// `omega(x, offsets[j])`.
    pub fn phase(&self, x: &[i64], j: usize) -> f64 {
        let e = &self.offsets[j];
        match &self.phase {
            PhaseRule::Zero => 0.0,
            PhaseRule::Harper { b } => 0.5 * b * (x[1] * e[0] - x[0] * e[1]) as f64,
            PhaseRule::Linear { a, omega0 } => linear_phase(a, self.dim, x, e) + omega0[j],
            PhaseRule::Custom(f) => f(x, e),
        }
    }

    /// `p(e) exp(i omega(x, e))`.
    pub fn weight(&self, x: &[i64], j: usize) -> Complex64 {
        let p = self.probs[j];
        match self.phase {
            PhaseRule::Zero => Complex64::new(p, 0.0),
            _ => Complex64::from_polar(p, self.phase(x, j)),
        }
    }

    /// The same operator with every phase multiplied by `s` (the cochain `s * omega`).
    pub fn scaled_phase(&self, s: f64) -> StencilOperator {
        let phase = match &self.phase {
            PhaseRule::Zero => PhaseRule::Zero,
            PhaseRule::Harper { b } => PhaseRule::Harper { b: b * s },
            PhaseRule::Linear { a, omega0 } => PhaseRule::Linear {
                a: a.iter().map(|v| v * s).collect(),
                omega0: omega0.iter().map(|v| v * s).collect(),
            },
            PhaseRule::Custom(f) => {
                let f = Arc::clone(f);
                PhaseRule::Custom(Arc::new(move |x, e| s * f(x, e)))
            }
        };
        StencilOperator {
            phase,
            ..self.clone()
        }
    }

    /// Replace the phase rule, keeping offsets and probabilities.
    pub fn with_phase(&self, phase: PhaseRule) -> Result<StencilOperator> {
        StencilOperator::new(self.dim, self.offsets.clone(), self.probs.clone(), phase)
    }

    pub fn offset_index(&self, e: &[i64]) -> Option<usize> {
        self.offsets.iter().position(|o| o.as_slice() == e)
    }

    /// Max over `sites` and offsets of `|omega(x, e) + omega(x + e, -e)|`.
    pub fn antisymmetry_residual(&self, sites: &[Vec<i64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for x in sites {
            for (j, e) in self.offsets.iter().enumerate() {
                let neg: Vec<i64> = e.iter().map(|v| -v).collect();
                let Some(jn) = self.offset_index(&neg) else {
                    return f64::INFINITY;
                };
                let y: Vec<i64> = x.iter().zip(e).map(|(a, b)| a + b).collect();
                worst = worst.max((self.phase(x, j) + self.phase(&y, jn)).abs());
            }
        }
        worst
    }
}

pub(crate) fn linear_phase(a: &[f64], dim: usize, x: &[i64], e: &[i64]) -> f64 {
    let mut ax_e = 0.0;
    let mut ae_e = 0.0;
    for i in 0..dim {
        let mut ax_i = 0.0;
        let mut ae_i = 0.0;
        for j in 0..dim {
            ax_i += a[i * dim + j] * x[j] as f64;
            ae_i += a[i * dim + j] * e[j] as f64;
        }
        ax_e += ax_i * e[i] as f64;
        ae_e += ae_i * e[i] as f64;
    }
    -ax_e - 0.5 * ae_e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_probabilities() {
        let off = vec![vec![1], vec![-1]];
        assert!(StencilOperator::new(1, off.clone(), vec![0.5, 0.6], PhaseRule::Zero).is_err());
        assert!(StencilOperator::new(1, off.clone(), vec![1.0, 0.0], PhaseRule::Zero).is_err());
        assert!(StencilOperator::new(1, off, vec![0.5], PhaseRule::Zero).is_err());
    }

    #[test]
    fn harper_needs_two_dimensions() {
        let off = vec![vec![1], vec![-1]];
        assert!(StencilOperator::new(1, off, vec![0.5, 0.5], PhaseRule::Harper { b: 1.0 }).is_err());
    }

    #[test]
    fn scaled_phase_scales_custom_rules() {
        let t = StencilOperator::new(
            1,
            vec![vec![1], vec![-1]],
            vec![0.5, 0.5],
            PhaseRule::Custom(Arc::new(|x, e| (x[0] * e[0]) as f64)),
        )
        .unwrap();
        let s = t.scaled_phase(0.25);
        assert_eq!(s.phase(&[4], 0), 1.0);
        assert_eq!(s.phase(&[4], 1), -1.0);
    }
}
