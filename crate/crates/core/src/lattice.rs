//! Concrete transition operators on `Z^d`.

use crate::grid::{PhaseRule, StencilOperator};
use crate::{Error, Result};

/// Linear vector potential `A = sum_ij a_ij x_j dx_i` plus a periodic
/// harmonic part `omega0`, one value per step direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub dim: usize,
    /// Row-major `dim x dim` matrix `(a_ij)`.
    pub a: Vec<f64>,
    /// Periodic part per offset, in [`unit_steps`] order. Empty means zero.
    pub omega0: Vec<f64>,
}

impl PotentialSpec {
    pub fn zero(dim: usize) -> Self {
        PotentialSpec {
            dim,
            a: vec![0.0; dim * dim],
            omega0: Vec::new(),
        }
    }

    /// Symmetric-gauge potential of a constant field `b` on `Z^2`
    /// (`a_12 = -b/2`, `a_21 = b/2`).
    pub fn constant_field(b: f64) -> Self {
        PotentialSpec {
            dim: 2,
            a: vec![0.0, -0.5 * b, 0.5 * b, 0.0],
            omega0: Vec::new(),
        }
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.dim + j]
    }

    /// Field components `b_ij = a_ji - a_ij`, row-major.
    pub fn field(&self) -> Vec<f64> {
        let d = self.dim;
        let mut b = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                b[i * d + j] = self.a(j, i) - self.a(i, j);
            }
        }
        b
    }
}

/// `+e_1, -e_1, +e_2, -e_2, ...`
pub fn unit_steps(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(2 * d);
    for i in 0..d {
        for s in [1i64, -1] {
            let mut e = vec![0i64; d];
            e[i] = s;
            out.push(e);
        }
    }
    out
}

/// Transition operator of the simple random walk on `Z^d`.
pub fn simple_walk(d: usize) -> StencilOperator {
    assert!(d >= 1, "dimension must be at least 1");
    let probs = vec![1.0 / (2 * d) as f64; 2 * d];
    StencilOperator::new(d, unit_steps(d), probs, PhaseRule::Zero).expect("valid simple walk")
}

/// Classical Harper operator on `Z^2` with flux `b`.
pub fn harper(b: f64) -> StencilOperator {
    let phase = if b == 0.0 {
        PhaseRule::Zero
    } else {
        PhaseRule::Harper { b }
    };
    StencilOperator::new(2, unit_steps(2), vec![0.25; 4], phase).expect("valid Harper operator")
}

/// Magnetic transition operator whose cochain is built from a linear potential
/// with the identity realization and Euclidean inner product:
/// `omega(e) = -<A x, e> - <A e, e>/2 + omega0(e)`.
pub fn magnetic_from_potential(spec: &PotentialSpec) -> Result<StencilOperator> {
    let d = spec.dim;
    if d == 0 || spec.a.len() != d * d {
        return Err(Error::InvalidArgument(format!(
            "potential matrix must have {} entries, has {}",
            d * d,
            spec.a.len()
        )));
    }
    let omega0 = if spec.omega0.is_empty() {
        vec![0.0; 2 * d]
    } else if spec.omega0.len() == 2 * d {
        spec.omega0.clone()
    } else {
        return Err(Error::InvalidArgument("omega0 needs one entry per step direction".into()));
    };
    let probs = vec![1.0 / (2 * d) as f64; 2 * d];
    let phase = if spec.a.iter().all(|&v| v == 0.0) && omega0.iter().all(|&v| v == 0.0) {
        PhaseRule::Zero
    } else {
        PhaseRule::Linear {
            a: spec.a.clone(),
            omega0,
        }
    };
    StencilOperator::new(d, unit_steps(d), probs, phase)
}

/// Max over `sample_sites` and translations `sigma` in `generators` of
/// `|sum_e p(e) (omega(x - sigma, e) - omega(x, e))|`.
pub fn check_harmonic_cochain(op: &StencilOperator, generators: &[Vec<i64>], sample_sites: &[Vec<i64>]) -> Result<f64> {
    if sample_sites.is_empty() {
        return Err(Error::InvalidArgument("at least one sample site is required".into()));
    }
    let mut worst: f64 = 0.0;
    for x in sample_sites {
        for sigma in generators {
            if sigma.len() != op.dim() || x.len() != op.dim() {
                return Err(Error::DimensionMismatch {
                    expected: op.dim(),
                    got: sigma.len().min(x.len()),
                });
            }
            let shifted: Vec<i64> = x.iter().zip(sigma).map(|(a, s)| a - s).collect();
            let s: f64 = op
                .probs()
                .iter()
                .enumerate()
                .map(|(j, p)| p * (op.phase(&shifted, j) - op.phase(x, j)))
                .sum();
            worst = worst.max(s.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn block_sites(r: i64) -> Vec<Vec<i64>> {
        let mut v = Vec::new();
        for m in -r..r {
            for n in -r..r {
                v.push(vec![m, n]);
            }
        }
        v
    }

    #[test]
    fn simple_walk_shape_and_moments() {
        let t = simple_walk(1);
        assert_eq!(t.offsets(), &[vec![1], vec![-1]]);
        assert_eq!(t.probs(), &[0.5, 0.5]);
        let t3 = simple_walk(3);
        assert_eq!(t3.offsets().len(), 6);
        assert!(t3.probs().iter().all(|&p| p == 1.0 / 6.0));
        for d in 1..=4 {
            let t = simple_walk(d);
            for i in 0..d {
                let first: i64 = t.offsets().iter().map(|e| e[i]).sum();
                let second: i64 = t.offsets().iter().map(|e| e[i] * e[i]).sum();
                assert_eq!(first, 0);
                assert_eq!(second, 2);
            }
        }
    }

    #[test]
    fn harper_phases_match_display() {
        let b = 0.7;
        let h = harper(b);
        let w = h.weight(&[0, 3], 0);
        let expect = num_complex::Complex64::from_polar(0.25, 3.0 * b / 2.0);
        assert!((w - expect).norm() < 1e-16);
        assert_eq!(h.phase(&[5, -2], 1), 0.5 * b * 2.0);
        assert_eq!(h.phase(&[5, -2], 2), -0.5 * b * 5.0);
        assert_eq!(h.phase(&[5, -2], 3), 0.5 * b * 5.0);
        for x in block_sites(6) {
            let up = vec![x[0], x[1] + 1];
            assert_eq!(h.phase(&x, 2), -h.phase(&up, 3));
        }
        assert_eq!(h.antisymmetry_residual(&block_sites(6)), 0.0);
    }

    #[test]
    fn harper_zero_field_is_simple_walk() {
        let h = harper(0.0);
        let s = simple_walk(2);
        assert_eq!(h.offsets(), s.offsets());
        assert_eq!(h.probs(), s.probs());
        assert!(!h.has_phase());
    }

    #[test]
    fn potential_reproduces_harper_exactly() {
        for &b in &[1.0, -0.3, 2.5e-3, 7.0] {
            let spec = PotentialSpec::constant_field(b);
            let field = spec.field();
            assert_eq!(field[1], b); // b_12 = a_21 - a_12
            let m = magnetic_from_potential(&spec).unwrap();
            let h = harper(b);
            for x in block_sites(10) {
                for j in 0..4 {
                    assert_eq!(m.phase(&x, j), h.phase(&x, j), "site {x:?} offset {j}");
                    assert_eq!(m.weight(&x, j), h.weight(&x, j));
                }
            }
        }
    }

    #[test]
    fn zero_potential_is_simple_walk() {
        for d in 1..=3 {
            let m = magnetic_from_potential(&PotentialSpec::zero(d)).unwrap();
            assert!(!m.has_phase());
            assert_eq!(m.offsets(), simple_walk(d).offsets());
        }
    }

    #[test]
    fn harmonic_cochain_checks() {
        let gens = vec![vec![1, 0], vec![0, 1], vec![3, -2]];
        let sites = block_sites(5);
        let h = harper(1.3);
        assert!(check_harmonic_cochain(&h, &gens, &sites).unwrap() < 1e-14);
        assert_eq!(check_harmonic_cochain(&simple_walk(2), &gens, &sites).unwrap(), 0.0);

        // site-dependent perturbation on +e1 only breaks harmonicity
        let perturbed = h
            .with_phase(PhaseRule::Custom(Arc::new(|x: &[i64], e: &[i64]| {
                let base = 0.5 * 1.3 * (x[1] * e[0] - x[0] * e[1]) as f64;
                if e == [1, 0] {
                    base + 0.1 * (x[0] * x[0]) as f64
                } else {
                    base
                }
            })))
            .unwrap();
        assert!(check_harmonic_cochain(&perturbed, &gens, &sites).unwrap() > 1e-3);
        assert!(check_harmonic_cochain(&h, &gens, &[]).is_err());
    }

    #[test]
    fn general_potential_antisymmetry() {
        let spec = PotentialSpec {
            dim: 3,
            a: vec![0.2, -0.5, 0.1, 0.4, -0.3, 0.7, 0.0, 0.25, 0.6],
            omega0: vec![0.1, -0.1, 0.3, -0.3, 0.0, 0.0],
        };
        let m = magnetic_from_potential(&spec).unwrap();
        let mut sites = Vec::new();
        for a in -3..3 {
            for b in -3..3 {
                for c in -3..3 {
                    sites.push(vec![a, b, c]);
                }
            }
        }
        assert!(m.antisymmetry_residual(&sites) < 1e-13);
    }
}
