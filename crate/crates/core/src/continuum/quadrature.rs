use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

/// Node counts tried in turn by [`integrate_gaussian`].
pub const NODE_LADDER: [usize; 6] = [4, 8, 16, 32, 64, 128];

/// Gauss-Hermite nodes and weights for `int e^{-z^2} g(z) dz`, nodes ascending.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one node");
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    (x, w)
}

fn ladder_rule(i: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: [OnceLock<(Vec<f64>, Vec<f64>)>; NODE_LADDER.len()] = [const { OnceLock::new() }; NODE_LADDER.len()];
    RULES[i].get_or_init(|| gauss_hermite(NODE_LADDER[i]))
}

/// Tensor Gauss-Hermite sum `sum_k W_k g(z_k)` approximating
/// `int_{R^d} e^{-|z|^2} g(z) dz`, doubling nodes until two successive values
/// agree within `tol / 2`.
pub fn integrate_gaussian(dim: usize, tol: f64, mut g: impl FnMut(&[f64]) -> Complex64) -> Result<Complex64> {
    let mut prev: Option<Complex64> = None;
    let mut last_change = f64::INFINITY;
    let mut z = vec![0.0; dim];
    for (i, &n) in NODE_LADDER.iter().enumerate() {
        if n.pow(dim as u32) > 4_000_000 {
            break;
        }
        let (nodes, weights) = ladder_rule(i);
        let total = n.pow(dim as u32);
        let mut sum = Complex64::new(0.0, 0.0);
        for idx in 0..total {
            let mut rem = idx;
            let mut w = 1.0;
            for a in (0..dim).rev() {
                let k = rem % n;
                rem /= n;
                z[a] = nodes[k];
                w *= weights[k];
            }
            sum += g(&z) * w;
        }
        if let Some(p) = prev {
            last_change = (sum - p).norm();
            if last_change <= 0.5 * tol {
                return Ok(sum);
            }
        }
        prev = Some(sum);
    }
    Err(Error::Quadrature {
        nodes: *NODE_LADDER.last().unwrap(),
        change: last_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for n in [1, 2, 5, 8, 16, 33, 64, 128] {
            let (x, w) = gauss_hermite(n);
            let m0: f64 = w.iter().sum();
            assert!((m0 - sqrt_pi).abs() < 1e-13, "n={n} m0={m0}");
            let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
            if n >= 2 {
                assert!((m2 - 0.5 * sqrt_pi).abs() < 1e-12);
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            let m1: f64 = x.iter().zip(&w).map(|(x, w)| w * x).sum();
            assert!(m1.abs() < 1e-13);
        }
        // int z^6 e^{-z^2} = 15 sqrt(pi) / 8, exact for n >= 4
        let (x, w) = gauss_hermite(4);
        let m6: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((m6 - 15.0 * sqrt_pi / 8.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_cosine() {
        // int e^{-z^2} cos(z) dz = sqrt(pi) e^{-1/4}
        let v = integrate_gaussian(1, 1e-12, |z| Complex64::new(z[0].cos(), 0.0)).unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt() * (-0.25f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn nonconvergence_reported() {
        let r = integrate_gaussian(1, 1e-14, |z| Complex64::new((40.0 * z[0]).cos(), 0.0));
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
