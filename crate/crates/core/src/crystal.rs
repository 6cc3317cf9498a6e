//! Crystal lattices given by a finite quotient graph with `Z^d` shift labels.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::PROB_SUM_TOL;
use crate::{Error, Result};

/// Oriented edge of the quotient; its lift from `(origin, sigma)` ends at
/// `(terminus, sigma + shift)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientEdge {
    pub origin: usize,
    pub terminus: usize,
    pub p: f64,
    pub shift: Vec<i64>,
    /// Index of the reversed edge.
    pub inverse: usize,
}

/// One line of the edge-list format: an edge and its reverse.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePair {
    pub origin: usize,
    pub terminus: usize,
    pub p: f64,
    /// Probability of the reverse edge; `None` means the same as `p`.
    pub p_reverse: Option<f64>,
    pub shift: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientGraph {
    dim: usize,
    vertices: usize,
    edges: Vec<QuotientEdge>,
    out: Vec<Vec<usize>>,
}

impl QuotientGraph {
    pub fn from_pairs(dim: usize, pairs: &[EdgePair]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGraph("dimension must be at least 1".into()));
        }
        let vertices = pairs.iter().map(|e| e.origin.max(e.terminus) + 1).max().unwrap_or(0);
        if vertices == 0 {
            return Err(Error::InvalidGraph("graph has no edges".into()));
        }
        let mut edges = Vec::with_capacity(2 * pairs.len());
        for pair in pairs {
            if pair.shift.len() != dim {
                return Err(Error::InvalidGraph(format!("shift {:?} is not {dim}-dimensional", pair.shift)));
            }
            let rev_p = pair.p_reverse.unwrap_or(pair.p);
            for p in [pair.p, rev_p] {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::InvalidGraph(format!("probability {p} outside (0, 1]")));
                }
            }
            let i = edges.len();
            if pair.origin == pair.terminus && pair.shift.iter().all(|&s| s == 0) {
                if rev_p != pair.p {
                    return Err(Error::InvalidGraph("a trivial loop is its own reverse".into()));
                }
                edges.push(QuotientEdge {
                    origin: pair.origin,
                    terminus: pair.terminus,
                    p: pair.p,
                    shift: pair.shift.clone(),
                    inverse: i,
                });
                continue;
            }
            edges.push(QuotientEdge {
                origin: pair.origin,
                terminus: pair.terminus,
                p: pair.p,
                shift: pair.shift.clone(),
                inverse: i + 1,
            });
            edges.push(QuotientEdge {
                origin: pair.terminus,
                terminus: pair.origin,
                p: rev_p,
                shift: pair.shift.iter().map(|s| -s).collect(),
                inverse: i,
            });
        }
        let mut out = vec![Vec::new(); vertices];
        for (k, e) in edges.iter().enumerate() {
            out[e.origin].push(k);
        }
        for (v, list) in out.iter().enumerate() {
            let s: f64 = list.iter().map(|&k| edges[k].p).sum();
            if (s - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::InvalidGraph(format!(
                    "probabilities out of vertex {v} sum to {s}"
                )));
            }
        }
        Ok(QuotientGraph {
            dim,
            vertices,
            edges,
            out,
        })
    }

    /// `Z^d` as a one-vertex quotient with loops `+e_i, -e_i`.
    pub fn zd(dim: usize) -> Self {
        let pairs: Vec<EdgePair> = (0..dim)
            .map(|i| {
                let mut shift = vec![0; dim];
                shift[i] = 1;
                EdgePair {
                    origin: 0,
                    terminus: 0,
                    p: 1.0 / (2 * dim) as f64,
                    p_reverse: None,
                    shift,
                }
            })
            .collect();
        QuotientGraph::from_pairs(dim, &pairs).expect("valid Z^d quotient")
    }

    /// Honeycomb lattice: two vertices joined by three edges.
    pub fn hexagonal() -> Self {
        let pairs: Vec<EdgePair> = [[0, 0], [-1, 0], [0, -1]]
            .iter()
            .map(|s| EdgePair {
                origin: 0,
                terminus: 1,
                p: 1.0 / 3.0,
                p_reverse: None,
                shift: s.to_vec(),
            })
            .collect();
        QuotientGraph::from_pairs(2, &pairs).expect("valid hexagonal quotient")
    }

    /// Parse the edge-list format.
    ///
    /// ```text
    /// # comment
    /// dim 2
    /// origin terminus p shift_1 .. shift_d [p_reverse]
    /// ```
    /// Without a `dim` line the dimension is the token count minus three and
    /// `p_reverse` is not allowed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut explicit = false;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let err = |m: String| Error::Parse { line: line_no, message: m };
            if tokens[0] == "dim" {
                if explicit || !pairs.is_empty() {
                    return Err(err("dim must appear once, before any edge".into()));
                }
                if tokens.len() != 2 {
                    return Err(err("expected `dim <d>`".into()));
                }
                let d: usize = tokens[1].parse().map_err(|_| err(format!("bad dimension {:?}", tokens[1])))?;
                if d == 0 {
                    return Err(err("dimension must be at least 1".into()));
                }
                dim = Some(d);
                explicit = true;
                continue;
            }
            let d = match dim {
                Some(d) => d,
                None => {
                    if tokens.len() < 4 {
                        return Err(err("expected `origin terminus p shift..`".into()));
                    }
                    dim = Some(tokens.len() - 3);
                    tokens.len() - 3
                }
            };
            let with_reverse = explicit && tokens.len() == d + 4;
            if tokens.len() != d + 3 && !with_reverse {
                return Err(err(format!("expected {} fields, found {}", d + 3, tokens.len())));
            }
            let origin: usize = tokens[0].parse().map_err(|_| err(format!("bad vertex {:?}", tokens[0])))?;
            let terminus: usize = tokens[1].parse().map_err(|_| err(format!("bad vertex {:?}", tokens[1])))?;
            let p: f64 = tokens[2].parse().map_err(|_| err(format!("bad probability {:?}", tokens[2])))?;
            let shift = tokens[3..3 + d]
                .iter()
                .map(|s| s.parse::<i64>().map_err(|_| err(format!("bad shift {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let p_reverse = if with_reverse {
                Some(
                    tokens[d + 3]
                        .parse::<f64>()
                        .map_err(|_| err(format!("bad probability {:?}", tokens[d + 3])))?,
                )
            } else {
                None
            };
            pairs.push(EdgePair {
                origin,
                terminus,
                p,
                p_reverse,
                shift,
            });
        }
        let d = dim.ok_or_else(|| Error::InvalidGraph("no edges".into()))?;
        QuotientGraph::from_pairs(d, &pairs)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        QuotientGraph::parse(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[QuotientEdge] {
        &self.edges
    }

    /// Edge indices leaving `v`.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn is_strongly_connected(&self) -> bool {
        let reach = |forward: bool| {
            let mut seen = vec![false; self.vertices];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for e in &self.edges {
                    let (a, b) = if forward { (e.origin, e.terminus) } else { (e.terminus, e.origin) };
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// `(P^T m)(x) = sum_{e in E_x} p(reverse e) m(t(e))`.
    fn pull(&self, m: &[f64]) -> Vec<f64> {
        (0..self.vertices)
            .map(|x| {
                self.out[x]
                    .iter()
                    .map(|&k| {
                        let e = &self.edges[k];
                        self.edges[e.inverse].p * m[e.terminus]
                    })
                    .sum()
            })
            .collect()
    }
}

/// Budget for [`invariant_measure`].
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;

/// Normalized invariant measure by power iteration on the lazy chain.
pub fn invariant_measure(g: &QuotientGraph, tol: f64) -> Result<Vec<f64>> {
    if !g.is_strongly_connected() {
        return Err(Error::InvalidGraph("quotient graph is not strongly connected".into()));
    }
    let n = g.vertex_count();
    let mut m = vec![1.0 / n as f64; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        let pm = g.pull(&m);
        let resid = pm.iter().zip(&m).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if resid <= tol {
            let s: f64 = m.iter().sum();
            m.iter_mut().for_each(|v| *v /= s);
            return Ok(m);
        }
        for (v, p) in m.iter_mut().zip(&pm) {
            *v = 0.5 * (*v + p);
        }
        let s: f64 = m.iter().sum();
        m.iter_mut().for_each(|v| *v /= s);
    }
    Err(Error::NoConvergence(MAX_POWER_ITERATIONS))
}

/// `max_e |p(e) m(o(e)) - p(reverse e) m(t(e))|`.
pub fn check_detailed_balance(g: &QuotientGraph, m: &[f64]) -> f64 {
    g.edges()
        .iter()
        .map(|e| (e.p * m[e.origin] - g.edges()[e.inverse].p * m[e.terminus]).abs())
        .fold(0.0, f64::max)
}

/// Positions of one representative per vertex class; the lift of
/// `(v, sigma)` sits at `positions[v] + sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicRealization {
    pub positions: Vec<Vec<f64>>,
}

impl PeriodicRealization {
    /// Identity realization of `Z^d`.
    pub fn origin(dim: usize) -> Self {
        PeriodicRealization {
            positions: vec![vec![0.0; dim]],
        }
    }

    pub fn lift(&self, v: usize, sigma: &[i64]) -> Vec<f64> {
        self.positions[v].iter().zip(sigma).map(|(p, s)| p + *s as f64).collect()
    }

    /// `Phi(t(e)) - Phi(o(e))` for a lift of edge `e`.
    pub fn displacement(&self, e: &QuotientEdge) -> Vec<f64> {
        self.positions[e.terminus]
            .iter()
            .zip(&self.positions[e.origin])
            .zip(&e.shift)
            .map(|((t, o), s)| t + *s as f64 - o)
            .collect()
    }

    pub fn translated(&self, by: &[f64]) -> Self {
        PeriodicRealization {
            positions: self
                .positions
                .iter()
                .map(|p| p.iter().zip(by).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }
}

/// `max_x | sum_{e in E_x} p(e) v_e |`.
pub fn harmonic_residual(g: &QuotientGraph, phi: &PeriodicRealization) -> f64 {
    let d = g.dim();
    (0..g.vertex_count())
        .map(|x| {
            let mut acc = vec![0.0; d];
            for &k in g.out_edges(x) {
                let e = &g.edges()[k];
                for (a, v) in acc.iter_mut().zip(phi.displacement(e)) {
                    *a += e.p * v;
                }
            }
            acc.iter().map(|a| a * a).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}

/// Mean displacement `sum_e m(o(e)) p(e) v_e`, independent of the realization.
pub fn drift(g: &QuotientGraph, m: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.dim()];
    for e in g.edges() {
        for (o, s) in out.iter_mut().zip(&e.shift) {
            *o += m[e.origin] * e.p * *s as f64;
        }
    }
    out
}

/// Harmonic realization with vertex 0 pinned at the origin.
pub fn harmonic_realization(g: &QuotientGraph, m: &[f64], tol: f64) -> Result<PeriodicRealization> {
    let d = g.dim();
    let n = g.vertex_count();
    if m.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.len() });
    }
    let mu = drift(g, m);
    if mu.iter().any(|v| v.abs() > tol) {
        return Err(Error::InvalidGraph(format!(
            "walk has nonzero mean displacement {mu:?}; no harmonic realization exists"
        )));
    }
    let mut positions = vec![vec![0.0; d]; n];
    if n > 1 {
        let k = n - 1;
        let mut lhs = DMatrix::<f64>::zeros(k, k);
        let mut rhs = DMatrix::<f64>::zeros(k, d);
        for x in 1..n {
            for &ei in g.out_edges(x) {
                let e = &g.edges()[ei];
                lhs[(x - 1, x - 1)] -= e.p;
                if e.terminus > 0 {
                    lhs[(x - 1, e.terminus - 1)] += e.p;
                }
                for a in 0..d {
                    rhs[(x - 1, a)] -= e.p * e.shift[a] as f64;
                }
            }
        }
        let sol = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("harmonic system is singular beyond the gauge".into()))?;
        for x in 1..n {
            for a in 0..d {
                positions[x][a] = sol[(x - 1, a)];
            }
        }
    }
    let phi = PeriodicRealization { positions };
    let r = harmonic_residual(g, &phi);
    if r > tol {
        return Err(Error::Singular(format!("harmonic residual {r:e} exceeds {tol:e}")));
    }
    Ok(phi)
}

/// Largest harmonic residual accepted by [`limit_covariance`].
pub const HARMONIC_TOL: f64 = 1e-10;

/// `sum_e p(e) m(o(e)) v_e v_e^T`.
pub fn limit_covariance(g: &QuotientGraph, m: &[f64], phi: &PeriodicRealization) -> Result<DMatrix<f64>> {
    let r = harmonic_residual(g, phi);
    if r > HARMONIC_TOL {
        return Err(Error::InvalidArgument(format!("realization is not harmonic (residual {r:e})")));
    }
    let d = g.dim();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for e in g.edges() {
        let v = phi.displacement(e);
        let w = e.p * m[e.origin];
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    // exact symmetry
    for i in 0..d {
        for j in 0..i {
            cov[(j, i)] = cov[(i, j)];
        }
    }
    Ok(cov)
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Sample covariance of the `steps`-step displacement divided by `steps`,
/// with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct MonteCarloCovariance {
    pub covariance: DMatrix<f64>,
    pub std_error: DMatrix<f64>,
    pub paths: usize,
    pub steps: usize,
}

pub fn monte_carlo_covariance(
    g: &QuotientGraph,
    m: &[f64],
    phi: &PeriodicRealization,
    paths: usize,
    steps: usize,
    seed: u64,
) -> Result<MonteCarloCovariance> {
    if paths < 2 || steps == 0 {
        return Err(Error::InvalidArgument("need at least two paths and one step".into()));
    }
    let d = g.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disp: Vec<Vec<f64>> = g.edges().iter().map(|e| phi.displacement(e)).collect();
    let start_cdf: Vec<f64> = m
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let pick = |cdf: &[f64], u: f64| cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
    let edge_cdf: Vec<Vec<f64>> = (0..g.vertex_count())
        .map(|x| {
            g.out_edges(x)
                .iter()
                .scan(0.0, |acc, &k| {
                    *acc += g.edges()[k].p;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let mut samples = Vec::with_capacity(paths);
    for _ in 0..paths {
        let mut x = pick(&start_cdf, rng.random::<f64>() * start_cdf[start_cdf.len() - 1]);
        let mut s = vec![0.0; d];
        for _ in 0..steps {
            let list = g.out_edges(x);
            let k = list[pick(&edge_cdf[x], rng.random::<f64>() * edge_cdf[x][list.len() - 1])];
            for (a, v) in s.iter_mut().zip(&disp[k]) {
                *a += v;
            }
            x = g.edges()[k].terminus;
        }
        samples.push(s);
    }
    let pf = paths as f64;
    let mean: Vec<f64> = (0..d).map(|a| samples.iter().map(|s| s[a]).sum::<f64>() / pf).collect();
    let mut covariance = DMatrix::<f64>::zeros(d, d);
    let mut std_error = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let prods: Vec<f64> = samples.iter().map(|s| (s[i] - mean[i]) * (s[j] - mean[j])).collect();
            let c = prods.iter().sum::<f64>() / (pf - 1.0);
            let var = prods.iter().map(|p| (p - c).powi(2)).sum::<f64>() / (pf - 1.0);
            covariance[(i, j)] = c / steps as f64;
            std_error[(i, j)] = (var / pf).sqrt() / steps as f64;
        }
    }
    Ok(MonteCarloCovariance {
        covariance,
        std_error,
        paths,
        steps,
    })
}

/// Finitely supported function on the covering graph, keyed by
/// `(vertex class, shift)`.
pub type LiftedFunction = BTreeMap<(usize, Vec<i64>), Complex64>;

/// `omega(e)` for the lift of edge `e` starting in the cell `sigma`.
pub type EdgeCochain = dyn Fn(usize, &[i64]) -> f64;

/// One step of `(H f)(x) = sum_{e in E_x} p(e) e^{i omega(e)} f(t(e))`.
pub fn crystal_walk_apply(
    g: &QuotientGraph,
    f: &LiftedFunction,
    cochain: Option<&EdgeCochain>,
    max_support: usize,
) -> Result<LiftedFunction> {
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (k, e) in g.edges().iter().enumerate() {
        into[e.terminus].push(k);
    }
    let mut support: BTreeSet<(usize, Vec<i64>)> = BTreeSet::new();
    for (v, sigma) in f.keys() {
        if sigma.len() != g.dim() || *v >= g.vertex_count() {
            return Err(Error::InvalidArgument(format!("lifted vertex ({v}, {sigma:?}) not in graph")));
        }
        for &k in &into[*v] {
            let e = &g.edges()[k];
            let src: Vec<i64> = sigma.iter().zip(&e.shift).map(|(s, t)| s - t).collect();
            support.insert((e.origin, src));
            if support.len() > max_support {
                return Err(Error::CellBudget {
                    needed: support.len(),
                    budget: max_support,
                });
            }
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut out = LiftedFunction::new();
    let mut target = vec![0i64; g.dim()];
    for (x, sigma) in support {
        let mut acc = zero;
        for &k in g.out_edges(x) {
            let e = &g.edges()[k];
            for (t, (s, d)) in target.iter_mut().zip(sigma.iter().zip(&e.shift)) {
                *t = s + d;
            }
            let val = match f.get(&(e.terminus, target.clone())) {
                Some(v) => *v,
                None => continue,
            };
            acc += match cochain {
                None => val * e.p,
                Some(w) => Complex64::from_polar(e.p, w(k, &sigma)) * val,
            };
        }
        out.insert((x, sigma), acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asymmetric() -> QuotientGraph {
        QuotientGraph::from_pairs(
            1,
            &[
                EdgePair { origin: 0, terminus: 0, p: 0.2, p_reverse: None, shift: vec![1] },
                EdgePair { origin: 0, terminus: 1, p: 0.6, p_reverse: Some(0.3), shift: vec![0] },
                EdgePair { origin: 1, terminus: 1, p: 0.35, p_reverse: None, shift: vec![1] },
            ],
        )
        .unwrap()
    }

    fn biased() -> QuotientGraph {
        QuotientGraph::from_pairs(
            1,
            &[
                EdgePair { origin: 0, terminus: 1, p: 0.8, p_reverse: Some(0.2), shift: vec![0] },
                EdgePair { origin: 0, terminus: 1, p: 0.2, p_reverse: Some(0.8), shift: vec![1] },
            ],
        )
        .unwrap()
    }

    #[test]
    fn involution() {
        for g in [QuotientGraph::zd(3), QuotientGraph::hexagonal(), asymmetric(), biased()] {
            for (k, e) in g.edges().iter().enumerate() {
                let r = &g.edges()[e.inverse];
                assert_eq!(r.inverse, k);
                assert_eq!(r.origin, e.terminus);
                assert!(r.shift.iter().zip(&e.shift).all(|(a, b)| *a == -*b));
            }
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let r = QuotientGraph::from_pairs(
            1,
            &[EdgePair { origin: 0, terminus: 0, p: 0.3, p_reverse: None, shift: vec![1] }],
        );
        assert!(matches!(r, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn measures() {
        assert_eq!(invariant_measure(&QuotientGraph::zd(2), 1e-14).unwrap(), vec![1.0]);
        let h = invariant_measure(&QuotientGraph::hexagonal(), 1e-14).unwrap();
        assert!((h[0] - 0.5).abs() < 1e-14 && (h[1] - 0.5).abs() < 1e-14);
        // left eigenvector of P = [[0.4, 0.6], [0.3, 0.7]]: (1/3, 2/3)
        let a = invariant_measure(&asymmetric(), 1e-15).unwrap();
        assert!((a[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((a[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reducible_rejected() {
        // vertex 1 is unreachable as an origin of anything but its own loop
        let g = QuotientGraph::from_pairs(
            1,
            &[
                EdgePair { origin: 0, terminus: 0, p: 0.5, p_reverse: None, shift: vec![1] },
                EdgePair { origin: 1, terminus: 1, p: 0.5, p_reverse: None, shift: vec![1] },
            ],
        )
        .unwrap();
        assert!(invariant_measure(&g, 1e-12).is_err());
    }

    #[test]
    fn detailed_balance() {
        let z = QuotientGraph::zd(2);
        assert_eq!(check_detailed_balance(&z, &[1.0]), 0.0);
        let h = QuotientGraph::hexagonal();
        assert_eq!(check_detailed_balance(&h, &[0.5, 0.5]), 0.0);
        let b = biased();
        let m = invariant_measure(&b, 1e-15).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-12);
        assert!(check_detailed_balance(&b, &m) > 0.2);
        assert!(harmonic_realization(&b, &m, 1e-12).is_err());
    }

    #[test]
    fn harmonic_positions() {
        let z = QuotientGraph::zd(3);
        let phi = harmonic_realization(&z, &[1.0], 1e-14).unwrap();
        assert_eq!(phi, PeriodicRealization::origin(3));
        assert_eq!(harmonic_residual(&z, &phi), 0.0);

        let h = QuotientGraph::hexagonal();
        let phi = harmonic_realization(&h, &[0.5, 0.5], 1e-12).unwrap();
        assert_eq!(phi.positions[0], vec![0.0, 0.0]);
        assert!((phi.positions[1][0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((phi.positions[1][1] - 1.0 / 3.0).abs() < 1e-14);
        assert!(harmonic_residual(&h, &phi) <= 1e-12);
        let moved = phi.translated(&[3.5, -1.25]);
        assert!((harmonic_residual(&h, &moved) - harmonic_residual(&h, &phi)).abs() < 1e-15);
    }

    #[test]
    fn covariance_closed_forms() {
        for d in 1..=4 {
            let z = QuotientGraph::zd(d);
            let cov = limit_covariance(&z, &[1.0], &PeriodicRealization::origin(d)).unwrap();
            assert_eq!(cov, DMatrix::identity(d, d) / d as f64);
        }
        let h = QuotientGraph::hexagonal();
        let phi = harmonic_realization(&h, &[0.5, 0.5], 1e-12).unwrap();
        let cov = limit_covariance(&h, &[0.5, 0.5], &phi).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[2.0 / 9.0, -1.0 / 9.0, -1.0 / 9.0, 2.0 / 9.0]);
        assert!((cov - want).abs().max() < 1e-15);
        let bad = PeriodicRealization {
            positions: vec![vec![0.0, 0.0], vec![0.5, 0.0]],
        };
        assert!(limit_covariance(&h, &[0.5, 0.5], &bad).is_err());
    }

    #[test]
    fn parse_formats() {
        let g = QuotientGraph::parse("# hex\n0 1 0.3333333333333333 0 0\n0 1 0.3333333333333333 -1 0\n0 1 0.3333333333333334 0 -1\n").unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.vertex_count(), 2);
        let a = QuotientGraph::parse("dim 1\n0 0 0.2 1\n0 1 0.6 0 0.3 # asymmetric\n1 1 0.35 1\n").unwrap();
        assert_eq!(a, asymmetric());
        assert!(matches!(
            QuotientGraph::parse("0 0 0.5 1\n0 0 x 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            QuotientGraph::parse("0 0 0.5 1 0\n0 0 0.5 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn hexagonal_delta_spreads() {
        let h = QuotientGraph::hexagonal();
        let mut f = LiftedFunction::new();
        f.insert((0, vec![0, 0]), Complex64::new(1.0, 0.0));
        let out = crystal_walk_apply(&h, &f, None, 1000).unwrap();
        assert_eq!(out.len(), 3);
        for ((v, _), val) in &out {
            assert_eq!(*v, 1);
            assert_eq!(*val, Complex64::new(1.0 / 3.0, 0.0));
        }
        let keys: Vec<_> = out.keys().map(|k| k.1.clone()).collect();
        assert!(keys.contains(&vec![0, 0]) && keys.contains(&vec![-1, 0]) && keys.contains(&vec![0, -1]));
        assert!(crystal_walk_apply(&h, &f, None, 2).is_err());
    }
}
