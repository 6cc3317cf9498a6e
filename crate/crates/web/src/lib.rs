//! Browser bindings: a rate curve, a Harper snapshot and a bound breakdown.

use ratelab_core::bounds::{bound_general, bound_simplified, BoundInputs, CltSeminorms};
use ratelab_core::continuum::{heat_evolve, magnetic_evolve, GeneratorSpec, TestFunction};
use ratelab_core::grid::{embed, iterate, sample_scaled, sup_distance, GridFunction};
use ratelab_core::lattice::{harper, simple_walk};
use ratelab_core::{Complex64, Result};
use wasm_bindgen::prelude::*;

const TAIL_EPS: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-10;
const MAX_N: u64 = 4096;
const MAX_HARPER_N: u64 = 128;

fn js(e: ratelab_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Rows `[n, err_lo, err_hi, bound]` for `n = 16, 32, ...` up to `n_max`,
/// Gaussian test function, `c = 1/(2d)`, `lambda = 1`.
pub fn clt_rows(d: usize, t: f64, n_max: u64) -> Result<Vec<f64>> {
    if !(1..=2).contains(&d) {
        return Err(ratelab_core::Error::InvalidArgument("d must be 1 or 2".into()));
    }
    let cap = if d == 1 { MAX_N } else { 256 };
    let f = TestFunction::gaussian(d);
    let c = GeneratorSpec::walk_constant(d);
    let g = GeneratorSpec::heat(d, c, 1.0);
    let semis = CltSeminorms::compute(&f, &g)?;
    let heat = heat_evolve(&f, t, c, 0.5 * QUAD_TOL)?;
    let walk = simple_walk(d);
    let mut out = Vec::new();
    let mut n = 16;
    while n <= n_max.min(cap) {
        let k = (n as f64 * t).floor() as usize;
        let lattice = iterate(&walk, &embed(&f, n, TAIL_EPS)?, k)?;
        let radius = (f.evolved_tail_radius(c * t, 0.5 * QUAD_TOL) * (n as f64).sqrt()).ceil() as usize;
        let reference = sample_scaled(d, n, radius, QUAD_TOL, |y| {
            heat.eval(y).unwrap_or(Complex64::new(f64::NAN, 0.0))
        })?;
        let err = sup_distance(&lattice, &reference)?;
        let bound = bound_simplified(&semis.inputs(t, n, 1.0, d))?;
        out.extend([n as f64, err.lo, err.hi, bound]);
        n *= 2;
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn clt_curve(d: usize, t: f64, n_max: u32) -> std::result::Result<Vec<f64>, JsError> {
    clt_rows(d, t, n_max as u64).map_err(js)
}

/// `[side, |lattice|..., |reference|...]` on the square `[-3, 3]^2` after
/// `floor(nt)` Harper steps with flux `b/n`.
pub fn harper_snapshot(b: f64, t: f64, n: u64) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_HARPER_N {
        return Err(ratelab_core::Error::InvalidArgument(format!("n must be in 1..={MAX_HARPER_N}")));
    }
    let f = TestFunction::gaussian_at(vec![0.5, 0.0], 1.0);
    let c = 0.25;
    let op = harper(b).scaled_phase(1.0 / n as f64);
    let k = (n as f64 * t).floor() as usize;
    let lattice: GridFunction = iterate(&op, &embed(&f, n, TAIL_EPS)?, k)?;
    let mag = magnetic_evolve(&f, t, b, c, QUAD_TOL)?;
    let half = (3.0 * (n as f64).sqrt()).round() as i64;
    let side = (2 * half + 1) as usize;
    let inv = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(1 + 2 * side * side);
    out.push(side as f64);
    let mut refs = Vec::with_capacity(side * side);
    for i in -half..=half {
        for j in -half..=half {
            out.push(lattice.get(&[j, -i]).norm());
            refs.push(mag.eval(&[j as f64 * inv, -i as f64 * inv])?.norm());
        }
    }
    out.extend(refs);
    Ok(out)
}

#[wasm_bindgen]
pub fn harper_field(b: f64, t: f64, n: u32) -> std::result::Result<Vec<f64>, JsError> {
    harper_snapshot(b, t, n as u64).map_err(js)
}

/// `[term1, term2, term3, term4, general_total, simplified_total]` for the
/// 1-d Gaussian with `k = floor(nt)`; the simplified total ignores `M`, `omega`.
pub fn bound_terms(t: f64, n: u64, lambda: f64, big_m: f64, omega: f64) -> Result<Vec<f64>> {
    let f = TestFunction::gaussian(1);
    let semis = CltSeminorms::compute(&f, &GeneratorSpec::heat(1, 0.5, lambda))?;
    let base = semis.inputs(t, n, lambda, 1);
    let general = bound_general(&BoundInputs { big_m, omega, ..base })?;
    let mut out = general.terms().to_vec();
    out.push(general.total);
    out.push(bound_simplified(&base)?);
    Ok(out)
}

#[wasm_bindgen]
pub fn bound_breakdown(t: f64, n: u32, lambda: f64, big_m: f64, omega: f64) -> std::result::Result<Vec<f64>, JsError> {
    bound_terms(t, n as u64, lambda, big_m, omega).map_err(js)
}
