use super::TestFunction;
use crate::Result;

/// Relative accuracy targeted by [`sup_norm`].
pub const SUP_REL_ACCURACY: f64 = 1e-6;

/// Sup-norm of `f` over `R^d`.
///
/// Grid scan over the region where the analytic tail envelope can still
/// matter, then local refinement of the best grid maxima by a shrinking
/// pattern search.
pub fn sup_norm(f: &TestFunction) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let d = f.dim();
    let w = f.min_width();
    let ceiling = f.tail_envelope(0.0);
    let radius = f.tail_radius(1e-9 * ceiling);
    let max_degree = f.terms().iter().map(|t| t.degree()).max().unwrap_or(0) as f64;
    let per_axis_target = match d {
        1 => 8.0 + max_degree,
        2 => 5.0 + 0.5 * max_degree,
        _ => 3.0,
    };
    let h = w / per_axis_target;
    let n = ((2.0 * radius / h).ceil() as usize).max(2) + 1;
    let h = 2.0 * radius / (n - 1) as f64;
    let coord = |i: usize| -radius + i as f64 * h;

    let total = n.pow(d as u32);
    let mut vals = Vec::with_capacity(total);
    let mut x = vec![0.0; d];
    for idx in 0..total {
        let mut rem = idx;
        for a in (0..d).rev() {
            x[a] = coord(rem % n);
            rem /= n;
        }
        vals.push(f.eval(&x).norm());
    }

    // local maxima along each axis
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    let mut stride = vec![1usize; d];
    for a in (0..d.saturating_sub(1)).rev() {
        stride[a] = stride[a + 1] * n;
    }
    for (idx, &v) in vals.iter().enumerate() {
        let mut is_max = true;
        for a in 0..d {
            let pos = (idx / stride[a]) % n;
            if pos > 0 && vals[idx - stride[a]] > v {
                is_max = false;
                break;
            }
            if pos + 1 < n && vals[idx + stride[a]] > v {
                is_max = false;
                break;
            }
        }
        if is_max && v > 0.0 {
            candidates.push((v, idx));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    candidates.truncate(12);

    let mut best = vals.iter().copied().fold(0.0, f64::max);
    for &(_, idx) in &candidates {
        let mut rem = idx;
        let mut start = vec![0.0; d];
        for a in (0..d).rev() {
            start[a] = coord(rem % n);
            rem /= n;
        }
        best = best.max(refine(f, start, h, w));
    }
    best
}

fn refine(f: &TestFunction, mut x: Vec<f64>, h: f64, w: f64) -> f64 {
    let mut val = f.eval(&x).norm();
    let mut step = h;
    let stop = 1e-11 * w;
    while step > stop {
        let mut moved = false;
        for a in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[a];
                x[a] = old + dir * step;
                let v = f.eval(&x).norm();
                if v > val {
                    val = v;
                    moved = true;
                } else {
                    x[a] = old;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    val
}

/// `max_i || d^3 f / dx_i^3 ||_inf`.
pub fn third_seminorm(f: &TestFunction) -> Result<f64> {
    let d = f.dim();
    let mut best: f64 = 0.0;
    for i in 0..d {
        let mut alpha = vec![0u32; d];
        alpha[i] = 3;
        best = best.max(sup_norm(&f.derivative(&alpha)?));
    }
    Ok(best)
}
