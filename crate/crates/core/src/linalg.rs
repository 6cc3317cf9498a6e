//! Sparse matrices and matrix exponentials over `Complex64`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<Complex64>,
}

impl CsrMatrix {
    /// Build from per-row `(column, value)` lists.
    pub fn from_rows(rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let n = rows.len();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let start = indices.len();
            for (j, v) in row {
                assert!(j < n, "column out of range");
                if indices.len() > start && indices[indices.len() - 1] == j {
                    *data.last_mut().unwrap() += v;
                } else {
                    indices.push(j);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix { n, indptr, indices, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.data[k]))
    }

    pub fn scaled(&self, a: Complex64) -> CsrMatrix {
        CsrMatrix {
            data: self.data.iter().map(|v| v * a).collect(),
            ..self.clone()
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for i in 0..self.n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.data[k] * x[self.indices[k]];
            }
            y[i] = s;
        }
    }

    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for (j, v) in self.indices.iter().zip(&self.data) {
            col[*j] += v.norm();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `e^{A} v` by scaled truncated Taylor series.
pub fn expm_action(a: &CsrMatrix, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.n(), v.len(), "dimension mismatch");
    let norm = a.norm1();
    let steps = norm.ceil().max(1.0) as usize;
    let inv = Complex64::new(1.0 / steps as f64, 0.0);
    let mut out = v.to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); v.len()];
    let mut next = term.clone();
    for _ in 0..steps {
        term.copy_from_slice(&out);
        let scale = inf_norm(&out).max(1e-300);
        let mut small = 0;
        for k in 1..=60 {
            a.matvec(&term, &mut next);
            let f = inv / k as f64;
            for (t, nv) in term.iter_mut().zip(&next) {
                *t = nv * f;
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
            if inf_norm(&term) <= 1e-17 * scale {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
        }
    }
    out
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn dense_norm1(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense `e^{A}` by Pade(13) scaling and squaring.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert!(a.is_square(), "matrix must be square");
    let n = a.nrows();
    let theta13 = 5.371_920_351_148_152;
    let norm = dense_norm1(a);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * Complex64::new(0.5f64.powi(s), 0.0);
    let c = |k: usize| Complex64::new(PADE13[k], 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * c(13) + &a4 * c(11) + &a2 * c(9)) + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * c(12) + &a4 * c(10) + &a2 * c(8)) + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);
    let mut r = (&v - &u).lu().solve(&(&v + &u)).expect("Pade denominator is invertible");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
