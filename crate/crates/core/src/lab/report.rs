use std::fmt::Write as _;

use crate::bounds::BoundBreakdown;
use crate::grid::Interval;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "n,k,t,err_lo,err_hi,bound_total,term1,term2,term3,term4,ok";

/// Largest interval width, relative to its midpoint, accepted for fitting.
pub const MAX_RELATIVE_WIDTH: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: u64,
    pub k: u64,
    pub t: f64,
    pub error: Interval,
    pub bound: Option<BoundBreakdown>,
}

impl ReportRow {
    /// `error.hi <= bound.total`, when a bound exists.
    pub fn ok(&self) -> Option<bool> {
        self.bound.map(|b| self.error.hi <= b.total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Ordinary least squares of `ln error` against `ln n`; nonpositive errors
/// are skipped.
pub fn fit_slope(rows: &[(u64, f64)]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(n, e)| *n > 0 && *e > 0.0 && e.is_finite())
        .map(|(n, e)| ((*n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "slope fit needs three positive errors, have {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (rss / m).sqrt(),
        points: pts.len(),
    })
}

/// `max / min` of `sqrt(n) * error` over rows with positive error.
pub fn sqrt_n_ratio(rows: &[(u64, f64)]) -> Option<f64> {
    let scaled: Vec<f64> = rows
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(n, e)| (*n as f64).sqrt() * e)
        .collect();
    if scaled.len() < 2 {
        return None;
    }
    let max = scaled.iter().copied().fold(0.0, f64::max);
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max / min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Gate {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Gate {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub experiment: String,
    pub d: usize,
    pub t: f64,
    pub rows: Vec<ReportRow>,
    pub fit: Option<SlopeFit>,
    pub max_ratio: Option<f64>,
    /// Some row interval is wider than [`MAX_RELATIVE_WIDTH`] of its midpoint.
    pub inconclusive: bool,
    /// Extra named scalars (for example a fitted constant).
    pub extras: Vec<(String, f64)>,
    pub gates: Vec<Gate>,
}

impl RateReport {
    /// Sorts rows, fits the slope on midpoints and computes the ratio.
    pub fn assemble(experiment: &str, d: usize, t: f64, mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by_key(|r| r.n);
        let mids: Vec<(u64, f64)> = rows.iter().map(|r| (r.n, r.error.mid())).collect();
        let inconclusive = rows
            .iter()
            .any(|r| !(r.error.width() <= MAX_RELATIVE_WIDTH * r.error.mid()));
        RateReport {
            experiment: experiment.to_string(),
            d,
            t,
            fit: fit_slope(&mids).ok(),
            max_ratio: sqrt_n_ratio(&mids),
            inconclusive,
            rows,
            extras: Vec::new(),
            gates: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    pub fn slope(&self) -> f64 {
        self.fit.map_or(f64::NAN, |f| f.slope)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = write!(s, "{},{},{},{:e},{:e}", r.n, r.k, r.t, r.error.lo, r.error.hi);
            match r.bound {
                Some(b) => {
                    let [t1, t2, t3, t4] = b.terms();
                    let _ = write!(s, ",{:e},{:e},{:e},{:e},{:e}", b.total, t1, t2, t3, t4);
                }
                None => s.push_str(",,,,,"),
            }
            let ok = match r.ok() {
                Some(true) => "true",
                Some(false) => "false",
                None => "na",
            };
            let _ = writeln!(s, ",{ok}");
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let num = |v: Option<f64>| v.map_or("nan".to_string(), |x| format!("{x}"));
        let _ = writeln!(s, "experiment={}", self.experiment);
        let _ = writeln!(s, "d={}", self.d);
        let _ = writeln!(s, "t={}", self.t);
        let _ = writeln!(s, "rows={}", self.rows.len());
        let _ = writeln!(s, "slope={}", num(self.fit.map(|f| f.slope)));
        let _ = writeln!(s, "intercept={}", num(self.fit.map(|f| f.intercept)));
        let _ = writeln!(s, "fit_residual={}", num(self.fit.map(|f| f.residual)));
        let _ = writeln!(s, "max_ratio={}", num(self.max_ratio));
        let _ = writeln!(s, "inconclusive={}", self.inconclusive);
        for (k, v) in &self.extras {
            let _ = writeln!(s, "{k}={v}");
        }
        for g in &self.gates {
            let _ = writeln!(
                s,
                "gate.{}={} {}",
                g.name,
                if g.passed { "pass" } else { "fail" },
                g.detail
            );
        }
        let _ = writeln!(s, "passed={}", self.passed());
        s
    }
}
