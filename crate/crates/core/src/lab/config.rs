use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Clt,
    Harper,
    Voronovskaja,
    BoundTable,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::Clt,
        Experiment::Harper,
        Experiment::Voronovskaja,
        Experiment::BoundTable,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Clt => "clt",
            Experiment::Harper => "harper",
            Experiment::Voronovskaja => "voronovskaja",
            Experiment::BoundTable => "bound-table",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment {s:?}")))
    }
}

/// Settings of one experiment run, readable from flat `key=value` text.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub d: usize,
    pub t: f64,
    pub n_list: Vec<u64>,
    pub lambda: f64,
    pub b: f64,
    pub c: f64,
    pub test_function: String,
    /// Truncation level of lattice embeddings.
    pub tail_eps: f64,
    /// Accuracy of continuum semigroup samples.
    pub semigroup_tol: f64,
    pub out: Option<PathBuf>,
    pub big_m: f64,
    pub omega: f64,
}

pub const KEYS: [&str; 13] = [
    "experiment",
    "d",
    "t",
    "n_list",
    "lambda",
    "b",
    "c",
    "test_function",
    "tail_eps",
    "semigroup_tol",
    "out",
    "big_m",
    "omega",
];

/// `16, 32, ..., 1024` for `d = 1`, capped at 256 otherwise.
pub fn default_n_list(d: usize) -> Vec<u64> {
    let top = if d == 1 { 1024 } else { 256 };
    (4..=10).map(|p| 1u64 << p).filter(|&n| n <= top).collect()
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, d: usize) -> Self {
        let (t, b) = match experiment {
            Experiment::Harper => (0.5, 1.0),
            _ => (1.0, 0.0),
        };
        ExperimentConfig {
            experiment,
            d,
            t,
            n_list: default_n_list(d),
            lambda: 1.0,
            b,
            c: 1.0 / (2 * d) as f64,
            test_function: "gaussian".into(),
            tail_eps: 1e-12,
            semigroup_tol: 1e-10,
            out: None,
            big_m: 1.0,
            omega: 0.1,
        }
    }

    /// Parse `key=value` lines; `#` starts a comment. Keys that are absent
    /// take defaults, and `n_list` and `c` follow `d` unless given.
    pub fn parse(text: &str, experiment: Option<Experiment>) -> Result<Self> {
        let mut pairs: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: "expected key=value".into(),
            })?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("unknown key {k:?}"),
                });
            }
            if pairs.iter().any(|(_, existing, _)| existing == k) {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("duplicate key {k:?}"),
                });
            }
            pairs.push((idx + 1, k.to_string(), v.trim().to_string()));
        }
        let lookup = |key: &str| pairs.iter().find(|(_, k, _)| k == key);
        let from_file = match lookup("experiment") {
            Some((line, _, v)) => Some(v.parse::<Experiment>().map_err(|e| Error::Parse {
                line: *line,
                message: e.to_string(),
            })?),
            None => None,
        };
        let experiment = match (experiment, from_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InvalidArgument(format!(
                    "config is for experiment {b} but {a} was requested"
                )))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::InvalidArgument("no experiment given".into())),
        };
        let d = match lookup("d") {
            Some((line, _, v)) => parse_value::<usize>(*line, "d", v)?,
            None if experiment == Experiment::Harper => 2,
            None => 1,
        };
        let mut cfg = ExperimentConfig::new(experiment, d);
        for (line, key, value) in &pairs {
            cfg.set(key, value).map_err(|e| match e {
                Error::InvalidArgument(message) => Error::Parse { line: *line, message },
                other => other,
            })?;
        }
        Ok(cfg)
    }

    /// Set one field from its textual form. Changing `d` also resets the
    /// `d`-dependent defaults `c` and `n_list`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = value.parse()?,
            "d" => {
                let d = parse_value::<usize>(0, key, value).map_err(plain)?;
                if d != self.d {
                    self.d = d;
                    self.c = 1.0 / (2 * d.max(1)) as f64;
                    self.n_list = default_n_list(d);
                }
            }
            "t" => self.t = parse_value(0, key, value).map_err(plain)?,
            "n_list" => {
                self.n_list = value
                    .split(',')
                    .map(|s| parse_value::<u64>(0, key, s.trim()).map_err(plain))
                    .collect::<Result<_>>()?
            }
            "lambda" => self.lambda = parse_value(0, key, value).map_err(plain)?,
            "b" => self.b = parse_value(0, key, value).map_err(plain)?,
            "c" => self.c = parse_value(0, key, value).map_err(plain)?,
            "test_function" => self.test_function = value.to_string(),
            "tail_eps" => self.tail_eps = parse_value(0, key, value).map_err(plain)?,
            "semigroup_tol" => self.semigroup_tol = parse_value(0, key, value).map_err(plain)?,
            "out" => self.out = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            "big_m" => self.big_m = parse_value(0, key, value).map_err(plain)?,
            "omega" => self.omega = parse_value(0, key, value).map_err(plain)?,
            other => return Err(Error::InvalidArgument(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if self.experiment == Experiment::Harper && self.d != 2 {
            return bad("harper runs on Z^2; set d=2".into());
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("t = {} must be nonnegative", self.t));
        }
        if self.n_list.len() < 3 {
            return bad("n_list needs at least three entries".into());
        }
        if self.n_list[0] == 0 || self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_list must be positive and strictly increasing".into());
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("c", self.c),
            ("tail_eps", self.tail_eps),
            ("semigroup_tol", self.semigroup_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !self.b.is_finite() {
            return bad("b must be finite".into());
        }
        if !(self.big_m >= 1.0) || !(self.omega >= 0.0) {
            return bad("need big_m >= 1 and omega >= 0".into());
        }
        Ok(())
    }

    /// The configuration as `key=value` text accepted by [`ExperimentConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        s += &format!("experiment={}\n", self.experiment);
        s += &format!("d={}\nt={}\nn_list={}\n", self.d, self.t, list.join(","));
        s += &format!("lambda={}\nb={}\nc={}\n", self.lambda, self.b, self.c);
        s += &format!("test_function={}\n", self.test_function);
        s += &format!("tail_eps={:e}\nsemigroup_tol={:e}\n", self.tail_eps, self.semigroup_tol);
        if let Some(out) = &self.out {
            s += &format!("out={}\n", out.display());
        }
        s += &format!("big_m={}\nomega={}\n", self.big_m, self.omega);
        s
    }
}

fn plain(e: Error) -> Error {
    match e {
        Error::Parse { message, .. } => Error::InvalidArgument(message),
        other => other,
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid value {v:?} for {key}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_dimension() {
        let c = ExperimentConfig::parse("experiment=clt\n", None).unwrap();
        assert_eq!(c.d, 1);
        assert_eq!(c.c, 0.5);
        assert_eq!(c.n_list, vec![16, 32, 64, 128, 256, 512, 1024]);
        let c2 = ExperimentConfig::parse("d = 2 # plane\n", Some(Experiment::Clt)).unwrap();
        assert_eq!(c2.c, 0.25);
        assert_eq!(*c2.n_list.last().unwrap(), 256);
        let h = ExperimentConfig::parse("", Some(Experiment::Harper)).unwrap();
        assert_eq!((h.d, h.b, h.t), (2, 1.0, 0.5));
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::new(Experiment::Voronovskaja, 2);
        c.n_list = vec![8, 16, 64];
        c.b = 0.5;
        c.out = Some("x.csv".into());
        let back = ExperimentConfig::parse(&c.to_text(), None).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(
            ExperimentConfig::parse("experiment=clt\nfoo=1\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("experiment=clt\n\nt=abc\n", None),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(ExperimentConfig::parse("experiment=clt\n", Some(Experiment::Harper)).is_err());
        assert!(ExperimentConfig::parse("t=1\n", None).is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::new(Experiment::Clt, 1);
        assert!(c.validate().is_ok());
        c.n_list = vec![16, 16, 32];
        assert!(c.validate().is_err());
        c.n_list = vec![16, 32];
        assert!(c.validate().is_err());
        let mut h = ExperimentConfig::new(Experiment::Harper, 1);
        assert!(h.validate().is_err());
        h.set("d", "2").unwrap();
        assert!(h.validate().is_ok());
    }
}
