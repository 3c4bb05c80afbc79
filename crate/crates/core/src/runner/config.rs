use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::interp::DEFAULT_ORDER;
use crate::schemes::{by_name, SchemeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Run,
    Sweep,
    Verify,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "run" => Ok(Mode::Run),
            "sweep" => Ok(Mode::Sweep),
            "verify" => Ok(Mode::Verify),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Run => "run",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
        })
    }
}

/// Experiment configuration. Defaults reproduce the one-dimensional
/// nonlinear Landau case on a 256 x 256 grid with Strang splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub scheme: String,
    pub nx: usize,
    pub nv: usize,
    pub k: f64,
    pub v_max: f64,
    pub amplitude: f64,
    pub tau: f64,
    pub t_final: f64,
    pub order: usize,
    pub mode: Mode,
    pub taus: Vec<f64>,
    pub out: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            scheme: "strang".into(),
            nx: 256,
            nv: 256,
            k: 0.5,
            v_max: 8.0,
            amplitude: 0.5,
            tau: 0.125,
            t_final: 16.0,
            order: DEFAULT_ORDER,
            mode: Mode::Run,
            taus: Vec::new(),
            out: None,
            snapshot: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

/// Parses a comma-separated list of step sizes.
pub fn parse_taus(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse("taus", s))
        .collect()
}

impl RunConfig {
    /// Sets one field from its key. Keys match the long CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dim" => self.dim = parse(key, value)?,
            "scheme" => self.scheme = value.to_string(),
            "nx" => self.nx = parse(key, value)?,
            "nv" => self.nv = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "vmax" => self.v_max = parse(key, value)?,
            "amplitude" => self.amplitude = parse(key, value)?,
            "tau" => self.tau = parse(key, value)?,
            "tfinal" => self.t_final = parse(key, value)?,
            "order" => self.order = parse(key, value)?,
            "mode" => self.mode = value.parse()?,
            "taus" => self.taus = parse_taus(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "snapshot" => self.snapshot = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg = Self::default();
        cfg.merge_str(&text)?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(self.dim, self.nx, self.nv, self.k, self.v_max)
    }

    pub fn scheme_spec(&self) -> Result<SchemeSpec> {
        by_name(&self.scheme)
    }

    /// Checks every constraint a run needs: grid, interpolation order,
    /// scheme and its dimension, amplitude and step sizes.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if self.order % 2 == 0 {
            return Err(Error::EvenOrder(self.order));
        }
        let shortest = grid.nx().min(grid.nv());
        if shortest < self.order + 1 {
            return Err(Error::StencilTooLarge {
                order: self.order,
                len: shortest,
            });
        }
        let spec = self.scheme_spec()?;
        if !spec.supports_dim(self.dim) {
            return Err(Error::Config(format!(
                "scheme `{}` requires dim = 1",
                spec.name
            )));
        }
        if !(0.0..1.0).contains(&self.amplitude) {
            return Err(Error::Config(format!(
                "amplitude must lie in [0, 1), got {}",
                self.amplitude
            )));
        }
        if !self.t_final.is_finite() {
            return Err(Error::Config("tfinal must be finite".into()));
        }
        let check_tau = |tau: f64| -> Result<()> {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::Config(format!("tau must be positive, got {tau}")));
            }
            if self.t_final < tau {
                return Err(Error::Config(format!(
                    "tfinal = {} is shorter than tau = {tau}",
                    self.t_final
                )));
            }
            Ok(())
        };
        match self.mode {
            Mode::Sweep => {
                if self.taus.len() < 4 {
                    return Err(Error::Config(format!(
                        "a sweep needs at least 4 step sizes, got {}",
                        self.taus.len()
                    )));
                }
                for &t in &self.taus {
                    check_tau(t)?;
                }
                let lo = self.taus.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = self.taus.iter().cloned().fold(0.0, f64::max);
                if hi < 10.0 * lo {
                    return Err(Error::Config(
                        "sweep step sizes must span at least one decade".into(),
                    ));
                }
            }
            _ => check_tau(self.tau)?,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.grid().unwrap().length(), 4.0 * std::f64::consts::PI);
    }

    #[test]
    fn key_value_text() {
        let mut cfg = RunConfig::default();
        cfg.merge_str(
            "# comment\n\ndim = 2\nscheme=o6-13\nnx = 64\nnv=64\ntau = 0.2\ntfinal = 60\n\
             taus = 1, 0.5,0.25\nmode = sweep\nout = a.csv\n",
        )
        .unwrap();
        assert_eq!(cfg.dim, 2);
        assert_eq!(cfg.scheme, "o6-13");
        assert_eq!((cfg.nx, cfg.nv), (64, 64));
        assert_eq!(cfg.tau, 0.2);
        assert_eq!(cfg.t_final, 60.0);
        assert_eq!(cfg.taus, [1.0, 0.5, 0.25]);
        assert_eq!(cfg.mode, Mode::Sweep);
        assert_eq!(cfg.out.as_deref(), Some(Path::new("a.csv")));
    }

    #[test]
    fn bad_text() {
        let mut cfg = RunConfig::default();
        assert!(cfg.merge_str("dim").is_err());
        assert!(cfg.merge_str("colour = red").is_err());
        assert!(cfg.merge_str("nx = many").is_err());
        assert!(cfg.merge_str("mode = fly").is_err());
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        let with = |f: &dyn Fn(&mut RunConfig)| {
            let mut c = ok.clone();
            f(&mut c);
            c.validate()
        };
        assert!(with(&|c| c.tau = 0.0).is_err());
        assert!(with(&|c| c.tau = -0.1).is_err());
        assert!(with(&|c| c.t_final = 0.1).is_err());
        assert!(with(&|c| c.scheme = "rk4".into()).is_err());
        assert!(with(&|c| {
            c.dim = 2;
            c.nx = 32;
            c.nv = 32;
            c.scheme = "o6-11-d1".into();
        })
        .is_err());
        assert!(with(&|c| c.order = 16).is_err());
        assert!(with(&|c| c.nx = 16).is_err());
        assert!(with(&|c| c.amplitude = 1.0).is_err());
        assert!(with(&|c| c.dim = 3).is_err());
        assert!(with(&|c| c.mode = Mode::Sweep).is_err());
        assert!(with(&|c| {
            c.mode = Mode::Sweep;
            c.taus = vec![1.0, 0.8, 0.6, 0.4];
        })
        .is_err());
        with(&|c| {
            c.mode = Mode::Sweep;
            c.taus = vec![1.0, 0.5, 0.25, 0.1];
        })
        .unwrap();
        with(&|c| c.t_final = c.tau).unwrap();
    }
}
