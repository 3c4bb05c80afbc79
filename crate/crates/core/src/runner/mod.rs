//! Experiment orchestration: single runs, step-size sweeps with order
//! fitting, and verification of the registered coefficient sets.

mod config;
mod output;

pub use config::{parse_taus, Mode, RunConfig};
pub use output::{
    read_snapshot, write_run_csv, write_snapshot, write_sweep_csv, write_verify_report,
    SNAPSHOT_HEADER_LEN,
};

use rayon::prelude::*;

use crate::diagnostics::{error_series, DiagRecord};
use crate::error::{Error, Result};
use crate::flows::Propagator;
use crate::grid::{init_landau, DistFn};
use crate::schemes::{self, consistency_residuals, order6_residuals, Family, SchemeSpec};

/// Relative slack below which a remaining interval counts as zero.
const TIME_SLACK: f64 = 1e-9;

/// A distribution advanced by one scheme on one grid.
#[derive(Debug, Clone)]
pub struct Simulation {
    spec: SchemeSpec,
    prop: Propagator,
    state: DistFn,
    time: f64,
    steps: usize,
}

impl Simulation {
    /// Landau initial state for `cfg`; the step size and mode are ignored.
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        let spec = cfg.scheme_spec()?;
        if !spec.supports_dim(grid.dim()) {
            return Err(Error::Config(format!(
                "scheme `{}` requires dim = 1",
                spec.name
            )));
        }
        let prop = Propagator::with_order(grid, cfg.order);
        let state = init_landau(grid, cfg.amplitude)?;
        Ok(Self {
            spec,
            prop,
            state,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    pub fn state(&self) -> &DistFn {
        &self.state
    }

    pub fn into_state(self) -> DistFn {
        self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn diagnostics(&self) -> DiagRecord {
        DiagRecord::measure(&self.state, self.prop.solver(), self.time)
    }

    /// One step of size `tau`. A non-finite state is reported with the
    /// 1-based index of the offending step; the state is left as computed.
    pub fn step(&mut self, tau: f64) -> Result<()> {
        schemes::step(&self.prop, &mut self.state, &self.spec, tau)?;
        self.steps += 1;
        self.time += tau;
        if !self.state.is_finite() {
            return Err(Error::NonFinite {
                step: self.steps,
                time: self.time,
            });
        }
        Ok(())
    }
}

/// Diagnostics series and final state of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<DiagRecord>,
    pub state: DistFn,
}

impl RunOutput {
    pub fn errors(&self) -> Result<(f64, f64)> {
        error_series(&self.records)
    }
}

/// Step sizes that reach `t_final` with constant `tau`, the last one
/// shortened so the run ends exactly on `t_final`.
pub fn step_plan(tau: f64, t_final: f64) -> Vec<f64> {
    let ratio = t_final / tau;
    let full = (ratio * (1.0 + TIME_SLACK)).floor() as usize;
    let mut plan = vec![tau; full];
    let rest = t_final - full as f64 * tau;
    if rest > TIME_SLACK * tau {
        plan.push(rest);
    }
    if plan.is_empty() {
        plan.push(t_final);
    }
    plan
}

/// Advances the Landau initial condition to `t_final`, recording diagnostics
/// at `t = 0` and after every step.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let mut checked = cfg.clone();
    checked.mode = Mode::Run;
    checked.validate()?;
    run_with_tau(cfg, cfg.tau)
}

fn run_with_tau(cfg: &RunConfig, tau: f64) -> Result<RunOutput> {
    let mut sim = Simulation::new(cfg)?;
    let plan = step_plan(tau, cfg.t_final);
    let mut records = Vec::with_capacity(plan.len() + 1);
    records.push(sim.diagnostics());
    let last = plan.len() - 1;
    for (i, &h) in plan.iter().enumerate() {
        sim.step(h)?;
        // land on exact multiples of tau and on t_final
        sim.time = if i == last {
            cfg.t_final
        } else {
            (i + 1) as f64 * tau
        };
        records.push(sim.diagnostics());
    }
    Ok(RunOutput {
        records,
        state: sim.into_state(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub sigma_over_tau: f64,
    pub err_h: f64,
    pub err_l2: f64,
    /// Whether the row entered the slope fit.
    pub fitted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub scheme: String,
    pub rows: Vec<SweepRow>,
    pub slope: f64,
}

/// Relative energy error at or above which a sweep point counts as diverged.
pub const DIVERGED: f64 = 1.0;

/// Least-squares slope of `log err_H` against `log tau`, over the points
/// whose error is at least three times the smallest error of the sweep and
/// below [`DIVERGED`]. Returns the slope and the mask of retained points.
pub fn fit_slope(taus: &[f64], errs: &[f64]) -> Result<(f64, Vec<bool>)> {
    let floor = errs.iter().cloned().fold(f64::INFINITY, f64::min);
    let keep: Vec<bool> = errs
        .iter()
        .map(|&e| e.is_finite() && e > 0.0 && e >= 3.0 * floor && e < DIVERGED)
        .collect();
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(errs)
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|((t, e), _)| (t.ln(), e.ln()))
        .collect();
    let distinct = pts
        .iter()
        .any(|p| (p.0 - pts.first().map_or(p.0, |q| q.0)).abs() > 0.0);
    if pts.len() < 2 || !distinct {
        return Err(Error::AllPointsOnFloor);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok((sxy / sxx, keep))
}

/// Runs the configuration once per step size in `cfg.taus` and fits the
/// empirical order of the energy error.
pub fn convergence_sweep(cfg: &RunConfig) -> Result<SweepResult> {
    let mut checked = cfg.clone();
    checked.mode = Mode::Sweep;
    checked.validate()?;
    let spec = cfg.scheme_spec()?;
    let per_step = spec.flows_per_step() as f64;
    // a blow-up is a measurement here: the point is kept and marked diverged
    let one = |&tau: &f64| -> Result<(f64, f64)> {
        match run_with_tau(cfg, tau) {
            Ok(out) => out.errors(),
            Err(Error::NonFinite { .. }) => Ok((f64::INFINITY, f64::INFINITY)),
            Err(e) => Err(e),
        }
    };
    // one-dimensional runs are small enough to execute side by side
    let errs: Vec<(f64, f64)> = if cfg.dim == 1 {
        cfg.taus.par_iter().map(one).collect::<Result<_>>()?
    } else {
        cfg.taus.iter().map(one).collect::<Result<_>>()?
    };
    let err_h: Vec<f64> = errs.iter().map(|e| e.0).collect();
    let (slope, keep) = fit_slope(&cfg.taus, &err_h)?;
    let rows = cfg
        .taus
        .iter()
        .zip(&errs)
        .zip(keep)
        .map(|((&tau, &(eh, el)), fitted)| SweepRow {
            tau,
            sigma_over_tau: per_step / tau,
            err_h: eh,
            err_l2: el,
            fitted,
        })
        .collect();
    Ok(SweepResult {
        scheme: spec.name,
        rows,
        slope,
    })
}

/// Tolerances of the coefficient gates.
pub const CONSISTENCY_TOL: f64 = 1e-12;
pub const ORDER6_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyEntry {
    pub name: String,
    pub symmetric: bool,
    pub consistency: (f64, f64),
    pub order6: Option<[f64; 6]>,
    /// Whether the order-6 residuals are gated for this scheme.
    pub order6_gated: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| !e.passed)
            .map(|e| e.name.as_str())
            .collect()
    }
}

/// Checks symmetry, consistency and, for sixth-order schemes whose family
/// has tabulated conditions, the order-6 residuals.
pub fn verify_specs(specs: &[SchemeSpec]) -> VerifyReport {
    let entries = specs
        .iter()
        .map(|spec| {
            let symmetric = spec.is_symmetric();
            let consistency = consistency_residuals(spec);
            let order6 = order6_residuals(spec).ok();
            let order6_gated =
                schemes::nominal_order(&spec.name) == Some(6) && spec.family != Family::D1Mod;
            let mut passed =
                symmetric && consistency.0 <= CONSISTENCY_TOL && consistency.1 <= CONSISTENCY_TOL;
            if order6_gated {
                passed &= order6.is_some_and(|r| r.iter().all(|v| v.abs() <= ORDER6_TOL));
            }
            VerifyEntry {
                name: spec.name.clone(),
                symmetric,
                consistency,
                order6,
                order6_gated,
                passed,
            }
        })
        .collect();
    VerifyReport { entries }
}

pub fn verify_schemes() -> VerifyReport {
    verify_specs(&schemes::registry())
}
