//! Exact sub-flows of the Vlasov-Poisson splitting, discretized by
//! semi-Lagrangian shifts.
//!
//! * kinetic:  `f(x, v) <- f(x - t v, v)`
//! * electric: `f(x, v) <- f(x, v - t E(x))`
//! * modified: `f(x, v) <- f(x, v + t grad K(x))`, the flow of `[[T, U], U]`
//!
//! Fields are evaluated once from the entry state and held fixed during the
//! shift; the electric and modified flows leave the density untouched, so
//! the frozen field is exact. The electric and modified flows commute and
//! are fused into a single velocity shift.

use crate::error::{Error, Result};
use crate::field::FieldSolver;
use crate::grid::{DistFn, PhaseGrid};
use crate::interp::{advect_axis, Boundary, DEFAULT_ORDER};

/// Coefficients of a one-dimensional `D` block,
/// `D = (b + 2 c m tau^2 + 4 d m^2 tau^4 - 8 e m^3 tau^6) U`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DCoefficients {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl DCoefficients {
    /// Effective duration of the electric flow for step `tau` and mean density `m`.
    pub fn effective_time(&self, tau: f64, m: f64) -> f64 {
        let t2 = tau * tau;
        tau * (self.b + 2.0 * self.c * m * t2 + 4.0 * self.d * m * m * t2 * t2
            - 8.0 * self.e * m * m * m * t2 * t2 * t2)
    }
}

/// Applies sub-flows to distributions on one grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: PhaseGrid,
    order: usize,
    solver: FieldSolver,
}

impl Propagator {
    pub fn new(grid: PhaseGrid) -> Self {
        Self::with_order(grid, DEFAULT_ORDER)
    }

    pub fn with_order(grid: PhaseGrid, order: usize) -> Self {
        Self {
            grid,
            order,
            solver: FieldSolver::new(grid),
        }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn solver(&self) -> &FieldSolver {
        &self.solver
    }

    fn check_grid(&self, f: &DistFn) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::DimensionMismatch(
                "distribution grid differs from propagator grid".into(),
            ));
        }
        Ok(())
    }

    /// Free streaming over duration `t`.
    pub fn flow_t(&self, f: &mut DistFn, t: f64) -> Result<()> {
        self.check_grid(f)?;
        if t == 0.0 {
            return Ok(());
        }
        let g = self.grid;
        let (nx, nv, dx) = (g.nx(), g.nv(), g.dx());
        let values = f.values_mut();
        match g.dim() {
            1 => advect_axis(values, 1, nx, nv, self.order, Boundary::Periodic, |_, c| {
                t * g.v(c) / dx
            }),
            _ => {
                // x-lines: column index c = (iy, ivx, ivy)
                advect_axis(values, 1, nx, nx * nv * nv, self.order, Boundary::Periodic, |_, c| {
                    t * g.v((c / nv) % nv) / dx
                })?;
                // y-lines: column index c = (ivx, ivy)
                advect_axis(values, nx, nx, nv * nv, self.order, Boundary::Periodic, |_, c| {
                    t * g.v(c % nv) / dx
                })
            }
        }
    }

    /// Shifts velocity lines: `f(x, v) <- f(x, v - t a(x))` per component.
    fn kick(&self, f: &mut DistFn, accel: &[Vec<f64>], t: f64) -> Result<()> {
        let g = self.grid;
        let (nv, dv) = (g.nv(), g.dv());
        let ns = g.spatial_len();
        let values = f.values_mut();
        match g.dim() {
            1 => advect_axis(values, ns, nv, 1, self.order, Boundary::Bounded, |o, _| {
                t * accel[0][o] / dv
            }),
            _ => {
                advect_axis(values, ns, nv, nv, self.order, Boundary::Bounded, |o, _| {
                    t * accel[0][o] / dv
                })?;
                advect_axis(values, ns * nv, nv, 1, self.order, Boundary::Bounded, |o, _| {
                    t * accel[1][o / nv] / dv
                })
            }
        }
    }

    /// Electric flow over duration `t` with the field frozen at entry.
    pub fn flow_u(&self, f: &mut DistFn, t: f64) -> Result<()> {
        self.check_grid(f)?;
        if t == 0.0 {
            return Ok(());
        }
        let e = self.solver.field_of(f);
        self.kick(f, &e, t)
    }

    /// Flow of the nested bracket `[[T, U], U]` over duration `t`.
    pub fn flow_k(&self, f: &mut DistFn, t: f64) -> Result<()> {
        self.check_grid(f)?;
        if t == 0.0 {
            return Ok(());
        }
        let kf = self.solver.solve_k(f)?;
        self.kick(f, &kf.grad_k, -t)
    }

    /// Fused block `C = b tau U + c tau^3 [[T, U], U]` of the modified-potential
    /// schemes, applied as one velocity shift by `b tau E - c tau^3 grad K`.
    ///
    /// The `c` part runs the bracket flow backwards, `flow_k(-c tau^3)`: this
    /// is the orientation under which the registered coefficient tables reach
    /// order six. With `c = 0` the result is exactly `flow_u(f, b tau)`.
    pub fn flow_c(&self, f: &mut DistFn, tau: f64, b: f64, c: f64) -> Result<()> {
        if c == 0.0 {
            return self.flow_u(f, b * tau);
        }
        self.check_grid(f)?;
        let e = self.solver.field_of(f);
        let kf = self.solver.solve_k(f)?;
        let (tb, tc) = (b * tau, c * tau * tau * tau);
        let accel: Vec<Vec<f64>> = e
            .iter()
            .zip(&kf.grad_k)
            .map(|(ea, ka)| ea.iter().zip(ka).map(|(ev, kv)| tb * ev + tc * kv).collect())
            .collect();
        self.kick(f, &accel, 1.0)
    }

    /// One-dimensional `D` block: an electric flow of rescaled duration.
    /// `m` is the mean density, a constant of motion passed in by the caller.
    pub fn flow_d(&self, f: &mut DistFn, tau: f64, coef: DCoefficients, m: f64) -> Result<()> {
        if self.grid.dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "D blocks need dim = 1, grid has dim = {}",
                self.grid.dim()
            )));
        }
        self.flow_u(f, coef.effective_time(tau, m))
    }
}
