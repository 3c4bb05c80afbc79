//! Energies, norms and relative-drift series.
//!
//! Phase-space integrals are rectangle-rule sums over the grid nodes.

use crate::error::{Error, Result};
use crate::field::FieldSolver;
use crate::grid::{total_mass, DistFn};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagRecord {
    pub t: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub mass: f64,
    pub l1: f64,
    pub l2: f64,
    pub f_min: f64,
    pub f_max: f64,
}

impl DiagRecord {
    pub fn measure(f: &DistFn, solver: &FieldSolver, t: f64) -> Self {
        let kinetic = kinetic_energy(f);
        let potential = solver.potential_energy(f);
        let (f_min, f_max) = extrema(f);
        Self {
            t,
            energy: kinetic + potential,
            kinetic,
            potential,
            mass: total_mass(f),
            l1: lp_norm(f, 1),
            l2: lp_norm(f, 2),
            f_min,
            f_max,
        }
    }
}

/// `int |v|^2 / 2 f dx dv`.
pub fn kinetic_energy(f: &DistFn) -> f64 {
    let g = f.grid();
    let nv = g.velocity_len();
    let half_v2: Vec<f64> = (0..nv).map(|j| 0.5 * g.speed_squared(j)).collect();
    let sum: f64 = f
        .values()
        .chunks_exact(nv)
        .map(|block| block.iter().zip(&half_v2).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    sum * g.cell_volume()
}

/// `1/2 int |E|^2 dx`.
pub fn potential_energy(f: &DistFn) -> f64 {
    FieldSolver::new(*f.grid()).potential_energy(f)
}

/// L^p norm for `p` in {1, 2}.
///
/// # Panics
/// For any other `p`.
pub fn lp_norm(f: &DistFn, p: u32) -> f64 {
    let vol = f.grid().cell_volume();
    match p {
        1 => f.values().iter().map(|v| v.abs()).sum::<f64>() * vol,
        2 => (f.values().iter().map(|v| v * v).sum::<f64>() * vol).sqrt(),
        _ => panic!("unsupported norm exponent {p}"),
    }
}

pub fn extrema(f: &DistFn) -> (f64, f64) {
    f.values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Maximum relative drifts `(err_H, err_L2)` against the first record.
pub fn error_series(records: &[DiagRecord]) -> Result<(f64, f64)> {
    let first = records.first().ok_or(Error::EmptySeries)?;
    if first.energy == 0.0 {
        return Err(Error::ZeroInitial("energy"));
    }
    if first.l2 == 0.0 {
        return Err(Error::ZeroInitial("L2 norm"));
    }
    Ok(records.iter().fold((0.0f64, 0.0f64), |(eh, el), r| {
        (
            eh.max((r.energy / first.energy - 1.0).abs()),
            el.max((r.l2 / first.l2 - 1.0).abs()),
        )
    }))
}
