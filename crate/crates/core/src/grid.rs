//! Phase-space grid, distribution storage and velocity reductions.
//!
//! Values are stored row-major with the spatial axes outermost, so a DistFn
//! in two dimensions is indexed as `[ix][iy][ivx][ivy]`. Velocity moments
//! use the rectangle rule on the uniform grid, which is spectrally accurate
//! for a Maxwellian truncated at `|v| = v_max`. The Maxwellian is not
//! renormalized for the mass lying outside the velocity box.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform tensor grid over `T^dim x [-v_max, v_max)^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    dim: usize,
    nx: usize,
    nv: usize,
    k: f64,
    v_max: f64,
    dx: f64,
    dv: f64,
}

impl PhaseGrid {
    pub fn new(dim: usize, nx: usize, nv: usize, k: f64, v_max: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::NonPositiveExtent(format!("wave number k = {k}")));
        }
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(Error::NonPositiveExtent(format!("v_max = {v_max}")));
        }
        if nx < 4 || nv < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 points per axis, got nx = {nx}, nv = {nv}"
            )));
        }
        if nx % 2 != 0 {
            return Err(Error::InvalidGrid(format!("nx must be even, got {nx}")));
        }
        let length = 2.0 * PI / k;
        Ok(Self {
            dim,
            nx,
            nv,
            k,
            v_max,
            dx: length / nx as f64,
            dv: 2.0 * v_max / nv as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    /// Spatial period `L = 2 pi / k` of each axis.
    pub fn length(&self) -> f64 {
        2.0 * PI / self.k
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn v(&self, j: usize) -> f64 {
        -self.v_max + j as f64 * self.dv
    }

    /// Number of spatial nodes, `nx^dim`.
    pub fn spatial_len(&self) -> usize {
        self.nx.pow(self.dim as u32)
    }

    /// Number of velocity nodes, `nv^dim`.
    pub fn velocity_len(&self) -> usize {
        self.nv.pow(self.dim as u32)
    }

    pub fn len(&self) -> usize {
        self.spatial_len() * self.velocity_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `dx^dim`.
    pub fn spatial_cell(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    /// `dv^dim`.
    pub fn velocity_cell(&self) -> f64 {
        self.dv.powi(self.dim as i32)
    }

    /// Phase-space cell volume `dx^dim dv^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spatial_cell() * self.velocity_cell()
    }

    /// Volume of the spatial torus, `L^dim`.
    pub fn spatial_volume(&self) -> f64 {
        self.length().powi(self.dim as i32)
    }

    /// `|v|^2` at flat velocity index `jv`.
    pub fn speed_squared(&self, jv: usize) -> f64 {
        match self.dim {
            1 => self.v(jv).powi(2),
            _ => self.v(jv / self.nv).powi(2) + self.v(jv % self.nv).powi(2),
        }
    }
}

/// Discrete distribution function sampled on a [`PhaseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistFn {
    grid: PhaseGrid,
    values: Vec<f64>,
}

impl DistFn {
    pub fn zeros(grid: PhaseGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn from_values(grid: PhaseGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, v)` at every node. The closure receives spatial and
    /// velocity coordinates as slices of length `dim`.
    pub fn from_fn(grid: PhaseGrid, f: impl Fn(&[f64], &[f64]) -> f64) -> Self {
        let d = grid.dim();
        let nv = grid.velocity_len();
        let mut values = Vec::with_capacity(grid.len());
        let mut x = [0.0; 2];
        let mut v = [0.0; 2];
        for ix in 0..grid.spatial_len() {
            match d {
                1 => x[0] = grid.x(ix),
                _ => {
                    x[0] = grid.x(ix / grid.nx());
                    x[1] = grid.x(ix % grid.nx());
                }
            }
            for jv in 0..nv {
                match d {
                    1 => v[0] = grid.v(jv),
                    _ => {
                        v[0] = grid.v(jv / grid.nv());
                        v[1] = grid.v(jv % grid.nv());
                    }
                }
                values.push(f(&x[..d], &v[..d]));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Charge density `rho(x) = int f dv` on the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
}

impl Density {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Landau initial condition: a Maxwellian modulated by
/// `1 + amplitude cos(kx)` (d = 1) or `1 + amplitude cos(kx) cos(ky)` (d = 2).
pub fn init_landau(grid: PhaseGrid, amplitude: f64) -> Result<DistFn> {
    if !(0.0..1.0).contains(&amplitude) {
        return Err(Error::Config(format!(
            "amplitude must lie in [0, 1), got {amplitude}"
        )));
    }
    let k = grid.k();
    let d = grid.dim() as i32;
    let norm = (2.0 * PI).powf(-0.5 * d as f64);
    Ok(DistFn::from_fn(grid, |x, v| {
        let v2: f64 = v.iter().map(|c| c * c).sum();
        let modulation: f64 = x.iter().map(|xi| (k * xi).cos()).product();
        norm * (-0.5 * v2).exp() * (1.0 + amplitude * modulation)
    }))
}

/// Rectangle-rule velocity reduction.
pub fn reduce_density(f: &DistFn) -> Density {
    let grid = *f.grid();
    let dv = grid.velocity_cell();
    let values = f
        .values()
        .chunks_exact(grid.velocity_len())
        .map(|block| block.iter().sum::<f64>() * dv)
        .collect();
    Density { grid, values }
}

/// Total mass normalized by `(2 pi)^dim`, the volume of the unit torus.
pub fn total_mass(f: &DistFn) -> f64 {
    let grid = f.grid();
    let sum: f64 = f.values().iter().sum();
    sum * grid.cell_volume() / (2.0 * PI).powi(grid.dim() as i32)
}

/// Mean charge density `int f dx dv / L^dim`.
///
/// This is the constant entering the bracket identity and the modified
/// potential; it coincides with [`total_mass`] when `k = 1`.
pub fn mean_density(f: &DistFn) -> f64 {
    let grid = f.grid();
    let sum: f64 = f.values().iter().sum();
    sum * grid.cell_volume() / grid.spatial_volume()
}
