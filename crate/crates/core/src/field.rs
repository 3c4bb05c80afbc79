//! Spectral Poisson solver, electric field and modified potential.
//!
//! Fields live on the spatial grid (`nx` points in 1D, `nx * nx` points
//! indexed `ix * nx + iy` in 2D). The potential solves
//! `-lap(phi) = rho - mean(rho)` with zero mean, `E = -grad(phi)`.
//!
//! The modified potential `K` generates the flow of the nested bracket
//! `[[T, U], U]`. It is defined by
//!
//! ```text
//! -lap(K) = -2 m lap(phi) - 2 sum_ij (d_i d_j phi)^2 + 2 (lap(phi))^2
//! ```
//!
//! where `m` is the mean density. In 1D this collapses to `grad K = -2 m E`.
//!
//! First derivatives drop the Nyquist mode; second derivatives are built by
//! composing first-derivative symbols so that the right-hand side above is
//! mean-free to rounding.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{mean_density, reduce_density, Density, DistFn, PhaseGrid};

/// Relative bound on the mean of the modified-potential right-hand side.
pub const RHS_MEAN_TOLERANCE: f64 = 1e-10;

/// Snapshot of every x-dependent field derived from one distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSet {
    pub phi: Vec<f64>,
    pub e: Vec<Vec<f64>>,
    pub k: Vec<f64>,
    pub grad_k: Vec<Vec<f64>>,
}

/// Modified potential and its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct KField {
    pub k: Vec<f64>,
    pub grad_k: Vec<Vec<f64>>,
}

/// FFT plans and wave numbers for one spatial grid.
#[derive(Clone)]
pub struct FieldSolver {
    grid: PhaseGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Physical wave numbers, Nyquist kept (used for inverse Laplacians).
    kappa: Vec<f64>,
    /// Derivative symbols, Nyquist zeroed.
    kappa_d: Vec<f64>,
}

impl std::fmt::Debug for FieldSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSolver").field("grid", &self.grid).finish()
    }
}

impl FieldSolver {
    pub fn new(grid: PhaseGrid) -> Self {
        let n = grid.nx();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let k = grid.k();
        let kappa: Vec<f64> = (0..n)
            .map(|m| {
                let m = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                k * m
            })
            .collect();
        let kappa_d = kappa
            .iter()
            .enumerate()
            .map(|(m, &w)| if m == n / 2 { 0.0 } else { w })
            .collect();
        Self {
            grid,
            forward,
            inverse,
            kappa,
            kappa_d,
        }
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.nx();
        match self.grid.dim() {
            1 => plan.process(data),
            _ => {
                plan.process(data);
                let mut column = vec![Complex64::new(0.0, 0.0); n];
                for iy in 0..n {
                    for ix in 0..n {
                        column[ix] = data[ix * n + iy];
                    }
                    plan.process(&mut column);
                    for ix in 0..n {
                        data[ix * n + iy] = column[ix];
                    }
                }
            }
        }
    }

    fn to_spectral(&self, real: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = real.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    fn to_physical(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.into_iter().map(|c| c.re * scale).collect()
    }

    /// Wave vector components of flat spectral index `idx`.
    fn wave(&self, idx: usize, table: &[f64]) -> [f64; 2] {
        let n = self.grid.nx();
        match self.grid.dim() {
            1 => [table[idx], 0.0],
            _ => [table[idx / n], table[idx % n]],
        }
    }

    fn kappa_squared(&self, idx: usize) -> f64 {
        let w = self.wave(idx, &self.kappa);
        w[0] * w[0] + w[1] * w[1]
    }

    /// `-lap^{-1}` on the spectral coefficients, zero mean.
    fn inverse_neg_laplacian(&self, hat: &mut [Complex64]) {
        for (idx, c) in hat.iter_mut().enumerate() {
            let k2 = self.kappa_squared(idx);
            *c = if k2 == 0.0 { Complex64::new(0.0, 0.0) } else { *c / k2 };
        }
    }

    /// Spectral derivative along `axis`.
    fn derivative(&self, hat: &[Complex64], axis: usize) -> Vec<Complex64> {
        hat.iter()
            .enumerate()
            .map(|(idx, &c)| c * Complex64::new(0.0, self.wave(idx, &self.kappa_d)[axis]))
            .collect()
    }

    /// `phi = -lap^{-1} (rho - mean(rho))`.
    pub fn solve_poisson(&self, rho: &Density) -> Vec<f64> {
        let mut hat = self.to_spectral(&rho.values);
        self.inverse_neg_laplacian(&mut hat);
        self.to_physical(hat)
    }

    /// `E = -grad(phi)`, one array per axis.
    pub fn electric_field(&self, phi: &[f64]) -> Vec<Vec<f64>> {
        let hat = self.to_spectral(phi);
        (0..self.grid.dim())
            .map(|axis| {
                let d = self.derivative(&hat, axis);
                self.to_physical(d).into_iter().map(|v| -v).collect()
            })
            .collect()
    }

    /// Gradient of a zero-mean field given by its spectral coefficients.
    fn gradient(&self, hat: &[Complex64]) -> Vec<Vec<f64>> {
        (0..self.grid.dim())
            .map(|axis| self.to_physical(self.derivative(hat, axis)))
            .collect()
    }

    pub fn potential(&self, f: &DistFn) -> Vec<f64> {
        self.solve_poisson(&reduce_density(f))
    }

    pub fn field_of(&self, f: &DistFn) -> Vec<Vec<f64>> {
        self.electric_field(&self.potential(f))
    }

    /// Modified potential. Uses the closed form `K = 2 m phi` in 1D and the
    /// spectral PDE solve otherwise.
    pub fn solve_k(&self, f: &DistFn) -> Result<KField> {
        if self.grid.dim() == 1 {
            let m = mean_density(f);
            let phi = self.potential(f);
            let e = self.electric_field(&phi);
            Ok(KField {
                k: phi.iter().map(|p| 2.0 * m * p).collect(),
                grad_k: vec![e[0].iter().map(|v| -2.0 * m * v).collect()],
            })
        } else {
            self.solve_k_laplacian(f)
        }
    }

    /// Modified potential from its Poisson equation, valid in any dimension.
    pub fn solve_k_laplacian(&self, f: &DistFn) -> Result<KField> {
        let m = mean_density(f);
        let dim = self.grid.dim();
        let phi_hat = self.to_spectral(&self.potential(f));
        // Hessian of phi, symmetric: store (i, j) with i <= j.
        let mut hessian = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            let di = self.derivative(&phi_hat, i);
            for j in i..dim {
                hessian[i][j] = self.to_physical(self.derivative(&di, j));
            }
        }
        let n = phi_hat.len();
        let mut rhs = vec![0.0; n];
        for (p, r) in rhs.iter_mut().enumerate() {
            let lap: f64 = (0..dim).map(|i| hessian[i][i][p]).sum();
            let mut frob = 0.0;
            for i in 0..dim {
                for j in i..dim {
                    let h = hessian[i][j][p];
                    frob += if i == j { h * h } else { 2.0 * h * h };
                }
            }
            *r = -2.0 * m * lap - 2.0 * frob + 2.0 * lap * lap;
        }
        let mean = rhs.iter().sum::<f64>() / n as f64;
        let scale = rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if mean.abs() > RHS_MEAN_TOLERANCE * scale {
            return Err(Error::RhsMeanTooLarge { mean, scale });
        }
        let mut k_hat = self.to_spectral(&rhs);
        self.inverse_neg_laplacian(&mut k_hat);
        let grad_k = self.gradient(&k_hat);
        Ok(KField {
            k: self.to_physical(k_hat),
            grad_k,
        })
    }

    /// Modified potential as `|E|^2 - 2 lap^{-1} div(rho E)`, shifted to zero
    /// mean. Independent of the Laplacian route; used for cross-checks.
    pub fn solve_k_divergence(&self, f: &DistFn) -> KField {
        let rho = reduce_density(f);
        let e = self.electric_field(&self.solve_poisson(&rho));
        let n = rho.values.len();
        let e2: Vec<f64> = (0..n).map(|p| e.iter().map(|c| c[p] * c[p]).sum()).collect();
        let mut k_hat = self.to_spectral(&e2);
        k_hat[0] = Complex64::new(0.0, 0.0);
        let mut div_hat = vec![Complex64::new(0.0, 0.0); n];
        for (axis, comp) in e.iter().enumerate() {
            let flux: Vec<f64> = comp.iter().zip(&rho.values).map(|(a, r)| a * r).collect();
            for (acc, d) in div_hat.iter_mut().zip(self.derivative(&self.to_spectral(&flux), axis)) {
                *acc += d;
            }
        }
        // -2 lap^{-1} g = 2 (-lap)^{-1} g
        self.inverse_neg_laplacian(&mut div_hat);
        for (k, d) in k_hat.iter_mut().zip(&div_hat) {
            *k += 2.0 * d;
        }
        let grad_k = self.gradient(&k_hat);
        KField {
            k: self.to_physical(k_hat),
            grad_k,
        }
    }

    pub fn fields(&self, f: &DistFn) -> Result<FieldSet> {
        let phi = self.potential(f);
        let e = self.electric_field(&phi);
        let KField { k, grad_k } = self.solve_k(f)?;
        Ok(FieldSet { phi, e, k, grad_k })
    }

    /// Potential energy `1/2 int |E|^2 dx`.
    pub fn potential_energy(&self, f: &DistFn) -> f64 {
        let e = self.field_of(f);
        0.5 * squared_norm(&e) * self.grid.spatial_cell()
    }

    /// Value of the bracket functional `[[T, U], U] = int rho |E|^2 dx`.
    pub fn bracket_tuu_value(&self, f: &DistFn) -> f64 {
        let rho = reduce_density(f);
        let e = self.electric_field(&self.solve_poisson(&rho));
        let sum: f64 = rho
            .values
            .iter()
            .enumerate()
            .map(|(p, r)| r * e.iter().map(|c| c[p] * c[p]).sum::<f64>())
            .sum();
        sum * self.grid.spatial_cell()
    }

    /// `V(f) = -int lap(phi) |grad phi|^2 dx`; vanishes identically in 1D.
    ///
    /// With this sign `[[T, U], U] = 2 m U + V` holds on the discrete grid.
    pub fn casimir_v_value(&self, f: &DistFn) -> f64 {
        let phi_hat = self.to_spectral(&self.potential(f));
        let mut lap_hat = phi_hat.clone();
        for (idx, c) in lap_hat.iter_mut().enumerate() {
            *c *= -self.kappa_squared(idx);
        }
        let lap = self.to_physical(lap_hat);
        let grad = self.gradient(&phi_hat);
        let sum: f64 = lap
            .iter()
            .enumerate()
            .map(|(p, l)| -l * grad.iter().map(|g| g[p] * g[p]).sum::<f64>())
            .sum();
        sum * self.grid.spatial_cell()
    }
}

fn squared_norm(components: &[Vec<f64>]) -> f64 {
    components.iter().flat_map(|c| c.iter()).map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{init_landau, total_mass};
    use std::f64::consts::PI;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn density(grid: PhaseGrid, rho: impl Fn(f64, f64) -> f64) -> Density {
        let n = grid.nx();
        let values = match grid.dim() {
            1 => (0..n).map(|i| rho(grid.x(i), 0.0)).collect(),
            _ => (0..n * n).map(|p| rho(grid.x(p / n), grid.x(p % n))).collect(),
        };
        Density { grid, values }
    }

    #[test]
    fn single_mode_potential() {
        let g = PhaseGrid::new(1, 32, 8, 1.0, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let phi = s.solve_poisson(&density(g, |x, _| 1.0 + 0.5 * x.cos()));
        let e = s.electric_field(&phi);
        for i in 0..32 {
            assert!((phi[i] - 0.5 * g.x(i).cos()).abs() < 1e-14);
            assert!((e[0][i] - 0.5 * g.x(i).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_density_has_no_field() {
        let g = PhaseGrid::new(2, 16, 8, 0.5, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let phi = s.solve_poisson(&density(g, |_, _| 3.0));
        assert!(max_abs(&phi) < 1e-15);
        assert!(s.electric_field(&phi).iter().all(|c| max_abs(c) < 1e-15));
    }

    #[test]
    fn landau_potential() {
        let g = PhaseGrid::new(1, 64, 8, 0.5, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let phi = s.solve_poisson(&density(g, |x, _| 1.0 + 0.5 * (0.5 * x).cos()));
        let e = s.electric_field(&phi);
        for i in 0..64 {
            assert!((phi[i] - 2.0 * (0.5 * g.x(i)).cos()).abs() < 1e-12);
            assert!((e[0][i] - (0.5 * g.x(i)).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn field_of_cosine() {
        let g = PhaseGrid::new(1, 16, 8, 1.0, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let phi: Vec<f64> = (0..16).map(|i| g.x(i).cos()).collect();
        let e = s.electric_field(&phi);
        for i in 0..16 {
            assert!((e[0][i] - g.x(i).sin()).abs() < 1e-14);
        }
        assert!(max_abs(&s.electric_field(&[0.0; 16])[0]) == 0.0);
    }

    #[test]
    fn potential_is_linear_and_mean_free() {
        let g = PhaseGrid::new(2, 16, 8, 0.5, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let r1 = density(g, |x, y| 1.0 + 0.3 * (0.5 * x).sin() * (y).cos());
        let r2 = density(g, |x, y| 0.2 * (x + 0.5 * y).cos());
        let mix = Density {
            grid: g,
            values: r1.values.iter().zip(&r2.values).map(|(a, b)| 2.0 * a - 0.7 * b).collect(),
        };
        let (p1, p2, pm) = (s.solve_poisson(&r1), s.solve_poisson(&r2), s.solve_poisson(&mix));
        for i in 0..pm.len() {
            assert!((pm[i] - (2.0 * p1[i] - 0.7 * p2[i])).abs() < 1e-14);
        }
        let mean = pm.iter().sum::<f64>() / pm.len() as f64;
        assert!(mean.abs() <= 1e-14 * max_abs(&pm));
    }

    #[test]
    fn k_closed_form_agrees_with_pde_routes() {
        let g = PhaseGrid::new(1, 128, 128, 0.5, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let f = init_landau(g, 0.5).unwrap();
        let m = mean_density(&f);
        let e = s.field_of(&f);
        let closed = s.solve_k(&f).unwrap();
        let lap = s.solve_k_laplacian(&f).unwrap();
        let div = s.solve_k_divergence(&f);
        let scale = max_abs(&e[0]);
        for i in 0..128 {
            let expect = -2.0 * m * e[0][i];
            assert!((closed.grad_k[0][i] - expect).abs() <= 1e-10 * scale);
            assert!((lap.grad_k[0][i] - expect).abs() <= 1e-10 * scale);
            assert!((div.grad_k[0][i] - expect).abs() <= 1e-10 * scale);
            assert!((lap.k[i] - closed.k[i]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn uniform_distribution_has_no_k() {
        let g = PhaseGrid::new(2, 8, 16, 0.5, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let f = init_landau(g, 0.0).unwrap();
        let kf = s.solve_k(&f).unwrap();
        assert!(max_abs(&kf.k) < 1e-15);
        assert!(kf.grad_k.iter().all(|c| max_abs(c) < 1e-15));
    }

    #[test]
    fn k_single_direction_in_2d() {
        // rho = m (1 + cos x1), so phi = m cos(x1); the Jacobian-determinant
        // terms vanish and K = 2 m phi = 2 m^2 cos(x1).
        let g = PhaseGrid::new(2, 16, 16, 1.0, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let f = DistFn::from_fn(g, |x, v| {
            (1.0 + x[0].cos()) * (-0.5 * (v[0] * v[0] + v[1] * v[1])).exp() / (2.0 * PI)
        });
        let m = mean_density(&f);
        let kf = s.solve_k_laplacian(&f).unwrap();
        for p in 0..256 {
            let x1 = g.x(p / 16);
            assert!((kf.k[p] - 2.0 * m * m * x1.cos()).abs() < 1e-12, "{p}");
        }
        let div = s.solve_k_divergence(&f);
        for p in 0..256 {
            assert!((div.k[p] - kf.k[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn k_routes_agree_in_2d() {
        let g = PhaseGrid::new(2, 32, 16, 0.5, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let f = init_landau(g, 0.5).unwrap();
        let lap = s.solve_k_laplacian(&f).unwrap();
        let div = s.solve_k_divergence(&f);
        let scale = max_abs(&lap.grad_k[0]);
        for axis in 0..2 {
            for p in 0..lap.k.len() {
                assert!((lap.grad_k[axis][p] - div.grad_k[axis][p]).abs() < 1e-10 * scale);
            }
        }
        let mean = lap.k.iter().sum::<f64>() / lap.k.len() as f64;
        assert!(mean.abs() <= 1e-14 * max_abs(&lap.k));
    }

    #[test]
    fn bracket_value_single_mode() {
        // int_0^{2 pi} (1 + a cos x)(a sin x)^2 dx = pi a^2
        let g = PhaseGrid::new(1, 64, 256, 1.0, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let a = 0.5;
        let f = init_landau(g, a).unwrap();
        assert!((s.bracket_tuu_value(&f) - PI * a * a).abs() < 1e-12);
        assert!((s.potential_energy(&f) - PI / 8.0).abs() < 1e-12);
        assert!(s.casimir_v_value(&f).abs() < 1e-12);
        let uniform = init_landau(g, 0.0).unwrap();
        assert_eq!(s.bracket_tuu_value(&uniform), 0.0);
        assert_eq!(s.casimir_v_value(&uniform), 0.0);
    }

    #[test]
    fn bracket_identity_2d_landau() {
        let g = PhaseGrid::new(2, 32, 32, 0.5, 8.0).unwrap();
        let s = FieldSolver::new(g);
        let f = init_landau(g, 0.5).unwrap();
        let lhs = s.bracket_tuu_value(&f);
        let u = s.potential_energy(&f);
        let v = s.casimir_v_value(&f);
        let m = mean_density(&f);
        let scale = 1.0 + lhs.abs() + (2.0 * m * u).abs() + v.abs();
        assert!((lhs - 2.0 * m * u - v).abs() <= 1e-10 * scale);
        // the (2 pi)-normalized mass differs from the mean density for k != 1
        assert!((total_mass(&f) - 4.0 * m).abs() < 1e-12);
    }
}
