//! Fourier conduction between material cells. Faces touching vacuum and
//! non-periodic domain boundaries are adiabatic.

use crate::grid::{rk4_integrate, Field2D};

use super::config::{Boundary, ConductionIntegrator, SolverSettings};
use super::state::{Material, SimState};
use super::SolverError;

/// Geometry of the conduction problem for one step.
pub(crate) struct ConductionMesh<'a> {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub chi: f64,
    pub periodic_x: bool,
    pub periodic_y: bool,
    pub active: &'a [bool],
}

impl ConductionMesh<'_> {
    /// Heat-flux divergence `∇·(χ∇T)` per unit volume, W/m³.
    pub fn flux_divergence(&self, temperature: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let scale = self.chi / (self.dx * self.dx);
        let face = |a: usize, b: usize| -> f64 {
            if self.active[a] && self.active[b] {
                scale * (temperature[b] - temperature[a])
            } else {
                0.0
            }
        };
        let mut out = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if !self.active[k] {
                    continue;
                }
                let west = match (i, self.periodic_x) {
                    (0, false) => 0.0,
                    (0, true) => face(k, j * nx + nx - 1),
                    _ => face(k, k - 1),
                };
                let east = match (i + 1 == nx, self.periodic_x) {
                    (true, false) => 0.0,
                    (true, true) => face(k, j * nx),
                    _ => face(k, k + 1),
                };
                let south = match (j, self.periodic_y) {
                    (0, false) => 0.0,
                    (0, true) => face(k, (ny - 1) * nx + i),
                    _ => face(k, k - nx),
                };
                let north = match (j + 1 == ny, self.periodic_y) {
                    (true, false) => 0.0,
                    (true, true) => face(k, i),
                    _ => face(k, k + nx),
                };
                // each term is the flux into the cell through one face
                out[k] = (west + east) + (south + north);
            }
        }
        out
    }
}

/// One conduction substep. Returns the net heat added to the domain per unit
/// depth, which is zero up to rounding because every face flux is shared.
pub fn conduction_step(
    s: &mut SimState,
    material: &Material,
    settings: &SolverSettings,
    dt: f64,
) -> Result<f64, SolverError> {
    let m = &material.model;
    if m.chi == 0.0 {
        return Ok(0.0);
    }
    let active: Vec<bool> = (0..s.len()).map(|k| s.is_material(k)).collect();
    let mesh = ConductionMesh {
        nx: s.nx(),
        ny: s.ny(),
        dx: s.dx(),
        chi: m.chi,
        periodic_x: settings.boundary_west == Boundary::Periodic,
        periodic_y: settings.boundary_south == Boundary::Periodic,
        active: &active,
    };
    let heat_capacity: Vec<f64> = (0..s.len()).map(|k| if active[k] { s.rho.data()[k] * m.cv } else { 0.0 }).collect();

    let deposited: Vec<f64> = match settings.conduction {
        ConductionIntegrator::Euler => mesh.flux_divergence(s.temperature.data()).iter().map(|q| dt * q).collect(),
        ConductionIntegrator::Rk4 => {
            let rate = |t: &Vec<f64>| -> Vec<f64> {
                mesh.flux_divergence(t)
                    .iter()
                    .zip(&heat_capacity)
                    .map(|(q, c)| if *c > 0.0 { q / c } else { 0.0 })
                    .collect()
            };
            let t0 = s.temperature.data().to_vec();
            let t1 = rk4_integrate(&t0, rate, dt)?;
            t1.iter().zip(&t0).zip(&heat_capacity).map(|((a, b), c)| c * (a - b)).collect()
        }
    };

    let mut net = 0.0;
    for (k, dq) in deposited.iter().enumerate() {
        if active[k] {
            s.energy.data_mut()[k] += dq;
            net += dq;
        }
    }
    Ok(net * s.dx() * s.dx())
}

/// Largest explicit conduction step, `0.25 dx² ρ c_v / χ`, over material cells.
pub fn conduction_dt_limit(s: &SimState, material: &Material) -> f64 {
    let m = &material.model;
    if m.chi <= 0.0 {
        return f64::INFINITY;
    }
    let dx2 = s.dx() * s.dx();
    (0..s.len())
        .filter(|&k| s.is_material(k))
        .map(|k| 0.25 * dx2 * s.rho.data()[k] * m.cv / m.chi)
        .fold(f64::INFINITY, f64::min)
}

/// Convenience wrapper for tests and diagnostics on bare temperature fields.
pub fn conduct_field(temperature: &Field2D, rho_cv: f64, chi: f64, dt: f64, periodic: bool) -> Field2D {
    let active = vec![true; temperature.len()];
    let mesh = ConductionMesh {
        nx: temperature.nx(),
        ny: temperature.ny(),
        dx: temperature.dx(),
        chi,
        periodic_x: periodic,
        periodic_y: periodic,
        active: &active,
    };
    let q = mesh.flux_divergence(temperature.data());
    let mut out = temperature.clone();
    for (t, q) in out.data_mut().iter_mut().zip(q) {
        *t += dt * q / rho_cv;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_field_is_steady() {
        let f = Field2D::filled(16, 12, 1e-9, 612.5).unwrap();
        let g = conduct_field(&f, 3.5e6, 0.178, 1e-12, false);
        assert_eq!(f, g);
    }

    #[test]
    fn linear_profile_interior_is_steady() {
        let f = Field2D::from_fn(20, 6, 1e-9, |i, j| 300.0 + 7.0 * i as f64 - 3.0 * j as f64).unwrap();
        let g = conduct_field(&f, 3.5e6, 0.178, 1e-12, false);
        for j in 1..5 {
            for i in 1..19 {
                assert!((g.get(i, j) - f.get(i, j)).abs() < 1e-9, "({i},{j})");
            }
        }
    }

    #[test]
    fn gaussian_decay_matches_heat_kernel() {
        let (n, dx) = (96usize, 1e-9);
        let (rho_cv, chi) = (1800.0 * 1980.0, 0.178);
        let diffusivity = chi / rho_cv;
        let dt = 0.2 * dx * dx / diffusivity;
        let sigma0 = 4.0 * dx;
        let c = 0.5 * n as f64 * dx;
        let bump = |x: f64, y: f64, s2: f64| (-((x - c).powi(2) + (y - c).powi(2)) / (2.0 * s2)).exp();
        let mut f = Field2D::from_fn(n, n, dx, |i, j| {
            let (x, y) = ((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx);
            300.0 + 50.0 * bump(x, y, sigma0 * sigma0)
        })
        .unwrap();
        let l2 = |f: &Field2D| f.data().iter().map(|t| (t - 300.0).powi(2)).sum::<f64>().sqrt();
        let initial = l2(&f);
        for _ in 0..100 {
            f = conduct_field(&f, rho_cv, chi, dt, true);
        }
        let t = 100.0 * dt;
        let sigma = (sigma0 * sigma0 + 2.0 * diffusivity * t).sqrt();
        let expected = sigma0 / sigma;
        let measured = l2(&f) / initial;
        assert!((measured / expected - 1.0).abs() < 0.02, "measured {measured}, expected {expected}");
    }

    #[test]
    fn vacuum_faces_are_adiabatic() {
        let (nx, ny) = (6, 1);
        let active = [true, true, true, false, true, true];
        let mesh = ConductionMesh { nx, ny, dx: 1.0, chi: 1.0, periodic_x: false, periodic_y: false, active: &active };
        let q = mesh.flux_divergence(&[300.0, 300.0, 400.0, 0.0, 900.0, 900.0]);
        assert_eq!(q[3], 0.0);
        assert_eq!(q[4], 0.0);
        assert_eq!(q[2], -100.0);
        assert_eq!(q.iter().sum::<f64>(), 0.0);
    }
}
