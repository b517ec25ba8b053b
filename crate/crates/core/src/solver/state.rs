use crate::grid::Field2D;
use crate::materials::{ColdEnergyTable, MaterialModel};

use super::config::RunConfig;
use super::SolverError;

/// Cells below this volume fraction are vacuum.
pub const MU_VACUUM: f64 = 0.5;

/// Relative density below which a cell is treated as empty when forming velocities.
pub const EMPTY_DENSITY_FRACTION: f64 = 1e-9;

/// A material model together with its cold-energy lookup.
#[derive(Debug, Clone)]
pub struct Material {
    pub model: MaterialModel,
    pub cold: ColdEnergyTable,
}

impl Material {
    pub fn new(model: MaterialModel) -> Self {
        Self { cold: ColdEnergyTable::new(&model), model }
    }

    #[inline]
    pub(crate) fn empty_density(&self) -> f64 {
        EMPTY_DENSITY_FRACTION * self.model.rho0
    }
}

/// Co-located state of the Eulerian grid.
///
/// Conserved quantities are stored per unit volume; `p`, `temperature` and
/// `sound_speed` are caches refreshed by [`super::eos_sync`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub rho: Field2D,
    pub mom_x: Field2D,
    pub mom_y: Field2D,
    /// Total energy per unit volume, ρ(e + ½u·u).
    pub energy: Field2D,
    pub sxx: Field2D,
    pub syy: Field2D,
    pub sxy: Field2D,
    pub eps_pl: Field2D,
    /// Plastic strain rate of the previous step, used by the rate term of the yield law.
    pub eps_rate: Field2D,
    pub e_el: Field2D,
    pub e_cpl: Field2D,
    pub mu: Field2D,
    pub p: Field2D,
    pub temperature: Field2D,
    pub sound_speed: Field2D,
    pub t: f64,
    pub step: u64,
}

impl SimState {
    /// All-vacuum state on the given grid.
    pub fn vacuum(nx: usize, ny: usize, dx: f64) -> Result<Self, SolverError> {
        let z = Field2D::new(nx, ny, dx)?.with_origin(0.5 * dx, 0.5 * dx);
        Ok(Self {
            rho: z.clone(),
            mom_x: z.clone(),
            mom_y: z.clone(),
            energy: z.clone(),
            sxx: z.clone(),
            syy: z.clone(),
            sxy: z.clone(),
            eps_pl: z.clone(),
            eps_rate: z.clone(),
            e_el: z.clone(),
            e_cpl: z.clone(),
            mu: z.clone(),
            p: z.clone(),
            temperature: z.clone(),
            sound_speed: z,
            t: 0.0,
            step: 0,
        })
    }

    pub fn nx(&self) -> usize {
        self.rho.nx()
    }
    pub fn ny(&self) -> usize {
        self.rho.ny()
    }
    pub fn dx(&self) -> f64 {
        self.rho.dx()
    }
    pub fn len(&self) -> usize {
        self.rho.len()
    }
    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    #[inline]
    pub fn is_material(&self, k: usize) -> bool {
        self.mu.data()[k] >= MU_VACUUM
    }

    /// Velocity of flat cell `k`; zero in empty cells.
    #[inline]
    pub fn velocity_at(&self, k: usize, empty_density: f64) -> (f64, f64) {
        let rho = self.rho.data()[k];
        if rho > empty_density {
            (self.mom_x.data()[k] / rho, self.mom_y.data()[k] / rho)
        } else {
            (0.0, 0.0)
        }
    }

    pub fn velocities(&self, material: &Material) -> (Field2D, Field2D) {
        let floor = material.empty_density();
        let mut u = Field2D::like(&self.rho, 0.0);
        let mut v = Field2D::like(&self.rho, 0.0);
        for k in 0..self.len() {
            let (a, b) = self.velocity_at(k, floor);
            u.data_mut()[k] = a;
            v.data_mut()[k] = b;
        }
        (u, v)
    }

    /// Material density of cell `k` (mixture density over volume fraction).
    #[inline]
    pub fn material_density(&self, k: usize) -> f64 {
        self.rho.data()[k] / self.mu.data()[k].max(MU_VACUUM)
    }

    /// Σρ·dx² per unit depth.
    pub fn total_mass(&self) -> f64 {
        self.rho.sum() * self.dx() * self.dx()
    }

    /// Σρ(e + ½u·u)·dx² per unit depth.
    pub fn total_energy(&self) -> f64 {
        self.energy.sum() * self.dx() * self.dx()
    }

    pub fn total_momentum(&self) -> (f64, f64) {
        let a = self.dx() * self.dx();
        (self.mom_x.sum() * a, self.mom_y.sum() * a)
    }

    /// Σρ|v|·dx², the scale against which x-momentum drift is judged.
    pub fn vertical_momentum_magnitude(&self) -> f64 {
        self.mom_y.data().iter().map(|m| m.abs()).sum::<f64>() * self.dx() * self.dx()
    }

    pub(crate) fn fields(&self) -> [&Field2D; 15] {
        [
            &self.rho,
            &self.mom_x,
            &self.mom_y,
            &self.energy,
            &self.sxx,
            &self.syy,
            &self.sxy,
            &self.eps_pl,
            &self.eps_rate,
            &self.e_el,
            &self.e_cpl,
            &self.mu,
            &self.p,
            &self.temperature,
            &self.sound_speed,
        ]
    }

    pub(crate) const FIELD_NAMES: [&'static str; 15] = [
        "rho", "mom_x", "mom_y", "energy", "sxx", "syy", "sxy", "eps_pl", "eps_rate", "e_el", "e_cpl", "mu", "p",
        "temperature", "sound_speed",
    ];

    /// First non-finite value as `(field, i, j)`.
    pub fn find_non_finite(&self) -> Option<(&'static str, usize, usize)> {
        self.fields()
            .iter()
            .zip(Self::FIELD_NAMES)
            .find_map(|(f, name)| f.find_non_finite().map(|(i, j, _)| (name, i, j)))
    }
}

/// Reverse-ballistic set-up: a block moving at `-impact_velocity` toward the
/// wall at `y = 0`, a circular vacuum pore inside it and a vacuum band above.
pub fn initialize_reverse_ballistic(cfg: &RunConfig, material: &Material) -> Result<SimState, SolverError> {
    cfg.validate()?;
    let g = &cfg.geometry;
    let m = &material.model;
    let mut s = SimState::vacuum(g.nx, g.ny, g.dx)?;
    let block_top = g.block_height();
    let [xc, yc] = g.pore_center();
    let r2 = (0.5 * g.pore_diameter).powi(2);
    let up = g.impact_velocity;

    let e_cold = material.cold.eval(m.rho0);
    let e = m.energy_for_temperature(g.initial_temperature, e_cold);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let x = (i as f64 + 0.5) * g.dx;
            let y = (j as f64 + 0.5) * g.dx;
            let in_block = y < block_top;
            let in_pore = g.pore_diameter > 0.0 && (x - xc).powi(2) + (y - yc).powi(2) < r2;
            if in_block && !in_pore {
                let k = j * g.nx + i;
                s.mu.data_mut()[k] = 1.0;
                s.rho.data_mut()[k] = m.rho0;
                s.mom_x.data_mut()[k] = 0.0;
                s.mom_y.data_mut()[k] = -m.rho0 * up;
                s.energy.data_mut()[k] = m.rho0 * (e + 0.5 * up * up);
            }
        }
    }
    super::eos_sync(&mut s, material, cfg.solver.strength);
    Ok(s)
}
