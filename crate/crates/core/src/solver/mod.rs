//! Operator-split explicit Eulerian solver for the reverse-ballistic
//! pore-collapse problem.
//!
//! One step is `compute_dt → hyperbolic_step → eos_sync → stress_predictor →
//! radial_return → conduction_step → eos_sync`. The intermediate EOS refresh
//! gives the stress update pressures and temperatures consistent with the
//! transported state.

pub mod config;
pub mod hydro;
pub mod plasticity;
pub mod state;
pub mod thermal;

use thiserror::Error;

use crate::grid::GridError;
use crate::materials::MaterialError;
use crate::units;

pub use config::{Boundary, ConductionIntegrator, ConfigError, Geometry, OutputSettings, RunConfig, SolverSettings};
pub use hydro::{hyperbolic_step, BoundaryInflow};
pub use plasticity::{radial_return, stress_predictor, PlasticReport};
pub use state::{initialize_reverse_ballistic, Material, SimState, MU_VACUUM};
pub use thermal::conduction_step;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("negative density {value:e} kg/m^3 in cell ({i}, {j}) at t = {t:e} s (CFL violation)")]
    NegativeDensity { i: usize, j: usize, value: f64, t: f64 },
    #[error("non-finite {field} in cell ({i}, {j})")]
    NonFinite { field: &'static str, i: usize, j: usize },
    #[error("no material cells left to bound the time step")]
    EmptyMaterial,
    #[error("step {step} (t = {t:e} s): {source}")]
    Step {
        step: u64,
        t: f64,
        #[source]
        source: Box<SolverError>,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

impl SolverError {
    /// Innermost error, stripping step context.
    pub fn root(&self) -> &SolverError {
        match self {
            SolverError::Step { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Recompute pressure, temperature and sound speed from the conserved state.
///
/// The cold energy is the tabulated hydrostatic part at the material density
/// plus the elastic and stored plastic accumulators. Vacuum cells carry zero
/// pressure, temperature, sound speed and deviatoric stress.
pub fn eos_sync(s: &mut SimState, material: &Material, strength: bool) {
    let m = &material.model;
    let empty = material.empty_density();
    for k in 0..s.len() {
        let rho = s.rho.data()[k];
        if !s.is_material(k) || rho <= empty {
            s.p.data_mut()[k] = 0.0;
            s.temperature.data_mut()[k] = 0.0;
            s.sound_speed.data_mut()[k] = 0.0;
            s.sxx.data_mut()[k] = 0.0;
            s.syy.data_mut()[k] = 0.0;
            s.sxy.data_mut()[k] = 0.0;
            continue;
        }
        let rho_m = s.material_density(k);
        let (u, v) = s.velocity_at(k, empty);
        let e = s.energy.data()[k] / rho - 0.5 * (u * u + v * v);
        let e_cold = material.cold.eval(rho_m) + s.e_el.data()[k] + s.e_cpl.data()[k];
        let p = m.pressure_raw(rho_m, e, e_cold);
        let temperature = m.temperature_from_state(e, e_cold);
        let g = if strength { m.shear_modulus(p, temperature) } else { 0.0 };
        s.p.data_mut()[k] = p;
        s.temperature.data_mut()[k] = temperature;
        s.sound_speed.data_mut()[k] = m.sound_speed(rho_m, e, e_cold, p, g);
    }
}

/// Relative slack under which a step is taken to land on the target time.
const LANDING_TOLERANCE: f64 = 1e-9;

/// Stable step: the CFL bound over material cells, the explicit conduction
/// bound, and a clip so the step lands on `t_next`.
pub fn compute_dt(s: &SimState, material: &Material, cfl: f64, t_next: f64) -> Result<f64, SolverError> {
    let empty = material.empty_density();
    let mut max_speed: f64 = 0.0;
    let mut any = false;
    for k in 0..s.len() {
        if !s.is_material(k) {
            continue;
        }
        any = true;
        let (u, v) = s.velocity_at(k, empty);
        max_speed = max_speed.max(u.abs() + v.abs() + s.sound_speed.data()[k]);
    }
    if !any || max_speed <= 0.0 {
        return Err(SolverError::EmptyMaterial);
    }
    let dt = (cfl * s.dx() / max_speed).min(thermal::conduction_dt_limit(s, material));
    let remaining = t_next - s.t;
    Ok(if remaining > 0.0 { dt.min(remaining) } else { dt })
}

/// Energy bookkeeping of one step, per unit depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAudit {
    pub before: f64,
    pub after: f64,
    pub boundary: f64,
    pub conduction: f64,
}

impl EnergyAudit {
    /// `|ΔE − boundary − conduction| / |E_before|`.
    pub fn relative_residual(&self) -> f64 {
        (self.after - self.before - self.boundary - self.conduction).abs() / self.before.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub inflow: BoundaryInflow,
    pub conduction: f64,
    pub plastic: PlasticReport,
    pub audit: Option<EnergyAudit>,
}

/// One full operator-split step toward `t_next`.
pub fn advance(s: &mut SimState, material: &Material, settings: &SolverSettings, t_next: f64) -> Result<StepReport, SolverError> {
    let wrap = |step: u64, t: f64| move |e: SolverError| SolverError::Step { step, t, source: Box::new(e) };
    let (step, t) = (s.step, s.t);
    let before = settings.audit.then(|| s.total_energy());

    let dt = compute_dt(s, material, settings.cfl, t_next).map_err(wrap(step, t))?;
    let inflow = hyperbolic_step(s, material, settings, dt).map_err(wrap(step, t))?;
    eos_sync(s, material, settings.strength);
    let mut plastic = PlasticReport::default();
    if settings.strength {
        stress_predictor(s, material, settings, dt);
        plastic = radial_return(s, material, dt);
    }
    let conduction = conduction_step(s, material, settings, dt).map_err(wrap(step, t))?;
    eos_sync(s, material, settings.strength);

    if let Some((field, i, j)) = s.find_non_finite() {
        return Err(wrap(step, t)(SolverError::NonFinite { field, i, j }));
    }
    let landed = t + dt >= t_next * (1.0 - LANDING_TOLERANCE) || dt >= t_next - t;
    s.t = if landed { t_next } else { t + dt };
    s.step += 1;
    let audit = before.map(|before| EnergyAudit { before, after: s.total_energy(), boundary: inflow.energy, conduction });
    Ok(StepReport { dt, inflow, conduction, plastic, audit })
}

/// Summary line for progress output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub t_max: f64,
    pub p_max: f64,
}

impl std::fmt::Display for Progress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "step={} t={:.4} dt={:.6} Tmax={:.2} pmax={:.4}",
            self.step,
            units::s_to_ps(self.t),
            units::s_to_ps(self.dt),
            self.t_max,
            units::pa_to_gpa(self.p_max)
        )
    }
}

/// Callbacks invoked while a [`Simulation`] runs.
pub trait Observer {
    /// Called at `t = 0` and at every snapshot time.
    fn snapshot(&mut self, _index: usize, _state: &SimState) {}
    /// Called after every step.
    fn step(&mut self, _report: &StepReport, _state: &SimState) {}
}

/// Observer that ignores everything.
pub struct Silent;
impl Observer for Silent {}

/// A configured run of the reverse-ballistic problem.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: RunConfig,
    pub material: Material,
    pub state: SimState,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let material = Material::new(config.material);
        let state = initialize_reverse_ballistic(&config, &material)?;
        Ok(Self { config, material, state })
    }

    pub fn step_to(&mut self, t_next: f64) -> Result<StepReport, SolverError> {
        advance(&mut self.state, &self.material, &self.config.solver, t_next)
    }

    /// Run to the final snapshot, reporting each snapshot and step.
    pub fn run(&mut self, observer: &mut impl Observer) -> Result<(), SolverError> {
        let out = self.config.output;
        observer.snapshot(0, &self.state);
        for index in 1..=out.n_snapshots {
            let t_next = index as f64 * out.snapshot_dt;
            while self.state.t < t_next {
                let report = self.step_to(t_next)?;
                observer.step(&report, &self.state);
            }
            observer.snapshot(index, &self.state);
        }
        Ok(())
    }

    pub fn progress(&self, dt: f64) -> Progress {
        Progress {
            step: self.state.step,
            t: self.state.t,
            dt,
            t_max: self.state.temperature.max(),
            p_max: self.state.p.max(),
        }
    }
}

#[cfg(test)]
mod tests;
