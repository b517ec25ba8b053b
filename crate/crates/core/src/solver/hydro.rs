//! Finite-volume update of mass, momentum and total energy.
//!
//! Faces between two material cells use a local Lax–Friedrichs (Rusanov)
//! flux whose physical part carries pressure and deviatoric stress. Faces
//! touching vacuum carry only donor-cell transport at the mass-weighted face
//! velocity, with zero traction (free surface). The volume fraction follows
//! from the transported mass.

use crate::grid::{upwind_advect_with, Field2D, PadMode, Sides};

use super::config::{Boundary, SolverSettings};
use super::state::{Material, SimState, MU_VACUUM};
use super::SolverError;

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CellState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
    pub e: f64,
    pub energy: f64,
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
    pub c: f64,
    pub material: bool,
    pub massive: bool,
}

impl CellState {
    fn from_state(s: &SimState, k: usize, empty: f64) -> Self {
        let rho = s.rho.data()[k];
        let mu = s.mu.data()[k];
        let massive = rho > empty;
        let (u, v) = s.velocity_at(k, empty);
        let material = massive && mu >= MU_VACUUM;
        let energy = s.energy.data()[k];
        let e = if massive { energy / rho - 0.5 * (u * u + v * v) } else { 0.0 };
        Self {
            rho,
            u,
            v,
            p: s.p.data()[k],
            e,
            energy,
            sxx: s.sxx.data()[k],
            syy: s.syy.data()[k],
            sxy: s.sxy.data()[k],
            c: s.sound_speed.data()[k],
            material,
            massive,
        }
    }

    /// Mirror image across a wall normal to x.
    fn mirrored_x(mut self) -> Self {
        self.u = -self.u;
        self.sxy = -self.sxy;
        self
    }

    fn mirrored_y(mut self) -> Self {
        self.v = -self.v;
        self.sxy = -self.sxy;
        self
    }

    /// Exchange the roles of x and y so a y-face can reuse the x-face flux.
    fn transposed(mut self) -> Self {
        std::mem::swap(&mut self.u, &mut self.v);
        std::mem::swap(&mut self.sxx, &mut self.syy);
        self
    }
}

/// Conserved-variable flux through one face, per unit face area.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Flux {
    pub mass: f64,
    pub mom_n: f64,
    pub mom_t: f64,
    pub energy: f64,
}

/// Physical x-direction flux of a material state.
#[inline]
fn physical_flux(s: &CellState) -> [f64; 4] {
    [
        s.rho * s.u,
        s.rho * s.u * s.u + s.p - s.sxx,
        s.rho * s.u * s.v - s.sxy,
        (s.energy + s.p) * s.u - (s.sxx * s.u + s.sxy * s.v),
    ]
}

#[inline]
fn conserved(s: &CellState) -> [f64; 4] {
    [s.rho, s.rho * s.u, s.rho * s.v, s.energy]
}

/// Local Lax–Friedrichs flux in the x direction.
pub(crate) fn rusanov(l: &CellState, r: &CellState) -> Flux {
    let fl = physical_flux(l);
    let fr = physical_flux(r);
    let ul = conserved(l);
    let ur = conserved(r);
    let a = (l.u.abs() + l.c).max(r.u.abs() + r.c);
    let f = |k: usize| 0.5 * (fl[k] + fr[k]) - 0.5 * a * (ur[k] - ul[k]);
    Flux { mass: f(0), mom_n: f(1), mom_t: f(2), energy: f(3) }
}

/// Traction-free donor-cell transport across a face touching vacuum.
pub(crate) fn free_surface(l: &CellState, r: &CellState) -> Flux {
    let ml = if l.massive { l.rho } else { 0.0 };
    let mr = if r.massive { r.rho } else { 0.0 };
    if ml + mr <= 0.0 {
        return Flux::default();
    }
    let w = (ml * l.u + mr * r.u) / (ml + mr);
    let donor = if w > 0.0 { l } else { r };
    if w == 0.0 || !donor.massive {
        return Flux::default();
    }
    Flux {
        mass: donor.rho * w,
        mom_n: donor.rho * donor.u * w,
        mom_t: donor.rho * donor.v * w,
        energy: donor.energy * w,
    }
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Face values from minmod-limited linear reconstruction: `(left, right)`.
fn reconstruct(ll: &CellState, l: &CellState, r: &CellState, rr: &CellState) -> (CellState, CellState) {
    let lim = |a: f64, b: f64, c: f64| 0.5 * minmod(b - a, c - b);
    let mut fl = *l;
    let mut fr = *r;
    macro_rules! rec {
        ($($f:ident),*) => {$(
            fl.$f = l.$f + lim(ll.$f, l.$f, r.$f);
            fr.$f = r.$f - lim(l.$f, r.$f, rr.$f);
        )*};
    }
    rec!(rho, u, v, p, e, sxx, syy, sxy);
    if fl.rho <= 0.0 || fr.rho <= 0.0 {
        return (*l, *r);
    }
    fl.energy = fl.rho * (fl.e + 0.5 * (fl.u * fl.u + fl.v * fl.v));
    fr.energy = fr.rho * (fr.e + 0.5 * (fr.u * fr.u + fr.v * fr.v));
    (fl, fr)
}

/// Flux through an x-normal face given the two cells on each side.
fn face_flux(ll: &CellState, l: &CellState, r: &CellState, rr: &CellState, second_order: bool) -> Flux {
    if l.material && r.material {
        if second_order && ll.material && rr.material {
            let (fl, fr) = reconstruct(ll, l, r, rr);
            let mut flux = rusanov(&fl, &fr);
            // keep the dissipation speed of the cell averages
            let a_cells = (l.u.abs() + l.c).max(r.u.abs() + r.c);
            let a_faces = (fl.u.abs() + fl.c).max(fr.u.abs() + fr.c);
            if a_cells > a_faces {
                let extra = 0.5 * (a_cells - a_faces);
                let (ul, ur) = (conserved(&fl), conserved(&fr));
                flux.mass -= extra * (ur[0] - ul[0]);
                flux.mom_n -= extra * (ur[1] - ul[1]);
                flux.mom_t -= extra * (ur[2] - ul[2]);
                flux.energy -= extra * (ur[3] - ul[3]);
            }
            flux
        } else {
            rusanov(l, r)
        }
    } else if l.massive || r.massive {
        free_surface(l, r)
    } else {
        Flux::default()
    }
}

/// Ghost-cell aware access to the cell states of one step.
struct Padded {
    nx: usize,
    ny: usize,
    cells: Vec<CellState>,
    bounds: [Boundary; 4],
}

impl Padded {
    fn new(s: &SimState, material: &Material, settings: &SolverSettings) -> Self {
        let empty = material.empty_density();
        let cells = (0..s.len()).map(|k| CellState::from_state(s, k, empty)).collect();
        Self {
            nx: s.nx(),
            ny: s.ny(),
            cells,
            bounds: [settings.boundary_west, settings.boundary_east, settings.boundary_south, settings.boundary_north],
        }
    }

    /// Cell `i` of row `j`, with ghosts for `i` outside `[0, nx)`.
    fn along_x(&self, i: isize, j: usize) -> CellState {
        let n = self.nx as isize;
        let row = &self.cells[j * self.nx..(j + 1) * self.nx];
        if (0..n).contains(&i) {
            return row[i as usize];
        }
        let side = if i < 0 { self.bounds[0] } else { self.bounds[1] };
        match side {
            Boundary::Periodic => row[i.rem_euclid(n) as usize],
            Boundary::ZeroGradient => row[i.clamp(0, n - 1) as usize],
            Boundary::Outflow => {
                let edge = row[i.clamp(0, n - 1) as usize];
                let inward = if i < 0 { edge.u > 0.0 } else { edge.u < 0.0 };
                if inward { edge.mirrored_x() } else { edge }
            }
            Boundary::Wall => {
                let m = if i < 0 { -i - 1 } else { 2 * n - 1 - i };
                row[m.clamp(0, n - 1) as usize].mirrored_x()
            }
        }
    }

    fn along_y(&self, i: usize, j: isize) -> CellState {
        let n = self.ny as isize;
        let at = |jj: isize| self.cells[jj as usize * self.nx + i];
        if (0..n).contains(&j) {
            return at(j);
        }
        let side = if j < 0 { self.bounds[2] } else { self.bounds[3] };
        match side {
            Boundary::Periodic => at(j.rem_euclid(n)),
            Boundary::ZeroGradient => at(j.clamp(0, n - 1)),
            Boundary::Outflow => {
                let edge = at(j.clamp(0, n - 1));
                let inward = if j < 0 { edge.v > 0.0 } else { edge.v < 0.0 };
                if inward { edge.mirrored_y() } else { edge }
            }
            Boundary::Wall => {
                let m = if j < 0 { -j - 1 } else { 2 * n - 1 - j };
                at(m.clamp(0, n - 1)).mirrored_y()
            }
        }
    }
}

/// Net transport through the domain boundary during one hyperbolic step,
/// per unit depth.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundaryInflow {
    pub mass: f64,
    pub energy: f64,
}

pub(crate) fn pad_modes(settings: &SolverSettings) -> Sides {
    let mode = |b: Boundary| match b {
        Boundary::Periodic => PadMode::Circular,
        Boundary::Wall | Boundary::ZeroGradient | Boundary::Outflow => PadMode::Replicate,
    };
    Sides {
        west: mode(settings.boundary_west),
        east: mode(settings.boundary_east),
        south: mode(settings.boundary_south),
        north: mode(settings.boundary_north),
    }
}

/// Conservative update of (ρ, ρu, ρv, ρE), donor-cell transport of the volume
/// fraction and upwind transport of the deviatoric stress and plastic
/// history. Derived caches are left stale.
pub fn hyperbolic_step(
    s: &mut SimState,
    material: &Material,
    settings: &SolverSettings,
    dt: f64,
) -> Result<BoundaryInflow, SolverError> {
    let (nx, ny) = (s.nx(), s.ny());
    let dx = s.dx();
    let lambda = dt / dx;
    let cells = Padded::new(s, material, settings);
    let second = settings.second_order;

    // x faces: face f of row j sits between cells f-1 and f
    let mut fx = vec![Flux::default(); (nx + 1) * ny];
    for j in 0..ny {
        for f in 0..=nx {
            let f_i = f as isize;
            fx[j * (nx + 1) + f] = face_flux(
                &cells.along_x(f_i - 2, j),
                &cells.along_x(f_i - 1, j),
                &cells.along_x(f_i, j),
                &cells.along_x(f_i + 1, j),
                second,
            );
        }
    }
    // y faces: face f of column i sits between cells f-1 and f; computed in
    // the transposed frame, so mom_n is y-momentum and mom_t is x-momentum
    let mut fy = vec![Flux::default(); nx * (ny + 1)];
    for f in 0..=ny {
        let f_j = f as isize;
        for i in 0..nx {
            fy[f * nx + i] = face_flux(
                &cells.along_y(i, f_j - 2).transposed(),
                &cells.along_y(i, f_j - 1).transposed(),
                &cells.along_y(i, f_j).transposed(),
                &cells.along_y(i, f_j + 1).transposed(),
                second,
            );
        }
    }

    let mut inflow = BoundaryInflow::default();
    for j in 0..ny {
        let (w, e) = (&fx[j * (nx + 1)], &fx[j * (nx + 1) + nx]);
        inflow.mass += w.mass - e.mass;
        inflow.energy += w.energy - e.energy;
    }
    for i in 0..nx {
        let (so, no) = (&fy[i], &fy[ny * nx + i]);
        inflow.mass += so.mass - no.mass;
        inflow.energy += so.energy - no.energy;
    }
    inflow.mass *= dt * dx;
    inflow.energy *= dt * dx;

    let (u, v) = s.velocities(material);
    let sides = pad_modes(settings);
    let advect = |q: &Field2D| -> Result<Field2D, SolverError> {
        let rate = upwind_advect_with(q, &u, &v, &sides)?;
        Ok(q.zip_map(&rate, |a, r| a + dt * r)?)
    };
    let sxx = advect(&s.sxx)?;
    let syy = advect(&s.syy)?;
    let sxy = advect(&s.sxy)?;
    let eps_pl = advect(&s.eps_pl)?;
    let eps_rate = advect(&s.eps_rate)?;
    let e_el = advect(&s.e_el)?;
    let e_cpl = advect(&s.e_cpl)?;

    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let (w, e) = (&fx[j * (nx + 1) + i], &fx[j * (nx + 1) + i + 1]);
            let (so, no) = (&fy[j * nx + i], &fy[(j + 1) * nx + i]);
            let dmass = (e.mass - w.mass) + (no.mass - so.mass);
            let dmx = (e.mom_n - w.mom_n) + (no.mom_t - so.mom_t);
            let dmy = (e.mom_t - w.mom_t) + (no.mom_n - so.mom_n);
            let den = (e.energy - w.energy) + (no.energy - so.energy);
            s.rho.data_mut()[k] -= lambda * dmass;
            s.mom_x.data_mut()[k] -= lambda * dmx;
            s.mom_y.data_mut()[k] -= lambda * dmy;
            s.energy.data_mut()[k] -= lambda * den;
        }
    }

    if let Some(k) = s.rho.data().iter().position(|&r| r < 0.0 || !r.is_finite()) {
        return Err(SolverError::NegativeDensity { i: k % nx, j: k / nx, value: s.rho.data()[k], t: s.t });
    }

    s.sxx = sxx;
    s.syy = syy;
    s.sxy = sxy;
    s.eps_pl = eps_pl;
    s.eps_rate = eps_rate;
    s.e_el = e_el;
    s.e_cpl = e_cpl;
    update_volume_fraction(s, material.model.rho0);
    enforce_vacuum_stress(s);
    Ok(inflow)
}

/// Volume fraction from the mass in each cell: material is never stored
/// below its reference density, so a cell holding less mass than a full
/// cell at `rho0` is partly void.
pub(crate) fn update_volume_fraction(s: &mut SimState, rho0: f64) {
    for (mu, rho) in s.mu.data_mut().iter_mut().zip(s.rho.data()) {
        *mu = (rho / rho0).clamp(0.0, 1.0);
    }
}

/// Zero the deviatoric stress in vacuum cells.
pub(crate) fn enforce_vacuum_stress(s: &mut SimState) {
    for k in 0..s.len() {
        if !s.is_material(k) {
            s.sxx.data_mut()[k] = 0.0;
            s.syy.data_mut()[k] = 0.0;
            s.sxy.data_mut()[k] = 0.0;
        }
    }
}
