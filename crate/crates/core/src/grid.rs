//! Uniform 2D cell-centred fields, per-side ghost-cell padding and the
//! finite-difference stencils shared by the solver and the analysis code.
//!
//! Storage is row-major with `x` varying fastest: cell `(i, j)` lives at
//! `data[j * nx + i]`, `i` along x and `j` along y.

use std::ops::{Index, IndexMut};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("field shape {got:?} does not match {expected:?}")]
    ShapeMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("padding width {width} too large for {mode:?} on an axis with {cells} cells")]
    PadTooWide { width: usize, cells: usize, mode: PadMode },
    #[error("padding width must be at least 1")]
    ZeroPadWidth,
    #[error("non-finite value in integration stage {stage}")]
    NonFiniteStage { stage: usize },
    #[error("time step must be finite and positive, got {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    nx: usize,
    ny: usize,
    dx: f64,
    origin: (f64, f64),
    data: Vec<f64>,
}

impl Field2D {
    pub fn new(nx: usize, ny: usize, dx: f64) -> Result<Self, GridError> {
        Self::filled(nx, ny, dx, 0.0)
    }

    pub fn filled(nx: usize, ny: usize, dx: f64, value: f64) -> Result<Self, GridError> {
        if nx == 0 || ny == 0 {
            return Err(GridError::InvalidGrid(format!("{nx}x{ny} has no cells")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(GridError::InvalidGrid(format!("cell size {dx} must be positive")));
        }
        Ok(Self { nx, ny, dx, origin: (0.0, 0.0), data: vec![value; nx * ny] })
    }

    pub fn from_vec(nx: usize, ny: usize, dx: f64, data: Vec<f64>) -> Result<Self, GridError> {
        let mut f = Self::new(nx, ny, dx)?;
        if data.len() != nx * ny {
            return Err(GridError::InvalidGrid(format!("{} values for a {nx}x{ny} grid", data.len())));
        }
        f.data = data;
        Ok(f)
    }

    /// Field of the same layout filled with `value`.
    pub fn like(other: &Field2D, value: f64) -> Self {
        Self { data: vec![value; other.data.len()], ..other.clone() }
    }

    pub fn from_fn(nx: usize, ny: usize, dx: f64, f: impl Fn(usize, usize) -> f64) -> Result<Self, GridError> {
        let mut field = Self::new(nx, ny, dx)?;
        for j in 0..ny {
            for i in 0..nx {
                field.data[j * nx + i] = f(i, j);
            }
        }
        Ok(field)
    }

    pub fn with_origin(mut self, x0: f64, y0: f64) -> Self {
        self.origin = (x0, y0);
        self
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }
    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
    pub fn len(&self) -> usize {
        self.data.len()
    }
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Physical centre of cell `(i, j)`.
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (self.origin.0 + i as f64 * self.dx, self.origin.1 + j as f64 * self.dx)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nx + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[j * self.nx + i] = value;
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.nx..(j + 1) * self.nx]
    }

    pub fn fill(&mut self, value: f64) {
        self.data.iter_mut().for_each(|v| *v = value);
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { data: self.data.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    pub fn zip_map(&self, other: &Field2D, f: impl Fn(f64, f64) -> f64) -> Result<Self, GridError> {
        self.check_same_shape(other)?;
        Ok(Self { data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(), ..self.clone() })
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// First non-finite value, as `(i, j, value)`.
    pub fn find_non_finite(&self) -> Option<(usize, usize, f64)> {
        self.data.iter().position(|v| !v.is_finite()).map(|k| (k % self.nx, k / self.nx, self.data[k]))
    }

    pub fn check_same_shape(&self, other: &Field2D) -> Result<(), GridError> {
        if self.shape() != other.shape() {
            return Err(GridError::ShapeMismatch { expected: self.shape(), got: other.shape() });
        }
        Ok(())
    }

    /// Interior block of a padded field (inverse of [`pad`] with the same width).
    pub fn crop(&self, width: usize) -> Result<Field2D, GridError> {
        if 2 * width >= self.nx || 2 * width >= self.ny {
            return Err(GridError::InvalidGrid(format!("cannot crop {width} cells from {}x{}", self.nx, self.ny)));
        }
        let nx = self.nx - 2 * width;
        let ny = self.ny - 2 * width;
        let out = Field2D::from_fn(nx, ny, self.dx, |i, j| self.get(i + width, j + width))?;
        Ok(out.with_origin(self.origin.0 + width as f64 * self.dx, self.origin.1 + width as f64 * self.dx))
    }
}

impl Index<(usize, usize)> for Field2D {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.nx + i]
    }
}

impl IndexMut<(usize, usize)> for Field2D {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.nx + i]
    }
}

/// Ghost-cell fill rule for one side of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PadMode {
    /// Dirichlet-style fill with a fixed value.
    Constant(f64),
    /// Copy of the edge cell: zero one-sided gradient.
    Replicate,
    /// Mirror about the edge cell, excluding it: zero centred gradient.
    Reflect,
    /// Periodic wrap.
    Circular,
}

/// One [`PadMode`] per domain side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    /// x = min
    pub west: PadMode,
    /// x = max
    pub east: PadMode,
    /// y = min
    pub south: PadMode,
    /// y = max
    pub north: PadMode,
}

impl Sides {
    pub fn all(mode: PadMode) -> Self {
        Self { west: mode, east: mode, south: mode, north: mode }
    }
}

impl Default for Sides {
    fn default() -> Self {
        Self::all(PadMode::Replicate)
    }
}

fn ghost_index(k: isize, n: usize, mode: PadMode) -> Option<usize> {
    let n = n as isize;
    if (0..n).contains(&k) {
        return Some(k as usize);
    }
    match mode {
        PadMode::Constant(_) => None,
        PadMode::Replicate => Some(k.clamp(0, n - 1) as usize),
        PadMode::Reflect => Some(if k < 0 { -k } else { 2 * (n - 1) - k } as usize),
        PadMode::Circular => Some(k.rem_euclid(n) as usize),
    }
}

fn check_pad_width(width: usize, cells: usize, mode: PadMode) -> Result<(), GridError> {
    let ok = match mode {
        PadMode::Constant(_) | PadMode::Replicate => true,
        PadMode::Reflect => width < cells,
        PadMode::Circular => width <= cells,
    };
    if ok {
        Ok(())
    } else {
        Err(GridError::PadTooWide { width, cells, mode })
    }
}

/// Surround `f` with `width` ghost cells, each side filled by its own mode.
///
/// The x sides are filled first; the y sides then operate on the x-padded
/// rows, which fixes the corner values.
pub fn pad(f: &Field2D, width: usize, sides: &Sides) -> Result<Field2D, GridError> {
    if width == 0 {
        return Err(GridError::ZeroPadWidth);
    }
    check_pad_width(width, f.nx, sides.west)?;
    check_pad_width(width, f.nx, sides.east)?;
    check_pad_width(width, f.ny, sides.south)?;
    check_pad_width(width, f.ny, sides.north)?;

    let w = width as isize;
    let nxp = f.nx + 2 * width;
    let nyp = f.ny + 2 * width;
    let mut out = Field2D::new(nxp, nyp, f.dx)?.with_origin(f.origin.0 - width as f64 * f.dx, f.origin.1 - width as f64 * f.dx);

    let x_value = |i: isize, j: usize| -> f64 {
        let mode = if i < 0 { sides.west } else { sides.east };
        match ghost_index(i, f.nx, mode) {
            Some(ii) => f.get(ii, j),
            None => match mode {
                PadMode::Constant(c) => c,
                _ => unreachable!(),
            },
        }
    };
    for jp in 0..nyp {
        let j = jp as isize - w;
        let mode = if j < 0 { sides.south } else { sides.north };
        let src_row = ghost_index(j, f.ny, mode);
        for ip in 0..nxp {
            let i = ip as isize - w;
            let value = match (src_row, mode) {
                (Some(jj), _) => x_value(i, jj),
                (None, PadMode::Constant(c)) => c,
                (None, _) => unreachable!(),
            };
            out.set(ip, jp, value);
        }
    }
    Ok(out)
}

/// Advection tendency `-(u ∂q/∂x + v ∂q/∂y)` with first-order upwinding and
/// zero-gradient ghosts on every side.
pub fn upwind_advect(q: &Field2D, u: &Field2D, v: &Field2D) -> Result<Field2D, GridError> {
    upwind_advect_with(q, u, v, &Sides::default())
}

/// [`upwind_advect`] with explicit ghost-cell modes.
///
/// Backward differences where the velocity is positive, forward where it is
/// negative and the centred average where it is exactly zero.
pub fn upwind_advect_with(q: &Field2D, u: &Field2D, v: &Field2D, sides: &Sides) -> Result<Field2D, GridError> {
    q.check_same_shape(u)?;
    q.check_same_shape(v)?;
    let g = pad(q, 1, sides)?;
    let (nx, ny) = q.shape();
    let inv_dx = 1.0 / q.dx;
    let mut out = Field2D::like(q, 0.0);
    for j in 0..ny {
        for i in 0..nx {
            let c = g.get(i + 1, j + 1);
            let dqx = upwind_difference(u.get(i, j), g.get(i, j + 1), c, g.get(i + 2, j + 1));
            let dqy = upwind_difference(v.get(i, j), g.get(i + 1, j), c, g.get(i + 1, j + 2));
            out.set(i, j, -(u.get(i, j) * dqx + v.get(i, j) * dqy) * inv_dx);
        }
    }
    Ok(out)
}

#[inline]
fn upwind_difference(vel: f64, minus: f64, center: f64, plus: f64) -> f64 {
    if vel > 0.0 {
        center - minus
    } else if vel < 0.0 {
        plus - center
    } else {
        0.5 * (plus - minus)
    }
}

/// Derivative of a 1D sequence at index `k`: centred in the interior,
/// one-sided second order at the ends.
#[inline]
fn derivative_1d(values: impl Fn(usize) -> f64, n: usize, k: usize, inv_dx: f64) -> f64 {
    match n {
        1 => 0.0,
        2 => (values(1) - values(0)) * inv_dx,
        _ => {
            if k == 0 {
                (-3.0 * values(0) + 4.0 * values(1) - values(2)) * 0.5 * inv_dx
            } else if k == n - 1 {
                (3.0 * values(n - 1) - 4.0 * values(n - 2) + values(n - 3)) * 0.5 * inv_dx
            } else {
                (values(k + 1) - values(k - 1)) * 0.5 * inv_dx
            }
        }
    }
}

/// `(∂f/∂x, ∂f/∂y)`.
pub fn gradient(f: &Field2D) -> (Field2D, Field2D) {
    let (nx, ny) = f.shape();
    let inv_dx = 1.0 / f.dx;
    let mut gx = Field2D::like(f, 0.0);
    let mut gy = Field2D::like(f, 0.0);
    for j in 0..ny {
        for i in 0..nx {
            gx.set(i, j, derivative_1d(|k| f.get(k, j), nx, i, inv_dx));
            gy.set(i, j, derivative_1d(|k| f.get(i, k), ny, j, inv_dx));
        }
    }
    (gx, gy)
}

/// `∂fx/∂x + ∂fy/∂y` with the same stencils as [`gradient`].
pub fn divergence(fx: &Field2D, fy: &Field2D) -> Result<Field2D, GridError> {
    fx.check_same_shape(fy)?;
    let (nx, ny) = fx.shape();
    let inv_dx = 1.0 / fx.dx;
    let mut out = Field2D::like(fx, 0.0);
    for j in 0..ny {
        for i in 0..nx {
            let ddx = derivative_1d(|k| fx.get(k, j), nx, i, inv_dx);
            let ddy = derivative_1d(|k| fy.get(i, k), ny, j, inv_dx);
            out.set(i, j, ddx + ddy);
        }
    }
    Ok(out)
}

/// `∇·∇f`, composed from [`gradient`] and [`divergence`].
pub fn laplacian(f: &Field2D) -> Field2D {
    let (gx, gy) = gradient(f);
    divergence(&gx, &gy).expect("gradient components share a shape")
}

/// State types that RK4 can combine linearly.
pub trait VectorSpace: Clone {
    /// `self + scale * other`
    fn add_scaled(&self, other: &Self, scale: f64) -> Self;
    fn all_finite(&self) -> bool;
}

impl VectorSpace for f64 {
    fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        self + scale * other
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl VectorSpace for Vec<f64> {
    fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        self.iter().zip(other).map(|(a, b)| a + scale * b).collect()
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl VectorSpace for Field2D {
    fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        Self { data: self.data.add_scaled(&other.data, scale), ..self.clone() }
    }
    fn all_finite(&self) -> bool {
        self.data.all_finite()
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_integrate<S, F>(state: &S, mut rhs: F, dt: f64) -> Result<S, GridError>
where
    S: VectorSpace,
    F: FnMut(&S) -> S,
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(GridError::InvalidStep(dt));
    }
    let checked = |s: S, stage: usize| if s.all_finite() { Ok(s) } else { Err(GridError::NonFiniteStage { stage }) };
    let k1 = checked(rhs(state), 1)?;
    let k2 = checked(rhs(&state.add_scaled(&k1, 0.5 * dt)), 2)?;
    let k3 = checked(rhs(&state.add_scaled(&k2, 0.5 * dt)), 3)?;
    let k4 = checked(rhs(&state.add_scaled(&k3, dt)), 4)?;
    let out = state
        .add_scaled(&k1, dt / 6.0)
        .add_scaled(&k2, dt / 3.0)
        .add_scaled(&k3, dt / 3.0)
        .add_scaled(&k4, dt / 6.0);
    checked(out, 5)
}
