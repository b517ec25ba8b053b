//! Evaluation metrics on snapshot series: roll-out RMSE, distribution
//! functions, pore-collapse time, shear-band profiles, spectra, Haar
//! detail energy, Lp errors and shock-speed measurement.

use std::fmt;
use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::dataset::{Channel, SnapshotSeries};
use crate::grid::Field2D;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn domain(msg: impl Into<String>) -> AnalysisError {
    AnalysisError::Domain(msg.into())
}

fn same_shape(a: &Field2D, b: &Field2D) -> Result<(), AnalysisError> {
    if a.shape() != b.shape() {
        return Err(AnalysisError::Shape(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

fn compatible(pred: &SnapshotSeries, truth: &SnapshotSeries) -> Result<(), AnalysisError> {
    pred.check_compatible(truth).map_err(|e| AnalysisError::Shape(e.to_string()))
}

/// Per-channel root-mean-square error over every frame and cell, in
/// physical units.
pub fn rollout_rmse(pred: &SnapshotSeries, truth: &SnapshotSeries) -> Result<[(Channel, f64); 5], AnalysisError> {
    compatible(pred, truth)?;
    if truth.n_frames() == 0 {
        return Err(domain("series have no frames"));
    }
    let count = (truth.n_frames() * truth.cells()) as f64;
    Ok(Channel::ALL.map(|ch| {
        let sum: f64 = (0..truth.n_frames())
            .map(|f| pred.channel(f, ch).iter().zip(truth.channel(f, ch)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .sum();
        (ch, (sum / count).sqrt())
    }))
}

/// Per-channel RMSE of each frame separately.
pub fn rmse_per_frame(pred: &SnapshotSeries, truth: &SnapshotSeries) -> Result<Vec<[f64; 5]>, AnalysisError> {
    compatible(pred, truth)?;
    let n = truth.cells() as f64;
    Ok((0..truth.n_frames())
        .map(|f| {
            Channel::ALL.map(|ch| {
                let sum: f64 = pred.channel(f, ch).iter().zip(truth.channel(f, ch)).map(|(a, b)| (a - b) * (a - b)).sum();
                (sum / n).sqrt()
            })
        })
        .collect())
}

/// Equal-width histogram bins shared between compared fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinEdges {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl BinEdges {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self, AnalysisError> {
        if n == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain(format!("invalid bins [{lo}, {hi}] x {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Bins covering every value of the given samples. A degenerate range is
    /// widened symmetrically.
    pub fn spanning<'a>(samples: impl IntoIterator<Item = &'a [f64]>, n: usize) -> Result<Self, AnalysisError> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in samples {
            for &v in s {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(domain("no finite samples to bin"));
        }
        if hi == lo {
            let pad = 0.5 * lo.abs().max(1.0);
            lo -= pad;
            hi += pad;
        }
        Self::new(lo, hi, n)
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    /// Bin of `v`; the upper edge belongs to the last bin.
    pub fn index(&self, v: f64) -> Option<usize> {
        if !(v >= self.lo && v <= self.hi) {
            return None;
        }
        Some((((v - self.lo) / self.width()) as usize).min(self.n - 1))
    }

    pub fn center(&self, b: usize) -> f64 {
        self.lo + (b as f64 + 0.5) * self.width()
    }
}

/// Normalized histogram density.
#[derive(Debug, Clone, PartialEq)]
pub struct Pdf {
    pub edges: BinEdges,
    pub density: Vec<f64>,
}

impl Pdf {
    /// `Σ density · width`; 1 up to rounding.
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.edges.width()
    }

    /// Maximal runs of occupied bins.
    pub fn occupied_regions(&self) -> usize {
        let mut regions = 0;
        let mut inside = false;
        for &d in &self.density {
            if d > 0.0 && !inside {
                regions += 1;
            }
            inside = d > 0.0;
        }
        regions
    }
}

/// Histogram of one channel of one frame over fixed bins. Values outside the
/// bins are dropped before normalization.
pub fn field_pdf(series: &SnapshotSeries, channel: Channel, frame: usize, edges: &BinEdges) -> Result<Pdf, AnalysisError> {
    series.check_frame_index(frame).map_err(|e| domain(e.to_string()))?;
    let values = series.channel(frame, channel);
    if values.is_empty() {
        return Err(domain("empty frame"));
    }
    let mut counts = vec![0usize; edges.n];
    let mut total = 0usize;
    for &v in values {
        if let Some(b) = edges.index(v) {
            counts[b] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(domain("no values fall inside the bins"));
    }
    let norm = 1.0 / (total as f64 * edges.width());
    Ok(Pdf { edges: *edges, density: counts.iter().map(|&c| c as f64 * norm).collect() })
}

/// Outcome of the pore-collapse search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseTime {
    Frame(usize),
    NotCollapsed,
}

impl CollapseTime {
    pub fn frame(self) -> Option<usize> {
        match self {
            CollapseTime::Frame(f) => Some(f),
            CollapseTime::NotCollapsed => None,
        }
    }
}

impl fmt::Display for CollapseTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollapseTime::Frame(i) => write!(f, "{i}"),
            CollapseTime::NotCollapsed => f.write_str("not collapsed"),
        }
    }
}

pub const DEFAULT_COLLAPSE_FRACTION: f64 = 0.01;

/// Number of vacuum cells (μ < 0.5) in connected components that do not
/// touch the domain boundary: the pore, wherever the flow has carried it.
pub fn pore_area(series: &SnapshotSeries, frame: usize) -> usize {
    let (nx, ny) = (series.nx, series.ny);
    let mu = series.channel(frame, Channel::Mu);
    let mut seen = vec![false; nx * ny];
    let mut area = 0;
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if seen[start] || mu[start] >= 0.5 {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut size, mut touches) = (0, false);
        while let Some(k) = stack.pop() {
            size += 1;
            let (i, j) = (k % nx, k / nx);
            touches |= i == 0 || j == 0 || i + 1 == nx || j + 1 == ny;
            let mut visit = |n: usize| {
                if !seen[n] && mu[n] < 0.5 {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if i > 0 {
                visit(k - 1);
            }
            if i + 1 < nx {
                visit(k + 1);
            }
            if j > 0 {
                visit(k - nx);
            }
            if j + 1 < ny {
                visit(k + nx);
            }
        }
        if !touches {
            area += size;
        }
    }
    area
}

/// First frame whose pore area is at most `fraction` of the initial area.
pub fn pore_collapse_time(series: &SnapshotSeries, fraction: f64) -> CollapseTime {
    if series.n_frames() == 0 {
        return CollapseTime::NotCollapsed;
    }
    let initial = pore_area(series, 0);
    if initial == 0 {
        return CollapseTime::NotCollapsed;
    }
    (1..series.n_frames())
        .find(|&f| pore_area(series, f) as f64 <= fraction * initial as f64)
        .map_or(CollapseTime::NotCollapsed, CollapseTime::Frame)
}

/// Temperature samples along a vertical line, `y` in m.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub y: Vec<f64>,
    pub value: Vec<f64>,
}

/// Nearest-column temperature cut at `x` over the open interval `y_range`.
/// Samples sit at `y = j·dx`, `x` maps to column `round(x/dx)`.
pub fn vertical_cut(series: &SnapshotSeries, frame: usize, x: f64, y_range: (f64, f64)) -> Result<Profile, AnalysisError> {
    series.check_frame_index(frame).map_err(|e| domain(e.to_string()))?;
    let dx = series.dx;
    let (width, height) = (series.nx as f64 * dx, series.ny as f64 * dx);
    if !(x >= 0.0 && x < width) {
        return Err(domain(format!("x = {x:e} m outside [0, {width:e})")));
    }
    let (lo, hi) = y_range;
    if !(lo >= 0.0 && hi <= height && hi > lo) {
        return Err(domain(format!("y range ({lo:e}, {hi:e}) outside [0, {height:e}]")));
    }
    let col = ((x / dx).round() as usize).min(series.nx - 1);
    let t = series.channel(frame, Channel::Temperature);
    let (mut y, mut value) = (Vec::new(), Vec::new());
    for j in 0..series.ny {
        let yj = j as f64 * dx;
        if yj > lo && yj < hi {
            y.push(yj);
            value.push(t[j * series.nx + col]);
        }
    }
    Ok(Profile { y, value })
}

/// Dominant shear band of a temperature cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandMetrics {
    /// Peak location, m.
    pub y_peak: f64,
    /// Full width at half of the excess over background, m.
    pub width: f64,
    pub delta_t: f64,
    pub background: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandOutcome {
    Band(BandMetrics),
    /// Contrast below the threshold; carries the measured excess.
    Fail { delta_t: f64 },
}

impl BandOutcome {
    pub fn band(self) -> Option<BandMetrics> {
        match self {
            BandOutcome::Band(b) => Some(b),
            BandOutcome::Fail { .. } => None,
        }
    }
}

pub const DEFAULT_BAND_CONTRAST: f64 = 20.0;

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median background, global peak and its full width at half excess with
/// linear interpolation between samples. Fails unless the profile drops
/// below half excess on both sides of the peak inside the window.
pub fn dominant_band(profile: &Profile, min_contrast: f64) -> BandOutcome {
    let (y, t) = (&profile.y, &profile.value);
    if t.len() < 8 || y.len() != t.len() {
        return BandOutcome::Fail { delta_t: 0.0 };
    }
    let background = median(t);
    let (peak, &t_peak) = t.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    let delta_t = t_peak - background;
    if !(delta_t >= min_contrast) {
        return BandOutcome::Fail { delta_t: delta_t.max(0.0) };
    }
    let half = background + 0.5 * delta_t;
    let crossing = |a: usize, b: usize| y[a] + (half - t[a]) / (t[b] - t[a]) * (y[b] - y[a]);
    let left = (0..peak).rev().find(|&i| t[i] < half).map(|i| crossing(i, i + 1));
    let right = (peak + 1..t.len()).find(|&i| t[i] < half).map(|i| crossing(i - 1, i));
    // a peak still above half excess at the window edge is a ramp, not a band
    let (Some(left), Some(right)) = (left, right) else {
        return BandOutcome::Fail { delta_t };
    };
    BandOutcome::Band(BandMetrics { y_peak: y[peak], width: right - left, delta_t, background })
}

/// Frame whose cut has the strongest dominant band.
pub fn most_prominent_frame(
    series: &SnapshotSeries,
    x: f64,
    y_range: (f64, f64),
    min_contrast: f64,
) -> Result<Option<(usize, BandMetrics)>, AnalysisError> {
    let mut best: Option<(usize, BandMetrics)> = None;
    for f in 0..series.n_frames() {
        if let BandOutcome::Band(b) = dominant_band(&vertical_cut(series, f, x, y_range)?, min_contrast) {
            if best.is_none_or(|(_, old)| b.delta_t > old.delta_t) {
                best = Some((f, b));
            }
        }
    }
    Ok(best)
}

/// Isotropically binned power spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpectrum {
    /// Bin centres, 1/m (rad/m).
    pub k: Vec<f64>,
    pub power: Vec<f64>,
}

impl RadialSpectrum {
    pub fn bin_width(dx: f64, nx: usize, ny: usize) -> f64 {
        2.0 * std::f64::consts::PI / (nx.min(ny) as f64 * dx)
    }
}

/// Signed frequency index of DFT bin `m` of `n`.
fn signed(m: usize, n: usize) -> f64 {
    if m <= n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

pub(crate) fn radial_bin(mx: usize, my: usize, nx: usize, ny: usize, dx: f64, dk: f64) -> usize {
    let two_pi = 2.0 * std::f64::consts::PI;
    let kx = two_pi * signed(mx, nx) / (nx as f64 * dx);
    let ky = two_pi * signed(my, ny) / (ny as f64 * dx);
    ((kx * kx + ky * ky).sqrt() / dk).round() as usize
}

/// Power `|F|²/N` of the 2D DFT, summed in `|k|` bins of width `2π/(min(nx, ny)·dx)`
/// centred on multiples of the width. The total equals `Σ f²`.
pub fn radial_power_spectrum(field: &Field2D) -> RadialSpectrum {
    let (nx, ny, dx) = (field.nx(), field.ny(), field.dx());
    let mut data: Vec<Complex<f64>> = field.data().iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(nx);
    for row in data.chunks_exact_mut(nx) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(ny);
    let mut column = vec![Complex::new(0.0, 0.0); ny];
    for i in 0..nx {
        for j in 0..ny {
            column[j] = data[j * nx + i];
        }
        col_fft.process(&mut column);
        for j in 0..ny {
            data[j * nx + i] = column[j];
        }
    }
    let dk = RadialSpectrum::bin_width(dx, nx, ny);
    let n_bins = radial_bin(nx / 2, ny / 2, nx, ny, dx, dk) + 1;
    let mut power = vec![0.0; n_bins];
    let cells = (nx * ny) as f64;
    for my in 0..ny {
        for mx in 0..nx {
            power[radial_bin(mx, my, nx, ny, dx, dk)] += data[my * nx + mx].norm_sqr() / cells;
        }
    }
    RadialSpectrum { k: (0..n_bins).map(|b| b as f64 * dk).collect(), power }
}

/// Per-bin relative error of the predicted power spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumError {
    pub k: Vec<f64>,
    /// Spatial scale `2π/k`, m (infinite for the mean bin).
    pub scale: Vec<f64>,
    pub error: Vec<f64>,
}

/// Relative spectral error per `|k|` bin; bins with truth power below 1e-12
/// of the total are omitted.
pub fn spectrum_relative_error(pred: &Field2D, truth: &Field2D) -> Result<SpectrumError, AnalysisError> {
    same_shape(pred, truth)?;
    let p = radial_power_spectrum(pred);
    let t = radial_power_spectrum(truth);
    let total: f64 = t.power.iter().sum();
    let mut out = SpectrumError { k: Vec::new(), scale: Vec::new(), error: Vec::new() };
    for b in 0..t.power.len() {
        if t.power[b] < 1e-12 * total || t.power[b] <= 0.0 {
            continue;
        }
        out.k.push(t.k[b]);
        out.scale.push(if t.k[b] > 0.0 { 2.0 * std::f64::consts::PI / t.k[b] } else { f64::INFINITY });
        out.error.push((p.power[b] - t.power[b]).abs() / t.power[b]);
    }
    Ok(out)
}

/// One-level orthonormal 2D Haar detail subbands `(LH, HL, HH)`.
pub fn haar_details(field: &Field2D) -> Result<[Vec<f64>; 3], AnalysisError> {
    let (nx, ny) = field.shape();
    if nx % 2 != 0 || ny % 2 != 0 {
        return Err(domain(format!("Haar transform needs even dimensions, got {nx}x{ny}")));
    }
    let n = nx * ny / 4;
    let mut out = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for j in (0..ny).step_by(2) {
        for i in (0..nx).step_by(2) {
            let (a, b) = (field.get(i, j), field.get(i + 1, j));
            let (c, d) = (field.get(i, j + 1), field.get(i + 1, j + 1));
            out[0].push(0.5 * ((a - b) + (c - d)));
            out[1].push(0.5 * ((a + b) - (c + d)));
            out[2].push(0.5 * ((a - b) - (c - d)));
        }
    }
    Ok(out)
}

fn mean_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum::<f64>() / v.len() as f64
}

/// Sum over the three detail subbands of their mean absolute coefficient.
pub fn haar_highfreq_energy(field: &Field2D) -> Result<f64, AnalysisError> {
    Ok(haar_details(field)?.iter().map(|s| mean_abs(s)).sum())
}

/// Detail-subband mean absolute difference, summed over subbands.
pub fn haar_loss(pred: &Field2D, truth: &Field2D) -> Result<f64, AnalysisError> {
    same_shape(pred, truth)?;
    let (p, t) = (haar_details(pred)?, haar_details(truth)?);
    Ok(p.iter()
        .zip(&t)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
        .sum())
}

/// `(mean |pred − truth|^p)^(1/p)`, evaluated relative to the largest
/// difference so large `p` does not overflow.
pub fn lp_error(pred: &[f64], truth: &[f64], p: f64) -> Result<f64, AnalysisError> {
    if !(p >= 1.0) {
        return Err(domain(format!("p = {p} must be >= 1")));
    }
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(AnalysisError::Shape(format!("{} vs {} values", pred.len(), truth.len())));
    }
    let diffs: Vec<f64> = pred.iter().zip(truth).map(|(a, b)| (a - b).abs()).collect();
    let max = diffs.iter().fold(0.0f64, |m, &d| m.max(d));
    if max == 0.0 {
        return Ok(0.0);
    }
    let mean = diffs.iter().map(|d| (d / max).powf(p)).sum::<f64>() / diffs.len() as f64;
    Ok(max * mean.powf(1.0 / p))
}

/// Shock speed in the wall frame and in the material frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSpeed {
    pub uw: f64,
    pub us: f64,
    pub frames_used: usize,
}

/// Front position per frame along the centre column: the face with the
/// largest pressure jump, or `None` when the column carries no jump.
pub fn shock_front(series: &SnapshotSeries, frame: usize) -> Option<f64> {
    let col = series.nx / 2;
    let p = series.channel(frame, Channel::Pressure);
    let at = |j: usize| p[j * series.nx + col];
    let mut best = (0.0, None);
    for j in 0..series.ny.saturating_sub(1) {
        let jump = (at(j + 1) - at(j)).abs();
        if jump > best.0 {
            best = (jump, Some(j));
        }
    }
    let scale = (0..series.ny).map(at).fold(0.0f64, |m, v| m.max(v.abs()));
    match best {
        (jump, Some(j)) if jump > 0.05 * scale && j + 2 < series.ny => Some((j + 1) as f64 * series.dx),
        _ => None,
    }
}

/// Least-squares front speed from frames `frames` (all frames after the first
/// when `None`). `Us = Uw + |Up|` with `Up` taken from the series tag.
pub fn measure_shock_speed(series: &SnapshotSeries, frames: Option<std::ops::Range<usize>>) -> Result<ShockSpeed, AnalysisError> {
    let range = frames.unwrap_or(1..series.n_frames());
    let samples: Vec<(f64, f64)> = range
        .filter(|&f| f < series.n_frames())
        .filter_map(|f| shock_front(series, f).map(|y| (series.time(f), y)))
        .collect();
    if samples.len() < 3 {
        return Err(domain(format!("{} frames with a detectable front; need at least 3", samples.len())));
    }
    let n = samples.len() as f64;
    let (mt, my) = samples.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t / n, b + y / n));
    let (sxy, sxx) = samples.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt) * (t - mt)));
    if sxx <= 0.0 {
        return Err(domain("front samples share one time"));
    }
    let uw = sxy / sxx;
    Ok(ShockSpeed { uw, us: uw + series.v0.abs(), frames_used: samples.len() })
}

/// Maximum temperature of every frame.
pub fn max_temperature(series: &SnapshotSeries) -> Vec<f64> {
    (0..series.n_frames())
        .map(|f| series.channel(f, Channel::Temperature).iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)))
        .collect()
}

/// Delimited text table: one header line, then rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), AnalysisError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)
                .map_err(|source| AnalysisError::Io { path: parent.display().to_string(), source })?;
        }
        std::fs::write(path, self.to_string())
            .map_err(|source| AnalysisError::Io { path: path.display().to_string(), source })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `<metric>_v<v0>[_f<frame>].csv`
pub fn report_file_name(metric: &str, v0: f64, frame: Option<usize>) -> String {
    match frame {
        Some(f) => format!("{metric}_v{v0}_f{f}.csv"),
        None => format!("{metric}_v{v0}.csv"),
    }
}

pub fn rmse_report(rmse: &[(Channel, f64); 5]) -> Report {
    let mut r = Report::new(&["channel", "unit", "rmse"]);
    for (ch, v) in rmse {
        r.push(vec![ch.name().into(), ch.unit().into(), format!("{v:e}")]);
    }
    r
}

pub fn pdf_report(pdf: &Pdf) -> Report {
    let mut r = Report::new(&["bin_lo", "bin_hi", "density"]);
    let w = pdf.edges.width();
    for (b, d) in pdf.density.iter().enumerate() {
        let lo = pdf.edges.lo + b as f64 * w;
        r.push(vec![format!("{lo:e}"), format!("{:e}", lo + w), format!("{d:e}")]);
    }
    r
}

pub fn profile_report(profile: &Profile) -> Report {
    let mut r = Report::new(&["y_nm", "T_K"]);
    for (y, t) in profile.y.iter().zip(&profile.value) {
        r.push(vec![format!("{}", y * 1e9), format!("{t}")]);
    }
    r
}

pub fn band_report(frame: usize, outcome: &BandOutcome) -> Report {
    let mut r = Report::new(&["frame", "y_peak_nm", "width_nm", "deltaT_K", "background_K", "status"]);
    match outcome {
        BandOutcome::Band(b) => r.push(vec![
            frame.to_string(),
            format!("{}", b.y_peak * 1e9),
            format!("{}", b.width * 1e9),
            format!("{}", b.delta_t),
            format!("{}", b.background),
            "ok".into(),
        ]),
        BandOutcome::Fail { delta_t } => {
            r.push(vec![frame.to_string(), String::new(), String::new(), format!("{delta_t}"), String::new(), "Fail".into()])
        }
    }
    r
}

pub fn spectrum_report(err: &SpectrumError) -> Report {
    let mut r = Report::new(&["k_per_m", "scale_nm", "relative_error"]);
    for ((k, s), e) in err.k.iter().zip(&err.scale).zip(&err.error) {
        r.push(vec![format!("{k:e}"), format!("{}", s * 1e9), format!("{e:e}")]);
    }
    r
}
