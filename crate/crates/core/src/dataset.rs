//! Snapshot series, normalization, velocity splits and the `SHRB` container.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::grid::Field2D;
use crate::solver::{Material, Observer, SimState};

pub const MAGIC: [u8; 4] = *b"SHRB";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 128;
pub const N_CHANNELS: usize = 5;
const NAME_BYTES: usize = 16;

/// Default seed of the train/validation shuffle.
pub const DEFAULT_SPLIT_SEED: u64 = 20250;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("format error at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    Domain(String),
}

fn format_error(offset: usize, reason: impl Into<String>) -> DatasetError {
    DatasetError::Format { offset, reason: reason.into() }
}

/// Output channels in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Temperature,
    Pressure,
    Mu,
    U,
    V,
}

impl Channel {
    pub const ALL: [Channel; N_CHANNELS] = [Channel::Temperature, Channel::Pressure, Channel::Mu, Channel::U, Channel::V];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Temperature => "T",
            Channel::Pressure => "p",
            Channel::Mu => "mu",
            Channel::U => "U",
            Channel::V => "V",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Channel::Temperature => "K",
            Channel::Pressure => "Pa",
            Channel::Mu => "1",
            Channel::U | Channel::V => "m/s",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T" | "temperature" => Ok(Channel::Temperature),
            "p" | "P" | "pressure" => Ok(Channel::Pressure),
            "mu" | "microstructure" => Ok(Channel::Mu),
            "U" | "u" => Ok(Channel::U),
            "V" | "v" => Ok(Channel::V),
            other => Err(DatasetError::Domain(format!("unknown channel {other:?}; expected T, p, mu, U or V"))),
        }
    }
}

/// Time-ordered frames of the five output channels on one grid.
///
/// Values are kept as `f64` but [`SnapshotSeries::push_frame`] rounds them
/// through `f32`, so a recorded series survives the container unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    pub nx: usize,
    pub ny: usize,
    /// Cell size, m.
    pub dx: f64,
    /// Frame spacing, s.
    pub dt_snap: f64,
    /// Impact velocity tag, m/s.
    pub v0: f64,
    frames: Vec<Vec<f64>>,
}

impl SnapshotSeries {
    pub fn new(nx: usize, ny: usize, dx: f64, dt_snap: f64, v0: f64) -> Self {
        Self { nx, ny, dx, dt_snap, v0, frames: Vec::new() }
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn frame_len(&self) -> usize {
        N_CHANNELS * self.cells()
    }

    pub fn n_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn time(&self, frame: usize) -> f64 {
        frame as f64 * self.dt_snap
    }

    /// Append a channel-major frame, rounding every value to `f32` precision.
    pub fn push_frame(&mut self, mut frame: Vec<f64>) -> Result<(), DatasetError> {
        if frame.len() != self.frame_len() {
            return Err(DatasetError::Shape(format!("frame has {} values, expected {}", frame.len(), self.frame_len())));
        }
        for v in frame.iter_mut() {
            *v = *v as f32 as f64;
        }
        self.frames.push(frame);
        Ok(())
    }

    /// Append a frame without rounding; used for derived (e.g. normalized) series.
    fn push_exact(&mut self, frame: Vec<f64>) {
        debug_assert_eq!(frame.len(), self.frame_len());
        self.frames.push(frame);
    }

    pub fn channel(&self, frame: usize, channel: Channel) -> &[f64] {
        let n = self.cells();
        &self.frames[frame][channel.index() * n..(channel.index() + 1) * n]
    }

    pub fn channel_mut(&mut self, frame: usize, channel: Channel) -> &mut [f64] {
        let n = self.cells();
        &mut self.frames[frame][channel.index() * n..(channel.index() + 1) * n]
    }

    /// One channel of one frame as a field with cell-centred origin.
    pub fn field(&self, frame: usize, channel: Channel) -> Field2D {
        Field2D::from_vec(self.nx, self.ny, self.dx, self.channel(frame, channel).to_vec())
            .expect("series shape is valid")
            .with_origin(0.5 * self.dx, 0.5 * self.dx)
    }

    pub fn check_frame_index(&self, frame: usize) -> Result<(), DatasetError> {
        if frame < self.n_frames() {
            Ok(())
        } else {
            Err(DatasetError::Domain(format!("frame {frame} out of range (series has {})", self.n_frames())))
        }
    }

    pub fn check_compatible(&self, other: &SnapshotSeries) -> Result<(), DatasetError> {
        if (self.nx, self.ny, self.n_frames()) != (other.nx, other.ny, other.n_frames()) {
            return Err(DatasetError::Shape(format!(
                "{}x{}x{} frames vs {}x{}x{} frames",
                self.nx,
                self.ny,
                self.n_frames(),
                other.nx,
                other.ny,
                other.n_frames()
            )));
        }
        Ok(())
    }

    fn empty_like(&self) -> Self {
        Self { frames: Vec::with_capacity(self.frames.len()), ..self.clone_header() }
    }

    fn clone_header(&self) -> Self {
        Self { nx: self.nx, ny: self.ny, dx: self.dx, dt_snap: self.dt_snap, v0: self.v0, frames: Vec::new() }
    }
}

/// The five output channels of a solver state. Vacuum cells carry zero
/// temperature, pressure and velocity.
pub fn record(s: &SimState, material: &Material) -> Vec<f64> {
    let n = s.len();
    let empty = material.model.rho0 * crate::solver::state::EMPTY_DENSITY_FRACTION;
    let mut frame = vec![0.0; N_CHANNELS * n];
    for k in 0..n {
        let mu = s.mu.data()[k];
        frame[2 * n + k] = mu;
        if s.is_material(k) {
            let (u, v) = s.velocity_at(k, empty);
            frame[k] = s.temperature.data()[k];
            frame[n + k] = s.p.data()[k];
            frame[3 * n + k] = u;
            frame[4 * n + k] = v;
        }
    }
    frame
}

/// Observer that records a frame at every snapshot and can echo progress.
pub struct SeriesRecorder<'a> {
    pub series: SnapshotSeries,
    material: &'a Material,
    progress_every: Option<u64>,
    sink: Box<dyn Write + 'a>,
    last_dt: f64,
}

impl<'a> SeriesRecorder<'a> {
    pub fn new(series: SnapshotSeries, material: &'a Material) -> Self {
        Self { series, material, progress_every: None, sink: Box::new(std::io::sink()), last_dt: 0.0 }
    }

    /// Write a progress line every `every` steps and at each snapshot.
    pub fn with_progress(mut self, every: u64, sink: Box<dyn Write + 'a>) -> Self {
        self.progress_every = Some(every.max(1));
        self.sink = sink;
        self
    }

    fn progress(&mut self, s: &SimState) {
        let line = crate::solver::Progress {
            step: s.step,
            t: s.t,
            dt: self.last_dt,
            t_max: s.temperature.max(),
            p_max: s.p.max(),
        };
        let _ = writeln!(self.sink, "{line}");
    }
}

impl Observer for SeriesRecorder<'_> {
    fn snapshot(&mut self, _index: usize, state: &SimState) {
        let frame = record(state, self.material);
        self.series.push_frame(frame).expect("solver grid matches series grid");
        if self.progress_every.is_some() {
            self.progress(state);
        }
    }

    fn step(&mut self, report: &crate::solver::StepReport, state: &SimState) {
        self.last_dt = report.dt;
        if let Some(every) = self.progress_every {
            if state.step.is_multiple_of(every) {
                self.progress(state);
            }
        }
    }
}

/// Normalization constants fitted on the training set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub t_min: f64,
    pub t_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Shared scale of both velocity components, m/s.
    pub vel_scale: f64,
}

impl NormStats {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let ok = self.t_max > self.t_min
            && self.p_max > self.p_min
            && self.vel_scale > 0.0
            && [self.t_min, self.t_max, self.p_min, self.p_max, self.vel_scale].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(DatasetError::Domain(format!("degenerate normalization statistics {self:?}")))
        }
    }

    /// Bounds covering both inputs, so statistics can be fitted one series
    /// at a time.
    pub fn merge(&self, other: &NormStats) -> NormStats {
        NormStats {
            t_min: self.t_min.min(other.t_min),
            t_max: self.t_max.max(other.t_max),
            p_min: self.p_min.min(other.p_min),
            p_max: self.p_max.max(other.p_max),
            vel_scale: self.vel_scale.max(other.vel_scale),
        }
    }
}

/// Min–max bounds of T and p and the largest velocity component over every
/// frame of the training series.
pub fn fit_norm(training: &[&SnapshotSeries]) -> Result<NormStats, DatasetError> {
    if training.iter().all(|s| s.n_frames() == 0) {
        return Err(DatasetError::Domain("no training frames to fit normalization on".into()));
    }
    let mut st = NormStats {
        t_min: f64::INFINITY,
        t_max: f64::NEG_INFINITY,
        p_min: f64::INFINITY,
        p_max: f64::NEG_INFINITY,
        vel_scale: 0.0,
    };
    for series in training {
        for f in 0..series.n_frames() {
            for &t in series.channel(f, Channel::Temperature) {
                st.t_min = st.t_min.min(t);
                st.t_max = st.t_max.max(t);
            }
            for &p in series.channel(f, Channel::Pressure) {
                st.p_min = st.p_min.min(p);
                st.p_max = st.p_max.max(p);
            }
            for ch in [Channel::U, Channel::V] {
                for &v in series.channel(f, ch) {
                    st.vel_scale = st.vel_scale.max(v.abs());
                }
            }
        }
    }
    Ok(st)
}

fn map_channels(series: &SnapshotSeries, stats: &NormStats, forward: bool) -> Result<SnapshotSeries, DatasetError> {
    stats.validate()?;
    let n = series.cells();
    let mut out = series.empty_like();
    let (t_span, p_span) = (stats.t_max - stats.t_min, stats.p_max - stats.p_min);
    for frame in series.frames() {
        let mut f = frame.clone();
        for (c, chunk) in f.chunks_mut(n).enumerate() {
            let map: Box<dyn Fn(f64) -> f64> = match (Channel::ALL[c], forward) {
                (Channel::Temperature, true) => Box::new(|x| (x - stats.t_min) / t_span),
                (Channel::Temperature, false) => Box::new(|x| x * t_span + stats.t_min),
                (Channel::Pressure, true) => Box::new(|x| (x - stats.p_min) / p_span),
                (Channel::Pressure, false) => Box::new(|x| x * p_span + stats.p_min),
                (Channel::Mu, _) => continue,
                (Channel::U | Channel::V, true) => Box::new(|x| x / stats.vel_scale),
                (Channel::U | Channel::V, false) => Box::new(|x| x * stats.vel_scale),
            };
            for v in chunk.iter_mut() {
                *v = map(*v);
            }
        }
        out.push_exact(f);
    }
    Ok(out)
}

/// T and p to `[0, 1]` by min–max, U and V divided by the shared velocity
/// scale, μ untouched.
pub fn normalize(series: &SnapshotSeries, stats: &NormStats) -> Result<SnapshotSeries, DatasetError> {
    map_channels(series, stats, true)
}

pub fn denormalize(series: &SnapshotSeries, stats: &NormStats) -> Result<SnapshotSeries, DatasetError> {
    map_channels(series, stats, false)
}

/// Impact velocities of the training/validation pool and the hold-out set.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySplit {
    pub seed: u64,
    pub train: Vec<f64>,
    pub validation: Vec<f64>,
    pub test: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
    Test,
    Unlisted,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "val",
            Split::Test => "test",
            Split::Unlisted => "none",
        }
    }
}

pub const N_TRAIN: usize = 70;
pub const N_VALIDATION: usize = 18;

/// 720–2880 m/s in 20 m/s steps, excluding multiples of 100.
pub fn pool_velocities() -> Vec<f64> {
    (720..=2880).step_by(20).filter(|v| v % 100 != 0).map(f64::from).collect()
}

/// Multiples of 100 in 720–2880, plus 500–700 and 2900–3000 m/s.
pub fn test_velocities() -> Vec<f64> {
    let mut out: Vec<u32> = vec![500, 600, 700];
    out.extend((720..=2880).filter(|v| v % 100 == 0));
    out.extend((2900..=3080).filter(|v| v % 100 == 0));
    out.into_iter().map(f64::from).collect()
}

/// Seeded shuffle of the pool into 70 training and 18 validation velocities.
pub fn split_velocities(seed: u64) -> VelocitySplit {
    let mut pool = pool_velocities();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pool.shuffle(&mut rng);
    let mut train = pool[..N_TRAIN].to_vec();
    let mut validation = pool[N_TRAIN..].to_vec();
    train.sort_by(f64::total_cmp);
    validation.sort_by(f64::total_cmp);
    VelocitySplit { seed, train, validation, test: test_velocities() }
}

impl VelocitySplit {
    pub fn membership(&self, v0: f64) -> Split {
        if self.train.contains(&v0) {
            Split::Train
        } else if self.validation.contains(&v0) {
            Split::Validation
        } else if self.test.contains(&v0) {
            Split::Test
        } else {
            Split::Unlisted
        }
    }

    pub fn train_and_validation(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.train.iter().chain(&self.validation).copied().collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

fn put_name(buf: &mut Vec<u8>, name: &str) {
    let mut field = [b' '; NAME_BYTES];
    field[..name.len()].copy_from_slice(name.as_bytes());
    buf.extend_from_slice(&field);
}

/// Serialize to the `SHRB` byte layout.
pub fn encode_series(series: &SnapshotSeries) -> Result<Vec<u8>, DatasetError> {
    let as_u32 = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| DatasetError::Shape(format!("{what} = {v} does not fit the container")))
    };
    let mut buf = Vec::with_capacity(HEADER_BYTES + series.n_frames() * series.frame_len() * 4);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    for (v, what) in [(series.nx, "nx"), (series.ny, "ny"), (N_CHANNELS, "channels"), (series.n_frames(), "frames")] {
        buf.extend_from_slice(&as_u32(v, what)?.to_le_bytes());
    }
    for v in [series.dx, series.dt_snap, series.v0] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for ch in Channel::ALL {
        put_name(&mut buf, ch.name());
    }
    debug_assert_eq!(buf.len(), HEADER_BYTES);
    for frame in series.frames() {
        for &v in frame {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(buf)
}

/// Header fields exactly as stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub version: u32,
    pub nx: u32,
    pub ny: u32,
    pub n_channels: u32,
    pub n_frames: u32,
    pub dx: f64,
    pub dt_snap: f64,
    pub v0: f64,
    pub channel_names: Vec<String>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], DatasetError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(format_error(
                self.bytes.len(),
                format!("truncated while reading {what} ({n} bytes needed at offset {})", self.pos),
            )),
        }
    }

    fn u32(&mut self, what: &str) -> Result<u32, DatasetError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self, what: &str) -> Result<f64, DatasetError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_header(bytes: &[u8]) -> Result<Header, DatasetError> {
    let mut c = Cursor { bytes, pos: 0 };
    let magic = c.take(4, "magic")?;
    if magic != MAGIC {
        return Err(format_error(0, format!("bad magic {magic:?}, expected \"SHRB\"")));
    }
    let version = c.u32("version")?;
    if version != VERSION {
        return Err(format_error(4, format!("unsupported version {version}")));
    }
    let nx = c.u32("nx")?;
    let ny = c.u32("ny")?;
    let n_channels = c.u32("channel count")?;
    if n_channels as usize != N_CHANNELS {
        return Err(format_error(16, format!("expected {N_CHANNELS} channels, found {n_channels}")));
    }
    let n_frames = c.u32("frame count")?;
    let dx = c.f64("dx")?;
    let dt_snap = c.f64("dt_snap")?;
    let v0 = c.f64("v0")?;
    let mut channel_names = Vec::with_capacity(N_CHANNELS);
    for ch in Channel::ALL {
        let offset = c.pos;
        let raw = c.take(NAME_BYTES, "channel name")?;
        let name = std::str::from_utf8(raw)
            .map_err(|_| format_error(offset, "channel name is not ASCII"))?
            .trim_end_matches(' ')
            .to_string();
        if name != ch.name() {
            return Err(format_error(offset, format!("channel {} named {name:?}, expected {:?}", ch.index(), ch.name())));
        }
        channel_names.push(name);
    }
    Ok(Header { version, nx, ny, n_channels, n_frames, dx, dt_snap, v0, channel_names })
}

pub fn decode_series(bytes: &[u8]) -> Result<SnapshotSeries, DatasetError> {
    let h = decode_header(bytes)?;
    if h.nx == 0 || h.ny == 0 {
        return Err(format_error(8, "grid dimensions must be positive"));
    }
    let frame_len = (h.nx as usize)
        .checked_mul(h.ny as usize)
        .and_then(|c| c.checked_mul(N_CHANNELS))
        .ok_or_else(|| format_error(8, "grid shape overflows"))?;
    let payload = frame_len
        .checked_mul(h.n_frames as usize)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| format_error(20, "frame payload size overflows"))?;
    let expected = HEADER_BYTES + payload;
    if bytes.len() < expected {
        return Err(format_error(bytes.len(), format!("truncated: {} bytes, header implies {expected}", bytes.len())));
    }
    if bytes.len() > expected {
        return Err(format_error(expected, format!("{} trailing bytes after the last frame", bytes.len() - expected)));
    }
    let mut series = SnapshotSeries::new(h.nx as usize, h.ny as usize, h.dx, h.dt_snap, h.v0);
    for chunk in bytes[HEADER_BYTES..].chunks_exact(frame_len * 4) {
        let frame = chunk
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes")) as f64)
            .collect();
        series.push_exact(frame);
    }
    Ok(series)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.display().to_string(), source }
}

pub fn write_series(series: &SnapshotSeries, path: &Path) -> Result<(), DatasetError> {
    let bytes = encode_series(series)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_error(parent))?;
    }
    std::fs::write(path, bytes).map_err(io_error(path))
}

pub fn read_series(path: &Path) -> Result<SnapshotSeries, DatasetError> {
    let bytes = std::fs::read(path).map_err(io_error(path))?;
    decode_series(&bytes)
}

pub fn read_header(path: &Path) -> Result<Header, DatasetError> {
    use std::io::Read;
    let mut buf = Vec::with_capacity(HEADER_BYTES);
    std::fs::File::open(path)
        .and_then(|f| f.take(HEADER_BYTES as u64).read_to_end(&mut buf))
        .map_err(io_error(path))?;
    decode_header(&buf)
}

/// Ordered `key = value` text file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn set_norm(&mut self, stats: &NormStats) {
        self.set("norm.T_min", stats.t_min);
        self.set("norm.T_max", stats.t_max);
        self.set("norm.p_min", stats.p_min);
        self.set("norm.p_max", stats.p_max);
        self.set("norm.vel_scale", stats.vel_scale);
    }

    pub fn norm(&self) -> Result<Option<NormStats>, DatasetError> {
        let keys = ["norm.T_min", "norm.T_max", "norm.p_min", "norm.p_max", "norm.vel_scale"];
        if keys.iter().all(|k| self.get(k).is_none()) {
            return Ok(None);
        }
        let mut vals = [0.0; 5];
        for (v, k) in vals.iter_mut().zip(keys) {
            *v = self
                .get(k)
                .ok_or_else(|| DatasetError::Domain(format!("manifest lacks {k}")))?
                .parse()
                .map_err(|_| DatasetError::Domain(format!("manifest value of {k} is not a number")))?;
        }
        Ok(Some(NormStats { t_min: vals[0], t_max: vals[1], p_min: vals[2], p_max: vals[3], vel_scale: vals[4] }))
    }

    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut m = Manifest::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| DatasetError::Domain(format!("manifest line {}: expected key = value", n + 1)))?;
            m.set(k.trim(), v.trim());
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<(), DatasetError> {
        std::fs::write(path, self.to_string()).map_err(io_error(path))
    }

    pub fn read(path: &Path) -> Result<Self, DatasetError> {
        Self::parse(&std::fs::read_to_string(path).map_err(io_error(path))?)
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(nx: usize, ny: usize, frames: usize, seed: u64) -> SnapshotSeries {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = SnapshotSeries::new(nx, ny, 1.1719e-9, 2.5e-12, 1800.0);
        for _ in 0..frames {
            let n = nx * ny;
            let mut f = Vec::with_capacity(5 * n);
            f.extend((0..n).map(|_| rng.gen_range(0.0..4000.0)));
            f.extend((0..n).map(|_| rng.gen_range(-1e9..3e10)));
            f.extend((0..n).map(|_| if rng.gen_bool(0.1) { 0.0 } else { 1.0 }));
            f.extend((0..2 * n).map(|_| rng.gen_range(-2000.0..2000.0)));
            s.push_frame(f).unwrap();
        }
        s
    }

    #[test]
    fn split_counts_and_membership() {
        let split = split_velocities(DEFAULT_SPLIT_SEED);
        assert_eq!(pool_velocities().len(), 88);
        assert_eq!((split.train.len(), split.validation.len(), split.test.len()), (70, 18, 26));
        assert_eq!(split.membership(800.0), Split::Test);
        assert!(matches!(split.membership(820.0), Split::Train | Split::Validation));
        assert_eq!(split.membership(810.0), Split::Unlisted);
        let mut all: Vec<f64> = split.train_and_validation();
        all.extend(&split.test);
        let n = all.len();
        all.sort_by(f64::total_cmp);
        all.dedup();
        assert_eq!(all.len(), n, "sets overlap");
        assert_eq!(split.train_and_validation(), pool_velocities());
        assert_eq!(split_velocities(DEFAULT_SPLIT_SEED), split);
        assert_ne!(split_velocities(1).train, split.train);
    }

    #[test]
    fn container_round_trip_is_bitwise() {
        let s = synthetic(6, 4, 3, 1);
        let bytes = encode_series(&s).unwrap();
        assert_eq!(bytes.len(), HEADER_BYTES + 3 * 5 * 6 * 4 * 4);
        let back = decode_series(&bytes).unwrap();
        assert_eq!(back, s);
        for (a, b) in back.frames().iter().flatten().zip(s.frames().iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn published_grid_sizes() {
        let mut s = SnapshotSeries::new(128, 256, 1.1719e-9, 2.5e-12, 1800.0);
        s.push_frame(vec![0.0; 5 * 128 * 256]).unwrap();
        s.push_frame(vec![1.0; 5 * 128 * 256]).unwrap();
        let bytes = encode_series(&s).unwrap();
        assert_eq!(bytes.len(), 128 + 2 * 655_360);
    }

    #[test]
    fn corrupt_files_are_rejected_with_offsets() {
        let s = synthetic(4, 4, 2, 2);
        let bytes = encode_series(&s).unwrap();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode_series(&bad), Err(DatasetError::Format { offset: 0, .. })));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(decode_series(&bad), Err(DatasetError::Format { offset: 4, .. })));

        let cut = &bytes[..bytes.len() - 3];
        assert!(matches!(decode_series(cut), Err(DatasetError::Format { offset, .. }) if offset == cut.len()));

        assert!(matches!(decode_series(&bytes[..50]), Err(DatasetError::Format { offset: 50, .. })));

        let mut huge = bytes.clone();
        huge[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        huge[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
        huge[20..24].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(decode_series(&huge), Err(DatasetError::Format { .. })));
    }

    #[test]
    fn file_round_trip_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("a.shrb");
        let s = synthetic(8, 6, 2, 3);
        write_series(&s, &path).unwrap();
        assert_eq!(read_series(&path).unwrap(), s);
        let h = read_header(&path).unwrap();
        assert_eq!((h.nx, h.ny, h.n_channels, h.n_frames), (8, 6, 5, 2));
        assert_eq!(h.channel_names, ["T", "p", "mu", "U", "V"]);
        assert_eq!(std::fs::metadata(&path).unwrap().len() as usize, 128 + 2 * 5 * 48 * 4);
    }

    #[test]
    fn norm_fit_examples() {
        let mut s = SnapshotSeries::new(2, 2, 1.0, 1.0, 1800.0);
        let mut f = vec![0.0; 20];
        f[..4].copy_from_slice(&[0.0, 4000.0, 300.0, 1000.0]);
        f[4..8].copy_from_slice(&[-1e8, 0.0, 2e9, 5e8]);
        f[12..16].copy_from_slice(&[10.0, -20.0, 0.0, 0.0]);
        f[16..20].copy_from_slice(&[-1800.0, -1500.0, 0.0, 3.0]);
        s.push_frame(f).unwrap();
        let st = fit_norm(&[&s]).unwrap();
        assert_eq!((st.t_min, st.t_max), (0.0, 4000.0));
        assert_eq!((st.p_min, st.p_max), (-1e8, 2e9));
        assert_eq!(st.vel_scale, 1800.0);
        let n = normalize(&s, &st).unwrap();
        assert_eq!(n.channel(0, Channel::Temperature)[0], 0.0);
        assert_eq!(n.channel(0, Channel::Temperature)[1], 1.0);
        assert_eq!(n.channel(0, Channel::V)[0], -1.0);
        assert_eq!(n.channel(0, Channel::Mu), s.channel(0, Channel::Mu));
        assert!(fit_norm(&[]).is_err());
        let degenerate = NormStats { t_max: st.t_min, ..st };
        assert!(normalize(&s, &degenerate).is_err());
    }

    #[test]
    fn merged_stats_equal_joint_fit() {
        let (a, b) = (synthetic(4, 3, 2, 1), synthetic(4, 3, 3, 2));
        let joint = fit_norm(&[&a, &b]).unwrap();
        let merged = fit_norm(&[&a]).unwrap().merge(&fit_norm(&[&b]).unwrap());
        assert_eq!(joint, merged);
    }

    #[test]
    fn manifest_round_trip() {
        let mut m = Manifest::new();
        m.set("seed", 7);
        m.set("series.0.path", "v1800.shrb");
        m.set_norm(&NormStats { t_min: 0.0, t_max: 4321.5, p_min: -1e8, p_max: 3e10, vel_scale: 2880.0 });
        m.set("seed", 8);
        let back = Manifest::parse(&m.to_string()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.get("seed"), Some("8"));
        assert_eq!(back.norm().unwrap().unwrap().t_max, 4321.5);
        assert!(Manifest::parse("no equals sign").is_err());
    }

    #[test]
    fn channel_names_parse() {
        for ch in Channel::ALL {
            assert_eq!(ch.name().parse::<Channel>().unwrap(), ch);
        }
        assert!("rho".parse::<Channel>().is_err());
    }

    proptest! {
        #[test]
        fn normalization_round_trip(
            t_min in -500.0f64..500.0, t_span in 1.0f64..1e4,
            p_min in -1e9f64..1e9, p_span in 1e6f64..1e11,
            vel in 1.0f64..5000.0, seed in 0u64..1000,
        ) {
            let s = synthetic(4, 3, 2, seed);
            let st = NormStats { t_min, t_max: t_min + t_span, p_min, p_max: p_min + p_span, vel_scale: vel };
            let back = denormalize(&normalize(&s, &st).unwrap(), &st).unwrap();
            for (a, b) in back.frames().iter().flatten().zip(s.frames().iter().flatten()) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{} vs {}", a, b);
            }
        }
    }
}
