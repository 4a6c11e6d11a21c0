//! All-optical ghost imaging pipeline, one disk slot at a time.
//!
//! For every slot the lit mask `I₁(x, y)` illuminates the object, the
//! homogenized transmitted light is the bucket value `I₂ = Σ mask·object`,
//! and the readout disk re-applies the same mask so the light leaving it is
//! `I(x, y) = I₁(x, y)·I₂`. The observer integrates `I` over a persistence
//! window `T`. All sums are exact integers, so frame values never depend on
//! evaluation order.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::disk::{check_patterns, csv_writer, lit_pixels, PartitionSpec, ScanSchedule};
use crate::error::{Error, Result};
use crate::hadamard::PatternSet;
use crate::matrix::Matrix;
use crate::netpbm::{PnmImage, PnmKind};
use crate::rng::SplitMix64;
use crate::scalar::Scalar;
use crate::scene::{Channel, SceneFrame, SceneObject, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowMode {
    /// Back-to-back windows `[wT, (w+1)T)` starting at `t = 0`.
    #[default]
    Tumbling,
    /// One window per slot start, each `T` long.
    Sliding,
}

impl WindowMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowMode::Tumbling => "tumbling",
            WindowMode::Sliding => "sliding",
        }
    }
}

impl fmt::Display for WindowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WindowMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tumbling" => Ok(WindowMode::Tumbling),
            "sliding" => Ok(WindowMode::Sliding),
            other => Err(format!("unknown window mode {other:?}; expected tumbling or sliding")),
        }
    }
}

/// When the moving object's position is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MotionSampling {
    /// At every slot's own start time.
    #[default]
    PerSlot,
    /// Held at the start of the current revolution.
    PerRevolution,
}

impl MotionSampling {
    pub fn as_str(self) -> &'static str {
        match self {
            MotionSampling::PerSlot => "slot",
            MotionSampling::PerRevolution => "revolution",
        }
    }
}

impl fmt::Display for MotionSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MotionSampling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "slot" => Ok(MotionSampling::PerSlot),
            "revolution" => Ok(MotionSampling::PerRevolution),
            other => Err(format!("unknown motion sampling {other:?}; expected slot or revolution")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConfig<S> {
    pub revolution_period: S,
    pub window: S,
    pub window_mode: WindowMode,
    pub total_duration: S,
}

impl<S: Scalar> Default for TimingConfig<S> {
    /// One 0.2 s revolution observed through one 0.2 s window.
    fn default() -> Self {
        let fifth = S::from_fraction(1, 5);
        TimingConfig {
            revolution_period: fifth,
            window: fifth,
            window_mode: WindowMode::Tumbling,
            total_duration: fifth,
        }
    }
}

impl<S: Scalar> TimingConfig<S> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("revolution_period", self.revolution_period),
            ("window", self.window),
            ("duration", self.total_duration),
        ] {
            // negated so NaN is rejected too
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(v > S::zero()) {
                return Err(Error::InvalidTiming(format!("{name} must be positive, got {v:?}")));
            }
        }
        Ok(())
    }

    pub fn slot_duration(&self, spec: &PartitionSpec) -> S {
        self.revolution_period / S::from_int(spec.slots_per_revolution() as i64)
    }

    /// Start time of global slot `s`.
    pub fn slot_time(&self, spec: &PartitionSpec, s: usize) -> S {
        S::from_int(s as i64) * self.revolution_period / S::from_int(spec.slots_per_revolution() as i64)
    }

    /// Number of slots starting before the end of the run.
    pub fn slot_count(&self, spec: &PartitionSpec) -> usize {
        let per_rev = S::from_int(spec.slots_per_revolution() as i64);
        (self.total_duration * per_rev / self.revolution_period).ceil_to_i64().max(0) as usize
    }
}

/// Seeded additive Gaussian noise on bucket values, rounded and clamped at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    fn apply(&self, bucket: [u64; 3], slot: usize) -> [u64; 3] {
        let root = SplitMix64::new(self.seed);
        let mut out = bucket;
        for (ch, v) in out.iter_mut().enumerate() {
            let mut g = root.fork(slot as u64 * 3 + ch as u64);
            let noisy = (*v as f64 + self.sigma * g.next_gaussian()).round();
            *v = if noisy > 0.0 { noisy as u64 } else { 0 };
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimulationOptions {
    pub motion_sampling: MotionSampling,
    pub noise: Option<NoiseModel>,
    pub parallel: bool,
}

/// Exact `n × n × 3` accumulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    n: usize,
    planes: [Vec<u64>; 3],
}

impl RawImage {
    pub fn zeros(n: usize) -> Self {
        RawImage { n, planes: [vec![0; n * n], vec![0; n * n], vec![0; n * n]] }
    }

    pub fn from_planes(n: usize, planes: [Vec<u64>; 3]) -> Result<Self> {
        if planes.iter().any(|p| p.len() != n * n) {
            return Err(Error::DimensionMismatch(format!("every plane must hold {n}x{n} values")));
        }
        Ok(RawImage { n, planes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize, ch: Channel) -> u64 {
        self.planes[ch.index()][row * self.n + col]
    }

    pub fn plane(&self, ch: Channel) -> &[u64] {
        &self.planes[ch.index()]
    }

    pub fn max_value(&self) -> u64 {
        self.planes.iter().flatten().copied().max().unwrap_or(0)
    }

    fn add_assign(&mut self, other: &RawImage) {
        for (a, b) in self.planes.iter_mut().zip(&other.planes) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    fn add_sparse(&mut self, pixels: &[(usize, usize)], bucket: [u64; 3]) {
        for &(r, c) in pixels {
            for (plane, b) in self.planes.iter_mut().zip(bucket) {
                plane[r * self.n + c] += b;
            }
        }
    }

    fn sub_sparse(&mut self, pixels: &[(usize, usize)], bucket: [u64; 3]) {
        for &(r, c) in pixels {
            for (plane, b) in self.planes.iter_mut().zip(bucket) {
                plane[r * self.n + c] -= b;
            }
        }
    }

    pub fn scaled(&self, factor: u64) -> RawImage {
        let mut out = self.clone();
        out.planes.iter_mut().flatten().for_each(|v| *v *= factor);
        out
    }

    /// Space-separated integer matrix of one channel, one row per line.
    pub fn channel_text(&self, ch: Channel) -> String {
        let mut out = String::new();
        for row in self.plane(ch).chunks(self.n) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn channel_from_text(text: &str, n: usize) -> std::result::Result<Vec<u64>, String> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if rows.len() != n {
            return Err(format!("expected {n} rows, found {}", rows.len()));
        }
        let mut out = Vec::with_capacity(n * n);
        for (i, line) in rows.iter().enumerate() {
            let vals: Vec<u64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| format!("row {}: bad value {t:?}", i + 1)))
                .collect::<std::result::Result<_, _>>()?;
            if vals.len() != n {
                return Err(format!("row {} has {} values, expected {n}", i + 1, vals.len()));
            }
            out.extend(vals);
        }
        Ok(out)
    }

    /// Display copy: one affine map `[0, max] → [0, 255]` shared by all
    /// channels, rounding half up. An all-zero image maps to black.
    pub fn to_display_ppm(&self) -> PnmImage {
        let max = self.max_value() as u128;
        let mut data = Vec::with_capacity(self.n * self.n * 3);
        for i in 0..self.n * self.n {
            for p in &self.planes {
                let v = if max == 0 { 0 } else { (p[i] as u128 * 510 + max) / (2 * max) };
                data.push(v as u8);
            }
        }
        PnmImage { kind: PnmKind::Rgb, width: self.n, height: self.n, data }
    }
}

/// Persistence-integrated image over `[start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureFrame<S> {
    pub start: S,
    pub end: S,
    pub image: RawImage,
}

impl<S> ExposureFrame<S> {
    pub fn get(&self, row: usize, col: usize, ch: Channel) -> u64 {
        self.image.get(row, col, ch)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketEntry<S> {
    pub t: S,
    pub slot: usize,
    pub values: [u64; 3],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BucketTrace<S> {
    pub entries: Vec<BucketEntry<S>>,
}

impl<S: Scalar> BucketTrace<S> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `t,slot,red,green,blue`, `t` in seconds.
    pub fn to_csv(&self) -> String {
        let mut w = csv_writer();
        w.write_record(["t", "slot", "red", "green", "blue"]).expect("in-memory write");
        for e in &self.entries {
            let [r, g, b] = e.values;
            w.write_record([e.t.to_f64().to_string(), e.slot.to_string(), r.to_string(), g.to_string(), b.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

fn check_dims(mask: &Matrix<u8>, frame: &SceneFrame) -> Result<()> {
    if mask.rows() != frame.n() || mask.cols() != frame.n() {
        return Err(Error::DimensionMismatch(format!(
            "mask is {}x{}, frame is {}x{}",
            mask.rows(),
            mask.cols(),
            frame.n(),
            frame.n()
        )));
    }
    Ok(())
}

/// Ideal homogenized bucket: `Σ mask·frame` per channel.
pub fn bucket_value(mask: &Matrix<u8>, frame: &SceneFrame) -> Result<[u64; 3]> {
    check_dims(mask, frame)?;
    let mut out = [0u64; 3];
    for ch in Channel::ALL {
        out[ch.index()] = mask
            .as_slice()
            .iter()
            .zip(frame.plane(ch))
            .map(|(&m, &v)| u64::from(m) * u64::from(v))
            .sum();
    }
    Ok(out)
}

/// `I(x, y) = mask(x, y)·bucket` per channel.
pub fn slot_contribution(mask: &Matrix<u8>, bucket: [u64; 3]) -> RawImage {
    let n = mask.rows();
    let mut out = RawImage::zeros(n);
    for (i, &m) in mask.as_slice().iter().enumerate() {
        for (plane, b) in out.planes.iter_mut().zip(bucket) {
            plane[i] = u64::from(m) * b;
        }
    }
    out
}

/// Sums the contributions whose slot time lies in `[start, end)`.
pub fn integrate_exposure<S: Scalar>(n: usize, contributions: &[(S, RawImage)], start: S, end: S) -> ExposureFrame<S> {
    let mut image = RawImage::zeros(n);
    for (t, c) in contributions {
        if *t >= start && *t < end {
            image.add_assign(c);
        }
    }
    ExposureFrame { start, end, image }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput<S> {
    pub frames: Vec<ExposureFrame<S>>,
    pub trace: BucketTrace<S>,
}

/// Everything a run needs; checked for consistency before any slot runs.
#[derive(Debug, Clone)]
pub struct Simulation<'a, S> {
    pub spec: PartitionSpec,
    pub schedule: &'a ScanSchedule,
    pub patterns: &'a PatternSet,
    pub object: &'a SceneObject,
    pub trajectory: Trajectory<S>,
    pub timing: TimingConfig<S>,
    pub options: SimulationOptions,
}

struct SlotResult {
    pixels: Vec<(usize, usize)>,
    bucket: [u64; 3],
}

impl<S: Scalar> Simulation<'_, S> {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.spec() != &self.spec {
            return Err(Error::DimensionMismatch("schedule was built for a different partition".into()));
        }
        if self.schedule.len() != self.spec.slots_per_revolution() {
            return Err(Error::DimensionMismatch("schedule does not cover one revolution".into()));
        }
        check_patterns(&self.spec, self.patterns)?;
        if self.object.n() != self.spec.n() {
            return Err(Error::DimensionMismatch(format!(
                "object is {}x{}, partition needs {}x{}",
                self.object.n(),
                self.object.n(),
                self.spec.n(),
                self.spec.n()
            )));
        }
        self.timing.validate()?;
        if let Some(noise) = self.options.noise {
            if !(noise.sigma >= 0.0 && noise.sigma.is_finite()) {
                return Err(Error::OutOfRange(format!("noise sigma must be >= 0, got {}", noise.sigma)));
            }
        }
        Ok(())
    }

    fn scene_offset(&self, s: usize) -> (i64, i64) {
        let t = match self.options.motion_sampling {
            MotionSampling::PerSlot => self.timing.slot_time(&self.spec, s),
            MotionSampling::PerRevolution => {
                let rev = s / self.spec.slots_per_revolution();
                S::from_int(rev as i64) * self.timing.revolution_period
            }
        };
        self.trajectory.offset_at(t)
    }

    fn run_slot(&self, s: usize) -> SlotResult {
        let desc = &self.schedule.slots()[s % self.spec.slots_per_revolution()];
        let pixels: Vec<(usize, usize)> = lit_pixels(&self.spec, desc, self.patterns).collect();
        let (dx, dy) = self.scene_offset(s);
        let n = self.spec.n() as i64;
        let mut bucket = [0u64; 3];
        for &(r, c) in &pixels {
            // translated object: frame(r, c) = object(r − dy, c − dx), opaque outside
            let (sr, sc) = (r as i64 - dy, c as i64 - dx);
            if (0..n).contains(&sr) && (0..n).contains(&sc) {
                for ch in Channel::ALL {
                    bucket[ch.index()] += u64::from(self.object.get(sr as usize, sc as usize, ch));
                }
            }
        }
        if let Some(noise) = self.options.noise {
            bucket = noise.apply(bucket, s);
        }
        SlotResult { pixels, bucket }
    }

    pub fn run(&self) -> Result<SimulationOutput<S>> {
        self.validate()?;
        let total = self.timing.slot_count(&self.spec);
        let results: Vec<SlotResult> = if self.options.parallel {
            (0..total).into_par_iter().map(|s| self.run_slot(s)).collect()
        } else {
            (0..total).map(|s| self.run_slot(s)).collect()
        };
        let trace = BucketTrace {
            entries: results
                .iter()
                .enumerate()
                .map(|(s, r)| BucketEntry { t: self.timing.slot_time(&self.spec, s), slot: s, values: r.bucket })
                .collect(),
        };
        let frames = match self.timing.window_mode {
            WindowMode::Tumbling => self.tumbling_frames(&results),
            WindowMode::Sliding => self.sliding_frames(&results),
        };
        Ok(SimulationOutput { frames, trace })
    }

    fn tumbling_frames(&self, results: &[SlotResult]) -> Vec<ExposureFrame<S>> {
        let t = &self.timing;
        let windows = (t.total_duration / t.window).floor_to_i64().max(0) as usize;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); windows];
        for s in 0..results.len() {
            let w = (t.slot_time(&self.spec, s) / t.window).floor_to_i64();
            if (0..windows as i64).contains(&w) {
                members[w as usize].push(s);
            }
        }
        let n = self.spec.n();
        let accumulate = |(w, slots): (usize, &Vec<usize>)| {
            let mut image = RawImage::zeros(n);
            for &s in slots {
                image.add_sparse(&results[s].pixels, results[s].bucket);
            }
            let start = S::from_int(w as i64) * t.window;
            ExposureFrame { start, end: start + t.window, image }
        };
        if self.options.parallel {
            members.par_iter().enumerate().map(accumulate).collect()
        } else {
            members.iter().enumerate().map(accumulate).collect()
        }
    }

    fn sliding_frames(&self, results: &[SlotResult]) -> Vec<ExposureFrame<S>> {
        let t = &self.timing;
        let dt = t.slot_duration(&self.spec);
        if t.total_duration < t.window {
            return Vec::new();
        }
        let len = (t.window / dt).ceil_to_i64() as usize;
        let count = ((t.total_duration - t.window) / dt).floor_to_i64() as usize + 1;
        let mut frames = Vec::with_capacity(count);
        let mut image = RawImage::zeros(self.spec.n());
        for r in results.iter().take(len) {
            image.add_sparse(&r.pixels, r.bucket);
        }
        for j in 0..count {
            if j > 0 {
                let (old, new) = (&results[j - 1], results.get(j - 1 + len));
                image.sub_sparse(&old.pixels, old.bucket);
                if let Some(new) = new {
                    image.add_sparse(&new.pixels, new.bucket);
                }
            }
            let start = S::from_int(j as i64) * dt;
            frames.push(ExposureFrame { start, end: start + t.window, image: image.clone() });
        }
        frames
    }
}

pub fn run_simulation<S: Scalar>(
    spec: PartitionSpec,
    schedule: &ScanSchedule,
    patterns: &PatternSet,
    object: &SceneObject,
    trajectory: Trajectory<S>,
    timing: TimingConfig<S>,
    options: SimulationOptions,
) -> Result<SimulationOutput<S>> {
    Simulation { spec, schedule, patterns, object, trajectory, timing, options }.run()
}

pub fn write_frame_files<S>(dir: &Path, index: usize, frame: &ExposureFrame<S>) -> Result<()> {
    let ppm = dir.join(format!("frame_{index}.ppm"));
    crate::netpbm::write_pnm(&ppm, &frame.image.to_display_ppm())?;
    for ch in Channel::ALL {
        let path = dir.join(format!("frame_{index}_{}.txt", ch.name()));
        std::fs::write(&path, frame.image.channel_text(ch)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

pub fn read_raw_frame(dir: &Path, index: usize, n: usize) -> Result<RawImage> {
    let mut planes: [Vec<u64>; 3] = Default::default();
    for ch in Channel::ALL {
        let path = dir.join(format!("frame_{index}_{}.txt", ch.name()));
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        planes[ch.index()] = RawImage::channel_from_text(&text, n).map_err(|m| Error::format(&path, m))?;
    }
    RawImage::from_planes(n, planes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{place_pattern, OrderMode};
    use crate::hadamard::reduced_patterns;
    use crate::scene::sample_scene;
    use crate::Exact;

    fn pinhole(n: usize, r: usize, c: usize) -> SceneObject {
        let mut obj = SceneObject::blank(n);
        for ch in Channel::ALL {
            obj.set(r, c, ch, 255);
        }
        obj
    }

    #[test]
    fn bucket_basics() {
        let ones = Matrix::from_fn(5, 5, |_, _| 1u8);
        assert_eq!(bucket_value(&ones, &pinhole(5, 2, 3)).unwrap(), [255; 3]);
        assert_eq!(bucket_value(&Matrix::zeros(5, 5), &pinhole(5, 2, 3)).unwrap(), [0; 3]);
        assert!(bucket_value(&Matrix::zeros(4, 4), &pinhole(5, 2, 3)).is_err());
    }

    #[test]
    fn bucket_of_first_pattern_over_lit_cell() {
        let spec = PartitionSpec::new(35, 5).unwrap();
        let pats = reduced_patterns(7).unwrap();
        let slot = ScanSchedule::build(spec, OrderMode::PatternMajor).slots()[0];
        let mask = place_pattern(&spec, &slot, pats.as_set()).unwrap();
        let obj = SceneObject::from_fn(35, |r, c, _| if r == 0 && c < 7 { 255 } else { 0 });
        assert_eq!(bucket_value(&mask, &obj).unwrap(), [765; 3]);
    }

    #[test]
    fn contribution_basics() {
        let mut mask = Matrix::zeros(3, 3);
        mask.set(1, 2, 1u8);
        assert_eq!(slot_contribution(&mask, [0; 3]), RawImage::zeros(3));
        let c = slot_contribution(&mask, [255, 0, 7]);
        assert_eq!(c.get(1, 2, Channel::Red), 255);
        assert_eq!(c.get(1, 2, Channel::Blue), 7);
        assert_eq!(c.max_value(), 255);
    }

    #[test]
    fn empty_window_is_zero() {
        let f = integrate_exposure::<f64>(4, &[], 0.0, 1.0);
        assert_eq!(f.image, RawImage::zeros(4));
    }

    #[test]
    fn display_scaling_rounds_half_up() {
        let img = RawImage::from_planes(1, [vec![1], vec![2], vec![4]]).unwrap();
        // 1*255/4 = 63.75 -> 64, 2*255/4 = 127.5 -> 128
        assert_eq!(img.to_display_ppm().data, vec![64, 128, 255]);
        assert_eq!(RawImage::zeros(2).to_display_ppm().data, vec![0; 12]);
    }

    #[test]
    fn raw_text_round_trip() {
        let img = RawImage::from_planes(2, [vec![1, 2, 3, 4], vec![0; 4], vec![9; 4]]).unwrap();
        let back = RawImage::channel_from_text(&img.channel_text(Channel::Red), 2).unwrap();
        assert_eq!(back, vec![1, 2, 3, 4]);
        assert!(RawImage::channel_from_text("1 2\n3\n", 2).is_err());
    }

    #[test]
    fn timing_rejects_nonpositive() {
        let t = TimingConfig::<Exact> { window: Exact::from_integer(0), ..Default::default() };
        assert!(t.validate().is_err());
        let t = TimingConfig::<f64> { total_duration: f64::NAN, ..Default::default() };
        assert!(t.validate().is_err());
    }

    /// Streaming path agrees with the slow reference built from the
    /// documented operations (place_pattern, sample_scene, bucket_value,
    /// slot_contribution, integrate_exposure) on a moving object.
    #[test]
    fn streaming_matches_reference_pipeline() {
        let spec = PartitionSpec::new(6, 2).unwrap();
        let pats = reduced_patterns(3).unwrap();
        let sched = ScanSchedule::build(spec, OrderMode::PartMajor);
        let obj = SceneObject::from_fn(6, |r, c, ch| ((r * 7 + c * 3 + ch.index() * 11) % 256) as u8);
        let traj = Trajectory::Linear { vx: Exact::new(7, 2), vy: Exact::new(-3, 1) };
        let timing = TimingConfig {
            revolution_period: Exact::new(1, 3),
            window: Exact::new(1, 4),
            window_mode: WindowMode::Tumbling,
            total_duration: Exact::new(4, 3),
        };
        let out = run_simulation(spec, &sched, pats.as_set(), &obj, traj, timing, SimulationOptions::default())
            .unwrap();

        let total = timing.slot_count(&spec);
        assert_eq!(total, 144);
        let mut contributions = Vec::new();
        for s in 0..total {
            let t = timing.slot_time(&spec, s);
            let mask = place_pattern(&spec, &sched.slots()[s % 36], pats.as_set()).unwrap();
            let bucket = bucket_value(&mask, &sample_scene(&obj, &traj, t)).unwrap();
            assert_eq!(out.trace.entries[s].values, bucket);
            contributions.push((t, slot_contribution(&mask, bucket)));
        }
        assert_eq!(out.frames.len(), 5);
        for (w, frame) in out.frames.iter().enumerate() {
            let start = Exact::new(w as i64, 4);
            let reference = integrate_exposure(6, &contributions, start, start + Exact::new(1, 4));
            assert_eq!(frame, &reference);
        }
    }

    #[test]
    fn sliding_windows_match_reference() {
        let spec = PartitionSpec::new(3, 1).unwrap();
        let pats = reduced_patterns(3).unwrap();
        let sched = ScanSchedule::build(spec, OrderMode::PatternMajor);
        let obj = SceneObject::from_fn(3, |r, c, _| (r * 3 + c) as u8 * 10);
        let timing = TimingConfig {
            revolution_period: Exact::from_integer(9),
            window: Exact::new(5, 2),
            window_mode: WindowMode::Sliding,
            total_duration: Exact::from_integer(12),
        };
        let out = run_simulation(spec, &sched, pats.as_set(), &obj, Trajectory::Static, timing, SimulationOptions::default())
            .unwrap();
        // dt = 1 s, window covers 3 slots, starts 0..=9
        assert_eq!(out.frames.len(), 10);
        let contributions: Vec<(Exact, RawImage)> = (0..12)
            .map(|s| {
                let mask = place_pattern(&spec, &sched.slots()[s % 9], pats.as_set()).unwrap();
                let b = bucket_value(&mask, &obj).unwrap();
                (Exact::from_integer(s as i64), slot_contribution(&mask, b))
            })
            .collect();
        for (j, f) in out.frames.iter().enumerate() {
            let start = Exact::from_integer(j as i64);
            assert_eq!(f, &integrate_exposure(3, &contributions, start, start + Exact::new(5, 2)));
        }
    }

    #[test]
    fn noise_is_seeded_and_clamped() {
        let spec = PartitionSpec::new(3, 1).unwrap();
        let pats = reduced_patterns(3).unwrap();
        let sched = ScanSchedule::build(spec, OrderMode::PatternMajor);
        let obj = pinhole(3, 1, 1);
        let run = |seed| {
            let options = SimulationOptions { noise: Some(NoiseModel { sigma: 500.0, seed }), ..Default::default() };
            run_simulation(spec, &sched, pats.as_set(), &obj, Trajectory::Static, TimingConfig::<Exact>::default(), options)
                .unwrap()
        };
        let a = run(5);
        assert_eq!(a, run(5));
        assert_ne!(a.trace, run(6).trace);
        // sigma = 500 around buckets of 0 or 255: some values clamp to exactly 0
        assert!(a.trace.entries.iter().any(|e| e.values.contains(&0)));
        assert!(a.trace.entries.iter().any(|e| e.values.iter().any(|&v| v != 0 && v != 255)));
    }

    #[test]
    fn inconsistent_configuration_rejected() {
        let spec = PartitionSpec::new(35, 5).unwrap();
        let other = PartitionSpec::new(21, 3).unwrap();
        let pats = reduced_patterns(7).unwrap();
        let sched = ScanSchedule::build(other, OrderMode::PatternMajor);
        let obj = SceneObject::blank(35);
        let r = run_simulation(spec, &sched, pats.as_set(), &obj, Trajectory::Static, TimingConfig::<f64>::default(), SimulationOptions::default());
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
        let sched = ScanSchedule::build(spec, OrderMode::PatternMajor);
        let r = run_simulation(spec, &sched, pats.as_set(), &SceneObject::blank(34), Trajectory::Static, TimingConfig::<f64>::default(), SimulationOptions::default());
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn f64_time_agrees_with_exact_for_static_scene() {
        let spec = PartitionSpec::new(21, 3).unwrap();
        let pats = reduced_patterns(7).unwrap();
        let sched = ScanSchedule::build(spec, OrderMode::PatternMajor);
        let obj = SceneObject::from_fn(21, |r, c, _| ((r * c) % 256) as u8);
        let exact = run_simulation(spec, &sched, pats.as_set(), &obj, Trajectory::Static, TimingConfig::<Exact>::default(), SimulationOptions::default()).unwrap();
        let approx = run_simulation(spec, &sched, pats.as_set(), &obj, Trajectory::Static, TimingConfig::<f64>::default(), SimulationOptions::default()).unwrap();
        assert_eq!(exact.frames.len(), 1);
        assert_eq!(exact.frames[0].image, approx.frames[0].image);
    }
}
