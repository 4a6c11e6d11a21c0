//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};

use ghostdisk::optics::{MotionSampling, NoiseModel, SimulationOptions, WindowMode};
use ghostdisk::scalar::{format_exact, parse_exact};
use ghostdisk::{
    builtin_letter, reduced_patterns, Color, DiskGeometry, Exact, Letter, Motion, OrderMode, PartitionSpec,
    ReducedPatternSet, ScanSchedule, SceneObject, Timing,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryMode {
    Static,
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub k: usize,
    pub order: OrderMode,
    pub letter: Letter,
    pub object: Option<PathBuf>,
    pub color: Color,
    pub trajectory: TrajectoryMode,
    pub velocity_x: Exact,
    pub velocity_y: Exact,
    pub motion_sampling: MotionSampling,
    pub revolution_period: Exact,
    pub window: Exact,
    pub window_mode: WindowMode,
    pub duration: Exact,
    pub noise_sigma: f64,
    pub seed: u64,
    pub parallel: bool,
    pub disk_radius: f64,
    pub track_pitch: f64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fifth = Exact::new(1, 5);
        RunConfig {
            n: 35,
            k: 5,
            order: OrderMode::PatternMajor,
            letter: Letter::U,
            object: None,
            color: Color::White,
            trajectory: TrajectoryMode::Static,
            velocity_x: Exact::from_integer(5),
            velocity_y: Exact::from_integer(0),
            motion_sampling: MotionSampling::PerSlot,
            revolution_period: fifth,
            window: fifth,
            window_mode: WindowMode::Tumbling,
            duration: fifth,
            noise_sigma: 0.0,
            seed: 0,
            parallel: true,
            disk_radius: 60.0,
            track_pitch: 1.0,
            out: PathBuf::from("out"),
        }
    }
}

pub const KEYS: [&str; 20] = [
    "n",
    "k",
    "order",
    "letter",
    "object",
    "color",
    "trajectory",
    "velocity_x",
    "velocity_y",
    "motion_sampling",
    "revolution_period",
    "window",
    "window_mode",
    "duration",
    "noise_sigma",
    "seed",
    "parallel",
    "disk_radius",
    "track_pitch",
    "out",
];

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key} = {value:?}: {why}"))
}

fn exact(key: &str, value: &str) -> Result<Exact, CliError> {
    parse_exact(value).ok_or_else(|| bad(key, value, "expected a decimal or fraction"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| bad(key, value, e))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "n" => self.n = parse(key, v)?,
            "k" => self.k = parse(key, v)?,
            "order" => self.order = parse(key, v)?,
            "letter" => self.letter = parse(key, v)?,
            "object" => self.object = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "color" => self.color = parse(key, v)?,
            "trajectory" => {
                self.trajectory = match v {
                    "static" => TrajectoryMode::Static,
                    "linear" => TrajectoryMode::Linear,
                    _ => return Err(bad(key, v, "expected static or linear")),
                }
            }
            "velocity_x" => self.velocity_x = exact(key, v)?,
            "velocity_y" => self.velocity_y = exact(key, v)?,
            "motion_sampling" => self.motion_sampling = parse(key, v)?,
            "revolution_period" => self.revolution_period = exact(key, v)?,
            "window" => self.window = exact(key, v)?,
            "window_mode" => self.window_mode = parse(key, v)?,
            "duration" => self.duration = exact(key, v)?,
            "noise_sigma" => self.noise_sigma = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "parallel" => self.parallel = parse(key, v)?,
            "disk_radius" => self.disk_radius = parse(key, v)?,
            "track_pitch" => self.track_pitch = parse(key, v)?,
            "out" => self.out = PathBuf::from(v),
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a config file: `key = value` per line, `#` comments, blank
    /// lines ignored, unknown or repeated keys rejected.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!("line {}: key {key:?} given twice", i + 1)));
            }
            self.set(key, value).map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> String {
        match key {
            "n" => self.n.to_string(),
            "k" => self.k.to_string(),
            "order" => self.order.to_string(),
            "letter" => self.letter.as_char().to_string(),
            "object" => self.object.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "color" => self.color.to_string(),
            "trajectory" => match self.trajectory {
                TrajectoryMode::Static => "static".into(),
                TrajectoryMode::Linear => "linear".into(),
            },
            "velocity_x" => format_exact(self.velocity_x),
            "velocity_y" => format_exact(self.velocity_y),
            "motion_sampling" => self.motion_sampling.to_string(),
            "revolution_period" => format_exact(self.revolution_period),
            "window" => format_exact(self.window),
            "window_mode" => self.window_mode.to_string(),
            "duration" => format_exact(self.duration),
            "noise_sigma" => self.noise_sigma.to_string(),
            "seed" => self.seed.to_string(),
            "parallel" => self.parallel.to_string(),
            "disk_radius" => self.disk_radius.to_string(),
            "track_pitch" => self.track_pitch.to_string(),
            "out" => self.out.display().to_string(),
            other => unreachable!("unknown key {other}"),
        }
    }

    /// Resolved configuration as a loadable config file.
    pub fn manifest(&self) -> String {
        KEYS.iter().map(|k| format!("{k} = {}\n", self.get(k))).collect()
    }

    /// Checks every rule and builds all inputs except the scene object.
    pub fn resolve(&self) -> Result<ResolvedRun, CliError> {
        let spec = PartitionSpec::new(self.n, self.k).map_err(|e| CliError::Config(e.to_string()))?;
        let timing = Timing {
            revolution_period: self.revolution_period,
            window: self.window,
            window_mode: self.window_mode,
            total_duration: self.duration,
        };
        timing.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(bad("noise_sigma", &self.noise_sigma.to_string(), "must be a finite value >= 0"));
        }
        let geometry = DiskGeometry { radius_mm: self.disk_radius, track_pitch_mm: self.track_pitch };
        if [geometry.radius_mm, geometry.track_pitch_mm].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err(CliError::Config("disk_radius and track_pitch must be positive".into()));
        }
        if geometry.radius_mm - (self.n as f64 - 1.0) * geometry.track_pitch_mm <= 0.0 {
            return Err(CliError::Config(format!(
                "{} tracks at pitch {} mm do not fit in disk_radius {} mm",
                self.n, self.track_pitch, self.disk_radius
            )));
        }
        let patterns = reduced_patterns(spec.n_cell()).map_err(|e| CliError::Internal(e.to_string()))?;
        let schedule = ScanSchedule::build(spec, self.order);
        let trajectory = match self.trajectory {
            TrajectoryMode::Static => Motion::Static,
            TrajectoryMode::Linear => Motion::Linear { vx: self.velocity_x, vy: self.velocity_y },
        };
        let options = SimulationOptions {
            motion_sampling: self.motion_sampling,
            noise: (self.noise_sigma > 0.0).then_some(NoiseModel { sigma: self.noise_sigma, seed: self.seed }),
            parallel: self.parallel,
        };
        Ok(ResolvedRun { spec, patterns, schedule, trajectory, timing, options, geometry })
    }

    /// Configured object file, or the built-in letter.
    pub fn scene_object(&self) -> Result<SceneObject, CliError> {
        match &self.object {
            Some(path) => Ok(ghostdisk::load_object(path, self.n)?),
            None => Ok(builtin_letter(self.letter, self.n, self.color)?),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub spec: PartitionSpec,
    pub patterns: ReducedPatternSet,
    pub schedule: ScanSchedule,
    pub trajectory: Motion,
    pub timing: Timing,
    pub options: SimulationOptions,
    pub geometry: DiskGeometry,
}
