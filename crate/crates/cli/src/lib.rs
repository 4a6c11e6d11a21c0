//! Command implementations behind the `ghostdisk` binary.
//!
//! Every command resolves and validates the whole [`RunConfig`] first and only
//! then creates the output directory, so a bad config never leaves partial
//! output behind.

use std::path::{Path, PathBuf};

use ghostdisk::optics::{read_raw_frame, write_frame_files};
use ghostdisk::{contrast_report, disk_layout, metrics::write_report_csv, run_simulation, Output, SceneObject};

pub mod config;

pub use config::{ResolvedRun, RunConfig, TrajectoryMode};

pub const MANIFEST: &str = "manifest.txt";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<ghostdisk::Error> for CliError {
    fn from(e: ghostdisk::Error) -> Self {
        use ghostdisk::Error as E;
        match e {
            E::Io { .. } => CliError::Io(e.to_string()),
            E::InconsistentFrame(_) | E::InvalidHadamard(_) => CliError::Internal(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Patterns,
    Schedule,
    Layout,
    Simulate,
    /// Report on a finished run directory, or simulate in memory when `None`.
    Report { run: Option<PathBuf> },
}

fn create_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_text(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(())
}

pub fn simulate(run: &ResolvedRun, object: &SceneObject) -> Result<Output, CliError> {
    run_simulation(
        run.spec,
        &run.schedule,
        run.patterns.as_set(),
        object,
        run.trajectory,
        run.timing,
        run.options,
    )
    .map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs one command and returns the files it wrote, in write order.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let run = cfg.resolve()?;
    let out = cfg.out.as_path();
    let mut written = Vec::new();
    match command {
        Command::Patterns => {
            create_out(out)?;
            let set = run.patterns.as_set();
            set.write_text(&out.join("patterns.txt"))?;
            written.push(out.join("patterns.txt"));
            set.write_pgms(out)?;
            written.extend((0..set.count()).map(|i| out.join(format!("pattern_{i}.pgm"))));
        }
        Command::Schedule => {
            create_out(out)?;
            write_text(out.join("schedule.csv"), &run.schedule.to_csv(), &mut written)?;
        }
        Command::Layout => {
            let layout = disk_layout(&run.schedule, run.patterns.as_set(), run.geometry)?;
            create_out(out)?;
            write_text(out.join("layout.svg"), &layout.to_svg(), &mut written)?;
            write_text(out.join("schedule.csv"), &run.schedule.to_csv(), &mut written)?;
        }
        Command::Simulate => {
            let output = simulate(&run, &cfg.scene_object()?)?;
            create_out(out)?;
            for (i, frame) in output.frames.iter().enumerate() {
                write_frame_files(out, i, frame)?;
                written.push(out.join(format!("frame_{i}.ppm")));
            }
            write_text(out.join("bucket.csv"), &output.trace.to_csv(), &mut written)?;
            write_text(out.join(MANIFEST), &cfg.manifest(), &mut written)?;
        }
        Command::Report { run: run_dir } => {
            let object = cfg.scene_object()?;
            let frame = match run_dir {
                Some(dir) => read_raw_frame(dir, 0, run.spec.n())?,
                None => simulate(&run, &object)?
                    .frames
                    .into_iter()
                    .next()
                    .ok_or_else(|| CliError::Config("duration is shorter than one window; no frame to report".into()))?
                    .image,
            };
            let rows = contrast_report(&frame, &run.spec, &object)?;
            create_out(out)?;
            let path = out.join("report.csv");
            write_report_csv(&path, &rows)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Config recorded by a previous `simulate` run in `dir`.
pub fn load_run_config(dir: &Path) -> Result<RunConfig, CliError> {
    RunConfig::load(&dir.join(MANIFEST))
}
