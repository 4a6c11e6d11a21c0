use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ghostdisk_cli::{execute, load_run_config, CliError, Command, RunConfig};

/// Rotating-disk Hadamard ghost imaging simulator.
#[derive(Parser)]
#[command(name = "ghostdisk", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the reduced pattern set as patterns.txt and pattern_<i>.pgm.
    Patterns(RunArgs),
    /// Write one revolution's slot order as schedule.csv.
    Schedule(RunArgs),
    /// Write the disk hole layout as layout.svg, plus schedule.csv.
    Layout(RunArgs),
    /// Simulate exposures: frame_<i>.ppm, raw channel text, bucket.csv, manifest.txt.
    Simulate(RunArgs),
    /// Compare measured and predicted contrast and write report.csv.
    Report {
        /// Directory of a previous `simulate` run; its manifest supplies the config.
        #[arg(long)]
        run: Option<PathBuf>,
        #[command(flatten)]
        args: RunArgs,
    },
}

/// Every flag overrides the config-file key of the same name.
#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// part_major or pattern_major
    #[arg(long)]
    order: Option<String>,
    /// X, J, T or U
    #[arg(long)]
    letter: Option<String>,
    /// PPM/PGM object file; replaces the built-in letter.
    #[arg(long)]
    object: Option<String>,
    /// red, green, blue or white
    #[arg(long)]
    color: Option<String>,
    /// static or linear
    #[arg(long)]
    trajectory: Option<String>,
    /// Pixels per second.
    #[arg(long)]
    velocity_x: Option<String>,
    #[arg(long)]
    velocity_y: Option<String>,
    /// slot or revolution
    #[arg(long)]
    motion_sampling: Option<String>,
    /// Seconds, as a decimal or fraction.
    #[arg(long)]
    revolution_period: Option<String>,
    #[arg(long)]
    window: Option<String>,
    /// tumbling or sliding
    #[arg(long)]
    window_mode: Option<String>,
    #[arg(long)]
    duration: Option<String>,
    #[arg(long)]
    noise_sigma: Option<String>,
    #[arg(long)]
    parallel: Option<String>,
    #[arg(long)]
    disk_radius: Option<String>,
    #[arg(long)]
    track_pitch: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let seed = self.seed.map(|s| s.to_string());
        [
            ("out", &self.out),
            ("seed", &seed),
            ("n", &self.n),
            ("k", &self.k),
            ("order", &self.order),
            ("letter", &self.letter),
            ("object", &self.object),
            ("color", &self.color),
            ("trajectory", &self.trajectory),
            ("velocity_x", &self.velocity_x),
            ("velocity_y", &self.velocity_y),
            ("motion_sampling", &self.motion_sampling),
            ("revolution_period", &self.revolution_period),
            ("window", &self.window),
            ("window_mode", &self.window_mode),
            ("duration", &self.duration),
            ("noise_sigma", &self.noise_sigma),
            ("parallel", &self.parallel),
            ("disk_radius", &self.disk_radius),
            ("track_pitch", &self.track_pitch),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect()
    }

    fn build(&self, base: Option<RunConfig>) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, base) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(base)) => base,
            (None, None) => RunConfig::default(),
        };
        for (key, value) in self.overrides() {
            cfg.set(key, &value)?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (command, cfg) = match cli.command {
        Cmd::Patterns(a) => (Command::Patterns, a.build(None)?),
        Cmd::Schedule(a) => (Command::Schedule, a.build(None)?),
        Cmd::Layout(a) => (Command::Layout, a.build(None)?),
        Cmd::Simulate(a) => (Command::Simulate, a.build(None)?),
        Cmd::Report { run, args } => {
            let mut cfg = match &run {
                Some(dir) => args.build(Some(load_run_config(dir)?))?,
                None => args.build(None)?,
            };
            if let (Some(dir), None) = (&run, &args.out) {
                cfg.out = dir.clone();
            }
            (Command::Report { run }, cfg)
        }
    };
    for path in execute(&command, &cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ghostdisk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
