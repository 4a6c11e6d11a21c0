//! Pattern design and simulation toolkit for all-optical ghost imaging with
//! a rotating light-modulation disk.
//!
//! The pipeline is:
//!
//! 1. [`hadamard`]: reduced Sylvester-Hadamard pattern sets with exact Gram
//!    structure, plus a seeded random baseline.
//! 2. [`disk`]: the row-part / cell partition of the object, the one-revolution
//!    scan schedule and the physical disk layout.
//! 3. [`scene`]: 8-bit RGB transmission objects, letter targets and motion.
//! 4. [`optics`]: per-slot bucket collection, optical multiplication and
//!    persistence-window integration.
//! 5. [`metrics`]: closed-form contrast laws, the dense `AᵀA·x` oracle and
//!    exact object recovery.
//!
//! Pixel data are integers end to end. Time and contrast are generic over
//! [`Scalar`]; the aliases below fix them to exact rationals.

pub mod disk;
pub mod error;
pub mod hadamard;
pub mod matrix;
pub mod metrics;
pub mod netpbm;
pub mod optics;
pub mod rng;
pub mod scalar;
pub mod scene;

pub use disk::{
    build_schedule, disk_layout, make_spec, place_pattern, DiskGeometry, DiskLayout, OrderMode, PartitionSpec,
    ScanSchedule, SlotDescriptor,
};
pub use error::{Error, Result};
pub use hadamard::{
    gram_coefficients, random_pattern_set, reduce, reduced_patterns, sylvester_hadamard, GramCoefficients,
    HadamardMatrix, PatternSet, ReducedPatternSet,
};
pub use matrix::Matrix;
pub use metrics::{
    affine_invert, build_measurement_matrix, contrast_report, measured_cell_contrast, measured_contrast,
    predicted_contrast_cell, predicted_contrast_part, predicted_contrast_reduced, ContrastReport,
    MeasurementMatrix, Region,
};
pub use optics::{
    bucket_value, integrate_exposure, run_simulation, slot_contribution, MotionSampling, NoiseModel, RawImage,
    SimulationOptions, SimulationOutput, WindowMode,
};
pub use scalar::Scalar;
pub use scene::{builtin_letter, load_object, sample_scene, Channel, Color, Letter, SceneFrame, SceneObject};

/// Exact rational scalar used for simulation time and contrast.
pub type Exact = num_rational::Ratio<i64>;

pub type Timing = optics::TimingConfig<Exact>;
pub type Motion = scene::Trajectory<Exact>;
pub type Frame = optics::ExposureFrame<Exact>;
pub type Trace = optics::BucketTrace<Exact>;
pub type Output = optics::SimulationOutput<Exact>;

pub type TimingF64 = optics::TimingConfig<f64>;
pub type MotionF64 = scene::Trajectory<f64>;
