//! Contrast predictions, measured contrast, the dense measurement-matrix
//! oracle and exact object recovery.
//!
//! Within one cell the reconstruction of a binary object is
//! `G = (c_max − c_min)·x + c_min·Σx`, so a lit pixel reads
//! `Max = c_max + (N_obj − 1)·c_min` and a dark pixel `Min = N_obj·c_min`
//! (unit transmission), and the contrast `(Max − Min)/(Max + Min)` reduces to
//! `(1 + N) / (1 + N + 2·N_obj·(N − 3))`.

use std::path::Path;

use crate::disk::{check_patterns, csv_writer, lit_pixels, PartitionSpec, ScanSchedule};
use crate::error::{Error, Result};
use crate::hadamard::{gram_coefficients, GramCoefficients, PatternSet};
use crate::matrix::Matrix;
use crate::optics::RawImage;
use crate::scalar::Scalar;
use crate::scene::{Channel, SceneObject};
use crate::Exact;

/// Binary `m × n²` matrix whose row `s` is slot `s`'s flattened mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementMatrix {
    spec: PartitionSpec,
    rows: Matrix<u8>,
}

impl MeasurementMatrix {
    pub fn spec(&self) -> &PartitionSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &Matrix<u8> {
        &self.rows
    }

    /// `Aᵀ(A·x)` by dense integer products.
    pub fn oracle_reconstruct(&self, x: &[u64]) -> Result<Vec<u64>> {
        let a = &self.rows;
        if x.len() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "object vector has {} entries, matrix has {} columns",
                x.len(),
                a.cols()
            )));
        }
        let y: Vec<u64> = a
            .iter_rows()
            .map(|row| row.iter().zip(x).map(|(&m, &v)| u64::from(m) * v).sum())
            .collect();
        let mut out = vec![0u64; a.cols()];
        for (row, &yv) in a.iter_rows().zip(&y) {
            for (o, &m) in out.iter_mut().zip(row) {
                *o += u64::from(m) * yv;
            }
        }
        Ok(out)
    }

    /// Oracle applied to every channel of `object`.
    pub fn oracle_frame(&self, object: &SceneObject) -> Result<RawImage> {
        let mut planes: [Vec<u64>; 3] = Default::default();
        for ch in Channel::ALL {
            let x: Vec<u64> = object.plane(ch).iter().map(|&v| u64::from(v)).collect();
            planes[ch.index()] = self.oracle_reconstruct(&x)?;
        }
        RawImage::from_planes(self.spec.n(), planes)
    }
}

pub fn build_measurement_matrix(
    spec: &PartitionSpec,
    schedule: &ScanSchedule,
    patterns: &PatternSet,
) -> Result<MeasurementMatrix> {
    check_patterns(spec, patterns)?;
    if schedule.spec() != spec {
        return Err(Error::DimensionMismatch("schedule was built for a different partition".into()));
    }
    if schedule.len() != spec.slots_per_revolution() {
        return Err(Error::DimensionMismatch(format!(
            "measurement matrix needs exactly one revolution ({} slots), schedule has {}",
            spec.slots_per_revolution(),
            schedule.len()
        )));
    }
    let n = spec.n();
    let mut rows = Matrix::zeros(schedule.len(), n * n);
    for slot in schedule.slots() {
        for (r, c) in lit_pixels(spec, slot, patterns) {
            rows.set(slot.slot_index, r * n + c, 1);
        }
    }
    Ok(MeasurementMatrix { spec: *spec, rows })
}

fn check_n_obj(n: usize, n_obj: usize) -> Result<()> {
    if n_obj == 0 || n_obj > n {
        return Err(Error::OutOfRange(format!("N_obj must be in 1..={n}, got {n_obj}")));
    }
    Ok(())
}

fn reduced_formula<S: Scalar>(n: usize, n_obj: usize) -> S {
    let (n, n_obj) = (n as i64, n_obj as i64);
    S::from_fraction(1 + n, 1 + n + 2 * n_obj * (n - 3))
}

/// `(1 + N) / (1 + N + 2·N_obj·(N − 3))` for a supported pattern length `N`.
pub fn predicted_contrast_reduced<S: Scalar>(n: usize, n_obj: usize) -> Result<S> {
    gram_coefficients(n)?;
    check_n_obj(n, n_obj)?;
    Ok(reduced_formula(n, n_obj))
}

/// The same law evaluated at `N = n`, the length of a `1 × n` row part.
/// `n + 1` need not be a constructible Hadamard order.
pub fn predicted_contrast_part<S: Scalar>(n: usize, n_obj: usize) -> Result<S> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("row part length must be >= 3, got {n}")));
    }
    check_n_obj(n, n_obj)?;
    Ok(reduced_formula(n, n_obj))
}

/// `(1 + N_Cell) / (1 + N_Cell·(2·N_Cell − 5))`: a fully lit cell.
pub fn predicted_contrast_cell<S: Scalar>(n_cell: usize) -> Result<S> {
    gram_coefficients(n_cell)?;
    let n = n_cell as i64;
    Ok(S::from_fraction(1 + n, 1 + n * (2 * n - 5)))
}

/// `(Max − Min)/(Max + Min)` from the Gram coefficients directly.
pub fn model_contrast<S: Scalar>(coeffs: &GramCoefficients, n_obj: u64) -> S {
    let max = coeffs.lit_value(n_obj);
    let min = coeffs.dark_value(n_obj);
    ratio_or_zero(max, min)
}

fn ratio_or_zero<S: Scalar>(max: u64, min: u64) -> S {
    if max + min == 0 {
        return S::zero();
    }
    let g = num_integer::gcd(max - min, max + min).max(1);
    S::from_fraction(((max - min) / g) as i64, ((max + min) / g) as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    FullFrame,
    Cell { row: usize, cell: usize },
}

impl Region {
    fn pixels(&self, spec: &PartitionSpec) -> Result<Vec<(usize, usize)>> {
        match *self {
            Region::FullFrame => Ok((0..spec.n()).flat_map(|r| (0..spec.n()).map(move |c| (r, c))).collect()),
            Region::Cell { row, cell } => {
                if row >= spec.n() || cell >= spec.k() {
                    return Err(Error::OutOfRange(format!("cell (row {row}, cell {cell}) is outside the frame")));
                }
                Ok(spec.cell_columns(cell).map(|c| (row, c)).collect())
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Region::FullFrame => "frame".to_string(),
            Region::Cell { row, cell } => format!("r{row}c{cell}"),
        }
    }
}

/// In-region `(max − min)/(max + min)` of raw frame values; 0 when both are 0.
pub fn measured_contrast<S: Scalar>(frame: &RawImage, spec: &PartitionSpec, region: Region, ch: Channel) -> Result<S> {
    if frame.n() != spec.n() {
        return Err(Error::DimensionMismatch(format!("frame is {0}x{0}, spec is {1}x{1}", frame.n(), spec.n())));
    }
    let pixels = region.pixels(spec)?;
    let values = pixels.iter().map(|&(r, c)| frame.get(r, c, ch));
    let max = values.clone().max().ok_or_else(|| Error::OutOfRange("empty region".into()))?;
    let min = values.min().unwrap_or(0);
    Ok(ratio_or_zero(max, min))
}

/// Per-cell contrast of a binary object using the cell's background level.
///
/// The dark-pixel value `c_min·Σx` is inferred from the cell total
/// (`ΣG = (c_max + (N − 1)·c_min)·Σx`) instead of read from a dark pixel, so
/// the statistic is also defined for a fully lit cell. Max is the brightest
/// pixel of the cell. Equals [`measured_contrast`] whenever the cell holds a
/// dark pixel.
pub fn measured_cell_contrast<S: Scalar>(
    frame: &RawImage,
    spec: &PartitionSpec,
    row: usize,
    cell: usize,
    ch: Channel,
) -> Result<S> {
    let coeffs = gram_coefficients(spec.n_cell())?;
    let pixels = Region::Cell { row, cell }.pixels(spec)?;
    if frame.n() != spec.n() {
        return Err(Error::DimensionMismatch(format!("frame is {0}x{0}, spec is {1}x{1}", frame.n(), spec.n())));
    }
    let max = pixels.iter().map(|&(r, c)| frame.get(r, c, ch)).max().unwrap_or(0);
    let total: u64 = pixels.iter().map(|&(r, c)| frame.get(r, c, ch)).sum();
    let denom = coeffs.c_max + (spec.n_cell() as u64 - 1) * coeffs.c_min;
    // background = c_min·total/denom; scale everything by denom to stay integral
    let (hi, lo) = (max * denom, coeffs.c_min * total);
    if lo > hi {
        return Err(Error::InconsistentFrame(format!("cell r{row}c{cell}: background exceeds peak")));
    }
    Ok(ratio_or_zero(hi, lo))
}

/// Recovers one channel of the object from a one-revolution static frame by
/// inverting `G = (c_max − c_min)·x + c_min·Σ_cell x` cell by cell.
pub fn affine_invert_channel(frame: &RawImage, spec: &PartitionSpec, ch: Channel) -> Result<Vec<u64>> {
    let coeffs = gram_coefficients(spec.n_cell())?;
    if frame.n() != spec.n() {
        return Err(Error::DimensionMismatch(format!("frame is {0}x{0}, spec is {1}x{1}", frame.n(), spec.n())));
    }
    let n = spec.n();
    let nc = spec.n_cell() as u64;
    let gain = coeffs.c_max - coeffs.c_min;
    let total_gain = coeffs.c_max + (nc - 1) * coeffs.c_min;
    let mut out = vec![0u64; n * n];
    for row in 0..n {
        for cell in 0..spec.k() {
            let cols = spec.cell_columns(cell);
            let total: u64 = cols.clone().map(|c| frame.get(row, c, ch)).sum();
            if !total.is_multiple_of(total_gain) {
                return Err(Error::InconsistentFrame(format!(
                    "cell r{row}c{cell} {ch}: total {total} is not a multiple of {total_gain}"
                )));
            }
            let background = coeffs.c_min * (total / total_gain);
            for c in cols {
                let g = frame.get(row, c, ch);
                if g < background || !(g - background).is_multiple_of(gain) {
                    return Err(Error::InconsistentFrame(format!(
                        "pixel ({row}, {c}) {ch}: value {g} does not fit background {background} and gain {gain}"
                    )));
                }
                out[row * n + c] = (g - background) / gain;
            }
        }
    }
    Ok(out)
}

/// [`affine_invert_channel`] on all channels, requiring 8-bit results.
pub fn affine_invert(frame: &RawImage, spec: &PartitionSpec) -> Result<SceneObject> {
    let mut planes: [Vec<u8>; 3] = Default::default();
    for ch in Channel::ALL {
        planes[ch.index()] = affine_invert_channel(frame, spec, ch)?
            .into_iter()
            .map(|v| {
                u8::try_from(v).map_err(|_| {
                    Error::InconsistentFrame(format!("{ch}: recovered value {v} exceeds 255; frame spans several revolutions?"))
                })
            })
            .collect::<Result<_>>()?;
    }
    SceneObject::from_planes(spec.n(), planes)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContrastReport {
    pub region: Region,
    pub channel: Channel,
    pub n_obj: usize,
    /// `None` for gray-scale cells, which have no closed-form prediction.
    pub predicted: Option<Exact>,
    pub measured: Exact,
}

/// One row per cell and channel comparing the closed-form prediction with
/// the frame. A cell whose object pixels take a single nonzero value is
/// binary; it gets the `N_obj` prediction and [`measured_cell_contrast`].
/// Other cells get the raw in-cell statistic only. Empty cells report 0.
pub fn contrast_report(frame: &RawImage, spec: &PartitionSpec, object: &SceneObject) -> Result<Vec<ContrastReport>> {
    gram_coefficients(spec.n_cell())?;
    if object.n() != spec.n() {
        return Err(Error::DimensionMismatch("object and partition sizes differ".into()));
    }
    let mut out = Vec::with_capacity(spec.n() * spec.k() * 3);
    for row in 0..spec.n() {
        for cell in 0..spec.k() {
            let region = Region::Cell { row, cell };
            for ch in Channel::ALL {
                let mut lit: Vec<u8> =
                    spec.cell_columns(cell).map(|c| object.get(row, c, ch)).filter(|&v| v > 0).collect();
                lit.dedup();
                let n_obj = object.lit_count(row, spec.cell_columns(cell), ch);
                let (predicted, measured) = if n_obj == 0 {
                    (Some(Exact::from_integer(0)), measured_contrast(frame, spec, region, ch)?)
                } else if lit.iter().all(|&v| v == lit[0]) {
                    (
                        Some(predicted_contrast_reduced(spec.n_cell(), n_obj)?),
                        measured_cell_contrast(frame, spec, row, cell, ch)?,
                    )
                } else {
                    (None, measured_contrast(frame, spec, region, ch)?)
                };
                out.push(ContrastReport { region, channel: ch, n_obj, predicted, measured });
            }
        }
    }
    Ok(out)
}

pub fn report_csv(rows: &[ContrastReport]) -> String {
    let mut w = csv_writer();
    w.write_record(["region", "channel", "n_obj", "predicted_num", "predicted_den", "measured_num", "measured_den"])
        .expect("in-memory write");
    for r in rows {
        let (pn, pd) = match r.predicted {
            Some(p) => (p.numer().to_string(), p.denom().to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([
            r.region.label(),
            r.channel.name().to_string(),
            r.n_obj.to_string(),
            pn,
            pd,
            r.measured.numer().to_string(),
            r.measured.denom().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}

pub fn write_report_csv(path: &Path, rows: &[ContrastReport]) -> Result<()> {
    std::fs::write(path, report_csv(rows)).map_err(|e| Error::io(path, e))
}
