//! Row-part / cell partition of the object and the rotating-disk scan
//! schedule.
//!
//! The `n × n` object is split into `n` row parts of `1 × n` pixels, and each
//! row part into `k` cells of `1 × n_cell`. Every cell is imaged by the full
//! reduced Hadamard set of length `n_cell`. One disk revolution visits every
//! `(row, cell, pattern)` triple once, so a revolution has `n · k · n_cell = n²`
//! slots of equal duration.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use regex::Regex;

use crate::error::{Error, Result};
use crate::hadamard::PatternSet;
use crate::matrix::Matrix;

/// Partition of an `n × n` object into row parts and `k` cells per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartitionSpec {
    n: usize,
    k: usize,
    n_cell: usize,
}

impl PartitionSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidPartition(format!("n and k must be positive (n={n}, k={k})")));
        }
        if !n.is_multiple_of(k) {
            return Err(Error::InvalidPartition(format!("k={k} does not divide n={n}")));
        }
        let n_cell = n / k;
        if n_cell < 3 {
            return Err(Error::InvalidPartition(format!("n_cell = n/k = {n_cell} is below 3")));
        }
        if !(n_cell + 1).is_power_of_two() {
            return Err(Error::InvalidPartition(format!(
                "n_cell + 1 = {} is not a power of 2, so no Sylvester Hadamard order exists for n_cell = {n_cell}",
                n_cell + 1
            )));
        }
        Ok(PartitionSpec { n, k, n_cell })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_cell(&self) -> usize {
        self.n_cell
    }

    pub fn slots_per_revolution(&self) -> usize {
        self.n * self.n
    }

    /// Columns `[start, end)` covered by `cell`.
    pub fn cell_columns(&self, cell: usize) -> std::ops::Range<usize> {
        cell * self.n_cell..(cell + 1) * self.n_cell
    }

    /// Cell index containing column `col`.
    pub fn cell_of(&self, col: usize) -> usize {
        col / self.n_cell
    }
}

/// Alias matching the construction operation's name.
pub fn make_spec(n: usize, k: usize) -> Result<PartitionSpec> {
    PartitionSpec::new(n, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderMode {
    /// Each cell receives its whole pattern set before moving on.
    PartMajor,
    /// One pattern sweeps every row part top to bottom (and every cell)
    /// before the next pattern is used.
    #[default]
    PatternMajor,
}

impl OrderMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderMode::PartMajor => "part_major",
            OrderMode::PatternMajor => "pattern_major",
        }
    }
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "part_major" => Ok(OrderMode::PartMajor),
            "pattern_major" => Ok(OrderMode::PatternMajor),
            other => Err(format!("unknown order {other:?}; expected part_major or pattern_major")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotDescriptor {
    pub slot_index: usize,
    pub row: usize,
    pub cell: usize,
    pub pattern_index: usize,
}

/// One revolution's worth of illumination slots in projection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSchedule {
    spec: PartitionSpec,
    order_mode: OrderMode,
    slots: Vec<SlotDescriptor>,
}

impl ScanSchedule {
    pub fn build(spec: PartitionSpec, order_mode: OrderMode) -> Self {
        let (n, k, nc) = (spec.n, spec.k, spec.n_cell);
        let mut slots = Vec::with_capacity(spec.slots_per_revolution());
        let mut push = |row, cell, pattern_index| {
            let slot_index = slots.len();
            slots.push(SlotDescriptor { slot_index, row, cell, pattern_index });
        };
        match order_mode {
            OrderMode::PartMajor => {
                for row in 0..n {
                    for cell in 0..k {
                        for p in 0..nc {
                            push(row, cell, p);
                        }
                    }
                }
            }
            OrderMode::PatternMajor => {
                for p in 0..nc {
                    for row in 0..n {
                        for cell in 0..k {
                            push(row, cell, p);
                        }
                    }
                }
            }
        }
        ScanSchedule { spec, order_mode, slots }
    }

    /// Rebuilds a schedule from imported slots, checking that slot indices run
    /// `0..n²` in order and that every `(row, cell, pattern)` appears exactly once.
    pub fn from_slots(spec: PartitionSpec, order_mode: OrderMode, slots: Vec<SlotDescriptor>) -> Result<Self> {
        if slots.len() != spec.slots_per_revolution() {
            return Err(Error::InvalidPartition(format!(
                "schedule has {} slots, a revolution needs {}",
                slots.len(),
                spec.slots_per_revolution()
            )));
        }
        let mut seen = HashSet::with_capacity(slots.len());
        for (i, s) in slots.iter().enumerate() {
            if s.slot_index != i {
                return Err(Error::InvalidPartition(format!("slot {i} carries index {}", s.slot_index)));
            }
            if s.row >= spec.n || s.cell >= spec.k || s.pattern_index >= spec.n_cell {
                return Err(Error::InvalidPartition(format!("slot {i} is out of range: {s:?}")));
            }
            if !seen.insert((s.row, s.cell, s.pattern_index)) {
                return Err(Error::InvalidPartition(format!(
                    "slot {i} repeats (row {}, cell {}, pattern {})",
                    s.row, s.cell, s.pattern_index
                )));
            }
        }
        Ok(ScanSchedule { spec, order_mode, slots })
    }

    pub fn spec(&self) -> &PartitionSpec {
        &self.spec
    }

    pub fn order_mode(&self) -> OrderMode {
        self.order_mode
    }

    pub fn slots(&self) -> &[SlotDescriptor] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv_writer();
        w.write_record(["slot", "row", "cell", "pattern"]).expect("in-memory write");
        for s in &self.slots {
            w.serialize((s.slot_index, s.row, s.cell, s.pattern_index)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Parses a `slot,row,cell,pattern` CSV back into a schedule for `spec`.
    /// The order mode is inferred by comparing against both canonical orders.
    pub fn read_csv(path: &Path, spec: PartitionSpec) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
        let headers = reader.headers().map_err(|e| Error::format(path, e.to_string()))?;
        if headers != vec!["slot", "row", "cell", "pattern"] {
            return Err(Error::format(path, "header must be slot,row,cell,pattern"));
        }
        let mut slots = Vec::new();
        for rec in reader.deserialize::<(usize, usize, usize, usize)>() {
            let (slot_index, row, cell, pattern_index) = rec.map_err(|e| Error::format(path, e.to_string()))?;
            slots.push(SlotDescriptor { slot_index, row, cell, pattern_index });
        }
        let mode = [OrderMode::PatternMajor, OrderMode::PartMajor]
            .into_iter()
            .find(|&m| ScanSchedule::build(spec, m).slots == slots)
            .unwrap_or_default();
        ScanSchedule::from_slots(spec, mode, slots)
    }
}

pub fn build_schedule(spec: PartitionSpec, order_mode: OrderMode) -> ScanSchedule {
    ScanSchedule::build(spec, order_mode)
}

pub(crate) fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

pub(crate) fn check_patterns(spec: &PartitionSpec, patterns: &PatternSet) -> Result<()> {
    if patterns.pattern_length() != spec.n_cell || patterns.count() != spec.n_cell {
        return Err(Error::DimensionMismatch(format!(
            "pattern set is {} x {}, the partition needs {} patterns of length {}",
            patterns.count(),
            patterns.pattern_length(),
            spec.n_cell,
            spec.n_cell
        )));
    }
    Ok(())
}

/// Frame coordinates `(row, col)` lit during `slot`.
pub fn lit_pixels<'a>(
    spec: &PartitionSpec,
    slot: &SlotDescriptor,
    patterns: &'a PatternSet,
) -> impl Iterator<Item = (usize, usize)> + 'a {
    let row = slot.row;
    let offset = slot.cell * spec.n_cell;
    patterns
        .pattern(slot.pattern_index)
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(move |(j, _)| (row, offset + j))
}

/// Full-frame `n × n` binary mask of `slot`: zero except the slot's cell,
/// which holds its pattern.
pub fn place_pattern(spec: &PartitionSpec, slot: &SlotDescriptor, patterns: &PatternSet) -> Result<Matrix<u8>> {
    check_patterns(spec, patterns)?;
    let mut mask = Matrix::zeros(spec.n, spec.n);
    for (r, c) in lit_pixels(spec, slot, patterns) {
        mask.set(r, c, 1);
    }
    Ok(mask)
}

/// Presentation-only disk dimensions in millimeters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskGeometry {
    pub radius_mm: f64,
    pub track_pitch_mm: f64,
}

impl Default for DiskGeometry {
    fn default() -> Self {
        DiskGeometry { radius_mm: 60.0, track_pitch_mm: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoleGroup {
    pub slot: SlotDescriptor,
    pub angle_deg: f64,
    pub track: usize,
    pub bits: Vec<u8>,
}

/// Physical arrangement of one revolution: one hole group per slot at
/// uniform angular spacing, on one concentric track per row part.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskLayout {
    pub spec: PartitionSpec,
    pub order_mode: OrderMode,
    pub geometry: DiskGeometry,
    pub holes: Vec<HoleGroup>,
}

impl DiskLayout {
    pub fn track_count(&self) -> usize {
        self.spec.n
    }

    pub fn angular_spacing_deg(&self) -> f64 {
        360.0 / self.spec.slots_per_revolution() as f64
    }

    pub fn track_radius(&self, track: usize) -> f64 {
        self.geometry.radius_mm - track as f64 * self.geometry.track_pitch_mm
    }

    pub fn lit_bit_count(&self) -> usize {
        self.holes.iter().map(|h| h.bits.iter().filter(|&&b| b == 1).count()).sum()
    }

    /// Deterministic SVG: one `<g>` per track, one `<g class="hole-group">`
    /// per slot carrying its descriptor as `data-*` attributes, one `<rect>`
    /// per lit pattern bit.
    pub fn to_svg(&self) -> String {
        use std::fmt::Write;

        let r = self.geometry.radius_mm;
        let bit = self.geometry.track_pitch_mm * 0.8;
        let margin = 2.0 * self.geometry.track_pitch_mm;
        let size = 2.0 * (r + margin);
        let c = r + margin;
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.4}mm\" height=\"{size:.4}mm\" \
             viewBox=\"0 0 {size:.4} {size:.4}\" data-n=\"{}\" data-k=\"{}\" data-order=\"{}\" \
             data-radius=\"{r:.4}\" data-pitch=\"{:.4}\">",
            self.spec.n, self.spec.k, self.order_mode, self.geometry.track_pitch_mm
        );
        let _ = writeln!(s, "<circle cx=\"{c:.4}\" cy=\"{c:.4}\" r=\"{r:.4}\" fill=\"none\" stroke=\"black\" stroke-width=\"0.1\"/>");
        for track in 0..self.track_count() {
            let tr = self.track_radius(track);
            let _ = writeln!(s, "<g id=\"track-{track}\" data-track=\"{track}\">");
            for h in self.holes.iter().filter(|h| h.track == track) {
                let _ = writeln!(
                    s,
                    "<g class=\"hole-group\" data-slot=\"{}\" data-row=\"{}\" data-cell=\"{}\" data-pattern=\"{}\" \
                     transform=\"rotate({:.6} {c:.4} {c:.4})\">",
                    h.slot.slot_index, h.slot.row, h.slot.cell, h.slot.pattern_index, h.angle_deg
                );
                let half = h.bits.len() as f64 / 2.0;
                for (j, _) in h.bits.iter().enumerate().filter(|(_, &b)| b == 1) {
                    let _ = writeln!(
                        s,
                        "<rect x=\"{:.4}\" y=\"{:.4}\" width=\"{bit:.4}\" height=\"{bit:.4}\"/>",
                        c + tr - bit / 2.0,
                        c + (j as f64 - half) * bit,
                    );
                }
                s.push_str("</g>\n");
            }
            s.push_str("</g>\n");
        }
        s.push_str("</svg>\n");
        s
    }

    pub fn write_svg(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_svg()).map_err(|e| Error::io(path, e))
    }

    /// Recovers the scan schedule encoded in an SVG written by [`DiskLayout::to_svg`].
    pub fn schedule_from_svg(svg: &str) -> std::result::Result<ScanSchedule, String> {
        let root = Regex::new(r#"data-n="(\d+)" data-k="(\d+)" data-order="(\w+)""#).expect("valid regex");
        let caps = root.captures(svg).ok_or("missing data-n/data-k/data-order on <svg>")?;
        let n: usize = caps[1].parse().map_err(|_| "bad data-n")?;
        let k: usize = caps[2].parse().map_err(|_| "bad data-k")?;
        let order: OrderMode = caps[3].parse()?;
        let spec = PartitionSpec::new(n, k).map_err(|e| e.to_string())?;
        let hole = Regex::new(r#"data-slot="(\d+)" data-row="(\d+)" data-cell="(\d+)" data-pattern="(\d+)""#)
            .expect("valid regex");
        let mut slots: Vec<SlotDescriptor> = hole
            .captures_iter(svg)
            .map(|c| SlotDescriptor {
                slot_index: c[1].parse().unwrap_or(usize::MAX),
                row: c[2].parse().unwrap_or(usize::MAX),
                cell: c[3].parse().unwrap_or(usize::MAX),
                pattern_index: c[4].parse().unwrap_or(usize::MAX),
            })
            .collect();
        // groups are written per track; schedule order is slot order
        slots.sort_by_key(|s| s.slot_index);
        ScanSchedule::from_slots(spec, order, slots).map_err(|e| e.to_string())
    }

    pub fn read_schedule_from_svg(path: &Path) -> Result<ScanSchedule> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        DiskLayout::schedule_from_svg(&text).map_err(|m| Error::format(path, m))
    }
}

/// Places every slot of `schedule` at angle `slot · 360° / n²` on track `row`.
pub fn disk_layout(schedule: &ScanSchedule, patterns: &PatternSet, geometry: DiskGeometry) -> Result<DiskLayout> {
    let spec = *schedule.spec();
    check_patterns(&spec, patterns)?;
    if !(geometry.radius_mm > 0.0 && geometry.radius_mm.is_finite())
        || !(geometry.track_pitch_mm > 0.0 && geometry.track_pitch_mm.is_finite())
    {
        return Err(Error::InvalidGeometry(format!(
            "radius ({}) and track pitch ({}) must be positive",
            geometry.radius_mm, geometry.track_pitch_mm
        )));
    }
    let innermost = geometry.radius_mm - (spec.n as f64 - 1.0) * geometry.track_pitch_mm;
    if innermost <= 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "{} tracks at pitch {} mm do not fit in radius {} mm",
            spec.n, geometry.track_pitch_mm, geometry.radius_mm
        )));
    }
    let count = schedule.len() as f64;
    let holes = schedule
        .slots()
        .iter()
        .map(|s| HoleGroup {
            slot: *s,
            angle_deg: s.slot_index as f64 * 360.0 / count,
            track: s.row,
            bits: patterns.pattern(s.pattern_index).to_vec(),
        })
        .collect();
    Ok(DiskLayout { spec, order_mode: schedule.order_mode(), geometry, holes })
}
