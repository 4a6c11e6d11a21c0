//! Sylvester Hadamard matrices and the reduced binary pattern sets derived
//! from them.
//!
//! A reduced set is obtained from an order-`N_H` Hadamard matrix by mapping
//! −1 → 0 and +1 → 1 and then deleting the first row and the first column
//! (both constant after normalization, so they carry no spatial
//! information and only raise the background). What remains is `N = N_H − 1`
//! patterns of `N` pixels whose Gram matrix is exactly
//!
//! ```text
//! diag     = (N + 1)/2 − 1   (c_max)
//! off-diag = (N + 1)/4 − 1   (c_min)
//! ```
//!
//! Hadamard matrices of order `N_H > 2` can only exist when `N_H` is a
//! multiple of 4. Only the Sylvester doubling construction is provided, so
//! supported orders are the powers of two.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::netpbm::{self, PnmImage, PnmKind};
use crate::rng::SplitMix64;

fn check_order(order: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::UnsupportedOrder { order, reason: "order must be at least 2" });
    }
    if !order.is_power_of_two() {
        return Err(Error::UnsupportedOrder { order, reason: "order is not a power of 2" });
    }
    Ok(())
}

/// Normalized ±1 Hadamard matrix with `H·Hᵀ = order·I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    entries: Matrix<i8>,
}

impl HadamardMatrix {
    /// Validates a user-supplied matrix: square power-of-2 order, ±1
    /// entries, orthogonal rows and a normalized first row and column.
    pub fn from_matrix(entries: Matrix<i8>) -> Result<Self> {
        let order = entries.rows();
        if entries.cols() != order {
            return Err(Error::InvalidHadamard(format!(
                "matrix is {}x{}, not square",
                order,
                entries.cols()
            )));
        }
        check_order(order)?;
        if entries.as_slice().iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidHadamard("entries must be +1 or -1".into()));
        }
        if (0..order).any(|i| entries.get(0, i) != 1 || entries.get(i, 0) != 1) {
            return Err(Error::InvalidHadamard("first row and column must be all +1".into()));
        }
        let gram = entries.map(i64::from).gram();
        for i in 0..order {
            for j in 0..order {
                let want = if i == j { order as i64 } else { 0 };
                if gram.get(i, j) != want {
                    return Err(Error::InvalidHadamard(format!(
                        "rows {i} and {j} have inner product {}, expected {want}",
                        gram.get(i, j)
                    )));
                }
            }
        }
        Ok(HadamardMatrix { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix<i8> {
        &self.entries
    }
}

/// Sylvester construction `H_{2m} = [[H_m, H_m], [H_m, −H_m]]` from `H_1 = [1]`.
pub fn sylvester_hadamard(order: usize) -> Result<HadamardMatrix> {
    check_order(order)?;
    // entry (i, j) is (−1)^popcount(i & j)
    let entries = Matrix::from_fn(order, order, |i, j| {
        if (i & j).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    });
    Ok(HadamardMatrix { entries })
}

/// An ordered set of binary patterns of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    bits: Matrix<u8>,
}

impl PatternSet {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let bits = Matrix::from_rows(rows)
            .ok_or_else(|| Error::InvalidPatternSet("patterns have different lengths".into()))?;
        if bits.as_slice().iter().any(|&b| b > 1) {
            return Err(Error::InvalidPatternSet("pattern values must be 0 or 1".into()));
        }
        if bits.rows() == 0 || bits.cols() == 0 {
            return Err(Error::InvalidPatternSet("pattern set is empty".into()));
        }
        Ok(PatternSet { bits })
    }

    pub fn count(&self) -> usize {
        self.bits.rows()
    }

    pub fn pattern_length(&self) -> usize {
        self.bits.cols()
    }

    pub fn pattern(&self, index: usize) -> &[u8] {
        self.bits.row(index)
    }

    pub fn patterns(&self) -> impl Iterator<Item = &[u8]> {
        self.bits.iter_rows()
    }

    pub fn bits(&self) -> &Matrix<u8> {
        &self.bits
    }

    /// Pairwise inner products `P·Pᵀ`.
    pub fn gram(&self) -> Matrix<i64> {
        self.bits.map(i64::from).gram()
    }

    /// One line per pattern, space-separated `0`/`1`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.patterns() {
            let line: Vec<&str> = row.iter().map(|&b| if b == 1 { "1" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| match tok {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(format!("line {}: expected 0 or 1, found {other:?}", lineno + 1)),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        PatternSet::from_rows(&rows).map_err(|e| e.to_string())
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_text(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PatternSet::from_text(&text).map_err(|m| Error::format(path, m))
    }

    /// Writes `pattern_<index>.pgm` (1 row, 0/255) for every pattern into `dir`.
    pub fn write_pgms(&self, dir: &Path) -> Result<()> {
        for (i, row) in self.patterns().enumerate() {
            let img = PnmImage {
                kind: PnmKind::Gray,
                width: row.len(),
                height: 1,
                data: row.iter().map(|&b| b * 255).collect(),
            };
            netpbm::write_pnm(&dir.join(pgm_name(i)), &img)?;
        }
        Ok(())
    }

    /// Reads `pattern_0.pgm`, `pattern_1.pgm`, ... from `dir` until the next
    /// index is missing. Each image's pixels, row-major, form one pattern.
    pub fn read_pgms(dir: &Path) -> Result<Self> {
        let mut rows = Vec::new();
        loop {
            let path = dir.join(pgm_name(rows.len()));
            if !path.exists() {
                break;
            }
            let img = netpbm::read_pnm(&path)?;
            if img.kind != PnmKind::Gray {
                return Err(Error::format(&path, "pattern images must be P5 graymaps"));
            }
            let row = img
                .data
                .iter()
                .map(|&v| match v {
                    0 => Ok(0u8),
                    255 => Ok(1u8),
                    other => Err(Error::format(&path, format!("pixel value {other} is neither 0 nor 255"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::format(dir, "no pattern_0.pgm found"));
        }
        PatternSet::from_rows(&rows)
    }
}

fn pgm_name(index: usize) -> String {
    format!("pattern_{index}.pgm")
}

/// `N` binary patterns of length `N` derived from an order-`N + 1` Hadamard
/// matrix, with the exact Gram structure described at module level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedPatternSet {
    set: PatternSet,
}

impl ReducedPatternSet {
    /// Accepts an arbitrary pattern set if it has the reduced-Hadamard Gram
    /// structure (for example one read back from disk).
    pub fn try_from_set(set: PatternSet) -> Result<Self> {
        let n = set.pattern_length();
        if set.count() != n {
            return Err(Error::InvalidPatternSet(format!(
                "{} patterns of length {n}; a reduced set is square",
                set.count()
            )));
        }
        check_order(n + 1)?;
        let c_max = (n as i64 + 1) / 2 - 1;
        let c_min = (n as i64 + 1) / 4 - 1;
        let gram = set.gram();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { c_max } else { c_min };
                if gram.get(i, j) != want {
                    return Err(Error::InvalidPatternSet(format!(
                        "inner product of patterns {i} and {j} is {}, expected {want}",
                        gram.get(i, j)
                    )));
                }
            }
        }
        Ok(ReducedPatternSet { set })
    }

    /// `N`, the number of pixels per pattern (and number of patterns).
    pub fn pattern_length(&self) -> usize {
        self.set.pattern_length()
    }

    pub fn pattern(&self, index: usize) -> &[u8] {
        self.set.pattern(index)
    }

    pub fn as_set(&self) -> &PatternSet {
        &self.set
    }

    /// The order-2 reduction leaves a single all-dark pixel that cannot image anything.
    pub fn is_degenerate(&self) -> bool {
        self.pattern_length() == 1
    }

    pub fn gram(&self) -> Matrix<i64> {
        self.set.gram()
    }

    pub fn coefficients(&self) -> Result<GramCoefficients> {
        gram_coefficients(self.pattern_length())
    }
}

/// Map ±1 → 1/0 and drop the first row and column.
pub fn reduce(h: &HadamardMatrix) -> ReducedPatternSet {
    let n = h.order() - 1;
    let bits = Matrix::from_fn(n, n, |r, c| u8::from(h.entries().get(r + 1, c + 1) == 1));
    ReducedPatternSet { set: PatternSet { bits } }
}

/// Convenience for `reduce(&sylvester_hadamard(n + 1)?)`.
pub fn reduced_patterns(pattern_length: usize) -> Result<ReducedPatternSet> {
    Ok(reduce(&sylvester_hadamard(pattern_length + 1)?))
}

/// Diagonal and off-diagonal value of a reduced set's Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GramCoefficients {
    pub c_min: u64,
    pub c_max: u64,
}

impl GramCoefficients {
    /// Reconstruction value of a lit pixel when `n_obj` pixels of the cell are lit
    /// (unit transmission): `c_max + (n_obj − 1)·c_min`.
    pub fn lit_value(&self, n_obj: u64) -> u64 {
        self.c_max + n_obj.saturating_sub(1) * self.c_min
    }

    /// Reconstruction value of a dark pixel: `n_obj·c_min`.
    pub fn dark_value(&self, n_obj: u64) -> u64 {
        n_obj * self.c_min
    }
}

pub fn gram_coefficients(pattern_length: usize) -> Result<GramCoefficients> {
    check_order(pattern_length + 1)?;
    if pattern_length < 3 {
        return Err(Error::UnsupportedOrder {
            order: pattern_length + 1,
            reason: "Gram coefficients need pattern length >= 3",
        });
    }
    let order = pattern_length as u64 + 1;
    Ok(GramCoefficients { c_min: order / 4 - 1, c_max: order / 2 - 1 })
}

/// `count` patterns of `pattern_length` independent fair bits drawn row-major
/// from [`SplitMix64`] seeded with `seed` (one generator output per bit).
pub fn random_pattern_set(pattern_length: usize, count: usize, seed: u64) -> Result<PatternSet> {
    if pattern_length == 0 || count == 0 {
        return Err(Error::InvalidPatternSet(format!(
            "random set needs pattern length >= 1 and count >= 1 (got {pattern_length}, {count})"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let bits = Matrix::from_fn(count, pattern_length, |_, _| u8::from(rng.next_bit()));
    Ok(PatternSet { bits })
}
