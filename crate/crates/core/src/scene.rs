//! Transmissive objects: 8-bit RGB transmission maps, the bundled letter
//! targets and integer-pixel motion.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::netpbm::{self, PnmImage, PnmKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Red,
    Green,
    Blue,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Red, Channel::Green, Channel::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Red => "red",
            Channel::Green => "green",
            Channel::Blue => "blue",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Green,
    Blue,
    White,
}

impl Color {
    pub fn channels(self) -> &'static [Channel] {
        match self {
            Color::Red => &[Channel::Red],
            Color::Green => &[Channel::Green],
            Color::Blue => &[Channel::Blue],
            Color::White => &Channel::ALL,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::White => "white",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "red" => Ok(Color::Red),
            "green" => Ok(Color::Green),
            "blue" => Ok(Color::Blue),
            "white" => Ok(Color::White),
            other => Err(format!("unknown color {other:?}; expected red, green, blue or white")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    X,
    J,
    T,
    U,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::X, Letter::J, Letter::T, Letter::U];

    /// 7×7 stroke glyph, `#` = stroke.
    pub fn glyph(self) -> [&'static str; GLYPH_SIZE] {
        match self {
            Letter::X => ["#.....#", ".#...#.", "..#.#..", "...#...", "..#.#..", ".#...#.", "#.....#"],
            Letter::J => ["..#####", "....#..", "....#..", "....#..", "#...#..", "#...#..", ".###..."],
            Letter::T => ["#######", "...#...", "...#...", "...#...", "...#...", "...#...", "...#..."],
            Letter::U => ["#.....#", "#.....#", "#.....#", "#.....#", "#.....#", "#.....#", ".#####."],
        }
    }

    /// Color each letter is shown in for the colored-object demonstration.
    pub fn demo_color(self) -> Color {
        match self {
            Letter::X => Color::Red,
            Letter::J => Color::Green,
            Letter::T => Color::Blue,
            Letter::U => Color::White,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'X',
            Letter::J => 'J',
            Letter::T => 'T',
            Letter::U => 'U',
        }
    }
}

impl FromStr for Letter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "X" | "x" => Ok(Letter::X),
            "J" | "j" => Ok(Letter::J),
            "T" | "t" => Ok(Letter::T),
            "U" | "u" => Ok(Letter::U),
            other => Err(format!("unsupported letter {other:?}; built-in letters are X, J, T and U")),
        }
    }
}

pub const GLYPH_SIZE: usize = 7;

/// Square RGB transmission map, 255 = fully transparent, 0 = opaque.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneObject {
    n: usize,
    planes: [Vec<u8>; 3],
}

/// The transmission map in effect during one slot.
pub type SceneFrame = SceneObject;

impl SceneObject {
    pub fn blank(n: usize) -> Self {
        SceneObject { n, planes: [vec![0; n * n], vec![0; n * n], vec![0; n * n]] }
    }

    pub fn from_planes(n: usize, planes: [Vec<u8>; 3]) -> Result<Self> {
        if planes.iter().any(|p| p.len() != n * n) {
            return Err(Error::DimensionMismatch(format!("every plane must hold {n}x{n} values")));
        }
        Ok(SceneObject { n, planes })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, Channel) -> u8) -> Self {
        let mut obj = SceneObject::blank(n);
        for ch in Channel::ALL {
            for r in 0..n {
                for c in 0..n {
                    obj.planes[ch.index()][r * n + c] = f(r, c, ch);
                }
            }
        }
        obj
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize, ch: Channel) -> u8 {
        self.planes[ch.index()][row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, ch: Channel, v: u8) {
        self.planes[ch.index()][row * self.n + col] = v;
    }

    pub fn plane(&self, ch: Channel) -> &[u8] {
        &self.planes[ch.index()]
    }

    /// Pixels of `ch` within columns `cols` of `row` that transmit any light.
    pub fn lit_count(&self, row: usize, cols: std::ops::Range<usize>, ch: Channel) -> usize {
        cols.filter(|&c| self.get(row, c, ch) > 0).count()
    }

    /// Pixelwise sum, `None` if any value would exceed 255.
    pub fn checked_add(&self, other: &SceneObject) -> Option<SceneObject> {
        if self.n != other.n {
            return None;
        }
        let mut out = self.clone();
        for ch in 0..3 {
            for (a, &b) in out.planes[ch].iter_mut().zip(&other.planes[ch]) {
                *a = a.checked_add(b)?;
            }
        }
        Some(out)
    }

    pub fn to_pnm(&self) -> PnmImage {
        let mut data = Vec::with_capacity(self.n * self.n * 3);
        for i in 0..self.n * self.n {
            data.extend(self.planes.iter().map(|p| p[i]));
        }
        PnmImage { kind: PnmKind::Rgb, width: self.n, height: self.n, data }
    }

    /// P6 is copied verbatim; P5 is broadcast to all three channels.
    pub fn from_pnm(img: &PnmImage, n: usize) -> std::result::Result<Self, String> {
        if img.width != n || img.height != n {
            return Err(format!("dimension mismatch: image is {}x{}, expected {n}x{n}", img.width, img.height));
        }
        let mut obj = SceneObject::blank(n);
        let stride = img.kind.channels();
        for i in 0..n * n {
            for ch in 0..3 {
                obj.planes[ch][i] = img.data[i * stride + if stride == 3 { ch } else { 0 }];
            }
        }
        Ok(obj)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        netpbm::write_pnm(path, &self.to_pnm())
    }

    pub fn load(path: &Path, n: usize) -> Result<Self> {
        let img = netpbm::read_pnm(path)?;
        SceneObject::from_pnm(&img, n).map_err(|m| Error::format(path, m))
    }
}

/// Letter raster scaled from its 7×7 glyph to `n × n` by nearest neighbor,
/// 255 on stroke pixels in the color's channels.
pub fn builtin_letter(letter: Letter, n: usize, color: Color) -> Result<SceneObject> {
    if n < GLYPH_SIZE {
        return Err(Error::OutOfRange(format!("letter targets need n >= {GLYPH_SIZE}, got {n}")));
    }
    let glyph = letter.glyph();
    let lit = |r: usize, c: usize| glyph[r * GLYPH_SIZE / n].as_bytes()[c * GLYPH_SIZE / n] == b'#';
    Ok(SceneObject::from_fn(n, |r, c, ch| {
        if lit(r, c) && color.channels().contains(&ch) {
            255
        } else {
            0
        }
    }))
}

pub fn load_object(path: &Path, n: usize) -> Result<SceneObject> {
    SceneObject::load(path, n)
}

/// Object motion; velocities in pixels per second, `+x` right, `+y` down.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Trajectory<S> {
    #[default]
    Static,
    Linear { vx: S, vy: S },
}

impl<S: Scalar> Trajectory<S> {
    /// Integer `(dx, dy)` displacement at time `t`, nearest-integer of `v·t`.
    pub fn offset_at(&self, t: S) -> (i64, i64) {
        match *self {
            Trajectory::Static => (0, 0),
            Trajectory::Linear { vx, vy } => ((vx * t).round_to_i64(), (vy * t).round_to_i64()),
        }
    }
}

/// Translates `object` by `(dx, dy)`; uncovered pixels are opaque.
pub fn translate(object: &SceneObject, dx: i64, dy: i64) -> SceneFrame {
    let n = object.n as i64;
    let mut out = SceneObject::blank(object.n);
    if dx.abs() >= n || dy.abs() >= n {
        return out;
    }
    for r in 0..n {
        let sr = r - dy;
        if !(0..n).contains(&sr) {
            continue;
        }
        for c in 0..n {
            let sc = c - dx;
            if !(0..n).contains(&sc) {
                continue;
            }
            for ch in 0..3 {
                out.planes[ch][(r * n + c) as usize] = object.planes[ch][(sr * n + sc) as usize];
            }
        }
    }
    out
}

pub fn sample_scene<S: Scalar>(object: &SceneObject, trajectory: &Trajectory<S>, t: S) -> SceneFrame {
    match trajectory {
        Trajectory::Static => object.clone(),
        _ => {
            let (dx, dy) = trajectory.offset_at(t);
            translate(object, dx, dy)
        }
    }
}
