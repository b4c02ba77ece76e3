//! Output formats: parameter dumps, CSV histories and PGM weight images.

use std::fs;
use std::io::Write;
use std::path::Path;

use awdo::{NetworkParams, NetworkShape};

use crate::CliError;

/// `u64` little-endian count followed by that many little-endian `f64`s.
pub fn encode_params(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * values.len());
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_params(bytes: &[u8]) -> Result<Vec<f64>, CliError> {
    let prefix: [u8; 8] = bytes
        .get(..8)
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| {
            CliError::Data(format!(
                "params file is {} bytes, too short for the length prefix",
                bytes.len()
            ))
        })?;
    let count = u64::from_le_bytes(prefix) as usize;
    let expected = count.checked_mul(8).and_then(|n| n.checked_add(8));
    if expected != Some(bytes.len()) {
        return Err(CliError::Data(format!(
            "params file declares {count} values but holds {} payload bytes",
            bytes.len() - 8
        )));
    }
    Ok(bytes[8..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Accumulates a CSV document with a fixed header. Floats use Rust's
/// shortest round-trip formatting, which is locale independent.
pub struct Csv {
    buf: Vec<u8>,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = Vec::new();
        writeln!(buf, "{}", header.join(",")).expect("in-memory write");
        Self {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[&dyn std::fmt::Display]) {
        assert_eq!(fields.len(), self.columns, "CSV row width");
        let line: Vec<String> = fields.iter().map(|f| f.to_string()).collect();
        writeln!(self.buf, "{}", line.join(",")).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Gray level used for a tile whose weights are all equal.
pub const CONSTANT_TILE_GRAY: u8 = 128;

/// Grid layout of the hidden-unit tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileLayout {
    pub side: usize,
    pub cols: usize,
    pub rows: usize,
}

impl TileLayout {
    /// Square tiles of `sqrt(input)` pixels, arranged in a near-square grid.
    pub fn for_shape(shape: NetworkShape) -> Result<Self, CliError> {
        let side = (shape.input as f64).sqrt().round() as usize;
        if side * side != shape.input {
            return Err(CliError::Data(format!(
                "input size {} is not a perfect square",
                shape.input
            )));
        }
        let cols = (shape.hidden as f64).sqrt().ceil() as usize;
        let rows = shape.hidden.div_ceil(cols);
        Ok(Self { side, cols, rows })
    }

    pub fn width(&self) -> usize {
        self.cols * self.side + (self.cols - 1)
    }

    pub fn height(&self) -> usize {
        self.rows * self.side + (self.rows - 1)
    }
}

/// Renders each hidden unit's input weights (bias excluded) as one tile,
/// min-max normalized per tile, separated by 1 pixel black lines. Returns a
/// binary PGM (P5).
pub fn render_hidden_weights(params: &NetworkParams<f64>) -> Result<Vec<u8>, CliError> {
    let shape = params.shape();
    let layout = TileLayout::for_shape(shape)?;
    let (width, height) = (layout.width(), layout.height());
    let mut pixels = vec![0u8; width * height];
    for (unit, row) in params.theta1.rows().into_iter().enumerate() {
        let weights = row.slice(ndarray::s![1..]);
        let lo = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let x0 = (unit % layout.cols) * (layout.side + 1);
        let y0 = (unit / layout.cols) * (layout.side + 1);
        for (k, &w) in weights.iter().enumerate() {
            let gray = if hi > lo {
                (255.0 * (w - lo) / (hi - lo)).round() as u8
            } else {
                CONSTANT_TILE_GRAY
            };
            let (r, c) = (k / layout.side, k % layout.side);
            pixels[(y0 + r) * width + x0 + c] = gray;
        }
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(&pixels);
    Ok(out)
}
