//! Raster data model and ESRI ASCII grid I/O.
//!
//! A [`Grid`] is a corner-registered rectangular raster stored row-major with
//! rows ordered north to south, the same order as the ASCII grid body. Cells
//! holding the header's nodata sentinel are absorbed by every cell operation.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::GridError;

/// Georeferencing and shape of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridHeader {
    pub ncols: usize,
    pub nrows: usize,
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
    pub nodata_value: f64,
}

impl GridHeader {
    pub fn new(
        ncols: usize,
        nrows: usize,
        xllcorner: f64,
        yllcorner: f64,
        cellsize: f64,
        nodata_value: f64,
    ) -> Result<Self, GridError> {
        let header = GridHeader {
            ncols,
            nrows,
            xllcorner,
            yllcorner,
            cellsize,
            nodata_value,
        };
        header.validate()?;
        Ok(header)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.ncols == 0 || self.nrows == 0 {
            return Err(GridError::InvalidHeader(format!(
                "grid must have at least one row and column (ncols={}, nrows={})",
                self.ncols, self.nrows
            )));
        }
        if !(self.cellsize.is_finite() && self.cellsize > 0.0) {
            return Err(GridError::InvalidHeader(format!(
                "cellsize must be positive and finite, got {}",
                self.cellsize
            )));
        }
        if !self.xllcorner.is_finite() || !self.yllcorner.is_finite() {
            return Err(GridError::InvalidHeader(
                "lower-left corner must be finite".into(),
            ));
        }
        if self.nodata_value.is_nan() {
            return Err(GridError::InvalidHeader(
                "NODATA_value must be a number".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn width(&self) -> f64 {
        self.ncols as f64 * self.cellsize
    }

    pub fn height(&self) -> f64 {
        self.nrows as f64 * self.cellsize
    }

    /// Map coordinates of the center of cell (row, col); row 0 is the northern edge.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        let x = self.xllcorner + (col as f64 + 0.5) * self.cellsize;
        let y = self.yllcorner + (self.nrows as f64 - row as f64 - 0.5) * self.cellsize;
        (x, y)
    }

    /// Cell containing (x, y). A point on a shared edge belongs to the cell
    /// whose low edge it touches; the outer east and north edges are inside.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !x.is_finite() || !y.is_finite() {
            return None;
        }
        let fx = (x - self.xllcorner) / self.cellsize;
        let fy = (y - self.yllcorner) / self.cellsize;
        if fx < 0.0 || fy < 0.0 || fx > self.ncols as f64 || fy > self.nrows as f64 {
            return None;
        }
        let col = (fx.floor() as usize).min(self.ncols - 1);
        let row_from_bottom = (fy.floor() as usize).min(self.nrows - 1);
        Some((self.nrows - 1 - row_from_bottom, col))
    }

    /// Fields that differ between two headers, by keyword.
    pub fn differences(&self, other: &GridHeader) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.ncols != other.ncols {
            out.push("ncols");
        }
        if self.nrows != other.nrows {
            out.push("nrows");
        }
        if self.xllcorner.to_bits() != other.xllcorner.to_bits() {
            out.push("xllcorner");
        }
        if self.yllcorner.to_bits() != other.yllcorner.to_bits() {
            out.push("yllcorner");
        }
        if self.cellsize.to_bits() != other.cellsize.to_bits() {
            out.push("cellsize");
        }
        if self.nodata_value.to_bits() != other.nodata_value.to_bits() {
            out.push("NODATA_value");
        }
        out
    }
}

/// Raster layer: header plus `ncols * nrows` values, north row first.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    header: GridHeader,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(header: GridHeader, values: Vec<f64>) -> Result<Self, GridError> {
        header.validate()?;
        if values.len() != header.len() {
            return Err(GridError::WrongValueCount {
                expected: header.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values
            .iter()
            .position(|v| !v.is_finite() && *v != header.nodata_value)
        {
            return Err(GridError::NonFinite { index });
        }
        Ok(Grid { header, values })
    }

    pub fn filled(header: GridHeader, value: f64) -> Result<Self, GridError> {
        Grid::new(header, vec![value; header.len()])
    }

    pub fn nodata(header: GridHeader) -> Result<Self, GridError> {
        Grid::filled(header, header.nodata_value)
    }

    pub fn header(&self) -> &GridHeader {
        &self.header
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn ncols(&self) -> usize {
        self.header.ncols
    }

    pub fn nrows(&self) -> usize {
        self.header.nrows
    }

    pub fn nodata_value(&self) -> f64 {
        self.header.nodata_value
    }

    #[inline]
    pub fn is_nodata(&self, value: f64) -> bool {
        value == self.header.nodata_value
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        if row >= self.header.nrows || col >= self.header.ncols {
            return None;
        }
        let v = self.values[row * self.header.ncols + col];
        (!self.is_nodata(v)).then_some(v)
    }

    /// Valid (non-nodata) values in storage order.
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(|v| !self.is_nodata(*v))
    }

    pub fn valid_count(&self) -> usize {
        self.valid_values().count()
    }

    /// Per-cell validity mask.
    pub fn mask(&self) -> Vec<bool> {
        self.values.iter().map(|v| !self.is_nodata(*v)).collect()
    }

    /// Apply `f` to every valid cell. Nodata cells are left untouched.
    pub fn map_cells<F>(&self, f: F) -> Result<Grid, GridError>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let nodata = self.header.nodata_value;
        let values: Vec<f64> = self
            .values
            .par_iter()
            .map(|&v| if v == nodata { v } else { f(v) })
            .collect();
        self.check_output(&values)?;
        Ok(Grid {
            header: self.header,
            values,
        })
    }

    fn check_output(&self, values: &[f64]) -> Result<(), GridError> {
        let nodata = self.header.nodata_value;
        for (index, (&out, &inp)) in values.iter().zip(&self.values).enumerate() {
            if inp == nodata {
                continue;
            }
            if !out.is_finite() {
                return Err(GridError::NonFinite { index });
            }
            if out == nodata {
                return Err(GridError::NodataCollision { index, value: out });
            }
        }
        Ok(())
    }

    /// Value of the cell containing (x, y), or `None` when that cell is nodata.
    pub fn sample_at(&self, x: f64, y: f64) -> Result<Option<f64>, GridError> {
        let (row, col) = self
            .header
            .locate(x, y)
            .ok_or(GridError::OutOfBounds { x, y })?;
        Ok(self.get(row, col))
    }
}

/// Cell-wise `Σ weight_i · layer_i`. A cell is nodata in the output iff it is
/// nodata in at least one layer. The reduction runs in layer order.
pub fn weighted_sum(layers: &[(&Grid, f64)]) -> Result<Grid, GridError> {
    let (first, _) = layers.first().ok_or(GridError::EmptyLayerList)?;
    let header = *first.header();
    for (i, (g, w)) in layers.iter().enumerate() {
        let diff = header.differences(g.header());
        if !diff.is_empty() {
            return Err(GridError::HeaderMismatch {
                layer: i,
                fields: diff.join(", "),
            });
        }
        if !w.is_finite() {
            return Err(GridError::InvalidHeader(format!(
                "weight of layer {i} is not finite"
            )));
        }
    }
    let nodata = header.nodata_value;
    let values: Vec<f64> = (0..header.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for (g, w) in layers {
                let v = g.values[i];
                if v == nodata {
                    return nodata;
                }
                acc += w * v;
            }
            acc
        })
        .collect();
    for (index, &v) in values.iter().enumerate() {
        if v == nodata && layers.iter().all(|(g, _)| g.values[index] != nodata) {
            return Err(GridError::NodataCollision { index, value: v });
        }
        if !v.is_finite() && v != nodata {
            return Err(GridError::NonFinite { index });
        }
    }
    Ok(Grid { header, values })
}

const HEADER_KEYS: [&str; 6] = [
    "ncols",
    "nrows",
    "xllcorner",
    "yllcorner",
    "cellsize",
    "nodata_value",
];

/// Parse an ESRI ASCII grid document.
pub fn read_ascii_grid(text: &str) -> Result<Grid, GridError> {
    let mut fields: [Option<f64>; 6] = [None; 6];
    let mut lines = text.lines().enumerate().peekable();
    let mut seen = 0;
    while seen < 6 {
        let (idx, line) = match lines.next() {
            Some(l) => l,
            None => {
                return Err(GridError::Parse {
                    line: text.lines().count().max(1),
                    message: format!("missing header keyword {}", HEADER_KEYS[seen]),
                })
            }
        };
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let key = parts.next().unwrap_or_default().to_ascii_lowercase();
        let value = parts.next();
        if parts.next().is_some() {
            return Err(GridError::Parse {
                line: lineno,
                message: format!("unexpected trailing tokens after {key}"),
            });
        }
        if key == "xllcenter" || key == "yllcenter" {
            return Err(GridError::Parse {
                line: lineno,
                message: "center-registered grids are not supported".into(),
            });
        }
        let slot = HEADER_KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| GridError::Parse {
                line: lineno,
                message: format!("malformed header keyword '{key}'"),
            })?;
        if fields[slot].is_some() {
            return Err(GridError::Parse {
                line: lineno,
                message: format!("duplicate header keyword '{key}'"),
            });
        }
        let raw = value.ok_or_else(|| GridError::Parse {
            line: lineno,
            message: format!("header keyword '{key}' has no value"),
        })?;
        let parsed: f64 = raw.parse().map_err(|_| GridError::Parse {
            line: lineno,
            message: format!("non-numeric token '{raw}' for '{key}'"),
        })?;
        if slot < 2 && (parsed.fract() != 0.0 || parsed < 1.0) {
            return Err(GridError::Parse {
                line: lineno,
                message: format!("'{key}' must be a positive integer, got '{raw}'"),
            });
        }
        fields[slot] = Some(parsed);
        seen += 1;
    }
    let f = |i: usize| fields[i].expect("all six header fields present");
    let header = GridHeader::new(f(0) as usize, f(1) as usize, f(2), f(3), f(4), f(5))?;

    let mut values = Vec::with_capacity(header.len());
    let mut last_line = 0;
    for (idx, line) in lines {
        last_line = idx + 1;
        for token in line.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| GridError::Parse {
                line: idx + 1,
                message: format!("non-numeric token '{token}'"),
            })?;
            if !v.is_finite() && v != header.nodata_value {
                return Err(GridError::Parse {
                    line: idx + 1,
                    message: format!("non-finite value '{token}'"),
                });
            }
            values.push(v);
        }
    }
    if values.len() != header.len() {
        return Err(GridError::Parse {
            line: last_line.max(6),
            message: format!(
                "wrong value count: header declares {} cells, body has {}",
                header.len(),
                values.len()
            ),
        });
    }
    Grid::new(header, values)
}

/// Serialize a grid as an ESRI ASCII grid. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn write_ascii_grid(g: &Grid) -> String {
    let h = g.header();
    let mut out = String::with_capacity(64 + g.values.len() * 8);
    let _ = writeln!(out, "ncols {}", h.ncols);
    let _ = writeln!(out, "nrows {}", h.nrows);
    let _ = writeln!(out, "xllcorner {}", h.xllcorner);
    let _ = writeln!(out, "yllcorner {}", h.yllcorner);
    let _ = writeln!(out, "cellsize {}", h.cellsize);
    let _ = writeln!(out, "NODATA_value {}", h.nodata_value);
    for row in g.values.chunks(h.ncols) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}
