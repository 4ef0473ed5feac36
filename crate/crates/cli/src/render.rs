//! Class maps as PNG images, one pixel per cell.

use std::io::Cursor;

use drastic_core::grid::Grid;
use image::{ImageFormat, Rgba, RgbaImage};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("class id {value} at row {row}, column {col} is outside the {colors}-color palette")]
    ClassOutsidePalette {
        value: f64,
        row: usize,
        col: usize,
        colors: usize,
    },
    #[error("invalid color {0:?}, expected #rrggbb")]
    BadColor(String),
    #[error("empty palette")]
    EmptyPalette,
}

/// Low-to-high ramp: green, yellow-green, yellow, orange, red.
pub const DEFAULT_RAMP: [[u8; 3]; 5] = [
    [0x1a, 0x96, 0x41],
    [0xa6, 0xd9, 0x6a],
    [0xff, 0xff, 0x33],
    [0xfd, 0xae, 0x61],
    [0xd7, 0x19, 0x1c],
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette(Vec<[u8; 3]>);

impl Palette {
    pub fn new(colors: Vec<[u8; 3]>) -> Result<Self, RenderError> {
        if colors.is_empty() {
            return Err(RenderError::EmptyPalette);
        }
        Ok(Palette(colors))
    }

    pub fn parse<S: AsRef<str>>(colors: &[S]) -> Result<Self, RenderError> {
        let parsed = colors
            .iter()
            .map(|c| {
                let c = c.as_ref();
                let mut rgb = [0u8; 3];
                hex::decode_to_slice(c.strip_prefix('#').unwrap_or(c), &mut rgb)
                    .map_err(|_| RenderError::BadColor(c.to_string()))?;
                Ok(rgb)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Palette::new(parsed)
    }

    /// The default ramp resampled to `k` colors. `k = 5` is the ramp itself;
    /// fewer classes take evenly spaced members, more interpolate linearly.
    pub fn default_for(k: usize) -> Self {
        let k = k.max(1);
        if k == 1 {
            return Palette(vec![DEFAULT_RAMP[2]]);
        }
        let last = (DEFAULT_RAMP.len() - 1) as f64;
        let colors = (0..k)
            .map(|i| {
                let t = last * i as f64 / (k - 1) as f64;
                let lo = t.floor() as usize;
                let hi = (lo + 1).min(DEFAULT_RAMP.len() - 1);
                let f = t - lo as f64;
                let mut c = [0u8; 3];
                for ch in 0..3 {
                    let a = DEFAULT_RAMP[lo][ch] as f64;
                    let b = DEFAULT_RAMP[hi][ch] as f64;
                    c[ch] = (a + (b - a) * f).round() as u8;
                }
                c
            })
            .collect();
        Palette(colors)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn colors(&self) -> &[[u8; 3]] {
        &self.0
    }

    pub fn to_hex(&self) -> Vec<String> {
        self.0.iter().map(|c| format!("#{}", hex::encode(c))).collect()
    }
}

/// Class `i` gets `palette[i - 1]`; nodata cells are fully transparent.
pub fn render_map(classes: &Grid, palette: &Palette) -> Result<RgbaImage, RenderError> {
    let (w, h) = (classes.ncols(), classes.nrows());
    let mut img = RgbaImage::new(w as u32, h as u32);
    for (i, &v) in classes.values().iter().enumerate() {
        let (row, col) = (i / w, i % w);
        let px = if classes.is_nodata(v) {
            Rgba([0, 0, 0, 0])
        } else {
            let id = v as usize;
            if v.fract() != 0.0 || id == 0 || id > palette.len() {
                return Err(RenderError::ClassOutsidePalette {
                    value: v,
                    row,
                    col,
                    colors: palette.len(),
                });
            }
            let [r, g, b] = palette.0[id - 1];
            Rgba([r, g, b, 255])
        };
        img.put_pixel(col as u32, row as u32, px);
    }
    Ok(img)
}

pub fn encode_png(img: &RgbaImage) -> Vec<u8> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .expect("PNG encoding into memory does not fail");
    buf.into_inner()
}
