//! Gridding of scattered samples: inverse distance weighting and ordinary
//! kriging with a fitted isotropic variogram.

mod idw;
mod kriging;
mod variogram;

pub use idw::{idw, IdwParams, DEFAULT_NEIGHBORS, DEFAULT_POWER};
pub use kriging::{kriging, kriging_weights, KrigingOutput, KrigingSystem};
pub use variogram::{
    empirical_variogram, fit_variogram, EmpiricalVariogram, FitWarning, LagBin, VariogramFit,
    VariogramModel, VariogramShape, EPS_SILL,
};

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::InterpolationError;

/// A measured value at a planar location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl SamplePoint {
    pub fn new(x: f64, y: f64, value: f64) -> Self {
        SamplePoint { x, y, value }
    }

    #[inline]
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }
}

/// Rejects non-finite points and repeated locations.
pub fn validate_points(points: &[SamplePoint]) -> Result<(), InterpolationError> {
    for (index, p) in points.iter().enumerate() {
        if !(p.x.is_finite() && p.y.is_finite() && p.value.is_finite()) {
            return Err(InterpolationError::NonFinitePoint { index });
        }
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pa.x.total_cmp(&pb.x)
            .then(pa.y.total_cmp(&pb.y))
            .then(a.cmp(&b))
    });
    for w in order.windows(2) {
        let (a, b) = (&points[w[0]], &points[w[1]]);
        if a.x == b.x && a.y == b.y {
            return Err(InterpolationError::DuplicatePoint {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
                x: a.x,
                y: a.y,
            });
        }
    }
    Ok(())
}

/// Reads `x,y,value` CSV. Duplicate locations are rejected.
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<SamplePoint>, InterpolationError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(&e))?.clone();
    let expected = ["x", "y", "value"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| !h.eq_ignore_ascii_case(e)) {
        return Err(InterpolationError::Csv {
            line: 1,
            message: format!("expected header 'x,y,value', found '{}'", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut points = Vec::new();
    for rec in rdr.deserialize::<SamplePoint>() {
        points.push(rec.map_err(|e| csv_error(&e))?);
    }
    validate_points(&points)?;
    Ok(points)
}

pub fn write_points_csv<W: Write>(writer: W, points: &[SamplePoint]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in points {
        wtr.serialize(p)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_error(e: &csv::Error) -> InterpolationError {
    InterpolationError::Csv {
        line: e.position().map(|p| p.line() as usize).unwrap_or(0),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_points_csv() {
        let text = "x,y,value\n0,0,1.5\n10,5,2\n";
        let pts = read_points_csv(text.as_bytes()).unwrap();
        assert_eq!(pts, vec![SamplePoint::new(0.0, 0.0, 1.5), SamplePoint::new(10.0, 5.0, 2.0)]);
    }

    #[test]
    fn duplicate_locations_rejected() {
        let text = "x,y,value\n0,0,1\n3,3,2\n0,0,4\n";
        match read_points_csv(text.as_bytes()).unwrap_err() {
            InterpolationError::DuplicatePoint { first, second, .. } => {
                assert_eq!((first, second), (0, 2));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_rows_report_line() {
        let text = "x,y,value\n0,0,1\n3,abc,2\n";
        match read_points_csv(text.as_bytes()).unwrap_err() {
            InterpolationError::Csv { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        assert!(read_points_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
    }
}
