//! Validation of vulnerability maps against nitrate observations: exceedance
//! labels, ROC/AUC over the index surface and zone coincidence rates.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::classification::ClassBreaks;
use crate::error::{GridError, ValidationError};
use crate::grid::Grid;

/// Nitrate guideline value in mg/L.
pub const NITRATE_THRESHOLD_MG_L: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "nitrate_mg_l")]
    pub nitrate: f64,
}

impl Observation {
    pub fn new(x: f64, y: f64, nitrate: f64) -> Self {
        Observation { x, y, nitrate }
    }

    fn check(&self, index: usize) -> Result<(), ValidationError> {
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Err(ValidationError::InvalidObservation {
                index,
                message: "non-finite coordinates".into(),
            });
        }
        if !(self.nitrate.is_finite() && self.nitrate >= 0.0) {
            return Err(ValidationError::InvalidObservation {
                index,
                message: format!("nitrate {} is not a non-negative number", self.nitrate),
            });
        }
        Ok(())
    }
}

pub fn read_observations_csv<R: Read>(reader: R) -> Result<Vec<Observation>, ValidationError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let to_err = |e: csv::Error| ValidationError::Csv {
        line: e.position().map(|p| p.line() as usize).unwrap_or(0),
        message: e.to_string(),
    };
    let headers = rdr.headers().map_err(to_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y", "nitrate_mg_l"] {
        return Err(ValidationError::Csv {
            line: 1,
            message: "expected header 'x,y,nitrate_mg_l'".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<Observation>().enumerate() {
        let obs = rec.map_err(to_err)?;
        obs.check(i)?;
        out.push(obs);
    }
    Ok(out)
}

pub fn write_observations_csv<W: Write>(writer: W, obs: &[Observation]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for o in obs {
        wtr.serialize(o)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledObservation {
    pub obs: Observation,
    pub positive: bool,
}

/// Positive iff the concentration strictly exceeds `threshold`. Order is preserved.
pub fn binarize(
    obs: &[Observation],
    threshold: f64,
) -> Result<Vec<LabeledObservation>, ValidationError> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(ValidationError::InvalidThreshold(threshold));
    }
    Ok(obs
        .iter()
        .map(|&obs| LabeledObservation {
            obs,
            positive: obs.nitrate > threshold,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredWell {
    pub score: f64,
    pub positive: bool,
    pub obs: Observation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredWells {
    pub wells: Vec<ScoredWell>,
    pub outside: usize,
    pub nodata: usize,
}

impl ScoredWells {
    pub fn skipped(&self) -> usize {
        self.outside + self.nodata
    }

    pub fn pairs(&self) -> Vec<(f64, bool)> {
        self.wells.iter().map(|w| (w.score, w.positive)).collect()
    }
}

/// Index value of the cell under each well. Wells outside the grid or on
/// nodata are skipped and counted.
pub fn score_wells(
    vi: &Grid,
    labeled: &[LabeledObservation],
) -> Result<ScoredWells, ValidationError> {
    let mut out = ScoredWells {
        wells: Vec::with_capacity(labeled.len()),
        outside: 0,
        nodata: 0,
    };
    for l in labeled {
        match vi.sample_at(l.obs.x, l.obs.y) {
            Ok(Some(score)) => out.wells.push(ScoredWell {
                score,
                positive: l.positive,
                obs: l.obs,
            }),
            Ok(None) => out.nodata += 1,
            Err(GridError::OutOfBounds { .. }) => out.outside += 1,
            Err(_) => out.outside += 1,
        }
    }
    if out.wells.is_empty() {
        return Err(ValidationError::NothingScored {
            outside: out.outside,
            nodata: out.nodata,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// Scores `>= threshold` are predicted positive; infinite for the origin.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocResult {
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// ROC sweep over distinct scores, descending, with tied scores collapsed
/// into one step. The trapezoidal area is accumulated in integer counts, so
/// it equals the tie-corrected Mann-Whitney statistic.
pub fn roc_auc(scored: &[(f64, bool)]) -> Result<RocResult, ValidationError> {
    let n_pos = scored.iter().filter(|s| s.1).count();
    let n_neg = scored.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(ValidationError::SingleClass { n_pos, n_neg });
    }
    let mut sorted: Vec<(f64, bool)> = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    // twice the area in units of (1 negative x 1 positive)
    let mut doubled_area: u128 = 0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].0;
        let (tp0, fp0) = (tp, fp);
        while i < sorted.len() && sorted[i].0 == t {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        doubled_area += ((fp - fp0) * (tp + tp0)) as u128;
        points.push(RocPoint {
            threshold: t,
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
        });
    }
    let auc = doubled_area as f64 / (2.0 * n_pos as f64 * n_neg as f64);
    Ok(RocResult {
        points,
        auc,
        n_pos,
        n_neg,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneMetrics {
    /// Share of valid cells whose class is in the high set.
    pub pct_high_area: f64,
    /// Exceeding wells located in high classes; `None` without positives.
    pub pct_pos_in_high: Option<f64>,
    pub pct_pos_outside_high: Option<f64>,
    /// Non-exceeding wells located in low classes; `None` without negatives.
    pub pct_neg_in_low: Option<f64>,
    pub n_pos: usize,
    pub n_neg: usize,
    pub skipped: usize,
}

/// Default zone sets from class labels: `high`/`very high` against
/// `very low`/`low`/`moderate`.
pub fn default_zone_sets(cb: &ClassBreaks) -> (BTreeSet<u32>, BTreeSet<u32>) {
    let mut high = BTreeSet::new();
    let mut low = BTreeSet::new();
    for (i, label) in cb.labels.iter().enumerate() {
        let id = i as u32 + 1;
        match label.as_str() {
            "high" | "very high" => {
                high.insert(id);
            }
            "very low" | "low" | "moderate" => {
                low.insert(id);
            }
            _ => {}
        }
    }
    (high, low)
}

pub fn zone_coincidence(
    classes: &Grid,
    obs: &[Observation],
    threshold: f64,
    high_set: &BTreeSet<u32>,
    low_set: &BTreeSet<u32>,
) -> Result<ZoneMetrics, ValidationError> {
    if let Some(c) = high_set.intersection(low_set).next() {
        return Err(ValidationError::OverlappingSets(*c));
    }
    let labeled = binarize(obs, threshold)?;
    let class_id = |v: f64| v as u32;

    let valid = classes.valid_count();
    let high_cells = classes
        .valid_values()
        .filter(|v| high_set.contains(&class_id(*v)))
        .count();
    let pct_high_area = if valid == 0 {
        0.0
    } else {
        100.0 * high_cells as f64 / valid as f64
    };

    let (mut n_pos, mut n_neg, mut pos_high, mut neg_low, mut skipped) = (0, 0, 0, 0, 0);
    for l in &labeled {
        let class = match classes.sample_at(l.obs.x, l.obs.y) {
            Ok(Some(c)) => class_id(c),
            _ => {
                skipped += 1;
                continue;
            }
        };
        if l.positive {
            n_pos += 1;
            pos_high += high_set.contains(&class) as usize;
        } else {
            n_neg += 1;
            neg_low += low_set.contains(&class) as usize;
        }
    }
    let pct = |num: usize, den: usize| (den > 0).then(|| 100.0 * num as f64 / den as f64);
    Ok(ZoneMetrics {
        pct_high_area,
        pct_pos_in_high: pct(pos_high, n_pos),
        pct_pos_outside_high: pct(n_pos - pos_high, n_pos),
        pct_neg_in_low: pct(neg_low, n_neg),
        n_pos,
        n_neg,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridHeader;

    #[test]
    fn strict_threshold() {
        let obs = [
            Observation::new(0.0, 0.0, 300.0),
            Observation::new(0.0, 0.0, 50.0),
            Observation::new(0.0, 0.0, 0.0),
        ];
        let l = binarize(&obs, 50.0).unwrap();
        assert_eq!(l.iter().map(|x| x.positive).collect::<Vec<_>>(), [true, false, false]);
        assert!(binarize(&obs, 0.0).is_err());
    }

    #[test]
    fn scoring_skips_and_counts() {
        let h = GridHeader::new(2, 1, 0.0, 0.0, 10.0, -9999.0).unwrap();
        let vi = Grid::new(h, vec![144.0, -9999.0]).unwrap();
        let obs = [
            Observation::new(5.0, 5.0, 80.0),
            Observation::new(15.0, 5.0, 80.0),
            Observation::new(50.0, 5.0, 80.0),
        ];
        let s = score_wells(&vi, &binarize(&obs, 50.0).unwrap()).unwrap();
        assert_eq!(s.wells.len(), 1);
        assert_eq!(s.wells[0].score, 144.0);
        assert_eq!((s.nodata, s.outside), (1, 1));

        let err = score_wells(&vi, &binarize(&obs[1..], 50.0).unwrap()).unwrap_err();
        assert!(matches!(err, ValidationError::NothingScored { outside: 1, nodata: 1 }));
    }

    #[test]
    fn roc_cases() {
        let perfect = roc_auc(&[(5.0, true), (4.0, true), (1.0, false), (0.5, false)]).unwrap();
        assert_eq!(perfect.auc, 1.0);
        let r = roc_auc(&[(3.0, true), (2.0, false), (1.0, true)]).unwrap();
        assert_eq!(r.auc, 0.5);
        let first = r.points.first().unwrap();
        let last = r.points.last().unwrap();
        assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        let tied = roc_auc(&[(1.0, true), (1.0, false)]).unwrap();
        assert_eq!(tied.auc, 0.5);
        assert_eq!(tied.points.len(), 2);
        assert!(matches!(
            roc_auc(&[(1.0, true), (2.0, true)]),
            Err(ValidationError::SingleClass { n_pos: 2, n_neg: 0 })
        ));
    }

    #[test]
    fn coincidence_basic() {
        let h = GridHeader::new(2, 1, 0.0, 0.0, 10.0, -9999.0).unwrap();
        let classes = Grid::new(h, vec![5.0, 1.0]).unwrap();
        let high: BTreeSet<u32> = [4, 5].into();
        let low: BTreeSet<u32> = [1, 2, 3].into();
        let obs = [
            Observation::new(5.0, 5.0, 60.0),
            Observation::new(15.0, 5.0, 10.0),
            Observation::new(15.0, 5.0, 70.0),
        ];
        let m = zone_coincidence(&classes, &obs, 50.0, &high, &low).unwrap();
        assert_eq!(m.pct_high_area, 50.0);
        assert_eq!(m.pct_pos_in_high, Some(50.0));
        assert_eq!(m.pct_neg_in_low, Some(100.0));

        let only_neg = zone_coincidence(&classes, &obs[1..2], 50.0, &high, &low).unwrap();
        assert_eq!(only_neg.pct_pos_in_high, None);
        assert!(zone_coincidence(&classes, &obs, 50.0, &high, &[5].into()).is_err());
    }

    #[test]
    fn zone_sets_from_labels() {
        let cb = ClassBreaks::with_default_labels(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let (high, low) = default_zone_sets(&cb);
        assert_eq!(high, [4, 5].into());
        assert_eq!(low, [1, 2, 3].into());
    }

    #[test]
    fn observations_csv() {
        let text = "x,y,nitrate_mg_l\n1,2,55.5\n";
        let obs = read_observations_csv(text.as_bytes()).unwrap();
        assert_eq!(obs, vec![Observation::new(1.0, 2.0, 55.5)]);
        assert!(read_observations_csv("x,y,nitrate_mg_l\n1,2,-1\n".as_bytes()).is_err());
        assert!(read_observations_csv("x,y,value\n1,2,1\n".as_bytes()).is_err());
    }
}
