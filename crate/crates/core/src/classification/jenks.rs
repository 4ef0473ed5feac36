use serde::{Deserialize, Serialize};

use crate::error::ClassificationError;
use crate::grid::Grid;

/// Upper bounds of classes `1..k-1`; class `k` is open above.
///
/// A value equal to `breaks[i]` belongs to class `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassBreaks {
    pub breaks: Vec<f64>,
    pub labels: Vec<String>,
}

impl ClassBreaks {
    pub fn new(breaks: Vec<f64>, labels: Vec<String>) -> Result<Self, ClassificationError> {
        let cb = ClassBreaks { breaks, labels };
        cb.validate()?;
        Ok(cb)
    }

    pub fn with_default_labels(breaks: Vec<f64>) -> Result<Self, ClassificationError> {
        let labels = default_labels(breaks.len() + 1);
        ClassBreaks::new(breaks, labels)
    }

    pub fn k(&self) -> usize {
        self.breaks.len() + 1
    }

    pub fn validate(&self) -> Result<(), ClassificationError> {
        if self.breaks.iter().any(|b| !b.is_finite()) {
            return Err(ClassificationError::InvalidBreaks("non-finite break".into()));
        }
        if self.breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ClassificationError::InvalidBreaks(
                "breaks must be strictly increasing".into(),
            ));
        }
        if self.labels.len() != self.k() {
            return Err(ClassificationError::InvalidBreaks(format!(
                "{} labels for {} classes",
                self.labels.len(),
                self.k()
            )));
        }
        Ok(())
    }

    /// Class id in `1..=k` for a value.
    pub fn class_of(&self, value: f64) -> u32 {
        self.breaks.partition_point(|b| *b < value) as u32 + 1
    }

    pub fn label(&self, class: u32) -> Option<&str> {
        self.labels.get((class as usize).checked_sub(1)?).map(String::as_str)
    }
}

/// Vulnerability vocabulary for common class counts, generic names otherwise.
pub fn default_labels(k: usize) -> Vec<String> {
    let names: &[&str] = match k {
        1 => &["moderate"],
        2 => &["low", "high"],
        3 => &["low", "moderate", "high"],
        4 => &["low", "moderate", "high", "very high"],
        5 => &["very low", "low", "moderate", "high", "very high"],
        _ => return (1..=k).map(|i| format!("class {i}")).collect(),
    };
    names.iter().map(|s| s.to_string()).collect()
}

/// Fisher-Jenks natural breaks: the partition of the sorted values into `k`
/// contiguous classes with minimum total within-class sum of squares.
///
/// Equal values never straddle a break, so the dynamic program runs over the
/// distinct values weighted by multiplicity. Among optimal partitions the one
/// with the lexicographically smallest break positions is returned.
pub fn jenks_breaks(values: &[f64], k: usize) -> Result<ClassBreaks, ClassificationError> {
    if k == 0 {
        return Err(ClassificationError::ZeroClasses);
    }
    let (distinct, counts) = distinct_with_counts(values)?;
    if distinct.len() < k {
        return Err(ClassificationError::TooFewDistinct {
            distinct: distinct.len(),
            k,
        });
    }
    let ends = optimal_partition(&distinct, &counts, k);
    let breaks = ends[..k - 1].iter().map(|&e| distinct[e]).collect();
    ClassBreaks::with_default_labels(breaks)
}

/// Total within-class sum of squared deviations of `values` under `cb`.
pub fn within_class_sse(values: &[f64], cb: &ClassBreaks) -> f64 {
    let k = cb.k();
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); k];
    for &v in values {
        groups[cb.class_of(v) as usize - 1].push(v);
    }
    groups.iter().map(|g| sse(g)).sum()
}

fn sse(g: &[f64]) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|v| (v - mean) * (v - mean)).sum()
}

fn distinct_with_counts(values: &[f64]) -> Result<(Vec<f64>, Vec<f64>), ClassificationError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ClassificationError::InvalidBreaks(
            "values must be finite".into(),
        ));
    }
    if values.is_empty() {
        return Err(ClassificationError::NoValues);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut distinct: Vec<f64> = Vec::new();
    let mut counts: Vec<f64> = Vec::new();
    for v in sorted {
        match distinct.last() {
            Some(&last) if last == v => *counts.last_mut().unwrap() += 1.0,
            _ => {
                distinct.push(v);
                counts.push(1.0);
            }
        }
    }
    Ok((distinct, counts))
}

const TIE_RTOL: f64 = 1e-10;

/// Weighted within-segment SSE from prefix sums of centered values.
struct SegmentCost {
    w: Vec<f64>,
    wx: Vec<f64>,
    wxx: Vec<f64>,
}

impl SegmentCost {
    fn new(values: &[f64], weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        let center = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
        let n = values.len();
        let (mut w, mut wx, mut wxx) = (vec![0.0; n + 1], vec![0.0; n + 1], vec![0.0; n + 1]);
        for i in 0..n {
            let x = values[i] - center;
            w[i + 1] = w[i] + weights[i];
            wx[i + 1] = wx[i] + weights[i] * x;
            wxx[i + 1] = wxx[i] + weights[i] * x * x;
        }
        SegmentCost { w, wx, wxx }
    }

    /// Cost of the inclusive segment `[from, to]`.
    #[inline]
    fn cost(&self, from: usize, to: usize) -> f64 {
        if from == to {
            return 0.0;
        }
        let w = self.w[to + 1] - self.w[from];
        let s = self.wx[to + 1] - self.wx[from];
        let ss = self.wxx[to + 1] - self.wxx[from];
        (ss - s * s / w).max(0.0)
    }
}

/// Inclusive end index of each of the `k` classes.
fn optimal_partition(values: &[f64], weights: &[f64], k: usize) -> Vec<usize> {
    let d = values.len();
    let seg = SegmentCost::new(values, weights);

    // suffix[m][j]: best cost of splitting values[j..] into m + 1 classes.
    let mut suffix: Vec<Vec<f64>> = Vec::with_capacity(k);
    suffix.push((0..d).map(|j| seg.cost(j, d - 1)).collect());
    for m in 1..k {
        let prev = &suffix[m - 1];
        let mut cur = vec![f64::INFINITY; d];
        // starts j in [0, d - m - 1]; first class ends at t in [j, d - m - 1]
        let last_start = d - m - 1;
        solve_layer(&seg, prev, &mut cur, 0, last_start, 0, last_start);
        suffix.push(cur);
    }

    // Forward reconstruction: leftmost optimal end for each class in turn.
    // Costs within a relative slack of the optimum count as ties, so that
    // rounding noise cannot flip the choice when the data are rescaled.
    let slack = TIE_RTOL * seg.cost(0, d - 1);
    let mut ends = Vec::with_capacity(k);
    let mut start = 0;
    for m in (1..k).rev() {
        let next = &suffix[m - 1];
        let costs: Vec<f64> = (start..=d - m - 1)
            .map(|t| seg.cost(start, t) + next[t + 1])
            .collect();
        let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
        let offset = costs.iter().position(|&c| c <= min + slack).unwrap();
        ends.push(start + offset);
        start += offset + 1;
    }
    ends.push(d - 1);
    ends
}

/// Divide-and-conquer layer update; the optimal first-class end is
/// non-decreasing in the start index (the SSE cost is Monge).
fn solve_layer(
    seg: &SegmentCost,
    prev: &[f64],
    cur: &mut [f64],
    jlo: usize,
    jhi: usize,
    tlo: usize,
    thi: usize,
) {
    if jlo > jhi {
        return;
    }
    let j = (jlo + jhi) / 2;
    let mut best = (tlo.max(j), f64::INFINITY);
    for t in tlo.max(j)..=thi {
        let c = seg.cost(j, t) + prev[t + 1];
        if c < best.1 {
            best = (t, c);
        }
    }
    cur[j] = best.1;
    if j > jlo {
        solve_layer(seg, prev, cur, jlo, j - 1, tlo, best.0);
    }
    if j < jhi {
        solve_layer(seg, prev, cur, j + 1, jhi, best.0, thi);
    }
}

/// Map each valid cell to its class id (`1` = lowest); nodata is preserved.
pub fn classify(g: &Grid, cb: &ClassBreaks) -> Result<Grid, ClassificationError> {
    cb.validate()?;
    Ok(g.map_cells(|v| cb.class_of(v) as f64)?)
}
