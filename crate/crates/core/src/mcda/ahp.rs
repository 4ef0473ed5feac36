use super::{default_labels, WeightVector};
use crate::error::McdaError;

/// Consistency ratios at or below this are acceptable.
pub const ACCEPTABLE_CR: f64 = 0.1;

const RECIPROCITY_TOL: f64 = 1e-9;
const SAATY_MIN: f64 = 1.0 / 9.0;
const SAATY_MAX: f64 = 9.0;

/// Saaty random consistency index for `n = 1..=10`.
const RANDOM_INDEX: [f64; 10] = [0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49];

pub fn random_index(n: usize) -> Option<f64> {
    n.checked_sub(1).and_then(|i| RANDOM_INDEX.get(i)).copied()
}

/// Reciprocal comparison matrix: `a[i][i] = 1`, `a[i][j] * a[j][i] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMatrix {
    n: usize,
    a: Vec<f64>,
    labels: Vec<String>,
}

impl PairwiseMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, McdaError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(McdaError::NotSquare);
        }
        let a: Vec<f64> = rows.into_iter().flatten().collect();
        for i in 0..n {
            for j in 0..n {
                let v = a[i * n + j];
                if !(v.is_finite() && v > 0.0) {
                    return Err(McdaError::NonPositive { row: i, col: j, value: v });
                }
            }
            if (a[i * n + i] - 1.0).abs() > RECIPROCITY_TOL {
                return Err(McdaError::Diagonal(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (x, y) = (a[i * n + j], a[j * n + i]);
                if (x * y - 1.0).abs() > RECIPROCITY_TOL {
                    return Err(McdaError::NotReciprocal { row: i, col: j, a: x, b: y });
                }
            }
        }
        let m = PairwiseMatrix { n, a, labels: default_labels(n) };
        for (i, j, v) in m.saaty_violations() {
            log::warn!("comparison ({i}, {j}) = {v} lies outside the 1/9..9 scale");
        }
        Ok(m)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, McdaError> {
        if labels.len() != self.n {
            return Err(McdaError::LabelCount { labels: labels.len(), n: self.n });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.a.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Entries outside the 1/9..9 comparison scale. Reported, not rejected.
    pub fn saaty_violations(&self) -> Vec<(usize, usize, f64)> {
        let eps = 1e-12;
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if v < SAATY_MIN - eps || v > SAATY_MAX + eps {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Perfectly consistent ratio matrix `a[i][j] = v[i] / v[j]`.
pub fn matrix_from_priorities(v: &[f64]) -> Result<PairwiseMatrix, McdaError> {
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x > 0.0)) {
        return Err(McdaError::NonPositivePriority { index, value });
    }
    let rows = v
        .iter()
        .map(|vi| v.iter().map(|vj| vi / vj).collect())
        .collect();
    PairwiseMatrix::new(rows)
}

/// Column-normalize, then average each row.
pub fn ahp_weights(pm: &PairwiseMatrix) -> WeightVector {
    let n = pm.n;
    let col_sums: Vec<f64> = (0..n).map(|j| (0..n).map(|i| pm.get(i, j)).sum()).collect();
    let mut w: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| pm.get(i, j) / col_sums[j]).sum::<f64>() / n as f64)
        .collect();
    // absorb rounding so the vector sums to one
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    WeightVector::new(pm.labels.clone(), w).expect("positive matrix yields valid weights")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Consistency {
    pub lambda_max: f64,
    pub ci: f64,
    pub cr: f64,
    pub acceptable: bool,
}

/// `λ_max` as the mean of `(A·w)_i / w_i`, then `CI = (λ_max - n)/(n - 1)` and
/// `CR = CI / RI(n)`. For `n < 3` both are zero.
pub fn consistency(pm: &PairwiseMatrix, w: &WeightVector) -> Result<Consistency, McdaError> {
    let n = pm.n;
    if w.len() != n {
        return Err(McdaError::LabelCount { labels: w.len(), n });
    }
    let ri = random_index(n).ok_or(McdaError::NoRandomIndex(n))?;
    let weights = w.weights();
    let lambda_max = (0..n)
        .map(|i| {
            let aw: f64 = (0..n).map(|j| pm.get(i, j) * weights[j]).sum();
            aw / weights[i]
        })
        .sum::<f64>()
        / n as f64;
    let (ci, cr) = if n < 3 {
        (0.0, 0.0)
    } else {
        let ci = (lambda_max - n as f64) / (n as f64 - 1.0);
        (ci, ci / ri)
    };
    Ok(Consistency {
        lambda_max,
        ci,
        cr,
        acceptable: cr <= ACCEPTABLE_CR,
    })
}
