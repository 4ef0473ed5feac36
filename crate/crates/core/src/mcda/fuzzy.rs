use serde::{Deserialize, Serialize};

use super::{default_labels, WeightVector};
use crate::error::McdaError;

/// Triangular fuzzy number `(l, m, u)`.
///
/// Ordering is only enforced by [`tfn_membership`]; comparison matrices may
/// carry triples that are not ordered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Tfn {
    pub l: f64,
    pub m: f64,
    pub u: f64,
}

impl Tfn {
    pub const ONE: Tfn = Tfn { l: 1.0, m: 1.0, u: 1.0 };

    pub fn new(l: f64, m: f64, u: f64) -> Self {
        Tfn { l, m, u }
    }

    pub fn crisp(x: f64) -> Self {
        Tfn { l: x, m: x, u: x }
    }

    pub fn is_ordered(&self) -> bool {
        self.l <= self.m && self.m <= self.u
    }
}

impl From<[f64; 3]> for Tfn {
    fn from([l, m, u]: [f64; 3]) -> Self {
        Tfn { l, m, u }
    }
}

impl From<Tfn> for [f64; 3] {
    fn from(t: Tfn) -> Self {
        [t.l, t.m, t.u]
    }
}

/// Triangular membership degree of `x`.
///
/// Degenerate spans: when `l == m` the rising edge collapses and `x == m`
/// has degree 1; when `m == u`, likewise for the falling edge.
pub fn tfn_membership(t: &Tfn, x: f64) -> Result<f64, McdaError> {
    if !t.is_ordered() {
        return Err(McdaError::UnorderedTfn { l: t.l, m: t.m, u: t.u });
    }
    let Tfn { l, m, u } = *t;
    if x == m {
        return Ok(1.0);
    }
    Ok(if x <= l || x >= u {
        0.0
    } else if x <= m {
        (x - l) / (m - l)
    } else {
        (u - x) / (u - m)
    })
}

/// Center of gravity `(l + m + u) / 3`.
pub fn defuzzify_centroid(t: &Tfn) -> f64 {
    (t.l + t.m + t.u) / 3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPairwiseMatrix {
    n: usize,
    a: Vec<Tfn>,
    labels: Vec<String>,
}

impl FuzzyPairwiseMatrix {
    pub fn new(rows: Vec<Vec<Tfn>>) -> Result<Self, McdaError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(McdaError::NotSquare);
        }
        let a: Vec<Tfn> = rows.into_iter().flatten().collect();
        for (idx, t) in a.iter().enumerate() {
            let (row, col) = (idx / n, idx % n);
            for value in [t.l, t.m, t.u] {
                if !(value.is_finite() && value > 0.0) {
                    return Err(McdaError::NonPositive { row, col, value });
                }
            }
            if row == col && *t != Tfn::ONE {
                return Err(McdaError::Diagonal(row));
            }
        }
        Ok(FuzzyPairwiseMatrix { n, a, labels: default_labels(n) })
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

    pub fn get(&self, i: usize, j: usize) -> Tfn {
        self.a[i * self.n + j]
    }
}

/// Defuzzify every comparison by its centroid, then normalize row sums by
/// the grand total (the synthetic extent applied to crisp values).
pub fn fuzzy_ahp_weights(fm: &FuzzyPairwiseMatrix) -> WeightVector {
    let n = fm.n;
    let row_sums: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| defuzzify_centroid(&fm.get(i, j))).sum())
        .collect();
    let total: f64 = row_sums.iter().sum();
    let w = row_sums.iter().map(|r| r / total).collect();
    WeightVector::new(fm.labels.clone(), w).expect("positive matrix yields valid weights")
}
