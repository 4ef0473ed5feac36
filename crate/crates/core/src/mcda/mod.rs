//! Criterion weights from pairwise comparisons: crisp AHP and fuzzy AHP
//! with centroid defuzzification.

mod ahp;
mod fuzzy;
pub mod reference;

pub use ahp::{
    ahp_weights, consistency, matrix_from_priorities, random_index, Consistency, PairwiseMatrix,
    ACCEPTABLE_CR,
};
pub use fuzzy::{defuzzify_centroid, fuzzy_ahp_weights, tfn_membership, FuzzyPairwiseMatrix, Tfn};

use serde::{Deserialize, Serialize};

use crate::error::McdaError;

/// Normalized, strictly positive criterion weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self, McdaError> {
        if labels.len() != weights.len() {
            return Err(McdaError::LabelCount {
                labels: labels.len(),
                n: weights.len(),
            });
        }
        if weights.is_empty() {
            return Err(McdaError::InvalidWeights("empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(McdaError::InvalidWeights(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(McdaError::InvalidWeights(format!("weights sum to {total}")));
        }
        Ok(WeightVector { labels, weights })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.weights[i])
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("c{i}")).collect()
}
