use drastic_core::mcda::{
    ahp_weights, consistency, defuzzify_centroid, fuzzy_ahp_weights, matrix_from_priorities,
    reference, FuzzyPairwiseMatrix, PairwiseMatrix, Tfn,
};
use proptest::prelude::*;

#[test]
fn published_ratio_matrix_weights() {
    let pm = matrix_from_priorities(&reference::DRASTIC_LU_WEIGHTS).unwrap();
    let w = ahp_weights(&pm);
    let expected = [0.1786, 0.1429, 0.1071, 0.0714, 0.0357, 0.1786, 0.1071, 0.1786];
    for (got, want) in w.weights().iter().zip(expected) {
        assert!((got - want).abs() < 5e-4, "{got} vs {want}");
    }
    let c = consistency(&pm, &w).unwrap();
    assert!((c.lambda_max - 8.0).abs() < 1e-9);
    assert!(c.ci.abs() < 1e-9 && c.cr.abs() < 1e-9);
}

/// Spreadsheet-style evaluation: centroid of every printed triple, row
/// totals, grand total.
#[test]
fn published_fuzzy_matrix_against_hand_oracle() {
    let rows = reference::DRASTIC_LU_FUZZY;
    let mut row_totals = [0.0f64; 8];
    for (i, row) in rows.iter().enumerate() {
        for t in row {
            row_totals[i] += (t[0] + t[1] + t[2]) / 3.0;
        }
    }
    let grand: f64 = row_totals.iter().sum();
    let oracle: Vec<f64> = row_totals.iter().map(|r| r / grand).collect();

    let fm = FuzzyPairwiseMatrix::new(reference::drastic_lu_fuzzy_rows()).unwrap();
    let w = fuzzy_ahp_weights(&fm);
    for (got, want) in w.weights().iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-12);
    }
    let published = [0.1233, 0.1169, 0.1142, 0.1207, 0.1640, 0.1233, 0.1142, 0.1233];
    for (got, want) in w.weights().iter().zip(published) {
        assert!((got - want).abs() < 5e-3, "{got} vs {want}");
    }
}

fn arb_priorities() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.05f64..20.0, 3..=9)
}

proptest! {
    #[test]
    fn ratio_matrix_weights_are_normalized_priorities(v in arb_priorities()) {
        let pm = matrix_from_priorities(&v).unwrap();
        let w = ahp_weights(&pm);
        let total: f64 = v.iter().sum();
        for (wi, vi) in w.weights().iter().zip(&v) {
            prop_assert!((wi - vi / total).abs() < 1e-12);
        }
        prop_assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let c = consistency(&pm, &w).unwrap();
        prop_assert!(c.cr.abs() < 1e-9);
    }

    #[test]
    fn priority_scale_cancels(v in arb_priorities(), alpha in 0.01f64..100.0) {
        let scaled: Vec<f64> = v.iter().map(|x| x * alpha).collect();
        let a = ahp_weights(&matrix_from_priorities(&v).unwrap());
        let b = ahp_weights(&matrix_from_priorities(&scaled).unwrap());
        for (x, y) in a.weights().iter().zip(b.weights()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ahp_weights_positive_and_normalized(entries in proptest::collection::vec(prop_oneof![
        (1i32..=9).prop_map(f64::from),
        (1i32..=9).prop_map(|x| 1.0 / x as f64)
    ], 15)) {
        // 6x6 reciprocal matrix from 15 upper-triangle judgments
        let n = 6;
        let mut rows = vec![vec![1.0; n]; n];
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        for ((i, j), a) in pairs.zip(entries) {
            rows[i][j] = a;
            rows[j][i] = 1.0 / a;
        }
        let pm = PairwiseMatrix::new(rows).unwrap();
        let w = ahp_weights(&pm);
        prop_assert!(w.weights().iter().all(|x| *x > 0.0));
        prop_assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let c = consistency(&pm, &w).unwrap();
        prop_assert!(c.lambda_max >= n as f64 - 1e-9);
    }

    #[test]
    fn centroid_is_affine(l in -10.0f64..10.0, m in -10.0f64..10.0, u in -10.0f64..10.0, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let lhs = defuzzify_centroid(&Tfn::new(a * l + b, a * m + b, a * u + b));
        let rhs = a * defuzzify_centroid(&Tfn::new(l, m, u)) + b;
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn crisp_fuzzy_matrix_reduces_to_row_normalization(v in arb_priorities()) {
        let n = v.len();
        let rows: Vec<Vec<Tfn>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Tfn::ONE } else { Tfn::crisp(v[i] / v[j]) }).collect())
            .collect();
        let w = fuzzy_ahp_weights(&FuzzyPairwiseMatrix::new(rows).unwrap());
        let pm = matrix_from_priorities(&v).unwrap();
        let row_sums: Vec<f64> = (0..n).map(|i| (0..n).map(|j| pm.get(i, j)).sum()).collect();
        let total: f64 = row_sums.iter().sum();
        for (wi, r) in w.weights().iter().zip(&row_sums) {
            prop_assert!((wi - r / total).abs() < 1e-12);
        }
    }

    #[test]
    fn reciprocity_is_checked(a in 1.5f64..9.0, b in 1.5f64..9.0) {
        let r = PairwiseMatrix::new(vec![vec![1.0, a], vec![b, 1.0]]);
        prop_assert!(r.is_err());
    }
}

#[test]
fn crisp_consistent_fuzzy_matrix_gives_priority_shares() {
    // degenerate TFNs of a consistent matrix: w_i = v_i / Σv
    let v = [4.0, 2.0, 1.0];
    let rows: Vec<Vec<Tfn>> = (0..3)
        .map(|i| (0..3).map(|j| Tfn::crisp(v[i] / v[j])).collect())
        .collect();
    let w = fuzzy_ahp_weights(&FuzzyPairwiseMatrix::new(rows).unwrap());
    // row sums of a ratio matrix are v_i * Σ(1/v_j), so shares equal v_i / Σv
    for (wi, vi) in w.weights().iter().zip(v) {
        assert!((wi - vi / 7.0).abs() < 1e-12);
    }
}
