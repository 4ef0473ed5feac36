use std::collections::BTreeSet;

use drastic_core::grid::{Grid, GridHeader};
use drastic_core::validation::{binarize, roc_auc, zone_coincidence, Observation};
use proptest::prelude::*;

/// O(n^2) Mann-Whitney: P(score_pos > score_neg) + 0.5 P(tie).
fn mann_whitney(scored: &[(f64, bool)]) -> f64 {
    let pos: Vec<f64> = scored.iter().filter(|s| s.1).map(|s| s.0).collect();
    let neg: Vec<f64> = scored.iter().filter(|s| !s.1).map(|s| s.0).collect();
    let mut wins = 0.0;
    for p in &pos {
        for n in &neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

fn arb_scored() -> impl Strategy<Value = Vec<(f64, bool)>> {
    proptest::collection::vec(((0i32..25).prop_map(|x| x as f64 * 0.5 + 1.0), any::<bool>()), 2..200)
        .prop_filter("both classes", |v| v.iter().any(|s| s.1) && v.iter().any(|s| !s.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn auc_equals_mann_whitney(scored in arb_scored()) {
        let r = roc_auc(&scored).unwrap();
        prop_assert!((r.auc - mann_whitney(&scored)).abs() < 1e-12);
    }

    #[test]
    fn roc_is_a_monotone_staircase(scored in arb_scored()) {
        let r = roc_auc(&scored).unwrap();
        let first = r.points[0];
        let last = *r.points.last().unwrap();
        prop_assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in r.points.windows(2) {
            prop_assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
            prop_assert!(w[1].threshold < w[0].threshold);
        }
        prop_assert!((0.0..=1.0).contains(&r.auc));
    }

    #[test]
    fn auc_invariant_under_increasing_maps(scored in arb_scored()) {
        let base = roc_auc(&scored).unwrap().auc;
        let lin: Vec<_> = scored.iter().map(|&(s, l)| (2.0 * s + 7.0, l)).collect();
        let cube: Vec<_> = scored.iter().map(|&(s, l)| (s * s * s, l)).collect();
        prop_assert!((roc_auc(&lin).unwrap().auc - base).abs() < 1e-12);
        prop_assert!((roc_auc(&cube).unwrap().auc - base).abs() < 1e-12);
    }

    #[test]
    fn flipping_labels_complements_auc(scored in arb_scored()) {
        let flipped: Vec<_> = scored.iter().map(|&(s, l)| (s, !l)).collect();
        let a = roc_auc(&scored).unwrap().auc;
        let b = roc_auc(&flipped).unwrap().auc;
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binarize_preserves_order_and_is_stable(n in proptest::collection::vec(0.0f64..400.0, 0..50)) {
        let obs: Vec<_> = n.iter().enumerate().map(|(i, &v)| Observation::new(i as f64, 0.0, v)).collect();
        let once = binarize(&obs, 50.0).unwrap();
        let again = binarize(&once.iter().map(|l| l.obs).collect::<Vec<_>>(), 50.0).unwrap();
        prop_assert_eq!(&once, &again);
        for (l, o) in once.iter().zip(&obs) {
            prop_assert_eq!(l.obs, *o);
            prop_assert_eq!(l.positive, o.nitrate > 50.0);
        }
    }

    #[test]
    fn positive_shares_partition(classes in proptest::collection::vec(1i32..=5, 16), nitrate in proptest::collection::vec(0.0f64..200.0, 10)) {
        let h = GridHeader::new(4, 4, 0.0, 0.0, 1.0, -9999.0).unwrap();
        let g = Grid::new(h, classes.into_iter().map(f64::from).collect()).unwrap();
        let obs: Vec<_> = nitrate.iter().enumerate()
            .map(|(i, &v)| Observation::new((i % 4) as f64 + 0.5, (i / 4) as f64 + 0.5, v))
            .collect();
        let m = zone_coincidence(&g, &obs, 50.0, &[4, 5].into(), &[1, 2, 3].into()).unwrap();
        if let (Some(a), Some(b)) = (m.pct_pos_in_high, m.pct_pos_outside_high) {
            prop_assert!((a + b - 100.0).abs() < 1e-9);
        } else {
            prop_assert_eq!(m.n_pos, 0);
        }
    }
}

#[test]
fn three_of_four_positives_in_high_zones() {
    // 4x1 strip, classes 5 5 4 1
    let h = GridHeader::new(4, 1, 0.0, 0.0, 1.0, -9999.0).unwrap();
    let g = Grid::new(h, vec![5.0, 5.0, 4.0, 1.0]).unwrap();
    let obs: Vec<_> = (0..4).map(|i| Observation::new(i as f64 + 0.5, 0.5, 90.0)).collect();
    let high: BTreeSet<u32> = [4, 5].into();
    let low: BTreeSet<u32> = [1, 2, 3].into();
    let m = zone_coincidence(&g, &obs, 50.0, &high, &low).unwrap();
    assert_eq!(m.pct_pos_in_high, Some(75.0));
    assert_eq!(m.pct_neg_in_low, None);
}
