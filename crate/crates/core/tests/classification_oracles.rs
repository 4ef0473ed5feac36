use drastic_core::classification::{
    apply_rating, classify, jenks_breaks, standard_schemes, within_class_sse, ClassBreaks,
};
use drastic_core::grid::{Grid, GridHeader};
use proptest::prelude::*;

/// Exhaustive minimum within-class SSE over every way to cut the sorted
/// values into `k` non-empty contiguous groups.
fn brute_force_cost(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let sse = |s: &[f64]| {
        let m = s.iter().sum::<f64>() / s.len() as f64;
        s.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
    };
    let mut best = f64::INFINITY;
    // cut positions c in 1..n, choose k-1 of them
    let mut cuts: Vec<usize> = (1..k).collect();
    if k == 1 {
        return sse(&v);
    }
    loop {
        let mut bounds = vec![0];
        bounds.extend(&cuts);
        bounds.push(n);
        let cost: f64 = bounds.windows(2).map(|w| sse(&v[w[0]..w[1]])).sum();
        best = best.min(cost);
        // next combination
        let mut i = k - 1;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if cuts[i] < n - (k - 1 - i) {
                cuts[i] += 1;
                for j in i + 1..k - 1 {
                    cuts[j] = cuts[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Textbook O(k n^2) Fisher DP on the raw sorted values.
fn plain_dp_cost(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let seg = |a: usize, b: usize| {
        let s = &v[a..=b];
        let m = s.iter().sum::<f64>() / s.len() as f64;
        s.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
    };
    let mut f = vec![vec![f64::INFINITY; n]; k];
    for (i, cell) in f[0].iter_mut().enumerate() {
        *cell = seg(0, i);
    }
    for m in 1..k {
        for i in m..n {
            for j in m..=i {
                let c = f[m - 1][j - 1] + seg(j, i);
                if c < f[m][i] {
                    f[m][i] = c;
                }
            }
        }
    }
    f[k - 1][n - 1]
}

fn distinct(v: &[f64]) -> usize {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s.len()
}

fn arb_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(
        prop_oneof![3 => -100.0f64..100.0, 1 => (0i32..6).prop_map(f64::from)],
        1..=max_len,
    )
}

#[test]
fn oracle_two_clusters() {
    let v = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0];
    // splitting after the third value is the exhaustive optimum
    let cost = brute_force_cost(&v, 2);
    assert!((cost - 4.0).abs() < 1e-12);
    let cb = jenks_breaks(&v, 2).unwrap();
    assert_eq!(cb.breaks, vec![3.0]);
    assert!((within_class_sse(&v, &cb) - cost).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dp_matches_exhaustive(values in arb_values(12), k in 1usize..=4) {
        prop_assume!(distinct(&values) >= k);
        let cb = jenks_breaks(&values, k).unwrap();
        prop_assert_eq!(cb.k(), k);
        let got = within_class_sse(&values, &cb);
        let want = brute_force_cost(&values, k);
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want), "got {} want {}", got, want);
    }

    #[test]
    fn dp_matches_plain_dp_on_larger_inputs(values in arb_values(120), k in 1usize..=7) {
        prop_assume!(distinct(&values) >= k);
        let cb = jenks_breaks(&values, k).unwrap();
        let got = within_class_sse(&values, &cb);
        let want = plain_dp_cost(&values, k);
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want), "got {} want {}", got, want);
    }

    #[test]
    fn classes_invariant_under_positive_affine_maps(values in arb_values(12), k in 1usize..=4, a in 0.1f64..20.0, b in -50.0f64..50.0) {
        prop_assume!(distinct(&values) >= k);
        let h = GridHeader::new(values.len(), 1, 0.0, 0.0, 1.0, -9999.0).unwrap();
        let g = Grid::new(h, values.clone()).unwrap();
        let tg = g.map_cells(|x| a * x + b).unwrap();
        let tv: Vec<f64> = tg.values().to_vec();
        prop_assume!(distinct(&tv) == distinct(&values));
        let c1 = classify(&g, &jenks_breaks(&values, k).unwrap()).unwrap();
        let c2 = classify(&tg, &jenks_breaks(&tv, k).unwrap()).unwrap();
        prop_assert_eq!(c1.values(), c2.values());
    }

    #[test]
    fn classify_is_monotone(values in arb_values(40), breaks in proptest::collection::btree_set(-100i32..100, 0..6)) {
        let cb = ClassBreaks::with_default_labels(breaks.into_iter().map(f64::from).collect()).unwrap();
        let mut v = values.clone();
        v.sort_by(f64::total_cmp);
        let ids: Vec<u32> = v.iter().map(|x| cb.class_of(*x)).collect();
        prop_assert!(ids.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(ids.iter().all(|c| (1..=cb.k() as u32).contains(c)));
    }

    #[test]
    fn ratings_stay_in_range(values in proptest::collection::vec(-100.0f64..500.0, 1..50)) {
        let h = GridHeader::new(values.len(), 1, 0.0, 0.0, 1.0, -9999.0).unwrap();
        let g = Grid::new(h, values).unwrap();
        for scheme in standard_schemes() {
            let rated = apply_rating(&g, &scheme).unwrap();
            prop_assert!(rated.grid.valid_values().all(|r| (1.0..=10.0).contains(&r)));
        }
    }
}
