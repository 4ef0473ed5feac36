use drastic_core::synthetic::{generate, SyntheticScenario};
use drastic_core::validation::{binarize, roc_auc, score_wells, NITRATE_THRESHOLD_MG_L};

fn planted_auc(scenario: &SyntheticScenario) -> Option<f64> {
    let data = generate(scenario).unwrap();
    let labeled = binarize(&data.observations, NITRATE_THRESHOLD_MG_L).unwrap();
    let scored = score_wells(&data.planted_vi, &labeled).unwrap();
    roc_auc(&scored.pairs()).ok().map(|r| r.auc)
}

fn small(seed: u64, steepness: f64) -> SyntheticScenario {
    SyntheticScenario {
        seed,
        steepness,
        geometry: drastic_core::GridHeader::new(60, 60, 0.0, 0.0, 50.0, -9999.0).unwrap(),
        ..SyntheticScenario::default()
    }
}

#[test]
fn same_seed_same_data() {
    let a = generate(&small(5, 8.0)).unwrap();
    let b = generate(&small(5, 8.0)).unwrap();
    assert_eq!(a.layers, b.layers);
    assert_eq!(a.observations, b.observations);
    assert_eq!(a.depth_samples, b.depth_samples);
    let c = generate(&small(6, 8.0)).unwrap();
    assert_ne!(a.observations, c.observations);
}

#[test]
fn default_scenario_separates_wells() {
    let auc = planted_auc(&SyntheticScenario::default()).unwrap();
    assert!(auc >= 0.9, "planted AUC {auc}");
}

#[test]
fn default_scenario_without_signal_is_near_chance() {
    let s = SyntheticScenario {
        steepness: 0.0,
        ..SyntheticScenario::default()
    };
    let auc = planted_auc(&s).unwrap();
    assert!((0.35..=0.65).contains(&auc), "null AUC {auc}");
}

#[test]
fn null_auc_centres_on_one_half() {
    let aucs: Vec<f64> = (0..200).filter_map(|seed| planted_auc(&small(seed, 0.0))).collect();
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    assert!((mean - 0.5).abs() < 0.03, "mean null AUC {mean}");
}

#[test]
fn steeper_link_separates_better_on_average() {
    let mean_auc = |steepness: f64| {
        let v: Vec<f64> = (0..40).filter_map(|seed| planted_auc(&small(seed, steepness))).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let curve: Vec<f64> = [0.0, 1.0, 3.0, 8.0, f64::INFINITY].into_iter().map(mean_auc).collect();
    assert!(curve.windows(2).all(|w| w[1] >= w[0] - 0.01), "{curve:?}");
    assert_eq!(*curve.last().unwrap(), 1.0);
}
