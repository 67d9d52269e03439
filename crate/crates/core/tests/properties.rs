use opplearn_core::{
    build_fis, fcm_cluster, mine_opposites, type1_opposite, Bounds, Matrix, OppositionScheme, OptFunction,
    OptFunctionId, RunningRange, Sample, SampleSet, TestFunction, TestFunctionId, TrainConfig,
};
use proptest::prelude::*;

fn grid_samples(f: &TestFunction, n: usize) -> SampleSet {
    let b = f.domain();
    let h = b.width() / n as f64;
    let rows = (1..=n)
        .map(|k| {
            let x = b.lo() + k as f64 * h;
            Sample {
                inputs: vec![x],
                output: f.eval(x).unwrap(),
            }
        })
        .collect();
    SampleSet::new(rows, vec![b]).unwrap()
}

/// Largest gap between a mined T1 opposite and the analytic one, in grid steps.
fn worst_mining_gap(id: TestFunctionId) -> f64 {
    let f = TestFunction::new(id);
    let n = 10_000;
    let h = f.domain().width() / n as f64;
    let set = grid_samples(&f, n);
    let pairs = mine_opposites(&set, OppositionScheme::T1).unwrap();
    pairs
        .iter()
        .map(|p| {
            let truth = f.true_opposite(p.inputs[0], OppositionScheme::T1, set.output_range()).unwrap();
            assert!(!truth.flagged);
            (p.opposite_inputs[0] - truth.value).abs() / h
        })
        .fold(0.0, f64::max)
}

#[test]
fn mined_opposites_converge_on_a_fine_grid() {
    // nearest-output matching is off by at most one neighbouring grid point
    assert!(worst_mining_gap(TestFunctionId::F3) <= 0.5 + 1e-6);
    assert!(worst_mining_gap(TestFunctionId::F5) <= 1.0 + 1e-6);
}

#[test]
fn linear_function_type_two_equals_type_one() {
    let f = TestFunction::new(TestFunctionId::F3);
    let b = f.domain();
    let range = RunningRange::from_values([f.eval(b.lo()).unwrap(), f.eval(b.hi()).unwrap()]).unwrap();
    for k in 0..=1000 {
        let x = b.lo() + b.width() * k as f64 / 1000.0;
        let truth = f.true_opposite(x, OppositionScheme::T1, &range).unwrap();
        assert!((truth.value - type1_opposite(x, b).unwrap()).abs() <= 1e-9);
    }
}

#[test]
fn training_is_deterministic_under_a_seed() {
    let f = TestFunction::new(TestFunctionId::F4);
    let set = grid_samples(&f, 60);
    let pairs = mine_opposites(&set, OppositionScheme::T1).unwrap();
    let (inputs, targets) = opplearn_core::mining_dataset(&pairs).unwrap();
    let cfg = TrainConfig::default().with_clusters(6).with_seed(11);
    let a = build_fis(&inputs, &targets, &cfg).unwrap();
    let b = build_fis(&inputs, &targets, &cfg).unwrap();
    assert_eq!(a, b);
}

fn arb_data() -> impl Strategy<Value = Matrix> {
    (3usize..40, 1usize..4).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-50.0f64..50.0, rows * cols)
            .prop_map(move |data| Matrix::from_row_major(rows, cols, data).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fcm_stops_on_tolerance_or_budget(data in arb_data(), clusters in 1usize..4, seed in any::<u64>()) {
        let cfg = TrainConfig {
            n_clusters: clusters.min(data.rows()),
            max_iter: 200,
            seed,
            ..TrainConfig::default()
        };
        let res = fcm_cluster(&data, &cfg, None).unwrap();
        prop_assert!(res.final_shift < cfg.epsilon || res.iterations_used == cfg.max_iter);
        prop_assert!(res.centers.is_finite());
        prop_assert_eq!(res.memberships.rows(), data.rows());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn optimization_landscapes_are_nonnegative(u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
        for id in OptFunctionId::ALL {
            let g = OptFunction::new(id);
            let [b1, b2] = g.domain();
            let value = g.eval(b1.lo() + u * b1.width(), b2.lo() + v * b2.width());
            prop_assert!(value.is_finite() && value >= 0.0, "{:?} gave {}", id, value);
        }
    }

    #[test]
    fn t3_opposites_stay_in_range(values in proptest::collection::vec(-1e3f64..1e3, 1..30), v in -1e3f64..1e3) {
        let range = RunningRange::from_values(values).unwrap();
        let v = v.clamp(range.min(), range.max());
        let o = opplearn_core::scheme_opposite(v, OppositionScheme::T3, &range).unwrap();
        prop_assert!(o >= range.min() && o <= range.max());
    }

    #[test]
    fn type1_reverses_order(lo in -1e3f64..1e3, w in 1e-2f64..1e3, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        prop_assume!(a != b);
        let bounds = Bounds::new(lo, lo + w).unwrap();
        let (x1, x2) = (lo + a.min(b) * w, lo + a.max(b) * w);
        prop_assume!(x1 < x2);
        prop_assert!(type1_opposite(x1, bounds).unwrap() > type1_opposite(x2, bounds).unwrap());
    }
}
