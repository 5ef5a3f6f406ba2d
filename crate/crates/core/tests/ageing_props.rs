use std::sync::Arc;

use damrl_core::ageing::{classify_all_unchecked, nbu_nwu};
use damrl_core::theorems::catalog::CE3_SURVIVAL;
use damrl_core::{compose, AgeingClass, CovariateFunction, LifetimeModel, PiecewiseExpr, Settings, SpecKind, Verdict};
use proptest::prelude::*;

fn model_source() -> impl Strategy<Value = String> {
    prop_oneof![
        (1.0f64..4.0).prop_map(|a| format!("1/({a}+t)")),
        (0.5f64..3.0, 0.0f64..0.8).prop_map(|(a, b)| format!("{a}+{b}*t")),
        (0.5f64..2.0, -0.4f64..1.0).prop_map(|(a, b)| format!("{a}+{b}*exp(-t)")),
        (1.0f64..4.0).prop_map(|a| format!("1+1/({a}+t^2)")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn implications_and_duals_are_respected(src in model_source()) {
        let m = LifetimeModel::parse(SpecKind::Mrl, &src, &src).unwrap();
        let s = Settings::default();
        let grid = m.analysis_grid(&s).unwrap();
        let c = classify_all_unchecked(&m, &grid, &s).unwrap();
        prop_assert_eq!(c.chain_violation(), None, "{}", src);
        for class in AgeingClass::ALL {
            let (a, b) = (c.get(class), c.get(class.dual()));
            let strict = |v: &damrl_core::AgeingVerdict| v.verdict == Verdict::Holds && v.max_violation > 0.0;
            prop_assert!(!(strict(a) && strict(b)), "{src}: {class} and its dual both strictly hold");
        }
    }
}

/// NBU verdicts and witnesses of `S` on `[0,T]` against `S(2t)` on `[0,T/2]`.
fn assert_scale_equivariant(original: &LifetimeModel, scaled: &LifetimeModel, horizon: f64) {
    const K: f64 = 2.0;
    let s = Settings::default();
    let (a_better, a_worse) = nbu_nwu(original, horizon, s.nbu_points, s.tol).unwrap();
    let (b_better, b_worse) = nbu_nwu(scaled, horizon / K, s.nbu_points, s.tol).unwrap();
    for (a, b) in [(a_better, b_better), (a_worse, b_worse)] {
        assert_eq!(a.verdict, b.verdict, "{} of {}", a.class, original.label());
        match (a.witness, b.witness) {
            (None, None) => {}
            (Some(wa), Some(wb)) => {
                let h = 0.5 * horizon / (s.nbu_points - 1) as f64;
                assert!((wa.t / K - wb.t).abs() <= 1e-9 * h.max(1.0), "{} t: {} vs {}", a.class, wa.t, wb.t);
                let (xa, xb) = (wa.x.unwrap(), wb.x.unwrap());
                assert!((xa / K - xb).abs() <= 1e-9 * h.max(1.0), "{} x: {xa} vs {xb}", a.class);
            }
            other => panic!("{} witness presence differs: {other:?}", a.class),
        }
    }
}

#[test]
fn nbu_test_commutes_with_time_scaling() {
    // Counterexample 3's survival, an NWU distribution.
    let sv = PiecewiseExpr::parse(CE3_SURVIVAL.1).unwrap();
    let original = LifetimeModel::from_survival(sv.clone(), "ce3");
    let scaled = LifetimeModel::from_survival(sv.scale_argument(2.0), "ce3 x2");
    assert_scale_equivariant(&original, &scaled, 20.0);

    // Exponential base with c = 1/(2+t^2): the transformed lifetime is not NBU.
    let s = Settings::default();
    let cm = compose(
        Arc::new(LifetimeModel::exponential()),
        CovariateFunction::parse("1/(2+t^2)").unwrap(),
        &s,
        false,
    )
    .unwrap();
    let scaled = LifetimeModel::parse(SpecKind::Mrl, "(1+1/(2+(2*t)^2))/2", "necessity x2").unwrap();
    let horizon = cm.grid(&cm.pinned(&s)).unwrap().upper();
    let (better, _) = nbu_nwu(cm.star(), horizon, s.nbu_points, s.tol).unwrap();
    assert_eq!(better.verdict, Verdict::Fails);
    assert_scale_equivariant(cm.star(), &scaled, horizon);
}
