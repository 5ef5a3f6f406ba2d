use std::sync::Arc;

use damrl_core::ageing::classify_all_unchecked;
use damrl_core::{
    compose, hazard_star, hazard_star_derivative_terms, validate_lemma1, CovariateFunction, LifetimeModel, Settings,
    SpecKind,
};
use proptest::prelude::*;

fn base_source() -> impl Strategy<Value = (SpecKind, String)> {
    prop_oneof![
        Just((SpecKind::Mrl, "1".to_string())),
        (1.0f64..4.0).prop_map(|a| (SpecKind::Mrl, format!("1/({a}+t)"))),
        (0.5f64..3.0).prop_map(|a| (SpecKind::Mrl, format!("{a}+t"))),
        Just((SpecKind::Hazard, "2/(1+t) on [0,1); 1 on [1,inf)".to_string())),
    ]
}

fn covariate_source() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.1f64..2.0, 0.1f64..2.0).prop_map(|(a, b)| format!("{a}*exp(-{b}*t)")),
        (0.5f64..5.0).prop_map(|a| format!("t/({a}+t)")),
        (1.0f64..5.0).prop_map(|a| format!("1/({a}+t)")),
        (1.0f64..4.0).prop_map(|a| format!("1/({a}+t^2)")),
        (0.0f64..2.0, 0.0f64..2.0).prop_map(|(a, b)| format!("{a}+{b}*t")),
    ]
}

/// Covariates that never decrease.
fn nondecreasing_covariate() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.5f64..5.0).prop_map(|a| format!("t/({a}+t)")),
        (0.0f64..2.0, 0.0f64..2.0).prop_map(|(a, b)| format!("{a}+{b}*t")),
        (0.1f64..2.0).prop_map(|a| format!("{a}*(1-exp(-t))")),
    ]
}

fn base(kind: SpecKind, src: &str) -> Arc<LifetimeModel> {
    Arc::new(LifetimeModel::parse(kind, src, src).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn two_routes_to_the_hazard_agree((kind, b) in base_source(), c in covariate_source()) {
        let s = Settings::default();
        let cm = compose(base(kind, &b), CovariateFunction::parse(&c).unwrap(), &s, true).unwrap();
        let grid = cm.grid(&cm.pinned(&s)).unwrap();
        for t in grid.nodes().into_iter().step_by(10) {
            let l = cm.star().local(t).unwrap();
            let direct = (1.0 + l.dm) / l.m;
            let two_term = hazard_star(&cm, t).unwrap();
            prop_assert!((two_term - direct).abs() <= 1e-8, "{b} + {c} at {t}: {two_term} vs {direct}");
        }
    }

    #[test]
    fn four_terms_sum_to_the_derivative((kind, b) in base_source(), c in covariate_source(), t in 0.1f64..8.0) {
        let s = Settings::default();
        let cm = compose(base(kind, &b), CovariateFunction::parse(&c).unwrap(), &s, true).unwrap();
        let h = 1e-4;
        prop_assume!(cm.breakpoints().iter().all(|&p| (p - t).abs() > 2.0 * h));
        let sum: f64 = hazard_star_derivative_terms(&cm, t).unwrap().iter().sum();
        let fd = (hazard_star(&cm, t + h).unwrap() - hazard_star(&cm, t - h).unwrap()) / (2.0 * h);
        prop_assert!((sum - fd).abs() <= 1e-5, "{b} + {c} at {t}: {sum} vs {fd}");
    }

    #[test]
    fn nondecreasing_covariate_keeps_condition_iii((kind, b) in base_source(), c in nondecreasing_covariate()) {
        let s = Settings::default();
        let m = base(kind, &b);
        let report = validate_lemma1(&m, &CovariateFunction::parse(&c).unwrap(), &s);
        prop_assert!(report.cond_iii.holds(), "{b} + {c}: {:?}", report.cond_iii);
    }
}

#[test]
fn zero_covariate_leaves_every_class_unchanged() {
    let s = Settings::default();
    for (kind, b) in [
        (SpecKind::Mrl, "1"),
        (SpecKind::Mrl, "1/(2+t)"),
        (SpecKind::Mrl, "1+t"),
        (SpecKind::Hazard, "2/(1+t) on [0,1); 1 on [1,inf)"),
    ] {
        let m = base(kind, b);
        let cm = compose(m.clone(), CovariateFunction::zero(), &s, false).unwrap();
        let pinned = cm.pinned(&s);
        let grid = cm.grid(&pinned).unwrap();
        let x = classify_all_unchecked(&m, &grid, &pinned).unwrap();
        let y = classify_all_unchecked(cm.star(), &grid, &pinned).unwrap();
        assert_eq!(x, y, "{b}");
    }
}
