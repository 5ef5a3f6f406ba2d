use damrl_core::numeric::{integrate, integrate_tail};
use damrl_core::{Error, Grid, LifetimeModel, Settings, SpecKind};
use proptest::prelude::*;

/// Mean residual life families with finite mean on `t ≥ 0`.
fn mrl_source() -> impl Strategy<Value = String> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|a| format!("{a}")),
        (1.0f64..4.0).prop_map(|a| format!("1/({a}+t)")),
        (0.5f64..3.0, 0.0f64..0.8).prop_map(|(a, b)| format!("{a}+{b}*t")),
        (0.5f64..2.0, 0.5f64..1.0).prop_map(|(a, b)| format!("{a}+{b}*exp(-t)")),
    ]
}

fn model(src: &str) -> LifetimeModel {
    LifetimeModel::parse(SpecKind::Mrl, src, src).unwrap()
}

/// `∫_t^∞ S / S(t)` at the grid nodes by a backward recurrence on ratios.
fn mrl_back(m: &LifetimeModel, ts: &[f64]) -> Result<Vec<f64>, Error> {
    let ls = ts.iter().map(|&t| m.log_survival_of(t)).collect::<Result<Vec<_>, _>>()?;
    let ratio = |u: f64, base: f64| m.log_survival_of(u).map(|l| (l - base).exp());
    let n = ts.len();
    let mut out = vec![0.0; n];
    out[n - 1] = integrate_tail(|u| ratio(u, ls[n - 1]), ts[n - 1], 1.0 + ts[n - 1], 1e-12)?;
    for k in (0..n - 1).rev() {
        out[k] = integrate(|u| ratio(u, ls[k]), ts[k], ts[k + 1], 1e-13)? + out[k + 1] * (ls[k + 1] - ls[k]).exp();
    }
    Ok(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn survival_reproduces_mrl(src in mrl_source()) {
        let m = model(&src);
        let ts = Grid::new(0.0, 10.0, 41).unwrap().nodes();
        let back = mrl_back(&m, &ts).unwrap();
        for (t, b) in ts.iter().zip(back) {
            let want = m.mrl_of(*t).unwrap();
            prop_assert!((b - want).abs() <= 1e-6, "{src} at {t}: {b} vs {want}");
        }
    }

    #[test]
    fn hazard_is_minus_log_survival_slope(src in mrl_source(), t in 0.05f64..10.0) {
        let m = model(&src);
        let h = 1e-4;
        let fd = -(m.log_survival_of(t + h).unwrap() - m.log_survival_of(t - h).unwrap()) / (2.0 * h);
        let r = m.hazard_of(t).unwrap();
        prop_assert!((r - fd).abs() <= 1e-5, "{src} at {t}: {r} vs {fd}");
    }

    #[test]
    fn mean_is_mrl_at_zero(src in mrl_source()) {
        let m = model(&src);
        prop_assert!((m.mean_of().unwrap() - m.mrl_of(0.0).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn valid_models_have_nonnegative_hazard(src in mrl_source()) {
        let m = model(&src);
        let s = Settings::default();
        prop_assert!(m.validate(&s).accepted());
        for t in m.analysis_grid(&s).unwrap().nodes() {
            prop_assert!(m.hazard_of(t).unwrap() >= -1e-9);
        }
    }

    #[test]
    fn hazard_specs_agree_with_mrl_specs(a in 1.0f64..4.0) {
        // m = 1/(a+t) has hazard (a+t)(1 - 1/(a+t)^2).
        let by_mrl = model(&format!("1/({a}+t)"));
        let src = format!("({a}+t)*(1-1/({a}+t)^2)");
        let by_hazard = LifetimeModel::parse(SpecKind::Hazard, &src, &src).unwrap();
        for t in [0.0, 0.5, 1.0, 2.5, 4.0] {
            let (x, y) = (by_mrl.mrl_of(t).unwrap(), by_hazard.mrl_of(t).unwrap());
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "t={t}: {x} vs {y}");
        }
    }
}
