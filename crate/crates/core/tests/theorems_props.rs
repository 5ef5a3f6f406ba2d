use damrl_core::theorems::catalog::load_catalog;
use damrl_core::theorems::check_hypotheses;
use damrl_core::theorems::search::{search_counterexample, Family, Param, SearchSpec};
use damrl_core::{Settings, SpecKind, TheoremId};

#[test]
fn failing_hypotheses_still_fail_on_a_finer_grid() {
    let coarse = Settings::default();
    let fine = Settings {
        grid_points: 4001,
        ..Settings::default()
    };
    let mut compared = 0;
    for e in load_catalog() {
        let cm = e.compose(&coarse).unwrap();
        let spacing = cm.grid(&cm.pinned(&coarse)).unwrap().spacing();
        for id in TheoremId::ALL {
            let a = check_hypotheses(id, &cm, &coarse).unwrap();
            let b = check_hypotheses(id, &cm, &fine).unwrap();
            for (k, (x, y)) in a.iter().zip(&b).enumerate() {
                if !x.fails() {
                    continue;
                }
                compared += 1;
                assert!(y.fails(), "{} {id} hyp {}: fails at 2001 points but not at 4001", e.name, k + 1);
                let (wx, wy) = (x.witness().unwrap(), y.witness().unwrap());
                assert!(
                    (wx.t - wy.t).abs() <= spacing * (1.0 + 1e-9),
                    "{} {id} hyp {}: witness moved from {} to {}",
                    e.name,
                    k + 1,
                    wx.t,
                    wy.t
                );
            }
        }
    }
    assert!(compared > 20, "only {compared} failing hypotheses compared");
}

#[test]
fn seeded_search_is_bit_reproducible() {
    let spec = SearchSpec {
        id: TheoremId::T3,
        drop: 2,
        base: Family::new("exponential", SpecKind::Mrl, "1", vec![]),
        family: Family::covariate("bump", "1/({a}+t^2)", vec![Param::new("a", 1.0, 4.0)]),
        trials: 12,
        seed: 99,
    };
    let s = Settings::default();
    let a = search_counterexample(&spec, &s).unwrap();
    let b = search_counterexample(&spec, &s).unwrap();
    assert_eq!(a.findings, b.findings);
    let bits = |o: &damrl_core::theorems::search::SearchOutcome| {
        o.findings.iter().flat_map(|f| f.theta.iter().map(|v| v.to_bits())).collect::<Vec<_>>()
    };
    assert_eq!(bits(&a), bits(&b));
    // The bump covariates break IFRA for the exponential base.
    assert!(a.necessity().count() > 0);
}
