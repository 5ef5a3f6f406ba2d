use damrl_core::{DerivOrder, PiecewiseExpr, Side};
use proptest::prelude::*;

/// Smooth expressions in `t` that stay finite on `t ≥ 0`.
fn smooth() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("t".to_string()),
        (1u32..30).prop_map(|k| format!("{}", k as f64 / 10.0)),
        (1u32..30).prop_map(|k| format!("(t+{})", k as f64 / 10.0)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}+{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}-{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}*{b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}/(1+{b}^2))")),
            inner.clone().prop_map(|a| format!("exp(-{a}^2)")),
            inner.clone().prop_map(|a| format!("ln(1+{a}^2)")),
            (inner.clone(), 2u32..4).prop_map(|(a, k)| format!("{a}^{k}")),
        ]
    })
}

fn parse(src: &str) -> PiecewiseExpr {
    PiecewiseExpr::parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivative_matches_central_difference(src in smooth(), t in 0.1f64..10.0) {
        let f = parse(&src);
        let h = 1e-5;
        let (lo, hi, mid) = (f.eval(t - h).unwrap(), f.eval(t + h).unwrap(), f.eval(t).unwrap());
        prop_assume!(mid.abs().max(lo.abs()).max(hi.abs()) < 1e4);
        let fd = (hi - lo) / (2.0 * h);
        let d = f.deriv(t, DerivOrder::First, Side::Right).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0), "{src} at {t}: {d} vs {fd}");
    }

    #[test]
    fn printing_then_parsing_is_identity(src in smooth()) {
        let a = parse(&src);
        let b = parse(&a.to_string());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn eval_is_deterministic(src in smooth(), t in 0.0f64..50.0) {
        let a = parse(&src).eval(t).unwrap();
        let b = parse(&src).eval(t).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn pieces_must_tile(cut in 0.5f64..5.0, off in 0.01f64..1.0, gap in any::<bool>()) {
        let next = if gap { cut + off } else { cut - off.min(cut / 2.0) };
        let src = format!("1 on [0,{cut}); 2 on [{next},inf)");
        prop_assert!(PiecewiseExpr::parse(&src).is_err());
        let ok = format!("1 on [0,{cut}); 2 on [{cut},inf)");
        prop_assert!(PiecewiseExpr::parse(&ok).is_ok());
        let open = format!("1 on [0,{cut}); 2 on [{cut},{})", cut + 1.0);
        prop_assert!(PiecewiseExpr::parse(&open).is_err());
    }

    #[test]
    fn breakpoint_value_comes_from_the_right(cut in 0.5f64..5.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = parse(&format!("{a} on [0,{cut}); {b} on [{cut},inf)"));
        prop_assert_eq!(f.eval(cut).unwrap(), b);
    }
}
