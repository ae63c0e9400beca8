//! Randomized invariants of the expression engine: derivative correctness
//! against central finite differences, parse/print round-tripping,
//! simplify soundness, and canonicalization idempotence.

use proptest::prelude::*;
use sundman_core::expr::{
    canonical, differentiate, evaluate, parse, simplify, EvalPoint, Expr, Func,
};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=4, 2i64..=5).prop_map(|(p, q)| Expr::rational(p, q)),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::arb("c1")),
    ]
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
            (inner.clone(), 1i64..=3).prop_map(|(a, n)| a.pow(Expr::int(n))),
            inner.clone().prop_map(|a| a.pow(Expr::int(-1))),
            inner.clone().prop_map(|a| Expr::func(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::func(Func::Cos, a)),
            // exp of a damped argument to keep magnitudes sane
            inner
                .clone()
                .prop_map(|a| Expr::func(Func::Exp, a.mul(Expr::rational(1, 4)))),
            inner.prop_map(|a| Expr::func(
                Func::Ln,
                Expr::int(1).add(a.pow(Expr::int(2)))
            )),
        ]
    })
}

fn point(x: f64, y: f64) -> EvalPoint {
    EvalPoint::new().with("x", x).with("y", y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn parse_print_round_trip(e in expr_strategy()) {
        let canonical_form = canonical(&e);
        let printed = sundman_core::print(&canonical_form);
        let reparsed = parse(&printed)
            .unwrap_or_else(|err| panic!("`{printed}` failed to parse: {err}"));
        prop_assert_eq!(reparsed, canonical_form, "printed form was `{}`", printed);
    }

    #[test]
    fn canonicalization_is_idempotent(e in expr_strategy()) {
        let once = canonical(&e);
        prop_assert_eq!(canonical(&once), once);
    }

    #[test]
    fn simplify_is_idempotent_and_sound(e in expr_strategy(), x in 0.4f64..1.6, y in 0.4f64..1.6) {
        let s = simplify(&e);
        prop_assert_eq!(simplify(&s), s.clone(), "not idempotent for {}", e);
        let p = point(x, y);
        if let (Ok(v0), Ok(v1)) = (evaluate(&e, &p), evaluate(&s, &p)) {
            let tol = 1e-10 * (1.0 + v0.abs());
            prop_assert!(
                (v0 - v1).abs() <= tol,
                "simplify changed value at ({x}, {y}): {v0} vs {v1} for {e}"
            );
        }
    }

    #[test]
    fn derivative_matches_finite_differences(
        e in expr_strategy(),
        x in 0.45f64..1.55,
        y in 0.45f64..1.55,
    ) {
        let d = match differentiate(&e, "x") {
            Ok(d) => d,
            Err(_) => return Ok(()),
        };
        let h = 1e-5;
        let center = point(x, y);
        let plus = point(x + h, y);
        let minus = point(x - h, y);
        let (Ok(fp), Ok(fm), Ok(dv)) = (
            evaluate(&e, &plus),
            evaluate(&e, &minus),
            evaluate(&d, &center),
        ) else {
            return Ok(());
        };
        // skip badly scaled samples where the difference quotient is noise
        if fp.abs() > 1e6 || fm.abs() > 1e6 {
            return Ok(());
        }
        let fd = (fp - fm) / (2.0 * h);
        prop_assert!(
            (dv - fd).abs() <= 1e-4 * (1.0 + dv.abs().max(fd.abs())),
            "d/dx {} = {} but finite difference gives {} at ({}, {})",
            e, dv, fd, x, y
        );
    }
}
