//! Sundman transformation construction and solution recovery.

use super::{
    EtaTag, FamilyRhs, FirstIntegral, LinearizeError, SolutionFamily, SundmanTransform,
};
use crate::calculus::{antiderivative_in, close_gaussian};
use crate::expr::{
    canonical, depends_only_on, differentiate, expand, is_identically_zero, simplify, Expr, Func,
    SampleBox, DEFAULT_TOL,
};
use num_rational::Rational64;
use num_traits::Signed;
use std::collections::BTreeSet;

/// Scans the eta catalog for psi = eta(I), phi = psi_y / A, preferring the
/// first eta that makes phi a function of x alone; falls back to the
/// identity with `point_transformation = false`.
pub fn build_transform(
    fi: &FirstIntegral,
    invariant: &Expr,
    catalog: &[EtaTag],
    sample_box: &SampleBox,
) -> Result<SundmanTransform, LinearizeError> {
    let x_only: BTreeSet<String> = ["x".to_string()].into();
    let mut fallback: Option<SundmanTransform> = None;
    for eta in catalog {
        let psi = simplify(&eta.apply(invariant));
        let psi_y = match differentiate(&psi, "y") {
            Ok(d) => d,
            Err(_) => continue,
        };
        let phi = simplify(&psi_y.clone().mul(fi.a.clone().pow(Expr::int(-1))));
        // the transformation must satisfy psi_y phi != 0
        let degenerate = matches!(
            is_identically_zero(&simplify(&psi_y.mul(phi.clone())), sample_box, DEFAULT_TOL),
            Ok((true, _))
        );
        if degenerate {
            continue;
        }
        let st = SundmanTransform {
            invariant: invariant.clone(),
            eta: *eta,
            psi,
            phi: phi.clone(),
            point_transformation: false,
        };
        if depends_only_on(&phi, &x_only, sample_box, DEFAULT_TOL)? {
            return Ok(SundmanTransform {
                point_transformation: true,
                ..st
            });
        }
        if fallback.is_none() {
            fallback = Some(st);
        }
    }
    fallback.ok_or(LinearizeError::DegenerateTransform)
}

/// Numeric cross-check of the alternative phi = psi_x / B (defined where
/// B != 0); agreement with psi_y / A is a consistency property of the
/// construction.
pub fn phi_alternative_agrees(
    fi: &FirstIntegral,
    st: &SundmanTransform,
    sample_box: &SampleBox,
) -> Result<bool, LinearizeError> {
    if let Ok((true, _)) = is_identically_zero(&fi.b, sample_box, DEFAULT_TOL) {
        return Ok(true);
    }
    let psi_x = differentiate(&st.psi, "x")?;
    let residual = simplify(
        &psi_x
            .mul(fi.b.clone().pow(Expr::int(-1)))
            .sub(st.phi.clone()),
    );
    Ok(is_identically_zero(&residual, sample_box, DEFAULT_TOL)?.0)
}

/// Recovers the two-parameter solution family psi = c1 + c2 mu(x).
///
/// Point transformations get mu = int phi dx and a normalized closed family
/// lhs = c1 u1(x) + c2 u2(x): both sides are multiplied by the common
/// x-denominator of psi, Gaussian integrals close into erf/erfi, and
/// variable-free overall factors are absorbed into the arbitrary constants.
/// Non-point transformations keep mu implicit (dt/dx = phi(x, y)) and the
/// degenerate c2 = 0 member lhs = c1 remains exact.
pub fn general_solution(
    st: &SundmanTransform,
    sample_box: &SampleBox,
) -> Result<SolutionFamily, LinearizeError> {
    if !st.point_transformation {
        let lhs = close_gaussian(&st.psi);
        let gamma = invert_in_y(&lhs, &Expr::arb("c1"));
        return Ok(SolutionFamily {
            lhs,
            rhs: FamilyRhs::Implicit {
                phi: st.phi.clone(),
            },
            mu: None,
            gamma,
        });
    }

    let mu = antiderivative_in(&st.phi, "x", sample_box);
    let chi = common_x_denominator(&st.psi);
    let mut lhs = close_gaussian(&expand(&chi.clone().mul(st.psi.clone())));
    let mut u1 = simplify(&chi.clone());
    let mut u2 = expand(&chi.mul(mu.result.clone()));

    // strip variable-free factors of lhs into the constants
    let (constant_part, variable_part) = split_constant_factors(&lhs);
    if !variable_part.is_one() && !constant_part.is_one() {
        lhs = variable_part;
    }
    // a variable-free basis function is normalized to its positive value
    for u in [&mut u1, &mut u2] {
        if let Some(r) = u.as_rational() {
            if r.is_negative() {
                *u = Expr::from_ratio(-r);
            }
        }
    }

    let rhs_expr = Expr::arb("c1")
        .mul(u1.clone())
        .add(Expr::arb("c2").mul(u2.clone()));
    let gamma = invert_in_y(&lhs, &rhs_expr);

    Ok(SolutionFamily {
        lhs,
        rhs: FamilyRhs::Closed { u1, u2 },
        mu: Some(mu.result),
        gamma,
    })
}

/// Product of x-only bases that occur with a negative exponent in some
/// additive term of psi, each at its deepest power.
fn common_x_denominator(psi: &Expr) -> Expr {
    let mut denominators: Vec<(Expr, Rational64)> = Vec::new();
    for term in psi.terms() {
        for factor in term.factors() {
            let (base, exp) = factor.as_power();
            let vars = base.free_variables();
            if vars.is_empty() || !vars.iter().all(|v| v == "x") {
                continue;
            }
            if let Some(r) = exp.as_rational() {
                if r.is_negative() {
                    let depth = -r;
                    match denominators.iter_mut().find(|(b, _)| *b == base) {
                        Some((_, d)) => {
                            if depth > *d {
                                *d = depth;
                            }
                        }
                        None => denominators.push((base, depth)),
                    }
                }
            }
        }
    }
    let factors: Vec<Expr> = denominators
        .into_iter()
        .map(|(b, d)| canonical(&Expr::Power(Box::new(b), Box::new(Expr::from_ratio(d)))))
        .collect();
    canonical(&Expr::Product(factors))
}

/// Splits a product into (variable-free, variable-dependent) parts.
fn split_constant_factors(e: &Expr) -> (Expr, Expr) {
    let mut constant = Vec::new();
    let mut variable = Vec::new();
    for factor in e.factors() {
        if factor.is_constant() {
            constant.push(factor);
        } else {
            variable.push(factor);
        }
    }
    (
        canonical(&Expr::Product(constant)),
        canonical(&Expr::Product(variable)),
    )
}

/// Solves lhs(x, y) = rhs for y when exactly one additive term depends on y
/// and that term is invertible with the available function tags:
/// c exp(a y + b), c (a y + b)^n, or c (a y + b).
fn invert_in_y(lhs: &Expr, rhs: &Expr) -> Option<Expr> {
    let mut y_term: Option<Expr> = None;
    let mut x_terms: Vec<Expr> = Vec::new();
    for term in lhs.terms() {
        if term.contains_var("y") {
            if y_term.is_some() {
                return None;
            }
            y_term = Some(term);
        } else {
            x_terms.push(term);
        }
    }
    let y_term = y_term?;
    // target value the y-term must equal
    let target = simplify(&rhs.clone().sub(canonical(&Expr::Sum(x_terms))));

    let mut coeff = Vec::new();
    let mut core: Option<Expr> = None;
    for factor in y_term.factors() {
        if factor.contains_var("y") {
            if core.is_some() {
                return None;
            }
            core = Some(factor);
        } else {
            coeff.push(factor);
        }
    }
    let core = core?;
    let scaled = simplify(
        &target.mul(canonical(&Expr::Product(coeff)).pow(Expr::int(-1))),
    );

    let linear_solve = |inner: &Expr, value: Expr| -> Option<Expr> {
        let a = simplify(&differentiate(inner, "y").ok()?);
        if a.contains_var("y") || a.is_zero() {
            return None;
        }
        let b = simplify(&inner.clone().sub(a.clone().mul(Expr::var("y"))));
        if b.contains_var("y") {
            return None;
        }
        Some(simplify(&value.sub(b).mul(a.pow(Expr::int(-1)))))
    };

    match &core {
        Expr::Func(Func::Exp, inner) => {
            linear_solve(inner, Expr::func(Func::Ln, scaled))
        }
        Expr::Power(base, exp) => {
            let r = exp.as_rational()?;
            linear_solve(base, scaled.pow(Expr::from_ratio(r.recip())))
        }
        _ => linear_solve(&core, scaled),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::linearize::{
        build_first_integral, classify, reduce_first_order, solve_auxiliary_g, OdeQuad,
    };

    fn pipeline(f: &str, f1: &str, f2: &str, b: &SampleBox) -> (FirstIntegral, Expr) {
        let e = OdeQuad::new(parse(f).unwrap(), parse(f1).unwrap(), parse(f2).unwrap()).unwrap();
        let cls = classify(&e, b).unwrap();
        let aux = solve_auxiliary_g(&e, &cls, b, &[]).unwrap();
        let fi = build_first_integral(&e, &aux, b).unwrap();
        let i = reduce_first_order(&fi, b).unwrap();
        (fi, i)
    }

    #[test]
    fn oscillator_transform_is_point() {
        let b = SampleBox::new();
        let (fi, i) = pipeline("0", "0", "y", &b);
        let st = build_transform(&fi, &i, &EtaTag::CATALOG, &b).unwrap();
        assert_eq!(st.eta, EtaTag::Identity);
        assert!(st.point_transformation);
        assert_eq!(st.phi, simplify(&parse("1/x^2").unwrap()));
        assert!(phi_alternative_agrees(&fi, &st, &b).unwrap());
    }

    #[test]
    fn oscillator_solution_closes_to_erfi() {
        let b = SampleBox::new();
        let (fi, i) = pipeline("0", "0", "y", &b);
        let st = build_transform(&fi, &i, &EtaTag::CATALOG, &b).unwrap();
        let family = general_solution(&st, &b).unwrap();
        // lhs erfi(y/sqrt(2)) up to the printed radical form
        let want = simplify(&parse("erfi(sqrt(2)*y/2)").unwrap());
        assert_eq!(family.lhs, want, "lhs was {}", family.lhs);
        match &family.rhs {
            FamilyRhs::Closed { u1, u2 } => {
                assert_eq!(*u1, Expr::var("x"));
                assert_eq!(*u2, Expr::int(1));
            }
            other => panic!("expected closed family, got {other:?}"),
        }
    }

    #[test]
    fn tan_equation_transform_is_not_point() {
        let b = SampleBox::new();
        let (fi, i) = pipeline("-tan(y)/x^2", "1/x - tan(y)/(x*y)", "-(tan(y) + 1/y)", &b);
        let st = build_transform(&fi, &i, &EtaTag::CATALOG, &b).unwrap();
        assert_eq!(st.eta, EtaTag::Identity);
        assert!(!st.point_transformation);
        assert_eq!(st.phi, simplify(&parse("x*y").unwrap()));
        let family = general_solution(&st, &b).unwrap();
        assert_eq!(family.lhs, simplify(&parse("x*sin(y)").unwrap()));
        assert!(matches!(family.rhs, FamilyRhs::Implicit { .. }));
        assert_eq!(
            family.degenerate_defect(),
            simplify(&parse("x*sin(y) - c1").unwrap())
        );
    }

    #[test]
    fn pseudosphere_family_and_gamma() {
        let b = SampleBox::new();
        let (fi, i) = pipeline("-exp(2*y)", "0", "-2", &b);
        let st = build_transform(&fi, &i, &EtaTag::CATALOG, &b).unwrap();
        assert!(st.point_transformation);
        assert_eq!(st.phi, simplify(&parse("-2/x^2").unwrap()));
        let family = general_solution(&st, &b).unwrap();
        assert_eq!(family.lhs, simplify(&parse("exp(-2*y) + x^2").unwrap()));
        match &family.rhs {
            FamilyRhs::Closed { u1, u2 } => {
                assert_eq!(*u1, Expr::var("x"));
                assert_eq!(*u2, Expr::int(2));
            }
            other => panic!("expected closed family, got {other:?}"),
        }
        // gamma: y = -ln(c1 x + 2 c2 - x^2)/2
        let gamma = family.gamma.expect("pseudosphere lhs inverts in y");
        let want = simplify(&parse("-ln(c1*x + 2*c2 - x^2)/2").unwrap());
        assert_eq!(gamma, want, "gamma was {gamma}");
    }
}
