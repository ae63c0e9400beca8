//! Reduction of y' = -B/A to an invariant I(x, y).
//!
//! Two strategies, tried in order: separation of variables (numeric log-rank
//! gate on a sample grid, then a symbolic split of the product factors) and
//! potential construction for B dx + A dy, allowing a single-variable
//! integrating factor when the form is not exact. The result is normalized —
//! all-logarithm invariants are exponentiated, common rational coefficients
//! and additive constants are stripped — and verified against
//! A I_x - B I_y = 0 before being returned.

use super::{FirstIntegral, LinearizeError};
use crate::calculus::{antiderivative_in, solve_gradient};
use crate::expr::{
    canonical, depends_only_on, differentiate, evaluate, is_identically_zero, simplify, Expr,
    Func, SampleBox, DEFAULT_TOL,
};
use num_rational::Rational64;
use num_traits::One;
use std::collections::BTreeSet;

/// An invariant I of y' = -B/A, with I_x A - I_y B = 0 checked numerically.
pub fn reduce_first_order(
    fi: &FirstIntegral,
    sample_box: &SampleBox,
) -> Result<Expr, LinearizeError> {
    let slope = simplify(
        &fi.b
            .clone()
            .neg()
            .mul(fi.a.clone().pow(Expr::int(-1))),
    );

    let mut candidates: Vec<Expr> = Vec::new();
    if numerically_separable(&slope, sample_box) {
        if let Some(i) = separable_invariant(&slope, sample_box) {
            candidates.push(i);
        }
    }
    if candidates.is_empty() {
        if let Some(i) = exact_invariant(fi, sample_box)? {
            candidates.push(i);
        }
    }

    for candidate in candidates {
        let i = normalize_invariant(&candidate);
        if verify_invariant(&i, fi, sample_box)? {
            return Ok(i);
        }
    }
    Err(LinearizeError::NotReducible)
}

/// Log-rank gate: ln|slope| must be additively separable on a sample grid,
/// i.e. every 2x2 cross difference vanishes.
fn numerically_separable(slope: &Expr, sample_box: &SampleBox) -> bool {
    let (x_lo, x_hi) = sample_box.interval("x");
    let (y_lo, y_hi) = sample_box.interval("y");
    let n = 5;
    let grid = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
    let mut values = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let p = sample_box
                .base_point()
                .with("x", grid(x_lo, x_hi, i))
                .with("y", grid(y_lo, y_hi, j));
            if let Ok(v) = evaluate(slope, &p) {
                if v.abs() > 1e-12 {
                    values[i][j] = Some(v.abs().ln());
                }
            }
        }
    }
    let mut checked = 0;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            if let (Some(a), Some(b), Some(c), Some(d)) = (
                values[i][j],
                values[i + 1][j + 1],
                values[i][j + 1],
                values[i + 1][j],
            ) {
                let scale = 1.0 + a.abs().max(b.abs()).max(c.abs()).max(d.abs());
                if (a + b - c - d).abs() > 1e-7 * scale {
                    return false;
                }
                checked += 1;
            }
        }
    }
    checked >= 8
}

/// Splits slope = X(x) Y(y) by factor inspection and integrates both sides:
/// I = int dy/Y - int X dx.
fn separable_invariant(slope: &Expr, sample_box: &SampleBox) -> Option<Expr> {
    let mut x_part: Vec<Expr> = Vec::new();
    let mut y_part: Vec<Expr> = Vec::new();
    for factor in slope.factors() {
        let vars: BTreeSet<String> = factor.free_variables();
        if vars.iter().all(|v| v == "x") {
            x_part.push(factor);
        } else if vars.iter().all(|v| v == "y") {
            y_part.push(factor);
        } else {
            return None;
        }
    }
    let x_factor = canonical(&Expr::Product(x_part));
    let y_factor = canonical(&Expr::Product(y_part));

    let dy = antiderivative_in(
        &simplify(&y_factor.pow(Expr::int(-1))),
        "y",
        sample_box,
    );
    let dx = antiderivative_in(&x_factor, "x", sample_box);
    if !dy.closed_form || !dx.closed_form {
        return None;
    }
    Some(simplify(&dy.result.sub(dx.result)))
}

/// Potential of mu B dx + mu A dy where the integrating factor mu is 1 when
/// the form is exact, otherwise a function of x or of y alone.
fn exact_invariant(
    fi: &FirstIntegral,
    sample_box: &SampleBox,
) -> Result<Option<Expr>, LinearizeError> {
    let defect = simplify(&differentiate(&fi.b, "y")?.sub(differentiate(&fi.a, "x")?));
    let x_only: BTreeSet<String> = ["x".to_string()].into();
    let y_only: BTreeSet<String> = ["y".to_string()].into();

    let mu = if matches!(
        is_identically_zero(&defect, sample_box, DEFAULT_TOL),
        Ok((true, _))
    ) {
        Expr::int(1)
    } else {
        // mu(x): mu'/mu = (B_y - A_x)/A
        let ratio_x = simplify(&defect.clone().mul(fi.a.clone().pow(Expr::int(-1))));
        let ratio_y = simplify(
            &defect
                .clone()
                .neg()
                .mul(fi.b.clone().pow(Expr::int(-1))),
        );
        if depends_only_on(&ratio_x, &x_only, sample_box, DEFAULT_TOL)? {
            let m = antiderivative_in(&ratio_x, "x", sample_box);
            if !m.closed_form {
                return Ok(None);
            }
            simplify(&Expr::func(Func::Exp, m.result))
        } else if depends_only_on(&ratio_y, &y_only, sample_box, DEFAULT_TOL)? {
            let m = antiderivative_in(&ratio_y, "y", sample_box);
            if !m.closed_form {
                return Ok(None);
            }
            simplify(&Expr::func(Func::Exp, m.result))
        } else {
            return Ok(None);
        }
    };

    let ix = simplify(&mu.clone().mul(fi.b.clone()));
    let iy = simplify(&mu.mul(fi.a.clone()));
    match solve_gradient(&ix, &iy, sample_box) {
        Ok((i, _)) => Ok(Some(i)),
        Err(_) => Ok(None),
    }
}

/// Cosmetic normalization preserving invariance: exponentiates all-log sums,
/// drops additive rational constants, and divides out the leading rational
/// coefficient.
fn normalize_invariant(i: &Expr) -> Expr {
    let mut e = simplify(i);

    // exp-collapse: sum of c_k ln(w_k) becomes prod w_k^{c_k}
    let terms = e.terms();
    let all_logs = !terms.is_empty()
        && terms.iter().all(|t| {
            let (_, core) = t.coefficient_split();
            matches!(core, Expr::Func(Func::Ln, _))
        });
    if all_logs {
        let mut factors = Vec::new();
        for t in &terms {
            let (c, core) = t.coefficient_split();
            if let Expr::Func(Func::Ln, w) = core {
                factors.push(canonical(&Expr::Power(
                    Box::new((*w).clone()),
                    Box::new(Expr::from_ratio(c)),
                )));
            }
        }
        e = simplify(&canonical(&Expr::Product(factors)));
    }

    // drop additive rational constants
    let kept: Vec<Expr> = e
        .terms()
        .into_iter()
        .filter(|t| t.as_rational().is_none())
        .collect();
    if !kept.is_empty() {
        e = canonical(&Expr::Sum(kept));
    }

    // divide by the first term's rational coefficient
    let terms = e.terms();
    if let Some(first) = terms.first() {
        let (c, _) = first.coefficient_split();
        if !c.is_one() && c != Rational64::from_integer(0) {
            let inv = Expr::from_ratio(c.recip());
            e = simplify(&e.mul(inv));
        }
    }
    e
}

fn verify_invariant(
    i: &Expr,
    fi: &FirstIntegral,
    sample_box: &SampleBox,
) -> Result<bool, LinearizeError> {
    let residual = simplify(
        &fi.a
            .clone()
            .mul(differentiate(i, "x")?)
            .sub(fi.b.clone().mul(differentiate(i, "y")?)),
    );
    Ok(is_identically_zero(&residual, sample_box, DEFAULT_TOL)?.0)
}
