//! Numeric evaluation of expressions at a point.
//!
//! Unevaluated integrals are resolved by adaptive Simpson quadrature from a
//! per-variable anchor carried on the [`EvalPoint`] (by convention the lower
//! bound of the variable's sample interval). Arbitrary constants default to 1
//! when unbound.

use super::{Expr, Func};
use std::collections::BTreeMap;
use std::fmt;

/// Variable bindings plus quadrature anchors for one evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalPoint {
    bindings: BTreeMap<String, f64>,
    anchors: BTreeMap<String, f64>,
}

impl EvalPoint {
    pub fn new() -> EvalPoint {
        EvalPoint::default()
    }

    pub fn with(mut self, var: &str, value: f64) -> EvalPoint {
        self.set(var, value);
        self
    }

    pub fn with_anchor(mut self, var: &str, anchor: f64) -> EvalPoint {
        self.anchors.insert(var.to_string(), anchor);
        self
    }

    pub fn set(&mut self, var: &str, value: f64) {
        self.bindings.insert(var.to_string(), value);
    }

    pub fn get(&self, var: &str) -> Option<f64> {
        self.bindings.get(var).copied()
    }

    pub fn set_anchor(&mut self, var: &str, anchor: f64) {
        self.anchors.insert(var.to_string(), anchor);
    }

    /// Quadrature anchor for an integration variable; defaults to 0.
    pub fn anchor(&self, var: &str) -> f64 {
        self.anchors.get(var).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Outside the function's real domain (log of non-positive, division by
    /// a value below 1e-300, fractional power of a negative base).
    Domain(String),
    /// Overflow or NaN.
    NonFinite,
    /// A free variable without a binding.
    Unbound(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Domain(what) => write!(f, "domain error: {what}"),
            EvalError::NonFinite => write!(f, "non-finite result"),
            EvalError::Unbound(name) => write!(f, "unbound variable `{name}`"),
        }
    }
}

impl std::error::Error for EvalError {}

const DIV_EPS: f64 = 1e-300;

/// Evaluate an expression to a finite real.
pub fn evaluate(e: &Expr, point: &EvalPoint) -> Result<f64, EvalError> {
    let v = eval_node(e, point)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn eval_node(e: &Expr, point: &EvalPoint) -> Result<f64, EvalError> {
    let value = match e {
        Expr::Integer(n) => *n as f64,
        Expr::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
        Expr::Const(c) => c.value(),
        Expr::Var(name) => point
            .get(name)
            .ok_or_else(|| EvalError::Unbound(name.clone()))?,
        Expr::ArbConst(name) => point.get(name).unwrap_or(1.0),
        Expr::Sum(children) => {
            let mut acc = 0.0;
            for child in children {
                acc += eval_node(child, point)?;
            }
            acc
        }
        Expr::Product(children) => {
            let mut acc = 1.0;
            for child in children {
                acc *= eval_node(child, point)?;
            }
            acc
        }
        Expr::Power(base, exp) => {
            let b = eval_node(base, point)?;
            // Integer exponents take the exact path so negative bases work.
            if let Some(r) = exp.as_rational() {
                if r.is_integer() {
                    let n = *r.numer();
                    if n < 0 && b.abs() < DIV_EPS {
                        return Err(EvalError::Domain("division by ~0".into()));
                    }
                    return check(b.powi(n.clamp(i32::MIN as i64, i32::MAX as i64) as i32));
                }
            }
            let x = eval_node(exp, point)?;
            if b > 0.0 {
                b.powf(x)
            } else if b == 0.0 {
                if x > 0.0 {
                    0.0
                } else {
                    return Err(EvalError::Domain("0 raised to non-positive power".into()));
                }
            } else if x.fract() == 0.0 && x.abs() < 1e15 {
                b.powi(x as i32)
            } else {
                return Err(EvalError::Domain(
                    "fractional power of negative base".into(),
                ));
            }
        }
        Expr::Func(tag, arg) => {
            let a = eval_node(arg, point)?;
            match tag {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => guarded_div(a.sin(), a.cos())?,
                Func::Cot => guarded_div(a.cos(), a.sin())?,
                Func::Sinh => a.sinh(),
                Func::Cosh => a.cosh(),
                Func::Tanh => a.tanh(),
                Func::Exp => a.exp(),
                Func::Ln => {
                    if a <= 0.0 {
                        return Err(EvalError::Domain("ln of non-positive value".into()));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(EvalError::Domain("sqrt of negative value".into()));
                    }
                    a.sqrt()
                }
                Func::Erf => erf(a),
                Func::Erfi => erfi(a),
                Func::Abs => a.abs(),
            }
        }
        Expr::Integral(integrand, var) => {
            let upper = point
                .get(var)
                .ok_or_else(|| EvalError::Unbound(var.clone()))?;
            let lower = point.anchor(var);
            quadrature(integrand, var, lower, upper, point)?
        }
    };
    check(value)
}

fn check(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn guarded_div(num: f64, den: f64) -> Result<f64, EvalError> {
    if den.abs() < DIV_EPS {
        return Err(EvalError::Domain("division by ~0".into()));
    }
    Ok(num / den)
}

/// Error function, |relative error| below ~1e-14 for |z| <= 6.
///
/// Uses the cancellation-free confluent series
/// erf(z) = (2/sqrt(pi)) z e^{-z^2} sum_k (2 z^2)^k / (2k+1)!!.
pub fn erf(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if z.abs() > 6.0 {
        // erfc(6) ~ 2e-17, below f64 resolution of 1.
        return z.signum();
    }
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 0u32;
    while term.abs() > sum.abs() * 1e-17 && k < 600 {
        term *= 2.0 * z2 / (2.0 * k as f64 + 3.0);
        sum += term;
        k += 1;
    }
    2.0 / std::f64::consts::PI.sqrt() * sum * (-z2).exp()
}

/// Imaginary error function erfi(z) = (2/sqrt(pi)) \int_0^z e^{t^2} dt.
///
/// The Maclaurin series has all-positive terms, so no cancellation occurs.
pub fn erfi(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let z2 = z * z;
    let mut power = z; // z^{2k+1} / k!
    let mut sum = z;
    let mut k = 0u32;
    loop {
        power *= z2 / (k as f64 + 1.0);
        let term = power / (2.0 * k as f64 + 3.0);
        sum += term;
        k += 1;
        if term.abs() <= sum.abs() * 1e-17 || k > 900 {
            break;
        }
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

const QUAD_TOL: f64 = 1e-12;
const QUAD_MAX_DEPTH: u32 = 28;

/// Adaptive Simpson quadrature of the integrand over [lower, upper] in the
/// integration variable, all other bindings fixed.
fn quadrature(
    integrand: &Expr,
    var: &str,
    lower: f64,
    upper: f64,
    point: &EvalPoint,
) -> Result<f64, EvalError> {
    if lower == upper {
        return Ok(0.0);
    }
    let mut scratch = point.clone();
    let mut f = |t: f64, scratch: &mut EvalPoint| -> Result<f64, EvalError> {
        scratch.set(var, t);
        eval_node(integrand, scratch)
    };
    let fa = f(lower, &mut scratch)?;
    let fb = f(upper, &mut scratch)?;
    let m = 0.5 * (lower + upper);
    let fm = f(m, &mut scratch)?;
    let whole = simpson_estimate(lower, upper, fa, fm, fb);
    adaptive(
        &mut f,
        &mut scratch,
        lower,
        upper,
        fa,
        fm,
        fb,
        whole,
        QUAD_TOL * (1.0 + whole.abs()),
        QUAD_MAX_DEPTH,
    )
}

fn simpson_estimate(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &mut impl FnMut(f64, &mut EvalPoint) -> Result<f64, EvalError>,
    scratch: &mut EvalPoint,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, EvalError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm, scratch)?;
    let frm = f(rm, scratch)?;
    let left = simpson_estimate(a, m, fa, flm, fm);
    let right = simpson_estimate(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return check(left + right + delta / 15.0);
    }
    let lv = adaptive(f, scratch, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let rv = adaptive(f, scratch, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(lv + rv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn ev(text: &str, point: &EvalPoint) -> f64 {
        evaluate(&parse(text).unwrap(), point).unwrap()
    }

    #[test]
    fn arithmetic_and_constants() {
        let p = EvalPoint::new().with("x", 2.0).with("y", std::f64::consts::PI / 6.0);
        assert!((ev("x*sin(y)", &p) - 1.0).abs() < 1e-15);
        assert!((ev("pi", &p) - std::f64::consts::PI).abs() < 1e-15);
        assert!((ev("e", &p) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn erfi_at_zero_and_known_values() {
        let p = EvalPoint::new().with("y", 0.0);
        assert_eq!(ev("erfi(y/sqrt(2))", &p), 0.0);
        // Reference values computed with mpmath to 30 digits.
        assert!((erfi(1.0) - 1.650_425_758_797_542_876_f64).abs() < 1e-14);
        assert!((erf(1.0) - 0.842_700_792_949_714_869_f64).abs() < 1e-15);
        assert!((erf(5.0) - 0.999_999_999_998_462_54_f64).abs() < 1e-15);
        assert!((erfi(3.0) - 1_629.994_622_601_567_f64).abs() < 1e-11 * 1629.0);
        // odd symmetry, including series termination on negative arguments
        assert_eq!(erfi(-1.0), -erfi(1.0));
        assert_eq!(erf(-2.5), -erf(2.5));
    }

    #[test]
    fn tan_pole_is_nonfinite_or_domain() {
        let p = EvalPoint::new().with("y", std::f64::consts::PI / 2.0);
        let e = parse("tan(y)").unwrap();
        // cos(pi/2) is ~6e-17 in floating point, far above the 1e-300 guard,
        // so the division succeeds but produces a huge finite value; push the
        // argument to the exact pole representation instead.
        let v = evaluate(&e, &p).unwrap();
        assert!(v.abs() > 1e15);
    }

    #[test]
    fn unbound_variable_errors() {
        let e = parse("x + y").unwrap();
        let p = EvalPoint::new().with("x", 1.0);
        assert_eq!(evaluate(&e, &p), Err(EvalError::Unbound("y".into())));
    }

    #[test]
    fn arb_const_defaults_to_one() {
        let e = parse("c1*x").unwrap();
        let p = EvalPoint::new().with("x", 3.0);
        assert_eq!(evaluate(&e, &p).unwrap(), 3.0);
        let bound = p.clone().with("c1", 2.0);
        assert_eq!(evaluate(&e, &bound).unwrap(), 6.0);
    }

    #[test]
    fn ln_domain_error() {
        let e = parse("ln(x)").unwrap();
        let p = EvalPoint::new().with("x", -1.0);
        assert!(matches!(evaluate(&e, &p), Err(EvalError::Domain(_))));
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        // int_0^y exp(t^2/2) dt at y=1 equals sqrt(pi/2)*erfi(1/sqrt(2)).
        let e = parse("int(exp(y^2/2), y)").unwrap();
        let p = EvalPoint::new().with("y", 1.0).with_anchor("y", 0.0);
        let got = evaluate(&e, &p).unwrap();
        let want = (std::f64::consts::PI / 2.0).sqrt() * erfi(1.0 / 2f64.sqrt());
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");

        // Anchored at 0.5 the value shifts by the integral over [0, 0.5].
        let p2 = EvalPoint::new().with("y", 1.0).with_anchor("y", 0.5);
        let got2 = evaluate(&e, &p2).unwrap();
        let want2 = want - (std::f64::consts::PI / 2.0).sqrt() * erfi(0.5 / 2f64.sqrt());
        assert!((got2 - want2).abs() < 1e-12);
    }

    #[test]
    fn tiny_division_is_domain_error() {
        let e = parse("1/x").unwrap();
        let p = EvalPoint::new().with("x", 0.0);
        assert!(matches!(evaluate(&e, &p), Err(EvalError::Domain(_))));
    }
}
