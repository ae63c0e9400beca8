//! Pattern solver for the auxiliary linear equation q''(x) + f(x) q(x) = 0.
//!
//! A finite catalog, not a general linear-ODE solver: constant f is solved
//! exactly (x, sin, sinh), everything else goes through a verified ansatz
//! scan over small powers of x, exponentials and (hyperbolic) trigonometric
//! functions with rational frequencies.

use crate::expr::{
    differentiate, is_identically_zero, simplify, Expr, Func, SampleBox, DEFAULT_TOL,
};
use num_rational::Rational64;
use num_traits::Signed;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QMethod {
    FZero,
    FPositiveConstant,
    FNegativeConstant,
    PolynomialCoefficient,
    Ansatz,
}

impl QMethod {
    pub fn name(self) -> &'static str {
        match self {
            QMethod::FZero => "f-zero",
            QMethod::FPositiveConstant => "f-positive-constant",
            QMethod::FNegativeConstant => "f-negative-constant",
            QMethod::PolynomialCoefficient => "polynomial-coefficient",
            QMethod::Ansatz => "ansatz",
        }
    }
}

/// A verified nonzero solution of q'' + f q = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QSolution {
    pub q: Expr,
    pub f: Expr,
    pub method: QMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QError {
    /// f depends on more than x.
    NotXOnly,
    /// The catalog is exhausted.
    NoClosedFormQ,
}

impl fmt::Display for QError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QError::NotXOnly => write!(f, "q-equation coefficient is not a function of x alone"),
            QError::NoClosedFormQ => write!(f, "no closed-form q in the ansatz catalog"),
        }
    }
}

impl std::error::Error for QError {}

/// One nonzero solution of q'' + f(x) q = 0 from the catalog.
pub fn solve_q_ode(f: &Expr, sample_box: &SampleBox) -> Result<QSolution, QError> {
    let fs = simplify(f);
    let vars = fs.free_variables();
    if vars.iter().any(|v| v != "x") {
        return Err(QError::NotXOnly);
    }

    if let Ok((true, _)) = is_identically_zero(&fs, sample_box, DEFAULT_TOL) {
        return Ok(QSolution {
            q: Expr::var("x"),
            f: fs,
            method: QMethod::FZero,
        });
    }

    if let Some(c) = fs.as_rational() {
        let a = sqrt_expr(c.abs());
        let arg = a.mul(Expr::var("x"));
        let (q, method) = if c.is_positive() {
            (Expr::func(Func::Sin, arg), QMethod::FPositiveConstant)
        } else {
            (Expr::func(Func::Sinh, arg), QMethod::FNegativeConstant)
        };
        if verify(&q, &fs, sample_box) {
            return Ok(QSolution { q, f: fs, method });
        }
    }

    for (q, method) in ansatz_catalog() {
        if verify(&q, &fs, sample_box) {
            return Ok(QSolution { q, f: fs, method });
        }
    }
    Err(QError::NoClosedFormQ)
}

/// Exact square root when the rational is a perfect square, else symbolic.
fn sqrt_expr(c: Rational64) -> Expr {
    let numer = *c.numer();
    let denom = *c.denom();
    let is_square = |n: i64| {
        let r = (n as f64).sqrt().round() as i64;
        (r * r == n).then_some(r)
    };
    if let (Some(rn), Some(rd)) = (is_square(numer), is_square(denom)) {
        return Expr::rational(rn, rd);
    }
    Expr::from_ratio(c).pow(Expr::rational(1, 2))
}

fn verify(q: &Expr, f: &Expr, sample_box: &SampleBox) -> bool {
    let Ok(first) = differentiate(q, "x") else {
        return false;
    };
    let Ok(second) = differentiate(&first, "x") else {
        return false;
    };
    let residual = simplify(&second.add(f.clone().mul(q.clone())));
    let zero = matches!(
        is_identically_zero(&residual, sample_box, DEFAULT_TOL),
        Ok((true, _))
    );
    let nonzero_q = matches!(
        is_identically_zero(q, sample_box, DEFAULT_TOL),
        Ok((false, _))
    );
    zero && nonzero_q
}

fn ansatz_catalog() -> Vec<(Expr, QMethod)> {
    let x = Expr::var("x");
    let mut out = vec![
        (x.clone(), QMethod::PolynomialCoefficient),
        (x.clone().pow(Expr::int(2)), QMethod::PolynomialCoefficient),
        (x.clone().pow(Expr::int(3)), QMethod::PolynomialCoefficient),
        (
            x.clone().pow(Expr::rational(1, 2)),
            QMethod::PolynomialCoefficient,
        ),
        (
            x.clone().pow(Expr::rational(3, 2)),
            QMethod::PolynomialCoefficient,
        ),
    ];
    let freqs = [
        Rational64::new(1, 2),
        Rational64::from_integer(1),
        Rational64::from_integer(2),
    ];
    for lambda in freqs {
        let arg = Expr::from_ratio(lambda).mul(x.clone());
        let neg_arg = Expr::from_ratio(-lambda).mul(x.clone());
        out.push((Expr::func(Func::Exp, arg.clone()), QMethod::Ansatz));
        out.push((Expr::func(Func::Exp, neg_arg), QMethod::Ansatz));
        out.push((Expr::func(Func::Sin, arg.clone()), QMethod::Ansatz));
        out.push((Expr::func(Func::Cos, arg.clone()), QMethod::Ansatz));
        out.push((Expr::func(Func::Sinh, arg.clone()), QMethod::Ansatz));
        out.push((Expr::func(Func::Cosh, arg), QMethod::Ansatz));
    }
    out
}
