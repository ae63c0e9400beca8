//! Exact symbolic differentiation.

use super::{canonical, Expr, Func};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffError {
    /// An unevaluated integral would have to be differentiated under the
    /// integral sign in a non-integration variable. Such derivatives are not
    /// representable here, and silently returning a marker is worse than
    /// failing.
    CannotDifferentiate { integral: String, var: String },
}

impl fmt::Display for DiffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffError::CannotDifferentiate { integral, var } => write!(
                f,
                "cannot differentiate {integral} with respect to `{var}` under the integral sign"
            ),
        }
    }
}

impl std::error::Error for DiffError {}

/// d/d`var` of the expression, canonicalized.
pub fn differentiate(e: &Expr, var: &str) -> Result<Expr, DiffError> {
    Ok(canonical(&diff(e, var)?))
}

fn diff(e: &Expr, var: &str) -> Result<Expr, DiffError> {
    Ok(match e {
        Expr::Integer(_) | Expr::Rational(_) | Expr::Const(_) | Expr::ArbConst(_) => {
            Expr::Integer(0)
        }
        Expr::Var(name) => {
            if name == var {
                Expr::Integer(1)
            } else {
                Expr::Integer(0)
            }
        }
        Expr::Sum(children) => {
            let mut parts = Vec::with_capacity(children.len());
            for child in children {
                parts.push(diff(child, var)?);
            }
            Expr::Sum(parts)
        }
        Expr::Product(children) => {
            // Leibniz over n factors.
            let mut terms = Vec::with_capacity(children.len());
            for (i, child) in children.iter().enumerate() {
                if !child.contains_var(var) {
                    continue;
                }
                let mut factors = children.clone();
                factors[i] = diff(child, var)?;
                terms.push(Expr::Product(factors));
            }
            Expr::Sum(terms)
        }
        Expr::Power(base, exp) => {
            let base_dep = base.contains_var(var);
            let exp_dep = exp.contains_var(var);
            match (base_dep, exp_dep) {
                (false, false) => Expr::Integer(0),
                (true, false) => {
                    // e * b^(e-1) * b'
                    let new_exp = Expr::Sum(vec![(**exp).clone(), Expr::Integer(-1)]);
                    Expr::Product(vec![
                        (**exp).clone(),
                        Expr::Power(base.clone(), Box::new(new_exp)),
                        diff(base, var)?,
                    ])
                }
                _ => {
                    // General case: b^e * (e' ln b + e b'/b).
                    let ln_b = Expr::Func(Func::Ln, base.clone());
                    let term1 = Expr::Product(vec![diff(exp, var)?, ln_b]);
                    let term2 = Expr::Product(vec![
                        (**exp).clone(),
                        diff(base, var)?,
                        Expr::Power(base.clone(), Box::new(Expr::Integer(-1))),
                    ]);
                    Expr::Product(vec![e.clone(), Expr::Sum(vec![term1, term2])])
                }
            }
        }
        Expr::Func(tag, arg) => {
            if !arg.contains_var(var) {
                return Ok(Expr::Integer(0));
            }
            let inner = diff(arg, var)?;
            let outer = function_derivative(*tag, arg);
            Expr::Product(vec![outer, inner])
        }
        Expr::Integral(integrand, ivar) => {
            if ivar == var {
                // Fundamental theorem: d/dv int f dv = f.
                (**integrand).clone()
            } else if !integrand.contains_var(var) {
                Expr::Integer(0)
            } else {
                return Err(DiffError::CannotDifferentiate {
                    integral: e.to_string(),
                    var: var.to_string(),
                });
            }
        }
    })
}

fn function_derivative(tag: Func, arg: &Expr) -> Expr {
    let u = arg.clone();
    match tag {
        Func::Sin => Expr::Func(Func::Cos, Box::new(u)),
        Func::Cos => Expr::Product(vec![
            Expr::Integer(-1),
            Expr::Func(Func::Sin, Box::new(u)),
        ]),
        // sec^2 and -csc^2 kept in the sin/cos basis used by the simplifier
        Func::Tan => Expr::Power(
            Box::new(Expr::Func(Func::Cos, Box::new(u))),
            Box::new(Expr::Integer(-2)),
        ),
        Func::Cot => Expr::Product(vec![
            Expr::Integer(-1),
            Expr::Power(
                Box::new(Expr::Func(Func::Sin, Box::new(u))),
                Box::new(Expr::Integer(-2)),
            ),
        ]),
        Func::Sinh => Expr::Func(Func::Cosh, Box::new(u)),
        Func::Cosh => Expr::Func(Func::Sinh, Box::new(u)),
        Func::Tanh => Expr::Power(
            Box::new(Expr::Func(Func::Cosh, Box::new(u))),
            Box::new(Expr::Integer(-2)),
        ),
        Func::Exp => Expr::Func(Func::Exp, Box::new(u)),
        Func::Ln => Expr::Power(Box::new(u), Box::new(Expr::Integer(-1))),
        Func::Sqrt => {
            // 1 / (2 sqrt(u))
            Expr::Product(vec![
                Expr::rational(1, 2),
                Expr::Power(Box::new(u), Box::new(Expr::rational(-1, 2))),
            ])
        }
        Func::Erf => {
            // (2/sqrt(pi)) e^{-u^2}
            Expr::Product(vec![
                Expr::Integer(2),
                Expr::Power(
                    Box::new(Expr::Const(super::NamedConst::Pi)),
                    Box::new(Expr::rational(-1, 2)),
                ),
                Expr::Func(
                    Func::Exp,
                    Box::new(Expr::Product(vec![
                        Expr::Integer(-1),
                        Expr::Power(Box::new(u), Box::new(Expr::Integer(2))),
                    ])),
                ),
            ])
        }
        Func::Erfi => Expr::Product(vec![
            Expr::Integer(2),
            Expr::Power(
                Box::new(Expr::Const(super::NamedConst::Pi)),
                Box::new(Expr::rational(-1, 2)),
            ),
            Expr::Func(
                Func::Exp,
                Box::new(Expr::Power(Box::new(u), Box::new(Expr::Integer(2)))),
            ),
        ]),
        // |u|' = u'·|u|/u away from u = 0, which sampling avoids.
        Func::Abs => Expr::Product(vec![
            Expr::Func(Func::Abs, Box::new(u.clone())),
            Expr::Power(Box::new(u), Box::new(Expr::Integer(-1))),
        ]),
    }
}
