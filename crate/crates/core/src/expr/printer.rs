//! Expression printing in the CLI grammar.
//!
//! The printer inverts the parser on canonical forms: for every canonical
//! `e`, `parse(print(e))` rebuilds `e` structurally (with the ODE-extended
//! parser when `y'` occurs).

use super::{Expr, NamedConst};
use num_rational::Rational64;
use num_traits::Signed;

pub fn print(e: &Expr) -> String {
    print_prec(e, Prec::Add)
}

/// Context precedence: a child is parenthesized when its own level is looser
/// than what the context requires.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Add = 0,
    Mul = 1,
    Neg = 2,
    PowBase = 3,
    Atom = 4,
}

fn level(e: &Expr) -> Prec {
    match e {
        Expr::Sum(_) => Prec::Add,
        Expr::Product(_) => Prec::Mul,
        Expr::Rational(_) => Prec::Mul, // prints as p/q
        Expr::Integer(n) if *n < 0 => Prec::Neg,
        // negative exponents print in division form
        Expr::Power(_, exp) if matches!(exp.as_rational(), Some(r) if r.is_negative()) => {
            Prec::Mul
        }
        Expr::Power(..) => Prec::PowBase,
        _ => Prec::Atom,
    }
}

fn print_prec(e: &Expr, ctx: Prec) -> String {
    let body = render(e);
    if level(e) < ctx {
        format!("({body})")
    } else {
        body
    }
}

fn render(e: &Expr) -> String {
    match e {
        Expr::Integer(n) => n.to_string(),
        Expr::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
        Expr::Const(NamedConst::Pi) => "pi".to_string(),
        Expr::Const(NamedConst::E) => "e".to_string(),
        Expr::Var(name) | Expr::ArbConst(name) => name.clone(),
        Expr::Func(tag, arg) => format!("{}({})", tag.name(), print_prec(arg, Prec::Add)),
        Expr::Integral(integrand, var) => {
            format!("int({}, {})", print_prec(integrand, Prec::Add), var)
        }
        Expr::Power(base, exp) => render_power(base, exp),
        Expr::Product(_) => render_product(e),
        Expr::Sum(children) => render_sum(children),
    }
}

fn render_power(base: &Expr, exp: &Expr) -> String {
    if let Some(r) = exp.as_rational() {
        if r == Rational64::new(1, 2) {
            return format!("sqrt({})", print_prec(base, Prec::Add));
        }
        // 0^(-n) has no division sugar: 1/0^n would re-fold differently
        if r.is_negative() && !base.is_zero() {
            let flipped = if -r == Rational64::from_integer(1) {
                base.clone()
            } else {
                Expr::Power(Box::new(base.clone()), Box::new(Expr::from_ratio(-r)))
            };
            return format!("1/{}", print_prec(&flipped, Prec::Neg));
        }
    }
    let base_str = print_prec(base, Prec::PowBase);
    let exp_str = match exp {
        Expr::Integer(n) if *n >= 0 => n.to_string(),
        _ => format!("({})", render(exp)),
    };
    format!("{base_str}^{exp_str}")
}

/// Splits a product into numerator and denominator factors by exponent sign
/// and prints successive `/` divisions so the result re-parses without
/// introducing grouped denominators.
fn render_product(e: &Expr) -> String {
    let mut coeff = Rational64::from_integer(1);
    let mut numer: Vec<Expr> = Vec::new();
    let mut denom: Vec<Expr> = Vec::new();
    for factor in e.factors() {
        if let Some(r) = factor.as_rational() {
            coeff *= r;
            continue;
        }
        let (base, exp) = factor.as_power();
        match exp.as_rational() {
            Some(r) if r.is_negative() => {
                let flipped = -r;
                if flipped == Rational64::from_integer(1) {
                    denom.push(base);
                } else {
                    denom.push(Expr::Power(Box::new(base), Box::new(Expr::from_ratio(flipped))));
                }
            }
            _ => numer.push(factor),
        }
    }

    let sign = if coeff.is_negative() { "-" } else { "" };
    let abs = coeff.abs();
    let mut parts: Vec<String> = Vec::new();
    if *abs.numer() != 1 || numer.is_empty() {
        parts.push(abs.numer().to_string());
    }
    parts.extend(numer.iter().map(|f| print_prec(f, Prec::Mul)));
    let mut out = format!("{sign}{}", parts.join("*"));
    if *abs.denom() != 1 {
        out.push_str(&format!("/{}", abs.denom()));
    }
    for d in &denom {
        out.push_str(&format!("/{}", print_prec(d, Prec::Neg)));
    }
    out
}

fn render_sum(children: &[Expr]) -> String {
    let mut out = String::new();
    for (i, term) in children.iter().enumerate() {
        let (coeff, _) = term.coefficient_split();
        if i == 0 {
            out.push_str(&print_prec(term, Prec::Add));
            continue;
        }
        if coeff.is_negative() {
            let positive = term.clone().neg();
            out.push_str(" - ");
            out.push_str(&print_prec(&positive, Prec::Mul));
        } else {
            out.push_str(" + ");
            out.push_str(&print_prec(term, Prec::Mul));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse, parse_ode_rhs, Expr, Func};

    fn round_trip(text: &str) {
        let e = parse(text).unwrap();
        let printed = super::print(&e);
        let reparsed = parse(&printed)
            .unwrap_or_else(|err| panic!("`{printed}` failed to reparse: {err}"));
        assert_eq!(reparsed, e, "print was `{printed}`");
    }

    #[test]
    fn round_trips() {
        for text in [
            "0",
            "-5",
            "1/2",
            "x + y",
            "x - 2*y",
            "-(tan(y)+1/y)",
            "x*sin(y)^2/cos(y)",
            "1/x/y^2",
            "exp(y^2/2)",
            "int(exp(y^2/2), y)",
            "sqrt(2)",
            "x^(3/2)",
            "pi*e",
            "2^x",
            "(x + 1)^(y + 1)",
            "x/(y + 1)",
            "c1*x + c2",
            "-x/2",
            "erfi(y/sqrt(2))",
        ] {
            round_trip(text);
        }
    }

    #[test]
    fn yprime_prints_and_reparses() {
        let e = parse_ode_rhs("x*y' + 1").unwrap();
        let printed = super::print(&e);
        assert_eq!(parse_ode_rhs(&printed).unwrap(), e);
    }

    #[test]
    fn negative_power_renders_as_division() {
        let e = Expr::var("x").pow(Expr::int(-2));
        assert_eq!(super::print(&e), "1/x^2");
        let f = Expr::var("x").pow(Expr::rational(-1, 2));
        assert_eq!(super::print(&f), "1/sqrt(x)");
        let g = Expr::func(Func::Cos, Expr::var("y")).div(Expr::var("y"));
        assert_eq!(super::print(&g), "cos(y)/y");
    }
}
