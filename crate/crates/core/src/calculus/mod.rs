//! Rule-based symbolic antiderivatives and small ODE/PDE helpers.
//!
//! The integrator is a fixed rule chain, not a decision procedure: linearity,
//! the power rule, exponentials and (hyperbolic) trigonometry of linear
//! arguments, reciprocal squares, and numeric detection of logarithmic
//! derivatives f'/f. Anything it cannot close is wrapped in an unevaluated
//! integral node — never an error — and stays usable numerically through
//! quadrature. Gaussian integrands close into erf/erfi on demand via
//! [`close_gaussian`], which the solution-recovery stage applies.

mod qsolve;

pub use qsolve::{solve_q_ode, QError, QMethod, QSolution};

use crate::expr::{
    canonical, differentiate, evaluate, expand, is_identically_zero, simplify, DiffError, Expr,
    Func, NamedConst, SampleBox, SplitMix64, DEFAULT_TOL,
};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

/// Result of a symbolic antiderivative attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct Antiderivative {
    /// An expression whose derivative in the integration variable equals the
    /// integrand (by construction, also when unevaluated nodes remain).
    pub result: Expr,
    /// False when an unevaluated integral node remains in `result`.
    pub closed_form: bool,
    /// Names of the rules that fired, in order.
    pub rules_applied: Vec<String>,
}

/// Antiderivative with the default sample box for numeric rule checks.
pub fn antiderivative(integrand: &Expr, var: &str) -> Antiderivative {
    antiderivative_in(integrand, var, &SampleBox::new())
}

/// Antiderivative probing numeric rules (log-derivative detection) inside
/// the given sample box. Total: integration constants are fixed to zero and
/// failures fall back to an unevaluated integral.
pub fn antiderivative_in(integrand: &Expr, var: &str, sample_box: &SampleBox) -> Antiderivative {
    let prepared = expand(integrand);
    // an integrand that vanishes at every probe has antiderivative 0
    // (integration constants are fixed to zero throughout)
    if !prepared.is_zero()
        && matches!(
            is_identically_zero(&prepared, sample_box, DEFAULT_TOL),
            Ok((true, _))
        )
    {
        return Antiderivative {
            result: Expr::int(0),
            closed_form: true,
            rules_applied: vec!["zero-integrand".into()],
        };
    }
    let mut rules = Vec::new();
    let (result, closed_form) = integrate_sum(&prepared, var, sample_box, &mut rules);
    Antiderivative {
        result: simplify(&result),
        closed_form,
        rules_applied: rules,
    }
}

fn integrate_sum(
    e: &Expr,
    var: &str,
    sample_box: &SampleBox,
    rules: &mut Vec<String>,
) -> (Expr, bool) {
    let mut parts = Vec::new();
    let mut closed = true;
    for term in e.terms() {
        let (piece, piece_closed) = integrate_term(&term, var, sample_box, rules);
        closed &= piece_closed;
        parts.push(piece);
    }
    (canonical(&Expr::Sum(parts)), closed)
}

fn integrate_term(
    term: &Expr,
    var: &str,
    sample_box: &SampleBox,
    rules: &mut Vec<String>,
) -> (Expr, bool) {
    if !term.contains_var(var) {
        rules.push("constant".into());
        return (term.clone().mul(Expr::var(var)), true);
    }
    // Pull variable-free factors out front.
    let mut free = Vec::new();
    let mut dependent = Vec::new();
    for factor in term.factors() {
        if factor.contains_var(var) {
            dependent.push(factor);
        } else {
            free.push(factor);
        }
    }
    let core = canonical(&Expr::Product(dependent));
    if !free.is_empty() {
        rules.push("linearity".into());
    }
    let coefficient = canonical(&Expr::Product(free));
    let (integrated, closed) = integrate_core(&core, var, sample_box, rules);
    (coefficient.mul(integrated), closed)
}

fn integrate_core(
    core: &Expr,
    var: &str,
    sample_box: &SampleBox,
    rules: &mut Vec<String>,
) -> (Expr, bool) {
    if let Some(result) = table_rule(core, var, rules) {
        return (result, true);
    }
    if let Some(result) = derivative_multiple_rule(core, var, sample_box, rules) {
        return (result, true);
    }
    if let Some(result) = log_derivative_rule(core, var, sample_box, rules) {
        return (result, true);
    }
    rules.push("unevaluated".into());
    (Expr::integral(core.clone(), var), false)
}

/// `a v + b` decomposition with variable-free `a != 0`, `b`.
fn linear_in(e: &Expr, var: &str) -> Option<(Expr, Expr)> {
    let a = simplify(&differentiate(e, var).ok()?);
    if a.contains_var(var) || a.is_zero() {
        return None;
    }
    let b = simplify(&e.clone().sub(a.clone().mul(Expr::var(var))));
    if b.contains_var(var) {
        return None;
    }
    Some((a, b))
}

fn table_rule(core: &Expr, var: &str, rules: &mut Vec<String>) -> Option<Expr> {
    let v = Expr::var(var);
    if *core == v {
        rules.push("power".into());
        return Some(v.pow(Expr::int(2)).mul(Expr::rational(1, 2)));
    }
    match core {
        Expr::Power(base, exp) => {
            let r = exp.as_rational()?;
            // reciprocal squares of trig/hyperbolic functions
            if r == Rational64::from_integer(-2) {
                if let Expr::Func(tag, arg) = &**base {
                    if let Some((a, _)) = linear_in(arg, var) {
                        let quot = |num: Func, den: Func, sign: i64| {
                            Expr::product(vec![
                                Expr::int(sign),
                                Expr::func(num, (**arg).clone()),
                                Expr::func(den, (**arg).clone()).pow(Expr::int(-1)),
                                a.clone().pow(Expr::int(-1)),
                            ])
                        };
                        let result = match tag {
                            Func::Sin => quot(Func::Cos, Func::Sin, -1),
                            Func::Cos => quot(Func::Sin, Func::Cos, 1),
                            Func::Sinh => quot(Func::Cosh, Func::Sinh, -1),
                            Func::Cosh => quot(Func::Sinh, Func::Cosh, 1),
                            _ => return None,
                        };
                        rules.push("reciprocal-square".into());
                        return Some(result);
                    }
                }
            }
            let (a, _) = linear_in(base, var)?;
            let a_inv = a.pow(Expr::int(-1));
            if r == Rational64::from_integer(-1) {
                rules.push("reciprocal".into());
                return Some(Expr::func(Func::Ln, (**base).clone()).mul(a_inv));
            }
            rules.push("power".into());
            let next = Expr::from_ratio(r + Rational64::one());
            Some(
                (**base)
                    .clone()
                    .pow(next.clone())
                    .mul(next.pow(Expr::int(-1)))
                    .mul(a_inv),
            )
        }
        Expr::Func(tag, arg) => {
            let (a, _) = linear_in(arg, var)?;
            let a_inv = a.pow(Expr::int(-1));
            let u = (**arg).clone();
            let result = match tag {
                Func::Exp => Expr::func(Func::Exp, u),
                Func::Sin => Expr::func(Func::Cos, u).neg(),
                Func::Cos => Expr::func(Func::Sin, u),
                Func::Sinh => Expr::func(Func::Cosh, u),
                Func::Cosh => Expr::func(Func::Sinh, u),
                Func::Ln => {
                    // ∫ ln u dv = (u ln u - u)/a
                    Expr::func(Func::Ln, u.clone()).mul(u.clone()).sub(u)
                }
                _ => return None,
            };
            rules.push(format!("{}-linear", tag.name()));
            Some(result.mul(a_inv))
        }
        Expr::Product(factors) if factors.len() == 2 => {
            monomial_times_linear_power(&factors[0], &factors[1], var, rules)
                .or_else(|| monomial_times_linear_power(&factors[1], &factors[0], var, rules))
        }
        _ => None,
    }
}

/// ∫ v^m (a v + c)^r dv for integer 1 <= m <= 3 and rational r: substitute
/// u = a v + c, expand v^m = ((u - c)/a)^m binomially and integrate the
/// resulting powers of u (the r + j = -1 term becomes a logarithm).
fn monomial_times_linear_power(
    mono: &Expr,
    power: &Expr,
    var: &str,
    rules: &mut Vec<String>,
) -> Option<Expr> {
    let m: i64 = match mono {
        Expr::Var(name) if name == var => 1,
        Expr::Power(base, exp) => {
            if !matches!(&**base, Expr::Var(name) if name == var) {
                return None;
            }
            let r = exp.as_rational()?;
            if !r.is_integer() || *r.numer() < 1 || *r.numer() > 3 {
                return None;
            }
            *r.numer()
        }
        _ => return None,
    };
    let (base, exp) = power.as_power();
    let r = exp.as_rational()?;
    let (a, c) = linear_in(&base, var)?;
    // exclude the pure-power case a v + 0, already covered upstream
    if c.is_zero() {
        return None;
    }
    let a_inv = a.clone().pow(Expr::int(-1));
    let mut terms = Vec::new();
    for j in 0..=m {
        let binom = (1..=m).product::<i64>() / ((1..=j).product::<i64>() * (1..=(m - j)).product::<i64>());
        // v^m = a^{-m} sum_j C(m,j) u^j (-c)^{m-j}
        let coeff = Expr::int(binom)
            .mul(c.clone().neg().pow(Expr::int(m - j)))
            .mul(a_inv.clone().pow(Expr::int(m)));
        let u_exp = r + num_rational::Rational64::from_integer(j);
        let integrated = if u_exp == num_rational::Rational64::from_integer(-1) {
            Expr::func(Func::Ln, base.clone())
        } else {
            let next = Expr::from_ratio(u_exp + num_rational::Rational64::one());
            base.clone()
                .pow(next.clone())
                .mul(next.pow(Expr::int(-1)))
        };
        terms.push(coeff.mul(integrated).mul(a_inv.clone()));
    }
    rules.push("monomial-linear-power".into());
    Some(simplify(&Expr::sum(terms)))
}

/// Shared numeric probe: is `target` a single rational constant everywhere?
/// Returns the fitted constant after five successful probe points agree.
fn fit_rational_constant(
    target: &Expr,
    sample_box: &SampleBox,
    rng: &mut SplitMix64,
) -> Option<Rational64> {
    let vars = target.free_variables();
    let mut ratio: Option<f64> = None;
    let mut probes = 0;
    for _ in 0..24 {
        if probes >= 5 {
            break;
        }
        let mut p = sample_box.base_point();
        for v in &vars {
            let (lo, hi) = sample_box.interval(v);
            p.set_anchor(v, lo);
            p.set(v, rng.in_range(lo, hi));
        }
        let value = match evaluate(target, &p) {
            Ok(v) => v,
            Err(_) => continue,
        };
        probes += 1;
        match ratio {
            None => ratio = Some(value),
            Some(prev) if (value - prev).abs() <= 1e-9 * (1.0 + prev.abs()) => {}
            Some(_) => return None,
        }
    }
    if probes < 5 {
        return None;
    }
    nearest_rational(ratio?, 48)
}

/// Chain-rule detection: integrands of the form c F'(v) for a candidate F
/// (covers u' e^u, u' cos u, f f' and friends).
fn derivative_multiple_rule(
    core: &Expr,
    var: &str,
    sample_box: &SampleBox,
    rules: &mut Vec<String>,
) -> Option<Expr> {
    let mut rng = SplitMix64::new(sample_box.seed ^ 0xd31f);
    for f in log_derivative_candidates(core, var) {
        let fp = match differentiate(&f, var) {
            Ok(d) => simplify(&d),
            Err(_) => continue,
        };
        if fp.is_zero() || fp.as_rational().is_some() {
            continue;
        }
        let ratio_expr = simplify(&core.clone().mul(fp.clone().pow(Expr::int(-1))));
        let Some(c) = fit_rational_constant(&ratio_expr, sample_box, &mut rng) else {
            continue;
        };
        let residual = simplify(&core.clone().sub(Expr::from_ratio(c).mul(fp)));
        if matches!(
            is_identically_zero(&residual, sample_box, DEFAULT_TOL),
            Ok((true, _))
        ) {
            rules.push("derivative-multiple".into());
            return Some(f.mul(Expr::from_ratio(c)));
        }
    }
    None
}

/// Numeric detection of integrands of the form c f'(v)/f(v): probes
/// candidate f built from subexpressions plus tan/cot-style quotients, fits
/// the rational constant c, then verifies the identity on the sample box.
fn log_derivative_rule(
    core: &Expr,
    var: &str,
    sample_box: &SampleBox,
    rules: &mut Vec<String>,
) -> Option<Expr> {
    let mut rng = SplitMix64::new(sample_box.seed ^ 0x106d);
    for f in log_derivative_candidates(core, var) {
        let fp = match differentiate(&f, var) {
            Ok(d) => simplify(&d),
            Err(_) => continue,
        };
        if fp.is_zero() {
            continue;
        }
        // c = core * f / f' should be the same rational at every probe.
        let ratio_expr =
            simplify(&core.clone().mul(f.clone()).mul(fp.clone().pow(Expr::int(-1))));
        let Some(c_exact) = fit_rational_constant(&ratio_expr, sample_box, &mut rng) else {
            continue;
        };
        let residual = simplify(
            &core
                .clone()
                .sub(Expr::from_ratio(c_exact).mul(fp).mul(f.clone().pow(Expr::int(-1)))),
        );
        match is_identically_zero(&residual, sample_box, DEFAULT_TOL) {
            Ok((true, _)) => {
                rules.push("log-derivative".into());
                return Some(Expr::func(Func::Ln, f).mul(Expr::from_ratio(c_exact)));
            }
            _ => continue,
        }
    }
    None
}

fn log_derivative_candidates(core: &Expr, var: &str) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    let mut push = |e: Expr| {
        if e.contains_var(var) && !out.contains(&e) {
            out.push(e);
        }
    };
    // quotient candidates for every trig/hyperbolic argument present
    let mut args: Vec<Expr> = Vec::new();
    for sub in core.subexpressions() {
        if let Expr::Func(tag, arg) = &sub {
            if matches!(
                tag,
                Func::Sin
                    | Func::Cos
                    | Func::Sinh
                    | Func::Cosh
                    | Func::Tan
                    | Func::Cot
                    | Func::Tanh
            ) && !args.contains(arg)
            {
                args.push((**arg).clone());
            }
        }
    }
    for arg in &args {
        let sin = Expr::func(Func::Sin, arg.clone());
        let cos = Expr::func(Func::Cos, arg.clone());
        let sinh = Expr::func(Func::Sinh, arg.clone());
        let cosh = Expr::func(Func::Cosh, arg.clone());
        push(sin.clone().mul(cos.clone().pow(Expr::int(-1))));
        push(cos.clone().mul(sin.clone().pow(Expr::int(-1))));
        push(sinh.clone().mul(cosh.clone().pow(Expr::int(-1))));
        push(cosh.clone().mul(sinh.clone().pow(Expr::int(-1))));
        push(sin);
        push(cos);
        push(sinh);
        push(cosh);
    }
    for sub in core.subexpressions() {
        match sub {
            Expr::Func(..) | Expr::Integral(..) | Expr::Sum(_) => {
                push(sub.clone().pow(Expr::int(2)));
                push(sub.clone());
            }
            Expr::Power(ref base, _) => push((**base).clone()),
            _ => {}
        }
    }
    push(Expr::var(var));
    out
}

/// Nearest rational with denominator at most `max_denom`, when within 1e-9.
fn nearest_rational(x: f64, max_denom: i64) -> Option<Rational64> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    for denom in 1..=max_denom {
        let numer = (x * denom as f64).round();
        if numer.abs() > 9e15 {
            continue;
        }
        let cand = numer / denom as f64;
        if (x - cand).abs() <= 1e-9 * (1.0 + x.abs()) {
            let r = Rational64::new(numer as i64, denom);
            if r.is_zero() {
                return None;
            }
            return Some(r);
        }
    }
    None
}

/// Rewrites unevaluated Gaussian integrals into erf/erfi closed forms:
/// `int c e^{q v^2} dv = c sqrt(pi)/(2 sqrt(|q|)) erfi(sqrt(q) v)` for q > 0
/// (erf for q < 0). Leaves every other node untouched.
pub fn close_gaussian(e: &Expr) -> Expr {
    let mapped = match e {
        Expr::Sum(children) => Expr::Sum(children.iter().map(close_gaussian).collect()),
        Expr::Product(children) => Expr::Product(children.iter().map(close_gaussian).collect()),
        Expr::Power(base, exp) => Expr::Power(
            Box::new(close_gaussian(base)),
            Box::new(close_gaussian(exp)),
        ),
        Expr::Func(tag, arg) => Expr::Func(*tag, Box::new(close_gaussian(arg))),
        Expr::Integral(integrand, var) => {
            if let Some(closed) = gaussian_closed_form(integrand, var) {
                return closed;
            }
            Expr::Integral(Box::new(close_gaussian(integrand)), var.clone())
        }
        leaf => leaf.clone(),
    };
    canonical(&mapped)
}

fn gaussian_closed_form(integrand: &Expr, var: &str) -> Option<Expr> {
    let s = simplify(integrand);
    let mut coefficient = Vec::new();
    let mut quad: Option<Rational64> = None;
    for factor in s.factors() {
        if !factor.contains_var(var) {
            coefficient.push(factor);
            continue;
        }
        if quad.is_some() {
            return None;
        }
        let Expr::Func(Func::Exp, arg) = &factor else {
            return None;
        };
        // exponent must be q v^2 plus variable-free terms
        let mut q: Option<Rational64> = None;
        for term in arg.terms() {
            if !term.contains_var(var) {
                coefficient.push(Expr::func(Func::Exp, term));
                continue;
            }
            let (c, core) = term.coefficient_split();
            let v_squared = Expr::Power(
                Box::new(Expr::Var(var.to_string())),
                Box::new(Expr::Integer(2)),
            );
            if core != v_squared || q.is_some() {
                return None;
            }
            q = Some(c);
        }
        quad = Some(q?);
    }
    let q = quad?;
    let root_q = Expr::from_ratio(q.abs()).pow(Expr::rational(1, 2));
    let scale = Expr::Const(NamedConst::Pi)
        .pow(Expr::rational(1, 2))
        .mul(Expr::rational(1, 2))
        .mul(root_q.clone().pow(Expr::int(-1)));
    let arg = root_q.mul(Expr::var(var));
    let special = if q.is_positive() {
        Expr::func(Func::Erfi, arg)
    } else {
        Expr::func(Func::Erf, arg)
    };
    Some(simplify(&Expr::product(coefficient).mul(scale).mul(special)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum GradientError {
    /// Neither integration order could even express the potential.
    CannotForm(String),
}

impl std::fmt::Display for GradientError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GradientError::CannotForm(why) => write!(f, "cannot form potential: {why}"),
        }
    }
}

impl std::error::Error for GradientError {}

/// Solves U_x = rx, U_y = ry for a potential U, assuming compatibility.
/// Integrates one equation and fixes the integration "constant" from the
/// other; both orders are attempted. The result may contain unevaluated
/// integrals (open form, second tuple element false).
pub fn solve_gradient(
    rx: &Expr,
    ry: &Expr,
    sample_box: &SampleBox,
) -> Result<(Expr, bool), GradientError> {
    let attempt = |first: &Expr,
                   first_var: &str,
                   second: &Expr,
                   second_var: &str|
     -> Result<(Expr, bool), DiffError> {
        let u0 = antiderivative_in(first, first_var, sample_box);
        let du0 = differentiate(&u0.result, second_var)?;
        let residual = simplify(&second.clone().sub(du0));
        let z = antiderivative_in(&residual, second_var, sample_box);
        Ok((
            simplify(&u0.result.add(z.result)),
            u0.closed_form && z.closed_form,
        ))
    };
    match attempt(ry, "y", rx, "x") {
        Ok(out) => Ok(out),
        Err(_) => attempt(rx, "x", ry, "y").map_err(|e| GradientError::CannotForm(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn anti(text: &str, var: &str) -> Antiderivative {
        antiderivative(&parse(text).unwrap(), var)
    }

    fn check_closed(text: &str, var: &str, expected: &str) {
        let got = anti(text, var);
        assert!(
            got.closed_form,
            "expected closed form for {text}, got {:?}",
            got
        );
        let want = simplify(&parse(expected).unwrap());
        // compare derivatives numerically: results may differ by a constant
        let diff = simplify(&got.result.clone().sub(want));
        let d = differentiate(&diff, var).unwrap();
        let (zero, ev) = is_identically_zero(&simplify(&d), &SampleBox::new(), 1e-9).unwrap();
        assert!(
            zero,
            "antiderivative of {text} was {} (wanted {expected}); residual {}",
            got.result, ev.residual
        );
    }

    #[test]
    fn tangent_equation_h() {
        // ∫ -(tan y + 1/y) dy = ln(cos y) - ln(y)
        check_closed("-(tan(y) + 1/y)", "y", "ln(cos(y)) - ln(y)");
    }

    #[test]
    fn gaussian_stays_open() {
        let got = anti("exp(y^2/2)", "y");
        assert!(!got.closed_form);
        assert_eq!(got.result, parse("int(exp(y^2/2), y)").unwrap());
    }

    #[test]
    fn zero_integrand() {
        let got = anti("0", "y");
        assert!(got.closed_form);
        assert!(got.result.is_zero());
    }

    #[test]
    fn table_rules() {
        check_closed("x^3", "x", "x^4/4");
        check_closed("1/x", "x", "ln(x)");
        check_closed("exp(2*x + 1)", "x", "exp(2*x + 1)/2");
        check_closed("sin(2*x)", "x", "-cos(2*x)/2");
        check_closed("1/sin(x)^2", "x", "-cos(x)/sin(x)");
        check_closed("1/sinh(x)^2", "x", "-cosh(x)/sinh(x)");
        check_closed("1/(b + y)", "y", "ln(b + y)");
        check_closed("y*exp(y^2/2)", "y", "exp(y^2/2)");
    }

    #[test]
    fn log_derivative_detection() {
        check_closed("cot(y)", "y", "ln(sin(y))");
        check_closed("tan(y)", "y", "-ln(cos(y))");
        check_closed("1/(sin(y)*cos(y))", "y", "ln(sin(y)/cos(y))");
        check_closed("1/(sinh(y)*cosh(y))", "y", "ln(sinh(y)/cosh(y))");
        // f'/f with f an unevaluated integral
        check_closed(
            "exp(y^2/2)/int(exp(y^2/2), y)",
            "y",
            "ln(int(exp(y^2/2), y))",
        );
    }

    #[test]
    fn linearity_with_symbolic_constants() {
        let got = anti("-cot(y)*sin(x)", "x");
        assert!(got.closed_form);
        let want = simplify(&parse("cot(y)*cos(x)").unwrap());
        assert_eq!(simplify(&got.result), want);
    }

    #[test]
    fn gaussian_closure_to_erfi() {
        let k = parse("int(exp(y^2/2), y)").unwrap();
        let closed = close_gaussian(&k);
        let p = crate::expr::EvalPoint::new()
            .with("y", 1.3)
            .with_anchor("y", 0.0);
        let got = evaluate(&closed, &p).unwrap();
        let want = evaluate(&k, &p).unwrap();
        assert!((got - want).abs() < 1e-10, "got {got}, want {want}");
        assert!(!closed.contains_integral());

        let neg = parse("int(exp(-y^2), y)").unwrap();
        let closed_neg = close_gaussian(&neg);
        let got_neg = evaluate(&closed_neg, &p).unwrap();
        let want_neg = evaluate(&neg, &p).unwrap();
        assert!((got_neg - want_neg).abs() < 1e-10);
        assert!(!closed_neg.contains_integral());
    }

    #[test]
    fn antiderivative_is_linear_up_to_constant() {
        let u = parse("cot(y)").unwrap();
        let w = parse("y^2").unwrap();
        let combined = parse("3*cot(y) + 2*y^2").unwrap();
        let lhs = antiderivative(&combined, "y").result;
        let rhs = parse("3")
            .unwrap()
            .mul(antiderivative(&u, "y").result)
            .add(parse("2").unwrap().mul(antiderivative(&w, "y").result));
        let d = differentiate(&simplify(&lhs.sub(rhs)), "y").unwrap();
        let (zero, _) = is_identically_zero(&simplify(&d), &SampleBox::new(), 1e-9).unwrap();
        assert!(zero);
    }

    #[test]
    fn gradient_system_for_oscillator() {
        // P_x = 0, P_y = y  =>  P = y^2/2
        let (p, closed) = solve_gradient(
            &Expr::int(0),
            &Expr::var("y"),
            &SampleBox::new(),
        )
        .unwrap();
        assert!(closed);
        assert_eq!(p, simplify(&parse("y^2/2").unwrap()));
    }
}
