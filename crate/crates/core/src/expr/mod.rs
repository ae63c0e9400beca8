//! Immutable symbolic expression trees.
//!
//! [`Expr`] is the universal currency of this crate: ODE coefficients, first
//! integrals, Sundman transformations and solution families are all plain
//! expression trees over the variables `x`, `y`, `t`, `u` plus named and
//! arbitrary constants. Expressions are values — cheap to clone, safe to
//! share between threads, and every operation on them is a pure function.
//!
//! Canonical form is deterministic: sums and products are flattened, sorted
//! and constant-folded so that structural equality is meaningful and printing
//! is reproducible. `canonical(canonical(e)) == canonical(e)` always holds.

mod canon;
mod differentiate;
mod eval;
mod parser;
mod printer;
mod sample;
mod simplify;

pub use canon::canonical;
pub use differentiate::{differentiate, DiffError};
pub use eval::{erf, erfi, evaluate, EvalError, EvalPoint};
pub use parser::{parse, parse_ode_rhs, ParseError};
pub use sample::{
    depends_only_on, is_identically_zero, SampleBox, SplitMix64, ZeroEvidence, ZeroTestError,
    DEFAULT_SAMPLE_COUNT, DEFAULT_SEED, DEFAULT_TOL,
};
pub use simplify::{expand, simplify};

use num_rational::Rational64;
use num_traits::{One, Signed};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// Function tags applicable to a single argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Cot,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Erf,
    Erfi,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Erf => "erf",
            Func::Erfi => "erfi",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "cot" => Func::Cot,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "erf" => Func::Erf,
            "erfi" => Func::Erfi,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Named mathematical constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
            NamedConst::E => "e",
        }
    }

    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }
}

/// A symbolic expression in canonical or raw form.
///
/// Invariants maintained by [`canonical`]:
/// - `Sum` and `Product` have at least two children, are flattened (no
///   sum-in-sum or product-in-product) and sorted by [`Expr::cmp_canonical`];
/// - `Rational` is in lowest terms with a denominator of at least 2
///   (integral values collapse to `Integer`);
/// - `Func(Sqrt, u)` is rewritten to `Power(u, 1/2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Exact integer constant.
    Integer(i64),
    /// Exact rational constant, lowest terms, denominator >= 2.
    Rational(Rational64),
    /// Named constant (`pi`, `e`).
    Const(NamedConst),
    /// A variable such as `x`, `y` or the derivative token `y'`.
    Var(String),
    /// Inert arbitrary constant (`c1`, `c2`, `C`, `b`).
    ArbConst(String),
    /// n-ary sum.
    Sum(Vec<Expr>),
    /// n-ary product.
    Product(Vec<Expr>),
    /// `base ^ exponent`.
    Power(Box<Expr>, Box<Expr>),
    /// Function application.
    Func(Func, Box<Expr>),
    /// Unevaluated antiderivative of the integrand in the named variable.
    Integral(Box<Expr>, String),
}

// add/mul/neg/div are canonicalizing builders, not the std ops traits
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Integer(n)
    }

    /// Exact rational `p/q`; panics on `q == 0`.
    pub fn rational(p: i64, q: i64) -> Expr {
        Expr::from_ratio(Rational64::new(p, q))
    }

    pub fn from_ratio(r: Rational64) -> Expr {
        if r.is_integer() {
            Expr::Integer(*r.numer())
        } else {
            Expr::Rational(r)
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn arb(name: &str) -> Expr {
        Expr::ArbConst(name.to_string())
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        canonical(&Expr::Sum(terms))
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        canonical(&Expr::Product(factors))
    }

    pub fn add(self, other: Expr) -> Expr {
        canonical(&Expr::Sum(vec![self, other]))
    }

    pub fn sub(self, other: Expr) -> Expr {
        canonical(&Expr::Sum(vec![self, other.neg()]))
    }

    pub fn mul(self, other: Expr) -> Expr {
        canonical(&Expr::Product(vec![self, other]))
    }

    /// Division as multiplication by the reciprocal.
    pub fn div(self, other: Expr) -> Expr {
        canonical(&Expr::Product(vec![self, other.pow(Expr::int(-1))]))
    }

    pub fn neg(self) -> Expr {
        canonical(&Expr::Product(vec![Expr::int(-1), self]))
    }

    pub fn pow(self, exponent: Expr) -> Expr {
        canonical(&Expr::Power(Box::new(self), Box::new(exponent)))
    }

    pub fn func(tag: Func, arg: Expr) -> Expr {
        canonical(&Expr::Func(tag, Box::new(arg)))
    }

    pub fn integral(integrand: Expr, var: &str) -> Expr {
        canonical(&Expr::Integral(Box::new(integrand), var.to_string()))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Integer(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Integer(1))
    }

    /// Exact rational value when the node is a numeric constant.
    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Expr::Integer(n) => Some(Rational64::from_integer(*n)),
            Expr::Rational(r) => Some(*r),
            _ => None,
        }
    }

    /// True when the expression contains no variables at all (named and
    /// arbitrary constants are fine).
    pub fn is_constant(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Free variables of the expression. The integration variable of an
    /// [`Expr::Integral`] counts as free: the node denotes an antiderivative
    /// evaluated at that variable.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(name) => {
                out.insert(name.clone());
            }
            Expr::Sum(children) | Expr::Product(children) => {
                for child in children {
                    child.collect_vars(out);
                }
            }
            Expr::Power(base, exp) => {
                base.collect_vars(out);
                exp.collect_vars(out);
            }
            Expr::Func(_, arg) => arg.collect_vars(out),
            Expr::Integral(integrand, var) => {
                integrand.collect_vars(out);
                out.insert(var.clone());
            }
            _ => {}
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => v == name,
            Expr::Sum(children) | Expr::Product(children) => {
                children.iter().any(|c| c.contains_var(name))
            }
            Expr::Power(base, exp) => base.contains_var(name) || exp.contains_var(name),
            Expr::Func(_, arg) => arg.contains_var(name),
            Expr::Integral(integrand, var) => var == name || integrand.contains_var(name),
            _ => false,
        }
    }

    pub fn contains_integral(&self) -> bool {
        match self {
            Expr::Integral(..) => true,
            Expr::Sum(children) | Expr::Product(children) => {
                children.iter().any(Expr::contains_integral)
            }
            Expr::Power(base, exp) => base.contains_integral() || exp.contains_integral(),
            Expr::Func(_, arg) => arg.contains_integral(),
            _ => false,
        }
    }

    /// Node count, used as a complexity measure by the simplifier.
    pub fn size(&self) -> usize {
        match self {
            Expr::Sum(children) | Expr::Product(children) => {
                1 + children.iter().map(Expr::size).sum::<usize>()
            }
            Expr::Power(base, exp) => 1 + base.size() + exp.size(),
            Expr::Func(_, arg) => 1 + arg.size(),
            Expr::Integral(integrand, _) => 1 + integrand.size(),
            _ => 1,
        }
    }

    /// All distinct subexpressions, including `self`.
    pub fn subexpressions(&self) -> Vec<Expr> {
        let mut seen = Vec::new();
        self.walk(&mut |e| {
            if !seen.contains(e) {
                seen.push(e.clone());
            }
        });
        seen
    }

    fn walk(&self, visit: &mut impl FnMut(&Expr)) {
        visit(self);
        match self {
            Expr::Sum(children) | Expr::Product(children) => {
                for child in children {
                    child.walk(visit);
                }
            }
            Expr::Power(base, exp) => {
                base.walk(visit);
                exp.walk(visit);
            }
            Expr::Func(_, arg) => arg.walk(visit),
            Expr::Integral(integrand, _) => integrand.walk(visit),
            _ => {}
        }
    }

    /// Substitute every occurrence of the variable by a replacement
    /// expression. Integration variables are not renamed; substituting for
    /// an integration variable of an enclosing [`Expr::Integral`] is a logic
    /// error guarded by the callers.
    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        let raw = self.substitute_raw(var, replacement);
        canonical(&raw)
    }

    fn substitute_raw(&self, var: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(name) if name == var => replacement.clone(),
            Expr::Sum(children) => Expr::Sum(
                children
                    .iter()
                    .map(|c| c.substitute_raw(var, replacement))
                    .collect(),
            ),
            Expr::Product(children) => Expr::Product(
                children
                    .iter()
                    .map(|c| c.substitute_raw(var, replacement))
                    .collect(),
            ),
            Expr::Power(base, exp) => Expr::Power(
                Box::new(base.substitute_raw(var, replacement)),
                Box::new(exp.substitute_raw(var, replacement)),
            ),
            Expr::Func(tag, arg) => {
                Expr::Func(*tag, Box::new(arg.substitute_raw(var, replacement)))
            }
            Expr::Integral(integrand, ivar) if ivar != var => Expr::Integral(
                Box::new(integrand.substitute_raw(var, replacement)),
                ivar.clone(),
            ),
            other => other.clone(),
        }
    }

    /// Deterministic total order used for canonical sorting: numeric
    /// constants first (by value), then named constants, arbitrary constants
    /// and variables lexicographically, then compound nodes recursively.
    pub fn cmp_canonical(&self, other: &Expr) -> Ordering {
        fn class(e: &Expr) -> u8 {
            match e {
                Expr::Integer(_) | Expr::Rational(_) => 0,
                Expr::Const(_) => 1,
                Expr::ArbConst(_) => 2,
                Expr::Var(_) => 3,
                Expr::Func(..) => 4,
                Expr::Power(..) => 5,
                Expr::Integral(..) => 6,
                Expr::Product(_) => 7,
                Expr::Sum(_) => 8,
            }
        }
        let (ca, cb) = (class(self), class(other));
        if ca != cb {
            return ca.cmp(&cb);
        }
        match (self, other) {
            (Expr::Integer(_) | Expr::Rational(_), Expr::Integer(_) | Expr::Rational(_)) => {
                self.as_rational().unwrap().cmp(&other.as_rational().unwrap())
            }
            (Expr::Const(a), Expr::Const(b)) => a.cmp(b),
            (Expr::ArbConst(a), Expr::ArbConst(b)) | (Expr::Var(a), Expr::Var(b)) => a.cmp(b),
            (Expr::Func(ta, aa), Expr::Func(tb, ab)) => {
                ta.cmp(tb).then_with(|| aa.cmp_canonical(ab))
            }
            (Expr::Power(ba, ea), Expr::Power(bb, eb)) => ba
                .cmp_canonical(bb)
                .then_with(|| ea.cmp_canonical(eb)),
            (Expr::Integral(ia, va), Expr::Integral(ib, vb)) => {
                va.cmp(vb).then_with(|| ia.cmp_canonical(ib))
            }
            (Expr::Product(a), Expr::Product(b)) | (Expr::Sum(a), Expr::Sum(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    let ord = x.cmp_canonical(y);
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
                a.len().cmp(&b.len())
            }
            _ => unreachable!("class() covered all pairs"),
        }
    }

    /// Split a canonical term into (rational coefficient, remaining factor).
    /// `6*x*sin(y)` gives `(6, x*sin(y))`; a bare rational gives `(r, 1)`.
    pub fn coefficient_split(&self) -> (Rational64, Expr) {
        match self {
            Expr::Integer(_) | Expr::Rational(_) => {
                (self.as_rational().unwrap(), Expr::Integer(1))
            }
            Expr::Product(children) => {
                let mut coeff = Rational64::one();
                let mut rest = Vec::new();
                for child in children {
                    match child.as_rational() {
                        Some(r) => coeff *= r,
                        None => rest.push(child.clone()),
                    }
                }
                let core = match rest.len() {
                    0 => Expr::Integer(1),
                    1 => rest.pop().unwrap(),
                    _ => Expr::Product(rest),
                };
                (coeff, core)
            }
            _ => (Rational64::one(), self.clone()),
        }
    }

    /// Additive terms of the expression (a non-sum is a single term).
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Sum(children) => children.clone(),
            other => vec![other.clone()],
        }
    }

    /// Multiplicative factors (a non-product is a single factor).
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::Product(children) => children.clone(),
            other => vec![other.clone()],
        }
    }

    /// Factor as `base^exponent` with exponent defaulting to 1.
    pub fn as_power(&self) -> (Expr, Expr) {
        match self {
            Expr::Power(base, exp) => ((**base).clone(), (**exp).clone()),
            other => (other.clone(), Expr::Integer(1)),
        }
    }

    /// Heuristic positivity: true only when the expression is structurally
    /// guaranteed positive for all real arguments in its domain.
    pub fn is_known_positive(&self) -> bool {
        match self {
            Expr::Integer(n) => *n > 0,
            Expr::Rational(r) => r.is_positive(),
            Expr::Const(_) => true,
            Expr::Func(Func::Exp | Func::Cosh, _) => true,
            Expr::Func(Func::Abs, arg) => !arg.is_zero(),
            Expr::Power(base, exp) => {
                base.is_known_positive()
                    || matches!(exp.as_rational(), Some(r) if r.is_integer() && *r.numer() % 2 == 0)
            }
            Expr::Product(children) => children.iter().all(Expr::is_known_positive),
            Expr::Sum(children) => children.iter().all(Expr::is_known_positive),
            _ => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", printer::print(self))
    }
}

/// Prints in the CLI expression grammar; `parse(print(e)) == e` for
/// canonical `e`.
pub fn print(e: &Expr) -> String {
    printer::print(e)
}
