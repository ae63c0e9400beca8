//! Structural canonicalization: flattening, sorting, exact constant folding.
//!
//! Canonicalization is deliberately weaker than [`super::simplify`]: it
//! establishes the structural invariants every other pass relies on (flat
//! sorted n-ary nodes, folded numeric constants, unit elision) without doing
//! any algebraic rewriting. It is idempotent.

use super::{Expr, Func};
use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};

/// Canonical form of an expression.
pub fn canonical(e: &Expr) -> Expr {
    match e {
        Expr::Integer(_) | Expr::Const(_) | Expr::Var(_) | Expr::ArbConst(_) => e.clone(),
        Expr::Rational(r) => Expr::from_ratio(*r),
        Expr::Sum(children) => canon_sum(children),
        Expr::Product(children) => canon_product(children),
        Expr::Power(base, exp) => canon_power(canonical(base), canonical(exp)),
        Expr::Func(Func::Sqrt, arg) => {
            canon_power(canonical(arg), Expr::Rational(Rational64::new(1, 2)))
        }
        Expr::Func(tag, arg) => Expr::Func(*tag, Box::new(canonical(arg))),
        Expr::Integral(integrand, var) => {
            Expr::Integral(Box::new(canonical(integrand)), var.clone())
        }
    }
}

fn canon_sum(children: &[Expr]) -> Expr {
    let mut flat = Vec::new();
    let mut acc = Rational64::zero();
    let mut overflow_consts: Vec<Expr> = Vec::new();
    collect_sum(children, &mut flat, &mut acc, &mut overflow_consts);
    if !acc.is_zero() {
        flat.push(Expr::from_ratio(acc));
    }
    flat.extend(overflow_consts);
    flat.sort_by(|a, b| a.cmp_canonical(b));
    match flat.len() {
        0 => Expr::Integer(0),
        1 => flat.pop().unwrap(),
        _ => Expr::Sum(flat),
    }
}

fn collect_sum(children: &[Expr], flat: &mut Vec<Expr>, acc: &mut Rational64, spill: &mut Vec<Expr>) {
    for child in children {
        let c = canonical(child);
        match c {
            Expr::Sum(grandchildren) => collect_sum(&grandchildren, flat, acc, spill),
            Expr::Integer(0) => {}
            other => match other.as_rational() {
                Some(r) => match acc.checked_add(&r) {
                    Some(v) => *acc = v,
                    // i64 overflow: keep the addend symbolic rather than wrap
                    None => spill.push(other),
                },
                None => flat.push(other),
            },
        }
    }
}

fn canon_product(children: &[Expr]) -> Expr {
    let mut flat = Vec::new();
    let mut acc = Rational64::one();
    let mut overflow_consts: Vec<Expr> = Vec::new();
    let mut saw_zero = false;
    collect_product(children, &mut flat, &mut acc, &mut overflow_consts, &mut saw_zero);
    if saw_zero {
        return Expr::Integer(0);
    }
    if !acc.is_one() {
        flat.push(Expr::from_ratio(acc));
    }
    flat.extend(overflow_consts);
    flat.sort_by(|a, b| a.cmp_canonical(b));
    match flat.len() {
        0 => Expr::Integer(1),
        1 => flat.pop().unwrap(),
        _ => Expr::Product(flat),
    }
}

fn collect_product(
    children: &[Expr],
    flat: &mut Vec<Expr>,
    acc: &mut Rational64,
    spill: &mut Vec<Expr>,
    saw_zero: &mut bool,
) {
    for child in children {
        let c = canonical(child);
        match c {
            Expr::Product(grandchildren) => {
                collect_product(&grandchildren, flat, acc, spill, saw_zero)
            }
            Expr::Integer(0) => *saw_zero = true,
            Expr::Integer(1) => {}
            other => match other.as_rational() {
                Some(r) => match acc.checked_mul(&r) {
                    Some(v) => *acc = v,
                    None => spill.push(other),
                },
                None => flat.push(other),
            },
        }
    }
}

fn canon_power(base: Expr, exp: Expr) -> Expr {
    if exp.is_zero() {
        return Expr::Integer(1);
    }
    if exp.is_one() {
        return base;
    }
    if base.is_one() {
        return Expr::Integer(1);
    }
    if base.is_zero() {
        if let Some(r) = exp.as_rational() {
            if r.is_positive() {
                return Expr::Integer(0);
            }
        }
    }
    // Exact rational^integer when it fits in i64.
    if let (Some(b), Some(r)) = (base.as_rational(), exp.as_rational()) {
        if r.is_integer() {
            if let Some(v) = rational_pow(b, *r.numer()) {
                return Expr::from_ratio(v);
            }
        }
    }
    // (b^r)^n collapses for integer n; valid wherever b^r is defined.
    if matches!(exp.as_rational(), Some(r) if r.is_integer()) {
        if let Expr::Power(inner_base, inner_exp) = &base {
            let merged = canonical(&Expr::Product(vec![(**inner_exp).clone(), exp.clone()]));
            return canon_power((**inner_base).clone(), merged);
        }
    }
    Expr::Power(Box::new(base), Box::new(exp))
}

fn rational_pow(base: Rational64, mut exp: i64) -> Option<Rational64> {
    if exp == 0 {
        return Some(Rational64::one());
    }
    let mut b = base;
    if exp < 0 {
        if b.is_zero() {
            return None;
        }
        b = b.recip();
        exp = exp.checked_neg()?;
    }
    // Bail out on anything that could overflow; callers keep it symbolic.
    if exp > 64 {
        return None;
    }
    let mut out = Rational64::one();
    for _ in 0..exp {
        out = out.checked_mul(&b)?;
    }
    Some(out)
}
