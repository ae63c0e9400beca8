//! Forward construction: the ODE a given Sundman transformation linearizes.
//!
//! From u = psi(x,y), dt = phi(x,y) dx with psi_y phi != 0, the free
//! particle u_tt = 0 pulls back to y'' + F2 y'^2 + F1 y' + F = 0 with
//! A = psi_y/phi, B = psi_x/phi and
//! F2 = A_y/A, F1 = (B_y + A_x)/A, F = B_x/A.
//! Used as a brute-force oracle for generating known-linearizable equations.

use super::{LinearizeError, OdeQuad};
use crate::expr::{differentiate, simplify, Expr};

pub fn ode_from_point_transform(psi: &Expr, phi: &Expr) -> Result<OdeQuad, LinearizeError> {
    let a = simplify(&differentiate(psi, "y")?.mul(phi.clone().pow(Expr::int(-1))));
    let b = simplify(&differentiate(psi, "x")?.mul(phi.clone().pow(Expr::int(-1))));
    let a_inv = a.clone().pow(Expr::int(-1));

    let f2 = simplify(&differentiate(&a, "y")?.mul(a_inv.clone()));
    let f1 = simplify(
        &differentiate(&b, "y")?
            .add(differentiate(&a, "x")?)
            .mul(a_inv.clone()),
    );
    let f = simplify(&differentiate(&b, "x")?.mul(a_inv));
    OdeQuad::new(f, f1, f2)
}
