//! Deciding S-linearizability of second-order ODEs quadratic in the first
//! derivative, and constructing first integrals, generalized Sundman
//! transformations and closed-form solution families when they exist.
//!
//! The crate is organized around a small symbolic engine:
//!
//! - [`expr`] — expression trees, parsing, printing, differentiation,
//!   simplification, numeric evaluation and seeded identity testing;
//! - [`calculus`] — rule-based antiderivatives and the pattern solver for
//!   the auxiliary linear equation q'' + f(x) q = 0;
//! - [`linearize`] — S-functions, classification, the auxiliary-function
//!   criterion, first-integral construction (two independent routes), order
//!   reduction, Sundman transforms and solution families;
//! - [`verify`] — Runge-Kutta ground truth: first-integral drift, solution
//!   family residuals and the u_tt linearity check;
//! - [`geodesics`] — geodesic flows on surfaces of revolution as an
//!   application of the pipeline.
//!
//! Every symbolic claim made by `linearize` is backed by a numeric check:
//! identities are probed at seeded sample points, first integrals are tested
//! for drift along integrated trajectories, and solution families are
//! substituted back into the ODE.

pub mod calculus;
pub mod corpus;
pub mod expr;
pub mod geodesics;
pub mod linearize;
pub mod verify;

pub use expr::{
    depends_only_on, differentiate, evaluate, is_identically_zero, parse, parse_ode_rhs, print,
    simplify, EvalPoint, Expr, Func, SampleBox,
};
pub use linearize::{
    Classification, FirstIntegral, OdeQuad, SFunctions, SolutionFamily, SundmanTransform,
};
