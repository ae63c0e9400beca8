//! S-linearizability analysis and construction of first integrals, Sundman
//! transformations and solution families for equations
//! y'' + F2(x,y) y'^2 + F1(x,y) y' + F(x,y) = 0.
//!
//! The flow mirrors the underlying theory: the S-functions classify the
//! equation; an auxiliary function g(x) satisfying the compatibility
//! criterion determines h = int F2 dy + g; the first integral is
//! w = A y' + B with A = e^h and B assembled from nested antiderivatives; an
//! invariant I of y' = -B/A turns into psi = eta(I), phi = psi_y / A; and
//! when phi depends on x alone the transformation is a point transformation
//! whose quadrature mu = int phi dx yields the two-parameter solution family
//! psi = c1 + c2 mu.

mod criterion;
mod forward;
mod integral;
mod pipeline;
mod reduce;
mod sfunctions;
mod transform;

pub use criterion::{criterion_residual, solve_auxiliary_g, G_ANSATZ_CATALOG};
pub use forward::ode_from_point_transform;
pub use integral::{build_first_integral, build_first_integral_mr, pde_system_residuals};
pub use pipeline::{run_pipeline, PipelineOptions, PipelineRun, Stage, StageRecord, StageStatus};
pub use reduce::reduce_first_order;
pub use sfunctions::{classify, compute_s_functions};
pub use transform::{build_transform, general_solution, phi_alternative_agrees};

use crate::expr::{DiffError, Expr, ZeroTestError};
use std::fmt;

/// The coefficient triple of y'' + F2 y'^2 + F1 y' + F = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeQuad {
    pub f: Expr,
    pub f1: Expr,
    pub f2: Expr,
}

impl OdeQuad {
    /// Builds the ODE, rejecting coefficients that mention y', t or u.
    pub fn new(f: Expr, f1: Expr, f2: Expr) -> Result<OdeQuad, LinearizeError> {
        for (name, coeff) in [("F", &f), ("F1", &f1), ("F2", &f2)] {
            for banned in ["y'", "t", "u"] {
                if coeff.contains_var(banned) {
                    return Err(LinearizeError::InvalidCoefficient {
                        coefficient: name.to_string(),
                        variable: banned.to_string(),
                    });
                }
            }
        }
        Ok(OdeQuad { f, f1, f2 })
    }

    /// Right-hand side of y'' = -(F2 p^2 + F1 p + F) at numeric (x, y, p).
    pub fn acceleration(
        &self,
        point: &crate::expr::EvalPoint,
        p: f64,
    ) -> Result<f64, crate::expr::EvalError> {
        let f2 = crate::expr::evaluate(&self.f2, point)?;
        let f1 = crate::expr::evaluate(&self.f1, point)?;
        let f = crate::expr::evaluate(&self.f, point)?;
        Ok(-(f2 * p * p + f1 * p + f))
    }
}

/// The S-functions driving the classification alternative. S3 and S4 exist
/// only when S1 is not identically zero (they contain S2/S1).
#[derive(Debug, Clone, PartialEq)]
pub struct SFunctions {
    pub s1: Expr,
    pub s2: Expr,
    pub s3: Option<Expr>,
    pub s4: Option<Expr>,
}

/// Outcome of the S-function alternative.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    /// S1 = 0 and S2 = 0; also linearizable by a point transformation.
    Case1,
    /// S1 != 0 but S3 = S4 = 0.
    Case2,
    /// Some S-function is nonzero; carries the witness.
    NotSLinearizable {
        failing: &'static str,
        residual: f64,
    },
}

impl Classification {
    pub fn is_linearizable(&self) -> bool {
        matches!(self, Classification::Case1 | Classification::Case2)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classification::Case1 => "case1",
            Classification::Case2 => "case2",
            Classification::NotSLinearizable { .. } => "not_s_linearizable",
        }
    }
}

/// How the auxiliary function g(x) was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GProvenance {
    /// Case 1 change of variable g = ln q + k through the q-equation.
    Alt1QEquation,
    /// Case 2 direct integration g' = k.
    Alt2Integration,
    /// Fallback scan over a fixed g catalog, validated by the criterion.
    AnsatzScan,
}

impl GProvenance {
    pub fn name(self) -> &'static str {
        match self {
            GProvenance::Alt1QEquation => "alt1-q-equation",
            GProvenance::Alt2Integration => "alt2-integration",
            GProvenance::AnsatzScan => "ansatz-scan",
        }
    }
}

/// Auxiliary data determined by the criterion: g, h = int F2 dy + g, and the
/// intermediates the Muriel-Romero construction reuses.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryData {
    pub g: Expr,
    pub h: Expr,
    pub k: Option<Expr>,
    pub q: Option<Expr>,
    pub p: Option<Expr>,
    /// Coefficient of the q-equation q'' + fq q = 0 (case 1 only).
    pub fq: Option<Expr>,
    pub provenance: GProvenance,
}

/// Which construction produced the first integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiProvenance {
    /// A = e^h with B assembled from nested antiderivatives.
    ExplicitH,
    /// The P/Q gradient systems of Muriel and Romero.
    MurielRomero,
}

impl FiProvenance {
    pub fn name(self) -> &'static str {
        match self {
            FiProvenance::ExplicitH => "explicit-h",
            FiProvenance::MurielRomero => "muriel-romero",
        }
    }
}

/// First integral w = A(x,y) y' + B(x,y).
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegral {
    pub a: Expr,
    pub b: Expr,
    pub provenance: FiProvenance,
    /// False when B retains unevaluated integrals.
    pub closed_form: bool,
}

impl FirstIntegral {
    /// The conserved quantity A y' + B with y' as a variable token.
    pub fn w(&self) -> Expr {
        self.a.clone().mul(Expr::var("y'")).add(self.b.clone())
    }
}

/// The eta catalog applied to the invariant I.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaTag {
    Identity,
    Reciprocal,
    Ln,
    Square,
}

impl EtaTag {
    pub const CATALOG: [EtaTag; 4] = [
        EtaTag::Identity,
        EtaTag::Reciprocal,
        EtaTag::Ln,
        EtaTag::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EtaTag::Identity => "identity",
            EtaTag::Reciprocal => "reciprocal",
            EtaTag::Ln => "ln",
            EtaTag::Square => "square",
        }
    }

    pub fn from_name(name: &str) -> Option<EtaTag> {
        Some(match name {
            "identity" => EtaTag::Identity,
            "reciprocal" => EtaTag::Reciprocal,
            "ln" => EtaTag::Ln,
            "square" => EtaTag::Square,
            _ => return None,
        })
    }

    pub fn apply(self, i: &Expr) -> Expr {
        match self {
            EtaTag::Identity => i.clone(),
            EtaTag::Reciprocal => i.clone().pow(Expr::int(-1)),
            EtaTag::Ln => Expr::func(crate::expr::Func::Ln, i.clone()),
            EtaTag::Square => i.clone().pow(Expr::int(2)),
        }
    }
}

/// A generalized Sundman transformation u = psi(x,y), dt = phi(x,y) dx.
#[derive(Debug, Clone, PartialEq)]
pub struct SundmanTransform {
    /// Invariant I of y' = -B/A that psi was built from.
    pub invariant: Expr,
    pub eta: EtaTag,
    pub psi: Expr,
    pub phi: Expr,
    /// True iff phi depends on x alone, making t = mu(x) an honest coordinate.
    pub point_transformation: bool,
}

/// Right-hand side of the implicit solution family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyRhs {
    /// lhs = c1 u1(x) + c2 u2(x).
    Closed { u1: Expr, u2: Expr },
    /// lhs = c1 + c2 mu(x) with mu only defined through dt/dx = phi(x, y).
    Implicit { phi: Expr },
}

/// Two-parameter implicit solution family.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFamily {
    pub lhs: Expr,
    pub rhs: FamilyRhs,
    /// Quadrature mu = int phi dx when the transformation is point.
    pub mu: Option<Expr>,
    /// Explicit y = gamma(x, c1, c2) when lhs is invertible in y.
    pub gamma: Option<Expr>,
}

impl SolutionFamily {
    /// The defect lhs - rhs as an expression in x, y and arbitrary constants
    /// c1, c2; zero exactly on the family. `None` for implicit-mu families
    /// (use [`SolutionFamily::degenerate_defect`] instead).
    pub fn defect(&self) -> Option<Expr> {
        match &self.rhs {
            FamilyRhs::Closed { u1, u2 } => Some(
                self.lhs
                    .clone()
                    .sub(Expr::arb("c1").mul(u1.clone()))
                    .sub(Expr::arb("c2").mul(u2.clone())),
            ),
            FamilyRhs::Implicit { .. } => None,
        }
    }

    /// The c2 = 0 slice lhs - c1 (times u1 in the closed case), defined for
    /// every family.
    pub fn degenerate_defect(&self) -> Expr {
        match &self.rhs {
            FamilyRhs::Closed { u1, .. } => {
                self.lhs.clone().sub(Expr::arb("c1").mul(u1.clone()))
            }
            FamilyRhs::Implicit { .. } => self.lhs.clone().sub(Expr::arb("c1")),
        }
    }
}

/// Errors across the linearization pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearizeError {
    InvalidCoefficient {
        coefficient: String,
        variable: String,
    },
    Diff(DiffError),
    ZeroTest(ZeroTestError),
    /// An expression that must be x-only (or y-only) is not.
    WrongDependence {
        what: String,
    },
    /// The equation is not S-linearizable; construction stages refuse it.
    NotLinearizable,
    /// Classified linearizable, yet no g in any strategy satisfied the
    /// criterion: an expression-class limitation, reported loudly.
    NoAuxiliaryFound,
    /// q-equation catalog exhausted.
    NoClosedFormQ,
    /// Neither separability nor an integrating factor reduced y' = -B/A.
    NotReducible,
    /// psi_y * phi vanished identically.
    DegenerateTransform,
    /// A potential/gradient system could not be formed.
    Gradient(String),
}

impl fmt::Display for LinearizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearizeError::InvalidCoefficient {
                coefficient,
                variable,
            } => write!(f, "coefficient {coefficient} contains `{variable}`"),
            LinearizeError::Diff(e) => write!(f, "{e}"),
            LinearizeError::ZeroTest(e) => write!(f, "{e}"),
            LinearizeError::WrongDependence { what } => write!(f, "{what}"),
            LinearizeError::NotLinearizable => write!(f, "equation is not S-linearizable"),
            LinearizeError::NoAuxiliaryFound => write!(
                f,
                "no auxiliary g(x) found despite linearizable classification"
            ),
            LinearizeError::NoClosedFormQ => write!(f, "no closed-form q in the catalog"),
            LinearizeError::NotReducible => {
                write!(f, "could not reduce y' = -B/A to an invariant")
            }
            LinearizeError::DegenerateTransform => write!(f, "psi_y * phi vanishes identically"),
            LinearizeError::Gradient(why) => write!(f, "{why}"),
        }
    }
}

impl std::error::Error for LinearizeError {}

impl From<DiffError> for LinearizeError {
    fn from(e: DiffError) -> Self {
        LinearizeError::Diff(e)
    }
}

impl From<ZeroTestError> for LinearizeError {
    fn from(e: ZeroTestError) -> Self {
        LinearizeError::ZeroTest(e)
    }
}
