//! Report schema: every expression field is a grammar string that re-parses
//! to a numerically equal expression.

use crate::problem::ProblemEcho;
use serde::Serialize;
use sundman_core::linearize::{
    Classification, FamilyRhs, FirstIntegral, PipelineRun, SolutionFamily, StageStatus,
};
use sundman_core::print;
use sundman_core::verify::VerificationReport;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub problem: ProblemEcho,
    pub classification: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub not_linearizable: Option<NotLinearizable>,
    pub s_functions: Option<SFunctionsOut>,
    pub g: Option<String>,
    pub h: Option<String>,
    pub first_integral: Option<FirstIntegralOut>,
    pub first_integral_mr: Option<FirstIntegralOut>,
    pub invariant: Option<String>,
    pub transform: Option<TransformOut>,
    pub solution: Option<SolutionOut>,
    pub verification: Option<VerificationOut>,
    pub stages: Vec<StageOut>,
}

#[derive(Debug, Serialize)]
pub struct NotLinearizable {
    pub failing: String,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct SFunctionsOut {
    pub s1: String,
    pub s2: String,
    pub s3: Option<String>,
    pub s4: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct FirstIntegralOut {
    pub a: String,
    pub b: String,
    /// w = A y' + B in the y'-extended grammar.
    pub w: String,
    pub provenance: String,
    pub closed_form: bool,
}

#[derive(Debug, Serialize)]
pub struct TransformOut {
    pub eta: String,
    pub psi: String,
    pub phi: String,
    pub point_transformation: bool,
}

#[derive(Debug, Serialize)]
pub struct SolutionOut {
    pub lhs: String,
    /// Right-hand side with the arbitrary constants spelled out.
    pub rhs: String,
    pub mu: Option<String>,
    pub mu_implicit: bool,
    /// The c2 = 0 member, always available.
    pub degenerate: String,
    pub gamma: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VerificationOut {
    pub max_drift: Option<f64>,
    pub max_ode_residual: Option<f64>,
    pub max_utt: Option<f64>,
    pub pass: bool,
    pub tolerances: TolerancesOut,
}

#[derive(Debug, Serialize)]
pub struct TolerancesOut {
    pub drift: f64,
    pub family_residual: f64,
    pub utt: f64,
}

#[derive(Debug, Serialize)]
pub struct StageOut {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

fn first_integral_out(fi: &FirstIntegral) -> FirstIntegralOut {
    FirstIntegralOut {
        a: print(&fi.a),
        b: print(&fi.b),
        w: print(&fi.w()),
        provenance: fi.provenance.name().to_string(),
        closed_form: fi.closed_form,
    }
}

/// Renders `c1*u1 + c2*u2` with paper-style signs: a negative leading
/// coefficient in u2 prints as a subtraction.
pub fn family_rhs_string(family: &SolutionFamily) -> String {
    match &family.rhs {
        FamilyRhs::Closed { u1, u2 } => {
            let part = |name: &str, u: &sundman_core::Expr| -> (bool, String) {
                if u.is_one() {
                    return (false, name.to_string());
                }
                let (coeff, _) = u.coefficient_split();
                if coeff < num_rational::Rational64::from_integer(0) {
                    let flipped = u.clone().neg();
                    (true, format!("{name}*{}", print(&flipped)))
                } else {
                    (false, format!("{name}*{}", print(u)))
                }
            };
            let (_, first) = part("c1", u1);
            let (neg2, second) = part("c2", u2);
            if neg2 {
                format!("{first} - {second}")
            } else {
                format!("{first} + {second}")
            }
        }
        FamilyRhs::Implicit { .. } => "c1 + c2*mu(x)".to_string(),
    }
}

pub fn solution_out(family: &SolutionFamily) -> SolutionOut {
    let degenerate = match &family.rhs {
        FamilyRhs::Closed { u1, .. } => {
            if u1.is_one() {
                format!("{} = c1", print(&family.lhs))
            } else {
                format!("{} = c1*{}", print(&family.lhs), print(u1))
            }
        }
        FamilyRhs::Implicit { .. } => format!("{} = c1", print(&family.lhs)),
    };
    SolutionOut {
        lhs: print(&family.lhs),
        rhs: family_rhs_string(family),
        mu: family.mu.as_ref().map(print),
        mu_implicit: matches!(family.rhs, FamilyRhs::Implicit { .. }),
        degenerate,
        gamma: family.gamma.as_ref().map(print),
    }
}

/// Assembles the report from a pipeline run; `timings` controls whether
/// per-stage milliseconds appear (off by default so identical inputs give
/// byte-identical reports).
pub fn build_report(
    command: &str,
    echo: ProblemEcho,
    run: &PipelineRun,
    verification: Option<&VerificationReport>,
    verify_failure: Option<String>,
    timings: bool,
) -> Report {
    let mut stages: Vec<StageOut> = run
        .stages
        .iter()
        .map(|s| {
            let (status, detail) = match &s.status {
                StageStatus::Ok => ("ok".to_string(), None),
                StageStatus::Skipped(why) => ("skipped".to_string(), Some(why.clone())),
                StageStatus::Failed(why) => ("failed".to_string(), Some(why.clone())),
            };
            StageOut {
                name: s.name.to_string(),
                status,
                detail,
                millis: timings.then_some(s.millis),
            }
        })
        .collect();
    if let Some(why) = &verify_failure {
        stages.push(StageOut {
            name: "verify".to_string(),
            status: "failed".to_string(),
            detail: Some(why.clone()),
            millis: None,
        });
    } else if verification.is_some() {
        stages.push(StageOut {
            name: "verify".to_string(),
            status: "ok".to_string(),
            detail: None,
            millis: None,
        });
    }

    let not_linearizable = match &run.classification {
        Some(Classification::NotSLinearizable { failing, residual }) => Some(NotLinearizable {
            failing: failing.to_string(),
            residual: *residual,
        }),
        _ => None,
    };

    Report {
        schema_version: 1,
        command: command.to_string(),
        problem: echo,
        classification: run.classification.as_ref().map(|c| c.name().to_string()),
        not_linearizable,
        s_functions: run.s_functions.as_ref().map(|s| SFunctionsOut {
            s1: print(&s.s1),
            s2: print(&s.s2),
            s3: s.s3.as_ref().map(print),
            s4: s.s4.as_ref().map(print),
        }),
        g: run.auxiliary.as_ref().map(|a| print(&a.g)),
        h: run.auxiliary.as_ref().map(|a| print(&a.h)),
        first_integral: run.first_integral.as_ref().map(first_integral_out),
        first_integral_mr: run.first_integral_mr.as_ref().map(first_integral_out),
        invariant: run.invariant.as_ref().map(print),
        transform: run.transform.as_ref().map(|t| TransformOut {
            eta: t.eta.name().to_string(),
            psi: print(&t.psi),
            phi: print(&t.phi),
            point_transformation: t.point_transformation,
        }),
        solution: run.family.as_ref().map(solution_out),
        verification: verification.map(|v| VerificationOut {
            max_drift: v.max_drift,
            max_ode_residual: v.max_ode_residual,
            max_utt: v.max_utt,
            pass: v.all_pass(),
            tolerances: TolerancesOut {
                drift: v.tolerances.drift,
                family_residual: v.tolerances.family_residual,
                utt: v.tolerances.utt,
            },
        }),
        stages,
    }
}
