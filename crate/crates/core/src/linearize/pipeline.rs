//! End-to-end orchestration with per-stage status, shared by the CLI and
//! the geodesics application.

use super::{
    build_first_integral, build_first_integral_mr, build_transform, general_solution,
    reduce_first_order, AuxiliaryData, Classification, EtaTag, FirstIntegral,
    LinearizeError, OdeQuad, SFunctions, SolutionFamily, SundmanTransform,
};
use crate::expr::{Expr, SampleBox, DEFAULT_TOL};

/// How far to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Classify,
    Criterion,
    Integral,
    Transform,
    Solve,
    Verify,
}

impl Stage {
    pub fn from_command(cmd: &str) -> Option<Stage> {
        Some(match cmd {
            "classify" => Stage::Classify,
            "criterion" => Stage::Criterion,
            "integral" => Stage::Integral,
            "transform" => Stage::Transform,
            "solve" => Stage::Solve,
            "verify" | "all" => Stage::Verify,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageStatus {
    Ok,
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct StageRecord {
    pub name: &'static str,
    pub status: StageStatus,
    pub millis: u128,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub sample_box: SampleBox,
    pub tol: f64,
    pub g_ansatz_extra: Vec<Expr>,
    pub eta_catalog: Vec<EtaTag>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            sample_box: SampleBox::new(),
            tol: DEFAULT_TOL,
            g_ansatz_extra: Vec::new(),
            eta_catalog: EtaTag::CATALOG.to_vec(),
        }
    }
}

/// Everything the pipeline produced, stage by stage. Stages not reached
/// (either past the requested stage or blocked by a failure) stay `None`.
#[derive(Debug, Clone, Default)]
pub struct PipelineRun {
    pub s_functions: Option<SFunctions>,
    pub classification: Option<Classification>,
    pub auxiliary: Option<AuxiliaryData>,
    pub first_integral: Option<FirstIntegral>,
    pub first_integral_mr: Option<FirstIntegral>,
    pub invariant: Option<Expr>,
    pub transform: Option<SundmanTransform>,
    pub family: Option<SolutionFamily>,
    pub stages: Vec<StageRecord>,
    /// First hard error, if any.
    pub error: Option<LinearizeError>,
}

impl PipelineRun {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

macro_rules! stage {
    ($run:expr, $name:literal, $body:expr) => {{
        let started = std::time::Instant::now();
        let outcome = $body;
        let status = match &outcome {
            Ok(_) => StageStatus::Ok,
            Err(e) => StageStatus::Failed(e.to_string()),
        };
        $run.stages.push(StageRecord {
            name: $name,
            status,
            millis: started.elapsed().as_millis(),
        });
        match outcome {
            Ok(v) => v,
            Err(e) => {
                $run.error = Some(e);
                return $run;
            }
        }
    }};
}

/// Runs the pipeline up to `upto`. Classification outcomes are not errors:
/// a NotSLinearizable equation yields a successful run whose later stages
/// are skipped.
pub fn run_pipeline(ode: &OdeQuad, options: &PipelineOptions, upto: Stage) -> PipelineRun {
    let mut run = PipelineRun::default();
    let b = &options.sample_box;

    let s = stage!(run, "s-functions", super::compute_s_functions(ode, b));
    run.s_functions = Some(s.clone());
    let cls = stage!(
        run,
        "classify",
        super::sfunctions::classify_from(&s, b, options.tol)
    );
    run.classification = Some(cls.clone());
    if upto == Stage::Classify {
        return run;
    }
    if !cls.is_linearizable() {
        run.stages.push(StageRecord {
            name: "criterion",
            status: StageStatus::Skipped("not S-linearizable".into()),
            millis: 0,
        });
        return run;
    }

    let aux = stage!(
        run,
        "criterion",
        super::criterion::solve_auxiliary_g_tol(ode, &cls, b, &options.g_ansatz_extra, options.tol)
    );
    run.auxiliary = Some(aux.clone());
    if upto == Stage::Criterion {
        return run;
    }

    let fi = stage!(run, "first-integral", build_first_integral(ode, &aux, b));
    run.first_integral = Some(fi.clone());
    // The independent Muriel-Romero construction is a cross-check; its
    // failure is recorded but does not block the pipeline.
    {
        let started = std::time::Instant::now();
        match build_first_integral_mr(ode, &aux, b) {
            Ok(mr) => {
                run.first_integral_mr = Some(mr);
                run.stages.push(StageRecord {
                    name: "first-integral-mr",
                    status: StageStatus::Ok,
                    millis: started.elapsed().as_millis(),
                });
            }
            Err(e) => run.stages.push(StageRecord {
                name: "first-integral-mr",
                status: StageStatus::Failed(e.to_string()),
                millis: started.elapsed().as_millis(),
            }),
        }
    }
    if upto == Stage::Integral {
        return run;
    }

    let invariant = stage!(run, "reduce", reduce_first_order(&fi, b));
    run.invariant = Some(invariant.clone());
    let st = stage!(
        run,
        "transform",
        build_transform(&fi, &invariant, &options.eta_catalog, b)
    );
    run.transform = Some(st.clone());
    if upto == Stage::Transform {
        return run;
    }

    let family = stage!(run, "solve", general_solution(&st, b));
    run.family = Some(family);
    run
}
