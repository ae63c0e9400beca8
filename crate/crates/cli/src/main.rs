//! `sundman` — batch front-end for the S-linearization pipeline.
//!
//! Usage:
//!   sundman <classify|criterion|integral|transform|solve|verify|all>
//!           --input problem.json [--output report.json] [--seed N]
//!           [--tol X] [--timings]
//!   sundman geodesic --profile NAME | --radius EXPR [--output ...]
//!   sundman corpus --dir DIR [--timings]
//!
//! Exit codes: 0 success, 1 input error, 2 not S-linearizable,
//! 3 stage failure.

mod problem;
mod report;

use problem::{InputError, LoadedProblem, ProblemFile};
use report::{build_report, Report};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use sundman_core::geodesics::{
    criterion_constant, geodesic_ode, profile_curvature, Curvature, Profile, PROFILE_NAMES,
};
use sundman_core::linearize::{run_pipeline, Classification, PipelineRun, Stage};
use sundman_core::verify::{verify_run, VerificationReport, VerifyTolerances};

const EXIT_INPUT: u8 = 1;
const EXIT_NOT_LINEARIZABLE: u8 = 2;
const EXIT_STAGE_FAILURE: u8 = 3;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let payload = serde_json::json!({
                "error": { "kind": "input", "message": err.0 }
            });
            eprintln!("{}", serde_json::to_string_pretty(&payload).unwrap());
            ExitCode::from(EXIT_INPUT)
        }
    }
}

struct Flags {
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    tol: Option<f64>,
    timings: bool,
    profile: Option<String>,
    radius: Option<String>,
    dir: Option<PathBuf>,
}

fn parse_flags(args: &[String]) -> Result<Flags, InputError> {
    let mut flags = Flags {
        input: None,
        output: None,
        seed: None,
        tol: None,
        timings: false,
        profile: None,
        radius: None,
        dir: None,
    };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let mut take = |what: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| InputError(format!("{what} expects a value")))
        };
        match arg.as_str() {
            "--input" => flags.input = Some(PathBuf::from(take("--input")?)),
            "--output" => flags.output = Some(PathBuf::from(take("--output")?)),
            "--seed" => {
                flags.seed = Some(
                    take("--seed")?
                        .parse()
                        .map_err(|e| InputError(format!("--seed: {e}")))?,
                )
            }
            "--tol" => {
                flags.tol = Some(
                    take("--tol")?
                        .parse()
                        .map_err(|e| InputError(format!("--tol: {e}")))?,
                )
            }
            "--timings" => flags.timings = true,
            "--profile" => flags.profile = Some(take("--profile")?),
            "--radius" => flags.radius = Some(take("--radius")?),
            "--dir" => flags.dir = Some(PathBuf::from(take("--dir")?)),
            other => return Err(InputError(format!("unknown flag `{other}`"))),
        }
    }
    Ok(flags)
}

fn dispatch(args: &[String]) -> Result<u8, InputError> {
    let Some(command) = args.first() else {
        return Err(InputError(
            "usage: sundman <classify|criterion|integral|transform|solve|verify|all|geodesic|corpus> ..."
                .into(),
        ));
    };
    let flags = parse_flags(&args[1..])?;
    match command.as_str() {
        "geodesic" => run_geodesic(&flags),
        "corpus" => run_corpus(&flags),
        cmd => {
            let stage = Stage::from_command(cmd)
                .ok_or_else(|| InputError(format!("unknown command `{cmd}`")))?;
            let input = flags
                .input
                .as_ref()
                .ok_or_else(|| InputError("--input is required".into()))?;
            let loaded = load_problem(input, &flags)?;
            let (report, code) = execute(cmd, stage, &loaded, flags.timings);
            emit(&report, flags.output.as_deref())?;
            Ok(code)
        }
    }
}

fn load_problem(path: &Path, flags: &Flags) -> Result<LoadedProblem, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    file.load(flags.seed, flags.tol)
}

/// Runs the stage prefix and assembles the report plus exit code.
fn execute(command: &str, stage: Stage, loaded: &LoadedProblem, timings: bool) -> (Report, u8) {
    let run = run_pipeline(&loaded.ode, &loaded.options, stage);
    let want_verify = stage == Stage::Verify && run.family.is_some() && !run.failed();
    let (verification, verify_failure) = if want_verify {
        match verify_run(
            &loaded.ode,
            &run,
            &loaded.options.sample_box,
            loaded.tolerances,
            1e-3,
            500,
        ) {
            Ok(rep) => (Some(rep), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let code = exit_code(&run, verification.as_ref(), verify_failure.is_some());
    let report = build_report(
        command,
        clone_echo(&loaded.echo),
        &run,
        verification.as_ref(),
        verify_failure,
        timings,
    );
    (report, code)
}

fn clone_echo(echo: &problem::ProblemEcho) -> problem::ProblemEcho {
    problem::ProblemEcho {
        f: echo.f.clone(),
        f1: echo.f1.clone(),
        f2: echo.f2.clone(),
        r#box: echo.r#box.clone(),
        seed: echo.seed,
    }
}

fn exit_code(
    run: &PipelineRun,
    verification: Option<&VerificationReport>,
    verify_failed: bool,
) -> u8 {
    if run.failed() || verify_failed {
        return EXIT_STAGE_FAILURE;
    }
    if matches!(
        run.classification,
        Some(Classification::NotSLinearizable { .. })
    ) {
        return EXIT_NOT_LINEARIZABLE;
    }
    if let Some(v) = verification {
        if !v.all_pass() {
            return EXIT_STAGE_FAILURE;
        }
    }
    0
}

fn emit(report: &Report, output: Option<&Path>) -> Result<(), InputError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| InputError(format!("serialization: {e}")))?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(serde::Serialize)]
struct GeodesicReport {
    profile: String,
    radius: String,
    curvature: Option<f64>,
    criterion_constant: Option<f64>,
    unit_speed_ok: bool,
    #[serde(flatten)]
    report: Report,
}

fn run_geodesic(flags: &Flags) -> Result<u8, InputError> {
    let profile = match (&flags.profile, &flags.radius) {
        (Some(name), None) => Profile::by_name(name).ok_or_else(|| {
            InputError(format!(
                "unknown profile `{name}`; available: {}",
                PROFILE_NAMES.join(", ")
            ))
        })?,
        (None, Some(expr_text)) => {
            let f = sundman_core::parse(expr_text)
                .map_err(|e| InputError(format!("--radius: {e}")))?;
            let sample_box = sundman_core::SampleBox::new()
                .with_var("x", 0.3, 1.7)
                .with_var("y", 0.3, 1.7);
            Profile::custom("custom", f, sample_box)
        }
        _ => {
            return Err(InputError(
                "geodesic requires exactly one of --profile or --radius".into(),
            ))
        }
    };
    let mut sample_box = profile.sample_box.clone();
    if let Some(seed) = flags.seed {
        sample_box = sample_box.with_seed(seed);
    }
    let profile = Profile {
        sample_box,
        ..profile
    };

    let ode = geodesic_ode(&profile).map_err(|e| InputError(e.to_string()))?;
    let options = sundman_core::linearize::PipelineOptions {
        sample_box: profile.sample_box.clone(),
        ..Default::default()
    };
    let run = run_pipeline(&ode, &options, Stage::Verify);
    let (verification, verify_failure) = if run.family.is_some() && !run.failed() {
        match verify_run(
            &ode,
            &run,
            &profile.sample_box,
            VerifyTolerances::default(),
            1e-3,
            500,
        ) {
            Ok(rep) => (Some(rep), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let code = exit_code(&run, verification.as_ref(), verify_failure.is_some());

    let mut echo_box = std::collections::BTreeMap::new();
    for var in ["x", "y"] {
        echo_box.insert(var.to_string(), profile.sample_box.interval(var));
    }
    let echo = problem::ProblemEcho {
        f: sundman_core::print(&ode.f),
        f1: sundman_core::print(&ode.f1),
        f2: sundman_core::print(&ode.f2),
        r#box: echo_box,
        seed: profile.sample_box.seed,
    };
    let base = build_report(
        "geodesic",
        echo,
        &run,
        verification.as_ref(),
        verify_failure,
        flags.timings,
    );
    let constant_of = |c: Curvature| match c {
        Curvature::Constant(k) => Some(k),
        Curvature::NonConstant { .. } => None,
    };
    let geo = GeodesicReport {
        profile: profile.name.clone(),
        radius: sundman_core::print(&profile.f),
        curvature: profile_curvature(&profile).ok().and_then(constant_of),
        criterion_constant: criterion_constant(&profile).ok().and_then(constant_of),
        unit_speed_ok: profile
            .unit_speed_defect()
            .map(|d| d <= 0.0)
            .unwrap_or(false),
        report: base,
    };
    let mut text = serde_json::to_string_pretty(&geo)
        .map_err(|e| InputError(format!("serialization: {e}")))?;
    text.push('\n');
    match flags.output.as_deref() {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(code)
}

/// Processes every `*.json` problem in a directory, writing
/// `<stem>.report.json` beside each input. A summary line per file goes to
/// stdout. Classification outcomes are data, not failures; the exit code is
/// nonzero only for input errors or stage failures.
fn run_corpus(flags: &Flags) -> Result<u8, InputError> {
    let dir = flags
        .dir
        .as_ref()
        .ok_or_else(|| InputError("corpus requires --dir".into()))?;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| InputError(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "json")
                && !p
                    .file_name()
                    .is_some_and(|n| n.to_string_lossy().ends_with(".report.json"))
        })
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(InputError(format!("no problem files in {}", dir.display())));
    }
    let mut worst = 0u8;
    for path in entries {
        let loaded = match load_problem(&path, flags) {
            Ok(l) => l,
            Err(e) => {
                println!("{}: input error: {}", path.display(), e.0);
                worst = worst.max(EXIT_INPUT);
                continue;
            }
        };
        let (report, code) = execute("all", Stage::Verify, &loaded, flags.timings);
        let out_path = path.with_extension("report.json");
        emit(&report, Some(&out_path))?;
        println!(
            "{}: {} (exit {code}) -> {}",
            path.display(),
            report.classification.as_deref().unwrap_or("unclassified"),
            out_path.display()
        );
        if code == EXIT_STAGE_FAILURE || code == EXIT_INPUT {
            worst = worst.max(code);
        }
    }
    Ok(worst)
}
