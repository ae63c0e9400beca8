//! Geodesics on surfaces of revolution as a single second-order ODE.
//!
//! Revolving the profile curve (f(y), g(y)) about an axis and eliminating
//! the parameter turns the geodesic system into
//! y'' - 2 (f'/f) y'^2 - f' f = 0, which is exactly the quadratic class the
//! linearization pipeline handles. For constant-curvature profiles the
//! auxiliary criterion collapses to g'' + g'^2 + W = 0 with the constant
//! W = f'^2 - f f'', and the whole catalog solves in closed form.

use crate::expr::{
    differentiate, evaluate, simplify, Expr, SampleBox, SplitMix64, DEFAULT_TOL,
};
use crate::linearize::{
    run_pipeline, LinearizeError, OdeQuad, PipelineOptions, PipelineRun, Stage,
};
use crate::verify::{verify_run, VerificationReport, VerifyError, VerifyTolerances};

/// Radius function of a profile curve, with a working box that avoids the
/// profile's own singular set.
#[derive(Debug, Clone)]
pub struct Profile {
    pub name: String,
    /// f(y), the distance from the rotation axis.
    pub f: Expr,
    pub sample_box: SampleBox,
    pub expected_curvature: Option<f64>,
}

/// Named profiles reproducing the constant-curvature catalog.
pub const PROFILE_NAMES: &[&str] = &[
    "cone",
    "plane",
    "sphere",
    "conic",
    "hyperboloid",
    "pseudosphere",
];

impl Profile {
    pub fn by_name(name: &str) -> Option<Profile> {
        let default_box = SampleBox::new().with_var("x", 0.3, 1.7).with_var("y", 0.3, 1.7);
        let (f, sample_box, curvature) = match name {
            "cone" => (Expr::var("y"), default_box, Some(0.0)),
            "plane" => (
                Expr::arb("b").add(Expr::var("y")),
                default_box,
                Some(0.0),
            ),
            "sphere" => (
                Expr::func(crate::expr::Func::Sin, Expr::var("y")),
                SampleBox::new().with_var("x", 0.3, 1.7).with_var("y", 0.3, 1.3),
                Some(1.0),
            ),
            "conic" => (
                Expr::func(crate::expr::Func::Sinh, Expr::var("y")),
                default_box,
                Some(-1.0),
            ),
            "hyperboloid" => (
                Expr::func(crate::expr::Func::Cosh, Expr::var("y")),
                default_box,
                Some(-1.0),
            ),
            "pseudosphere" => (
                Expr::func(crate::expr::Func::Exp, Expr::var("y")),
                SampleBox::new()
                    .with_var("x", 0.3, 1.7)
                    .with_var("y", -1.7, -0.3),
                Some(-1.0),
            ),
            _ => return None,
        };
        Some(Profile {
            name: name.to_string(),
            f,
            sample_box,
            expected_curvature: curvature,
        })
    }

    /// A custom radius function; the default box is used.
    pub fn custom(name: &str, f: Expr, sample_box: SampleBox) -> Profile {
        Profile {
            name: name.to_string(),
            f,
            sample_box,
            expected_curvature: None,
        }
    }

    /// Max of f'^2 - 1 over the box: non-positive iff the unit-speed
    /// parameterization g' = sqrt(1 - f'^2) exists there. The hyperbolic
    /// profiles violate this; only their intrinsic ODE is meaningful.
    pub fn unit_speed_defect(&self) -> Result<f64, LinearizeError> {
        let fp = differentiate(&self.f, "y")?;
        let mut rng = SplitMix64::new(self.sample_box.seed ^ 0x5eed);
        let (lo, hi) = self.sample_box.interval("y");
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..64 {
            let p = self
                .sample_box
                .base_point()
                .with("y", rng.in_range(lo, hi));
            if let Ok(v) = evaluate(&fp, &p) {
                worst = worst.max(v * v - 1.0);
            }
        }
        Ok(worst)
    }
}

/// The geodesic equation y'' - 2 (f'/f) y'^2 - f' f = 0 as an [`OdeQuad`]:
/// F2 = -2 f'/f, F1 = 0, F = -f' f.
pub fn geodesic_ode(profile: &Profile) -> Result<OdeQuad, LinearizeError> {
    let fp = differentiate(&profile.f, "y")?;
    let f2 = simplify(
        &fp.clone()
            .mul(Expr::int(-2))
            .mul(profile.f.clone().pow(Expr::int(-1))),
    );
    let f = simplify(&fp.mul(profile.f.clone()).neg());
    OdeQuad::new(f, Expr::int(0), f2)
}

/// Gaussian curvature of the revolved surface for a unit-speed profile:
/// K = -f''/f, sampled over the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curvature {
    Constant(f64),
    NonConstant { spread: f64 },
}

pub fn profile_curvature(profile: &Profile) -> Result<Curvature, LinearizeError> {
    let fpp = differentiate(&differentiate(&profile.f, "y")?, "y")?;
    let k = simplify(
        &fpp.neg()
            .mul(profile.f.clone().pow(Expr::int(-1))),
    );
    sampled_constant(&k, &profile.sample_box)
}

/// The constant W = f'^2 - f f'' that the criterion reduces to
/// (g'' + g'^2 + W = 0); equals 1 for the cone/plane/sphere/conic group.
pub fn criterion_constant(profile: &Profile) -> Result<Curvature, LinearizeError> {
    let fp = differentiate(&profile.f, "y")?;
    let fpp = differentiate(&fp, "y")?;
    let w = simplify(
        &fp.clone()
            .pow(Expr::int(2))
            .sub(profile.f.clone().mul(fpp)),
    );
    sampled_constant(&w, &profile.sample_box)
}

fn sampled_constant(e: &Expr, sample_box: &SampleBox) -> Result<Curvature, LinearizeError> {
    let mut rng = SplitMix64::new(sample_box.seed ^ 0xcafe);
    let (lo, hi) = sample_box.interval("y");
    let mut values = Vec::new();
    for _ in 0..64 {
        let p = sample_box.base_point().with("y", rng.in_range(lo, hi));
        if let Ok(v) = evaluate(e, &p) {
            values.push(v);
        }
    }
    if values.len() < 8 {
        return Err(LinearizeError::ZeroTest(
            crate::expr::ZeroTestError::AllPointsSingular {
                singular: 64 - values.len(),
                total: 64,
            },
        ));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (min + max);
    if max - min <= DEFAULT_TOL * (1.0 + mid.abs()) {
        Ok(Curvature::Constant(mid))
    } else {
        Ok(Curvature::NonConstant { spread: max - min })
    }
}

/// Full pipeline output for one profile.
#[derive(Debug, Clone)]
pub struct GeodesicSolution {
    pub profile: Profile,
    pub ode: OdeQuad,
    pub curvature: Curvature,
    pub criterion_constant: Curvature,
    pub unit_speed_defect: f64,
    pub run: PipelineRun,
    pub report: Option<VerificationReport>,
}

/// Runs classification, the g-search, first integrals, the transform and
/// the solution family on the geodesic ODE, then verifies numerically.
pub fn solve_geodesics(profile: &Profile) -> Result<GeodesicSolution, VerifyError> {
    let ode = geodesic_ode(profile)?;
    let options = PipelineOptions {
        sample_box: profile.sample_box.clone(),
        ..PipelineOptions::default()
    };
    let run = run_pipeline(&ode, &options, Stage::Solve);
    let report = if run.family.is_some() {
        Some(verify_run(
            &ode,
            &run,
            &profile.sample_box,
            VerifyTolerances::default(),
            1e-3,
            500,
        )?)
    } else {
        None
    };
    Ok(GeodesicSolution {
        curvature: profile_curvature(profile)?,
        criterion_constant: criterion_constant(profile)?,
        unit_speed_defect: profile.unit_speed_defect()?,
        profile: profile.clone(),
        ode,
        run,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn geodesic_odes_match_catalog() {
        let sphere = Profile::by_name("sphere").unwrap();
        let ode = geodesic_ode(&sphere).unwrap();
        assert_eq!(ode.f2, simplify(&parse("-2*cot(y)").unwrap()));
        assert_eq!(ode.f, simplify(&parse("-sin(y)*cos(y)").unwrap()));
        assert!(ode.f1.is_zero());

        let pseudo = Profile::by_name("pseudosphere").unwrap();
        let ode = geodesic_ode(&pseudo).unwrap();
        assert_eq!(ode.f2, Expr::int(-2));
        assert_eq!(ode.f, simplify(&parse("-exp(2*y)").unwrap()));

        let hyper = Profile::by_name("hyperboloid").unwrap();
        let ode = geodesic_ode(&hyper).unwrap();
        assert_eq!(ode.f2, simplify(&parse("-2*sinh(y)/cosh(y)").unwrap()));
        assert_eq!(ode.f, simplify(&parse("-cosh(y)*sinh(y)").unwrap()));
    }

    #[test]
    fn curvatures() {
        for (name, want) in [
            ("sphere", 1.0),
            ("cone", 0.0),
            ("plane", 0.0),
            ("conic", -1.0),
            ("hyperboloid", -1.0),
            ("pseudosphere", -1.0),
        ] {
            let p = Profile::by_name(name).unwrap();
            match profile_curvature(&p).unwrap() {
                Curvature::Constant(k) => {
                    assert!((k - want).abs() <= 1e-9, "{name}: K = {k}, want {want}")
                }
                other => panic!("{name}: expected constant curvature, got {other:?}"),
            }
        }
    }

    #[test]
    fn criterion_constants() {
        for (name, want) in [
            ("cone", 1.0),
            ("plane", 1.0),
            ("sphere", 1.0),
            ("conic", 1.0),
            ("hyperboloid", -1.0),
            ("pseudosphere", 0.0),
        ] {
            let p = Profile::by_name(name).unwrap();
            match criterion_constant(&p).unwrap() {
                Curvature::Constant(w) => {
                    assert!((w - want).abs() <= 1e-9, "{name}: W = {w}, want {want}")
                }
                other => panic!("{name}: expected constant W, got {other:?}"),
            }
        }
    }

    #[test]
    fn nonconstant_curvature_detected() {
        let p = Profile::custom(
            "paraboloid-ish",
            parse("y^2 + 1").unwrap(),
            SampleBox::new().with_var("x", 0.3, 1.7).with_var("y", 0.3, 1.7),
        );
        assert!(matches!(
            profile_curvature(&p).unwrap(),
            Curvature::NonConstant { .. }
        ));
    }

    #[test]
    fn unit_speed_defects() {
        // sine profile embeds; hyperbolic ones do not
        let sphere = Profile::by_name("sphere").unwrap();
        assert!(sphere.unit_speed_defect().unwrap() <= 0.0);
        let pseudo = Profile::by_name("pseudosphere").unwrap();
        assert!(pseudo.unit_speed_defect().unwrap() <= 0.0);
        let conic = Profile::by_name("conic").unwrap();
        assert!(conic.unit_speed_defect().unwrap() > 0.0);
    }
}
