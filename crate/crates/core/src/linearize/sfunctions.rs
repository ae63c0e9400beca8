//! S-functions and the classification alternative.

use super::{Classification, LinearizeError, OdeQuad, SFunctions};
use crate::expr::{differentiate, is_identically_zero, simplify, Expr, SampleBox, DEFAULT_TOL};

/// S1 = F1_y - 2 F2_x and
/// S2 = (F F2 + F_y)_y + (F2_x - F1_y)_x + (F2_x - F1_y) F1.
/// S3 and S4 are constructed only when S1 is not identically zero:
/// S3 = (S2/S1)_y - (F2_x - F1_y),
/// S4 = (S2/S1)_x + (S2/S1)^2 + F1 (S2/S1) + F F2 + F_y.
pub fn compute_s_functions(
    ode: &OdeQuad,
    sample_box: &SampleBox,
) -> Result<SFunctions, LinearizeError> {
    let f1_y = differentiate(&ode.f1, "y")?;
    let f2_x = differentiate(&ode.f2, "x")?;
    let f_y = differentiate(&ode.f, "y")?;

    let s1 = simplify(&f1_y.clone().sub(f2_x.clone().mul(Expr::int(2))));

    let d = f2_x.clone().sub(f1_y); // F2_x - F1_y
    let ff2_fy = ode.f.clone().mul(ode.f2.clone()).add(f_y); // F F2 + F_y
    let s2 = simplify(
        &differentiate(&ff2_fy, "y")?
            .add(differentiate(&d, "x")?)
            .add(d.clone().mul(ode.f1.clone())),
    );

    let (s1_zero, _) = is_identically_zero(&s1, sample_box, DEFAULT_TOL)?;
    let (s3, s4) = if s1_zero {
        (None, None)
    } else {
        let ratio = simplify(&s2.clone().mul(s1.clone().pow(Expr::int(-1))));
        let s3 = simplify(&differentiate(&ratio, "y")?.sub(d));
        let s4 = simplify(
            &differentiate(&ratio, "x")?
                .add(ratio.clone().pow(Expr::int(2)))
                .add(ode.f1.clone().mul(ratio))
                .add(ff2_fy_of(ode)?),
        );
        (Some(s3), Some(s4))
    };
    Ok(SFunctions { s1, s2, s3, s4 })
}

fn ff2_fy_of(ode: &OdeQuad) -> Result<Expr, LinearizeError> {
    Ok(ode
        .f
        .clone()
        .mul(ode.f2.clone())
        .add(differentiate(&ode.f, "y")?))
}

/// The classification alternative: Case1 when S1 = S2 = 0, Case2 when
/// S1 != 0 but S3 = S4 = 0, otherwise not S-linearizable with the failing
/// function and its worst residual as evidence.
pub fn classify(ode: &OdeQuad, sample_box: &SampleBox) -> Result<Classification, LinearizeError> {
    let s = compute_s_functions(ode, sample_box)?;
    classify_from(&s, sample_box, DEFAULT_TOL)
}

/// Classification from precomputed S-functions at an explicit tolerance.
pub(crate) fn classify_from(
    s: &SFunctions,
    sample_box: &SampleBox,
    tol: f64,
) -> Result<Classification, LinearizeError> {
    let (s1_zero, _) = is_identically_zero(&s.s1, sample_box, tol)?;
    if s1_zero {
        let (s2_zero, ev) = is_identically_zero(&s.s2, sample_box, tol)?;
        if s2_zero {
            return Ok(Classification::Case1);
        }
        return Ok(Classification::NotSLinearizable {
            failing: "S2",
            residual: ev.residual,
        });
    }
    let s3 = s.s3.as_ref().expect("S3 exists when S1 != 0");
    let s4 = s.s4.as_ref().expect("S4 exists when S1 != 0");
    let (s3_zero, ev3) = is_identically_zero(s3, sample_box, tol)?;
    if !s3_zero {
        return Ok(Classification::NotSLinearizable {
            failing: "S3",
            residual: ev3.residual,
        });
    }
    let (s4_zero, ev4) = is_identically_zero(s4, sample_box, tol)?;
    if !s4_zero {
        return Ok(Classification::NotSLinearizable {
            failing: "S4",
            residual: ev4.residual,
        });
    }
    Ok(Classification::Case2)
}
