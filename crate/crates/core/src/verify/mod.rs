//! Numeric ground truth for every symbolic claim: trajectory integration,
//! first-integral drift, solution-family residuals and the u_tt linearity
//! check under the Sundman transformation.

use crate::expr::{
    differentiate, evaluate, EvalError, EvalPoint, Expr, SampleBox, SplitMix64,
};
use crate::linearize::{
    FamilyRhs, FirstIntegral, LinearizeError, OdeQuad, SolutionFamily, SundmanTransform,
};
use std::fmt;

/// RK4 samples (x, y, y') at uniform x spacing.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, f64, f64)>,
    pub step: f64,
    pub init: (f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyError {
    /// |y''| exceeded 1e8 or evaluation failed; carries the index of the
    /// last good sample.
    SingularEncounter { last_good: usize },
    /// step outside (0, 0.01].
    BadStep(f64),
    /// More than 10% of samples fell outside the domain of A, B.
    Domain { failures: usize, total: usize },
    /// phi changed sign along the trajectory, so t is not a coordinate.
    NonMonotoneT,
    /// Could not place enough locus points or psi_y vanished.
    ImplicitSolveFailure(String),
    Eval(EvalError),
    Linearize(String),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::SingularEncounter { last_good } => {
                write!(f, "singular encounter after sample {last_good}")
            }
            VerifyError::BadStep(h) => write!(f, "step {h} outside (0, 0.01]"),
            VerifyError::Domain { failures, total } => {
                write!(f, "{failures} of {total} samples outside domain")
            }
            VerifyError::NonMonotoneT => write!(f, "phi changes sign along the trajectory"),
            VerifyError::ImplicitSolveFailure(why) => write!(f, "implicit solve failed: {why}"),
            VerifyError::Eval(e) => write!(f, "{e}"),
            VerifyError::Linearize(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for VerifyError {}

impl From<EvalError> for VerifyError {
    fn from(e: EvalError) -> Self {
        VerifyError::Eval(e)
    }
}

impl From<LinearizeError> for VerifyError {
    fn from(e: LinearizeError) -> Self {
        VerifyError::Linearize(e.to_string())
    }
}

const SINGULAR_ACCEL: f64 = 1e8;

/// Classical fixed-step RK4 on the first-order system (y, y') with
/// y'' = -(F2 y'^2 + F1 y' + F). Aborts cleanly at singular approach.
pub fn integrate_ode(
    ode: &OdeQuad,
    init: (f64, f64, f64),
    step: f64,
    n: usize,
    sample_box: &SampleBox,
) -> Result<Trajectory, VerifyError> {
    if !(step > 0.0 && step <= 0.01) {
        return Err(VerifyError::BadStep(step));
    }
    let template = sample_box.base_point();
    let accel = |x: f64, y: f64, p: f64| -> Result<f64, VerifyError> {
        let mut point = template.clone();
        point.set("x", x);
        point.set("y", y);
        let a = ode
            .acceleration(&point, p)
            .map_err(VerifyError::Eval)?;
        if a.abs() > SINGULAR_ACCEL {
            return Err(VerifyError::Eval(EvalError::NonFinite));
        }
        Ok(a)
    };

    let (x0, y0, p0) = init;
    accel(x0, y0, p0).map_err(|_| VerifyError::SingularEncounter { last_good: 0 })?;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push((x0, y0, p0));
    let (mut x, mut y, mut p) = (x0, y0, p0);
    for _ in 0..n {
        let result = (|| -> Result<(f64, f64), VerifyError> {
            let k1y = p;
            let k1p = accel(x, y, p)?;
            let k2y = p + 0.5 * step * k1p;
            let k2p = accel(x + 0.5 * step, y + 0.5 * step * k1y, p + 0.5 * step * k1p)?;
            let k3y = p + 0.5 * step * k2p;
            let k3p = accel(x + 0.5 * step, y + 0.5 * step * k2y, p + 0.5 * step * k2p)?;
            let k4y = p + step * k3p;
            let k4p = accel(x + step, y + step * k3y, p + step * k3p)?;
            Ok((
                y + step / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
                p + step / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            ))
        })();
        match result {
            Ok((ny, np)) if ny.is_finite() && np.is_finite() => {
                x += step;
                y = ny;
                p = np;
                samples.push((x, y, p));
            }
            _ => {
                return Err(VerifyError::SingularEncounter {
                    last_good: samples.len() - 1,
                })
            }
        }
    }
    Ok(Trajectory {
        samples,
        step,
        init,
    })
}

/// Max relative drift of w = A y' + B along the trajectory:
/// max_k |w_k - w_0| / (1 + |w_0|).
pub fn first_integral_drift(
    fi: &FirstIntegral,
    traj: &Trajectory,
    sample_box: &SampleBox,
) -> Result<f64, VerifyError> {
    let template = sample_box.base_point();
    let mut w0: Option<f64> = None;
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for &(x, y, p) in &traj.samples {
        let mut point = template.clone();
        point.set("x", x);
        point.set("y", y);
        let w = match (evaluate(&fi.a, &point), evaluate(&fi.b, &point)) {
            (Ok(a), Ok(b)) => a * p + b,
            _ => {
                failures += 1;
                continue;
            }
        };
        match w0 {
            None => w0 = Some(w),
            Some(base) => worst = worst.max((w - base).abs() / (1.0 + base.abs())),
        }
    }
    let total = traj.samples.len();
    if failures * 10 > total {
        return Err(VerifyError::Domain { failures, total });
    }
    if w0.is_none() {
        return Err(VerifyError::Domain { failures, total });
    }
    Ok(worst)
}

/// Max scaled ODE residual of the implicit family over sampled constants
/// and locus points: the family is solved for y numerically, y' and y''
/// come from implicit differentiation, and the residual is judged relative
/// to the magnitude of the ODE terms.
pub fn solution_family_residual(
    ode: &OdeQuad,
    family: &SolutionFamily,
    sample_box: &SampleBox,
) -> Result<f64, VerifyError> {
    let defect = match family.defect() {
        Some(d) => d,
        None => family.degenerate_defect(),
    };
    let constant_sets = fit_family_constants(family, sample_box);
    if constant_sets.is_empty() {
        return Err(VerifyError::ImplicitSolveFailure(
            "could not fit family constants through the box".into(),
        ));
    }
    let dx = differentiate(&defect, "x").map_err(LinearizeError::from)?;
    let dy = differentiate(&defect, "y").map_err(LinearizeError::from)?;
    let dxx = differentiate(&dx, "x").map_err(LinearizeError::from)?;
    let dxy = differentiate(&dx, "y").map_err(LinearizeError::from)?;
    let dyy = differentiate(&dy, "y").map_err(LinearizeError::from)?;

    let (x_lo, x_hi) = sample_box.interval("x");
    let (y_lo, y_hi) = sample_box.interval("y");
    let mut worst: f64 = 0.0;
    let mut locus_points = 0usize;
    for &(c1, c2) in &constant_sets {
        for i in 0..24 {
            let x = x_lo + (x_hi - x_lo) * (i as f64 + 0.5) / 24.0;
            let mut point = sample_box.base_point();
            point.set("x", x);
            point.set("c1", c1);
            point.set("c2", c2);
            let Some(y) = solve_for_y(&defect, &point, y_lo, y_hi) else {
                continue;
            };
            point.set("y", y);
            let den = match evaluate(&dy, &point) {
                Ok(v) if v.abs() > 1e-8 => v,
                _ => continue,
            };
            let (vdx, vdxx, vdxy, vdyy) = match (
                evaluate(&dx, &point),
                evaluate(&dxx, &point),
                evaluate(&dxy, &point),
                evaluate(&dyy, &point),
            ) {
                (Ok(a), Ok(b), Ok(c), Ok(d)) => (a, b, c, d),
                _ => continue,
            };
            let yp = -vdx / den;
            let ypp = -(vdxx + 2.0 * vdxy * yp + vdyy * yp * yp) / den;
            let (f2, f1, f) = match (
                evaluate(&ode.f2, &point),
                evaluate(&ode.f1, &point),
                evaluate(&ode.f, &point),
            ) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => continue,
            };
            let terms = [ypp, f2 * yp * yp, f1 * yp, f];
            let residual: f64 = terms.iter().sum();
            let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            worst = worst.max(residual.abs() / (1.0 + scale));
            locus_points += 1;
        }
    }
    if locus_points < 12 {
        return Err(VerifyError::ImplicitSolveFailure(format!(
            "only {locus_points} locus points found"
        )));
    }
    Ok(worst)
}

/// Chooses (c1, c2) pairs so that the family locus passes through pinned
/// points of the sample box: the closed case solves the 2x2 linear system
/// lhs(x, y) = c1 u1(x) + c2 u2(x) at two pins, the implicit (c2 = 0) case
/// sets c1 = lhs at one pin. This guarantees root-finding has a locus to
/// find regardless of the family's value range.
fn fit_family_constants(family: &SolutionFamily, sample_box: &SampleBox) -> Vec<(f64, f64)> {
    let (x_lo, x_hi) = sample_box.interval("x");
    let (y_lo, y_hi) = sample_box.interval("y");
    let abs = |(rx, ry): (f64, f64)| {
        (
            x_lo + rx * (x_hi - x_lo),
            y_lo + ry * (y_hi - y_lo),
        )
    };
    let eval_at = |e: &Expr, x: f64, y: f64| -> Option<f64> {
        let mut p = sample_box.base_point();
        p.set("x", x);
        p.set("y", y);
        evaluate(e, &p).ok()
    };
    let mut out = Vec::new();
    match &family.rhs {
        FamilyRhs::Closed { u1, u2 } => {
            let pin_pairs = [
                ((0.25, 0.35), (0.70, 0.60)),
                ((0.30, 0.70), (0.75, 0.40)),
                ((0.40, 0.50), (0.80, 0.65)),
            ];
            for (pa, pb) in pin_pairs {
                let (xa, ya) = abs(pa);
                let (xb, yb) = abs(pb);
                let (Some(la), Some(lb)) = (
                    eval_at(&family.lhs, xa, ya),
                    eval_at(&family.lhs, xb, yb),
                ) else {
                    continue;
                };
                let (Some(u1a), Some(u2a), Some(u1b), Some(u2b)) = (
                    eval_at(u1, xa, ya),
                    eval_at(u2, xa, ya),
                    eval_at(u1, xb, yb),
                    eval_at(u2, xb, yb),
                ) else {
                    continue;
                };
                let det = u1a * u2b - u2a * u1b;
                if det.abs() < 1e-9 {
                    continue;
                }
                let c1 = (la * u2b - u2a * lb) / det;
                let c2 = (u1a * lb - la * u1b) / det;
                if c1.is_finite() && c2.is_finite() {
                    out.push((c1, c2));
                }
            }
        }
        FamilyRhs::Implicit { .. } => {
            for pin in [(0.3, 0.4), (0.5, 0.55), (0.7, 0.7)] {
                let (xa, ya) = abs(pin);
                if let Some(la) = eval_at(&family.lhs, xa, ya) {
                    if la.is_finite() {
                        out.push((la, 0.0));
                    }
                }
            }
        }
    }
    out
}

/// Bisection on the family defect in y over sign changes of a scan grid.
fn solve_for_y(defect: &Expr, point: &EvalPoint, y_lo: f64, y_hi: f64) -> Option<f64> {
    let eval_at = |y: f64| -> Option<f64> {
        let mut p = point.clone();
        p.set("y", y);
        evaluate(defect, &p).ok()
    };
    let n = 40;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let y = y_lo + (y_hi - y_lo) * i as f64 / n as f64;
        let Some(v) = eval_at(y) else {
            prev = None;
            continue;
        };
        if v == 0.0 {
            return Some(y);
        }
        if let Some((py, pv)) = prev {
            if pv * v < 0.0 {
                // bisect
                let (mut a, mut fa, mut b) = (py, pv, y);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    let fm = eval_at(m)?;
                    if fm == 0.0 {
                        return Some(m);
                    }
                    if fa * fm < 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                return Some(0.5 * (a + b));
            }
        }
        prev = Some((y, v));
    }
    None
}

/// Accumulates t by trapezoidal quadrature of phi dx along the trajectory,
/// sets u = psi, and returns the largest second difference |u_tt| on the
/// nonuniform t grid. Errors when phi changes sign (t not monotone).
pub fn linearity_check(
    st: &SundmanTransform,
    traj: &Trajectory,
    sample_box: &SampleBox,
) -> Result<f64, VerifyError> {
    let template = sample_box.base_point();
    let mut ts = Vec::with_capacity(traj.samples.len());
    let mut us = Vec::with_capacity(traj.samples.len());
    let mut t = 0.0f64;
    let mut prev_phi: Option<f64> = None;
    for &(x, y, _) in &traj.samples {
        let mut point = template.clone();
        point.set("x", x);
        point.set("y", y);
        let phi = evaluate(&st.phi, &point)?;
        let u = evaluate(&st.psi, &point)?;
        if let Some(prev) = prev_phi {
            if phi == 0.0 || phi.signum() != prev.signum() {
                return Err(VerifyError::NonMonotoneT);
            }
            t += 0.5 * (prev + phi) * traj.step;
        }
        prev_phi = Some(phi);
        ts.push(t);
        us.push(u);
    }
    let mut worst: f64 = 0.0;
    for k in 1..ts.len().saturating_sub(1) {
        let dt_right = ts[k + 1] - ts[k];
        let dt_left = ts[k] - ts[k - 1];
        let span = ts[k + 1] - ts[k - 1];
        if dt_right.abs() < 1e-14 || dt_left.abs() < 1e-14 || span.abs() < 1e-14 {
            continue;
        }
        let slope_right = (us[k + 1] - us[k]) / dt_right;
        let slope_left = (us[k] - us[k - 1]) / dt_left;
        worst = worst.max((2.0 * (slope_right - slope_left) / span).abs());
    }
    Ok(worst)
}

/// Fits w_other = c1 w + c2 on two sample points of (x, y, y') space and
/// verifies the relation on the rest; returns (c1, c2, worst relative
/// error). Independent first-integral constructions must agree this way.
pub fn affine_first_integral_match(
    fi: &FirstIntegral,
    other: &FirstIntegral,
    sample_box: &SampleBox,
) -> Result<(f64, f64, f64), VerifyError> {
    let mut rng = SplitMix64::new(sample_box.seed ^ 0xaff1);
    let (x_lo, x_hi) = sample_box.interval("x");
    let (y_lo, y_hi) = sample_box.interval("y");
    let eval_w = |fi: &FirstIntegral, x: f64, y: f64, p: f64| -> Option<f64> {
        let mut point = sample_box.base_point();
        point.set("x", x);
        point.set("y", y);
        match (evaluate(&fi.a, &point), evaluate(&fi.b, &point)) {
            (Ok(a), Ok(b)) => Some(a * p + b),
            _ => None,
        }
    };
    let mut pairs = Vec::new();
    let mut attempts = 0;
    while pairs.len() < 64 && attempts < 400 {
        attempts += 1;
        let x = rng.in_range(x_lo, x_hi);
        let y = rng.in_range(y_lo, y_hi);
        let p = rng.in_range(-1.5, 1.5);
        if let (Some(w1), Some(w2)) = (eval_w(fi, x, y, p), eval_w(other, x, y, p)) {
            pairs.push((w1, w2));
        }
    }
    if pairs.len() < 64 {
        return Err(VerifyError::Domain {
            failures: attempts - pairs.len(),
            total: attempts,
        });
    }
    // fit on the two most separated of the first three points
    let (wa, va) = pairs[0];
    let (wb, vb) = pairs.iter().skip(1).fold(pairs[1], |best, &(w, v)| {
        if (w - wa).abs() > (best.0 - wa).abs() {
            (w, v)
        } else {
            best
        }
    });
    let denom = wb - wa;
    if denom.abs() < 1e-12 {
        return Err(VerifyError::ImplicitSolveFailure(
            "first integral is constant over the box".into(),
        ));
    }
    let c1 = (vb - va) / denom;
    let c2 = va - c1 * wa;
    let mut worst = 0.0f64;
    for &(w, v) in &pairs {
        let predicted = c1 * w + c2;
        worst = worst.max((predicted - v).abs() / (1.0 + v.abs()));
    }
    Ok((c1, c2, worst))
}

/// Tolerances for [`VerificationReport`]; the linearity bound is looser
/// because second differences on an accumulated grid lose about two digits.
#[derive(Debug, Clone, Copy)]
pub struct VerifyTolerances {
    pub drift: f64,
    pub family_residual: f64,
    pub utt: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances {
            drift: 1e-6,
            family_residual: 1e-8,
            utt: 1e-4,
        }
    }
}

/// Aggregate numeric verdict for one pipeline run.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub max_drift: Option<f64>,
    pub max_ode_residual: Option<f64>,
    pub max_utt: Option<f64>,
    pub drift_pass: Option<bool>,
    pub family_pass: Option<bool>,
    pub linearity_pass: Option<bool>,
    pub tolerances: VerifyTolerances,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        [self.drift_pass, self.family_pass, self.linearity_pass]
            .iter()
            .all(|p| p.unwrap_or(true))
    }
}

/// Picks a trajectory start inside the box that the flow keeps inside for
/// `n` steps; scans a few candidate inits deterministically.
pub fn pick_trajectory(
    ode: &OdeQuad,
    sample_box: &SampleBox,
    step: f64,
    n: usize,
) -> Result<Trajectory, VerifyError> {
    let (x_lo, x_hi) = sample_box.interval("x");
    let (y_lo, y_hi) = sample_box.interval("y");
    let span = step * n as f64;
    let margin = 0.02 * (y_hi - y_lo);
    let mut rng = SplitMix64::new(sample_box.seed ^ 0x7247);
    let mut candidates: Vec<(f64, f64, f64)> = vec![
        (x_lo + 0.05 * (x_hi - x_lo), 0.5 * (y_lo + y_hi), 0.3),
        (x_lo + 0.05 * (x_hi - x_lo), 0.5 * (y_lo + y_hi), -0.3),
        (x_lo + 0.02 * (x_hi - x_lo), y_lo + 0.3 * (y_hi - y_lo), 0.5),
        (x_lo + 0.02 * (x_hi - x_lo), y_hi - 0.3 * (y_hi - y_lo), -0.5),
    ];
    for _ in 0..12 {
        candidates.push((
            rng.in_range(x_lo, (x_hi - span).max(x_lo + 1e-6)),
            rng.in_range(y_lo + 0.2 * (y_hi - y_lo), y_hi - 0.2 * (y_hi - y_lo)),
            rng.in_range(-0.8, 0.8),
        ));
    }
    let mut last_err = VerifyError::SingularEncounter { last_good: 0 };
    for init in candidates {
        if init.0 + span > x_hi {
            continue;
        }
        match integrate_ode(ode, init, step, n, sample_box) {
            Ok(traj) => {
                let inside = traj
                    .samples
                    .iter()
                    .all(|&(_, y, _)| y >= y_lo - margin && y <= y_hi + margin);
                if inside {
                    return Ok(traj);
                }
                last_err = VerifyError::ImplicitSolveFailure(
                    "trajectory escapes the sample box".into(),
                );
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Runs every applicable numeric check against a completed pipeline run.
pub fn verify_run(
    ode: &OdeQuad,
    run: &crate::linearize::PipelineRun,
    sample_box: &SampleBox,
    tolerances: VerifyTolerances,
    step: f64,
    n: usize,
) -> Result<VerificationReport, VerifyError> {
    let mut report = VerificationReport {
        max_drift: None,
        max_ode_residual: None,
        max_utt: None,
        drift_pass: None,
        family_pass: None,
        linearity_pass: None,
        tolerances,
    };
    let traj = if run.first_integral.is_some() || run.transform.is_some() {
        Some(pick_trajectory(ode, sample_box, step, n)?)
    } else {
        None
    };
    if let (Some(fi), Some(traj)) = (&run.first_integral, &traj) {
        let drift = first_integral_drift(fi, traj, sample_box)?;
        report.max_drift = Some(drift);
        report.drift_pass = Some(drift <= tolerances.drift);
    }
    if let Some(family) = &run.family {
        let residual = solution_family_residual(ode, family, sample_box)?;
        report.max_ode_residual = Some(residual);
        report.family_pass = Some(residual <= tolerances.family_residual);
    }
    if let (Some(st), Some(traj)) = (&run.transform, &traj) {
        let utt = linearity_check(st, traj, sample_box)?;
        report.max_utt = Some(utt);
        report.linearity_pass = Some(utt <= tolerances.utt);
    }
    Ok(report)
}
