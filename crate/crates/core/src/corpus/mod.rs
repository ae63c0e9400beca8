//! The reference problem corpus: the worked examples, the geodesic catalog,
//! a negative control, and seeded random equations generated forward from a
//! known point transformation. Shared by integration tests, the acceptance
//! suite and the benchmarks.

use crate::expr::{parse, Expr, SampleBox, SplitMix64};
use crate::geodesics::{geodesic_ode, Profile};
use crate::linearize::{ode_from_point_transform, OdeQuad};

/// Expected classification for a corpus entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Case1,
    Case2,
    NotLinearizable,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub ode: OdeQuad,
    pub sample_box: SampleBox,
    pub expected: Expected,
}

fn entry(name: &str, ode: OdeQuad, sample_box: SampleBox, expected: Expected) -> CorpusEntry {
    CorpusEntry {
        name: name.to_string(),
        ode,
        sample_box,
        expected,
    }
}

fn default_box() -> SampleBox {
    SampleBox::new().with_var("x", 0.3, 1.7).with_var("y", 0.3, 1.7)
}

/// The variable frequency oscillator y'' + y y'^2 = 0.
pub fn example1() -> CorpusEntry {
    entry(
        "oscillator",
        OdeQuad::new(Expr::int(0), Expr::int(0), Expr::var("y")).unwrap(),
        default_box(),
        Expected::Case1,
    )
}

/// y'' - (tan y + 1/y) y'^2 + (1/x - tan y/(x y)) y' - tan y / x^2 = 0.
pub fn example2() -> CorpusEntry {
    entry(
        "tan-equation",
        OdeQuad::new(
            parse("-tan(y)/x^2").unwrap(),
            parse("1/x - tan(y)/(x*y)").unwrap(),
            parse("-(tan(y) + 1/y)").unwrap(),
        )
        .unwrap(),
        SampleBox::new().with_var("x", 0.3, 1.7).with_var("y", 0.3, 1.3),
        Expected::Case2,
    )
}

/// Negative control y'' + y^2 = 0 (S2 = 2).
pub fn negative_quadratic() -> CorpusEntry {
    entry(
        "quadratic-rhs",
        OdeQuad::new(parse("y^2").unwrap(), Expr::int(0), Expr::int(0)).unwrap(),
        default_box(),
        Expected::NotLinearizable,
    )
}

/// Geodesic equations for the named profiles.
pub fn geodesic_entries() -> Vec<CorpusEntry> {
    ["cone", "plane", "sphere", "conic", "hyperboloid", "pseudosphere"]
        .iter()
        .map(|name| {
            let profile = Profile::by_name(name).expect("catalog name");
            entry(
                &format!("geodesic-{name}"),
                geodesic_ode(&profile).expect("geodesic ode"),
                profile.sample_box.clone(),
                Expected::Case1,
            )
        })
        .collect()
}

/// Random Case-1 equations built forward from a point transformation
/// (psi, phi): the free particle pulled back through u = psi, dt = phi dx is
/// S-linearizable by construction. The generator pool keeps every piece
/// inside the rule-based integrator's reach.
pub fn random_case1(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 64 {
        attempts += 1;
        let pick = rng.next_u64() as usize;
        let m = 1 + pick % 3; // exponent on x in psi
        let k = (rng.next_u64() as usize) % 2; // 1/x^k time scale
        let family = (rng.next_u64() as usize) % 2;
        let (psi_text, phi_text) = match family {
            0 => (format!("y*x^{m}"), format!("1/x^{k}")),
            _ => {
                let r = [1, 2][(rng.next_u64() as usize) % 2];
                (format!("exp({r}*y)*x^{m}"), format!("1/x^{k}"))
            }
        };
        let psi = parse(&psi_text).expect("generator parses");
        let phi = parse(&phi_text).expect("generator parses");
        let Ok(ode) = ode_from_point_transform(&psi, &phi) else {
            continue;
        };
        let name = format!("random-case1-{}(psi={psi_text},phi={phi_text})", out.len());
        out.push(entry(&name, ode, default_box(), Expected::Case1));
    }
    out
}

/// The full corpus: 8 worked equations, the negative control and three
/// seeded random constructions.
pub fn full_corpus() -> Vec<CorpusEntry> {
    let mut out = vec![example1(), example2()];
    out.extend(geodesic_entries());
    out.push(negative_quadratic());
    out.extend(random_case1(0x5EED42, 3));
    out
}
