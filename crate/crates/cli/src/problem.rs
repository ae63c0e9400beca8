//! Problem-file schema: JSON with expression fields in the CLI grammar.

use serde::Deserialize;
use std::collections::BTreeMap;
use sundman_core::expr::{parse, SampleBox, DEFAULT_SEED};
use sundman_core::linearize::{EtaTag, OdeQuad, PipelineOptions};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema_version: u32,
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "F1")]
    pub f1: String,
    #[serde(rename = "F2")]
    pub f2: String,
    #[serde(default)]
    pub r#box: BTreeMap<String, (f64, f64)>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub options: ProblemOptions,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemOptions {
    /// Zero-test tolerance override.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Sample count override (>= 32).
    #[serde(default)]
    pub samples: Option<usize>,
    /// Additional g(x) ansatz candidates, tried after the built-in catalog.
    #[serde(default)]
    pub g_ansatz: Vec<String>,
    /// Eta catalog override (names from {identity, reciprocal, ln, square}).
    #[serde(default)]
    pub eta_catalog: Option<Vec<String>>,
    /// Verification tolerance overrides.
    #[serde(default)]
    pub drift_tol: Option<f64>,
    #[serde(default)]
    pub family_tol: Option<f64>,
    #[serde(default)]
    pub utt_tol: Option<f64>,
}

pub struct LoadedProblem {
    pub ode: OdeQuad,
    pub options: PipelineOptions,
    pub tolerances: sundman_core::verify::VerifyTolerances,
    /// Canonical echo of the inputs for the report.
    pub echo: ProblemEcho,
}

#[derive(Debug, serde::Serialize)]
pub struct ProblemEcho {
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "F1")]
    pub f1: String,
    #[serde(rename = "F2")]
    pub f2: String,
    pub r#box: BTreeMap<String, (f64, f64)>,
    pub seed: u64,
}

#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl ProblemFile {
    pub fn load(
        &self,
        seed_override: Option<u64>,
        tol_override: Option<f64>,
    ) -> Result<LoadedProblem, InputError> {
        if self.schema_version != 1 {
            return Err(InputError(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        let parse_field = |name: &str, text: &str| {
            parse(text).map_err(|e| InputError(format!("{name}: {e}")))
        };
        let f = parse_field("F", &self.f)?;
        let f1 = parse_field("F1", &self.f1)?;
        let f2 = parse_field("F2", &self.f2)?;
        let ode = OdeQuad::new(f, f1, f2).map_err(|e| InputError(e.to_string()))?;

        let seed = seed_override.or(self.seed).unwrap_or(DEFAULT_SEED);
        let mut sample_box = SampleBox::new().with_seed(seed);
        if let Some(n) = self.options.samples {
            if n < 32 {
                return Err(InputError(format!("samples {n} below the minimum of 32")));
            }
            sample_box = sample_box.with_samples(n);
        }
        let mut echo_box = BTreeMap::new();
        for (var, (lo, hi)) in &self.r#box {
            if !(lo < hi) {
                return Err(InputError(format!("box interval for {var} is empty")));
            }
            sample_box = sample_box.with_var(var, *lo, *hi);
            echo_box.insert(var.clone(), (*lo, *hi));
        }
        for var in ["x", "y"] {
            if !echo_box.contains_key(var) {
                let (lo, hi) = sample_box.interval(var);
                sample_box = sample_box.with_var(var, lo, hi);
                echo_box.insert(var.to_string(), (lo, hi));
            }
        }

        let tol = tol_override.or(self.options.tol).unwrap_or(1e-9);
        if !(tol > 0.0) {
            return Err(InputError(format!("tolerance {tol} must be positive")));
        }
        let mut g_extra = Vec::new();
        for text in &self.options.g_ansatz {
            let g = parse_field("g_ansatz", text)?;
            let vars = g.free_variables();
            if vars.iter().any(|v| v != "x") {
                return Err(InputError(format!("g ansatz `{text}` is not x-only")));
            }
            g_extra.push(g);
        }
        let eta_catalog = match &self.options.eta_catalog {
            None => EtaTag::CATALOG.to_vec(),
            Some(names) => {
                let mut out = Vec::new();
                for name in names {
                    out.push(EtaTag::from_name(name).ok_or_else(|| {
                        InputError(format!("unknown eta `{name}`"))
                    })?);
                }
                if out.is_empty() {
                    return Err(InputError("eta_catalog must not be empty".into()));
                }
                out
            }
        };
        let mut tolerances = sundman_core::verify::VerifyTolerances::default();
        if let Some(t) = self.options.drift_tol {
            tolerances.drift = t;
        }
        if let Some(t) = self.options.family_tol {
            tolerances.family_residual = t;
        }
        if let Some(t) = self.options.utt_tol {
            tolerances.utt = t;
        }

        let echo = ProblemEcho {
            f: sundman_core::print(&ode.f),
            f1: sundman_core::print(&ode.f1),
            f2: sundman_core::print(&ode.f2),
            r#box: echo_box,
            seed,
        };
        Ok(LoadedProblem {
            ode,
            options: PipelineOptions {
                sample_box,
                tol,
                g_ansatz_extra: g_extra,
                eta_catalog,
            },
            tolerances,
            echo,
        })
    }
}
