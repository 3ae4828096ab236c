//! Problem-spec file format and conversion into library types.

use serde::{Deserialize, Serialize};

use kleintrace::params::QuantizationSpec;
use kleintrace::poly::Poly;
use kleintrace::prec;
use kleintrace::weight::{build_weight, Atom, WeightSpec};

use crate::CliError;

pub const ENV_PRECISION: &str = "KLEINTRACE_PRECISION_BITS";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomSpec {
    pub y: f64,
    pub mass: f64,
}

/// On-disk description of a quantization and a trace on it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    /// roots of P as (re, im) pairs
    #[serde(rename = "P_roots")]
    pub p_roots: Vec<(f64, f64)>,
    pub c: f64,
    /// "+" or "-"
    pub epsilon: String,
    /// ascending real coefficients of G
    #[serde(rename = "G")]
    pub g: Vec<f64>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub precision_bits: Option<u32>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub format: Option<String>,
}

impl ProblemSpec {
    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {path}: {e}")))?;
        let spec: ProblemSpec = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("malformed problem spec {path}: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.p_roots.is_empty() {
            return Err(CliError::validation("P must have at least one root".into()));
        }
        if !(0.0..1.0).contains(&self.c) {
            return Err(CliError::validation(format!("c must lie in [0,1), got {}", self.c)));
        }
        match self.epsilon.as_str() {
            "+" | "-" => {}
            other => {
                return Err(CliError::validation(format!(
                    "epsilon must be \"+\" or \"-\", got {other:?}"
                )))
            }
        }
        if let Some(fmt) = &self.format {
            if fmt != "json" && fmt != "csv" {
                return Err(CliError::validation(format!("unknown format {fmt:?}")));
            }
        }
        for (re, im) in &self.p_roots {
            if !re.is_finite() || !im.is_finite() {
                return Err(CliError::validation("non-finite root".into()));
            }
        }
        Ok(())
    }

    pub fn epsilon_sign(&self) -> i8 {
        if self.epsilon == "+" {
            1
        } else {
            -1
        }
    }

    /// Working precision: CLI flag > spec file > environment > default 256.
    pub fn bits(&self, flag: Option<u32>) -> u32 {
        flag.or(self.precision_bits)
            .or_else(|| {
                std::env::var(ENV_PRECISION)
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(prec::DEFAULT_BITS)
    }

    pub fn quantization(&self, bits: u32) -> Result<QuantizationSpec, CliError> {
        QuantizationSpec::from_f64(bits, &self.p_roots, self.c, self.epsilon_sign())
            .map_err(CliError::from_core_validation)
    }

    pub fn g_poly(&self, bits: u32) -> Poly {
        Poly::from_f64(bits, &self.g)
    }

    pub fn atom_list(&self, bits: u32) -> Vec<Atom> {
        self.atoms
            .iter()
            .map(|a| Atom {
                y: prec::float(bits, a.y),
                mass: prec::float(bits, a.mass),
            })
            .collect()
    }

    /// Build the weight; traces in integral form need all roots in the
    /// closed strip, so out-of-strip specs are a validation error here.
    pub fn weight(&self, bits: u32) -> Result<(QuantizationSpec, WeightSpec), CliError> {
        let spec = self.quantization(bits)?;
        let outside = !spec.classify_strip().outside.is_empty();
        if outside {
            return Err(CliError::validation(
                "roots outside |Re α| ≤ 1/2: the integral trace form applies to the reduced \
                 quantization; rerun with the roots of P∘ (see `positivity` which reduces \
                 automatically)"
                    .into(),
            ));
        }
        let w = build_weight(&spec, &self.g_poly(bits), &self.atom_list(bits))
            .map_err(CliError::from_core_validation)?;
        Ok((spec, w))
    }
}
