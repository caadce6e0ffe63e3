//! JSON function descriptions.
//!
//! ```json
//! {"type":"fourier","a0":0.0,"cos":[...],"sin":[...]}
//! {"type":"samples","values":[...]}
//! ```
//!
//! Fourier lists are indexed from `k = 1`; samples sit at `θ_j = 2πj/M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::PeriodicFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Fourier {
        #[serde(default)]
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Samples {
        values: Vec<f64>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(rename = "type")]
    kind: String,
    a0: Option<f64>,
    cos: Option<Vec<f64>>,
    sin: Option<Vec<f64>>,
    values: Option<Vec<f64>>,
}

impl FunctionSpec {
    /// Parses a spec; errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        // A flat struct keeps serde_json streaming, so positions survive; the
        // tagged enum would buffer the input first and lose them.
        let raw: RawSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidFunction(e.to_string()))?;
        let field_clash = |field: &str| {
            Error::InvalidFunction(format!(
                "field `{field}` not allowed for type `{}`",
                raw.kind
            ))
        };
        match raw.kind.as_str() {
            "fourier" => {
                if raw.values.is_some() {
                    return Err(field_clash("values"));
                }
                Ok(FunctionSpec::Fourier {
                    a0: raw.a0.unwrap_or(0.0),
                    cos: raw.cos.unwrap_or_default(),
                    sin: raw.sin.unwrap_or_default(),
                })
            }
            "samples" => {
                for (name, present) in [
                    ("a0", raw.a0.is_some()),
                    ("cos", raw.cos.is_some()),
                    ("sin", raw.sin.is_some()),
                ] {
                    if present {
                        return Err(field_clash(name));
                    }
                }
                let values = raw.values.ok_or_else(|| {
                    Error::InvalidFunction("missing field `values` for type `samples`".into())
                })?;
                Ok(FunctionSpec::Samples { values })
            }
            other => Err(Error::InvalidFunction(format!(
                "unknown type `{other}`, expected `fourier` or `samples`"
            ))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<PeriodicFunction> {
        match self {
            FunctionSpec::Fourier { a0, cos, sin } => {
                PeriodicFunction::fourier(*a0, cos.clone(), sin.clone())
            }
            FunctionSpec::Samples { values } => PeriodicFunction::samples(values.clone()),
        }
    }
}

impl From<&PeriodicFunction> for FunctionSpec {
    /// Normal form: Fourier lists padded to equal length, splines by samples.
    fn from(f: &PeriodicFunction) -> Self {
        match f {
            PeriodicFunction::Trig(p) => FunctionSpec::Fourier {
                a0: p.a0(),
                cos: p.cos_coeffs().to_vec(),
                sin: p.sin_coeffs().to_vec(),
            },
            PeriodicFunction::Spline(s) => FunctionSpec::Samples {
                values: s.values().to_vec(),
            },
        }
    }
}

/// Parses and builds in one step.
pub fn parse_function(text: &str) -> Result<PeriodicFunction> {
    FunctionSpec::from_json(text)?.build()
}
