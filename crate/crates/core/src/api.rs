//! JSON bodies exchanged with the HTTP service.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{retardation_distance, traversal_time, ClassicalBarrier, ClassicalParticle};
use crate::error::{Error, Result};
use crate::retardation::{Analysis, RetardationReport};

pub const DEFAULTS_PATH: &str = "/api/defaults";
pub const EVALUATE_PATH: &str = "/api/evaluate";
pub const CLASSICAL_PATH: &str = "/api/classical";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtEntry {
    pub k: f64,
    #[serde(rename = "R")]
    pub r: ComplexJson,
    #[serde(rename = "T")]
    pub t: ComplexJson,
    #[serde(rename = "abs_R2")]
    pub abs_r2: f64,
    #[serde(rename = "abs_T2")]
    pub abs_t2: f64,
}

/// Response of `POST /api/evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateResponse {
    pub free_density: Vec<f64>,
    pub nonfree_density: Vec<f64>,
    pub grid_x: Vec<f64>,
    pub rt: Vec<RtEntry>,
    pub report: RetardationReport,
}

impl From<&Analysis> for EvaluateResponse {
    fn from(a: &Analysis) -> Self {
        Self {
            free_density: a.free.values.clone(),
            nonfree_density: a.nonfree.values.clone(),
            grid_x: a.free.grid.points(),
            rt: a
                .field
                .solutions()
                .iter()
                .map(|s| RtEntry {
                    k: s.k,
                    r: s.reflection.into(),
                    t: s.transmission.into(),
                    abs_r2: s.abs_r2(),
                    abs_t2: s.abs_t2(),
                })
                .collect(),
            report: a.report.clone(),
        }
    }
}

/// Body of `POST /api/classical`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalRequest {
    #[serde(alias = "m")]
    pub mass: f64,
    pub v0: f64,
    #[serde(alias = "F0")]
    pub f0: f64,
    pub w: f64,
    #[serde(default)]
    pub x0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalResponse {
    pub traversal_time: f64,
    pub free_time: f64,
    pub retardation: f64,
}

impl ClassicalRequest {
    pub fn from_json_str(text: &str) -> Result<Self> {
        crate::scenario::parse_json(text)
    }

    pub fn parts(&self) -> Result<(ClassicalBarrier, ClassicalParticle)> {
        Ok((
            ClassicalBarrier::new(self.x0, self.w, self.f0, self.mass)?,
            ClassicalParticle::new(self.v0)?,
        ))
    }

    pub fn evaluate(&self) -> Result<ClassicalResponse> {
        let (barrier, particle) = self.parts()?;
        Ok(ClassicalResponse {
            traversal_time: traversal_time(&barrier, &particle)?,
            free_time: barrier.w / particle.v0,
            retardation: retardation_distance(&barrier, &particle)?,
        })
    }
}

/// Machine-parsable failure description, printed as one JSON line on the CLI
/// and returned as the body of 4xx/5xx responses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointer: Option<String>,
}

impl From<&Error> for ApiError {
    fn from(err: &Error) -> Self {
        Self {
            error: err.code().to_string(),
            message: err.to_string(),
            pointer: err.pointer().map(str::to_string),
        }
    }
}

impl ApiError {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("api error serialises")
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.error, self.message)
    }
}
