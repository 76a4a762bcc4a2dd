//! The JSON problem-file schema (version "1") and its mapping onto
//! [`CyclicProblem`] and [`RunConfig`].
//!
//! Unknown keys are rejected everywhere, including inside the per-kind set
//! records, and every number must be finite. `null` entries in box bounds
//! mark unbounded sides.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::engine::{RunConfig, Scheme};
use crate::geometry::{ConvexSet, ScalarConvexFn, Vector};
use crate::operators::CyclicProblem;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: String,
    pub dimension: usize,
    pub sets: Vec<SetRecord>,
    pub x0: Vec<f64>,
    pub scheme: SchemeTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigOverrides>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SchemeTag {
    CyclicDr,
    CyclicProjections,
    ClassicalDr,
}

impl From<SchemeTag> for Scheme {
    fn from(tag: SchemeTag) -> Scheme {
        match tag {
            SchemeTag::CyclicDr => Scheme::CyclicDr,
            SchemeTag::CyclicProjections => Scheme::CyclicProjections,
            SchemeTag::ClassicalDr => Scheme::ClassicalDr,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cycles: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fix_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<u64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetRecord {
    Hyperplane {
        normal: Vec<f64>,
        offset: f64,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
    Affine {
        rows: Vec<AffineRow>,
    },
    EpigraphParabola {
        a: f64,
        b: f64,
        c: f64,
        #[serde(default = "default_embed")]
        embed: [usize; 2],
    },
    EpigraphHyperbola {
        c0: f64,
        c1: f64,
        #[serde(default = "default_embed")]
        embed: [usize; 2],
    },
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AffineRow {
    pub normal: Vec<f64>,
    pub offset: f64,
}

fn default_embed() -> [usize; 2] {
    [0, 1]
}

/// Allowed keys per set-record kind. Internally tagged enums skip serde's
/// unknown-key rejection, so set records are checked by hand.
fn allowed_keys(kind: &str) -> Option<&'static [&'static str]> {
    match kind {
        "hyperplane" | "halfspace" => Some(&["kind", "normal", "offset"]),
        "ball" => Some(&["kind", "center", "radius"]),
        "box" => Some(&["kind", "lower", "upper"]),
        "affine" => Some(&["kind", "rows"]),
        "epigraph_parabola" => Some(&["kind", "a", "b", "c", "embed"]),
        "epigraph_hyperbola" => Some(&["kind", "c0", "c1", "embed"]),
        _ => None,
    }
}

/// Parses and validates a problem file.
pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
    let value: Value = serde_json::from_str(text).map_err(CliError::from_json)?;
    validate_set_record_keys(&value)?;
    let file: ProblemFile = serde_json::from_value(value).map_err(CliError::from_json)?;
    if file.version != FORMAT_VERSION {
        return Err(CliError::Schema(format!(
            "unsupported problem file version {:?} (expected {:?})",
            file.version, FORMAT_VERSION
        )));
    }
    Ok(file)
}

pub fn serialize(file: &ProblemFile) -> String {
    serde_json::to_string_pretty(file).expect("problem files always serialize")
}

fn validate_set_record_keys(value: &Value) -> Result<(), CliError> {
    let Some(sets) = value.get("sets").and_then(Value::as_array) else {
        return Ok(()); // the typed parse reports the missing/mistyped field
    };
    for (i, set) in sets.iter().enumerate() {
        let Some(obj) = set.as_object() else {
            return Err(CliError::Schema(format!("sets[{i}] must be an object")));
        };
        let Some(kind) = obj.get("kind").and_then(Value::as_str) else {
            return Err(CliError::Schema(format!(
                "sets[{i}] is missing a string `kind`"
            )));
        };
        let Some(allowed) = allowed_keys(kind) else {
            return Err(CliError::Schema(format!(
                "sets[{i}] has unknown kind {kind:?}"
            )));
        };
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Schema(format!(
                    "sets[{i}] ({kind}) has unknown key {key:?}"
                )));
            }
        }
    }
    Ok(())
}

impl ProblemFile {
    /// Builds the runnable problem, initial point, and configuration
    /// (defaults overridden by the file's `config` block).
    pub fn to_problem(&self) -> Result<(CyclicProblem, Vector, RunConfig), CliError> {
        if self.x0.len() != self.dimension {
            return Err(CliError::Schema(format!(
                "x0 has {} coordinates, dimension is {}",
                self.x0.len(),
                self.dimension
            )));
        }
        let x0 = Vector::new(self.x0.clone()).map_err(|e| CliError::Schema(format!("x0: {e}")))?;
        let sets = self
            .sets
            .iter()
            .enumerate()
            .map(|(i, record)| {
                record
                    .to_set(self.dimension)
                    .map_err(|e| CliError::Schema(format!("sets[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let problem =
            CyclicProblem::new(sets).map_err(|e| CliError::Schema(format!("sets: {e}")))?;

        let mut config = RunConfig {
            scheme: self.scheme.into(),
            ..RunConfig::default()
        };
        if let Some(over) = &self.config {
            if let Some(v) = over.max_cycles {
                config.max_cycles = v;
            }
            if let Some(v) = over.fix_tol {
                config.fix_tol = v;
            }
            if let Some(v) = over.blowup_norm {
                config.blowup_norm = v;
            }
            if let Some(v) = over.record_stride {
                config.record_stride = v;
            }
        }
        Ok((problem, x0, config))
    }
}

impl SetRecord {
    fn to_set(&self, dim: usize) -> Result<ConvexSet, String> {
        let vec_checked = |coords: &Vec<f64>, name: &str| -> Result<Vector, String> {
            if coords.len() != dim {
                return Err(format!(
                    "{name} has {} coordinates, dimension is {dim}",
                    coords.len()
                ));
            }
            Vector::new(coords.clone()).map_err(|e| format!("{name}: {e}"))
        };
        match self {
            SetRecord::Hyperplane { normal, offset } => {
                ConvexSet::hyperplane(vec_checked(normal, "normal")?, *offset)
                    .map_err(|e| e.to_string())
            }
            SetRecord::Halfspace { normal, offset } => {
                ConvexSet::halfspace(vec_checked(normal, "normal")?, *offset)
                    .map_err(|e| e.to_string())
            }
            SetRecord::Ball { center, radius } => {
                ConvexSet::ball(vec_checked(center, "center")?, *radius).map_err(|e| e.to_string())
            }
            SetRecord::Box { lower, upper } => {
                if lower.len() != dim || upper.len() != dim {
                    return Err(format!(
                        "box bounds have {}/{} coordinates, dimension is {dim}",
                        lower.len(),
                        upper.len()
                    ));
                }
                let lo = lower
                    .iter()
                    .map(|v| v.unwrap_or(f64::NEG_INFINITY))
                    .collect();
                let hi = upper.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
                ConvexSet::box_set(lo, hi).map_err(|e| e.to_string())
            }
            SetRecord::Affine { rows } => {
                let rows = rows
                    .iter()
                    .map(|r| Ok((vec_checked(&r.normal, "row normal")?, r.offset)))
                    .collect::<Result<Vec<_>, String>>()?;
                ConvexSet::affine_subspace(rows).map_err(|e| e.to_string())
            }
            SetRecord::EpigraphParabola { a, b, c, embed } => {
                let f = ScalarConvexFn::parabola(*a, *b, *c).map_err(|e| e.to_string())?;
                ConvexSet::epigraph(f, embed[0], embed[1], dim).map_err(|e| e.to_string())
            }
            SetRecord::EpigraphHyperbola { c0, c1, embed } => {
                let f = ScalarConvexFn::hyperbola_branch(*c0, *c1).map_err(|e| e.to_string())?;
                ConvexSet::epigraph(f, embed[0], embed[1], dim).map_err(|e| e.to_string())
            }
        }
    }
}
