//! Model files: the JSON schema consumed by the CLI and test fixtures.
//!
//! A model names a step set plus a weight block, which is either explicit
//! central parameters (`alpha`, optional `beta`) or a per-step table
//! (`step_weights`). With no weight block every step carries weight one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ser::Rat;
use crate::stepset::{validate, StepSet, ValidationError};
use crate::weighting::{
    classify_weighting, CentralityError, FactorError, StepWeights, SymmetricWeighting, WeightError,
    WeightingClass,
};
use crate::{rational_int, Rational};

/// Arithmetic mode for enumeration-backed commands.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode {other:?} (expected exact or float)")),
        }
    }
}

/// Optional per-model run parameters; command-line flags take precedence.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

/// On-disk model schema.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub dimension: usize,
    pub steps: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_weights: Option<BTreeMap<String, Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<ModelOptions>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("step key {0:?} does not parse as a step")]
    BadStepKey(String),
    #[error("alpha has {got} entries but the model is {dimension}-dimensional")]
    AlphaLength { dimension: usize, got: usize },
    #[error("beta given without alpha")]
    BetaWithoutAlpha,
    #[error("model carries both alpha/beta and step_weights")]
    AmbiguousWeights,
    #[error("weighting fits no supported class: {central}; {factor}")]
    UnclassifiedWeighting {
        central: CentralityError,
        factor: FactorError,
    },
    #[error("malformed model JSON: {0}")]
    Json(String),
}

/// A validated step set with classified weights, ready for analysis.
#[derive(Clone, Debug)]
pub struct ResolvedModel {
    pub set: StepSet,
    pub weights: StepWeights,
    pub class: WeightingClass,
    pub options: ModelOptions,
}

impl ResolvedModel {
    /// Parameters for the asymptotic machinery: symmetric part (if any),
    /// alpha, and beta. Fails for unclassifiable weightings.
    pub fn analysis_parameters(
        &self,
    ) -> Result<(Option<&SymmetricWeighting>, Vec<Rational>, Rational), ModelError> {
        let ones = |d: usize| vec![rational_int(1); d];
        match &self.class {
            WeightingClass::Central(c) => Ok((None, c.alpha.clone(), c.beta.clone())),
            WeightingClass::Symmetric(s) => {
                Ok((Some(s), ones(self.set.dimension()), rational_int(1)))
            }
            WeightingClass::Factored { omega, alpha } => {
                Ok((Some(omega), alpha.clone(), rational_int(1)))
            }
            WeightingClass::Unclassified { central, factor } => {
                Err(ModelError::UnclassifiedWeighting {
                    central: central.clone(),
                    factor: factor.clone(),
                })
            }
        }
    }
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    /// Validate the step set, build weights, and classify them.
    pub fn resolve(&self) -> Result<ResolvedModel, ModelError> {
        let set = validate(self.dimension, &self.steps)?;
        if self.step_weights.is_some() && (self.alpha.is_some() || self.beta.is_some()) {
            return Err(ModelError::AmbiguousWeights);
        }
        if self.beta.is_some() && self.alpha.is_none() {
            return Err(ModelError::BetaWithoutAlpha);
        }
        let (weights, class) = match (&self.alpha, &self.step_weights) {
            (Some(alpha), None) => {
                if alpha.len() != set.dimension() {
                    return Err(ModelError::AlphaLength {
                        dimension: set.dimension(),
                        got: alpha.len(),
                    });
                }
                let alpha: Vec<Rational> = alpha.iter().map(|r| r.0.clone()).collect();
                let beta = self
                    .beta
                    .as_ref()
                    .map(|b| b.0.clone())
                    .unwrap_or_else(|| rational_int(1));
                let weights = StepWeights::from_central(&set, &alpha, &beta)?;
                let class = WeightingClass::Central(crate::weighting::CentralWeighting {
                    alpha,
                    beta,
                });
                (weights, class)
            }
            (None, Some(table)) => {
                let mut map = BTreeMap::new();
                for (key, value) in table {
                    let step = key
                        .parse()
                        .map_err(|_| ModelError::BadStepKey(key.clone()))?;
                    map.insert(step, value.0.clone());
                }
                let weights = StepWeights::new(&set, map)?;
                let class = classify_weighting(&set, &weights);
                (weights, class)
            }
            (None, None) => {
                let weights = StepWeights::uniform(&set);
                let class = WeightingClass::Central(crate::weighting::CentralWeighting {
                    alpha: vec![rational_int(1); set.dimension()],
                    beta: rational_int(1),
                });
                (weights, class)
            }
            (Some(_), Some(_)) => unreachable!("rejected above"),
        };
        Ok(ResolvedModel {
            set,
            weights,
            class,
            options: self.options.clone().unwrap_or_default(),
        })
    }
}
