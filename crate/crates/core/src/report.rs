//! Report payloads: the JSON the CLI emits for analyze, verify, and classify.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{asymptotic_formula, AsymptoticFormula, AsymptoticsError};
use crate::critical::{contributing_points, ContributingSet, ParitySign};
use crate::model::{Mode, ModelError, ResolvedModel};
use crate::oracle::{
    enumerate, estimate_constant, estimate_exponent, EnumerateOptions, LogCounts, OracleError,
};
use crate::ser::{self, Rat};
use crate::{Int, Rational};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn parity_label(p: &ParitySign) -> String {
    match p {
        ParitySign::AlwaysPlus => "always_plus".to_owned(),
        ParitySign::Alternating => "alternating".to_owned(),
    }
}

/// One contributing critical point, serialized.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ContributingPointReport {
    pub signs: Vec<i8>,
    #[serde(with = "ser::rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "ser::rational_opt", default)]
    pub t: Option<Rational>,
    #[serde(with = "ser::rational_vec")]
    pub s_argument: Vec<Rational>,
    #[serde(with = "ser::rational_string")]
    pub s_value: Rational,
    pub parity: String,
}

/// Per-point constant factors `c(z_j)` and their product.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct FactorReport {
    #[serde(with = "ser::rational_vec")]
    pub s_argument: Vec<Rational>,
    pub parity: String,
    pub factors: Vec<f64>,
    pub product: f64,
}

/// The analyze payload: the full asymptotic statement for one model.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    #[serde(with = "ser::rational_string")]
    pub base: Rational,
    #[serde(with = "ser::rational_string")]
    pub beta: Rational,
    /// β·base, the reported exponential growth.
    #[serde(with = "ser::rational_string")]
    pub growth: Rational,
    #[serde(with = "ser::rational_string")]
    pub exponent: Rational,
    pub gamma_even: f64,
    pub gamma_odd: f64,
    pub classification: String,
    /// Weighted drift Σ w_σ·σ of the input weights.
    #[serde(with = "ser::rational_vec")]
    pub drift: Vec<Rational>,
    pub contributing_points: Vec<ContributingPointReport>,
    pub per_factor_breakdown: Vec<FactorReport>,
}

impl AnalysisReport {
    pub fn build(resolved: &ResolvedModel) -> Result<Self, ReportError> {
        let (omega, alpha, beta) = resolved.analysis_parameters()?;
        let formula = asymptotic_formula(&resolved.set, omega, &alpha, &beta)?;
        let contributing = contributing_points(&resolved.set, omega, &alpha);
        Ok(Self::from_parts(
            &formula,
            &contributing,
            resolved.class.to_string(),
            resolved.weights.drift(&resolved.set),
        ))
    }

    pub fn from_parts(
        formula: &AsymptoticFormula,
        contributing: &ContributingSet,
        classification: String,
        drift: Vec<Rational>,
    ) -> Self {
        AnalysisReport {
            base: formula.base.clone(),
            beta: formula.beta.clone(),
            growth: formula.growth(),
            exponent: formula.exponent.clone(),
            gamma_even: formula.gamma_even,
            gamma_odd: formula.gamma_odd,
            classification,
            drift,
            contributing_points: contributing
                .points
                .iter()
                .map(|cp| ContributingPointReport {
                    signs: cp.point.signs.clone(),
                    x: cp.point.x.clone(),
                    t: cp.point.t.clone(),
                    s_argument: cp.point.s_argument.clone(),
                    s_value: cp.point.s_value.clone(),
                    parity: parity_label(&cp.parity),
                })
                .collect(),
            per_factor_breakdown: formula
                .breakdown
                .iter()
                .map(|b| FactorReport {
                    s_argument: b.s_argument.clone(),
                    parity: parity_label(&b.parity),
                    factors: b.factors.clone(),
                    product: b.product,
                })
                .collect(),
        }
    }
}

/// The verify payload: engine constants against oracle extrapolation.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n_max: u32,
    pub mode: Mode,
    #[serde(with = "ser::rational_string")]
    pub base: Rational,
    #[serde(with = "ser::rational_string")]
    pub beta: Rational,
    #[serde(with = "ser::rational_string")]
    pub growth: Rational,
    #[serde(with = "ser::rational_string")]
    pub exponent: Rational,
    pub gamma_even: f64,
    pub gamma_odd: f64,
    pub gamma_even_extrapolated: Option<f64>,
    pub gamma_odd_extrapolated: Option<f64>,
    pub gamma_residual: f64,
    pub exponent_extrapolated: Option<f64>,
    pub exponent_residual: Option<f64>,
    /// Worst relative disagreement over populated parity classes.
    pub gamma_error: Option<f64>,
    pub exponent_error: Option<f64>,
    pub tol_gamma: f64,
    pub tol_exp: f64,
    pub converged: bool,
    pub pass: bool,
}

fn rel_error(estimate: f64, reference: f64) -> f64 {
    let denom = if reference == 0.0 { 1.0 } else { reference.abs() };
    (estimate - reference).abs() / denom
}

impl VerifyReport {
    pub fn run(
        resolved: &ResolvedModel,
        n_max: u32,
        mode: Mode,
        budget_bytes: u64,
        tol_gamma: f64,
        tol_exp: f64,
    ) -> Result<Self, ReportError> {
        let (omega, alpha, beta) = resolved.analysis_parameters()?;
        let formula = asymptotic_formula(&resolved.set, omega, &alpha, &beta)?;
        let counts = weighted_log_counts(resolved, n_max, mode, budget_bytes)?;

        let constants = estimate_constant(&counts, &formula.beta, &formula.base, &formula.exponent)?;
        let (exp_est, exp_res, exp_converged) =
            match estimate_exponent(&counts, &formula.beta, &formula.base) {
                Ok(e) => (Some(e.estimate), Some(e.residual), true),
                Err(OracleError::NonConvergence { residual }) => (None, Some(residual), false),
                Err(e) => return Err(e.into()),
            };

        let mut gamma_error: Option<f64> = None;
        for (est, reference) in [
            (constants.gamma_even(), formula.gamma_even),
            (constants.gamma_odd(), formula.gamma_odd),
        ] {
            if let Some(est) = est {
                let e = rel_error(est, reference);
                gamma_error = Some(gamma_error.map_or(e, |g: f64| g.max(e)));
            }
        }
        let exponent_error = exp_est.map(|e| {
            let reference = num_traits::ToPrimitive::to_f64(&formula.exponent).unwrap_or(f64::NAN);
            (e - reference).abs()
        });

        let converged = constants.converged && exp_converged;
        let pass = converged
            && gamma_error.is_some_and(|e| e <= tol_gamma)
            && exponent_error.is_some_and(|e| e <= tol_exp);

        Ok(VerifyReport {
            n_max,
            mode,
            base: formula.base.clone(),
            beta: formula.beta.clone(),
            growth: formula.growth(),
            exponent: formula.exponent.clone(),
            gamma_even: formula.gamma_even,
            gamma_odd: formula.gamma_odd,
            gamma_even_extrapolated: constants.gamma_even(),
            gamma_odd_extrapolated: constants.gamma_odd(),
            gamma_residual: constants.residual(),
            exponent_extrapolated: exp_est,
            exponent_residual: exp_res,
            gamma_error,
            exponent_error,
            tol_gamma,
            tol_exp,
            converged,
            pass,
        })
    }
}

/// Enumerate the model's weighted totals and return them in log space.
pub fn weighted_log_counts(
    resolved: &ResolvedModel,
    n_max: u32,
    mode: Mode,
    budget_bytes: u64,
) -> Result<LogCounts, ReportError> {
    let opts = EnumerateOptions {
        budget_bytes,
        ..EnumerateOptions::default()
    };
    let uniform = resolved.weights.iter().all(|(_, w)| w.is_one());
    let weights = (!uniform).then_some(&resolved.weights);
    let counts = match mode {
        Mode::Float => enumerate::<f64>(&resolved.set, weights, n_max, &opts)?.log_counts(),
        Mode::Exact => {
            if uniform {
                enumerate::<Int>(&resolved.set, None, n_max, &opts)?.log_counts()
            } else {
                enumerate::<Rational>(&resolved.set, weights, n_max, &opts)?.log_counts()
            }
        }
    };
    Ok(counts)
}

/// The classify payload.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<BTreeMap<String, Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_central: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_factor: Option<String>,
}

impl ClassifyReport {
    pub fn build(resolved: &ResolvedModel) -> Self {
        use crate::weighting::WeightingClass::*;
        let mut report = ClassifyReport {
            class: resolved.class.to_string(),
            alpha: None,
            beta: None,
            omega: None,
            witness_central: None,
            witness_factor: None,
        };
        let omega_map = |s: &crate::weighting::SymmetricWeighting| {
            s.weights()
                .iter()
                .map(|(st, w)| (st.to_string(), Rat(w.clone())))
                .collect::<BTreeMap<_, _>>()
        };
        match &resolved.class {
            Central(c) => {
                report.alpha = Some(c.alpha.iter().cloned().map(Rat).collect());
                report.beta = Some(Rat(c.beta.clone()));
            }
            Symmetric(s) => report.omega = Some(omega_map(s)),
            Factored { omega, alpha } => {
                report.omega = Some(omega_map(omega));
                report.alpha = Some(alpha.iter().cloned().map(Rat).collect());
            }
            Unclassified { central, factor } => {
                report.witness_central = Some(central.to_string());
                report.witness_factor = Some(factor.to_string());
            }
        }
        report
    }
}
