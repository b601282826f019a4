//! Per-step weightings: classification and derived asymptotic parameters.
//!
//! A weighting is *central* when `w_σ = β·∏ α_i^{σ_i}`, *symmetric* when it
//! is invariant under every axis reflection, and *factorable* when it is a
//! product of the two.  Everything the asymptotic formula needs (α⁺, α⁻, r,
//! m, the minimal-point parameter) is derived here.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::FieldScalar;
use crate::stepset::{EvalError, Step, StepSet};
use crate::{rational_int, Int, Rational};

/// Positive rational weights, one per step of a fixed step set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepWeights {
    map: BTreeMap<Step, Rational>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("no weight given for step {step}")]
    MissingStep { step: Step },
    #[error("weight given for {step}, which is not in the step set")]
    UnknownStep { step: Step },
    #[error("weight for {step} is not positive")]
    NonPositiveWeight { step: Step },
    #[error("alpha component {axis} is not positive")]
    NonPositiveAlpha { axis: usize },
}

impl StepWeights {
    /// Weights must cover the step set exactly and be positive.
    pub fn new(
        s: &StepSet,
        entries: impl IntoIterator<Item = (Step, Rational)>,
    ) -> Result<Self, WeightError> {
        let map: BTreeMap<Step, Rational> = entries.into_iter().collect();
        for (step, w) in &map {
            if !s.contains(step) {
                return Err(WeightError::UnknownStep { step: step.clone() });
            }
            if !w.is_positive() {
                return Err(WeightError::NonPositiveWeight { step: step.clone() });
            }
        }
        for step in s.steps() {
            if !map.contains_key(step) {
                return Err(WeightError::MissingStep { step: step.clone() });
            }
        }
        Ok(StepWeights { map })
    }

    /// The all-ones weighting.
    pub fn uniform(s: &StepSet) -> Self {
        StepWeights {
            map: s
                .steps()
                .iter()
                .map(|st| (st.clone(), rational_int(1)))
                .collect(),
        }
    }

    /// Build `w_σ = β·∏ α_i^{σ_i}` over the step set.
    pub fn from_central(
        s: &StepSet,
        alpha: &[Rational],
        beta: &Rational,
    ) -> Result<Self, WeightError> {
        check_alpha(alpha)?;
        if !beta.is_positive() {
            // Reuse the axis-style error; beta is reported as a weight problem
            // by callers that care.
            return Err(WeightError::NonPositiveAlpha { axis: alpha.len() });
        }
        let map = s
            .steps()
            .iter()
            .map(|st| (st.clone(), beta.clone() * monomial(alpha, st)))
            .collect();
        Ok(StepWeights { map })
    }

    pub fn get(&self, step: &Step) -> &Rational {
        self.map.get(step).expect("weight domain covers the step set")
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Step, &Rational)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Weighted inventory `S_w(x) = Σ_σ w_σ·x^σ`.
    pub fn inventory_eval<T: FieldScalar>(&self, s: &StepSet, x: &[T]) -> Result<T, EvalError> {
        s.inventory_eval_with(x, |st| {
            T::from_rational(self.get(st)).ok_or(EvalError::UnrepresentableWeight)
        })
    }

    /// Weighted drift `Σ_σ w_σ·σ`.
    pub fn drift(&self, s: &StepSet) -> Vec<Rational> {
        let mut d = vec![Rational::zero(); s.dimension()];
        for (st, w) in &self.map {
            for (i, &c) in st.components().iter().enumerate() {
                match c {
                    1 => d[i] += w,
                    -1 => d[i] -= w,
                    _ => {}
                }
            }
        }
        d
    }
}

/// Central weighting `w_σ = β·∏ α_i^{σ_i}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CentralWeighting {
    pub alpha: Vec<Rational>,
    pub beta: Rational,
}

impl CentralWeighting {
    pub fn to_step_weights(&self, s: &StepSet) -> StepWeights {
        StepWeights::from_central(s, &self.alpha, &self.beta)
            .expect("central parameters are positive")
    }
}

/// Reflection-invariant weighting; wraps validated [`StepWeights`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymmetricWeighting(StepWeights);

impl SymmetricWeighting {
    pub fn weights(&self) -> &StepWeights {
        &self.0
    }

    pub fn get(&self, step: &Step) -> &Rational {
        self.0.get(step)
    }

    /// `S_ω(x)`.
    pub fn inventory_eval<T: FieldScalar>(&self, s: &StepSet, x: &[T]) -> Result<T, EvalError> {
        self.0.inventory_eval(s, x)
    }
}

/// Derived parameters of a weight vector α.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightProfile {
    /// Component-wise `max(α_i, 1)`.
    pub alpha_plus: Vec<Rational>,
    /// Component-wise `min(α_i, 1)`.
    pub alpha_minus: Vec<Rational>,
    /// Number of `α_i ≤ 1`.
    pub r: usize,
    /// Number of `α_i < 1`.
    pub m: usize,
    /// `1 / (α_1⁻⋯α_d⁻ · S(α⁺))`, the minimal-point radius.
    pub t_minimal: Rational,
}

/// Float fallback when a central structure exists but α or β is irrational.
#[derive(Clone, PartialEq, Debug)]
pub struct ApproxCentral {
    pub alpha: Vec<f64>,
    pub beta: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CentralityError {
    #[error("weights are not central: steps {} and {} force inconsistent parameters{}",
        .witness.0, .witness.1,
        .axis.map(|a| format!(" on axis {a}")).unwrap_or_default())]
    NotCentral {
        witness: (Step, Step),
        axis: Option<usize>,
    },
    /// The squared system is consistent but has no rational solution; the
    /// float solution is attached.
    #[error("central structure exists but alpha/beta are irrational")]
    Irrational { approximate: ApproxCentral },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("weights are not symmetric: {step} and its reflection across axis {axis} differ")]
    NotSymmetric { step: Step, axis: usize },
}

/// Float fallback for an irrational central/symmetric factorization.
#[derive(Clone, PartialEq, Debug)]
pub struct ApproxFactor {
    pub alpha: Vec<f64>,
    pub omega: BTreeMap<Step, f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("weights do not factor: steps {} and {} give inconsistent ratios on axis {axis}",
        .witness.0, .witness.1)]
    NotFactorable {
        witness: (Step, Step),
        axis: usize,
    },
    /// Factors exist over the reals but not the rationals (exact mode).
    #[error("factorization exists but is irrational")]
    Irrational { approximate: ApproxFactor },
}

/// Outcome of the full classification cascade.
#[derive(Clone, Debug)]
pub enum WeightingClass {
    Central(CentralWeighting),
    Symmetric(SymmetricWeighting),
    Factored {
        omega: SymmetricWeighting,
        alpha: Vec<Rational>,
    },
    Unclassified {
        central: CentralityError,
        factor: FactorError,
    },
}

impl fmt::Display for WeightingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightingClass::Central(_) => write!(f, "central"),
            WeightingClass::Symmetric(_) => write!(f, "symmetric"),
            WeightingClass::Factored { .. } => write!(f, "factored"),
            WeightingClass::Unclassified { .. } => write!(f, "none"),
        }
    }
}

fn check_alpha(alpha: &[Rational]) -> Result<(), WeightError> {
    for (axis, a) in alpha.iter().enumerate() {
        if !a.is_positive() {
            return Err(WeightError::NonPositiveAlpha { axis });
        }
    }
    Ok(())
}

/// `∏ α_i^{σ_i}` for σ ∈ {-1,0,1}^d.
pub(crate) fn monomial(alpha: &[Rational], step: &Step) -> Rational {
    let mut p = Rational::one();
    for (i, &c) in step.components().iter().enumerate() {
        match c {
            1 => p *= &alpha[i],
            -1 => p /= &alpha[i],
            _ => {}
        }
    }
    p
}

fn exact_sqrt_int(v: &Int) -> Option<Int> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Positive exact square root of a positive rational, if it is one.
fn exact_sqrt(v: &Rational) -> Option<Rational> {
    debug_assert!(v.is_positive());
    let n = exact_sqrt_int(v.numer())?;
    let d = exact_sqrt_int(v.denom())?;
    Some(Rational::new(n, d))
}

/// Per-axis squared ratios `α_i² = w_σ / w_{reflect_i σ}`, checked for
/// consistency over every step with `σ_i = +1`.
///
/// Returns the squared values together with the step that fixed each axis
/// (the witness partner on mismatch).
fn squared_ratios(
    s: &StepSet,
    w: &StepWeights,
) -> Result<Vec<(Rational, Step)>, (Step, Step, usize)> {
    let mut out: Vec<Option<(Rational, Step)>> = vec![None; s.dimension()];
    for st in s.steps() {
        for (axis, &c) in st.components().iter().enumerate() {
            if c != 1 {
                continue;
            }
            let ratio = w.get(st) / w.get(&st.reflect(axis));
            match &out[axis] {
                None => out[axis] = Some((ratio, st.clone())),
                Some((prev, first)) => {
                    if *prev != ratio {
                        return Err((first.clone(), st.clone(), axis));
                    }
                }
            }
        }
    }
    // A validated set moves along every axis, and reflectability supplies
    // the +1 representative, so every slot is filled.
    Ok(out
        .into_iter()
        .map(|slot| slot.expect("every axis has a +1 step"))
        .collect())
}

fn squared_monomial(sq: &[(Rational, Step)], step: &Step) -> Rational {
    let mut p = Rational::one();
    for (i, &c) in step.components().iter().enumerate() {
        match c {
            1 => p *= &sq[i].0,
            -1 => p /= &sq[i].0,
            _ => {}
        }
    }
    p
}

/// Extract `(α, β)` with `w_σ = β·∏ α_i^{σ_i}`, if the weighting is central.
///
/// The squared system is solved first (`α_i² = w_σ/w_{reflect_i σ}` per
/// axis, then `β² = w_σ²/∏ α_i^{2σ_i}` must be step-independent), so
/// centrality over the reals is decided before any square root is taken.
pub fn classify_central(s: &StepSet, w: &StepWeights) -> Result<CentralWeighting, CentralityError> {
    let sq = squared_ratios(s, w).map_err(|(a, b, axis)| CentralityError::NotCentral {
        witness: (a, b),
        axis: Some(axis),
    })?;

    let mut beta_sq: Option<(Rational, Step)> = None;
    for st in s.steps() {
        let b = w.get(st) * w.get(st) / squared_monomial(&sq, st);
        match &beta_sq {
            None => beta_sq = Some((b, st.clone())),
            Some((prev, first)) => {
                if *prev != b {
                    return Err(CentralityError::NotCentral {
                        witness: (first.clone(), st.clone()),
                        axis: None,
                    });
                }
            }
        }
    }
    let (beta_sq, _) = beta_sq.expect("step set is nonempty");

    let exact_alpha: Option<Vec<Rational>> = sq.iter().map(|(a2, _)| exact_sqrt(a2)).collect();
    let exact_beta = exact_sqrt(&beta_sq);
    match (exact_alpha, exact_beta) {
        (Some(alpha), Some(beta)) => Ok(CentralWeighting { alpha, beta }),
        _ => Err(CentralityError::Irrational {
            approximate: ApproxCentral {
                alpha: sq
                    .iter()
                    .map(|(a2, _)| a2.to_f64().unwrap_or(f64::NAN).sqrt())
                    .collect(),
                beta: beta_sq.to_f64().unwrap_or(f64::NAN).sqrt(),
            },
        }),
    }
}

/// Check reflection invariance of the weights.
pub fn classify_symmetric(
    s: &StepSet,
    w: &StepWeights,
) -> Result<SymmetricWeighting, SymmetryError> {
    for st in s.steps() {
        for axis in 0..s.dimension() {
            if st.components()[axis] != 0 && w.get(st) != w.get(&st.reflect(axis)) {
                return Err(SymmetryError::NotSymmetric {
                    step: st.clone(),
                    axis,
                });
            }
        }
    }
    Ok(SymmetricWeighting(w.clone()))
}

/// Split `w_σ = ω_σ·∏ α_i^{σ_i}` with ω symmetric; β is folded into ω.
///
/// Per-axis ratio consistency is exactly the condition for a real
/// factorization; with it, `ω := w/α^σ` is automatically symmetric.
pub fn factor_weighting(
    s: &StepSet,
    w: &StepWeights,
) -> Result<(SymmetricWeighting, Vec<Rational>), FactorError> {
    let sq = squared_ratios(s, w).map_err(|(a, b, axis)| FactorError::NotFactorable {
        witness: (a, b),
        axis,
    })?;

    let exact_alpha: Option<Vec<Rational>> = sq.iter().map(|(a2, _)| exact_sqrt(a2)).collect();
    let Some(alpha) = exact_alpha else {
        let alpha_f: Vec<f64> = sq
            .iter()
            .map(|(a2, _)| a2.to_f64().unwrap_or(f64::NAN).sqrt())
            .collect();
        let omega_f = s
            .steps()
            .iter()
            .map(|st| {
                let mut v = w.get(st).to_f64().unwrap_or(f64::NAN);
                for (i, &c) in st.components().iter().enumerate() {
                    match c {
                        1 => v /= alpha_f[i],
                        -1 => v *= alpha_f[i],
                        _ => {}
                    }
                }
                (st.clone(), v)
            })
            .collect();
        return Err(FactorError::Irrational {
            approximate: ApproxFactor {
                alpha: alpha_f,
                omega: omega_f,
            },
        });
    };

    let omega_map: BTreeMap<Step, Rational> = s
        .steps()
        .iter()
        .map(|st| (st.clone(), w.get(st) / monomial(&alpha, st)))
        .collect();
    let omega = StepWeights { map: omega_map };
    debug_assert!(classify_symmetric(s, &omega).is_ok());
    Ok((SymmetricWeighting(omega), alpha))
}

/// Run the classification cascade: central, then symmetric, then factored.
pub fn classify_weighting(s: &StepSet, w: &StepWeights) -> WeightingClass {
    let central_err = match classify_central(s, w) {
        Ok(c) => return WeightingClass::Central(c),
        Err(e) => e,
    };
    if let Ok(sym) = classify_symmetric(s, w) {
        return WeightingClass::Symmetric(sym);
    }
    match factor_weighting(s, w) {
        Ok((omega, alpha)) => WeightingClass::Factored { omega, alpha },
        Err(factor_err) => WeightingClass::Unclassified {
            central: central_err,
            factor: factor_err,
        },
    }
}

/// α⁺, α⁻, r, m and the minimal-point parameter for an unweighted step set.
pub fn weight_profile(s: &StepSet, alpha: &[Rational]) -> Result<WeightProfile, WeightError> {
    weight_profile_with(s, None, alpha)
}

/// As [`weight_profile`], with the inventory weighted by ω when given.
pub fn weight_profile_with(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
) -> Result<WeightProfile, WeightError> {
    check_alpha(alpha)?;
    assert_eq!(alpha.len(), s.dimension(), "alpha has wrong arity");
    let one = Rational::one();
    let mut alpha_plus = Vec::with_capacity(alpha.len());
    let mut alpha_minus = Vec::with_capacity(alpha.len());
    let mut r = 0;
    let mut m = 0;
    for a in alpha {
        if *a <= one {
            r += 1;
        }
        if *a < one {
            m += 1;
        }
        alpha_plus.push(a.clone().max(one.clone()));
        alpha_minus.push(a.clone().min(one.clone()));
    }
    let s_plus = match omega {
        Some(w) => w.inventory_eval(s, &alpha_plus),
        None => s.inventory_eval(&alpha_plus),
    }
    .expect("positive evaluation point");
    let denom: Rational = alpha_minus.iter().fold(s_plus, |acc, a| acc * a);
    let t_minimal = Rational::one() / denom;
    Ok(WeightProfile {
        alpha_plus,
        alpha_minus,
        r,
        m,
        t_minimal,
    })
}

/// Drift of the α-weighted step set, `Σ_σ σ·∏ α_i^{σ_i}`.
pub fn weighted_drift(s: &StepSet, alpha: &[Rational]) -> Vec<Rational> {
    weighted_drift_with(s, None, alpha)
}

/// As [`weighted_drift`], with each step additionally weighted by ω.
pub fn weighted_drift_with(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
) -> Vec<Rational> {
    let mut d = vec![Rational::zero(); s.dimension()];
    for st in s.steps() {
        let mut w = monomial(alpha, st);
        if let Some(om) = omega {
            w *= om.get(st);
        }
        for (i, &c) in st.components().iter().enumerate() {
            match c {
                1 => d[i] += &w,
                -1 => d[i] -= &w,
                _ => {}
            }
        }
    }
    d
}
