//! Assembly of the full asymptotic formula `γ·(β·S(α⁺))^n·n^(-r/2-m)`.
//!
//! The exponential base and the exponent are exact rationals; only the
//! leading constant γ picks up the irrational factors (√·, π) and is
//! reported at f64 precision, split by parity of the walk length.

use std::f64::consts::PI;

use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::critical::{contributing_points, ParitySign};
use crate::scalar::Scalar;
use crate::stepset::StepSet;
use crate::weighting::{weight_profile_with, SymmetricWeighting, WeightError};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AsymptoticsError {
    #[error("negative sign on axis {axis} requires alpha_j < 1")]
    DomainSign { axis: usize },
    #[error("slice polynomial P_{axis} is not positive at the contributing point")]
    DomainSlice { axis: usize },
    #[error("formula value exceeds the float range at n = {n}")]
    Overflow { n: u32 },
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// Per-dimension constant factor `c(z_j)`.
///
/// The four cases, at f64 precision:
/// `α_j > 1` → `1 - 1/α_j²`;
/// `α_j = 1` → `(2π)^{-1/2}·(2P_j)^{-1/2}·√S⁺·2`;
/// `α_j < 1, z_j > 0` → `(2π)^{-1/2}·(2P_j)^{-3/2}·S⁺^{3/2}·2/(1-α_j)²`;
/// `α_j < 1, z_j < 0` → the same with `(1+α_j)²` in the denominator.
pub fn constant_factor(
    axis: usize,
    alpha_j: &Rational,
    z_sign: i8,
    s_plus: &Rational,
    p_j_at_point: &Rational,
) -> Result<f64, AsymptoticsError> {
    let one = Rational::one();
    if z_sign < 0 && *alpha_j >= one {
        return Err(AsymptoticsError::DomainSign { axis });
    }
    if !p_j_at_point.is_positive() {
        return Err(AsymptoticsError::DomainSlice { axis });
    }
    let a = alpha_j.to_f64().expect("positive rational");
    let s = s_plus.to_f64().expect("positive rational");
    let p = p_j_at_point.to_f64().expect("positive rational");
    let value = if *alpha_j > one {
        // Exact in rational arithmetic; converted once at the end.
        (one.clone() - one / (alpha_j * alpha_j))
            .to_f64()
            .expect("finite rational")
    } else if *alpha_j == one {
        (2.0 * PI).powf(-0.5) * (2.0 * p).powf(-0.5) * s.sqrt() * 2.0
    } else {
        let denom = if z_sign > 0 { (1.0 - a) * (1.0 - a) } else { (1.0 + a) * (1.0 + a) };
        (2.0 * PI).powf(-0.5) * (2.0 * p).powf(-1.5) * s.powf(1.5) * 2.0 / denom
    };
    Ok(value)
}

/// One contributing point's share of γ.
#[derive(Clone, PartialEq, Debug)]
pub struct FactorBreakdown {
    /// The point's inventory argument ζ.
    pub s_argument: Vec<Rational>,
    pub parity: ParitySign,
    /// `c(z_j)` per axis.
    pub factors: Vec<f64>,
    pub product: f64,
}

/// The complete asymptotic description of a model.
#[derive(Clone, PartialEq, Debug)]
pub struct AsymptoticFormula {
    /// Overall rescale: reported growth is `(β·base)^n`.
    pub beta: Rational,
    /// `S(α⁺)` (ω-weighted for symmetric models).
    pub base: Rational,
    /// Half-integer `-r/2 - m`.
    pub exponent: Rational,
    pub gamma_even: f64,
    pub gamma_odd: f64,
    pub breakdown: Vec<FactorBreakdown>,
}

impl AsymptoticFormula {
    /// `β·base`, the growth rate actually observed in weighted counts.
    pub fn growth(&self) -> Rational {
        self.beta.clone() * self.base.clone()
    }
}

/// Exact exponential growth rate `S(α⁺)` of the α-weighted counts
/// (before the β^n rescale).
pub fn exponential_growth(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
) -> Result<Rational, WeightError> {
    let profile = weight_profile_with(s, omega, alpha)?;
    let v = match omega {
        Some(w) => w.inventory_eval(s, &profile.alpha_plus),
        None => s.inventory_eval(&profile.alpha_plus),
    };
    Ok(v.expect("positive evaluation point"))
}

/// Assemble base, exponent and the parity-split constant for a model.
///
/// Central models pass `omega = None` and their extracted `(α, β)`;
/// symmetric models pass their ω with `β = 1`.
pub fn asymptotic_formula(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
    beta: &Rational,
) -> Result<AsymptoticFormula, AsymptoticsError> {
    let profile = weight_profile_with(s, omega, alpha)?;
    let contributing = contributing_points(s, omega, alpha);
    let exponent = Rational::new(
        (-(profile.r as i64) - 2 * profile.m as i64).into(),
        2.into(),
    );

    let mut gamma_even = 0.0;
    let mut gamma_odd = 0.0;
    let mut breakdown = Vec::with_capacity(contributing.points.len());
    for cp in &contributing.points {
        let mut factors = Vec::with_capacity(s.dimension());
        let mut product = 1.0;
        for j in 0..s.dimension() {
            let mut rest = cp.point.s_argument.clone();
            rest.remove(j);
            let p_j = match omega {
                Some(w) => s
                    .decompose(j)
                    .p_with(&rest, &|st| {
                        Rational::from_rational(w.get(st)).ok_or_else(|| unreachable!())
                    })
                    .expect("nonzero argument"),
                None => s.decompose(j).p(&rest).expect("nonzero argument"),
            };
            let c = constant_factor(j, &alpha[j], cp.point.signs[j], &contributing.s_plus, &p_j)?;
            product *= c;
            factors.push(c);
        }
        gamma_even += product;
        match cp.parity {
            ParitySign::AlwaysPlus => gamma_odd += product,
            ParitySign::Alternating => gamma_odd -= product,
        }
        breakdown.push(FactorBreakdown {
            s_argument: cp.point.s_argument.clone(),
            parity: cp.parity,
            factors,
            product,
        });
    }

    Ok(AsymptoticFormula {
        beta: beta.clone(),
        base: contributing.s_plus,
        exponent,
        gamma_even,
        gamma_odd,
        breakdown,
    })
}

/// Plug a concrete length into the formula:
/// `β^n·base^n·n^exponent·γ_parity`, evaluated in log space.
pub fn evaluate_formula(f: &AsymptoticFormula, n: u32) -> Result<f64, AsymptoticsError> {
    assert!(n >= 1, "formula is an n → ∞ statement; need n ≥ 1");
    let gamma = if n % 2 == 0 { f.gamma_even } else { f.gamma_odd };
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let ln_growth = Scalar::approx_ln(&f.beta) + Scalar::approx_ln(&f.base);
    let ln_value = gamma.abs().ln()
        + n as f64 * ln_growth
        + f.exponent.to_f64().expect("half-integer") * (n as f64).ln();
    if ln_value > f64::MAX.ln() {
        return Err(AsymptoticsError::Overflow { n });
    }
    Ok(gamma.signum() * ln_value.exp())
}
