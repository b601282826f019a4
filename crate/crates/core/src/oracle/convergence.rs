//! Convergence acceleration for count sequences.
//!
//! Normalized count ratios admit an expansion in integer powers of 1/n, so
//! two-stage Richardson (Neville) extrapolation is applied per parity class.
//! The split is unconditional: subleading alternating terms otherwise poison
//! consecutive-n differences even for models whose leading constant has no
//! parity dependence.

use crate::scalar::Scalar;
use crate::Rational;

use super::OracleError;

/// A count sequence in log space: `(n, ln count)` for feasible n.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct LogCounts {
    samples: Vec<(u32, f64)>,
}

impl LogCounts {
    /// Keeps finite samples only and sorts them by n.
    pub fn new(mut samples: Vec<(u32, f64)>) -> Self {
        samples.retain(|(_, y)| y.is_finite());
        samples.sort_by_key(|&(n, _)| n);
        samples.dedup_by_key(|&mut (n, _)| n);
        LogCounts { samples }
    }

    /// Interpret `counts[n]` as the count at length n; nonpositive entries
    /// (infeasible parity) are skipped.
    pub fn from_counts(counts: &[f64]) -> Self {
        Self::new(
            counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0.0)
                .map(|(n, &c)| (n as u32, c.ln()))
                .collect(),
        )
    }

    pub fn samples(&self) -> &[(u32, f64)] {
        &self.samples
    }

    pub fn max_n(&self) -> u32 {
        self.samples.last().map(|&(n, _)| n).unwrap_or(0)
    }

    fn parity_class(&self, parity: u32) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter(|&&(n, _)| n >= 1 && n % 2 == parity)
            .map(|&(n, y)| (n as f64, y))
            .collect()
    }
}

/// Two-stage Neville extrapolation in 1/n over nodes `ns`.
///
/// Returns the final order-2 value, the residual (gap between the last two
/// order-2 values), and the order-2 tail used for trend detection.
fn richardson2(ns: &[f64], xs: &[f64]) -> Option<(f64, f64, Vec<f64>)> {
    if ns.len() < 4 {
        return None;
    }
    let t1: Vec<f64> = (1..ns.len())
        .map(|k| (ns[k] * xs[k] - ns[k - 1] * xs[k - 1]) / (ns[k] - ns[k - 1]))
        .collect();
    let n1 = &ns[1..];
    let t2: Vec<f64> = (1..t1.len())
        .map(|k| (n1[k] * t1[k] - n1[k - 1] * t1[k - 1]) / (n1[k] - n1[k - 1]))
        .collect();
    let last = *t2.last()?;
    let residual = (last - t2[t2.len() - 2]).abs();
    Some((last, residual, t2))
}

/// Residual trend over the order-2 tail.
///
/// A converging extrapolant has gaps that decay like a power of 1/n, so the
/// final gap sits well below the largest gap of the trailing half-window. A
/// drifting extrapolant (wrong exponent, non-power tail) keeps its gaps flat
/// or growing, at a size of order scale/n or larger.
///
/// Float enumeration bottoms out earlier: rounding noise in the counts is
/// amplified by roughly n per extrapolation stage, leaving the tail jittering
/// at around 1e-6 of scale instead of decaying. A window whose gaps all sit
/// below 1e-4 of scale is therefore accepted as settled; genuine drift stays
/// orders of magnitude above that at any usable n.
fn tail_converged(t2: &[f64]) -> bool {
    let take = (t2.len() / 2).max(8).min(t2.len());
    let window = &t2[t2.len() - take..];
    if window.iter().any(|v| !v.is_finite()) || window.len() < 3 {
        return false;
    }
    let diffs: Vec<f64> = window.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last = *diffs.last().unwrap();
    let max = diffs.iter().cloned().fold(0.0, f64::max);
    let scale = window.last().unwrap().abs().max(1.0);
    last <= 0.25 * max + 1e-9 * scale || max <= 1e-4 * scale
}

/// Extrapolated limit of one parity class.
#[derive(Clone, PartialEq, Debug)]
pub struct ParityLimit {
    pub estimate: f64,
    /// Gap between the last two extrapolants.
    pub residual: f64,
    pub samples: usize,
    pub converged: bool,
}

/// Parity-split extrapolation of the normalized ratio
/// `counts(n) / ((β·base)^n · n^exponent)`.
#[derive(Clone, PartialEq, Debug)]
pub struct ConvergenceReport {
    pub n_range: (u32, u32),
    pub even: Option<ParityLimit>,
    pub odd: Option<ParityLimit>,
    /// False when any populated class shows a growing residual trend.
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn gamma_even(&self) -> Option<f64> {
        self.even.as_ref().map(|p| p.estimate)
    }

    pub fn gamma_odd(&self) -> Option<f64> {
        self.odd.as_ref().map(|p| p.estimate)
    }

    /// Worst residual over populated classes.
    pub fn residual(&self) -> f64 {
        [&self.even, &self.odd]
            .into_iter()
            .flatten()
            .map(|p| p.residual)
            .fold(0.0, f64::max)
    }
}

const MIN_N_CONSTANT: u32 = 40;
const MIN_N_EXPONENT: u32 = 60;
const MIN_CLASS_SAMPLES: usize = 6;

fn class_limit(class: &[(f64, f64)], ln_growth: f64, exponent: f64) -> Option<ParityLimit> {
    if class.len() < MIN_CLASS_SAMPLES {
        return None;
    }
    let ns: Vec<f64> = class.iter().map(|&(n, _)| n).collect();
    let ratios: Vec<f64> = class
        .iter()
        .map(|&(n, y)| (y - n * ln_growth - exponent * n.ln()).exp())
        .collect();
    let (estimate, residual, t2) = richardson2(&ns, &ratios)?;
    Some(ParityLimit {
        estimate,
        residual,
        samples: class.len(),
        converged: tail_converged(&t2),
    })
}

/// Estimate the leading constant(s) of `counts(n) ~ γ·(β·base)^n·n^exponent`.
pub fn estimate_constant(
    counts: &LogCounts,
    beta: &Rational,
    base: &Rational,
    exponent: &Rational,
) -> Result<ConvergenceReport, OracleError> {
    if counts.max_n() < MIN_N_CONSTANT {
        return Err(OracleError::InsufficientData {
            needed: MIN_N_CONSTANT,
            got: counts.max_n(),
        });
    }
    let ln_growth = Scalar::approx_ln(beta) + Scalar::approx_ln(base);
    let e = num_traits::ToPrimitive::to_f64(exponent).expect("small exponent");
    let even = class_limit(&counts.parity_class(0), ln_growth, e);
    let odd = class_limit(&counts.parity_class(1), ln_growth, e);
    if even.is_none() && odd.is_none() {
        return Err(OracleError::InsufficientData {
            needed: MIN_N_CONSTANT,
            got: counts.max_n(),
        });
    }
    let converged = [&even, &odd].into_iter().flatten().all(|p| p.converged);
    let first_n = counts.samples().first().map(|&(n, _)| n).unwrap_or(0);
    Ok(ConvergenceReport {
        n_range: (first_n, counts.max_n()),
        even,
        odd,
        converged,
    })
}

/// Per-parity exponent fits and their combination.
#[derive(Clone, PartialEq, Debug)]
pub struct ExponentEstimate {
    pub estimate: f64,
    pub residual: f64,
    pub even: Option<f64>,
    pub odd: Option<f64>,
}

fn class_slope(class: &[(f64, f64)], ln_growth: f64) -> Option<(f64, f64, bool)> {
    if class.len() < MIN_CLASS_SAMPLES + 1 {
        return None;
    }
    let ys: Vec<f64> = class.iter().map(|&(n, y)| y - n * ln_growth).collect();
    let mut slopes = Vec::with_capacity(class.len() - 1);
    let mut mids = Vec::with_capacity(class.len() - 1);
    for k in 1..class.len() {
        let (n0, n1) = (class[k - 1].0, class[k].0);
        slopes.push((ys[k] - ys[k - 1]) / (n1.ln() - n0.ln()));
        mids.push(0.5 * (n0 + n1));
    }
    let (estimate, residual, t2) = richardson2(&mids, &slopes)?;
    Some((estimate, residual, tail_converged(&t2)))
}

/// Estimate the polynomial exponent of `counts(n) ~ γ·(β·base)^n·n^e`.
///
/// Slopes of `ln counts - n·ln(β·base)` against `ln n` are formed within
/// each parity class and extrapolated; classes are then averaged.
pub fn estimate_exponent(
    counts: &LogCounts,
    beta: &Rational,
    base: &Rational,
) -> Result<ExponentEstimate, OracleError> {
    if counts.max_n() < MIN_N_EXPONENT {
        return Err(OracleError::InsufficientData {
            needed: MIN_N_EXPONENT,
            got: counts.max_n(),
        });
    }
    let ln_growth = Scalar::approx_ln(beta) + Scalar::approx_ln(base);
    let even = class_slope(&counts.parity_class(0), ln_growth);
    let odd = class_slope(&counts.parity_class(1), ln_growth);

    let fits: Vec<&(f64, f64, bool)> = [&even, &odd].into_iter().flatten().collect();
    if fits.is_empty() {
        return Err(OracleError::InsufficientData {
            needed: MIN_N_EXPONENT,
            got: counts.max_n(),
        });
    }
    let worst = fits.iter().map(|f| f.1).fold(0.0, f64::max);
    if !fits.iter().any(|f| f.2) {
        return Err(OracleError::NonConvergence { residual: worst });
    }
    let mean = fits.iter().map(|f| f.0).sum::<f64>() / fits.len() as f64;
    let spread = if fits.len() == 2 {
        (fits[0].0 - fits[1].0).abs() / 2.0
    } else {
        0.0
    };
    Ok(ExponentEstimate {
        estimate: mean,
        residual: worst + spread,
        even: even.map(|f| f.0),
        odd: odd.map(|f| f.0),
    })
}
