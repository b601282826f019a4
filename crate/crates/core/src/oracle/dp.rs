//! Exact and floating-point walk enumeration.
//!
//! Counts are accumulated over a dense dual-buffer table indexed by lattice
//! position. Confined tables cover the box [0, n_max]^d, which contains every
//! position a walk in the orthant can reach; unconfined tables cover
//! [-n_max, n_max]^d and drop the orthant restriction (used for conservation
//! cross-checks). Float tables rescale layers that approach the f64 overflow
//! threshold and track the accumulated log offset, so `log_total` stays
//! correct far beyond 1e308.

use std::collections::BTreeMap;

use num_traits::{Pow, Zero};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::stepset::StepSet;
use crate::weighting::{classify_central, CentralityError, StepWeights, WeightError};
use crate::{Int, Rational};

use super::LogCounts;

/// Default enumeration budget: 2 GiB of table state.
pub const DEFAULT_BUDGET_BYTES: u64 = 2 * 1024 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumeration needs {required_bytes} bytes, budget is {budget_bytes}")]
    BudgetExceeded {
        required_bytes: u64,
        budget_bytes: u64,
    },
    #[error("sequence too short: need counts up to n = {needed}, got {got}")]
    InsufficientData { needed: u32, got: u32 },
    #[error("extrapolation did not settle (residual {residual:.3e})")]
    NonConvergence { residual: f64 },
    #[error("weighting is not central: {0}")]
    NotCentral(#[from] CentralityError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("weight does not fit the requested scalar type")]
    UnrepresentableWeight,
}

/// Options for [`enumerate`].
#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    /// Retain per-position counts for every layer, not just totals.
    pub keep_layers: bool,
    /// Maximum bytes of table state before refusing to run.
    pub budget_bytes: u64,
    /// Restrict walks to the orthant (coordinates never go negative).
    pub confined: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            keep_layers: false,
            budget_bytes: DEFAULT_BUDGET_BYTES,
            confined: true,
        }
    }
}

/// Enumeration results for lengths 0..=n_max.
#[derive(Clone, Debug)]
pub struct EnumerationTable<T> {
    dimension: usize,
    n_max: u32,
    totals: Vec<T>,
    origin: Vec<T>,
    log_offsets: Vec<f64>,
    layers: Option<Vec<BTreeMap<Vec<u32>, T>>>,
}

impl<T: Scalar> EnumerationTable<T> {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Total walk count of length n (all endpoints), up to the log offset.
    pub fn total(&self, n: u32) -> &T {
        &self.totals[n as usize]
    }

    pub fn totals(&self) -> &[T] {
        &self.totals
    }

    /// Count of length-n walks returning to the origin, up to the log offset.
    pub fn excursion(&self, n: u32) -> &T {
        &self.origin[n as usize]
    }

    pub fn excursions(&self) -> &[T] {
        &self.origin
    }

    /// Accumulated rescaling offset for layer n; zero for exact scalars.
    pub fn log_offset(&self, n: u32) -> f64 {
        self.log_offsets[n as usize]
    }

    pub fn log_total(&self, n: u32) -> f64 {
        self.totals[n as usize].approx_ln() + self.log_offsets[n as usize]
    }

    pub fn log_excursion(&self, n: u32) -> f64 {
        self.origin[n as usize].approx_ln() + self.log_offsets[n as usize]
    }

    /// Per-position counts for layer n, if layers were kept.
    pub fn layer(&self, n: u32) -> Option<&BTreeMap<Vec<u32>, T>> {
        self.layers.as_ref().map(|ls| &ls[n as usize])
    }

    pub fn log_counts(&self) -> LogCounts {
        LogCounts::new((0..=self.n_max).map(|n| (n, self.log_total(n))).collect())
    }

    pub fn excursion_log_counts(&self) -> LogCounts {
        LogCounts::new(
            (0..=self.n_max)
                .map(|n| (n, self.log_excursion(n)))
                .collect(),
        )
    }
}

fn pow_saturating(base: u128, exp: u32) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

fn required_bytes(
    states: u128,
    bytes_per_value: usize,
    dimension: usize,
    n_max: u32,
    opts: &EnumerateOptions,
) -> u128 {
    let b = bytes_per_value as u128;
    let mut required = 2u128.saturating_mul(states).saturating_mul(b);
    if opts.keep_layers {
        // Sparse layers store coordinates and node overhead next to each value.
        let entry = b + 4 * dimension as u128 + 64;
        for n in 0..=n_max as u128 {
            let reachable = pow_saturating(n + 1, dimension as u32).min(states);
            required = required.saturating_add(reachable.saturating_mul(entry));
        }
    }
    required
}

/// Count weighted walks of every length up to n_max.
///
/// `weights` of `None` counts paths; otherwise each path contributes the
/// product of its step weights. Weights must be representable in T.
pub fn enumerate<T: Scalar>(
    set: &StepSet,
    weights: Option<&StepWeights>,
    n_max: u32,
    opts: &EnumerateOptions,
) -> Result<EnumerationTable<T>, OracleError> {
    assert!(
        opts.confined || !opts.keep_layers,
        "kept layers are only defined for confined enumeration"
    );
    let d = set.dimension();
    let side = if opts.confined {
        n_max as u128 + 1
    } else {
        2 * n_max as u128 + 1
    };
    let states = side.checked_pow(d as u32).unwrap_or(u128::MAX);
    let required = required_bytes(states, T::BYTES_PER_VALUE, d, n_max, opts);
    if required > opts.budget_bytes as u128 || states > usize::MAX as u128 {
        return Err(OracleError::BudgetExceeded {
            required_bytes: required.min(u64::MAX as u128) as u64,
            budget_bytes: opts.budget_bytes,
        });
    }
    let side = side as usize;
    let states = states as usize;

    let step_weights: Option<Vec<T>> = match weights {
        Some(w) => Some(
            set.steps()
                .iter()
                .map(|s| T::from_rational(w.get(s)).ok_or(OracleError::UnrepresentableWeight))
                .collect::<Result<_, _>>()?,
        ),
        None => None,
    };

    let mut strides = vec![1isize; d];
    for ax in (0..d.saturating_sub(1)).rev() {
        strides[ax] = strides[ax + 1] * side as isize;
    }
    // Flat index delta and per-axis components for each step.
    let moves: Vec<(isize, &[i8])> = set
        .steps()
        .iter()
        .map(|s| {
            let off: isize = s
                .components()
                .iter()
                .zip(&strides)
                .map(|(&c, &st)| c as isize * st)
                .sum();
            (off, s.components())
        })
        .collect();

    let origin_coord = if opts.confined { 0usize } else { n_max as usize };
    let origin_idx: usize = strides.iter().map(|&st| origin_coord * st as usize).sum();

    let mut old = vec![T::zero(); states];
    let mut new = vec![T::zero(); states];
    old[origin_idx] = T::one();

    let collect_layer = |layer: &[T]| -> BTreeMap<Vec<u32>, T> {
        let mut map = BTreeMap::new();
        let mut coords = vec![0u32; d];
        for v in layer.iter() {
            if !v.is_zero() {
                map.insert(coords.clone(), v.clone());
            }
            for ax in (0..d).rev() {
                coords[ax] += 1;
                if (coords[ax] as usize) < side {
                    break;
                }
                coords[ax] = 0;
            }
        }
        map
    };

    let mut totals = vec![T::one()];
    let mut origin = vec![T::one()];
    let mut log_offsets = vec![0.0f64; n_max as usize + 1];
    let mut layers: Option<Vec<BTreeMap<Vec<u32>, T>>> = opts.keep_layers.then(Vec::new);
    if let Some(ls) = layers.as_mut() {
        ls.push(collect_layer(&old));
    }

    for n in 1..=n_max {
        for v in new.iter_mut() {
            v.set_zero();
        }
        let mut coords = vec![0usize; d];
        for idx in 0..states {
            let mut acc = T::zero();
            'steps: for (si, (off, comps)) in moves.iter().enumerate() {
                for ax in 0..d {
                    let c = coords[ax] as isize - comps[ax] as isize;
                    if c < 0 || c >= side as isize {
                        continue 'steps;
                    }
                }
                let src = &old[(idx as isize - off) as usize];
                if src.is_zero() {
                    continue;
                }
                match &step_weights {
                    Some(ws) => {
                        let mut term = src.clone();
                        term *= &ws[si];
                        acc += &term;
                    }
                    None => acc += src,
                }
            }
            new[idx] = acc;
            for ax in (0..d).rev() {
                coords[ax] += 1;
                if coords[ax] < side {
                    break;
                }
                coords[ax] = 0;
            }
        }
        let delta = T::renormalize(&mut new);
        log_offsets[n as usize] = log_offsets[n as usize - 1] + delta;
        let mut tot = T::zero();
        for v in new.iter() {
            tot += v;
        }
        totals.push(tot);
        origin.push(new[origin_idx].clone());
        if let Some(ls) = layers.as_mut() {
            ls.push(collect_layer(&new));
        }
        std::mem::swap(&mut old, &mut new);
    }

    Ok(EnumerationTable {
        dimension: d,
        n_max,
        totals,
        origin,
        log_offsets,
        layers,
    })
}

/// Exact excursion counts (walks returning to the origin) up to n_max.
pub fn excursions(set: &StepSet, n_max: u32) -> Result<Vec<Int>, OracleError> {
    let table = enumerate::<Int>(set, None, n_max, &EnumerateOptions::default())?;
    Ok(table.excursions().to_vec())
}

/// Result of the dual-route evaluation check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyEvaluation {
    pub pass: bool,
    pub first_failure: Option<u32>,
    pub checked_n: u32,
}

/// Check the central-weight identity by two independent routes.
///
/// Route one enumerates with exact rational step weights. Route two
/// enumerates plain path counts by endpoint and evaluates
/// β^n · Σ_ι q(ι; n) · α^ι. The routes must agree exactly for every n.
pub fn verify_evaluation(
    set: &StepSet,
    weights: &StepWeights,
    n_max: u32,
) -> Result<VerifyEvaluation, OracleError> {
    let central = classify_central(set, weights)?;
    let alpha = central.alpha.clone();
    let beta = central.beta.clone();

    let unweighted = enumerate::<Int>(
        set,
        None,
        n_max,
        &EnumerateOptions {
            keep_layers: true,
            ..EnumerateOptions::default()
        },
    )?;
    let weighted = enumerate::<Rational>(set, Some(weights), n_max, &EnumerateOptions::default())?;

    let mut first_failure = None;
    let mut beta_pow = Rational::from_integer(1.into());
    for n in 0..=n_max {
        let layer = unweighted.layer(n).expect("layers were kept");
        let mut sum = Rational::zero();
        for (pos, count) in layer {
            let mut term = Rational::from_integer(count.clone());
            for (ax, &c) in pos.iter().enumerate() {
                if c > 0 {
                    term *= Pow::pow(&alpha[ax], c as i32);
                }
            }
            sum += &term;
        }
        let lhs = &beta_pow * sum;
        if lhs != *weighted.total(n) {
            first_failure = Some(n);
            break;
        }
        beta_pow *= &beta;
    }
    Ok(VerifyEvaluation {
        pass: first_failure.is_none(),
        first_failure,
        checked_n: n_max,
    })
}
