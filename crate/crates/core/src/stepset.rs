//! Reflectable step sets and their inventory polynomial.
//!
//! A step set lives in `{-1,0,1}^d` and must be closed under negating any
//! single coordinate.  All arithmetic here is exact by default; contributing
//! point detection downstream relies on exact equality of inventory values.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::FieldScalar;

/// One lattice step; components are each -1, 0 or +1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Step(Vec<i8>);

impl Step {
    pub fn new(components: Vec<i8>) -> Self {
        Step(components)
    }

    pub fn components(&self) -> &[i8] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// The step with component `axis` negated.
    pub fn reflect(&self, axis: usize) -> Step {
        let mut c = self.0.clone();
        c[axis] = -c[axis];
        Step(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Step {
    /// Tuple form, e.g. `(1,0,-1)`; also the key syntax in model files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed step `{0}`; expected e.g. (1,0,-1)")]
pub struct StepParseError(String);

impl FromStr for Step {
    type Err = StepParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| StepParseError(s.to_string()))?;
        let mut comps = Vec::new();
        for part in inner.split(',') {
            let c: i8 = part
                .trim()
                .parse()
                .map_err(|_| StepParseError(s.to_string()))?;
            comps.push(c);
        }
        if comps.is_empty() {
            return Err(StepParseError(s.to_string()));
        }
        Ok(Step(comps))
    }
}

/// A single reason a raw step list failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Dimension 0 models are meaningless.
    InvalidDimension,
    EmptyStepSet,
    /// Raw step whose length differs from the model dimension.
    DimensionMismatch { step_index: usize, found: usize },
    ComponentOutOfRange { step_index: usize, value: i64 },
    DuplicateStep { step: Step },
    /// `step` reflected across `axis` is missing from the set.
    NotReflectable { step: Step, axis: usize },
    /// No step moves along `axis`.
    TrivialDimension { axis: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidDimension => write!(f, "dimension must be at least 1"),
            Violation::EmptyStepSet => write!(f, "step set is empty"),
            Violation::DimensionMismatch { step_index, found } => {
                write!(f, "step #{step_index} has {found} components")
            }
            Violation::ComponentOutOfRange { step_index, value } => {
                write!(f, "step #{step_index} has component {value} outside -1..=1")
            }
            Violation::DuplicateStep { step } => write!(f, "duplicate step {step}"),
            Violation::NotReflectable { step, axis } => {
                write!(f, "reflection of {step} across axis {axis} is missing")
            }
            Violation::TrivialDimension { axis } => {
                write!(f, "no step moves along axis {axis}")
            }
        }
    }
}

/// Validation failure carrying every violation found, not just the first.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid step set: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("coordinate {axis} is zero; inventory evaluation needs nonzero coordinates")]
    ZeroCoordinate { axis: usize },
    #[error("weight not representable in the requested scalar type")]
    UnrepresentableWeight,
}

/// Validated reflectable step set with steps in canonical sorted order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepSet {
    dimension: usize,
    steps: Vec<Step>,
}

/// Validate a raw step list into a [`StepSet`], reporting all violations.
pub fn validate(dimension: usize, raw_steps: &[Vec<i64>]) -> Result<StepSet, ValidationError> {
    let mut violations = Vec::new();
    if dimension == 0 {
        violations.push(Violation::InvalidDimension);
    }
    if raw_steps.is_empty() {
        violations.push(Violation::EmptyStepSet);
    }

    let mut steps: Vec<Step> = Vec::with_capacity(raw_steps.len());
    for (idx, raw) in raw_steps.iter().enumerate() {
        if raw.len() != dimension {
            violations.push(Violation::DimensionMismatch {
                step_index: idx,
                found: raw.len(),
            });
            continue;
        }
        let mut ok = true;
        for &v in raw {
            if !(-1..=1).contains(&v) {
                violations.push(Violation::ComponentOutOfRange {
                    step_index: idx,
                    value: v,
                });
                ok = false;
            }
        }
        if ok {
            steps.push(Step(raw.iter().map(|&v| v as i8).collect()));
        }
    }

    steps.sort();
    let mut deduped: Vec<Step> = Vec::with_capacity(steps.len());
    for s in steps {
        if deduped.last() == Some(&s) {
            violations.push(Violation::DuplicateStep { step: s });
        } else {
            deduped.push(s);
        }
    }

    for s in &deduped {
        for axis in 0..dimension {
            if s.components()[axis] != 0 {
                let r = s.reflect(axis);
                if deduped.binary_search(&r).is_err() {
                    violations.push(Violation::NotReflectable {
                        step: s.clone(),
                        axis,
                    });
                }
            }
        }
    }
    for axis in 0..dimension {
        if !deduped.iter().any(|s| s.components()[axis] != 0) {
            violations.push(Violation::TrivialDimension { axis });
        }
    }

    if violations.is_empty() {
        Ok(StepSet {
            dimension,
            steps: deduped,
        })
    } else {
        Err(ValidationError { violations })
    }
}

impl StepSet {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Steps in canonical (lexicographic) order.
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn contains(&self, step: &Step) -> bool {
        self.steps.binary_search(step).is_ok()
    }

    /// Component-wise sum of all steps; zero for any reflectable set.
    pub fn drift(&self) -> Vec<i64> {
        let mut d = vec![0i64; self.dimension];
        for s in &self.steps {
            for (i, &c) in s.components().iter().enumerate() {
                d[i] += c as i64;
            }
        }
        d
    }

    /// `S(x) = Σ_σ x^σ` with per-step weights supplied by `weight`.
    ///
    /// Internal workhorse behind the public evaluation entry points.
    pub(crate) fn inventory_eval_with<T, F>(&self, x: &[T], weight: F) -> Result<T, EvalError>
    where
        T: FieldScalar,
        F: Fn(&Step) -> Result<T, EvalError>,
    {
        assert_eq!(x.len(), self.dimension, "evaluation point has wrong arity");
        let inv = invert_coords(x)?;
        let mut acc = T::zero();
        for s in &self.steps {
            let mut term = weight(s)?;
            for (i, &c) in s.components().iter().enumerate() {
                match c {
                    1 => term *= &x[i],
                    -1 => term *= &inv[i],
                    _ => {}
                }
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// Exact inventory-polynomial evaluation `S(x) = Σ_σ ∏_i x_i^{σ_i}`.
    pub fn inventory_eval<T: FieldScalar>(&self, x: &[T]) -> Result<T, EvalError> {
        self.inventory_eval_with(x, |_| Ok(T::one()))
    }

    /// The decomposition `S(x) = (x_k + 1/x_k)·P_k + Q_k` along `axis`.
    pub fn decompose(&self, axis: usize) -> InventoryDecomposition<'_> {
        assert!(axis < self.dimension, "axis out of range");
        InventoryDecomposition { set: self, axis }
    }
}

/// View of the inventory polynomial split along one axis:
/// `S(x) = (x_k + 1/x_k)·P_k + Q_k`, with `P_k`, `Q_k` free of `x_k`.
#[derive(Clone, Copy, Debug)]
pub struct InventoryDecomposition<'a> {
    set: &'a StepSet,
    axis: usize,
}

impl InventoryDecomposition<'_> {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub(crate) fn slice_eval_with<T, F>(
        &self,
        component: i8,
        x_rest: &[T],
        weight: &F,
    ) -> Result<T, EvalError>
    where
        T: FieldScalar,
        F: Fn(&Step) -> Result<T, EvalError>,
    {
        assert_eq!(
            x_rest.len(),
            self.set.dimension - 1,
            "expected point with coordinate {} removed",
            self.axis
        );
        let inv = invert_coords(x_rest)?;
        let mut acc = T::zero();
        for s in &self.set.steps {
            if s.components()[self.axis] != component {
                continue;
            }
            let mut term = weight(s)?;
            let mut j = 0;
            for (i, &c) in s.components().iter().enumerate() {
                if i == self.axis {
                    continue;
                }
                match c {
                    1 => term *= &x_rest[j],
                    -1 => term *= &inv[j],
                    _ => {}
                }
                j += 1;
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// `P_k` evaluated at a point with coordinate `k` removed.
    pub fn p<T: FieldScalar>(&self, x_rest: &[T]) -> Result<T, EvalError> {
        self.p_with(x_rest, &|_| Ok(T::one()))
    }

    /// `Q_k` evaluated at a point with coordinate `k` removed.
    pub fn q<T: FieldScalar>(&self, x_rest: &[T]) -> Result<T, EvalError> {
        self.slice_eval_with(0, x_rest, &|_| Ok(T::one()))
    }

    pub(crate) fn p_with<T, F>(&self, x_rest: &[T], weight: &F) -> Result<T, EvalError>
    where
        T: FieldScalar,
        F: Fn(&Step) -> Result<T, EvalError>,
    {
        let plus = self.slice_eval_with(1, x_rest, weight)?;
        let minus = self.slice_eval_with(-1, x_rest, weight)?;
        // Reflectability makes the two slices the same multiset of terms; a
        // validated set evaluates them to identical values.
        assert!(plus == minus, "reflectable invariant broken in P_k slices");
        Ok(plus)
    }
}

/// `(P_k, Q_k)` of the decomposition `S(x) = (x_k + 1/x_k)·P_k + Q_k`.
pub fn pq_eval<T: FieldScalar>(
    s: &StepSet,
    k: usize,
    x_rest: &[T],
) -> Result<(T, T), EvalError> {
    let d = s.decompose(k);
    Ok((d.p(x_rest)?, d.q(x_rest)?))
}

/// Unweighted drift `Σ_σ σ`.
pub fn drift(s: &StepSet) -> Vec<i64> {
    s.drift()
}

fn invert_coords<T: FieldScalar>(x: &[T]) -> Result<Vec<T>, EvalError> {
    x.iter()
        .enumerate()
        .map(|(axis, v)| {
            if v.is_zero() {
                Err(EvalError::ZeroCoordinate { axis })
            } else {
                Ok(T::one() / v.clone())
            }
        })
        .collect()
}

/// The 2d axis unit steps (N/S/E/W pattern) in dimension `d`.
pub fn simple_steps(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(2 * d);
    for i in 0..d {
        for sign in [1i64, -1] {
            let mut v = vec![0i64; d];
            v[i] = sign;
            out.push(v);
        }
    }
    out
}
