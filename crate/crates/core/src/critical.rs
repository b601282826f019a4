//! Critical points of the lifted rational function and their classification.
//!
//! For a model with weight vector α the critical candidates are the 2^d
//! points `x = ε·α`, ε ∈ {±1}^d.  A candidate contributes to the leading
//! asymptotics when its inventory value has the maximal magnitude `S(α⁺)`,
//! with negative signs allowed only on axes where `α_j < 1`; a value of
//! exactly `-S(α⁺)` flips sign with the parity of the walk length.

use num_traits::{One, Signed, Zero};

use crate::stepset::{EvalError, StepSet};
use crate::weighting::{weight_profile_with, SymmetricWeighting};
use crate::Rational;

/// How a contributing point enters the constant: added for all n, or added
/// for even n and subtracted for odd n.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParitySign {
    AlwaysPlus,
    Alternating,
}

/// One of the 2^d critical candidates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CriticalPoint {
    /// Sign choice ε ∈ {±1}^d.
    pub signs: Vec<i8>,
    /// `x_k = ε_k·α_k`.
    pub x: Vec<Rational>,
    /// `t = 1/(x_1⋯x_d·S(ε))`; `None` when `S(ε) = 0`.
    pub t: Option<Rational>,
    /// ζ with `ζ_k = α_k` when `α_k > 1` (sign collapsed), else `ζ_k = ε_k`.
    pub s_argument: Vec<Rational>,
    /// `S(ζ)` (ω-weighted when the model carries a symmetric weighting).
    pub s_value: Rational,
}

/// A contributing critical point with its parity tag.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ContributingPoint {
    pub point: CriticalPoint,
    pub parity: ParitySign,
}

/// All contributing points; the all-positive point is always first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ContributingSet {
    /// `S(α⁺)`, the common magnitude.
    pub s_plus: Rational,
    pub points: Vec<ContributingPoint>,
}

fn inventory(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    x: &[Rational],
) -> Result<Rational, EvalError> {
    match omega {
        Some(w) => w.inventory_eval(s, x),
        None => s.inventory_eval(x),
    }
}

fn point_for_signs(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
    signs: Vec<i8>,
) -> CriticalPoint {
    let one = Rational::one();
    let x: Vec<Rational> = signs
        .iter()
        .zip(alpha)
        .map(|(&e, a)| if e == 1 { a.clone() } else { -a.clone() })
        .collect();
    let eps: Vec<Rational> = signs
        .iter()
        .map(|&e| {
            if e == 1 {
                one.clone()
            } else {
                -one.clone()
            }
        })
        .collect();
    // At x = ε·α the rescaled argument α/x is just ε again.
    let s_eps = inventory(s, omega, &eps).expect("±1 coordinates are nonzero");
    let t = if s_eps.is_zero() {
        None
    } else {
        let prod: Rational = x.iter().fold(Rational::one(), |acc, v| acc * v);
        Some(Rational::one() / (prod * s_eps))
    };
    let s_argument: Vec<Rational> = signs
        .iter()
        .zip(alpha)
        .map(|(&e, a)| {
            if *a > one {
                a.clone()
            } else if e == 1 {
                one.clone()
            } else {
                -one.clone()
            }
        })
        .collect();
    let s_value = inventory(s, omega, &s_argument).expect("nonzero argument");
    CriticalPoint {
        signs,
        x,
        t,
        s_argument,
        s_value,
    }
}

/// All 2^d sign candidates in binary-counter order (bit k set ⇔ ε_k = -1);
/// the all-positive point comes first.
pub fn enumerate_critical_points(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
) -> Vec<CriticalPoint> {
    let d = s.dimension();
    assert_eq!(alpha.len(), d, "alpha has wrong arity");
    (0..1usize << d)
        .map(|mask| {
            let signs: Vec<i8> = (0..d).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
            point_for_signs(s, omega, alpha, signs)
        })
        .collect()
}

/// The finitely minimal point `(α⁻, t_{α⁻})`.
pub fn minimal_point(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
) -> (Vec<Rational>, Rational) {
    let profile = weight_profile_with(s, omega, alpha).expect("positive alpha");
    (profile.alpha_minus, profile.t_minimal)
}

/// Contributing points: negative signs only on axes with `α_j < 1`, and
/// `|S(ζ)| = S(α⁺)` exactly.
pub fn contributing_points(
    s: &StepSet,
    omega: Option<&SymmetricWeighting>,
    alpha: &[Rational],
) -> ContributingSet {
    let d = s.dimension();
    assert_eq!(alpha.len(), d, "alpha has wrong arity");
    let one = Rational::one();
    let free: Vec<usize> = (0..d).filter(|&k| alpha[k] < one).collect();
    let profile = weight_profile_with(s, omega, alpha).expect("positive alpha");
    let s_plus = inventory(s, omega, &profile.alpha_plus).expect("positive point");

    let mut points = Vec::new();
    for mask in 0..1usize << free.len() {
        let mut signs = vec![1i8; d];
        for (bit, &axis) in free.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                signs[axis] = -1;
            }
        }
        let point = point_for_signs(s, omega, alpha, signs);
        let parity = if point.s_value == s_plus {
            ParitySign::AlwaysPlus
        } else if point.s_value == -s_plus.clone() {
            ParitySign::Alternating
        } else {
            debug_assert!(point.s_value.abs() < s_plus);
            continue;
        };
        points.push(ContributingPoint { point, parity });
    }
    ContributingSet { s_plus, points }
}
