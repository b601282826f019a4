//! Asymptotic enumeration of weighted lattice walks confined to the orthant.
//!
//! A model is a reflectable step set `S ⊆ {-1,0,1}^d` (closed under negating
//! any single coordinate) together with positive per-step weights.  For
//! central weightings `w_σ = β·∏ α_i^{σ_i}`, and more generally for products
//! of a central weighting with an axis-symmetric one, the weighted number of
//! walks of length `n` that start at the origin and stay in `ℕ^d` satisfies
//!
//! ```text
//! q(n) ~ γ · (β·S(α⁺))^n · n^(-r/2 - m)
//! ```
//!
//! where `α⁺` clamps the weights below at 1, `r` counts weights ≤ 1 and `m`
//! counts weights < 1.  This crate computes the full triple (base, exponent,
//! leading constant with its parity split) exactly where possible, and ships
//! an exact dynamic-programming oracle plus convergence acceleration to
//! cross-check every computed quantity against actual counts.
//!
//! Axes are 0-indexed throughout the API.

pub mod asymptotics;
pub mod critical;
pub mod model;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod ser;
pub mod stepset;
pub mod weighting;

/// Exact rational scalar used for all symbolic quantities.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer used for exact counts.
pub type Int = num_bigint::BigInt;

/// Enumeration table holding exact integer counts.
pub type ExactTable = oracle::EnumerationTable<Int>;
/// Enumeration table holding exact rational (weighted) counts.
pub type RationalTable = oracle::EnumerationTable<Rational>;
/// Enumeration table holding floating-point counts with log renormalization.
pub type FloatTable = oracle::EnumerationTable<f64>;

/// Shorthand for an integer-valued [`Rational`].
pub fn rational_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `num/den` as a [`Rational`].  Panics if `den == 0`.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
