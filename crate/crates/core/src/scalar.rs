//! Scalar abstraction shared by the evaluation and enumeration layers.
//!
//! The same code paths run over exact big integers/rationals (identity
//! checks, small n) and over `f64`/`f32` (convergence studies at large n).
//! [`Scalar`] is the semiring used by the dynamic-programming oracle;
//! [`FieldScalar`] adds division and is what inventory-polynomial evaluation
//! needs, since steps contribute `x^σ` with negative exponents.

use std::fmt::Debug;
use std::ops::{AddAssign, Div, MulAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Counting scalar: enough structure for layer-by-layer convolution.
pub trait Scalar:
    Clone + PartialEq + Debug + Zero + One + for<'a> AddAssign<&'a Self> + for<'a> MulAssign<&'a Self>
{
    /// Rough per-value memory footprint, used for enumeration budgets.
    const BYTES_PER_VALUE: usize;

    /// Exact conversion from a rational where representable.
    fn from_rational(r: &Rational) -> Option<Self>;

    /// Natural log of the (positive) value, usable far beyond f64 range.
    fn approx_ln(&self) -> f64;

    /// Rescale a layer in place when magnitudes threaten overflow.
    ///
    /// Returns the natural-log offset that was divided out (0 for exact
    /// types, which never rescale).
    fn renormalize(_layer: &mut [Self]) -> f64 {
        0.0
    }
}

/// Scalar with exact (or best-effort float) division.
pub trait FieldScalar: Scalar + Div<Output = Self> {}

fn bigint_ln(v: &BigInt) -> f64 {
    debug_assert!(v.is_positive());
    let bits = v.bits();
    if bits <= 512 {
        return v.to_f64().expect("small BigInt fits f64").ln();
    }
    // ln(v) = ln(v >> k) + k ln 2 with a 512-bit head.
    let k = bits - 512;
    let head: BigInt = v >> k;
    head.to_f64().expect("512-bit head fits f64").ln() + (k as f64) * std::f64::consts::LN_2
}

impl Scalar for BigInt {
    const BYTES_PER_VALUE: usize = 32;

    fn from_rational(r: &Rational) -> Option<Self> {
        r.is_integer().then(|| r.to_integer())
    }

    fn approx_ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        bigint_ln(&self.abs())
    }
}

impl Scalar for Rational {
    const BYTES_PER_VALUE: usize = 64;

    fn from_rational(r: &Rational) -> Option<Self> {
        Some(r.clone())
    }

    fn approx_ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        bigint_ln(&self.numer().abs()) - bigint_ln(&self.denom().abs())
    }
}

impl FieldScalar for Rational {}

/// Layers are rescaled by 2^-512 once any entry passes this threshold; the
/// next layer can then grow by the largest step-weight sum without overflow.
const RENORM_THRESHOLD: f64 = 1e250;

macro_rules! float_scalar {
    ($t:ty, $bytes:expr) => {
        impl Scalar for $t {
            const BYTES_PER_VALUE: usize = $bytes;

            fn from_rational(r: &Rational) -> Option<Self> {
                r.to_f64().map(|v| v as $t)
            }

            fn approx_ln(&self) -> f64 {
                (*self as f64).ln()
            }

            fn renormalize(layer: &mut [Self]) -> f64 {
                let max = layer.iter().fold(0.0f64, |m, v| m.max((*v as f64).abs()));
                if max <= RENORM_THRESHOLD {
                    return 0.0;
                }
                let scale = (2.0f64).powi(-512) as $t;
                for v in layer.iter_mut() {
                    *v *= scale;
                }
                512.0 * std::f64::consts::LN_2
            }
        }

        impl FieldScalar for $t {}
    };
}

float_scalar!(f64, 8);
float_scalar!(f32, 4);
