//! Power, arithmetic, geometric and harmonic means of non-negative tuples,
//! and the gap ratio `(A - G) / (P_alpha - G)`.
//!
//! Conventions: `P_0` is the geometric mean, and `P_alpha = 0` when
//! `alpha < 0` and some coordinate is zero.

use std::ops::Deref;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ln1p_sub, pow1p_sub};
use crate::serial;
use crate::Scalar;

/// Relative spread `(max - min) / max` below which a tuple is treated as
/// constant and the ratio takes its limiting value.
pub const ALL_EQUAL_SPREAD: f64 = 1e-13;

/// Power-mean exponent `alpha` together with `r = 1 / alpha`.
///
/// When built from a rational literal the exact value is retained so
/// that regime boundaries can be compared without rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ExponentPair<T> {
    #[serde(serialize_with = "serial::num")]
    alpha: T,
    #[serde(serialize_with = "serial::num")]
    r: T,
    #[serde(serialize_with = "serial::opt_ratio")]
    exact_alpha: Option<Rational64>,
    #[serde(skip)]
    given_r: bool,
}

impl<T: Scalar> ExponentPair<T> {
    pub fn from_alpha(alpha: T) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidExponent { alpha: alpha.as_f64(), reason: "not finite" });
        }
        if alpha.is_zero() {
            return Err(Error::InvalidExponent { alpha: 0.0, reason: "alpha = 0 has no reciprocal" });
        }
        Ok(Self { alpha, r: alpha.recip(), exact_alpha: None, given_r: false })
    }

    pub fn from_r(r: T) -> Result<Self> {
        if !r.is_finite() || r.is_zero() {
            return Err(Error::InvalidExponent { alpha: r.recip().as_f64(), reason: "r must be finite and non-zero" });
        }
        Ok(Self { alpha: r.recip(), r, exact_alpha: None, given_r: true })
    }

    pub fn from_rational(alpha: Rational64) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::InvalidExponent { alpha: 0.0, reason: "alpha = 0 has no reciprocal" });
        }
        let a = alpha.to_f64().ok_or(Error::InvalidExponent { alpha: f64::NAN, reason: "not representable" })?;
        let r = alpha.recip().to_f64().unwrap_or(f64::NAN);
        Ok(Self { alpha: T::lit(a), r: T::lit(r), exact_alpha: Some(alpha), given_r: false })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn exact_alpha(&self) -> Option<Rational64> {
        self.exact_alpha
    }

    pub fn exact_r(&self) -> Option<Rational64> {
        self.exact_alpha.map(|a| a.recip())
    }

    /// Exact `alpha` for boundary comparisons: the rational literal if
    /// there was one, else the exact value of whichever float was given.
    pub fn comparison_alpha(&self) -> Option<Rational64> {
        self.exact_alpha.or_else(|| {
            if self.given_r {
                crate::regimes::dyadic(self.r).filter(|q| !q.is_zero()).map(|q| q.recip())
            } else {
                crate::regimes::dyadic(self.alpha)
            }
        })
    }

    /// `alpha = 1` makes the ratio identically 1.
    pub fn ensure_ratio_admissible(&self) -> Result<()> {
        let is_one = match self.exact_alpha {
            Some(a) => a == Rational64::from_integer(1),
            None => self.alpha == T::one(),
        };
        if is_one {
            return Err(Error::InvalidExponent { alpha: 1.0, reason: "alpha = 1 makes the ratio trivial" });
        }
        Ok(())
    }

    /// Bitwise comparison of the floating values; used to match instances.
    pub fn same_instance(&self, other: &Self) -> bool {
        self.alpha == other.alpha
    }
}

/// A finite tuple of non-negative reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
#[serde(transparent)]
pub struct SampleVector<T> {
    #[serde(serialize_with = "serial::num_vec")]
    xs: Vec<T>,
}

impl<T: Scalar> SampleVector<T> {
    pub fn new(xs: Vec<T>) -> Result<Self> {
        validate(&xs)?;
        Ok(Self { xs })
    }

    /// Rescales to unit sum.
    pub fn normalized(xs: Vec<T>) -> Result<Self> {
        validate(&xs)?;
        let sum = xs.iter().fold(T::zero(), |acc, &x| acc + x);
        if !(sum > T::zero()) {
            return Err(Error::InvalidArgument("cannot normalise a tuple with zero sum".into()));
        }
        Ok(Self { xs: xs.into_iter().map(|x| x / sum).collect() })
    }

    pub fn sum(&self) -> T {
        self.xs.iter().fold(T::zero(), |acc, &x| acc + x)
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.sum() - T::one()).abs() <= tol
    }

    pub fn into_inner(self) -> Vec<T> {
        self.xs
    }
}

impl<T> Deref for SampleVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.xs
    }
}

fn validate<T: Scalar>(xs: &[T]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (index, &x) in xs.iter().enumerate() {
        if !x.is_finite() || x < T::zero() {
            return Err(Error::InvalidCoordinate { index, value: x.as_f64() });
        }
    }
    Ok(())
}

fn count<T: Scalar>(xs: &[T]) -> T {
    T::from_count(xs.len())
}

pub fn arithmetic_mean<T: Scalar>(xs: &[T]) -> Result<T> {
    validate(xs)?;
    Ok(xs.iter().fold(T::zero(), |acc, &x| acc + x) / count(xs))
}

/// Geometric mean through the mean of logarithms; exactly zero when any
/// coordinate is zero.
pub fn geometric_mean<T: Scalar>(xs: &[T]) -> Result<T> {
    validate(xs)?;
    if xs.iter().any(|x| x.is_zero()) {
        return Ok(T::zero());
    }
    let mean_log = xs.iter().fold(T::zero(), |acc, &x| acc + x.ln()) / count(xs);
    Ok(mean_log.exp())
}

pub fn harmonic_mean<T: Scalar>(xs: &[T]) -> Result<T> {
    power_mean(xs, -T::one())
}

/// `P_alpha(xs)`. `alpha = 0` gives the geometric mean.
pub fn power_mean<T: Scalar>(xs: &[T], alpha: T) -> Result<T> {
    validate(xs)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidExponent { alpha: alpha.as_f64(), reason: "not finite" });
    }
    if alpha.is_zero() {
        return geometric_mean(xs);
    }
    let has_zero = xs.iter().any(|x| x.is_zero());
    if alpha < T::zero() && has_zero {
        return Ok(T::zero());
    }
    // Scale by the extreme coordinate that keeps every power <= 1.
    let scale =
        if alpha > T::zero() { xs.iter().fold(T::zero(), |m, &x| m.max(x)) } else { xs.iter().fold(T::infinity(), |m, &x| m.min(x)) };
    if scale.is_zero() {
        return Ok(T::zero());
    }
    let mean = xs.iter().fold(T::zero(), |acc, &x| acc + (x / scale).powf(alpha)) / count(xs);
    Ok(scale * mean.powf(alpha.recip()))
}

/// `P_a(1 + u) - 1` for offsets `u` whose mean is taken to be exactly zero
/// (the linear term is dropped). Accurate to full relative precision as
/// `u -> 0`, where the result is of second order.
pub(crate) fn power_mean_offset<T: Scalar>(u: &[T], a: T) -> T {
    let m = count(u);
    if a.is_zero() {
        let mean_log = u.iter().fold(T::zero(), |acc, &v| acc + ln1p_sub(v)) / m;
        return mean_log.exp_m1();
    }
    let mean = u.iter().fold(T::zero(), |acc, &v| acc + pow1p_sub(v, a)) / m;
    (mean.ln_1p() / a).exp_m1()
}

/// Whether the tuple is constant up to [`ALL_EQUAL_SPREAD`].
pub fn is_all_equal<T: Scalar>(xs: &[T]) -> bool {
    let (lo, hi) = xs.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo <= T::lit(ALL_EQUAL_SPREAD) * hi
}

/// `(A_n - G_n) / (P_alpha - G_n)`.
///
/// At a constant tuple the ratio is replaced by its limit `r = 1/alpha`.
/// With a zero coordinate and `alpha > 0` it equals `A_n / P_alpha`.
/// Away from those cases the differences are formed from offsets relative
/// to `A_n`, so the second-order smallness near the diagonal does not cost
/// precision.
pub fn ratio_gap<T: Scalar>(xs: &[T], e: &ExponentPair<T>) -> Result<T> {
    validate(xs)?;
    if xs.len() < 2 {
        return Err(Error::InvalidDimension { n: xs.len(), reason: "the ratio needs at least two coordinates" });
    }
    e.ensure_ratio_admissible()?;
    let alpha = e.alpha();
    if is_all_equal(xs) {
        return Ok(e.r());
    }
    if xs.iter().any(|x| x.is_zero()) {
        if alpha < T::zero() {
            return Err(Error::DegenerateZero);
        }
        return Ok(arithmetic_mean(xs)? / power_mean(xs, alpha)?);
    }
    let mean = arithmetic_mean(xs)?;
    let u: Vec<T> = xs.iter().map(|&x| x / mean - T::one()).collect();
    let g_off = power_mean_offset(&u, T::zero());
    let p_off = power_mean_offset(&u, alpha);
    Ok(-g_off / (p_off - g_off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pair(alpha: f64) -> ExponentPair<f64> {
        ExponentPair::from_alpha(alpha).unwrap()
    }

    #[test]
    fn power_mean_examples() {
        assert_relative_eq!(power_mean(&[4.0, 4.0, 4.0], -2.0).unwrap(), 4.0, max_relative = 1e-15);
        assert_eq!(power_mean(&[0.0, 1.0], -1.0).unwrap(), 0.0);
        assert_relative_eq!(power_mean(&[1.0, 4.0], 0.5).unwrap(), 2.25, max_relative = 1e-15);
        assert_relative_eq!(power_mean(&[2.0, 8.0], 0.0).unwrap(), 4.0, max_relative = 1e-15);
        assert_eq!(power_mean::<f64>(&[], 2.0), Err(Error::EmptyInput));
    }

    #[test]
    fn named_means() {
        assert_relative_eq!(geometric_mean(&[2.0, 8.0]).unwrap(), 4.0, max_relative = 1e-15);
        assert_eq!(harmonic_mean(&[0.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_relative_eq!(harmonic_mean(&[1.0, 2.0]).unwrap(), 4.0 / 3.0, max_relative = 1e-15);
        // n - 1 ones followed by 1/n
        let n = 4;
        let mut xs = vec![1.0; n - 1];
        xs.push(1.0 / n as f64);
        assert_relative_eq!(arithmetic_mean(&xs).unwrap(), 0.8125, max_relative = 1e-15);
        assert!(matches!(geometric_mean(&[1.0, -1.0]), Err(Error::InvalidCoordinate { index: 1, .. })));
    }

    #[test]
    fn exponent_pair_validation() {
        assert!(ExponentPair::<f64>::from_alpha(0.0).is_err());
        assert!(pair(1.0).ensure_ratio_admissible().is_err());
        let p = ExponentPair::<f64>::from_rational(Rational64::new(5, 7)).unwrap();
        assert_eq!(p.exact_r(), Some(Rational64::new(7, 5)));
        assert_relative_eq!(p.alpha() * p.r(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn ratio_gap_examples() {
        assert_relative_eq!(ratio_gap(&[0.3, 0.3, 0.3], &pair(0.5)).unwrap(), 2.0);
        // continuity value is r in general
        assert_relative_eq!(ratio_gap(&[1.0, 1.0, 1.0, 1.0], &pair(-1.0)).unwrap(), -1.0);
        let third = 1.0 / 3.0;
        let v = ratio_gap(&[0.0, third, third, third], &pair(0.5)).unwrap();
        assert!((4.0 / 3.0 - 1e-12..=4.0 + 1e-12).contains(&v), "{v}");
        assert_eq!(ratio_gap(&[0.0, 0.5, 0.5], &pair(-1.0)), Err(Error::DegenerateZero));
    }

    #[test]
    fn ratio_gap_matches_direct_formula_far_from_diagonal() {
        let xs = [0.1, 0.7, 0.2, 1.5];
        for alpha in [-2.0, -0.5, 0.3, 2.0, 3.5] {
            let a = arithmetic_mean(&xs).unwrap();
            let g = geometric_mean(&xs).unwrap();
            let p = power_mean(&xs, alpha).unwrap();
            assert_relative_eq!(ratio_gap(&xs, &pair(alpha)).unwrap(), (a - g) / (p - g), max_relative = 1e-12);
        }
    }

    #[test]
    fn continuity_fill_converges_linearly() {
        let base = [1.0, 1.0, 1.0, 1.0];
        let d = [1.0, -2.0, 0.5, 0.5];
        for alpha in [-1.0, 0.5, 2.0, 1.0 / 7.0] {
            let e = pair(alpha);
            let err = |eps: f64| {
                let xs: Vec<f64> = base.iter().zip(d).map(|(b, di)| b * (1.0 + eps * di)).collect();
                (ratio_gap(&xs, &e).unwrap() - e.r()).abs()
            };
            let (e1, e2, e3) = (err(1e-2), err(1e-3), err(1e-4));
            assert!(e2 < e1 && e3 < e2);
            assert!(e3 <= 2.0 * e1 * 1e-2, "alpha {alpha}: {e1} {e3}");
        }
    }

    #[test]
    fn power_mean_f32() {
        let v: f32 = power_mean(&[1.0f32, 4.0], 0.5).unwrap();
        assert!((v - 2.25).abs() < 1e-6);
    }

    fn positive_tuple() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.05f64..20.0, 2..8)
    }

    proptest! {
        #[test]
        fn homogeneity(xs in positive_tuple(), c in 0.01f64..100.0, alpha in -4.0f64..4.0) {
            let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
            let lhs = power_mean(&scaled, alpha).unwrap();
            let rhs = c * power_mean(&xs, alpha).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }

        #[test]
        fn ratio_gap_scale_invariant(xs in positive_tuple(), c in 0.01f64..100.0, alpha in prop::sample::select(vec![-3.0, -1.0, 0.25, 0.5, 0.75, 2.0, 5.0])) {
            prop_assume!(!is_all_equal(&xs));
            let e = pair(alpha);
            let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
            let lhs = ratio_gap(&scaled, &e).unwrap();
            let rhs = ratio_gap(&xs, &e).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300));
        }

        #[test]
        fn strictly_increasing_in_exponent(xs in positive_tuple()) {
            let (lo, hi) = xs.iter().fold((f64::MAX, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
            prop_assume!(hi - lo > 1e-3 * hi);
            let grid: Vec<f64> = (0..=40).map(|k| -5.0 + 0.25 * k as f64).collect();
            let values: Vec<f64> = grid.iter().map(|&a| power_mean(&xs, a).unwrap()).collect();
            for w in values.windows(2) {
                prop_assert!(w[1] > w[0], "{:?}", w);
            }
        }
    }
}
