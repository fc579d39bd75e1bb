//! Scalar abstraction and the small compensated kernels shared by the
//! mean and profile evaluators.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the numerical core is generic over: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal. Never fails for the primitive floats.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

const SERIES_CUTOFF: f64 = 0.25;

/// `ln(1 + u) - u`, accurate when `|u|` is small.
pub fn ln1p_sub<T: Scalar>(u: T) -> T {
    if u.abs() > T::lit(SERIES_CUTOFF) {
        return u.ln_1p() - u;
    }
    // -u^2/2 + u^3/3 - ...
    let eps = T::epsilon();
    let mut pow = u * u;
    let mut sum = T::zero();
    let mut k = 2usize;
    let mut sign = -T::one();
    loop {
        let term = sign * pow / T::from_count(k);
        sum = sum + term;
        if term.abs() <= eps * sum.abs() || k > 200 {
            break;
        }
        pow = pow * u;
        sign = -sign;
        k += 1;
    }
    sum
}

/// `exp(y) - 1 - y`, accurate when `|y|` is small.
pub fn expm1_sub<T: Scalar>(y: T) -> T {
    if y.abs() > T::lit(SERIES_CUTOFF) {
        return y.exp_m1() - y;
    }
    let eps = T::epsilon();
    let mut term = y * y / T::lit(2.0);
    let mut sum = term;
    let mut k = 3usize;
    while term.abs() > eps * sum.abs() && k < 200 {
        term = term * y / T::from_count(k);
        sum = sum + term;
        k += 1;
    }
    sum
}

/// `(1 + u)^a - 1 - a·u`, the part of the binomial power beyond its
/// tangent line, accurate for small `|u|`.
pub fn pow1p_sub<T: Scalar>(u: T, a: T) -> T {
    if u.abs() > T::lit(SERIES_CUTOFF) {
        return (a * u.ln_1p()).exp() - T::one() - a * u;
    }
    let l = u.ln_1p();
    expm1_sub(a * l) + a * ln1p_sub(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels_match_direct_formulas_away_from_zero() {
        for &u in &[-0.9, -0.3, 0.3, 2.0] {
            let l: f64 = ln1p_sub(u);
            assert!((l - (f64::ln_1p(u) - u)).abs() < 1e-15);
            let e: f64 = expm1_sub(u);
            assert!((e - (f64::exp_m1(u) - u)).abs() < 1e-15);
        }
    }

    #[test]
    fn kernels_are_second_order_near_zero() {
        let u = 1e-6f64;
        assert!((ln1p_sub(u) / (-u * u / 2.0) - 1.0).abs() < 1e-5);
        assert!((expm1_sub(u) / (u * u / 2.0) - 1.0).abs() < 1e-5);
        // (1+u)^a - 1 - a u ~ a(a-1)/2 u^2
        let a = 0.5;
        let expect = a * (a - 1.0) / 2.0 * u * u;
        assert!((pow1p_sub(u, a) / expect - 1.0).abs() < 1e-5);
        // both branches agree at the cutoff
        let lo = pow1p_sub(0.2499999f64, -1.5);
        let hi = pow1p_sub(0.2500001f64, -1.5);
        assert!((lo - hi).abs() < 1e-6);
    }

    #[test]
    fn generic_over_f32() {
        let v: f32 = pow1p_sub(0.01f32, 2.0);
        assert!((v - 1e-4).abs() < 1e-9);
    }
}
