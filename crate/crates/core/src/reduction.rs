//! Reductions that justify looking only at two-value configurations.
//!
//! * Three numbers with fixed sum `sigma` and product `pi` form a curve
//!   parametrised by the middle value `t`; along it `x^r + y^r + z^r` is
//!   monotone, so extremes sit where two of the numbers coincide.
//! * Near the diagonal, differences of power means behave like their
//!   exponents: `(P_a - P_b) / (P_c - P_d) -> (a - b) / (c - d)`.
//! * [`two_value_config`] builds the point `(x, ..., x, 1 - (n-1)x)`.
//!
//! The sum and product constraints are called `sigma` and `pi` here so
//! that `alpha` keeps meaning the power-mean exponent.
//!
//! The second-order term of a power mean near the diagonal is
//! `P_a(1 + eps d) - 1 = (a - 1) eps^2 sum(d_j^2) / (2n) + o(eps^2)` for a
//! zero-sum direction `d`; the factor `1/n` matters for
//! [`second_order_coefficient`] but cancels in the limit of the ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::{power_mean_offset, SampleVector};
use crate::serial;
use crate::solver::{find_root, Bracket};
use crate::Scalar;

/// Slack below zero at which a discriminant is still clamped to zero.
pub const DISCRIMINANT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct CurveParams<T> {
    #[serde(serialize_with = "serial::num")]
    pub sum_c: T,
    #[serde(serialize_with = "serial::num")]
    pub prod_c: T,
    #[serde(serialize_with = "serial::num")]
    pub t_lo: T,
    #[serde(serialize_with = "serial::num")]
    pub t_hi: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct CurvePoint<T> {
    #[serde(serialize_with = "serial::num")]
    pub t: T,
    #[serde(serialize_with = "serial::num")]
    pub x: T,
    #[serde(serialize_with = "serial::num")]
    pub y: T,
    #[serde(serialize_with = "serial::num")]
    pub z: T,
}

/// `kappa(t) = -8t^3 + 4 sigma t^2 - 4 pi`, whose zeros in `(0, sigma/2)`
/// bound the curve.
pub fn kappa<T: Scalar>(t: T, sum_c: T, prod_c: T) -> T {
    let four = T::lit(4.0);
    (T::lit(-8.0) * t + four * sum_c) * t * t - four * prod_c
}

pub fn curve_params<T: Scalar>(sum_c: T, prod_c: T) -> Result<CurveParams<T>> {
    let degenerate = || Error::ConstraintDegenerate { sum: sum_c.as_f64(), prod: prod_c.as_f64() };
    if !(sum_c > T::zero() && prod_c > T::zero()) || !sum_c.is_finite() || !prod_c.is_finite() {
        return Err(degenerate());
    }
    if !(sum_c.powi(3) > T::lit(27.0) * prod_c) {
        return Err(degenerate());
    }
    let third = sum_c / T::lit(3.0);
    let half = sum_c / T::lit(2.0);
    let k = |t: T| kappa(t, sum_c, prod_c);
    let tol = T::epsilon() * T::lit(4.0) * sum_c;
    let t_lo = find_root(k, Bracket::root(T::zero(), third)?, tol)?.x_star;
    let t_hi = find_root(k, Bracket::root(third, half)?, tol)?.x_star;
    Ok(CurveParams { sum_c, prod_c, t_lo, t_hi })
}

/// The point with middle value `y = t`; `x` and `z` are the roots of
/// `w^2 - (sigma - t) w + pi/t`.
pub fn curve_point<T: Scalar>(t: T, cp: &CurveParams<T>) -> Result<CurvePoint<T>> {
    let span = cp.t_hi - cp.t_lo;
    let slack = T::epsilon() * T::lit(16.0) * cp.sum_c;
    if !(t >= cp.t_lo - slack && t <= cp.t_hi + slack) || span <= T::zero() {
        return Err(Error::OutOfDomain { x: t.as_f64(), lo: cp.t_lo.as_f64(), hi: cp.t_hi.as_f64() });
    }
    let rest = cp.sum_c - t;
    let q = cp.prod_c / t;
    let mut disc = rest * rest - T::lit(4.0) * q;
    if disc < T::zero() {
        if disc < -T::lit(DISCRIMINANT_SLACK) {
            return Err(Error::OutOfDomain { x: t.as_f64(), lo: cp.t_lo.as_f64(), hi: cp.t_hi.as_f64() });
        }
        disc = T::zero();
    }
    let z = (rest + disc.sqrt()) / T::lit(2.0);
    // smaller root from the product, free of cancellation
    let x = q / z;
    Ok(CurvePoint { t, x, y: t, z })
}

/// `x^r + y^r + z^r` along the curve.
pub fn h_power_sum<T: Scalar>(t: T, cp: &CurveParams<T>, r: T) -> Result<T> {
    let p = curve_point(t, cp)?;
    Ok(p.x.powf(r) + p.y.powf(r) + p.z.powf(r))
}

/// Slope of the chord of `s -> s^r` between `lo < hi`.
fn chord_slope<T: Scalar>(lo: T, hi: T, r: T) -> T {
    let d = hi - lo;
    let rel = d / lo;
    // hi^r - lo^r = lo^r expm1(r ln(hi/lo))
    lo.powf(r) * (r * rel.ln_1p()).exp_m1() / d
}

/// `dh/dt = r (y-x)(z-y) / (y (x-z)) * (slope(y, z) - slope(x, y))`, where
/// `slope` is the chord slope of `s^r`. Needs `t` strictly inside the curve.
pub fn h_prime<T: Scalar>(t: T, cp: &CurveParams<T>, r: T) -> Result<T> {
    if !(t > cp.t_lo && t < cp.t_hi) {
        return Err(Error::OutOfDomain { x: t.as_f64(), lo: cp.t_lo.as_f64(), hi: cp.t_hi.as_f64() });
    }
    if r.is_zero() || r == T::one() {
        return Err(Error::InvalidExponent { alpha: r.recip().as_f64(), reason: "h' needs r not in {0, 1}" });
    }
    let p = curve_point(t, cp)?;
    let (x, y, z) = (p.x, p.y, p.z);
    if !(x < y && y < z) {
        return Err(Error::OutOfDomain { x: t.as_f64(), lo: cp.t_lo.as_f64(), hi: cp.t_hi.as_f64() });
    }
    let gap = chord_slope(y, z, r) - chord_slope(x, y, r);
    Ok(r * (y - x) * (z - y) / (y * (x - z)) * gap)
}

/// `(x, ..., x, 1 - (n-1)x)`.
pub fn two_value_config<T: Scalar>(x: T, n: usize) -> Result<SampleVector<T>> {
    if n < 3 {
        return Err(Error::InvalidDimension { n, reason: "two-value configurations need n >= 3" });
    }
    let m1 = T::from_count(n - 1);
    let hi = m1.recip();
    if !(x >= T::zero() && x <= hi) {
        return Err(Error::OutOfDomain { x: x.as_f64(), lo: 0.0, hi: hi.as_f64() });
    }
    // 1/(n-1) is rarely representable; its rounded value is the end point
    let last = if x == hi { T::zero() } else { (-m1).mul_add(x, T::one()).max(T::zero()) };
    let mut xs = vec![x; n - 1];
    xs.push(last);
    SampleVector::new(xs)
}

fn offsets<T: Scalar>(direction: &[T], eps: T) -> Result<Vec<T>> {
    if direction.len() < 2 {
        return Err(Error::InvalidArgument("direction needs at least two coordinates".into()));
    }
    let sum = direction.iter().fold(T::zero(), |acc, &d| acc + d);
    let size = direction.iter().fold(T::zero(), |acc, &d| acc + d.abs());
    if size.is_zero() || sum.abs() > T::lit(1e-12) * size {
        return Err(Error::InvalidArgument("direction must be non-zero and sum to zero".into()));
    }
    let u: Vec<T> = direction.iter().map(|&d| eps * d).collect();
    for (index, &v) in u.iter().enumerate() {
        if !(v > -T::one()) {
            return Err(Error::InvalidCoordinate { index, value: (T::one() + v).as_f64() });
        }
    }
    Ok(u)
}

/// `(P_a - P_b) / (P_c - P_d)` at `base (1 + eps d)`, evaluated on offsets
/// from `base` so that it stays accurate for small `eps`.
pub fn mean_difference_ratio<T: Scalar>(base: T, direction: &[T], eps: T, a: T, b: T, c: T, d: T) -> Result<T> {
    if c == d {
        return Err(Error::InvalidArgument("c and d must differ".into()));
    }
    if !(base > T::zero()) {
        return Err(Error::InvalidCoordinate { index: 0, value: base.as_f64() });
    }
    // P_e(base (1 + u)) = base (1 + offset_e); base cancels in the ratio
    let u = offsets(direction, eps)?;
    let num = power_mean_offset(&u, a) - power_mean_offset(&u, b);
    let den = power_mean_offset(&u, c) - power_mean_offset(&u, d);
    Ok(num / den)
}

/// `(P_a - P_b) 2n / (eps^2 sum d_j^2)` at `1 + eps d`; tends to `a - b`.
pub fn second_order_coefficient<T: Scalar>(direction: &[T], eps: T, a: T, b: T) -> Result<T> {
    let u = offsets(direction, eps)?;
    let n = T::from_count(u.len());
    let sq = direction.iter().fold(T::zero(), |acc, &d| acc + d * d);
    let diff = power_mean_offset(&u, a) - power_mean_offset(&u, b);
    Ok(diff * T::lit(2.0) * n / (eps * eps * sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ratio_from_f;
    use crate::means::{power_mean, ratio_gap, ExponentPair};
    use crate::profile::ProfileParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn six() -> CurveParams<f64> {
        curve_params(6.0, 6.0).unwrap()
    }

    fn interior(cp: &CurveParams<f64>, m: usize) -> Vec<f64> {
        (1..m).map(|k| cp.t_lo + (cp.t_hi - cp.t_lo) * k as f64 / m as f64).collect()
    }

    #[test]
    fn curve_params_examples() {
        let cp = six();
        assert!(cp.t_lo < 2.0 && 2.0 < cp.t_hi);
        assert!(kappa(cp.t_lo, 6.0, 6.0).abs() <= 1e-11);
        assert!(kappa(cp.t_hi, 6.0, 6.0).abs() <= 1e-11);
        assert!(matches!(curve_params(3.0, 1.0), Err(Error::ConstraintDegenerate { .. })));
        assert!(curve_params(-1.0, 1.0).is_err());
    }

    #[test]
    fn curve_endpoints_merge_values() {
        let cp = six();
        let lo = curve_point(cp.t_lo, &cp).unwrap();
        assert_relative_eq!(lo.x, lo.y, max_relative = 1e-7);
        assert!(lo.y < lo.z);
        let hi = curve_point(cp.t_hi, &cp).unwrap();
        assert_relative_eq!(hi.y, hi.z, max_relative = 1e-7);
        assert!(hi.x < hi.y);
        assert!(curve_point(cp.t_hi + 0.1, &cp).is_err());
    }

    #[test]
    fn constraints_hold_along_curve() {
        let cp = six();
        let mut ts = interior(&cp, 1000);
        ts.extend([cp.t_lo, cp.t_hi]);
        for t in ts {
            let p = curve_point(t, &cp).unwrap();
            assert!((p.x + p.y + p.z - 6.0).abs() / 6.0 <= 1e-12, "t {t}");
            assert!((p.x * p.y * p.z - 6.0).abs() / 6.0 <= 1e-10, "t {t}");
            assert!(p.x <= p.y * (1.0 + 1e-7) && p.y <= p.z * (1.0 + 1e-7));
        }
    }

    #[test]
    fn h_prime_signs() {
        let cp = six();
        for t in interior(&cp, 21) {
            assert!(h_prime(t, &cp, 2.0).unwrap() < 0.0);
            assert!(h_prime(t, &cp, 0.5).unwrap() > 0.0);
            assert!(h_prime(t, &cp, -1.0).unwrap() > 0.0);
        }
        assert!(h_prime(cp.t_lo, &cp, 2.0).is_err());
        assert!(h_prime(2.5, &cp, 1.0).is_err());
    }

    #[test]
    fn h_prime_matches_finite_differences() {
        let cp = six();
        for r in [2.0, 0.5, -1.0, 3.7] {
            for t in interior(&cp, 20) {
                let step = 1e-6;
                let fd = (h_power_sum(t + step, &cp, r).unwrap() - h_power_sum(t - step, &cp, r).unwrap()) / (2.0 * step);
                assert_relative_eq!(h_prime(t, &cp, r).unwrap(), fd, max_relative = 1e-5);
            }
        }
    }

    #[test]
    fn two_value_examples() {
        let v = two_value_config(0.2, 4).unwrap();
        assert_eq!(&v[..3], &[0.2, 0.2, 0.2]);
        assert_relative_eq!(v[3], 0.4, max_relative = 1e-15);
        assert!((v.sum() - 1.0f64).abs() <= 1e-15);
        let v = two_value_config(0.25, 4).unwrap();
        assert!(crate::means::is_all_equal(&v));
        assert!(two_value_config(0.6, 3).is_err());
        assert_eq!(two_value_config(1.0 / 3.0, 4).unwrap()[3], 0.0);
        assert!(two_value_config(0.1, 2).is_err());
        let e = ExponentPair::from_alpha(0.5).unwrap();
        let pp = ProfileParams::new(3, e).unwrap();
        let via_profile = ratio_from_f(pp.f(0.3).unwrap()).finite().unwrap();
        let direct = ratio_gap(&two_value_config(0.3, 3).unwrap(), &e).unwrap();
        assert_relative_eq!(direct, via_profile, max_relative = 1e-12);
    }

    #[test]
    fn mean_difference_ratio_examples() {
        let d = [1.0, -2.0, 1.0];
        let q = mean_difference_ratio(1.0, &d, 1e-6, 0.0, 1.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(q, 2.0, epsilon = 1e-5);
        let q = mean_difference_ratio(3.0, &d, 1e-6, 2.0, 1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(q, 1.0, epsilon = 1e-5);
        assert!(mean_difference_ratio(1.0, &d, 1e-3, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(mean_difference_ratio(1.0, &[1.0, 1.0, 1.0], 1e-3, 0.0, 1.0, 0.5, 1.0).is_err());
        assert!(mean_difference_ratio(1.0, &d, 0.6, 0.0, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn mean_difference_ratio_agrees_with_direct_evaluation() {
        let d = [2.0, -1.0, 0.0, -3.0, 2.0];
        let eps = 1e-2;
        let xs: Vec<f64> = d.iter().map(|v| 1.0 + eps * v).collect();
        let pm = |e: f64| power_mean(&xs, e).unwrap();
        let direct = (pm(-1.0) - pm(0.0)) / (pm(1.0) - pm(2.0));
        assert_relative_eq!(mean_difference_ratio(1.0, &d, eps, -1.0, 0.0, 1.0, 2.0).unwrap(), direct, max_relative = 1e-9);
    }

    #[test]
    fn second_order_coefficient_has_the_one_over_n_factor() {
        for d in [vec![1.0, -2.0, 1.0], vec![2.0, -1.0, 0.0, -3.0, 2.0]] {
            let k = second_order_coefficient(&d, 1e-5, 2.0, -1.0).unwrap();
            assert_relative_eq!(k, 3.0, max_relative = 1e-4);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn curve_constraints(sum in 1.0f64..20.0, frac in 0.05f64..0.95, s in 0.02f64..0.98) {
            let prod = frac * sum.powi(3) / 27.0;
            let cp = curve_params(sum, prod).unwrap();
            let t = cp.t_lo + s * (cp.t_hi - cp.t_lo);
            let p = curve_point(t, &cp).unwrap();
            prop_assert!((p.x + p.y + p.z - sum).abs() / sum <= 1e-12);
            prop_assert!((p.x * p.y * p.z - prod).abs() / prod <= 1e-10);
            prop_assert!(p.x <= p.y && p.y <= p.z);
        }
    }
}
