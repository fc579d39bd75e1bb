//! Bracketed one-dimensional root finding and extremum search.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::serial;
use crate::Scalar;

pub const DEFAULT_MAX_ITER: usize = 200;
/// Default bracket width for roots.
pub const ROOT_TOL: f64 = 1e-11;
/// Default bracket width for extrema.
pub const EXTREMUM_TOL: f64 = 1e-10;

/// Relative inset applied to extremum brackets so that the objective is
/// never evaluated on the bracket ends.
const INTERIOR_INSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketKind {
    Root,
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub kind: BracketKind,
}

impl<T: Scalar> Bracket<T> {
    pub fn new(lo: T, hi: T, kind: BracketKind) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("bracket needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, kind })
    }

    pub fn root(lo: T, hi: T) -> Result<Self> {
        Self::new(lo, hi, BracketKind::Root)
    }

    pub fn minimum(lo: T, hi: T) -> Result<Self> {
        Self::new(lo, hi, BracketKind::Minimum)
    }

    pub fn maximum(lo: T, hi: T) -> Result<Self> {
        Self::new(lo, hi, BracketKind::Maximum)
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct SolveResult<T> {
    #[serde(serialize_with = "serial::num")]
    pub x_star: T,
    #[serde(serialize_with = "serial::num")]
    pub value: T,
    /// Final bracket width.
    #[serde(serialize_with = "serial::num")]
    pub residual_or_width: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Root of `objective` on a sign-changing bracket.
///
/// Illinois-modified regula falsi; whenever a step fails to halve the
/// bracket the next step is a bisection, so the bracket shrinks at least
/// geometrically. Stops when the bracket is no wider than `tol`.
pub fn find_root<T, F>(objective: F, bracket: Bracket<T>, tol: T) -> Result<SolveResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    find_root_with(objective, bracket, tol, DEFAULT_MAX_ITER)
}

pub fn find_root_with<T, F>(mut objective: F, bracket: Bracket<T>, tol: T, max_iter: usize) -> Result<SolveResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (objective(a), objective(b));
    let done = |x: T, fx: T, iterations| SolveResult { x_star: x, value: fx, residual_or_width: T::zero(), iterations, converged: true };
    if fa.is_zero() {
        return Ok(done(a, fa, 0));
    }
    if fb.is_zero() {
        return Ok(done(b, fb, 0));
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo: a.as_f64(), hi: b.as_f64(), f_lo: fa.as_f64(), f_hi: fb.as_f64() });
    }
    let half = T::lit(0.5);
    let mut side = 0i8;
    let mut bisect_next = false;
    for iter in 1..=max_iter {
        let width = b - a;
        if width <= tol {
            let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(SolveResult { x_star: x, value: fx, residual_or_width: width, iterations: iter - 1, converged: true });
        }
        let mid = a + half * width;
        let mut c = if bisect_next { mid } else { (a * fb - b * fa) / (fb - fa) };
        if !(c > a && c < b) {
            c = mid;
        }
        if c <= a || c >= b {
            // no representable point strictly inside
            let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(SolveResult { x_star: x, value: fx, residual_or_width: width, iterations: iter - 1, converged: width <= tol });
        }
        let fc = objective(c);
        if fc.is_zero() {
            return Ok(done(c, fc, iter));
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            if side == -1 {
                fb = fb * half;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa = fa * half;
            }
            side = 1;
        }
        bisect_next = !bisect_next && (b - a) > half * width;
    }
    Err(Error::MaxIterations(max_iter))
}

/// Golden-section search for the extremum of a unimodal objective.
///
/// The bracket is first inset by `1e-9` of its width on both sides. The
/// returned point is the best evaluated abscissa, so `value` is an actual
/// objective value.
pub fn find_extremum<T, F>(objective: F, bracket: Bracket<T>, tol: T) -> Result<SolveResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    find_extremum_with(objective, bracket, tol, DEFAULT_MAX_ITER)
}

pub fn find_extremum_with<T, F>(mut objective: F, bracket: Bracket<T>, tol: T, max_iter: usize) -> Result<SolveResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let sign = match bracket.kind {
        BracketKind::Minimum => T::one(),
        BracketKind::Maximum => -T::one(),
        BracketKind::Root => return Err(Error::InvalidArgument("root bracket passed to extremum search".into())),
    };
    let mut eval = |x: T| sign * objective(x);
    let inset = T::lit(INTERIOR_INSET) * bracket.width();
    let (mut a, mut b) = (bracket.lo + inset, bracket.hi - inset);
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    let mut iterations = 0;
    while b - a > tol {
        if iterations == max_iter {
            return Err(Error::MaxIterations(max_iter));
        }
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    let (x, fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok(SolveResult { x_star: x, value: sign * fx, residual_or_width: b - a, iterations, converged: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn square_root_of_two() {
        let res = find_root(|x: f64| x * x - 2.0, Bracket::root(1.0, 2.0).unwrap(), 1e-12).unwrap();
        assert!(res.converged);
        assert!(res.residual_or_width <= 1e-12);
        assert_relative_eq!(res.x_star, std::f64::consts::SQRT_2, max_relative = 1e-12);
    }

    #[test]
    fn linear_root_at_zero() {
        let res = find_root(|x: f64| x, Bracket::root(-1.0, 1.0).unwrap(), 1e-12).unwrap();
        assert!(res.x_star.abs() <= 1e-12);
    }

    #[test]
    fn no_sign_change_is_reported() {
        let err = find_root(|x: f64| x * x + 1.0, Bracket::root(-1.0, 1.0).unwrap(), 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn iteration_cap() {
        let err = find_root_with(|x: f64| x.powi(3) - 0.3, Bracket::root(0.0, 1.0).unwrap(), 1e-15, 3).unwrap_err();
        assert_eq!(err, Error::MaxIterations(3));
    }

    #[test]
    fn hard_root_converges_by_bisection_fallback() {
        // flat on one side: plain regula falsi stalls here
        let f = |x: f64| if x < 0.7 { -1e-12 } else { (x - 0.7).powi(9) + 1e-12 };
        let res = find_root(f, Bracket::root(0.0, 10.0).unwrap(), 1e-11).unwrap();
        assert!(res.converged && res.residual_or_width <= 1e-11);
    }

    #[test]
    fn extremum_examples() {
        let res = find_extremum(|x: f64| (x - 0.3).powi(2), Bracket::minimum(0.0, 1.0).unwrap(), 1e-10).unwrap();
        assert!((res.x_star - 0.3).abs() < 1e-7);
        assert!(res.residual_or_width <= 1e-10);
        let res = find_extremum(f64::sin, Bracket::maximum(0.0, std::f64::consts::PI).unwrap(), 1e-10).unwrap();
        assert!((res.x_star - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
        assert_relative_eq!(res.value, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| (3.0 * x).cos() + x * x;
        let b = Bracket::minimum(0.0, 2.0).unwrap();
        let r1 = find_extremum(f, b, 1e-10).unwrap();
        let r2 = find_extremum(f, b, 1e-10).unwrap();
        assert_eq!(r1.x_star.to_bits(), r2.x_star.to_bits());
        assert_eq!(r1.value.to_bits(), r2.value.to_bits());
    }

    #[test]
    fn single_precision() {
        let res = find_root(|x: f32| x * x - 2.0, Bracket::root(1.0f32, 2.0).unwrap(), 1e-6).unwrap();
        assert!((res.x_star - std::f32::consts::SQRT_2).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn extremum_beats_uniform_samples(c in 0.05f64..0.95, k in 0.5f64..5.0, maximize in any::<bool>()) {
            let f = move |x: f64| {
                let v = k * (x - c).powi(2) + (x - c).powi(4);
                if maximize { -v } else { v }
            };
            let b = if maximize { Bracket::maximum(0.0, 1.0) } else { Bracket::minimum(0.0, 1.0) }.unwrap();
            let res = find_extremum(f, b, 1e-10).unwrap();
            for i in 0..1000 {
                let x = i as f64 / 999.0;
                if maximize {
                    prop_assert!(res.value >= f(x) - 1e-9);
                } else {
                    prop_assert!(res.value <= f(x) + 1e-9);
                }
            }
        }

        #[test]
        fn roots_of_shifted_cubics(c in -0.9f64..0.9) {
            let res = find_root(|x: f64| (x - c).powi(3) + 0.1 * (x - c), Bracket::root(-1.0, 1.0).unwrap(), 1e-12).unwrap();
            prop_assert!((res.x_star - c).abs() <= 1e-12);
        }
    }
}
