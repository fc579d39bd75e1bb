//! The six `(n, r)` regimes that fix the monotone structure of the profile
//! `f`, and the non-trivial crossing `W(mu) = 1` that separates its pieces.
//!
//! | tag               | condition                 | `mu`            | interior extremum of `f` |
//! |-------------------|---------------------------|-----------------|--------------------------|
//! | `NEG_R`           | `r < 0`                   | `(1/n, 1/(n-1))`| minimum `nu_1`           |
//! | `FRAC_R`          | `0 < r < 1`               | `(0, 1/n)`      | maximum `nu_2`           |
//! | `LOW_R_SMALL_N`   | `1 < r < 2`, `n < r/(r-1)`| `(0, 1/n)`      | minimum `nu_3`           |
//! | `LOW_R_LARGE_N`   | `1 < r <= 2`, `n >= r/(r-1)`| none          | none                     |
//! | `HIGH_R_LARGE_N`  | `r >= 2`, `n >= r`        | none            | none                     |
//! | `HIGH_R_SMALL_N`  | `r > 2`, `n < r`          | `(1/n, 1/(n-1))`| maximum `nu_4`           |
//!
//! `r = 2` always lands in `LOW_R_LARGE_N`; both candidate rows describe an
//! increasing `f` there.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::ExponentPair;
use crate::profile::ProfileParams;
use crate::serial;
use crate::solver::{find_root, Bracket};
use crate::Scalar;

/// Offset (times `1/n`) from the trivial root `x = 1/n` where the search
/// for `mu` starts.
pub const MU_START_OFFSET: f64 = 1e-6;
/// Required `|W(mu) - 1|`.
pub const MU_RESIDUAL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegimeTag {
    NegR,
    FracR,
    LowRSmallN,
    LowRLargeN,
    HighRLargeN,
    HighRSmallN,
}

/// Which half of `[0, 1/(n-1)]` relative to `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

/// Landmarks on `[0, 1/(n-1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mark {
    Zero,
    Mu,
    Nu,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub from: Mark,
    pub to: Mark,
    pub trend: Trend,
}

/// The interior extremum `nu_index` of `f` and the interval bounded by
/// landmarks that contains it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InteriorExtremum {
    pub index: u8,
    pub kind: ExtremumKind,
    pub lo: Mark,
    pub hi: Mark,
}

/// Piecewise monotone structure of `f` and the role of each endpoint as a
/// global extremum of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FShape {
    pub pieces: Vec<Piece>,
    pub interior: Option<InteriorExtremum>,
    pub at_zero: Option<ExtremumKind>,
    pub at_end: Option<ExtremumKind>,
}

impl RegimeTag {
    /// Classifies without validating the instance. Uses the exact rational
    /// exponent when one is available.
    pub fn of<T: Scalar>(n: usize, e: &ExponentPair<T>) -> Self {
        match e.comparison_alpha() {
            Some(a) => Self::of_rational(n, a),
            None => Self::of_float(n, e.alpha()),
        }
    }

    fn of_rational(n: usize, alpha: Rational64) -> Self {
        // alpha = p / q with q > 0
        let p = *alpha.numer() as i128;
        let q = *alpha.denom() as i128;
        let n = n as i128;
        if p < 0 {
            RegimeTag::NegR
        } else if p > q {
            RegimeTag::FracR
        } else if 2 * p > q {
            // 1 < r < 2; n < r/(r-1) = 1/(1-alpha)  <=>  n (q - p) < q
            if n * (q - p) < q {
                RegimeTag::LowRSmallN
            } else {
                RegimeTag::LowRLargeN
            }
        } else if 2 * p == q {
            RegimeTag::LowRLargeN
        } else if n * p >= q {
            // r > 2 and n >= r = 1/alpha
            RegimeTag::HighRLargeN
        } else {
            RegimeTag::HighRSmallN
        }
    }

    fn of_float<T: Scalar>(n: usize, alpha: T) -> Self {
        let one = T::one();
        let half = T::lit(0.5);
        let nf = T::from_count(n);
        if alpha < T::zero() {
            RegimeTag::NegR
        } else if alpha > one {
            RegimeTag::FracR
        } else if alpha > half {
            if nf * (one - alpha) < one {
                RegimeTag::LowRSmallN
            } else {
                RegimeTag::LowRLargeN
            }
        } else if alpha == half {
            RegimeTag::LowRLargeN
        } else if nf * alpha >= one {
            RegimeTag::HighRLargeN
        } else {
            RegimeTag::HighRSmallN
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RegimeTag::NegR => "NEG_R",
            RegimeTag::FracR => "FRAC_R",
            RegimeTag::LowRSmallN => "LOW_R_SMALL_N",
            RegimeTag::LowRLargeN => "LOW_R_LARGE_N",
            RegimeTag::HighRLargeN => "HIGH_R_LARGE_N",
            RegimeTag::HighRSmallN => "HIGH_R_SMALL_N",
        }
    }

    pub fn has_mu(self) -> bool {
        self.mu_side().is_some()
    }

    /// Side of `1/n` holding the non-trivial root of `W - 1`.
    pub fn mu_side(self) -> Option<Side> {
        match self {
            RegimeTag::NegR | RegimeTag::HighRSmallN => Some(Side::Right),
            RegimeTag::FracR | RegimeTag::LowRSmallN => Some(Side::Left),
            RegimeTag::LowRLargeN | RegimeTag::HighRLargeN => None,
        }
    }

    /// Sign of `W - 1` immediately to the left and right of `1/n`, and on
    /// the far side of `mu` (which equals the sign just left of `1/n` on
    /// the right side, and just right of `1/n` on the left side).
    pub fn w_sign_near_centre(self) -> (i8, i8) {
        match self {
            RegimeTag::NegR => (1, -1),
            _ => (-1, 1),
        }
    }

    /// Signs of `f'` at `x = 0` and at `x = 1/(n-1)`.
    pub fn f_prime_endpoint_signs(self) -> (i8, i8) {
        match self {
            RegimeTag::NegR => (-1, 1),
            RegimeTag::FracR => (1, -1),
            RegimeTag::LowRSmallN => (-1, 1),
            RegimeTag::LowRLargeN | RegimeTag::HighRLargeN => (1, 1),
            RegimeTag::HighRSmallN => (1, -1),
        }
    }

    pub fn shape(self) -> FShape {
        use ExtremumKind::*;
        use Mark::*;
        use Trend::*;
        let piece = |from, to, trend| Piece { from, to, trend };
        match self {
            RegimeTag::NegR => FShape {
                pieces: vec![piece(Zero, Mu, Decreasing), piece(Mu, Nu, Decreasing), piece(Nu, End, Increasing)],
                interior: Some(InteriorExtremum { index: 1, kind: Minimum, lo: Mu, hi: End }),
                at_zero: Some(Maximum),
                at_end: Some(Maximum),
            },
            RegimeTag::FracR => FShape {
                pieces: vec![piece(Zero, Nu, Increasing), piece(Nu, Mu, Decreasing), piece(Mu, End, Decreasing)],
                interior: Some(InteriorExtremum { index: 2, kind: Maximum, lo: Zero, hi: Mu }),
                at_zero: None,
                at_end: Some(Minimum),
            },
            RegimeTag::LowRSmallN => FShape {
                pieces: vec![piece(Zero, Nu, Decreasing), piece(Nu, Mu, Increasing), piece(Mu, End, Increasing)],
                interior: Some(InteriorExtremum { index: 3, kind: Minimum, lo: Zero, hi: Mu }),
                at_zero: None,
                at_end: Some(Maximum),
            },
            RegimeTag::LowRLargeN | RegimeTag::HighRLargeN => {
                FShape { pieces: vec![piece(Zero, End, Increasing)], interior: None, at_zero: Some(Minimum), at_end: Some(Maximum) }
            }
            RegimeTag::HighRSmallN => FShape {
                pieces: vec![piece(Zero, Mu, Increasing), piece(Mu, Nu, Increasing), piece(Nu, End, Decreasing)],
                interior: Some(InteriorExtremum { index: 4, kind: Maximum, lo: Mu, hi: End }),
                at_zero: Some(Minimum),
                at_end: None,
            },
        }
    }
}

/// Regime of an instance with the search interval for `mu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regime<T: Scalar> {
    pub tag: RegimeTag,
    pub has_mu: bool,
    /// Open interval for `mu`, excluding a band of half-width `1e-6/n`
    /// around `1/n`.
    #[serde(serialize_with = "serialize_bracket")]
    pub mu_bracket: Option<(T, T)>,
    pub f_shape: FShape,
}

fn serialize_bracket<T: Scalar, S: serde::Serializer>(b: &Option<(T, T)>, s: S) -> Result<S::Ok, S::Error> {
    match b {
        Some((lo, hi)) => serial::num_vec(&[*lo, *hi], s),
        None => s.serialize_none(),
    }
}

/// Classifies a validated instance.
pub fn classify<T: Scalar>(n: usize, e: &ExponentPair<T>) -> Result<Regime<T>> {
    let pp = ProfileParams::new(n, *e)?;
    Ok(regime_for(&pp))
}

pub fn regime_for<T: Scalar>(pp: &ProfileParams<T>) -> Regime<T> {
    let tag = pp.regime_tag();
    let band = T::lit(MU_START_OFFSET) * pp.centre();
    let mu_bracket = tag.mu_side().map(|side| match side {
        Side::Left => (T::zero(), pp.centre() - band),
        Side::Right => (pp.centre() + band, pp.x_max()),
    });
    Regime { tag, has_mu: tag.has_mu(), mu_bracket, f_shape: tag.shape() }
}

/// Located non-trivial root of `W(x) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint<T: Scalar> {
    #[serde(serialize_with = "serial::num")]
    pub mu: T,
    /// `mu` as the side coordinate: `mu` itself left of `1/n`, the last
    /// coordinate `1 - (n-1) mu` right of it. Exact even where `mu` rounds
    /// to `1/(n-1)`.
    #[serde(serialize_with = "serial::num")]
    pub side_coordinate: T,
    #[serde(serialize_with = "serial::num")]
    pub residual: T,
    pub iterations: usize,
    /// Sign-change bracket the root was refined from.
    #[serde(serialize_with = "serialize_pair")]
    pub bracket: (T, T),
    /// Sign changes of `W - 1` seen on a scan beyond those at `1/n` and
    /// `mu`. Expected to be zero; reported, never resolved.
    pub extra_crossings: usize,
}

fn serialize_pair<T: Scalar, S: serde::Serializer>(b: &(T, T), s: S) -> Result<S::Ok, S::Error> {
    serial::num_vec(&[b.0, b.1], s)
}

/// Knobs for the bracket construction around `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSearch {
    /// First probe at `1/n +- start_offset / n`.
    pub start_offset: f64,
    /// Geometric growth of the probe offsets.
    pub growth: f64,
    /// Points of the scan that counts extra crossings.
    pub scan_points: usize,
}

impl Default for MuSearch {
    fn default() -> Self {
        Self { start_offset: MU_START_OFFSET, growth: 2.0, scan_points: 2000 }
    }
}

pub fn locate_mu<T: Scalar>(pp: &ProfileParams<T>, regime: &Regime<T>) -> Result<Option<CriticalPoint<T>>> {
    locate_mu_with(pp, regime, MuSearch::default())
}

/// The coordinate that tends to zero towards the domain end on `side`:
/// `x` on the left, the last coordinate `1 - (n-1)x` on the right. Both
/// equal `1/n` at the centre.
pub fn side_coordinate<T: Scalar>(pp: &ProfileParams<T>, side: Side, x: T) -> T {
    match side {
        Side::Left => x,
        Side::Right => (-T::from_count(pp.n() - 1)).mul_add(x, T::one()),
    }
}

/// Inverse of [`side_coordinate`].
pub fn x_from_side<T: Scalar>(pp: &ProfileParams<T>, side: Side, t: T) -> T {
    match side {
        Side::Left => t,
        Side::Right => pp.x_from_last(t),
    }
}

/// `W - 1` as a function of the side coordinate.
fn w_gap_on_side<T: Scalar>(pp: &ProfileParams<T>, side: Side, t: T) -> Result<T> {
    let w = match side {
        Side::Left => pp.w(t)?,
        Side::Right => pp.w_by_last(t)?,
    };
    Ok(w.to_float() - T::one())
}

/// Finds the root of `W - 1` on the regime's side of `1/n`, excluding the
/// trivial root at `1/n` itself.
///
/// The search runs in the side coordinate `t`, which shrinks from `1/n` at
/// the centre to zero at the domain end. Probes step away from the centre
/// with geometrically growing offsets, then towards the end with
/// geometrically shrinking `t` down to [`ProfileParams::tail_floor`], and
/// stop at the first change from the sign `W - 1` has next to the centre.
/// Working in `t` resolves roots much closer to `x = 1/(n-1)` than the
/// spacing of floats there.
pub fn locate_mu_with<T: Scalar>(pp: &ProfileParams<T>, regime: &Regime<T>, search: MuSearch) -> Result<Option<CriticalPoint<T>>> {
    let Some(side) = regime.tag.mu_side() else {
        return Ok(None);
    };
    let c = pp.centre();
    let h = |t: T| w_gap_on_side(pp, side, t);
    let (left, right) = regime.tag.w_sign_near_centre();
    let near = T::lit(f64::from(match side {
        Side::Left => left,
        Side::Right => right,
    }));

    let mut probes = Vec::new();
    let mut offset = T::lit(search.start_offset) * c;
    let half = c * T::lit(0.5);
    while offset <= half {
        probes.push(c - offset);
        offset = offset * T::lit(search.growth);
    }
    let floor = pp.tail_floor();
    let mut t = half;
    while t >= floor {
        probes.push(t);
        t = t / T::lit(search.growth);
    }

    let mut prev: Option<T> = None;
    let mut found = None;
    for &t in &probes {
        let ht = h(t)?;
        if let Some(pt) = prev {
            if ht.signum() == -near {
                found = Some((t, pt));
                break;
            }
        }
        if ht.signum() == near {
            prev = Some(t);
        }
    }
    let (lo, hi) = found.ok_or_else(|| {
        let first = probes.first().copied().unwrap_or(c);
        let last = probes.last().copied().unwrap_or(floor);
        Error::NoSignChange {
            lo: x_from_side(pp, side, first).min(x_from_side(pp, side, last)).as_f64(),
            hi: x_from_side(pp, side, first).max(x_from_side(pp, side, last)).as_f64(),
            f_lo: h(first).map(|v| v.as_f64()).unwrap_or(f64::NAN),
            f_hi: h(last).map(|v| v.as_f64()).unwrap_or(f64::NAN),
        }
        .context(format!("W(x) = 1 crossing for {} (n = {})", regime.tag.name(), pp.n()))
    })?;

    let mut failure = None;
    let res = find_root(
        |t| match h(t) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                T::nan()
            }
        },
        Bracket::root(lo, hi)?,
        T::epsilon() * T::lit(4.0) * hi,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let residual = h(res.x_star)?.abs();
    let total = count_w_crossings(pp, search.scan_points)?;
    let expected = 2;
    let (xa, xb) = (x_from_side(pp, side, lo), x_from_side(pp, side, hi));
    Ok(Some(CriticalPoint {
        mu: x_from_side(pp, side, res.x_star),
        side_coordinate: res.x_star,
        residual,
        iterations: res.iterations,
        bracket: (xa.min(xb), xa.max(xb)),
        extra_crossings: total.saturating_sub(expected),
    }))
}

/// Sign changes of `W - 1` on a uniform interior grid, skipping the band
/// of half-width `1e-6/n` around `1/n`.
pub fn count_w_crossings<T: Scalar>(pp: &ProfileParams<T>, points: usize) -> Result<usize> {
    let c = pp.centre();
    let band = T::lit(MU_START_OFFSET) * c;
    let step = pp.x_max() / T::from_count(points + 1);
    let mut last: Option<T> = None;
    let mut changes = 0;
    let mut crossed_centre = false;
    for k in 1..=points {
        let x = step * T::from_count(k);
        if (x - c).abs() <= band {
            continue;
        }
        if !crossed_centre && x > c {
            crossed_centre = true;
        }
        let v = pp.w(x)?.to_float() - T::one();
        if v.is_zero() {
            continue;
        }
        if let Some(prev) = last {
            if prev.signum() != v.signum() {
                changes += 1;
            }
        }
        last = Some(v);
    }
    Ok(changes)
}

/// Exact dyadic rational of a float, when numerator and denominator fit.
pub(crate) fn dyadic<T: Scalar>(v: T) -> Option<Rational64> {
    if !v.is_finite() {
        return None;
    }
    if v.is_zero() {
        return Some(Rational64::zero());
    }
    let (mut mantissa, mut exponent, sign) = v.integer_decode();
    while mantissa & 1 == 0 && exponent < 0 {
        mantissa >>= 1;
        exponent += 1;
    }
    let m = i64::try_from(mantissa).ok()? * sign as i64;
    if exponent >= 0 {
        let shifted = m.checked_mul(1i64.checked_shl(exponent as u32)?)?;
        if shifted.abs() >> exponent != m.abs() {
            return None;
        }
        Some(Rational64::from_integer(shifted))
    } else {
        let k = (-exponent) as u32;
        if k > 62 {
            return None;
        }
        let q = Rational64::new(m, 1i64 << k);
        debug_assert!(!q.is_negative() || sign < 0);
        Some(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn from_r(r: f64) -> ExponentPair<f64> {
        ExponentPair::from_r(r).unwrap()
    }

    fn params(n: usize, r: f64) -> ProfileParams<f64> {
        ProfileParams::new(n, from_r(r)).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(3, &from_r(1.4)).unwrap().tag, RegimeTag::LowRSmallN);
        let a = ExponentPair::<f64>::from_rational(Rational64::new(5, 7)).unwrap();
        assert_eq!(classify(3, &a).unwrap().tag, RegimeTag::LowRSmallN);
        assert_eq!(classify(4, &from_r(0.5)).unwrap().tag, RegimeTag::FracR);
        assert_eq!(classify(3, &from_r(5.0)).unwrap().tag, RegimeTag::HighRSmallN);
        assert_eq!(classify(3, &from_r(-1.0)).unwrap().tag, RegimeTag::NegR);
        assert_eq!(classify(5, &from_r(2.0)).unwrap().tag, RegimeTag::LowRLargeN);
        assert_eq!(classify(5, &from_r(5.0)).unwrap().tag, RegimeTag::HighRLargeN);
    }

    #[test]
    fn classify_boundaries() {
        for n in 3..40 {
            assert_eq!(classify(n, &from_r(2.0)).unwrap().tag, RegimeTag::LowRLargeN);
        }
        assert_eq!(classify(3, &from_r(3.0)).unwrap().tag, RegimeTag::HighRLargeN);
        assert_eq!(classify(3, &from_r(3.0000001)).unwrap().tag, RegimeTag::HighRSmallN);
        assert_eq!(classify(7, &from_r(7.0)).unwrap().tag, RegimeTag::HighRLargeN);
        // n = r/(r-1) exactly: alpha = 3/4 gives r/(r-1) = 4
        let a = ExponentPair::<f64>::from_alpha(0.75).unwrap();
        assert_eq!(classify(4, &a).unwrap().tag, RegimeTag::LowRLargeN);
        assert_eq!(classify(3, &a).unwrap().tag, RegimeTag::LowRSmallN);
        // n = ceil(r/(r-1)) for r = 1.4 is 4
        assert_eq!(classify(4, &from_r(1.4)).unwrap().tag, RegimeTag::LowRLargeN);
        let q = ExponentPair::<f64>::from_rational(Rational64::new(5, 7)).unwrap();
        assert_eq!(classify(4, &q).unwrap().tag, RegimeTag::LowRLargeN);
    }

    #[test]
    fn classify_errors() {
        assert!(classify(2, &from_r(2.0)).is_err());
        assert!(classify(3, &ExponentPair::<f64>::from_alpha(1.0).unwrap()).is_err());
        assert!(ExponentPair::<f64>::from_alpha(0.0).is_err());
    }

    #[test]
    fn float_and_rational_classification_agree_off_boundaries() {
        for n in 3..12 {
            for k in -40..40 {
                let alpha = k as f64 / 13.0 + 0.0123;
                if alpha == 0.0 || alpha == 1.0 {
                    continue;
                }
                let e = ExponentPair::<f64>::from_alpha(alpha).unwrap();
                assert_eq!(RegimeTag::of_float(n, alpha), RegimeTag::of(n, &e), "n {n} alpha {alpha}");
            }
        }
    }

    #[test]
    fn dyadic_conversion() {
        assert_eq!(dyadic(0.75f64), Some(Rational64::new(3, 4)));
        assert_eq!(dyadic(-3.0f64), Some(Rational64::from_integer(-3)));
        assert_eq!(dyadic(1e-300f64), None);
        let q = dyadic(0.1f64).unwrap();
        assert_eq!(*q.numer() as f64 / *q.denom() as f64, 0.1);
    }

    #[test]
    fn mu_for_negative_r_is_exact_point() {
        // n = 3, r = -1: s = 2 at x = 0.4 gives U = 3/2, V = 2/3
        let pp = params(3, -1.0);
        let regime = regime_for(&pp);
        let cp = locate_mu(&pp, &regime).unwrap().unwrap();
        assert!(cp.mu > 1.0 / 3.0 && cp.mu < 0.5);
        assert!(cp.residual <= MU_RESIDUAL);
        assert_relative_eq!(cp.mu, 0.4, max_relative = 1e-12);
        assert_eq!(cp.extra_crossings, 0);
    }

    #[test]
    fn mu_for_frac_r() {
        // n = 4, r = 1/2: s = 1/3 at x = 1/6 gives U = 3, V = 1/3
        let pp = params(4, 0.5);
        let cp = locate_mu(&pp, &regime_for(&pp)).unwrap().unwrap();
        assert_relative_eq!(cp.mu, 1.0 / 6.0, max_relative = 1e-12);
    }

    #[test]
    fn no_mu_in_increasing_regimes() {
        for (n, r) in [(5, 2.0), (5, 5.0), (4, 1.4)] {
            let pp = params(n, r);
            assert!(locate_mu(&pp, &regime_for(&pp)).unwrap().is_none());
            // W crosses 1 only at 1/n
            assert_eq!(count_w_crossings(&pp, 4000).unwrap(), 1);
        }
    }

    #[test]
    fn sign_pattern_around_mu() {
        for (n, r) in [(3, -1.0), (4, 0.5), (3, 1.4), (3, 5.0), (6, -2.5), (5, 0.2), (4, 9.0)] {
            let pp = params(n, r);
            let regime = regime_for(&pp);
            let cp = locate_mu(&pp, &regime).unwrap().unwrap();
            assert!(cp.residual <= MU_RESIDUAL, "n {n} r {r}: residual {}", cp.residual);
            assert_eq!(cp.extra_crossings, 0);
            let (left_of_c, right_of_c) = regime.tag.w_sign_near_centre();
            let d = 1e-4 * (cp.mu - pp.centre()).abs();
            let w = |x: f64| pp.w(x).unwrap().to_float() - 1.0;
            let (between, beyond) = match regime.tag.mu_side().unwrap() {
                Side::Right => (right_of_c, left_of_c),
                Side::Left => (left_of_c, right_of_c),
            };
            let towards_c = if cp.mu < pp.centre() { cp.mu + d } else { cp.mu - d };
            let away = if cp.mu < pp.centre() { cp.mu - d } else { cp.mu + d };
            assert_eq!(w(towards_c).signum() as i8, between, "n {n} r {r}");
            assert_eq!(w(away).signum() as i8, beyond, "n {n} r {r}");
        }
    }

    #[test]
    fn mu_stable_under_search_perturbations() {
        for (n, r) in [(3, -1.0), (4, 0.5), (3, 1.4), (3, 5.0)] {
            let pp = params(n, r);
            let regime = regime_for(&pp);
            let base = locate_mu(&pp, &regime).unwrap().unwrap().mu;
            for search in [
                MuSearch { start_offset: 3e-6, growth: 1.7, scan_points: 500 },
                MuSearch { start_offset: 2e-6, growth: 3.0, scan_points: 5000 },
            ] {
                let mu = locate_mu_with(&pp, &regime, search).unwrap().unwrap().mu;
                assert!((mu - base).abs() <= 1e-9, "n {n} r {r}: {mu} vs {base}");
            }
        }
    }

    #[test]
    fn shape_descriptors() {
        let s = RegimeTag::NegR.shape();
        let nu = s.interior.unwrap();
        assert_eq!((nu.index, nu.kind, nu.lo, nu.hi), (1, ExtremumKind::Minimum, Mark::Mu, Mark::End));
        assert_eq!(s.at_zero, Some(ExtremumKind::Maximum));
        assert_eq!(s.at_end, Some(ExtremumKind::Maximum));
        let s = RegimeTag::LowRLargeN.shape();
        assert!(s.interior.is_none());
        assert_eq!(s.pieces, vec![Piece { from: Mark::Zero, to: Mark::End, trend: Trend::Increasing }]);
        let nu = RegimeTag::FracR.shape().interior.unwrap();
        assert_eq!((nu.index, nu.kind, nu.lo, nu.hi), (2, ExtremumKind::Maximum, Mark::Zero, Mark::Mu));
    }

    #[test]
    fn regime_bracket_excludes_centre_band() {
        let pp = params(3, -1.0);
        let (lo, hi) = regime_for(&pp).mu_bracket.unwrap();
        assert!(lo - pp.centre() >= 1e-6 / 3.0 * 0.999);
        assert_eq!(hi, 0.5);
    }
}
