//! Best constants for `(A - G) / (P_alpha - G)` on the simplex.
//!
//! Depending on the regime each side of the ratio is bounded either by a
//! closed-form endpoint value, by `omega = nu / (nu - 1)` where `nu` is an
//! interior extremum of the profile `f`, or not at all. [`best_constants`]
//! packages the result as an [`ExtremumCertificate`] carrying the regime,
//! the located extremum and the reference inequalities it was checked
//! against.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::{arithmetic_mean, geometric_mean, power_mean, ExponentPair};
use crate::profile::ProfileParams;
use crate::regimes::{locate_mu, regime_for, side_coordinate, x_from_side, CriticalPoint, ExtremumKind, Regime, RegimeTag, Side};
use crate::serial;
use crate::solver::{find_extremum, Bracket, EXTREMUM_TOL, ROOT_TOL};
use crate::{Extended, Scalar};

/// Slack for the reference inequalities attached to a certificate.
pub const REFERENCE_SLACK: f64 = 1e-10;
/// Slack for inequality checks on sampled points.
pub const SAMPLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Bracket width at which the extremum search for `nu` stops.
    #[serde(serialize_with = "serial::num")]
    pub extremum: f64,
    #[serde(serialize_with = "serial::num")]
    pub root: f64,
    #[serde(serialize_with = "serial::num")]
    pub reference_slack: f64,
    #[serde(serialize_with = "serial::num")]
    pub sample_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { extremum: EXTREMUM_TOL, root: ROOT_TOL, reference_slack: REFERENCE_SLACK, sample_slack: SAMPLE_SLACK }
    }
}

impl Tolerances {
    pub fn with_extremum(extremum: f64) -> Self {
        Self { extremum, ..Self::default() }
    }

    /// Absolute error attached to a reported `omega`.
    pub fn omega_error(&self) -> f64 {
        (self.extremum * self.extremum).max(1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    ClosedForm,
    CertifiedExtremum,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundKinds {
    pub lower: BoundKind,
    pub upper: BoundKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtLeast,
    AtMost,
}

/// A known inequality for `omega` from the literature, with the outcome of
/// checking it. Asserted bounds abort certification when they fail;
/// observations are only recorded.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ReferenceBound<T> {
    pub name: &'static str,
    pub relation: Relation,
    #[serde(serialize_with = "serial::num")]
    pub value: T,
    pub holds: bool,
    pub asserted: bool,
}

impl<T: Scalar> ReferenceBound<T> {
    fn check(name: &'static str, relation: Relation, value: T, omega: T, slack: T, asserted: bool) -> Self {
        let holds = match relation {
            Relation::AtLeast => omega >= value - slack,
            Relation::AtMost => omega <= value + slack,
        };
        Self { name, relation, value, holds, asserted }
    }
}

/// Certified bounds for one instance `(n, alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ExtremumCertificate<T: Scalar> {
    pub n: usize,
    pub e: ExponentPair<T>,
    pub regime: Regime<T>,
    pub mu: Option<CriticalPoint<T>>,
    /// Interior extremum of `f`, for `nu`-type bounds.
    #[serde(serialize_with = "serial::opt_num")]
    pub nu: Option<T>,
    #[serde(serialize_with = "serial::opt_num")]
    pub x_star: Option<T>,
    /// Last coordinate of the extremal configuration, exact even where
    /// `x_star` rounds to `1/(n-1)`.
    #[serde(serialize_with = "serial::opt_num")]
    pub y_star: Option<T>,
    #[serde(serialize_with = "serial::opt_num")]
    pub omega: Option<T>,
    #[serde(serialize_with = "serial::opt_num")]
    pub omega_error: Option<T>,
    pub lower_bound: Extended<T>,
    pub upper_bound: Extended<T>,
    pub bound_kind: BoundKinds,
    pub reference_bounds: Vec<ReferenceBound<T>>,
    pub tol: Tolerances,
}

impl<T: Scalar> ExtremumCertificate<T> {
    /// Whether `ratio` lies within the bounds up to `slack`, taken relative
    /// to a bound's magnitude where that exceeds 1: near large bounds the
    /// ratio is only known to a few ulps of the bound.
    pub fn admits(&self, ratio: T, slack: T) -> bool {
        let scaled = |b: T| slack * b.abs().max(T::one());
        let above = match self.lower_bound {
            Extended::Finite(lo) => ratio >= lo - scaled(lo),
            Extended::NegInfinity => true,
            Extended::PosInfinity => false,
        };
        let below = match self.upper_bound {
            Extended::Finite(hi) => ratio <= hi + scaled(hi),
            Extended::PosInfinity => true,
            Extended::NegInfinity => false,
        };
        above && below
    }
}

/// `delta` and `eta` in `delta P + (1 - delta) G <= A <= eta P + (1 - eta) G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct InterpolationConstants<T> {
    #[serde(serialize_with = "serial::num")]
    pub delta: T,
    #[serde(serialize_with = "serial::num")]
    pub eta: T,
    pub kind: BoundKinds,
}

/// `f / (f - 1)`, the ratio corresponding to a profile value. It is its own
/// inverse. `f = 1` is only approached from below (for `r < 0`), where the
/// ratio tends to `-inf`.
pub fn ratio_from_f<T: Scalar>(f: T) -> Extended<T> {
    if f == T::one() {
        Extended::NegInfinity
    } else {
        Extended::Finite(f / (f - T::one()))
    }
}

fn check_dimension(n: usize) -> Result<()> {
    match n {
        0 | 1 => Err(Error::InvalidDimension { n, reason: "at least two coordinates are needed" }),
        2 => Err(Error::InvalidDimension {
            n,
            reason: "the method needs n > 2; the case n = 2 is covered by the two-variable results of earlier work",
        }),
        _ => Ok(()),
    }
}

/// `(num/den)^(r-1)`, exactly rounded when `r` is an integer and the
/// power fits in machine integers.
fn closed_power<T: Scalar>(num: i64, den: i64, e: &ExponentPair<T>) -> T {
    let exact = e.comparison_alpha().map(|a| a.recip()).filter(|r| r.is_integer()).and_then(|r| {
        let k = r.to_integer().checked_sub(1)?;
        let (b, t) = if k >= 0 { (num as i128, den as i128) } else { (den as i128, num as i128) };
        let k = u32::try_from(k.unsigned_abs()).ok()?;
        let (p, q) = (b.checked_pow(k)?, t.checked_pow(k)?);
        let limit = 1i128 << 53;
        (p <= limit && q <= limit).then(|| T::lit(p as f64 / q as f64))
    });
    exact.unwrap_or_else(|| (T::lit(num as f64) / T::lit(den as f64)).powf(e.r() - T::one()))
}

/// `(n/(n-1))^(1/alpha - 1)` and `n^(1/alpha - 1)`, in increasing order.
pub fn endpoint_constants<T: Scalar>(n: usize, e: &ExponentPair<T>) -> Result<(T, T)> {
    check_dimension(n)?;
    if !(e.alpha() > T::zero()) {
        return Err(Error::InvalidExponent { alpha: e.alpha().as_f64(), reason: "closed-form endpoint constants need alpha > 0" });
    }
    e.ensure_ratio_admissible()?;
    let at_end = closed_power(n as i64, n as i64 - 1, e);
    let at_zero = closed_power(n as i64, 1, e);
    Ok(if at_end <= at_zero { (at_end, at_zero) } else { (at_zero, at_end) })
}

/// Points of the logarithmic scan that seeds the refinement of `nu`.
pub const NU_SCAN_POINTS: usize = 512;

/// Interior extremum of `f` between `mu` and the domain end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorExtremum<T> {
    pub x: T,
    /// Last coordinate `1 - (n-1) x` of the extremal configuration.
    pub y: T,
    pub value: T,
}

fn f_on_side<T: Scalar>(pp: &ProfileParams<T>, side: Side, t: T) -> Result<T> {
    match side {
        Side::Left => pp.f(t),
        Side::Right => pp.f_by_last(t),
    }
}

/// Locates the interior extremum of `f` in `s = -ln t`, where `t` is the
/// side coordinate running from its value at `mu` down to the tail floor.
/// A uniform scan in `s` picks the best sample (the first one on ties, so
/// the flat tail never wins), then golden section refines between its
/// neighbours to `tol` in `s`, a relative tolerance on `t`.
pub fn locate_nu<T: Scalar>(pp: &ProfileParams<T>, regime: &Regime<T>, mu: &CriticalPoint<T>, tol: T) -> Result<InteriorExtremum<T>> {
    let side = regime.tag.mu_side().ok_or_else(|| Error::InvalidArgument(format!("{} has no interior extremum", regime.tag.name())))?;
    let kind = regime.f_shape.interior.map(|i| i.kind).ok_or_else(|| Error::InvalidArgument("regime without interior extremum".into()))?;
    let sign = match kind {
        ExtremumKind::Maximum => T::one(),
        ExtremumKind::Minimum => -T::one(),
    };
    let s_lo = -mu.side_coordinate.ln();
    let s_hi = -pp.tail_floor().ln();
    if !(s_hi > s_lo) {
        return Err(Error::InvalidArgument(format!("empty extremum range next to mu = {}", mu.mu)));
    }
    let mut failure = None;
    let mut score = |s: T| match f_on_side(pp, side, (-s).exp()) {
        Ok(v) => sign * v,
        Err(err) => {
            failure.get_or_insert(err);
            T::nan()
        }
    };
    let step = (s_hi - s_lo) / T::from_count(NU_SCAN_POINTS);
    let mut best = (1usize, score(s_lo + step));
    for k in 2..NU_SCAN_POINTS {
        let v = score(s_lo + step * T::from_count(k));
        if v > best.1 {
            best = (k, v);
        }
    }
    let lo = s_lo + step * T::from_count(best.0 - 1);
    let hi = s_lo + step * T::from_count(best.0 + 1);
    let res = find_extremum(&mut score, Bracket::maximum(lo, hi)?, tol)?;
    if let Some(err) = failure {
        return Err(err);
    }
    let t = (-res.x_star).exp();
    let x = x_from_side(pp, side, t);
    let y = match side {
        Side::Left => side_coordinate(pp, Side::Right, x),
        Side::Right => t,
    };
    Ok(InteriorExtremum { x, y, value: sign * res.value })
}

pub fn best_constants<T: Scalar>(n: usize, e: &ExponentPair<T>) -> Result<ExtremumCertificate<T>> {
    best_constants_with(n, e, Tolerances::default())
}

/// Certifies the best constants for `(n, alpha)`.
pub fn best_constants_with<T: Scalar>(n: usize, e: &ExponentPair<T>, tol: Tolerances) -> Result<ExtremumCertificate<T>> {
    check_dimension(n)?;
    let pp = ProfileParams::new(n, *e)?;
    let regime = regime_for(&pp);
    let ctx = || format!("best constants for n = {n}, alpha = {}", e.alpha());
    let mu = locate_mu(&pp, &regime).map_err(|err| err.context(ctx()))?;

    let mut cert = ExtremumCertificate {
        n,
        e: *e,
        regime: regime.clone(),
        mu,
        nu: None,
        x_star: None,
        y_star: None,
        omega: None,
        omega_error: None,
        lower_bound: Extended::NegInfinity,
        upper_bound: Extended::PosInfinity,
        bound_kind: BoundKinds { lower: BoundKind::Unbounded, upper: BoundKind::Unbounded },
        reference_bounds: Vec::new(),
        tol,
    };

    if let Some(cp) = &mu {
        let res = locate_nu(&pp, &regime, cp, T::lit(tol.extremum)).map_err(|err| err.context(ctx()))?;
        let nu = res.value;
        let omega = nu / (nu - T::one());
        cert.nu = Some(nu);
        cert.x_star = Some(res.x);
        cert.y_star = Some(res.y);
        cert.omega = Some(omega);
        cert.omega_error = Some(T::lit(tol.omega_error()));
    }

    let closed = |num, den| Extended::Finite(closed_power(num, den, e));
    let (ni, n1) = (n as i64, n as i64 - 1);
    let omega = cert.omega.map(Extended::Finite);
    use BoundKind::*;
    let (lower, upper) = match regime.tag {
        RegimeTag::NegR => ((Extended::NegInfinity, Unbounded), (omega.unwrap(), CertifiedExtremum)),
        RegimeTag::FracR => ((omega.unwrap(), CertifiedExtremum), (closed(ni, n1), ClosedForm)),
        RegimeTag::LowRSmallN => ((closed(ni, n1), ClosedForm), (omega.unwrap(), CertifiedExtremum)),
        RegimeTag::LowRLargeN | RegimeTag::HighRLargeN => ((closed(ni, n1), ClosedForm), (closed(ni, 1), ClosedForm)),
        RegimeTag::HighRSmallN => ((omega.unwrap(), CertifiedExtremum), (closed(ni, 1), ClosedForm)),
    };
    cert.lower_bound = lower.0;
    cert.upper_bound = upper.0;
    cert.bound_kind = BoundKinds { lower: lower.1, upper: upper.1 };

    if let (Extended::Finite(lo), Extended::Finite(hi)) = (cert.lower_bound, cert.upper_bound) {
        if lo > hi {
            return Err(Error::ReferenceBoundViolated(format!("lower bound {lo} exceeds upper bound {hi}")).context(ctx()));
        }
    }
    if let Some(omega) = cert.omega {
        cert.reference_bounds = reference_bounds(n, e, regime.tag, omega, T::lit(tol.reference_slack));
        if let Some(bad) = cert.reference_bounds.iter().find(|b| b.asserted && !b.holds) {
            return Err(Error::ReferenceBoundViolated(format!("omega = {omega} against {} {:?} {}", bad.name, bad.relation, bad.value))
                .context(ctx()));
        }
    }
    Ok(cert)
}

/// Known lower bound for `omega` when `alpha > 1`:
/// `(r/(n-1)) ((2-r)(n-1) / (1+(1-r)(n-1)))^(2-r)`.
pub fn power_ratio_bound<T: Scalar>(n: usize, r: T) -> T {
    let m1 = T::from_count(n - 1);
    let one = T::one();
    let two = T::lit(2.0);
    r / m1 * ((two - r) * m1 / (one + (one - r) * m1)).powf(two - r)
}

const POWER_RATIO_LOWER: &str = "omega >= r/(n-1) ((2-r)(n-1) / (1+(1-r)(n-1)))^(2-r)";
/// Not proved for `alpha < 0`; reported with `asserted: false`.
const POWER_RATIO_UPPER: &str = "omega <= r/(n-1) ((2-r)(n-1) / (1+(1-r)(n-1)))^(2-r) (observed)";
const HARMONIC_UPPER: &str = "omega <= -1/(n-1)";

fn reference_bounds<T: Scalar>(n: usize, e: &ExponentPair<T>, tag: RegimeTag, omega: T, slack: T) -> Vec<ReferenceBound<T>> {
    use Relation::*;
    let r = e.r();
    let check = |name, rel, value, asserted| ReferenceBound::check(name, rel, value, omega, slack, asserted);
    let mut out = Vec::new();
    match tag {
        RegimeTag::FracR | RegimeTag::HighRSmallN => out.push(check("omega <= r", AtMost, r, true)),
        RegimeTag::NegR | RegimeTag::LowRSmallN => out.push(check("omega >= r", AtLeast, r, true)),
        _ => {}
    }
    match tag {
        RegimeTag::FracR => {
            out.push(check(POWER_RATIO_LOWER, AtLeast, power_ratio_bound(n, r), true));
            out.push(check("omega <= n^(1/alpha - 1)", AtMost, T::from_count(n).powf(r - T::one()), true));
        }
        RegimeTag::NegR => {
            let is_minus_one = match e.comparison_alpha() {
                Some(a) => a == Rational64::from_integer(-1),
                None => e.alpha() == -T::one(),
            };
            if is_minus_one {
                out.push(check(HARMONIC_UPPER, AtMost, -T::from_count(n - 1).recip(), true));
            }
            out.push(check(POWER_RATIO_UPPER, AtMost, power_ratio_bound(n, r), false));
        }
        _ => {}
    }
    out
}

/// `delta` and `eta` from the certified bounds; only defined for
/// `alpha > 0`, where both sides are finite.
pub fn interpolation_constants<T: Scalar>(n: usize, e: &ExponentPair<T>) -> Result<InterpolationConstants<T>> {
    if !(e.alpha() > T::zero()) {
        return Err(Error::InvalidExponent {
            alpha: e.alpha().as_f64(),
            reason: "for alpha < 0 the ratio is unbounded below and only the upper inequality exists",
        });
    }
    let cert = best_constants(n, e)?;
    match (cert.lower_bound, cert.upper_bound) {
        (Extended::Finite(delta), Extended::Finite(eta)) => Ok(InterpolationConstants { delta, eta, kind: cert.bound_kind }),
        _ => Err(Error::InvalidArgument("certificate has an unbounded side".into())),
    }
}

/// Slack scaled to the magnitude of the compared quantities.
fn within<T: Scalar>(lhs: T, rhs: T, scale: T) -> bool {
    lhs <= rhs + T::lit(SAMPLE_SLACK) * (T::one() + scale.abs())
}

/// `delta P + (1 - delta) G <= A <= eta P + (1 - eta) G` at `xs`.
pub fn interpolation_check<T: Scalar>(xs: &[T], e: &ExponentPair<T>, c: &InterpolationConstants<T>) -> Result<bool> {
    let a = arithmetic_mean(xs)?;
    let g = geometric_mean(xs)?;
    let p = power_mean(xs, e.alpha())?;
    let one = T::one();
    let lo = c.delta * p + (one - c.delta) * g;
    let hi = c.eta * p + (one - c.eta) * g;
    Ok(within(lo, a, a) && within(a, hi, a))
}

/// The same inequality after `x_i -> x_i^(1/alpha)`:
/// `delta A^r + (1 - delta) G^r <= P_r^r <= eta A^r + (1 - eta) G^r`.
pub fn power_form_check<T: Scalar>(xs: &[T], e: &ExponentPair<T>, c: &InterpolationConstants<T>) -> Result<bool> {
    let r = e.r();
    let ar = arithmetic_mean(xs)?.powf(r);
    let gr = geometric_mean(xs)?.powf(r);
    let pr = power_mean(xs, r)?.powf(r);
    let one = T::one();
    let lo = c.delta * ar + (one - c.delta) * gr;
    let hi = c.eta * ar + (one - c.eta) * gr;
    Ok(within(lo, pr, pr) && within(pr, hi, pr))
}

/// Certificates for `n_min..=n_max`, computed in parallel and returned in
/// order of `n`.
pub fn sweep_constants<T: Scalar>(e: &ExponentPair<T>, n_min: usize, n_max: usize, tol: Tolerances) -> Result<Vec<ExtremumCertificate<T>>> {
    if n_min < 3 || n_min > n_max {
        return Err(Error::InvalidArgument(format!("sweep needs 3 <= n_min <= n_max, got {n_min}..{n_max}")));
    }
    (n_min..=n_max).into_par_iter().map(|n| best_constants_with(n, e, tol)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    StrictlyIncreasing,
    StrictlyDecreasing,
    NotMonotone,
    /// Fewer than two values.
    Undetermined,
}

pub fn monotonicity<T: Scalar>(values: &[T]) -> Monotonicity {
    if values.len() < 2 {
        return Monotonicity::Undetermined;
    }
    if values.windows(2).all(|w| w[1] > w[0]) {
        Monotonicity::StrictlyIncreasing
    } else if values.windows(2).all(|w| w[1] < w[0]) {
        Monotonicity::StrictlyDecreasing
    } else {
        Monotonicity::NotMonotone
    }
}

/// `h(x_1, ..., x_n, G_n)` from the closed form
/// `n (A - G) / ((n+1) ((n P^alpha + G^alpha)/(n+1))^(1/alpha) - (n+1) G)`.
pub fn augment_with_gm<T: Scalar>(xs: &[T], e: &ExponentPair<T>) -> Result<T> {
    e.ensure_ratio_admissible()?;
    for (index, &v) in xs.iter().enumerate() {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::InvalidCoordinate { index, value: v.as_f64() });
        }
    }
    if crate::means::is_all_equal(xs) {
        return Err(Error::InvalidArgument("augment_with_gm needs a non-constant tuple".into()));
    }
    let nf = T::from_count(xs.len());
    let n1 = nf + T::one();
    let alpha = e.alpha();
    let a = arithmetic_mean(xs)?;
    let g = geometric_mean(xs)?;
    let p = power_mean(xs, alpha)?;
    let mean = (nf * p.powf(alpha) + g.powf(alpha)) / n1;
    Ok(nf * (a - g) / (n1 * mean.powf(e.r()) - n1 * g))
}
