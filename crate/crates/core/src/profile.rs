//! The one-dimensional profile obtained by restricting the gap ratio to
//! two-value configurations `(x, ..., x, 1 - (n-1)x)` on the unit simplex.
//!
//! With `y = 1 - (n-1)x` and `a = 1/r`:
//!
//! ```text
//! g(x) = (x^(n-1) y)^(1/n)                      geometric mean
//! p(x) = (((n-1) x^a + y^a) / n)^r              power mean P_(1/r)
//! f(x) = (g - 1/n) / (p - 1/n)
//! s(x) = x / y
//! U    = (s^(1-a) - 1) / ((1-a)(s-1))
//! V    = ((n-1) s^a + 1) / n
//! W    = U V,  with g''/p'' = (g'/p') W
//! ```
//!
//! Every quantity is evaluated through the offsets `u = nx - 1` and
//! `v = ny - 1 = -(n-1)u`. The linear parts of `ln(1+u)`, `(1+u)^a`, ...
//! cancel exactly between the `n-1` equal coordinates and the last one, so
//! they are removed analytically and only the higher-order remainders are
//! summed. This keeps `g - 1/n`, `p - 1/n` and `f` accurate right up to the
//! removable singularity at `x = 1/n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::means::ExponentPair;
use crate::regimes::RegimeTag;
use crate::scalar::{expm1_sub, ln1p_sub, pow1p_sub};
use crate::serial;
use crate::{Extended, Scalar};

/// Half-width (times `1/n`) of the band around `x = 1/n` where the
/// removable-singularity values are used.
pub const SINGULAR_BAND: f64 = 1e-9;

const OFFSET_CUTOFF: f64 = 0.25;

/// The instance `(n, alpha)` the profile is built for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ProfileParams<T> {
    n: usize,
    #[serde(rename = "exponent")]
    e: ExponentPair<T>,
}

/// Where an abscissa sits in `[0, 1/(n-1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Site {
    Zero,
    End,
    Interior,
}

/// Offsets of a two-value configuration from the uniform point.
#[derive(Debug, Clone, Copy)]
struct Offsets<T> {
    x: T,
    y: T,
    u: T,
    v: T,
}

/// All profile quantities at one interior abscissa.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ProfilePoint<T> {
    #[serde(serialize_with = "serial::num")]
    pub x: T,
    #[serde(serialize_with = "serial::num")]
    pub g: T,
    #[serde(serialize_with = "serial::num")]
    pub p: T,
    #[serde(serialize_with = "serial::num")]
    pub f: T,
    pub gp: Extended<T>,
    pub pp: Extended<T>,
    pub gpp: Extended<T>,
    pub ppp: Extended<T>,
    pub s: Extended<T>,
    pub u: Extended<T>,
    pub v: Extended<T>,
    pub w: Extended<T>,
    pub wp: Extended<T>,
    /// `None` inside the band around `x = 1/n`.
    pub fp: Option<Extended<T>>,
}

impl<T: Scalar> ProfileParams<T> {
    pub fn new(n: usize, e: ExponentPair<T>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension {
                n,
                reason: "the profile reduction needs n > 2 (n = 2 is the classical two-variable case)",
            });
        }
        e.ensure_ratio_admissible()?;
        Ok(Self { n, e })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> &ExponentPair<T> {
        &self.e
    }

    pub fn r(&self) -> T {
        self.e.r()
    }

    fn a(&self) -> T {
        self.e.alpha()
    }

    fn nf(&self) -> T {
        T::from_count(self.n)
    }

    fn m1(&self) -> T {
        T::from_count(self.n - 1)
    }

    /// Right end of the domain, `1/(n-1)`.
    pub fn x_max(&self) -> T {
        self.m1().recip()
    }

    /// The uniform point `1/n`.
    pub fn centre(&self) -> T {
        self.nf().recip()
    }

    /// Distance from `1/n` inside which removable-singularity values apply.
    pub fn singular_band(&self) -> T {
        T::lit(SINGULAR_BAND) / self.nf()
    }

    pub fn in_singular_band(&self, x: T) -> bool {
        (x - self.centre()).abs() <= self.singular_band()
    }

    pub fn regime_tag(&self) -> RegimeTag {
        RegimeTag::of(self.n, &self.e)
    }

    fn site(&self, x: T) -> Result<Site> {
        let hi = self.x_max();
        if !(x >= T::zero() && x <= hi) {
            return Err(Error::OutOfDomain { x: x.as_f64(), lo: 0.0, hi: hi.as_f64() });
        }
        if x.is_zero() {
            return Ok(Site::Zero);
        }
        let y = (-self.m1()).mul_add(x, T::one());
        if x == hi || y <= T::zero() {
            return Ok(Site::End);
        }
        Ok(Site::Interior)
    }

    fn offsets(&self, x: T) -> Offsets<T> {
        let y = (-self.m1()).mul_add(x, T::one());
        let u = self.nf().mul_add(x, -T::one());
        let v = -self.m1() * u;
        Offsets { x, y, u, v }
    }

    /// Offsets built from the last coordinate, which stays exact when it
    /// is far smaller than the spacing of floats near `1/(n-1)`.
    fn offsets_from_last(&self, y: T) -> Offsets<T> {
        let v = self.nf().mul_add(y, -T::one());
        let u = -v / self.m1();
        Offsets { x: (T::one() - y) / self.m1(), y, u, v }
    }

    /// `x` of the configuration whose last coordinate is `y`.
    pub fn x_from_last(&self, y: T) -> T {
        (T::one() - y) / self.m1()
    }

    /// Smallest coordinate used by searches next to the domain ends; below
    /// it `t^alpha` or `t^(1-alpha)` may leave the floating-point range.
    pub fn tail_floor(&self) -> T {
        let a = self.a();
        let m = a.abs().max((T::one() - a).abs()).max(T::one());
        let budget = T::max_value().ln() * T::lit(0.9);
        (-budget / m).exp().max(T::min_positive_value() * T::lit(1024.0))
    }

    fn last_domain(&self, y: T) -> Result<()> {
        if y > T::zero() && y < T::one() {
            Ok(())
        } else {
            Err(Error::OutOfDomain { x: y.as_f64(), lo: 0.0, hi: 1.0 })
        }
    }

    fn f_from(&self, o: &Offsets<T>) -> T {
        let r = self.r();
        if o.u.abs() <= T::lit(SINGULAR_BAND) {
            r / (r - T::one())
        } else {
            self.g_gap(o) / self.p_gap(o)
        }
    }

    fn u_from(&self, o: &Offsets<T>) -> T {
        let b = T::one() - self.a();
        let (ln_s, s_m1) = self.log_s(o);
        (b * ln_s).exp_m1() / (b * s_m1)
    }

    fn v_from(&self, o: &Offsets<T>) -> T {
        let (ln_s, _) = self.log_s(o);
        (self.m1() * (self.a() * ln_s).exp() + T::one()) / self.nf()
    }

    /// `(A - G) / (P - G)` from the offsets. Near the ends, where `f` tends
    /// to 1 and `f/(f-1)` amplifies its rounding, the ratio is formed from
    /// `g` and `p` directly; elsewhere from `f`.
    fn ratio_from(&self, o: &Offsets<T>) -> Extended<T> {
        let f = self.f_from(o);
        if (f - T::one()).abs() >= T::lit(1e-2) {
            return Extended::Finite(f / (f - T::one()));
        }
        let n = self.nf();
        let g = self.log_ng(o).exp() / n;
        let p = (self.r() * self.mean_power_rem(o).ln_1p()).exp() / n;
        if p == g {
            return if f == T::one() { Extended::NegInfinity } else { Extended::Finite(f / (f - T::one())) };
        }
        Extended::Finite((n.recip() - g) / (p - g))
    }

    /// The gap ratio `(A - G) / (P_alpha - G)` at an interior `x`.
    pub fn ratio(&self, x: T) -> Result<Extended<T>> {
        if self.site(x)? != Site::Interior {
            return Err(Error::OutOfDomain { x: x.as_f64(), lo: 0.0, hi: self.x_max().as_f64() });
        }
        Ok(self.ratio_from(&self.offsets(x)))
    }

    /// The gap ratio at the configuration with last coordinate `y` in `(0, 1)`.
    pub fn ratio_by_last(&self, y: T) -> Result<Extended<T>> {
        self.last_domain(y)?;
        Ok(self.ratio_from(&self.offsets_from_last(y)))
    }

    /// `f` at the configuration with last coordinate `y` in `(0, 1)`.
    pub fn f_by_last(&self, y: T) -> Result<T> {
        self.last_domain(y)?;
        Ok(self.f_from(&self.offsets_from_last(y)))
    }

    /// `W` at the configuration with last coordinate `y` in `(0, 1)`.
    pub fn w_by_last(&self, y: T) -> Result<Extended<T>> {
        self.last_domain(y)?;
        let o = self.offsets_from_last(y);
        if o.u.abs() <= T::lit(SINGULAR_BAND) {
            return Ok(Extended::Finite(T::one()));
        }
        Ok(Extended::Finite(self.u_from(&o) * self.v_from(&o)))
    }

    /// `ln(1+w) - w` for `w = u` or `w = v`, with `1 + w = n z`.
    fn log_rem(&self, w: T, z: T) -> T {
        if w.abs() <= T::lit(OFFSET_CUTOFF) {
            ln1p_sub(w)
        } else {
            (self.nf() * z).ln() - w
        }
    }

    /// `(1+w)^c - 1 - c w` with `1 + w = n z`.
    fn pow_rem(&self, w: T, z: T, c: T) -> T {
        if w.abs() <= T::lit(OFFSET_CUTOFF) {
            pow1p_sub(w, c)
        } else {
            (self.nf() * z).powf(c) - T::one() - c * w
        }
    }

    /// `ln(n g)`.
    fn log_ng(&self, o: &Offsets<T>) -> T {
        (self.m1() * self.log_rem(o.u, o.x) + self.log_rem(o.v, o.y)) / self.nf()
    }

    /// `M - 1` where `p = M^r / n`.
    fn mean_power_rem(&self, o: &Offsets<T>) -> T {
        let a = self.a();
        (self.m1() * self.pow_rem(o.u, o.x, a) + self.pow_rem(o.v, o.y, a)) / self.nf()
    }

    /// `n g(x) - 1`.
    fn g_gap(&self, o: &Offsets<T>) -> T {
        self.log_ng(o).exp_m1()
    }

    /// `n p(x) - 1`.
    fn p_gap(&self, o: &Offsets<T>) -> T {
        (self.r() * self.mean_power_rem(o).ln_1p()).exp_m1()
    }

    /// `g(x) = (x^(n-1) (1-(n-1)x))^(1/n)`; zero at both ends.
    pub fn g(&self, x: T) -> Result<T> {
        Ok(match self.site(x)? {
            Site::Zero | Site::End => T::zero(),
            Site::Interior => self.log_ng(&self.offsets(x)).exp() / self.nf(),
        })
    }

    /// `p(x) = (((n-1)x^(1/r) + (1-(n-1)x)^(1/r)) / n)^r`.
    pub fn p(&self, x: T) -> Result<T> {
        let r = self.r();
        let n = self.nf();
        Ok(match self.site(x)? {
            Site::Zero if r > T::zero() => n.powf(-r),
            Site::End if r > T::zero() => self.m1().powf(r - T::one()) / n.powf(r),
            Site::Zero | Site::End => T::zero(),
            Site::Interior => {
                let o = self.offsets(x);
                (r * self.mean_power_rem(&o).ln_1p()).exp() / n
            }
        })
    }

    /// `f(x) = (g - 1/n) / (p - 1/n)`, with the limit `r/(r-1)` at `x = 1/n`.
    pub fn f(&self, x: T) -> Result<T> {
        let r = self.r();
        let one = T::one();
        let site = self.site(x)?;
        if r < T::zero() && site != Site::Interior {
            return Ok(one);
        }
        let n = self.nf();
        Ok(match site {
            Site::Zero => {
                let q = n.powf(r - one);
                q / (q - one)
            }
            Site::End => {
                let q = n.powf(r - one);
                q / (q - self.m1().powf(r - one))
            }
            Site::Interior if self.in_singular_band(x) => r / (r - one),
            Site::Interior => self.f_from(&self.offsets(x)),
        })
    }

    pub fn g_prime(&self, x: T) -> Result<Extended<T>> {
        Ok(match self.site(x)? {
            Site::Zero => Extended::PosInfinity,
            Site::End => Extended::NegInfinity,
            Site::Interior => {
                let o = self.offsets(x);
                let g = self.g(x)?;
                Extended::Finite(-self.m1() * o.u / (self.nf() * o.x * o.y) * g)
            }
        })
    }

    pub fn p_prime(&self, x: T) -> Result<Extended<T>> {
        let r = self.r();
        let n = self.nf();
        let one = T::one();
        let site = self.site(x)?;
        let head = ((n - one) / n).powf(r);
        let tail = -(n - one) / n.powf(r);
        Ok(match site {
            Site::Zero if r < T::zero() => Extended::Finite(head),
            Site::Zero if r < one => Extended::Finite(tail),
            Site::Zero => Extended::PosInfinity,
            Site::End if r < T::zero() => Extended::Finite(tail),
            Site::End if r < one => Extended::Finite(head),
            Site::End => Extended::NegInfinity,
            Site::Interior => {
                let o = self.offsets(x);
                let a = self.a();
                let c = a - one;
                // (1+u)^c - (1+v)^c with the linear part c (u - v) = c n u split off
                let diff = c * n * o.u + self.pow_rem(o.u, o.x, c) - self.pow_rem(o.v, o.y, c);
                let big_m = one + self.mean_power_rem(&o);
                Extended::Finite(self.m1() * diff / big_m * self.p(x)?)
            }
        })
    }

    /// `g''(x) = -(n-1) g / (n^2 x^2 y^2)`.
    pub fn g_second(&self, x: T) -> Result<Extended<T>> {
        Ok(match self.site(x)? {
            Site::Zero | Site::End => Extended::NegInfinity,
            Site::Interior => {
                let o = self.offsets(x);
                let n = self.nf();
                let g = self.g(x)?;
                Extended::Finite(-self.m1() * g / (n * n * o.x * o.x * o.y * o.y))
            }
        })
    }

    pub fn p_second(&self, x: T) -> Result<Extended<T>> {
        let site = self.site(x)?;
        let r = self.r();
        let a = self.a();
        let n = self.nf();
        let m1 = self.m1();
        let one = T::one();
        let two = T::lit(2.0);
        let zero = T::zero();
        if site == Site::Interior {
            let o = self.offsets(x);
            let big_m = one + self.mean_power_rem(&o);
            let c = a - two;
            let powers = (c * (n * o.x).ln() + c * (n * o.y).ln()).exp();
            let p = self.p(x)?;
            return Ok(Extended::Finite(-m1 * (r - one) * n * n * powers * p / (r * big_m * big_m)));
        }
        // p'' ~ coef * d^expo where d is the distance to the endpoint.
        let (coef, expo) = match (site, r > zero) {
            (Site::Zero, true) => (-m1 * (r - one) / (r * n.powf(r)), a - two),
            (Site::End, true) => {
                let p_end = m1.powf(r - one) / n.powf(r);
                (-(r - one) / r * m1.powf(one + a) * p_end, a - two)
            }
            (Site::Zero, false) => (-(r - one) / (r * m1) * (m1 / n).powf(r), -a - one),
            (_, false) => (-m1.powf(T::lit(3.0) - a) * (r - one) / (r * n.powf(r)), -a - one),
            (Site::Interior, true) => unreachable!(),
        };
        Ok(endpoint_limit(coef, expo))
    }

    /// `s(x) = x / (1 - (n-1)x)`.
    pub fn s(&self, x: T) -> Result<Extended<T>> {
        Ok(match self.site(x)? {
            Site::Zero => Extended::Finite(T::zero()),
            Site::End => Extended::PosInfinity,
            Site::Interior => {
                let o = self.offsets(x);
                Extended::Finite(o.x / o.y)
            }
        })
    }

    /// `(ln s, s - 1)` computed from the offsets.
    fn log_s(&self, o: &Offsets<T>) -> (T, T) {
        let ln_s = (o.x / o.y).ln();
        let s_m1 = self.nf() * o.u / (self.nf() * o.y);
        (ln_s, s_m1)
    }

    pub fn u_factor(&self, x: T) -> Result<Extended<T>> {
        let b = T::one() - self.a();
        let r = self.r();
        Ok(match self.site(x)? {
            // s -> 0: U -> 1/b when b > 0, +inf when b < 0
            Site::Zero if b > T::zero() => Extended::Finite(b.recip()),
            Site::Zero => Extended::PosInfinity,
            // s -> inf: U ~ s^(-a) / b
            Site::End if r > T::zero() => Extended::Finite(T::zero()),
            Site::End => Extended::PosInfinity,
            Site::Interior if self.in_singular_band(x) => Extended::Finite(T::one()),
            Site::Interior => Extended::Finite(self.u_from(&self.offsets(x))),
        })
    }

    pub fn v_factor(&self, x: T) -> Result<Extended<T>> {
        let a = self.a();
        let n = self.nf();
        Ok(match self.site(x)? {
            Site::Zero if a > T::zero() => Extended::Finite(n.recip()),
            Site::Zero => Extended::PosInfinity,
            Site::End if a > T::zero() => Extended::PosInfinity,
            Site::End => Extended::Finite(n.recip()),
            Site::Interior if self.in_singular_band(x) => Extended::Finite(T::one()),
            Site::Interior => Extended::Finite(self.v_from(&self.offsets(x))),
        })
    }

    /// `W = U V`. Finite at the ends only for `r > 1`.
    pub fn w(&self, x: T) -> Result<Extended<T>> {
        let r = self.r();
        let n = self.nf();
        let one = T::one();
        Ok(match self.site(x)? {
            Site::Zero if r > one => Extended::Finite(r / (n * (r - one))),
            Site::End if r > one => Extended::Finite(r * self.m1() / (n * (r - one))),
            Site::Zero | Site::End => Extended::PosInfinity,
            Site::Interior if self.in_singular_band(x) => Extended::Finite(one),
            Site::Interior => {
                let u = self.u_factor(x)?.to_float();
                let v = self.v_factor(x)?.to_float();
                Extended::Finite(u * v)
            }
        })
    }

    /// `W'(x) = N(s) / ((r-1) n (nx-1)^2)`, with the constant and linear
    /// parts of `N` in `ln s` cancelled analytically.
    pub fn w_prime(&self, x: T) -> Result<Extended<T>> {
        let r = self.r();
        let n = self.nf();
        let one = T::one();
        let two = T::lit(2.0);
        Ok(match self.site(x)? {
            Site::Zero if r < two => Extended::NegInfinity,
            Site::Zero => Extended::PosInfinity,
            Site::End if r <= two => Extended::PosInfinity,
            Site::End => Extended::NegInfinity,
            Site::Interior if self.in_singular_band(x) => Extended::Finite(n * (n - two) / (two * r)),
            Site::Interior => {
                let o = self.offsets(x);
                let (t, _) = self.log_s(&o);
                let a = self.a();
                let m1 = self.m1();
                let num = m1 * expm1_sub((a - one) * t) - expm1_sub((one - a) * t)
                    + (one - r) * expm1_sub(-a * t)
                    + m1 * (r - one) * expm1_sub(a * t);
                Extended::Finite(num / ((r - one) * n * o.u * o.u))
            }
        })
    }

    /// `f' = (g'/p' - f) p' / (p - 1/n)`. Undefined inside the band around
    /// `1/n`; infinite with the regime's sign at the ends.
    pub fn f_prime(&self, x: T) -> Result<Extended<T>> {
        let site = self.site(x)?;
        let (at_zero, at_end) = self.regime_tag().f_prime_endpoint_signs();
        let tag = |s: i8| if s > 0 { Extended::PosInfinity } else { Extended::NegInfinity };
        match site {
            Site::Zero => return Ok(tag(at_zero)),
            Site::End => return Ok(tag(at_end)),
            Site::Interior => {}
        }
        if self.in_singular_band(x) {
            return Err(Error::InvalidArgument(format!("f' is not evaluated within {} of x = 1/n", self.singular_band().as_f64())));
        }
        let o = self.offsets(x);
        let gp = self.g_prime(x)?.to_float();
        let pp = self.p_prime(x)?.to_float();
        let p_gap = self.p_gap(&o) / self.nf();
        let f = self.f(x)?;
        Ok(Extended::Finite((gp / pp - f) * pp / p_gap))
    }

    /// Every profile quantity at an interior abscissa.
    pub fn point(&self, x: T) -> Result<ProfilePoint<T>> {
        if self.site(x)? != Site::Interior {
            return Err(Error::OutOfDomain { x: x.as_f64(), lo: 0.0, hi: self.x_max().as_f64() });
        }
        Ok(ProfilePoint {
            x,
            g: self.g(x)?,
            p: self.p(x)?,
            f: self.f(x)?,
            gp: self.g_prime(x)?,
            pp: self.p_prime(x)?,
            gpp: self.g_second(x)?,
            ppp: self.p_second(x)?,
            s: self.s(x)?,
            u: self.u_factor(x)?,
            v: self.v_factor(x)?,
            w: self.w(x)?,
            wp: self.w_prime(x)?,
            fp: self.f_prime(x).ok(),
        })
    }
}

fn endpoint_limit<T: Scalar>(coef: T, expo: T) -> Extended<T> {
    if expo > T::zero() {
        Extended::Finite(T::zero())
    } else if expo.is_zero() {
        Extended::Finite(coef)
    } else if coef > T::zero() {
        Extended::PosInfinity
    } else {
        Extended::NegInfinity
    }
}
