//! Brute-force checks of certificates: a dense scan of the two-value
//! profile and Monte-Carlo sampling of the whole simplex.
//!
//! Sample `i` of a run with seed `s` is drawn from a ChaCha8 generator
//! keyed by `s` on stream `i`, so any subset of samples can be produced
//! independently and a run gives the same report on any number of threads.
//! Reductions break ties by sample index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{BoundKind, ExtremumCertificate, SAMPLE_SLACK};
use crate::error::{Error, Result};
use crate::means::{ratio_gap, ExponentPair, SampleVector};
use crate::profile::ProfileParams;
use crate::reduction::two_value_config;
use crate::serial;
use crate::Extended;

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_GRID: usize = 1_000_000;
pub const MIN_SAMPLES: usize = 10_000;
pub const MIN_GRID: usize = 1_000;
/// Floor of the tolerance between a grid extreme and a certified bound.
pub const GRID_TOL_FLOOR: f64 = 1e-5;
/// Coordinate used by the near-zero probe for negative exponents.
pub const NEAR_ZERO_PROBE: f64 = 1e-8;

const CHUNK: usize = 4096;

/// Extremes of the ratio over the two-value grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridExtremes {
    #[serde(serialize_with = "serial::num")]
    pub min: f64,
    #[serde(serialize_with = "serial::num")]
    pub max: f64,
    #[serde(serialize_with = "serial::num")]
    pub arg_x_min: f64,
    #[serde(serialize_with = "serial::num")]
    pub arg_x_max: f64,
    /// Side coordinate of the minimiser when it is a tail point.
    #[serde(serialize_with = "serial::opt_num")]
    pub arg_tail_min: Option<f64>,
    #[serde(serialize_with = "serial::opt_num")]
    pub arg_tail_max: Option<f64>,
    pub points: usize,
    /// Spacing of the uniform grid in `x`.
    #[serde(serialize_with = "serial::num")]
    pub step: f64,
    /// Tail points per side.
    pub tail_points: usize,
    /// Spacing of the tail points in `-ln t`.
    #[serde(serialize_with = "serial::num")]
    pub tail_step: f64,
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    x: f64,
    tail: Option<f64>,
    index: usize,
}

impl Best {
    fn worst_min() -> Best {
        Best { value: f64::INFINITY, x: f64::NAN, tail: None, index: usize::MAX }
    }

    fn worst_max() -> Best {
        Best { value: f64::NEG_INFINITY, x: f64::NAN, tail: None, index: usize::MAX }
    }
}

impl Best {
    fn min(a: Best, b: Best) -> Best {
        match a.value.partial_cmp(&b.value) {
            Some(std::cmp::Ordering::Less) => a,
            Some(std::cmp::Ordering::Greater) => b,
            _ if a.index <= b.index => a,
            _ => b,
        }
    }

    fn max(a: Best, b: Best) -> Best {
        match a.value.partial_cmp(&b.value) {
            Some(std::cmp::Ordering::Greater) => a,
            Some(std::cmp::Ordering::Less) => b,
            _ if a.index <= b.index => a,
            _ => b,
        }
    }
}

/// Ratio `f/(f-1)` at `x` of the profile, or at an exact endpoint from the
/// two-value point itself.
fn grid_ratio(pp: &ProfileParams<f64>, x: f64) -> Result<f64> {
    let at_end = x == 0.0 || x == pp.x_max();
    if at_end {
        if pp.r() < 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        return ratio_gap(&two_value_config(x, pp.n())?, pp.exponent());
    }
    Ok(pp.ratio(x)?.to_float())
}

/// A scanned abscissa: a point of the uniform grid in `x`, or a tail point
/// given by its side coordinate `t` (`x` on the left, the last coordinate
/// on the right), which resolves points far closer to the ends than floats
/// in `x` can.
#[derive(Debug, Clone, Copy)]
enum Abscissa {
    X(f64),
    Left(f64),
    Right(f64),
}

/// Largest spacing of the tail points in `-ln t`.
pub const TAIL_MAX_STEP: f64 = 0.05;

/// Side coordinates of the tail points: log-uniform from the centre `1/n`
/// down to the profile's tail floor, excluding the centre. At least
/// `count` points, more if needed to keep the spacing under
/// [`TAIL_MAX_STEP`].
fn tail_coordinates(pp: &ProfileParams<f64>, count: usize) -> (Vec<f64>, f64) {
    let s_lo = -pp.centre().ln();
    let s_hi = -pp.tail_floor().ln();
    let count = count.max(((s_hi - s_lo) / TAIL_MAX_STEP).ceil() as usize);
    let ds = (s_hi - s_lo) / count as f64;
    ((1..=count).map(|j| (-(s_lo + ds * j as f64)).exp()).collect(), ds)
}

fn tail_ratio(pp: &ProfileParams<f64>, right: bool, t: f64) -> Result<f64> {
    Ok(if right { pp.ratio_by_last(t)? } else { pp.ratio(t)? }.to_float())
}

/// Scans `grid` uniform interior points of `(0, 1/(n-1))`, at least
/// `grid/4` log-spaced tail points on each side of `1/n`, and for `alpha > 0` the
/// ends themselves.
pub fn grid_scan_two_value(pp: &ProfileParams<f64>, grid: usize) -> Result<GridExtremes> {
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid must have at least {MIN_GRID} points, got {grid}")));
    }
    let x_max = pp.x_max();
    let step = x_max / (grid + 1) as f64;
    let (tails, tail_step) = tail_coordinates(pp, grid / 4);
    let tail_points = tails.len();
    let mut extra: Vec<Abscissa> = tails.iter().flat_map(|&t| [Abscissa::Left(t), Abscissa::Right(t)]).collect();
    if pp.r() > 0.0 {
        extra.extend([Abscissa::X(0.0), Abscissa::X(x_max)]);
    }
    let count = grid + extra.len();
    let point = |k: usize| if k < grid { Abscissa::X(step * (k + 1) as f64) } else { extra[k - grid] };
    let eval = |a: Abscissa| -> Result<(f64, Option<f64>, f64)> {
        match a {
            Abscissa::X(x) => Ok((x, None, grid_ratio(pp, x)?)),
            Abscissa::Left(t) => Ok((t, Some(t), tail_ratio(pp, false, t)?)),
            Abscissa::Right(t) => Ok((pp.x_from_last(t), Some(t), tail_ratio(pp, true, t)?)),
        }
    };
    let (lo, hi) = (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<(Best, Best)> {
            let (mut lo, mut hi) = (Best::worst_min(), Best::worst_max());
            for k in c * CHUNK..((c + 1) * CHUNK).min(count) {
                let (x, tail, value) = eval(point(k))?;
                let b = Best { value, x, tail, index: k };
                lo = Best::min(lo, b);
                hi = Best::max(hi, b);
            }
            Ok((lo, hi))
        })
        .try_reduce(|| (Best::worst_min(), Best::worst_max()), |a, b| Ok((Best::min(a.0, b.0), Best::max(a.1, b.1))))?;
    Ok(GridExtremes {
        min: lo.value,
        max: hi.value,
        arg_x_min: lo.x,
        arg_x_max: hi.x,
        arg_tail_min: lo.tail,
        arg_tail_max: hi.tail,
        points: count,
        step,
        tail_points,
        tail_step,
    })
}

/// Uniform points of the unit simplex from normalised standard
/// exponentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexSampler {
    pub n: usize,
    pub seed: u64,
}

impl SimplexSampler {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension { n, reason: "sampling needs n >= 2" });
        }
        Ok(Self { n, seed })
    }

    /// The `index`-th sample of the stream.
    pub fn sample(&self, index: u64) -> SampleVector<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let draws: Vec<f64> = (0..self.n).map(|_| Exp1.sample(&mut rng)).collect();
        let sum: f64 = draws.iter().sum();
        SampleVector::new(draws.into_iter().map(|d| d / sum).collect()).expect("exponential draws are finite and positive")
    }
}

pub fn simplex_sample(n: usize, seed: u64) -> Result<SampleVector<f64>> {
    Ok(SimplexSampler::new(n, seed)?.sample(0))
}

/// A fixed boundary point evaluated alongside the random samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub name: String,
    pub point: SampleVector<f64>,
    /// `-inf` for a negative exponent and a zero coordinate.
    pub ratio: Extended<f64>,
    pub admitted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Sample index, or the probe name.
    pub source: String,
    pub point: SampleVector<f64>,
    #[serde(serialize_with = "serial::num")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub e: ExponentPair<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Draws skipped because a zero coordinate with `alpha < 0` made the
    /// ratio degenerate.
    pub skipped: usize,
    pub observed_min: Extended<f64>,
    pub observed_max: Extended<f64>,
    pub arg_min: Option<SampleVector<f64>>,
    pub arg_max: Option<SampleVector<f64>>,
    pub violations: usize,
    pub first_violation: Option<Violation>,
    pub probes: Vec<Probe>,
    pub grid_extreme: Option<GridExtremes>,
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    lo: Best,
    hi: Best,
    skipped: usize,
    violations: usize,
    first_violation: usize,
}

impl Tally {
    fn empty() -> Self {
        Tally { lo: Best::worst_min(), hi: Best::worst_max(), skipped: 0, violations: 0, first_violation: usize::MAX }
    }

    fn merge(a: Tally, b: Tally) -> Tally {
        Tally {
            lo: Best::min(a.lo, b.lo),
            hi: Best::max(a.hi, b.hi),
            skipped: a.skipped + b.skipped,
            violations: a.violations + b.violations,
            first_violation: a.first_violation.min(b.first_violation),
        }
    }
}

fn probes(n: usize, e: &ExponentPair<f64>, sampler: &SimplexSampler) -> Vec<(String, SampleVector<f64>)> {
    let mut out = Vec::new();
    if e.alpha() > 0.0 {
        let mut vertex = vec![0.0; n];
        vertex[0] = 1.0;
        let mut face = vec![1.0 / (n - 1) as f64; n];
        face[0] = 0.0;
        let mut random_face = sampler.sample(0).into_inner();
        random_face[0] = 0.0;
        for (name, v) in [("vertex", vertex), ("zero coordinate, rest equal", face), ("zero coordinate, sample 0", random_face)] {
            out.push((name.to_string(), SampleVector::normalized(v).expect("valid probe")));
        }
    } else {
        let rest = (1.0 - NEAR_ZERO_PROBE) / (n - 1) as f64;
        let mut v = vec![rest; n];
        v[0] = NEAR_ZERO_PROBE;
        out.push((format!("x_1 = {NEAR_ZERO_PROBE:e}"), SampleVector::new(v).expect("valid probe")));
    }
    out
}

/// Evaluates the ratio on `samples` simplex points and on boundary probes,
/// counting points outside the certified bounds by more than `1e-9`
/// (relative for bounds above 1 in magnitude).
pub fn monte_carlo_extremes(
    n: usize,
    e: &ExponentPair<f64>,
    samples: usize,
    seed: u64,
    cert: &ExtremumCertificate<f64>,
) -> Result<OracleReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("at least {MIN_SAMPLES} samples are needed, got {samples}")));
    }
    ensure_instance(n, e, cert)?;
    let sampler = SimplexSampler::new(n, seed)?;
    let tally = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<Tally> {
            let mut t = Tally::empty();
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let xs = sampler.sample(i as u64);
                let q = match ratio_gap(&xs, e) {
                    Ok(q) => q,
                    Err(Error::DegenerateZero) => {
                        t.skipped += 1;
                        continue;
                    }
                    Err(err) => return Err(err),
                };
                let b = Best { value: q, x: f64::NAN, tail: None, index: i };
                t.lo = Best::min(t.lo, b);
                t.hi = Best::max(t.hi, b);
                if !cert.admits(q, SAMPLE_SLACK) {
                    t.violations += 1;
                    t.first_violation = t.first_violation.min(i);
                }
            }
            Ok(t)
        })
        .try_reduce(Tally::empty, |a, b| Ok(Tally::merge(a, b)))?;

    let mut violations = tally.violations;
    let mut first_violation = (tally.first_violation != usize::MAX).then(|| {
        let xs = sampler.sample(tally.first_violation as u64);
        let ratio = ratio_gap(&xs, e).unwrap_or(f64::NAN);
        Violation { source: format!("sample {}", tally.first_violation), point: xs, ratio }
    });

    let mut probe_results = Vec::new();
    for (name, point) in probes(n, e, &sampler) {
        let ratio = match ratio_gap(&point, e) {
            Ok(q) => Extended::Finite(q),
            Err(Error::DegenerateZero) => Extended::NegInfinity,
            Err(err) => return Err(err),
        };
        let admitted = match ratio {
            Extended::Finite(q) => cert.admits(q, SAMPLE_SLACK),
            _ => cert.lower_bound == Extended::NegInfinity,
        };
        if !admitted {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some(Violation { source: format!("probe {name}"), point: point.clone(), ratio: ratio.to_float() });
            }
        }
        probe_results.push(Probe { name, point, ratio, admitted });
    }

    let extreme = |b: Best| {
        if b.index == usize::MAX {
            (Extended::Finite(f64::NAN), None)
        } else {
            (Extended::Finite(b.value), Some(sampler.sample(b.index as u64)))
        }
    };
    let (observed_min, arg_min) = extreme(tally.lo);
    let (observed_max, arg_max) = extreme(tally.hi);
    Ok(OracleReport {
        n,
        e: *e,
        samples,
        seed,
        skipped: tally.skipped,
        observed_min,
        observed_max,
        arg_min,
        arg_max,
        violations,
        first_violation,
        probes: probe_results,
        grid_extreme: None,
    })
}

/// Sampling parameters for [`run_oracle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
    pub grid: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: 42, grid: DEFAULT_GRID }
    }
}

/// Monte-Carlo run plus the two-value grid scan.
pub fn run_oracle(cert: &ExtremumCertificate<f64>, config: &OracleConfig) -> Result<OracleReport> {
    let mut report = monte_carlo_extremes(cert.n, &cert.e, config.samples, config.seed, cert)?;
    let pp = ProfileParams::new(cert.n, cert.e)?;
    report.grid_extreme = Some(grid_scan_two_value(&pp, config.grid)?);
    Ok(report)
}

fn ensure_instance(n: usize, e: &ExponentPair<f64>, cert: &ExtremumCertificate<f64>) -> Result<()> {
    if n != cert.n || !e.same_instance(&cert.e) {
        return Err(Error::InstanceMismatch(format!(
            "report for n = {n}, alpha = {} against certificate for n = {}, alpha = {}",
            e.alpha(),
            cert.n,
            cert.e.alpha()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    /// Tolerance used between the grid extreme and a certified bound.
    #[serde(serialize_with = "serial::opt_num")]
    pub tol_grid: Option<f64>,
    pub diagnostics: Vec<String>,
}

/// Second difference of the grid ratio at `x` with spacing `h`. Zero within
/// `h` of an end, where the scan uses the log-spaced tail points instead
/// of the uniform grid.
fn curvature(pp: &ProfileParams<f64>, x: f64, h: f64) -> f64 {
    if !(x - h > 0.0 && x + h < pp.x_max()) {
        return 0.0;
    }
    match (grid_ratio(pp, x - h), grid_ratio(pp, x), grid_ratio(pp, x + h)) {
        (Ok(a), Ok(b), Ok(c)) => ((a - 2.0 * b + c) / (h * h)).abs(),
        _ => 0.0,
    }
}

/// Second difference of the ratio in `s = -ln t` at a tail point.
fn tail_curvature(pp: &ProfileParams<f64>, right: bool, t: f64, ds: f64) -> f64 {
    let at = |s: f64| tail_ratio(pp, right, (-s).exp());
    let s = -t.ln();
    match (at(s - ds), at(s), at(s + ds)) {
        (Ok(a), Ok(b), Ok(c)) if (-(s - ds)).exp() < pp.centre() => ((a - 2.0 * b + c) / (ds * ds)).abs(),
        _ => 0.0,
    }
}

/// Re-checks a report against a certificate: no sample or probe outside
/// the bounds by more than `tol`, and the grid extreme on each certified
/// side within `max(10 h |q''|, 1e-5)` of the bound, where `h` and `q''`
/// are the spacing and second difference in `x` on the uniform grid and
/// in `-ln t` on the tails. Both tolerances
/// are relative to bounds larger than 1 in magnitude.
pub fn check_bounds(report: &OracleReport, cert: &ExtremumCertificate<f64>, tol: f64) -> Result<CheckOutcome> {
    ensure_instance(report.n, &report.e, cert)?;
    let mut diagnostics = Vec::new();
    let describe = |v: &SampleVector<f64>| v.iter().map(|x| serial::format17(*x)).collect::<Vec<_>>().join(", ");

    if report.violations > 0 {
        let first = report
            .first_violation
            .as_ref()
            .map(|v| format!("; first: {} at [{}], ratio {}", v.source, describe(&v.point), serial::format17(v.ratio)));
        diagnostics.push(format!("{} points outside the bounds{}", report.violations, first.unwrap_or_default()));
    }
    for (value, arg, label) in
        [(report.observed_min, &report.arg_min, "observed minimum"), (report.observed_max, &report.arg_max, "observed maximum")]
    {
        if let (Extended::Finite(q), Some(v)) = (value, arg) {
            if !cert.admits(q, tol) {
                diagnostics.push(format!(
                    "{label} {} at [{}] lies outside [{}, {}]",
                    serial::format17(q),
                    describe(v),
                    cert.lower_bound,
                    cert.upper_bound
                ));
            }
        }
    }
    for p in &report.probes {
        if let Extended::Finite(q) = p.ratio {
            if !cert.admits(q, tol) {
                diagnostics.push(format!(
                    "probe {} at [{}] with ratio {} lies outside the bounds",
                    p.name,
                    describe(&p.point),
                    serial::format17(q)
                ));
            }
        }
    }

    let mut tol_grid = None;
    if let Some(g) = &report.grid_extreme {
        let pp = ProfileParams::new(cert.n, cert.e)?;
        let sides = [
            (cert.bound_kind.lower, cert.lower_bound, g.min, g.arg_x_min, g.arg_tail_min, "lower"),
            (cert.bound_kind.upper, cert.upper_bound, g.max, g.arg_x_max, g.arg_tail_max, "upper"),
        ];
        for (kind, bound, value, x, tail, side) in sides {
            let Extended::Finite(b) = bound else { continue };
            let scale = b.abs().max(1.0);
            let resolution = match tail {
                _ if kind != BoundKind::CertifiedExtremum => 0.0,
                None => 10.0 * g.step * curvature(&pp, x, g.step),
                Some(t) => 10.0 * g.tail_step * tail_curvature(&pp, x > pp.centre(), t, g.tail_step),
            };
            let t = resolution.max(GRID_TOL_FLOOR * scale);
            tol_grid = Some(tol_grid.map_or(t, |u: f64| u.max(t)));
            if (value - b).abs() > t {
                diagnostics.push(format!(
                    "grid {side} extreme {} at x = {} is {} away from the {side} bound {} (tolerance {})",
                    serial::format17(value),
                    serial::format17(x),
                    serial::format17((value - b).abs()),
                    serial::format17(b),
                    serial::format17(t)
                ));
            }
            let outside = match side {
                "lower" => value < b - tol * scale,
                _ => value > b + tol * scale,
            };
            if outside {
                diagnostics.push(format!(
                    "grid {side} extreme {} at x = {} lies beyond the bound",
                    serial::format17(value),
                    serial::format17(x)
                ));
            }
        }
    }
    Ok(CheckOutcome { pass: diagnostics.is_empty(), tol_grid, diagnostics })
}
