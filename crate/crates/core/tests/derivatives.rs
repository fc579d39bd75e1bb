//! Analytic derivatives against Richardson-extrapolated central
//! differences.

use meanratio::reduction::{curve_params, h_power_sum, h_prime};
use meanratio::{ExponentPair64, Extended, ProfileParams64};

const INSTANCES: [(usize, f64); 4] = [(3, -1.0), (4, 0.5), (3, 1.4), (5, 5.0)];

fn params(n: usize, r: f64) -> ProfileParams64 {
    ProfileParams64::new(n, ExponentPair64::from_r(r).unwrap()).unwrap()
}

fn fin(v: Extended<f64>) -> f64 {
    v.finite().expect("finite interior value")
}

/// Central difference with one Richardson step: error O(h^4).
fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// 100 interior points, 2% away from the ends and clear of the band
/// around `1/n`.
fn points(pp: &ProfileParams64) -> Vec<f64> {
    let (lo, hi) = (0.02 * pp.x_max(), 0.98 * pp.x_max());
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < 100 {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / 103.0;
        k += 1;
        if (x - pp.centre()).abs() > 0.01 * pp.centre() {
            out.push(x);
        }
    }
    out
}

/// Relative agreement; values that cross zero are compared against a
/// floor of `1e-3` times the largest magnitude on the grid.
fn assert_agree(label: &str, analytic: &[f64], numeric: &[f64], xs: &[f64], tol: f64) {
    let scale = analytic.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for ((a, b), x) in analytic.iter().zip(numeric).zip(xs) {
        let denom = a.abs().max(b.abs()).max(1e-3 * scale);
        assert!((a - b).abs() <= tol * denom, "{label} at x = {x}: analytic {a}, numeric {b}");
    }
}

fn check(label: &str, pp: &ProfileParams64, value: impl Fn(f64) -> f64, derivative: impl Fn(f64) -> f64, tol: f64) {
    let xs = points(pp);
    let h = 1e-4 * pp.x_max();
    let analytic: Vec<f64> = xs.iter().map(|&x| derivative(x)).collect();
    let numeric: Vec<f64> = xs.iter().map(|&x| richardson(&value, x, h)).collect();
    assert_agree(label, &analytic, &numeric, &xs, tol);
}

#[test]
fn first_derivatives_of_g_and_p() {
    for (n, r) in INSTANCES {
        let pp = params(n, r);
        check(&format!("g' n {n} r {r}"), &pp, |x| pp.g(x).unwrap(), |x| fin(pp.g_prime(x).unwrap()), 1e-5);
        check(&format!("p' n {n} r {r}"), &pp, |x| pp.p(x).unwrap(), |x| fin(pp.p_prime(x).unwrap()), 1e-5);
    }
}

#[test]
fn second_derivatives_of_g_and_p() {
    for (n, r) in INSTANCES {
        let pp = params(n, r);
        check(&format!("g'' n {n} r {r}"), &pp, |x| fin(pp.g_prime(x).unwrap()), |x| fin(pp.g_second(x).unwrap()), 1e-4);
        check(&format!("p'' n {n} r {r}"), &pp, |x| fin(pp.p_prime(x).unwrap()), |x| fin(pp.p_second(x).unwrap()), 1e-4);
    }
}

#[test]
fn derivatives_of_w_and_f() {
    for (n, r) in INSTANCES {
        let pp = params(n, r);
        check(&format!("W' n {n} r {r}"), &pp, |x| fin(pp.w(x).unwrap()), |x| fin(pp.w_prime(x).unwrap()), 1e-5);
        check(&format!("f' n {n} r {r}"), &pp, |x| pp.f(x).unwrap(), |x| fin(pp.f_prime(x).unwrap()), 1e-5);
    }
}

#[test]
fn w_prime_is_continuous_through_the_centre() {
    for (n, r) in INSTANCES {
        let pp = params(n, r);
        let c = pp.centre();
        let at = fin(pp.w_prime(c).unwrap());
        for d in [1e-3, 1e-4] {
            let avg = 0.5 * (fin(pp.w_prime(c + d * c).unwrap()) + fin(pp.w_prime(c - d * c).unwrap()));
            assert!((avg - at).abs() <= 1e-3 * at.abs(), "n {n} r {r}: {avg} vs {at}");
        }
    }
}

#[test]
fn derivative_of_the_power_sum_along_the_curve() {
    let cp = curve_params(6.0, 6.0).unwrap();
    for r in [2.0, 0.5, -1.0, 3.0] {
        let span = cp.t_hi - cp.t_lo;
        let ts: Vec<f64> = (0..100).map(|k| cp.t_lo + span * (0.02 + 0.96 * k as f64 / 99.0)).collect();
        let h = 1e-4 * span;
        let analytic: Vec<f64> = ts.iter().map(|&t| h_prime(t, &cp, r).unwrap()).collect();
        let numeric: Vec<f64> = ts.iter().map(|&t| richardson(|s| h_power_sum(s, &cp, r).unwrap(), t, h)).collect();
        assert_agree(&format!("h' r {r}"), &analytic, &numeric, &ts, 1e-5);
    }
}
