use anyhow::{bail, Context};
use meanratio::constants::{best_constants_with, monotonicity, sweep_constants, Monotonicity, Tolerances, SAMPLE_SLACK};
use meanratio::oracle::{check_bounds, run_oracle, OracleConfig};
use meanratio::reduction::{curve_params, curve_point, h_power_sum, h_prime};
use meanratio::serial::{format17, format_extended};
use meanratio::{ExponentPair64, Extended, ProfileParams64};
use serde_json::{json, Value};

use crate::output::{Output, Table};

fn num(v: f64) -> Option<String> {
    Some(format17(v))
}

fn ext(v: Extended<f64>) -> Option<String> {
    Some(format_extended(&v))
}

fn opt(v: Option<f64>) -> Option<String> {
    v.map(format17)
}

fn text(s: impl Into<String>) -> Option<String> {
    Some(s.into())
}

fn instance(n: usize, e: &ExponentPair64) -> Value {
    json!({ "n": n, "exponent": e })
}

fn tolerances(tol: &Tolerances) -> Value {
    serde_json::to_value(tol).expect("tolerances serialise")
}

fn kind_name<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

const CERT_COLUMNS: &[&str] =
    &["n", "alpha", "r", "regime", "lower", "upper", "lower_kind", "upper_kind", "nu", "omega", "x_star", "y_star", "mu"];

fn cert_row(c: &meanratio::Certificate64) -> Vec<Option<String>> {
    vec![
        text(c.n.to_string()),
        num(c.e.alpha()),
        num(c.e.r()),
        text(c.regime.tag.name()),
        ext(c.lower_bound),
        ext(c.upper_bound),
        text(kind_name(&c.bound_kind.lower)),
        text(kind_name(&c.bound_kind.upper)),
        opt(c.nu),
        opt(c.omega),
        opt(c.x_star),
        opt(c.y_star),
        opt(c.mu.map(|m| m.mu)),
    ]
}

pub fn constants(n: usize, e: ExponentPair64, tol: Tolerances) -> anyhow::Result<Output> {
    let cert = best_constants_with(n, &e, tol)?;
    let mut table = Table::new(CERT_COLUMNS);
    table.push(cert_row(&cert));
    Ok(Output {
        command: "constants",
        instance: instance(n, &e),
        tolerances: tolerances(&tol),
        payload: serde_json::to_value(&cert)?,
        table,
        failed: false,
    })
}

pub fn verify(n: usize, e: ExponentPair64, tol: Tolerances, config: OracleConfig) -> anyhow::Result<Output> {
    let cert = best_constants_with(n, &e, tol)?;
    let report = run_oracle(&cert, &config)?;
    let check = check_bounds(&report, &cert, SAMPLE_SLACK)?;
    let grid = report.grid_extreme.as_ref();
    let mut table = Table::new(&[
        "n",
        "alpha",
        "regime",
        "lower",
        "upper",
        "samples",
        "seed",
        "violations",
        "observed_min",
        "observed_max",
        "grid_min",
        "grid_max",
        "pass",
    ]);
    table.push(vec![
        text(n.to_string()),
        num(e.alpha()),
        text(cert.regime.tag.name()),
        ext(cert.lower_bound),
        ext(cert.upper_bound),
        text(config.samples.to_string()),
        text(config.seed.to_string()),
        text(report.violations.to_string()),
        ext(report.observed_min),
        ext(report.observed_max),
        opt(grid.map(|g| g.min)),
        opt(grid.map(|g| g.max)),
        text(check.pass.to_string()),
    ]);
    let mut tol_value = tolerances(&tol);
    tol_value["sample_slack"] = json!(format17(SAMPLE_SLACK));
    Ok(Output {
        command: "verify",
        instance: json!({ "n": n, "exponent": e, "samples": config.samples, "seed": config.seed, "grid": config.grid }),
        tolerances: tol_value,
        payload: json!({ "certificate": cert, "report": report, "check": check, "pass": check.pass }),
        table,
        failed: !check.pass,
    })
}

pub fn sweep(e: ExponentPair64, n_min: usize, n_max: usize, tol: Tolerances) -> anyhow::Result<Output> {
    if n_min < 3 || n_min > n_max {
        bail!("sweep needs 3 <= n-min <= n-max, got {n_min}..{n_max}");
    }
    let certs = sweep_constants(&e, n_min, n_max, tol)?;
    let omegas: Option<Vec<f64>> = certs.iter().map(|c| c.omega).collect();
    let trend = omegas.as_deref().map_or(Monotonicity::Undetermined, monotonicity);
    let trend_name = kind_name(&trend);
    let mut columns = CERT_COLUMNS.to_vec();
    columns.push("omega_trend");
    let mut table = Table::new(&columns);
    for c in &certs {
        let mut row = cert_row(c);
        row.push(text(trend_name.clone()));
        table.push(row);
    }
    Ok(Output {
        command: "sweep",
        instance: json!({ "exponent": e, "n_min": n_min, "n_max": n_max }),
        tolerances: tolerances(&tol),
        payload: json!({ "certificates": certs, "omega": omegas.map(|v| v.into_iter().map(format17).collect::<Vec<_>>()), "omega_trend": trend }),
        table,
        failed: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    G,
    P,
    F,
    U,
    V,
    W,
    FPrime,
}

impl Column {
    pub fn parse_list(s: &str) -> anyhow::Result<Vec<Column>> {
        let mut out = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let c = match token {
                "g" => Column::G,
                "p" => Column::P,
                "f" => Column::F,
                "U" | "u" => Column::U,
                "V" | "v" => Column::V,
                "W" | "w" => Column::W,
                "fprime" => Column::FPrime,
                other => bail!("unknown profile column `{other}`; expected a subset of g,p,f,U,V,W,fprime"),
            };
            if !out.contains(&c) {
                out.push(c);
            }
        }
        if out.is_empty() {
            bail!("--which needs at least one column");
        }
        Ok(out)
    }

    fn name(self) -> &'static str {
        match self {
            Column::G => "g",
            Column::P => "p",
            Column::F => "f",
            Column::U => "U",
            Column::V => "V",
            Column::W => "W",
            Column::FPrime => "fprime",
        }
    }
}

pub fn profile(n: usize, e: ExponentPair64, points: usize, which: &[Column]) -> anyhow::Result<Output> {
    if points < 2 {
        bail!("--points must be at least 2");
    }
    let pp = ProfileParams64::new(n, e)?;
    let inset = meanratio::profile::SINGULAR_BAND * pp.centre();
    let (lo, hi) = (inset, pp.x_max() - inset);
    let mut columns = vec!["x"];
    columns.extend(which.iter().map(|c| c.name()));
    let mut table = Table::new(&columns);
    for k in 0..points {
        let x = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let mut row = vec![num(x)];
        for c in which {
            let cell = match c {
                Column::G => num(pp.g(x)?),
                Column::P => num(pp.p(x)?),
                Column::F => num(pp.f(x)?),
                Column::U => ext(pp.u_factor(x)?),
                Column::V => ext(pp.v_factor(x)?),
                Column::W => ext(pp.w(x)?),
                // undefined in the band around 1/n
                Column::FPrime => pp.f_prime(x).ok().and_then(ext),
            };
            row.push(cell);
        }
        table.push(row);
    }
    Ok(Output {
        command: "profile",
        instance: json!({ "n": n, "exponent": e, "points": points }),
        tolerances: json!({ "singular_band": format17(pp.singular_band()) }),
        payload: json!({ "regime": pp.regime_tag(), "table": table }),
        table,
        failed: false,
    })
}

pub fn reduce3(sum: f64, prod: f64, r: f64, grid: usize) -> anyhow::Result<Output> {
    if grid < 2 {
        bail!("--grid must be at least 2");
    }
    if r == 0.0 || r == 1.0 {
        bail!("--r must differ from 0 and 1");
    }
    let cp = curve_params(sum, prod)?;
    let mut table = Table::new(&["t", "x", "y", "z", "h", "h_prime"]);
    let mut hs = Vec::with_capacity(grid);
    for k in 0..grid {
        let t = if k + 1 == grid { cp.t_hi } else { cp.t_lo + (cp.t_hi - cp.t_lo) * k as f64 / (grid - 1) as f64 };
        let p = curve_point(t, &cp).with_context(|| format!("curve point at t = {t}"))?;
        let h = h_power_sum(t, &cp, r)?;
        hs.push(h);
        // the factored derivative is only defined strictly inside
        let hp = if k == 0 || k + 1 == grid { None } else { Some(h_prime(t, &cp, r)?) };
        table.push(vec![num(t), num(p.x), num(p.y), num(p.z), num(h), opt(hp)]);
    }
    let trend = monotonicity(&hs);
    let expected = if r > 1.0 { Monotonicity::StrictlyDecreasing } else { Monotonicity::StrictlyIncreasing };
    let consistent = trend == expected;
    Ok(Output {
        command: "reduce3",
        instance: json!({ "sum": format17(sum), "prod": format17(prod), "r": format17(r), "grid": grid }),
        tolerances: json!({ "discriminant_slack": format17(meanratio::reduction::DISCRIMINANT_SLACK) }),
        payload: json!({ "curve": cp, "table": table, "h_trend": trend, "expected_trend": expected, "consistent": consistent }),
        table,
        failed: !consistent,
    })
}
