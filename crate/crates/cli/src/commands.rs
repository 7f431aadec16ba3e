//! Subcommand bodies. Each returns whether every reported check passed.

use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use dunkl_core::heat::{max_principle_probe, MaxPrincipleReport};
use dunkl_core::kernel::kernel_eval_z2;
use dunkl_core::suite::{self, heat_checks, judge, product_grid};
use dunkl_core::transform::dunkl_transform;
use dunkl_core::{
    rule_tensor, run_suite, CheckOutcome, Family, HeatModel, HermiteSystem, Kernel, OperatorContext, OrbitKernel,
    RootSystem, SignMutation, SuiteConfig, TestFunction, C64,
};

use crate::config::RunConfig;
use crate::output::{coordinate_headers, write_json, Cell, Table};
use crate::UsageError;

/// `a:b:n` (n evenly spaced values from a to b) or a comma list.
pub fn parse_axis(text: &str) -> Result<Vec<f64>, UsageError> {
    let bad = || UsageError(format!("bad grid `{text}`: expected a:b:n or v1,v2,..."));
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            match n {
                0 => return Err(bad()),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        [list] => list.split(',').map(|v| v.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

/// `one`, `gaussian[:a]` or `hermite:i,j,...` (0-based multi-index).
pub fn parse_profile(text: &str, cfg: &RunConfig, hs: impl FnOnce() -> Result<Arc<HermiteSystem>>) -> Result<TestFunction> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    match (name, arg) {
        ("one", None) => Ok(TestFunction::constant(1.0)),
        ("gaussian", a) => {
            let a = match a {
                Some(s) => s.parse::<f64>().map_err(|_| UsageError(format!("bad Gaussian rate `{s}`")))?,
                None => 1.0,
            };
            if !(a > 0.0 && a.is_finite()) {
                return Err(UsageError(format!("Gaussian rate must be positive, got {a}")).into());
            }
            Ok(TestFunction::gaussian(a))
        }
        ("hermite", Some(idx)) => {
            let nu: Vec<u32> = idx
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| UsageError(format!("bad multi-index `{idx}`")))?;
            if nu.len() != cfg.rank() {
                return Err(UsageError(format!("multi-index `{idx}` needs {} entries", cfg.rank())).into());
            }
            let degree: u32 = nu.iter().sum();
            if degree as usize > cfg.n_max {
                return Err(UsageError(format!("degree {degree} exceeds --nmax {}", cfg.n_max)).into());
            }
            Ok(TestFunction::hermite_function(hs()?, &nu)?)
        }
        _ => Err(UsageError(format!("unknown profile `{text}`: use one, gaussian[:a] or hermite:i,j,...")).into()),
    }
}

fn system(cfg: &RunConfig) -> Result<Arc<RootSystem>> {
    Ok(Arc::new(cfg.spec.build()?))
}

fn hermite(cfg: &RunConfig) -> Result<Arc<HermiteSystem>> {
    let ctx = Arc::new(OperatorContext::new(system(cfg)?)?);
    Ok(Arc::new(HermiteSystem::build(ctx, cfg.n_max)?))
}

fn points_of(axis: &[f64], rank: usize) -> Vec<Vec<f64>> {
    product_grid(axis, rank)
}

#[derive(Serialize)]
struct BasisDoc {
    system: String,
    n_max: usize,
    gram_is_identity: bool,
    records: Vec<dunkl_core::BasisRecord>,
}

pub fn basis(cfg: &RunConfig) -> Result<bool> {
    let hs = hermite(cfg)?;
    let ok = hs.is_orthonormal()?;
    let doc = BasisDoc {
        system: cfg.spec.label(),
        n_max: cfg.n_max,
        gram_is_identity: ok,
        records: hs.to_table(),
    };
    write_json(&doc, cfg.out.as_deref())?;
    Ok(ok)
}

pub fn quad(cfg: &RunConfig) -> Result<bool> {
    let rule = rule_tensor(&*system(cfg)?, cfg.points())?;
    write_json(&rule, cfg.out.as_deref())?;
    Ok(true)
}

pub fn kernel(cfg: &RunConfig, xgrid: &str, ygrid: Option<&str>) -> Result<bool> {
    let sys = system(cfg)?;
    let rank = sys.dim();
    let xs = points_of(&parse_axis(xgrid)?, rank);
    let ys = match ygrid {
        Some(g) => points_of(&parse_axis(g)?, rank),
        None => xs.clone(),
    };
    let closed_form = (sys.family() == Family::Z2Product && rank == 1).then(|| sys.positive_roots()[0].multiplicity_f64());
    let kernel = OrbitKernel::new(sys);
    let mut headers = coordinate_headers("x", rank);
    headers.extend(coordinate_headers("y", rank));
    headers.extend(["K", "certified_tail", "converged"].map(String::from));
    if closed_form.is_some() {
        headers.push("closed_form".into());
    }
    let mut table = Table::new(headers);
    let mut all_converged = true;
    for x in &xs {
        for y in &ys {
            let v = kernel.eval_real(x, y, cfg.tol);
            all_converged &= v.converged;
            let mut row: Vec<Cell> = x.iter().chain(y).map(|&c| Cell::from(c)).collect();
            row.extend([Cell::from(v.value), Cell::from(v.tail), Cell::from(v.converged)]);
            if let Some(mu) = closed_form {
                row.push(Cell::from(kernel_eval_z2(mu, C64::new(x[0], 0.0), C64::new(y[0], 0.0)).re));
            }
            table.push(row);
        }
    }
    table.write(cfg.out.as_deref(), cfg.format)?;
    Ok(all_converged)
}

fn parse_times(text: &str) -> Result<Vec<f64>> {
    let times = parse_axis(text)?;
    if times.iter().any(|&t| t < 0.0) {
        bail!(UsageError(format!("times must be nonnegative: `{text}`")));
    }
    Ok(times)
}

pub fn heat_solve(cfg: &RunConfig, profile: &str, grid: &str, times: &str) -> Result<bool> {
    let model = HeatModel::new(system(cfg)?, cfg.points())?;
    let f = parse_profile(profile, cfg, || hermite(cfg))?;
    let xs = points_of(&parse_axis(grid)?, cfg.rank());
    let times = parse_times(times)?;
    let mut headers = coordinate_headers("x", cfg.rank());
    headers.extend(["t", "u", "mass"].map(String::from));
    let mut table = Table::new(headers);
    for &t in &times {
        for x in &xs {
            let u = model.heat_solve(&f, x, t).with_context(|| format!("solving at x = {x:?}, t = {t}"))?;
            let mass = if t > 0.0 { model.mass(x, t)? } else { 1.0 };
            let mut row: Vec<Cell> = x.iter().map(|&c| Cell::from(c)).collect();
            row.extend([Cell::from(t), Cell::from(u), Cell::from(mass)]);
            table.push(row);
        }
    }
    table.write(cfg.out.as_deref(), cfg.format)?;
    Ok(true)
}

#[derive(Serialize)]
struct HeatCheckDoc {
    system: String,
    passed: bool,
    checks: Vec<CheckOutcome>,
    max_principle: MaxPrincipleReport,
}

pub fn heat_check(cfg: &RunConfig) -> Result<bool> {
    let sys = system(cfg)?;
    let model = HeatModel::new(sys.clone(), cfg.points())?;
    let label = cfg.spec.label();
    let z2 = sys.family() == Family::Z2Product;
    let mut checks = heat_checks(&model, &label, z2, sys.is_trivial(), cfg.seed);
    checks.push(judge(
        "heat_equation",
        &label,
        1e-5,
        suite::heat_equation_residual(&sys, 50, cfg.seed),
    ));
    let grid = product_grid(&[-1.0, 0.0, 1.0], sys.dim());
    let probe = max_principle_probe(&model, &TestFunction::gaussian(1.0), &grid, &[0.25, 1.0], 1e-8)?;
    let passed = checks.iter().all(CheckOutcome::passed) && probe.violations.is_empty() && probe.peak_violations.is_empty();
    let doc = HeatCheckDoc {
        system: label,
        passed,
        checks,
        max_principle: probe,
    };
    write_json(&doc, cfg.out.as_deref())?;
    Ok(passed)
}

pub fn transform(cfg: &RunConfig, profile: &str, grid: &str) -> Result<bool> {
    let ctx = dunkl_core::TransformContext::new(system(cfg)?, cfg.points())?;
    let f = parse_profile(profile, cfg, || hermite(cfg))?;
    if !f.has_gaussian() {
        bail!(UsageError(format!("profile `{profile}` has no Gaussian decay; the transform needs one")));
    }
    let xis = points_of(&parse_axis(grid)?, cfg.rank());
    let mut headers = coordinate_headers("xi", cfg.rank());
    headers.extend(["re", "im"].map(String::from));
    let mut table = Table::new(headers);
    for xi in &xis {
        let v = dunkl_transform(&ctx, &f, xi)?;
        let mut row: Vec<Cell> = xi.iter().map(|&c| Cell::from(c)).collect();
        row.extend([Cell::from(v.re), Cell::from(v.im)]);
        table.push(row);
    }
    table.write(cfg.out.as_deref(), cfg.format)?;
    Ok(true)
}

pub fn check(cfg: &RunConfig, mutate: bool) -> Result<bool> {
    let config = SuiteConfig {
        n_max: cfg.n_max,
        qpoints: cfg.qpoints,
        seed: cfg.seed,
        mutation: if mutate { SignMutation::FirstCoordinate } else { SignMutation::None },
    };
    let report = run_suite(&cfg.spec, &config);
    write_json(&report, cfg.out.as_deref())?;
    Ok(report.passed)
}
