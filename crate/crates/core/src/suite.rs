//! Identity checks over one root system, collected into a
//! machine-readable report.
//!
//! Each check returns a [`Measured`] (largest residual and sample count);
//! [`judge`] turns it into a [`CheckOutcome`] against a fixed tolerance.
//! Exact checks count nonzero residual polynomials, so their tolerance is 0.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dunkl::{OperatorContext, SignMutation};
use crate::error::{DunklError, Result};
use crate::groups::{Family, RootSystem, SystemSpec};
use crate::heat::{basic_solution_residual, HeatModel};
use crate::hermite::HermiteSystem;
use crate::kernel::{
    generating_function_residual, kernel_eval_z2_dd, mehler_lhs, mehler_rhs, reproducing_residual, Kernel,
    KernelEvaluator, OrbitKernel,
};
use crate::poly::{random_polynomial, Monomial, Polynomial};
use crate::quad::{normalization_c_k, rule_tensor, QuadratureRule};
use crate::rational::{int, rat};
use crate::scalar::{Scalar, C64, CDD};
use crate::transform::{eigenrelation_error, TestFunction, TransformContext, KERNEL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub system: String,
    pub verdict: Verdict,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn skipped(name: &str, system: &str, why: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            system: system.into(),
            verdict: Verdict::Skip,
            max_residual: 0.0,
            tolerance: 0.0,
            samples: 0,
            detail: Some(why.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub system: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn new(system: String, checks: Vec<CheckOutcome>) -> Self {
        let passed = checks.iter().all(CheckOutcome::passed);
        CheckReport { system, passed, checks }
    }
}

/// Largest residual over `samples` evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Measured {
    pub max_residual: f64,
    pub samples: usize,
}

impl Measured {
    pub fn push(&mut self, r: f64) {
        self.samples += 1;
        if r.is_nan() || r > self.max_residual {
            self.max_residual = if r.is_nan() { f64::INFINITY } else { r };
        }
    }

    fn push_exact(&mut self, zero: bool) {
        self.push(if zero { 0.0 } else { 1.0 });
    }
}

/// Turns a measurement into a verdict; errors fail the check.
pub fn judge(name: &str, system: &str, tolerance: f64, m: Result<Measured>) -> CheckOutcome {
    let (verdict, max_residual, samples, detail) = match m {
        Ok(m) => {
            let v = if m.max_residual <= tolerance { Verdict::Pass } else { Verdict::Fail };
            (v, m.max_residual, m.samples, None)
        }
        Err(e) => (Verdict::Fail, f64::INFINITY, 0, Some(e.to_string())),
    };
    CheckOutcome {
        name: name.into(),
        system: system.into(),
        verdict,
        max_residual,
        tolerance,
        samples,
        detail,
    }
}

/// `rodrigues_poly(ν) == hermite_poly(ν)` for every basis element.
pub fn exact_rodrigues(hs: &HermiteSystem) -> Result<Measured> {
    let mut m = Measured::default();
    for e in hs.elements() {
        m.push_exact(hs.rodrigues_poly(&e.index)? == e.hermite);
    }
    Ok(m)
}

/// Both eigen-equation residuals vanish for every basis element.
pub fn exact_eigen(hs: &HermiteSystem) -> Result<Measured> {
    let mut m = Measured::default();
    for e in hs.elements() {
        let [a, b] = hs.eigen_residuals(&e.index)?;
        m.push_exact(a.is_zero() && b.is_zero());
    }
    Ok(m)
}

/// `T_i T_j x^a = T_j T_i x^a` for all monomials of degree `≤ max_degree`.
pub fn exact_commutativity(ctx: &OperatorContext, max_degree: usize) -> Result<Measured> {
    let n = ctx.dim();
    let mut m = Measured::default();
    for d in 0..=max_degree {
        for mono in Monomial::all_of_degree(n, d) {
            let p = Polynomial::monomial(mono.exps());
            let once: Vec<Polynomial> = (0..n).map(|i| ctx.dunkl_apply(i, &p)).collect::<Result<_>>()?;
            for i in 0..n {
                for j in i + 1..n {
                    let a = ctx.dunkl_apply(i, &once[j])?;
                    let b = ctx.dunkl_apply(j, &once[i])?;
                    m.push_exact(a == b);
                }
            }
        }
    }
    Ok(m)
}

/// sl(2) commutator residuals and the `e^{cΔ_k}` scaling residual on
/// `count` seeded random polynomials.
pub fn exact_sl2_scaling(ctx: &OperatorContext, count: usize, seed: u64) -> Result<Measured> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Measured::default();
    let (c, a_sq) = (rat(-1, 4), int(2));
    for _ in 0..count {
        let p = random_polynomial(&mut rng, ctx.dim(), 5, 5);
        let sl2 = ctx.sl2_commutators(&p)?;
        m.push_exact(sl2.iter().all(Polynomial::is_zero));
        m.push_exact(ctx.scaling_residual(&c, &a_sq, &p)?.is_zero());
    }
    Ok(m)
}

/// The pairing Gram matrix of `{φ_ν}` is the identity: in the pair
/// representation `[φ̃_a, φ̃_b]_k = δ_ab m_a`.
pub fn exact_gram(hs: &HermiteSystem) -> Result<Measured> {
    let (gram, norms) = hs.pair_gram()?;
    let mut m = Measured::default();
    for (a, row) in gram.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            m.push_exact(if a == b { *v == norms[a] } else { v.is_zero() });
        }
    }
    Ok(m)
}

/// `H̃_ν` is the product of classical Hermite polynomials when `k = 0`.
pub fn classical_hermite(hs: &HermiteSystem) -> Result<Measured> {
    let n = hs.dim();
    let mut table = vec![Polynomial::one(1), Polynomial::var(1, 0).scale(&int(2))];
    while table.len() <= hs.n_max() {
        let j = table.len() - 1;
        let next = table[j].mul_var(0).scale(&int(2)) - table[j - 1].scale(&int(2 * j as i64));
        table.push(next);
    }
    let mut m = Measured::default();
    for e in hs.elements() {
        let expect = e
            .index
            .iter()
            .enumerate()
            .fold(Polynomial::one(n), |acc, (i, &d)| &acc * &table[d as usize].embed(n, i));
        m.push_exact(expect == e.hermite);
    }
    Ok(m)
}

/// Relative error of the orbit series against the rank-one Bessel closed
/// form at `samples` seeded complex points with `|z|, |w| ≤ radius`.
pub fn bessel_agreement(mu: &BigRational, samples: usize, radius: f64, seed: u64) -> Result<Measured> {
    let spec = SystemSpec::z2(std::slice::from_ref(mu))?;
    let orbit = OrbitKernel::new(Arc::new(spec.build()?));
    let muf = mu.to_f64().unwrap_or(f64::NAN);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        let r = radius * rng.gen::<f64>();
        let th = std::f64::consts::TAU * rng.gen::<f64>();
        CDD::from_c64(C64::from_polar(r, th))
    };
    let mut m = Measured::default();
    for _ in 0..samples {
        let (z, w) = (point(&mut rng), point(&mut rng));
        let series = orbit.eval_cdd(&[z], &[w], KERNEL_TOL);
        if !series.converged {
            return Err(DunklError::NotConverged {
                tail: series.tail,
                tol: KERNEL_TOL,
                degree: series.degree,
            });
        }
        let closed = kernel_eval_z2_dd(muf, z, w).to_c64();
        m.push((series.value.to_c64() - closed).norm() / closed.norm());
    }
    Ok(m)
}

/// `|c_k ∫ H_ν H_η w_k e^{-|x|²} dx - 2^{|ν|} δ_νη|` for `|ν|, |η| ≤ max_degree`.
pub fn quadrature_orthogonality(hs: &HermiteSystem, rule: &QuadratureRule, max_degree: usize) -> Result<Measured> {
    let c_k = normalization_c_k(rule)?;
    let elems: Vec<_> = hs.elements().filter(|e| e.degree() <= max_degree).collect();
    let values: Vec<Vec<f64>> = rule.nodes.iter().map(|x| elems.iter().map(|e| e.hermite_value(x)).collect()).collect();
    let mut m = Measured::default();
    for a in 0..elems.len() {
        for b in a..elems.len() {
            let integral: f64 = values.iter().zip(&rule.weights).map(|(v, w)| w * v[a] * v[b]).sum::<f64>() * c_k;
            let expect = if a == b { 2f64.powi(elems[a].degree() as i32) } else { 0.0 };
            m.push((integral - expect).abs());
        }
    }
    Ok(m)
}

/// Mehler partial sums against the closed form over `grid × grid` for
/// each `r`.
pub fn mehler(hs: &HermiteSystem, kernel: &dyn Kernel, rs: &[f64], grid: &[Vec<f64>]) -> Result<Measured> {
    let mut m = Measured::default();
    for &r in rs {
        for x in grid {
            for y in grid {
                let (lhs, _) = mehler_lhs(hs, x, y, r)?;
                let rhs = mehler_rhs(kernel, x, y, r, KERNEL_TOL)?.certified(KERNEL_TOL)?;
                m.push((lhs - rhs).abs());
            }
        }
    }
    Ok(m)
}

pub fn generating_function(ev: &KernelEvaluator, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<Measured> {
    let mut m = Measured::default();
    for (z, w) in pairs {
        m.push(generating_function_residual(ev, z, w, KERNEL_TOL)?.residual);
    }
    Ok(m)
}

pub fn reproducing(kernel: &dyn Kernel, rule: &QuadratureRule, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<Measured> {
    let mut m = Measured::default();
    for (z, w) in pairs {
        m.push(reproducing_residual(kernel, rule, z, w, KERNEL_TOL)?.residual);
    }
    Ok(m)
}

/// Sup-norm relative error of `D_k h_ν ∝ h_ν` for `|ν| ≤ max_degree`.
pub fn transform_eigenrelation(
    ctx: &TransformContext,
    hs: &Arc<HermiteSystem>,
    max_degree: usize,
    grid: &[Vec<f64>],
) -> Result<Measured> {
    let mut m = Measured::default();
    for e in hs.elements().filter(|e| e.degree() <= max_degree) {
        m.push(eigenrelation_error(ctx, hs.clone(), &e.index, grid)?);
    }
    Ok(m)
}

pub fn heat_mass(model: &HeatModel, points: &[Vec<f64>], times: &[f64]) -> Result<Measured> {
    let mut m = Measured::default();
    for &t in times {
        for x in points {
            m.push((model.mass(x, t)? - 1.0).abs());
        }
    }
    Ok(m)
}

/// Relative difference of the product and spectral forms of `Γ_k`.
pub fn heat_two_routes(model: &HeatModel, points: &[Vec<f64>], times: &[f64]) -> Result<Measured> {
    let mut m = Measured::default();
    for &t in times {
        for x in points {
            for y in points.iter().rev().step_by(2) {
                let a = model.heat_kernel(x, y, t)?;
                let b = model.heat_kernel_spectral(x, y, t)?;
                m.push((a - b).abs() / a.abs());
            }
        }
    }
    Ok(m)
}

pub fn heat_semigroup(model: &HeatModel, f: &TestFunction, points: &[Vec<f64>], s: f64, t: f64) -> Result<Measured> {
    let mut m = Measured::default();
    for x in points {
        m.push(model.semigroup_residual(f, x, s, t)?);
    }
    Ok(m)
}

/// Number of grid points where `Γ_k` or the real kernel fails to be
/// positive.
pub fn heat_positivity(model: &HeatModel, grid: &[Vec<f64>], times: &[f64]) -> Result<Measured> {
    let ctx = model.context();
    let mut m = Measured::default();
    for x in grid {
        for y in grid {
            m.push_exact(ctx.kernel_real(x, y)? > 0.0);
            for &t in times {
                m.push_exact(model.heat_kernel(x, y, t)? > 0.0);
            }
        }
    }
    Ok(m)
}

/// `max |H(t)f(x)| - sup|f|` over the grid, for test functions whose
/// supremum is 1.
pub fn heat_contraction(model: &HeatModel, grid: &[Vec<f64>], times: &[f64]) -> Result<Measured> {
    let n = model.system().dim();
    let c: Vec<f64> = (0..n).map(|i| 0.5 - 0.25 * i as f64).collect();
    let c2: f64 = c.iter().map(|v| v * v).sum();
    let shifted = TestFunction::new("shifted gaussian", 1.0, move |x| {
        (2.0 * x.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() - c2).exp()
    });
    let mut m = Measured::default();
    m.max_residual = f64::NEG_INFINITY;
    for f in [TestFunction::gaussian(1.0), shifted] {
        for &t in times {
            for x in grid {
                m.push(model.heat_solve(&f, x, t)?.abs() - 1.0);
            }
        }
    }
    Ok(m)
}

/// `|Δ_k u - ∂_t u| / (|u| + |∂_t u|)` for the basic solution at `samples`
/// seeded `(x, t)`; every fifth point is moved onto a mirror.
pub fn heat_equation_residual(system: &RootSystem, samples: usize, seed: u64) -> Result<Measured> {
    let n = system.dim();
    let roots = system.positive_roots();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Measured::default();
    for s in 0..samples {
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        if s % 5 == 4 && !roots.is_empty() {
            let root = &roots[rng.gen_range(0..roots.len())];
            let ell = root.dot_f64(&x);
            for (xi, a) in x.iter_mut().zip(&root.vector) {
                *xi -= ell * a / 2.0;
            }
        }
        let t = rng.gen_range(0.05..0.45);
        let (a, b) = if s % 2 == 0 { (1.0, 1.0) } else { (0.5, -1.0) };
        let r = basic_solution_residual(system, a, b, &x, t, 1e-4)?;
        m.push(r.residual / r.scale);
    }
    Ok(m)
}

/// `H(t) e^{-|x|²}` and `Γ_0` against the Gauss–Weierstrass closed forms
/// (only meaningful for `k = 0`).
pub fn gauss_weierstrass(model: &HeatModel, points: &[Vec<f64>], times: &[f64]) -> Result<Measured> {
    let n = model.system().dim() as f64;
    let norm2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let f = TestFunction::gaussian(1.0);
    let mut m = Measured::default();
    for &t in times {
        for x in points {
            let expect = (1.0 + 4.0 * t).powf(-n / 2.0) * (-norm2(x) / (1.0 + 4.0 * t)).exp();
            m.push((model.heat_solve(&f, x, t)? - expect).abs());
            let y: Vec<f64> = x.iter().map(|v| 0.5 - v).collect();
            let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let expect = (4.0 * std::f64::consts::PI * t).powf(-n / 2.0) * (-norm2(&d) / (4.0 * t)).exp();
            m.push((model.heat_kernel(x, &y, t)? - expect).abs());
        }
    }
    Ok(m)
}

/// Runs the three exact checks with the difference term of `T_1` flipped.
/// Each entry is `true` when the corresponding check failed, as it must;
/// a basis that cannot even be built counts as a failure of the two basis
/// checks.
pub fn mutation_detected(system: Arc<RootSystem>, n_max: usize, comm_degree: usize) -> Result<[bool; 3]> {
    let ctx = Arc::new(OperatorContext::with_mutation(system, SignMutation::FirstCoordinate)?);
    let failed = |m: Result<Measured>| m.map_or(true, |m| m.max_residual > 0.0);
    let comm = failed(exact_commutativity(&ctx, comm_degree));
    Ok(match HermiteSystem::build(ctx, n_max) {
        Ok(hs) => [failed(exact_rodrigues(&hs)), failed(exact_eigen(&hs)), comm],
        Err(_) => [true, true, comm],
    })
}

/// Evaluation grid `values^N`.
pub fn product_grid(values: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![Vec::new()];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| values.iter().map(move |&v| [p.as_slice(), &[v]].concat()))
            .collect();
    }
    pts
}

/// Sample points with `|coordinates| ≤ radius`, deterministic in `seed`.
pub fn sample_points(dim: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    /// Degree of the exact Hermite basis.
    pub n_max: usize,
    /// Quadrature points per axis; `None` picks by rank.
    pub qpoints: Option<usize>,
    pub seed: u64,
    /// Flip the difference term of `T_1` everywhere (every identity should
    /// then fail).
    pub mutation: SignMutation,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_max: 6,
            qpoints: None,
            seed: 20,
            mutation: SignMutation::None,
        }
    }
}

/// Points per axis that keep a tensor rule at a few thousand nodes.
pub fn default_points(rank: usize) -> usize {
    match rank {
        1 => 80,
        2 => 32,
        3 => 10,
        4 => 8,
        _ => 6,
    }
}

fn is_z2(system: &RootSystem) -> bool {
    system.family() == Family::Z2Product
}

/// Every identity that applies to `spec`. With a mutation only the
/// operator-dependent exact checks run.
pub fn run_suite(spec: &SystemSpec, config: &SuiteConfig) -> CheckReport {
    let label = spec.label();
    let system = match spec.build() {
        Ok(s) => Arc::new(s),
        Err(e) => return CheckReport::new(label.clone(), vec![judge("build", &label, 0.0, Err(e))]),
    };
    let mut checks = Vec::new();
    let l = label.as_str();
    let rank = system.dim();
    let points = config.qpoints.unwrap_or_else(|| default_points(rank));
    let z2 = is_z2(&system);
    let k_zero = system.is_trivial();

    let ctx = OperatorContext::with_mutation(system.clone(), config.mutation).map(Arc::new);
    let hs = ctx
        .clone()
        .and_then(|c| HermiteSystem::build(c, config.n_max))
        .map(Arc::new);
    let exact = |name: &str, f: &dyn Fn() -> Result<Measured>| match &ctx {
        Err(DunklError::InexactRoots) => CheckOutcome::skipped(name, l, "system has inexact roots"),
        _ => judge(name, l, 0.0, f()),
    };
    let with_hs = |f: fn(&HermiteSystem) -> Result<Measured>| -> Result<Measured> {
        hs.as_ref().map_err(Clone::clone).and_then(|h| f(h))
    };
    checks.push(exact("rodrigues", &|| with_hs(exact_rodrigues)));
    checks.push(exact("eigen_equations", &|| with_hs(exact_eigen)));
    checks.push(exact("commutativity", &|| {
        ctx.as_ref().map_err(Clone::clone).and_then(|c| exact_commutativity(c, 8))
    }));
    checks.push(exact("sl2_and_scaling", &|| {
        ctx.as_ref().map_err(Clone::clone).and_then(|c| exact_sl2_scaling(c, 20, config.seed))
    }));
    checks.push(exact("pairing_gram", &|| with_hs(exact_gram)));
    if k_zero {
        checks.push(exact("classical_hermite", &|| with_hs(classical_hermite)));
    }

    if config.mutation != SignMutation::None {
        return CheckReport::new(label, checks);
    }

    if z2 && rank == 1 {
        let mu = &spec.multiplicity.values()[0];
        checks.push(judge("bessel_closed_form", l, 1e-10, bessel_agreement(mu, 100, 3.0, config.seed)));
    }

    let rule = rule_tensor(&system, points);
    let orth_tol = if z2 { 1e-8 } else { 1e-5 };
    checks.push(match (&ctx, &hs, &rule) {
        (Err(DunklError::InexactRoots), _, _) => CheckOutcome::skipped("quadrature_orthogonality", l, "inexact roots"),
        (_, Ok(h), Ok(r)) => judge("quadrature_orthogonality", l, orth_tol, quadrature_orthogonality(h, r, 4)),
        (_, Err(e), _) | (_, _, Err(e)) => judge("quadrature_orthogonality", l, orth_tol, Err(e.clone())),
    });

    let orbit = OrbitKernel::new(system.clone());
    let near = sample_points(rank, 6, 0.5, config.seed);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = near.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    if z2 {
        let grid = product_grid(&[-1.0, -0.5, 0.0, 0.5, 1.0], rank);
        let big = if rank == 1 { 60 } else { 24 };
        let deep = HermiteSystem::build(Arc::new(OperatorContext::new(system.clone()).expect("z2 roots are exact")), big)
            .map(Arc::new);
        checks.push(judge(
            "mehler",
            l,
            1e-8,
            if rank == 1 {
                deep.as_ref().map_err(Clone::clone).and_then(|h| mehler(h, &orbit, &[0.3, 0.5], &grid))
            } else {
                deep.as_ref().map_err(Clone::clone).and_then(|h| mehler(h, &orbit, &[0.3], &grid))
            },
        ));
        checks.push(judge(
            "generating_function",
            l,
            1e-8,
            deep.as_ref()
                .map_err(Clone::clone)
                .and_then(|h| generating_function(&KernelEvaluator::new(h.clone()), &pairs)),
        ));
    }
    checks.push(judge(
        "reproducing_formula",
        l,
        1e-8,
        rule.clone().and_then(|r| reproducing(&orbit, &r, &pairs)),
    ));

    let model = TransformContext::new(system.clone(), points).map(HeatModel::from_context);
    if let (Ok(m), Ok(h)) = (&model, &hs) {
        if z2 {
            let grid = product_grid(&[-1.2, 0.3, 1.5], rank);
            checks.push(judge("transform_eigenrelation", l, 1e-6, transform_eigenrelation(m.context(), h, 4, &grid)));
        }
    }
    match &model {
        Ok(m) => checks.extend(heat_checks(m, l, z2, k_zero, config.seed)),
        Err(e) => checks.push(judge("heat", l, 0.0, Err(e.clone()))),
    }
    checks.push(judge("heat_equation", l, 1e-5, heat_equation_residual(&system, 50, config.seed)));

    if !k_zero {
        checks.push(match mutation_detected(system.clone(), config.n_max.min(4), 6) {
            Err(DunklError::InexactRoots) => CheckOutcome::skipped("mutation_sensitivity", l, "inexact roots"),
            r => {
                let r = r.map(|flags| Measured {
                    max_residual: if flags.iter().any(|&f| f) { 0.0 } else { 1.0 },
                    samples: 3,
                });
                judge("mutation_sensitivity", l, 0.0, r)
            }
        });
    }
    CheckReport::new(label, checks)
}

/// The heat-semigroup identities for one model.
pub fn heat_checks(model: &HeatModel, label: &str, z2: bool, k_zero: bool, seed: u64) -> Vec<CheckOutcome> {
    let rank = model.system().dim();
    let pts = sample_points(rank, 4, 1.0, seed);
    // Γ_k is evaluated with |x||y|/2t ≤ 14 here, where the double-double
    // kernel still resolves its (tiny) value at x ≈ -y.
    let grid = product_grid(&[-1.5, -0.5, 0.4, 1.5], rank);
    let coarse = if rank <= 2 {
        product_grid(&[-3.0, -1.0, 0.0, 1.0, 3.0], rank)
    } else {
        product_grid(&[-2.0, 0.0, 1.0], rank)
    };
    let route_tol = if z2 { 1e-6 } else { 1e-4 };
    let mut out = vec![
        judge("heat_mass", label, 1e-6, heat_mass(model, &pts, &[0.25, 1.0])),
        judge("heat_two_routes", label, route_tol, heat_two_routes(model, &pts, &[0.5, 1.0])),
        judge(
            "heat_semigroup",
            label,
            1e-6,
            heat_semigroup(model, &TestFunction::gaussian(1.0), &pts[..2], 0.25, 0.25),
        ),
        judge("heat_positivity", label, 0.0, heat_positivity(model, &grid, &[0.25, 1.0])),
        judge("heat_contraction", label, 1e-8, heat_contraction(model, &coarse, &[0.1, 1.0])),
    ];
    if k_zero {
        out.push(judge("gauss_weierstrass", label, 1e-10, gauss_weierstrass(model, &pts, &[0.1, 0.5, 2.0])));
    }
    out
}
