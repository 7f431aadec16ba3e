//! Acceptance run: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use dunkl_core::dunkl::OperatorContext;
use dunkl_core::groups::{RootSystem, SystemSpec};
use dunkl_core::heat::HeatModel;
use dunkl_core::hermite::HermiteSystem;
use dunkl_core::kernel::{KernelEvaluator, OrbitKernel};
use dunkl_core::poly::Polynomial;
use dunkl_core::quad::rule_tensor;
use dunkl_core::rational::{int, rat};
use dunkl_core::suite::{self, Measured};
use dunkl_core::transform::{TestFunction, TransformContext};
use num_bigint::BigInt;
use num_rational::BigRational;

type Res<T> = dunkl_core::error::Result<T>;

struct Fixture {
    spec: SystemSpec,
    system: Arc<RootSystem>,
    ctx: Arc<OperatorContext>,
    hs: Arc<HermiteSystem>,
}

impl Fixture {
    fn new(spec: SystemSpec) -> Self {
        let system = Arc::new(spec.build().expect("valid system"));
        let ctx = Arc::new(OperatorContext::new(system.clone()).expect("exact roots"));
        let hs = Arc::new(HermiteSystem::build(ctx.clone(), 6).expect("basis"));
        Fixture { spec, system, ctx, hs }
    }

    fn label(&self) -> String {
        self.spec.label()
    }

    fn is_z2(&self) -> bool {
        self.spec.family == dunkl_core::groups::Family::Z2Product
    }
}

fn exact_set() -> Vec<SystemSpec> {
    let mut v: Vec<SystemSpec> = [int(0), rat(1, 2), int(1), rat(5, 2)]
        .into_iter()
        .map(|mu| SystemSpec::z2(&[mu]).unwrap())
        .collect();
    v.push(SystemSpec::z2(&[int(1), int(2)]).unwrap());
    v.push(SystemSpec::symmetric(3, int(1)).unwrap());
    v.push(SystemSpec::hyperoctahedral(2, int(1), int(1)).unwrap());
    v
}

/// Worst residual over several systems, with the label of the worst one.
#[derive(Default)]
struct Tally {
    worst: f64,
    worst_at: String,
    samples: usize,
    errors: Vec<String>,
}

impl Tally {
    fn add(&mut self, label: &str, m: Res<Measured>) {
        match m {
            Ok(m) => {
                self.samples += m.samples;
                if m.max_residual > self.worst || self.worst_at.is_empty() {
                    self.worst = m.max_residual;
                    self.worst_at = label.to_string();
                }
            }
            Err(e) => self.errors.push(format!("{label}: {e}")),
        }
    }

    fn within(&self, tol: f64) -> bool {
        self.errors.is_empty() && self.worst <= tol
    }

    fn describe(&self) -> String {
        let mut s = format!("max residual {:.3e} ({}), {} samples", self.worst, self.worst_at, self.samples);
        if !self.errors.is_empty() {
            s.push_str(&format!("; errors: {}", self.errors.join("; ")));
        }
        s
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, passed: bool, detail: String) {
        if !passed {
            self.failures += 1;
        }
        let verdict = if passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict}  {name}: {detail}");
    }
}

fn binomial_hermite(n: usize) -> Polynomial {
    // H_n(x) = n! Σ_m (-1)^m (2x)^{n-2m} / (m! (n-2m)!)
    let fact = |k: usize| -> BigInt { (1..=k as u64).map(BigInt::from).product() };
    let mut p = Polynomial::zero(1);
    for m in 0..=n / 2 {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let num = fact(n) * BigInt::from(sign) * BigInt::from(2).pow((n - 2 * m) as u32);
        let c = BigRational::new(num, fact(m) * fact(n - 2 * m));
        p.add_term(dunkl_core::poly::Monomial::new(vec![(n - 2 * m) as u32]), c);
    }
    p
}

fn main() -> ExitCode {
    let mut rep = Report { failures: 0 };
    let fixtures: Vec<Fixture> = exact_set().into_iter().map(Fixture::new).collect();
    let find = |label: &str| fixtures.iter().find(|f| f.label() == label).expect("fixture");
    let z2_1 = SystemSpec::z2(&[int(1)]).unwrap().label();
    let z22 = SystemSpec::z2(&[int(1), int(2)]).unwrap().label();

    // 1-5: exact identities over the whole set.
    let start = Instant::now();
    let mut t = Tally::default();
    for f in &fixtures {
        t.add(&f.label(), suite::exact_rodrigues(&f.hs));
    }
    let secs = start.elapsed().as_secs_f64();
    rep.line(
        1,
        "Rodrigues formula, exact",
        t.within(0.0) && secs < 60.0,
        format!("{} mismatches; {secs:.1} s (limit 60 s); {}", t.worst, t.describe()),
    );

    let mut t = Tally::default();
    for f in &fixtures {
        t.add(&f.label(), suite::exact_eigen(&f.hs));
    }
    rep.line(2, "Hermite eigen-equations, exact", t.within(0.0), t.describe());

    let mut t = Tally::default();
    for f in &fixtures {
        t.add(&f.label(), suite::exact_commutativity(&f.ctx, 8));
    }
    rep.line(3, "commutativity on monomials of degree <= 8", t.within(0.0), t.describe());

    let mut t = Tally::default();
    for (i, f) in fixtures.iter().enumerate() {
        t.add(&f.label(), suite::exact_sl2_scaling(&f.ctx, 20, 100 + i as u64));
    }
    rep.line(4, "sl(2) relations and scaling law on 20 random polynomials", t.within(0.0), t.describe());

    let mut t = Tally::default();
    for f in &fixtures {
        t.add(&f.label(), suite::exact_gram(&f.hs));
    }
    rep.line(5, "pairing Gram matrix is the identity", t.within(0.0), t.describe());

    // 6: orbit series against the Bessel closed form.
    let mut t = Tally::default();
    for (i, mu) in [int(0), int(1), rat(5, 2)].iter().enumerate() {
        t.add(&format!("mu={mu}"), suite::bessel_agreement(mu, 100, 3.0, 600 + i as u64));
    }
    rep.line(6, "kernel series vs rank-one Bessel form (relative)", t.within(1e-10), t.describe());

    // 7: orthogonality under quadrature.
    let mut exact_z2 = Tally::default();
    let mut folded = Tally::default();
    for f in &fixtures {
        let points = suite::default_points(f.system.dim());
        let m = rule_tensor(&f.system, points).and_then(|r| suite::quadrature_orthogonality(&f.hs, &r, 4));
        if f.is_z2() { &mut exact_z2 } else { &mut folded }.add(&f.label(), m);
    }
    rep.line(
        7,
        "Hermite orthogonality by quadrature",
        exact_z2.within(1e-8) && folded.within(1e-5),
        format!("Z2^N {} (tol 1e-8); S3/B2 {} (tol 1e-5)", exact_z2.describe(), folded.describe()),
    );

    // 8: Mehler for Z2, mu = 1.
    let f = find(&z2_1);
    let deep = Arc::new(HermiteSystem::build(f.ctx.clone(), 60).expect("deep basis"));
    let orbit = OrbitKernel::new(f.system.clone());
    let grid = suite::product_grid(&[-1.0, -0.5, 0.0, 0.5, 1.0], 1);
    let mut t = Tally::default();
    t.add(&f.label(), suite::mehler(&deep, &orbit, &[0.3, 0.5], &grid));
    rep.line(8, "Mehler formula", t.within(1e-8), t.describe());

    // 9: generating function and reproducing formula.
    let mut t = Tally::default();
    for (label, n_max, points) in [(&z2_1, 60, 80), (&z22, 24, 32)] {
        let f = find(label);
        let rank = f.system.dim();
        let near = suite::sample_points(rank, 8, 0.5, 900);
        let pairs: Vec<_> = near.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
        let hs = if rank == 1 {
            Ok(deep.clone())
        } else {
            HermiteSystem::build(f.ctx.clone(), n_max).map(Arc::new)
        };
        t.add(
            &format!("{label} generating"),
            hs.and_then(|h| suite::generating_function(&KernelEvaluator::new(h), &pairs)),
        );
        let orbit = OrbitKernel::new(f.system.clone());
        t.add(
            &format!("{label} reproducing"),
            rule_tensor(&f.system, points).and_then(|r| suite::reproducing(&orbit, &r, &pairs)),
        );
    }
    rep.line(9, "generating function and reproducing formula", t.within(1e-8), t.describe());

    // 10: transform eigenrelation.
    let mut t = Tally::default();
    for label in [&z2_1, &z22] {
        let f = find(label);
        let rank = f.system.dim();
        let grid = suite::product_grid(&[-1.2, 0.3, 1.5], rank);
        let m = TransformContext::new(f.system.clone(), suite::default_points(rank))
            .and_then(|ctx| suite::transform_eigenrelation(&ctx, &f.hs, 4, &grid));
        t.add(label, m);
    }
    rep.line(10, "transform eigenrelation (sup-norm relative)", t.within(1e-6), t.describe());

    // 11: heat identities on Z2, Z2², S3, B2.
    let mut failed = Vec::new();
    let mut summary = Vec::new();
    for f in fixtures.iter().filter(|f| f.label() == z2_1 || !f.is_z2() || f.system.dim() == 2) {
        let rank = f.system.dim();
        match TransformContext::new(f.system.clone(), suite::default_points(rank)) {
            Ok(ctx) => {
                let model = HeatModel::from_context(ctx);
                for c in suite::heat_checks(&model, &f.label(), f.is_z2(), false, 1100) {
                    summary.push(format!("{}/{} {:.1e}", c.system, c.name, c.max_residual));
                    if !c.passed() {
                        failed.push(format!("{}/{} ({:?})", c.system, c.name, c.detail));
                    }
                }
            }
            Err(e) => failed.push(format!("{}: {e}", f.label())),
        }
    }
    rep.line(
        11,
        "heat mass, two routes, semigroup, positivity, contraction",
        failed.is_empty(),
        if failed.is_empty() { summary.join(", ") } else { format!("failed: {}", failed.join(", ")) },
    );

    // 12: the basic solution solves the heat equation.
    let mut t = Tally::default();
    for (i, f) in fixtures.iter().enumerate() {
        t.add(&f.label(), suite::heat_equation_residual(&f.system, 50, 1200 + i as u64));
    }
    rep.line(12, "heat equation residual of the basic solution (relative)", t.within(1e-5), t.describe());

    // 13: classical reduction at k = 0, against independent closed forms.
    let mut hermite_ok = true;
    let mut heat = Tally::default();
    for spec in [
        SystemSpec::z2(&[int(0)]).unwrap(),
        SystemSpec::z2(&[int(0), int(0)]).unwrap(),
        SystemSpec::symmetric(3, int(0)).unwrap(),
    ] {
        let f = Fixture::new(spec);
        let n = f.system.dim();
        let classical: Vec<Polynomial> = (0..=6).map(binomial_hermite).collect();
        for e in f.hs.elements() {
            let mut expect = Polynomial::one(n);
            for (i, &d) in e.index.iter().enumerate() {
                expect = &expect * &classical[d as usize].embed(n, i);
            }
            hermite_ok &= expect == e.hermite;
        }
        // The rule must resolve e^{cu} with c = |x| s / 2t, so the axis
        // count grows as t shrinks.
        let points = [80, 40, 24][n - 1];
        let model = HeatModel::new(f.system.clone(), points).expect("model");
        let gauss = TestFunction::gaussian(0.5);
        let pts = suite::sample_points(n, 5, 1.0, 1300);
        let mut m = Measured::default();
        let mut run = || -> Res<Measured> {
            for t in [0.1f64, 0.5, 2.0] {
                for x in &pts {
                    let r2: f64 = x.iter().map(|v| v * v).sum();
                    // e^{-|x|²/2} evolves to (1 + 2t)^{-N/2} e^{-|x|²/(2 + 4t)}.
                    let closed = (1.0 + 2.0 * t).powf(-(n as f64) / 2.0) * (-r2 / (2.0 + 4.0 * t)).exp();
                    m.push((model.heat_solve(&gauss, x, t)? - closed).abs());
                    let y: Vec<f64> = x.iter().map(|v| 0.3 - 0.5 * v).collect();
                    let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
                    let closed = (4.0 * std::f64::consts::PI * t).powf(-(n as f64) / 2.0) * (-d2 / (4.0 * t)).exp();
                    m.push((model.heat_kernel(x, &y, t)? - closed).abs());
                }
            }
            Ok(m)
        };
        heat.add(&f.label(), run());
    }
    rep.line(
        13,
        "classical reduction at k = 0",
        hermite_ok && heat.within(1e-10),
        format!("Hermite polynomials {}; Gauss-Weierstrass {}", if hermite_ok { "exact" } else { "MISMATCH" }, heat.describe()),
    );

    // 14: the checks of 1-3 must notice a sign flip in T_1.
    let mut caught = [false; 3];
    let mut errors = Vec::new();
    for f in fixtures.iter().filter(|f| !f.system.is_trivial()) {
        match suite::mutation_detected(f.system.clone(), 6, 8) {
            Ok(flags) => {
                for (c, flag) in caught.iter_mut().zip(flags) {
                    *c |= flag;
                }
            }
            Err(e) => errors.push(format!("{}: {e}", f.label())),
        }
    }
    rep.line(
        14,
        "mutation sensitivity (sign flip in T_1)",
        errors.is_empty() && caught.iter().all(|&c| c),
        format!(
            "Rodrigues {}, eigen {}, commutativity {}{}",
            if caught[0] { "failed" } else { "still passed" },
            if caught[1] { "failed" } else { "still passed" },
            if caught[2] { "failed" } else { "still passed" },
            if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join("; ")) }
        ),
    );

    println!("{} of 14 criteria passed", 14 - rep.failures);
    if rep.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
