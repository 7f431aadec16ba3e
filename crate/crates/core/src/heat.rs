//! The Dunkl heat equation `Δ_k u = ∂_t u`.
//!
//! `Γ_k(x,y,t) = M_k t^{-γ-N/2} e^{-(|x|²+|y|²)/4t} K(x/√(2t), y/√(2t))`
//! with `M_k = 4^{-γ-N/2} c_k`, and `H(t)f(x) = ∫ Γ_k(x,y,t) f(y) w_k(y) dy`.
//! The Gaussian in `y` is always folded into the quadrature rule, combined
//! with the Gaussian factor of `f` when it has one.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{DunklError, Result};
use crate::groups::RootSystem;
use crate::scalar::C64;
use crate::transform::{spectral_heat, tabulate, TestFunction, TransformContext};

/// Smallest accepted positive time.
pub const MIN_TIME: f64 = 1e-6;

/// Largest `|x||y|/2t` for which `Γ_k` is evaluated (the kernel itself
/// would overflow a double beyond ~700).
pub const MAX_KERNEL_ARGUMENT: f64 = 600.0;

#[derive(Clone, Debug)]
pub struct HeatModel {
    ctx: TransformContext,
    m_k: f64,
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= MIN_TIME && t.is_finite()) {
        return Err(DunklError::InvalidArgument(format!("time must be at least {MIN_TIME:e}, got {t}")));
    }
    Ok(())
}

impl HeatModel {
    pub fn new(system: Arc<RootSystem>, points: usize) -> Result<Self> {
        Ok(Self::from_context(TransformContext::new(system, points)?))
    }

    pub fn from_context(ctx: TransformContext) -> Self {
        let m_k = 4f64.powf(-ctx.homogeneity()) * ctx.c_k();
        HeatModel { ctx, m_k }
    }

    pub fn context(&self) -> &TransformContext {
        &self.ctx
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        self.ctx.system()
    }

    pub fn c_k(&self) -> f64 {
        self.ctx.c_k()
    }

    pub fn m_k(&self) -> f64 {
        self.m_k
    }

    /// `M_k t^{-γ-N/2}`.
    fn amplitude(&self, t: f64) -> f64 {
        self.m_k * t.powf(-self.ctx.homogeneity())
    }

    /// `F_k(x,t) = M_k t^{-γ-N/2} e^{-|x|²/4t}`.
    pub fn fundamental_solution(&self, x: &[f64], t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.amplitude(t) * (-norm2(x) / (4.0 * t)).exp())
    }

    /// `Γ_k(x,y,t)` in product form.
    pub fn heat_kernel(&self, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
        check_time(t)?;
        let scale = (2.0 * t).sqrt();
        let arg = (norm2(x) * norm2(y)).sqrt() / (2.0 * t);
        if arg > MAX_KERNEL_ARGUMENT {
            return Err(DunklError::InvalidArgument(format!(
                "|x||y|/2t = {arg:.1} is beyond the evaluable range; increase t"
            )));
        }
        let xs: Vec<f64> = x.iter().map(|v| v / scale).collect();
        let ys: Vec<f64> = y.iter().map(|v| v / scale).collect();
        let k = self.ctx.kernel_real(&xs, &ys)?;
        Ok(self.amplitude(t) * (-(norm2(x) + norm2(y)) / (4.0 * t)).exp() * k)
    }

    /// `Γ_k(x,y,t)` in spectral form,
    /// `(c_k²/4^{γ+N/2}) ∫ e^{-t|ξ|²} K(ix,ξ) K(-iy,ξ) w_k(ξ) dξ`.
    pub fn heat_kernel_spectral(&self, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
        check_time(t)?;
        let ix: Vec<C64> = x.iter().map(|&v| C64::new(0.0, v)).collect();
        let miy: Vec<C64> = y.iter().map(|&v| C64::new(0.0, -v)).collect();
        let v = self.ctx.integrate_gaussian(t.powf(-0.5), |xi| {
            let xc: Vec<C64> = xi.iter().map(|&v| C64::new(v, 0.0)).collect();
            Ok(self.ctx.kernel_complex(&ix, &xc)? * self.ctx.kernel_complex(&miy, &xc)?)
        })?;
        Ok(v.re * self.ctx.inversion_constant())
    }

    /// `∫ Γ_k(x,y,t) g(y) e^{-|y|²/w²} w_k(y) dy` for a smooth factor `g`.
    fn apply<G>(&self, x: &[f64], t: f64, g: G, width: f64, outer: bool) -> Result<f64>
    where
        G: Fn(&[f64]) -> Result<f64> + Sync,
    {
        check_time(t)?;
        let inv_s2 = 1.0 / (4.0 * t) + if width.is_finite() { 1.0 / (width * width) } else { 0.0 };
        let s = inv_s2.powf(-0.5);
        let scale = (2.0 * t).sqrt();
        let xs: Vec<f64> = x.iter().map(|v| v / scale).collect();
        let pre = self.amplitude(t) * (-norm2(x) / (4.0 * t)).exp();
        let integrand = |y: &[f64]| {
            let ys: Vec<f64> = y.iter().map(|v| v / scale).collect();
            Ok(C64::new(self.ctx.kernel_damped(&xs, &ys)? * g(y)?, 0.0))
        };
        let v = if outer {
            self.ctx.integrate_gaussian_outer(s, integrand)?
        } else {
            self.ctx.integrate_gaussian(s, integrand)?
        };
        Ok(pre * v.re)
    }

    /// `H(t)f(x)`; `t = 0` returns `f(x)`.
    ///
    /// In rule coordinates the integrand grows like `e^{c u}` with
    /// `c ≈ |x| s / 2t`, `s⁻² = 1/4t + 1/width²`, and an `n`-point axis
    /// rule only resolves `c` up to about `√n`; small `t` far from the
    /// origin needs a finer rule.
    pub fn heat_solve(&self, f: &TestFunction, x: &[f64], t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(f.value(x));
        }
        self.apply(x, t, |y| Ok(f.factor(y)), f.width, false)
    }

    /// `H(t)f(x)` through the transform,
    /// `(c_k²/4^{γ+N/2}) ∫ e^{-t|ξ|²} D_k f(ξ) K(ix,ξ) w_k(ξ) dξ`.
    pub fn heat_solve_spectral(&self, f: &TestFunction, x: &[f64], t: f64) -> Result<f64> {
        check_time(t)?;
        if !f.has_gaussian() {
            return Err(DunklError::InvalidArgument(format!("{} has no Gaussian decay", f.label)));
        }
        let scale = (t + f.width * f.width / 4.0).powf(-0.5);
        let table = tabulate(&self.ctx, f, scale)?;
        spectral_heat(&self.ctx, &table, x, t)
    }

    /// `∫ Γ_k(x,y,t) w_k(y) dy`, which is 1.
    pub fn mass(&self, x: &[f64], t: f64) -> Result<f64> {
        self.apply(x, t, |_| Ok(1.0), f64::INFINITY, false)
    }

    /// `|H(t+s)f(x) - H(t)(H(s)f)(x)|`, with `H(s)f` evaluated directly on
    /// the nodes of the (coarser) outer rule.
    pub fn semigroup_residual(&self, f: &TestFunction, x: &[f64], s: f64, t: f64) -> Result<f64> {
        check_time(s)?;
        check_time(t)?;
        let direct = self.heat_solve(f, x, s + t)?;
        // H(s) widens a Gaussian of width w to √(w² + 4s); that factor goes
        // into the outer rule.
        let w = if f.has_gaussian() { (f.width * f.width + 4.0 * s).sqrt() } else { f64::INFINITY };
        let strip = |y: &[f64]| if w.is_finite() { (norm2(y) / (w * w)).exp() } else { 1.0 };
        let composed = self.apply(x, t, |y| Ok(self.heat_solve(f, y, s)? * strip(y)), w, true)?;
        Ok((direct - composed).abs())
    }
}

/// `u(x,t) = (a - bt)^{-γ-N/2} exp(b|x|²/(4(a - bt)))`, a solution of the
/// heat equation for `t` on the near side of `a/b`.
pub fn basic_solution(system: &RootSystem, a: f64, b: f64, x: &[f64], t: f64) -> Result<f64> {
    if a < 0.0 || b == 0.0 {
        return Err(DunklError::InvalidArgument(format!("need a ≥ 0 and b ≠ 0 (got a = {a}, b = {b})")));
    }
    let d = a - b * t;
    if d <= 0.0 {
        return Err(DunklError::InvalidArgument(format!("t = {t} is at or beyond the blow-up time a/b = {}", a / b)));
    }
    let h = system.gamma_f64() + system.dim() as f64 / 2.0;
    Ok(d.powf(-h) * (b * norm2(x) / (4.0 * d)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeatResidual {
    pub laplacian: f64,
    pub time_derivative: f64,
    pub residual: f64,
    /// `|u| + |∂_t u|`, the scale the residual is measured against.
    pub scale: f64,
}

/// `Δ_k u - ∂_t u` for the basic solution, with both sides by finite
/// differences of step `h`.
pub fn basic_solution_residual(system: &RootSystem, a: f64, b: f64, x: &[f64], t: f64, h: f64) -> Result<HeatResidual> {
    let u = basic_solution(system, a, b, x, t)?;
    basic_solution(system, a, b, x, t + h)?;
    if t - h < 0.0 {
        return Err(DunklError::InvalidArgument("t must exceed the step h".into()));
    }
    let dt = (basic_solution(system, a, b, x, t + h)? - basic_solution(system, a, b, x, t - h)?) / (2.0 * h);
    let lap = laplacian_numeric(system, |y| basic_solution(system, a, b, y, t).unwrap_or(f64::NAN), x, h);
    Ok(HeatResidual {
        laplacian: lap,
        time_derivative: dt,
        residual: (lap - dt).abs(),
        scale: u.abs() + dt.abs(),
    })
}

/// `Δ_k f(x) = Δf(x) + 2 Σ_{α∈R₊} k(α) δ_α f(x)` with
/// `δ_α f = <∇f,α>/<α,x> - (f(x) - f(σ_α x))/<α,x>²`, all derivatives by
/// central differences of step `h`.
///
/// Within `10h` of a mirror the difference quotient is replaced by its
/// Taylor expansion along `φ(s) = f(x - sα)`,
/// `δ_α f = φ''(0)/2 + <α,x> φ'''(0)/6 + O(<α,x>²)`.
pub fn laplacian_numeric<F: Fn(&[f64]) -> f64>(system: &RootSystem, f: F, x: &[f64], h: f64) -> f64 {
    let n = x.len();
    let f0 = f(x);
    let shifted = |dir: &[f64], s: f64| -> f64 {
        let y: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + s * d).collect();
        f(&y)
    };
    let mut lap = 0.0;
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let (p, m) = (shifted(&e, h), shifted(&e, -h));
        lap += (p - 2.0 * f0 + m) / (h * h);
        grad[i] = (p - m) / (2.0 * h);
    }
    for root in system.positive_roots() {
        let k = root.multiplicity_f64();
        if k == 0.0 {
            continue;
        }
        let alpha = &root.vector;
        let ell = root.dot_f64(x);
        let delta = if ell.abs() >= 10.0 * h {
            let reflected: Vec<f64> = x.iter().zip(alpha).map(|(a, b)| a - ell * b).collect();
            let directional: f64 = grad.iter().zip(alpha).map(|(g, a)| g * a).sum();
            directional / ell - (f0 - f(&reflected)) / (ell * ell)
        } else {
            let phi = |s: f64| shifted(alpha, -s);
            let (p1, m1, p2, m2) = (phi(h), phi(-h), phi(2.0 * h), phi(-2.0 * h));
            let second = (p1 - 2.0 * f0 + m1) / (h * h);
            let third = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
            second / 2.0 + ell * third / 6.0
        };
        lap += 2.0 * k * delta;
    }
    lap
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub x: Vec<f64>,
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxPrincipleReport {
    pub sup_initial: f64,
    pub max_solution: f64,
    pub slack: f64,
    pub violations: Vec<Violation>,
    /// Largest `Δ_k f` found at the peak of a sampled bump.
    pub max_laplacian_at_peak: f64,
    pub peak_violations: Vec<Violation>,
}

/// Samples `H(t)f` over `grid × times` against `sup f` (taken over the grid
/// and `t = 0`), and `Δ_k` of Gaussian bumps `e^{-|x-c|²}` at their peaks
/// `c ∈ grid`, which must be `≤ slack`.
pub fn max_principle_probe(
    model: &HeatModel,
    f: &TestFunction,
    grid: &[Vec<f64>],
    times: &[f64],
    slack: f64,
) -> Result<MaxPrincipleReport> {
    let sup_initial = grid.iter().map(|x| f.value(x)).fold(f64::NEG_INFINITY, f64::max);
    let mut max_solution = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for &t in times {
        for x in grid {
            let u = model.heat_solve(f, x, t)?;
            max_solution = max_solution.max(u);
            if u > sup_initial + slack {
                violations.push(Violation {
                    x: x.clone(),
                    t,
                    value: u,
                });
            }
        }
    }
    let sys = model.system();
    let mut max_lap = f64::NEG_INFINITY;
    let mut peak_violations = Vec::new();
    for c in grid {
        let bump = |y: &[f64]| (-y.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).exp();
        let lap = laplacian_numeric(sys, bump, c, 1e-4);
        max_lap = max_lap.max(lap);
        if lap > slack {
            peak_violations.push(Violation {
                x: c.clone(),
                t: 0.0,
                value: lap,
            });
        }
    }
    Ok(MaxPrincipleReport {
        sup_initial,
        max_solution,
        slack,
        violations,
        max_laplacian_at_peak: max_lap,
        peak_violations,
    })
}
