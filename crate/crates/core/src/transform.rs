//! Numerical Dunkl transform `D_k f(ξ) = ∫ f(x) K(-iξ, x) w_k(x) dx`.
//!
//! Every integral is a direct quadrature sum. Test functions carry their
//! Gaussian factor explicitly, `f(x) = g(x) e^{-|x|²/s²}`, so the rule is
//! rescaled to width `s` and only the smooth factor `g` is sampled.
//!
//! Nested integrals (inversion, translation, the spectral heat route) put
//! `D_k f` on the nodes of a coarser outer rule. An `n`-point Gauss rule
//! resolves `e^{-iωx}` only for `ω` up to about `√(2n)`, so the outer rule
//! keeps roughly a quarter of the inner points to stay inside that band.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{DunklError, Result};
use crate::groups::RootSystem;
use crate::hermite::HermiteSystem;
use crate::kernel::{Kernel, OrbitKernel};
use crate::quad::{normalization_c_k, rule_tensor, QuadratureRule};
use crate::scalar::{C64, DD};

/// Absolute tail tolerance for kernel values inside quadrature sums.
pub const KERNEL_TOL: f64 = 1e-16;

type Factor = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// `f(x) = g(x) e^{-|x|²/s²}`; `width = ∞` means no Gaussian factor.
#[derive(Clone)]
pub struct TestFunction {
    pub label: String,
    pub width: f64,
    factor: Arc<Factor>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({}, width {})", self.label, self.width)
    }
}

impl TestFunction {
    pub fn new(label: impl Into<String>, width: f64, factor: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction {
            label: label.into(),
            width,
            factor: Arc::new(factor),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), f64::INFINITY, move |_| c)
    }

    /// `e^{-a|x|²}`, `a > 0`.
    pub fn gaussian(a: f64) -> Self {
        Self::new(format!("gaussian({a})"), a.powf(-0.5), |_| 1.0)
    }

    /// `h_ν(x) = e^{-|x|²/2} H_ν(x)`.
    pub fn hermite_function(hs: Arc<HermiteSystem>, nu: &[u32]) -> Result<Self> {
        hs.element(nu)?;
        let nu = nu.to_vec();
        let label = format!("h{nu:?}");
        Ok(Self::new(label, std::f64::consts::SQRT_2, move |x| {
            let xd: Vec<DD> = x.iter().map(|&v| DD::from(v)).collect();
            let e = hs.element(&nu).expect("checked above");
            crate::scalar::Real::approx(e.hermite_value(&xd))
        }))
    }

    /// The smooth factor `g`.
    pub fn factor(&self, x: &[f64]) -> f64 {
        (self.factor)(x)
    }

    pub fn has_gaussian(&self) -> bool {
        self.width.is_finite()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let g = self.factor(x);
        if self.has_gaussian() {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            g * (-r2 / (self.width * self.width)).exp()
        } else {
            g
        }
    }
}

/// System, kernel, rule and constants shared by transform and heat code.
#[derive(Clone)]
pub struct TransformContext {
    system: Arc<RootSystem>,
    kernel: Arc<dyn Kernel>,
    rule: QuadratureRule,
    outer: QuadratureRule,
    c_k: f64,
}

/// Points per axis of the outer rule for an inner rule with `points`.
pub fn outer_points(points: usize) -> usize {
    (points / 4).max(8).min(points)
}

impl fmt::Debug for TransformContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformContext")
            .field("system", &self.system.label())
            .field("points", &self.rule.points)
            .field("c_k", &self.c_k)
            .finish()
    }
}

impl TransformContext {
    /// Orbit-recursion kernel and a tensor rule with `points` nodes per axis.
    pub fn new(system: Arc<RootSystem>, points: usize) -> Result<Self> {
        let rule = rule_tensor(&system, points)?;
        let kernel = Arc::new(OrbitKernel::new(system.clone()));
        Self::with_parts(system, kernel, rule)
    }

    pub fn with_parts(system: Arc<RootSystem>, kernel: Arc<dyn Kernel>, rule: QuadratureRule) -> Result<Self> {
        if rule.dim != system.dim() || kernel.system().dim() != system.dim() {
            return Err(DunklError::DimensionMismatch {
                expected: system.dim(),
                got: rule.dim,
            });
        }
        let c_k = normalization_c_k(&rule)?;
        let outer = rule_tensor(&system, outer_points(rule.points))?;
        Ok(TransformContext {
            system,
            kernel,
            rule,
            outer,
            c_k,
        })
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.system
    }

    pub fn kernel(&self) -> &dyn Kernel {
        self.kernel.as_ref()
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Coarser rule for the outer variable of nested integrals.
    pub fn outer_rule(&self) -> &QuadratureRule {
        &self.outer
    }

    pub fn c_k(&self) -> f64 {
        self.c_k
    }

    pub fn gamma(&self) -> f64 {
        self.system.gamma_f64()
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// `γ + N/2`.
    pub fn homogeneity(&self) -> f64 {
        self.gamma() + self.dim() as f64 / 2.0
    }

    /// `c_k² / 4^{γ+N/2}`, the inversion constant.
    pub fn inversion_constant(&self) -> f64 {
        self.c_k * self.c_k * 4f64.powf(-self.homogeneity())
    }

    /// `∫ g(x) w_k(x) e^{-|x|²/s²} dx`.
    pub fn integrate_gaussian<F>(&self, s: f64, g: F) -> Result<C64>
    where
        F: Fn(&[f64]) -> Result<C64> + Sync,
    {
        self.integrate_with(&self.rule, s, g)
    }

    /// [`Self::integrate_gaussian`] on the outer rule, for the outer
    /// variable of a nested integral.
    pub fn integrate_gaussian_outer<F>(&self, s: f64, g: F) -> Result<C64>
    where
        F: Fn(&[f64]) -> Result<C64> + Sync,
    {
        self.integrate_with(&self.outer, s, g)
    }

    fn integrate_with<F>(&self, rule: &QuadratureRule, s: f64, g: F) -> Result<C64>
    where
        F: Fn(&[f64]) -> Result<C64> + Sync,
    {
        if !(s.is_finite() && s > 0.0) {
            return Err(DunklError::InvalidArgument(format!("Gaussian width must be positive and finite, got {s}")));
        }
        let sum: C64 = rule.try_integrate_scaled(s, g)?;
        Ok(sum * rule.scale_factor(&self.system, s))
    }

    pub fn kernel_complex(&self, x: &[C64], y: &[C64]) -> Result<C64> {
        self.kernel.eval_complex(x, y, KERNEL_TOL).certified(KERNEL_TOL)
    }

    pub fn kernel_real(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.kernel.eval_real(x, y, KERNEL_TOL).certified(KERNEL_TOL)
    }

    /// Real kernel in plain `f64`; see [`Kernel::eval_f64`].
    pub fn kernel_damped(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.kernel.eval_f64(x, y, KERNEL_TOL).certified(KERNEL_TOL)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(DunklError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

fn imag(x: &[f64], sign: f64) -> Vec<C64> {
    x.iter().map(|&v| C64::new(0.0, sign * v)).collect()
}

fn real(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `D_k f(ξ)`.
pub fn dunkl_transform(ctx: &TransformContext, f: &TestFunction, xi: &[f64]) -> Result<C64> {
    ctx.check_point(xi)?;
    if !f.has_gaussian() {
        return Err(DunklError::InvalidArgument(format!("{} has no Gaussian decay", f.label)));
    }
    let mxi = imag(xi, -1.0);
    ctx.integrate_gaussian(f.width, |x| Ok(ctx.kernel_complex(&mxi, &real(x))? * f.factor(x)))
}

/// `D_k f` sampled on the outer nodes rescaled to width `scale`,
/// stored with the Gaussian `e^{-|ξ|²/scale²}` divided out.
#[derive(Clone, Debug)]
pub struct TransformTable {
    pub scale: f64,
    pub values: Vec<C64>,
}

pub fn tabulate(ctx: &TransformContext, f: &TestFunction, scale: f64) -> Result<TransformTable> {
    let values = ctx
        .outer_rule()
        .nodes
        .iter()
        .map(|node| {
            let xi: Vec<f64> = node.iter().map(|v| v * scale).collect();
            let d = dunkl_transform(ctx, f, &xi)?;
            Ok(d * (norm2(&xi) / (scale * scale)).exp())
        })
        .collect::<Result<_>>()?;
    Ok(TransformTable { scale, values })
}

/// `∫ D_k f(ξ) e^{-t|ξ|²} Π_j K(i a_j, ξ) w_k(ξ) dξ` from a table.
fn table_integral(ctx: &TransformContext, table: &TransformTable, t: f64, points: &[Vec<f64>]) -> Result<C64> {
    let s = table.scale;
    let args: Vec<Vec<C64>> = points.iter().map(|a| imag(a, 1.0)).collect();
    let outer = ctx.outer_rule();
    let terms = outer
        .nodes
        .iter()
        .zip(&outer.weights)
        .zip(&table.values)
        .map(|((node, &w), &d)| {
            let xi: Vec<f64> = node.iter().map(|v| v * s).collect();
            let mut v = d * w * (-t * norm2(&xi)).exp();
            for a in &args {
                v *= ctx.kernel_complex(a, &real(&xi))?;
            }
            Ok(v)
        })
        .collect::<Result<Vec<C64>>>()?;
    Ok(terms.into_iter().sum::<C64>() * outer.scale_factor(ctx.system(), s))
}

/// Width of `D_k f` for `f` of width `s`: `D_k(e^{-|x|²/s²})` decays like `e^{-s²|ξ|²/4}`.
pub fn transform_width(f: &TestFunction) -> f64 {
    2.0 / f.width
}

/// `4^{-γ-N/2} c_k² E_k D_k f(x)` with `E_k g(x) = ∫ g(ξ) K(ix, ξ) w_k(ξ) dξ`.
/// Equals `f(x)` by the inversion theorem.
pub fn inverse_of_transform(ctx: &TransformContext, table: &TransformTable, x: &[f64]) -> Result<C64> {
    ctx.check_point(x)?;
    Ok(table_integral(ctx, table, 0.0, &[x.to_vec()])? * ctx.inversion_constant())
}

/// A complex identity check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransformCheck {
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub abs_err: f64,
}

impl TransformCheck {
    fn new(lhs: C64, rhs: C64) -> Self {
        TransformCheck {
            lhs: (lhs.re, lhs.im),
            rhs: (rhs.re, rhs.im),
            abs_err: (lhs - rhs).norm(),
        }
    }
}

/// `D_k F_k(·,t)(ξ)` against `e^{-t|ξ|²}`, with
/// `F_k(x,t) = M_k t^{-γ-N/2} e^{-|x|²/4t}`.
pub fn transform_heat_identity(ctx: &TransformContext, t: f64, xi: &[f64]) -> Result<TransformCheck> {
    if t <= 0.0 {
        return Err(DunklError::InvalidArgument(format!("t must be positive, got {t}")));
    }
    let m_k = ctx.c_k() * 4f64.powf(-ctx.homogeneity());
    let amp = m_k * t.powf(-ctx.homogeneity());
    let f = TestFunction::new("F_k", 2.0 * t.sqrt(), move |_| amp);
    let lhs = dunkl_transform(ctx, &f, xi)?;
    Ok(TransformCheck::new(lhs, C64::new((-t * norm2(xi)).exp(), 0.0)))
}

/// Sup-norm relative error of `D_k h_ν = 2^{γ+N/2} c_k^{-1} (-i)^{|ν|} h_ν`
/// over `grid`: `max |lhs - rhs| / max |rhs|`.
pub fn eigenrelation_error(ctx: &TransformContext, hs: Arc<HermiteSystem>, nu: &[u32], grid: &[Vec<f64>]) -> Result<f64> {
    let degree: u32 = nu.iter().sum();
    let f = TestFunction::hermite_function(hs, nu)?;
    let phase = Complex::new(0.0f64, -1.0).powu(degree);
    let c = 2f64.powf(ctx.homogeneity()) / ctx.c_k();
    let mut err: f64 = 0.0;
    let mut size: f64 = 0.0;
    for xi in grid {
        let lhs = dunkl_transform(ctx, &f, xi)?;
        let rhs = phase * c * f.value(xi);
        err = err.max((lhs - rhs).norm());
        size = size.max(rhs.norm());
    }
    if size == 0.0 {
        return Err(DunklError::InvalidArgument("grid only hits zeros of h_ν".into()));
    }
    Ok(err / size)
}

/// Generalized translation
/// `L_k^y f(x) = (c_k²/4^{γ+N/2}) ∫ D_k f(ξ) K(ix,ξ) K(iy,ξ) w_k(ξ) dξ`.
pub fn generalized_translation(ctx: &TransformContext, f: &TestFunction, y: &[f64], x: &[f64]) -> Result<f64> {
    let table = translation_table(ctx, f)?;
    translate(ctx, &table, y, x)
}

/// Cost guard for translation: the nested quadrature is only run for `N ≤ 2`.
pub fn translation_table(ctx: &TransformContext, f: &TestFunction) -> Result<TransformTable> {
    if ctx.dim() > 2 {
        return Err(DunklError::CostGuard(format!(
            "generalized translation is limited to N ≤ 2 (got N = {})",
            ctx.dim()
        )));
    }
    tabulate(ctx, f, transform_width(f))
}

pub fn translate(ctx: &TransformContext, table: &TransformTable, y: &[f64], x: &[f64]) -> Result<f64> {
    ctx.check_point(x)?;
    ctx.check_point(y)?;
    let v = table_integral(ctx, table, 0.0, &[x.to_vec(), y.to_vec()])? * ctx.inversion_constant();
    Ok(v.re)
}

/// `(c_k²/4^{γ+N/2}) ∫ e^{-t|ξ|²} D_k f(ξ) K(ix,ξ) w_k(ξ) dξ`: the spectral
/// form of the heat semigroup, from a table of `D_k f`.
pub fn spectral_heat(ctx: &TransformContext, table: &TransformTable, x: &[f64], t: f64) -> Result<f64> {
    ctx.check_point(x)?;
    Ok((table_integral(ctx, table, t, &[x.to_vec()])? * ctx.inversion_constant()).re)
}
