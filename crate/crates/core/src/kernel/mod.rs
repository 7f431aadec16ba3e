//! The Dunkl kernel `K(x,y) = Σ_ν φ_ν(x) φ_ν(y)` and its identities.
//!
//! Two evaluators implement [`Kernel`]: [`KernelEvaluator`] sums the
//! orthonormal basis series up to the Hermite system's degree, and
//! [`OrbitKernel`] runs a recursion over the group orbit with no degree
//! limit. Both certify truncation with `Σ_{n>m} (|x||y|)^n / n!`, which
//! bounds `|K - Σ_{n≤m} K_n|` because `|K_n(z,w)| ≤ |z|^n|w|^n/n!`.

mod bessel;
mod orbit;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

pub use bessel::{kernel_eval_z2, kernel_eval_z2_dd, normalized_bessel};
pub use orbit::{OrbitKernel, MAX_ORBIT_DEGREE};

use crate::error::{DunklError, Result};
use crate::groups::RootSystem;
use crate::hermite::HermiteSystem;
use crate::poly::Polynomial;
use crate::quad::{normalization_c_k, QuadratureRule};
use crate::scalar::{point_norm, Real, Scalar, C64, CDD, DD};

/// A kernel value with its certified truncation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue<T> {
    pub value: T,
    /// Upper bound on the omitted tail.
    pub tail: f64,
    /// Highest homogeneous degree included.
    pub degree: usize,
    pub converged: bool,
}

impl<T> KernelValue<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> KernelValue<U> {
        KernelValue {
            value: f(self.value),
            tail: self.tail,
            degree: self.degree,
            converged: self.converged,
        }
    }

    /// The value, or [`DunklError::NotConverged`] when the tail bound
    /// exceeds `tol`.
    pub fn certified(self, tol: f64) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(DunklError::NotConverged {
                tail: self.tail,
                tol,
                degree: self.degree,
            })
        }
    }
}

/// `Σ_{m>n} t^m/m!` bounded from above.
pub fn tail_bound(t: f64, n: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let next = (n + 2) as f64;
    if next <= 2.0 * t {
        return t.exp();
    }
    let log_term = (n + 1) as f64 * t.ln() - libm::lgamma(next);
    log_term.exp() / (1.0 - t / next)
}

pub trait Kernel: Send + Sync {
    fn system(&self) -> &RootSystem;
    fn eval_dd(&self, x: &[DD], y: &[DD], tol: f64) -> KernelValue<DD>;
    fn eval_cdd(&self, x: &[CDD], y: &[CDD], tol: f64) -> KernelValue<CDD>;

    fn eval_real(&self, x: &[f64], y: &[f64], tol: f64) -> KernelValue<f64> {
        let lift = |p: &[f64]| p.iter().map(|&v| DD::from(v)).collect::<Vec<_>>();
        self.eval_dd(&lift(x), &lift(y), tol).map(|v| v.approx())
    }

    /// Real kernel summed in plain `f64`. Cancellation costs up to
    /// `ε e^{|x||y|}` absolute, which is harmless when the caller damps the
    /// result by `e^{-|x||y|}` or more (as the heat kernel does).
    fn eval_f64(&self, x: &[f64], y: &[f64], tol: f64) -> KernelValue<f64> {
        self.eval_real(x, y, tol)
    }

    fn eval_complex(&self, x: &[C64], y: &[C64], tol: f64) -> KernelValue<C64> {
        let lift = |p: &[C64]| p.iter().map(|&v| CDD::from_c64(v)).collect::<Vec<_>>();
        self.eval_cdd(&lift(x), &lift(y), tol).map(|v| v.to_c64())
    }
}

/// Basis-series evaluator over a [`HermiteSystem`].
#[derive(Clone, Debug)]
pub struct KernelEvaluator {
    hermite: Arc<HermiteSystem>,
}

impl KernelEvaluator {
    pub fn new(hermite: Arc<HermiteSystem>) -> Self {
        KernelEvaluator { hermite }
    }

    pub fn hermite(&self) -> &Arc<HermiteSystem> {
        &self.hermite
    }

    pub fn n_max(&self) -> usize {
        self.hermite.n_max()
    }

    /// `K_n(x,y) = Σ_{|ν|=n} φ_ν(x) φ_ν(y)`.
    pub fn homogeneous<S: Scalar>(&self, n: usize, x: &[S], y: &[S]) -> Result<S> {
        if n > self.n_max() {
            return Err(DunklError::DegreeCap {
                degree: n,
                cap: self.n_max(),
            });
        }
        self.check_dims(x.len(), y.len())?;
        Ok(self
            .hermite
            .degree(n)
            .iter()
            .fold(S::zero(), |acc, e| acc + e.phi_value(x) * e.phi_value(y)))
    }

    /// Partial sums up to the first degree whose tail bound is below `tol`.
    pub fn eval<S: Scalar>(&self, x: &[S], y: &[S], tol: f64) -> KernelValue<S> {
        let t = point_norm(x) * point_norm(y);
        let mut sum = S::zero();
        let mut degree = 0;
        let mut tail = f64::INFINITY;
        for n in 0..=self.n_max() {
            sum = sum + self.homogeneous(n, x, y).expect("degree and dimensions checked");
            degree = n;
            tail = tail_bound(t, n);
            if tail <= tol {
                break;
            }
        }
        KernelValue {
            value: sum,
            tail,
            degree,
            converged: tail <= tol,
        }
    }

    fn check_dims(&self, a: usize, b: usize) -> Result<()> {
        let n = self.hermite.dim();
        for got in [a, b] {
            if got != n {
                return Err(DunklError::DimensionMismatch { expected: n, got });
            }
        }
        Ok(())
    }
}

impl Kernel for KernelEvaluator {
    fn system(&self) -> &RootSystem {
        self.hermite.ctx().system()
    }

    fn eval_dd(&self, x: &[DD], y: &[DD], tol: f64) -> KernelValue<DD> {
        self.eval(x, y, tol)
    }

    fn eval_cdd(&self, x: &[CDD], y: &[CDD], tol: f64) -> KernelValue<CDD> {
        self.eval(x, y, tol)
    }
}

/// `K_n` as an exact polynomial in `2N` variables `(x, y)`:
/// `Σ_{|ν|=n} φ̃_ν(x) φ̃_ν(y) / m_ν`.
pub fn kernel_polynomial(hs: &HermiteSystem, n: usize) -> Result<Polynomial> {
    if n > hs.n_max() {
        return Err(DunklError::DegreeCap {
            degree: n,
            cap: hs.n_max(),
        });
    }
    let d = hs.dim();
    let mut k = Polynomial::zero(2 * d);
    for e in hs.degree(n) {
        let prod = &e.phi.embed(2 * d, 0) * &e.phi.embed(2 * d, d);
        k.add_scaled(&prod, &e.norm2.recip());
    }
    Ok(k)
}

/// `T_j` acting on the first `N` variables of a `2N`-variable polynomial.
fn dunkl_in_x(hs: &HermiteSystem, j: usize, p: &Polynomial) -> Result<Polynomial> {
    let d = hs.dim();
    let mut by_y: BTreeMap<Vec<u32>, Vec<(Vec<u32>, num_rational::BigRational)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.exps();
        by_y.entry(e[d..].to_vec()).or_default().push((e[..d].to_vec(), c.clone()));
    }
    let mut out = Polynomial::zero(2 * d);
    for (ye, xs) in by_y {
        let px = Polynomial::from_terms(d, xs)?;
        let tx = hs.ctx().dunkl_apply(j, &px)?;
        let ymono = Polynomial::monomial(&ye).embed(2 * d, d);
        out += &(&tx.embed(2 * d, 0) * &ymono);
    }
    Ok(out)
}

/// `T_j^x K_n(x,y) - y_j K_{n-1}(x,y)`, exactly; `j` is 0-based.
pub fn intertwining_residual(hs: &HermiteSystem, j: usize, n: usize) -> Result<Polynomial> {
    let d = hs.dim();
    if j >= d {
        return Err(DunklError::IndexOutOfRange { index: j, dim: d });
    }
    if n == 0 {
        return Err(DunklError::InvalidArgument("intertwining needs n ≥ 1".into()));
    }
    let lhs = dunkl_in_x(hs, j, &kernel_polynomial(hs, n)?)?;
    let rhs = &Polynomial::var(2 * d, d + j) * &kernel_polynomial(hs, n - 1)?;
    Ok(lhs - rhs)
}

/// Two independently computed sides of an identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Truncation allowance attached to the comparison.
    pub tail: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64, tail: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            tail,
        }
    }
}

fn lift_dd(x: &[f64]) -> Vec<DD> {
    x.iter().map(|&v| DD::from(v)).collect()
}

fn l_of(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `Σ_{n≤n_max} Σ_{|ν|=n} H_ν(z) φ_ν(w)` against `e^{-l(w)} K(2z,w)`.
/// The tail allowance is the size of the last two degree blocks plus the
/// kernel's certified tail.
pub fn generating_function_residual(ev: &KernelEvaluator, z: &[f64], w: &[f64], tol: f64) -> Result<IdentityCheck> {
    ev.check_dims(z.len(), w.len())?;
    let (zd, wd) = (lift_dd(z), lift_dd(w));
    let hs = ev.hermite();
    let mut lhs = DD::zero();
    let mut blocks = Vec::new();
    for n in 0..=hs.n_max() {
        let block = hs
            .degree(n)
            .iter()
            .fold(DD::zero(), |acc, e| acc + e.hermite_value(&zd) * e.phi_value(&wd));
        blocks.push(block.approx().abs());
        lhs = lhs + block;
    }
    let z2: Vec<DD> = zd.iter().map(|&v| v * DD::from(2.0)).collect();
    let k = ev.eval(&z2, &wd, tol);
    let rhs = (-l_of(w)).exp() * k.value.approx();
    let last: f64 = blocks.iter().rev().take(2).sum();
    Ok(IdentityCheck::new(lhs.approx(), rhs, last + k.tail))
}

/// Left side of Mehler's formula, `Σ_ν H_ν(x) H_ν(y) r^{|ν|} / 2^{|ν|}`,
/// summed by increasing degree in double-double. The `tail` field holds
/// the size of the last degree block, which dominates the remainder once
/// the `r^{|ν|}` damping has taken over.
pub fn mehler_lhs(hs: &HermiteSystem, x: &[f64], y: &[f64], r: f64) -> Result<(f64, f64)> {
    if r.abs() >= 1.0 {
        return Err(DunklError::InvalidArgument(format!("Mehler needs |r| < 1, got {r}")));
    }
    let (xd, yd) = (lift_dd(x), lift_dd(y));
    let mut sum = DD::zero();
    let mut last = 0.0;
    let mut damp = DD::from(1.0);
    let half_r = DD::from(r) / DD::from(2.0);
    for n in 0..=hs.n_max() {
        let block = hs
            .degree(n)
            .iter()
            .fold(DD::zero(), |acc, e| acc + e.hermite_value(&xd) * e.hermite_value(&yd))
            * damp;
        sum = sum + block;
        last = block.approx().abs();
        damp = damp * half_r;
    }
    Ok((sum.approx(), last))
}

/// Right side of Mehler's formula,
/// `(1-r²)^{-γ-N/2} exp(-r²(|x|²+|y|²)/(1-r²)) K(2rx/(1-r²), y)`.
pub fn mehler_rhs(kernel: &dyn Kernel, x: &[f64], y: &[f64], r: f64, tol: f64) -> Result<KernelValue<f64>> {
    if r.abs() >= 1.0 {
        return Err(DunklError::InvalidArgument(format!("Mehler needs |r| < 1, got {r}")));
    }
    let sys = kernel.system();
    let s = 1.0 - r * r;
    let pre = s.powf(-sys.gamma_f64() - sys.dim() as f64 / 2.0) * (-r * r * (l_of(x) + l_of(y)) / s).exp();
    let xs: Vec<f64> = x.iter().map(|v| 2.0 * r * v / s).collect();
    Ok(kernel.eval_real(&xs, y, tol).map(|k| pre * k))
}

/// `∫ K(2z,x) K(2w,x) dμ_k(x)` against `e^{l(z)+l(w)} K(2z,w)`.
pub fn reproducing_residual(
    kernel: &dyn Kernel,
    rule: &QuadratureRule,
    z: &[f64],
    w: &[f64],
    tol: f64,
) -> Result<IdentityCheck> {
    let c_k = normalization_c_k(rule)?;
    let z2: Vec<f64> = z.iter().map(|v| 2.0 * v).collect();
    let w2: Vec<f64> = w.iter().map(|v| 2.0 * v).collect();
    let integral: f64 = rule.integrate(|x| {
        kernel.eval_real(&z2, x, tol).value * kernel.eval_real(&w2, x, tol).value
    });
    let k = kernel.eval_real(&z2, w, tol);
    let rhs = (l_of(z) + l_of(w)).exp() * k.value;
    Ok(IdentityCheck::new(c_k * integral, rhs, k.tail))
}

/// `e^{-|x|²} H_ν(x)` against `2^{|ν|} ∫ K(x,-2iy) φ_ν(iy) dμ_k(y)`.
pub fn hermite_integral_residual(
    hs: &HermiteSystem,
    kernel: &dyn Kernel,
    rule: &QuadratureRule,
    nu: &[u32],
    x: &[f64],
    tol: f64,
) -> Result<IdentityCheck> {
    let e = hs.element(nu)?;
    let c_k = normalization_c_k(rule)?;
    let xc: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    let integral: C64 = rule.integrate(|y| {
        let iy: Vec<CDD> = y.iter().map(|&v| Complex::new(DD::from(0.0), DD::from(v))).collect();
        let m2iy: Vec<C64> = y.iter().map(|&v| C64::new(0.0, -2.0 * v)).collect();
        kernel.eval_complex(&xc, &m2iy, tol).value * e.phi_value(&iy).to_c64()
    });
    let rhs = integral * c_k * 2f64.powi(e.degree() as i32);
    let lhs = (-l_of(x)).exp() * e.hermite_value(&lift_dd(x)).approx();
    Ok(IdentityCheck {
        lhs,
        rhs: rhs.re,
        residual: (C64::new(lhs, 0.0) - rhs).norm(),
        tail: 0.0,
    })
}
