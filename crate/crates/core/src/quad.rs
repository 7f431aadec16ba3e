//! Quadrature for `∫ f(x) w_k(x) e^{-|x|²} dx` and the constant `c_k`.
//!
//! One-dimensional rules for `|x|^{2μ} e^{-x²}` get their recurrence
//! coefficients from the exact (rational) moment sequence by the Chebyshev
//! algorithm, so there is no ill-conditioning in the moment step. Nodes come
//! from the Jacobi matrix (Golub–Welsch) and are polished by Newton steps on
//! the orthonormal recurrence; weights use the Christoffel function.

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::groups::{Family, RootSystem};
use crate::rational::{format_rational, int, rat, to_f64};
use crate::scalar::Scalar;

/// Upper bound on the total node count of a tensor rule.
pub const MAX_NODES: usize = 400_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Label of the target measure `w_k(x) e^{-|x|²} dx`.
    pub measure: String,
    /// Points per axis.
    pub points: usize,
    /// Polynomial degree integrated exactly, when known.
    pub exact_degree: Option<usize>,
    /// Set when `w_k` is only folded into the integrand and not smooth.
    pub approximate: bool,
    /// Relative change of test moments against a half-size rule.
    pub error_estimate: f64,
}

/// Monic recurrence `p_{k+1} = x p_k - b_k p_{k-1}` (zero diagonal) for
/// `|x|^{2μ} e^{-x²}`, `b_1..b_{n-1}`, from the Chebyshev algorithm on the
/// normalized moments `m_{2j}/m_0 = Π_{i<j} (μ + 1/2 + i)`.
pub fn generalized_hermite_recurrence(mu: &BigRational, n: usize) -> Result<Vec<BigRational>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let len = 2 * n;
    let mut moments = vec![BigRational::zero(); len];
    let mut m = BigRational::one();
    for l in 0..len {
        if l % 2 == 0 {
            moments[l] = m.clone();
            m = m * (mu + rat(1, 2) + int((l / 2) as i64));
        }
    }
    let mut a = vec![BigRational::zero(); n];
    let mut b = vec![BigRational::zero(); n];
    a[0] = &moments[1] / &moments[0];
    b[0] = moments[0].clone();
    let mut prev2 = vec![BigRational::zero(); len];
    let mut prev = moments;
    for k in 1..n {
        let mut cur = vec![BigRational::zero(); len];
        for l in k..len - k {
            cur[l] = &prev[l + 1] - &a[k - 1] * &prev[l] - &b[k - 1] * &prev2[l];
        }
        if cur[k].is_zero() || prev[k - 1].is_zero() {
            return Err(DunklError::Quadrature(format!(
                "recurrence breakdown at step {k}; the moment sequence is degenerate"
            )));
        }
        a[k] = &cur[k + 1] / &cur[k] - &prev[k] / &prev[k - 1];
        b[k] = &cur[k] / &prev[k - 1];
        prev2 = prev;
        prev = cur;
    }
    if a.iter().any(|v| !v.is_zero()) {
        return Err(DunklError::Quadrature("symmetric weight produced a nonzero diagonal".into()));
    }
    Ok(b.into_iter().skip(1).collect())
}

/// Orthonormal polynomials `p̂_0..p̂_{n}` (for the normalized measure) and
/// the derivative of `p̂_n` at `x`.
fn orthonormal_values(beta: &[f64], x: f64, n: usize) -> (Vec<f64>, f64) {
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x / beta[0].sqrt();
        dp[1] = 1.0 / beta[0].sqrt();
    }
    for k in 1..n {
        let s_next = beta[k].sqrt();
        let s_prev = beta[k - 1].sqrt();
        p[k + 1] = (x * p[k] - s_prev * p[k - 1]) / s_next;
        dp[k + 1] = (p[k] + x * dp[k] - s_prev * dp[k - 1]) / s_next;
    }
    (p, dp[n])
}

/// Gauss rule for `|x|^{2μ} e^{-x²}` on `R` with `n` nodes, exact through
/// degree `2n - 1`. Nodes ascending and symmetric about 0.
pub fn rule_generalized_hermite_1d(mu: &BigRational, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(DunklError::Quadrature("need at least one node".into()));
    }
    if mu < &BigRational::zero() {
        return Err(DunklError::NegativeMultiplicity(format_rational(mu)));
    }
    // b_1..b_n: the Jacobi matrix uses the first n - 1, Newton needs b_n too.
    let beta: Vec<f64> = generalized_hermite_recurrence(mu, n + 1)?.iter().map(to_f64).collect();
    let mass = libm::tgamma(to_f64(mu) + 0.5);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n - 1 {
        let s = beta[k].sqrt();
        jac[(k, k + 1)] = s;
        jac[(k + 1, k)] = s;
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = orthonormal_values(&beta, *x, n);
            if dp != 0.0 {
                *x -= p[n] / dp;
            }
        }
        let (p, _) = orthonormal_values(&beta, *x, n);
        let christoffel: f64 = p[..n].iter().map(|v| v * v).sum();
        weights.push(mass / christoffel);
    }
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn tensor(axes: &[(Vec<f64>, Vec<f64>)]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut nodes = vec![Vec::new()];
    let mut weights = vec![1.0];
    for (xs, ws) in axes {
        let mut nn = Vec::with_capacity(nodes.len() * xs.len());
        let mut nw = Vec::with_capacity(nodes.len() * xs.len());
        for (p, w) in nodes.iter().zip(&weights) {
            for (x, v) in xs.iter().zip(ws) {
                let mut q = p.clone();
                q.push(*x);
                nn.push(q);
                nw.push(w * v);
            }
        }
        nodes = nn;
        weights = nw;
    }
    (nodes, weights)
}

/// Per-axis `μ` absorbed into the 1D weights, and the positive roots whose
/// factor `|<α,x>|^{2k}` must be folded into the weights at the nodes.
fn split_weight(sys: &RootSystem) -> (Vec<BigRational>, Vec<usize>) {
    let n = sys.dim();
    let mut axis = vec![BigRational::zero(); n];
    let mut folded = Vec::new();
    for (i, r) in sys.positive_roots().iter().enumerate() {
        if r.multiplicity.is_zero() {
            continue;
        }
        let on_axis = match (&r.direction, sys.family()) {
            (Some(d), Family::Z2Product | Family::B) => {
                let nz: Vec<usize> = (0..n).filter(|&j| !d[j].is_zero()).collect();
                (nz.len() == 1).then(|| nz[0])
            }
            _ => None,
        };
        match on_axis {
            Some(j) => axis[j] = r.multiplicity.clone(),
            None => folded.push(i),
        }
    }
    (axis, folded)
}

/// Tensor rule for `w_k(x) e^{-|x|²} dx` with `points` nodes per axis.
/// Axis-aligned roots (Z2^N, short roots of B_N) go into exact per-axis
/// generalized Hermite weights. Every other root factor is folded into the
/// weights at the nodes.
pub fn rule_tensor(sys: &RootSystem, points: usize) -> Result<QuadratureRule> {
    let n = sys.dim();
    let total = points.checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > MAX_NODES {
        return Err(DunklError::CostGuard(format!(
            "{points}^{n} = {total} nodes exceeds {MAX_NODES}"
        )));
    }
    let build = |pts: usize| -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let (axis, folded) = split_weight(sys);
        let axes = axis
            .iter()
            .map(|mu| {
                let (x, mut w) = rule_generalized_hermite_1d(mu, pts)?;
                // |<√2 e_i, x>|^{2μ} = 2^μ |x_i|^{2μ}.
                let f = 2f64.powf(to_f64(mu));
                w.iter_mut().for_each(|v| *v *= f);
                Ok((x, w))
            })
            .collect::<Result<Vec<_>>>()?;
        let (nodes, mut weights) = tensor(&axes);
        for (x, w) in nodes.iter().zip(weights.iter_mut()) {
            for &i in &folded {
                let r = &sys.positive_roots()[i];
                *w *= r.dot_f64(x).abs().powf(2.0 * r.multiplicity_f64());
            }
        }
        Ok((nodes, weights))
    };
    let (nodes, weights) = build(points)?;
    let (_, folded) = split_weight(sys);
    let folded_degree: Option<usize> = folded.iter().try_fold(0usize, |acc, &i| {
        let two_k = int(2) * &sys.positive_roots()[i].multiplicity;
        two_k.is_integer().then(|| acc + to_f64(&two_k) as usize)
    });
    let smooth = folded.iter().all(|&i| {
        let two_k = int(2) * &sys.positive_roots()[i].multiplicity;
        two_k.is_integer() && two_k.numer() % 2u32 == 0u32.into()
    });
    let exact_degree = if smooth {
        folded_degree.and_then(|d| (2 * points).checked_sub(1 + d))
    } else {
        None
    };
    let mut rule = QuadratureRule {
        dim: n,
        nodes,
        weights,
        measure: sys.label(),
        points,
        exact_degree,
        approximate: !smooth,
        error_estimate: 0.0,
    };
    if rule.approximate && points >= 4 {
        let (cn, cw) = build(points / 2)?;
        let coarse = QuadratureRule {
            nodes: cn,
            weights: cw,
            ..rule.clone()
        };
        rule.error_estimate = test_moments()
            .iter()
            .map(|f| {
                let a: f64 = rule.integrate(f);
                let b: f64 = coarse.integrate(f);
                (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
    }
    Ok(rule)
}

fn test_moments() -> Vec<fn(&[f64]) -> f64> {
    vec![
        |_| 1.0,
        |x| x.iter().map(|v| v * v).sum(),
        |x| x.iter().map(|v| v * v).sum::<f64>().powi(2),
    ]
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ_j W_j f(x_j)`, parallel over nodes with a fixed-order reduction.
    pub fn integrate<S, F>(&self, f: F) -> S
    where
        S: Scalar,
        F: Fn(&[f64]) -> S + Sync,
    {
        self.integrate_scaled(1.0, f)
    }

    /// `∫ f(x) w_k(x) e^{-|x|²/s²} dx = s^{N+2γ} Σ_j W_j f(s x_j)`; the
    /// prefactor is left to the caller (see [`scale_factor`](Self::scale_factor)).
    pub fn integrate_scaled<S, F>(&self, s: f64, f: F) -> S
    where
        S: Scalar,
        F: Fn(&[f64]) -> S + Sync,
    {
        self.try_integrate_scaled(s, |x| Ok(f(x))).expect("infallible integrand")
    }

    /// [`integrate_scaled`](Self::integrate_scaled) for integrands that can
    /// fail; the first error (in node order) is returned.
    pub fn try_integrate_scaled<S, F>(&self, s: f64, f: F) -> Result<S>
    where
        S: Scalar,
        F: Fn(&[f64]) -> Result<S> + Sync,
    {
        let terms: Vec<Result<S>> = self
            .nodes
            .par_iter()
            .zip(&self.weights)
            .map(|(x, &w)| {
                let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
                Ok(f(&xs)?.scale(<S::Real as crate::scalar::Real>::lift(w)))
            })
            .collect();
        terms.into_iter().try_fold(S::zero(), |acc, t| Ok(acc + t?))
    }

    /// `s^{N+2γ}` for a Gaussian of width `s`.
    pub fn scale_factor(&self, sys: &RootSystem, s: f64) -> f64 {
        s.powf(sys.dim() as f64 + 2.0 * sys.gamma_f64())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// `c_k = (∫ e^{-|x|²} w_k(x) dx)^{-1}` from the rule's total mass.
pub fn normalization_c_k(rule: &QuadratureRule) -> Result<f64> {
    let mass = rule.total_mass();
    if !(mass.is_finite() && mass > 0.0) || rule.error_estimate > 1e-3 {
        return Err(DunklError::Quadrature(format!(
            "mass estimate {mass:e} (relative error {:e}) is not usable",
            rule.error_estimate
        )));
    }
    Ok(1.0 / mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::SystemSpec;
    use std::f64::consts::PI;

    fn gamma_moment(mu: f64, m: usize) -> f64 {
        libm::tgamma(mu + m as f64 + 0.5)
    }

    #[test]
    fn chebyshev_recovers_closed_form_recurrence() {
        for mu in [int(0), rat(1, 2), int(1), rat(5, 2), rat(2, 7)] {
            let b = generalized_hermite_recurrence(&mu, 30).unwrap();
            for (k, bk) in b.iter().enumerate() {
                let k = k + 1;
                let odd = if k % 2 == 1 { mu.clone() } else { int(0) };
                assert_eq!(*bk, rat(k as i64, 2) + odd);
            }
        }
    }

    #[test]
    fn gauss_hermite_basics() {
        let (x, w) = rule_generalized_hermite_1d(&int(0), 20).unwrap();
        assert!((w.iter().sum::<f64>() - PI.sqrt()).abs() < 1e-14);
        let odd: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(5)).sum();
        assert!(odd.abs() < 1e-14);
        assert!(w.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn moments_are_exact() {
        for (mu, muf) in [(int(0), 0.0), (int(1), 1.0), (rat(5, 2), 2.5), (rat(1, 3), 1.0 / 3.0)] {
            for n in [5usize, 16, 40] {
                let (x, w) = rule_generalized_hermite_1d(&mu, n).unwrap();
                for m in 0..n {
                    let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * m as i32)).sum();
                    let expect = gamma_moment(muf, m);
                    assert!((got - expect).abs() <= 1e-12 * expect, "mu={muf} n={n} m={m}");
                }
            }
        }
        let (x, w) = rule_generalized_hermite_1d(&int(1), 10).unwrap();
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((got - 0.75 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn normalization_constants() {
        let flat = SystemSpec::z2(&[int(0)]).unwrap().build().unwrap();
        let c = normalization_c_k(&rule_tensor(&flat, 10).unwrap()).unwrap();
        assert!((c - 1.0 / PI.sqrt()).abs() < 1e-15);
        // w_k(x) = |√2 x|^2 = 2x², so ∫ w_k e^{-x²} = 2Γ(3/2).
        let z2 = SystemSpec::z2(&[int(1)]).unwrap().build().unwrap();
        let c = normalization_c_k(&rule_tensor(&z2, 10).unwrap()).unwrap();
        assert!((c - 1.0 / (2.0 * libm::tgamma(1.5))).abs() < 1e-15);
        let z22 = SystemSpec::z2(&[int(1), int(2)]).unwrap().build().unwrap();
        let rule = rule_tensor(&z22, 12).unwrap();
        let expect = 2.0 * libm::tgamma(1.5) * 4.0 * libm::tgamma(2.5);
        assert!((rule.total_mass() - expect).abs() < 1e-13 * expect);
        assert!(!rule.approximate);
        assert_eq!(rule.exact_degree, Some(23));
    }

    #[test]
    fn folded_rules_converge() {
        // k = 1 folds a polynomial weight, so orders 20 and 40 agree to roundoff.
        let s3 = SystemSpec::symmetric(3, int(1)).unwrap().build().unwrap();
        let (a, b) = (rule_tensor(&s3, 40).unwrap().total_mass(), rule_tensor(&s3, 20).unwrap().total_mass());
        assert!((a - b).abs() / a < 1e-12, "{a} vs {b}");
        let r = rule_tensor(&s3, 10).unwrap();
        assert!(!r.approximate);
        assert_eq!(r.exact_degree, Some(13));
        // Mehta integral for k = 1: (2π)^{3/2} Γ(2)Γ(3)Γ(4) / 2^{3/2+3}.
        let g = libm::tgamma;
        let expect = (2.0 * PI).powf(1.5) * g(2.0) * g(3.0) * g(4.0) / 2f64.powf(1.5 + 3.0);
        assert!((a - expect).abs() < 1e-12 * expect, "{a} vs {expect}");
    }

    #[test]
    fn kinked_weights_are_flagged_with_honest_estimates() {
        let s3 = SystemSpec::symmetric(3, rat(1, 2)).unwrap().build().unwrap();
        let fine = rule_tensor(&s3, 40).unwrap();
        let coarse = rule_tensor(&s3, 20).unwrap();
        assert!(fine.approximate && fine.exact_degree.is_none());
        let (a, b) = (fine.total_mass(), coarse.total_mass());
        assert!((a - b).abs() / a <= coarse.error_estimate);
        // Mehta value for k = 1/2; |x_i - x_j| kinks on grid lines limit the order.
        let g = libm::tgamma;
        let expect = (2.0 * PI).powf(1.5) * g(1.5) * g(2.0) * g(2.5) / g(1.5).powi(3) / 2f64.powf(1.5 + 1.5);
        let err = (a - expect).abs() / expect;
        assert!(err < 0.05 && err <= 2.0 * fine.error_estimate, "err {err}, estimate {}", fine.error_estimate);
    }

    #[test]
    fn b2_mass_against_symbolic_value() {
        // B2, k0 = k1 = 1: ∫ 4 x² y² (x² - y²)² e^{-|x|²} = 4(2 Γ(7/2)Γ(3/2) - 2 Γ(5/2)²).
        let b2 = SystemSpec::hyperoctahedral(2, int(1), int(1)).unwrap().build().unwrap();
        let r = rule_tensor(&b2, 12).unwrap();
        let g = libm::tgamma;
        let expect = 4.0 * (2.0 * g(3.5) * g(1.5) - 2.0 * g(2.5) * g(2.5));
        assert!((r.total_mass() - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn scaled_integration() {
        let z2 = SystemSpec::z2(&[int(1)]).unwrap().build().unwrap();
        let rule = rule_tensor(&z2, 20).unwrap();
        let s = 0.7f64;
        let v: f64 = rule.integrate_scaled(s, |_| 1.0);
        let got = v * rule.scale_factor(&z2, s);
        let expect = 2.0 * libm::tgamma(1.5) * s.powi(3);
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn rejects_oversized_rules() {
        let s = SystemSpec::z2(&vec![int(1); 5]).unwrap().build().unwrap();
        assert!(matches!(rule_tensor(&s, 20), Err(DunklError::CostGuard(_))));
    }

    #[test]
    fn json_round_trip() {
        let z2 = SystemSpec::z2(&[int(1)]).unwrap().build().unwrap();
        let rule = rule_tensor(&z2, 6).unwrap();
        let back: QuadratureRule = serde_json::from_str(&rule.to_json()).unwrap();
        assert_eq!(back, rule);
    }
}
