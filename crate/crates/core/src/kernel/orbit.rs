//! Kernel evaluation by recursion over the group orbit.
//!
//! Pairing the intertwining relation `T_j^x K_n = y_j K_{n-1}` with `x_j`
//! and summing gives the Euler identity
//! `(n+γ) K_n(x,y) - Σ_{α∈R₊} k(α) K_n(σ_α x, y) = <x,y> K_{n-1}(x,y)`.
//! Written for the vector `v_n(g) = K_n(gx, y)` over the group this is
//! `((n+γ)I - S) v_n = D v_{n-1}` with `S = Σ k(α) (left mult. by σ_α)`
//! and `D = diag <gx, y>`. `S` is symmetric with spectrum in `[-γ, γ]`, so
//! every step is a well-conditioned solve. The solve uses the eigenbasis of
//! `S` in `f64` as a preconditioner and two steps of iterative refinement
//! with double-double residuals, which keeps the cancellation in
//! `Σ K_n` (terms up to `e^{|x||y|}`) under control.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{tail_bound, Kernel, KernelValue};
use crate::groups::RootSystem;
use crate::scalar::{Real, Scalar, C64, CDD, DD};

/// Hard cap on the number of homogeneous terms.
pub const MAX_ORBIT_DEGREE: usize = 4000;

#[derive(Clone, Debug)]
pub struct OrbitKernel {
    system: Arc<RootSystem>,
    gamma: f64,
    multiplicities: Vec<f64>,
    /// `table[a][g]` = index of `σ_{α_a} g`.
    table: Vec<Vec<usize>>,
    eigvecs: DMatrix<f64>,
    eigvals: Vec<f64>,
}

impl OrbitKernel {
    pub fn new(system: Arc<RootSystem>) -> Self {
        let order = system.order();
        let table = system.reflection_table();
        let multiplicities: Vec<f64> = system.positive_roots().iter().map(|r| r.multiplicity_f64()).collect();
        let mut s = DMatrix::<f64>::zeros(order, order);
        for (row, &k) in table.iter().zip(&multiplicities) {
            for (g, &h) in row.iter().enumerate() {
                s[(g, h)] += k;
            }
        }
        let eig = SymmetricEigen::new(s);
        OrbitKernel {
            gamma: system.gamma_f64(),
            system,
            multiplicities,
            table,
            eigvals: eig.eigenvalues.iter().copied().collect(),
            eigvecs: eig.eigenvectors,
        }
    }

    /// `((n+γ)I - S)^{-1} r` in `f64`, real and imaginary parts separately.
    fn precondition(&self, n: usize, r: &[C64], complex: bool) -> Vec<C64> {
        let shift = n as f64 + self.gamma;
        let solve = |v: DVector<f64>| -> DVector<f64> {
            let mut c = self.eigvecs.tr_mul(&v);
            for (ci, lam) in c.iter_mut().zip(&self.eigvals) {
                *ci /= shift - lam;
            }
            &self.eigvecs * c
        };
        let re = solve(DVector::from_iterator(r.len(), r.iter().map(|z| z.re)));
        if complex {
            let im = solve(DVector::from_iterator(r.len(), r.iter().map(|z| z.im)));
            re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)).collect()
        } else {
            re.iter().map(|&a| C64::new(a, 0.0)).collect()
        }
    }

    fn apply_shifted<S: Scalar>(&self, n: usize, v: &[S]) -> Vec<S> {
        let shift = <S::Real as Real>::lift(n as f64 + self.gamma);
        (0..v.len())
            .map(|g| {
                let mut acc = v[g].scale(shift);
                for (row, &k) in self.table.iter().zip(&self.multiplicities) {
                    if k != 0.0 {
                        acc = acc - v[row[g]].scale(<S::Real as Real>::lift(k));
                    }
                }
                acc
            })
            .collect()
    }

    fn solve<S: Scalar>(&self, n: usize, b: &[S]) -> Vec<S> {
        let approx: Vec<C64> = b.iter().map(|z| z.to_c64()).collect();
        let mut v: Vec<S> = self
            .precondition(n, &approx, S::IS_COMPLEX)
            .into_iter()
            .map(S::from_c64)
            .collect();
        for _ in 0..2 {
            let av = self.apply_shifted(n, &v);
            let r: Vec<C64> = b.iter().zip(&av).map(|(&bi, &ai)| (bi - ai).to_c64()).collect();
            let dv = self.precondition(n, &r, S::IS_COMPLEX);
            for (vi, d) in v.iter_mut().zip(dv) {
                *vi = *vi + S::from_c64(d);
            }
        }
        v
    }

    /// `K(x,y)` with an absolute tail tolerance `tol`.
    pub fn eval<S: Scalar>(&self, x: &[S], y: &[S], tol: f64) -> KernelValue<S> {
        let n = self.system.dim();
        assert_eq!(x.len(), n, "first argument has the wrong dimension");
        assert_eq!(y.len(), n, "second argument has the wrong dimension");
        let diag: Vec<S> = self
            .system
            .elements()
            .iter()
            .map(|g| {
                let mut d = S::zero();
                for i in 0..n {
                    let mut gx = S::zero();
                    for j in 0..n {
                        let c = g[i * n + j];
                        if c != 0.0 {
                            gx = gx + x[j].scale(<S::Real as Real>::lift(c));
                        }
                    }
                    d = d + gx * y[i];
                }
                d
            })
            .collect();
        let t = crate::scalar::point_norm(x) * crate::scalar::point_norm(y);
        let mut v = vec![S::one(); diag.len()];
        let mut sum = S::one();
        let mut degree = 0;
        let mut tail = tail_bound(t, 0);
        while tail > tol && degree < MAX_ORBIT_DEGREE {
            degree += 1;
            let b: Vec<S> = v.iter().zip(&diag).map(|(&vi, &di)| vi * di).collect();
            v = self.solve(degree, &b);
            sum = sum + v[0];
            tail = tail_bound(t, degree);
        }
        KernelValue {
            value: sum,
            tail,
            degree,
            converged: tail <= tol,
        }
    }
}

impl Kernel for OrbitKernel {
    fn system(&self) -> &RootSystem {
        &self.system
    }

    fn eval_dd(&self, x: &[DD], y: &[DD], tol: f64) -> KernelValue<DD> {
        self.eval(x, y, tol)
    }

    fn eval_cdd(&self, x: &[CDD], y: &[CDD], tol: f64) -> KernelValue<CDD> {
        self.eval(x, y, tol)
    }

    fn eval_f64(&self, x: &[f64], y: &[f64], tol: f64) -> KernelValue<f64> {
        self.eval(x, y, tol)
    }
}
