//! Generalized Hermite systems.
//!
//! Gram–Schmidt under `[·,·]_k` over `Q` gives pairwise orthogonal `φ̃_ν`
//! with rational squared norms `m_ν`. The orthonormal basis is
//! `φ_ν = φ̃_ν/√m_ν` and `H_ν = 2^{|ν|} e^{-Δ_k/4} φ_ν`. All exact identities
//! are stated for the rational pair `(φ̃_ν, m_ν)`: every one of them is
//! linear in `φ_ν`, so a common factor `√m_ν` never affects zero-ness.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dunkl::OperatorContext;
use crate::error::{DunklError, Result};
use crate::poly::{Monomial, NumericPolynomial, Polynomial, PolynomialJson, MAX_DEGREE};
use crate::rational::{format_rational, int, rat, to_f64_pair};
use crate::scalar::{Real, Scalar, DD};

#[derive(Clone, Debug)]
pub struct BasisElement {
    /// Multi-index `ν`; `x^ν` is the leading monomial of `φ̃_ν`.
    pub index: Vec<u32>,
    /// `φ̃_ν`, monic in its graded-lex leading monomial.
    pub phi: Polynomial,
    /// `m_ν = [φ̃_ν, φ̃_ν]_k`.
    pub norm2: BigRational,
    /// `H̃_ν = 2^{|ν|} e^{-Δ_k/4} φ̃_ν`.
    pub hermite: Polynomial,
    phi_unit: NumericPolynomial,
    hermite_unit: NumericPolynomial,
}

impl BasisElement {
    pub fn degree(&self) -> usize {
        self.index.iter().map(|&e| e as usize).sum()
    }

    /// `φ_ν(x)`.
    pub fn phi_value<S: Scalar>(&self, x: &[S]) -> S {
        self.phi_unit.eval(x)
    }

    /// `H_ν(x)`.
    pub fn hermite_value<S: Scalar>(&self, x: &[S]) -> S {
        self.hermite_unit.eval(x)
    }
}

pub struct HermiteSystem {
    ctx: Arc<OperatorContext>,
    n_max: usize,
    degrees: Vec<Vec<BasisElement>>,
    lookup: HashMap<Vec<u32>, (usize, usize)>,
}

impl std::fmt::Debug for HermiteSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HermiteSystem")
            .field("ctx", &self.ctx)
            .field("n_max", &self.n_max)
            .finish()
    }
}

/// 1/√m in double-double, as a `(hi, lo)` pair.
fn inv_sqrt_pair(m: &BigRational) -> (f64, f64) {
    let (hi, lo) = to_f64_pair(&m.recip());
    let r = DD::from_parts(hi, lo).sqrt();
    (r.hi(), r.lo())
}

fn gram_schmidt(ctx: &OperatorContext, n: usize) -> Result<Vec<(Vec<u32>, Polynomial, BigRational)>> {
    let monos = Monomial::all_of_degree(ctx.dim(), n);
    let gram = ctx.monomial_gram(n);
    let d = monos.len();
    let apply = |c: &[BigRational]| -> Vec<BigRational> {
        (0..d)
            .map(|a| {
                c.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(b, v)| &gram[a][b] * v)
                    .sum()
            })
            .collect()
    };
    let mut basis: Vec<(Vec<BigRational>, Vec<BigRational>, BigRational)> = Vec::with_capacity(d);
    for j in 0..d {
        let mut c = vec![BigRational::zero(); d];
        c[j] = BigRational::one();
        for (cl, gcl, ml) in &basis {
            // <e_j, φ̃_l> = (G c_l)_j.
            let coef = &gcl[j] / ml;
            if coef.is_zero() {
                continue;
            }
            for (ci, v) in c.iter_mut().zip(cl) {
                *ci -= &coef * v;
            }
        }
        let gc = apply(&c);
        let m: BigRational = c.iter().zip(&gc).map(|(a, b)| a * b).sum();
        if !m.is_positive() {
            return Err(DunklError::GramNotPositive { degree: n });
        }
        basis.push((c, gc, m));
    }
    Ok(basis
        .into_iter()
        .zip(&monos)
        .map(|((c, _, m), mono)| {
            let terms = monos.iter().zip(c).map(|(mm, v)| (mm.exps().to_vec(), v));
            let phi = Polynomial::from_terms(ctx.dim(), terms).expect("degree within cap");
            (mono.exps().to_vec(), phi, m)
        })
        .collect())
}

impl HermiteSystem {
    pub fn build(ctx: Arc<OperatorContext>, n_max: usize) -> Result<Self> {
        if n_max > MAX_DEGREE {
            return Err(DunklError::DegreeCap {
                degree: n_max,
                cap: MAX_DEGREE,
            });
        }
        let quarter = rat(-1, 4);
        let degrees: Vec<Vec<BasisElement>> = (0..=n_max)
            .into_par_iter()
            .map(|n| -> Result<Vec<BasisElement>> {
                let two_n = num_traits::pow(int(2), n);
                gram_schmidt(&ctx, n)?
                    .into_iter()
                    .map(|(index, phi, norm2)| {
                        let hermite = ctx.exp_laplacian(&quarter, &phi)?.scale(&two_n);
                        let (hi, lo) = inv_sqrt_pair(&norm2);
                        Ok(BasisElement {
                            phi_unit: NumericPolynomial::scaled(&phi, hi, lo),
                            hermite_unit: NumericPolynomial::scaled(&hermite, hi, lo),
                            index,
                            phi,
                            norm2,
                            hermite,
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let mut lookup = HashMap::new();
        for (n, elems) in degrees.iter().enumerate() {
            for (j, e) in elems.iter().enumerate() {
                lookup.insert(e.index.clone(), (n, j));
            }
        }
        Ok(HermiteSystem {
            ctx,
            n_max,
            degrees,
            lookup,
        })
    }

    pub fn ctx(&self) -> &Arc<OperatorContext> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn degree(&self, n: usize) -> &[BasisElement] {
        self.degrees.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn elements(&self) -> impl Iterator<Item = &BasisElement> {
        self.degrees.iter().flatten()
    }

    pub fn element(&self, nu: &[u32]) -> Result<&BasisElement> {
        let &(n, j) = self
            .lookup
            .get(nu)
            .ok_or_else(|| DunklError::UnknownIndex(nu.to_vec()))?;
        Ok(&self.degrees[n][j])
    }

    /// `H̃_ν` (pair representation; `H_ν = H̃_ν/√m_ν`).
    pub fn hermite_poly(&self, nu: &[u32]) -> Result<&Polynomial> {
        Ok(&self.element(nu)?.hermite)
    }

    /// `h_ν(x) = e^{-|x|²/2} H_ν(x)`.
    pub fn hermite_function(&self, nu: &[u32], x: &[f64]) -> Result<f64> {
        let e = self.element(nu)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Ok((-r2 / 2.0).exp() * e.hermite_value(x))
    }

    /// `(-1)^{|ν|} φ̃_ν(T̃)(1)` with `T̃_i = T_i - 2x_i`: the polynomial factor
    /// of `e^{|x|²} φ̃_ν(T) e^{-|x|²}`.
    pub fn rodrigues_poly(&self, nu: &[u32]) -> Result<Polynomial> {
        let e = self.element(nu)?;
        let one = Polynomial::one(self.dim());
        let v = self.ctx.apply_poly_of_twisted(&e.phi, &one, &int(1))?;
        Ok(if e.degree() % 2 == 1 { -v } else { v })
    }

    /// Two residuals that must vanish:
    /// `(Δ_k - 2ρ)H̃_ν + 2|ν| H̃_ν`, and, with the Gaussian of `h_ν` stripped
    /// through the product rule,
    /// `Σ_i (T_i - x_i)² H̃_ν - |x|² H̃_ν + (2|ν| + 2γ + N) H̃_ν`.
    pub fn eigen_residuals(&self, nu: &[u32]) -> Result<[Polynomial; 2]> {
        let e = self.element(nu)?;
        let h = &e.hermite;
        let n = e.degree() as i64;
        let mut first = self.ctx.laplacian(h)?;
        first.add_scaled(&h.euler(), &int(-2));
        first.add_scaled(h, &int(2 * n));

        let half = rat(1, 2);
        let mut second = Polynomial::zero(self.dim());
        for i in 0..self.dim() {
            let once = self.ctx.gaussian_twisted_apply_scaled(i, h, &half)?;
            second += &self.ctx.gaussian_twisted_apply_scaled(i, &once, &half)?;
        }
        second -= &(&Polynomial::norm_squared(self.dim()) * h);
        let shift = int(2 * n) + int(2) * self.ctx.gamma() + int(self.dim() as i64);
        second.add_scaled(h, &shift);
        Ok([first, second])
    }

    /// `(λ/2)^{|ν|} H̃_ν(x/λ) - (e^{-λ²Δ_k/4} φ̃_ν)(x)`.
    pub fn scaling_identity_residual(&self, nu: &[u32], lambda: &BigRational) -> Result<Polynomial> {
        if lambda.is_zero() {
            return Err(DunklError::InvalidArgument("λ must be nonzero".into()));
        }
        let e = self.element(nu)?;
        let lhs = e
            .hermite
            .scale_argument(&lambda.recip())
            .scale(&num_traits::pow(lambda / int(2), e.degree()));
        let rhs = self.ctx.exp_laplacian(&(-(lambda * lambda) / int(4)), &e.phi)?;
        Ok(lhs - rhs)
    }

    /// Pairing Gram matrix `[φ̃_a, φ̃_b]_k / √(m_a m_b)` over all basis
    /// elements, returned in the pair representation as
    /// `[φ̃_a, φ̃_b]_k` together with the list of `m_a`.
    pub fn pair_gram(&self) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
        let elems: Vec<&BasisElement> = self.elements().collect();
        let phis: Vec<&Polynomial> = elems.iter().map(|e| &e.phi).collect();
        let cols: Vec<Vec<BigRational>> = elems
            .par_iter()
            .map(|q| self.ctx.pairings_against(&phis, &q.phi))
            .collect::<Result<_>>()?;
        let n = elems.len();
        let gram = (0..n).map(|a| (0..n).map(|b| cols[b][a].clone()).collect()).collect();
        Ok((gram, elems.iter().map(|e| e.norm2.clone()).collect()))
    }

    /// True when the pair Gram matrix is `diag(m_ν)`, i.e. `{φ_ν}` is
    /// orthonormal.
    pub fn is_orthonormal(&self) -> Result<bool> {
        let (gram, norms) = self.pair_gram()?;
        Ok(gram.iter().enumerate().all(|(a, row)| {
            row.iter()
                .enumerate()
                .all(|(b, v)| if a == b { *v == norms[a] } else { v.is_zero() })
        }))
    }

    pub fn to_table(&self) -> Vec<BasisRecord> {
        self.elements()
            .map(|e| BasisRecord {
                nu: e.index.clone(),
                norm2: format_rational(&e.norm2),
                coeffs: e.phi.to_json(),
                hermite: e.hermite.to_json(),
            })
            .collect()
    }
}

/// Table row: `φ_ν = coeffs/√norm2`, `H_ν = hermite/√norm2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub nu: Vec<u32>,
    pub norm2: String,
    pub coeffs: PolynomialJson,
    pub hermite: PolynomialJson,
}

/// `(Δ_k - 2ρ)(e^{-Δ_k/4} p) + 2n e^{-Δ_k/4} p` for homogeneous `p` of
/// degree `n`; zero whenever `e^{-Δ_k/4}` maps `P_n` onto the eigenspace.
pub fn eigenspace_residual(ctx: &OperatorContext, p: &Polynomial) -> Result<Polynomial> {
    if !p.is_homogeneous() {
        return Err(DunklError::InvalidArgument("input must be homogeneous".into()));
    }
    let q = ctx.exp_laplacian(&rat(-1, 4), p)?;
    let mut r = ctx.laplacian(&q)?;
    r.add_scaled(&q.euler(), &int(-2));
    r.add_scaled(&q, &int(2 * p.degree() as i64));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::SystemSpec;
    use crate::poly::random_polynomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn system(spec: SystemSpec, n_max: usize) -> HermiteSystem {
        let ctx = Arc::new(OperatorContext::new(Arc::new(spec.build().unwrap())).unwrap());
        HermiteSystem::build(ctx, n_max).unwrap()
    }

    /// Physicists' Hermite polynomials by the three-term recurrence.
    fn classical_hermite(n: usize) -> Polynomial {
        let x = Polynomial::var(1, 0);
        let mut prev = Polynomial::one(1);
        if n == 0 {
            return prev;
        }
        let mut cur = x.scale(&int(2));
        for k in 1..n {
            let next = (&x * &cur).scale(&int(2)) - prev.scale(&int(2 * k as i64));
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Laguerre `L_k^a(t)` from its explicit sum, as a polynomial in `x` with `t = x²`.
    fn laguerre_in_x_squared(k: usize, a: &BigRational) -> Polynomial {
        let mut p = Polynomial::zero(1);
        for j in 0..=k {
            let mut binom = BigRational::one();
            for i in 1..=(k - j) {
                binom = binom * (a + int((j + i) as i64)) / int(i as i64);
            }
            let fact: BigRational = (1..=j).map(|i| int(i as i64)).product();
            let sign = if j % 2 == 0 { int(1) } else { int(-1) };
            p.add_term(Monomial::new(vec![2 * j as u32]), sign * binom / fact);
        }
        p
    }

    fn proportional(p: &Polynomial, q: &Polynomial) -> bool {
        let (m, c) = q.leading().unwrap();
        let ratio = p.coeff(m.exps()) / c;
        *p == q.scale(&ratio) && !ratio.is_zero()
    }

    #[test]
    fn classical_reduction() {
        let hs = system(SystemSpec::z2(&[int(0), int(0)]).unwrap(), 5);
        for e in hs.elements() {
            assert_eq!(e.phi, Polynomial::monomial(&e.index));
            assert_eq!(e.norm2, BigRational::from_integer(Monomial::new(e.index.clone()).factorial()));
            let expect = &classical_hermite(e.index[0] as usize).embed(2, 0)
                * &classical_hermite(e.index[1] as usize).embed(2, 1);
            assert_eq!(e.hermite, expect);
        }
        assert_eq!(hs.degree(0).len(), 1);
        assert_eq!(hs.degree(0)[0].phi, Polynomial::one(2));
    }

    #[test]
    fn rank_one_examples() {
        let mu = int(1);
        let hs = system(SystemSpec::z2(&[mu.clone()]).unwrap(), 6);
        let two = hs.element(&[2]).unwrap();
        assert_eq!(two.phi, Polynomial::monomial(&[2]));
        assert_eq!(two.norm2, int(2) + int(4) * &mu);
        let expect = Polynomial::monomial(&[2]).scale(&int(4)) - Polynomial::constant(1, int(2) * (int(1) + int(2) * &mu));
        assert_eq!(two.hermite, expect);
        let h = hs.hermite_function(&[2], &[1.0]).unwrap();
        assert!((h - (-0.5f64).exp() * (4.0 - 6.0) / 6f64.sqrt()).abs() < 1e-15);
        assert_eq!(hs.hermite_function(&[0], &[0.0]).unwrap(), 1.0);
        assert!(matches!(hs.element(&[7]), Err(DunklError::UnknownIndex(_))));
    }

    #[test]
    fn rank_one_matches_laguerre() {
        let mu = rat(3, 2);
        let hs = system(SystemSpec::z2(&[mu.clone()]).unwrap(), 7);
        for k in 0..=3usize {
            let even = laguerre_in_x_squared(k, &(&mu - rat(1, 2)));
            assert!(proportional(hs.hermite_poly(&[2 * k as u32]).unwrap(), &even));
            let odd = &Polynomial::var(1, 0) * &laguerre_in_x_squared(k, &(&mu + rat(1, 2)));
            assert!(proportional(hs.hermite_poly(&[2 * k as u32 + 1]).unwrap(), &odd));
        }
    }

    fn catalogue() -> Vec<HermiteSystem> {
        vec![
            system(SystemSpec::z2(&[rat(5, 2)]).unwrap(), 6),
            system(SystemSpec::z2(&[int(1), int(2)]).unwrap(), 5),
            system(SystemSpec::symmetric(3, int(1)).unwrap(), 4),
            system(SystemSpec::hyperoctahedral(2, int(1), int(1)).unwrap(), 5),
        ]
    }

    #[test]
    fn exact_identities() {
        for hs in catalogue() {
            assert!(hs.is_orthonormal().unwrap());
            for e in hs.elements() {
                assert_eq!(hs.rodrigues_poly(&e.index).unwrap(), e.hermite);
                for r in hs.eigen_residuals(&e.index).unwrap() {
                    assert!(r.is_zero(), "{:?}: {r}", e.index);
                }
                for l in [int(1), int(2), int(-1), rat(2, 3)] {
                    assert!(hs.scaling_identity_residual(&e.index, &l).unwrap().is_zero());
                }
                let (m, c) = e.phi.leading().unwrap();
                assert_eq!(m.exps(), &e.index[..]);
                assert!(c.is_one());
                let parity = if e.degree() % 2 == 0 { int(1) } else { int(-1) };
                assert_eq!(e.hermite.scale_argument(&int(-1)), e.hermite.scale(&parity));
            }
        }
    }

    #[test]
    fn eigenspace_of_random_homogeneous_inputs() {
        let hs = catalogue();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for h in &hs {
            for _ in 0..4 {
                let p = random_polynomial(&mut rng, h.dim(), 5, 6);
                for (_, part) in p.homogeneous_components() {
                    assert!(eigenspace_residual(h.ctx(), &part).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn numeric_values_agree_with_exact() {
        let hs = system(SystemSpec::hyperoctahedral(2, rat(1, 2), int(1)).unwrap(), 4);
        let x = [rat(3, 4), rat(-5, 3)];
        let xf = [0.75, -5.0 / 3.0];
        for e in hs.elements() {
            let exact = crate::rational::to_f64(&e.hermite.evaluate(&x).unwrap());
            let scale = crate::rational::to_f64(&e.norm2).sqrt();
            let v: f64 = e.hermite_value(&xf);
            assert!((v * scale - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn table_round_trips_through_json() {
        let hs = system(SystemSpec::z2(&[int(1)]).unwrap(), 4);
        let table = hs.to_table();
        assert_eq!(table.len(), 5);
        let s = serde_json::to_string(&table).unwrap();
        let back: Vec<BasisRecord> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, table);
        assert_eq!(table[2].norm2, "6");
    }
}
