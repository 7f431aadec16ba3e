//! Exact Dunkl operator algebra on rational polynomials.
//!
//! `T_i f = ∂_i f + Σ_{α∈R+} k(α) α_i (f - f∘σ_α)/<α,x>`. The root scale
//! cancels between `α_i` and `<α,x>`, so only the rational direction `β` of
//! each root enters and every operator maps `Q[x]` to itself.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{DunklError, Result};
use crate::groups::{Family, RootSystem};
use crate::matrix::{is_positive_definite, RatMatrix};
use crate::poly::{Monomial, Polynomial};
use crate::rational::{int, rat};

/// Deliberate sign flip of the reflection-difference term, used to show the
/// identity checks are not vacuous.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMutation {
    #[default]
    None,
    /// Flip the difference term in every `T_i`. This is the same operator
    /// family as `k -> -k`, so it still commutes.
    AllCoordinates,
    /// Flip it only in `T_1`.
    FirstCoordinate,
}

#[derive(Clone, Debug)]
struct OperatorRoot {
    direction: Vec<BigRational>,
    half_norm2: BigRational,
    reflection: RatMatrix,
    multiplicity: BigRational,
}

pub struct OperatorContext {
    system: Arc<RootSystem>,
    roots: Vec<OperatorRoot>,
    gamma: BigRational,
    mutation: SignMutation,
    cache: RwLock<HashMap<(usize, Monomial), Polynomial>>,
}

impl std::fmt::Debug for OperatorContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorContext")
            .field("system", &self.system.label())
            .field("mutation", &self.mutation)
            .finish()
    }
}

impl OperatorContext {
    pub fn new(system: Arc<RootSystem>) -> Result<Self> {
        Self::with_mutation(system, SignMutation::None)
    }

    pub fn with_mutation(system: Arc<RootSystem>, mutation: SignMutation) -> Result<Self> {
        let mut roots = Vec::new();
        for r in system.positive_roots() {
            let direction = r.direction.clone().ok_or(DunklError::InexactRoots)?;
            if r.multiplicity.is_zero() {
                continue;
            }
            let norm2: BigRational = direction.iter().map(|v| v * v).sum();
            roots.push(OperatorRoot {
                reflection: RatMatrix::reflection(&direction),
                half_norm2: norm2 / int(2),
                direction,
                multiplicity: r.multiplicity.clone(),
            });
        }
        Ok(OperatorContext {
            gamma: system.gamma().clone(),
            system,
            roots,
            mutation,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    pub fn mutation(&self) -> SignMutation {
        self.mutation
    }

    fn check(&self, p: &Polynomial) -> Result<()> {
        if p.nvars() != self.dim() {
            return Err(DunklError::DimensionMismatch {
                expected: self.dim(),
                got: p.nvars(),
            });
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            return Err(DunklError::IndexOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    fn difference_sign(&self, i: usize) -> bool {
        match self.mutation {
            SignMutation::None => false,
            SignMutation::AllCoordinates => true,
            SignMutation::FirstCoordinate => i == 0,
        }
    }

    /// `(f - f∘σ_α)/<β,x>`, exact.
    fn difference_quotient(&self, root: &OperatorRoot, p: &Polynomial) -> Polynomial {
        let reflected = p.compose_linear(&root.reflection).expect("dimension checked");
        (p - &reflected)
            .divide_by_linear_form(&root.direction)
            .expect("f - f∘σ vanishes on the mirror")
    }

    fn apply_monomial(&self, i: usize, m: &Monomial) -> Polynomial {
        if let Some(hit) = self.cache.read().unwrap().get(&(i, m.clone())) {
            return hit.clone();
        }
        let x = Polynomial::term(self.dim(), m.clone(), BigRational::one());
        let mut out = x.partial(i);
        let flip = self.difference_sign(i);
        for r in &self.roots {
            let bi = &r.direction[i];
            if bi.is_zero() {
                continue;
            }
            let mut c = &r.multiplicity * bi;
            if flip {
                c = -c;
            }
            out.add_scaled(&self.difference_quotient(r, &x), &c);
        }
        self.cache
            .write()
            .unwrap()
            .insert((i, m.clone()), out.clone());
        out
    }

    /// `T_i p` (0-based coordinate index).
    pub fn dunkl_apply(&self, i: usize, p: &Polynomial) -> Result<Polynomial> {
        self.check_index(i)?;
        self.check(p)?;
        let mut out = Polynomial::zero(self.dim());
        for (m, c) in p.terms() {
            out.add_scaled(&self.apply_monomial(i, m), c);
        }
        Ok(out)
    }

    /// `Δ_k p = Σ T_i² p`.
    pub fn laplacian(&self, p: &Polynomial) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.dim());
        for i in 0..self.dim() {
            out += &self.dunkl_apply(i, &self.dunkl_apply(i, p)?)?;
        }
        Ok(out)
    }

    /// `Δ p + 2 Σ k(α) δ_α p` with
    /// `δ_α p = (<∇p,β> - (|β|²/2)(p - p∘σ_α)/<β,x>)/<β,x>`.
    pub fn laplacian_explicit(&self, p: &Polynomial) -> Result<Polynomial> {
        self.check(p)?;
        let n = self.dim();
        let grad: Vec<Polynomial> = (0..n).map(|i| p.partial(i)).collect();
        let mut out = Polynomial::zero(n);
        for (i, g) in grad.iter().enumerate() {
            out += &g.partial(i);
        }
        for r in &self.roots {
            let mut directional = Polynomial::zero(n);
            for (g, b) in grad.iter().zip(&r.direction) {
                directional.add_scaled(g, b);
            }
            let q = self.difference_quotient(r, p);
            directional.add_scaled(&q, &-r.half_norm2.clone());
            let delta = directional
                .divide_by_linear_form(&r.direction)
                .expect("second difference is divisible");
            out.add_scaled(&delta, &(int(2) * &r.multiplicity));
        }
        Ok(out)
    }

    /// `e^{cΔ_k} p = Σ_j c^j Δ_k^j p / j!`, a finite sum.
    pub fn exp_laplacian(&self, c: &BigRational, p: &Polynomial) -> Result<Polynomial> {
        self.check(p)?;
        let mut out = p.clone();
        let mut term = p.clone();
        let mut j = 0i64;
        loop {
            j += 1;
            term = self.laplacian(&term)?.scale(&(c / int(j)));
            if term.is_zero() {
                return Ok(out);
            }
            out += &term;
        }
    }

    /// `p(T) q = Σ_ν a_ν T^ν q`.
    pub fn apply_poly_of_t(&self, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
        self.check(p)?;
        self.check(q)?;
        self.poly_of_operators(p, q, |i, f| self.dunkl_apply(i, f))
    }

    /// `p(T̃) q` with the Gaussian-twisted operators `T̃_i = T_i - 2λ x_i`.
    pub fn apply_poly_of_twisted(
        &self,
        p: &Polynomial,
        q: &Polynomial,
        lambda: &BigRational,
    ) -> Result<Polynomial> {
        self.check(p)?;
        self.check(q)?;
        self.poly_of_operators(p, q, |i, f| self.gaussian_twisted_apply_scaled(i, f, lambda))
    }

    /// Shared `p(A) q` for a family of operators `A_i`. `A^ν q` is built as
    /// `A_1^{ν_1}(A_2^{ν_2}(... q))` and memoized over sub-multi-indices.
    fn poly_of_operators<F>(&self, p: &Polynomial, q: &Polynomial, op: F) -> Result<Polynomial>
    where
        F: Fn(usize, &Polynomial) -> Result<Polynomial>,
    {
        let mut memo: HashMap<Vec<u32>, Polynomial> = HashMap::new();
        memo.insert(vec![0; self.dim()], q.clone());
        let mut out = Polynomial::zero(self.dim());
        for (m, c) in p.terms().rev() {
            let v = operator_power(&mut memo, m.exps(), &op)?;
            out.add_scaled(&v, c);
        }
        Ok(out)
    }

    /// `[p, q]_k = (p(T) q)(0)`.
    pub fn pairing(&self, p: &Polynomial, q: &Polynomial) -> Result<BigRational> {
        Ok(self.apply_poly_of_t(p, q)?.constant_term())
    }

    /// `[p, q]_k` for every `p` in `ps`, sharing the `T^ν q` table.
    pub fn pairings_against(&self, ps: &[&Polynomial], q: &Polynomial) -> Result<Vec<BigRational>> {
        self.check(q)?;
        let mut memo: HashMap<Vec<u32>, Polynomial> = HashMap::new();
        memo.insert(vec![0; self.dim()], q.clone());
        let op = |i: usize, f: &Polynomial| self.dunkl_apply(i, f);
        ps.iter()
            .map(|p| {
                self.check(p)?;
                let mut acc = BigRational::zero();
                for (m, c) in p.terms() {
                    if m.degree() > q.degree() {
                        continue;
                    }
                    acc += c * operator_power(&mut memo, m.exps(), &op)?.constant_term();
                }
                Ok(acc)
            })
            .collect()
    }

    /// Matrix `[x^a, x^b]_k` over the degree-`n` monomials in graded-lex
    /// order.
    pub fn monomial_gram(&self, n: usize) -> Vec<Vec<BigRational>> {
        let monos = Monomial::all_of_degree(self.dim(), n);
        let cols: Vec<Vec<BigRational>> = monos
            .iter()
            .map(|b| {
                let mut memo = HashMap::new();
                memo.insert(
                    vec![0; self.dim()],
                    Polynomial::term(self.dim(), b.clone(), BigRational::one()),
                );
                monos
                    .iter()
                    .map(|a| {
                        operator_power(&mut memo, a.exps(), &|i, f: &Polynomial| self.dunkl_apply(i, f))
                            .expect("indices in range")
                            .constant_term()
                    })
                    .collect()
            })
            .collect();
        (0..monos.len())
            .map(|a| (0..monos.len()).map(|b| cols[b][a].clone()).collect())
            .collect()
    }

    /// Verifies the degree-`n` pairing Gram matrix is positive definite.
    pub fn check_gram_positive(&self, n: usize) -> Result<()> {
        if is_positive_definite(&self.monomial_gram(n)) {
            Ok(())
        } else {
            Err(DunklError::GramNotPositive { degree: n })
        }
    }

    /// Euler operator `ρ = Σ x_i ∂_i`.
    pub fn euler(&self, p: &Polynomial) -> Polynomial {
        p.euler()
    }

    fn sl2_e(&self, p: &Polynomial) -> Polynomial {
        (&Polynomial::norm_squared(self.dim()) * p).scale(&rat(1, 2))
    }

    fn sl2_f(&self, p: &Polynomial) -> Result<Polynomial> {
        Ok(self.laplacian(p)?.scale(&rat(-1, 2)))
    }

    fn sl2_h(&self, p: &Polynomial) -> Polynomial {
        let shift = &self.gamma + rat(self.dim() as i64, 2);
        p.euler() + p.scale(&shift)
    }

    /// Residuals `([H,E]-2E)p`, `([H,F]+2F)p`, `([E,F]-H)p` for
    /// `E = |x|²/2`, `F = -Δ_k/2`, `H = ρ + γ + N/2`.
    pub fn sl2_commutators(&self, p: &Polynomial) -> Result<[Polynomial; 3]> {
        self.check(p)?;
        let e = |q: &Polynomial| self.sl2_e(q);
        let f = |q: &Polynomial| self.sl2_f(q);
        let h = |q: &Polynomial| self.sl2_h(q);
        let two = int(2);
        let he = h(&e(p)) - e(&h(p)) - e(p).scale(&two);
        let hf = h(&f(p)?) - f(&h(p))? + f(p)?.scale(&two);
        let ef = e(&f(p)?) - f(&e(p))? - h(p);
        Ok([he, hf, ef])
    }

    /// Residual of `(e^{cΔ_k} p)(a x) = a^n (e^{c a^{-2} Δ_k} p)(x)` divided
    /// by `a^n`, summed over the homogeneous parts of `p`. Only `a²` enters,
    /// so it may be any positive rational (e.g. `a = √2`).
    pub fn scaling_residual(
        &self,
        c: &BigRational,
        a_sq: &BigRational,
        p: &Polynomial,
    ) -> Result<Polynomial> {
        self.check(p)?;
        if a_sq.is_zero() {
            return Err(DunklError::InvalidArgument("scale must be nonzero".into()));
        }
        let mut total = Polynomial::zero(self.dim());
        for (n, part) in p.homogeneous_components() {
            let lhs = self.exp_laplacian(c, &part)?;
            let mut scaled = Polynomial::zero(self.dim());
            for (d, piece) in lhs.homogeneous_components() {
                let j = ((n - d) / 2) as i32;
                scaled += &piece.scale(&crate::rational::pow(a_sq, -j));
            }
            let rhs = self.exp_laplacian(&(c / a_sq), &part)?;
            total += &(scaled - rhs);
        }
        Ok(total)
    }

    /// Cherednik operator `ξ_i = (1/k) x_i T_i + 1 - N + Σ_{j>i} s_ij` for the
    /// symmetric group (`1/k` is the Jack parameter).
    pub fn cherednik_apply(&self, i: usize, p: &Polynomial) -> Result<Polynomial> {
        if self.system.family() != Family::A {
            return Err(DunklError::WrongFamily { expected: "A (symmetric group)" });
        }
        let k = &self.system.spec().multiplicity.0[0];
        if k.is_zero() {
            return Err(DunklError::InvalidArgument(
                "Cherednik operators need a positive multiplicity".into(),
            ));
        }
        self.check_index(i)?;
        let n = self.dim();
        let mut out = self.dunkl_apply(i, p)?.mul_var(i).scale(&k.recip());
        out.add_scaled(p, &int(1 - n as i64));
        for j in i + 1..n {
            out += &swap_variables(p, i, j);
        }
        Ok(out)
    }

    /// `T̃_i p = T_i p - 2 x_i p`, so that `φ(T) e^{-|x|²} = (φ(T̃) 1) e^{-|x|²}`.
    pub fn gaussian_twisted_apply(&self, i: usize, p: &Polynomial) -> Result<Polynomial> {
        self.gaussian_twisted_apply_scaled(i, p, &int(1))
    }

    /// `T_i p - 2λ x_i p`: the twist by `e^{-λ|x|²}`.
    pub fn gaussian_twisted_apply_scaled(
        &self,
        i: usize,
        p: &Polynomial,
        lambda: &BigRational,
    ) -> Result<Polynomial> {
        let mut out = self.dunkl_apply(i, p)?;
        out.add_scaled(&p.mul_var(i), &(int(-2) * lambda));
        Ok(out)
    }
}

fn operator_power<F>(
    memo: &mut HashMap<Vec<u32>, Polynomial>,
    exps: &[u32],
    op: &F,
) -> Result<Polynomial>
where
    F: Fn(usize, &Polynomial) -> Result<Polynomial>,
{
    if let Some(v) = memo.get(exps) {
        return Ok(v.clone());
    }
    let i = exps.iter().position(|&e| e > 0).expect("zero index is seeded");
    let mut lower = exps.to_vec();
    lower[i] -= 1;
    let inner = operator_power(memo, &lower, op)?;
    let v = op(i, &inner)?;
    memo.insert(exps.to_vec(), v.clone());
    Ok(v)
}

/// `p` with variables `i` and `j` exchanged.
pub fn swap_variables(p: &Polynomial, i: usize, j: usize) -> Polynomial {
    let terms = p.terms().map(|(m, c)| {
        let mut e = m.exps().to_vec();
        e.swap(i, j);
        (e, c.clone())
    });
    Polynomial::from_terms(p.nvars(), terms).expect("same shape")
}
