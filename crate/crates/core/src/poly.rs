//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors in graded
//! lexicographic order, so iteration order (and therefore every printed or
//! serialized form) is canonical. Zero coefficients are never stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::matrix::RatMatrix;
use crate::rational::{format_rational, parse_rational};
use crate::scalar::Ring;

/// Largest total degree accepted at construction boundaries.
pub const MAX_DEGREE: usize = 64;

/// Exponent vector `ν` of the monomial `x^ν`, ordered graded-lex.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `ν!` as an exact integer.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .map(|&e| (1..=e as u64).map(BigInt::from).product::<BigInt>())
            .product()
    }

    /// All exponent vectors of total degree `d` in `nvars` variables,
    /// ascending in graded-lex order.
    pub fn all_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
        fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if cur.len() + 1 == nvars {
                cur.push(left);
                out.push(Monomial(cur.clone()));
                cur.pop();
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(nvars, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            return out;
        }
        rec(nvars, d as u32, &mut Vec::with_capacity(nvars), &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::term(nvars, Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(nvars, Monomial::var(nvars, i), BigRational::one())
    }

    pub fn term(nvars: usize, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.0.len(), nvars, "monomial arity");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn monomial(exps: &[u32]) -> Self {
        Self::term(exps.len(), Monomial(exps.to_vec()), BigRational::one())
    }

    /// Builds from `(exponents, coefficient)` pairs, combining duplicates.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(DunklError::DimensionMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            let m = Monomial(e);
            if m.degree() > MAX_DEGREE {
                return Err(DunklError::DegreeCap {
                    degree: m.degree(),
                    cap: MAX_DEGREE,
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// `|x|^2 = x_1^2 + ... + x_N^2`.
    pub fn norm_squared(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.add_term(Monomial(e), BigRational::one());
        }
        p
    }

    /// Linear form `<b, x>`.
    pub fn linear(b: &[BigRational]) -> Self {
        let n = b.len();
        let mut p = Self::zero(n);
        for (i, c) in b.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    /// Coefficient of the graded-lex largest monomial.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: &BigRational) {
        self.check_same(other);
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn mul_var(&self, i: usize) -> Polynomial {
        self.mul_monomial(&Monomial::var(self.nvars, i))
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `∂p/∂x_i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.terms
                .insert(Monomial(exps), c * BigRational::from_integer(e.into()));
        }
        out
    }

    /// Euler operator `ρ = Σ x_i ∂_i`: scales each term by its degree.
    pub fn euler(&self) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let d = m.degree();
            if d > 0 {
                out.terms
                    .insert(m.clone(), c * BigRational::from_integer(d.into()));
            }
        }
        out
    }

    /// `p(c x)`: multiplies each degree-`d` term by `c^d`.
    pub fn scale_argument(&self, c: &BigRational) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * num_traits::pow(c.clone(), m.degree()));
        }
        out
    }

    pub fn homogeneous_part(&self, d: usize) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Nonzero homogeneous parts, ascending degree. They sum to `self`.
    pub fn homogeneous_components(&self) -> Vec<(usize, Polynomial)> {
        let mut out: Vec<(usize, Polynomial)> = Vec::new();
        for (m, c) in &self.terms {
            let d = m.degree();
            match out.last_mut() {
                Some((deg, p)) if *deg == d => {
                    p.terms.insert(m.clone(), c.clone());
                }
                _ => {
                    let mut p = Self::zero(self.nvars);
                    p.terms.insert(m.clone(), c.clone());
                    out.push((d, p));
                }
            }
        }
        out
    }

    /// Evaluates at a point of any [`Ring`] (rationals, floats, complex).
    pub fn evaluate<S: Ring>(&self, x: &[S]) -> Result<S> {
        if x.len() != self.nvars {
            return Err(DunklError::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        let powers = power_table(x, self);
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[i][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Re-indexes `p` into `total` variables, placing its variables at
    /// positions `offset..offset + nvars`.
    pub fn embed(&self, total: usize, offset: usize) -> Polynomial {
        assert!(offset + self.nvars <= total, "embedding out of range");
        let mut out = Self::zero(total);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; total];
            e[offset..offset + self.nvars].copy_from_slice(&m.0);
            out.terms.insert(Monomial(e), c.clone());
        }
        out
    }

    /// `p(Mx)` for a rational matrix `M`.
    pub fn compose_linear(&self, m: &RatMatrix) -> Result<Polynomial> {
        if m.dim() != self.nvars {
            return Err(DunklError::DimensionMismatch {
                expected: self.nvars,
                got: m.dim(),
            });
        }
        let n = self.nvars;
        if let Some((perm, neg)) = m.as_signed_permutation() {
            let mut out = Self::zero(n);
            for (mono, c) in &self.terms {
                let mut exps = vec![0u32; n];
                let mut flip = false;
                for i in 0..n {
                    let e = mono.0[i];
                    exps[perm[i]] += e;
                    if neg[i] && e % 2 == 1 {
                        flip = !flip;
                    }
                }
                out.add_term(Monomial(exps), if flip { -c.clone() } else { c.clone() });
            }
            return Ok(out);
        }
        // (Mx)_i as linear forms, powers memoized per row.
        let rows: Vec<Polynomial> = (0..n)
            .map(|i| {
                let row: Vec<BigRational> = (0..n).map(|j| m.get(i, j).clone()).collect();
                Polynomial::linear(&row)
            })
            .collect();
        let mut cache: Vec<Vec<Polynomial>> = rows.iter().map(|r| vec![Self::one(n), r.clone()]).collect();
        let mut out = Self::zero(n);
        for (mono, c) in &self.terms {
            let mut t = Self::constant(n, c.clone());
            for i in 0..n {
                let e = mono.0[i] as usize;
                while cache[i].len() <= e {
                    let next = &cache[i][cache[i].len() - 1] * &rows[i];
                    cache[i].push(next);
                }
                if e > 0 {
                    t = &t * &cache[i][e];
                }
            }
            out += &t;
        }
        Ok(out)
    }

    /// `g(p)(x) = p(g^{-1} x)` for an orthogonal `g` (so `g^{-1} = g^T`).
    pub fn compose_orthogonal(&self, g: &RatMatrix) -> Result<Polynomial> {
        self.compose_linear(&g.transpose())
    }

    /// Exact quotient `q` with `q · <b, x> = p`; errors on a nonzero
    /// remainder.
    pub fn divide_by_linear_form(&self, b: &[BigRational]) -> Result<Polynomial> {
        if b.len() != self.nvars {
            return Err(DunklError::DimensionMismatch {
                expected: self.nvars,
                got: b.len(),
            });
        }
        let n = self.nvars;
        let pivot = b
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| DunklError::InvalidArgument("zero linear form".into()))?;
        let inv = b[pivot].recip();
        // Keyed by (x_pivot exponent, monomial) so the largest pivot power
        // is always popped first; each step only creates lower pivot powers.
        let mut rem: BTreeMap<(u32, Monomial), BigRational> = self
            .terms
            .iter()
            .map(|(m, c)| ((m.0[pivot], m.clone()), c.clone()))
            .collect();
        let mut quotient = Self::zero(n);
        while let Some(((e, m), c)) = rem.pop_last() {
            if e == 0 {
                return Err(DunklError::NotDivisible);
            }
            let qc = &c * &inv;
            let mut qe = m.0.clone();
            qe[pivot] -= 1;
            for (i, bi) in b.iter().enumerate() {
                if i == pivot || bi.is_zero() {
                    continue;
                }
                let mut te = qe.clone();
                te[i] += 1;
                let key = (te[pivot], Monomial(te));
                let entry = rem.entry(key.clone()).or_insert_with(BigRational::zero);
                *entry -= &qc * bi;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            quotient.add_term(Monomial(qe), qc);
        }
        Ok(quotient)
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            num_vars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.0.clone(), format_rational(c)))
                .collect(),
        }
    }

    pub fn from_json(j: &PolynomialJson) -> Result<Polynomial> {
        let terms = j
            .terms
            .iter()
            .map(|(e, c)| parse_rational(c).map(|q| (e.clone(), q)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(j.num_vars, terms)
    }

    fn check_same(&self, other: &Polynomial) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different variable counts");
    }
}

fn power_table<S: Ring>(x: &[S], p: &Polynomial) -> Vec<Vec<S>> {
    let n = x.len();
    let mut maxe = vec![0u32; n];
    for m in p.terms.keys() {
        for i in 0..n {
            maxe[i] = maxe[i].max(m.0[i]);
        }
    }
    (0..n)
        .map(|i| {
            let mut row = Vec::with_capacity(maxe[i] as usize + 1);
            row.push(S::one());
            for k in 1..=maxe[i] as usize {
                let next = row[k - 1].clone() * x[i].clone();
                row.push(next);
            }
            row
        })
        .collect()
}

/// Wire form: `{"num_vars": N, "terms": [[[e1, ..., eN], "num/den"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub num_vars: usize,
    pub terms: Vec<(Vec<u32>, String)>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolynomialJson::deserialize(d)?;
        Polynomial::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        self.check_same(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        self.check_same(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += &rhs;
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        self -= &rhs;
        self
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_same(rhs);
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

/// Floating image of a [`Polynomial`] for fast repeated evaluation. Each
/// coefficient is kept as a `(hi, lo)` pair, so one table serves both `f64`
/// and double-double evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericPolynomial {
    nvars: usize,
    max_exp: Vec<u32>,
    terms: Vec<(Vec<u32>, f64, f64)>,
}

impl NumericPolynomial {
    pub fn new(p: &Polynomial) -> Self {
        Self::scaled(p, 1.0, 0.0)
    }

    /// `c · p` with `c = c_hi + c_lo` applied in double-double.
    pub fn scaled(p: &Polynomial, c_hi: f64, c_lo: f64) -> Self {
        use crate::scalar::{Real, DD};
        let c = DD::from_parts(c_hi, c_lo);
        let mut max_exp = vec![0u32; p.nvars];
        let terms = p
            .terms
            .iter()
            .map(|(m, q)| {
                for (a, &e) in max_exp.iter_mut().zip(&m.0) {
                    *a = (*a).max(e);
                }
                let (hi, lo) = crate::rational::to_f64_pair(q);
                let v = DD::from_parts(hi, lo) * c;
                (m.0.clone(), v.hi(), v.lo())
            })
            .collect();
        NumericPolynomial {
            nvars: p.nvars,
            max_exp,
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval<S: crate::scalar::Scalar>(&self, x: &[S]) -> S {
        use crate::scalar::Real;
        debug_assert_eq!(x.len(), self.nvars);
        let powers: Vec<Vec<S>> = x
            .iter()
            .zip(&self.max_exp)
            .map(|(&xi, &e)| {
                let mut row = Vec::with_capacity(e as usize + 1);
                row.push(S::one());
                for k in 1..=e as usize {
                    row.push(row[k - 1] * xi);
                }
                row
            })
            .collect();
        let mut acc = S::zero();
        for (exps, hi, lo) in &self.terms {
            let mut t = S::from_real(S::Real::from_parts(*hi, *lo));
            for (i, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = t * powers[i][e as usize];
                }
            }
            acc = acc + t;
        }
        acc
    }
}

/// Random polynomial with small integer-over-small-integer coefficients.
pub fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    nvars: usize,
    max_degree: usize,
    nterms: usize,
) -> Polynomial {
    let mut p = Polynomial::zero(nvars);
    for _ in 0..nterms {
        let d = rng.gen_range(0..=max_degree);
        let mut exps = vec![0u32; nvars];
        for _ in 0..d {
            exps[rng.gen_range(0..nvars)] += 1;
        }
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=4);
        p.add_term(
            Monomial(exps),
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        );
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::scalar::C64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p2(terms: &[(&[u32], i64)]) -> Polynomial {
        let n = terms[0].0.len();
        Polynomial::from_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), int(*c)))).unwrap()
    }

    #[test]
    fn evaluates_exact_float_and_complex() {
        let p = p2(&[(&[2, 0], 1), (&[0, 1], 1)]);
        assert_eq!(p.evaluate(&[int(2), int(3)]).unwrap(), int(7));
        assert_eq!(Polynomial::one(3).evaluate(&[1.5, -2.0, 9.0]).unwrap(), 1.0);
        let cube = Polynomial::monomial(&[3]);
        let v = cube.evaluate(&[C64::new(0.0, 1.0)]).unwrap();
        assert_eq!(v, C64::new(0.0, -1.0));
        assert!(p.evaluate(&[1.0]).is_err());
    }

    #[test]
    fn orthogonal_composition_examples() {
        let x1 = Polynomial::var(1, 0);
        let sigma = RatMatrix::reflection(&[int(1)]);
        assert_eq!(x1.compose_orthogonal(&sigma).unwrap(), -&x1);

        let swap = RatMatrix::reflection(&[int(1), int(-1)]);
        let p = Polynomial::monomial(&[1, 2]);
        assert_eq!(p.compose_orthogonal(&swap).unwrap(), Polynomial::monomial(&[2, 1]));

        let norm = Polynomial::norm_squared(2);
        let rot = RatMatrix::from_rows(vec![
            vec![rat(3, 5), rat(-4, 5)],
            vec![rat(4, 5), rat(3, 5)],
        ]);
        assert!(rot.as_signed_permutation().is_none());
        assert_eq!(norm.compose_orthogonal(&rot).unwrap(), norm);
    }

    #[test]
    fn division_examples() {
        let b = [int(1), int(-1)];
        let p = p2(&[(&[2, 0], 1), (&[0, 2], -1)]);
        assert_eq!(p.divide_by_linear_form(&b).unwrap(), p2(&[(&[1, 0], 1), (&[0, 1], 1)]));
        assert!(Polynomial::zero(2).divide_by_linear_form(&b).unwrap().is_zero());

        // Long-division oracle: (x1^3 + x1^2 x2 - x1 x2^2 - x2^3) = (x1 - x2)(x1 + x2)^2.
        let p = p2(&[(&[3, 0], 1), (&[2, 1], 1), (&[1, 2], -1), (&[0, 3], -1)]);
        let q = p.divide_by_linear_form(&b).unwrap();
        assert_eq!(q, p2(&[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));
        // Rescaled form <α,x> with α = (x1 - x2)/2 doubles the quotient.
        let q2 = p.divide_by_linear_form(&[rat(1, 2), rat(-1, 2)]).unwrap();
        assert_eq!(q2, q.scale(&int(2)));

        let not = p2(&[(&[1, 0], 1), (&[0, 0], 1)]);
        assert_eq!(not.divide_by_linear_form(&b), Err(DunklError::NotDivisible));
    }

    #[test]
    fn homogeneous_split() {
        let p = p2(&[(&[0, 0], 1), (&[1, 0], 1), (&[1, 1], 1)]);
        let parts = p.homogeneous_components();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], (0, Polynomial::one(2)));
        assert_eq!(parts[1], (1, Polynomial::var(2, 0)));
        assert_eq!(parts[2], (2, Polynomial::monomial(&[1, 1])));
        assert!(Polynomial::zero(2).homogeneous_components().is_empty());
    }

    #[test]
    fn graded_lex_enumeration() {
        let ms = Monomial::all_of_degree(2, 2);
        let e: Vec<Vec<u32>> = ms.iter().map(|m| m.exps().to_vec()).collect();
        assert_eq!(e, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(Monomial::all_of_degree(3, 4).len(), 15);
    }

    #[test]
    fn numeric_image_matches_exact_values() {
        let p = Polynomial::from_terms(2, vec![(vec![2, 1], rat(1, 3)), (vec![0, 0], int(-2))]).unwrap();
        let np = NumericPolynomial::new(&p);
        let exact = crate::rational::to_f64(&p.evaluate(&[rat(3, 2), rat(-1, 5)]).unwrap());
        assert!((np.eval(&[1.5, -0.2]) - exact).abs() < 1e-15);
        let dd: crate::scalar::DD = np.eval(&[crate::scalar::DD::from(1.5), crate::scalar::DD::from(-0.2)]);
        assert!((dd.hi() - exact).abs() < 1e-15);
        let half = NumericPolynomial::scaled(&p, 0.5, 0.0);
        assert!((half.eval(&[1.5, -0.2]) - exact / 2.0).abs() < 1e-15);
    }

    #[test]
    fn json_wire_format() {
        let p = Polynomial::from_terms(2, vec![(vec![1, 0], rat(-3, 4)), (vec![0, 0], int(2))]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"num_vars":2,"terms":[[[0,0],"2"],[[1,0],"-3/4"]]}"#);
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_degree_above_cap() {
        let e = Polynomial::from_terms(1, vec![(vec![65], int(1))]);
        assert!(matches!(e, Err(DunklError::DegreeCap { .. })));
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = Polynomial> {
        any::<u64>().prop_map(move |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_polynomial(&mut rng, nvars, 5, 6)
        })
    }

    fn arb_point(nvars: usize) -> impl Strategy<Value = Vec<BigRational>> {
        prop::collection::vec((-20i64..20, 1i64..7), nvars)
            .prop_map(|v| v.into_iter().map(|(a, b)| rat(a, b)).collect())
    }

    proptest! {
        #[test]
        fn ring_ops_match_pointwise(p in arb_poly(3), q in arb_poly(3), x in arb_point(3)) {
            let (px, qx) = (p.evaluate(&x).unwrap(), q.evaluate(&x).unwrap());
            prop_assert_eq!((&p + &q).evaluate(&x).unwrap(), &px + &qx);
            prop_assert_eq!((&p * &q).evaluate(&x).unwrap(), &px * &qx);
        }

        #[test]
        fn division_inverts_multiplication(q in arb_poly(3), b in arb_point(3)) {
            prop_assume!(b.iter().any(|c| !c.is_zero()));
            let l = Polynomial::linear(&b);
            prop_assert_eq!((&q * &l).divide_by_linear_form(&b).unwrap(), q);
        }

        #[test]
        fn composition_round_trips(p in arb_poly(2), b in arb_point(2)) {
            prop_assume!(b.iter().any(|c| !c.is_zero()));
            let g = RatMatrix::reflection(&b).mul(&RatMatrix::reflection(&[int(1), int(2)]));
            let there = p.compose_orthogonal(&g).unwrap();
            prop_assert_eq!(there.compose_orthogonal(&g.transpose()).unwrap(), p);
        }

        #[test]
        fn components_reassemble(p in arb_poly(3)) {
            let mut sum = Polynomial::zero(3);
            for (d, c) in p.homogeneous_components() {
                prop_assert!(c.is_homogeneous());
                prop_assert_eq!(c.degree(), d);
                sum += &c;
            }
            prop_assert_eq!(sum, p);
        }
    }
}
