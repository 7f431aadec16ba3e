//! Finite reflection groups: root systems, multiplicities and the weight
//! function `w_k(x) = Π_{α∈R+} |<α,x>|^{2k(α)}`.
//!
//! Every root is normalized to `|α|² = 2`. A root is stored as an exact
//! rational direction `β` together with `scale_sq = 2/|β|²`, so that
//! `α = sqrt(scale_sq) β`. The Dunkl operators only ever need the ratio
//! `α_i/<α,x> = β_i/<β,x>`, which keeps all operator algebra over `Q` even
//! when `α` itself involves `√2`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::matrix::{apply_f64, mul_f64, RatMatrix};
use crate::rational::{format_rational, int, parse_rational, to_f64};
use crate::scalar::Real;

/// Largest supported rank (group orders stay below a few thousand).
pub const MAX_RANK: usize = 5;
/// Largest supported dihedral order.
pub const MAX_DIHEDRAL_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `Z2^N`: independent sign changes, roots `√2 e_i`.
    #[serde(rename = "Z2_product", alias = "z2", alias = "Z2")]
    Z2Product,
    /// `S_N` permuting coordinates of `R^N`, roots `e_i - e_j`.
    #[serde(rename = "A", alias = "a", alias = "symmetric")]
    A,
    /// Hyperoctahedral group: long roots `e_i ± e_j`, short roots `√2 e_i`.
    #[serde(rename = "B", alias = "b")]
    B,
    /// Dihedral group `I2(m)` of order `2m` acting on the plane.
    #[serde(rename = "dihedral", alias = "I2")]
    Dihedral,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Z2Product => "Z2_product",
            Family::A => "A",
            Family::B => "B",
            Family::Dihedral => "dihedral",
        }
    }
}

impl FromStr for Family {
    type Err = DunklError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z2" | "z2_product" | "z2n" => Ok(Family::Z2Product),
            "a" | "symmetric" | "s" => Ok(Family::A),
            "b" | "hyperoctahedral" => Ok(Family::B),
            "dihedral" | "i2" => Ok(Family::Dihedral),
            _ => Err(DunklError::UnknownFamily(s.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One nonnegative multiplicity per root orbit, in the family's orbit order:
/// one value per axis (or a single shared value) for `Z2_product`, `k = 1/α`
/// for `A`, `(k0, k1)` for `B` (long, short), and `(k_even, k_odd)` for even
/// dihedral orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiplicityAssignment(#[serde(with = "crate::rational::serde_rational_vec")] pub Vec<BigRational>);

impl MultiplicityAssignment {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(DunklError::NegativeMultiplicity(format_rational(v)));
        }
        Ok(MultiplicityAssignment(values))
    }

    pub fn parse(values: &[&str]) -> Result<Self> {
        Self::new(values.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }
}

/// Structured description of a system, as found in config files.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemSpec {
    pub family: Family,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub multiplicity: MultiplicityAssignment,
}

impl SystemSpec {
    pub fn new(family: Family, rank: usize, order: Option<usize>, k: &[BigRational]) -> Result<Self> {
        Ok(SystemSpec {
            family,
            rank,
            order,
            multiplicity: MultiplicityAssignment::new(k.to_vec())?,
        })
    }

    pub fn z2(mu: &[BigRational]) -> Result<Self> {
        Self::new(Family::Z2Product, mu.len(), None, mu)
    }

    pub fn symmetric(rank: usize, k: BigRational) -> Result<Self> {
        Self::new(Family::A, rank, None, &[k])
    }

    pub fn hyperoctahedral(rank: usize, k0: BigRational, k1: BigRational) -> Result<Self> {
        Self::new(Family::B, rank, None, &[k0, k1])
    }

    pub fn dihedral(order: usize, k: &[BigRational]) -> Result<Self> {
        Self::new(Family::Dihedral, 2, Some(order), k)
    }

    pub fn build(&self) -> Result<RootSystem> {
        build_root_system(self)
    }

    /// Short label such as `B2(k=1,1)`.
    pub fn label(&self) -> String {
        let ks: Vec<String> = self.multiplicity.0.iter().map(format_rational).collect();
        let name = match self.family {
            Family::Z2Product if self.rank == 1 => "Z2".to_string(),
            Family::Z2Product => format!("Z2^{}", self.rank),
            Family::A => format!("S{}", self.rank),
            Family::B => format!("B{}", self.rank),
            Family::Dihedral => format!("I2({})", self.order.unwrap_or(0)),
        };
        format!("{name}(k={})", ks.join(","))
    }
}

/// A positive root `α = sqrt(scale_sq)·β`.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    /// Exact direction `β`, absent for inexact (floating) dihedral roots.
    pub direction: Option<Vec<BigRational>>,
    /// `α` itself in floating point, `|α|² = 2`.
    pub vector: Vec<f64>,
    /// `2/|β|²` (exact when `direction` is).
    pub scale_sq: BigRational,
    pub orbit: usize,
    pub multiplicity: BigRational,
}

impl Root {
    pub fn multiplicity_f64(&self) -> f64 {
        to_f64(&self.multiplicity)
    }

    pub fn dot_f64(&self, x: &[f64]) -> f64 {
        self.vector.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn dot<T: Real>(&self, x: &[T]) -> T {
        self.vector
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (&a, &b)| acc + T::lift(a) * b)
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    spec: SystemSpec,
    positive: Vec<Root>,
    exact_elements: Option<Vec<RatMatrix>>,
    elements: Vec<Vec<f64>>,
    gamma: BigRational,
}

pub fn build_root_system(spec: &SystemSpec) -> Result<RootSystem> {
    let n = spec.rank;
    let family = spec.family;
    let arity = spec.multiplicity.0.len();
    let bad_arity = |expected: &str| DunklError::MultiplicityArity {
        family: family.name(),
        expected: expected.to_string(),
        got: arity,
    };
    if n == 0 || n > MAX_RANK {
        return Err(DunklError::InvalidRank {
            family: family.name(),
            rank: n,
        });
    }
    if let Some(v) = spec.multiplicity.0.iter().find(|v| v.is_negative()) {
        return Err(DunklError::NegativeMultiplicity(format_rational(v)));
    }
    let k = &spec.multiplicity.0;
    let unit = |i: usize| -> Vec<BigRational> {
        (0..n).map(|j| int((i == j) as i64)).collect()
    };
    let mut exact: Vec<(Vec<BigRational>, usize, BigRational)> = Vec::new();
    let mut inexact: Vec<(Vec<f64>, usize, BigRational)> = Vec::new();
    match family {
        Family::Z2Product => {
            if arity != 1 && arity != n {
                return Err(bad_arity(&format!("1 or {n}")));
            }
            for i in 0..n {
                let ki = if arity == 1 { &k[0] } else { &k[i] };
                exact.push((unit(i), i, ki.clone()));
            }
        }
        Family::A => {
            if arity != 1 {
                return Err(bad_arity("1"));
            }
            for i in 0..n {
                for j in i + 1..n {
                    let mut b = unit(i);
                    b[j] = int(-1);
                    exact.push((b, 0, k[0].clone()));
                }
            }
        }
        Family::B => {
            if arity != 2 {
                return Err(bad_arity("2"));
            }
            for i in 0..n {
                for j in i + 1..n {
                    for s in [1, -1] {
                        let mut b = unit(i);
                        b[j] = int(s);
                        exact.push((b, 0, k[0].clone()));
                    }
                }
            }
            for i in 0..n {
                exact.push((unit(i), 1, k[1].clone()));
            }
        }
        Family::Dihedral => {
            let m = spec.order.unwrap_or(0);
            if n != 2 {
                return Err(DunklError::InvalidRank {
                    family: family.name(),
                    rank: n,
                });
            }
            if !(3..=MAX_DIHEDRAL_ORDER).contains(&m) {
                return Err(DunklError::InvalidDihedralOrder(m));
            }
            let orbits = if m % 2 == 0 { 2 } else { 1 };
            if arity != 1 && arity != orbits {
                return Err(bad_arity(if orbits == 2 { "1 or 2" } else { "1" }));
            }
            let kk = |orbit: usize| if arity == 1 { k[0].clone() } else { k[orbit].clone() };
            if m == 4 {
                let dirs = [(1, 0), (1, 1), (0, 1), (1, -1)];
                for (j, (a, b)) in dirs.iter().enumerate() {
                    exact.push((vec![int(*a), int(*b)], j % 2, kk(j % 2)));
                }
            } else {
                for j in 0..m {
                    let theta = std::f64::consts::PI * j as f64 / m as f64;
                    let s = std::f64::consts::SQRT_2;
                    let mut v = vec![s * theta.cos(), s * theta.sin()];
                    if v[0] < -1e-12 || (v[0].abs() <= 1e-12 && v[1] < 0.0) {
                        v = v.iter().map(|c| -c).collect();
                    }
                    if v[0].abs() <= 1e-12 {
                        v[0] = 0.0;
                    }
                    let orbit = if orbits == 2 { j % 2 } else { 0 };
                    inexact.push((v, orbit, kk(orbit)));
                }
            }
        }
    }

    let mut positive = Vec::new();
    for (b, orbit, mult) in exact {
        let norm2: BigRational = b.iter().map(|v| v * v).sum();
        let scale_sq = int(2) / norm2;
        let s = to_f64(&scale_sq).sqrt();
        positive.push(Root {
            vector: b.iter().map(|v| s * to_f64(v)).collect(),
            direction: Some(b),
            scale_sq,
            orbit,
            multiplicity: mult,
        });
    }
    for (v, orbit, mult) in inexact {
        positive.push(Root {
            direction: None,
            vector: v,
            scale_sq: int(1),
            orbit,
            multiplicity: mult,
        });
    }
    positive.sort_by(|a, b| lex_cmp(&b.vector, &a.vector));

    let gamma = positive.iter().map(|r| r.multiplicity.clone()).sum();
    let is_exact = positive.iter().all(|r| r.direction.is_some());
    let (exact_elements, elements) = if is_exact {
        let gens: Vec<RatMatrix> = positive
            .iter()
            .map(|r| RatMatrix::reflection(r.direction.as_ref().unwrap()))
            .collect();
        let group = close_exact(n, &gens);
        let floats = group.iter().map(RatMatrix::to_f64).collect();
        (Some(group), floats)
    } else {
        let gens: Vec<Vec<f64>> = positive.iter().map(|r| reflection_f64(&r.vector)).collect();
        (None, close_float(n, &gens))
    };
    Ok(RootSystem {
        spec: spec.clone(),
        positive,
        exact_elements,
        elements,
        gamma,
    })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return x.partial_cmp(y).unwrap();
        }
    }
    std::cmp::Ordering::Equal
}

fn reflection_f64(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let norm2: f64 = v.iter().map(|c| c * c).sum();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (i == j) as u8 as f64 - 2.0 * v[i] * v[j] / norm2;
        }
    }
    m
}

fn close_exact(n: usize, gens: &[RatMatrix]) -> Vec<RatMatrix> {
    let id = RatMatrix::identity(n);
    let mut seen: HashSet<RatMatrix> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = s.mul(&g);
            if seen.insert(h.clone()) {
                out.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    out
}

fn float_key(m: &[f64]) -> Vec<i64> {
    m.iter().map(|v| (v * 1e6).round() as i64).collect()
}

fn close_float(n: usize, gens: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let id: Vec<f64> = (0..n * n).map(|k| (k / n == k % n) as u8 as f64).collect();
    let mut seen: HashSet<Vec<i64>> = HashSet::from([float_key(&id)]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = mul_f64(s, &g, n);
            if seen.insert(float_key(&h)) {
                out.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    out
}

impl RootSystem {
    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn dim(&self) -> usize {
        self.spec.rank
    }

    pub fn label(&self) -> String {
        self.spec.label()
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    /// All roots `±α`, as floating vectors.
    pub fn roots_f64(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(2 * self.positive.len());
        for r in &self.positive {
            out.push(r.vector.clone());
            out.push(r.vector.iter().map(|c| -c).collect());
        }
        out
    }

    pub fn is_exact(&self) -> bool {
        self.exact_elements.is_some()
    }

    /// Group elements as exact matrices; errors for inexact systems.
    pub fn exact_elements(&self) -> Result<&[RatMatrix]> {
        self.exact_elements.as_deref().ok_or(DunklError::InexactRoots)
    }

    /// Group elements as row-major floating matrices (identity first).
    pub fn elements(&self) -> &[Vec<f64>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn gamma(&self) -> &BigRational {
        &self.gamma
    }

    pub fn gamma_f64(&self) -> f64 {
        to_f64(&self.gamma)
    }

    pub fn is_trivial(&self) -> bool {
        self.gamma.is_zero()
    }

    /// `σ_α(x)` for positive root number `root`.
    pub fn reflect(&self, root: usize, x: &[f64]) -> Result<Vec<f64>> {
        let r = self.root(root)?;
        self.check_dim(x.len())?;
        let d = r.dot_f64(x);
        Ok(x.iter().zip(&r.vector).map(|(xi, ai)| xi - d * ai).collect())
    }

    pub fn reflect_exact(&self, root: usize, x: &[BigRational]) -> Result<Vec<BigRational>> {
        let r = self.root(root)?;
        self.check_dim(x.len())?;
        let b = r.direction.as_ref().ok_or(DunklError::InexactRoots)?;
        let dot: BigRational = b.iter().zip(x).map(|(p, q)| p * q).sum();
        let nb: BigRational = b.iter().map(|v| v * v).sum();
        let c = int(2) * dot / nb;
        Ok(x.iter().zip(b).map(|(xi, bi)| xi - &c * bi).collect())
    }

    /// `w_k(x) = Π_{α∈R+} |<α,x>|^{2k(α)}`, with `0^0 = 1`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.weight_t(x)
    }

    pub fn weight_t<T: Real>(&self, x: &[T]) -> T {
        let mut w = T::one();
        for r in &self.positive {
            if r.multiplicity.is_zero() {
                continue;
            }
            let two_k = T::from_rational(&(int(2) * &r.multiplicity));
            w = w * r.dot(x).abs().powf(two_k);
        }
        w
    }

    /// For each positive root `α` and group element `g`, the index of
    /// `σ_α g` in [`elements`](Self::elements).
    pub fn reflection_table(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let index: HashMap<Vec<i64>, usize> = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, g)| (float_key(g), i))
            .collect();
        self.positive
            .iter()
            .map(|r| {
                let s = reflection_f64(&r.vector);
                self.elements
                    .iter()
                    .map(|g| index[&float_key(&mul_f64(&s, g, n))])
                    .collect()
            })
            .collect()
    }

    /// Applies group element `g` (by index) to a point.
    pub fn act(&self, g: usize, x: &[f64]) -> Vec<f64> {
        apply_f64(&self.elements[g], self.dim(), x)
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            spec: self.spec.clone(),
            order: self.order(),
            gamma: format_rational(&self.gamma),
            positive_roots: self
                .positive
                .iter()
                .map(|r| RootJson {
                    direction: r
                        .direction
                        .as_ref()
                        .map(|d| d.iter().map(format_rational).collect()),
                    vector: r.vector.clone(),
                    scale_sq: format_rational(&r.scale_sq),
                    orbit: r.orbit,
                    multiplicity: format_rational(&r.multiplicity),
                })
                .collect(),
        }
    }

    /// Rebuilds from the embedded spec and checks the stored roots match.
    pub fn from_json(j: &SystemJson) -> Result<RootSystem> {
        let sys = build_root_system(&j.spec)?;
        if sys.to_json() != *j {
            return Err(DunklError::InvalidArgument(
                "serialized root data does not match its system spec".into(),
            ));
        }
        Ok(sys)
    }

    fn root(&self, i: usize) -> Result<&Root> {
        self.positive.get(i).ok_or(DunklError::IndexOutOfRange {
            index: i,
            dim: self.positive.len(),
        })
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(DunklError::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<String>>,
    pub vector: Vec<f64>,
    pub scale_sq: String,
    pub orbit: usize,
    pub multiplicity: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub spec: SystemSpec,
    pub order: usize,
    pub gamma: String,
    pub positive_roots: Vec<RootJson>,
}
