use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, to_f64};

/// Dense square matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatMatrix {
    dim: usize,
    #[serde(with = "crate::rational::serde_rational_vec")]
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![BigRational::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = BigRational::one();
        }
        RatMatrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        RatMatrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Reflection `x - 2<b,x>/<b,b> b` in the hyperplane orthogonal to `b`.
    pub fn reflection(b: &[BigRational]) -> Self {
        let dim = b.len();
        let norm2: BigRational = b.iter().map(|v| v * v).sum();
        let two = BigRational::from_integer(2.into());
        let mut m = Self::identity(dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = &two * &b[i] * &b[j] / &norm2;
                m.data[i * dim + j] -= v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.dim + j]
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        let n = self.dim;
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if !b.is_zero() {
                        data[i * n + j] += a * b;
                    }
                }
            }
        }
        RatMatrix { dim: n, data }
    }

    pub fn transpose(&self) -> RatMatrix {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.data[j * n + i].clone());
            }
        }
        RatMatrix { dim: n, data }
    }

    pub fn apply(&self, x: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| &self.data[i * n + j] * &x[j]).sum())
            .collect()
    }

    pub fn is_orthogonal(&self) -> bool {
        self.mul(&self.transpose()) == Self::identity(self.dim)
    }

    /// `Some((perm, signs))` when every row holds exactly one entry `±1`,
    /// i.e. `(Mx)_i = signs[i] * x[perm[i]]`.
    pub fn as_signed_permutation(&self) -> Option<(Vec<usize>, Vec<bool>)> {
        let n = self.dim;
        let mut perm = Vec::with_capacity(n);
        let mut negative = Vec::with_capacity(n);
        for i in 0..n {
            let mut found = None;
            for j in 0..n {
                let v = &self.data[i * n + j];
                if v.is_zero() {
                    continue;
                }
                if found.is_some() || !v.abs().is_one() {
                    return None;
                }
                found = Some((j, v.is_negative()));
            }
            let (j, neg) = found?;
            perm.push(j);
            negative.push(neg);
        }
        Some((perm, negative))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(to_f64).collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| format_rational(self.get(i, j)))
                    .collect()
            })
            .collect();
        write!(f, "{rows:?}")
    }
}

/// Exact `LDL^T` test: true when the symmetric rational matrix is positive
/// definite (every pivot strictly positive).
pub fn is_positive_definite(a: &[Vec<BigRational>]) -> bool {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    for k in 0..n {
        if !m[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let v = &f * &m[k][j];
                m[i][j] -= v;
            }
        }
    }
    true
}

/// Row-major `dim x dim` float matrix times vector.
pub fn apply_f64(m: &[f64], dim: usize, x: &[f64]) -> Vec<f64> {
    (0..dim)
        .map(|i| (0..dim).map(|j| m[i * dim + j] * x[j]).sum())
        .collect()
}

pub fn mul_f64(a: &[f64], b: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let v = a[i * dim + k];
            if v == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += v * b[k * dim + j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn reflection_is_an_orthogonal_involution() {
        let r = RatMatrix::reflection(&[int(1), int(1)]);
        assert!(r.is_orthogonal());
        assert_eq!(r.mul(&r), RatMatrix::identity(2));
        assert_eq!(r.apply(&[int(1), int(0)]), vec![int(0), int(-1)]);
        let (perm, neg) = r.as_signed_permutation().unwrap();
        assert_eq!(perm, vec![1, 0]);
        assert_eq!(neg, vec![true, true]);
    }

    #[test]
    fn ldl_detects_definiteness() {
        let pd = vec![vec![int(2), int(1)], vec![int(1), int(2)]];
        let indef = vec![vec![int(1), int(2)], vec![int(2), int(1)]];
        assert!(is_positive_definite(&pd));
        assert!(!is_positive_definite(&indef));
        assert!(!is_positive_definite(&[vec![int(0)]]));
    }
}
