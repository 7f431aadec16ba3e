//! Rank-one closed form of the kernel through normalized Bessel functions.
//!
//! `j_α(s) = Γ(α+1) Σ_m (-1)^m (s/2)^{2m} / (m! Γ(m+α+1))`, summed in
//! double-double directly from the series. This is the independent oracle
//! for the basis-series evaluator on `Z₂`.

use num_complex::Complex;
use twofloat::TwoFloat;

use crate::scalar::{Real, Scalar, C64, CDD, DD};

const MAX_TERMS: usize = 10_000;

/// Normalized Bessel function `j_α(s)` for `α > -1`.
pub fn normalized_bessel<S: Scalar>(alpha: f64, s: S) -> S {
    let q = -(s * s).scale(<S::Real as Real>::lift(0.25));
    let mut term = S::one();
    let mut sum = S::one();
    let a = <S::Real as Real>::lift(alpha);
    let one = <S::Real as Real>::lift(1.0);
    let growth_stops = 0.5 * s.modulus();
    for m in 0..MAX_TERMS {
        let mr = <S::Real as Real>::lift(m as f64);
        let denom = (mr + one) * (mr + a + one);
        term = (term * q).scale(denom.inv());
        sum = sum + term;
        if (m as f64) > growth_stops && term.modulus() <= 1e-34 * sum.modulus().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum
}

/// `K(z,w) = j_{μ-1/2}(izw) + (zw/(2μ+1)) j_{μ+1/2}(izw)` for `Z₂` with
/// multiplicity `μ`, in complex double-double.
pub fn kernel_eval_z2_dd(mu: f64, z: CDD, w: CDD) -> CDD {
    let t = z * w;
    let s = t * Complex::new(TwoFloat::from(0.0), TwoFloat::from(1.0));
    let even = normalized_bessel(mu - 0.5, s);
    let odd = normalized_bessel(mu + 0.5, s);
    let c = (DD::from(2.0) * DD::from(mu) + DD::from(1.0)).inv();
    even + (t * odd).scale(c)
}

/// [`kernel_eval_z2_dd`] rounded to complex doubles.
pub fn kernel_eval_z2(mu: f64, z: C64, w: C64) -> C64 {
    kernel_eval_z2_dd(mu, CDD::from_c64(z), CDD::from_c64(w)).to_c64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_limits() {
        // j_{-1/2}(s) = cos s and j_{1/2}(s) = sin s / s.
        for s in [0.3, 1.7, 6.0] {
            let c = normalized_bessel(-0.5, DD::from(s)).approx();
            assert!((c - f64::cos(s)).abs() < 1e-15);
            assert!((normalized_bessel(0.5, DD::from(s)).approx() - s.sin() / s).abs() < 1e-15);
            assert!((normalized_bessel(-0.5, s) - f64::cos(s)).abs() < 1e-13);
        }
        for (z, w) in [(1.0, 1.0), (-2.0, 3.0), (0.5, -0.25)] {
            let k = kernel_eval_z2(0.0, C64::new(z, 0.0), C64::new(w, 0.0));
            assert!((k.re - f64::exp(z * w)).abs() < 1e-15 * f64::exp(z * w));
            let k = kernel_eval_z2(0.0, C64::new(0.0, z), C64::new(w, 0.0));
            assert!((k - C64::new(0.0, z * w).exp()).norm() < 1e-15);
        }
    }

    #[test]
    fn power_series_agrees() {
        // K(x,y) = Σ (xy)^n / b_n with b_{2m} = 4^m m! (μ+1/2)_m and
        // b_{2m+1} = 2·4^m m! (μ+1/2)_{m+1}.
        let mu = 1.0;
        let t = 1.3f64;
        let mut expect = 0.0;
        let mut poch = 1.0;
        let mut fact = 1.0;
        for m in 0..40 {
            if m > 0 {
                fact *= m as f64;
                poch *= mu + 0.5 + (m - 1) as f64;
            }
            let b_even = 4f64.powi(m) * fact * poch;
            let b_odd = 2.0 * 4f64.powi(m) * fact * poch * (mu + 0.5 + m as f64);
            expect += t.powi(2 * m) / b_even + t.powi(2 * m + 1) / b_odd;
        }
        let got = kernel_eval_z2(mu, C64::new(t, 0.0), C64::new(1.0, 0.0));
        assert!((got.re - expect).abs() < 1e-15 * expect);
        assert_eq!(kernel_eval_z2(2.5, C64::new(3.0, 0.0), C64::new(0.0, 0.0)), C64::new(1.0, 0.0));
    }
}
