//! Polynomial and power-series helpers used by the determinant and zeta
//! machinery. Coefficient vectors are ascending in the series variable.

use crate::matrix::Complex64;
use crate::scalar::{from_usize, KahanSum, Scalar};

/// Product of two polynomials truncated at degree `max_deg` inclusive.
pub fn mul_trunc<W: Scalar>(a: &[W], b: &[W], max_deg: usize) -> Vec<W> {
    let mut out = vec![W::zero(); max_deg + 1];
    for (i, ai) in a.iter().enumerate().take(max_deg + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j > max_deg {
                break;
            }
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// Coefficients of det(1 - uT) from the power traces tr(T^m), m = 1..=deg,
/// via the Newton recursion c_n = -(1/n) * sum_{m=1..n} tr(T^m) c_{n-m}.
pub fn coeffs_from_traces<W: Scalar>(traces: &[W], deg: usize) -> Vec<W> {
    assert!(traces.len() >= deg, "need traces up to the requested degree");
    let mut c = Vec::with_capacity(deg + 1);
    c.push(W::one());
    for n in 1..=deg {
        let mut acc = KahanSum::new();
        for m in 1..=n {
            acc.add(traces[m - 1].clone() * c[n - m].clone());
        }
        let cn = -acc.value() / from_usize::<W>(n);
        c.push(cn);
    }
    c
}

/// Inverts the Newton recursion: given P(u) = det(1 - uT) it recovers the
/// series coefficients N_m of u P'(u) / P(u) negated, that is
/// N_m = -m c_m - sum_{j=1..m-1} c_j N_{m-j}, which equal tr(T^m).
pub fn log_derivative_series<W: Scalar>(coeffs: &[W], m_max: usize) -> Vec<W> {
    let c = |j: usize| -> W {
        if j < coeffs.len() {
            coeffs[j].clone()
        } else {
            W::zero()
        }
    };
    let mut n: Vec<W> = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let mut acc = KahanSum::new();
        acc.add(from_usize::<W>(m) * c(m));
        for j in 1..m {
            acc.add(c(j) * n[m - j - 1].clone());
        }
        n.push(-acc.value());
    }
    n
}

pub fn eval_f64(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

pub fn eval_complex(coeffs: &[f64], u: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + Complex64::new(*c, 0.0))
}

/// Derivative coefficients of a polynomial.
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| (k as f64) * c)
        .collect()
}
