//! Shared oracles for the integration suites: exact determinant and trace
//! computations that avoid every code path under test.

#![allow(dead_code)]

use num::{BigInt, One, Zero};
use wzeta::bass::BassMatrix;
use wzeta::corpus::{random_graph, random_reducible, random_strongly_connected};
use wzeta::graph::{fixture, Fixture, WeightedGraph};
use wzeta::Rational;

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Determinant by exact Gaussian elimination with column pivoting.
pub fn rational_det(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let lead = m[col][col].clone();
        det *= lead.clone();
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone() / lead.clone();
            for (dst, src) in row.iter_mut().zip(&pivot_row).skip(col) {
                *dst -= factor.clone() * src.clone();
            }
        }
    }
    det
}

/// Coefficients of the unique polynomial of degree < xs.len() through the
/// given points, by expanding the Lagrange basis.
pub fn lagrange_coeffs(xs: &[Rational], ys: &[Rational]) -> Vec<Rational> {
    let n = xs.len();
    let mut coeffs = vec![Rational::zero(); n];
    for i in 0..n {
        let mut basis = vec![Rational::one()];
        let mut denom = Rational::one();
        for (j, xj) in xs.iter().enumerate() {
            if j == i {
                continue;
            }
            let mut next = vec![Rational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b.clone();
                next[k] -= xj.clone() * b.clone();
            }
            basis = next;
            denom *= xs[i].clone() - xj.clone();
        }
        let scale = ys[i].clone() / denom;
        for (k, b) in basis.iter().enumerate() {
            coeffs[k] += b.clone() * scale.clone();
        }
    }
    coeffs
}

/// Coefficients of det(1 - uT) recovered by evaluating the determinant at
/// u = 0..=dim and interpolating. Shares no arithmetic with the trace
/// recursion used by `fredholm_coeffs`.
pub fn det_poly_by_interpolation(t: &BassMatrix<Rational>) -> Vec<Rational> {
    let n = t.dim();
    let points: Vec<Rational> = (0..=n as i64).map(rat).collect();
    let values: Vec<Rational> = points
        .iter()
        .map(|u| {
            let m: Vec<Vec<Rational>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut x = -(u.clone() * t.entry(i, j));
                            if i == j {
                                x += Rational::one();
                            }
                            x
                        })
                        .collect()
                })
                .collect();
            rational_det(m)
        })
        .collect();
    lagrange_coeffs(&points, &values)
}

/// tr T^m for m = 1..=m_max by plain dense multiplication.
pub fn naive_traces(t: &BassMatrix<Rational>, m_max: usize) -> Vec<Rational> {
    let n = t.dim();
    let a: Vec<Vec<Rational>> =
        (0..n).map(|i| (0..n).map(|j| t.entry(i, j)).collect()).collect();
    let mut power = a.clone();
    let mut traces = Vec::with_capacity(m_max);
    for step in 0..m_max {
        traces.push((0..n).map(|i| power[i][i].clone()).sum());
        if step + 1 < m_max {
            power = dense_mul(&power, &a);
        }
    }
    traces
}

fn dense_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k].clone() * b[k][j].clone()).sum())
                .collect()
        })
        .collect()
}

/// The named reference graphs.
pub fn fixture_graphs() -> Vec<(String, WeightedGraph<f64>)> {
    vec![
        ("loop(0.5)".into(), fixture(Fixture::Loop { c: 0.5 })),
        ("loop(1)".into(), fixture(Fixture::Loop { c: 1.0 })),
        ("loop(2)".into(), fixture(Fixture::Loop { c: 2.0 })),
        ("two-cycle(1,1)".into(), fixture(Fixture::TwoCycle { p: 1.0, q: 1.0 })),
        ("two-cycle(2,3)".into(), fixture(Fixture::TwoCycle { p: 2.0, q: 3.0 })),
        ("shared-triangles".into(), fixture(Fixture::SharedTriangles)),
        ("looped-triangles".into(), fixture(Fixture::LoopedTriangles)),
    ]
}

/// Fixtures plus `count` seeded random graphs.
pub fn identity_corpus(count: u64) -> Vec<(String, WeightedGraph<f64>)> {
    let mut graphs = fixture_graphs();
    graphs.extend((0..count).map(|seed| (format!("random({seed})"), random_graph(seed))));
    graphs
}

/// Seeded reducible graphs.
pub fn reducible_corpus(count: u64) -> Vec<(String, WeightedGraph<f64>)> {
    (0..count).map(|seed| (format!("reducible({seed})"), random_reducible(seed))).collect()
}

/// Seeded strongly connected graphs.
pub fn strongly_connected_corpus(count: u64) -> Vec<(String, WeightedGraph<f64>)> {
    (0..count)
        .map(|seed| (format!("strongly-connected({seed})"), random_strongly_connected(seed)))
        .collect()
}
