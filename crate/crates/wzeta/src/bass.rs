//! The weighted transfer operator of a graph, acting on the free module
//! spanned by the oriented edges: T(e) = sum over f of w(e, f) f.
//!
//! Matrix convention, used everywhere in this crate: the entry `A[f, e]`
//! (row f, column e) holds `w(e, f)`, so columns are indexed by the source
//! edge and `apply` is the usual matrix-vector product. Getting this
//! transposed is the classic mistake; every trace identity test would catch
//! it on the first asymmetric fixture.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matrix::Matrix;
use crate::poly;
use crate::scalar::{KahanSum, Scalar};

/// Sparse row-major representation of the transfer operator.
#[derive(Clone, Debug, PartialEq)]
pub struct BassMatrix<W> {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<W>,
}

impl<W: Scalar> BassMatrix<W> {
    /// Builds the operator from a graph that passes validation. Zero weight
    /// entries are dropped, so the sparsity pattern is exactly the set of
    /// composable transitions.
    pub fn build(g: &WeightedGraph<W>) -> Result<Self> {
        let report = g.validate();
        if !report.ok {
            return Err(Error::InvalidGraph(format!(
                "{} violation(s), first: {}",
                report.violations.len(),
                report.violations[0].message
            )));
        }
        let dim = g.num_edges();
        let mut rows: Vec<Vec<(usize, W)>> = vec![Vec::new(); dim];
        for (e, f, w) in g.transitions() {
            rows[f].push((e, w.clone()));
        }
        Ok(Self::from_rows(dim, rows))
    }

    fn from_rows(dim: usize, mut rows: Vec<Vec<(usize, W)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows.iter_mut() {
            row.sort_by_key(|(e, _)| *e);
            for (e, w) in row.drain(..) {
                col_idx.push(e);
                values.push(w);
            }
            row_ptr.push(col_idx.len());
        }
        BassMatrix { dim, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn row(&self, f: usize) -> impl Iterator<Item = (usize, &W)> {
        self.col_idx[self.row_ptr[f]..self.row_ptr[f + 1]]
            .iter()
            .copied()
            .zip(&self.values[self.row_ptr[f]..self.row_ptr[f + 1]])
    }

    /// `A[f, e]`, that is `w(e, f)`.
    pub fn entry(&self, f: usize, e: usize) -> W {
        self.row(f)
            .find(|(col, _)| *col == e)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(W::zero)
    }

    /// Matrix-vector product `A v`.
    pub fn apply(&self, v: &[W]) -> Result<Vec<W>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok((0..self.dim)
            .map(|f| {
                let mut acc = KahanSum::new();
                for (e, w) in self.row(f) {
                    acc.add(w.clone() * v[e].clone());
                }
                acc.value()
            })
            .collect())
    }

    /// Sparse times dense product `A M`.
    fn mul_dense(&self, m: &Matrix<W>) -> Matrix<W> {
        let mut out = Matrix::zeros(self.dim, m.cols());
        for f in 0..self.dim {
            for j in 0..m.cols() {
                let mut acc = KahanSum::new();
                for (e, w) in self.row(f) {
                    acc.add(w.clone() * m[(e, j)].clone());
                }
                out[(f, j)] = acc.value();
            }
        }
        out
    }

    /// Traces of `A^m` for m = 1..=m_max, by repeated sparse multiplication
    /// against a dense accumulator.
    pub fn trace_powers(&self, m_max: usize) -> Vec<W> {
        let mut traces = Vec::with_capacity(m_max);
        if m_max == 0 {
            return traces;
        }
        let mut power = self.to_dense();
        traces.push(power.trace());
        for _ in 2..=m_max {
            power = self.mul_dense(&power);
            traces.push(power.trace());
        }
        traces
    }

    /// Trace of `A^n` for n >= 1.
    pub fn trace_power(&self, n: usize) -> Result<W> {
        if n == 0 {
            return Err(Error::InvalidArgument("trace_power needs n >= 1".into()));
        }
        Ok(self.trace_powers(n).pop().expect("n >= 1"))
    }

    /// Coefficients of det(1 - uT) up to degree `deg`, via the Newton
    /// recursion on power traces. Coefficients beyond `dim` are identically
    /// zero in exact arithmetic and serve as a numerical self-check.
    pub fn fredholm_coeffs(&self, deg: usize) -> Vec<W> {
        let traces = self.trace_powers(deg);
        poly::coeffs_from_traces(&traces, deg)
    }

    pub fn to_dense(&self) -> Matrix<W> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for f in 0..self.dim {
            for (e, w) in self.row(f) {
                m[(f, e)] = w.clone();
            }
        }
        m
    }

    /// Adjacency of the support digraph: `succ[e]` lists the edges `f` with
    /// `w(e, f) != 0`, ascending.
    pub fn support_successors(&self) -> Vec<Vec<usize>> {
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.dim];
        for f in 0..self.dim {
            for (e, _) in self.row(f) {
                succ[e].push(f);
            }
        }
        for s in succ.iter_mut() {
            s.sort_unstable();
        }
        succ
    }

    /// Restriction to a subset of edges, reindexed by position in `edges`.
    pub fn submatrix(&self, edges: &[usize]) -> BassMatrix<W> {
        let mut new_id = vec![usize::MAX; self.dim];
        for (new, &old) in edges.iter().enumerate() {
            new_id[old] = new;
        }
        let mut rows: Vec<Vec<(usize, W)>> = vec![Vec::new(); edges.len()];
        for (new_f, &old_f) in edges.iter().enumerate() {
            for (old_e, w) in self.row(old_f) {
                if new_id[old_e] != usize::MAX {
                    rows[new_f].push((new_id[old_e], w.clone()));
                }
            }
        }
        Self::from_rows(edges.len(), rows)
    }

    pub fn transpose(&self) -> BassMatrix<W> {
        let mut rows: Vec<Vec<(usize, W)>> = vec![Vec::new(); self.dim];
        for f in 0..self.dim {
            for (e, w) in self.row(f) {
                rows[e].push((f, w.clone()));
            }
        }
        Self::from_rows(self.dim, rows)
    }

    pub fn is_entrywise_nonnegative(&self) -> bool {
        self.values.iter().all(|w| *w >= W::zero())
    }

    pub fn convert<V: Scalar>(&self) -> BassMatrix<V> {
        BassMatrix {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self
                .values
                .iter()
                .map(|w| V::from_f64(w.to_f64().expect("finite weight")).expect("finite weight"))
                .collect(),
        }
    }
}
