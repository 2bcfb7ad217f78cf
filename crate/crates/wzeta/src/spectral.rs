//! Block structure and Perron-Frobenius verification for transfer matrices.
//!
//! The edge digraph of a transfer matrix splits into strongly connected
//! components. Ordering the components so that every arc points from a later
//! block into an earlier one (or stays inside a block) makes the matrix block
//! lower triangular up to permutation, so its spectrum is the union of the
//! block spectra. On each irreducible block with positive spectral radius the
//! peripheral spectrum is a full set of roots of unity times the radius and
//! the leading eigenvector can be taken entrywise positive; [`verify_pf`]
//! checks both claims numerically.

use std::collections::BinaryHeap;
use std::collections::VecDeque;

use serde::Serialize;

use crate::bass::BassMatrix;
use crate::error::{Error, Result};
use crate::matrix::{Complex64, Matrix};
use crate::scalar::Scalar;

/// Numerical thresholds used by the spectral routines.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Relative width for matching eigenvalues against predicted locations.
    pub eig_rel: f64,
    /// Relative single-linkage distance when clustering repeated eigenvalues.
    pub cluster_rel: f64,
    /// Absolute floor below which an eigenvector coordinate counts as zero.
    pub positivity: f64,
    /// Largest dimension accepted by the dense eigenvalue solver.
    pub dim_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eig_rel: 1e-6, cluster_rel: 1e-6, positivity: 1e-9, dim_cap: 2000 }
    }
}

/// Strongly connected components of a digraph given by adjacency lists.
///
/// Components are returned with vertices sorted ascending. The component
/// order is not specified; callers that need a particular order sort the
/// result themselves.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        lowlink: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next_index: usize,
        components: Vec<Vec<usize>>,
    }

    fn visit(s: &mut State, v: usize) {
        s.index[v] = Some(s.next_index);
        s.lowlink[v] = s.next_index;
        s.next_index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for i in 0..s.adj[v].len() {
            let w = s.adj[v][i];
            if s.index[w].is_none() {
                visit(s, w);
                s.lowlink[v] = s.lowlink[v].min(s.lowlink[w]);
            } else if s.on_stack[w] {
                s.lowlink[v] = s.lowlink[v].min(s.index[w].unwrap());
            }
        }
        if s.lowlink[v] == s.index[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.components.push(comp);
        }
    }

    let n = adj.len();
    let mut state = State {
        adj,
        index: vec![None; n],
        lowlink: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next_index: 0,
        components: Vec::new(),
    };
    for v in 0..n {
        if state.index[v].is_none() {
            visit(&mut state, v);
        }
    }
    state.components
}

/// Whether the support digraph of `t` is strongly connected.
///
/// The empty matrix and the 1x1 zero matrix count as irreducible by
/// convention.
pub fn is_irreducible<W: Scalar>(t: &BassMatrix<W>) -> bool {
    if t.dim() <= 1 {
        return true;
    }
    strongly_connected_components(&t.support_successors()).len() == 1
}

/// One diagonal block of a condensation ordering.
#[derive(Debug, Clone)]
pub struct Block<W: Scalar> {
    /// Edge ids in the block, ascending.
    pub edges: Vec<usize>,
    /// The principal submatrix on those edges.
    pub matrix: BassMatrix<W>,
    /// Spectral radius of the block.
    pub radius: f64,
    /// Whether the block is a single strongly connected component with at
    /// least one arc (always true by construction; kept for reporting).
    pub irreducible: bool,
    /// Whether the block radius is strictly below the global radius.
    pub subdominant: bool,
}

/// A transfer matrix split along strongly connected components.
#[derive(Debug, Clone)]
pub struct BlockDecomposition<W: Scalar> {
    /// Blocks in an order where every arc of the support digraph points from
    /// a later block into an earlier one or stays inside its block.
    pub blocks: Vec<Block<W>>,
    /// Maximum of the block radii, which equals the radius of the full
    /// matrix.
    pub spectral_radius: f64,
}

impl<W: Scalar> BlockDecomposition<W> {
    /// Positions of the global radius among the blocks.
    pub fn peripheral_blocks(&self, tol: &Tolerances) -> Vec<usize> {
        let r = self.spectral_radius;
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.radius >= r - tol.eig_rel * (1.0 + r))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Splits `t` into strongly connected blocks in successor-closed order.
///
/// The order is canonical: among the components whose successors all lie in
/// blocks already placed, the one containing the smallest edge id goes next.
/// Every prefix of the concatenated edge list is then closed under taking
/// successors in the support digraph.
pub fn decompose<W: Scalar>(t: &BassMatrix<W>, tol: &Tolerances) -> Result<BlockDecomposition<W>> {
    let adj = t.support_successors();
    let comps = strongly_connected_components(&adj);
    let k = comps.len();
    let mut comp_of = vec![0usize; t.dim()];
    for (c, comp) in comps.iter().enumerate() {
        for &e in comp {
            comp_of[e] = c;
        }
    }

    // Condensation arcs comp(e) -> comp(f) for transitions e -> f.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut out_deg = vec![0usize; k];
    for e in 0..t.dim() {
        for &f in &adj[e] {
            let (ce, cf) = (comp_of[e], comp_of[f]);
            if ce != cf {
                preds[cf].push(ce);
                out_deg[ce] += 1;
            }
        }
    }

    // Peel sinks, smallest contained edge id first.
    let mut heap: BinaryHeap<std::cmp::Reverse<(usize, usize)>> = BinaryHeap::new();
    for c in 0..k {
        if out_deg[c] == 0 {
            heap.push(std::cmp::Reverse((comps[c][0], c)));
        }
    }
    let mut order = Vec::with_capacity(k);
    while let Some(std::cmp::Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &p in &preds[c] {
            out_deg[p] -= 1;
            if out_deg[p] == 0 {
                heap.push(std::cmp::Reverse((comps[p][0], p)));
            }
        }
    }
    debug_assert_eq!(order.len(), k);

    let mut blocks = Vec::with_capacity(k);
    let mut radius: f64 = 0.0;
    for &c in &order {
        let sub = t.submatrix(&comps[c]);
        let spec = spectrum_of_bass(&sub, tol)?;
        radius = radius.max(spec.spectral_radius);
        blocks.push(Block {
            edges: comps[c].clone(),
            matrix: sub,
            radius: spec.spectral_radius,
            irreducible: true,
            subdominant: false,
        });
    }
    for b in &mut blocks {
        b.subdominant = b.radius < radius - tol.eig_rel * (1.0 + radius);
    }
    let dec = BlockDecomposition { blocks, spectral_radius: radius };
    debug_assert!(prefix_invariant(t, &dec));
    Ok(dec)
}

/// Whether every prefix of the block order is closed under successors.
pub fn prefix_invariant<W: Scalar>(t: &BassMatrix<W>, dec: &BlockDecomposition<W>) -> bool {
    let mut pos = vec![usize::MAX; t.dim()];
    for (i, b) in dec.blocks.iter().enumerate() {
        for &e in &b.edges {
            pos[e] = i;
        }
    }
    if pos.contains(&usize::MAX) {
        return false;
    }
    let adj = t.support_successors();
    (0..t.dim()).all(|e| adj[e].iter().all(|&f| pos[f] <= pos[e]))
}

/// Eigenvalues of a square matrix grouped into clusters.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Cluster centroids with multiplicities, sorted by descending modulus
    /// and then lexicographically on (re, im).
    pub eigenvalues: Vec<(Complex64, usize)>,
    /// Largest eigenvalue modulus.
    pub spectral_radius: f64,
    /// Centroids within relative tolerance of the spectral radius circle.
    pub peripheral: Vec<(Complex64, usize)>,
}

fn dense_eigenvalues(m: &nalgebra::DMatrix<f64>, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n > tol.dim_cap {
        return Err(Error::InvalidArgument(format!(
            "dense eigenvalue solve capped at dimension {}, got {}",
            tol.dim_cap, n
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mc = m.map(|x| Complex64::new(x, 0.0));
    let schur = mc
        .try_schur(f64::EPSILON, 200 * n.max(10))
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let t = schur.unpack().1;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Single-linkage clustering of complex values at the given distance.
pub fn cluster_eigenvalues(values: &[Complex64], linkage: f64) -> Vec<(Complex64, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= linkage {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<(Complex64, usize)> = groups
        .values()
        .map(|members| {
            let mut c = Complex64::new(0.0, 0.0);
            for &i in members {
                c += values[i];
            }
            (c / members.len() as f64, members.len())
        })
        .collect();
    out.sort_by(|a, b| {
        b.0.norm()
            .partial_cmp(&a.0.norm())
            .unwrap()
            .then(a.0.re.partial_cmp(&b.0.re).unwrap())
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
    out
}

fn spectrum_from_values(values: Vec<Complex64>, tol: &Tolerances) -> Spectrum {
    let radius = values.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let clusters = cluster_eigenvalues(&values, tol.cluster_rel * (1.0 + radius));
    let peripheral: Vec<(Complex64, usize)> = clusters
        .iter()
        .filter(|(z, _)| z.norm() >= radius - tol.eig_rel * (1.0 + radius))
        .cloned()
        .collect();
    Spectrum { eigenvalues: clusters, spectral_radius: radius, peripheral }
}

/// Clustered spectrum of a dense square matrix.
pub fn spectrum<W: Scalar>(m: &Matrix<W>, tol: &Tolerances) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), got: m.cols() });
    }
    let values = dense_eigenvalues(&m.to_dmatrix(), tol)?;
    Ok(spectrum_from_values(values, tol))
}

/// Clustered spectrum of a transfer matrix.
pub fn spectrum_of_bass<W: Scalar>(t: &BassMatrix<W>, tol: &Tolerances) -> Result<Spectrum> {
    let values = dense_eigenvalues(&t.to_dense().to_dmatrix(), tol)?;
    Ok(spectrum_from_values(values, tol))
}

/// Period of a strongly connected digraph: the gcd of all cycle lengths.
///
/// Returns 0 when the digraph has no arcs.
pub fn combinatorial_period(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    if n == 0 || adj.iter().all(|row| row.is_empty()) {
        return 0;
    }
    let mut level = vec![i64::MIN; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if level[w] == i64::MIN {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut g: i64 = 0;
    for v in 0..n {
        if level[v] == i64::MIN {
            continue;
        }
        for &w in &adj[v] {
            g = num::integer::gcd(g, (level[v] + 1 - level[w]).abs());
        }
    }
    g as usize
}

/// Outcome of checking Perron-Frobenius structure on one irreducible block.
#[derive(Debug, Clone, Serialize)]
pub struct PfReport {
    pub dim: usize,
    pub spectral_radius: f64,
    /// Number of eigenvalue clusters on the spectral circle.
    pub peripheral_count: usize,
    /// Peripheral centroids as (re, im) pairs.
    pub peripheral: Vec<(f64, f64)>,
    /// Whether the peripheral set matches radius times the full set of
    /// `peripheral_count`-th roots of unity.
    pub evenly_spaced: bool,
    /// Whether every peripheral cluster has multiplicity one.
    pub simple: bool,
    /// Normalized leading eigenvector (sums to one).
    pub eigenvector: Vec<f64>,
    /// Whether every eigenvector coordinate clears the positivity floor.
    pub eigenvector_positive: bool,
    /// Max-norm residual of the eigenvector equation relative to the radius.
    pub residual: f64,
    /// Gcd of cycle lengths in the support digraph.
    pub combinatorial_period: usize,
    /// Whether the combinatorial period equals the peripheral count.
    pub period_matches: bool,
    pub ok: bool,
}

/// Verifies Perron-Frobenius structure on an irreducible block.
///
/// Requires a strongly connected support digraph and positive spectral
/// radius. Checks that the peripheral spectrum is `r` times the full set of
/// `n`-th roots of unity for `n` the combinatorial period, that each
/// peripheral eigenvalue is simple, and that power iteration on `T + rI`
/// from the uniform vector converges to an entrywise positive eigenvector.
pub fn verify_pf<W: Scalar>(block: &BassMatrix<W>, tol: &Tolerances) -> Result<PfReport> {
    if !is_irreducible(block) {
        return Err(Error::InvalidArgument(
            "Perron-Frobenius verification needs a strongly connected block".into(),
        ));
    }
    let spec = spectrum_of_bass(block, tol)?;
    let r = spec.spectral_radius;
    if r <= 0.0 {
        return Err(Error::InvalidArgument(
            "Perron-Frobenius verification needs positive spectral radius".into(),
        ));
    }
    let n = spec.peripheral.len();

    // Match r * exp(2 pi i j / n) against distinct peripheral centroids.
    let tau = tol.eig_rel * (1.0 + r);
    let mut used = vec![false; n];
    let mut evenly_spaced = true;
    for j in 0..n {
        let angle = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let target = Complex64::new(r * angle.cos(), r * angle.sin());
        let hit = spec
            .peripheral
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|a, b| {
                let da = (a.1 .0 - target).norm();
                let db = (b.1 .0 - target).norm();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, (z, _))| (i, *z));
        match hit {
            Some((i, z)) if (z - target).norm() <= tau => used[i] = true,
            _ => {
                evenly_spaced = false;
                break;
            }
        }
    }
    let simple = spec.peripheral.iter().all(|&(_, m)| m == 1);

    let (eigenvector, residual) = perron_vector(block, r)?;
    let eigenvector_positive = eigenvector.iter().all(|&x| x > tol.positivity);

    let period = combinatorial_period(&block.support_successors());
    let period_matches = period == n;

    let ok = evenly_spaced && simple && eigenvector_positive && period_matches && residual <= 1e-8;
    Ok(PfReport {
        dim: block.dim(),
        spectral_radius: r,
        peripheral_count: n,
        peripheral: spec.peripheral.iter().map(|(z, _)| (z.re, z.im)).collect(),
        evenly_spaced,
        simple,
        eigenvector,
        eigenvector_positive,
        residual,
        combinatorial_period: period,
        period_matches,
        ok,
    })
}

/// Power iteration for the leading eigenvector of an irreducible block.
///
/// Iterates `x <- (T + rI) x` from the uniform vector; the shift makes the
/// leading eigenvalue `2r` strictly dominant for irreducible nonnegative
/// blocks of any period. Returns the vector normalized to unit sum together
/// with the relative max-norm residual of `Tx = rx`.
fn perron_vector<W: Scalar>(block: &BassMatrix<W>, r: f64) -> Result<(Vec<f64>, f64)> {
    let t: BassMatrix<f64> = block.convert();
    let dim = t.dim();
    let mut x = vec![1.0 / dim as f64; dim];
    let max_iters = 200 * dim + 2000;
    let mut last_delta = f64::INFINITY;
    for _ in 0..max_iters {
        let tx = t.apply(&x)?;
        let mut y: Vec<f64> = tx.iter().zip(&x).map(|(a, b)| a + r * b).collect();
        let sum: f64 = y.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::Numerical("power iteration collapsed to zero".into()));
        }
        for v in &mut y {
            *v /= sum;
        }
        last_delta = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        x = y;
        if last_delta <= 1e-14 {
            break;
        }
    }
    if last_delta > 1e-10 {
        return Err(Error::Numerical(format!(
            "power iteration stalled with step {last_delta:.3e}"
        )));
    }
    let tx = t.apply(&x)?;
    let scale = r * x.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let residual = tx
        .iter()
        .zip(&x)
        .map(|(a, b)| (a - r * b).abs())
        .fold(0.0f64, f64::max)
        / scale.max(f64::MIN_POSITIVE);
    Ok((x, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixture, Fixture};
    use crate::Rational;

    fn bass_f64(which: Fixture) -> BassMatrix<f64> {
        BassMatrix::build(&fixture::<f64>(which)).unwrap()
    }

    #[test]
    fn scc_splits_looped_triangles() {
        let t = bass_f64(Fixture::LoopedTriangles);
        let mut comps = strongly_connected_components(&t.support_successors());
        comps.sort();
        assert_eq!(comps, vec![vec![0], vec![1, 2, 3, 4, 5]]);
        assert!(!is_irreducible(&t));
        assert!(is_irreducible(&bass_f64(Fixture::SharedTriangles)));
    }

    #[test]
    fn zero_loop_is_irreducible_by_convention() {
        let t = bass_f64(Fixture::Loop { c: 0.0 });
        assert_eq!(t.dim(), 1);
        assert!(is_irreducible(&t));
    }

    #[test]
    fn shared_triangles_spectrum() {
        let t = bass_f64(Fixture::SharedTriangles);
        let spec = spectrum_of_bass(&t, &Tolerances::default()).unwrap();
        let r = 2.0f64.powf(1.0 / 3.0);
        assert!((spec.spectral_radius - r).abs() < 1e-9);
        // Three simple peripheral eigenvalues r, r w, r w^2 plus 0 with
        // multiplicity 2.
        assert_eq!(spec.peripheral.len(), 3);
        assert!(spec.peripheral.iter().all(|&(_, m)| m == 1));
        let zero = spec.eigenvalues.last().unwrap();
        assert!(zero.0.norm() < 1e-7);
        assert_eq!(zero.1, 2);
        assert_eq!(spec.eigenvalues.iter().map(|&(_, m)| m).sum::<usize>(), 5);
    }

    #[test]
    fn two_cycle_peripheral_pair() {
        let t = bass_f64(Fixture::TwoCycle { p: 1.0, q: 1.0 });
        let spec = spectrum_of_bass(&t, &Tolerances::default()).unwrap();
        assert!((spec.spectral_radius - 1.0).abs() < 1e-12);
        assert_eq!(spec.peripheral.len(), 2);
        let mut res: Vec<f64> = spec.peripheral.iter().map(|(z, _)| z.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((res[0] + 1.0).abs() < 1e-12 && (res[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decompose_looped_triangles_block_order() {
        let t = bass_f64(Fixture::LoopedTriangles);
        let dec = decompose(&t, &Tolerances::default()).unwrap();
        assert_eq!(dec.blocks.len(), 2);
        // The loop edge 0 feeds the triangle block, so the triangle block
        // must come first for prefixes to stay successor closed.
        assert_eq!(dec.blocks[0].edges, vec![1, 2, 3, 4, 5]);
        assert_eq!(dec.blocks[1].edges, vec![0]);
        let r = 2.0f64.powf(1.0 / 3.0);
        assert!((dec.blocks[0].radius - r).abs() < 1e-9);
        assert!((dec.blocks[1].radius - 1.0).abs() < 1e-12);
        assert!((dec.spectral_radius - r).abs() < 1e-9);
        assert!(!dec.blocks[0].subdominant);
        assert!(dec.blocks[1].subdominant);
        assert!(prefix_invariant(&t, &dec));
        assert_eq!(dec.peripheral_blocks(&Tolerances::default()), vec![0]);
    }

    #[test]
    fn decompose_irreducible_is_single_block() {
        let t = bass_f64(Fixture::SharedTriangles);
        let dec = decompose(&t, &Tolerances::default()).unwrap();
        assert_eq!(dec.blocks.len(), 1);
        assert_eq!(dec.blocks[0].edges, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn decompose_rational_matches_f64_structure() {
        let g = fixture::<Rational>(Fixture::LoopedTriangles);
        let t = BassMatrix::build(&g).unwrap();
        let dec = decompose(&t, &Tolerances::default()).unwrap();
        assert_eq!(dec.blocks.len(), 2);
        assert_eq!(dec.blocks[0].edges, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn period_of_shared_triangles_is_three() {
        let t = bass_f64(Fixture::SharedTriangles);
        assert_eq!(combinatorial_period(&t.support_successors()), 3);
        let two = bass_f64(Fixture::TwoCycle { p: 1.0, q: 1.0 });
        assert_eq!(combinatorial_period(&two.support_successors()), 2);
        let lp = bass_f64(Fixture::Loop { c: 1.0 });
        assert_eq!(combinatorial_period(&lp.support_successors()), 1);
    }

    #[test]
    fn verify_pf_shared_triangles() {
        let t = bass_f64(Fixture::SharedTriangles);
        let rep = verify_pf(&t, &Tolerances::default()).unwrap();
        assert!(rep.ok, "{rep:?}");
        assert_eq!(rep.peripheral_count, 3);
        assert_eq!(rep.combinatorial_period, 3);
        assert!(rep.evenly_spaced && rep.simple && rep.eigenvector_positive);
        assert!((rep.spectral_radius - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-9);
        assert!((rep.eigenvector.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verify_pf_two_cycle_period_two() {
        let t = bass_f64(Fixture::TwoCycle { p: 2.0, q: 3.0 });
        let rep = verify_pf(&t, &Tolerances::default()).unwrap();
        assert!(rep.ok, "{rep:?}");
        assert_eq!(rep.peripheral_count, 2);
        assert!((rep.spectral_radius - 6.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn verify_pf_rejects_reducible_and_zero_radius() {
        let t = bass_f64(Fixture::LoopedTriangles);
        assert!(verify_pf(&t, &Tolerances::default()).is_err());
        let z = bass_f64(Fixture::Loop { c: 0.0 });
        assert!(verify_pf(&z, &Tolerances::default()).is_err());
    }

    #[test]
    fn cluster_merges_conjugate_noise() {
        let vals = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1e-8, 3e-8),
            Complex64::new(-1e-8, -3e-8),
        ];
        let out = cluster_eigenvalues(&vals, 1e-6);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].1, 1);
        assert_eq!(out[1].1, 2);
        assert!(out[1].0.norm() < 1e-9);
    }
}
