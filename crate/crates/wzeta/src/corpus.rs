//! Seeded random inputs for property and acceptance tests.
//!
//! Every generator is a pure function of its seed: the same seed always
//! yields the same graph on every platform, which keeps failing cases
//! reproducible by seed alone. Weights are quarter-integer steps so that
//! conversion to exact rationals is lossless. Candidates whose edge digraph
//! would make a depth-10 cycle census explode are rejected up front by
//! bounding the number of length-at-most-10 walks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::WeightedGraph;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::translations::{build_family, Lattice, TranslationFamily};

/// Largest tolerated count of walks of length up to 10 in the edge digraph.
const WALK_CAP: u128 = 2_000_000;

fn node_names(count: usize, prefix: &str) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

fn quarter_weight(rng: &mut ChaCha8Rng) -> f64 {
    0.25 * rng.random_range(1..=8) as f64
}

/// Counts walks of length 1..=10 in the support digraph, saturating.
fn walk_count(g: &WeightedGraph<f64>) -> u128 {
    let dim = g.num_edges();
    let mut support = vec![0u128; dim * dim];
    for (e, f, _) in g.transitions() {
        support[f * dim + e] = 1;
    }
    let mut power = support.clone();
    let mut total: u128 = power.iter().sum();
    for _ in 2..=10 {
        let mut next = vec![0u128; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = power[i * dim + k];
                if a == 0 {
                    continue;
                }
                for j in 0..dim {
                    let b = support[k * dim + j];
                    if b != 0 {
                        next[i * dim + j] = next[i * dim + j].saturating_add(a.saturating_mul(b));
                    }
                }
            }
        }
        power = next;
        total = total.saturating_add(power.iter().sum::<u128>());
        if total > WALK_CAP {
            return total;
        }
    }
    total
}

fn draw_graph(rng: &mut ChaCha8Rng, max_edges: usize, zero_weights: bool) -> WeightedGraph<f64> {
    let n_nodes = rng.random_range(2..=5);
    let nodes = node_names(n_nodes, "v");
    let n_edges = rng.random_range(2..=max_edges);
    let endpoints: Vec<(String, String)> = (0..n_edges)
        .map(|_| {
            let s = rng.random_range(0..n_nodes);
            let t = rng.random_range(0..n_nodes);
            (nodes[s].clone(), nodes[t].clone())
        })
        .collect();
    let mut weights = Vec::new();
    for e in 0..n_edges {
        for f in 0..n_edges {
            if endpoints[e].1 != endpoints[f].0 {
                continue;
            }
            if zero_weights && rng.random_range(0..10) < 3 {
                continue;
            }
            weights.push((e, f, quarter_weight(rng)));
        }
    }
    WeightedGraph::new(nodes, endpoints, weights).expect("construction is structurally valid")
}

/// A random graph with at most 12 edges and quarter-step weights in
/// [0, 2], with roughly a third of the compatible transitions zeroed out.
pub fn random_graph(seed: u64) -> WeightedGraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = draw_graph(&mut rng, 12, true);
        if walk_count(&g) <= WALK_CAP {
            return g;
        }
    }
}

/// A reducible graph: two disjoint random graphs, usually joined by a
/// one-way bridge edge that creates no new cycles.
pub fn random_reducible(seed: u64) -> WeightedGraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let a = draw_graph(&mut rng, 6, true);
        let b = draw_graph(&mut rng, 6, true);
        let a_nodes = a.nodes().len();
        let a_edges = a.num_edges();
        let mut nodes = node_names(a_nodes, "a");
        nodes.extend(node_names(b.nodes().len(), "b"));
        let mut endpoints: Vec<(String, String)> = (0..a.num_edges())
            .map(|e| (format!("a{}", a.src(e)), format!("a{}", a.dst(e))))
            .collect();
        endpoints.extend(
            (0..b.num_edges()).map(|e| (format!("b{}", b.src(e)), format!("b{}", b.dst(e)))),
        );
        let mut weights: Vec<(usize, usize, f64)> =
            a.weight_entries().map(|(e, f, w)| (e, f, *w)).collect();
        weights.extend(b.weight_entries().map(|(e, f, w)| (e + a_edges, f + a_edges, *w)));
        if rng.random_range(0..10) < 7 {
            let from = rng.random_range(0..a_nodes);
            let to = rng.random_range(0..b.nodes().len());
            let bridge = endpoints.len();
            endpoints.push((format!("a{from}"), format!("b{to}")));
            for e in 0..a.num_edges() {
                if a.dst(e) == from {
                    weights.push((e, bridge, quarter_weight(&mut rng)));
                }
            }
            for f in 0..b.num_edges() {
                if b.src(f) == to {
                    weights.push((bridge, f + a_edges, quarter_weight(&mut rng)));
                }
            }
        }
        let g = WeightedGraph::new(nodes, endpoints, weights)
            .expect("construction is structurally valid");
        if walk_count(&g) <= WALK_CAP {
            return g;
        }
    }
}

/// A strongly connected graph: a directed node cycle plus random chords,
/// every compatible transition carrying a positive quarter-step weight.
///
/// All nodes keep in- and out-degree at least one, so the edge digraph is
/// strongly connected exactly because the node digraph is.
pub fn random_strongly_connected(seed: u64) -> WeightedGraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..10_000 {
        let n_nodes = rng.random_range(1..=4);
        let nodes = node_names(n_nodes, "v");
        let mut endpoints: Vec<(String, String)> = (0..n_nodes)
            .map(|i| (nodes[i].clone(), nodes[(i + 1) % n_nodes].clone()))
            .collect();
        let chords = if attempt < 9_000 { rng.random_range(0..=5) } else { 0 };
        for _ in 0..chords {
            let s = rng.random_range(0..n_nodes);
            let t = rng.random_range(0..n_nodes);
            endpoints.push((nodes[s].clone(), nodes[t].clone()));
        }
        let mut weights = Vec::new();
        for e in 0..endpoints.len() {
            for f in 0..endpoints.len() {
                if endpoints[e].1 == endpoints[f].0 {
                    weights.push((e, f, quarter_weight(&mut rng)));
                }
            }
        }
        let g = WeightedGraph::new(nodes, endpoints, weights)
            .expect("construction is structurally valid");
        if walk_count(&g) <= WALK_CAP {
            return g;
        }
    }
    unreachable!("a bare directed cycle always passes the walk bound")
}

/// The reference two-generator family: the shared-triangles transfer matrix
/// tensored with the identity on one axis, identity tensored with the unit
/// two-cycle transfer matrix on the other.
pub fn tensor_family<W: Scalar>(lattice: Lattice) -> TranslationFamily<W> {
    let a = crate::bass::BassMatrix::build(&crate::graph::fixture::<W>(
        crate::graph::Fixture::SharedTriangles,
    ))
    .expect("fixture is valid")
    .to_dense();
    let b = crate::bass::BassMatrix::build(&crate::graph::fixture::<W>(
        crate::graph::Fixture::TwoCycle { p: 1.0, q: 1.0 },
    ))
    .expect("fixture is valid")
    .to_dense();
    let g1 = a.kronecker(&Matrix::identity(2));
    let g2 = Matrix::<W>::identity(5).kronecker(&b);
    build_family(vec![g1, g2], lattice).expect("tensor factors commute")
}

/// The index-two sublattice of Z^2 of points with even coordinate sum.
pub fn even_sum_lattice() -> Lattice {
    Lattice::new(vec![vec![1, 0], vec![1, 2]]).expect("nonsingular")
}
