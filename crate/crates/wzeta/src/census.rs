//! Brute-force cycle census.
//!
//! Enumerates closed paths in the transition digraph, groups them into cycle
//! classes (closed paths up to rotation), and tabulates the weighted counting
//! functions. This module is deliberately independent of the operator
//! algebra: it never touches traces or determinants, which is what makes it
//! a usable oracle for them.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{KahanSum, Scalar};

/// A cycle class: a closed path up to rotation of the starting point.
///
/// `canonical` is the lexicographically minimal rotation of the edge-id
/// sequence. The class of a primitive cycle has `multiplicity` 1 and equals
/// its own `primitive_root`.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleClass<W> {
    pub canonical: Vec<usize>,
    pub weight: W,
    pub primitive_root: Vec<usize>,
    pub multiplicity: usize,
}

impl<W: Scalar> CycleClass<W> {
    pub fn length(&self) -> usize {
        self.canonical.len()
    }

    pub fn primitive_length(&self) -> usize {
        self.primitive_root.len()
    }

    pub fn is_primitive(&self) -> bool {
        self.multiplicity == 1
    }

    /// Weight of the primitive root, so `weight = primitive_weight^multiplicity`.
    pub fn primitive_weight(&self, g: &WeightedGraph<W>) -> W {
        cycle_weight(g, &self.primitive_root)
    }
}

/// Guards against combinatorial blow-up during enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    /// Maximum number of distinct cycle classes (default 10^7).
    pub max_classes: usize,
    /// Backstop on DFS steps, cheap insurance when classes stay few but
    /// closed paths do not.
    pub max_steps: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_classes: 10_000_000, max_steps: 400_000_000 }
    }
}

/// Weight of a closed path: the product of transition weights along the
/// sequence including the wrap-around pair.
fn cycle_weight<W: Scalar>(g: &WeightedGraph<W>, seq: &[usize]) -> W {
    let mut w = W::one();
    for i in 0..seq.len() {
        w = w * g.weight(seq[i], seq[(i + 1) % seq.len()]);
    }
    w
}

/// Lexicographically minimal rotation. Every candidate starts at an
/// occurrence of the minimal edge id.
fn minimal_rotation(seq: &[usize]) -> Vec<usize> {
    let n = seq.len();
    let min = *seq.iter().min().expect("nonempty path");
    let mut best: Option<Vec<usize>> = None;
    for p in 0..n {
        if seq[p] != min {
            continue;
        }
        let rot: Vec<usize> = (0..n).map(|i| seq[(p + i) % n]).collect();
        if best.as_ref().is_none_or(|b| rot < *b) {
            best = Some(rot);
        }
    }
    best.expect("at least one rotation")
}

fn smallest_period(seq: &[usize]) -> usize {
    let n = seq.len();
    'outer: for p in 1..=n {
        if !n.is_multiple_of(p) {
            continue;
        }
        for i in p..n {
            if seq[i] != seq[i - p] {
                continue 'outer;
            }
        }
        return p;
    }
    n
}

struct Bucket {
    start: usize,
    max_len: usize,
    max_steps: u64,
}

impl Bucket {
    /// Collects canonical forms of all cycle classes whose minimal edge id is
    /// `start`. The DFS walks only edges >= start, so buckets are disjoint
    /// and can run on separate threads with a deterministic merged result.
    fn run(&self, succ: &[Vec<usize>], src_of: &[usize], dst_of: &[usize]) -> Result<BTreeSet<Vec<usize>>> {
        let mut found = BTreeSet::new();
        let mut steps = 0u64;
        let mut path = vec![self.start];
        self.dfs(succ, src_of, dst_of, &mut path, &mut found, &mut steps)?;
        Ok(found)
    }

    fn dfs(
        &self,
        succ: &[Vec<usize>],
        src_of: &[usize],
        dst_of: &[usize],
        path: &mut Vec<usize>,
        found: &mut BTreeSet<Vec<usize>>,
        steps: &mut u64,
    ) -> Result<()> {
        *steps += 1;
        if *steps > self.max_steps {
            return Err(Error::EnumerationCap(format!(
                "more than {} search steps at length cap {}",
                self.max_steps, self.max_len
            )));
        }
        let last = *path.last().expect("path nonempty");
        // the path closes if the wrap-around transition has nonzero weight
        if dst_of[last] == src_of[self.start] && succ[last].binary_search(&self.start).is_ok() {
            found.insert(minimal_rotation(path));
        }
        if path.len() == self.max_len {
            return Ok(());
        }
        for &next in &succ[last] {
            if next < self.start {
                continue;
            }
            path.push(next);
            self.dfs(succ, src_of, dst_of, path, found, steps)?;
            path.pop();
        }
        Ok(())
    }
}

/// Enumerates every cycle class of length at most `max_len` and nonzero
/// weight, each exactly once, sorted by (length, canonical sequence).
pub fn enumerate_cycles<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<Vec<CycleClass<W>>> {
    if max_len == 0 {
        return Err(Error::InvalidArgument("enumeration needs max_len >= 1".into()));
    }
    let dim = g.num_edges();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for (e, f, _) in g.transitions() {
        if g.dst(e) == g.src(f) {
            succ[e].push(f);
        }
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
    }
    let src_of: Vec<usize> = (0..dim).map(|e| g.src(e)).collect();
    let dst_of: Vec<usize> = (0..dim).map(|e| g.dst(e)).collect();

    let per_start = if dim == 0 { 1 } else { (limits.max_steps / dim as u64).max(1) };
    let buckets: Vec<Result<BTreeSet<Vec<usize>>>> = (0..dim)
        .into_par_iter()
        .map(|start| Bucket { start, max_len, max_steps: per_start }.run(&succ, &src_of, &dst_of))
        .collect();

    let mut classes = Vec::new();
    for bucket in buckets {
        for canonical in bucket? {
            if classes.len() >= limits.max_classes {
                return Err(Error::EnumerationCap(format!(
                    "more than {} cycle classes at length cap {}",
                    limits.max_classes, max_len
                )));
            }
            let period = smallest_period(&canonical);
            let root: Vec<usize> = canonical[..period].to_vec();
            let multiplicity = canonical.len() / period;
            // weight recomputed from the root, so w(c) = w(c0)^mu holds
            // bit-for-bit and the result is independent of discovery order
            let root_weight = cycle_weight(g, &root);
            let mut weight = W::one();
            for _ in 0..multiplicity {
                weight = weight * root_weight.clone();
            }
            if weight.is_zero() {
                continue;
            }
            classes.push(CycleClass { canonical, weight, primitive_root: root, multiplicity });
        }
    }
    classes.sort_by(|a, b| (a.length(), &a.canonical).cmp(&(b.length(), &b.canonical)));
    Ok(classes)
}

/// Weighted counting functions up to `max_len`, all exact sums over the
/// enumerated classes; index m runs 1..=max_len.
#[derive(Clone, Debug)]
pub struct CountTable<W> {
    pub max_len: usize,
    n_m: Vec<W>,
    theta: Vec<W>,
    psi: Vec<W>,
    pi: Vec<W>,
}

impl<W: Scalar> CountTable<W> {
    /// N_m: weighted count of length-m classes, each weighted by the length
    /// of its primitive root.
    pub fn n(&self, m: usize) -> W {
        self.n_m[m - 1].clone()
    }

    /// theta(m): primitive classes of length <= m, weight times length.
    pub fn theta(&self, m: usize) -> W {
        self.theta[m - 1].clone()
    }

    /// psi(m): all classes of length <= m, weight times primitive length.
    pub fn psi(&self, m: usize) -> W {
        self.psi[m - 1].clone()
    }

    /// pi(m): total weight of primitive classes of length <= m.
    pub fn pi(&self, m: usize) -> W {
        self.pi[m - 1].clone()
    }
}

pub fn count_table<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<CountTable<W>> {
    let classes = enumerate_cycles(g, max_len, limits)?;
    let mut n_sums: Vec<KahanSum<W>> = vec![KahanSum::new(); max_len];
    let mut theta_sums: Vec<KahanSum<W>> = vec![KahanSum::new(); max_len];
    let mut pi_sums: Vec<KahanSum<W>> = vec![KahanSum::new(); max_len];
    for class in &classes {
        let m = class.length();
        let root_len = W::from_usize(class.primitive_length()).expect("length fits");
        n_sums[m - 1].add(class.weight.clone() * root_len.clone());
        if class.is_primitive() {
            theta_sums[m - 1].add(class.weight.clone() * root_len);
            pi_sums[m - 1].add(class.weight.clone());
        }
    }
    let n_m: Vec<W> = n_sums.into_iter().map(|s| s.value()).collect();
    let mut theta = Vec::with_capacity(max_len);
    let mut psi = Vec::with_capacity(max_len);
    let mut pi = Vec::with_capacity(max_len);
    let mut theta_acc = KahanSum::new();
    let mut psi_acc = KahanSum::new();
    let mut pi_acc = KahanSum::new();
    for m in 0..max_len {
        theta_acc.add(theta_sums[m].value());
        psi_acc.add(n_m[m].clone());
        pi_acc.add(pi_sums[m].value());
        theta.push(theta_acc.value());
        psi.push(psi_acc.value());
        pi.push(pi_acc.value());
    }
    Ok(CountTable { max_len, n_m, theta, psi, pi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixture, Fixture};
    use num::BigRational;
    use crate::scalar::from_f64;

    fn limits() -> EnumerationLimits {
        EnumerationLimits::default()
    }

    #[test]
    fn loop_classes_up_to_three() {
        let g = fixture::<f64>(Fixture::Loop { c: 0.5 });
        let classes = enumerate_cycles(&g, 3, &limits()).unwrap();
        assert_eq!(classes.len(), 3);
        for (k, class) in classes.iter().enumerate() {
            assert_eq!(class.length(), k + 1);
            assert_eq!(class.multiplicity, k + 1);
            assert_eq!(class.primitive_root, vec![0]);
            assert!((class.weight - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn shared_triangles_short_classes() {
        let g = fixture::<f64>(Fixture::SharedTriangles);
        let classes = enumerate_cycles(&g, 3, &limits()).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].canonical, vec![0, 1, 3]);
        assert_eq!(classes[1].canonical, vec![0, 2, 4]);
        assert!(classes.iter().all(|c| c.is_primitive() && c.weight == 1.0));
    }

    #[test]
    fn shared_triangles_length_six_classes() {
        let g = fixture::<f64>(Fixture::SharedTriangles);
        let classes = enumerate_cycles(&g, 6, &limits()).unwrap();
        let sixes: Vec<_> = classes.iter().filter(|c| c.length() == 6).collect();
        assert_eq!(sixes.len(), 3);
        let primitive: Vec<_> = sixes.iter().filter(|c| c.is_primitive()).collect();
        assert_eq!(primitive.len(), 1);
        assert_eq!(primitive[0].canonical, vec![0, 1, 3, 0, 2, 4]);
        assert_eq!(sixes.iter().filter(|c| c.multiplicity == 2).count(), 2);
    }

    #[test]
    fn count_table_for_unit_loop() {
        let g = fixture::<f64>(Fixture::Loop { c: 1.0 });
        let t = count_table(&g, 5, &limits()).unwrap();
        for m in 1..=5 {
            assert_eq!(t.n(m), 1.0);
        }
        assert_eq!(t.theta(5), 1.0);
        assert_eq!(t.psi(5), 5.0);
        assert_eq!(t.pi(5), 1.0);
    }

    #[test]
    fn count_table_for_shared_triangles() {
        let g = fixture::<f64>(Fixture::SharedTriangles);
        let t = count_table(&g, 9, &limits()).unwrap();
        for m in 1..=9 {
            let expected = match m {
                3 => 6.0,
                6 => 12.0,
                9 => 24.0,
                _ => 0.0,
            };
            assert_eq!(t.n(m), expected, "N_{m}");
        }
        assert_eq!(t.psi(9), 42.0);
        assert_eq!(t.theta(9), 30.0);
        assert_eq!(t.pi(9), 5.0);
    }

    #[test]
    fn count_table_for_two_cycle() {
        let g = fixture::<f64>(Fixture::TwoCycle { p: 2.0, q: 3.0 });
        let t = count_table(&g, 4, &limits()).unwrap();
        assert_eq!(t.n(2), 12.0);
        assert_eq!(t.n(4), 72.0);
        assert_eq!(t.n(1), 0.0);
        assert_eq!(t.n(3), 0.0);
        assert_eq!(t.theta(4), 12.0);
        assert_eq!(t.pi(4), 6.0);
    }

    #[test]
    fn rational_census_is_exact() {
        let g = fixture::<BigRational>(Fixture::SharedTriangles);
        let t = count_table(&g, 12, &limits()).unwrap();
        assert_eq!(t.n(12), from_f64::<BigRational>(48.0));
        assert_eq!(t.psi(12), from_f64::<BigRational>(90.0));
    }

    #[test]
    fn zero_weight_transitions_prune_cycles() {
        let g = fixture::<f64>(Fixture::Loop { c: 0.0 });
        let classes = enumerate_cycles(&g, 4, &limits()).unwrap();
        assert!(classes.is_empty());
    }

    #[test]
    fn class_cap_aborts_enumeration() {
        let g = fixture::<f64>(Fixture::SharedTriangles);
        let tight = EnumerationLimits { max_classes: 2, max_steps: 1_000_000 };
        assert!(matches!(enumerate_cycles(&g, 9, &tight), Err(Error::EnumerationCap(_))));
    }

    #[test]
    fn primitive_root_is_idempotent() {
        let g = fixture::<f64>(Fixture::LoopedTriangles);
        for class in enumerate_cycles(&g, 8, &limits()).unwrap() {
            assert_eq!(smallest_period(&class.primitive_root), class.primitive_root.len());
            assert_eq!(class.length(), class.multiplicity * class.primitive_length());
            let root_w = class.primitive_weight(&g);
            assert!((class.weight - root_w.powi(class.multiplicity as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn minimal_rotation_starts_at_minimum() {
        assert_eq!(minimal_rotation(&[3, 1, 2]), vec![1, 2, 3]);
        assert_eq!(minimal_rotation(&[2, 1, 2, 1]), vec![1, 2, 1, 2]);
        assert_eq!(minimal_rotation(&[0, 2, 0, 1]), vec![0, 1, 0, 2]);
    }
}
