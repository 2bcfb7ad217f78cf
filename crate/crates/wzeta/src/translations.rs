//! Commuting translation-operator families over a sublattice of Z^d.
//!
//! A family consists of pairwise commuting nonnegative square matrices
//! G_1..G_d indexed by the standard basis, together with a finite-index
//! subgroup L of Z^d. For k in the monoid N^d(L) of lattice points with
//! positive coordinates, T_k = prod G_j^{k_j} and N(k) = tr T_k. The
//! generating function T(u) = sum u^k T_k is rational: splitting each
//! exponent as k_j = r_j + q_j m_j, with m_j the minimal period of the j-th
//! axis inside L, gives T(u) = (sum over residues r of u^r T_r) times
//! prod_j (1 - u_j^{m_j} T_{m_j e_j})^{-1}. Simultaneous triangularization
//! of the family exhibits tr T_k = sum m(chi) z_chi^k over finitely many
//! quasicharacter tuples z_chi, which is the counting identity everything
//! here verifies.

use num::{BigRational, FromPrimitive, Signed, ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::{Complex64, Matrix};
use crate::scalar::{from_f64, Scalar};
use crate::spectral::Tolerances;

/// Largest residue-box volume enumerated when listing lattice residues.
const RESIDUE_CAP: usize = 1_000_000;

fn rat(n: i64) -> BigRational {
    BigRational::from_i64(n).expect("integer fits")
}

/// Exact determinant of a small rational matrix by fraction-free pivoting.
fn rational_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::from_i64(1).unwrap();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].clone().recip();
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            let factor = row[col].clone() * inv.clone();
            for (dst, src) in row.iter_mut().zip(&pivot_row).skip(col) {
                *dst -= factor.clone() * src.clone();
            }
        }
    }
    det
}

/// Exact inverse of a small rational matrix; `None` when singular.
fn rational_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| rat((i == j) as i64)).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let pivot_inv = a[col][col].clone().recip();
        for c in 0..n {
            a[col][c] *= pivot_inv.clone();
            inv[col][c] *= pivot_inv.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let sa = factor.clone() * a[col][c].clone();
                a[r][c] -= sa;
                let si = factor.clone() * inv[col][c].clone();
                inv[r][c] -= si;
            }
        }
    }
    Some(inv)
}

/// A finite-index subgroup of Z^d given by generator columns.
#[derive(Debug, Clone)]
pub struct Lattice {
    d: usize,
    gens: Vec<Vec<i64>>,
    inverse: Vec<Vec<BigRational>>,
    det_abs: u64,
    periods: Vec<usize>,
}

impl Lattice {
    /// Builds a lattice from a d x d integer matrix, given as rows, whose
    /// columns generate the subgroup.
    pub fn new(gens: Vec<Vec<i64>>) -> Result<Self> {
        let d = gens.len();
        if d == 0 || gens.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidArgument(
                "lattice generators must form a square matrix".into(),
            ));
        }
        let rational: Vec<Vec<BigRational>> =
            gens.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect();
        let det = rational_det(&rational);
        if det.is_zero() {
            return Err(Error::InvalidArgument(
                "lattice generators must have nonzero determinant".into(),
            ));
        }
        let det_abs = det
            .abs()
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("lattice determinant overflows".into()))?;
        let inverse = rational_inverse(&rational).expect("nonsingular by determinant check");
        let mut lattice = Lattice { d, gens, inverse, det_abs, periods: Vec::new() };
        let mut periods = Vec::with_capacity(d);
        for j in 0..d {
            let mut axis = vec![0i64; d];
            let mut found = None;
            for m in 1..=det_abs as i64 {
                if det_abs as i64 % m != 0 {
                    continue;
                }
                axis[j] = m;
                if lattice.contains(&axis)? {
                    found = Some(m as usize);
                    break;
                }
            }
            periods.push(found.expect("det * e_j always lies in the lattice"));
        }
        lattice.periods = periods;
        Ok(lattice)
    }

    /// The full lattice Z^d.
    pub fn standard(d: usize) -> Self {
        let gens: Vec<Vec<i64>> =
            (0..d).map(|i| (0..d).map(|j| (i == j) as i64).collect()).collect();
        Self::new(gens).expect("identity matrix is nonsingular")
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn generator_rows(&self) -> &[Vec<i64>] {
        &self.gens
    }

    /// Index of the subgroup in Z^d.
    pub fn index(&self) -> u64 {
        self.det_abs
    }

    /// Minimal positive m_j with m_j e_j in the lattice, per axis.
    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    /// Exact membership test by solving the generator system over Q.
    pub fn contains(&self, k: &[i64]) -> Result<bool> {
        if k.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: k.len() });
        }
        for row in &self.inverse {
            let coord = row
                .iter()
                .zip(k)
                .fold(BigRational::zero(), |acc, (c, &kj)| acc + c.clone() * rat(kj));
            if !coord.is_integer() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lattice points in the box prod [1, caps_j], in lexicographic order.
    pub fn members_in_box(&self, caps: &[usize]) -> Result<Vec<Vec<i64>>> {
        if caps.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: caps.len() });
        }
        let volume: usize = caps.iter().product();
        if volume > RESIDUE_CAP {
            return Err(Error::EnumerationCap(format!(
                "box volume {volume} exceeds cap {RESIDUE_CAP}"
            )));
        }
        let mut out = Vec::new();
        let mut k: Vec<i64> = vec![1; self.d];
        loop {
            if self.contains(&k)? {
                out.push(k.clone());
            }
            let mut axis = self.d;
            loop {
                if axis == 0 {
                    return Ok(out);
                }
                axis -= 1;
                if (k[axis] as usize) < caps[axis] {
                    k[axis] += 1;
                    for v in k.iter_mut().skip(axis + 1) {
                        *v = 1;
                    }
                    break;
                }
            }
        }
    }

    /// The residue set: lattice points in the box prod [1, m_j].
    pub fn residues(&self) -> Result<Vec<Vec<i64>>> {
        self.members_in_box(&self.periods.clone())
    }
}

/// One joint eigenvalue tuple of the family with its multiplicity.
#[derive(Debug, Clone)]
pub struct Quasicharacter {
    /// Coordinates z_1..z_d, all nonzero.
    pub z: Vec<Complex64>,
    pub mult: usize,
}

impl Quasicharacter {
    /// z^k = prod z_j^{k_j}.
    pub fn eval(&self, k: &[i64]) -> Complex64 {
        self.z
            .iter()
            .zip(k)
            .map(|(z, &e)| z.powi(e as i32))
            .fold(Complex64::new(1.0, 0.0), |a, b| a * b)
    }
}

/// Pairwise commuting nonnegative matrices indexed by the axes of Z^d.
#[derive(Debug, Clone)]
pub struct TranslationFamily<W: Scalar> {
    d: usize,
    dim: usize,
    generators: Vec<Matrix<W>>,
    lattice: Lattice,
}

/// Validates dimensions, nonnegativity and pairwise commutation.
///
/// Commutation is exact for exact scalars and within `1e-10 * scale` in
/// floating point, where scale is the product of the two entry maxima.
pub fn build_family<W: Scalar>(
    generators: Vec<Matrix<W>>,
    lattice: Lattice,
) -> Result<TranslationFamily<W>> {
    let d = generators.len();
    if d == 0 {
        return Err(Error::InvalidArgument("family needs at least one generator".into()));
    }
    if d != lattice.rank() {
        return Err(Error::DimensionMismatch { expected: lattice.rank(), got: d });
    }
    let dim = generators[0].rows();
    if dim == 0 {
        return Err(Error::InvalidArgument("generators must be nonempty".into()));
    }
    for (i, g) in generators.iter().enumerate() {
        if !g.is_square() || g.rows() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: g.rows().max(g.cols()) });
        }
        if !g.is_entrywise_nonnegative() {
            return Err(Error::InvalidArgument(format!(
                "generator {i} has a negative entry"
            )));
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let ij = generators[i].mul(&generators[j])?;
            let ji = generators[j].mul(&generators[i])?;
            let deviation = ij.sub(&ji)?.max_abs();
            let scale = 1.0 + generators[i].max_abs() * generators[j].max_abs();
            let bad = if W::EXACT { deviation != 0.0 } else { deviation > 1e-10 * scale };
            if bad {
                return Err(Error::NonCommuting(format!(
                    "generators {i} and {j} do not commute (max deviation {deviation:.3e})"
                )));
            }
        }
    }
    Ok(TranslationFamily { d, dim, generators, lattice })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeDoc {
    gens: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    d: usize,
    dim: usize,
    generators: Vec<Vec<f64>>,
    lattice: LatticeDoc,
}

/// Parses a family document: generator matrices are row-major flat arrays,
/// lattice generators are given as rows whose columns generate the subgroup.
pub fn parse_family<W: Scalar>(text: &str) -> Result<TranslationFamily<W>> {
    let doc: FamilyDoc = serde_json::from_str(text)?;
    if doc.generators.len() != doc.d {
        return Err(Error::Schema(format!(
            "expected {} generator matrices, found {}",
            doc.d,
            doc.generators.len()
        )));
    }
    let mut generators = Vec::with_capacity(doc.d);
    for (i, flat) in doc.generators.iter().enumerate() {
        if flat.len() != doc.dim * doc.dim {
            return Err(Error::Schema(format!(
                "generator {i} has {} entries, expected {}",
                flat.len(),
                doc.dim * doc.dim
            )));
        }
        if flat.iter().any(|x| !x.is_finite()) {
            return Err(Error::Schema(format!("generator {i} has a nonfinite entry")));
        }
        let data: Vec<W> = flat.iter().map(|&x| from_f64(x)).collect();
        generators.push(Matrix::from_row_major(doc.dim, doc.dim, data)?);
    }
    build_family(generators, Lattice::new(doc.lattice.gens)?)
}

impl<W: Scalar> TranslationFamily<W> {
    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Matrix<W>] {
        &self.generators
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    fn require_member(&self, k: &[i64]) -> Result<()> {
        if !self.lattice.contains(k)? {
            return Err(Error::LatticeMembership(format!(
                "{k:?} is not in the translation lattice"
            )));
        }
        Ok(())
    }

    /// T_k = prod G_j^{k_j} for k in N_0^d intersected with the lattice;
    /// k = 0 gives the identity.
    pub fn translation_op(&self, k: &[i64]) -> Result<Matrix<W>> {
        if k.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: k.len() });
        }
        if k.iter().any(|&x| x < 0) {
            return Err(Error::InvalidArgument(format!(
                "translation exponents must be nonnegative, got {k:?}"
            )));
        }
        if k.iter().all(|&x| x == 0) {
            return Ok(Matrix::identity(self.dim));
        }
        self.require_member(k)?;
        let mut out = Matrix::identity(self.dim);
        for (g, &e) in self.generators.iter().zip(k) {
            if e > 0 {
                out = out.mul(&g.pow(e as u64)?)?;
            }
        }
        Ok(out)
    }

    /// N(k) = tr T_k for k in the lattice with every coordinate positive.
    pub fn n_of_k(&self, k: &[i64]) -> Result<W> {
        if k.iter().any(|&x| x < 1) {
            return Err(Error::InvalidArgument(format!(
                "counting needs every coordinate positive, got {k:?}"
            )));
        }
        Ok(self.translation_op(k)?.trace())
    }

    /// Spectral radii of the generators, used to gate series evaluation.
    pub fn generator_radii(&self) -> Result<Vec<f64>> {
        let tol = Tolerances::default();
        self.generators
            .iter()
            .map(|g| Ok(crate::spectral::spectrum(g, &tol)?.spectral_radius))
            .collect()
    }

    /// Truncated series sum_{k in N^d(L), k_j <= caps_j} u^k T_k in complex
    /// double precision.
    pub fn series_t(&self, u: &[Complex64], caps: &[usize]) -> Result<nalgebra::DMatrix<Complex64>> {
        if u.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: u.len() });
        }
        let mut pows: Vec<Vec<Matrix<f64>>> = Vec::with_capacity(self.d);
        for (j, g) in self.generators.iter().enumerate() {
            let gf: Matrix<f64> = g.convert();
            let mut axis = vec![Matrix::<f64>::identity(self.dim)];
            for e in 1..=caps[j] {
                let next = axis[e - 1].mul(&gf)?;
                axis.push(next);
            }
            pows.push(axis);
        }
        let mut acc = nalgebra::DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for k in self.lattice.members_in_box(caps)? {
            let mut term = pows[0][k[0] as usize].clone();
            for j in 1..self.d {
                term = term.mul(&pows[j][k[j] as usize])?;
            }
            let coeff = k
                .iter()
                .zip(u)
                .map(|(&e, uj)| uj.powi(e as i32))
                .fold(Complex64::new(1.0, 0.0), |a, b| a * b);
            for i in 0..self.dim {
                for l in 0..self.dim {
                    acc[(i, l)] += coeff * term[(i, l)];
                }
            }
        }
        Ok(acc)
    }
}

/// Max-norm deviation of T_k T_l from T_{k+l}.
#[derive(Debug, Clone)]
pub struct SemigroupReport {
    pub deviation: f64,
    pub exact: bool,
    pub ok: bool,
}

/// Checks the semigroup law on one pair of exponent vectors.
pub fn semigroup_check<W: Scalar>(
    fam: &TranslationFamily<W>,
    k: &[i64],
    l: &[i64],
) -> Result<SemigroupReport> {
    let prod = fam.translation_op(k)?.mul(&fam.translation_op(l)?)?;
    let sum: Vec<i64> = k.iter().zip(l).map(|(a, b)| a + b).collect();
    let direct = fam.translation_op(&sum)?;
    let diff = prod.sub(&direct)?;
    let deviation = diff.max_abs();
    let exact = diff.is_entrywise_nonnegative() && diff.max_abs() == 0.0;
    let scale = 1.0 + prod.max_abs();
    let ok = if W::EXACT { exact } else { deviation <= 1e-10 * scale };
    Ok(SemigroupReport { deviation, exact, ok })
}

/// T(u) in closed form: residue numerators over per-axis geometric
/// denominators.
#[derive(Debug, Clone)]
pub struct RationalOperatorFunction<W: Scalar> {
    pub periods: Vec<usize>,
    /// (r, T_r) for every residue r in the lattice box prod [1, m_j].
    pub residues: Vec<(Vec<i64>, Matrix<W>)>,
    /// T_{m_j e_j}, the denominator operator for axis j.
    pub denominators: Vec<Matrix<W>>,
}

/// Assembles the rational form of T(u) from periods and residues.
pub fn rational_t<W: Scalar>(fam: &TranslationFamily<W>) -> Result<RationalOperatorFunction<W>> {
    let periods = fam.lattice().periods().to_vec();
    let mut residues = Vec::new();
    for r in fam.lattice().residues()? {
        let op = fam.translation_op(&r)?;
        residues.push((r, op));
    }
    let mut denominators = Vec::with_capacity(fam.rank());
    for j in 0..fam.rank() {
        let mut axis = vec![0i64; fam.rank()];
        axis[j] = periods[j] as i64;
        denominators.push(fam.translation_op(&axis)?);
    }
    Ok(RationalOperatorFunction { periods, residues, denominators })
}

impl<W: Scalar> RationalOperatorFunction<W> {
    /// Evaluates (sum_r u^r T_r) prod_j (1 - u_j^{m_j} T_{m_j e_j})^{-1}.
    pub fn eval(&self, u: &[Complex64]) -> Result<nalgebra::DMatrix<Complex64>> {
        let d = self.periods.len();
        if u.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: u.len() });
        }
        let dim = self.denominators[0].rows();
        let mut numerator = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for (r, op) in &self.residues {
            let coeff = r
                .iter()
                .zip(u)
                .map(|(&e, uj)| uj.powi(e as i32))
                .fold(Complex64::new(1.0, 0.0), |a, b| a * b);
            let opc = op.to_complex();
            numerator += opc * coeff;
        }
        let mut value = numerator;
        for (j, den) in self.denominators.iter().enumerate() {
            let factor = nalgebra::DMatrix::<Complex64>::identity(dim, dim)
                - den.to_complex() * u[j].powi(self.periods[j] as i32);
            let inverse = factor.try_inverse().ok_or_else(|| {
                Error::SingularPoint(format!("denominator factor {j} is singular at this point"))
            })?;
            value *= inverse;
        }
        Ok(value)
    }
}

fn tuple_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0f64, f64::max)
}

fn cluster_tuples(tuples: &[Vec<Complex64>], linkage: f64) -> Vec<(Vec<Complex64>, usize)> {
    let n = tuples.len();
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
            if tuple_distance(&tuples[i], &tuples[j]) <= linkage {
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
    groups
        .values()
        .map(|members| {
            let d = tuples[0].len();
            let mut centroid = vec![Complex64::new(0.0, 0.0); d];
            for &i in members {
                for (c, z) in centroid.iter_mut().zip(&tuples[i]) {
                    *c += z;
                }
            }
            for c in &mut centroid {
                *c /= members.len() as f64;
            }
            (centroid, members.len())
        })
        .collect()
}

/// Deterministic sample of lattice points used to verify a joint spectrum.
fn verification_samples(lattice: &Lattice, count: usize) -> Result<Vec<Vec<i64>>> {
    let caps = vec![8usize; lattice.rank()];
    let mut members = lattice.members_in_box(&caps)?;
    members.sort_by_key(|k| (k.iter().sum::<i64>(), k.clone()));
    members.truncate(count);
    Ok(members)
}

/// Simultaneously triangularizes the family and reads off quasicharacters.
///
/// A seeded random positive combination of the generators is brought to
/// Schur form; the same unitary triangularizes every generator since the
/// family commutes, and the diagonals, read positionally, give the joint
/// eigenvalue tuples. Tuples are merged by single linkage, zero tuples are
/// dropped, and the result must reproduce tr T_k on sample points or the
/// whole procedure retries with a fresh seed.
pub fn joint_spectrum<W: Scalar>(fam: &TranslationFamily<W>) -> Result<Vec<Quasicharacter>> {
    let tol = Tolerances::default();
    if fam.dim() > tol.dim_cap {
        return Err(Error::InvalidArgument(format!(
            "joint spectrum capped at dimension {}, got {}",
            tol.dim_cap,
            fam.dim()
        )));
    }
    let dim = fam.dim();
    let complex: Vec<nalgebra::DMatrix<Complex64>> =
        fam.generators().iter().map(|g| g.to_complex()).collect();
    let scale = fam.generators().iter().map(|g| g.max_abs()).fold(0.0f64, f64::max);

    let samples = verification_samples(fam.lattice(), 10)?;
    let mut traces = Vec::with_capacity(samples.len());
    for k in &samples {
        traces.push(fam.n_of_k(k)?.to_f64().unwrap_or(f64::NAN));
    }

    let mut last_deviation = f64::NAN;
    for attempt in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7a31 + attempt);
        let coeffs: Vec<f64> = (0..fam.rank()).map(|_| rng.random_range(0.5..1.5)).collect();
        let mut combo = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for (c, g) in coeffs.iter().zip(&complex) {
            combo += g * Complex64::new(*c, 0.0);
        }
        let Some(schur) = combo.try_schur(f64::EPSILON, 200 * dim.max(10)) else {
            continue;
        };
        let (q, _) = schur.unpack();
        let qh = q.adjoint();

        let mut diagonals: Vec<Vec<Complex64>> = vec![Vec::with_capacity(fam.rank()); dim];
        let mut triangular = true;
        for g in &complex {
            let r = &qh * g * &q;
            let band = 1e-6 * (1.0 + scale);
            for i in 0..dim {
                for j in 0..i {
                    if r[(i, j)].norm() > band {
                        triangular = false;
                    }
                }
            }
            for (p, diag) in diagonals.iter_mut().enumerate() {
                diag.push(r[(p, p)]);
            }
        }
        if !triangular {
            continue;
        }

        let merged = cluster_tuples(&diagonals, 1e-6 * (1.0 + scale));
        let zero_floor = 1e-9 * (1.0 + scale);
        let mut quasis: Vec<Quasicharacter> = merged
            .into_iter()
            .filter(|(z, _)| z.iter().all(|c| c.norm() > zero_floor))
            .map(|(z, mult)| Quasicharacter { z, mult })
            .collect();
        quasis.sort_by(|a, b| {
            let na: f64 = a.z.iter().map(|z| z.norm()).sum();
            let nb: f64 = b.z.iter().map(|z| z.norm()).sum();
            nb.partial_cmp(&na)
                .unwrap()
                .then_with(|| {
                    for (x, y) in a.z.iter().zip(&b.z) {
                        let ord = x
                            .re
                            .partial_cmp(&y.re)
                            .unwrap()
                            .then(x.im.partial_cmp(&y.im).unwrap());
                        if ord != std::cmp::Ordering::Equal {
                            return ord;
                        }
                    }
                    std::cmp::Ordering::Equal
                })
        });

        let mut worst = 0.0f64;
        for (k, &trace) in samples.iter().zip(&traces) {
            let predicted: Complex64 = quasis
                .iter()
                .map(|q| q.eval(k) * q.mult as f64)
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b);
            let dev = (predicted - Complex64::new(trace, 0.0)).norm() / (1.0 + trace.abs());
            worst = worst.max(dev);
        }
        if worst <= 1e-6 {
            return Ok(quasis);
        }
        last_deviation = worst;
    }
    Err(Error::Numerical(format!(
        "joint spectrum verification failed (relative deviation {last_deviation:.3e}); \
         try exact arithmetic or a different seed"
    )))
}

/// Deviation summary of N(k) against the quasicharacter expansion.
#[derive(Debug, Clone)]
pub struct BuildingPgtReport {
    /// Per-axis exponent caps that bounded the sweep.
    pub caps: Vec<usize>,
    pub points_checked: usize,
    pub max_deviation: f64,
    pub ok: bool,
    /// Comparison at the largest checked point: N(k), the sum of the
    /// maximal-modulus terms, and their count.
    pub leading: Option<LeadingTermComparison>,
}

/// The largest-modulus quasicharacter terms at one exponent vector.
#[derive(Debug, Clone)]
pub struct LeadingTermComparison {
    pub k: Vec<i64>,
    pub n_value: f64,
    pub peripheral_sum: f64,
    pub peripheral_terms: usize,
    /// |N(k) - peripheral_sum| / (1 + |N(k)|).
    pub gap: f64,
}

/// Sweeps every lattice point in the cap box and compares N(k) with
/// sum m(chi) z^k at relative tolerance 1e-6.
pub fn verify_building_pgt<W: Scalar>(
    fam: &TranslationFamily<W>,
    caps: &[usize],
) -> Result<BuildingPgtReport> {
    let quasis = joint_spectrum(fam)?;
    let members = fam.lattice().members_in_box(caps)?;
    let mut max_deviation = 0.0f64;
    let mut ok = true;
    for k in &members {
        let n = fam.n_of_k(k)?.to_f64().unwrap_or(f64::NAN);
        let predicted: Complex64 = quasis
            .iter()
            .map(|q| q.eval(k) * q.mult as f64)
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b);
        let deviation = (predicted - Complex64::new(n, 0.0)).norm();
        max_deviation = max_deviation.max(deviation);
        if deviation > 1e-6 * (1.0 + n.abs()) {
            ok = false;
        }
    }
    let leading = members.last().map(|k| {
        let n = fam
            .n_of_k(k)
            .map(|x| x.to_f64().unwrap_or(f64::NAN))
            .unwrap_or(f64::NAN);
        let moduli: Vec<f64> = quasis.iter().map(|q| q.eval(k).norm()).collect();
        let top = moduli.iter().copied().fold(0.0f64, f64::max);
        let mut peripheral_sum = Complex64::new(0.0, 0.0);
        let mut peripheral_terms = 0;
        for (q, m) in quasis.iter().zip(&moduli) {
            if *m >= top * (1.0 - 1e-9) {
                peripheral_sum += q.eval(k) * q.mult as f64;
                peripheral_terms += q.mult;
            }
        }
        LeadingTermComparison {
            k: k.clone(),
            n_value: n,
            peripheral_sum: peripheral_sum.re,
            peripheral_terms,
            gap: (n - peripheral_sum.re).abs() / (1.0 + n.abs()),
        }
    });
    Ok(BuildingPgtReport {
        caps: caps.to_vec(),
        points_checked: members.len(),
        max_deviation,
        ok,
        leading,
    })
}

/// Z(u) at one point, evaluated through every available route.
#[derive(Debug, Clone)]
pub struct ZetaPoint {
    pub u: Vec<Complex64>,
    /// Trace of the rational closed form.
    pub rational: Complex64,
    /// Quasicharacter expansion value.
    pub quasicharacter: Complex64,
    /// Truncated series value, present when the point is well inside the
    /// domain of convergence.
    pub series: Option<Complex64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// Per-axis series cutoff from the contraction factor q = |u_j| r_j.
fn series_caps(q: &[f64], dim: usize) -> Vec<usize> {
    q.iter()
        .map(|&qj| {
            let from_decay = if qj > 1e-14 && qj < 1.0 {
                ((-13.0 * std::f64::consts::LN_10) / qj.ln()).ceil() as usize
            } else {
                0
            };
            from_decay.max(dim + 2).min(150)
        })
        .collect()
}

/// Evaluates Z(u) = tr T(u) by the rational formula, the quasicharacter
/// expansion, and (when max_j |u_j| r_j <= 0.7) the truncated series.
///
/// Points where some u_j^{m_j} z_j^{m_j} comes within 1e-9 of 1 are poles
/// of the closed form and are rejected before any evaluation.
pub fn zeta_multivariate<W: Scalar>(
    fam: &TranslationFamily<W>,
    u: &[Complex64],
) -> Result<ZetaPoint> {
    if u.len() != fam.rank() {
        return Err(Error::DimensionMismatch { expected: fam.rank(), got: u.len() });
    }
    let quasis = joint_spectrum(fam)?;
    let rational_form = rational_t(fam)?;
    let periods = &rational_form.periods;

    for (ci, q) in quasis.iter().enumerate() {
        for j in 0..fam.rank() {
            let factor = (u[j] * q.z[j]).powi(periods[j] as i32);
            if (factor - Complex64::new(1.0, 0.0)).norm() <= 1e-9 {
                return Err(Error::SingularPoint(format!(
                    "u_{j} hits the pole of quasicharacter {ci} (z_{j} = {} + {}i)",
                    q.z[j].re, q.z[j].im
                )));
            }
        }
    }

    let rational = rational_form.eval(u)?.trace();

    let mut quasicharacter = Complex64::new(0.0, 0.0);
    for q in &quasis {
        let mut numerator = Complex64::new(0.0, 0.0);
        for (r, _) in &rational_form.residues {
            let mut term = Complex64::new(1.0, 0.0);
            for j in 0..fam.rank() {
                term *= (u[j] * q.z[j]).powi(r[j] as i32);
            }
            numerator += term;
        }
        let mut denominator = Complex64::new(1.0, 0.0);
        for j in 0..fam.rank() {
            denominator *= Complex64::new(1.0, 0.0) - (u[j] * q.z[j]).powi(periods[j] as i32);
        }
        quasicharacter += numerator / denominator * q.mult as f64;
    }

    let radii = fam.generator_radii()?;
    let q_factors: Vec<f64> = radii.iter().zip(u).map(|(r, uj)| r * uj.norm()).collect();
    let series = if q_factors.iter().all(|&q| q <= 0.7) {
        let caps = series_caps(&q_factors, fam.dim());
        Some(fam.series_t(u, &caps)?.trace())
    } else {
        None
    };

    let mut max_deviation = (rational - quasicharacter).norm();
    if let Some(s) = series {
        max_deviation = max_deviation.max((rational - s).norm());
    }
    let tolerance = 1e-8 * (1.0 + rational.norm());
    let ok = max_deviation <= tolerance;
    Ok(ZetaPoint {
        u: u.to_vec(),
        rational,
        quasicharacter,
        series,
        max_deviation,
        tolerance,
        ok,
    })
}

/// Entrywise deviation between the rational form of T(u) and its truncated
/// series at one point inside the convergence gate.
pub fn rational_series_deviation<W: Scalar>(
    fam: &TranslationFamily<W>,
    u: &[Complex64],
) -> Result<f64> {
    let radii = fam.generator_radii()?;
    let q_factors: Vec<f64> = radii.iter().zip(u).map(|(r, uj)| r * uj.norm()).collect();
    if q_factors.iter().any(|&q| q > 0.7 + 1e-12) {
        return Err(Error::InvalidArgument(
            "series comparison needs max_j |u_j| r_j <= 0.7".into(),
        ));
    }
    let rational = rational_t(fam)?.eval(u)?;
    let caps = series_caps(&q_factors, fam.dim());
    let series = fam.series_t(u, &caps)?;
    let mut worst = 0.0f64;
    for i in 0..fam.dim() {
        for j in 0..fam.dim() {
            worst = worst.max((rational[(i, j)] - series[(i, j)]).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bass::BassMatrix;
    use crate::graph::{fixture, Fixture};
    use crate::Rational;

    fn bass_matrix<W: Scalar>(which: Fixture) -> Matrix<W> {
        BassMatrix::build(&fixture::<W>(which)).unwrap().to_dense()
    }

    /// G_1 = Bass(triangles) (x) I_2, G_2 = I_5 (x) Bass(two-cycle).
    fn tensor_family<W: Scalar>(lattice: Lattice) -> TranslationFamily<W> {
        let a: Matrix<W> = bass_matrix(Fixture::SharedTriangles);
        let b: Matrix<W> = bass_matrix(Fixture::TwoCycle { p: 1.0, q: 1.0 });
        let g1 = a.kronecker(&Matrix::identity(2));
        let g2 = Matrix::<W>::identity(5).kronecker(&b);
        build_family(vec![g1, g2], lattice).unwrap()
    }

    fn even_lattice() -> Lattice {
        Lattice::new(vec![vec![1, 0], vec![1, 2]]).unwrap()
    }

    #[test]
    fn lattice_membership_and_periods() {
        let l = Lattice::standard(2);
        assert_eq!(l.periods(), &[1, 1]);
        assert_eq!(l.index(), 1);
        assert!(l.contains(&[3, 5]).unwrap());

        let even = even_lattice();
        assert_eq!(even.index(), 2);
        assert_eq!(even.periods(), &[2, 2]);
        assert!(even.contains(&[1, 1]).unwrap());
        assert!(!even.contains(&[1, 0]).unwrap());
        assert_eq!(even.residues().unwrap(), vec![vec![1, 1], vec![2, 2]]);

        let doubled = Lattice::new(vec![vec![2]]).unwrap();
        assert_eq!(doubled.periods(), &[2]);
        assert_eq!(doubled.residues().unwrap(), vec![vec![2]]);
    }

    #[test]
    fn lattice_rejects_singular_generators() {
        assert!(Lattice::new(vec![vec![1, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn build_family_rejects_noncommuting() {
        let g1 = Matrix::from_row_major(2, 2, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        let g2 = Matrix::from_row_major(2, 2, vec![1.0, 1.0, 0.0, 2.0]).unwrap();
        match build_family(vec![g1, g2], Lattice::standard(2)) {
            Err(Error::NonCommuting(msg)) => assert!(msg.contains("0 and 1")),
            other => panic!("expected non-commuting error, got {other:?}"),
        }
    }

    #[test]
    fn tensor_family_builds_and_counts() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        assert_eq!(fam.dim(), 10);
        assert_eq!(fam.n_of_k(&[3, 2]).unwrap(), 12.0);
        assert_eq!(fam.n_of_k(&[3, 1]).unwrap(), 0.0);
        assert_eq!(fam.n_of_k(&[6, 4]).unwrap(), 24.0);
    }

    #[test]
    fn translation_op_identity_and_membership() {
        let fam = tensor_family::<f64>(even_lattice());
        let id = fam.translation_op(&[0, 0]).unwrap();
        assert_eq!(id[(3, 3)], 1.0);
        assert!(matches!(
            fam.translation_op(&[1, 0]),
            Err(Error::LatticeMembership(_))
        ));
        assert!(fam.translation_op(&[1, 1]).is_ok());
    }

    #[test]
    fn semigroup_law_exact_in_rational_mode() {
        let fam = tensor_family::<Rational>(Lattice::standard(2));
        let rep = semigroup_check(&fam, &[2, 1], &[1, 3]).unwrap();
        assert!(rep.ok && rep.exact);
    }

    #[test]
    fn rational_t_residues() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        let rt = rational_t(&fam).unwrap();
        assert_eq!(rt.periods, vec![1, 1]);
        assert_eq!(rt.residues.len(), 1);
        assert_eq!(rt.residues[0].0, vec![1, 1]);
        // T_(1,1) = G_1 G_2 has trace 0: tr A = 0, tr B = 0.
        assert_eq!(rt.residues[0].1.trace(), 0.0);

        let even = tensor_family::<f64>(even_lattice());
        let rt = rational_t(&even).unwrap();
        assert_eq!(rt.periods, vec![2, 2]);
        let rs: Vec<Vec<i64>> = rt.residues.iter().map(|(r, _)| r.clone()).collect();
        assert_eq!(rs, vec![vec![1, 1], vec![2, 2]]);
    }

    #[test]
    fn joint_spectrum_of_tensor_family() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        let quasis = joint_spectrum(&fam).unwrap();
        assert_eq!(quasis.len(), 6);
        assert!(quasis.iter().all(|q| q.mult == 1));
        let r = 2.0f64.powf(1.0 / 3.0);
        for q in &quasis {
            assert!((q.z[0].norm() - r).abs() < 1e-7, "{:?}", q.z);
            assert!((q.z[1].norm() - 1.0).abs() < 1e-7);
            assert!(q.z[1].im.abs() < 1e-7);
        }
        let plus: usize = quasis.iter().filter(|q| q.z[1].re > 0.0).count();
        assert_eq!(plus, 3);
    }

    #[test]
    fn joint_spectrum_single_generator_cases() {
        let g = bass_matrix::<f64>(Fixture::Loop { c: 0.75 });
        let fam = build_family(vec![g], Lattice::standard(1)).unwrap();
        let quasis = joint_spectrum(&fam).unwrap();
        assert_eq!(quasis.len(), 1);
        assert!((quasis[0].z[0].re - 0.75).abs() < 1e-12);

        let g3 = bass_matrix::<f64>(Fixture::SharedTriangles);
        let fam = build_family(vec![g3], Lattice::standard(1)).unwrap();
        let quasis = joint_spectrum(&fam).unwrap();
        assert_eq!(quasis.len(), 3);
        let r = 2.0f64.powf(1.0 / 3.0);
        for q in &quasis {
            assert!((q.z[0].norm() - r).abs() < 1e-7);
        }
    }

    #[test]
    fn building_pgt_tensor_family() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        let rep = verify_building_pgt(&fam, &[9, 6]).unwrap();
        assert!(rep.ok, "max deviation {}", rep.max_deviation);
        assert_eq!(rep.points_checked, 54);
        let leading = rep.leading.unwrap();
        assert_eq!(leading.k, vec![9, 6]);
        assert!((leading.n_value - 48.0).abs() < 1e-7);
        // All six quasicharacters sit at the same modulus at (9,6).
        assert_eq!(leading.peripheral_terms, 6);
        assert!(leading.gap < 1e-7);
    }

    #[test]
    fn zeta_three_way_agreement() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        let point = zeta_multivariate(&fam, &[Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.0)])
            .unwrap();
        assert!(point.ok, "deviation {}", point.max_deviation);
        assert!(point.series.is_some());
    }

    #[test]
    fn zeta_singularity_detection() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        let u1 = Complex64::new(2.0f64.powf(-1.0 / 3.0), 0.0);
        match zeta_multivariate(&fam, &[u1, Complex64::new(0.2, 0.0)]) {
            Err(Error::SingularPoint(msg)) => assert!(msg.contains("u_0")),
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn zeta_single_loop_closed_form() {
        let g = bass_matrix::<f64>(Fixture::Loop { c: 0.5 });
        let fam = build_family(vec![g], Lattice::standard(1)).unwrap();
        let point = zeta_multivariate(&fam, &[Complex64::new(0.3, 0.0)]).unwrap();
        let expected = 0.15 / (1.0 - 0.15);
        assert!((point.rational.re - expected).abs() < 1e-12);
        assert!(point.ok);
    }

    #[test]
    fn rational_vs_series_entrywise() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        let r = 2.0f64.powf(1.0 / 3.0);
        let u = [Complex64::new(0.7 / r, 0.0), Complex64::new(-0.3, 0.35)];
        let dev = rational_series_deviation(&fam, &u).unwrap();
        assert!(dev < 1e-8, "deviation {dev}");

        let even = tensor_family::<f64>(even_lattice());
        let dev = rational_series_deviation(&even, &u).unwrap();
        assert!(dev < 1e-8, "deviation {dev}");
    }

    #[test]
    fn series_gate_rejects_large_points() {
        let fam = tensor_family::<f64>(Lattice::standard(2));
        let u = [Complex64::new(0.9, 0.0), Complex64::new(0.9, 0.0)];
        assert!(rational_series_deviation(&fam, &u).is_err());
    }

    #[test]
    fn parse_family_roundtrip_and_schema_errors() {
        let text = r#"{
            "d": 1,
            "dim": 2,
            "generators": [[0.0, 1.0, 1.0, 0.0]],
            "lattice": {"gens": [[1]]}
        }"#;
        let fam = parse_family::<f64>(text).unwrap();
        assert_eq!(fam.dim(), 2);
        assert_eq!(fam.n_of_k(&[2]).unwrap(), 2.0);

        let bad = r#"{"d": 2, "dim": 2, "generators": [[0.0, 1.0, 1.0, 0.0]], "lattice": {"gens": [[1, 0], [0, 1]]}}"#;
        assert!(matches!(parse_family::<f64>(bad), Err(Error::Schema(_))));

        let unknown = r#"{"d": 1, "dim": 1, "generators": [[1.0]], "lattice": {"gens": [[1]]}, "extra": 3}"#;
        assert!(matches!(parse_family::<f64>(unknown), Err(Error::Json(_))));
    }

    #[test]
    fn d1_series_matches_log_derivative_data() {
        let g3 = fixture::<f64>(Fixture::SharedTriangles);
        let z = crate::zeta::ZetaFunction::new(&g3).unwrap();
        let series = z.log_derivative_series(20).unwrap();
        let u = Complex64::new(0.3, 0.0);
        let direct: f64 = series
            .iter()
            .enumerate()
            .map(|(i, n)| n * 0.3f64.powi(i as i32 + 1))
            .sum();

        let fam = build_family(vec![bass_matrix::<f64>(Fixture::SharedTriangles)], Lattice::standard(1))
            .unwrap();
        let point = zeta_multivariate(&fam, &[u]).unwrap();
        assert!(point.ok);
        // The series tail beyond order 20 is below 1e-8 at 2 u^3 = 0.054.
        assert!((point.rational.re - direct).abs() < 1e-6);
    }
}
