//! Prime-geodesic counting parameters and asymptotic verification.
//!
//! The weighted count N_m grows like r^m times a periodic factor determined
//! by the blocks whose spectral radius attains the global r: each such block
//! contributes n_k peripheral eigenvalues r e^{2 pi i j / n_k} whose power
//! sums give n_k r^m when n_k divides m and cancel otherwise. Everything
//! below the spectral circle is exponentially smaller, so the residual
//! N_m - r^m sum n_k [n_k | m] decays at a geometric rate. The cumulative
//! functions theta, psi, pi inherit the growth r^{nK} C along multiples of
//! K = lcm(n_k) with C = sum n_k r^{n_k} / (r^{n_k} - 1) once r exceeds one.

use num::BigRational;
use num::{FromPrimitive, ToPrimitive, Zero};
use serde::Serialize;

use crate::bass::BassMatrix;
use crate::census::{count_table, enumerate_cycles, EnumerationLimits};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::Scalar;
use crate::spectral::{decompose, spectrum_of_bass, Tolerances};

/// One block attaining the global spectral radius.
#[derive(Debug, Clone, Serialize)]
pub struct PeripheralComponent {
    /// Index into the block decomposition order.
    pub block: usize,
    /// Peripheral eigenvalue count of that block.
    pub period: usize,
}

/// Growth parameters of the counting sequence.
#[derive(Debug, Clone, Serialize)]
pub struct PgtParameters {
    /// Global spectral radius.
    pub r: f64,
    /// Blocks at the global radius with their peripheral counts.
    pub components: Vec<PeripheralComponent>,
    /// Number of such blocks.
    pub s: usize,
    /// Least common multiple of the peripheral counts.
    pub period_lcm: usize,
    /// Sum of n_k r^{n_k} / (r^{n_k} - 1); defined only when r > 1.
    pub c_constant: Option<f64>,
    /// Distance from r down to the largest subperipheral eigenvalue modulus,
    /// or r itself when nothing lies below the spectral circle.
    pub eps_gap: f64,
}

/// Extracts the growth parameters from the block decomposition.
///
/// Errors with [`Error::DegenerateSpectrum`] when the spectral radius
/// vanishes, since a nilpotent transfer matrix has no growth to describe.
pub fn pgt_parameters<W: Scalar>(g: &WeightedGraph<W>) -> Result<PgtParameters> {
    let t = BassMatrix::build(g)?;
    let tol = Tolerances::default();
    let dec = decompose(&t, &tol)?;
    let r = dec.spectral_radius;
    if r <= 0.0 {
        return Err(Error::DegenerateSpectrum(
            "counting asymptotics need positive spectral radius".into(),
        ));
    }
    let mut components = Vec::new();
    for (i, block) in dec.blocks.iter().enumerate() {
        if block.subdominant {
            continue;
        }
        let spec = spectrum_of_bass(&block.matrix, &tol)?;
        components.push(PeripheralComponent { block: i, period: spec.peripheral.len() });
    }
    let s = components.len();
    let period_lcm = components.iter().fold(1usize, |k, c| num::integer::lcm(k, c.period));
    let c_constant = if r > 1.0 + 1e-9 {
        Some(
            components
                .iter()
                .map(|c| {
                    let rn = r.powi(c.period as i32);
                    c.period as f64 * rn / (rn - 1.0)
                })
                .sum(),
        )
    } else {
        None
    };

    let full = spectrum_of_bass(&t, &tol)?;
    let band = tol.eig_rel * (1.0 + r);
    let sub_max = full
        .eigenvalues
        .iter()
        .map(|(z, _)| z.norm())
        .filter(|&m| m < r - band)
        .fold(0.0f64, f64::max);
    let eps_gap = if full.eigenvalues.iter().any(|(z, _)| z.norm() < r - band) {
        r - sub_max
    } else {
        r
    };

    Ok(PgtParameters { r, components, s, period_lcm, c_constant, eps_gap })
}

fn rat_pow(x: &BigRational, mut e: usize) -> BigRational {
    let mut base = x.clone();
    let mut acc = BigRational::from_usize(1).unwrap();
    while e > 0 {
        if e & 1 == 1 {
            acc *= base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.abs().max(1);
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            out.push(n / d);
        }
        d += 1;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Tries to recover r^{period} of one block as an exact rational.
///
/// The block polynomial det(1 - uT_k) of an irreducible block of period n
/// has nonzero coefficients only at powers of u^n, so it reads as Q(u^n).
/// Its smallest positive root is r^{-n}; when that root is rational the
/// rational-root theorem finds it, and a float guard picks the right one.
fn exact_block_growth<W: Scalar>(block: &BassMatrix<W>, period: usize, r: f64) -> Option<BigRational> {
    if period == 0 {
        return None;
    }
    let coeffs = block.fredholm_coeffs(block.dim());
    let mut exact: Vec<BigRational> = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        exact.push(c.to_exact()?);
    }
    let deg = exact.iter().rposition(|c| !c.is_zero())?;
    if deg == 0 || deg % period != 0 {
        return None;
    }
    if exact.iter().enumerate().any(|(j, c)| j <= deg && j % period != 0 && !c.is_zero()) {
        return None;
    }
    let q: Vec<BigRational> = (0..=deg / period).map(|j| exact[j * period].clone()).collect();

    let denom_lcm = q
        .iter()
        .fold(num::BigInt::from(1), |l, c| num::integer::lcm(l, c.denom().clone()));
    let ints: Vec<num::BigInt> =
        q.iter().map(|c| (c * BigRational::from_integer(denom_lcm.clone())).to_integer()).collect();
    let a0 = ints[0].to_i64()?;
    let ad = ints[q.len() - 1].to_i64()?;
    if a0 == 0 || ad == 0 {
        return None;
    }

    let target = r.powi(period as i32);
    for p in divisors(a0) {
        for qd in divisors(ad) {
            let root = BigRational::new(p.into(), qd.into());
            let value = q.iter().rev().fold(BigRational::zero(), |acc, c| acc * root.clone() + c);
            if !value.is_zero() {
                continue;
            }
            let growth = root.recip();
            let gf = growth.to_f64()?;
            if (gf - target).abs() <= 1e-6 * (1.0 + target.abs()) {
                return Some(growth);
            }
        }
    }
    None
}

/// Residuals of the leading-term model against the censused counts.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub parameters: PgtParameters,
    pub max_len: usize,
    /// Decay base r - eps_gap / 2 used to normalize residuals.
    pub base: f64,
    /// N_m minus the peripheral model, m = 1..=max_len.
    pub residuals: Vec<f64>,
    /// |residual(m)| / base^m.
    pub ratios: Vec<f64>,
    /// Largest ratio over the fitting half m <= max_len / 2.
    pub fitted_constant: f64,
    pub max_ratio: f64,
    /// Whether the model term was evaluated in exact arithmetic.
    pub exact_model: bool,
    pub ok: bool,
}

/// Fits |N_m - r^m sum n_k [n_k|m]| against a geometric decay bound.
///
/// The constant is fitted on the first half of the range and must cover the
/// second half, which fails exactly when the residuals grow faster than the
/// base. With exact scalars the model term r^m n_k is evaluated in rational
/// arithmetic whenever r^{n_k} is rational, making zero residuals exact.
pub fn pgt_fit<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<FitReport> {
    let parameters = pgt_parameters(g)?;
    let table = count_table(g, max_len, limits)?;
    let t = BassMatrix::build(g)?;
    let dec = decompose(&t, &Tolerances::default())?;
    let r = parameters.r;

    let exact_growths: Option<Vec<(usize, BigRational)>> = if W::EXACT {
        parameters
            .components
            .iter()
            .map(|c| {
                exact_block_growth(&dec.blocks[c.block].matrix, c.period, r)
                    .map(|g| (c.period, g))
            })
            .collect()
    } else {
        None
    };
    let exact_model = exact_growths.is_some();

    let mut residuals = Vec::with_capacity(max_len);
    for m in 1..=max_len {
        let residual = match &exact_growths {
            Some(growths) => {
                let mut model = BigRational::zero();
                for (n_k, growth) in growths {
                    if m % n_k == 0 {
                        model += BigRational::from_usize(*n_k).unwrap()
                            * rat_pow(growth, m / n_k);
                    }
                }
                let n_exact = table
                    .n(m)
                    .to_exact()
                    .ok_or_else(|| Error::Numerical("count not representable exactly".into()))?;
                (n_exact - model).to_f64().unwrap_or(f64::NAN)
            }
            None => {
                let model: f64 = parameters
                    .components
                    .iter()
                    .filter(|c| m % c.period == 0)
                    .map(|c| c.period as f64 * r.powi(m as i32))
                    .sum();
                table.n(m).to_f64().unwrap_or(f64::NAN) - model
            }
        };
        residuals.push(residual);
    }

    let base = r - parameters.eps_gap / 2.0;
    let ratios: Vec<f64> = residuals
        .iter()
        .enumerate()
        .map(|(i, &res)| res.abs() / base.powi(i as i32 + 1))
        .collect();
    let half = (max_len / 2).max(1);
    let fitted_constant = ratios[..half.min(ratios.len())].iter().copied().fold(0.0f64, f64::max);
    let max_ratio = ratios.iter().copied().fold(0.0f64, f64::max);
    let ok = ratios[half.min(ratios.len())..]
        .iter()
        .all(|&q| q <= fitted_constant * (1.0 + 1e-6) + 1e-9);
    Ok(FitReport {
        parameters,
        max_len,
        base,
        residuals,
        ratios,
        fitted_constant,
        max_ratio,
        exact_model,
        ok,
    })
}

/// One row of the cumulative-count convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub n: usize,
    /// m = n * lcm(n_k).
    pub m: usize,
    /// psi(m) / r^m.
    pub psi_ratio: f64,
    /// theta(m) / r^m.
    pub theta_ratio: f64,
    /// m * pi(m) / r^m.
    pub pi_ratio: f64,
}

/// Convergence of psi, theta, pi toward the constant C along multiples of K.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticTable {
    pub r: f64,
    pub period_lcm: usize,
    pub c_constant: f64,
    pub rows: Vec<AsymptoticRow>,
    /// Whether |ratio - C| is nonincreasing down the rows.
    pub psi_monotone: bool,
    pub theta_monotone: bool,
    pub pi_monotone: bool,
}

/// Tabulates psi(nK)/r^{nK}, theta(nK)/r^{nK} and nK pi(nK)/r^{nK} against C.
///
/// Requires spectral radius strictly above one; at or below that the
/// constant C is undefined and the comparison is vacuous, reported as
/// [`Error::HypothesisViolated`].
pub fn asymptotic_check<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<AsymptoticTable> {
    let parameters = pgt_parameters(g)?;
    let r = parameters.r;
    let c_constant = parameters.c_constant.ok_or_else(|| {
        Error::HypothesisViolated(format!(
            "cumulative asymptotics need spectral radius greater than one, got r = {r}"
        ))
    })?;
    let k = parameters.period_lcm;
    if max_len < k {
        return Err(Error::InvalidArgument(format!(
            "need max_len >= {k} to tabulate one period"
        )));
    }
    let table = count_table(g, max_len, limits)?;
    let mut rows = Vec::new();
    for n in 1..=max_len / k {
        let m = n * k;
        let rm = r.powi(m as i32);
        rows.push(AsymptoticRow {
            n,
            m,
            psi_ratio: table.psi(m).to_f64().unwrap_or(f64::NAN) / rm,
            theta_ratio: table.theta(m).to_f64().unwrap_or(f64::NAN) / rm,
            pi_ratio: m as f64 * table.pi(m).to_f64().unwrap_or(f64::NAN) / rm,
        });
    }
    let monotone = |pick: &dyn Fn(&AsymptoticRow) -> f64| {
        rows.windows(2).all(|w| {
            (pick(&w[1]) - c_constant).abs() <= (pick(&w[0]) - c_constant).abs() + 1e-12 * (1.0 + c_constant)
        })
    };
    let psi_monotone = monotone(&|row| row.psi_ratio);
    let theta_monotone = monotone(&|row| row.theta_ratio);
    let pi_monotone = monotone(&|row| row.pi_ratio);
    Ok(AsymptoticTable {
        r,
        period_lcm: k,
        c_constant,
        rows,
        psi_monotone,
        theta_monotone,
        pi_monotone,
    })
}

/// A pair of equal-length primitive classes sharing an oriented edge.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleCycleWitness {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub length: usize,
    pub shared_edge: usize,
    /// Common weight of the two classes.
    pub weight: f64,
}

/// Result of the shared-edge growth criterion.
#[derive(Debug, Clone, Serialize)]
pub struct DoubleCycleReport {
    pub witness: Option<DoubleCycleWitness>,
    pub spectral_radius: f64,
    /// 2^{1/length} when a witness exists.
    pub bound: Option<f64>,
    /// Whether r clears the bound (up to 1e-9).
    pub bound_satisfied: Option<bool>,
    /// Whether T^{length*n} maps the shared-edge indicator to 2^n times
    /// itself for n <= 5.
    pub power_identity: Option<bool>,
}

/// Searches for two distinct primitive classes of the same length, equal
/// weight at least one, sharing an oriented edge.
///
/// Two such cycles concatenate freely at the shared edge, producing at least
/// 2^n closed cycles of length n*l, which forces r >= 2^{1/l}. The witness,
/// the bound check, and the doubling identity on the shared-edge indicator
/// vector are all reported; absence of a witness is an outcome, not an
/// error.
pub fn double_cycle_criterion<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<DoubleCycleReport> {
    let t = BassMatrix::build(g)?;
    let spec = spectrum_of_bass(&t, &Tolerances::default())?;
    let r = spec.spectral_radius;

    let classes = enumerate_cycles(g, max_len, limits)?;
    let primitives: Vec<_> = classes.iter().filter(|c| c.is_primitive()).collect();
    let one = W::one();
    let mut witness = None;
    'outer: for i in 0..primitives.len() {
        for j in i + 1..primitives.len() {
            let (a, b) = (primitives[i], primitives[j]);
            if a.length() != b.length() {
                continue;
            }
            if a.weight != b.weight || a.weight < one {
                continue;
            }
            let shared = a
                .canonical
                .iter()
                .filter(|e| b.canonical.contains(e))
                .min()
                .copied();
            if let Some(edge) = shared {
                witness = Some(DoubleCycleWitness {
                    first: a.canonical.clone(),
                    second: b.canonical.clone(),
                    length: a.length(),
                    shared_edge: edge,
                    weight: a.weight.to_f64().unwrap_or(f64::NAN),
                });
                break 'outer;
            }
        }
    }

    let (bound, bound_satisfied, power_identity) = match &witness {
        Some(w) => {
            let bound = 2.0f64.powf(1.0 / w.length as f64);
            let satisfied = r >= bound - 1e-9;
            let doubling = doubling_identity(&t, w.shared_edge, w.length, 5)?;
            (Some(bound), Some(satisfied), Some(doubling))
        }
        None => (None, None, None),
    };

    Ok(DoubleCycleReport {
        witness,
        spectral_radius: r,
        bound,
        bound_satisfied,
        power_identity,
    })
}

/// Checks T^{l n} delta_e = 2^n delta_e for n up to `n_max`.
fn doubling_identity<W: Scalar>(
    t: &BassMatrix<W>,
    edge: usize,
    l: usize,
    n_max: usize,
) -> Result<bool> {
    let mut x = vec![W::zero(); t.dim()];
    x[edge] = W::one();
    for n in 1..=n_max {
        for _ in 0..l {
            x = t.apply(&x)?;
        }
        let expected = W::from_usize(1 << n).expect("small power of two");
        for (i, v) in x.iter().enumerate() {
            let target = if i == edge { expected.clone() } else { W::zero() };
            let diff = v.clone() - target;
            if W::EXACT {
                if !diff.is_zero() {
                    return Ok(false);
                }
            } else if diff.abs().to_f64().unwrap_or(f64::NAN) > 1e-9 * (1u64 << n) as f64 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixture, Fixture};
    use crate::Rational;

    fn lim() -> EnumerationLimits {
        EnumerationLimits::default()
    }

    #[test]
    fn parameters_shared_triangles() {
        let g = fixture::<f64>(Fixture::SharedTriangles);
        let p = pgt_parameters(&g).unwrap();
        let r = 2.0f64.powf(1.0 / 3.0);
        assert!((p.r - r).abs() < 1e-9);
        assert_eq!(p.s, 1);
        assert_eq!(p.components[0].period, 3);
        assert_eq!(p.period_lcm, 3);
        assert!((p.c_constant.unwrap() - 6.0).abs() < 1e-8);
        // Only zero eigenvalues sit below the circle, so the gap is r itself.
        assert!((p.eps_gap - r).abs() < 1e-7);
    }

    #[test]
    fn parameters_looped_triangles_ignore_slow_block() {
        let g = fixture::<f64>(Fixture::LoopedTriangles);
        let p = pgt_parameters(&g).unwrap();
        let r = 2.0f64.powf(1.0 / 3.0);
        assert!((p.r - r).abs() < 1e-9);
        assert_eq!(p.s, 1);
        assert_eq!(p.components[0].period, 3);
        assert!((p.c_constant.unwrap() - 6.0).abs() < 1e-8);
        // The loop eigenvalue 1 is the top of the subperipheral spectrum.
        assert!((p.eps_gap - (r - 1.0)).abs() < 1e-7);
    }

    #[test]
    fn parameters_unit_two_cycle_has_no_constant() {
        let g = fixture::<f64>(Fixture::TwoCycle { p: 1.0, q: 1.0 });
        let p = pgt_parameters(&g).unwrap();
        assert!((p.r - 1.0).abs() < 1e-12);
        assert_eq!(p.s, 1);
        assert_eq!(p.components[0].period, 2);
        assert_eq!(p.period_lcm, 2);
        assert!(p.c_constant.is_none());
    }

    #[test]
    fn parameters_reject_nilpotent() {
        let g = fixture::<f64>(Fixture::Loop { c: 0.0 });
        assert!(matches!(pgt_parameters(&g), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn fit_shared_triangles_rational_residuals_vanish() {
        let g = fixture::<Rational>(Fixture::SharedTriangles);
        let rep = pgt_fit(&g, 15, &lim()).unwrap();
        assert!(rep.exact_model);
        assert!(rep.residuals.iter().all(|&x| x == 0.0), "{:?}", rep.residuals);
        assert!(rep.ok);
    }

    #[test]
    fn fit_looped_triangles_residual_is_one() {
        let g = fixture::<Rational>(Fixture::LoopedTriangles);
        let rep = pgt_fit(&g, 9, &lim()).unwrap();
        assert!(rep.exact_model);
        assert!(rep.residuals.iter().all(|&x| x == 1.0), "{:?}", rep.residuals);
        assert!(rep.ok);
        assert!((rep.base - (2.0f64.powf(1.0 / 3.0) + 1.0) / 2.0).abs() < 1e-7);
    }

    #[test]
    fn fit_loop_weight_two() {
        let g = fixture::<f64>(Fixture::Loop { c: 2.0 });
        let rep = pgt_fit(&g, 8, &lim()).unwrap();
        assert_eq!(rep.parameters.components[0].period, 1);
        assert!(rep.residuals.iter().all(|&x| x.abs() < 1e-9));
        assert!(rep.ok);
    }

    #[test]
    fn asymptotics_shared_triangles() {
        let g = fixture::<f64>(Fixture::SharedTriangles);
        let t = asymptotic_check(&g, 9, &lim()).unwrap();
        assert_eq!(t.period_lcm, 3);
        assert!((t.c_constant - 6.0).abs() < 1e-8);
        let psi: Vec<f64> = t.rows.iter().map(|row| row.psi_ratio).collect();
        assert!((psi[0] - 3.0).abs() < 1e-9);
        assert!((psi[1] - 4.5).abs() < 1e-9);
        assert!((psi[2] - 5.25).abs() < 1e-9);
        let pi: Vec<f64> = t.rows.iter().map(|row| row.pi_ratio).collect();
        assert!((pi[2] - 5.625).abs() < 1e-9);
        assert!(t.psi_monotone);
    }

    #[test]
    fn asymptotics_loop_weight_two() {
        let g = fixture::<f64>(Fixture::Loop { c: 2.0 });
        let t = asymptotic_check(&g, 6, &lim()).unwrap();
        assert_eq!(t.period_lcm, 1);
        assert!((t.c_constant - 2.0).abs() < 1e-12);
        for row in &t.rows {
            let expected = 2.0 - 2.0f64.powi(1 - row.m as i32);
            assert!((row.psi_ratio - expected).abs() < 1e-12);
        }
        assert!(t.psi_monotone);
    }

    #[test]
    fn asymptotics_reject_radius_one() {
        let g = fixture::<f64>(Fixture::TwoCycle { p: 1.0, q: 1.0 });
        assert!(matches!(
            asymptotic_check(&g, 8, &lim()),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn double_cycle_witness_on_shared_triangles() {
        let g = fixture::<Rational>(Fixture::SharedTriangles);
        let rep = double_cycle_criterion(&g, 3, &lim()).unwrap();
        let w = rep.witness.expect("witness");
        assert_eq!(w.first, vec![0, 1, 3]);
        assert_eq!(w.second, vec![0, 2, 4]);
        assert_eq!(w.shared_edge, 0);
        assert_eq!(w.length, 3);
        assert_eq!(rep.bound_satisfied, Some(true));
        assert_eq!(rep.power_identity, Some(true));
        assert!((rep.spectral_radius - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn double_cycle_no_witness_cases() {
        let g2 = fixture::<f64>(Fixture::TwoCycle { p: 1.0, q: 1.0 });
        let rep = double_cycle_criterion(&g2, 4, &lim()).unwrap();
        assert!(rep.witness.is_none() && rep.bound.is_none());
        assert!((rep.spectral_radius - 1.0).abs() < 1e-12);

        let g1 = fixture::<f64>(Fixture::Loop { c: 1.0 });
        let rep = double_cycle_criterion(&g1, 3, &lim()).unwrap();
        assert!(rep.witness.is_none());
    }

    #[test]
    fn double_cycle_witness_in_reducible_graph() {
        let g = fixture::<f64>(Fixture::LoopedTriangles);
        let rep = double_cycle_criterion(&g, 3, &lim()).unwrap();
        let w = rep.witness.expect("witness");
        assert_eq!(w.shared_edge, 1);
        assert_eq!(rep.power_identity, Some(true));
    }

    #[test]
    fn exact_growth_extraction() {
        let g = fixture::<Rational>(Fixture::SharedTriangles);
        let t = BassMatrix::build(&g).unwrap();
        let growth = exact_block_growth(&t, 3, 2.0f64.powf(1.0 / 3.0)).unwrap();
        assert_eq!(growth, BigRational::from_usize(2).unwrap());
        let g2 = fixture::<Rational>(Fixture::TwoCycle { p: 2.0, q: 3.0 });
        let t2 = BassMatrix::build(&g2).unwrap();
        let growth = exact_block_growth(&t2, 2, 6.0f64.sqrt()).unwrap();
        assert_eq!(growth, BigRational::from_usize(6).unwrap());
    }
}
