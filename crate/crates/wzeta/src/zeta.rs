//! The weighted zeta function of a graph and its verification reports.
//!
//! The zeta function is the Euler product over primitive cycle classes
//! Z(u) = prod (1 - w(c0) u^{l(c0)})^{-1}. Its reciprocal is the polynomial
//! det(1 - uT) for T the transfer matrix, so Z is stored through the inverse
//! polynomial only and evaluated as a reciprocal. The logarithmic derivative
//! u Z'/Z expands as sum N_m u^m with N_m the weighted cycle count, which is
//! what the verification routines compare against a brute-force census.

use crate::bass::BassMatrix;
use crate::census::{count_table, enumerate_cycles, CountTable, EnumerationLimits};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matrix::Complex64;
use crate::poly;
use crate::scalar::Scalar;

/// Reciprocal zeta polynomial det(1 - uT) with dense coefficients.
#[derive(Debug, Clone)]
pub struct ZetaFunction<W: Scalar> {
    inverse: Vec<W>,
    dim: usize,
}

impl<W: Scalar> ZetaFunction<W> {
    /// Builds the zeta function of a validated graph.
    pub fn new(g: &WeightedGraph<W>) -> Result<Self> {
        let t = BassMatrix::build(g)?;
        Ok(Self::from_transfer(&t))
    }

    /// Builds the zeta function from an already-built transfer matrix.
    pub fn from_transfer(t: &BassMatrix<W>) -> Self {
        ZetaFunction { inverse: t.fredholm_coeffs(t.dim()), dim: t.dim() }
    }

    /// Coefficients of Z(u)^{-1}, constant term first, length `dim + 1`.
    pub fn inverse_coeffs(&self) -> &[W] {
        &self.inverse
    }

    /// Dimension of the underlying transfer matrix.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree of Z(u)^{-1} after dropping trailing zero coefficients.
    pub fn degree(&self) -> usize {
        let mut d = self.inverse.len() - 1;
        while d > 0 && self.inverse[d].is_zero() {
            d -= 1;
        }
        d
    }

    /// Coefficients N_1..N_M of u Z'/Z as a power series.
    pub fn log_derivative_series(&self, m_max: usize) -> Result<Vec<W>> {
        if m_max == 0 {
            return Err(Error::InvalidArgument("series order must be at least 1".into()));
        }
        if !self.inverse[0].is_one() {
            return Err(Error::InvalidArgument(
                "inverse polynomial must have constant term 1".into(),
            ));
        }
        Ok(poly::log_derivative_series(&self.inverse, m_max))
    }

    fn inverse_f64(&self) -> Vec<f64> {
        self.inverse.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Evaluates Z(u)^{-1} at a complex point.
    pub fn eval_inverse(&self, u: Complex64) -> Complex64 {
        poly::eval_complex(&self.inverse_f64(), u)
    }

    /// Evaluates Z(u) = 1 / det(1 - uT), rejecting points too close to a
    /// zero of the inverse polynomial.
    pub fn eval(&self, u: Complex64) -> Result<Complex64> {
        let p = self.eval_inverse(u);
        if p.norm() < 1e-12 {
            return Err(Error::SingularPoint(format!(
                "u = {} + {}i is within 1e-12 of a pole",
                u.re, u.im
            )));
        }
        Ok(Complex64::new(1.0, 0.0) / p)
    }
}

fn to_f64<W: Scalar>(x: &W) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Comparison of the series N_m against the brute-force census.
#[derive(Debug, Clone)]
pub struct DetIdentityReport<W: Scalar> {
    pub max_len: usize,
    /// N_m from the logarithmic derivative of det(1 - uT).
    pub series: Vec<W>,
    /// N_m summed over enumerated cycle classes.
    pub census: Vec<W>,
    pub max_abs_error: f64,
    pub tolerance: f64,
    /// Whether every entry matched exactly (always checked for exact
    /// scalars, incidental for floats).
    pub exact: bool,
    pub ok: bool,
}

/// Checks the determinant identity by comparing both N_m computations.
///
/// Passes when the maximum absolute deviation is at most
/// `1e-8 * (1 + max N_m)`; exact scalars must agree exactly.
pub fn verify_determinant_identity<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<DetIdentityReport<W>> {
    let z = ZetaFunction::new(g)?;
    let series = z.log_derivative_series(max_len)?;
    let table = count_table(g, max_len, limits)?;
    let census: Vec<W> = (1..=max_len).map(|m| table.n(m)).collect();
    let exact = series == census;
    let max_abs_error = series
        .iter()
        .zip(&census)
        .map(|(a, b)| (to_f64(a) - to_f64(b)).abs())
        .fold(0.0f64, f64::max);
    let scale = census.iter().map(|x| to_f64(x).abs()).fold(0.0f64, f64::max);
    let tolerance = 1e-8 * (1.0 + scale);
    let ok = if W::EXACT { exact } else { max_abs_error <= tolerance };
    Ok(DetIdentityReport { max_len, series, census, max_abs_error, tolerance, exact, ok })
}

/// Comparison of matrix power traces against the brute-force census.
#[derive(Debug, Clone)]
pub struct TraceFormulaReport<W: Scalar> {
    pub max_len: usize,
    pub traces: Vec<W>,
    pub census: Vec<W>,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub exact: bool,
    pub ok: bool,
}

/// Checks tr T^m = N_m for m up to `max_len`.
pub fn verify_trace_formula<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<TraceFormulaReport<W>> {
    let t = BassMatrix::build(g)?;
    let traces = t.trace_powers(max_len);
    let table = count_table(g, max_len, limits)?;
    let census: Vec<W> = (1..=max_len).map(|m| table.n(m)).collect();
    let exact = traces == census;
    let max_abs_error = traces
        .iter()
        .zip(&census)
        .map(|(a, b)| (to_f64(a) - to_f64(b)).abs())
        .fold(0.0f64, f64::max);
    let scale = census.iter().map(|x| to_f64(x).abs()).fold(0.0f64, f64::max);
    let tolerance = 1e-8 * (1.0 + scale);
    let ok = if W::EXACT { exact } else { max_abs_error <= tolerance };
    Ok(TraceFormulaReport { max_len, traces, census, max_abs_error, tolerance, exact, ok })
}

/// Growth-rate estimate of the cycle counts against the spectral radius.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RadiusReport {
    /// N_m^{1/m} at the largest m with N_m > 0.
    pub estimate: f64,
    /// The m the estimate was taken at.
    pub m_used: usize,
    /// Spectral radius of the transfer matrix.
    pub spectral_radius: f64,
    /// |estimate - r| / max(r, estimate).
    pub relative_gap: f64,
}

/// Estimates the spectral radius from the tail of the count sequence.
///
/// N_m^{1/m} converges to r along the m with N_m > 0, so the estimate is
/// taken at the largest such m at or below `max_len`. Errors with
/// [`Error::UndefinedRadius`] when every N_m vanishes.
pub fn radius_characterization<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
) -> Result<RadiusReport> {
    let t = BassMatrix::build(g)?;
    let traces = t.trace_powers(max_len);
    let m_used = traces
        .iter()
        .rposition(|x| x.to_f64().unwrap_or(0.0) > 0.0)
        .map(|i| i + 1)
        .ok_or(Error::UndefinedRadius(max_len))?;
    let n_m = to_f64(&traces[m_used - 1]);
    let estimate = n_m.powf(1.0 / m_used as f64);
    let spec = crate::spectral::spectrum_of_bass(&t, &crate::spectral::Tolerances::default())?;
    let r = spec.spectral_radius;
    let relative_gap = (estimate - r).abs() / r.max(estimate).max(f64::MIN_POSITIVE);
    Ok(RadiusReport { estimate, m_used, spectral_radius: r, relative_gap })
}

/// Coefficient-level comparison of the Euler product with det(1 - uT).
#[derive(Debug, Clone)]
pub struct EulerProductReport<W: Scalar> {
    pub degree: usize,
    /// Product over primitive classes of (1 - w(c0) u^{l(c0)}), truncated.
    pub product: Vec<W>,
    /// Inverse polynomial padded with zeros to the same degree.
    pub inverse: Vec<W>,
    pub max_abs_error: f64,
    pub exact: bool,
    pub ok: bool,
}

/// Expands the Euler product over censused primitive classes.
///
/// Primitive cycles longer than `degree` cannot touch coefficients of order
/// at most `degree`, so the censused product determines the truncation
/// exactly and must match det(1 - uT) coefficient by coefficient.
pub fn euler_product_check<W: Scalar>(
    g: &WeightedGraph<W>,
    degree: usize,
    limits: &EnumerationLimits,
) -> Result<EulerProductReport<W>> {
    let z = ZetaFunction::new(g)?;
    let classes = enumerate_cycles(g, degree, limits)?;
    let mut product = vec![W::zero(); degree + 1];
    product[0] = W::one();
    for class in classes.iter().filter(|c| c.is_primitive()) {
        let l = class.length();
        let mut factor = vec![W::zero(); l + 1];
        factor[0] = W::one();
        factor[l] = W::zero() - class.weight.clone();
        product = poly::mul_trunc(&product, &factor, degree);
    }
    let mut inverse = z.inverse_coeffs().to_vec();
    inverse.resize(degree + 1, W::zero());
    inverse.truncate(degree + 1);
    let exact = product == inverse;
    let max_abs_error = product
        .iter()
        .zip(&inverse)
        .map(|(a, b)| (to_f64(a) - to_f64(b)).abs())
        .fold(0.0f64, f64::max);
    let ok = if W::EXACT { exact } else { max_abs_error <= 1e-9 * (1.0 + g.num_edges() as f64) };
    Ok(EulerProductReport { degree, product, inverse, max_abs_error, exact, ok })
}

/// Census table re-export used by callers that pair counts with zeta data.
pub fn counts<W: Scalar>(
    g: &WeightedGraph<W>,
    max_len: usize,
    limits: &EnumerationLimits,
) -> Result<CountTable<W>> {
    count_table(g, max_len, limits)
}
