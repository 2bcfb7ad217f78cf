//! Scalar abstraction shared by every weight-carrying structure.
//!
//! All combinatorial and polynomial arithmetic (transition weights, traces,
//! characteristic coefficients, counting functions) is generic over [`Scalar`]
//! so the same code runs in double precision and in exact rational
//! arithmetic. Spectral routines convert to `f64` at their boundary.

use std::fmt::{Debug, Display};

use num::{BigRational, FromPrimitive, Num, Signed, ToPrimitive};

/// Weight scalar: a totally ordered field with conversions to and from `f64`.
///
/// `EXACT` distinguishes arithmetic that incurs no rounding (rationals) from
/// floating point. Exact types are compared for equality where float types
/// use tolerances.
pub trait Scalar:
    Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Clone
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    const EXACT: bool;

    /// Lossless view as a rational number, when one exists.
    fn to_exact(&self) -> Option<BigRational>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn to_exact(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn to_exact(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// Converts a finite `f64` into `W`. Exact for rationals, since every finite
/// double is a dyadic rational.
pub fn from_f64<W: Scalar>(x: f64) -> W {
    W::from_f64(x).expect("finite f64 weight")
}

/// Converts a small integer into `W`.
pub fn from_usize<W: Scalar>(n: usize) -> W {
    W::from_usize(n).expect("usize fits in scalar")
}

/// Compensated (Kahan) summation. The correction term is identically zero
/// for exact scalars, so the same accumulator serves both modes.
#[derive(Clone, Debug)]
pub struct KahanSum<W: Scalar> {
    sum: W,
    carry: W,
}

impl<W: Scalar> KahanSum<W> {
    pub fn new() -> Self {
        KahanSum { sum: W::zero(), carry: W::zero() }
    }

    pub fn add(&mut self, x: W) {
        let y = x - self.carry.clone();
        let t = self.sum.clone() + y.clone();
        self.carry = (t.clone() - self.sum.clone()) - y;
        self.sum = t;
    }

    pub fn value(&self) -> W {
        self.sum.clone()
    }
}

impl<W: Scalar> Default for KahanSum<W> {
    fn default() -> Self {
        Self::new()
    }
}

/// Sums an iterator with compensation, in iteration order.
pub fn kahan_sum<W: Scalar, I: IntoIterator<Item = W>>(items: I) -> W {
    let mut acc = KahanSum::new();
    for x in items {
        acc.add(x);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;

    #[test]
    fn rational_from_f64_is_exact() {
        let q: BigRational = from_f64(0.25);
        assert_eq!(q, BigRational::new(1.into(), 4.into()));
        let h: BigRational = from_f64(2.0);
        assert_eq!(h, BigRational::from_integer(2.into()));
    }

    #[test]
    fn kahan_compensates_small_terms() {
        // 1 + 1e-16 repeated; naive f64 summation loses every small term.
        let mut acc = KahanSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1000.0 * 1e-16)).abs() < 1e-18);
    }

    #[test]
    fn kahan_is_exact_for_rationals() {
        let terms: Vec<BigRational> =
            (1..=50).map(|k| BigRational::new(1.into(), k.into())).collect();
        let expected = terms.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(kahan_sum(terms), expected);
    }
}
