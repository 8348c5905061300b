use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the numerical core is generic over (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    /// Smallest distance to the boundary accepted at point construction.
    ///
    /// `1e-300` for `f64`; types that cannot represent it fall back to their
    /// smallest positive normal.
    #[inline]
    fn boundary_margin() -> Self {
        let m = Self::lit(1e-300);
        if m > Self::zero() {
            m
        } else {
            Self::min_positive_value()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut terms = vec![1.0e16_f64];
        terms.extend(std::iter::repeat_n(1.0, 1000));
        terms.push(-1.0e16);
        let naive: f64 = terms.iter().sum();
        let comp: CompensatedSum<f64> = terms.iter().copied().collect();
        assert_eq!(comp.value(), 1000.0);
        assert_ne!(naive, 1000.0);
    }

    #[test]
    fn boundary_margin_is_positive_for_both_widths() {
        assert!(f64::boundary_margin() > 0.0);
        assert!(f32::boundary_margin() > 0.0);
        assert_eq!(f64::boundary_margin(), 1e-300);
    }
}
