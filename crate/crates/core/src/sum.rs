//! Compensated summation.
//!
//! All long sums in the crate go through [`CompensatedSum`] (Neumaier's
//! variant of Kahan summation) and are folded in a fixed order.

use num_complex::Complex64;

/// Neumaier compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, compensation: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Merges another accumulator, keeping both compensation terms.
    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated accumulator for complex values (independent real and
/// imaginary accumulators).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub const fn new() -> Self {
        Self { re: CompensatedSum::new(), im: CompensatedSum::new() }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Sums a slice left to right with compensation.
pub fn ordered_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<CompensatedSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-13).abs() < 1e-25);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (1..=10_000).map(|n| 1.0 / (n as f64).powi(2)).collect();
        let whole = ordered_sum(&xs);
        let mut a = xs[..5000].iter().copied().collect::<CompensatedSum>();
        let b = xs[5000..].iter().copied().collect::<CompensatedSum>();
        a.merge(&b);
        assert!((a.value() - whole).abs() < 1e-16);
    }

    #[test]
    fn complex_sum_tracks_parts() {
        let mut acc = ComplexSum::new();
        acc.add(Complex64::new(1.0, -2.0));
        acc.add(Complex64::new(0.5, 2.0));
        assert_eq!(acc.value(), Complex64::new(1.5, 0.0));
    }
}
