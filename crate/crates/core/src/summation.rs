//! Compensated accumulation.

use std::iter::Sum;
use std::ops::AddAssign;

/// Kahan–Babuška (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
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
    fn recovers_cancelled_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().sum();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn beats_naive_on_many_small_terms() {
        let n = 1_000_000;
        let naive: f64 = (0..n).map(|_| 0.1).sum();
        let comp: NeumaierSum = (0..n).map(|_| 0.1).sum();
        let exact = 100_000.0;
        assert!((comp.value() - exact).abs() <= (naive - exact).abs());
        assert!((comp.value() - exact).abs() < 1e-9);
    }
}
