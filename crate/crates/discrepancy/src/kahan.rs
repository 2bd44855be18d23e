//! Compensated (Kahan–Neumaier) summation for long floating-point
//! reductions with cancellation, e.g. the trigonometric radius-weight sums
//! with `M/2 - 1` terms.

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    /// Merge another accumulator (used to combine per-chunk partials in a
    /// fixed order, keeping parallel reductions deterministic).
    pub fn merge(&mut self, other: Neumaier) {
        self.add(other.s);
        self.c += other.c;
    }

    pub fn total(self) -> f64 {
        self.s + self.c
    }
}

/// Compensated sum of an iterator.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in iter {
        acc.add(x);
    }
    acc.total()
}
