/// Incremental Wynn epsilon table for accelerating a sequence of partial sums.
///
/// Only the latest ascending diagonal is stored. Even columns of the table
/// hold the extrapolated limits.
#[derive(Debug, Clone, Default)]
pub struct EpsilonTable {
    diagonal: Vec<f64>,
    history: Vec<f64>,
}

impl EpsilonTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, partial: f64) {
        let old = std::mem::take(&mut self.diagonal);
        let mut next = Vec::with_capacity(old.len() + 1);
        next.push(partial);
        for k in 0..old.len() {
            let diff = next[k] - old[k];
            if diff == 0.0 || !diff.is_finite() {
                break;
            }
            let prev = if k == 0 { 0.0 } else { old[k - 1] };
            let value = prev + 1.0 / diff;
            if !value.is_finite() {
                break;
            }
            next.push(value);
        }
        let even = (next.len() - 1) & !1;
        self.history.push(next[even]);
        self.diagonal = next;
    }

    /// Current extrapolated limit.
    pub fn estimate(&self) -> f64 {
        self.history.last().copied().unwrap_or(0.0)
    }

    /// Spread of the last three extrapolants, a pessimistic error estimate.
    pub fn error(&self) -> f64 {
        let n = self.history.len();
        if n < 3 {
            return f64::INFINITY;
        }
        let h = &self.history[n - 3..];
        (h[2] - h[1]).abs() + (h[1] - h[0]).abs()
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accelerates_leibniz_series() {
        // 1 - 1/3 + 1/5 - ... = pi/4; the raw partial sums converge like 1/n.
        let mut table = EpsilonTable::new();
        let mut s = 0.0;
        for k in 0..20 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign / (2 * k + 1) as f64;
            table.push(s);
        }
        let pi4 = std::f64::consts::FRAC_PI_4;
        assert!((s - pi4).abs() > 1e-2);
        assert!((table.estimate() - pi4).abs() < 1e-12);
        assert!(table.error() < 1e-10);
    }

    #[test]
    fn geometric_series_exact() {
        let mut table = EpsilonTable::new();
        let mut s = 0.0;
        for k in 0..6 {
            s += 0.5f64.powi(k);
            table.push(s);
        }
        assert!((table.estimate() - 2.0).abs() < 1e-13);
    }
}
