//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson) and
//! local least-squares smoothing of sampled data.

/// Shape-preserving cubic Hermite interpolant through `(x, y)` knots.
///
/// Knot slopes start from the second-order three-point estimate and are
/// then limited so every interval stays monotone (Fritsch–Carlson, with the
/// slope set to zero at local extrema of the data).
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing with at least two entries; this is
    /// checked by the caller.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), y.len());
        debug_assert!(x.len() >= 2);
        let slopes = fritsch_carlson_slopes(&x, &y);
        Self { x, y, slopes }
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Value at `t`; `t` is clamped into the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.x[0], self.x[self.x.len() - 1]);
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let s = (t - x0) / h;
        if s == 0.0 {
            return self.y[i];
        }
        if s == 1.0 {
            return self.y[i + 1];
        }
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }

    /// Power-basis coefficients `[c0, c1, c2, c3]` of segment `i` in the
    /// local coordinate `s = (t − x_i)/h_i ∈ [0, 1]`.
    pub fn segment_coefficients(&self, i: usize) -> [f64; 4] {
        let h = self.x[i + 1] - self.x[i];
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (h * self.slopes[i], h * self.slopes[i + 1]);
        [
            y0,
            m0,
            3.0 * (y1 - y0) - 2.0 * m0 - m1,
            2.0 * (y0 - y1) + m0 + m1,
        ]
    }

    /// First derivative at `t` (clamped into the knot range).
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.clamp(self.x[0], self.x[self.x.len() - 1]);
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let s = (t - x0) / h;
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        (d00 * self.y[i] + d01 * self.y[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
    }
}

fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = delta[0];
        m[1] = delta[0];
        return m;
    }

    for i in 1..n - 1 {
        let (d0, d1) = (delta[i - 1], delta[i]);
        m[i] = if d0 * d1 <= 0.0 {
            0.0
        } else {
            (h[i] * d0 + h[i - 1] * d1) / (h[i - 1] + h[i])
        };
    }
    m[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);

    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let mut a = m[k] / delta[k];
        let mut b = m[k + 1] / delta[k];
        if a < 0.0 {
            m[k] = 0.0;
            a = 0.0;
        }
        if b < 0.0 {
            m[k + 1] = 0.0;
            b = 0.0;
        }
        let r2 = a * a + b * b;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            m[k] = tau * a * delta[k];
            m[k + 1] = tau * b * delta[k];
        }
    }
    m
}

/// One-sided three-point end slope, kept shape preserving.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Local quadratic least-squares smoothing over a sliding window of
/// `window` points (odd). Windows are shifted inward at the ends so that
/// every fit uses exactly `window` samples. Constant data is returned
/// unchanged, bit for bit.
pub fn smooth_quadratic(x: &[f64], y: &[f64], window: usize) -> Vec<f64> {
    let n = x.len();
    let half = window / 2;
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(half).min(n - window);
            let xs = &x[start..start + window];
            let ys = &y[start..start + window];
            fit_quadratic_at(xs, ys, x[i])
        })
        .collect()
}

fn fit_quadratic_at(xs: &[f64], ys: &[f64], at: f64) -> f64 {
    let n = xs.len() as f64;
    let base = crate::numerics::stable_mean(ys);
    let x_mid = 0.5 * (xs[0] + xs[xs.len() - 1]);
    let scale = 0.5 * (xs[xs.len() - 1] - xs[0]);
    // normal equations for dev(u) = c0 + c1 u + c2 u^2, u = (x - x_mid)/scale
    let mut s = [0.0f64; 5];
    let mut r = [0.0f64; 3];
    for (&xv, &yv) in xs.iter().zip(ys) {
        let u = (xv - x_mid) / scale;
        let dev = yv - base;
        let mut p = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += p;
            if k < 3 {
                r[k] += p * dev;
            }
            p *= u;
        }
    }
    debug_assert_eq!(s[0], n);
    let a = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let Some(c) = solve3(a, r) else {
        return base;
    };
    let u = (at - x_mid) / scale;
    base + c[0] + c[1] * u + c[2] * u * u
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passes_through_knots() {
        let x: Vec<f64> = (0..12).map(|i| i as f64 * 0.3 + 0.01 * (i * i) as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| (t * 1.7).sin() + 2.0).collect();
        let p = MonotoneCubic::new(x.clone(), y.clone());
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(p.eval(*xi), *yi);
        }
    }

    #[test]
    fn preserves_monotone_data() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let y = vec![0.0, 0.0, 0.1, 5.0, 5.0, 5.1];
        let p = MonotoneCubic::new(x, y);
        let mut prev = p.eval(0.0);
        for k in 1..=500 {
            let v = p.eval(5.0 * k as f64 / 500.0);
            assert!(v >= prev - 1e-15, "overshoot at step {k}");
            prev = v;
        }
    }

    #[test]
    fn third_order_on_smooth_data() {
        let err_for = |n: usize| {
            let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
            let y: Vec<f64> = x.iter().map(|t| (2.0 * t).exp()).collect();
            let p = MonotoneCubic::new(x, y);
            (0..1000)
                .map(|k| {
                    let t = 0.1 + 0.8 * k as f64 / 999.0;
                    (p.eval(t) - (2.0 * t).exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err_for(41) / err_for(81);
        assert!(ratio > 6.0, "convergence ratio {ratio}");
    }

    #[test]
    fn segment_coefficients_reproduce_eval() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.7 + 0.02 * (i * i) as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| (0.9 * t).cos() + 3.0).collect();
        let p = MonotoneCubic::new(x.clone(), y);
        for i in 0..x.len() - 1 {
            let c = p.segment_coefficients(i);
            for s in [0.0, 0.25, 0.6, 1.0] {
                let t = x[i] + s * (x[i + 1] - x[i]);
                let v = c[0] + s * (c[1] + s * (c[2] + s * c[3]));
                assert!((v - p.eval(t)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| t * t + 1.0).collect();
        let p = MonotoneCubic::new(x, y);
        let t = 1.234;
        let h = 1e-6;
        let fd = (p.eval(t + h) - p.eval(t - h)) / (2.0 * h);
        assert!((p.derivative(t) - fd).abs() < 1e-6);
    }

    #[test]
    fn smoothing_keeps_quadratics_and_constants() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5 + 0.05 * i as f64 * i as f64).collect();
        let q: Vec<f64> = x.iter().map(|t| 1.0 + 0.3 * t - 0.02 * t * t).collect();
        let s = smooth_quadratic(&x, &q, 7);
        for (a, b) in q.iter().zip(&s) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = vec![1.7e-6; 20];
        assert_eq!(smooth_quadratic(&x, &c, 9), c);
    }

    #[test]
    fn smoothing_reduces_noise() {
        let n = 200;
        let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let clean: Vec<f64> = x.iter().map(|t| (3.0 * t).sin()).collect();
        // deterministic pseudo-noise
        let noisy: Vec<f64> = clean
            .iter()
            .enumerate()
            .map(|(i, v)| v + 1e-2 * (((i * 7919) % 101) as f64 / 50.0 - 1.0))
            .collect();
        let s = smooth_quadratic(&x, &noisy, 11);
        let rms = |a: &[f64]| {
            (a.iter().zip(&clean).map(|(p, q)| (p - q).powi(2)).sum::<f64>() / n as f64).sqrt()
        };
        assert!(rms(&s) < 0.5 * rms(&noisy));
    }
}
