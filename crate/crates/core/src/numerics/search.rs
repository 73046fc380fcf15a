/// Inverse golden ratio, (sqrt(5) - 1) / 2.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `rel_tol` relative to its
/// magnitude (or to its initial width when it straddles zero). Returns the
/// best abscissa seen and its value.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let floor = (hi - lo).abs() * f64::EPSILON;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };

    for _ in 0..300 {
        let scale = lo.abs().max(hi.abs());
        let tol = (rel_tol * scale).max(floor);
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 > best_f {
                best_x = x1;
                best_f = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 > best_f {
                best_x = x2;
                best_f = f2;
            }
        }
        if !(x1 < x2) {
            break;
        }
    }
    (best_x, best_f)
}

/// Dense scan of `f` at the given abscissas followed by golden-section
/// refinement between the neighbours of the best scan point.
pub fn scan_and_refine<F: Fn(f64) -> f64>(f: F, grid: &[f64], rel_tol: f64) -> (f64, f64) {
    assert!(!grid.is_empty(), "scan grid must not be empty");
    let mut best = 0;
    let mut best_f = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        if v > best_f {
            best_f = v;
            best = i;
        }
    }
    if grid.len() < 3 {
        return (grid[best], best_f);
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (x, fx) = golden_section_max(&f, lo, hi, rel_tol);
    if fx >= best_f {
        (x, fx)
    } else {
        (grid[best], best_f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 1.3) * (x - 1.3) + 2.0, 0.0, 4.0, 1e-12);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn reversed_bracket() {
        let (x, _) = golden_section_max(|x: f64| (-(x - 0.25).powi(2)).exp(), 1.0, -1.0, 1e-12);
        assert!((x - 0.25).abs() < 1e-7);
    }

    #[test]
    fn scan_handles_multimodal() {
        // two bumps; the right one is higher
        let f = |x: f64| (-(x + 2.0).powi(2)).exp() + 1.5 * (-(x - 3.0).powi(2)).exp();
        let grid: Vec<f64> = (0..=200).map(|i| -5.0 + 10.0 * i as f64 / 200.0).collect();
        let (x, fx) = scan_and_refine(f, &grid, 1e-12);
        assert!((x - 3.0).abs() < 1e-6);
        assert!(fx > 1.49);
    }
}
