//! Adaptive Gauss–Kronrod panel quadrature.
//!
//! The integrator starts from a caller-supplied partition (breakpoints plus a
//! maximum panel width) and bisects the panel with the largest error estimate
//! until the summed estimate meets the tolerance. Values may be real, complex
//! or any small vector type implementing [`QuadValue`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

use super::summation::CompensatedSum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge: achieved error {achieved:.3e} > tolerance {tolerance:.3e} with {panels} panels"
    )]
    NoConvergence {
        achieved: f64,
        tolerance: f64,
        panels: usize,
    },
    #[error("invalid integration range [{a}, {b}]")]
    InvalidRange { a: f64, b: f64 },
}

/// Values that can be integrated: a vector space over f64 with a norm.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn norm(self) -> f64;
    /// Componentwise absolute value, used for the `resabs`/`resasc` scales.
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl QuadValue for f64 {
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn norm(self) -> f64 {
        self.norm()
    }
}

/// Sum of values with compensation on every f64 component.
pub trait CompensatedAccumulate: QuadValue {
    type Acc: Default;
    fn accumulate(acc: &mut Self::Acc, v: Self);
    fn finish(acc: &Self::Acc) -> Self;
}

impl CompensatedAccumulate for f64 {
    type Acc = CompensatedSum;
    fn accumulate(acc: &mut CompensatedSum, v: f64) {
        acc.add(v);
    }
    fn finish(acc: &CompensatedSum) -> f64 {
        acc.value()
    }
}

impl CompensatedAccumulate for Complex64 {
    type Acc = (CompensatedSum, CompensatedSum);
    fn accumulate(acc: &mut Self::Acc, v: Complex64) {
        acc.0.add(v.re);
        acc.1.add(v.im);
    }
    fn finish(acc: &Self::Acc) -> Complex64 {
        Complex64::new(acc.0.value(), acc.1.value())
    }
}

/// Gauss–Kronrod pair. Abscissas are the non-negative Kronrod nodes in
/// decreasing order; odd positions are the Gauss nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// 7-point Gauss embedded in 15-point Kronrod.
    Gk15,
    /// 10-point Gauss embedded in 21-point Kronrod.
    Gk21,
}

#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG15: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG21: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

impl Rule {
    fn tables(self) -> (&'static [f64], &'static [f64], &'static [f64]) {
        match self {
            Rule::Gk15 => (&XGK15, &WG15, &WGK15),
            Rule::Gk21 => (&XGK21, &WG21, &WGK21),
        }
    }

    pub fn points(self) -> usize {
        match self {
            Rule::Gk15 => 15,
            Rule::Gk21 => 21,
        }
    }
}

/// Result of one Gauss–Kronrod panel.
#[derive(Debug, Clone, Copy)]
pub struct PanelEstimate<T> {
    pub value: T,
    pub error: f64,
}

/// Apply `rule` on `[a, b]`, with the QUADPACK error rescaling.
pub fn gauss_kronrod<T, F>(f: &F, a: f64, b: f64, rule: Rule) -> PanelEstimate<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let (xgk, wg, wgk) = rule.tables();
    let n = xgk.len();
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center);
    let mut res_gauss = if n % 2 == 0 {
        f_center * wg[n / 2 - 1]
    } else {
        T::default()
    };
    let mut res_kronrod = f_center * wgk[n - 1];
    let mut res_abs = f_center.magnitude() * wgk[n - 1];

    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];

    for j in 0..(n - 1) / 2 {
        let jtw = 2 * j + 1;
        let dx = half * xgk[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss = res_gauss + (f1 + f2) * wg[j];
        res_kronrod = res_kronrod + (f1 + f2) * wgk[jtw];
        res_abs += wgk[jtw] * (f1.magnitude() + f2.magnitude());
    }
    for j in 0..n / 2 {
        let jtwm1 = 2 * j;
        let dx = half * xgk[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod = res_kronrod + (f1 + f2) * wgk[jtwm1];
        res_abs += wgk[jtwm1] * (f1.magnitude() + f2.magnitude());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = wgk[n - 1] * (f_center - mean).magnitude();
    for j in 0..n - 1 {
        res_asc += wgk[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let err = (res_kronrod - res_gauss).norm() * abs_half;
    let value = res_kronrod * half;
    res_abs *= abs_half;
    res_asc *= abs_half;

    PanelEstimate {
        value,
        error: rescale_error(err, res_abs, res_asc),
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// Absolute/relative tolerance pair: converged when
/// `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn target(&self, magnitude: f64) -> f64 {
        self.abs.max(self.rel * magnitude)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

/// Limits on the initial partition and on refinement.
#[derive(Debug, Clone, Copy)]
pub struct PanelPlan {
    pub rule: Rule,
    /// Upper bound on the width of every initial panel.
    pub max_width: f64,
    pub max_panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    est: PanelEstimate<T>,
}

struct Ranked {
    error: f64,
    index: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Integrate `f` over `[breakpoints[0], breakpoints[last]]`.
///
/// Every interval between consecutive breakpoints is cut into equal panels
/// no wider than `plan.max_width`; the worst panel is then bisected until the
/// total error estimate meets `tol`.
pub fn integrate<T, F>(
    f: F,
    breakpoints: &[f64],
    plan: PanelPlan,
    tol: Tolerance,
) -> Result<Integral<T>, QuadratureError>
where
    T: CompensatedAccumulate,
    F: Fn(f64) -> T,
{
    let (Some(&a), Some(&b)) = (breakpoints.first(), breakpoints.last()) else {
        return Err(QuadratureError::InvalidRange {
            a: f64::NAN,
            b: f64::NAN,
        });
    };
    if !(a.is_finite() && b.is_finite()) || breakpoints.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(QuadratureError::InvalidRange { a, b });
    }

    let mut panels: Vec<Panel<T>> = Vec::new();
    for w in breakpoints.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi == lo {
            continue;
        }
        let pieces = if plan.max_width.is_finite() && plan.max_width > 0.0 {
            ((hi - lo) / plan.max_width).ceil().max(1.0)
        } else {
            1.0
        };
        if pieces > plan.max_panels as f64 {
            return Err(QuadratureError::NoConvergence {
                achieved: f64::INFINITY,
                tolerance: tol.abs,
                panels: plan.max_panels,
            });
        }
        let pieces = pieces as usize;
        let h = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let pa = lo + h * k as f64;
            let pb = if k + 1 == pieces { hi } else { lo + h * (k + 1) as f64 };
            panels.push(Panel {
                a: pa,
                b: pb,
                est: gauss_kronrod(&f, pa, pb, plan.rule),
            });
        }
    }
    if panels.is_empty() {
        return Ok(Integral {
            value: T::default(),
            error: 0.0,
            panels: 0,
        });
    }

    let mut heap: BinaryHeap<Ranked> = panels
        .iter()
        .enumerate()
        .map(|(index, p)| Ranked {
            error: p.est.error,
            index,
        })
        .collect();
    let mut total = panels
        .iter()
        .fold(T::default(), |acc, p| acc + p.est.value);
    let mut error: f64 = panels.iter().map(|p| p.est.error).sum();

    loop {
        let target = tol.target(total.norm());
        if error <= target {
            break;
        }
        if panels.len() >= plan.max_panels {
            return Err(QuadratureError::NoConvergence {
                achieved: error,
                tolerance: target,
                panels: panels.len(),
            });
        }
        let Some(Ranked { index, .. }) = heap.pop() else {
            return Err(QuadratureError::NoConvergence {
                achieved: error,
                tolerance: target,
                panels: panels.len(),
            });
        };
        let p = panels[index];
        let mid = 0.5 * (p.a + p.b);
        if !(p.a < mid && mid < p.b) {
            // cannot split further; its error stays in the total
            continue;
        }
        let left = gauss_kronrod(&f, p.a, mid, plan.rule);
        let right = gauss_kronrod(&f, mid, p.b, plan.rule);
        total = total - p.est.value + left.value + right.value;
        error += left.error + right.error - p.est.error;
        panels[index] = Panel {
            a: p.a,
            b: mid,
            est: left,
        };
        panels.push(Panel {
            a: mid,
            b: p.b,
            est: right,
        });
        heap.push(Ranked {
            error: left.error,
            index,
        });
        heap.push(Ranked {
            error: right.error,
            index: panels.len() - 1,
        });
        if !error.is_finite() {
            error = panels.iter().map(|p| p.est.error).sum();
        }
    }

    let mut acc = T::Acc::default();
    let mut err_sum = CompensatedSum::new();
    for p in &panels {
        T::accumulate(&mut acc, p.est.value);
        err_sum.add(p.est.error);
    }
    Ok(Integral {
        value: T::finish(&acc),
        error: err_sum.value(),
        panels: panels.len(),
    })
}

/// Composite Simpson rule on a uniform grid with spacing `h`; an even number
/// of intervals is closed with the 3/8 rule on the last three.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 4 };
            let mut acc = CompensatedSum::new();
            let mut i = 0;
            while i + 2 <= simpson_end {
                acc.add(h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]));
                i += 2;
            }
            if intervals % 2 == 1 {
                let j = n - 4;
                acc.add(
                    3.0 * h / 8.0
                        * (values[j] + 3.0 * values[j + 1] + 3.0 * values[j + 2] + values[j + 3]),
                );
            }
            acc.value()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn plan(rule: Rule) -> PanelPlan {
        PanelPlan {
            rule,
            max_width: f64::INFINITY,
            max_panels: 10_000,
        }
    }

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        let f = |x: f64| 3.0 * x.powi(5) - x.powi(2) + 1.0;
        let exact = |x: f64| 0.5 * x.powi(6) - x.powi(3) / 3.0 + x;
        for rule in [Rule::Gk15, Rule::Gk21] {
            let e = gauss_kronrod(&f, -1.0, 2.0, rule);
            assert!((e.value - (exact(2.0) - exact(-1.0))).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-12,
        };
        let r: Integral<f64> =
            integrate(|x: f64| 1.0 / (1e-4 + x * x), &[-1.0, 1.0], plan(Rule::Gk21), tol).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-10 * exact, "{} vs {}", r.value, exact);
        assert!(r.error <= 1e-12 * exact);
    }

    #[test]
    fn complex_oscillatory_panels() {
        // int_0^{10} e^{i 7 x} dx = (e^{70i} - 1) / (7i)
        let w = 7.0;
        let p = PanelPlan {
            rule: Rule::Gk15,
            max_width: 2.0 * PI / w / 8.0,
            max_panels: 10_000,
        };
        let tol = Tolerance {
            abs: 1e-14,
            rel: 1e-12,
        };
        let r: Integral<Complex64> =
            integrate(|x| Complex64::from_polar(1.0, w * x), &[0.0, 10.0], p, tol).unwrap();
        let exact = (Complex64::from_polar(1.0, 10.0 * w) - 1.0) / Complex64::new(0.0, w);
        assert!((r.value - exact).norm() < 1e-13);
        assert!(r.panels >= 89);
    }

    #[test]
    fn reports_non_convergence() {
        let p = PanelPlan {
            rule: Rule::Gk15,
            max_width: f64::INFINITY,
            max_panels: 8,
        };
        let tol = Tolerance {
            abs: 0.0,
            rel: 1e-15,
        };
        let r: Result<Integral<f64>, _> = integrate(|x: f64| x.abs().sqrt(), &[-1.0, 1.0], p, tol);
        assert!(matches!(r, Err(QuadratureError::NoConvergence { .. })));
    }

    #[test]
    fn simpson_orders() {
        for n in [3usize, 4, 5, 8, 101, 102] {
            let h = 1.0 / (n - 1) as f64;
            let ys: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            assert!((simpson_uniform(&ys, h) - 0.25).abs() < 1e-14, "n = {n}");
        }
    }
}
