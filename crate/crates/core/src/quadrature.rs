//! One-dimensional quadrature used for cross-checks and closed-form validation.
//!
//! [`integrate`] is a globally adaptive Gauss–Kronrod (7/15) scheme with
//! interval bisection; it tolerates integrable endpoint singularities such as
//! `log r`. [`periodic_trapezoid`] is the equispaced rule used for circle
//! averages, which converges geometrically for analytic periodic integrands.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default absolute tolerance of the adaptive rule.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MAX_INTERVALS: usize = 4000;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kronrod += wk * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_with_tolerance<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("integration bounds [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: 0.0, error_estimate: 0.0, intervals: 0 });
    }
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::NoConvergence(format!(
                "adaptive quadrature on [{a}, {b}] stalled at error {total_err:e}"
            )));
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval exhausted in floating point; keep what we have
            heap.push(Segment { error: 0.0, ..seg });
            total_err = heap.iter().map(|s| s.error).sum();
            if total_err > tol {
                return Err(Error::NoConvergence("interval width underflow".into()));
            }
            break;
        }
        let (v1, e1) = gauss_kronrod(&f, seg.a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        if !total.is_finite() {
            return Err(Error::NonFinite("integrand".into()));
        }
        // the running sums drift; resynchronise occasionally
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value = heap.iter().map(|s| s.value).sum();
    let error_estimate = heap.iter().map(|s| s.error).sum();
    Ok(Integral { value, error_estimate, intervals: heap.len() })
}

/// Adaptive integration with [`DEFAULT_TOLERANCE`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<Integral> {
    integrate_with_tolerance(f, a, b, DEFAULT_TOLERANCE)
}

/// Mean of a `2π`-periodic function over `n` equispaced angles starting at 0.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(mut f: F, n: usize) -> f64 {
    assert!(n > 0, "periodic_trapezoid needs at least one node");
    let step = 2.0 * PI / n as f64;
    (0..n).map(|k| f(k as f64 * step)).sum::<f64>() / n as f64
}

/// `∫₀^{2π} log|1 − a e^{iθ}| dθ`, evaluated by adaptive quadrature.
///
/// The interval is split at the angle where `a e^{iθ}` is real and positive so
/// that the logarithmic singularity for `|a| = 1` sits on an endpoint.
pub fn circle_log_integral(a: Complex64) -> Result<f64> {
    let phase = -a.arg();
    let f = |t: f64| (Complex64::new(1.0, 0.0) - a * Complex64::from_polar(1.0, t)).norm().ln();
    let start = phase;
    let end = phase + 2.0 * PI;
    Ok(integrate_with_tolerance(f, start, end, 1e-11)?.value)
}

/// `∫₀¹ (log r)² r / (1 − r²)² dr`, whose exact value is `π²/24`.
pub fn log_square_moment() -> Result<f64> {
    let f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let l = (r - 1.0).ln_1p();
        let d = (1.0 - r) * (1.0 + r);
        l * l * r / (d * d)
    };
    Ok(integrate_with_tolerance(f, 0.0, 1.0, 1e-12)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x - 2.0 * x + 1.0, -1.0, 2.0).unwrap();
        assert!((r.value - 9.0 + 3.0 - 3.0).abs() < 1e-13, "{}", r.value);
    }

    #[test]
    fn log_endpoint_singularity() {
        // ∫₀¹ log x dx = −1
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0).unwrap();
        assert!((r.value + 1.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn trapezoid_is_spectral_for_trig() {
        let m = periodic_trapezoid(|t| (3.0 * t).cos().powi(2), 16);
        assert!((m - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pi_squared_over_24() {
        let v = log_square_moment().unwrap();
        assert!((v - PI * PI / 24.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn circle_log_inside_and_outside() {
        for &a in &[Complex64::new(0.3, 0.4), Complex64::new(-0.9, 0.1), Complex64::new(1.0, 0.0)] {
            let v = circle_log_integral(a).unwrap();
            assert!(v.abs() < 1e-8, "a = {a}: {v}");
        }
        let a = Complex64::new(1.5, -2.0);
        let v = circle_log_integral(a).unwrap();
        assert!((v - 2.0 * PI * a.norm().ln()).abs() < 1e-8);
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(integrate(|x| x, 0.0, f64::INFINITY).is_err());
    }
}
