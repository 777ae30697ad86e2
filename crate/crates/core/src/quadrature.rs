//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and semi-infinite
//! intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [-1, 1], non-negative half. Odd indices are the
// 7-point Gauss nodes.
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

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Upper bound on the number of subintervals before giving up.
pub const DEFAULT_MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]` until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_with_limit(f, a, b, rel_tol, abs_tol, DEFAULT_MAX_INTERVALS)
}

pub fn integrate_with_limit<F>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (value, error) = kronrod_15(&f, a, b);
    let mut evaluations = 15;
    let mut total = value;
    let mut total_error = error;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });

    loop {
        if !total.is_finite() || !total_error.is_finite() {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                separation: None,
                diagnostics: format!("non-finite integrand on [{a:e}, {b:e}]"),
            });
        }
        if total_error <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if heap.len() >= max_intervals {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                separation: None,
                diagnostics: format!(
                    "{} subintervals on [{a:e}, {b:e}], estimate {total:e} ± {total_error:e}",
                    heap.len()
                ),
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = kronrod_15(&f, worst.a, mid);
        let (v2, e2) = kronrod_15(&f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        // Resum occasionally so the running totals do not drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }

    Ok(Integral {
        value: total,
        error_estimate: total_error,
        evaluations,
    })
}

/// Integrate `f` over `[a, ∞)` through the map x = a + (1 − t)/t, t ∈ (0, 1].
pub fn integrate_to_infinity<F>(f: F, a: f64, rel_tol: f64, abs_tol: f64) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let mapped = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let x = a + (1.0 - t) / t;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (t * t)
        }
    };
    integrate(mapped, 0.0, 1.0, rel_tol, abs_tol)
}
