//! Adaptive Gauss–Kronrod (7/15) quadrature with a fixed bisection tree.
//!
//! Subintervals are refined recursively and the two halves may run on
//! separate threads, but sums are always formed left + right, so the result
//! does not depend on scheduling.

use serde::Serialize;

// Abscissae and weights of the 15-point Kronrod rule and its embedded
// 7-point Gauss rule on [-1, 1] (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and recursion limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadControl {
    fn default() -> Self {
        QuadControl {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the per-interval |Kronrod − Gauss| estimates.
    pub error: f64,
    pub evaluations: usize,
    /// False when some interval hit `max_depth` without meeting its share of
    /// the tolerance.
    pub converged: bool,
}

impl QuadResult {
    fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let sum = f(center - dx) + f(center + dx);
        kronrod += w * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, control: QuadControl) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let (estimate, err) = kronrod15(&f, a, b);
    let budget = control.abs_tol.max(control.rel_tol * estimate.abs());
    if err <= budget {
        return QuadResult {
            value: estimate,
            error: err,
            evaluations: 15,
            converged: true,
        };
    }
    let density = budget / (b - a).abs();
    let mid = 0.5 * (a + b);
    let (left, right) = rayon::join(
        || refine(&f, a, mid, density, 1, control.max_depth),
        || refine(&f, mid, b, density, 1, control.max_depth),
    );
    let mut out = left.combine(right);
    out.evaluations += 15;
    out
}

fn refine<F>(f: &F, a: f64, b: f64, density: f64, depth: u32, max_depth: u32) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    let (value, error) = kronrod15(f, a, b);
    let allowed = density * (b - a).abs();
    if error <= allowed || depth >= max_depth {
        return QuadResult {
            value,
            error,
            evaluations: 15,
            converged: error <= allowed,
        };
    }
    let mid = 0.5 * (a + b);
    let (left, right) = if depth < 6 {
        rayon::join(
            || refine(f, a, mid, density, depth + 1, max_depth),
            || refine(f, mid, b, density, depth + 1, max_depth),
        )
    } else {
        (
            refine(f, a, mid, density, depth + 1, max_depth),
            refine(f, mid, b, density, depth + 1, max_depth),
        )
    };
    left.combine(right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, QuadControl::default());
        assert!((r.value - (128.0 / 7.0 - 6.0)).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn sqrt_endpoint_converges() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, QuadControl::default());
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|x: f64| (20.0 * x).cos(), 0.0, 3.0, QuadControl::default());
        assert!((r.value - (60.0f64).sin() / 20.0).abs() < 1e-11);
    }

    #[test]
    fn bit_identical_on_repeat() {
        let f = |x: f64| (x * x).sin().abs().sqrt();
        let a = integrate(f, 0.0, 5.0, QuadControl::default());
        let b = integrate(f, 0.0, 5.0, QuadControl::default());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
