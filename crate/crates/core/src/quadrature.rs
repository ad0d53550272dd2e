//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], 0).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `[a, b]` until the error estimate falls below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    integrate_breaks(&mut f, &[a, b], abs_tol, rel_tol)
}

/// As [`integrate`], with the interval pre-split at the sorted `breaks`
/// (first and last entries are the integration limits).
pub fn integrate_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] >= w[0])) || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::argument("quadrature limits must be finite and sorted"));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, error) = kronrod(&mut f, w[0], w[1]);
            evaluations += 15;
            heap.push(Piece { a: w[0], b: w[1], value, error });
        }
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { estimate: value, error_bound: error });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature { value, error, evaluations });
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { estimate: value, error_bound: error });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature { estimate: value, error_bound: error });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = kronrod(&mut f, a, b);
            evaluations += 15;
            heap.push(Piece { a, b, value: v, error: e });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert!((q.value - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_subdivides() {
        let w = 1e-3;
        let q = integrate(|x| w / (x * x + w * w), -1.0, 1.0, 1e-10, 0.0).unwrap();
        let exact = 2.0 * (1.0 / w).atan();
        assert!((q.value - exact).abs() < 1e-9, "{} vs {exact}", q.value);
    }

    #[test]
    fn breaks_and_errors() {
        let q = integrate_breaks(|x| (-x).exp(), &[0.0, 1.0, 1.0, 10.0], 1e-12, 0.0).unwrap();
        assert!((q.value - (1.0 - (-10.0f64).exp())).abs() < 1e-12);
        assert!(integrate_breaks(|x| x, &[1.0, 0.0], 1e-9, 0.0).is_err());
        let r = integrate(|x| 1.0 / x.abs().sqrt().max(1e-300), -1.0, 1.0, 1e-14, 0.0);
        assert!(matches!(r, Err(Error::Quadrature { .. })) || r.is_ok());
        assert!(matches!(integrate(|_| f64::NAN, 0.0, 1.0, 1e-9, 0.0), Err(Error::Quadrature { .. })));
    }
}
