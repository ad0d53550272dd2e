//! Adaptive explicit Runge–Kutta integrator (Verner 6(5)) with continuous
//! (dense) output.
//!
//! The state is a fixed-size array so the Bloch right-hand side stays on the
//! stack. Error control uses the mixed absolute/relative RMS norm of Hairer,
//! Nørsett & Wanner.

use crate::error::{Error, Result};

/// Tolerances and step bound for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size, in seconds.
    pub max_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: 1e-4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rel_tol) || !ok(self.abs_tol) || !ok(self.max_step) {
            return Err(Error::argument(format!(
                "integrator tolerances and max_step must be finite and positive, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Counters from one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const MAX_STEPS: usize = 50_000_000;

// Verner's "most efficient" 6(5) pair (RKV65 IIIXb) with its fifth-order
// continuous extension. The ninth stage is evaluated at the new point with
// the sixth-order weights, so it doubles as the next step's first stage.
const STAGES: usize = 9;
const C: [f64; STAGES] = [0.0, 0.6e-1, 9.593_333_333_333_333e-2, 0.1439, 0.4973, 0.9725, 0.9995, 1.0, 1.0];
const A: [[f64; STAGES]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6e-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.923_996_296_296_296_2e-2, 7.669_337_037_037_037e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.35975e-1, 0.0, 0.107925, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.318_683_415_233_148_4, 0.0, -5.042_058_063_628_562, 4.220_674_648_395_414, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-41.872_591_664_327_516, 0.0, 159.432_562_163_137_5, -122.119_213_565_010_03, 5.531_743_066_200_054, 0.0, 0.0, 0.0, 0.0],
    [-54.430_156_935_316_504, 0.0, 207.067_251_365_018_48, -158.610_813_784_59, 6.991_816_585_950_242, -1.859_723_106_220_323_4e-2, 0.0, 0.0, 0.0],
    [-54.663_741_787_281_98, 0.0, 207.952_806_255_389_36, -159.288_957_474_499_5, 7.018_743_740_796_944, -1.833_878_590_504_572_2e-2, -5.119_484_997_882_099e-4, 0.0, 0.0],
    [3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7, 4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07, 0.0],
];
const B_HIGH: [f64; STAGES] = A[8];
const B_LOW: [f64; STAGES] = [
    4.909_967_648_382_49e-2, 0.0, 0.0, 0.225_111_222_951_652_42, 0.469_468_225_302_956_2,
    0.806_579_224_998_886_8, 0.0, -0.607_119_489_177_796, 5.686_113_944_047_569_6e-2,
];
// Extra stage for the interpolant, at c = 1/2.
const C_DENSE: f64 = 0.5;
const A_DENSE: [f64; STAGES] = [
    1.652_415_901_357_280_6e-2, 0.0, 0.0, 0.305_312_818_751_417_9, 0.207_120_093_820_197_9,
    -1.293_879_140_655_123, 57.119_884_115_881_49, -55.879_792_075_109_32, 2.483_002_829_776_601_4e-2,
];
// Interpolation weights: b_i(θ) = Σ_j B_DENSE[i][j] θ^(j+1).
const B_DENSE: [[f64; 6]; STAGES + 1] = [
    [1.0, -5.308_169_607_103_577, 10.181_680_448_958_68, -7.520_036_991_611_715, 0.934_048_536_863_116_1, 0.746_867_191_577_065],
    [0.0; 6],
    [0.0; 6],
    [0.0, 6.272_050_253_212_501, -16.026_181_474_677_46, 12.844_356_324_519_618, -1.148_794_504_476_759_1, -1.683_168_143_014_549_8],
    [0.0, 6.876_491_702_846_304, -24.635_767_260_846_333, 33.210_786_483_797_17, -17.494_615_282_636_44, 2.464_041_475_806_649_6],
    [0.0, -35.544_451_710_599_6, 165.701_617_019_024_2, -385.463_539_549_114_3, 442.432_413_701_570_17, -182.720_642_991_211_2],
    [0.0, 1_918.654_856_698_011_4, -9_268.121_508_966_042, 20_858.337_028_772_55, -22_645.827_671_584_81, 8_960.474_176_055_992],
    [0.0, -1_883.069_802_132_718_2, 9_101.025_187_200_634, -20_473.188_551_959_534, 22_209.765_551_256_532, -8_782.168_250_963_5],
    [0.0, 0.119_024_796_351_236_43, -0.125_026_967_050_393_76, 1.779_956_919_394_999_1, -4.660_932_123_043_763, 2.886_977_374_347_921],
    [0.0, -8.0, 32.0, -40.0, 16.0, 0.0],
];
// Error estimate converges at order 5.
const ERR_EXPONENT: f64 = -1.0 / 6.0;

/// One accepted step together with the stages needed to interpolate inside it.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    y0: [f64; N],
    k: [[f64; N]; STAGES + 1],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t` in `[t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let mut weights = [0.0; STAGES + 1];
        for (w, row) in weights.iter_mut().zip(&B_DENSE) {
            *w = row.iter().rev().fold(0.0, |acc, &b| acc * theta + b) * theta;
        }
        std::array::from_fn(|i| {
            let incr: f64 = weights.iter().zip(&self.k).map(|(w, k)| w * k[i]).sum();
            self.y0[i] + self.h * incr
        })
    }
}

#[inline]
fn combine<const N: usize>(y: &[f64; N], h: f64, coeffs: &[f64], k: &[[f64; N]]) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (c, kj) in coeffs.iter().zip(k) {
            if *c != 0.0 {
                acc += c * kj[i];
            }
        }
        y[i] + h * acc
    })
}

fn finite<const N: usize>(k: &[f64; N]) -> bool {
    k.iter().all(|x| x.is_finite())
}

fn err_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], cfg: &IntegratorConfig) -> f64 {
    let sum: f64 = (0..N)
        .map(|i| {
            let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (sum / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &mut F, t0: f64, y0: &[f64; N], f0: &[f64; N], span: f64, cfg: &IntegratorConfig) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let scaled = |v: &[f64; N]| -> f64 {
        let s: f64 = (0..N)
            .map(|i| (v[i] / (cfg.abs_tol + cfg.rel_tol * y0[i].abs())).powi(2))
            .sum();
        (s / N as f64).sqrt()
    };
    let d0 = scaled(y0);
    let d1 = scaled(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span).min(cfg.max_step);
    let y1 = combine(y0, h0, &[1.0], std::slice::from_ref(f0));
    let f1 = f(t0 + h0, &y1);
    let diff: [f64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = scaled(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 6.0)
    };
    (100.0 * h0).min(h1).min(span).min(cfg.max_step)
}

/// Integrate `y' = f(t, y)` from `t0` to `t1`.
///
/// When `dense` is set, every accepted step is passed to `on_step` with the
/// extra interpolation stage evaluated; otherwise `on_step` is never called.
pub fn integrate_with<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    cfg: &IntegratorConfig,
    dense: bool,
    mut on_step: O,
) -> Result<([f64; N], Stats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&DenseStep<N>),
{
    cfg.validate()?;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::argument(format!("integration interval [{t0}, {t1}] is empty or non-finite")));
    }
    let non_finite = |t| Error::Integration { t, reason: "non-finite right-hand side".into() };
    let mut stats = Stats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; STAGES + 1];
    k[0] = f(t, &y);
    stats.evaluations += 1;
    if !finite(&k[0]) {
        return Err(non_finite(t));
    }
    let span = t1 - t0;
    let mut h = initial_step(&mut f, t0, &y0, &k[0], span, cfg);
    stats.evaluations += 1;
    let h_min = 16.0 * f64::EPSILON * span.max(t0.abs());

    loop {
        if stats.accepted + stats.rejected >= MAX_STEPS {
            return Err(Error::Integration { t, reason: format!("step budget of {MAX_STEPS} exhausted") });
        }
        let last = t + h >= t1 - h_min;
        if last {
            h = t1 - t;
        }

        for s in 1..STAGES {
            let ys = combine(&y, h, &A[s][..s], &k[..s]);
            let ts = if s == STAGES - 1 && last { t1 } else { t + C[s] * h };
            k[s] = f(ts, &ys);
            if !finite(&k[s]) {
                return Err(non_finite(ts));
            }
        }
        stats.evaluations += STAGES - 1;
        // Sixth-order solution; the last row of A carries the same weights.
        let y_new = combine(&y, h, &B_HIGH, &k[..STAGES]);

        let err: [f64; N] = std::array::from_fn(|i| {
            h * (0..STAGES).map(|s| (B_HIGH[s] - B_LOW[s]) * k[s][i]).sum::<f64>()
        });
        let en = err_norm(&err, &y, &y_new, cfg);

        if en <= 1.0 {
            stats.accepted += 1;
            if dense {
                let yd = combine(&y, h, &A_DENSE, &k[..STAGES]);
                k[STAGES] = f(t + C_DENSE * h, &yd);
                stats.evaluations += 1;
                on_step(&DenseStep { t0: t, h, y0: y, k });
            }
            t = if last { t1 } else { t + h };
            y = y_new;
            k[0] = k[STAGES - 1];
            if last {
                return Ok((y, stats));
            }
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(ERR_EXPONENT)).clamp(0.2, 5.0) };
            h = (h * fac).min(cfg.max_step);
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(ERR_EXPONENT)).clamp(0.1, 0.9);
        }
        if h < h_min {
            return Err(Error::Integration { t, reason: format!("step size underflow (h = {h:e})") });
        }
    }
}

/// Integrate and return only the final state.
pub fn integrate<const N: usize, F>(f: F, t0: f64, t1: f64, y0: [f64; N], cfg: &IntegratorConfig) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    integrate_with(f, t0, t1, y0, cfg, false, |_| {}).map(|(y, _)| y)
}

/// Integrate and sample the dense output at the (sorted) times in `at`.
pub fn integrate_dense<const N: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    cfg: &IntegratorConfig,
    at: &[f64],
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if at.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::argument("dense-output sample times must be sorted"));
    }
    if at.iter().any(|&s| s < t0 || s > t1) {
        return Err(Error::argument("dense-output sample times must lie in the integration interval"));
    }
    let mut out = Vec::with_capacity(at.len());
    let mut idx = 0;
    while idx < at.len() && at[idx] == t0 {
        out.push(y0);
        idx += 1;
    }
    let (y_end, _) = integrate_with(f, t0, t1, y0, cfg, true, |step| {
        while idx < at.len() && at[idx] <= step.t1() {
            out.push(step.eval(at[idx]));
            idx += 1;
        }
    })?;
    while out.len() < at.len() {
        out.push(y_end);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let cfg = IntegratorConfig { max_step: 1.0, ..Default::default() };
        let y = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, 5.0, [1.0], &cfg).unwrap();
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let cfg = IntegratorConfig { max_step: 0.5, ..Default::default() };
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 * 0.2).collect();
        let ys = integrate_dense(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, 20.0, [1.0, 0.0], &cfg, &ts).unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-7, "t = {t}: {} vs {}", y[0], t.cos());
            assert!((y[1] + t.sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_config_and_interval() {
        let bad = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(integrate(|_, y: &[f64; 1]| [y[0]], 0.0, 1.0, [1.0], &bad).is_err());
        let cfg = IntegratorConfig::default();
        assert!(matches!(
            integrate(|_, y: &[f64; 1]| [y[0]], 1.0, 1.0, [1.0], &cfg),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn non_finite_rhs_is_an_integration_error() {
        let cfg = IntegratorConfig::default();
        let r = integrate(|t, _: &[f64; 1]| [if t > 0.5 { f64::NAN } else { 1.0 }], 0.0, 1.0, [0.0], &cfg);
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
