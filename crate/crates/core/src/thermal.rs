//! Inhomogeneous broadening from the energy-dependent differential light shift.
//!
//! Atoms in a harmonic trap at temperature T have a three-dimensional
//! Boltzmann energy distribution; the differential light shift is linear in
//! the energy, so `δ_ls − δ_ls^max` is Gamma(3, δ_th) distributed:
//!
//! ```text
//! p_B(δ_ls) = (δ_ls − δ_ls^max)² / (2 δ_th³) · exp(−(δ_ls − δ_ls^max)/δ_th),  δ_ls ≥ δ_ls^max
//! ```
//!
//! The measured spectrum is the single-atom spectrum averaged over this
//! distribution between `δ_ls^max` and 0:
//! `P̃1(δ_c) = P_max ∫ p_B(δ_ls) P1(δ_c + δ_ls) dδ_ls`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::units::{khz_to_rad_s, rad_s_to_khz};

/// Light-shift distribution and transfer ceiling. Frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ThermalSpec", into = "ThermalSpec")]
pub struct ThermalModel {
    /// Maximum (most negative) differential light shift, felt at the trap bottom.
    pub delta_ls_max: f64,
    /// Change of the differential light shift per k_B T of energy.
    pub delta_th: f64,
    /// Ceiling of the transfer probability.
    pub p_max: f64,
}

/// JSON form with frequencies in kHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSpec {
    pub delta_ls_max_khz: f64,
    pub delta_th_khz: f64,
    pub p_max: f64,
}

impl TryFrom<ThermalSpec> for ThermalModel {
    type Error = Error;
    fn try_from(s: ThermalSpec) -> Result<Self> {
        ThermalModel::from_khz(s.delta_ls_max_khz, s.delta_th_khz, s.p_max)
    }
}

impl From<ThermalModel> for ThermalSpec {
    fn from(m: ThermalModel) -> Self {
        ThermalSpec {
            delta_ls_max_khz: rad_s_to_khz(m.delta_ls_max),
            delta_th_khz: rad_s_to_khz(m.delta_th),
            p_max: m.p_max,
        }
    }
}

// Gamma(3) tail beyond this many δ_th carries < 1e−22 of the mass.
const X_CUTOFF: f64 = 60.0;
const X_BREAKS: [f64; 9] = [1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 35.0, 50.0];

impl ThermalModel {
    pub fn new(delta_ls_max: f64, delta_th: f64, p_max: f64) -> Result<Self> {
        let m = ThermalModel { delta_ls_max, delta_th, p_max };
        m.validate()?;
        Ok(m)
    }

    pub fn from_khz(delta_ls_max_khz: f64, delta_th_khz: f64, p_max: f64) -> Result<Self> {
        Self::new(khz_to_rad_s(delta_ls_max_khz), khz_to_rad_s(delta_th_khz), p_max)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.delta_ls_max.is_finite()
            && self.delta_ls_max <= 0.0
            && self.delta_th.is_finite()
            && self.delta_th > 0.0
            && (0.0..=1.0).contains(&self.p_max);
        if !ok {
            return Err(Error::argument(format!(
                "thermal model needs delta_ls_max ≤ 0, delta_th > 0, 0 ≤ p_max ≤ 1, got {self:?}"
            )));
        }
        Ok(())
    }

    /// `|δ_ls^max| / δ_th`: the light-shift range in units of the thermal scale.
    pub fn depth_ratio(&self) -> f64 {
        -self.delta_ls_max / self.delta_th
    }

    /// Probability mass of `p_B` on `[δ_ls^max, 0]`, `1 − e^{−r}(1 + r + r²/2)`.
    pub fn truncated_mass(&self) -> f64 {
        gamma3_cdf(self.depth_ratio())
    }

    pub fn pdf(&self, delta_ls: f64) -> f64 {
        boltzmann_pdf(delta_ls, self)
    }
}

/// Regularized lower incomplete gamma function P(3, x).
pub(crate) fn gamma3_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 3.0 {
        // e^{−x} Σ_{k≥3} x^k / k!, free of the cancellation in the closed form.
        let mut term = x * x * x / 6.0;
        let mut sum: f64 = 0.0;
        let mut k = 3.0;
        while term > 1e-18 * sum.max(1e-300) {
            sum += term;
            k += 1.0;
            term *= x / k;
        }
        sum * (-x).exp()
    } else {
        1.0 - (-x).exp() * (1.0 + x + 0.5 * x * x)
    }
}

/// Density of the differential light shift, in s/rad; zero below `δ_ls^max`.
pub fn boltzmann_pdf(delta_ls: f64, m: &ThermalModel) -> f64 {
    let x = delta_ls - m.delta_ls_max;
    if !(x >= 0.0) {
        return 0.0;
    }
    let th = m.delta_th;
    x * x / (2.0 * th * th * th) * (-x / th).exp()
}

/// How the light-shift average is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionOptions {
    /// Divide by the mass of `p_B` on `[δ_ls^max, 0]` so that a flat unit
    /// spectrum maps to exactly `p_max`.
    #[serde(default = "default_renormalize")]
    pub renormalize: bool,
    /// Absolute quadrature tolerance on the probability.
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
}

fn default_renormalize() -> bool {
    true
}

fn default_abs_tol() -> f64 {
    1e-6
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        ConvolutionOptions { renormalize: default_renormalize(), abs_tol: default_abs_tol() }
    }
}

impl ConvolutionOptions {
    /// Integrate over the printed bounds without renormalizing the truncated tail.
    pub fn printed_bounds() -> Self {
        ConvolutionOptions { renormalize: false, ..Default::default() }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        ConvolutionOptions { abs_tol, ..self }
    }
}

/// `∫_{δ_ls^max}^{0} p_B(δ_ls) P1(δ_c + δ_ls) dδ_ls`, without the `p_max`
/// factor and without renormalization.
///
/// Integrates in the scaled variable `x = (δ_ls − δ_ls^max)/δ_th`, where the
/// density is `x² e^{−x} / 2`, so arbitrarily narrow distributions are resolved.
pub fn light_shift_average<F: Fn(f64) -> f64>(spectrum: &F, m: &ThermalModel, delta_c: f64, abs_tol: f64) -> Result<f64> {
    m.validate()?;
    let x_end = m.depth_ratio().min(X_CUTOFF);
    if x_end <= 0.0 {
        return Ok(0.0);
    }
    let mut breaks = vec![0.0];
    breaks.extend(X_BREAKS.iter().copied().filter(|&b| b < x_end));
    breaks.push(x_end);
    let (lm, th) = (m.delta_ls_max, m.delta_th);
    let q = quadrature::integrate_breaks(
        |x| 0.5 * x * x * (-x).exp() * spectrum(delta_c + lm + th * x),
        &breaks,
        abs_tol,
        0.0,
    )?;
    Ok(q.value)
}

/// Thermally averaged transfer `P̃1(δ_c)`.
pub fn convolve_at<F: Fn(f64) -> f64>(spectrum: &F, m: &ThermalModel, delta_c: f64, opts: &ConvolutionOptions) -> Result<f64> {
    if opts.renormalize && m.depth_ratio() == 0.0 {
        // Distribution collapsed onto δ_ls = 0.
        return Ok(m.p_max * spectrum(delta_c));
    }
    let mass = if opts.renormalize { m.truncated_mass() } else { 1.0 };
    let tol = opts.abs_tol * mass / m.p_max.max(f64::MIN_POSITIVE);
    let avg = light_shift_average(spectrum, m, delta_c, tol.max(1e-15))?;
    Ok((m.p_max * avg / mass).clamp(0.0, m.p_max))
}

/// A spectrum convolved with the light-shift distribution.
#[derive(Debug, Clone)]
pub struct Convolved<F> {
    spectrum: F,
    model: ThermalModel,
    opts: ConvolutionOptions,
}

impl<F: Fn(f64) -> f64> Convolved<F> {
    pub fn eval(&self, delta_c: f64) -> Result<f64> {
        convolve_at(&self.spectrum, &self.model, delta_c, &self.opts)
    }

    pub fn model(&self) -> &ThermalModel {
        &self.model
    }
}

/// Wrap `spectrum` (δ_c ↦ P1, rad/s) into its thermal average.
pub fn convolve<F: Fn(f64) -> f64>(spectrum: F, m: ThermalModel, opts: ConvolutionOptions) -> Convolved<F> {
    Convolved { spectrum, model: m, opts }
}

/// Seeded sampler for the differential light shift.
#[derive(Debug, Clone)]
pub struct LightShiftSampler {
    model: ThermalModel,
    rng: ChaCha8Rng,
}

impl LightShiftSampler {
    pub fn new(model: ThermalModel, seed: u64) -> Self {
        LightShiftSampler { model, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Draw from `p_B` on `[δ_ls^max, ∞)`: `δ_ls^max + δ_th·(E₁ + E₂ + E₃)` with unit exponentials.
    pub fn sample(&mut self) -> f64 {
        let mut prod = 1.0;
        for _ in 0..3 {
            // (0, 1] so the logarithm stays finite.
            prod *= 1.0 - self.rng.random::<f64>();
        }
        self.model.delta_ls_max - self.model.delta_th * prod.ln()
    }

    /// Draw from `p_B` restricted to `[δ_ls^max, 0]` by rejection.
    pub fn sample_truncated(&mut self) -> f64 {
        loop {
            let s = self.sample();
            if s <= 0.0 {
                return s;
            }
        }
    }
}

/// Single draw from `p_B`, deterministic in `rng_seed`.
pub fn sample_light_shift(m: &ThermalModel, rng_seed: u64) -> f64 {
    LightShiftSampler::new(*m, rng_seed).sample()
}

/// Monte Carlo estimate of [`convolve_at`] and its standard error.
pub fn monte_carlo_convolve<F: Fn(f64) -> f64>(
    spectrum: &F,
    m: &ThermalModel,
    delta_c: f64,
    opts: &ConvolutionOptions,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    m.validate()?;
    if samples < 2 {
        return Err(Error::argument("Monte Carlo needs at least two samples"));
    }
    if m.depth_ratio() == 0.0 {
        return Err(Error::argument("no support on [delta_ls_max, 0]"));
    }
    let mut sampler = LightShiftSampler::new(*m, seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let p = spectrum(delta_c + sampler.sample_truncated());
        sum += p;
        sum_sq += p * p;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let scale = if opts.renormalize { m.p_max } else { m.p_max * m.truncated_mass() };
    Ok((scale * mean, scale * (var / n).sqrt()))
}
