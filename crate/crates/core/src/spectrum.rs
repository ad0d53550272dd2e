//! Single-atom transfer spectra and their thermally broadened counterparts.

use rayon::prelude::*;

use crate::dynamics::{evolve, BlochState, DampingModel, Drive};
use crate::error::{Error, Result};
use crate::interp::UniformSpline;
use crate::ode::IntegratorConfig;
use crate::thermal::{convolve_at, ConvolutionOptions, ThermalModel};

/// A drive with an extra constant detuning offset.
#[derive(Debug, Clone, Copy)]
pub struct Detuned<D> {
    pub drive: D,
    pub offset: f64,
}

impl<D: Drive> Drive for Detuned<D> {
    fn duration(&self) -> f64 {
        self.drive.duration()
    }
    fn rabi(&self, t: f64) -> f64 {
        self.drive.rabi(t)
    }
    fn detuning(&self, t: f64) -> f64 {
        self.drive.detuning(t) + self.offset
    }
}

/// Bloch-only probability of ending in |1⟩ when starting in |0⟩.
pub fn bloch_transfer<D: Drive + ?Sized>(drive: &D, damping: DampingModel, cfg: &IntegratorConfig) -> Result<f64> {
    Ok(evolve(BlochState::GROUND, drive, damping, cfg)?.transfer_probability())
}

/// Transfer for `drive` shifted by each detuning offset (rad/s), evaluated in parallel.
pub fn detuning_spectrum<D: Drive + Sync>(
    drive: &D,
    damping: DampingModel,
    cfg: &IntegratorConfig,
    offsets: &[f64],
) -> Result<Vec<f64>> {
    offsets
        .par_iter()
        .map(|&offset| bloch_transfer(&Detuned { drive, offset }, damping, cfg))
        .collect()
}

/// Upper bound on the number of cached Bloch integrations.
pub const MAX_CACHE_POINTS: usize = 200_000;

/// Bloch-only spectrum tabulated on a uniform offset grid and interpolated
/// with a natural cubic spline. Constant outside the tabulated range.
#[derive(Debug, Clone)]
pub struct SpectrumCache {
    spline: UniformSpline,
}

impl SpectrumCache {
    /// Tabulate `drive` over offsets `[lo, hi]` with spacing at most `step` (rad/s).
    pub fn build<D: Drive + Sync>(
        drive: &D,
        damping: DampingModel,
        cfg: &IntegratorConfig,
        lo: f64,
        hi: f64,
        step: f64,
    ) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) || !(step > 0.0) {
            return Err(Error::argument(format!("cache range [{lo}, {hi}] with step {step} is invalid")));
        }
        let intervals = ((hi - lo) / step).ceil();
        if intervals + 1.0 > MAX_CACHE_POINTS as f64 {
            return Err(Error::argument(format!("cache would need {intervals} intervals; increase the step")));
        }
        let n = intervals as usize + 1;
        let h = (hi - lo) / intervals;
        let offsets: Vec<f64> = (0..n).map(|i| lo + h * i as f64).collect();
        let values = detuning_spectrum(drive, damping, cfg, &offsets)?;
        log::debug!("spectrum cache: {n} points over [{lo:.1}, {hi:.1}] rad/s");
        Ok(SpectrumCache { spline: UniformSpline::new(lo, h, values)? })
    }

    pub fn eval(&self, offset: f64) -> f64 {
        self.spline.eval(offset).clamp(0.0, 1.0)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.spline.x_min(), self.spline.x_max())
    }

    pub fn step(&self) -> f64 {
        self.spline.step()
    }
}

/// Cache range needed to convolve over observation offsets `[lo, hi]` with
/// light shifts down to `delta_ls_max`.
pub fn convolution_range(lo: f64, hi: f64, delta_ls_max: f64) -> (f64, f64) {
    (lo + delta_ls_max.min(0.0), hi)
}

/// Numerical settings shared by the scans.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalSettings {
    pub damping: DampingModel,
    pub integrator: IntegratorConfig,
    pub convolution: ConvolutionOptions,
    /// Spacing of the cached raw spectrum, rad/s; `δ_th/20` when unset.
    pub cache_step: Option<f64>,
}

/// Broadened spectrum `P̃1(δ_c)` backed by a [`SpectrumCache`].
#[derive(Debug, Clone)]
pub struct ThermalSpectrum {
    cache: SpectrumCache,
    model: ThermalModel,
    opts: ConvolutionOptions,
}

impl ThermalSpectrum {
    /// Cache the raw spectrum for offsets `[lo, hi]`; the default grid step is `δ_th/20`.
    #[allow(clippy::too_many_arguments)]
    pub fn build<D: Drive + Sync>(
        drive: &D,
        damping: DampingModel,
        cfg: &IntegratorConfig,
        model: ThermalModel,
        opts: ConvolutionOptions,
        lo: f64,
        hi: f64,
        step: Option<f64>,
    ) -> Result<Self> {
        model.validate()?;
        let (a, b) = convolution_range(lo, hi, model.delta_ls_max);
        let step = step.unwrap_or(model.delta_th / 20.0);
        // A single observation point still needs a two-knot grid.
        let (a, b) = if b - a < step { (a - step, b + step) } else { (a, b) };
        let cache = SpectrumCache::build(drive, damping, cfg, a, b, step)?;
        Ok(ThermalSpectrum { cache, model, opts })
    }

    /// [`ThermalSpectrum::build`] with the pieces of `settings`.
    pub fn with_settings<D: Drive + Sync>(
        drive: &D,
        model: ThermalModel,
        settings: &EvalSettings,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        Self::build(drive, settings.damping, &settings.integrator, model, settings.convolution, lo, hi, settings.cache_step)
    }

    /// Evaluate at every offset, in order.
    pub fn eval_many(&self, deltas: &[f64]) -> Result<Vec<f64>> {
        deltas.par_iter().map(|&d| self.eval(d)).collect()
    }

    pub fn from_cache(cache: SpectrumCache, model: ThermalModel, opts: ConvolutionOptions) -> Result<Self> {
        model.validate()?;
        Ok(ThermalSpectrum { cache, model, opts })
    }

    pub fn eval(&self, delta_c: f64) -> Result<f64> {
        convolve_at(&|d| self.cache.eval(d), &self.model, delta_c, &self.opts)
    }

    /// Evaluate with a different thermal model on the same cache.
    pub fn eval_with(&self, model: &ThermalModel, delta_c: f64) -> Result<f64> {
        convolve_at(&|d| self.cache.eval(d), model, delta_c, &self.opts)
    }

    pub fn raw(&self, delta_c: f64) -> f64 {
        self.cache.eval(delta_c)
    }

    pub fn cache(&self) -> &SpectrumCache {
        &self.cache
    }

    pub fn model(&self) -> &ThermalModel {
        &self.model
    }

    pub fn options(&self) -> &ConvolutionOptions {
        &self.opts
    }
}
