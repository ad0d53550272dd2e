//! Pulse programs: the sin²-amplitude frequency sweep used for adiabatic
//! passages, rectangular pulses, and tabulated pulses of arbitrary shape.
//!
//! The sweep pulse on `0 ≤ t ≤ t_p`, with `x = πt/t_p`, is
//!
//! ```text
//! Ω_R(t) = Ω_max sin²x
//! δ(t)   = δ_c + sign(t − t_p/2) δ_max √(1 − sin⁴x)
//! ```
//!
//! Since `1 − sin⁴x = cos²x (1 + sin²x)` the detuning is the smooth function
//! `δ_c − δ_max cos x √(1 + sin²x)`, which is what the integrator evaluates;
//! its derivative `2π δ_max sin³x / (t_p √(1 + sin²x))` has no singularity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::Drive;
use crate::error::{Error, Result};
use crate::units::{khz_to_rad_s, ms_to_s, rad_s_to_khz, s_to_ms};

/// Frequency-swept adiabatic-passage pulse. All frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct APPulse {
    pub omega_max: f64,
    /// Half-span of the sweep.
    pub delta_max: f64,
    /// Central detuning.
    pub delta_c: f64,
    /// Duration, s.
    pub t_p: f64,
}

impl APPulse {
    pub fn new(omega_max: f64, delta_max: f64, delta_c: f64, t_p: f64) -> Result<Self> {
        let p = APPulse { omega_max, delta_max, delta_c, t_p };
        p.validate()?;
        Ok(p)
    }

    /// Pulse with parameters given as ordinary frequencies in kHz and duration in ms.
    pub fn from_khz(omega_max_khz: f64, delta_max_khz: f64, delta_c_khz: f64, t_p_ms: f64) -> Result<Self> {
        Self::new(
            khz_to_rad_s(omega_max_khz),
            khz_to_rad_s(delta_max_khz),
            khz_to_rad_s(delta_c_khz),
            ms_to_s(t_p_ms),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_max, self.delta_max, self.delta_c, self.t_p].iter().all(|x| x.is_finite());
        if !finite || !(self.omega_max > 0.0) || !(self.delta_max >= 0.0) || !(self.t_p > 0.0) {
            return Err(Error::argument(format!(
                "sweep pulse needs omega_max > 0, delta_max ≥ 0, t_p > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Same pulse with a different central detuning.
    pub fn with_delta_c(&self, delta_c: f64) -> Self {
        APPulse { delta_c, ..*self }
    }

    #[inline]
    fn phase(&self, t: f64) -> f64 {
        PI * t / self.t_p
    }

    fn rabi_rate(&self, t: f64) -> f64 {
        self.omega_max * (PI / self.t_p) * (2.0 * self.phase(t)).sin()
    }

    fn detuning_rate(&self, t: f64) -> f64 {
        let s = self.phase(t).sin();
        2.0 * PI * self.delta_max / self.t_p * s * s * s / (1.0 + s * s).sqrt()
    }
}

impl Drive for APPulse {
    fn duration(&self) -> f64 {
        self.t_p
    }

    fn rabi(&self, t: f64) -> f64 {
        let s = self.phase(t).sin();
        self.omega_max * s * s
    }

    fn detuning(&self, t: f64) -> f64 {
        let (s, c) = self.phase(t).sin_cos();
        self.delta_c - self.delta_max * c * (1.0 + s * s).sqrt()
    }
}

fn check_time(t: f64, t_p: f64) -> Result<()> {
    if !(0.0..=t_p).contains(&t) {
        return Err(Error::argument(format!("t = {t:e} s outside pulse domain [0, {t_p:e}]")));
    }
    Ok(())
}

/// `Ω_max sin²(πt/t_p)`.
pub fn ap_rabi(t: f64, p: &APPulse) -> Result<f64> {
    check_time(t, p.t_p)?;
    Ok(p.rabi(t))
}

/// `δ_c + sign(t − t_p/2) δ_max √(1 − sin⁴(πt/t_p))`, evaluated literally
/// with `sign(0) = +1`.
pub fn ap_detuning(t: f64, p: &APPulse) -> Result<f64> {
    check_time(t, p.t_p)?;
    let s = p.phase(t).sin();
    let sign = if t - 0.5 * p.t_p < 0.0 { -1.0 } else { 1.0 };
    let radicand = (1.0 - s.powi(4)).max(0.0);
    Ok(p.delta_c + sign * p.delta_max * radicand.sqrt())
}

/// Constant drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectPulse {
    pub omega: f64,
    pub delta: f64,
    pub t_p: f64,
}

impl RectPulse {
    pub fn new(omega: f64, delta: f64, t_p: f64) -> Result<Self> {
        if !(t_p > 0.0 && t_p.is_finite()) || !omega.is_finite() || !delta.is_finite() {
            return Err(Error::argument(format!("rectangular pulse needs finite values and t_p > 0, got t_p = {t_p}")));
        }
        Ok(RectPulse { omega, delta, t_p })
    }
}

impl Drive for RectPulse {
    fn duration(&self) -> f64 {
        self.t_p
    }
    fn rabi(&self, _: f64) -> f64 {
        self.omega
    }
    fn detuning(&self, _: f64) -> f64 {
        self.delta
    }
}

/// One knot of a tabulated pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSample {
    pub t: f64,
    pub omega: f64,
    pub delta: f64,
}

/// Piecewise-linear pulse through the given knots.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPulse {
    samples: Vec<PulseSample>,
}

impl TabulatedPulse {
    pub fn new(samples: Vec<PulseSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::argument("tabulated pulse needs at least two samples"));
        }
        if samples[0].t != 0.0 {
            return Err(Error::argument("tabulated pulse must start at t = 0"));
        }
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::argument("tabulated pulse times must be strictly increasing"));
        }
        if samples.iter().any(|s| !(s.t.is_finite() && s.omega.is_finite() && s.delta.is_finite())) {
            return Err(Error::argument("tabulated pulse contains non-finite values"));
        }
        Ok(TabulatedPulse { samples })
    }

    pub fn samples(&self) -> &[PulseSample] {
        &self.samples
    }

    fn interpolate(&self, t: f64) -> (f64, f64) {
        let s = &self.samples;
        let i = s.partition_point(|k| k.t <= t).clamp(1, s.len() - 1);
        let (a, b) = (&s[i - 1], &s[i]);
        let f = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        (a.omega + f * (b.omega - a.omega), a.delta + f * (b.delta - a.delta))
    }
}

impl Drive for TabulatedPulse {
    fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
    fn rabi(&self, t: f64) -> f64 {
        self.interpolate(t).0
    }
    fn detuning(&self, t: f64) -> f64 {
        self.interpolate(t).1
    }
}

/// Any of the supported pulse shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PulseSpec", into = "PulseSpec")]
pub enum PulseProgram {
    Ap(APPulse),
    Rect(RectPulse),
    Tabulated(TabulatedPulse),
}

impl Drive for PulseProgram {
    fn duration(&self) -> f64 {
        match self {
            PulseProgram::Ap(p) => p.duration(),
            PulseProgram::Rect(p) => p.duration(),
            PulseProgram::Tabulated(p) => p.duration(),
        }
    }
    fn rabi(&self, t: f64) -> f64 {
        match self {
            PulseProgram::Ap(p) => p.rabi(t),
            PulseProgram::Rect(p) => p.rabi(t),
            PulseProgram::Tabulated(p) => p.rabi(t),
        }
    }
    fn detuning(&self, t: f64) -> f64 {
        match self {
            PulseProgram::Ap(p) => p.detuning(t),
            PulseProgram::Rect(p) => p.detuning(t),
            PulseProgram::Tabulated(p) => p.detuning(t),
        }
    }
}

impl From<APPulse> for PulseProgram {
    fn from(p: APPulse) -> Self {
        PulseProgram::Ap(p)
    }
}

impl From<RectPulse> for PulseProgram {
    fn from(p: RectPulse) -> Self {
        PulseProgram::Rect(p)
    }
}

impl From<TabulatedPulse> for PulseProgram {
    fn from(p: TabulatedPulse) -> Self {
        PulseProgram::Tabulated(p)
    }
}

impl PulseProgram {
    /// Time derivatives `(Ω̇_R, δ̇)` at `t`.
    ///
    /// Closed form for sweep and rectangular pulses; central differences with
    /// step `t_p·1e−6` (one-sided at the ends) for tabulated pulses.
    pub fn rates(&self, t: f64) -> Result<(f64, f64)> {
        let t_p = self.duration();
        if !(0.0..=t_p).contains(&t) {
            return Err(Error::Diagnostic { t, reason: format!("outside pulse domain [0, {t_p:e}]") });
        }
        let rates = match self {
            PulseProgram::Ap(p) => (p.rabi_rate(t), p.detuning_rate(t)),
            PulseProgram::Rect(_) => (0.0, 0.0),
            PulseProgram::Tabulated(p) => {
                let h = t_p * 1e-6;
                let lo = (t - h).max(0.0);
                let hi = (t + h).min(t_p);
                let dt = hi - lo;
                ((p.rabi(hi) - p.rabi(lo)) / dt, (p.detuning(hi) - p.detuning(lo)) / dt)
            }
        };
        if !(rates.0.is_finite() && rates.1.is_finite()) {
            return Err(Error::Diagnostic { t, reason: "non-finite derivative".into() });
        }
        Ok(rates)
    }
}

/// `|δ̇ Ω_R − δ Ω̇_R| / (2 (Ω_R² + δ²)^{3/2})`.
///
/// Returns `f64::INFINITY` where the field vanishes.
pub fn adiabaticity(t: f64, pulse: &PulseProgram) -> Result<f64> {
    let (omega_dot, delta_dot) = pulse.rates(t)?;
    let omega = pulse.rabi(t);
    let delta = pulse.detuning(t);
    let field_sqr = omega * omega + delta * delta;
    if field_sqr == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((delta_dot * omega - delta * omega_dot).abs() / (2.0 * field_sqr * field_sqr.sqrt()))
}

/// Interior grid `t_i = t_p·i/(n + 1)`, `i = 1..=n`; excludes the endpoints
/// where the sweep pulse has no field.
pub fn interior_grid(t_p: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |i| t_p * i as f64 / (n + 1) as f64)
}

/// Largest value of [`adiabaticity`] over an interior uniform grid of `grid_points` times.
pub fn max_adiabaticity(pulse: &PulseProgram, grid_points: usize) -> Result<f64> {
    if grid_points < 2 {
        return Err(Error::argument("max_adiabaticity needs at least two grid points"));
    }
    interior_grid(pulse.duration(), grid_points).try_fold(0.0f64, |acc, t| Ok(acc.max(adiabaticity(t, pulse)?)))
}

/// Adiabaticity at each time in `times`.
pub fn adiabaticity_profile(pulse: &PulseProgram, times: &[f64]) -> Result<Vec<f64>> {
    times.iter().map(|&t| adiabaticity(t, pulse)).collect()
}

/// JSON form of a pulse: frequencies in kHz, times in ms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PulseSpec {
    Ap(ApSpec),
    Rect(RectSpec),
    Tabulated(TabulatedSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApSpec {
    pub omega_max_khz: f64,
    pub delta_max_khz: f64,
    #[serde(default)]
    pub delta_c_khz: f64,
    pub t_p_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectSpec {
    pub omega_khz: f64,
    #[serde(default)]
    pub delta_khz: f64,
    pub t_p_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedSpec {
    pub samples: Vec<SampleSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub t_ms: f64,
    pub omega_khz: f64,
    pub delta_khz: f64,
}

impl TryFrom<PulseSpec> for PulseProgram {
    type Error = Error;

    fn try_from(spec: PulseSpec) -> Result<Self> {
        let p = match spec {
            PulseSpec::Ap(s) => APPulse::from_khz(s.omega_max_khz, s.delta_max_khz, s.delta_c_khz, s.t_p_ms)?.into(),
            PulseSpec::Rect(s) => {
                RectPulse::new(khz_to_rad_s(s.omega_khz), khz_to_rad_s(s.delta_khz), ms_to_s(s.t_p_ms))?.into()
            }
            PulseSpec::Tabulated(s) => TabulatedPulse::new(
                s.samples
                    .iter()
                    .map(|k| PulseSample {
                        t: ms_to_s(k.t_ms),
                        omega: khz_to_rad_s(k.omega_khz),
                        delta: khz_to_rad_s(k.delta_khz),
                    })
                    .collect(),
            )?
            .into(),
        };
        Ok(p)
    }
}

impl From<PulseProgram> for PulseSpec {
    fn from(p: PulseProgram) -> Self {
        match p {
            PulseProgram::Ap(p) => PulseSpec::Ap(ApSpec {
                omega_max_khz: rad_s_to_khz(p.omega_max),
                delta_max_khz: rad_s_to_khz(p.delta_max),
                delta_c_khz: rad_s_to_khz(p.delta_c),
                t_p_ms: s_to_ms(p.t_p),
            }),
            PulseProgram::Rect(p) => PulseSpec::Rect(RectSpec {
                omega_khz: rad_s_to_khz(p.omega),
                delta_khz: rad_s_to_khz(p.delta),
                t_p_ms: s_to_ms(p.t_p),
            }),
            PulseProgram::Tabulated(p) => PulseSpec::Tabulated(TabulatedSpec {
                samples: p
                    .samples
                    .iter()
                    .map(|k| SampleSpec {
                        t_ms: s_to_ms(k.t),
                        omega_khz: rad_s_to_khz(k.omega),
                        delta_khz: rad_s_to_khz(k.delta),
                    })
                    .collect(),
            }),
        }
    }
}
