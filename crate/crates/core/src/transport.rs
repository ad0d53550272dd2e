//! Transport-induced adiabatic passages.
//!
//! Moving the atom by `d` through the field gradient under a constant drive
//! sweeps the detuning by `∂xω_at d`. The trap accelerates uniformly with
//! `a = 4d/τ²` for the first half of the transport and decelerates for the
//! second half:
//!
//! ```text
//! δ(t) = δ_r + a ∂xω_at t²/2                 for t ≤ τ/2
//! δ(t) = δ_r + a ∂xω_at (τ²/4 − (t − τ)²/2)  for t > τ/2
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::addressing::TrapGeometry;
use crate::dynamics::{adiabatic_switch_off, evolve, BlochState, DampingModel, Drive};
use crate::error::{Error, Result};
use crate::ode::IntegratorConfig;
use crate::scan::{ScanPoint, ScanResult, Unit};

/// Shape of the initial-detuning spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpreadShape {
    /// Uniform over the full width.
    #[default]
    Uniform,
    /// Gaussian whose FWHM equals the full width.
    Gaussian,
}

/// One transport. Frequencies in rad/s, times in s, lengths in μm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportPlan {
    pub d: f64,
    pub tau: f64,
    pub omega_r: f64,
    /// Centre of the initial detuning distribution.
    pub delta_0: f64,
    /// Full width of the initial detuning distribution.
    pub spread: f64,
    pub shape: SpreadShape,
    pub g: TrapGeometry,
}

impl TransportPlan {
    pub fn validate(&self) -> Result<()> {
        self.g.validate()?;
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.d) || !pos(self.tau) || !pos(self.omega_r) {
            return Err(Error::argument(format!("distance, duration and Rabi frequency must be positive: {self:?}")));
        }
        if !(self.spread >= 0.0 && self.spread.is_finite() && self.delta_0.is_finite()) {
            return Err(Error::argument(format!("detuning spread must be finite and ≥ 0: {self:?}")));
        }
        Ok(())
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        TransportPlan { tau, ..*self }
    }

    /// `a = 4d/τ²`, μm/s².
    pub fn acceleration(&self) -> f64 {
        4.0 * self.d / (self.tau * self.tau)
    }

    /// Total detuning sweep `∂xω_at d`.
    pub fn sweep(&self) -> f64 {
        self.g.grad_omega() * self.d
    }

    fn detuning_unchecked(&self, t: f64, delta_r: f64) -> f64 {
        let k = self.acceleration() * self.g.grad_omega();
        if t <= 0.5 * self.tau {
            delta_r + 0.5 * k * t * t
        } else {
            let s = t - self.tau;
            delta_r + k * (0.25 * self.tau * self.tau - 0.5 * s * s)
        }
    }

    /// Time at which `δ(t) = 0`, if the sweep crosses resonance.
    pub fn crossing_time(&self, delta_r: f64) -> Option<f64> {
        let k = self.acceleration() * self.g.grad_omega();
        let half = self.sweep() / 2.0;
        if delta_r >= 0.0 || delta_r + self.sweep() <= 0.0 {
            return None;
        }
        let need = -delta_r;
        Some(if need <= half {
            (2.0 * need / k).sqrt()
        } else {
            self.tau - (2.0 * (self.sweep() - need) / k).sqrt()
        })
    }

    /// `|dδ/dt|` at the resonance crossing.
    pub fn crossing_rate(&self, delta_r: f64) -> Option<f64> {
        let t = self.crossing_time(delta_r)?;
        let k = self.acceleration() * self.g.grad_omega();
        Some(k * t.min(self.tau - t))
    }
}

/// `δ(t)` for initial detuning `delta_r`; `t` must lie in `[0, τ]`.
pub fn transport_detuning(t: f64, delta_r: f64, plan: &TransportPlan) -> Result<f64> {
    if !(0.0..=plan.tau).contains(&t) {
        return Err(Error::argument(format!("t = {t} s outside the transport [0, {}] s", plan.tau)));
    }
    Ok(plan.detuning_unchecked(t, delta_r))
}

/// Effective width of the interaction region, `L = 2Ω_R/∂xω_at`, μm.
pub fn interaction_width(plan: &TransportPlan) -> InteractionWidth {
    InteractionWidth { l: 2.0 * plan.omega_r / plan.g.grad_omega() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionWidth {
    /// μm.
    pub l: f64,
}

/// How the constant drive is turned on and off around the transport.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchOn {
    /// Ideal adiabatic switching: start in the dressed state connected to |0⟩
    /// and project onto the dressed basis at the end.
    Dressed,
    /// sin² amplitude ramps of the given duration (s) before and after the
    /// transport, with the atom at rest.
    Ramp(f64),
}

impl Default for SwitchOn {
    fn default() -> Self {
        SwitchOn::Dressed
    }
}

/// Constant drive during one transport, optionally framed by amplitude ramps.
#[derive(Debug, Clone, Copy)]
pub struct TransportDrive {
    pub plan: TransportPlan,
    pub delta_r: f64,
    pub ramp: f64,
}

impl Drive for TransportDrive {
    fn duration(&self) -> f64 {
        self.plan.tau + 2.0 * self.ramp
    }
    fn rabi(&self, t: f64) -> f64 {
        let r = self.ramp;
        let envelope = if t < r {
            (0.5 * PI * t / r).sin().powi(2)
        } else if t > r + self.plan.tau {
            (0.5 * PI * (self.duration() - t) / r).sin().powi(2)
        } else {
            1.0
        };
        self.plan.omega_r * envelope
    }
    fn detuning(&self, t: f64) -> f64 {
        let s = (t - self.ramp).clamp(0.0, self.plan.tau);
        self.plan.detuning_unchecked(s, self.delta_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransportOptions {
    pub integrator: IntegratorConfig,
    pub switch_on: SwitchOn,
}

/// Dressed state adiabatically connected to |0⟩ for the field `(Ω, 0, δ)`.
fn dressed_ground(omega: f64, delta: f64) -> Result<BlochState> {
    let s = BlochState::dressed(omega, delta)?;
    Ok(if delta > 0.0 { BlochState::new(-s.u, -s.v, -s.w)? } else { s })
}

/// Transfer for a single initial detuning.
pub fn single_transfer(plan: &TransportPlan, delta_r: f64, damping: DampingModel, opts: &TransportOptions) -> Result<f64> {
    plan.validate()?;
    match opts.switch_on {
        SwitchOn::Dressed => {
            let drive = TransportDrive { plan: *plan, delta_r, ramp: 0.0 };
            let start = dressed_ground(plan.omega_r, drive.detuning(0.0))?;
            let end = evolve(start, &drive, damping, &opts.integrator)?;
            Ok(adiabatic_switch_off(&end, plan.omega_r, drive.detuning(plan.tau)))
        }
        SwitchOn::Ramp(ramp) => {
            if !(ramp > 0.0 && ramp.is_finite()) {
                return Err(Error::argument(format!("ramp duration must be positive, got {ramp}")));
            }
            let drive = TransportDrive { plan: *plan, delta_r, ramp };
            Ok(evolve(BlochState::GROUND, &drive, damping, &opts.integrator)?.transfer_probability())
        }
    }
}

/// Initial detuning of ensemble member `index`, from its own ChaCha8 stream.
pub fn member_detuning(plan: &TransportPlan, rng_seed: u64, index: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(index as u64);
    match plan.shape {
        SpreadShape::Uniform => plan.delta_0 + plan.spread * (rng.random::<f64>() - 0.5),
        SpreadShape::Gaussian => {
            let sigma = plan.spread / (2.0 * (2.0 * 2f64.ln()).sqrt());
            match Normal::new(plan.delta_0, sigma) {
                Ok(n) => n.sample(&mut rng),
                Err(_) => plan.delta_0,
            }
        }
    }
}

/// Ensemble-averaged transport transfer.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportOutcome {
    pub mean: f64,
    /// Standard error of the mean; zero for a single member.
    pub stderr: f64,
    pub std_dev: f64,
    pub delta_r: Vec<f64>,
    pub members: Vec<f64>,
}

/// Mean transfer over `n_ensemble` initial detunings drawn from the spread.
pub fn transport_transfer(
    plan: &TransportPlan,
    damping: DampingModel,
    n_ensemble: usize,
    rng_seed: u64,
    opts: &TransportOptions,
) -> Result<TransportOutcome> {
    plan.validate()?;
    if n_ensemble == 0 {
        return Err(Error::argument("ensemble needs at least one member"));
    }
    let delta_r: Vec<f64> = (0..n_ensemble).map(|i| member_detuning(plan, rng_seed, i)).collect();
    let members = delta_r
        .par_iter()
        .map(|&d| single_transfer(plan, d, damping, opts))
        .collect::<Result<Vec<f64>>>()?;
    let n = n_ensemble as f64;
    let mean = members.iter().sum::<f64>() / n;
    let std_dev = if n_ensemble > 1 {
        (members.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(TransportOutcome { mean, stderr: std_dev / n.sqrt(), std_dev, delta_r, members })
}

/// Transfer versus `1/τ` (ms⁻¹); every point reuses the same detuning draws.
pub fn transport_scan(
    plan: &TransportPlan,
    inv_tau_per_ms: &[f64],
    damping: DampingModel,
    n_ensemble: usize,
    rng_seed: u64,
    opts: &TransportOptions,
) -> Result<ScanResult> {
    if inv_tau_per_ms.is_empty() {
        return Err(Error::argument("transport grid is empty"));
    }
    let points = inv_tau_per_ms
        .par_iter()
        .map(|&inv| {
            if !(inv > 0.0 && inv.is_finite()) {
                return Err(Error::argument(format!("1/tau must be positive, got {inv}")));
            }
            let o = transport_transfer(&plan.with_tau(1e-3 / inv), damping, n_ensemble, rng_seed, opts)?;
            Ok(ScanPoint { abscissa: inv, value: o.mean, stderr: Some(o.stderr) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::new(Unit::PerMs, points))
}

/// Landau–Zener probability of following the dressed state through a linear
/// crossing, `1 − exp(−πΩ²/(2α))`.
pub fn landau_zener_oracle(omega: f64, sweep_rate: f64) -> Result<f64> {
    if !(sweep_rate > 0.0) {
        return Err(Error::argument(format!("sweep rate must be positive, got {sweep_rate}")));
    }
    Ok(-(-PI * omega * omega / (2.0 * sweep_rate)).exp_m1())
}

/// Constant-coupling linear sweep `δ = α(t − T/2)` from `−δ_edge` to `+δ_edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCrossing {
    pub omega: f64,
    pub alpha: f64,
    pub delta_edge: f64,
}

impl Drive for LinearCrossing {
    fn duration(&self) -> f64 {
        2.0 * self.delta_edge / self.alpha
    }
    fn rabi(&self, _t: f64) -> f64 {
        self.omega
    }
    fn detuning(&self, t: f64) -> f64 {
        self.alpha * t - self.delta_edge
    }
}

/// Following probability through a [`LinearCrossing`] with ideal switching.
pub fn linear_crossing_transfer(crossing: &LinearCrossing, cfg: &IntegratorConfig) -> Result<f64> {
    if !(crossing.alpha > 0.0 && crossing.delta_edge > 0.0 && crossing.omega > 0.0) {
        return Err(Error::argument(format!("invalid crossing {crossing:?}")));
    }
    let start = dressed_ground(crossing.omega, -crossing.delta_edge)?;
    let end = evolve(start, crossing, DampingModel::NONE, cfg)?;
    Ok(adiabatic_switch_off(&end, crossing.omega, crossing.delta_edge))
}
