//! Optical Bloch equations for a driven two-level system.
//!
//! Rotating frame, rotating-wave approximation, detuning `δ = ω − ω_at`:
//!
//! ```text
//! u' = −δ v − γ₂ u
//! v' =  δ u − Ω w − γ₂ v
//! w' =  Ω v
//! ```
//!
//! Without damping this is a rotation `r' = B × r` about the field vector
//! `B = (Ω, 0, δ)`, so `|r|` is conserved and the state `w = −1` (|0⟩) is
//! aligned with `B` whenever the drive is red detuned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, IntegratorConfig};

/// Bloch vector `(u, v, w)` with `w = P1 − P0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

const NORM_SLACK: f64 = 1e-9;

impl BlochState {
    pub const GROUND: BlochState = BlochState { u: 0.0, v: 0.0, w: -1.0 };
    pub const EXCITED: BlochState = BlochState { u: 0.0, v: 0.0, w: 1.0 };

    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        let s = BlochState { u, v, w };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u.is_finite() && self.v.is_finite() && self.w.is_finite()) {
            return Err(Error::argument(format!("non-finite Bloch vector {self:?}")));
        }
        if self.norm_sqr() > 1.0 + NORM_SLACK {
            return Err(Error::argument(format!("Bloch vector {self:?} lies outside the unit ball")));
        }
        Ok(())
    }

    /// The dressed state adiabatically connected to |0⟩ for a red-detuned
    /// drive: the unit vector along `(Ω, 0, δ)`.
    ///
    /// For `δ < 0` this is the state an atom in |0⟩ ends up in when the drive
    /// amplitude is ramped on slowly at fixed detuning.
    pub fn dressed(omega: f64, delta: f64) -> Result<Self> {
        let norm = omega.hypot(delta);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::argument("dressed state undefined for a vanishing field"));
        }
        Ok(BlochState { u: omega / norm, v: 0.0, w: delta / norm })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u * self.u + self.v * self.v + self.w * self.w
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochState { u: a[0], v: a[1], w: a[2] }
    }

    pub fn transfer_probability(&self) -> f64 {
        transfer_probability(self)
    }
}

/// Population of |1⟩, `(1 + w)/2`.
pub fn transfer_probability(state: &BlochState) -> f64 {
    ((1.0 + state.w) * 0.5).clamp(0.0, 1.0)
}

/// |1⟩ population after the drive `(Ω, δ)` is switched off adiabatically at
/// fixed detuning: the projection of `state` on the field direction is
/// carried onto the z axis with the sign of `δ`.
pub fn adiabatic_switch_off(state: &BlochState, omega: f64, delta: f64) -> f64 {
    let norm = omega.hypot(delta);
    if norm == 0.0 {
        return transfer_probability(state);
    }
    let along = (state.u * omega + state.w * delta) / norm;
    let sign = if delta < 0.0 { -1.0 } else { 1.0 };
    ((1.0 + sign * along) * 0.5).clamp(0.0, 1.0)
}

/// Phenomenological transverse dephasing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DampingModel {
    /// Transverse decay rate applied to u and v, rad/s.
    pub gamma_2: f64,
}

impl DampingModel {
    pub const NONE: DampingModel = DampingModel { gamma_2: 0.0 };

    pub fn new(gamma_2: f64) -> Result<Self> {
        let d = DampingModel { gamma_2 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_2 >= 0.0 && self.gamma_2.is_finite()) {
            return Err(Error::argument(format!("gamma_2 must be finite and ≥ 0, got {}", self.gamma_2)));
        }
        Ok(())
    }
}

/// A time-dependent drive `(Ω_R(t), δ(t))` on `[0, duration]`.
///
/// Implementations may assume `t` lies in the domain; `evolve` clamps every
/// evaluation time before calling.
pub trait Drive {
    /// Duration in seconds.
    fn duration(&self) -> f64;
    /// Rabi frequency, rad/s.
    fn rabi(&self, t: f64) -> f64;
    /// Detuning `ω − ω_at`, rad/s.
    fn detuning(&self, t: f64) -> f64;
}

impl<D: Drive + ?Sized> Drive for &D {
    fn duration(&self) -> f64 {
        (**self).duration()
    }
    fn rabi(&self, t: f64) -> f64 {
        (**self).rabi(t)
    }
    fn detuning(&self, t: f64) -> f64 {
        (**self).detuning(t)
    }
}

#[inline]
fn bloch_rhs<D: Drive + ?Sized>(drive: &D, gamma_2: f64, t_end: f64, t: f64, r: &[f64; 3]) -> [f64; 3] {
    let tc = t.clamp(0.0, t_end);
    let omega = drive.rabi(tc);
    let delta = drive.detuning(tc);
    let [u, v, w] = *r;
    [-delta * v - gamma_2 * u, delta * u - omega * w - gamma_2 * v, omega * v]
}

fn check_inputs<D: Drive + ?Sized>(state0: &BlochState, drive: &D, damping: &DampingModel) -> Result<f64> {
    let t_end = drive.duration();
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::argument(format!("pulse duration must be positive, got {t_end}")));
    }
    state0.validate()?;
    damping.validate()?;
    Ok(t_end)
}

/// Integrate the Bloch equations over the whole drive and return the final state.
pub fn evolve<D: Drive + ?Sized>(
    state0: BlochState,
    drive: &D,
    damping: DampingModel,
    cfg: &IntegratorConfig,
) -> Result<BlochState> {
    let t_end = check_inputs(&state0, drive, &damping)?;
    let g = damping.gamma_2;
    let y = ode::integrate(|t, r| bloch_rhs(drive, g, t_end, t, r), 0.0, t_end, state0.as_array(), cfg)?;
    Ok(BlochState::from_array(y))
}

/// Same as [`evolve`] but samples the trajectory at the sorted times `at`.
pub fn evolve_trajectory<D: Drive + ?Sized>(
    state0: BlochState,
    drive: &D,
    damping: DampingModel,
    cfg: &IntegratorConfig,
    at: &[f64],
) -> Result<Vec<BlochState>> {
    let t_end = check_inputs(&state0, drive, &damping)?;
    let g = damping.gamma_2;
    let ys = ode::integrate_dense(|t, r| bloch_rhs(drive, g, t_end, t, r), 0.0, t_end, state0.as_array(), cfg, at)?;
    Ok(ys.into_iter().map(BlochState::from_array).collect())
}
