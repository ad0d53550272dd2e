//! Position addressing in a magnetic field gradient.
//!
//! The gradient maps the position along the trap axis onto the atomic
//! resonance, so an offset `Δx` between atom and sweep centre acts as the
//! central detuning `δ_c = ∂xω_at Δx`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Drive;
use crate::error::{Error, Result};
use crate::scan::{ScanPoint, ScanResult, Unit};
use crate::spectrum::{EvalSettings, ThermalSpectrum};
use crate::thermal::ThermalModel;
use crate::units::khz_to_rad_s;

/// Gradient and extent of the trap region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapGeometry {
    /// `∂xω_at / 2π`, kHz/μm.
    #[serde(rename = "grad_khz_per_um")]
    pub grad_nu: f64,
    /// Offset of `ω_at / 2π` from the guiding field, MHz.
    #[serde(rename = "guide_shift_mhz")]
    pub guide_shift_nu: f64,
    /// Length of the modelled region along the trap axis, μm.
    #[serde(rename = "span_um")]
    pub span: f64,
}

impl TrapGeometry {
    pub fn new(grad_nu: f64, guide_shift_nu: f64, span: f64) -> Result<Self> {
        let g = TrapGeometry { grad_nu, guide_shift_nu, span };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grad_nu > 0.0 && self.grad_nu.is_finite()) {
            return Err(Error::argument(format!("gradient must be positive, got {} kHz/um", self.grad_nu)));
        }
        if !(self.span > 0.0 && self.span.is_finite()) {
            return Err(Error::argument(format!("span must be positive, got {} um", self.span)));
        }
        if !self.guide_shift_nu.is_finite() {
            return Err(Error::argument("guiding-field shift must be finite"));
        }
        Ok(())
    }

    /// `∂xω_at` in rad/s per μm.
    pub fn grad_omega(&self) -> f64 {
        khz_to_rad_s(self.grad_nu)
    }

    /// `ω_at / 2π` relative to the bare transition, MHz, at position `x` (μm).
    pub fn resonance_mhz(&self, x: f64) -> f64 {
        self.guide_shift_nu + self.grad_nu * x * 1e-3
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= 0.5 * self.span
    }
}

/// Position along the trap axis, μm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomPosition {
    pub x: f64,
}

impl AtomPosition {
    pub fn new(x: f64, g: &TrapGeometry) -> Result<Self> {
        if !(x.is_finite() && g.contains(x)) {
            return Err(Error::argument(format!("position {x} um lies outside the {} um span", g.span)));
        }
        Ok(AtomPosition { x })
    }
}

/// Central detuning produced by the offset `dx` (μm).
pub fn offset_to_detuning(dx: f64, g: &TrapGeometry) -> f64 {
    g.grad_omega() * dx
}

/// Position offset (μm) producing the central detuning `delta_c`.
pub fn detuning_to_offset(delta_c: f64, g: &TrapGeometry) -> f64 {
    delta_c / g.grad_omega()
}

/// Broadened transfer at each offset of `dx_grid` (μm), as a μm scan.
pub fn spatial_spectrum<D: Drive + Sync>(
    pulse: &D,
    g: &TrapGeometry,
    m: &ThermalModel,
    dx_grid: &[f64],
    settings: &EvalSettings,
) -> Result<ScanResult> {
    g.validate()?;
    if dx_grid.is_empty() {
        return Err(Error::argument("position grid is empty"));
    }
    let deltas: Vec<f64> = dx_grid.iter().map(|&dx| offset_to_detuning(dx, g)).collect();
    let lo = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spectrum = ThermalSpectrum::with_settings(pulse, *m, settings, lo, hi)?;
    spatial_from(&spectrum, g, dx_grid)
}

/// [`spatial_spectrum`] on an existing broadened spectrum.
pub fn spatial_from(spectrum: &ThermalSpectrum, g: &TrapGeometry, dx_grid: &[f64]) -> Result<ScanResult> {
    let points = dx_grid
        .par_iter()
        .map(|&dx| {
            let value = spectrum.eval(offset_to_detuning(dx, g))?;
            Ok(ScanPoint { abscissa: dx, value, stderr: None })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult::new(Unit::Micrometre, points))
}

/// Transfer of an atom at `neighbor_x` when the sweep is centred on the
/// atom at `target_x` (both μm).
///
/// A neighbour at larger `x` has a higher resonance and so sees the pulse
/// red-detuned by `∂xω_at (x_n − x_t)`.
pub fn crosstalk<D: Drive + Sync>(
    pulse: &D,
    target_x: f64,
    neighbor_x: f64,
    g: &TrapGeometry,
    m: &ThermalModel,
    settings: &EvalSettings,
) -> Result<f64> {
    AtomPosition::new(target_x, g)?;
    AtomPosition::new(neighbor_x, g)?;
    let delta = -offset_to_detuning(neighbor_x - target_x, g);
    let spectrum = ThermalSpectrum::with_settings(pulse, *m, settings, delta, delta)?;
    spectrum.eval(delta)
}

/// [`crosstalk`] on an existing broadened spectrum covering the needed detuning.
pub fn crosstalk_from(spectrum: &ThermalSpectrum, target_x: f64, neighbor_x: f64, g: &TrapGeometry) -> Result<f64> {
    AtomPosition::new(target_x, g)?;
    AtomPosition::new(neighbor_x, g)?;
    spectrum.eval(-offset_to_detuning(neighbor_x - target_x, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::rad_s_to_khz;

    fn geom() -> TrapGeometry {
        TrapGeometry::new(3.2, 9.8, 200.0).unwrap()
    }

    #[test]
    fn offset_detuning_map() {
        let g = geom();
        assert_eq!(offset_to_detuning(0.0, &g), 0.0);
        assert!((rad_s_to_khz(offset_to_detuning(1.0, &g)) - 3.2).abs() < 1e-12);
        assert!((rad_s_to_khz(offset_to_detuning(-10.0, &g)) + 32.0).abs() < 1e-12);
        for dx in [1.0, -10.0, 37.5] {
            let back = detuning_to_offset(offset_to_detuning(dx, &g), &g);
            assert!((back - dx).abs() <= 1e-12 * dx.abs());
        }
    }

    #[test]
    fn geometry_validation_and_json() {
        assert!(TrapGeometry::new(0.0, 9.8, 100.0).is_err());
        assert!(TrapGeometry::new(3.2, 9.8, -1.0).is_err());
        assert!(AtomPosition::new(101.0, &geom()).is_err());
        assert!(AtomPosition::new(-100.0, &geom()).is_ok());
        let g: TrapGeometry =
            serde_json::from_str(r#"{"grad_khz_per_um":3.2,"guide_shift_mhz":9.8,"span_um":200}"#).unwrap();
        assert_eq!(g, geom());
        assert!(serde_json::from_str::<TrapGeometry>(r#"{"grad_khz_per_um":3.2,"guide_shift_mhz":9.8}"#).is_err());
        assert!((g.resonance_mhz(10.0) - 9.832).abs() < 1e-12);
    }
}
