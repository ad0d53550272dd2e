//! Run configuration, detection model, presets and scan dispatch.
//!
//! Configurations are strict JSON: frequencies in kHz, times in ms, lengths
//! in μm, and unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::addressing::{offset_to_detuning, spatial_spectrum, TrapGeometry};
use crate::dynamics::DampingModel;
use crate::error::{Error, Result};
use crate::fit::{fit_spectrum, FitOptions, FitResult};
use crate::ode::IntegratorConfig;
use crate::pulses::{adiabaticity_profile, APPulse, PulseProgram};
use crate::scan::{Quantity, ScanPoint, ScanResult, Unit};
use crate::spectrum::{detuning_spectrum, EvalSettings, ThermalSpectrum};
use crate::thermal::{ConvolutionOptions, ThermalModel};
use crate::transport::{transport_scan, SpreadShape, SwitchOn, TransportOptions, TransportPlan};
use crate::units::{khz_to_rad_s, ms_to_s, per_ms_to_per_s};

/// State-selective push-out detection with imperfect preparation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionModel {
    /// Probability that an atom in |0⟩ is pushed out.
    #[serde(default = "default_eff")]
    pub eps_pushout: f64,
    /// Probability that an atom in |1⟩ survives detection.
    #[serde(default = "default_eff")]
    pub eps_keep: f64,
    /// Probability that the atom starts in |0⟩.
    #[serde(default = "default_p_init")]
    pub p_init: f64,
}

fn default_eff() -> f64 {
    0.99
}

fn default_p_init() -> f64 {
    0.95
}

impl Default for DetectionModel {
    fn default() -> Self {
        DetectionModel { eps_pushout: default_eff(), eps_keep: default_eff(), p_init: default_p_init() }
    }
}

impl DetectionModel {
    pub const IDEAL: DetectionModel = DetectionModel { eps_pushout: 1.0, eps_keep: 1.0, p_init: 1.0 };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps_pushout", self.eps_pushout), ("eps_keep", self.eps_keep), ("p_init", self.p_init)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::argument(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    /// `(offset, slope)` of the affine map from true to measured transfer.
    pub fn affine(&self) -> (f64, f64) {
        let dark = 1.0 - self.eps_pushout;
        (dark, self.p_init * (self.eps_keep - dark))
    }
}

/// Survival probability measured for a true transfer `p1_true`.
///
/// An atom prepared in |0⟩ survives if it was flipped and kept, or was not
/// flipped and escaped the push-out. An atom that failed preparation stays in
/// the lower hyperfine level out of resonance with the microwave and is
/// pushed out like |0⟩.
pub fn apply_detection(p1_true: f64, det: &DetectionModel) -> Result<f64> {
    det.validate()?;
    if !(0.0..=1.0).contains(&p1_true) {
        return Err(Error::argument(format!("transfer probability must lie in [0, 1], got {p1_true}")));
    }
    let dark = 1.0 - det.eps_pushout;
    Ok(det.p_init * (p1_true * det.eps_keep + (1.0 - p1_true) * dark) + (1.0 - det.p_init) * dark)
}

/// Scan abscissas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Grid {
    Range { start: f64, stop: f64, step: f64 },
    Points { points: Vec<f64> },
}

impl Grid {
    /// Abscissas in order; a range includes `stop` when it falls on the grid.
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Grid::Range { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && *step > 0.0 && stop >= start) {
                    return Err(Error::config(format!("invalid range {start}..{stop} step {step}")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..n).map(|i| start + step * i as f64).collect()
            }
            Grid::Points { points } => points.clone(),
        };
        if v.is_empty() {
            return Err(Error::config("scan grid is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("scan grid must be finite and strictly increasing"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    /// Central detuning, kHz.
    Spectrum,
    /// Atom offset from the sweep centre, μm.
    Spatial,
    /// Inverse transport duration, ms⁻¹.
    Transport,
    /// Time within the pulse, ms.
    Adiabaticity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub kind: ScanKind,
    pub grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_max_step_ms")]
    pub max_step_ms: f64,
}

fn default_rel_tol() -> f64 {
    IntegratorConfig::default().rel_tol
}
fn default_abs_tol() -> f64 {
    IntegratorConfig::default().abs_tol
}
fn default_max_step_ms() -> f64 {
    IntegratorConfig::default().max_step * 1e3
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec { rel_tol: default_rel_tol(), abs_tol: default_abs_tol(), max_step_ms: default_max_step_ms() }
    }
}

impl IntegratorSpec {
    pub fn config(&self) -> IntegratorConfig {
        IntegratorConfig { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_step: ms_to_s(self.max_step_ms) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DampingSpec {
    #[serde(default)]
    pub gamma_2_per_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionSpec {
    #[serde(default = "default_true")]
    pub renormalize: bool,
    #[serde(default = "default_conv_tol")]
    pub abs_tol: f64,
    /// Raw-spectrum cache spacing; `δ_th/20` when absent.
    #[serde(default)]
    pub cache_step_khz: Option<f64>,
}

fn default_true() -> bool {
    ConvolutionOptions::default().renormalize
}
fn default_conv_tol() -> f64 {
    ConvolutionOptions::default().abs_tol
}

impl Default for ConvolutionSpec {
    fn default() -> Self {
        ConvolutionSpec { renormalize: default_true(), abs_tol: default_conv_tol(), cache_step_khz: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportSpec {
    pub distance_um: f64,
    pub omega_r_khz: f64,
    pub delta_0_khz: f64,
    pub spread_khz: f64,
    #[serde(default)]
    pub shape: SpreadShape,
    #[serde(default = "default_ensemble")]
    pub n_ensemble: usize,
    /// sin² switch-on/off ramps of this duration; ideal switching when absent.
    #[serde(default)]
    pub ramp_ms: Option<f64>,
}

fn default_ensemble() -> usize {
    32
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    /// Starting point; the `thermal` section is used when absent.
    #[serde(default)]
    pub guess: Option<ThermalModel>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_max_iterations() -> usize {
    FitOptions::default().max_iterations
}

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scan: ScanSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseProgram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<TrapGeometry>,
    /// Light-shift broadening; the Bloch-only spectrum is reported when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal: Option<ThermalModel>,
    /// Applied to transfer scans when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSpec>,
    #[serde(default)]
    pub convolution: ConvolutionSpec,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub damping: DampingSpec,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parse and validate; every failure is a configuration error.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    fn need<'a, T>(&self, v: &'a Option<T>, what: &str) -> Result<&'a T> {
        v.as_ref().ok_or_else(|| Error::config(format!("{:?} scan needs a `{what}` section", self.scan.kind)))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| match e {
            Error::Argument(m) => Error::Config(m),
            other => other,
        };
        self.scan.grid.values()?;
        self.integrator.config().validate().map_err(cfg_err)?;
        self.damping().map_err(cfg_err)?;
        if let Some(d) = &self.detection {
            d.validate().map_err(cfg_err)?;
        }
        if let Some(g) = &self.geometry {
            g.validate().map_err(cfg_err)?;
        }
        if !(self.convolution.abs_tol > 0.0) || self.convolution.cache_step_khz.is_some_and(|s| !(s > 0.0)) {
            return Err(Error::config("convolution tolerance and cache step must be positive"));
        }
        match self.scan.kind {
            ScanKind::Spectrum => {
                self.need(&self.pulse, "pulse")?;
            }
            ScanKind::Spatial => {
                self.need(&self.pulse, "pulse")?;
                self.need(&self.geometry, "geometry")?;
            }
            ScanKind::Adiabaticity => {
                let pulse = self.need(&self.pulse, "pulse")?;
                let t_p = crate::dynamics::Drive::duration(pulse) * 1e3;
                let grid = self.scan.grid.values()?;
                if grid[0] < 0.0 || grid[grid.len() - 1] > t_p * (1.0 + 1e-12) {
                    return Err(Error::config(format!("adiabaticity grid must lie within [0, {t_p}] ms")));
                }
            }
            ScanKind::Transport => {
                self.need(&self.geometry, "geometry")?;
                let t = self.need(&self.transport, "transport")?;
                if t.n_ensemble == 0 {
                    return Err(Error::config("n_ensemble must be at least 1"));
                }
                if t.ramp_ms.is_some_and(|r| !(r > 0.0)) {
                    return Err(Error::config("ramp_ms must be positive"));
                }
                self.transport_plan(1e-3).map_err(cfg_err)?;
                if self.scan.grid.values()?.iter().any(|&x| !(x > 0.0)) {
                    return Err(Error::config("transport grid values (1/tau) must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn damping(&self) -> Result<DampingModel> {
        DampingModel::new(per_ms_to_per_s(self.damping.gamma_2_per_ms))
    }

    pub fn settings(&self) -> Result<EvalSettings> {
        Ok(EvalSettings {
            damping: self.damping()?,
            integrator: self.integrator.config(),
            convolution: ConvolutionOptions { renormalize: self.convolution.renormalize, abs_tol: self.convolution.abs_tol },
            cache_step: self.convolution.cache_step_khz.map(khz_to_rad_s),
        })
    }

    /// Plan for a transport of duration `tau` (s).
    pub fn transport_plan(&self, tau: f64) -> Result<TransportPlan> {
        let t = self.need(&self.transport, "transport")?;
        let plan = TransportPlan {
            d: t.distance_um,
            tau,
            omega_r: khz_to_rad_s(t.omega_r_khz),
            delta_0: khz_to_rad_s(t.delta_0_khz),
            spread: khz_to_rad_s(t.spread_khz),
            shape: t.shape,
            g: *self.need(&self.geometry, "geometry")?,
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Detuning spectrum of the 2 ms sweep: Ω_max/2π = 28 kHz, δ_max/2π = 40 kHz,
    /// δ_c/2π from −65 to 65 kHz in 1 kHz steps, with the fitted broadening.
    Fig2,
    /// Position-resolved transfer in a 3.2 kHz/μm gradient. The pulse
    /// parameters of this measurement are not known; the Fig2 sweep is reused.
    Fig3,
    /// Transport over 132 μm under a constant 26 kHz drive, versus 1/τ.
    Fig4b,
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4b" => Ok(Preset::Fig4b),
            other => Err(Error::config(format!("unknown preset `{other}` (fig2, fig3, fig4b)"))),
        }
    }
}

pub fn fig2_pulse() -> APPulse {
    APPulse { omega_max: khz_to_rad_s(28.0), delta_max: khz_to_rad_s(40.0), delta_c: 0.0, t_p: 2e-3 }
}

pub fn fig2_thermal() -> ThermalModel {
    ThermalModel { delta_ls_max: khz_to_rad_s(-11.0), delta_th: khz_to_rad_s(1.7), p_max: 0.95 }
}

pub fn paper_geometry() -> TrapGeometry {
    TrapGeometry { grad_nu: 3.2, guide_shift_nu: 9.8, span: 400.0 }
}

pub fn fig4b_transport() -> TransportSpec {
    TransportSpec {
        distance_um: 132.0,
        omega_r_khz: 26.0,
        delta_0_khz: -72.0,
        spread_khz: 32.0,
        shape: SpreadShape::Uniform,
        n_ensemble: 32,
        ramp_ms: None,
    }
}

fn base(kind: ScanKind, grid: Grid) -> RunConfig {
    RunConfig {
        scan: ScanSpec { kind, grid },
        pulse: None,
        geometry: None,
        thermal: None,
        detection: None,
        transport: None,
        fit: None,
        convolution: ConvolutionSpec::default(),
        integrator: IntegratorSpec::default(),
        damping: DampingSpec::default(),
        seed: 0,
    }
}

impl Preset {
    pub fn config(self) -> RunConfig {
        match self {
            Preset::Fig2 => RunConfig {
                pulse: Some(fig2_pulse().into()),
                thermal: Some(fig2_thermal()),
                ..base(ScanKind::Spectrum, Grid::Range { start: -65.0, stop: 65.0, step: 1.0 })
            },
            Preset::Fig3 => RunConfig {
                pulse: Some(fig2_pulse().into()),
                geometry: Some(paper_geometry()),
                thermal: Some(fig2_thermal()),
                ..base(ScanKind::Spatial, Grid::Range { start: -20.0, stop: 20.0, step: 0.25 })
            },
            Preset::Fig4b => RunConfig {
                geometry: Some(paper_geometry()),
                transport: Some(fig4b_transport()),
                ..base(
                    ScanKind::Transport,
                    Grid::Points { points: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0] },
                )
            },
        }
    }
}

/// Default adiabaticity grid: 201 evenly spaced times across the pulse, ms.
pub fn adiabaticity_grid(pulse: &PulseProgram) -> Grid {
    let t_p = crate::dynamics::Drive::duration(pulse) * 1e3;
    Grid::Range { start: 0.0, stop: t_p, step: t_p / 200.0 }
}

fn detect(mut scan: ScanResult, det: Option<&DetectionModel>) -> Result<ScanResult> {
    if let Some(det) = det {
        let (_, slope) = det.affine();
        for p in &mut scan.points {
            p.value = apply_detection(p.value.clamp(0.0, 1.0), det)?;
            p.stderr = p.stderr.map(|s| s * slope.abs());
        }
    }
    Ok(scan)
}

/// Run the scan described by `cfg`. Deterministic in `cfg` (including its seed).
pub fn run_scan(cfg: &RunConfig) -> Result<ScanResult> {
    cfg.validate()?;
    let grid = cfg.scan.grid.values()?;
    let settings = cfg.settings()?;
    let scan = match cfg.scan.kind {
        ScanKind::Spectrum => {
            let pulse = cfg.need(&cfg.pulse, "pulse")?;
            let deltas: Vec<f64> = grid.iter().map(|&k| khz_to_rad_s(k)).collect();
            let values = transfer_at(pulse, cfg.thermal.as_ref(), &settings, &deltas)?;
            ScanResult::from_values(Unit::KHz, &grid, &values)
        }
        ScanKind::Spatial => {
            let pulse = cfg.need(&cfg.pulse, "pulse")?;
            let g = cfg.need(&cfg.geometry, "geometry")?;
            match &cfg.thermal {
                Some(m) => spatial_spectrum(pulse, g, m, &grid, &settings)?,
                None => {
                    let deltas: Vec<f64> = grid.iter().map(|&x| offset_to_detuning(x, g)).collect();
                    let values = transfer_at(pulse, None, &settings, &deltas)?;
                    ScanResult::from_values(Unit::Micrometre, &grid, &values)
                }
            }
        }
        ScanKind::Transport => {
            let t = cfg.need(&cfg.transport, "transport")?;
            let plan = cfg.transport_plan(1e-3)?;
            let opts = TransportOptions {
                integrator: settings.integrator,
                switch_on: t.ramp_ms.map_or(SwitchOn::Dressed, |r| SwitchOn::Ramp(ms_to_s(r))),
            };
            transport_scan(&plan, &grid, settings.damping, t.n_ensemble, cfg.seed, &opts)?
        }
        ScanKind::Adiabaticity => {
            let pulse = cfg.need(&cfg.pulse, "pulse")?;
            let times: Vec<f64> = grid.iter().map(|&t| ms_to_s(t)).collect();
            let values = adiabaticity_profile(pulse, &times)?;
            let points =
                grid.iter().zip(values).map(|(&abscissa, value)| ScanPoint { abscissa, value, stderr: None }).collect();
            return Ok(ScanResult { unit: Unit::Ms, quantity: Quantity::Adiabaticity, points });
        }
    };
    detect(scan, cfg.detection.as_ref())
}

fn transfer_at(pulse: &PulseProgram, thermal: Option<&ThermalModel>, s: &EvalSettings, deltas: &[f64]) -> Result<Vec<f64>> {
    match thermal {
        Some(m) => {
            let lo = deltas.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            ThermalSpectrum::with_settings(pulse, *m, s, lo, hi)?.eval_many(deltas)
        }
        None => detuning_spectrum(pulse, s.damping, &s.integrator, deltas),
    }
}

/// Fit the broadening parameters of `cfg`'s pulse to `data`.
pub fn run_fit(cfg: &RunConfig, data: &ScanResult) -> Result<FitResult> {
    let pulse = cfg.pulse.as_ref().ok_or_else(|| Error::config("fit needs a `pulse` section"))?;
    let spec = cfg.fit.unwrap_or(FitSpec { guess: None, max_iterations: default_max_iterations() });
    let guess = spec
        .guess
        .or(cfg.thermal)
        .ok_or_else(|| Error::config("fit needs `fit.guess` or a `thermal` section as its starting point"))?;
    let settings = cfg.settings()?;
    let opts = FitOptions {
        max_iterations: spec.max_iterations,
        renormalize: settings.convolution.renormalize,
        cache_step: settings.cache_step,
        damping: settings.damping,
        integrator: settings.integrator,
        ..FitOptions::default()
    };
    fit_spectrum(data, pulse, guess, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detection_examples() {
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(apply_detection(p, &DetectionModel::IDEAL).unwrap(), p);
        }
        let d = DetectionModel { p_init: 1.0, ..Default::default() };
        assert!((apply_detection(1.0, &d).unwrap() - 0.99).abs() < 1e-15);
        assert!((apply_detection(0.0, &d).unwrap() - 0.01).abs() < 1e-15);
        assert!(apply_detection(1.1, &d).is_err());
        assert!(apply_detection(0.5, &DetectionModel { eps_keep: 2.0, ..d }).is_err());
        let full = DetectionModel::default();
        let (a, b) = full.affine();
        let p = 0.37;
        assert!((apply_detection(p, &full).unwrap() - (a + b * p)).abs() < 1e-15);
    }

    #[test]
    fn grid_expansion() {
        let g = Grid::Range { start: -65.0, stop: 65.0, step: 1.0 };
        let v = g.values().unwrap();
        assert_eq!(v.len(), 131);
        assert_eq!((v[0], v[130]), (-65.0, 65.0));
        assert_eq!(Grid::Range { start: 0.0, stop: 1.0, step: 0.1 }.values().unwrap().len(), 11);
        assert!(Grid::Points { points: vec![] }.values().is_err());
        assert!(Grid::Points { points: vec![1.0, 0.0] }.values().is_err());
        assert!(Grid::Range { start: 1.0, stop: 0.0, step: 1.0 }.values().is_err());
    }

    #[test]
    fn strict_loader() {
        let ok = r#"{"scan":{"kind":"spectrum","grid":{"points":[0]}},
                     "pulse":{"kind":"ap","omega_max_khz":28,"delta_max_khz":40,"t_p_ms":2}}"#;
        let cfg = RunConfig::from_json(ok).unwrap();
        assert!(cfg.thermal.is_none());
        let unknown = ok.replace("\"t_p_ms\":2", "\"t_p_ms\":2,\"tp\":2");
        assert!(matches!(RunConfig::from_json(&unknown), Err(Error::Config(_))));
        let extra_top = ok.replacen('{', "{\"colour\":1,", 1);
        assert!(RunConfig::from_json(&extra_top).is_err());
        let empty = ok.replace("[0]", "[]");
        assert!(matches!(RunConfig::from_json(&empty), Err(Error::Config(_))));
        let no_pulse = r#"{"scan":{"kind":"spectrum","grid":{"points":[0]}}}"#;
        assert!(RunConfig::from_json(no_pulse).is_err());
    }

    #[test]
    fn presets_round_trip_through_json() {
        for p in [Preset::Fig2, Preset::Fig3, Preset::Fig4b] {
            let cfg = p.config();
            cfg.validate().unwrap();
            let back = RunConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(back.scan, cfg.scan);
            assert_eq!(back.seed, cfg.seed);
        }
        assert!("fig5".parse::<Preset>().is_err());
    }

    #[test]
    fn adiabaticity_scan() {
        let mut cfg = Preset::Fig2.config();
        cfg.scan = ScanSpec { kind: ScanKind::Adiabaticity, grid: adiabaticity_grid(cfg.pulse.as_ref().unwrap()) };
        let s = run_scan(&cfg).unwrap();
        assert_eq!(s.len(), 201);
        assert_eq!(s.quantity, Quantity::Adiabaticity);
        assert!(s.max_value().unwrap() < 0.01);
        cfg.scan.grid = Grid::Points { points: vec![0.0, 3.0] };
        assert!(cfg.validate().is_err());
    }
}
