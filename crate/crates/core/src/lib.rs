//! Simulation of microwave-driven adiabatic passages on trapped two-level atoms.
//!
//! The crate integrates the undamped or dephased Bloch equations under
//! frequency-swept pulses ([`pulses`]), averages the resulting transfer over
//! the thermal distribution of differential light shifts ([`thermal`]), maps
//! positions in a magnetic gradient to detunings ([`addressing`]), simulates
//! passages induced by transporting atoms through the gradient
//! ([`transport`]) and fits broadening parameters to spectra ([`fit`]).
//! [`experiment`] ties these together behind a JSON run configuration.
//!
//! Internally frequencies are in rad/s and times in seconds; positions are
//! in μm. Configuration surfaces use kHz, ms and μm (see [`units`]).

pub mod addressing;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod interp;
pub mod ode;
pub mod pulses;
pub mod quadrature;
pub mod scan;
pub mod spectrum;
pub mod thermal;
pub mod transport;
pub mod units;

pub use addressing::{AtomPosition, TrapGeometry};
pub use dynamics::{BlochState, DampingModel, Drive};
pub use error::{Error, Result};
pub use experiment::{DetectionModel, Preset, RunConfig, ScanKind};
pub use fit::{FitOptions, FitResult};
pub use ode::IntegratorConfig;
pub use pulses::{APPulse, PulseProgram, RectPulse, TabulatedPulse};
pub use scan::{ScanPoint, ScanResult, Unit};
pub use spectrum::{EvalSettings, SpectrumCache, ThermalSpectrum};
pub use thermal::{ConvolutionOptions, ThermalModel};
pub use transport::{InteractionWidth, TransportPlan};
