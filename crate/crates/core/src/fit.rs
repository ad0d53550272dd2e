//! Least-squares fit of the thermal parameters to a measured spectrum.
//!
//! The raw Bloch spectrum does not depend on the thermal parameters, so it is
//! tabulated once and only the light-shift average is recomputed while the
//! optimizer moves. Parameters are mapped to unconstrained coordinates
//! `(ln δ_th, ln(−δ_ls^max), logit P_max)` and minimized with
//! Levenberg–Marquardt on a central-difference Jacobian.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::dynamics::{DampingModel, Drive};
use crate::error::{Error, Result};
use crate::ode::IntegratorConfig;
use crate::scan::{ScanResult, Unit};
use crate::spectrum::SpectrumCache;
use crate::thermal::{convolve_at, ConvolutionOptions, ThermalModel};
use crate::units::khz_to_rad_s;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Converged once no parameter moves by more than this fraction.
    pub rel_step_tol: f64,
    /// Central-difference step in the unconstrained coordinates.
    pub fd_step: f64,
    /// Quadrature tolerance; must sit well below `fd_step` for a clean Jacobian.
    pub quad_abs_tol: f64,
    pub renormalize: bool,
    /// Raw-spectrum cache spacing, rad/s; `δ_th/20` of the initial guess when unset.
    pub cache_step: Option<f64>,
    pub damping: DampingModel,
    pub integrator: IntegratorConfig,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            rel_step_tol: 1e-6,
            fd_step: 1e-4,
            quad_abs_tol: 1e-10,
            renormalize: ConvolutionOptions::default().renormalize,
            cache_step: None,
            damping: DampingModel::NONE,
            integrator: IntegratorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ThermalModel,
    /// Unweighted RMS of model minus data.
    pub residual_rms: f64,
    /// Weighted sum of squares at the fitted parameters.
    pub chi_square: f64,
    pub n_iterations: usize,
    pub converged: bool,
}

/// Sum of squared residuals, each divided by the point's stderr when given.
pub fn chi_square(data: &ScanResult, model_curve: impl Fn(f64) -> f64) -> f64 {
    data.points
        .iter()
        .map(|p| {
            let r = model_curve(p.abscissa) - p.value;
            match p.stderr {
                Some(s) if s > 0.0 => (r / s).powi(2),
                _ => r * r,
            }
        })
        .sum()
}

fn to_rad_s(unit: Unit, x: f64) -> Result<f64> {
    match unit {
        Unit::KHz => Ok(khz_to_rad_s(x)),
        Unit::RadPerS => Ok(x),
        other => Err(Error::argument(format!("cannot fit a spectrum over {other}; use kHz or rad/s"))),
    }
}

fn check_data(data: &ScanResult) -> Result<()> {
    if data.len() < 10 {
        return Err(Error::argument(format!("fit needs at least 10 points, got {}", data.len())));
    }
    if data.points.iter().any(|p| !p.value.is_finite() || !p.abscissa.is_finite()) {
        return Err(Error::argument("data contain non-finite values"));
    }
    let (lo, hi) = data
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.value), b.max(p.value)));
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::DegenerateData("all data points have the same value".into()));
    }
    Ok(())
}

const P_EPS: f64 = 1e-9;

fn encode(m: &ThermalModel) -> Vector3<f64> {
    let p = m.p_max.clamp(P_EPS, 1.0 - P_EPS);
    Vector3::new(m.delta_th.ln(), (-m.delta_ls_max).ln(), (p / (1.0 - p)).ln())
}

fn decode(theta: &Vector3<f64>) -> ThermalModel {
    ThermalModel {
        delta_th: theta[0].exp(),
        delta_ls_max: -theta[1].exp(),
        p_max: 1.0 / (1.0 + (-theta[2]).exp()),
    }
}

fn physical(m: &ThermalModel) -> [f64; 3] {
    [m.delta_th, m.delta_ls_max, m.p_max]
}

struct Problem<'a, F> {
    xs: Vec<f64>,
    ys: Vec<f64>,
    weights: Vec<f64>,
    raw: &'a F,
    conv: ConvolutionOptions,
}

impl<F: Fn(f64) -> f64> Problem<'_, F> {
    fn model(&self, m: &ThermalModel) -> Result<Vec<f64>> {
        self.xs.iter().map(|&x| convolve_at(self.raw, m, x, &self.conv)).collect()
    }

    fn residuals(&self, theta: &Vector3<f64>) -> Result<Vec<f64>> {
        let model = self.model(&decode(theta))?;
        Ok(model.iter().zip(&self.ys).zip(&self.weights).map(|((m, y), w)| (m - y) * w).collect())
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Fit against an arbitrary raw spectrum `δ_c ↦ P1` (rad/s).
pub fn fit_raw<F: Fn(f64) -> f64>(data: &ScanResult, raw: &F, guess: ThermalModel, opts: &FitOptions) -> Result<FitResult> {
    check_data(data)?;
    guess.validate()?;
    if !(guess.delta_ls_max < 0.0) {
        return Err(Error::argument("initial guess needs a strictly negative delta_ls_max"));
    }
    let xs = data.points.iter().map(|p| to_rad_s(data.unit, p.abscissa)).collect::<Result<Vec<_>>>()?;
    let weights = data
        .points
        .iter()
        .map(|p| match p.stderr {
            Some(s) if s > 0.0 => 1.0 / s,
            _ => 1.0,
        })
        .collect();
    let problem = Problem {
        xs,
        ys: data.values(),
        weights,
        raw,
        conv: ConvolutionOptions { renormalize: opts.renormalize, abs_tol: opts.quad_abs_tol },
    };

    let mut theta = encode(&guess);
    let mut r = problem.residuals(&theta)?;
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let h = opts.fd_step;

    'outer: while iterations < opts.max_iterations {
        iterations += 1;
        let n = r.len();
        let mut jac = vec![[0.0; 3]; n];
        for k in 0..3 {
            let mut up = theta;
            let mut down = theta;
            up[k] += h;
            down[k] -= h;
            let (ru, rd) = (problem.residuals(&up)?, problem.residuals(&down)?);
            for i in 0..n {
                jac[i][k] = (ru[i] - rd[i]) / (2.0 * h);
            }
        }
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (row, ri) in jac.iter().zip(&r) {
            let v = Vector3::from(*row);
            jtj += v * v.transpose();
            jtr += v * *ri;
        }
        let floor = 1e-12 * jtj.diagonal().max().max(f64::MIN_POSITIVE);
        loop {
            let mut a = jtj;
            for k in 0..3 {
                a[(k, k)] += lambda * jtj[(k, k)].max(floor);
            }
            let Some(step) = a.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                if lambda > 1e16 {
                    break 'outer;
                }
                continue;
            };
            let trial = theta + step;
            let (old, new) = (physical(&decode(&theta)), physical(&decode(&trial)));
            let rel = old.iter().zip(&new).map(|(a, b)| ((b - a) / a).abs()).fold(0.0, f64::max);
            let r_trial = problem.residuals(&trial)?;
            let c_trial = cost(&r_trial);
            if c_trial < c {
                theta = trial;
                r = r_trial;
                c = c_trial;
                lambda = (lambda / 10.0).max(1e-12);
                if rel < opts.rel_step_tol {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            if rel < opts.rel_step_tol {
                // No nearby point improves the fit.
                converged = true;
                break 'outer;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                break 'outer;
            }
        }
    }

    let params = decode(&theta);
    let model = problem.model(&params)?;
    let n = model.len() as f64;
    let residual_rms = (model.iter().zip(&problem.ys).map(|(m, y)| (m - y).powi(2)).sum::<f64>() / n).sqrt();
    log::debug!("fit: {iterations} iterations, converged {converged}, cost {c:e}");
    Ok(FitResult { params, residual_rms, chi_square: c, n_iterations: iterations, converged })
}

/// Raw-spectrum cache suitable for fitting `data` from `guess`.
pub fn fit_cache<D: Drive + Sync>(data: &ScanResult, pulse: &D, guess: &ThermalModel, opts: &FitOptions) -> Result<SpectrumCache> {
    check_data(data)?;
    guess.validate()?;
    let xs = data.points.iter().map(|p| to_rad_s(data.unit, p.abscissa)).collect::<Result<Vec<_>>>()?;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Leave room for the light-shift range to grow during the fit.
    let margin = (3.0 * guess.delta_ls_max.abs()).max(30.0 * guess.delta_th);
    let step = opts.cache_step.unwrap_or(guess.delta_th / 20.0);
    SpectrumCache::build(pulse, opts.damping, &opts.integrator, lo - margin, hi, step)
}

/// Fit the broadened spectrum of `pulse` to `data`.
pub fn fit_spectrum<D: Drive + Sync>(data: &ScanResult, pulse: &D, guess: ThermalModel, opts: &FitOptions) -> Result<FitResult> {
    let cache = fit_cache(data, pulse, &guess, opts)?;
    fit_raw(data, &|d| cache.eval(d), guess, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Smooth box from −40 to +40 kHz, 3 kHz edges.
    fn raw(d: f64) -> f64 {
        let w = khz_to_rad_s(3.0);
        let e = khz_to_rad_s(40.0);
        1.0 / (1.0 + ((d.abs() - e) / w).exp())
    }

    fn truth() -> ThermalModel {
        ThermalModel::from_khz(-11.0, 1.7, 0.95).unwrap()
    }

    fn synthetic(m: &ThermalModel) -> ScanResult {
        let xs: Vec<f64> = (-65..=65).map(f64::from).collect();
        let opts = ConvolutionOptions::default().with_abs_tol(1e-11);
        let ys: Vec<f64> = xs.iter().map(|&x| convolve_at(&raw, m, khz_to_rad_s(x), &opts).unwrap()).collect();
        ScanResult::from_values(Unit::KHz, &xs, &ys)
    }

    #[test]
    fn chi_square_cases() {
        let data = ScanResult::from_values(Unit::KHz, &[1.0, 2.0, 3.0, 4.0], &[0.25, 0.5, 0.75, 1.0]);
        assert_eq!(chi_square(&data, |x| 0.25 * x), 0.0);
        assert!((chi_square(&data, |x| 0.25 * x + 0.1) - 0.04).abs() < 1e-15);
        let mut w = data.clone();
        w.points[0].stderr = Some(0.5);
        assert!((chi_square(&w, |x| 0.25 * x + 0.1) - 0.07).abs() < 1e-15);
    }

    #[test]
    fn exact_data_recovers_truth() {
        let m = truth();
        let data = synthetic(&m);
        let guess = ThermalModel::from_khz(-14.3, 1.19, 0.8).unwrap();
        let fit = fit_raw(&data, &raw, guess, &FitOptions::default()).unwrap();
        assert!(fit.converged, "{fit:?}");
        assert!(fit.residual_rms < 1e-4, "{fit:?}");
        assert!((fit.params.p_max - 0.95).abs() < 1e-3);
        assert!((fit.params.delta_th / m.delta_th - 1.0).abs() < 1e-2);
        assert!((fit.params.delta_ls_max - m.delta_ls_max).abs() < khz_to_rad_s(0.05));
    }

    #[test]
    fn kilohertz_and_radian_abscissas_agree() {
        let data = synthetic(&truth());
        let rad = data.map_abscissa(Unit::RadPerS, khz_to_rad_s);
        let guess = ThermalModel::from_khz(-9.0, 2.0, 0.9).unwrap();
        let a = fit_raw(&data, &raw, guess, &FitOptions::default()).unwrap();
        let b = fit_raw(&rad, &raw, guess, &FitOptions::default()).unwrap();
        for (x, y) in physical(&a.params).iter().zip(physical(&b.params)) {
            assert!((x - y).abs() <= 1e-9 * x.abs());
        }
    }

    #[test]
    fn rejects_bad_input() {
        let flat = ScanResult::from_values(Unit::KHz, &[0.0; 12], &[0.5; 12]);
        assert!(matches!(fit_raw(&flat, &raw, truth(), &FitOptions::default()), Err(Error::DegenerateData(_))));
        let short = ScanResult::from_values(Unit::KHz, &[0.0, 1.0], &[0.5, 0.6]);
        assert!(fit_raw(&short, &raw, truth(), &FitOptions::default()).is_err());
        let mut um = synthetic(&truth());
        um.unit = Unit::Micrometre;
        assert!(fit_raw(&um, &raw, truth(), &FitOptions::default()).is_err());
        let zero = ThermalModel { delta_ls_max: 0.0, ..truth() };
        assert!(fit_raw(&synthetic(&truth()), &raw, zero, &FitOptions::default()).is_err());
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        let data = synthetic(&truth());
        let guess = ThermalModel::from_khz(-14.3, 1.19, 0.8).unwrap();
        let opts = FitOptions { max_iterations: 1, ..Default::default() };
        let start = chi_square(&data, |x| {
            convolve_at(&raw, &guess, khz_to_rad_s(x), &ConvolutionOptions::default()).unwrap()
        });
        let fit = fit_raw(&data, &raw, guess, &opts).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.n_iterations, 1);
        assert!(fit.chi_square <= start);
    }
}
