//! Retardation estimators and parameter sweeps.
//!
//! Two independent readings of how far the scattered excitation pattern lags
//! the free one:
//!
//! * `correlation_lag`: the shift maximising the correlation of the two
//!   sampled densities over an analysis window;
//! * `phase_delay`: the spectrum average of `d(arg T)/dk`, which is the
//!   displacement of the transmitted envelope for a narrow band.
//!
//! Positive values mean the scattered pattern sits behind the free one along
//! the direction of motion.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cache::SolveCache;
use crate::error::{Error, Result};
use crate::scattering::{solve_coefficients, DeltaScatterer, ScattererSet};
use crate::scenario::Scenario;
use crate::wavefield::{
    build_spectrum, density_grid, fwhm_central_excitation, DensityField, ScatteredField,
    SpectrumSpec,
};

/// Prominence at or above which a retardation is reported as detected.
pub const DETECTION_PROMINENCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisWindow {
    pub x_lo: f64,
    pub x_hi: f64,
    pub max_lag: f64,
}

impl AnalysisWindow {
    pub fn validate(&self) -> Result<()> {
        for (what, value) in [
            ("x_lo", self.x_lo),
            ("x_hi", self.x_hi),
            ("max_lag", self.max_lag),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { what, value });
            }
        }
        if self.x_lo >= self.x_hi {
            return Err(Error::WindowOutsideGrid(format!(
                "x_lo = {} must be below x_hi = {}",
                self.x_lo, self.x_hi
            )));
        }
        if self.max_lag <= 0.0 {
            return Err(Error::WindowOutsideGrid("max_lag must be > 0".into()));
        }
        if self.max_lag >= 0.25 * (self.x_hi - self.x_lo) {
            return Err(Error::WindowOutsideGrid(format!(
                "max_lag = {} must be below a quarter of the window length {}",
                self.max_lag,
                self.x_hi - self.x_lo
            )));
        }
        Ok(())
    }

    /// Rejects lags reaching half the excitation period `2π/dk`, where the
    /// correlation of a periodic pattern becomes ambiguous.
    pub fn check_period(&self, dk: f64) -> Result<()> {
        let half_period = PI / dk;
        if self.max_lag >= half_period {
            return Err(Error::WindowOutsideGrid(format!(
                "max_lag = {} must be below half the excitation period {half_period}",
                self.max_lag
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagEstimate {
    pub lag: f64,
    pub prominence: f64,
}

/// Correlation lag between a free and a scattered density.
///
/// For each shift `s = j·step` with `|s| ≤ max_lag` the score is
///
/// ```text
/// C(s) = Σ_{x_i ∈ window} ρ_nf(x_i) ρ_free(x_i + s) / sqrt(Σ ρ_free(x_i + s)²)
/// ```
///
/// so `ρ_nf(x) = ρ_free(x + d)` peaks at `s = d`. The discrete argmax is
/// refined with a parabola through its neighbours. Prominence is
/// `1 − C_second / C_max`, where `C_second` is the largest score outside the
/// monotone lobe around the argmax (the lobe edge itself counts when the lobe
/// runs to the end of the lag range).
pub fn correlation_lag(
    rho_free: &DensityField,
    rho_nf: &DensityField,
    window: &AnalysisWindow,
) -> Result<LagEstimate> {
    if rho_free.grid != rho_nf.grid {
        return Err(Error::InvalidGrid(
            "free and scattered densities use different grids".into(),
        ));
    }
    window.validate()?;
    let grid = rho_free.grid;
    let step = grid.step();
    let tol = 1e-9 * step;
    if window.x_lo - window.max_lag < grid.x_min - tol
        || window.x_hi + window.max_lag > grid.x_max + tol
    {
        return Err(Error::WindowOutsideGrid(format!(
            "[{} − {lag}, {} + {lag}] exceeds grid [{}, {}]",
            window.x_lo,
            window.x_hi,
            grid.x_min,
            grid.x_max,
            lag = window.max_lag
        )));
    }
    let limit = window.max_lag / 20.0;
    if step > limit {
        return Err(Error::GridTooCoarse { step, limit });
    }

    let first = ((window.x_lo - grid.x_min) / step - 1e-9).ceil().max(0.0) as usize;
    let last = (((window.x_hi - grid.x_min) / step + 1e-9).floor() as usize).min(grid.n_points - 1);
    let max_shift = (window.max_lag / step + 1e-9).floor() as isize;
    let n = grid.n_points as isize;

    let scores: Vec<f64> = (-max_shift..=max_shift)
        .map(|j| {
            let mut cross = 0.0;
            let mut energy = 0.0;
            for i in first..=last {
                let shifted = (i as isize + j).clamp(0, n - 1) as usize;
                let f = rho_free.values[shifted];
                cross += rho_nf.values[i] * f;
                energy += f * f;
            }
            if energy > 0.0 {
                cross / energy.sqrt()
            } else {
                0.0
            }
        })
        .collect();

    let (best, c_max) =
        scores
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, c)| if c > acc.1 { (i, c) } else { acc },
            );

    let mut offset = 0.0;
    if best > 0 && best + 1 < scores.len() {
        let (a, b, c) = (scores[best - 1], scores[best], scores[best + 1]);
        let curvature = a - 2.0 * b + c;
        if curvature < 0.0 {
            offset = (0.5 * (a - c) / curvature).clamp(-0.5, 0.5);
        }
    }
    let lag = ((best as isize - max_shift) as f64 + offset) * step;
    let lag = lag.clamp(-window.max_lag, window.max_lag);

    let prominence = if c_max > 0.0 {
        (1.0 - secondary_score(&scores, best) / c_max).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(LagEstimate { lag, prominence })
}

fn secondary_score(scores: &[f64], peak: usize) -> f64 {
    let mut lo = peak;
    while lo > 0 && scores[lo - 1] <= scores[lo] {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < scores.len() && scores[hi + 1] <= scores[hi] {
        hi += 1;
    }
    scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| i <= lo || i >= hi)
        .filter(|&(i, _)| i != peak)
        .map(|(_, &c)| c)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0)
}

/// Wrapped phase of `T(k_hi)/T(k_lo)`, with the nearest-branch check.
fn phase_step(set: &ScattererSet, k_lo: f64, k_hi: f64) -> Result<f64> {
    let t_lo = solve_coefficients(set, k_lo)?.transmission;
    let t_hi = solve_coefficients(set, k_hi)?.transmission;
    let jump = (t_hi * t_lo.conj()).arg();
    if jump.abs() > 0.5 * PI {
        return Err(Error::PhaseUnwrapAmbiguous { k_lo, k_hi, jump });
    }
    Ok(jump)
}

/// Mean over the spectrum of `d(arg T)/dk`, by central differences with step
/// `dk/10`.
pub fn phase_delay(set: &ScattererSet, spec: &SpectrumSpec) -> Result<f64> {
    let components = build_spectrum(spec)?;
    let rightward = components[0].k > 0.0;
    if components.iter().any(|c| (c.k > 0.0) != rightward) {
        return Err(Error::InvalidSpectrum(
            "phase delay needs all wavenumbers of one sign".into(),
        ));
    }
    let h = spec.dk / 10.0;
    let mut total = 0.0;
    for c in &components {
        total += phase_step(set, c.k - h, c.k + h)? / (2.0 * h);
    }
    Ok(total / components.len() as f64)
}

/// Summary of one retardation measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetardationReport {
    pub corr_lag: f64,
    pub phase_delay: f64,
    /// `None` when the free density has no resolvable excitation.
    pub fwhm: Option<f64>,
    pub scatterer_span: f64,
    pub mean_spacing: f64,
    pub peak_prominence: f64,
    pub detected: bool,
    pub window: AnalysisWindow,
}

/// Everything computed for one scenario.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub field: ScatteredField,
    pub free: DensityField,
    pub nonfree: DensityField,
    pub report: RetardationReport,
}

/// `+1` for rightward spectra, `−1` for leftward ones.
fn direction(spec: &SpectrumSpec) -> f64 {
    if spec.k0 > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Window used when a scenario does not give one: the transmitted zone
/// starting two excitation widths past the last centre, trimmed so that every
/// shifted sample stays on the grid, with the lag bound at a quarter of the
/// excitation period.
pub fn default_window(scenario: &Scenario, fwhm: Option<f64>) -> Result<AnalysisWindow> {
    let grid = scenario.grid;
    let margin = fwhm.map_or(grid.step(), |w| 2.0 * w);
    let rightward = direction(&scenario.spectrum) > 0.0;
    let (edge, room) = if rightward {
        let start = scenario.set.max_position().unwrap_or(0.0) + margin;
        (start, grid.x_max - start)
    } else {
        let end = scenario.set.min_position().unwrap_or(0.0) - margin;
        (end, end - grid.x_min)
    };
    if room <= 0.0 {
        return Err(Error::WindowOutsideGrid(
            "grid does not extend past the transmitted-zone margin".into(),
        ));
    }
    let max_lag = (0.5 * PI / scenario.spectrum.dk).min(0.18 * room);
    let window = if rightward {
        AnalysisWindow {
            x_lo: edge,
            x_hi: grid.x_max - max_lag,
            max_lag,
        }
    } else {
        AnalysisWindow {
            x_lo: grid.x_min + max_lag,
            x_hi: edge,
            max_lag,
        }
    };
    Ok(window)
}

pub fn analyze(scenario: &Scenario, cache: Option<&SolveCache>) -> Result<Analysis> {
    scenario.validate()?;
    let components = build_spectrum(&scenario.spectrum)?;
    let field = ScatteredField::prepare(&scenario.set, &components, cache)?;
    let grid = scenario.grid;
    let free = density_grid(|t, x| field.eval_free(t, x), &grid, scenario.t);
    let nonfree = density_grid(|t, x| field.eval(t, x), &grid, scenario.t);

    let free_at_zero = if scenario.t == 0.0 {
        free.clone()
    } else {
        density_grid(|t, x| field.eval_free(t, x), &grid, 0.0)
    };
    let fwhm = fwhm_central_excitation(&free_at_zero).ok();

    let window = match scenario.window {
        Some(w) => w,
        None => default_window(scenario, fwhm)?,
    };
    if scenario.spectrum.n_waves > 1 {
        window.check_period(scenario.spectrum.dk)?;
    }
    let sign = direction(&scenario.spectrum);
    let estimate = correlation_lag(&free, &nonfree, &window)?;
    let delay = phase_delay(&scenario.set, &scenario.spectrum)?;

    let report = RetardationReport {
        corr_lag: sign * estimate.lag,
        phase_delay: sign * delay,
        fwhm,
        scatterer_span: scenario.set.span(),
        mean_spacing: scenario.set.mean_spacing(),
        peak_prominence: estimate.prominence,
        detected: estimate.prominence >= DETECTION_PROMINENCE,
        window,
    };
    Ok(Analysis {
        field,
        free,
        nonfree,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    CouplingScale,
    NWaves,
    Dk,
    ScattererSpacing,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::CouplingScale => "coupling_scale",
            SweepAxis::NWaves => "n_waves",
            SweepAxis::Dk => "dk",
            SweepAxis::ScattererSpacing => "scatterer_spacing",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coupling_scale" => Ok(SweepAxis::CouplingScale),
            "n_waves" => Ok(SweepAxis::NWaves),
            "dk" => Ok(SweepAxis::Dk),
            "scatterer_spacing" => Ok(SweepAxis::ScattererSpacing),
            other => Err(Error::InvalidSweep(format!("unknown axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub report: Option<RetardationReport>,
    pub error: Option<String>,
}

/// `base` with one parameter replaced.
pub fn scenario_at(base: &Scenario, axis: SweepAxis, value: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match axis {
        SweepAxis::CouplingScale => s.set = base.set.with_coupling_scale(value)?,
        SweepAxis::NWaves => {
            if !(value >= 1.0 && value.fract() == 0.0) {
                return Err(Error::InvalidSweep(format!(
                    "n_waves must be a positive integer, got {value}"
                )));
            }
            s.spectrum.n_waves = value as usize;
            s.spectrum.amplitudes = None;
            s.spectrum.phases = None;
        }
        SweepAxis::Dk => s.spectrum.dk = value,
        SweepAxis::ScattererSpacing => {
            // rescale positions about the first centre
            let current = base.set.mean_spacing();
            if base.set.len() < 2 || current <= 0.0 {
                return Err(Error::InvalidSweep(
                    "scatterer_spacing needs at least two centres".into(),
                ));
            }
            if value.is_nan() || value <= 0.0 {
                return Err(Error::InvalidSweep(format!(
                    "spacing must be > 0, got {value}"
                )));
            }
            let origin = base.set.min_position().unwrap_or(0.0);
            let ratio = value / current;
            let scatterers = base
                .set
                .scatterers()
                .iter()
                .map(|d| DeltaScatterer::new(origin + (d.position - origin) * ratio, d.strength))
                .collect();
            s.set = ScattererSet::new(scatterers, base.set.coupling_scale())?;
        }
    }
    s.validate()?;
    Ok(s)
}

/// One report per axis value, in input order. Points that fail carry the
/// reason instead of a report.
pub fn sweep_retardation(
    base: &Scenario,
    axis: SweepAxis,
    values: &[f64],
    cache: Option<&SolveCache>,
) -> Result<Vec<SweepPoint>> {
    if values.len() < 3 {
        return Err(Error::InvalidSweep(format!(
            "a sweep needs at least 3 values, got {}",
            values.len()
        )));
    }
    use rayon::prelude::*;
    Ok(values
        .par_iter()
        .map(
            |&value| match scenario_at(base, axis, value).and_then(|s| analyze(&s, cache)) {
                Ok(a) => SweepPoint {
                    value,
                    report: Some(a.report),
                    error: None,
                },
                Err(e) => SweepPoint {
                    value,
                    report: None,
                    error: Some(format!("{}: {e}", e.code())),
                },
            },
        )
        .collect())
}
