//! Free and scattered superposition fields.
//!
//! A spectrum is a finite set of modes `A_m e^{iφ_m} e^{−iω_m t}` with
//! ω_m = k_m². The free field multiplies each mode by `e^{ik_m x}`; the
//! scattered field by the eigensolution `w_{k_m}(x)` of the same set of
//! wavenumbers. Time evolution is therefore exact and analytic.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::SolveCache;
use crate::error::{Error, Result};
use crate::scattering::{
    eval_eigenfunction, solve_coefficients, ScattererSet, ScatteringSolution, K_MIN,
};

/// Equispaced discrete spectrum `k_m = k0 + m·dk`, m = 0..n_waves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub k0: f64,
    pub dk: f64,
    pub n_waves: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
}

impl SpectrumSpec {
    pub fn uniform(k0: f64, dk: f64, n_waves: usize) -> Self {
        Self {
            k0,
            dk,
            n_waves,
            amplitudes: None,
            phases: None,
        }
    }

    pub fn wavenumber(&self, m: usize) -> f64 {
        self.k0 + m as f64 * self.dk
    }

    pub fn validate(&self) -> Result<()> {
        if !self.k0.is_finite() {
            return Err(Error::NonFinite {
                what: "k0",
                value: self.k0,
            });
        }
        if !(self.dk.is_finite() && self.dk > 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "dk must be > 0, got {}",
                self.dk
            )));
        }
        if self.n_waves == 0 {
            return Err(Error::InvalidSpectrum("n_waves must be >= 1".into()));
        }
        for (name, seq) in [("amplitudes", &self.amplitudes), ("phases", &self.phases)] {
            if let Some(values) = seq {
                if values.len() != self.n_waves {
                    return Err(Error::InvalidSpectrum(format!(
                        "{name} has {} entries, n_waves is {}",
                        values.len(),
                        self.n_waves
                    )));
                }
                if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                    return Err(Error::InvalidSpectrum(format!("{name} contains {bad}")));
                }
            }
        }
        for m in 0..self.n_waves {
            let k = self.wavenumber(m);
            if k.abs() < K_MIN {
                return Err(Error::WavenumberTooSmall { k, k_min: K_MIN });
            }
        }
        Ok(())
    }
}

/// One mode of the superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralComponent {
    pub k: f64,
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl SpectralComponent {
    pub fn new(k: f64, amplitude: f64, phase: f64) -> Self {
        Self {
            k,
            omega: k * k,
            amplitude,
            phase,
        }
    }

    /// `A e^{iφ} e^{−iωt}`
    fn temporal_factor(&self, t: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase - self.omega * t)
    }
}

pub fn build_spectrum(spec: &SpectrumSpec) -> Result<Vec<SpectralComponent>> {
    spec.validate()?;
    Ok((0..spec.n_waves)
        .map(|m| {
            let amplitude = spec.amplitudes.as_ref().map_or(1.0, |a| a[m]);
            let phase = spec.phases.as_ref().map_or(0.0, |p| p[m]);
            SpectralComponent::new(spec.wavenumber(m), amplitude, phase)
        })
        .collect())
}

pub fn eval_free(spectrum: &[SpectralComponent], t: f64, x: f64) -> Complex64 {
    spectrum
        .iter()
        .map(|c| c.temporal_factor(t) * Complex64::from_polar(1.0, c.k * x))
        .sum()
}

fn check_alignment(
    spectrum: &[SpectralComponent],
    solutions: &[impl AsRef<ScatteringSolution>],
) -> Result<()> {
    if spectrum.len() != solutions.len() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.len(),
            got: solutions.len(),
        });
    }
    for (c, s) in spectrum.iter().zip(solutions) {
        let s = s.as_ref();
        if (c.k - s.k).abs() > 1e-12 {
            return Err(Error::SpectrumSolutionMismatch {
                spectrum_k: c.k,
                solution_k: s.k,
            });
        }
    }
    Ok(())
}

fn sum_scattered(
    spectrum: &[SpectralComponent],
    solutions: &[impl AsRef<ScatteringSolution>],
    set: &ScattererSet,
    t: f64,
    x: f64,
) -> Complex64 {
    spectrum
        .iter()
        .zip(solutions)
        .map(|(c, s)| c.temporal_factor(t) * eval_eigenfunction(set, s.as_ref(), x))
        .sum()
}

pub fn eval_scattered(
    spectrum: &[SpectralComponent],
    solutions: &[ScatteringSolution],
    set: &ScattererSet,
    t: f64,
    x: f64,
) -> Result<Complex64> {
    check_alignment(spectrum, solutions)?;
    Ok(sum_scattered(spectrum, solutions, set, t, x))
}

/// A spectrum bound to its scatterer set with every mode already solved.
#[derive(Debug, Clone)]
pub struct ScatteredField {
    set: ScattererSet,
    spectrum: Vec<SpectralComponent>,
    solutions: Vec<Arc<ScatteringSolution>>,
}

impl ScatteredField {
    /// Solves each mode once, through `cache` when one is given.
    pub fn prepare(
        set: &ScattererSet,
        spectrum: &[SpectralComponent],
        cache: Option<&SolveCache>,
    ) -> Result<Self> {
        let solutions = spectrum
            .iter()
            .map(|c| match cache {
                Some(cache) => cache.solve(set, c.k),
                None => solve_coefficients(set, c.k).map(Arc::new),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            set: set.clone(),
            spectrum: spectrum.to_vec(),
            solutions,
        })
    }

    pub fn set(&self) -> &ScattererSet {
        &self.set
    }

    pub fn spectrum(&self) -> &[SpectralComponent] {
        &self.spectrum
    }

    pub fn solutions(&self) -> &[Arc<ScatteringSolution>] {
        &self.solutions
    }

    pub fn eval(&self, t: f64, x: f64) -> Complex64 {
        sum_scattered(&self.spectrum, &self.solutions, &self.set, t, x)
    }

    pub fn eval_free(&self, t: f64, x: f64) -> Complex64 {
        eval_free(&self.spectrum, t, x)
    }
}

/// Uniform sampling grid with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        let grid = Self {
            x_min,
            x_max,
            n_points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if self.x_min >= self.x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min = {} must be below x_max = {}",
                self.x_min, self.x_max
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidGrid("n_points must be >= 2".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }
}

/// Sampled `|ψ(t, x)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: Grid,
    pub t: f64,
    pub values: Vec<f64>,
}

impl DensityField {
    /// Linear interpolation; `None` outside the grid.
    pub fn sample(&self, x: f64) -> Option<f64> {
        let step = self.grid.step();
        let pos = (x - self.grid.x_min) / step;
        let last = (self.grid.n_points - 1) as f64;
        if !(-1e-9..=last + 1e-9).contains(&pos) {
            return None;
        }
        let pos = pos.clamp(0.0, last);
        let i = (pos.floor() as usize).min(self.grid.n_points - 2);
        let frac = pos - i as f64;
        Some(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

pub fn density_grid<F>(evaluator: F, grid: &Grid, t: f64) -> DensityField
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let values = (0..grid.n_points)
        .into_par_iter()
        .map(|i| evaluator(t, grid.x(i)).norm_sqr())
        .collect();
    DensityField {
        grid: *grid,
        t,
        values,
    }
}

/// Full width at half maximum of the excitation at the global maximum
/// (ties broken towards x = 0), with linear interpolation at the two
/// half-height crossings.
pub fn fwhm_central_excitation(field: &DensityField) -> Result<f64> {
    let values = &field.values;
    let grid = &field.grid;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max.is_nan() || max <= 0.0 || max - min <= 1e-12 * max {
        return Err(Error::PeakNotResolved(
            "density has no excitation structure".into(),
        ));
    }
    let peak = (0..values.len())
        .filter(|&i| values[i] >= max * (1.0 - 1e-9))
        .min_by(|&a, &b| grid.x(a).abs().total_cmp(&grid.x(b).abs()))
        .expect("non-empty grid");
    let half = 0.5 * max;

    let mut left = peak;
    while left > 0 && values[left - 1] > half {
        left -= 1;
    }
    let mut right = peak;
    while right + 1 < values.len() && values[right + 1] > half {
        right += 1;
    }
    if left == 0 || right + 1 == values.len() {
        return Err(Error::PeakNotResolved(
            "half-maximum crossing lies outside the grid".into(),
        ));
    }
    let above = right - left + 1;
    if above < 5 {
        return Err(Error::PeakNotResolved(format!(
            "only {above} samples above half maximum"
        )));
    }
    let crossing = |inside: usize, outside: usize| {
        let (vi, vo) = (values[inside], values[outside]);
        let frac = (vi - half) / (vi - vo);
        grid.x(inside) + frac * (grid.x(outside) - grid.x(inside))
    };
    Ok(crossing(right, right + 1) - crossing(left, left - 1))
}
