//! Virtual laboratory for 1D scattering off finite sums of delta potentials.
//!
//! The stationary eigensolutions of `−ψ'' + Σ α_a δ(x − x_a) ψ = k² ψ` are
//! solved per wavenumber ([`scattering`]), superposed into free and scattered
//! wave fields ([`wavefield`]), and compared to measure how far the scattered
//! excitation pattern lags the free one ([`retardation`]). A classical
//! particle crossing a triangular barrier ([`classical`]) serves as the
//! reference analogy.

pub mod api;
pub mod cache;
pub mod classical;
pub mod error;
pub mod export;
pub mod linalg;
pub mod retardation;
pub mod scattering;
pub mod scenario;
pub mod wavefield;

pub use cache::SolveCache;
pub use error::{Error, Result};
pub use retardation::{analyze, Analysis, AnalysisWindow, RetardationReport, SweepAxis};
pub use scattering::{DeltaScatterer, ScattererSet, ScatteringSolution};
pub use scenario::{load_scenario, save_scenario, Scenario};
pub use wavefield::{DensityField, Grid, SpectralComponent, SpectrumSpec};
