//! Stationary scattering off a finite sum of delta potentials.
//!
//! Units are ħ = 1, 2m = 1, so the dispersion is ω = k². The eigensolution for
//! wavenumber k is an incident plane wave plus one outgoing wave per centre,
//!
//! ```text
//! w_k(x) = e^{ikx} + Σ_a c_a e^{i|k||x − x_a|}
//! ```
//!
//! and the coefficients follow from the derivative jump
//! `ψ'(x_b⁺) − ψ'(x_b⁻) = α_b ψ(x_b)` at every centre, which gives the dense
//! system
//!
//! ```text
//! M_ba = 2i|k| δ_ba − α_b e^{i|k||x_b − x_a|},   rhs_b = α_b e^{ikx_b}
//! ```
//!
//! with α the effective (coupling-scaled) strength.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lu_solve, norm_inf, ComplexMatrix, ComplexVector};

/// Smallest accepted |k|; the system degenerates as 2i|k| → 0.
pub const K_MIN: f64 = 1e-6;

/// Minimum distance between two scattering centres.
pub const MIN_SEPARATION: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point interaction `strength · δ(x − position)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaScatterer {
    pub position: f64,
    pub strength: f64,
}

impl DeltaScatterer {
    pub fn new(position: f64, strength: f64) -> Self {
        Self { position, strength }
    }
}

/// Sorted set of delta centres with a global coupling multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererSet {
    scatterers: Vec<DeltaScatterer>,
    coupling_scale: f64,
}

impl ScattererSet {
    /// Sorts by position and validates the set. An empty set is allowed here;
    /// solving against it is not.
    pub fn new(mut scatterers: Vec<DeltaScatterer>, coupling_scale: f64) -> Result<Self> {
        for s in &scatterers {
            if !s.position.is_finite() {
                return Err(Error::NonFinite {
                    what: "scatterer position",
                    value: s.position,
                });
            }
            if !s.strength.is_finite() {
                return Err(Error::NonFinite {
                    what: "scatterer strength",
                    value: s.strength,
                });
            }
        }
        if !coupling_scale.is_finite() {
            return Err(Error::NonFinite {
                what: "coupling_scale",
                value: coupling_scale,
            });
        }
        if coupling_scale < 0.0 {
            return Err(Error::Invariant {
                invariant: "coupling_scale >= 0",
                message: format!("coupling_scale = {coupling_scale}"),
            });
        }
        scatterers.sort_by(|a, b| a.position.total_cmp(&b.position));
        for pair in scatterers.windows(2) {
            if pair[1].position - pair[0].position < MIN_SEPARATION {
                return Err(Error::CoincidentScatterers {
                    a: pair[0].position,
                    b: pair[1].position,
                    min_separation: MIN_SEPARATION,
                });
            }
        }
        Ok(Self {
            scatterers,
            coupling_scale,
        })
    }

    pub fn single(position: f64, strength: f64) -> Self {
        Self::new(vec![DeltaScatterer::new(position, strength)], 1.0)
            .expect("finite single scatterer")
    }

    pub fn scatterers(&self) -> &[DeltaScatterer] {
        &self.scatterers
    }

    pub fn len(&self) -> usize {
        self.scatterers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scatterers.is_empty()
    }

    pub fn coupling_scale(&self) -> f64 {
        self.coupling_scale
    }

    pub fn with_coupling_scale(&self, coupling_scale: f64) -> Result<Self> {
        Self::new(self.scatterers.clone(), coupling_scale)
    }

    /// Strength actually seen by the field: `coupling_scale · strength`.
    pub fn effective_strength(&self, index: usize) -> f64 {
        self.coupling_scale * self.scatterers[index].strength
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.scatterers.iter().map(|s| s.position)
    }

    pub fn min_position(&self) -> Option<f64> {
        self.scatterers.first().map(|s| s.position)
    }

    pub fn max_position(&self) -> Option<f64> {
        self.scatterers.last().map(|s| s.position)
    }

    /// `max x_a − min x_a`, zero for fewer than two centres.
    pub fn span(&self) -> f64 {
        match (self.min_position(), self.max_position()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// Mean gap between adjacent centres, zero for fewer than two.
    pub fn mean_spacing(&self) -> f64 {
        if self.len() < 2 {
            0.0
        } else {
            self.span() / (self.len() - 1) as f64
        }
    }

    /// The same set reflected through the origin, `x_a → −x_a`.
    pub fn mirrored(&self) -> Self {
        let scatterers = self
            .scatterers
            .iter()
            .map(|s| DeltaScatterer::new(-s.position, s.strength))
            .collect();
        Self::new(scatterers, self.coupling_scale).expect("mirror of a valid set is valid")
    }

    /// Exact bit pattern of the set, used as a cache key.
    pub fn fingerprint(&self) -> Vec<u64> {
        let mut bits = Vec::with_capacity(2 * self.len() + 1);
        bits.push(self.coupling_scale.to_bits());
        for s in &self.scatterers {
            bits.push(s.position.to_bits());
            bits.push(s.strength.to_bits());
        }
        bits
    }
}

/// Coefficients and far-field amplitudes for one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub k: f64,
    pub coefs: ComplexVector,
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub residual: f64,
}

impl ScatteringSolution {
    pub fn abs_r2(&self) -> f64 {
        self.reflection.norm_sqr()
    }

    pub fn abs_t2(&self) -> f64 {
        self.transmission.norm_sqr()
    }
}

impl AsRef<ScatteringSolution> for ScatteringSolution {
    fn as_ref(&self) -> &ScatteringSolution {
        self
    }
}

fn check_k(k: f64) -> Result<()> {
    if !k.is_finite() {
        return Err(Error::NonFinite {
            what: "wavenumber",
            value: k,
        });
    }
    if k.abs() < K_MIN {
        return Err(Error::WavenumberTooSmall { k, k_min: K_MIN });
    }
    Ok(())
}

pub fn assemble_system(set: &ScattererSet, k: f64) -> Result<(ComplexMatrix, ComplexVector)> {
    check_k(k)?;
    if set.is_empty() {
        return Err(Error::EmptyScattererSet);
    }
    let kappa = k.abs();
    let n = set.len();
    let mut m = ComplexMatrix::zeros(n);
    let mut rhs = Vec::with_capacity(n);
    for (b, sb) in set.scatterers().iter().enumerate() {
        let alpha = set.effective_strength(b);
        for (a, sa) in set.scatterers().iter().enumerate() {
            let kernel = Complex64::from_polar(1.0, kappa * (sb.position - sa.position).abs());
            m[(b, a)] = -alpha * kernel;
        }
        m[(b, b)] += 2.0 * I * kappa;
        rhs.push(alpha * Complex64::from_polar(1.0, k * sb.position));
    }
    Ok((m, rhs))
}

/// Far-field amplitudes from solved coefficients.
///
/// For either sign of k the reflected amplitude is `Σ c_a e^{ikx_a}` and the
/// transmitted one `1 + Σ c_a e^{−ikx_a}`; for k < 0 the incident side is
/// simply x > max x_a.
pub fn extract_rt(
    set: &ScattererSet,
    coefs: &[Complex64],
    k: f64,
) -> Result<(Complex64, Complex64)> {
    if coefs.len() != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            got: coefs.len(),
        });
    }
    let mut r = Complex64::new(0.0, 0.0);
    let mut t = Complex64::new(1.0, 0.0);
    for (c, s) in coefs.iter().zip(set.scatterers()) {
        r += c * Complex64::from_polar(1.0, k * s.position);
        t += c * Complex64::from_polar(1.0, -k * s.position);
    }
    Ok((r, t))
}

pub fn solve_coefficients(set: &ScattererSet, k: f64) -> Result<ScatteringSolution> {
    let (m, rhs) = assemble_system(set, k)?;
    let solved = lu_solve(&m, &rhs)?;
    let tolerance = 1e-10 * (1.0 + norm_inf(&rhs));
    if solved.residual > tolerance {
        return Err(Error::IllConditioned {
            residual: solved.residual,
            tolerance,
        });
    }
    let (reflection, transmission) = extract_rt(set, &solved.x, k)?;
    Ok(ScatteringSolution {
        k,
        coefs: solved.x,
        reflection,
        transmission,
        residual: solved.residual,
    })
}

/// Value of the eigensolution `w_k(x)`.
pub fn eval_eigenfunction(set: &ScattererSet, sol: &ScatteringSolution, x: f64) -> Complex64 {
    let kappa = sol.k.abs();
    sol.coefs
        .iter()
        .zip(set.scatterers())
        .fold(Complex64::from_polar(1.0, sol.k * x), |acc, (c, s)| {
            acc + c * Complex64::from_polar(1.0, kappa * (x - s.position).abs())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn set_is_sorted_and_validated() {
        let set = ScattererSet::new(
            vec![
                DeltaScatterer::new(2.0, 1.0),
                DeltaScatterer::new(-1.0, 3.0),
            ],
            1.0,
        )
        .unwrap();
        assert_eq!(set.positions().collect::<Vec<_>>(), vec![-1.0, 2.0]);
        assert_eq!(set.span(), 3.0);

        let dup = ScattererSet::new(
            vec![DeltaScatterer::new(1.0, 1.0), DeltaScatterer::new(1.0, 2.0)],
            1.0,
        );
        assert!(matches!(dup, Err(Error::CoincidentScatterers { .. })));
        assert!(ScattererSet::new(vec![DeltaScatterer::new(f64::NAN, 1.0)], 1.0).is_err());
        assert!(ScattererSet::new(vec![DeltaScatterer::new(0.0, 1.0)], -0.5).is_err());
    }

    #[test]
    fn assemble_single_delta() {
        let (m, rhs) = assemble_system(&ScattererSet::single(0.0, 2.0), 1.0).unwrap();
        assert_eq!(m.dim(), 1);
        assert!(close(m[(0, 0)], c(-2.0, 2.0), 1e-15));
        assert!(close(rhs[0], c(2.0, 0.0), 1e-15));
    }

    #[test]
    fn assemble_two_deltas() {
        let set = ScattererSet::new(
            vec![DeltaScatterer::new(0.0, 1.0), DeltaScatterer::new(1.0, 1.0)],
            1.0,
        )
        .unwrap();
        let (m, _) = assemble_system(&set, 2.0).unwrap();
        let e2i = Complex64::from_polar(1.0, 2.0);
        assert!(close(m[(0, 1)], -e2i, 1e-15));
        assert!(close(m[(1, 0)], -e2i, 1e-15));
        assert!(close(m[(0, 0)], c(-1.0, 4.0), 1e-15));
        assert!(close(m[(1, 1)], c(-1.0, 4.0), 1e-15));
    }

    #[test]
    fn zero_coupling_gives_zero_rhs() {
        let set = ScattererSet::new(
            vec![
                DeltaScatterer::new(0.0, 1.0),
                DeltaScatterer::new(1.5, -4.0),
            ],
            0.0,
        )
        .unwrap();
        let (m, rhs) = assemble_system(&set, 1.3).unwrap();
        assert!(rhs.iter().all(|z| z.norm() == 0.0));
        assert!(close(m[(0, 0)], c(0.0, 2.6), 0.0));
        let sol = solve_coefficients(&set, 1.3).unwrap();
        assert!(sol.coefs.iter().all(|z| z.norm() == 0.0));
        assert_eq!(sol.reflection, c(0.0, 0.0));
        assert_eq!(sol.transmission, c(1.0, 0.0));
    }

    #[test]
    fn small_k_and_empty_set_are_rejected() {
        let set = ScattererSet::single(0.0, 1.0);
        assert!(matches!(
            assemble_system(&set, 5e-7),
            Err(Error::WavenumberTooSmall { .. })
        ));
        assert!(matches!(
            assemble_system(&set, 0.0),
            Err(Error::WavenumberTooSmall { .. })
        ));
        let empty = ScattererSet::new(vec![], 1.0).unwrap();
        assert_eq!(
            assemble_system(&empty, 1.0).unwrap_err(),
            Error::EmptyScattererSet
        );
    }

    #[test]
    fn single_delta_barrier_and_well() {
        let sol = solve_coefficients(&ScattererSet::single(0.0, 2.0), 1.0).unwrap();
        assert!(close(sol.coefs[0], c(-0.5, -0.5), 1e-14));
        assert!(close(sol.reflection, c(-0.5, -0.5), 1e-14));
        assert!(close(sol.transmission, c(0.5, -0.5), 1e-14));

        let well = solve_coefficients(&ScattererSet::single(0.0, -2.0), 1.0).unwrap();
        assert!(close(well.coefs[0], c(-0.5, 0.5), 1e-14));
        assert!((well.abs_r2() + well.abs_t2() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_delta_high_k_transmission() {
        let sol = solve_coefficients(&ScattererSet::single(0.0, 2.0), 10.0).unwrap();
        assert!((sol.abs_t2() - 400.0 / 404.0).abs() < 1e-14);
    }

    #[test]
    fn eigenfunction_asymptotics() {
        let set = ScattererSet::single(0.0, 2.0);
        let sol = solve_coefficients(&set, 1.0).unwrap();
        let right = eval_eigenfunction(&set, &sol, 5.0);
        assert!(close(
            right,
            sol.transmission * Complex64::from_polar(1.0, 5.0),
            1e-14
        ));
        let left = eval_eigenfunction(&set, &sol, -3.0);
        let expected =
            Complex64::from_polar(1.0, -3.0) + sol.reflection * Complex64::from_polar(1.0, 3.0);
        assert!(close(left, expected, 1e-14));
        let jump = eval_eigenfunction(&set, &sol, 1e-9) - eval_eigenfunction(&set, &sol, -1e-9);
        assert!(jump.norm() < 1e-6);
    }

    #[test]
    fn free_eigenfunction_is_plane_wave() {
        let set = ScattererSet::single(0.7, 3.0)
            .with_coupling_scale(0.0)
            .unwrap();
        let sol = solve_coefficients(&set, 2.5).unwrap();
        for x in [-4.0, 0.7, 3.3] {
            assert_eq!(
                eval_eigenfunction(&set, &sol, x),
                Complex64::from_polar(1.0, 2.5 * x)
            );
        }
    }

    #[test]
    fn negative_k_mirrors_positive_k() {
        let set = ScattererSet::new(
            vec![
                DeltaScatterer::new(-1.0, 1.5),
                DeltaScatterer::new(0.4, -0.7),
                DeltaScatterer::new(2.0, 2.2),
            ],
            1.0,
        )
        .unwrap();
        let forward = solve_coefficients(&set, 1.7).unwrap();
        let mirrored = solve_coefficients(&set.mirrored(), -1.7).unwrap();
        assert!((forward.reflection.norm() - mirrored.reflection.norm()).abs() < 1e-12);
        assert!((forward.transmission.norm() - mirrored.transmission.norm()).abs() < 1e-12);
        // transmitted side for k < 0 is x < min x_a
        let x = -10.0;
        let psi = eval_eigenfunction(&set, &solve_coefficients(&set, -1.7).unwrap(), x);
        let t = solve_coefficients(&set, -1.7).unwrap().transmission;
        assert!(close(psi, t * Complex64::from_polar(1.0, -1.7 * x), 1e-12));
    }
}
