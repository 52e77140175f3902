//! Classical reference: a point mass crossing a symmetric triangular barrier.
//!
//! The force is `−F0` on `[x0 − w/2, x0)` and `+F0` on `[x0, x0 + w/2]`, so the
//! potential rises linearly to `F0·w/2` at the centre and falls back to zero.
//! A particle that passes leaves with its incident speed but lags (barrier) or
//! leads (well) a free particle launched with the same data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBarrier {
    pub x0: f64,
    pub w: f64,
    /// Positive for a barrier, negative for a well.
    pub f0: f64,
    pub mass: f64,
}

impl ClassicalBarrier {
    pub fn new(x0: f64, w: f64, f0: f64, mass: f64) -> Result<Self> {
        let barrier = Self { x0, w, f0, mass };
        barrier.validate()?;
        Ok(barrier)
    }

    pub fn validate(&self) -> Result<()> {
        for (what, value) in [
            ("x0", self.x0),
            ("w", self.w),
            ("F0", self.f0),
            ("mass", self.mass),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { what, value });
            }
        }
        if self.w <= 0.0 {
            return Err(Error::InvalidClassical(format!(
                "w must be > 0, got {}",
                self.w
            )));
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidClassical(format!(
                "mass must be > 0, got {}",
                self.mass
            )));
        }
        Ok(())
    }

    pub fn left(&self) -> f64 {
        self.x0 - 0.5 * self.w
    }

    pub fn right(&self) -> f64 {
        self.x0 + 0.5 * self.w
    }

    pub fn force(&self, x: f64) -> f64 {
        if x < self.left() || x > self.right() {
            0.0
        } else if x < self.x0 {
            -self.f0
        } else {
            self.f0
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        if x < self.left() || x > self.right() {
            0.0
        } else if x < self.x0 {
            self.f0 * (x - self.left())
        } else {
            self.f0 * (self.right() - x)
        }
    }

    /// Index of the constant-force piece containing `x`.
    fn region(&self, x: f64) -> u8 {
        if x < self.left() {
            0
        } else if x < self.x0 {
            1
        } else if x <= self.right() {
            2
        } else {
            3
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalParticle {
    pub v0: f64,
}

impl ClassicalParticle {
    pub fn new(v0: f64) -> Result<Self> {
        if !(v0.is_finite() && v0 > 0.0) {
            return Err(Error::InvalidClassical(format!("v0 must be > 0, got {v0}")));
        }
        Ok(Self { v0 })
    }
}

/// Speed at the barrier centre, or `DoesNotPass` when the particle cannot
/// strictly clear the top.
fn centre_speed(barrier: &ClassicalBarrier, particle: &ClassicalParticle) -> Result<f64> {
    barrier.validate()?;
    ClassicalParticle::new(particle.v0)?;
    let v0_sq = particle.v0 * particle.v0;
    let threshold = barrier.f0 * barrier.w / barrier.mass;
    if v0_sq <= threshold {
        return Err(Error::DoesNotPass { v0_sq, threshold });
    }
    Ok((v0_sq - threshold).sqrt())
}

/// Time spent inside `[x0 − w/2, x0 + w/2]`.
///
/// Equal to `2(m/F0)(v0 − v_c)` with `v_c² = v0² − F0 w/m`, written as
/// `2w/(v0 + v_c)` so that it stays exact as F0 → 0.
pub fn traversal_time(barrier: &ClassicalBarrier, particle: &ClassicalParticle) -> Result<f64> {
    let vc = centre_speed(barrier, particle)?;
    Ok(2.0 * barrier.w / (particle.v0 + vc))
}

/// Spatial lag behind the free particle once both are past the barrier:
/// `v0·T − w`. Positive for a barrier, negative for a well.
pub fn retardation_distance(
    barrier: &ClassicalBarrier,
    particle: &ClassicalParticle,
) -> Result<f64> {
    let vc = centre_speed(barrier, particle)?;
    Ok(barrier.w * (particle.v0 - vc) / (particle.v0 + vc))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    Transmitted,
    Reflected,
}

#[derive(Debug, Clone)]
pub struct OracleRun {
    pub trajectory: Vec<TrajectoryPoint>,
    pub outcome: OracleOutcome,
}

impl OracleRun {
    /// First time at which `x` reaches `level`, linearly interpolated.
    pub fn time_at(&self, level: f64) -> Option<f64> {
        self.trajectory.windows(2).find_map(|p| {
            let (a, b) = (p[0], p[1]);
            (a.x < level && b.x >= level).then(|| a.t + (level - a.x) / (b.x - a.x) * (b.t - a.t))
        })
    }

    pub fn crossing_time(&self, barrier: &ClassicalBarrier) -> Option<f64> {
        Some(self.time_at(barrier.right())? - self.time_at(barrier.left())?)
    }

    pub fn exit_speed(&self) -> Option<f64> {
        match self.outcome {
            OracleOutcome::Transmitted => self.trajectory.last().map(|p| p.v),
            OracleOutcome::Reflected => None,
        }
    }

    /// `max |½mv² + V(x) − ½mv0²|` over the run.
    pub fn max_energy_drift(&self, barrier: &ClassicalBarrier) -> f64 {
        let Some(first) = self.trajectory.first() else {
            return 0.0;
        };
        let e0 = 0.5 * barrier.mass * first.v * first.v + barrier.potential(first.x);
        self.trajectory
            .iter()
            .map(|p| (0.5 * barrier.mass * p.v * p.v + barrier.potential(p.x) - e0).abs())
            .fold(0.0, f64::max)
    }
}

const MAX_REFINEMENT: u32 = 30;
const MAX_STEPS: usize = 50_000_000;

/// Velocity-Verlet integration of `m ẍ = F(x)` from one unit before the barrier
/// to one unit past it (or until the particle turns back).
///
/// A step whose endpoints fall in different constant-force pieces is bisected
/// recursively, so the force discontinuities are crossed with a step of at
/// most `dt·2⁻³⁰`.
pub fn integrate_oracle(
    barrier: &ClassicalBarrier,
    particle: &ClassicalParticle,
    dt: f64,
) -> Result<OracleRun> {
    barrier.validate()?;
    ClassicalParticle::new(particle.v0)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidClassical(format!("dt must be > 0, got {dt}")));
    }
    let limit = barrier.w / (100.0 * particle.v0);
    if dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }

    let mut state = TrajectoryPoint {
        t: 0.0,
        x: barrier.left() - 1.0,
        v: particle.v0,
    };
    let mut trajectory = vec![state];
    let stop = barrier.right() + 1.0;
    let mut outcome = OracleOutcome::Transmitted;

    while state.x <= stop {
        if state.v <= 0.0 {
            outcome = OracleOutcome::Reflected;
            break;
        }
        if trajectory.len() > MAX_STEPS {
            return Err(Error::InvalidClassical(format!(
                "oracle exceeded {MAX_STEPS} steps"
            )));
        }
        advance(barrier, &mut state, dt, 0, &mut trajectory);
    }
    Ok(OracleRun {
        trajectory,
        outcome,
    })
}

fn verlet_step(barrier: &ClassicalBarrier, s: TrajectoryPoint, h: f64) -> TrajectoryPoint {
    let a0 = barrier.force(s.x) / barrier.mass;
    let x = s.x + s.v * h + 0.5 * a0 * h * h;
    let a1 = barrier.force(x) / barrier.mass;
    TrajectoryPoint {
        t: s.t + h,
        x,
        v: s.v + 0.5 * (a0 + a1) * h,
    }
}

fn advance(
    barrier: &ClassicalBarrier,
    state: &mut TrajectoryPoint,
    h: f64,
    depth: u32,
    out: &mut Vec<TrajectoryPoint>,
) {
    let trial = verlet_step(barrier, *state, h);
    if depth >= MAX_REFINEMENT || barrier.region(trial.x) == barrier.region(state.x) {
        *state = trial;
        out.push(trial);
        return;
    }
    advance(barrier, state, 0.5 * h, depth + 1, out);
    advance(barrier, state, 0.5 * h, depth + 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn setup(f0: f64) -> (ClassicalBarrier, ClassicalParticle) {
        (
            ClassicalBarrier::new(0.0, 2.0, f0, 1.0).unwrap(),
            ClassicalParticle::new(2.0).unwrap(),
        )
    }

    #[test]
    fn free_motion() {
        let (b, p) = setup(0.0);
        assert_eq!(traversal_time(&b, &p).unwrap(), 1.0);
        assert_eq!(retardation_distance(&b, &p).unwrap(), 0.0);
    }

    #[test]
    fn barrier_closed_form() {
        let (b, p) = setup(1.0);
        let t = traversal_time(&b, &p).unwrap();
        assert!((t - 2.0 * (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((t - 1.171_572_875_253_81).abs() < 1e-12);
        let d = retardation_distance(&b, &p).unwrap();
        assert!((d - 0.343_145_750_507_62).abs() < 1e-12);
        assert!((d - (2.0 * t - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn well_leads() {
        let (b, p) = setup(-1.0);
        // t = 2(m/F0)(v0 − √(v0² + w)) with F0 = −1
        let t = traversal_time(&b, &p).unwrap();
        assert!((t - (-2.0) * (2.0 - 6f64.sqrt())).abs() < 1e-14);
        assert!(retardation_distance(&b, &p).unwrap() < 0.0);
    }

    #[test]
    fn threshold_does_not_pass() {
        let b = ClassicalBarrier::new(0.0, 2.0, 1.0, 1.0).unwrap();
        let p = ClassicalParticle::new(1.0).unwrap();
        assert!(matches!(
            traversal_time(&b, &p),
            Err(Error::DoesNotPass { .. })
        ));
        assert!(matches!(
            retardation_distance(&b, &p),
            Err(Error::DoesNotPass { .. })
        ));
    }

    #[test]
    fn invalid_inputs() {
        assert!(ClassicalBarrier::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(ClassicalBarrier::new(0.0, 1.0, 1.0, -1.0).is_err());
        assert!(ClassicalParticle::new(0.0).is_err());
        let (b, p) = setup(1.0);
        assert!(matches!(
            integrate_oracle(&b, &p, 0.1),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_uniform_motion() {
        let (b, p) = setup(0.0);
        let run = integrate_oracle(&b, &p, 1e-4).unwrap();
        let x_start = run.trajectory[0].x;
        for pt in &run.trajectory {
            assert!((pt.x - (x_start + 2.0 * pt.t)).abs() < 1e-12);
        }
        assert_eq!(run.outcome, OracleOutcome::Transmitted);
    }

    #[test]
    fn oracle_matches_closed_form() {
        for f0 in [1.0, -1.0] {
            let (b, p) = setup(f0);
            let run = integrate_oracle(&b, &p, 1e-5).unwrap();
            let t = run.crossing_time(&b).unwrap();
            assert!((t - traversal_time(&b, &p).unwrap()).abs() < 1e-6);
            assert!(run.max_energy_drift(&b) < 1e-8);
            assert!((run.exit_speed().unwrap() - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn oracle_detects_reflection() {
        let b = ClassicalBarrier::new(0.0, 2.0, 3.0, 1.0).unwrap();
        let p = ClassicalParticle::new(2.0).unwrap();
        let run = integrate_oracle(&b, &p, 1e-4).unwrap();
        assert_eq!(run.outcome, OracleOutcome::Reflected);
        assert!(run.exit_speed().is_none());
    }

    #[test]
    fn dimensionless_collapse() {
        // same F0 w/(m v0²) = 0.25
        let triples = [
            (1.0, 2.0, 1.0, 1.0),
            (2.0, 1.0, 0.5, 1.0),
            (0.5, 3.0, 0.75, 1.5),
        ];
        let ratios: Vec<f64> = triples
            .iter()
            .map(|&(mass, v0, f0, w)| {
                let b = ClassicalBarrier::new(0.0, w, f0, mass).unwrap();
                let p = ClassicalParticle::new(v0).unwrap();
                assert!((f0 * w / (mass * v0 * v0) - 0.25).abs() < 1e-14);
                retardation_distance(&b, &p).unwrap() / w
            })
            .collect();
        for r in &ratios[1..] {
            assert!((r - ratios[0]).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn sign_follows_force(
            f0 in -5.0f64..5.0,
            w in 0.1f64..5.0,
            mass in 0.2f64..5.0,
            v0 in 0.1f64..10.0,
        ) {
            let b = ClassicalBarrier::new(0.0, w, f0, mass).unwrap();
            let p = ClassicalParticle::new(v0).unwrap();
            prop_assume!(v0 * v0 > f0 * w / mass);
            let d = retardation_distance(&b, &p).unwrap();
            if f0 > 0.0 {
                prop_assert!(d > 0.0);
            } else if f0 < 0.0 {
                prop_assert!(d < 0.0);
            } else {
                prop_assert_eq!(d, 0.0);
            }
        }
    }
}
