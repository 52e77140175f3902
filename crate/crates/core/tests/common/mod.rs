#![allow(dead_code)]

use delta_lab_core::{DeltaScatterer, ScattererSet};
use rand::Rng;

/// Random real-strength set with `n` centres in `[-5, 5]`, at least
/// `min_gap` apart. Strength magnitudes lie in `strength_range`, with random
/// sign.
pub fn random_set<R: Rng>(
    rng: &mut R,
    n: usize,
    min_gap: f64,
    strength_range: (f64, f64),
) -> ScattererSet {
    loop {
        let mut positions: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        positions.sort_by(f64::total_cmp);
        if positions.windows(2).any(|w| w[1] - w[0] < min_gap) {
            continue;
        }
        let scatterers = positions
            .into_iter()
            .map(|x| {
                let magnitude = rng.gen_range(strength_range.0..=strength_range.1);
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                DeltaScatterer::new(x, sign * magnitude)
            })
            .collect();
        return ScattererSet::new(scatterers, 1.0).unwrap();
    }
}
