//! Shared per-wavenumber solve cache.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::error::Result;
use crate::scattering::{solve_coefficients, ScattererSet, ScatteringSolution};

type Key = (Vec<u64>, u64);

/// Memoises [`solve_coefficients`] by exact set content and k.
///
/// Readers never block each other. When the entry count reaches `capacity`
/// the whole map is dropped; the contents are a pure function of the key, so
/// eviction never changes results.
#[derive(Debug)]
pub struct SolveCache {
    entries: RwLock<HashMap<Key, Arc<ScatteringSolution>>>,
    capacity: usize,
}

impl Default for SolveCache {
    fn default() -> Self {
        Self::with_capacity(16_384)
    }
}

impl SolveCache {
    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            entries: RwLock::new(HashMap::new()),
            capacity: capacity.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn solve(&self, set: &ScattererSet, k: f64) -> Result<Arc<ScatteringSolution>> {
        let key = (set.fingerprint(), k.to_bits());
        if let Some(hit) = self.entries.read().get(&key) {
            return Ok(Arc::clone(hit));
        }
        let sol = Arc::new(solve_coefficients(set, k)?);
        let mut entries = self.entries.write();
        if entries.len() >= self.capacity {
            entries.clear();
        }
        Ok(Arc::clone(entries.entry(key).or_insert(sol)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_returns_identical_solution() {
        let cache = SolveCache::default();
        let set = ScattererSet::single(0.0, 2.0);
        let a = cache.solve(&set, 1.0).unwrap();
        let b = cache.solve(&set, 1.0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, solve_coefficients(&set, 1.0).unwrap());
        assert_eq!(cache.len(), 1);

        let other = set.with_coupling_scale(0.5).unwrap();
        let c = cache.solve(&other, 1.0).unwrap();
        assert_ne!(a.coefs, c.coefs);
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn capacity_bound_clears() {
        let cache = SolveCache::with_capacity(2);
        let set = ScattererSet::single(0.0, 1.0);
        for k in [1.0, 2.0, 3.0] {
            cache.solve(&set, k).unwrap();
        }
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn errors_are_not_cached() {
        let cache = SolveCache::default();
        assert!(cache.solve(&ScattererSet::single(0.0, 1.0), 0.0).is_err());
        assert!(cache.is_empty());
    }

    #[test]
    fn concurrent_readers() {
        let cache = Arc::new(SolveCache::default());
        let set = ScattererSet::single(0.3, 1.5);
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let cache = Arc::clone(&cache);
                let set = set.clone();
                std::thread::spawn(move || cache.solve(&set, 1.0 + (i % 2) as f64).unwrap())
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(cache.len(), 2);
    }
}
