//! Process-wide caches of immutable tables.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use longrun_core::conditional_counts::{Proposition1, RECONCILIATION_GRID};
use longrun_core::{null_table_by_counting, snk_dp, CountTable, ProbabilityTable, Result};

/// Null tables keyed by `n` and DP count tables keyed by `(n, x)`.
///
/// Tables are built outside the lock; the first insert for a key wins and
/// later builders get the stored table.
#[derive(Debug, Default)]
pub struct TableCache {
    null: Mutex<BTreeMap<usize, Arc<ProbabilityTable>>>,
    counts: Mutex<BTreeMap<(usize, usize), Arc<CountTable>>>,
    proposition1: OnceLock<Arc<Proposition1>>,
}

fn get_or_insert<K: Ord + Copy, V>(
    map: &Mutex<BTreeMap<K, Arc<V>>>,
    key: K,
    build: impl FnOnce() -> Result<V>,
) -> Result<Arc<V>> {
    if let Some(hit) = map.lock().expect("cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let built = Arc::new(build()?);
    let mut guard = map.lock().expect("cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(built)))
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static TableCache {
        static GLOBAL: OnceLock<TableCache> = OnceLock::new();
        GLOBAL.get_or_init(TableCache::new)
    }

    pub fn null_table(&self, n: usize) -> Result<Arc<ProbabilityTable>> {
        get_or_insert(&self.null, n, || null_table_by_counting(n))
    }

    pub fn counts(&self, n: usize, x: usize) -> Result<Arc<CountTable>> {
        get_or_insert(&self.counts, (n, x), || snk_dp(n, x))
    }

    /// The recursion engine reconciled on the default grid.
    pub fn proposition1(&self) -> Result<Arc<Proposition1>> {
        if let Some(engine) = self.proposition1.get() {
            return Ok(Arc::clone(engine));
        }
        let engine = Arc::new(Proposition1::reconcile(RECONCILIATION_GRID)?);
        Ok(Arc::clone(self.proposition1.get_or_init(|| engine)))
    }

    pub fn cached_null_lengths(&self) -> Vec<usize> {
        self.null
            .lock()
            .expect("cache poisoned")
            .keys()
            .copied()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concurrent_builders_share_one_table() {
        let cache = TableCache::new();
        let tables: Vec<Arc<ProbabilityTable>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..8)
                .map(|_| s.spawn(|| cache.null_table(40).unwrap()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(tables.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));
        assert_eq!(cache.cached_null_lengths(), vec![40]);
        assert_eq!(*tables[0], null_table_by_counting(40).unwrap());
    }

    #[test]
    fn counts_are_cached_by_key() {
        let cache = TableCache::new();
        let a = cache.counts(12, 3).unwrap();
        let b = cache.counts(12, 3).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert!(!Arc::ptr_eq(&a, &cache.counts(12, 4).unwrap()));
        assert!(cache.counts(0, 3).is_err());
    }
}
