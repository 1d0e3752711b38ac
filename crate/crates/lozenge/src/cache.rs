use lozenge_core::coupling::{
    coupling_p, reduce_domain, CouplingSource, CouplingTable, CouplingValue, FloatCouplingTable,
};
use lozenge_core::lattice::HoleSystem;
use lozenge_core::Error;
use std::collections::HashMap;
use std::sync::RwLock;

/// Shared exact coupling values, keyed by the reduced representative of each symmetry orbit.
///
/// Two workers may compute the same value concurrently; the insert keeps
/// whichever lands first, and both are equal, so the race is harmless.
#[derive(Debug, Default)]
pub struct CouplingCache {
    map: RwLock<HashMap<(i64, i64), CouplingValue>>,
}

impl CouplingCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl CouplingSource for CouplingCache {
    fn coupling(&self, x: i64, y: i64) -> CouplingValue {
        let key = reduce_domain(x, y);
        if let Some(v) = self.map.read().ok().and_then(|m| m.get(&key).cloned()) {
            return v;
        }
        let v = coupling_p(key.0, key.1);
        if let Ok(mut m) = self.map.write() {
            m.entry(key).or_insert_with(|| v.clone());
        }
        v
    }
}

/// Worker pool capped by `LOZENGE_THREADS` when set to a positive integer.
pub fn worker_pool() -> rayon::ThreadPool {
    let cap = std::env::var("LOZENGE_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cap {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

/// A float coupling table covering every offset between monomers of the holes and the box x0..=x1, y0..=y1.
pub fn covering_table(hs: &HoleSystem, x0: i64, y0: i64, x1: i64, y1: i64) -> Result<FloatCouplingTable, Error> {
    let (mut lo, mut hi) = ((x0, y0), (x1, y1));
    for m in hs.monomers()? {
        lo = (lo.0.min(m.pos.x), lo.1.min(m.pos.y));
        hi = (hi.0.max(m.pos.x), hi.1.max(m.pos.y));
    }
    // One extra cell each way covers the neighbours of boundary monomers.
    let (dx, dy) = (hi.0 - lo.0 + 2, hi.1 - lo.1 + 2);
    Ok(CouplingTable::new(-dx, dx, -dy, dy).to_float())
}
