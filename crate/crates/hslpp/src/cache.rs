//! Process-wide cache of searched contour parameters.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use hslpp_core::kernels::{search_theta_r, ThetaR};

use hslpp_core::Result;

/// Sample count used by the descent checks inside the search.
pub const SEARCH_GRID: usize = 2000;

type Key = (u64, u64, u64);

fn table() -> &'static RwLock<HashMap<Key, ThetaR>> {
    static T: OnceLock<RwLock<HashMap<Key, ThetaR>>> = OnceLock::new();
    T.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `(θ0, R0)` for `(q, c, κ)`, searched once per process.
pub fn theta_r(q: f64, c: f64, kappa: f64) -> Result<ThetaR> {
    let key = (q.to_bits(), c.to_bits(), kappa.to_bits());
    if let Some(v) = table().read().expect("cache poisoned").get(&key) {
        return Ok(*v);
    }
    let v = search_theta_r(q, c, kappa, SEARCH_GRID)?;
    table().write().expect("cache poisoned").insert(key, v);
    Ok(v)
}
