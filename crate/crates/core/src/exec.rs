//! Order-preserving candidate filtering, parallel when the `parallel`
//! feature is enabled (the default) and sequential otherwise. Equilibrium
//! searches and the brute-force oracles filter independent candidates
//! through this single entry point.

#[cfg(feature = "parallel")]
pub fn filter_candidates<T, F>(items: Vec<T>, keep: F) -> Vec<T>
where
    T: Send,
    F: Fn(&T) -> bool + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().filter(|item| keep(item)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn filter_candidates<T, F>(items: Vec<T>, keep: F) -> Vec<T>
where
    T: Send,
    F: Fn(&T) -> bool + Send + Sync,
{
    items.into_iter().filter(|item| keep(item)).collect()
}
