//! Fixed workloads shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempcoal::random::{random_pltl, Tense};
use tempcoal::Formula;

/// Future formulas over `p`, `q` drawn from a fixed seed.
pub fn future_formulas(n: usize, depth: usize) -> Vec<Formula> {
    let props = vec!["p".to_string(), "q".to_string()];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    (0..n).map(|_| random_pltl(&mut rng, &props, depth, Tense::Future)).collect()
}

pub const LATCH_PREFERENCE: &str = "lt(1, init(F p1 & G !p2), init(G !p1 & F p2))";
