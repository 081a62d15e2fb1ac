//! Evaluation of the formula language on finite models.

pub mod context;
pub mod eval;
pub mod path;
mod strategy;

pub use context::{needs_expansion, EvalContext, EvalOptions, HistoryProp, QuantMode};
pub use eval::is_state_level;

use crate::formula::Formula;

/// Notes on how a verdict for `f` was obtained; empty when every clause
/// involved is decided by the finite model itself.
pub fn qualifiers(f: &Formula, opts: &EvalOptions) -> Vec<String> {
    let mut q = Vec::new();
    let quantifies_paths = f.any(&|g| {
        matches!(g, Formula::Ability(..) | Formula::Dual(..) | Formula::Pref { .. })
            || !is_state_level(g) && g.children().iter().all(|c| is_state_level(c))
    });
    if quantifies_paths {
        q.push(format!("plays bounded by stem {} loop {}", opts.stem_bound, opts.loop_bound));
    }
    if f.any(&|g| matches!(g, Formula::Ability(c, _) | Formula::Dual(c, _) if !c.is_empty())) {
        q.push(format!("under bounded strategy space (memory {})", opts.memory));
    }
    if f.any(&|g| matches!(g, Formula::Exists(..) | Formula::Forall(..))) {
        q.push(match opts.quant {
            QuantMode::Structure => "propositions range over state sets".to_string(),
            QuantMode::Tree { depth } => format!("propositions range over histories up to depth {depth}"),
        });
    }
    q
}
