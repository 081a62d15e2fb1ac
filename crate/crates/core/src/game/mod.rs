//! Concurrent game models and the structures derived from them.

pub mod expand;
pub mod lasso;
pub mod model;
pub mod universe;
pub mod unwind;

pub use expand::{action_propositions, expand, ExpandedCgm};
pub use lasso::{distinct_plays, follows, lassos, lassos_from, outcome_set, Lasso, MemorylessStrategy};
pub use model::{Cgm, JointIdx};
pub use universe::Universe;
pub use unwind::{unwind, UnwindNode, UnwindTree, DEFAULT_NODE_BUDGET};
