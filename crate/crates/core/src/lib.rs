//! Temporal logic with temporary coalitions and preferences over concurrent
//! game models.

pub mod error;
pub mod formula;
pub mod game;
pub mod normal_forms;
pub mod parser;
pub mod preference;
pub mod random;
pub mod semantics;
pub mod solution;
pub mod sptc;
pub mod shipped;
pub mod upw;

pub use error::{Error, Result};
pub use formula::{Coalition, Formula, Player, PrefKind};
pub use game::{Cgm, ExpandedCgm, Lasso, Universe};
pub use parser::parse;
pub use preference::ObjectiveSystem;
