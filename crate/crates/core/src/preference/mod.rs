//! Objective systems, preference elimination and axiom instances.

pub mod axioms;
pub mod eliminate;
pub mod fuzz;
pub mod objectives;

pub use objectives::{
    realizable_objectives, validate_in_place, validate_objectives, ObjectiveSystem, PlayerObjectives,
    ValidationReport, Violation,
};
pub use eliminate::{eliminate, EliminationStyle, LITERAL_LIMIT};
pub use axioms::{axiom_instance, coalition_pref, partition, AxiomKind, Slots};
pub use fuzz::{find_countermodel, fuzz_axiom, Countermodel, FuzzOptions, FuzzReport};
