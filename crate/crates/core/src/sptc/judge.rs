use std::collections::{BTreeSet, HashSet};

use super::overlay::{coalitions, delta_local, prop_name, wellformed_formula};
use super::{coalition_overlay, partitions, Decision, Sptc};
use crate::error::{Error, Result};
use crate::formula::{Coalition, Formula, Player};
use crate::game::ExpandedCgm;
use crate::preference::ObjectiveSystem;
use crate::semantics::{EvalContext, EvalOptions, HistoryProp};

/// A context on `M̄` carrying the overlays of every `(profile, family)` pair,
/// whose universe also contains each profile's outcome.
pub fn profile_context(
    ex: &ExpandedCgm,
    profiles: &[(&Sptc, &str)],
    opts: EvalOptions,
    sys: Option<ObjectiveSystem>,
) -> Result<EvalContext> {
    let outcomes = profiles.iter().map(|(s, _)| s.outcome(ex)).collect();
    let mut ctx = EvalContext::from_expansion(ex.clone(), outcomes, opts);
    if let Some(sys) = sys {
        ctx = ctx.with_objectives(sys);
    }
    let mut overlays = Vec::new();
    for (s, family) in profiles {
        overlays.extend(coalition_overlay(ex, s, family)?);
    }
    Ok(ctx.with_overlays(overlays))
}

/// `A(G X s̃_Ag -> φ)`.
pub fn enforces_formula(agents: u32, family: &str, phi: Formula) -> Formula {
    let consistent = Formula::always(Formula::next(wellformed_formula(&Coalition::all(agents), family, agents)));
    Formula::all_paths(Formula::implies(consistent, phi))
}

/// `A(G X ⋁_{i∈Γ} s_Γ -> φ)`.
pub fn enables_formula(agents: u32, family: &str, i: Player, phi: Formula) -> Formula {
    let own = Formula::disj(
        coalitions(agents).iter().filter(|g| g.contains(i)).map(|g| Formula::atom(prop_name(family, g))),
    );
    Formula::all_paths(Formula::implies(Formula::always(Formula::next(own)), phi))
}

pub fn enforces(ctx: &EvalContext, family: &str, phi: &Formula) -> Result<bool> {
    ctx.eval(&enforces_formula(ctx.model().agents(), family, phi.clone()))
}

pub fn enables(ctx: &EvalContext, family: &str, i: Player, phi: &Formula) -> Result<bool> {
    let agents = ctx.model().agents();
    if i == 0 || i > agents {
        return Err(Error::UnknownPlayer { player: i, agents });
    }
    ctx.eval(&enables_formula(agents, family, i, phi.clone()))
}

/// `<<Γ>>(G X s̃_Δ -> φ)`.
pub fn context_ability(
    ctx: &EvalContext,
    gamma: &Coalition,
    delta: &Coalition,
    family: &str,
    phi: &Formula,
) -> Result<bool> {
    let agents = ctx.model().agents();
    if delta.intersects(gamma) {
        return Err(Error::Profile(format!("context {delta} overlaps the coalition {gamma}")));
    }
    let guard = Formula::always(Formula::next(wellformed_formula(delta, family, agents)));
    ctx.eval(&Formula::ability(gamma.clone(), Formula::implies(guard, phi.clone())))
}

/// The body of `δ̃` holds at every history with at most `depth` states.
pub fn wellformed(ctx: &EvalContext, family: &str, depth: usize) -> Result<bool> {
    let f = delta_local(ctx.model(), family);
    Ok(ctx.eval_at_all(&ctx.histories(depth), &f)?.into_iter().all(|b| b))
}

/// Local markings at one node: bit `c * k + g` says that child `c` (in joint
/// action order) carries `s_Γ` for the `g`-th nonempty coalition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeCheck {
    pub history: Vec<usize>,
    /// Markings of the children under which the body of `δ̃` holds.
    pub satisfying: BTreeSet<u64>,
    /// Markings induced by the possible decisions at the node.
    pub induced: BTreeSet<u64>,
}

impl NodeCheck {
    pub fn agrees(&self) -> bool {
        self.satisfying == self.induced
    }
}

const MARKING_BITS: usize = 16;

/// For every history of `M̄` with at most `depth` states, compares the child
/// markings satisfying the body of `δ̃` (by evaluation) with those some
/// decision induces. `ctx` must be a context on `M̄` without `family`
/// overlays.
pub fn local_characterization(ctx: &EvalContext, family: &str, depth: usize) -> Result<Vec<NodeCheck>> {
    let ex = ctx.expansion().ok_or_else(|| Error::Profile("context is not on the expansion".into()))?;
    let m = &ex.model;
    let gs = coalitions(m.agents());
    let k = m.joint_count();
    let bits = k * gs.len();
    if bits > MARKING_BITS {
        return Err(Error::Budget { needed: bits, budget: MARKING_BITS });
    }
    let nodes = ctx.histories(depth);
    let names: Vec<String> = gs.iter().map(|g| prop_name(family, g)).collect();
    let children = |h: &Vec<usize>| -> Vec<Vec<usize>> {
        let u = *h.last().unwrap();
        (0..k).map(|j| [h.clone(), vec![m.succ(u, j)]].concat()).collect()
    };
    let f = delta_local(m, family);
    let mut checks: Vec<NodeCheck> = nodes
        .iter()
        .map(|h| NodeCheck { history: h.clone(), satisfying: BTreeSet::new(), induced: BTreeSet::new() })
        .collect();
    for mark in 0u64..(1 << bits) {
        // The same local marking is placed under every node at once.
        let overlays = gs.iter().enumerate().map(|(gi, _)| {
            let set: HashSet<Vec<usize>> = nodes
                .iter()
                .flat_map(|h| children(h).into_iter().enumerate())
                .filter(|(c, _)| mark >> (c * gs.len() + gi) & 1 == 1)
                .map(|(_, g)| g)
                .collect();
            (names[gi].clone(), HistoryProp::Nodes { set, max_len: depth + 1, beyond: false })
        });
        let local = ctx.with_overlays(overlays.collect::<Vec<_>>());
        for (check, ok) in checks.iter_mut().zip(local.eval_at_all(&nodes, &f)?) {
            if ok {
                check.satisfying.insert(mark);
            }
        }
    }
    let structures = partitions(m.agents());
    for check in &mut checks {
        let u = *check.history.last().unwrap();
        for joint in 0..k {
            for structure in &structures {
                let d = Decision { joint, structure: structure.clone() };
                let mut mark = 0u64;
                for (c, v) in (0..k).map(|j| m.succ(u, j)).enumerate() {
                    for (gi, g) in gs.iter().enumerate() {
                        if super::overlay::marks_step(ex, &d, g, u, v) {
                            mark |= 1 << (c * gs.len() + gi);
                        }
                    }
                }
                check.induced.insert(mark);
            }
        }
    }
    Ok(checks)
}
