use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{Decision, Memory, Sptc};
use crate::error::{Error, Result};
use crate::formula::{Coalition, Formula};
use crate::game::{Cgm, ExpandedCgm};
use crate::semantics::HistoryProp;

/// Nonempty coalitions of `1..=agents`, in bitmask order.
pub fn coalitions(agents: u32) -> Vec<Coalition> {
    Coalition::all(agents).subsets().into_iter().filter(|c| !c.is_empty()).collect()
}

/// `s_1_3` for family `s` and coalition `{1,3}`.
pub fn prop_name(family: &str, gamma: &Coalition) -> String {
    let mut s = family.to_string();
    for p in gamma.players() {
        s.push('_');
        s.push_str(&p.to_string());
    }
    s
}

pub fn family_names(family: &str, agents: u32) -> Vec<String> {
    coalitions(agents).iter().map(|g| prop_name(family, g)).collect()
}

fn check_names(m: &Cgm, family: &str) -> Result<()> {
    let actions: BTreeSet<&String> = m.all_actions().iter().flatten().collect();
    for name in family_names(family, m.agents()) {
        if m.props().contains(&name) || actions.contains(&name) {
            return Err(Error::NameClash(name));
        }
    }
    Ok(())
}

/// Whether the step from `u` to `v` in `M̄` is `gamma`'s part of decision `d`.
pub(crate) fn marks_step(ex: &ExpandedCgm, d: &Decision, gamma: &Coalition, u: usize, v: usize) -> bool {
    if !d.structure.contains(gamma) {
        return false;
    }
    let Some(j) = ex.last_action(v) else { return false };
    if ex.model.succ(u, j) != v {
        return false;
    }
    let (took, chosen) = (ex.model.decode(j), ex.model.decode(d.joint));
    gamma.players().iter().all(|&i| took[i as usize - 1] == chosen[i as usize - 1])
}

fn last_two(ex: &ExpandedCgm, decisions: &[Decision], gamma: &Coalition) -> Vec<Vec<bool>> {
    let n = ex.model.num_states();
    (0..n).map(|u| (0..n).map(|v| marks_step(ex, &decisions[u], gamma, u, v)).collect()).collect()
}

fn histories(m: &Cgm, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier = vec![vec![m.init()]];
    while let Some(h) = frontier.pop() {
        if h.len() < max_len {
            for v in m.successors(*h.last().unwrap()) {
                let mut g = h.clone();
                g.push(v);
                frontier.push(g);
            }
        }
        out.push(h);
    }
    out
}

/// `X_Γ(s)` restricted to histories of `M̄` with at most `depth + 1` states,
/// for every nonempty `Γ`.
pub fn overlay_nodes(ex: &ExpandedCgm, s: &Sptc, depth: usize) -> BTreeMap<Coalition, BTreeSet<Vec<usize>>> {
    let m = &ex.model;
    let mut out: BTreeMap<Coalition, BTreeSet<Vec<usize>>> =
        coalitions(m.agents()).into_iter().map(|g| (g, BTreeSet::new())).collect();
    for h in histories(m, depth) {
        let u = *h.last().unwrap();
        let d = s.decision(&h);
        for v in m.successors(u) {
            for (gamma, set) in out.iter_mut() {
                if marks_step(ex, d, gamma, u, v) {
                    let mut g = h.clone();
                    g.push(v);
                    set.insert(g);
                }
            }
        }
    }
    out
}

/// Overlay propositions `family_Γ` interpreting `X_Γ(s)` on `M̄`.
pub fn coalition_overlay(ex: &ExpandedCgm, s: &Sptc, family: &str) -> Result<Vec<(String, HistoryProp)>> {
    check_names(&ex.model, family)?;
    let props = match &s.memory {
        Memory::Memoryless(v) => coalitions(ex.model.agents())
            .into_iter()
            .map(|g| (prop_name(family, &g), HistoryProp::LastTwo(last_two(ex, v, &g))))
            .collect(),
        Memory::Table { depth, fallback, .. } => {
            let nodes = overlay_nodes(ex, s, *depth);
            nodes
                .into_iter()
                .map(|(g, set)| {
                    let prop = HistoryProp::Hybrid {
                        set: set.into_iter().collect::<HashSet<_>>(),
                        max_len: depth + 1,
                        tail: last_two(ex, fallback, &g),
                    };
                    (prop_name(family, &g), prop)
                })
                .collect()
        }
    };
    Ok(props)
}

fn s(family: &str, g: &Coalition) -> Formula {
    Formula::atom(prop_name(family, g))
}

/// `s̃_Γ` over `1..=agents`, expanded over all subsets of `Γ`; `s̃_∅ = ⊤`.
pub fn wellformed_formula(gamma: &Coalition, family: &str, agents: u32) -> Formula {
    if gamma.is_empty() {
        return Formula::True;
    }
    let crossing = coalitions(agents)
        .into_iter()
        .filter(|g| g.intersects(gamma) && !g.is_subset(gamma))
        .map(|g| Formula::not(s(family, &g)));
    let proper: Vec<Coalition> =
        gamma.subsets().into_iter().filter(|d| !d.is_empty() && d != gamma).collect();
    let whole = Formula::conj(
        std::iter::once(s(family, gamma)).chain(proper.iter().map(|d| Formula::not(s(family, d)))),
    );
    let body = if proper.is_empty() {
        whole
    } else {
        let split = Formula::disj(proper.iter().map(|d| {
            Formula::and(
                wellformed_formula(d, family, agents),
                wellformed_formula(&gamma.difference(d), family, agents),
            )
        }));
        Formula::or(whole, split)
    };
    Formula::conj(crossing.chain(std::iter::once(body)))
}

fn hat(m: &Cgm, gamma: &Coalition, acts: &[usize]) -> Formula {
    Formula::conj(
        gamma.players().iter().zip(acts).map(|(&i, &a)| Formula::atom(m.actions(i)[a].as_str())),
    )
}

/// `Act_Γ` as index tuples over the members of `Γ`.
fn coalition_actions(m: &Cgm, gamma: &Coalition) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &i in gamma.players() {
        let k = m.actions(i).len();
        out = out.into_iter().flat_map(|t| (0..k).map(move |a| [t.clone(), vec![a]].concat())).collect();
    }
    out
}

/// The conjuncts of `δ̃` without their `A G`: one successor is fully
/// marked, and each `s_Γ` is either empty among the successors or exactly
/// the successors of one `Γ`-decision.
fn local_parts(m: &Cgm, family: &str) -> Vec<Formula> {
    let agents = m.agents();
    let mut parts = vec![Formula::some_path(Formula::next(wellformed_formula(
        &Coalition::all(agents),
        family,
        agents,
    )))];
    for g in coalitions(agents) {
        let none = Formula::all_paths(Formula::next(Formula::not(s(family, &g))));
        let one = coalition_actions(m, &g)
            .into_iter()
            .map(|a| Formula::all_paths(Formula::next(Formula::iff(s(family, &g), hat(m, &g, &a)))));
        parts.push(Formula::disj(std::iter::once(none).chain(one)));
    }
    parts
}

pub fn delta_local(m: &Cgm, family: &str) -> Formula {
    Formula::conj(local_parts(m, family))
}

pub fn delta_tilde(m: &Cgm, family: &str) -> Formula {
    Formula::conj(local_parts(m, family).into_iter().map(|p| Formula::all_paths(Formula::always(p))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::expand;
    use crate::sptc::tests::two_by_two;
    use crate::sptc::{CoalitionStructure, Decision};

    #[test]
    fn wellformed_small_cases() {
        let one = Coalition::new([1]);
        assert_eq!(wellformed_formula(&one, "s", 1).to_string(), "s_1");
        let f = wellformed_formula(&Coalition::all(2), "s", 2);
        assert_eq!(f.to_string(), 
            "s_1_2 & !s_1 & !s_2 | (!s_1_2 & s_1 & (!s_1_2 & s_2) | !s_1_2 & s_2 & (!s_1_2 & s_1))"
        );
    }

    #[test]
    fn constant_singletons_mark_both_replies() {
        let ex = expand(&two_by_two()).unwrap();
        let d = Decision { joint: 0, structure: CoalitionStructure::singletons(2) };
        let s = Sptc::constant(&ex, d).unwrap();
        let nodes = overlay_nodes(&ex, &s, 1);
        assert_eq!(nodes[&Coalition::new([1])].len(), 2);
        assert_eq!(nodes[&Coalition::new([2])].len(), 2);
        assert!(nodes[&Coalition::all(2)].is_empty());
        // The full outcome is the node marked by both blocks.
        let both: Vec<_> = nodes[&Coalition::new([1])].intersection(&nodes[&Coalition::new([2])]).collect();
        assert_eq!(both.len(), 1);
    }

    #[test]
    fn overlay_names_clash_with_props() {
        let mut m = two_by_two();
        m.declare_props(["s_1".to_string()]);
        let ex = expand(&m).unwrap();
        let s = Sptc::constant(&ex, Decision { joint: 0, structure: CoalitionStructure::grand(2) }).unwrap();
        assert!(matches!(coalition_overlay(&ex, &s, "s"), Err(Error::NameClash(n)) if n == "s_1"));
        assert!(coalition_overlay(&ex, &s, "r").is_ok());
    }
}
