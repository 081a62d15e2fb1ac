//! The solution-concept conditions as formulas over two overlay families,
//! for evaluation by the generic semantics.

use crate::formula::{Coalition, Formula, Player};
use crate::preference::ObjectiveSystem;
use crate::sptc::{coalitions, enables_formula, enforces_formula, prop_name};

/// Every combination of one objective index per player.
pub fn class_tuples(sys: &ObjectiveSystem) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for po in sys.players() {
        out = out
            .into_iter()
            .flat_map(|t| (0..po.len()).map(move |k| [t.clone(), vec![k]].concat()))
            .collect();
    }
    out
}

/// `⋀_i θ_{i,t_i}`.
pub fn tuple_formula(sys: &ObjectiveSystem, t: &[usize]) -> Formula {
    Formula::conj(sys.players().iter().zip(t).map(|(po, &k)| po.objectives[k].clone()))
}

fn bracket(f: Formula) -> Formula {
    Formula::at_origin(f)
}

/// `A G ⋀_Γ (s_Γ <-> r_Γ)` over the nonempty `Γ` accepted by `keep`.
pub fn agreement_formula(agents: u32, s: &str, r: &str, keep: impl Fn(&Coalition) -> bool) -> Formula {
    let body = Formula::conj(
        coalitions(agents)
            .iter()
            .filter(|g| keep(g))
            .map(|g| Formula::iff(Formula::atom(prop_name(s, g)), Formula::atom(prop_name(r, g)))),
    );
    Formula::all_paths(Formula::always(body))
}

/// Core condition for `r` against the alternative `s`: `r` enforces `θ*`,
/// and every class tuple `θ∘` that `s` enforces is, for every player,
/// ranked below `θ*` once `θ*` is excluded from it.
pub fn core_formula(sys: &ObjectiveSystem, theta_star: &Formula, r: &str, s: &str) -> Formula {
    let agents = sys.agents;
    let a = enforces_formula(agents, r, theta_star.clone());
    let b = class_tuples(sys).into_iter().map(|t| {
        let circ = tuple_formula(sys, &t);
        let lhs = bracket(Formula::and(circ.clone(), Formula::not(theta_star.clone())));
        let prefs = (1..=agents).map(|i| Formula::lt(i, lhs.clone(), bracket(theta_star.clone())));
        Formula::implies(enforces_formula(agents, s, circ), Formula::conj(prefs))
    });
    Formula::conj(std::iter::once(a).chain(b))
}

/// `r` is at least as good as `s` for player `i`.
pub fn dominant_formula(sys: &ObjectiveSystem, i: Player, s: &str, r: &str) -> Formula {
    let agents = sys.agents;
    let po = sys.player(i).expect("player has objectives");
    let agree = agreement_formula(agents, s, r, |g| g.contains(i));
    let worse = Formula::conj((0..po.len()).map(|a| {
        let th1 = bracket(po.objectives[a].clone());
        let better = Formula::disj((0..po.len()).map(|b| {
            let th2 = bracket(po.objectives[b].clone());
            Formula::and(Formula::lt(i, th1.clone(), th2.clone()), enables_formula(agents, r, i, th2))
        }));
        Formula::implies(enables_formula(agents, s, i, th1), better)
    }));
    Formula::or(agree, worse)
}

/// `D(s, r)`: `s` coincides with `r`, or every achievement vector `s`
/// secures player-wise is beaten componentwise by one `r` secures.
pub fn d_formula(sys: &ObjectiveSystem, s: &str, r: &str) -> Formula {
    let agents = sys.agents;
    let agree = agreement_formula(agents, s, r, |_| true);
    let secured = |fam: &str, t: &[usize]| {
        Formula::conj(
            (1..=agents)
                .zip(t)
                .map(|(i, &k)| enables_formula(agents, fam, i, bracket(sys.players()[i as usize - 1].objectives[k].clone()))),
        )
    };
    let tuples = class_tuples(sys);
    let worse = Formula::conj(tuples.iter().map(|t1| {
        let better = Formula::disj(tuples.iter().map(|t2| {
            let ranked = Formula::conj((1..=agents).map(|i| {
                let po = &sys.players()[i as usize - 1];
                let k = i as usize - 1;
                Formula::lt(i, bracket(po.objectives[t1[k]].clone()), bracket(po.objectives[t2[k]].clone()))
            }));
            Formula::and(ranked, secured(r, t2))
        }));
        Formula::implies(secured(s, t1), better)
    }));
    Formula::or(agree, worse)
}
