//! Seeded generators for small models, objective systems and formulas.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{Formula, Player, PrefKind};
use crate::game::Cgm;
use crate::preference::{ObjectiveSystem, PlayerObjectives};

/// Size limits for generated models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelShape {
    pub max_states: usize,
    pub max_players: u32,
    pub max_actions: usize,
    pub props: Vec<String>,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape { max_states: 6, max_players: 2, max_actions: 2, props: vec!["p".into(), "q".into()] }
    }
}

pub fn random_model(rng: &mut impl Rng, shape: &ModelShape) -> Cgm {
    let n = rng.gen_range(1..=shape.max_states);
    let agents = rng.gen_range(1..=shape.max_players);
    let actions: Vec<Vec<String>> = (1..=agents)
        .map(|i| (0..rng.gen_range(1..=shape.max_actions)).map(|a| format!("a{i}_{a}")).collect())
        .collect();
    let joints: usize = actions.iter().map(Vec::len).product();
    let trans = (0..n * joints).map(|_| rng.gen_range(0..n)).collect();
    let labels = (0..n)
        .map(|_| shape.props.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect::<BTreeSet<_>>())
        .collect();
    let states = (0..n).map(|w| format!("w{w}")).collect();
    let mut m = Cgm::new(states, 0, actions, trans, labels).expect("generated model is well formed");
    m.declare_props(shape.props.iter().cloned());
    m
}

/// Which temporal operators a generated formula may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tense {
    Future,
    Past,
    Both,
}

/// A PLTL formula over `props` of depth at most `depth`.
pub fn random_pltl(rng: &mut impl Rng, props: &[String], depth: usize, tense: Tense) -> Formula {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..props.len() + 2) {
            k if k < props.len() => Formula::atom(props[k].as_str()),
            k if k == props.len() => Formula::True,
            _ => Formula::not(Formula::atom(props[rng.gen_range(0..props.len())].as_str())),
        };
    }
    let sub = |rng: &mut _| random_pltl(rng, props, depth - 1, tense);
    let future = tense != Tense::Past;
    let past = tense != Tense::Future;
    loop {
        let f = match rng.gen_range(0..10) {
            0 => Formula::not(sub(rng)),
            1 => Formula::and(sub(rng), sub(rng)),
            2 => Formula::or(sub(rng), sub(rng)),
            3 if future => Formula::next(sub(rng)),
            4 if future => Formula::eventually(sub(rng)),
            5 if future => Formula::always(sub(rng)),
            6 if future => Formula::until(sub(rng), sub(rng)),
            7 if past => Formula::yesterday(sub(rng)),
            8 if past => Formula::once(sub(rng)),
            9 if past => Formula::since(sub(rng), sub(rng)),
            _ => continue,
        };
        return f;
    }
}

/// An objective system whose lists are `[chi1, !chi1 & chi2, !chi1 & !chi2]`
/// (or `[chi, !chi]`), hence disjoint and exhaustive on every model, with a
/// random strict order compatible with a random permutation.
pub fn random_objectives(rng: &mut impl Rng, agents: u32, props: &[String], depth: usize) -> ObjectiveSystem {
    let players = (1..=agents).map(|i| random_player_objectives(rng, i, props, depth)).collect();
    ObjectiveSystem::new(agents, players).expect("generated system is well formed")
}

fn random_player_objectives(rng: &mut impl Rng, i: Player, props: &[String], depth: usize) -> PlayerObjectives {
    let c1 = random_pltl(rng, props, depth, Tense::Both);
    let objectives = if rng.gen_bool(0.5) {
        vec![c1.clone(), Formula::not(c1)]
    } else {
        let c2 = random_pltl(rng, props, depth, Tense::Both);
        vec![
            c1.clone(),
            Formula::and(Formula::not(c1.clone()), c2.clone()),
            Formula::and(Formula::not(c1), Formula::not(c2)),
        ]
    };
    let n = objectives.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((perm[x], perm[y]));
            }
        }
    }
    let names = (0..n).map(|k| format!("t{i}_{k}")).collect();
    PlayerObjectives::new(names, objectives, edges).expect("generated order is acyclic")
}

/// A state formula built from atoms, booleans, `A`/`E` over PLTL and
/// preferences with PLTL operands.
pub fn random_pref_formula(rng: &mut impl Rng, agents: u32, props: &[String], depth: usize) -> Formula {
    if depth <= 1 || rng.gen_bool(0.2) {
        return Formula::atom(props[rng.gen_range(0..props.len())].as_str());
    }
    let operand = |rng: &mut _| random_pltl(rng, props, depth.min(4), Tense::Both);
    match rng.gen_range(0..6) {
        0 => Formula::not(random_pref_formula(rng, agents, props, depth - 1)),
        1 => Formula::and(
            random_pref_formula(rng, agents, props, depth - 1),
            random_pref_formula(rng, agents, props, depth - 1),
        ),
        2 => Formula::all_paths(Formula::next(random_pref_formula(rng, agents, props, depth - 1))),
        _ => {
            let kind = if rng.gen_bool(0.5) { PrefKind::Less } else { PrefKind::NotLess };
            let i = rng.gen_range(1..=agents);
            Formula::pref(kind, i, operand(rng), operand(rng))
        }
    }
}
