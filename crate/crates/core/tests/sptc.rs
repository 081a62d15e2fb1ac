use std::collections::{BTreeSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempcoal::game::{expand, ExpandedCgm};
use tempcoal::random::{random_model, ModelShape};
use tempcoal::semantics::{EvalContext, EvalOptions};
use tempcoal::sptc::{
    coalition_overlay, coalitions, context_ability, enables, enforces, overlay_nodes, partitions, wellformed,
    CoalitionStructure, Decision, Sptc, SptcSpace,
};
use tempcoal::{parse, Cgm, Coalition, Formula};

fn opts() -> EvalOptions {
    EvalOptions { stem_bound: 3, loop_bound: 2, ..EvalOptions::default() }
}

/// A context holding every outcome of `profiles`, so overlays can be swapped in.
fn shared(ex: &ExpandedCgm, profiles: &[Sptc]) -> EvalContext {
    EvalContext::from_expansion(ex.clone(), profiles.iter().map(|s| s.outcome(ex)).collect(), opts())
}

fn with(ctx: &EvalContext, ex: &ExpandedCgm, s: &Sptc) -> EvalContext {
    ctx.with_overlays(coalition_overlay(ex, s, "s").unwrap())
}

fn all_profiles(ex: &ExpandedCgm) -> Vec<Sptc> {
    let space = SptcSpace::new(ex, 5000, 0);
    assert!(space.exhaustive());
    space.iter().map(|(_, s)| s).collect()
}

fn two_by_two() -> Cgm {
    Cgm::parse(
        "states: a b\ninit: a\nplayers: 2\nactions 1: x y\nactions 2: u v\n\
         trans: a (x,u) -> a\ntrans: a (x,v) -> b\ntrans: a (y,u) -> b\ntrans: a (y,v) -> a\n\
         trans: b (x,*) -> a\ntrans: b (y,*) -> b\nlabel b: p\n",
        "m",
    )
    .unwrap()
}

#[test]
fn single_player_marks_the_chosen_child() {
    let m = Cgm::parse(
        "states: a b\ninit: a\nplayers: 1\nactions 1: x y\ntrans: a (x) -> b\ntrans: a (y) -> a\ntrans: b (*) -> a\n",
        "m",
    )
    .unwrap();
    let ex = expand(&m).unwrap();
    for s in all_profiles(&ex) {
        let nodes = &overlay_nodes(&ex, &s, 3)[&Coalition::new([1])];
        let mut expected = BTreeSet::new();
        let mut frontier = vec![vec![ex.model.init()]];
        while let Some(h) = frontier.pop() {
            if h.len() > 3 {
                continue;
            }
            for j in 0..2 {
                let mut g = h.clone();
                g.push(ex.model.succ(*h.last().unwrap(), j));
                if j == s.decision(&h).joint {
                    expected.insert(g.clone());
                }
                frontier.push(g);
            }
        }
        assert_eq!(nodes, &expected);
    }
}

#[test]
fn absent_blocks_mark_nothing_and_blocks_stay_disjoint() {
    let ex = expand(&two_by_two()).unwrap();
    let space = SptcSpace::new(&ex, 300, 1);
    for (_, s) in space.iter() {
        let nodes = overlay_nodes(&ex, &s, 2);
        let used: BTreeSet<&Coalition> = s.state_decisions().iter().flat_map(|d| d.structure.blocks()).collect();
        for (g, set) in &nodes {
            if !used.contains(g) {
                assert!(set.is_empty());
            }
        }
        let all: BTreeSet<&Vec<usize>> = nodes.values().flatten().collect();
        for v in all {
            let marked: Vec<&Coalition> = nodes.iter().filter(|(_, set)| set.contains(v)).map(|(g, _)| g).collect();
            for (a, b) in marked.iter().zip(marked.iter().skip(1)) {
                assert!(!a.intersects(b));
            }
        }
    }
}

#[test]
fn enumerated_profiles_are_wellformed() {
    let ex = expand(&two_by_two()).unwrap();
    let space = SptcSpace::new(&ex, 150, 2);
    let profiles: Vec<Sptc> = space.iter().map(|(_, s)| s).collect();
    let ctx = shared(&ex, &profiles);
    for s in &profiles {
        assert!(wellformed(&with(&ctx, &ex, s), "s", 2).unwrap());
    }
}

#[test]
fn two_decisions_for_one_block_are_rejected() {
    let ex = expand(&two_by_two()).unwrap();
    let s = Sptc::constant(&ex, Decision { joint: 0, structure: CoalitionStructure::singletons(2) }).unwrap();
    let ctx = shared(&ex, std::slice::from_ref(&s));
    let mut overlays = coalition_overlay(&ex, &s, "s").unwrap();
    // Player 1's family now also holds the `y` successors of the root.
    let root = ex.model.init();
    let n = ex.model.num_states();
    let mut grown = vec![vec![false; n]; n];
    for j in 0..ex.model.joint_count() {
        grown[root][ex.model.succ(root, j)] = true;
    }
    overlays[0].1 = tempcoal::semantics::HistoryProp::LastTwo(grown);
    assert!(!wellformed(&ctx.with_overlays(overlays), "s", 1).unwrap());
}

#[test]
fn enabling_implies_enforcing() {
    let ex = expand(&two_by_two()).unwrap();
    let profiles: Vec<Sptc> = SptcSpace::new(&ex, 200, 3).iter().map(|(_, s)| s).collect();
    let ctx = shared(&ex, &profiles);
    let goals: Vec<Formula> = ["F p", "G !p", "X X p", "p U !p"].iter().map(|t| parse(t, 2).unwrap()).collect();
    for s in &profiles {
        let c = with(&ctx, &ex, s);
        assert!(enforces(&c, "s", &Formula::True).unwrap());
        for g in &goals {
            for i in 1..=2 {
                if enables(&c, "s", i, g).unwrap() {
                    assert!(enforces(&c, "s", g).unwrap());
                }
            }
            let both = Formula::and(g.clone(), goals[0].clone());
            if enforces(&c, "s", g).unwrap() && enforces(&c, "s", &goals[0]).unwrap() {
                assert!(enforces(&c, "s", &both).unwrap());
            }
        }
    }
}

#[test]
fn single_player_enables_iff_enforces() {
    let m = Cgm::parse(
        "states: a b c\ninit: a\nplayers: 1\nactions 1: x y\ntrans: a (x) -> b\ntrans: a (y) -> c\n\
         trans: b (*) -> b\ntrans: c (x) -> a\ntrans: c (y) -> c\nlabel b: p\n",
        "m",
    )
    .unwrap();
    let ex = expand(&m).unwrap();
    let profiles = all_profiles(&ex);
    let ctx = shared(&ex, &profiles);
    let goals: Vec<Formula> = ["F p", "G !p", "X !p"].iter().map(|t| parse(t, 1).unwrap()).collect();
    for s in &profiles {
        let c = with(&ctx, &ex, s);
        for g in &goals {
            assert_eq!(enables(&c, "s", 1, g).unwrap(), enforces(&c, "s", g).unwrap());
        }
    }
}

#[test]
fn opponent_controlled_goal_needs_an_alliance() {
    let text = |second: &str| {
        format!(
            "states: a b c\ninit: a\nplayers: 2\nactions 1: x\nactions 2: u v\ntrans: a (x,u) -> b\n\
             trans: a (x,v) -> {second}\ntrans: b (*,*) -> b\ntrans: c (*,*) -> c\nlabel b: p\n"
        )
    };
    let fp = parse("F p", 2).unwrap();
    for (second, expect) in [("c", false), ("b", true)] {
        let ex = expand(&Cgm::parse(&text(second), "m").unwrap()).unwrap();
        let profiles = all_profiles(&ex);
        let ctx = shared(&ex, &profiles);
        for s in &profiles {
            // Allied with player 2, player 1's block also fixes 2's reply.
            let d = &s.state_decisions()[ex.model.init()];
            let allied = d.structure.block_of(1).unwrap().len() == 2 && ex.model.decode(d.joint)[1] == 0;
            assert_eq!(enables(&with(&ctx, &ex, s), "s", 1, &fp).unwrap(), expect || allied);
        }
    }
}

/// Player 1 can reach `p` once player 2 always plays `k2`.
fn reachable_pruned(m: &Cgm, k2: usize) -> bool {
    let mut seen = vec![false; m.num_states()];
    let mut queue = VecDeque::from([m.init()]);
    seen[m.init()] = true;
    while let Some(w) = queue.pop_front() {
        if m.holds(w, "p") {
            return true;
        }
        for a in 0..m.actions(1).len() {
            let v = m.succ(w, m.encode(&[a, k2]));
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}

#[test]
fn pinned_context_matches_pruned_reachability() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shape = ModelShape { max_states: 3, max_players: 2, max_actions: 2, props: vec!["p".into()] };
    let fp = parse("F p", 2).unwrap();
    let mut tried = 0;
    while tried < 12 {
        let m = random_model(&mut rng, &shape);
        if m.agents() != 2 {
            continue;
        }
        tried += 1;
        let ex = expand(&m).unwrap();
        for k2 in 0..m.actions(2).len() {
            let d = Decision { joint: m.encode(&[0, k2]), structure: CoalitionStructure::singletons(2) };
            let s = Sptc::constant(&ex, d).unwrap();
            let ctx = with(&shared(&ex, std::slice::from_ref(&s)), &ex, &s);
            let got = context_ability(&ctx, &Coalition::new([1]), &Coalition::new([2]), "s", &fp).unwrap();
            assert_eq!(got, reachable_pruned(&m, k2), "model\n{}", m.to_text());
        }
    }
}

#[test]
fn empty_coalition_context_is_universal() {
    let ex = expand(&two_by_two()).unwrap();
    let s = Sptc::constant(&ex, Decision { joint: 1, structure: CoalitionStructure::grand(2) }).unwrap();
    let ctx = with(&shared(&ex, std::slice::from_ref(&s)), &ex, &s);
    for t in ["F p", "G !p", "X p"] {
        let f = parse(t, 2).unwrap();
        let delta = Coalition::all(2);
        let direct = ctx
            .eval(&Formula::all_paths(Formula::implies(
                Formula::always(Formula::next(tempcoal::sptc::wellformed_formula(&delta, "s", 2))),
                f.clone(),
            )))
            .unwrap();
        assert_eq!(context_ability(&ctx, &Coalition::empty(), &delta, "s", &f).unwrap(), direct);
        assert_eq!(direct, enforces(&ctx, "s", &f).unwrap());
    }
}

#[test]
fn partitions_have_bell_counts() {
    assert_eq!([1, 2, 3, 4].map(|n| partitions(n).len()), [1, 2, 5, 15]);
    assert_eq!(coalitions(3).len(), 7);
}
