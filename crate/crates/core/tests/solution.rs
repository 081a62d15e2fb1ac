use tempcoal::game::expand;
use tempcoal::semantics::EvalOptions;
use tempcoal::shipped;
use tempcoal::solution::{Failure, Solver};
use tempcoal::sptc::{CoalitionStructure, Decision, Sptc, SptcSpace};
use tempcoal::{parse, Cgm, ObjectiveSystem};

fn opts(stem: usize, lp: usize) -> EvalOptions {
    EvalOptions { stem_bound: stem, loop_bound: lp, ..EvalOptions::default() }
}

#[test]
fn single_player_has_a_replayable_dominant_profile() {
    let (m, sys) = shipped::single().unwrap();
    let ex = expand(&m).unwrap();
    let space = SptcSpace::new(&ex, 1000, 0);
    assert!(space.exhaustive());
    let solver = Solver::new(&ex, sys, opts(3, 2), space, &[]).unwrap();
    let v = solver.exists_dominant().unwrap();
    assert!(v.holds && !v.sampled);
    let (_, r) = v.witness.clone().unwrap();
    for (_, s) in solver.profiles() {
        assert!(solver.dominance_d(s, &r).unwrap().holds);
    }
    assert!(solver.dominant_for_player(&r, 1).unwrap().holds);
    assert!(solver.generic_dominant_for_player(&r, 1).unwrap());
    // Exactly one profile is dominant.
    let count = solver.profiles().iter().filter(|(_, r)| solver.dominant_for_player(r, 1).unwrap().holds).count();
    assert_eq!(count, 1);
}

#[test]
fn incomparable_classes_leave_no_dominant_profile() {
    let (m, sys) = shipped::split().unwrap();
    let ex = expand(&m).unwrap();
    let solver = Solver::new(&ex, sys, opts(3, 2), SptcSpace::new(&ex, 1000, 0), &[]).unwrap();
    let v = solver.exists_dominant().unwrap();
    assert!(!v.holds && !v.sampled && v.witness.is_none());
    for (_, r) in solver.profiles() {
        assert!(!solver.dominant_for_player(r, 1).unwrap().holds);
    }
}

#[test]
fn single_action_model_trivially_has_one() {
    let m = Cgm::parse("states: a\ninit: a\nplayers: 1\nactions 1: x\ntrans: a (x) -> a\nprops: p\n", "m").unwrap();
    let sys = ObjectiveSystem::parse("player 1\nobj T: true\n", 1, "p").unwrap();
    let ex = expand(&m).unwrap();
    let solver = Solver::new(&ex, sys, opts(2, 1), SptcSpace::new(&ex, 10, 0), &[]).unwrap();
    assert_eq!(solver.profiles().len(), 1);
    assert!(solver.exists_dominant().unwrap().holds);
}

fn constant(ex: &tempcoal::ExpandedCgm, acts: &[usize], structure: CoalitionStructure) -> Sptc {
    Sptc::constant(ex, Decision { joint: ex.model.encode(acts), structure }).unwrap()
}

#[test]
fn latch_core_agrees_with_formula() {
    let (m, sys) = shipped::enemies2().unwrap();
    let ex = expand(&m).unwrap();
    let idle = constant(&ex, &[0, 0], CoalitionStructure::singletons(2));
    let kill = constant(&ex, &[1, 0], CoalitionStructure::singletons(2));
    let solver = Solver::new(&ex, sys.clone(), opts(2, 1), SptcSpace::new(&ex, 40, 5), &[&idle, &kill]).unwrap();
    let both = parse("G !p1 & G !p2", 2).unwrap();
    let v = solver.core_check(&idle, &both).unwrap();
    assert_eq!(v.holds, solver.generic_core(&idle, &both).unwrap());
    // Surviving while the enemy dies is ranked above mutual survival, so a
    // deviation that achieves it blocks the core whenever one is sampled.
    if let Some(Failure::Deviation { profile, .. }) = &v.failure {
        assert!(!solver.generic_core(&idle, &both).unwrap());
        let ctx = solver.pair_context(&idle, "r", profile, "s").unwrap();
        assert!(!ctx.eval(&tempcoal::solution::core_formula(&sys, &both, "r", "s")).unwrap());
    }
    let v = solver.core_check(&kill, &both).unwrap();
    assert!(!v.holds);
    assert!(matches!(v.failure, Some(Failure::NotEnforced { .. })));
    assert!(!solver.generic_core(&kill, &both).unwrap());
    // D agrees with its formula on every pair drawn from a few profiles.
    let some: Vec<Sptc> =
        solver.profiles().iter().take(3).map(|(_, s)| s.clone()).chain([idle.clone(), kill.clone()]).collect();
    for s in &some {
        for r in &some {
            assert_eq!(solver.dominance_d(s, r).unwrap().holds, solver.generic_d(s, r).unwrap());
        }
        assert!(solver.dominance_d(s, s).unwrap().holds);
    }
}

#[test]
fn dominance_is_invariant_under_relabelling() {
    let (m, sys) = shipped::enemies2().unwrap();
    let text = "at s00|*: (k1,i2) / {1}{2}\nat s01|*: (i1,i2) / {1,2}\nat s10|*: (i1,k2) / {1}{2}\nat s11|*: (i1,i2) / {1}{2}\n";
    let other = "at s00|*: (i1,i2) / {1}{2}\nat s01|*: (i1,i2) / {1}{2}\nat s10|*: (i1,i2) / {1}{2}\nat s11|*: (i1,i2) / {1}{2}\n";
    let verdict = |m: &Cgm| {
        let ex = expand(m).unwrap();
        let s = Sptc::parse(text, &ex, "s").unwrap();
        let r = Sptc::parse(other, &ex, "r").unwrap();
        let solver = Solver::new(&ex, sys.clone(), opts(2, 1), SptcSpace::new(&ex, 1, 0), &[&s, &r]).unwrap();
        (solver.dominance_d(&s, &r).unwrap().holds, solver.dominance_d(&r, &s).unwrap().holds)
    };
    assert_eq!(verdict(&m), verdict(&m.permute_states(&[3, 1, 0, 2])));
}
