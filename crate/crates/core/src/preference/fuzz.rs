//! Randomized search for small extended models falsifying a formula.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::formula::{Coalition, Formula, PrefKind};
use crate::game::Cgm;
use crate::preference::axioms::{axiom_instance, partition, AxiomKind, Slots};
use crate::preference::{validate_in_place, ObjectiveSystem};
use crate::random::{random_model, random_objectives, random_pltl, ModelShape, Tense};
use crate::semantics::{EvalContext, EvalOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzOptions {
    pub trials: usize,
    pub seed: u64,
    pub shape: ModelShape,
    /// Depth of generated operands.
    pub operand_depth: usize,
    /// Depth of the formulas defining objectives.
    pub objective_depth: usize,
    /// Longest history checked.
    pub max_history: usize,
    pub stem_bound: usize,
    pub loop_bound: usize,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        FuzzOptions {
            trials: 1000,
            seed: 0,
            shape: ModelShape::default(),
            operand_depth: 4,
            objective_depth: 2,
            max_history: 3,
            stem_bound: 3,
            loop_bound: 2,
        }
    }
}

/// A falsifying configuration.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub trial: usize,
    pub model: Cgm,
    pub objectives: ObjectiveSystem,
    pub history: Vec<usize>,
    pub formula: Formula,
}

impl Countermodel {
    pub fn history_names(&self) -> Vec<String> {
        self.history.iter().map(|&w| self.model.state_name(w).to_string()).collect()
    }

    /// Model, objectives, history and instance in the loader formats.
    pub fn dump(&self) -> String {
        format!(
            "# trial {}\n# history: {}\n# formula: {}\n{}\n{}",
            self.trial,
            self.history_names().join(" "),
            self.formula,
            self.model.to_text(),
            self.objectives.to_text()
        )
    }
}

#[derive(Clone, Debug)]
pub struct FuzzReport {
    pub trials_run: usize,
    /// Trials whose slots did not fit the axiom's side conditions.
    pub skipped: usize,
    pub countermodel: Option<Countermodel>,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// A random model with a validated random objective system.
fn random_extended(rng: &mut ChaCha8Rng, opts: &FuzzOptions, min_agents: u32) -> Result<(EvalContext, ObjectiveSystem)> {
    let mut shape = opts.shape.clone();
    shape.max_players = shape.max_players.max(min_agents);
    let m = loop {
        let m = random_model(rng, &shape);
        if m.agents() >= min_agents {
            break m;
        }
    };
    let mut sys = random_objectives(rng, m.agents(), &shape.props, opts.objective_depth);
    let eo = EvalOptions { stem_bound: opts.stem_bound, loop_bound: opts.loop_bound, ..Default::default() };
    let ctx = EvalContext::new(m.clone(), eo);
    validate_in_place(&m, &mut sys, ctx.universe())?;
    Ok((ctx.with_objectives(sys.clone()), sys))
}

/// First history of length at most `max_history` where `f` is false.
fn falsify(ctx: &EvalContext, f: &Formula, max_history: usize) -> Result<Option<Vec<usize>>> {
    let hs = ctx.histories(max_history);
    let v = ctx.eval_at_all(&hs, f)?;
    Ok(hs.into_iter().zip(v).find(|(_, ok)| !ok).map(|(h, _)| h))
}

/// Searches random extended models for one falsifying `f` at some history.
pub fn find_countermodel(f: &Formula, opts: &FuzzOptions) -> Result<Option<Countermodel>> {
    let min_agents = f.players().into_iter().max().unwrap_or(1);
    for trial in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, trial);
        let (ctx, sys) = random_extended(&mut rng, opts, min_agents)?;
        if let Some(history) = falsify(&ctx, f, opts.max_history)? {
            let model = ctx.model().clone();
            return Ok(Some(Countermodel { trial, model, objectives: sys, history, formula: f.clone() }));
        }
    }
    Ok(None)
}

fn operand(rng: &mut ChaCha8Rng, props: &[String], depth: usize, tense: Tense) -> Formula {
    if rng.gen_bool(0.1) {
        Formula::False
    } else {
        random_pltl(rng, props, depth, tense)
    }
}

fn random_tuple(rng: &mut ChaCha8Rng, sys: &ObjectiveSystem, gamma: &Coalition) -> Vec<usize> {
    gamma.players().iter().map(|&i| rng.gen_range(0..sys.player(i).map_or(1, |p| p.len()))).collect()
}

/// Random slots fitting `kind`, or `None` when this draw cannot satisfy its
/// side conditions.
pub fn random_slots(
    rng: &mut ChaCha8Rng,
    kind: AxiomKind,
    sys: &ObjectiveSystem,
    opts: &FuzzOptions,
) -> Option<Slots> {
    let props = &opts.shape.props;
    let players: Vec<u32> = (1..=sys.agents).collect();
    let gamma = loop {
        let g: Vec<u32> = players.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !g.is_empty() {
            break Coalition::new(g);
        }
    };
    let sigma = *[PrefKind::Less, PrefKind::NotLess].choose(rng).unwrap();
    let (depth, tense) = match kind {
        AxiomKind::P8 => (opts.operand_depth.min(3), Tense::Future),
        _ => (opts.operand_depth, Tense::Both),
    };
    let formulas = (0..kind.arity()).map(|_| operand(rng, props, depth, tense)).collect();
    let mut slots = Slots::new(sigma, gamma.clone(), formulas);
    match kind {
        AxiomKind::O1 => slots.objectives = vec![random_tuple(rng, sys, &gamma)],
        AxiomKind::O3 => {
            let a = random_tuple(rng, sys, &gamma);
            let b = random_tuple(rng, sys, &gamma);
            let less: Vec<bool> =
                gamma.players().iter().enumerate().map(|(k, &i)| sys.player(i).unwrap().less(a[k], b[k])).collect();
            if less.iter().any(|&x| x) && less.iter().any(|&x| !x) {
                return None;
            }
            slots.objectives = vec![a, b];
        }
        AxiomKind::P7 => {
            let side = |rng: &mut ChaCha8Rng| {
                let rhos: Vec<Formula> =
                    (0..rng.gen_range(1..=2)).map(|_| random_pltl(rng, props, 3, Tense::Past)).collect();
                partition(&rhos)
                    .into_iter()
                    .map(|pi| (pi, operand(rng, props, 3, Tense::Future)))
                    .collect::<Vec<_>>()
            };
            let left = side(rng);
            let right = side(rng);
            slots = slots.with_separated(left, right);
        }
        _ => {}
    }
    Some(slots)
}

/// Checks random instances of `kind` on random extended models and stops at
/// the first falsified one.
pub fn fuzz_axiom(kind: AxiomKind, opts: &FuzzOptions) -> Result<FuzzReport> {
    let mut skipped = 0;
    for trial in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, trial);
        let (ctx, sys) = random_extended(&mut rng, opts, 1)?;
        let Some(slots) = random_slots(&mut rng, kind, &sys, opts) else {
            skipped += 1;
            continue;
        };
        let f = axiom_instance(kind, &slots, &sys)?;
        if let Some(history) = falsify(&ctx, &f, opts.max_history)? {
            let model = ctx.model().clone();
            let countermodel = Some(Countermodel { trial, model, objectives: sys, history, formula: f });
            return Ok(FuzzReport { trials_run: trial + 1, skipped, countermodel });
        }
    }
    Ok(FuzzReport { trials_run: opts.trials, skipped, countermodel: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(trials: usize) -> FuzzOptions {
        FuzzOptions { trials, seed: 11, ..Default::default() }
    }

    #[test]
    fn truth_has_no_countermodel() {
        assert!(find_countermodel(&Formula::True, &quick(20)).unwrap().is_none());
    }

    #[test]
    fn falsity_is_refuted_at_once() {
        let c = find_countermodel(&Formula::False, &quick(5)).unwrap().unwrap();
        assert_eq!(c.trial, 0);
        assert_eq!(c.history.len(), 1);
        assert!(c.dump().contains("states:"));
    }

    #[test]
    fn sound_axioms_survive_a_short_run() {
        for kind in [AxiomKind::P1, AxiomKind::P3, AxiomKind::P5, AxiomKind::O3] {
            let r = fuzz_axiom(kind, &quick(40)).unwrap();
            assert!(r.countermodel.is_none(), "{kind}: {}", r.countermodel.unwrap().dump());
        }
    }
}
