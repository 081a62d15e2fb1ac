//! Core membership and dominance with temporary coalitions, decided by
//! enumerating profiles.
//!
//! Every check runs on one shared context: `M̄` with a bounded universe that
//! also holds the outcome of every enumerated profile. The direct checkers
//! read markings off the universe plays; the `generic_*` methods evaluate
//! the same conditions as formulas.

mod formulas;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Coalition, Formula, Player};
use crate::game::{ExpandedCgm, Lasso};
use crate::preference::ObjectiveSystem;
use crate::semantics::path::eval_pltl;
use crate::semantics::{EvalContext, EvalOptions};
use crate::sptc::{coalition_overlay, coalitions, marks_step, Decision, Sptc, SptcSpace};

pub use formulas::{agreement_formula, class_tuples, core_formula, d_formula, dominant_formula, tuple_formula};

/// Why a check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// The candidate does not enforce `θ*`: one of its consistent plays
    /// violates it.
    NotEnforced { play: Lasso },
    /// The alternative enforces a class tuple that `player` does not rank
    /// below `θ*`.
    Deviation { index: u128, profile: Sptc, tuple: Vec<usize>, player: Player },
    /// The alternative differs and secures a class with nothing better
    /// secured by the candidate; `player` is `None` for the all-player check.
    NotDominated { index: u128, profile: Sptc, player: Option<Player>, classes: Vec<usize> },
}

impl Failure {
    pub fn describe(&self, ex: &ExpandedCgm, sys: &ObjectiveSystem) -> String {
        let names = |t: &[usize]| {
            t.iter().enumerate().map(|(k, &c)| sys.players()[k].names[c].clone()).collect::<Vec<_>>().join(",")
        };
        match self {
            Failure::NotEnforced { play } => {
                format!("condition (a): consistent play {} violates the target", play.display(&ex.model))
            }
            Failure::Deviation { index, tuple, player, .. } => format!(
                "condition (b): alternative #{index} enforces ({}) which player {player} does not rank below the target",
                names(tuple)
            ),
            Failure::NotDominated { index, player, classes, .. } => {
                let who = player.map_or("every player".to_string(), |i| format!("player {i}"));
                let what = match player {
                    Some(i) => sys.players()[*i as usize - 1].names[classes[0]].clone(),
                    None => names(classes),
                };
                format!("alternative #{index} secures {what} for {who} with nothing better secured by the candidate")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// No premise of the checked implications was ever met.
    pub vacuous: bool,
    /// The profile space was sampled rather than exhausted.
    pub sampled: bool,
    pub checked: usize,
    pub qualifiers: Vec<String>,
    pub failure: Option<Failure>,
    pub witness: Option<(u128, Sptc)>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.holds)?;
        if self.vacuous {
            write!(f, " (vacuous)")?;
        }
        if self.sampled && !self.holds && self.failure.is_none() {
            write!(f, " (sampled, inconclusive negative)")?;
        }
        write!(f, " [{}]", self.qualifiers.join("; "))
    }
}

/// The enumerated profiles together with the context they are judged in.
pub struct Solver<'a> {
    ex: &'a ExpandedCgm,
    sys: ObjectiveSystem,
    space: SptcSpace<'a>,
    profiles: Vec<(u128, Sptc)>,
    base: EvalContext,
    /// Class tuple of every universe play.
    tuples: Vec<Vec<usize>>,
}

/// Distinct classes of one player: which objectives some play realizes.
type ClassSet = BTreeSet<usize>;

impl<'a> Solver<'a> {
    /// `extra` are profiles judged besides the enumerated ones (a candidate
    /// read from a file, say); their outcomes join the universe too.
    pub fn new(
        ex: &'a ExpandedCgm,
        sys: ObjectiveSystem,
        opts: EvalOptions,
        space: SptcSpace<'a>,
        extra: &[&Sptc],
    ) -> Result<Self> {
        if sys.agents != ex.model.agents() {
            return Err(Error::Objectives(format!(
                "objectives for {} players on a {}-player model",
                sys.agents,
                ex.model.agents()
            )));
        }
        let profiles: Vec<(u128, Sptc)> = space.iter().collect();
        let outcomes =
            profiles.iter().map(|(_, s)| s.outcome(ex)).chain(extra.iter().map(|s| s.outcome(ex))).collect();
        let base = EvalContext::from_expansion(ex.clone(), outcomes, opts).with_objectives(sys.clone());
        let mut tuples = Vec::with_capacity(base.universe().len());
        for l in base.universe().plays() {
            tuples.push((1..=sys.agents).map(|i| base.class_of(i, l)).collect::<Result<Vec<_>>>()?);
        }
        Ok(Solver { ex, sys, space, profiles, base, tuples })
    }

    pub fn profiles(&self) -> &[(u128, Sptc)] {
        &self.profiles
    }

    pub fn context(&self) -> &EvalContext {
        &self.base
    }

    pub fn objectives(&self) -> &ObjectiveSystem {
        &self.sys
    }

    fn qualifiers(&self) -> Vec<String> {
        let o = self.base.options();
        let mut q = vec![
            format!("plays bounded by stem {} loop {}", o.stem_bound, o.loop_bound),
            format!("universe of {} plays", self.base.universe().len()),
        ];
        match (self.space.exhaustive(), self.space.size()) {
            (true, _) => q.push(format!("exhaustive over {} memoryless profiles", self.profiles.len())),
            (false, Some(n)) => q.push(format!(
                "sampled {} of {n} profiles (cap {}, seed {})",
                self.profiles.len(),
                self.space.cap(),
                self.space.seed()
            )),
            (false, None) => q.push(format!(
                "sampled {} profiles (cap {}, seed {})",
                self.profiles.len(),
                self.space.cap(),
                self.space.seed()
            )),
        }
        q
    }

    fn verdict(&self, holds: bool, vacuous: bool, failure: Option<Failure>) -> Verdict {
        Verdict {
            holds,
            vacuous,
            sampled: !self.space.exhaustive(),
            checked: self.profiles.len(),
            qualifiers: self.qualifiers(),
            failure,
            witness: None,
        }
    }

    fn require_outcome(&self, s: &Sptc) -> Result<()> {
        if self.base.universe().index_of(&s.outcome(self.ex)).is_none() {
            return Err(Error::Profile("the profile's outcome is not in the universe; pass it as extra".into()));
        }
        Ok(())
    }

    fn plays(&self) -> &[Lasso] {
        self.base.universe().plays()
    }

    /// Steps `k -> k+1` to inspect so that every marking along `l` is seen.
    fn horizon(l: &Lasso, s: &Sptc) -> usize {
        l.stem.len() + l.cycle.len() + s.memory_depth()
    }

    fn decision_at<'s>(s: &'s Sptc, l: &Lasso, k: usize) -> &'s Decision {
        if s.is_memoryless() {
            &s.state_decisions()[l.state_at(k)]
        } else {
            s.decision(&l.prefix(k + 1))
        }
    }

    fn marked(&self, s: &Sptc, l: &Lasso, k: usize, gamma: &Coalition) -> bool {
        marks_step(self.ex, Self::decision_at(s, l, k), gamma, l.state_at(k), l.state_at(k + 1))
    }

    /// Plays on which every step is the profile's full decision.
    fn consistent(&self, s: &Sptc) -> Vec<usize> {
        let m = &self.ex.model;
        (0..self.plays().len())
            .filter(|&p| {
                let l = &self.plays()[p];
                (0..Self::horizon(l, s))
                    .all(|k| m.succ(l.state_at(k), Self::decision_at(s, l, k).joint) == l.state_at(k + 1))
            })
            .collect()
    }

    /// Plays on which every step follows the block of `i`.
    fn following(&self, s: &Sptc, i: Player) -> Vec<usize> {
        (0..self.plays().len())
            .filter(|&p| {
                let l = &self.plays()[p];
                (0..Self::horizon(l, s)).all(|k| {
                    let d = Self::decision_at(s, l, k);
                    d.structure.block_of(i).is_some_and(|b| {
                        marks_step(self.ex, d, b, l.state_at(k), l.state_at(k + 1))
                    })
                })
            })
            .collect()
    }

    /// Objectives of `i` that `s` enables `i` to achieve.
    fn enabled(&self, s: &Sptc, i: Player) -> ClassSet {
        let plays = self.following(s, i);
        let classes: ClassSet = plays.iter().map(|&p| self.tuples[p][i as usize - 1]).collect();
        match classes.len() {
            0 => (0..self.sys.players()[i as usize - 1].len()).collect(),
            1 => classes,
            _ => ClassSet::new(),
        }
    }

    /// Class tuples that `s` enforces.
    fn enforced(&self, s: &Sptc) -> Vec<Vec<usize>> {
        let tuples: BTreeSet<&Vec<usize>> = self.consistent(s).iter().map(|&p| &self.tuples[p]).collect();
        match tuples.len() {
            0 => class_tuples(&self.sys),
            1 => tuples.into_iter().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// The plays agree on every `Γ` accepted by `keep`.
    fn agree(&self, s: &Sptc, r: &Sptc, keep: impl Fn(&Coalition) -> bool) -> bool {
        let gs: Vec<Coalition> = coalitions(self.sys.agents).into_iter().filter(|g| keep(g)).collect();
        self.plays().iter().all(|l| {
            let n = l.stem.len() + l.cycle.len() + s.memory_depth().max(r.memory_depth());
            (0..n).all(|k| gs.iter().all(|g| self.marked(s, l, k, g) == self.marked(r, l, k, g)))
        })
    }

    /// Classes of `i` realized by the universe plays.
    fn realized(&self, i: Player) -> ClassSet {
        self.tuples.iter().map(|t| t[i as usize - 1]).collect()
    }

    /// `lt(i, [θa], [θb])` at the root for objectives of `i`.
    fn ranked(&self, i: Player, a: usize, b: usize, realized: &ClassSet) -> bool {
        !realized.contains(&a) || !realized.contains(&b) || self.sys.players()[i as usize - 1].less(a, b)
    }

    fn check_target(&self, theta: &Formula) -> Result<Vec<bool>> {
        if !theta.is_pltl() {
            return Err(Error::NonPltlOperand(theta.to_string()));
        }
        self.plays().iter().map(|l| eval_pltl(&self.ex.model, l, 0, theta)).collect()
    }

    /// Whether `r` is in the core for the target `θ*`.
    pub fn core_check(&self, r: &Sptc, theta_star: &Formula) -> Result<Verdict> {
        self.require_outcome(r)?;
        let star = self.check_target(theta_star)?;
        let mut v = self.verdict(true, false, None);
        let hit: BTreeSet<&Vec<usize>> = (0..star.len()).filter(|&p| star[p]).map(|p| &self.tuples[p]).collect();
        let union = (0..star.len()).all(|p| star[p] == hit.contains(&self.tuples[p]));
        v.qualifiers.push(match (hit.len(), union) {
            (1, true) => "target is a single class tuple".to_string(),
            (n, true) => format!("target is a union of {n} class tuples"),
            (_, false) => "target is not a union of class tuples".to_string(),
        });
        if let Some(&p) = self.consistent(r).iter().find(|&&p| !star[p]) {
            v.holds = false;
            v.failure = Some(Failure::NotEnforced { play: self.plays()[p].clone() });
            return Ok(v);
        }
        let mut premise_met = false;
        let mut memo: Vec<(Vec<usize>, Option<Player>)> = Vec::new();
        for (index, s) in &self.profiles {
            for t in self.enforced(s) {
                premise_met = true;
                let bad = match memo.iter().find(|(u, _)| *u == t) {
                    Some((_, b)) => *b,
                    None => {
                        let b = self.core_blocker(&t, &star);
                        memo.push((t.clone(), b));
                        b
                    }
                };
                if let Some(player) = bad {
                    v.holds = false;
                    v.failure = Some(Failure::Deviation { index: *index, profile: s.clone(), tuple: t, player });
                    return Ok(v);
                }
            }
        }
        v.vacuous = !premise_met;
        Ok(v)
    }

    /// First player for whom `[θ∘ ∧ ¬θ*] < [θ*]` fails.
    fn core_blocker(&self, t: &[usize], star: &[bool]) -> Option<Player> {
        (1..=self.sys.agents).find(|&i| {
            let k = i as usize - 1;
            let po = &self.sys.players()[k];
            let lo: ClassSet =
                (0..star.len()).filter(|&p| !star[p] && self.tuples[p] == t).map(|p| self.tuples[p][k]).collect();
            let hi: ClassSet = (0..star.len()).filter(|&p| star[p]).map(|p| self.tuples[p][k]).collect();
            !lo.iter().all(|&a| hi.iter().all(|&b| po.less(a, b)))
        })
    }

    /// Whether `r` is dominant for player `i`.
    pub fn dominant_for_player(&self, r: &Sptc, i: Player) -> Result<Verdict> {
        self.check_player(i)?;
        let realized = self.realized(i);
        let by_r = self.enabled(r, i);
        let mut premise_met = false;
        for (index, s) in &self.profiles {
            if self.agree(s, r, |g| g.contains(i)) {
                continue;
            }
            for a in self.enabled(s, i) {
                premise_met = true;
                if !by_r.iter().any(|&b| self.ranked(i, a, b, &realized)) {
                    let failure =
                        Failure::NotDominated { index: *index, profile: s.clone(), player: Some(i), classes: vec![a] };
                    return Ok(self.verdict(false, false, Some(failure)));
                }
            }
        }
        Ok(self.verdict(true, !premise_met, None))
    }

    fn check_player(&self, i: Player) -> Result<()> {
        if i == 0 || i > self.sys.agents {
            return Err(Error::UnknownPlayer { player: i, agents: self.sys.agents });
        }
        Ok(())
    }

    /// `D(s, r)`; the result's failure, if any, names `s` with index 0.
    pub fn dominance_d(&self, s: &Sptc, r: &Sptc) -> Result<Verdict> {
        let (holds, vacuous, classes) = self.d_holds(s, r);
        let failure = classes
            .map(|classes| Failure::NotDominated { index: 0, profile: s.clone(), player: None, classes });
        let mut v = self.verdict(holds, vacuous, failure);
        v.sampled = false;
        v.checked = 1;
        Ok(v)
    }

    /// Truth of `D(s, r)`, whether it held vacuously, and a failing vector.
    fn d_holds(&self, s: &Sptc, r: &Sptc) -> (bool, bool, Option<Vec<usize>>) {
        self.d_holds_with(s, r, &self.secured(r))
    }

    fn secured(&self, r: &Sptc) -> Vec<ClassSet> {
        (1..=self.sys.agents).map(|i| self.enabled(r, i)).collect()
    }

    fn d_holds_with(&self, s: &Sptc, r: &Sptc, by_r: &[ClassSet]) -> (bool, bool, Option<Vec<usize>>) {
        if self.agree(s, r, |_| true) {
            return (true, false, None);
        }
        let by_s = self.secured(s);
        if by_s.iter().any(BTreeSet::is_empty) {
            return (true, true, None);
        }
        // Components are independent: each secured class of `s` needs a
        // better class secured by `r` for the same player.
        for (k, classes) in by_s.iter().enumerate() {
            let i = k as Player + 1;
            let realized = self.realized(i);
            if let Some(&a) = classes.iter().find(|&&a| !by_r[k].iter().any(|&b| self.ranked(i, a, b, &realized))) {
                let mut vector: Vec<usize> = by_s.iter().map(|c| *c.iter().next().unwrap()).collect();
                vector[k] = a;
                return (false, false, Some(vector));
            }
        }
        (true, false, None)
    }

    /// `D(s, r)` against every enumerated `s`.
    pub fn dominant(&self, r: &Sptc) -> Result<Verdict> {
        self.require_outcome(r)?;
        let by_r = self.secured(r);
        let mut vacuous = true;
        for (index, s) in &self.profiles {
            let (holds, vac, classes) = self.d_holds_with(s, r, &by_r);
            if let (false, Some(classes)) = (holds, classes) {
                let failure = Failure::NotDominated { index: *index, profile: s.clone(), player: None, classes };
                return Ok(self.verdict(false, false, Some(failure)));
            }
            vacuous &= vac;
        }
        Ok(self.verdict(true, vacuous, None))
    }

    /// Searches the enumerated profiles for one that satisfies `D(s, r)`
    /// against every enumerated `s`.
    pub fn exists_dominant(&self) -> Result<Verdict> {
        for (index, r) in &self.profiles {
            let by_r = self.secured(r);
            if self.profiles.iter().all(|(_, s)| self.d_holds_with(s, r, &by_r).0) {
                let mut v = self.verdict(true, false, None);
                v.witness = Some((*index, r.clone()));
                return Ok(v);
            }
        }
        Ok(self.verdict(false, false, None))
    }

    /// A context with the overlays of both profiles, sharing the universe.
    pub fn pair_context(&self, r: &Sptc, r_family: &str, s: &Sptc, s_family: &str) -> Result<EvalContext> {
        let mut overlays = coalition_overlay(self.ex, r, r_family)?;
        overlays.extend(coalition_overlay(self.ex, s, s_family)?);
        Ok(self.base.with_overlays(overlays))
    }

    /// [`Self::core_check`] by evaluating the core formula against every
    /// enumerated alternative.
    pub fn generic_core(&self, r: &Sptc, theta_star: &Formula) -> Result<bool> {
        self.require_outcome(r)?;
        let f = core_formula(&self.sys, theta_star, "r", "s");
        for (_, s) in &self.profiles {
            if !self.pair_context(r, "r", s, "s")?.eval(&f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn generic_dominant_for_player(&self, r: &Sptc, i: Player) -> Result<bool> {
        self.check_player(i)?;
        let f = dominant_formula(&self.sys, i, "s", "r");
        for (_, s) in &self.profiles {
            if !self.pair_context(r, "r", s, "s")?.eval(&f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn generic_d(&self, s: &Sptc, r: &Sptc) -> Result<bool> {
        self.pair_context(r, "r", s, "s")?.eval(&d_formula(&self.sys, "s", "r"))
    }
}
