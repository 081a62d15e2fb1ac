use std::collections::BTreeSet;
use std::fmt;

use super::model::{Cgm, JointIdx};
use crate::error::{Error, Result};
use crate::formula::Coalition;

/// An ultimately periodic play `stem · cycle^ω`, with the lowest joint
/// action realizing each step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
    /// `stem_actions[k]` leads from position `k` to `k + 1`.
    pub stem_actions: Vec<JointIdx>,
    /// `cycle_actions[k]` leads from `cycle[k]` to the next cycle state.
    pub cycle_actions: Vec<JointIdx>,
}

impl Lasso {
    /// Builds a lasso from states, filling in the lowest realizing actions.
    pub fn from_states(m: &Cgm, stem: Vec<usize>, cycle: Vec<usize>) -> Result<Lasso> {
        if stem.is_empty() || cycle.is_empty() {
            return Err(Error::Model("lasso stem and cycle must be nonempty".into()));
        }
        let step = |a: usize, b: usize| {
            m.lowest_joint(a, b).ok_or_else(|| {
                Error::Model(format!("no transition {} -> {}", m.state_name(a), m.state_name(b)))
            })
        };
        let mut stem_actions = Vec::with_capacity(stem.len());
        for k in 0..stem.len() {
            let nxt = if k + 1 < stem.len() { stem[k + 1] } else { cycle[0] };
            stem_actions.push(step(stem[k], nxt)?);
        }
        let mut cycle_actions = Vec::with_capacity(cycle.len());
        for k in 0..cycle.len() {
            cycle_actions.push(step(cycle[k], cycle[(k + 1) % cycle.len()])?);
        }
        Ok(Lasso { stem, cycle, stem_actions, cycle_actions })
    }

    pub fn state_at(&self, k: usize) -> usize {
        if k < self.stem.len() {
            self.stem[k]
        } else {
            self.cycle[(k - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn action_at(&self, k: usize) -> JointIdx {
        if k < self.stem.len() {
            self.stem_actions[k]
        } else {
            self.cycle_actions[(k - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<usize> {
        (0..len).map(|k| self.state_at(k)).collect()
    }

    pub fn has_prefix(&self, h: &[usize]) -> bool {
        h.iter().enumerate().all(|(k, &w)| self.state_at(k) == w)
    }

    /// Checks the recorded actions and the closing step against the model.
    pub fn validate(&self, m: &Cgm) -> bool {
        !self.stem.is_empty()
            && !self.cycle.is_empty()
            && self.stem_actions.len() == self.stem.len()
            && self.cycle_actions.len() == self.cycle.len()
            && (0..self.stem.len() + self.cycle.len())
                .all(|k| m.succ(self.state_at(k), self.action_at(k)) == self.state_at(k + 1))
    }

    /// Primitive cycle, stem rolled back as far as possible while keeping
    /// at least the anchor state.
    pub fn canonical(&self, m: &Cgm) -> Lasso {
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|d| n.is_multiple_of(*d) && (0..n).all(|i| self.cycle[i] == self.cycle[i % d]))
            .unwrap_or(n);
        let mut stem = self.stem.clone();
        let mut cycle = self.cycle[..period].to_vec();
        while stem.len() > 1 && stem.last() == cycle.last() {
            stem.pop();
            cycle.rotate_right(1);
        }
        Lasso::from_states(m, stem, cycle).expect("canonical form of a valid lasso")
    }

    pub fn display(&self, m: &Cgm) -> String {
        let names = |v: &[usize]| v.iter().map(|&w| m.state_name(w)).collect::<Vec<_>>().join(" ");
        format!("{} ({})^w", names(&self.stem), names(&self.cycle))
    }
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |x: &[usize]| x.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{} ({})^w", v(&self.stem), v(&self.cycle))
    }
}

/// Every lasso from the initial state with `|stem| <= stem_bound` and
/// `|cycle| <= loop_bound`, as state sequences, each exactly once. Order:
/// stem length, cycle length, then lexicographic.
pub fn lassos(m: &Cgm, stem_bound: usize, loop_bound: usize) -> Vec<Lasso> {
    lassos_from(m, &[m.init()], stem_bound, loop_bound)
}

/// Like [`lassos`] but with stems extending the given history.
pub fn lassos_from(m: &Cgm, history: &[usize], stem_bound: usize, loop_bound: usize) -> Vec<Lasso> {
    let mut out = Vec::new();
    if history.is_empty() {
        return out;
    }
    for s in history.len()..=stem_bound.max(history.len()) {
        let mut stems = Vec::new();
        extend_paths(m, history.to_vec(), s, &mut stems);
        for l in 1..=loop_bound {
            for stem in &stems {
                let mut loops = Vec::new();
                for &first in &m.successors(*stem.last().unwrap()) {
                    extend_paths(m, vec![first], l, &mut loops);
                }
                for cyc in loops {
                    if m.successors(*cyc.last().unwrap()).contains(&cyc[0]) {
                        out.push(Lasso::from_states(m, stem.clone(), cyc).unwrap());
                    }
                }
            }
        }
    }
    out
}

fn extend_paths(m: &Cgm, prefix: Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == len {
        out.push(prefix);
        return;
    }
    for v in m.successors(*prefix.last().unwrap()) {
        let mut p = prefix.clone();
        p.push(v);
        extend_paths(m, p, len, out);
    }
}

/// Distinct plays (canonical forms) within the bounds.
pub fn distinct_plays(m: &Cgm, stem_bound: usize, loop_bound: usize) -> Vec<Lasso> {
    let set: BTreeSet<Lasso> =
        lassos(m, stem_bound, loop_bound).iter().map(|l| l.canonical(m)).collect();
    set.into_iter().collect()
}

/// A memoryless strategy for a coalition: per state, one action per member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemorylessStrategy {
    pub coalition: Coalition,
    /// `choice[w][k]` is the action of the k-th member of the coalition.
    pub choice: Vec<Vec<usize>>,
}

impl MemorylessStrategy {
    pub fn partial(&self, m: &Cgm, w: usize) -> Vec<Option<usize>> {
        let mut p = vec![None; m.agents() as usize];
        for (k, &i) in self.coalition.players().iter().enumerate() {
            p[i as usize - 1] = Some(self.choice[w][k]);
        }
        p
    }
}

/// Plays within bounds that extend `history` and follow `strategy` from the
/// last history state on; outsiders are unconstrained.
pub fn outcome_set(
    m: &Cgm,
    history: &[usize],
    strategy: &MemorylessStrategy,
    stem_bound: usize,
    loop_bound: usize,
) -> Vec<Lasso> {
    let set: BTreeSet<Lasso> = lassos_from(m, history, stem_bound, loop_bound)
        .into_iter()
        .map(|l| l.canonical(m))
        .filter(|l| follows(m, l, history.len() - 1, strategy))
        .collect();
    set.into_iter().collect()
}

/// Whether every step of `l` from position `from` is allowed by the strategy.
pub fn follows(m: &Cgm, l: &Lasso, from: usize, strategy: &MemorylessStrategy) -> bool {
    let end = from.max(l.stem.len()) + l.cycle.len();
    (from..end).all(|k| {
        let w = l.state_at(k);
        m.step_allows(w, l.state_at(k + 1), &strategy.partial(m, w))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle2() -> Cgm {
        Cgm::parse(
            "states: a b\ninit: a\nplayers: 1\nactions 1: go\ntrans: a (go) -> b\ntrans: b (go) -> a\n",
            "c",
        )
        .unwrap()
    }

    #[test]
    fn counts() {
        let one = Cgm::parse("states: a\ninit: a\nplayers: 1\nactions 1: x\ntrans: a (x) -> a\n", "o")
            .unwrap();
        assert_eq!(lassos(&one, 1, 1).len(), 1);
        let c = cycle2();
        let ls = lassos(&c, 2, 2);
        assert_eq!(ls.len(), 2);
        assert!(ls.iter().all(|l| l.validate(&c)));
        assert_eq!(distinct_plays(&c, 2, 2).len(), 1);
    }

    #[test]
    fn bounds_are_monotone() {
        let m = Cgm::parse(
            "states: a b c\ninit: a\nplayers: 1\nactions 1: x y\ntrans: a (x) -> b\ntrans: a (y) -> c\n\
             trans: b (x) -> a\ntrans: b (y) -> b\ntrans: c (*) -> c\n",
            "m",
        )
        .unwrap();
        for (s, l) in [(1, 1), (2, 1), (2, 2), (3, 3)] {
            let small: BTreeSet<Lasso> = lassos(&m, s, l).into_iter().collect();
            let big: BTreeSet<Lasso> = lassos(&m, s + 1, l + 1).into_iter().collect();
            assert!(small.is_subset(&big));
            assert_eq!(small.len(), lassos(&m, s, l).len(), "no duplicates");
        }
    }

    #[test]
    fn outcome_branching_matches_opponent_actions() {
        let m = Cgm::parse(
            "states: s0 same diff\ninit: s0\nplayers: 2\nactions 1: h t\nactions 2: H T\n\
             trans: * (*,*) -> diff\ntrans: * (h,H) -> same\ntrans: * (t,T) -> same\n",
            "p",
        )
        .unwrap();
        let all = MemorylessStrategy { coalition: Coalition::empty(), choice: vec![vec![]; 3] };
        let everything = outcome_set(&m, &[0], &all, 3, 1);
        assert_eq!(everything, distinct_plays(&m, 3, 1));
        let heads = MemorylessStrategy { coalition: Coalition::new([1]), choice: vec![vec![0]; 3] };
        let out = outcome_set(&m, &[0], &heads, 3, 1);
        // Player 2 picks one of two successors at each of the two free steps.
        let brute = distinct_plays(&m, 3, 1)
            .into_iter()
            .filter(|l| (0..4).all(|k| m.step_allows(l.state_at(k), l.state_at(k + 1), &[Some(0), None])))
            .count();
        assert_eq!(out.len(), brute);
        let both =
            MemorylessStrategy { coalition: Coalition::all(2), choice: vec![vec![0, 1]; 3] };
        assert_eq!(outcome_set(&m, &[0], &both, 3, 1).len(), 1);
    }
}
