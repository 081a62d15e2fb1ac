//! `<<G>> psi` by search over finite-memory strategies: a strategy maps the
//! last `memory` states to one action per coalition member.

use std::collections::BTreeMap;

use super::context::EvalContext;
use crate::error::{Error, Result};
use crate::formula::{Coalition, Formula};
use crate::game::Lasso;

type Window = Vec<usize>;

struct Constrained {
    good: bool,
    /// Per window, the bitmask of coalition choices the play agrees with.
    allowed: BTreeMap<Window, u64>,
}

impl EvalContext {
    /// Some strategy makes its consistent continuations nonempty and all
    /// satisfy `psi` at position `|h| - 1`.
    pub(crate) fn ability(&self, h: &[usize], gamma: &Coalition, psi: &Formula) -> Result<bool> {
        let m = &*self.model;
        let members = gamma.players();
        let radices: Vec<usize> = members.iter().map(|&i| m.actions(i).len()).collect();
        let choices: usize = radices.iter().product();
        if choices > 64 {
            return Err(Error::Budget { needed: choices, budget: 64 });
        }
        let full = if choices == 64 { u64::MAX } else { (1u64 << choices) - 1 };
        let partials: Vec<Vec<Option<usize>>> = (0..choices)
            .map(|mut t| {
                let mut p = vec![None; m.agents() as usize];
                for (k, &i) in members.iter().enumerate().rev() {
                    p[i as usize - 1] = Some(t % radices[k]);
                    t /= radices[k];
                }
                p
            })
            .collect();
        let start = h.len() - 1;
        let memory = self.opts.memory.max(1);
        let mut plays = Vec::new();
        for &idx in self.universe.continuations(h).iter() {
            let good = self.play_word(idx, psi)?.at(start);
            let allowed = constraints(m, self.universe.play(idx), start, memory, &partials);
            plays.push(Constrained { good, allowed });
        }
        let bad: Vec<&Constrained> = plays.iter().filter(|p| !p.good).collect();
        for g in plays.iter().filter(|p| p.good) {
            if g.allowed.values().any(|&a| a == 0) {
                continue;
            }
            let domains = g.allowed.clone();
            if kill_all(&bad, domains, full) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn constraints(
    m: &crate::game::Cgm,
    l: &Lasso,
    start: usize,
    memory: usize,
    partials: &[Vec<Option<usize>>],
) -> BTreeMap<Window, u64> {
    let end = start.max(l.stem.len() + memory - 1) + l.cycle.len();
    let mut out: BTreeMap<Window, u64> = BTreeMap::new();
    for j in start..end {
        let window: Window = (j + 1 - memory.min(j + 1)..=j).map(|k| l.state_at(k)).collect();
        let (w, v) = (l.state_at(j), l.state_at(j + 1));
        let mut mask = 0u64;
        for (t, p) in partials.iter().enumerate() {
            if m.step_allows(w, v, p) {
                mask |= 1 << t;
            }
        }
        *out.entry(window).or_insert(u64::MAX) &= mask;
    }
    out
}

/// Refines the choice domains until every bad play disagrees with them
/// somewhere.
fn kill_all(bad: &[&Constrained], domains: BTreeMap<Window, u64>, full: u64) -> bool {
    let dom = |d: &BTreeMap<Window, u64>, w: &Window| d.get(w).copied().unwrap_or(full);
    let Some(b) = bad.iter().find(|b| b.allowed.iter().all(|(w, &a)| dom(&domains, w) & a != 0)) else {
        return true;
    };
    for (w, &a) in &b.allowed {
        let narrowed = dom(&domains, w) & !a;
        if narrowed != 0 {
            let mut d = domains.clone();
            d.insert(w.clone(), narrowed);
            if kill_all(bad, d, full) {
                return true;
            }
        }
    }
    false
}
