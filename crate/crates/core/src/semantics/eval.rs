use std::collections::{BTreeSet, HashSet};

use super::context::{EvalContext, HistoryProp, QuantMode, STRUCTURE_LIMIT, TREE_LIMIT};
use super::path::{state_word, word};
use crate::error::{Error, Result};
use crate::formula::{Formula, Player, PrefKind};
use crate::game::{unwind, Lasso, DEFAULT_NODE_BUDGET};
use crate::upw::Upw;

/// Closed under booleans from atoms, quantifiers, modalities and preferences.
pub fn is_state_level(f: &Formula) -> bool {
    use Formula::*;
    match f {
        False | True | Atom(_) | Ability(..) | Dual(..) | Exists(..) | Forall(..) | Pref { .. } => true,
        Not(a) => is_state_level(a),
        And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => is_state_level(a) && is_state_level(b),
        _ => false,
    }
}

/// No future operators outside state-level subformulas.
fn is_past_level(f: &Formula) -> bool {
    use Formula::*;
    if is_state_level(f) {
        return true;
    }
    match f {
        Next(_) | Until(..) | Eventually(_) | Always(_) => false,
        _ => f.children().into_iter().all(is_past_level),
    }
}

/// Nesting of the operators whose truth along a play may take extra laps
/// to become periodic.
fn settle_weight(f: &Formula) -> usize {
    use Formula::*;
    let inner = f.children().into_iter().map(settle_weight).max().unwrap_or(0);
    match f {
        Yesterday(_) | Since(..) | Once(_) | Historically(_) | Ability(..) | Dual(..) | Exists(..)
        | Forall(..) | Pref { .. } => inner + 1,
        _ => inner,
    }
}

impl EvalContext {
    /// Truth of a state formula at the initial state.
    pub fn eval(&self, f: &Formula) -> Result<bool> {
        self.eval_state(&self.root(), f)
    }

    /// Truth at a history of the evaluation model. Formulas that are not
    /// state formulas are read universally over the continuations, except
    /// pure-past ones, which are read on the history itself.
    pub fn eval_state(&self, h: &[usize], f: &Formula) -> Result<bool> {
        if h.is_empty() {
            return Err(Error::Model("empty history".into()));
        }
        self.state(h, &f.desugar())
    }

    /// [`Self::eval_state`] at each of `hs`, desugaring once.
    pub fn eval_at_all(&self, hs: &[Vec<usize>], f: &Formula) -> Result<Vec<bool>> {
        let g = f.desugar();
        hs.iter()
            .map(|h| if h.is_empty() { Err(Error::Model("empty history".into())) } else { self.state(h, &g) })
            .collect()
    }

    /// Truth of a path formula on a play at position `k`.
    pub fn eval_path(&self, l: &Lasso, k: usize, f: &Formula) -> Result<bool> {
        Ok(self.path_word(l, &f.desugar())?.at(k))
    }

    pub(crate) fn state(&self, h: &[usize], f: &Formula) -> Result<bool> {
        use Formula::*;
        let id = self.intern(f);
        let key = (id, h.to_vec());
        if let Some(&v) = self.caches.borrow().state.get(&key) {
            return Ok(v);
        }
        let v = match f {
            False => false,
            True => true,
            Atom(p) => self.atom(h, p),
            Not(a) if is_state_level(a) => !self.state(h, a)?,
            And(a, b) if is_state_level(f) => self.state(h, a)? && self.state(h, b)?,
            Or(a, b) if is_state_level(f) => self.state(h, a)? || self.state(h, b)?,
            Implies(a, b) if is_state_level(f) => !self.state(h, a)? || self.state(h, b)?,
            Iff(a, b) if is_state_level(f) => self.state(h, a)? == self.state(h, b)?,
            Ability(c, psi) if c.is_empty() => self.all_continuations(h, psi)?,
            Ability(c, psi) => self.ability(h, c, psi)?,
            Dual(c, psi) => !self.state(h, &Ability(c.clone(), Box::new(Formula::not((**psi).clone()))))?,
            Exists(p, body) => self.exists(h, p, body)?,
            Forall(p, body) => !self.exists(h, p, &Formula::not((**body).clone()))?,
            Pref { kind, player, lhs, rhs } => self.preference(h, *kind, *player, lhs, rhs)?,
            _ if is_past_level(f) => self.on_history(h, f)?,
            _ => self.all_continuations(h, f)?,
        };
        self.caches.borrow_mut().state.insert(key, v);
        Ok(v)
    }

    fn atom(&self, h: &[usize], p: &str) -> bool {
        match self.overlays.get(p) {
            Some(prop) => prop.holds(h),
            None => self.model.holds(*h.last().unwrap(), p),
        }
    }

    /// Past formula read along the history itself.
    fn on_history(&self, h: &[usize], f: &Formula) -> Result<bool> {
        let n = h.len();
        let w = word(f, &mut |leaf| {
            let mut stem = Vec::with_capacity(n);
            for k in 1..=n {
                stem.push(self.state(&h[..k], leaf)?);
            }
            Ok(Upw::new(stem, vec![false]))
        })?;
        Ok(w.at(n - 1))
    }

    fn all_continuations(&self, h: &[usize], psi: &Formula) -> Result<bool> {
        let k = h.len() - 1;
        let id = self.intern(psi);
        for &i in self.universe.continuations(h).iter() {
            if !self.play_word_id(id, i, psi)?.at(k) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Truth word of a path formula along a play. State subformulas other
    /// than plain atoms are labelled at every prefix up to a horizon past
    /// which the labels repeat with the play's cycle.
    pub(crate) fn path_word(&self, l: &Lasso, f: &Formula) -> Result<Upw> {
        match self.universe.index_of(l) {
            Some(idx) => self.play_word(idx, f),
            None => word(f, &mut |leaf| self.leaf_word(l, leaf)),
        }
    }

    /// [`Self::path_word`] for the universe play with index `idx`.
    pub(crate) fn play_word(&self, idx: usize, f: &Formula) -> Result<Upw> {
        self.play_word_id(self.intern(f), idx, f)
    }

    /// [`Self::play_word`] with `f` already interned as `id`.
    pub(crate) fn play_word_id(&self, id: usize, idx: usize, f: &Formula) -> Result<Upw> {
        let key = (id, idx);
        if let Some(w) = self.caches.borrow().words.get(&key) {
            return Ok(w.clone());
        }
        let l = self.universe.play(idx);
        let w = word(f, &mut |leaf| self.leaf_word(l, leaf))?;
        self.caches.borrow_mut().words.insert(key, w.clone());
        Ok(w)
    }

    fn leaf_word(&self, l: &Lasso, leaf: &Formula) -> Result<Upw> {
        if let Formula::Atom(p) = leaf {
            match self.overlays.get(p) {
                None => return Ok(state_word(l, |w| self.model.holds(w, p))),
                Some(prop) => {
                    if let HistoryProp::ByState(v) = &**prop {
                        return Ok(state_word(l, |w| v[w]));
                    }
                }
            }
        }
        let c = l.cycle.len();
        let settle = self.overlays.values().map(|p| p.settle_len()).max().unwrap_or(0);
        let horizon = self.separation(l).max(l.stem.len()).max(settle)
            + self.opts.memory
            + (settle_weight(leaf) + 2) * c;
        let mut labels = Vec::with_capacity(horizon);
        for k in 0..horizon {
            labels.push(self.state(&l.prefix(k + 1), leaf)?);
        }
        let cycle = labels.split_off(horizon - c);
        Ok(Upw::new(labels, cycle))
    }

    /// First position from which no other play of the universe shares the
    /// prefix of `l`.
    fn separation(&self, l: &Lasso) -> usize {
        if let Some(&k) = self.caches.borrow().separation.get(l) {
            return k;
        }
        let cap = l.stem.len() + 4 * (self.opts.stem_bound + self.opts.loop_bound) * l.cycle.len().max(1);
        let mut k = 0;
        while k < cap {
            let c = self.universe.continuations(&l.prefix(k + 1));
            if c.len() <= 1 {
                break;
            }
            k += 1;
        }
        self.caches.borrow_mut().separation.insert(l.clone(), k);
        k
    }

    fn exists(&self, h: &[usize], p: &str, body: &Formula) -> Result<bool> {
        match self.opts.quant {
            QuantMode::Structure => {
                let n = self.model.num_states();
                if n > STRUCTURE_LIMIT {
                    return Err(Error::DomainTooLarge { count: n, limit: STRUCTURE_LIMIT });
                }
                for bits in 0u64..1 << n {
                    let v = (0..n).map(|w| bits >> w & 1 == 1).collect();
                    if self.with_overlay(p, HistoryProp::ByState(v)).state(h, body)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            QuantMode::Tree { depth } => {
                let nodes = self.tree_domain(depth)?;
                for bits in 0u64..1 << nodes.len() {
                    let set: HashSet<Vec<usize>> = nodes
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| bits >> k & 1 == 1)
                        .map(|(_, n)| n.clone())
                        .collect();
                    let prop = HistoryProp::Nodes { set, max_len: depth + 1, beyond: false };
                    if self.with_overlay(p, prop).state(h, body)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Distinct histories of the unwinding up to `depth`.
    pub fn tree_domain(&self, depth: usize) -> Result<Vec<Vec<usize>>> {
        let t = unwind(&self.model, depth, DEFAULT_NODE_BUDGET)?;
        let nodes: BTreeSet<Vec<usize>> = (0..t.len()).map(|u| t.states(u)).collect();
        if nodes.len() > TREE_LIMIT {
            return Err(Error::DomainTooLarge { count: nodes.len(), limit: TREE_LIMIT });
        }
        Ok(nodes.into_iter().collect())
    }

    /// Class of a play for player `i`, read on the model's own labels.
    pub fn class_of(&self, i: Player, l: &Lasso) -> Result<usize> {
        let key = (i, l.clone());
        if let Some(&c) = self.classes.borrow().get(&key) {
            return Ok(c);
        }
        let sys = self.objectives.as_ref().ok_or_else(|| Error::Objectives("no objective system".into()))?;
        let c = sys.classify(&self.model, i, l)?;
        self.classes.borrow_mut().insert(key, c);
        Ok(c)
    }

    /// Classes of the continuations of `h` satisfying `phi` at `|h|`.
    pub fn operand_classes(&self, h: &[usize], i: Player, phi: &Formula) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        let id = self.intern(phi);
        for &idx in self.universe.continuations(h).iter() {
            if self.play_word_id(id, idx, phi)?.at(h.len()) {
                out.insert(self.class_of(i, self.universe.play(idx))?);
            }
        }
        Ok(out)
    }

    fn preference(&self, h: &[usize], kind: PrefKind, i: Player, a: &Formula, b: &Formula) -> Result<bool> {
        let sys = self.objectives.as_ref().ok_or_else(|| Error::Objectives("no objective system".into()))?;
        let po = sys.player(i).ok_or(Error::UnknownPlayer { player: i, agents: sys.agents })?;
        let lo = self.operand_classes(h, i, a)?;
        let hi = self.operand_classes(h, i, b)?;
        let mut pairs = lo.iter().flat_map(|&x| hi.iter().map(move |&y| (x, y)));
        Ok(match kind {
            PrefKind::Less => pairs.all(|(x, y)| po.less(x, y)),
            PrefKind::NotLess => !pairs.any(|(x, y)| po.less(x, y)),
        })
    }
}
