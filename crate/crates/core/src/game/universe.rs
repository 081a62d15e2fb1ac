use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use super::lasso::{distinct_plays, Lasso};
use super::model::Cgm;

/// The finite set of plays that path quantifiers range over: every distinct
/// lasso from the initial state within the bounds, one completion of every
/// history with `stem_bound + 1` states that no such lasso extends, and any
/// extra plays the caller needs (for example the outcome of a strategy
/// profile).
#[derive(Debug)]
pub struct Universe {
    plays: Vec<Lasso>,
    stem_bound: usize,
    loop_bound: usize,
    cache: RefCell<HashMap<Vec<usize>, Rc<Vec<usize>>>>,
}

impl Universe {
    pub fn new(m: &Cgm, stem_bound: usize, loop_bound: usize) -> Universe {
        Universe::with_extra(m, stem_bound, loop_bound, Vec::new())
    }

    pub fn with_extra(m: &Cgm, stem_bound: usize, loop_bound: usize, extra: Vec<Lasso>) -> Universe {
        let mut set: BTreeSet<Lasso> = distinct_plays(m, stem_bound, loop_bound).into_iter().collect();
        complete(m, &mut set, stem_bound + 1);
        set.extend(extra.iter().filter(|l| l.stem.first() == Some(&m.init())).map(|l| l.canonical(m)));
        Universe {
            plays: set.into_iter().collect(),
            stem_bound,
            loop_bound,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn plays(&self) -> &[Lasso] {
        &self.plays
    }

    pub fn play(&self, i: usize) -> &Lasso {
        &self.plays[i]
    }

    pub fn len(&self) -> usize {
        self.plays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plays.is_empty()
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.stem_bound, self.loop_bound)
    }

    pub fn index_of(&self, l: &Lasso) -> Option<usize> {
        self.plays.binary_search(l).ok()
    }

    /// Indices of the plays extending the history `h`.
    pub fn continuations(&self, h: &[usize]) -> Rc<Vec<usize>> {
        if let Some(c) = self.cache.borrow().get(h) {
            return c.clone();
        }
        let c: Rc<Vec<usize>> = Rc::new(
            (0..self.plays.len()).filter(|&i| self.plays[i].has_prefix(h)).collect(),
        );
        self.cache.borrow_mut().insert(h.to_vec(), c.clone());
        c
    }
}

/// Adds a play through every history of `len` states lacking one: the
/// history followed by lowest successors until a state of the walk repeats.
fn complete(m: &Cgm, set: &mut BTreeSet<Lasso>, len: usize) {
    let covered: HashSet<Vec<usize>> =
        set.iter().map(|l| l.prefix(len)).collect();
    let mut frontier = vec![vec![m.init()]];
    while let Some(h) = frontier.pop() {
        if h.len() < len {
            for v in m.successors(*h.last().unwrap()) {
                let mut g = h.clone();
                g.push(v);
                frontier.push(g);
            }
            continue;
        }
        if covered.contains(&h) {
            continue;
        }
        let mut walk = vec![*h.last().unwrap()];
        let start = loop {
            let next = m.successors(*walk.last().unwrap())[0];
            if let Some(j) = walk.iter().position(|&w| w == next) {
                break j;
            }
            walk.push(next);
        };
        let mut stem = h[..h.len() - 1].to_vec();
        stem.extend_from_slice(&walk[..start]);
        let cycle = walk[start..].to_vec();
        let l = Lasso::from_states(m, stem, cycle).expect("walk follows transitions");
        set.insert(l.canonical(m));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuations_partition_by_next_state() {
        let m = Cgm::parse(
            "states: a b c\ninit: a\nplayers: 1\nactions 1: x y\ntrans: a (x) -> b\ntrans: a (y) -> c\n\
             trans: b (*) -> a\ntrans: c (*) -> c\n",
            "m",
        )
        .unwrap();
        let u = Universe::new(&m, 3, 2);
        let all = u.continuations(&[0]);
        assert_eq!(all.len(), u.len());
        let via_b = u.continuations(&[0, 1]);
        let via_c = u.continuations(&[0, 2]);
        assert_eq!(via_b.len() + via_c.len(), all.len());
        assert!(u.continuations(&[1]).is_empty());
    }

    #[test]
    fn long_histories_have_continuations() {
        // A 3-cycle: no lasso with loop <= 2 exists.
        let m = Cgm::parse(
            "states: a b c\ninit: a\nplayers: 1\nactions 1: x\ntrans: a (x) -> b\ntrans: b (x) -> c\n\
             trans: c (x) -> a\n",
            "m",
        )
        .unwrap();
        let u = Universe::new(&m, 2, 2);
        assert_eq!(u.len(), 1);
        assert_eq!(u.continuations(&[0, 1, 2]).len(), 1);
    }
}
