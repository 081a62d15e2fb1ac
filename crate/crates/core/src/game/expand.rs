use std::collections::{BTreeSet, HashMap, VecDeque};

use super::model::{Cgm, JointIdx};
use crate::error::{Error, Result};

/// `M̄`: states pair a state of `M` with the joint action that led there
/// (`None` at the initial state). Only reachable pairs are kept.
#[derive(Clone, Debug)]
pub struct ExpandedCgm {
    pub model: Cgm,
    base: Vec<usize>,
    last: Vec<Option<JointIdx>>,
    index: HashMap<(usize, Option<JointIdx>), usize>,
}

impl ExpandedCgm {
    pub fn base_state(&self, u: usize) -> usize {
        self.base[u]
    }

    pub fn last_action(&self, u: usize) -> Option<JointIdx> {
        self.last[u]
    }

    pub fn state_of(&self, w: usize, last: Option<JointIdx>) -> Option<usize> {
        self.index.get(&(w, last)).copied()
    }

    /// Maps a history of `M̄` back to `M`.
    pub fn project(&self, hist: &[usize]) -> Vec<usize> {
        hist.iter().map(|&u| self.base[u]).collect()
    }
}

/// All action names, checked to be pairwise distinct and disjoint from the
/// model's propositions.
pub fn action_propositions(m: &Cgm) -> Result<BTreeSet<String>> {
    let mut seen = BTreeSet::new();
    for acts in m.all_actions() {
        for a in acts {
            if m.props().contains(a) || !seen.insert(a.clone()) {
                return Err(Error::NameClash(a.clone()));
            }
        }
    }
    Ok(seen)
}

pub fn expand(m: &Cgm) -> Result<ExpandedCgm> {
    let act_props = action_propositions(m)?;
    let k = m.joint_count();
    let mut base = vec![m.init()];
    let mut last: Vec<Option<JointIdx>> = vec![None];
    let mut index = HashMap::from([((m.init(), None), 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    while let Some(u) = queue.pop_front() {
        let w = base[u];
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let key = (m.succ(w, j), Some(j));
            let v = *index.entry(key).or_insert_with(|| {
                base.push(key.0);
                last.push(key.1);
                queue.push_back(base.len() - 1);
                base.len() - 1
            });
            out.push(v);
        }
        if edges.len() <= u {
            edges.resize(u + 1, Vec::new());
        }
        edges[u] = out;
    }
    let n = base.len();
    let mut trans = Vec::with_capacity(n * k);
    for e in &edges {
        trans.extend_from_slice(e);
    }
    let names: Vec<String> = (0..n)
        .map(|u| match last[u] {
            None => format!("{}|*", m.state_name(base[u])),
            Some(j) => format!("{}|{}", m.state_name(base[u]), m.joint_name(j)),
        })
        .collect();
    let labels: Vec<BTreeSet<String>> = (0..n)
        .map(|u| {
            let mut l = m.labels(base[u]).clone();
            if let Some(j) = last[u] {
                for (i, &a) in m.decode(j).iter().enumerate() {
                    l.insert(m.all_actions()[i][a].clone());
                }
            }
            l
        })
        .collect();
    let mut model = Cgm::new(names, 0, m.all_actions().to_vec(), trans, labels)?;
    model.declare_props(m.props().iter().cloned());
    model.declare_props(act_props);
    Ok(ExpandedCgm { model, base, last, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "
states: a b
init: a
players: 2
actions 1: x y
actions 2: u v
trans: a (x,*) -> a
trans: a (y,*) -> b
trans: b (*,u) -> a
trans: b (*,v) -> b
label b: p
";

    #[test]
    fn size_bound_and_action_labels() {
        let m = Cgm::parse(TWO, "two").unwrap();
        let e = expand(&m).unwrap();
        assert!(e.model.num_states() <= m.num_states() * (m.joint_count() + 1));
        for u in 0..e.model.num_states() {
            for i in 1..=2u32 {
                for (ai, a) in m.actions(i).iter().enumerate() {
                    let want = e.last_action(u).is_some_and(|j| m.decode(j)[i as usize - 1] == ai);
                    assert_eq!(e.model.holds(u, a), want);
                }
            }
        }
        assert!(!e.model.holds(0, "x"));
    }

    #[test]
    fn projection_is_a_homomorphism() {
        let m = Cgm::parse(TWO, "two").unwrap();
        let e = expand(&m).unwrap();
        for u in 0..e.model.num_states() {
            for j in 0..m.joint_count() {
                assert_eq!(e.base_state(e.model.succ(u, j)), m.succ(e.base_state(u), j));
            }
            for p in m.props() {
                assert_eq!(e.model.holds(u, p), m.holds(e.base_state(u), p));
            }
        }
        assert_eq!(e.base_state(e.model.init()), m.init());
    }

    #[test]
    fn clashing_names_are_rejected() {
        let clash = TWO.replace("label b: p", "label b: x");
        let m = Cgm::parse(&clash, "c").unwrap();
        assert!(matches!(expand(&m), Err(Error::NameClash(n)) if n == "x"));
        let dup = TWO.replace("actions 2: u v", "actions 2: x v").replace("(*,u)", "(*,x)");
        let m = Cgm::parse(&dup, "d").unwrap();
        assert!(matches!(expand(&m), Err(Error::NameClash(_))));
    }
}
