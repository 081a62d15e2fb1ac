use std::collections::BTreeSet;

use super::model::{Cgm, JointIdx};
use crate::error::{Error, Result};

pub const DEFAULT_NODE_BUDGET: usize = 1 << 20;

/// A history `w0 a1 w1 ... an wn` of the unwinding, stored as a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnwindNode {
    pub state: usize,
    pub parent: Option<usize>,
    /// Joint action from the parent; `None` at the root.
    pub via: Option<JointIdx>,
    pub depth: usize,
    /// One child per joint action once expanded; empty at the depth limit.
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct UnwindTree {
    pub nodes: Vec<UnwindNode>,
    pub depth: usize,
}

impl UnwindTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// States from the root to `node`.
    pub fn states(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = Some(node);
        while let Some(c) = cur {
            out.push(self.nodes[c].state);
            cur = self.nodes[c].parent;
        }
        out.reverse();
        out
    }

    /// Joint actions from the root to `node`.
    pub fn actions(&self, node: usize) -> Vec<JointIdx> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(j) = self.nodes[cur].via {
            out.push(j);
            cur = self.nodes[cur].parent.unwrap();
        }
        out.reverse();
        out
    }

    /// Propositions at a node: the state's labels plus the names of the
    /// actions that produced it.
    pub fn valuation(&self, m: &Cgm, node: usize) -> BTreeSet<String> {
        let n = &self.nodes[node];
        let mut l = m.labels(n.state).clone();
        if let Some(j) = n.via {
            for (i, &a) in m.decode(j).iter().enumerate() {
                l.insert(m.all_actions()[i][a].clone());
            }
        }
        l
    }

    /// Inverse of the outcome map: the parent and action that produce `node`.
    pub fn invert(&self, node: usize) -> Option<(usize, JointIdx)> {
        let n = &self.nodes[node];
        Some((n.parent?, n.via?))
    }

    pub fn nodes_at_depth(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(move |&i| self.nodes[i].depth == d)
    }
}

/// The full `|Act|`-ary tree of histories up to `depth` steps.
pub fn unwind(m: &Cgm, depth: usize, budget: usize) -> Result<UnwindTree> {
    let k = m.joint_count();
    let needed = (0..=depth).try_fold(0usize, |acc, d| {
        k.checked_pow(d as u32).and_then(|x| acc.checked_add(x))
    });
    match needed {
        Some(n) if n <= budget => {}
        _ => return Err(Error::Budget { needed: needed.unwrap_or(usize::MAX), budget }),
    }
    let mut nodes =
        vec![UnwindNode { state: m.init(), parent: None, via: None, depth: 0, children: vec![] }];
    let mut frontier = vec![0usize];
    for d in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * k);
        for &u in &frontier {
            let w = nodes[u].state;
            let mut kids = Vec::with_capacity(k);
            for j in 0..k {
                nodes.push(UnwindNode {
                    state: m.succ(w, j),
                    parent: Some(u),
                    via: Some(j),
                    depth: d + 1,
                    children: vec![],
                });
                kids.push(nodes.len() - 1);
            }
            nodes[u].children = kids.clone();
            next.extend(kids);
        }
        frontier = next;
    }
    Ok(UnwindTree { nodes, depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::expand::expand;

    const M: &str = "
states: a b
init: a
players: 2
actions 1: x y
actions 2: u v
trans: a (x,u) -> a
trans: a (*,v) -> b
trans: a (y,u) -> b
trans: b (*,*) -> a
label a: p
";

    #[test]
    fn sizes() {
        let m = Cgm::parse(M, "m").unwrap();
        assert_eq!(unwind(&m, 0, 10).unwrap().len(), 1);
        let t = unwind(&m, 3, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(t.len(), 1 + 4 + 16 + 64);
        assert!(matches!(unwind(&m, 3, 20), Err(Error::Budget { needed: 85, .. })));
    }

    #[test]
    fn outcome_is_invertible() {
        let m = Cgm::parse(M, "m").unwrap();
        let t = unwind(&m, 3, DEFAULT_NODE_BUDGET).unwrap();
        for (i, n) in t.nodes.iter().enumerate() {
            for (j, &c) in n.children.iter().enumerate() {
                assert_eq!(t.invert(c), Some((i, j)));
                assert_eq!(t.nodes[c].state, m.succ(n.state, j));
            }
            let parents = t.nodes.iter().filter(|p| p.children.contains(&i)).count();
            assert_eq!(parents, usize::from(i != 0));
        }
    }

    #[test]
    fn expansion_has_isomorphic_unwinding() {
        let m = Cgm::parse(M, "m").unwrap();
        let e = expand(&m).unwrap();
        let t = unwind(&m, 3, DEFAULT_NODE_BUDGET).unwrap();
        let te = unwind(&e.model, 3, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(t.len(), te.len());
        // Both trees are built in the same BFS order, so node i corresponds to node i.
        let mut stack = vec![(0usize, 0usize)];
        while let Some((a, b)) = stack.pop() {
            assert_eq!(t.valuation(&m, a), te.valuation(&e.model, b));
            assert_eq!(e.base_state(te.nodes[b].state), t.nodes[a].state);
            for (x, y) in t.nodes[a].children.iter().zip(&te.nodes[b].children) {
                stack.push((*x, *y));
            }
        }
    }
}
