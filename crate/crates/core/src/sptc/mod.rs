//! Strategy profiles with temporary coalitions: each step fixes a joint
//! action together with the partition of the players into the coalitions
//! that author it.

mod judge;
mod overlay;
mod space;

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Coalition, Player};
use crate::game::{ExpandedCgm, JointIdx, Lasso};

pub use judge::{
    context_ability, enables, enables_formula, enforces, enforces_formula, local_characterization, profile_context,
    wellformed, NodeCheck,
};
pub use overlay::{
    coalition_overlay, coalitions, delta_local, delta_tilde, family_names, overlay_nodes, prop_name,
    wellformed_formula,
};
pub use space::{SptcSpace, DEFAULT_CAP};
pub(crate) use overlay::marks_step;

/// A partition of the players into nonempty blocks, each sorted, blocks
/// ordered by least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoalitionStructure {
    blocks: Vec<Coalition>,
}

impl CoalitionStructure {
    pub fn new(mut blocks: Vec<Coalition>, agents: u32) -> Result<Self> {
        let mut seen = HashSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Profile("empty block".into()));
            }
            for &i in b.players() {
                if i == 0 || i > agents {
                    return Err(Error::UnknownPlayer { player: i, agents });
                }
                if !seen.insert(i) {
                    return Err(Error::Profile(format!("player {i} is in two blocks")));
                }
            }
        }
        if seen.len() != agents as usize {
            return Err(Error::Profile("the blocks do not cover every player".into()));
        }
        blocks.sort_by_key(|b| b.players()[0]);
        Ok(CoalitionStructure { blocks })
    }

    /// Every player on its own.
    pub fn singletons(agents: u32) -> Self {
        CoalitionStructure { blocks: (1..=agents).map(|i| Coalition::new([i])).collect() }
    }

    pub fn grand(agents: u32) -> Self {
        CoalitionStructure { blocks: vec![Coalition::all(agents)] }
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    pub fn contains(&self, gamma: &Coalition) -> bool {
        self.blocks.contains(gamma)
    }

    pub fn block_of(&self, i: Player) -> Option<&Coalition> {
        self.blocks.iter().find(|b| b.contains(i))
    }

    /// Parses `{1,3}{2}`.
    pub fn parse(text: &str, agents: u32) -> Result<Self> {
        let bad = || Error::Profile(format!("malformed coalition structure `{text}`"));
        let mut blocks = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let inner = rest.strip_prefix('{').ok_or_else(bad)?;
            let end = inner.find('}').ok_or_else(bad)?;
            let members = inner[..end]
                .split(',')
                .map(|x| x.trim().parse::<Player>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(Coalition::new(members));
            rest = inner[end + 1..].trim_start();
        }
        CoalitionStructure::new(blocks, agents)
    }
}

impl fmt::Display for CoalitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// All partitions of `1..=agents`, in restricted-growth-string order.
pub fn partitions(agents: u32) -> Vec<CoalitionStructure> {
    let n = agents as usize;
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    loop {
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let blocks =
            (0..count).map(|b| Coalition::new((0..n).filter(|&k| rgs[k] == b).map(|k| k as Player + 1))).collect();
        out.push(CoalitionStructure { blocks });
        // Next string: bump the last position that may grow, reset the tail.
        let mut k = n;
        loop {
            if k <= 1 {
                return out;
            }
            k -= 1;
            let max_before = rgs[..k].iter().max().copied().unwrap_or(0);
            if rgs[k] <= max_before {
                rgs[k] += 1;
                rgs[k + 1..].iter_mut().for_each(|x| *x = 0);
                break;
            }
        }
    }
}

/// One step of a profile.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decision {
    pub joint: JointIdx,
    pub structure: CoalitionStructure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Memory {
    /// One decision per state of `M̄`.
    Memoryless(Vec<Decision>),
    /// Decisions for histories of `M̄` with at most `depth` states; longer
    /// ones use the memoryless fallback.
    Table { depth: usize, map: HashMap<Vec<usize>, Decision>, fallback: Vec<Decision> },
}

/// A strategy profile with temporary coalitions, read on histories of the
/// latest-decision expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sptc {
    memory: Memory,
}

fn check_decision(ex: &ExpandedCgm, d: &Decision) -> Result<()> {
    if d.joint >= ex.model.joint_count() {
        return Err(Error::Profile(format!("joint action {} out of range", d.joint)));
    }
    CoalitionStructure::new(d.structure.blocks.clone(), ex.model.agents())?;
    Ok(())
}

impl Sptc {
    pub fn memoryless(ex: &ExpandedCgm, decisions: Vec<Decision>) -> Result<Sptc> {
        if decisions.len() != ex.model.num_states() {
            return Err(Error::Profile(format!(
                "expected {} decisions, got {}",
                ex.model.num_states(),
                decisions.len()
            )));
        }
        for d in &decisions {
            check_decision(ex, d)?;
        }
        Ok(Sptc { memory: Memory::Memoryless(decisions) })
    }

    pub fn table(
        ex: &ExpandedCgm,
        depth: usize,
        map: HashMap<Vec<usize>, Decision>,
        fallback: Vec<Decision>,
    ) -> Result<Sptc> {
        let Sptc { memory: Memory::Memoryless(fallback) } = Sptc::memoryless(ex, fallback)? else {
            unreachable!()
        };
        for (h, d) in &map {
            if h.is_empty() || h.len() > depth || h[0] != ex.model.init() {
                return Err(Error::Profile("table key is not a history within the depth".into()));
            }
            check_decision(ex, d)?;
        }
        Ok(Sptc { memory: Memory::Table { depth, map, fallback } })
    }

    /// The same decision everywhere.
    pub fn constant(ex: &ExpandedCgm, d: Decision) -> Result<Sptc> {
        Sptc::memoryless(ex, vec![d; ex.model.num_states()])
    }

    /// Length of the histories a table distinguishes; 0 when memoryless.
    pub fn memory_depth(&self) -> usize {
        match &self.memory {
            Memory::Memoryless(_) => 0,
            Memory::Table { depth, .. } => *depth,
        }
    }

    pub fn is_memoryless(&self) -> bool {
        matches!(self.memory, Memory::Memoryless(_))
    }

    /// Decision at a history of `M̄`.
    pub fn decision(&self, h: &[usize]) -> &Decision {
        let last = *h.last().expect("nonempty history");
        match &self.memory {
            Memory::Memoryless(v) => &v[last],
            Memory::Table { depth, map, fallback } => {
                if h.len() <= *depth {
                    map.get(h).unwrap_or(&fallback[last])
                } else {
                    &fallback[last]
                }
            }
        }
    }

    /// Per-state decisions of a memoryless profile, or the fallback of a table.
    pub fn state_decisions(&self) -> &[Decision] {
        match &self.memory {
            Memory::Memoryless(v) => v,
            Memory::Table { fallback, .. } => fallback,
        }
    }

    /// The unique play of `M̄` on which every step follows the profile.
    pub fn outcome(&self, ex: &ExpandedCgm) -> Lasso {
        let m = &ex.model;
        let mut h = vec![m.init()];
        let depth = match &self.memory {
            Memory::Memoryless(_) => 0,
            Memory::Table { depth, .. } => *depth,
        };
        loop {
            let next = m.succ(*h.last().unwrap(), self.decision(&h).joint);
            // Past the table the walk is memoryless, so a repeated state
            // closes the cycle.
            if h.len() > depth {
                if let Some(j) = h[depth.max(1) - 1..].iter().position(|&u| u == next) {
                    let start = depth.max(1) - 1 + j;
                    let cycle = h[start..].to_vec();
                    h.truncate(start);
                    return Lasso::from_states(m, h, cycle).expect("walk follows transitions").canonical(m);
                }
            }
            h.push(next);
        }
    }

    /// Line format: `at <state>|<last joint action>: (a1,...,aN) / {1,3}{2}`.
    /// `at <state>|*: ...` covers every expanded state over `<state>` that has
    /// no line of its own.
    pub fn parse(text: &str, ex: &ExpandedCgm, file: &str) -> Result<Sptc> {
        let m = &ex.model;
        let err = |line: usize, msg: String| Error::Load { file: file.to_string(), line, msg };
        let mut exact: HashMap<usize, Decision> = HashMap::new();
        let mut wild: HashMap<String, Decision> = HashMap::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let body = line.strip_prefix("at ").ok_or_else(|| err(ln, "expected `at`".into()))?;
            let colon = body.find(": ").ok_or_else(|| err(ln, "expected `: `".into()))?;
            let key = body[..colon].trim();
            let (acts, structure) =
                body[colon + 2..].split_once('/').ok_or_else(|| err(ln, "expected `/`".into()))?;
            let acts = acts.trim();
            let names: Vec<&str> = acts
                .strip_prefix('(')
                .and_then(|a| a.strip_suffix(')'))
                .ok_or_else(|| err(ln, format!("malformed action tuple `{acts}`")))?
                .split(',')
                .map(str::trim)
                .collect();
            if names.len() != m.agents() as usize {
                return Err(err(ln, format!("expected {} actions", m.agents())));
            }
            let mut idx = Vec::new();
            for (i, a) in names.iter().enumerate() {
                let pos = m.all_actions()[i]
                    .iter()
                    .position(|x| x == a)
                    .ok_or_else(|| err(ln, format!("player {} has no action `{a}`", i + 1)))?;
                idx.push(pos);
            }
            let structure =
                CoalitionStructure::parse(structure, m.agents()).map_err(|e| err(ln, e.to_string()))?;
            let d = Decision { joint: m.encode(&idx), structure };
            if let Some(base) = key.strip_suffix("|*") {
                if !ex.model.state_names().iter().any(|n| n.split('|').next() == Some(base)) {
                    return Err(err(ln, format!("unknown state `{base}`")));
                }
                wild.insert(base.to_string(), d);
            } else {
                let u = m.state_index(key).ok_or_else(|| err(ln, format!("unknown expanded state `{key}`")))?;
                exact.insert(u, d);
            }
        }
        let mut decisions = Vec::with_capacity(m.num_states());
        for u in 0..m.num_states() {
            let base = m.state_name(u).split('|').next().unwrap().to_string();
            let d = exact
                .get(&u)
                .or_else(|| wild.get(&base))
                .ok_or_else(|| err(0, format!("no decision for `{}`", m.state_name(u))))?;
            decisions.push(d.clone());
        }
        Sptc::memoryless(ex, decisions)
    }

    /// One line per expanded state.
    pub fn to_text(&self, ex: &ExpandedCgm) -> String {
        let m = &ex.model;
        let mut out = String::new();
        for (u, d) in self.state_decisions().iter().enumerate() {
            out.push_str(&format!("at {}: {} / {}\n", m.state_name(u), m.joint_name(d.joint), d.structure));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{expand, Cgm};

    pub(crate) fn two_by_two() -> Cgm {
        Cgm::parse(
            "states: a b\ninit: a\nplayers: 2\nactions 1: x y\nactions 2: u v\n\
             trans: a (x,u) -> a\ntrans: a (x,v) -> b\ntrans: a (y,u) -> b\ntrans: a (y,v) -> a\n\
             trans: b (*,*) -> b\nlabel b: p\n",
            "m",
        )
        .unwrap()
    }

    #[test]
    fn partitions_in_rgs_order() {
        let show = |n| partitions(n).iter().map(|c| c.to_string()).collect::<Vec<_>>();
        assert_eq!(show(1), ["{1}"]);
        assert_eq!(show(2), ["{1,2}", "{1}{2}"]);
        assert_eq!(show(3), ["{1,2,3}", "{1,2}{3}", "{1,3}{2}", "{1}{2,3}", "{1}{2}{3}"]);
        assert_eq!(partitions(4).len(), 15);
    }

    #[test]
    fn structure_parsing() {
        let c = CoalitionStructure::parse("{2}{1,3}", 3).unwrap();
        assert_eq!(c.to_string(), "{1,3}{2}");
        assert_eq!(c.block_of(3), Some(&Coalition::new([1, 3])));
        assert!(CoalitionStructure::parse("{1}{1,2}", 2).is_err());
        assert!(CoalitionStructure::parse("{1}", 2).is_err());
        assert!(CoalitionStructure::parse("{1}{", 2).is_err());
    }

    #[test]
    fn file_round_trip_and_outcome() {
        let ex = expand(&two_by_two()).unwrap();
        let s = Sptc::parse("at a|*: (x,v) / {1}{2}\nat b|*: (y,u) / {1,2}\n", &ex, "p").unwrap();
        assert_eq!(Sptc::parse(&s.to_text(&ex), &ex, "p").unwrap(), s);
        let l = s.outcome(&ex);
        assert_eq!(ex.project(&l.prefix(3)), vec![0, 1, 1]);
        assert!(Sptc::parse("at a|*: (x,q) / {1}{2}\n", &ex, "p").is_err());
        assert!(matches!(Sptc::parse("at a|*: (x,u) / {1}{2}\n", &ex, "p"), Err(Error::Load { .. })));
    }
}
