use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::{Coalition, Formula, Player};
use crate::game::{Cgm, Lasso, Universe};
use crate::parser::parse;
use crate::semantics::path::pltl_word;

/// One player's objectives `Θ_i` with a strict order over their indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayerObjectives {
    pub names: Vec<String>,
    pub objectives: Vec<Formula>,
    /// Declared edges `(a, b)` meaning `a < b`.
    pub edges: Vec<(usize, usize)>,
    less: Vec<Vec<bool>>,
}

impl PlayerObjectives {
    pub fn new(names: Vec<String>, objectives: Vec<Formula>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = objectives.len();
        if names.len() != n {
            return Err(Error::Objectives("one name per objective required".into()));
        }
        if n == 0 {
            return Err(Error::Objectives("a player needs at least one objective".into()));
        }
        if let Some(f) = objectives.iter().find(|f| !f.is_pltl()) {
            return Err(Error::NonPltlOperand(f.to_string()));
        }
        let mut less = vec![vec![false; n]; n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::Objectives(format!("order edge ({a},{b}) out of range")));
            }
            less[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if less[i][k] {
                    for j in 0..n {
                        if less[k][j] {
                            less[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| less[i][i]) {
            return Err(Error::Objectives(format!("order is cyclic through {}", names[i])));
        }
        Ok(PlayerObjectives { names, objectives, edges, less })
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    /// The transitive closure of the declared order.
    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a][b]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// `Θ_{I,i}` for every player, plus the results of the last validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectiveSystem {
    pub agents: u32,
    players: Vec<PlayerObjectives>,
    pub disjoint: Option<bool>,
    pub exhaustive: Option<bool>,
}

impl ObjectiveSystem {
    pub fn new(agents: u32, players: Vec<PlayerObjectives>) -> Result<Self> {
        if players.len() != agents as usize {
            return Err(Error::Objectives(format!(
                "{} players have objectives, expected {agents}",
                players.len()
            )));
        }
        Ok(ObjectiveSystem { agents, players, disjoint: None, exhaustive: None })
    }

    pub fn player(&self, i: Player) -> Option<&PlayerObjectives> {
        (i >= 1).then(|| self.players.get(i as usize - 1)).flatten()
    }

    pub fn players(&self) -> &[PlayerObjectives] {
        &self.players
    }

    pub fn is_validated(&self) -> bool {
        self.disjoint == Some(true) && self.exhaustive == Some(true)
    }

    /// Componentwise order on coalition objectives, given as index tuples in
    /// the coalition's player order.
    pub fn coalition_less(&self, gamma: &Coalition, a: &[usize], b: &[usize]) -> bool {
        gamma
            .players()
            .iter()
            .enumerate()
            .all(|(k, &i)| self.player(i).is_some_and(|po| po.less(a[k], b[k])))
    }

    /// Unique objective of `i` that the play satisfies at position 0.
    pub fn classify(&self, m: &Cgm, i: Player, l: &Lasso) -> Result<usize> {
        let po = self.player(i).ok_or(Error::UnknownPlayer { player: i, agents: self.agents })?;
        let mut hit = None;
        for (k, th) in po.objectives.iter().enumerate() {
            if pltl_word(m, l, th)?.at(0) {
                if hit.is_some() {
                    return Err(Error::Unclassified { player: i, play: l.display(m) });
                }
                hit = Some(k);
            }
        }
        hit.ok_or_else(|| Error::Unclassified { player: i, play: l.display(m) })
    }

    /// Line format: `player i`, then `obj NAME: formula` lines, then an
    /// optional `order: A < B, B < C`.
    pub fn parse(text: &str, agents: u32, file: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Load { file: file.to_string(), line, msg };
        struct Block {
            names: Vec<String>,
            objs: Vec<Formula>,
            order: Vec<(String, String, usize)>,
        }
        let mut blocks: Vec<Option<Block>> = (0..agents).map(|_| None).collect();
        let mut cur: Option<usize> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("player ") {
                let i: u32 = rest.trim().parse().map_err(|_| err(line_no, format!("bad player `{rest}`")))?;
                if i == 0 || i > agents {
                    return Err(err(line_no, format!("player {i} not in 1..={agents}")));
                }
                if blocks[i as usize - 1].is_some() {
                    return Err(err(line_no, format!("player {i} declared twice")));
                }
                blocks[i as usize - 1] = Some(Block { names: vec![], objs: vec![], order: vec![] });
                cur = Some(i as usize - 1);
                continue;
            }
            let b = cur
                .and_then(|c| blocks[c].as_mut())
                .ok_or_else(|| err(line_no, "expected `player i` first".into()))?;
            if let Some(rest) = line.strip_prefix("obj ") {
                let (name, body) =
                    rest.split_once(':').ok_or_else(|| err(line_no, "expected `obj NAME: formula`".into()))?;
                let name = name.trim().to_string();
                if b.names.contains(&name) {
                    return Err(err(line_no, format!("objective {name} declared twice")));
                }
                let f = parse(body.trim(), agents).map_err(|e| err(line_no, e.to_string()))?;
                b.names.push(name);
                b.objs.push(f);
            } else if let Some(rest) = line.strip_prefix("order:") {
                for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (a, c) =
                        item.split_once('<').ok_or_else(|| err(line_no, format!("bad edge `{item}`")))?;
                    b.order.push((a.trim().to_string(), c.trim().to_string(), line_no));
                }
            } else {
                return Err(err(line_no, format!("unrecognized line `{line}`")));
            }
        }
        let mut players = Vec::new();
        for (k, b) in blocks.into_iter().enumerate() {
            let b = b.ok_or_else(|| err(0, format!("no objectives for player {}", k + 1)))?;
            let mut edges = Vec::new();
            for (a, c, line_no) in &b.order {
                let idx = |s: &str| {
                    b.names.iter().position(|n| n == s).ok_or_else(|| err(*line_no, format!("unknown objective {s}")))
                };
                edges.push((idx(a)?, idx(c)?));
            }
            players.push(PlayerObjectives::new(b.names, b.objs, edges).map_err(|e| err(0, e.to_string()))?);
        }
        ObjectiveSystem::new(agents, players)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, po) in self.players.iter().enumerate() {
            let _ = writeln!(s, "player {}", k + 1);
            for (n, f) in po.names.iter().zip(&po.objectives) {
                let _ = writeln!(s, "obj {n}: {f}");
            }
            if !po.edges.is_empty() {
                let e: Vec<String> =
                    po.edges.iter().map(|&(a, b)| format!("{} < {}", po.names[a], po.names[b])).collect();
                let _ = writeln!(s, "order: {}", e.join(", "));
            }
        }
        s
    }
}

/// A play falling into zero or several classes of some player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub player: Player,
    pub play: Lasso,
    /// Indices of the objectives the play satisfies.
    pub classes: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub overlaps: Vec<Violation>,
    pub gaps: Vec<Violation>,
    pub plays_checked: usize,
}

impl ValidationReport {
    pub fn disjoint(&self) -> bool {
        self.overlaps.is_empty()
    }

    pub fn exhaustive(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn ok(&self) -> bool {
        self.disjoint() && self.exhaustive()
    }
}

/// Checks disjointness and exhaustiveness over the plays of `universe`.
pub fn validate_objectives(m: &Cgm, sys: &ObjectiveSystem, universe: &Universe) -> Result<ValidationReport> {
    let mut r = ValidationReport { plays_checked: universe.len(), ..Default::default() };
    for l in universe.plays() {
        for (k, po) in sys.players.iter().enumerate() {
            let mut classes = Vec::new();
            for (j, th) in po.objectives.iter().enumerate() {
                if pltl_word(m, l, th)?.at(0) {
                    classes.push(j);
                }
            }
            let v = Violation { player: k as Player + 1, play: l.clone(), classes };
            match v.classes.len() {
                0 => r.gaps.push(v),
                1 => {}
                _ => r.overlaps.push(v),
            }
        }
    }
    Ok(r)
}

/// Validates and records the outcome in the system's flags.
pub fn validate_in_place(m: &Cgm, sys: &mut ObjectiveSystem, universe: &Universe) -> Result<ValidationReport> {
    let r = validate_objectives(m, sys, universe)?;
    sys.disjoint = Some(r.disjoint());
    sys.exhaustive = Some(r.exhaustive());
    Ok(r)
}

/// Objectives of `i` that some play extending `history` realizes together
/// with `phi` at position `|history|`.
pub fn realizable_objectives(
    m: &Cgm,
    sys: &ObjectiveSystem,
    universe: &Universe,
    history: &[usize],
    i: Player,
    phi: &Formula,
) -> Result<BTreeSet<usize>> {
    if !phi.is_pltl() {
        return Err(Error::NonPltlOperand(phi.to_string()));
    }
    let mut out = BTreeSet::new();
    for &idx in universe.continuations(history).iter() {
        let l = universe.play(idx);
        if pltl_word(m, l, phi)?.at(history.len()) {
            out.insert(sys.classify(m, i, l)?);
        }
    }
    Ok(out)
}
