use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::{Coalition, Player};

/// Index of a joint action: mixed radix over the players' action counts,
/// player 1 most significant.
pub type JointIdx = usize;

/// A finite concurrent game model. States and actions are indices; names
/// are kept for I/O.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cgm {
    states: Vec<String>,
    init: usize,
    /// `actions[i - 1]` are player i's action names.
    actions: Vec<Vec<String>>,
    /// `trans[w * joint_count + j]`.
    trans: Vec<usize>,
    labels: Vec<BTreeSet<String>>,
    /// Declared vocabulary; always contains every label.
    props: BTreeSet<String>,
}

impl Cgm {
    pub fn new(
        states: Vec<String>,
        init: usize,
        actions: Vec<Vec<String>>,
        trans: Vec<usize>,
        labels: Vec<BTreeSet<String>>,
    ) -> Result<Cgm> {
        let props = labels.iter().flatten().cloned().collect();
        let m = Cgm { states, init, actions, trans, labels, props };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if n == 0 {
            return Err(Error::Model("no states".into()));
        }
        if self.init >= n {
            return Err(Error::Model("initial state out of range".into()));
        }
        if self.actions.is_empty() {
            return Err(Error::Model("no players".into()));
        }
        if let Some(i) = self.actions.iter().position(Vec::is_empty) {
            return Err(Error::Model(format!("player {} has no actions", i + 1)));
        }
        if self.trans.len() != n * self.joint_count() {
            return Err(Error::Model("outcome table has the wrong size".into()));
        }
        if self.trans.iter().any(|&t| t >= n) {
            return Err(Error::Model("outcome target out of range".into()));
        }
        if self.labels.len() != n {
            return Err(Error::Model("valuation has the wrong size".into()));
        }
        Ok(())
    }

    pub fn agents(&self) -> u32 {
        self.actions.len() as u32
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn state_name(&self, w: usize) -> &str {
        &self.states[w]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn actions(&self, player: Player) -> &[String] {
        &self.actions[player as usize - 1]
    }

    pub fn all_actions(&self) -> &[Vec<String>] {
        &self.actions
    }

    pub fn joint_count(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }

    pub fn decode(&self, mut j: JointIdx) -> Vec<usize> {
        let mut out = vec![0; self.actions.len()];
        for (i, acts) in self.actions.iter().enumerate().rev() {
            out[i] = j % acts.len();
            j /= acts.len();
        }
        out
    }

    pub fn encode(&self, acts: &[usize]) -> JointIdx {
        acts.iter().zip(&self.actions).fold(0, |acc, (&a, list)| acc * list.len() + a)
    }

    pub fn joint_name(&self, j: JointIdx) -> String {
        let names: Vec<&str> = self
            .decode(j)
            .iter()
            .enumerate()
            .map(|(i, &a)| self.actions[i][a].as_str())
            .collect();
        format!("({})", names.join(","))
    }

    pub fn succ(&self, w: usize, j: JointIdx) -> usize {
        self.trans[w * self.joint_count() + j]
    }

    /// Distinct successor states, ascending.
    pub fn successors(&self, w: usize) -> Vec<usize> {
        let k = self.joint_count();
        let set: BTreeSet<usize> = self.trans[w * k..(w + 1) * k].iter().copied().collect();
        set.into_iter().collect()
    }

    /// Lowest joint action leading from `w` to `v`.
    pub fn lowest_joint(&self, w: usize, v: usize) -> Option<JointIdx> {
        (0..self.joint_count()).find(|&j| self.succ(w, j) == v)
    }

    /// Whether some completion of the coalition's partial choice leads from
    /// `w` to `v`. `partial[i]` is player i+1's action or `None` for outsiders.
    pub fn step_allows(&self, w: usize, v: usize, partial: &[Option<usize>]) -> bool {
        (0..self.joint_count()).any(|j| {
            self.succ(w, j) == v
                && self.decode(j).iter().zip(partial).all(|(a, p)| p.is_none_or(|p| p == *a))
        })
    }

    /// Joint actions agreeing with `j` on the members of `gamma`.
    pub fn completions(&self, j: JointIdx, gamma: &Coalition) -> Vec<JointIdx> {
        let base = self.decode(j);
        (0..self.joint_count())
            .filter(|&k| {
                let d = self.decode(k);
                gamma.players().iter().all(|&i| d[i as usize - 1] == base[i as usize - 1])
            })
            .collect()
    }

    pub fn holds(&self, w: usize, p: &str) -> bool {
        self.labels[w].contains(p)
    }

    pub fn labels(&self, w: usize) -> &BTreeSet<String> {
        &self.labels[w]
    }

    pub fn props(&self) -> &BTreeSet<String> {
        &self.props
    }

    /// Adds propositions to the vocabulary without making them true anywhere.
    pub fn declare_props(&mut self, names: impl IntoIterator<Item = String>) {
        self.props.extend(names);
    }

    /// `M^X_p`: `p` holds exactly at the states in `x`.
    pub fn overlay(&self, p: &str, x: &BTreeSet<usize>) -> Result<Cgm> {
        if let Some(&bad) = x.iter().find(|&&w| w >= self.num_states()) {
            return Err(Error::Model(format!("overlay state {bad} is not a state")));
        }
        let mut m = self.clone();
        for (w, l) in m.labels.iter_mut().enumerate() {
            if x.contains(&w) {
                l.insert(p.to_string());
            } else {
                l.remove(p);
            }
        }
        m.props.insert(p.to_string());
        Ok(m)
    }

    /// States reachable from the initial state.
    pub fn reachable(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.init]);
        let mut stack = vec![self.init];
        while let Some(w) = stack.pop() {
            for v in self.successors(w) {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Parses the line-oriented model format.
    pub fn parse(text: &str, file: &str) -> Result<Cgm> {
        let err = |line: usize, msg: String| Error::Load { file: file.to_string(), line, msg };
        let mut states: Option<Vec<String>> = None;
        let mut init: Option<(usize, String)> = None;
        let mut players: Option<usize> = None;
        let mut actions: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        let mut trans_lines = Vec::new();
        let mut label_lines = Vec::new();
        let mut extra_props = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) =
                line.split_once(':').ok_or_else(|| err(line_no, "expected `key: value`".into()))?;
            let key = key.trim();
            let rest = rest.trim();
            let words = || rest.split_whitespace().map(str::to_string).collect::<Vec<_>>();
            if key == "states" {
                states = Some(words());
            } else if key == "init" {
                init = Some((line_no, rest.to_string()));
            } else if key == "players" {
                players = Some(rest.parse().map_err(|_| err(line_no, "bad player count".into()))?);
            } else if key == "props" {
                extra_props.extend(words());
            } else if let Some(i) = key.strip_prefix("actions") {
                let i: usize =
                    i.trim().parse().map_err(|_| err(line_no, "bad player index".into()))?;
                actions.insert(i, words());
            } else if key == "trans" {
                trans_lines.push((line_no, rest.to_string()));
            } else if let Some(s) = key.strip_prefix("label") {
                label_lines.push((line_no, s.trim().to_string(), words()));
            } else {
                return Err(err(line_no, format!("unknown key `{key}`")));
            }
        }
        let states = states.ok_or_else(|| err(0, "missing `states:`".into()))?;
        let index = |name: &str, line: usize| {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| err(line, format!("unknown state `{name}`")))
        };
        let (init_line, init_name) = init.ok_or_else(|| err(0, "missing `init:`".into()))?;
        let init = index(&init_name, init_line)?;
        let players = players.ok_or_else(|| err(0, "missing `players:`".into()))?;
        let mut acts = Vec::new();
        for i in 1..=players {
            acts.push(
                actions
                    .remove(&i)
                    .ok_or_else(|| err(0, format!("missing `actions {i}:`")))?,
            );
        }
        if let Some((&i, _)) = actions.iter().next() {
            return Err(err(0, format!("actions for undeclared player {i}")));
        }
        let k: usize = acts.iter().map(Vec::len).product();
        let mut trans: Vec<Option<usize>> = vec![None; states.len() * k];
        let proto = Cgm {
            states: states.clone(),
            init,
            actions: acts.clone(),
            trans: vec![],
            labels: vec![],
            props: BTreeSet::new(),
        };
        for (line, rest) in &trans_lines {
            let (lhs, target) = rest
                .split_once("->")
                .ok_or_else(|| err(*line, "expected `s (a,..) -> t`".into()))?;
            let lhs = lhs.trim();
            let open = lhs.find('(').ok_or_else(|| err(*line, "expected `(`".into()))?;
            let src_name = lhs[..open].trim();
            let srcs: Vec<usize> = if src_name == "*" {
                (0..states.len()).collect()
            } else {
                vec![index(src_name, *line)?]
            };
            let tuple = lhs[open..].trim();
            let inner = tuple
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| err(*line, "malformed action tuple".into()))?;
            let names: Vec<&str> = inner.split(',').map(str::trim).collect();
            if names.len() != players {
                return Err(err(*line, format!("expected {players} actions")));
            }
            let mut choices: Vec<Vec<usize>> = Vec::new();
            for (i, nm) in names.iter().enumerate() {
                if *nm == "*" {
                    choices.push((0..acts[i].len()).collect());
                } else {
                    let a = acts[i].iter().position(|x| x == nm).ok_or_else(|| {
                        err(*line, format!("unknown action `{nm}` of player {}", i + 1))
                    })?;
                    choices.push(vec![a]);
                }
            }
            let tgt = index(target.trim(), *line)?;
            for j in 0..k {
                let d = proto.decode(j);
                if d.iter().zip(&choices).all(|(a, c)| c.contains(a)) {
                    for &src in &srcs {
                        trans[src * k + j] = Some(tgt);
                    }
                }
            }
        }
        let mut full = Vec::with_capacity(trans.len());
        for (idx, t) in trans.iter().enumerate() {
            match t {
                Some(t) => full.push(*t),
                None => {
                    let (w, j) = (idx / k, idx % k);
                    return Err(err(
                        0,
                        format!("no transition for {} {}", states[w], proto.joint_name(j)),
                    ));
                }
            }
        }
        let mut labels = vec![BTreeSet::new(); states.len()];
        for (line, s, ps) in label_lines {
            let w = index(&s, line)?;
            labels[w].extend(ps);
        }
        let mut m = Cgm::new(states, init, acts, full, labels)
            .map_err(|e| err(0, e.to_string()))?;
        m.props.extend(extra_props);
        Ok(m)
    }

    /// Inverse of [`Cgm::parse`], one transition line per (state, joint action).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "states: {}", self.states.join(" "));
        let _ = writeln!(s, "init: {}", self.states[self.init]);
        let _ = writeln!(s, "players: {}", self.actions.len());
        for (i, a) in self.actions.iter().enumerate() {
            let _ = writeln!(s, "actions {}: {}", i + 1, a.join(" "));
        }
        let unlabelled: Vec<&String> =
            self.props.iter().filter(|p| !self.labels.iter().any(|l| l.contains(*p))).collect();
        if !unlabelled.is_empty() {
            let names: Vec<&str> = unlabelled.iter().map(|s| s.as_str()).collect();
            let _ = writeln!(s, "props: {}", names.join(" "));
        }
        for w in 0..self.num_states() {
            for j in 0..self.joint_count() {
                let _ = writeln!(
                    s,
                    "trans: {} {} -> {}",
                    self.states[w],
                    self.joint_name(j),
                    self.states[self.succ(w, j)]
                );
            }
        }
        for (w, l) in self.labels.iter().enumerate() {
            if !l.is_empty() {
                let ps: Vec<&str> = l.iter().map(String::as_str).collect();
                let _ = writeln!(s, "label {}: {}", self.states[w], ps.join(" "));
            }
        }
        s
    }

    /// Same model with states renamed by `perm` (new index of old state `w` is `perm[w]`).
    pub fn permute_states(&self, perm: &[usize]) -> Cgm {
        let n = self.num_states();
        let k = self.joint_count();
        let mut states = vec![String::new(); n];
        let mut labels = vec![BTreeSet::new(); n];
        let mut trans = vec![0; n * k];
        for w in 0..n {
            states[perm[w]] = self.states[w].clone();
            labels[perm[w]] = self.labels[w].clone();
            for j in 0..k {
                trans[perm[w] * k + j] = perm[self.succ(w, j)];
            }
        }
        Cgm {
            states,
            init: perm[self.init],
            actions: self.actions.clone(),
            trans,
            labels,
            props: self.props.clone(),
        }
    }
}
