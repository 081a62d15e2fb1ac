use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use crate::error::Result;
use crate::formula::{Formula, Player};
use crate::game::{expand, Cgm, ExpandedCgm, Lasso, Universe};
use crate::preference::ObjectiveSystem;
use crate::upw::Upw;

/// Domain of the propositional quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantMode {
    /// Subsets of the model's states.
    Structure,
    /// Subsets of the histories of the unwinding up to the given depth.
    Tree { depth: usize },
}

pub const STRUCTURE_LIMIT: usize = 15;
pub const TREE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub stem_bound: usize,
    pub loop_bound: usize,
    /// Strategies for `<<G>>` see the last `memory` states.
    pub memory: usize,
    pub quant: QuantMode,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { stem_bound: 6, loop_bound: 4, memory: 1, quant: QuantMode::Structure, seed: 0 }
    }
}

/// A proposition whose truth depends on the history, not just its last state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HistoryProp {
    /// Truth by last state.
    ByState(Vec<bool>),
    /// Truth by the last two states; false at the root.
    LastTwo(Vec<Vec<bool>>),
    /// Truth on an explicit set of histories of length at most `max_len`;
    /// longer histories get `beyond`.
    Nodes { set: HashSet<Vec<usize>>, max_len: usize, beyond: bool },
    /// An explicit set up to `max_len`, then truth by the last two states.
    Hybrid { set: HashSet<Vec<usize>>, max_len: usize, tail: Vec<Vec<bool>> },
}

impl HistoryProp {
    pub fn holds(&self, h: &[usize]) -> bool {
        match self {
            HistoryProp::ByState(v) => v[*h.last().unwrap()],
            HistoryProp::LastTwo(m) => h.len() >= 2 && m[h[h.len() - 2]][h[h.len() - 1]],
            HistoryProp::Nodes { set, max_len, beyond } => {
                if h.len() > *max_len {
                    *beyond
                } else {
                    set.contains(h)
                }
            }
            HistoryProp::Hybrid { set, max_len, tail } => {
                if h.len() > *max_len {
                    tail[h[h.len() - 2]][h[h.len() - 1]]
                } else {
                    set.contains(h)
                }
            }
        }
    }

    /// Length after which the truth along a play depends on the last state
    /// pair only.
    pub fn settle_len(&self) -> usize {
        match self {
            HistoryProp::ByState(_) => 1,
            HistoryProp::LastTwo(_) => 2,
            HistoryProp::Nodes { max_len, .. } | HistoryProp::Hybrid { max_len, .. } => max_len + 1,
        }
    }
}

#[derive(Default, Debug)]
pub(crate) struct Caches {
    pub ids: HashMap<Formula, usize>,
    pub state: HashMap<(usize, Vec<usize>), bool>,
    pub words: HashMap<(usize, usize), Upw>,
    pub separation: HashMap<Lasso, usize>,
}

/// Everything needed to evaluate formulas: the evaluation model, the play
/// universe, objectives, bounds and overlays.
#[derive(Debug)]
pub struct EvalContext {
    pub(crate) model: Rc<Cgm>,
    pub(crate) expansion: Option<Rc<ExpandedCgm>>,
    pub(crate) universe: Rc<Universe>,
    pub(crate) objectives: Option<Rc<ObjectiveSystem>>,
    pub(crate) opts: EvalOptions,
    pub(crate) overlays: BTreeMap<String, Rc<HistoryProp>>,
    pub(crate) classes: Rc<RefCell<HashMap<(Player, Lasso), usize>>>,
    pub(crate) caches: RefCell<Caches>,
}

/// Whether evaluating `f` on `m` needs the latest-decision expansion.
pub fn needs_expansion(m: &Cgm, f: &Formula) -> bool {
    let actions: BTreeSet<&String> = m.all_actions().iter().flatten().collect();
    f.any(&|g| match g {
        Formula::Atom(p) => actions.contains(p) && !m.props().contains(p),
        Formula::Ability(c, _) | Formula::Dual(c, _) => !c.is_empty(),
        _ => false,
    })
}

impl EvalContext {
    /// Evaluates directly on `m`.
    pub fn new(m: Cgm, opts: EvalOptions) -> EvalContext {
        let universe = Rc::new(Universe::new(&m, opts.stem_bound, opts.loop_bound));
        EvalContext::assemble(Rc::new(m), None, universe, opts)
    }

    /// Evaluates on `M̄`; histories are sequences of expanded states.
    pub fn expanded(m: &Cgm, opts: EvalOptions) -> Result<EvalContext> {
        let e = expand(m)?;
        let model = e.model.clone();
        let universe = Rc::new(Universe::new(&model, opts.stem_bound, opts.loop_bound));
        Ok(EvalContext::assemble(Rc::new(model), Some(Rc::new(e)), universe, opts))
    }

    /// Evaluates on an existing expansion, with extra plays in the universe.
    pub fn from_expansion(e: ExpandedCgm, extra: Vec<Lasso>, opts: EvalOptions) -> EvalContext {
        let model = e.model.clone();
        let universe = Rc::new(Universe::with_extra(&model, opts.stem_bound, opts.loop_bound, extra));
        EvalContext::assemble(Rc::new(model), Some(Rc::new(e)), universe, opts)
    }

    /// Picks `M` or `M̄` depending on what `f` mentions.
    pub fn for_formula(m: &Cgm, f: &Formula, opts: EvalOptions) -> Result<EvalContext> {
        if needs_expansion(m, f) {
            EvalContext::expanded(m, opts)
        } else {
            Ok(EvalContext::new(m.clone(), opts))
        }
    }

    fn assemble(
        model: Rc<Cgm>,
        expansion: Option<Rc<ExpandedCgm>>,
        universe: Rc<Universe>,
        opts: EvalOptions,
    ) -> EvalContext {
        EvalContext {
            model,
            expansion,
            universe,
            objectives: None,
            opts,
            overlays: BTreeMap::new(),
            classes: Rc::new(RefCell::new(HashMap::new())),
            caches: RefCell::new(Caches::default()),
        }
    }

    pub fn with_objectives(mut self, sys: ObjectiveSystem) -> EvalContext {
        self.objectives = Some(Rc::new(sys));
        self.classes.borrow_mut().clear();
        self
    }

    /// Adds plays to the universe, keeping everything else.
    pub fn with_extra_plays(mut self, extra: Vec<Lasso>) -> EvalContext {
        let mut plays: Vec<Lasso> = self.universe.plays().to_vec();
        plays.extend(extra);
        let (s, l) = self.universe.bounds();
        self.universe = Rc::new(Universe::with_extra(&self.model, s, l, plays));
        self.caches = RefCell::new(Caches::default());
        self
    }

    /// A context where `p` is reinterpreted by `prop`. Caches start empty;
    /// the universe and objectives are shared.
    pub fn with_overlay(&self, p: &str, prop: HistoryProp) -> EvalContext {
        self.with_overlays([(p.to_string(), prop)])
    }

    pub fn with_overlays(&self, props: impl IntoIterator<Item = (String, HistoryProp)>) -> EvalContext {
        let mut overlays = self.overlays.clone();
        for (p, prop) in props {
            overlays.insert(p, Rc::new(prop));
        }
        EvalContext {
            model: self.model.clone(),
            expansion: self.expansion.clone(),
            universe: self.universe.clone(),
            objectives: self.objectives.clone(),
            opts: self.opts.clone(),
            overlays,
            classes: self.classes.clone(),
            caches: RefCell::new(Caches::default()),
        }
    }

    pub fn model(&self) -> &Cgm {
        &self.model
    }

    pub fn expansion(&self) -> Option<&ExpandedCgm> {
        self.expansion.as_deref()
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn objectives(&self) -> Option<&ObjectiveSystem> {
        self.objectives.as_deref()
    }

    pub fn options(&self) -> &EvalOptions {
        &self.opts
    }

    pub fn overlay(&self, p: &str) -> Option<&HistoryProp> {
        self.overlays.get(p).map(|r| &**r)
    }

    pub fn root(&self) -> Vec<usize> {
        vec![self.model.init()]
    }

    /// Histories from the initial state with at most `max_len` states.
    pub fn histories(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut frontier = vec![self.root()];
        while let Some(h) = frontier.pop() {
            if h.len() < max_len {
                for v in self.model.successors(*h.last().unwrap()) {
                    let mut g = h.clone();
                    g.push(v);
                    frontier.push(g);
                }
            }
            out.push(h);
        }
        out.sort();
        out
    }

    pub(crate) fn intern(&self, f: &Formula) -> usize {
        let mut c = self.caches.borrow_mut();
        let n = c.ids.len();
        *c.ids.entry(f.clone()).or_insert(n)
    }
}
