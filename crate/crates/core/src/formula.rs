//! Formula AST for CTL* with past, coalition modalities, propositional
//! quantifiers and the binary preference operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;

/// Players are numbered from 1.
pub type Player = u32;

/// A set of players, stored sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(Vec<Player>);

impl Coalition {
    pub fn new(players: impl IntoIterator<Item = Player>) -> Self {
        let mut v: Vec<Player> = players.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Coalition(v)
    }

    pub fn empty() -> Self {
        Coalition(Vec::new())
    }

    pub fn all(agents: u32) -> Self {
        Coalition((1..=agents).collect())
    }

    pub fn players(&self) -> &[Player] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, p: Player) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    /// Players of `agents` not in this coalition.
    pub fn complement(&self, agents: u32) -> Coalition {
        Coalition((1..=agents).filter(|p| !self.contains(*p)).collect())
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0.iter().all(|p| other.contains(*p))
    }

    pub fn intersects(&self, other: &Coalition) -> bool {
        self.0.iter().any(|p| other.contains(*p))
    }

    pub fn difference(&self, other: &Coalition) -> Coalition {
        Coalition(self.0.iter().copied().filter(|p| !other.contains(*p)).collect())
    }

    /// All subsets of this coalition, ordered by bitmask over the sorted members.
    pub fn subsets(&self) -> Vec<Coalition> {
        let n = self.0.len();
        (0u64..(1u64 << n))
            .map(|mask| {
                Coalition(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Which of the two binary preference operators a node carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrefKind {
    /// `lt(i, a, b)`: every `a`-continuation is strictly below every `b`-continuation.
    Less,
    /// `nl(i, a, b)`: no `a`-continuation is strictly below a `b`-continuation.
    NotLess,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    False,
    True,
    /// Beginning of time, `!Y true`.
    Init,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Yesterday(Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Once(Box<Formula>),
    Historically(Box<Formula>),
    /// `<<G>> psi`; with the empty coalition this is the universal path quantifier.
    Ability(Coalition, Box<Formula>),
    /// `[[G]] psi`, the dual; with the empty coalition this is the existential path quantifier.
    Dual(Coalition, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Pref {
        kind: PrefKind,
        player: Player,
        lhs: Box<Formula>,
        rhs: Box<Formula>,
    },
    /// `[theta]`, the objective as it stands at the beginning of the play.
    AtOrigin(Box<Formula>),
}

/// Structural flags of a formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FormulaClass {
    /// Truth depends only on the history (no temporal operator outside a quantifier).
    pub is_state: bool,
    /// Not a state formula: needs a play and a position.
    pub is_path: bool,
    /// Plain future LTL: no past operators, quantifiers, modalities or preferences.
    pub is_future: bool,
    pub is_past_free: bool,
    pub is_preference_free: bool,
    /// No propositional quantifiers.
    pub is_quantifier_free: bool,
    /// A PLTL formula: no path quantifiers, modalities, propositional quantifiers or preferences.
    pub is_pltl: bool,
    /// No future operators anywhere.
    pub is_pure_past: bool,
}

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }
    pub fn not(a: Formula) -> Self {
        Formula::Not(bx(a))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(bx(a), bx(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(bx(a), bx(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(bx(a), bx(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(bx(a), bx(b))
    }
    pub fn next(a: Formula) -> Self {
        Formula::Next(bx(a))
    }
    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(bx(a), bx(b))
    }
    pub fn eventually(a: Formula) -> Self {
        Formula::Eventually(bx(a))
    }
    pub fn always(a: Formula) -> Self {
        Formula::Always(bx(a))
    }
    pub fn yesterday(a: Formula) -> Self {
        Formula::Yesterday(bx(a))
    }
    pub fn since(a: Formula, b: Formula) -> Self {
        Formula::Since(bx(a), bx(b))
    }
    pub fn once(a: Formula) -> Self {
        Formula::Once(bx(a))
    }
    pub fn historically(a: Formula) -> Self {
        Formula::Historically(bx(a))
    }
    pub fn ability(c: Coalition, a: Formula) -> Self {
        Formula::Ability(c, bx(a))
    }
    pub fn dual(c: Coalition, a: Formula) -> Self {
        Formula::Dual(c, bx(a))
    }
    /// Universal path quantifier `A`.
    pub fn all_paths(a: Formula) -> Self {
        Formula::Ability(Coalition::empty(), bx(a))
    }
    /// Existential path quantifier `E`.
    pub fn some_path(a: Formula) -> Self {
        Formula::Dual(Coalition::empty(), bx(a))
    }
    pub fn exists(p: impl Into<String>, a: Formula) -> Self {
        Formula::Exists(p.into(), bx(a))
    }
    pub fn forall(p: impl Into<String>, a: Formula) -> Self {
        Formula::Forall(p.into(), bx(a))
    }
    pub fn lt(player: Player, a: Formula, b: Formula) -> Self {
        Formula::Pref { kind: PrefKind::Less, player, lhs: bx(a), rhs: bx(b) }
    }
    pub fn nl(player: Player, a: Formula, b: Formula) -> Self {
        Formula::Pref { kind: PrefKind::NotLess, player, lhs: bx(a), rhs: bx(b) }
    }
    pub fn pref(kind: PrefKind, player: Player, a: Formula, b: Formula) -> Self {
        Formula::Pref { kind, player, lhs: bx(a), rhs: bx(b) }
    }

    /// `[theta]`. Kept as a node; [`Formula::desugar`] expands it to `H(I -> theta)`.
    pub fn at_origin(theta: Formula) -> Self {
        Formula::AtOrigin(bx(theta))
    }

    /// Conjunction of a list; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Immediate children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            False | True | Init | Atom(_) => vec![],
            Not(a) | Next(a) | Eventually(a) | Always(a) | Yesterday(a) | Once(a)
            | Historically(a) | Ability(_, a) | Dual(_, a) | Exists(_, a) | Forall(_, a)
            | AtOrigin(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Since(a, b) => {
                vec![a, b]
            }
            Pref { lhs, rhs, .. } => vec![lhs, rhs],
        }
    }

    /// Rebuilds the node with children transformed by `f`.
    pub fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        use Formula::*;
        match self {
            False | True | Init | Atom(_) => self.clone(),
            Not(a) => Not(bx(f(a))),
            Next(a) => Next(bx(f(a))),
            Eventually(a) => Eventually(bx(f(a))),
            Always(a) => Always(bx(f(a))),
            Yesterday(a) => Yesterday(bx(f(a))),
            Once(a) => Once(bx(f(a))),
            Historically(a) => Historically(bx(f(a))),
            AtOrigin(a) => AtOrigin(bx(f(a))),
            Ability(c, a) => Ability(c.clone(), bx(f(a))),
            Dual(c, a) => Dual(c.clone(), bx(f(a))),
            Exists(p, a) => Exists(p.clone(), bx(f(a))),
            Forall(p, a) => Forall(p.clone(), bx(f(a))),
            And(a, b) => And(bx(f(a)), bx(f(b))),
            Or(a, b) => Or(bx(f(a)), bx(f(b))),
            Implies(a, b) => Implies(bx(f(a)), bx(f(b))),
            Iff(a, b) => Iff(bx(f(a)), bx(f(b))),
            Until(a, b) => Until(bx(f(a)), bx(f(b))),
            Since(a, b) => Since(bx(f(a)), bx(f(b))),
            Pref { kind, player, lhs, rhs } => {
                let l = f(lhs);
                let r = f(rhs);
                Pref { kind: *kind, player: *player, lhs: bx(l), rhs: bx(r) }
            }
        }
    }

    /// `Subf(phi)` in post-order, duplicates removed (first occurrence kept).
    pub fn subformulas(&self) -> Vec<Formula> {
        fn walk(f: &Formula, seen: &mut BTreeSet<Formula>, out: &mut Vec<Formula>) {
            for c in f.children() {
                walk(c, seen, out);
            }
            if seen.insert(f.clone()) {
                out.push(f.clone());
            }
        }
        let mut out = Vec::new();
        walk(self, &mut BTreeSet::new(), &mut out);
        out
    }

    /// Every atom occurring in the formula, bound or free.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out, &mut Vec::new(), false);
        out
    }

    /// Atoms with at least one occurrence not bound by a propositional quantifier.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out, &mut Vec::new(), true);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>, bound: &mut Vec<String>, only_free: bool) {
        match self {
            Formula::Atom(p) => {
                if !only_free || !bound.contains(p) {
                    out.insert(p.clone());
                }
            }
            Formula::Exists(p, a) | Formula::Forall(p, a) => {
                if !only_free {
                    out.insert(p.clone());
                }
                bound.push(p.clone());
                a.collect_vars(out, bound, only_free);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_vars(out, bound, only_free);
                }
            }
        }
    }

    /// Every player index mentioned by a modality or a preference node.
    pub fn players(&self) -> BTreeSet<Player> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Ability(c, _) | Formula::Dual(c, _) => out.extend(c.players().iter().copied()),
            Formula::Pref { player, .. } => {
                out.insert(*player);
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    pub fn any(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Formula::depth).max().unwrap_or(0)
    }

    pub fn classify(&self) -> FormulaClass {
        use Formula::*;
        let has_past = self.any(&|f| {
            matches!(f, Init | Yesterday(_) | Since(..) | Once(_) | Historically(_) | AtOrigin(_))
        });
        let has_future = self.any(&|f| {
            matches!(f, Next(_) | Until(..) | Eventually(_) | Always(_) | AtOrigin(_))
        });
        let has_pref = self.any(&|f| matches!(f, Pref { .. }));
        let has_quant = self.any(&|f| matches!(f, Exists(..) | Forall(..)));
        let has_modal = self.any(&|f| matches!(f, Ability(..) | Dual(..)));
        let is_state = self.is_state();
        let pltl = !has_pref && !has_quant && !has_modal;
        FormulaClass {
            is_state,
            is_path: !is_state,
            is_future: pltl && !has_past,
            is_past_free: !has_past,
            is_preference_free: !has_pref,
            is_quantifier_free: !has_quant,
            is_pltl: pltl,
            is_pure_past: pltl && !has_future,
        }
    }

    /// True when no temporal operator occurs outside a modality, quantifier or preference.
    pub fn is_state(&self) -> bool {
        use Formula::*;
        match self {
            False | True | Atom(_) => true,
            Ability(..) | Dual(..) | Exists(..) | Forall(..) | Pref { .. } => true,
            Not(a) => a.is_state(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.is_state() && b.is_state(),
            _ => false,
        }
    }

    pub fn is_pltl(&self) -> bool {
        self.classify().is_pltl
    }

    /// Simultaneous substitution of atoms. Fails when a substituted formula
    /// would have a free atom captured by a binder of `self`.
    pub fn substitute(&self, binding: &BTreeMap<String, Formula>) -> Result<Formula, Error> {
        self.subst_inner(binding, &mut Vec::new())
    }

    fn subst_inner(
        &self,
        binding: &BTreeMap<String, Formula>,
        bound: &mut Vec<String>,
    ) -> Result<Formula, Error> {
        match self {
            Formula::Atom(p) if !bound.contains(p) => match binding.get(p) {
                Some(repl) => {
                    let free = repl.free_vars();
                    if let Some(b) = bound.iter().rev().find(|b| free.contains(*b)) {
                        return Err(Error::Capture { binder: b.clone(), var: p.clone() });
                    }
                    Ok(repl.clone())
                }
                None => Ok(self.clone()),
            },
            Formula::Exists(p, a) | Formula::Forall(p, a) => {
                bound.push(p.clone());
                let inner = a.subst_inner(binding, bound);
                bound.pop();
                let inner = Box::new(inner?);
                Ok(match self {
                    Formula::Exists(..) => Formula::Exists(p.clone(), inner),
                    _ => Formula::Forall(p.clone(), inner),
                })
            }
            _ => {
                let mut err = None;
                let out = self.map_children(|c| match c.subst_inner(binding, bound) {
                    Ok(f) => f,
                    Err(e) => {
                        err.get_or_insert(e);
                        Formula::False
                    }
                });
                match err {
                    Some(e) => Err(e),
                    None => Ok(out),
                }
            }
        }
    }

    /// Canonical surface form: the representation parse(print(_)) reproduces.
    /// Coalitions are already canonical by construction, so this only rebuilds
    /// the tree through the canonicalizing constructors.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Ability(c, a) => Formula::Ability(Coalition::new(c.0.iter().copied()), bx(a.normalize())),
            Formula::Dual(c, a) => Formula::Dual(Coalition::new(c.0.iter().copied()), bx(a.normalize())),
            _ => self.map_children(Formula::normalize),
        }
    }

    /// Rewrites to the core basis: false, atoms, `->`, X, U, Y, S, `<<G>>`,
    /// `exists`, and the two preference kinds.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        let neg = |a: Formula| Implies(bx(a), bx(False));
        let top = || Implies(bx(False), bx(False));
        match self {
            False => False,
            True => top(),
            Init => neg(Yesterday(bx(top()))),
            Atom(p) => Atom(p.clone()),
            Not(a) => neg(a.desugar()),
            And(a, b) => neg(Implies(bx(a.desugar()), bx(neg(b.desugar())))),
            Or(a, b) => Implies(bx(neg(a.desugar())), bx(b.desugar())),
            Implies(a, b) => Implies(bx(a.desugar()), bx(b.desugar())),
            Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                let ab = Implies(bx(a.clone()), bx(b.clone()));
                let ba = Implies(bx(b), bx(a));
                neg(Implies(bx(ab), bx(neg(ba))))
            }
            Next(a) => Next(bx(a.desugar())),
            Until(a, b) => Until(bx(a.desugar()), bx(b.desugar())),
            Eventually(a) => Until(bx(top()), bx(a.desugar())),
            Always(a) => neg(Until(bx(top()), bx(neg(a.desugar())))),
            Yesterday(a) => Yesterday(bx(a.desugar())),
            Since(a, b) => Since(bx(a.desugar()), bx(b.desugar())),
            Once(a) => Since(bx(top()), bx(a.desugar())),
            Historically(a) => neg(Since(bx(top()), bx(neg(a.desugar())))),
            Ability(c, a) => Ability(c.clone(), bx(a.desugar())),
            Dual(c, a) => neg(Ability(c.clone(), bx(neg(a.desugar())))),
            Exists(p, a) => Exists(p.clone(), bx(a.desugar())),
            Forall(p, a) => neg(Exists(p.clone(), bx(neg(a.desugar())))),
            Pref { kind, player, lhs, rhs } => Pref {
                kind: *kind,
                player: *player,
                lhs: bx(lhs.desugar()),
                rhs: bx(rhs.desugar()),
            },
            AtOrigin(a) => Formula::historically(Formula::implies(Init, (**a).clone())).desugar(),
        }
    }

    /// Checks the structural invariants: players in `1..=agents`, and
    /// preference operands are PLTL.
    pub fn validate(&self, agents: u32) -> Result<(), Error> {
        for p in self.players() {
            if p == 0 || p > agents {
                return Err(Error::UnknownPlayer { player: p, agents });
            }
        }
        let mut bad = None;
        self.walk(&mut |f| {
            if let Formula::Pref { lhs, rhs, .. } = f {
                if bad.is_none() && !(lhs.is_pltl() && rhs.is_pltl()) {
                    bad = Some(f.clone());
                }
            }
        });
        match bad {
            Some(f) => Err(Error::NonPltlOperand(f.to_string())),
            None => Ok(()),
        }
    }
}

/// `[theta] := H(I -> theta)`.
pub fn at_origin(theta: Formula) -> Formula {
    Formula::at_origin(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> Formula {
        parse(s, 3).unwrap()
    }

    #[test]
    fn subformulas_examples() {
        assert_eq!(p("p").subformulas(), vec![p("p")]);
        assert_eq!(p("p U q").subformulas(), vec![p("p"), p("q"), p("p U q")]);
        let got = p("F p1 & G !p2").subformulas();
        let want = ["p1", "F p1", "p2", "!p2", "G !p2", "F p1 & G !p2"].map(p);
        assert_eq!(got, want.to_vec());
    }

    #[test]
    fn vars_and_free_vars() {
        assert!(Formula::True.vars().is_empty());
        assert_eq!(p("lt(1, F p1, G !p1)").vars(), BTreeSet::from(["p1".to_string()]));
        let f = p("exists s. s & q");
        assert_eq!(f.vars(), BTreeSet::from(["s".to_string(), "q".to_string()]));
        assert_eq!(f.free_vars(), BTreeSet::from(["q".to_string()]));
    }

    #[test]
    fn substitution() {
        let m = |k: &str, v: Formula| BTreeMap::from([(k.to_string(), v)]);
        assert_eq!(p("p & q").substitute(&m("p", Formula::False)).unwrap(), p("false & q"));
        assert_eq!(
            p("exists p. p & q").substitute(&m("q", p("r"))).unwrap(),
            p("exists p. p & r")
        );
        let err = p("exists p. p & q").substitute(&m("q", p("p"))).unwrap_err();
        assert!(matches!(err, Error::Capture { ref binder, .. } if binder == "p"));
    }

    #[test]
    fn bound_atoms_are_not_substituted() {
        let m = BTreeMap::from([("p".to_string(), p("r"))]);
        assert_eq!(p("p & exists p. p").substitute(&m).unwrap(), p("r & exists p. p"));
    }

    #[test]
    fn classify_examples() {
        let c = p("F p").classify();
        assert!(c.is_future && c.is_past_free);
        assert!(!p("Y p").classify().is_future);
        assert!(p("<<1>> F p").classify().is_state);
        assert!(p("X p").classify().is_path);
        assert!(p("O p & H q").classify().is_pure_past);
    }

    #[test]
    fn desugar_uses_core_basis_only() {
        let f = p("init(F p) | [[1]] G q <-> (forall s. O s) & I & E X p");
        let core = f.desugar();
        assert!(!core.any(&|g| matches!(
            g,
            Formula::True
                | Formula::Init
                | Formula::Not(_)
                | Formula::And(..)
                | Formula::Or(..)
                | Formula::Iff(..)
                | Formula::Eventually(_)
                | Formula::Always(_)
                | Formula::Once(_)
                | Formula::Historically(_)
                | Formula::Dual(..)
                | Formula::Forall(..)
                | Formula::AtOrigin(_)
        )));
    }

    #[test]
    fn validate_rejects_branching_operands_and_bad_players() {
        assert!(p("lt(1, F p, G q)").validate(1).is_ok());
        assert!(matches!(p("lt(2, p, q)").validate(1), Err(Error::UnknownPlayer { .. })));
        assert!(matches!(p("lt(1, A F p, q)").validate(1), Err(Error::NonPltlOperand(_))));
    }

    #[test]
    fn coalition_set_ops() {
        let c = Coalition::new([3, 1, 3]);
        assert_eq!(c.players(), &[1, 3]);
        assert_eq!(c.complement(3), Coalition::new([2]));
        assert_eq!(c.subsets().len(), 4);
    }
}
