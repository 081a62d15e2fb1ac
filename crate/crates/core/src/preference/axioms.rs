use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::{Coalition, Formula, PrefKind};
use crate::normal_forms::gnf_over;
use crate::preference::ObjectiveSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomKind {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    O1,
    O2,
    O3,
    /// `P4` without its `E X psi` conjunct.
    P4Unsound,
    /// `phi nl psi -> !(phi lt psi)`, which fails when an operand is
    /// unrealizable.
    P3Converse,
}

impl AxiomKind {
    pub const ALL: [AxiomKind; 13] = [
        AxiomKind::P1,
        AxiomKind::P2,
        AxiomKind::P3,
        AxiomKind::P4,
        AxiomKind::P5,
        AxiomKind::P6,
        AxiomKind::P7,
        AxiomKind::P8,
        AxiomKind::O1,
        AxiomKind::O2,
        AxiomKind::O3,
        AxiomKind::P4Unsound,
        AxiomKind::P3Converse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomKind::P1 => "P1",
            AxiomKind::P2 => "P2",
            AxiomKind::P3 => "P3",
            AxiomKind::P4 => "P4",
            AxiomKind::P5 => "P5",
            AxiomKind::P6 => "P6",
            AxiomKind::P7 => "P7",
            AxiomKind::P8 => "P8",
            AxiomKind::O1 => "O1",
            AxiomKind::O2 => "O2",
            AxiomKind::O3 => "O3",
            AxiomKind::P4Unsound => "P4-unsound",
            AxiomKind::P3Converse => "P3-converse",
        }
    }

    /// Number of formula slots.
    pub fn arity(self) -> usize {
        match self {
            AxiomKind::P1 => 4,
            AxiomKind::P2 | AxiomKind::P4 | AxiomKind::P4Unsound => 3,
            AxiomKind::P3 | AxiomKind::P3Converse | AxiomKind::P6 | AxiomKind::P8 | AxiomKind::O1 => 2,
            AxiomKind::P5 => 1,
            AxiomKind::P7 | AxiomKind::O2 | AxiomKind::O3 => 0,
        }
    }

    /// Number of coalition-objective slots.
    pub fn objective_arity(self) -> usize {
        match self {
            AxiomKind::O1 => 1,
            AxiomKind::O3 => 2,
            _ => 0,
        }
    }

    fn uses_objectives(self) -> bool {
        matches!(self, AxiomKind::O1 | AxiomKind::O2 | AxiomKind::O3)
    }
}

impl fmt::Display for AxiomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AxiomKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::AxiomShape { axiom: s.to_string(), msg: "unknown axiom".into() })
    }
}

/// Arguments of an axiom instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slots {
    pub kind: PrefKind,
    pub gamma: Coalition,
    pub formulas: Vec<Formula>,
    /// Coalition objectives as index tuples in the coalition's player order.
    pub objectives: Vec<Vec<usize>>,
    /// `P7` operands as `(pi, phi)` pairs, left then right.
    pub separated: [Vec<(Formula, Formula)>; 2],
}

impl Slots {
    pub fn new(kind: PrefKind, gamma: Coalition, formulas: Vec<Formula>) -> Slots {
        Slots { kind, gamma, formulas, objectives: Vec::new(), separated: [Vec::new(), Vec::new()] }
    }

    pub fn with_objectives(mut self, objectives: Vec<Vec<usize>>) -> Slots {
        self.objectives = objectives;
        self
    }

    pub fn with_separated(mut self, left: Vec<(Formula, Formula)>, right: Vec<(Formula, Formula)>) -> Slots {
        self.separated = [left, right];
        self
    }
}

/// `AND_{i in gamma} a sigma_i b`.
pub fn coalition_pref(kind: PrefKind, gamma: &Coalition, a: Formula, b: Formula) -> Formula {
    Formula::conj(gamma.players().iter().map(|&i| Formula::pref(kind, i, a.clone(), b.clone())))
}

/// Turns past formulas `rho_1..rho_m` into `m + 1` mutually exclusive and
/// exhaustive guards: `rho_k` with all earlier ones negated, then the
/// negation of all.
pub fn partition(rhos: &[Formula]) -> Vec<Formula> {
    let mut out = Vec::with_capacity(rhos.len() + 1);
    for k in 0..=rhos.len() {
        let neg = rhos[..k].iter().map(|r| Formula::not(r.clone()));
        match rhos.get(k) {
            Some(r) => out.push(Formula::conj(std::iter::once(r.clone()).chain(neg))),
            None => out.push(Formula::conj(neg)),
        }
    }
    out
}

/// `[theta]` for a coalition objective.
fn bracket(sys: &ObjectiveSystem, gamma: &Coalition, idx: &[usize], axiom: AxiomKind) -> Result<Formula> {
    let shape = |msg: String| Error::AxiomShape { axiom: axiom.name().into(), msg };
    if idx.len() != gamma.len() {
        return Err(shape(format!("objective tuple has {} entries, coalition has {}", idx.len(), gamma.len())));
    }
    let mut parts = Vec::new();
    for (&i, &k) in gamma.players().iter().zip(idx) {
        let po = sys.player(i).ok_or(Error::UnknownPlayer { player: i, agents: sys.agents })?;
        let th = po.objectives.get(k).ok_or_else(|| shape(format!("player {i} has no objective {k}")))?;
        parts.push(th.clone());
    }
    Ok(Formula::at_origin(Formula::conj(parts)))
}

/// Every index tuple of coalition objectives.
fn all_tuples(sys: &ObjectiveSystem, gamma: &Coalition) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![vec![]];
    for &i in gamma.players() {
        let n = sys.player(i).ok_or(Error::UnknownPlayer { player: i, agents: sys.agents })?.len();
        out = out.into_iter().flat_map(|t| (0..n).map(move |k| [t.clone(), vec![k]].concat())).collect();
    }
    Ok(out)
}

/// The closed instance of `kind` over the given slots.
pub fn axiom_instance(kind: AxiomKind, slots: &Slots, sys: &ObjectiveSystem) -> Result<Formula> {
    let shape = |msg: String| Error::AxiomShape { axiom: kind.name().into(), msg };
    let gamma = &slots.gamma;
    if gamma.is_empty() {
        return Err(shape("coalition must be nonempty".into()));
    }
    if let Some(&i) = gamma.players().iter().find(|&&i| i == 0 || i > sys.agents) {
        return Err(Error::UnknownPlayer { player: i, agents: sys.agents });
    }
    if slots.formulas.len() != kind.arity() {
        return Err(shape(format!("expected {} formulas, got {}", kind.arity(), slots.formulas.len())));
    }
    if slots.objectives.len() != kind.objective_arity() {
        return Err(shape(format!(
            "expected {} objective tuples, got {}",
            kind.objective_arity(),
            slots.objectives.len()
        )));
    }
    if let Some(f) = slots.formulas.iter().find(|f| !f.is_pltl()) {
        return Err(Error::NonPltlOperand(f.to_string()));
    }
    if kind.uses_objectives() && !sys.is_validated() {
        return Err(Error::Objectives("objective system has not been validated".into()));
    }
    let s = slots.kind;
    let pref = |k: PrefKind, a: &Formula, b: &Formula| coalition_pref(k, gamma, a.clone(), b.clone());
    let ax = |a: &Formula| Formula::all_paths(Formula::next(a.clone()));
    let ex = |a: &Formula| Formula::some_path(Formula::next(a.clone()));
    let f = &slots.formulas;
    Ok(match kind {
        AxiomKind::P1 => {
            let (phi1, psi1, phi2, psi2) = (&f[0], &f[1], &f[2], &f[3]);
            Formula::implies(
                Formula::conj([
                    pref(s, phi1, psi1),
                    ax(&Formula::implies(phi2.clone(), phi1.clone())),
                    ax(&Formula::implies(psi2.clone(), psi1.clone())),
                ]),
                pref(s, phi2, psi2),
            )
        }
        AxiomKind::P2 => {
            let (a, b, c) = (&f[0], &f[1], &f[2]);
            let or = |x: &Formula, y: &Formula| Formula::or(x.clone(), y.clone());
            Formula::and(
                Formula::iff(Formula::and(pref(s, a, c), pref(s, b, c)), pref(s, &or(a, b), c)),
                Formula::iff(Formula::and(pref(s, a, b), pref(s, a, c)), pref(s, a, &or(b, c))),
            )
        }
        AxiomKind::P3 => {
            let (phi, psi) = (&f[0], &f[1]);
            let lt = pref(PrefKind::Less, phi, psi);
            Formula::and(
                Formula::implies(lt.clone(), ax(&Formula::not(Formula::and(phi.clone(), psi.clone())))),
                Formula::implies(lt, pref(PrefKind::NotLess, psi, phi)),
            )
        }
        AxiomKind::P3Converse => {
            let (phi, psi) = (&f[0], &f[1]);
            Formula::implies(pref(PrefKind::NotLess, phi, psi), Formula::not(pref(PrefKind::Less, phi, psi)))
        }
        AxiomKind::P4 | AxiomKind::P4Unsound => {
            let (phi, psi, chi) = (&f[0], &f[1], &f[2]);
            let mut premise = vec![pref(PrefKind::Less, phi, psi), pref(PrefKind::Less, psi, chi)];
            if kind == AxiomKind::P4 {
                premise.push(ex(psi));
            }
            Formula::implies(Formula::conj(premise), pref(PrefKind::Less, phi, chi))
        }
        AxiomKind::P5 => Formula::and(pref(s, &Formula::False, &f[0]), pref(s, &f[0], &Formula::False)),
        AxiomKind::P6 => {
            let inner = pref(s, &Formula::at_origin(f[0].clone()), &Formula::at_origin(f[1].clone()));
            Formula::iff(inner.clone(), Formula::all_paths(Formula::always(inner)))
        }
        AxiomKind::P7 => {
            let [left, right] = &slots.separated;
            if left.is_empty() || right.is_empty() {
                return Err(shape("both operands need at least one separated conjunct".into()));
            }
            for (pi, phi) in left.iter().chain(right) {
                if !pi.classify().is_pure_past {
                    return Err(shape(format!("guard {pi} is not a past formula")));
                }
                if !phi.classify().is_future {
                    return Err(shape(format!("{phi} is not a future formula")));
                }
            }
            let operand = |side: &[(Formula, Formula)]| {
                Formula::conj(
                    side.iter().map(|(pi, phi)| Formula::implies(Formula::yesterday(pi.clone()), phi.clone())),
                )
            };
            let rhs = Formula::conj(left.iter().flat_map(|(pi1, phi1)| {
                right.iter().map(move |(pi2, phi2)| {
                    Formula::implies(Formula::and(pi1.clone(), pi2.clone()), pref(s, phi1, phi2))
                })
            }));
            Formula::iff(pref(s, &operand(left), &operand(right)), rhs)
        }
        AxiomKind::P8 => {
            let (phi, psi) = (&f[0], &f[1]);
            for g in [phi, psi] {
                if !g.classify().is_future {
                    return Err(shape(format!("{g} is not a future formula")));
                }
            }
            let ap = phi.free_vars().union(&psi.free_vars()).cloned().collect();
            let gp = gnf_over(phi, &ap)?;
            let gq = gnf_over(psi, &ap)?;
            let step = Formula::disj(
                gp.entries
                    .iter()
                    .zip(&gq.entries)
                    .map(|((g, dp), (_, dq))| Formula::and(g.to_formula(), pref(s, dp, dq))),
            );
            Formula::iff(pref(s, &gp.to_formula(), &gq.to_formula()), ax(&step))
        }
        AxiomKind::O1 => {
            let (phi, psi) = (&f[0], &f[1]);
            let th = bracket(sys, gamma, &slots.objectives[0], kind)?;
            let or = |x: &Formula| Formula::or(x.clone(), th.clone());
            Formula::and(
                Formula::implies(
                    ex(&Formula::and(phi.clone(), th.clone())),
                    Formula::iff(pref(s, phi, psi), pref(s, &or(phi), psi)),
                ),
                Formula::implies(
                    ex(&Formula::and(psi.clone(), th.clone())),
                    Formula::iff(pref(s, phi, psi), pref(s, phi, &or(psi))),
                ),
            )
        }
        AxiomKind::O2 => {
            let tuples = all_tuples(sys, gamma)?;
            let brackets = tuples.iter().map(|t| bracket(sys, gamma, t, kind)).collect::<Result<Vec<_>>>()?;
            let cover = Formula::all_paths(Formula::disj(brackets.iter().cloned()));
            let mut pairs = Vec::new();
            for (x, a) in brackets.iter().enumerate() {
                for b in &brackets[x + 1..] {
                    let same = Formula::all_paths(Formula::always(Formula::iff(a.clone(), b.clone())));
                    let apart =
                        Formula::all_paths(Formula::always(Formula::not(Formula::and(a.clone(), b.clone()))));
                    pairs.push(Formula::or(same, apart));
                }
            }
            Formula::and(cover, Formula::conj(pairs))
        }
        AxiomKind::O3 => {
            let (a, b) = (&slots.objectives[0], &slots.objectives[1]);
            let players = gamma.players();
            let mut less = Vec::new();
            for (k, &i) in players.iter().enumerate() {
                let po = sys.player(i).ok_or(Error::UnknownPlayer { player: i, agents: sys.agents })?;
                if a.len() != players.len() || b.len() != players.len() || a[k] >= po.len() || b[k] >= po.len() {
                    return Err(shape("objective tuple out of range".into()));
                }
                less.push(po.less(a[k], b[k]));
            }
            let kind_here = if less.iter().all(|&x| x) {
                PrefKind::Less
            } else if less.iter().all(|&x| !x) {
                PrefKind::NotLess
            } else {
                return Err(shape("the pair is ordered for some members of the coalition only".into()));
            };
            pref(kind_here, &bracket(sys, gamma, a, kind)?, &bracket(sys, gamma, b, kind)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> Formula {
        parse(s, 2).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for k in AxiomKind::ALL {
            assert_eq!(k.name().parse::<AxiomKind>().unwrap(), k);
        }
        assert!("P9".parse::<AxiomKind>().is_err());
    }

    #[test]
    fn shapes() {
        let (_, sys) = crate::shipped::enemies2().unwrap();
        let one = Coalition::new([1]);
        let s5 = Slots::new(PrefKind::Less, one.clone(), vec![p("F p1")]);
        assert_eq!(axiom_instance(AxiomKind::P5, &s5, &sys).unwrap(), p("lt(1, false, F p1) & lt(1, F p1, false)"));
        let s3 = Slots::new(PrefKind::Less, one.clone(), vec![p("F p1"), p("G p2")]);
        let p3 = axiom_instance(AxiomKind::P3, &s3, &sys).unwrap();
        assert!(p3.to_string().contains("A"));
        assert!(matches!(axiom_instance(AxiomKind::P1, &s3, &sys), Err(Error::AxiomShape { .. })));
        let bad = Slots::new(PrefKind::Less, one.clone(), vec![p("F p1"), p("<<1>> F p2")]);
        assert!(matches!(axiom_instance(AxiomKind::P3, &bad, &sys), Err(Error::NonPltlOperand(_))));
        let s7 = Slots::new(PrefKind::Less, one.clone(), vec![])
            .with_separated(vec![(p("X p1"), p("F p1"))], vec![(Formula::True, p("F p2"))]);
        assert!(matches!(axiom_instance(AxiomKind::P7, &s7, &sys), Err(Error::AxiomShape { .. })));
        let s8 = Slots::new(PrefKind::Less, one.clone(), vec![p("F p1"), p("O p2")]);
        assert!(matches!(axiom_instance(AxiomKind::P8, &s8, &sys), Err(Error::AxiomShape { .. })));
        // O axioms need a validated system.
        let so = Slots::new(PrefKind::Less, one, vec![]).with_objectives(vec![vec![0], vec![1]]);
        assert!(matches!(axiom_instance(AxiomKind::O3, &so, &sys), Err(Error::Objectives(_))));
    }

    #[test]
    fn partition_is_exclusive_and_exhaustive() {
        use crate::normal_forms::simplify;
        let rhos = [p("O a"), p("Y b"), p("H c")];
        let parts = partition(&rhos);
        assert_eq!(parts.len(), 4);
        assert_eq!(simplify(&Formula::disj(parts.iter().cloned())), Formula::True);
        for (x, a) in parts.iter().enumerate() {
            for b in &parts[x + 1..] {
                assert_eq!(simplify(&Formula::and(a.clone(), b.clone())), Formula::False);
            }
        }
    }
}
