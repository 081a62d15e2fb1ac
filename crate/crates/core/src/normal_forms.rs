//! Guards, derivatives of future formulas (the guarded normal form), their
//! closure, and products of per-player objective lists.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::formula::{Coalition, Formula};
use crate::preference::ObjectiveSystem;

pub const DEFAULT_GUARD_LIMIT: usize = 10;
pub const DEFAULT_CLOSURE_LIMIT: usize = 10_000;
/// Past this many clauses the boolean normalizer keeps the structural form.
const DNF_CLAUSE_CAP: usize = 2048;

/// A complete conjunction of literals over a sorted vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    signs: BTreeMap<String, bool>,
}

impl Guard {
    pub fn new(signs: BTreeMap<String, bool>) -> Self {
        Guard { signs }
    }

    pub fn sign(&self, p: &str) -> Option<bool> {
        self.signs.get(p).copied()
    }

    pub fn signs(&self) -> &BTreeMap<String, bool> {
        &self.signs
    }

    /// Guard matching a given valuation (atoms outside the vocabulary ignored).
    pub fn of_valuation(ap: &BTreeSet<String>, holds: impl Fn(&str) -> bool) -> Guard {
        Guard { signs: ap.iter().map(|p| (p.clone(), holds(p))).collect() }
    }

    pub fn to_formula(&self) -> Formula {
        Formula::conj(self.signs.iter().map(|(p, &pos)| {
            let a = Formula::atom(p.as_str());
            if pos {
                a
            } else {
                Formula::not(a)
            }
        }))
    }
}

/// `(g_k, phi^t_k)` for every guard, in guard order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnfForm {
    pub entries: Vec<(Guard, Formula)>,
}

impl GnfForm {
    /// `OR_k g_k & X phi^t_k`.
    pub fn to_formula(&self) -> Formula {
        Formula::disj(
            self.entries
                .iter()
                .map(|(g, t)| Formula::and(g.to_formula(), Formula::next(t.clone()))),
        )
    }
}

/// All `2^|ap|` guards, negative sign first, first proposition most significant.
pub fn guards(ap: &BTreeSet<String>) -> Result<Vec<Guard>> {
    guards_with_limit(ap, DEFAULT_GUARD_LIMIT)
}

pub fn guards_with_limit(ap: &BTreeSet<String>, limit: usize) -> Result<Vec<Guard>> {
    if ap.len() > limit {
        return Err(Error::VocabularyTooLarge { size: ap.len(), limit });
    }
    let names: Vec<&String> = ap.iter().collect();
    let n = names.len();
    Ok((0u32..(1u32 << n))
        .map(|mask| Guard {
            signs: names
                .iter()
                .enumerate()
                .map(|(i, p)| ((*p).clone(), mask & (1 << (n - 1 - i)) != 0))
                .collect(),
        })
        .collect())
}

fn check_future(phi: &Formula) -> Result<()> {
    if phi.classify().is_future {
        Ok(())
    } else {
        Err(Error::NotFuture(phi.to_string()))
    }
}

/// `phi^t_g`: what must hold from the next position on, given that the
/// current position satisfies `g`.
pub fn derivative(phi: &Formula, g: &Guard) -> Result<Formula> {
    check_future(phi)?;
    Ok(simplify(&deriv(phi, g)?))
}

fn deriv(phi: &Formula, g: &Guard) -> Result<Formula> {
    use Formula::*;
    Ok(match phi {
        False => False,
        True => True,
        Atom(p) => match g.sign(p) {
            Some(true) => True,
            Some(false) => False,
            None => return Err(Error::OutsideVocabulary(p.clone())),
        },
        Not(a) => Formula::not(deriv(a, g)?),
        And(a, b) => Formula::and(deriv(a, g)?, deriv(b, g)?),
        Or(a, b) => Formula::or(deriv(a, g)?, deriv(b, g)?),
        Implies(a, b) => Formula::implies(deriv(a, g)?, deriv(b, g)?),
        Iff(a, b) => Formula::iff(deriv(a, g)?, deriv(b, g)?),
        Next(a) => (**a).clone(),
        Until(a, b) => Formula::or(deriv(b, g)?, Formula::and(deriv(a, g)?, phi.clone())),
        Eventually(a) => Formula::or(deriv(a, g)?, phi.clone()),
        Always(a) => Formula::and(deriv(a, g)?, phi.clone()),
        _ => return Err(Error::NotFuture(phi.to_string())),
    })
}

/// Guarded normal form of `phi` over its own free atoms.
pub fn gnf(phi: &Formula) -> Result<GnfForm> {
    gnf_over(phi, &phi.free_vars())
}

pub fn gnf_over(phi: &Formula, ap: &BTreeSet<String>) -> Result<GnfForm> {
    check_future(phi)?;
    let entries = guards(ap)?
        .into_iter()
        .map(|g| {
            let t = derivative(phi, &g)?;
            Ok((g, t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GnfForm { entries })
}

/// Least set containing the simplified inputs and closed under derivatives
/// by every guard over `ap` (the inputs' free atoms when `None`).
pub fn derivative_closure(
    phis: &[Formula],
    ap: Option<&BTreeSet<String>>,
    limit: usize,
) -> Result<BTreeSet<Formula>> {
    for f in phis {
        check_future(f)?;
    }
    let vocab: BTreeSet<String> = match ap {
        Some(a) => a.clone(),
        None => phis.iter().flat_map(|f| f.free_vars()).collect(),
    };
    let gs = guards(&vocab)?;
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for f in phis {
        let s = simplify(f);
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(f) = queue.pop_front() {
        for g in &gs {
            let d = simplify(&deriv(&f, g)?);
            if !seen.contains(&d) {
                if seen.len() >= limit {
                    return Err(Error::ClosureLimit { limit });
                }
                seen.insert(d.clone());
                queue.push_back(d);
            }
        }
    }
    Ok(seen)
}

type Clause = BTreeSet<(Formula, bool)>;

/// Boolean normalization: the boolean skeleton is brought to a reduced DNF
/// over non-boolean literals (contradictory and subsumed clauses dropped);
/// arguments of temporal operators are normalized recursively.
pub fn simplify(f: &Formula) -> Formula {
    match dnf(f) {
        Some(clauses) if is_tautology(&clauses) => Formula::True,
        Some(clauses) => from_dnf(&clauses),
        None => f.map_children(simplify),
    }
}

/// Brute-force check over the clause literals, skipped above 12 of them.
fn is_tautology(clauses: &[Clause]) -> bool {
    let lits: Vec<&Formula> =
        clauses.iter().flatten().map(|(l, _)| l).collect::<BTreeSet<_>>().into_iter().collect();
    if clauses.is_empty() || lits.len() > 12 {
        return false;
    }
    (0u32..1 << lits.len()).all(|bits| {
        clauses.iter().any(|c| {
            c.iter().all(|(l, s)| {
                let k = lits.iter().position(|x| *x == l).unwrap();
                (bits >> k & 1 == 1) == *s
            })
        })
    })
}

/// Constant folding for a temporal or modal node whose arguments are
/// already simplified.
fn fold(f: Formula) -> Formula {
    use Formula::*;
    match &f {
        Next(a) | Eventually(a) | Always(a) | Once(a) | Historically(a) | AtOrigin(a)
            if matches!(**a, True | False) =>
        {
            (**a).clone()
        }
        Yesterday(a) if **a == False => False,
        Until(_, b) | Since(_, b) if matches!(**b, True | False) => (**b).clone(),
        Until(a, b) if **a == False => (**b).clone(),
        Since(a, b) if **a == False => (**b).clone(),
        Ability(c, a) if c.is_empty() && **a == True => True,
        Dual(_, a) if **a == False => False,
        Pref { lhs, rhs, .. } if **lhs == False || **rhs == False => True,
        _ => f,
    }
}

fn is_boolean(f: &Formula) -> bool {
    use Formula::*;
    matches!(f, False | True | Not(_) | And(..) | Or(..) | Implies(..) | Iff(..))
}

fn reduce(mut clauses: Vec<Clause>) -> Option<Vec<Clause>> {
    clauses.retain(|c| !c.iter().any(|(l, s)| c.contains(&(l.clone(), !s))));
    clauses.sort_by_key(|c| c.len());
    let mut out: Vec<Clause> = Vec::new();
    for c in clauses {
        if !out.iter().any(|d| d.is_subset(&c)) {
            out.push(c);
        }
    }
    if out.len() > DNF_CLAUSE_CAP {
        return None;
    }
    out.sort();
    Some(out)
}

fn product(a: &[Clause], b: &[Clause]) -> Option<Vec<Clause>> {
    if a.len().saturating_mul(b.len()) > DNF_CLAUSE_CAP * 4 {
        return None;
    }
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x.union(y).cloned().collect());
        }
    }
    reduce(out)
}

fn negate(a: &[Clause]) -> Option<Vec<Clause>> {
    // Not of a disjunction of clauses: conjunction of negated clauses.
    let mut acc: Vec<Clause> = vec![Clause::new()];
    for c in a {
        let alt: Vec<Clause> =
            c.iter().map(|(l, s)| Clause::from([(l.clone(), !s)])).collect();
        acc = product(&acc, &alt)?;
    }
    Some(acc)
}

fn dnf(f: &Formula) -> Option<Vec<Clause>> {
    use Formula::*;
    match f {
        False => Some(vec![]),
        True => Some(vec![Clause::new()]),
        Not(a) => negate(&dnf(a)?),
        And(a, b) => product(&dnf(a)?, &dnf(b)?),
        Or(a, b) => {
            let mut v = dnf(a)?;
            v.extend(dnf(b)?);
            reduce(v)
        }
        Implies(a, b) => {
            let mut v = negate(&dnf(a)?)?;
            v.extend(dnf(b)?);
            reduce(v)
        }
        Iff(a, b) => {
            let (da, db) = (dnf(a)?, dnf(b)?);
            let mut v = product(&da, &db)?;
            v.extend(product(&negate(&da)?, &negate(&db)?)?);
            reduce(v)
        }
        _ => {
            debug_assert!(!is_boolean(f));
            match fold(f.map_children(simplify)) {
                False => Some(vec![]),
                True => Some(vec![Clause::new()]),
                g => Some(vec![Clause::from([(g, true)])]),
            }
        }
    }
}

fn from_dnf(clauses: &[Clause]) -> Formula {
    Formula::disj(clauses.iter().map(|c| {
        Formula::conj(c.iter().map(|(l, s)| if *s { l.clone() } else { Formula::not(l.clone()) }))
    }))
}

/// All conjunctions `AND_{i in G} theta_i`, first member of `gamma` most
/// significant. Paired with the index tuple each conjunction came from.
pub fn coalition_objective_tuples(
    systems: &ObjectiveSystem,
    gamma: &Coalition,
) -> Result<Vec<(Vec<usize>, Formula)>> {
    if gamma.is_empty() {
        return Err(Error::Objectives("coalition must be nonempty".into()));
    }
    let mut lists = Vec::new();
    for &i in gamma.players() {
        let po = systems
            .player(i)
            .ok_or(Error::UnknownPlayer { player: i, agents: systems.agents })?;
        lists.push(po.objectives.clone());
    }
    let mut out: Vec<(Vec<usize>, Vec<Formula>)> = vec![(vec![], vec![])];
    for list in &lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for (idx, fs) in &out {
            for (k, th) in list.iter().enumerate() {
                let mut idx2 = idx.clone();
                idx2.push(k);
                let mut fs2 = fs.clone();
                fs2.push(th.clone());
                next.push((idx2, fs2));
            }
        }
        out = next;
    }
    Ok(out.into_iter().map(|(idx, fs)| (idx, Formula::conj(fs))).collect())
}

pub fn coalition_objectives(systems: &ObjectiveSystem, gamma: &Coalition) -> Result<Vec<Formula>> {
    Ok(coalition_objective_tuples(systems, gamma)?.into_iter().map(|(_, f)| f).collect())
}
