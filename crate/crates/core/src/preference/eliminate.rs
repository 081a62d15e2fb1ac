use crate::error::{Error, Result};
use crate::formula::{Formula, PrefKind};
use crate::preference::ObjectiveSystem;

/// How each preference node is rewritten.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EliminationStyle {
    /// The disjunction over the realizable-objective sets of both operands,
    /// each disjunct fixing them exactly, with the order part resolved.
    #[default]
    Literal,
    /// One conjunct per pair of objectives the order rules out: the two
    /// must not be jointly realizable.
    Pairwise,
}

/// Objective count above which the literal expansion is refused.
pub const LITERAL_LIMIT: usize = 6;

/// `E X([theta] & phi)`.
fn realizable(theta: &Formula, phi: &Formula) -> Formula {
    Formula::some_path(Formula::next(Formula::and(Formula::at_origin(theta.clone()), phi.clone())))
}

/// Whether `[a] sigma [b]` holds when both are realizable.
fn resolved(kind: PrefKind, less: bool) -> bool {
    match kind {
        PrefKind::Less => less,
        PrefKind::NotLess => !less,
    }
}

/// Replaces every preference node by a preference-free equivalent built
/// from realizability literals. The system must have been validated.
pub fn eliminate(f: &Formula, sys: &ObjectiveSystem, style: EliminationStyle) -> Result<Formula> {
    if !sys.is_validated() {
        return Err(Error::Objectives("objective system has not been validated".into()));
    }
    rewrite(f, sys, style)
}

fn rewrite(f: &Formula, sys: &ObjectiveSystem, style: EliminationStyle) -> Result<Formula> {
    match f {
        Formula::Pref { kind, player, lhs, rhs } => {
            if !lhs.is_pltl() || !rhs.is_pltl() {
                return Err(Error::NonPltlOperand(f.to_string()));
            }
            let po = sys.player(*player).ok_or(Error::UnknownPlayer { player: *player, agents: sys.agents })?;
            let n = po.len();
            let lit = |k: usize, phi: &Formula| realizable(&po.objectives[k], phi);
            match style {
                EliminationStyle::Pairwise => {
                    let mut conj = Vec::new();
                    for a in 0..n {
                        for b in 0..n {
                            if !resolved(*kind, po.less(a, b)) {
                                conj.push(Formula::not(Formula::and(lit(a, lhs), lit(b, rhs))));
                            }
                        }
                    }
                    Ok(Formula::conj(conj))
                }
                EliminationStyle::Literal => {
                    if n > LITERAL_LIMIT {
                        return Err(Error::Budget { needed: 1 << n, budget: 1 << LITERAL_LIMIT });
                    }
                    let absent = |k: usize, phi: &Formula| {
                        Formula::all_paths(Formula::not(Formula::next(Formula::and(
                            Formula::at_origin(po.objectives[k].clone()),
                            phi.clone(),
                        ))))
                    };
                    let exact = |set: u32, phi: &Formula| {
                        Formula::conj((0..n).map(|k| if set >> k & 1 == 1 { lit(k, phi) } else { absent(k, phi) }))
                    };
                    // For a fixed left set, the disjunction over the right sets
                    // compatible with it collapses to forbidding the others.
                    let mut disj = Vec::new();
                    for s1 in 0u32..1 << n {
                        let forbidden = (0..n).filter(|&b| {
                            (0..n).any(|a| s1 >> a & 1 == 1 && !resolved(*kind, po.less(a, b)))
                        });
                        let rhs_part = Formula::conj(forbidden.map(|b| absent(b, rhs)));
                        disj.push(Formula::and(exact(s1, lhs), rhs_part));
                    }
                    Ok(Formula::disj(disj))
                }
            }
        }
        _ => {
            let mut err = None;
            let out = f.map_children(|c| match rewrite(c, sys, style) {
                Ok(g) => g,
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
