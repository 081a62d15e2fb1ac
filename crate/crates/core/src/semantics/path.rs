//! Linear-time evaluation on ultimately periodic plays.

use crate::error::Result;
use crate::formula::Formula;
use crate::game::{Cgm, Lasso};
use crate::upw::Upw;

/// Whether `f` is handled by [`word`] itself rather than passed to the leaf
/// resolver.
pub fn is_linear_connective(f: &Formula) -> bool {
    use Formula::*;
    matches!(
        f,
        False
            | True
            | Init
            | Not(_)
            | And(..)
            | Or(..)
            | Implies(..)
            | Iff(..)
            | Next(_)
            | Until(..)
            | Eventually(_)
            | Always(_)
            | Yesterday(_)
            | Since(..)
            | Once(_)
            | Historically(_)
            | AtOrigin(_)
    )
}

/// Truth word of `f` along a play. Atoms and maximal state subformulas
/// (quantifiers, coalition modalities, preferences) are resolved by `leaf`.
pub fn word(f: &Formula, leaf: &mut dyn FnMut(&Formula) -> Result<Upw>) -> Result<Upw> {
    use Formula::*;
    let w = match f {
        False => Upw::constant(false),
        True => Upw::constant(true),
        Init => Upw::new(vec![true], vec![false]),
        Not(a) => word(a, leaf)?.not(),
        And(a, b) => word(a, leaf)?.and(&word(b, leaf)?),
        Or(a, b) => word(a, leaf)?.or(&word(b, leaf)?),
        Implies(a, b) => word(a, leaf)?.implies(&word(b, leaf)?),
        Iff(a, b) => word(a, leaf)?.iff(&word(b, leaf)?),
        Next(a) => word(a, leaf)?.next(),
        Until(a, b) => word(a, leaf)?.until(&word(b, leaf)?),
        Eventually(a) => word(a, leaf)?.eventually(),
        Always(a) => word(a, leaf)?.always(),
        Yesterday(a) => word(a, leaf)?.yesterday(),
        Since(a, b) => word(a, leaf)?.since(&word(b, leaf)?),
        Once(a) => word(a, leaf)?.once(),
        Historically(a) => word(a, leaf)?.historically(),
        // H(I -> a) only ever looks at position 0.
        AtOrigin(a) => Upw::constant(word(a, leaf)?.at(0)),
        _ => leaf(f)?,
    };
    Ok(w.canonical())
}

/// The word of a state predicate along a lasso.
pub fn state_word(l: &Lasso, pred: impl Fn(usize) -> bool) -> Upw {
    Upw::new(
        l.stem.iter().map(|&w| pred(w)).collect(),
        l.cycle.iter().map(|&w| pred(w)).collect(),
    )
}

/// Evaluates a PLTL formula on a play of `m` at position `k`, reading atoms
/// from the model's labels.
pub fn eval_pltl(m: &Cgm, l: &Lasso, k: usize, f: &Formula) -> Result<bool> {
    Ok(pltl_word(m, l, f)?.at(k))
}

pub fn pltl_word(m: &Cgm, l: &Lasso, f: &Formula) -> Result<Upw> {
    word(f, &mut |leaf| match leaf {
        Formula::Atom(p) => Ok(state_word(l, |w| m.holds(w, p))),
        other => Err(crate::error::Error::NonPltlOperand(other.to_string())),
    })
}
