//! The models and objective systems that ship with the crate.

use crate::error::Result;
use crate::game::Cgm;
use crate::preference::ObjectiveSystem;

pub const ENEMIES2_CGM: &str = include_str!("../data/enemies2.cgm");
pub const ENEMIES2_PRF: &str = include_str!("../data/enemies2.prf");
pub const ENEMIES3_CGM: &str = include_str!("../data/enemies3.cgm");
pub const ENEMIES3_PRF: &str = include_str!("../data/enemies3.prf");
pub const SINGLE_CGM: &str = include_str!("../data/single.cgm");
pub const SINGLE_PRF: &str = include_str!("../data/single.prf");
pub const SPLIT_CGM: &str = include_str!("../data/split.cgm");
pub const SPLIT_PRF: &str = include_str!("../data/split.prf");

/// The two-player latch model with its objectives.
pub fn enemies2() -> Result<(Cgm, ObjectiveSystem)> {
    load(ENEMIES2_CGM, ENEMIES2_PRF, "enemies2")
}

fn load(cgm: &str, prf: &str, name: &str) -> Result<(Cgm, ObjectiveSystem)> {
    let m = Cgm::parse(cgm, &format!("{name}.cgm"))?;
    let s = ObjectiveSystem::parse(prf, m.agents(), &format!("{name}.prf"))?;
    Ok((m, s))
}

/// One player whose best play passes through every state of the expansion,
/// so exactly one memoryless profile is dominant.
pub fn single() -> Result<(Cgm, ObjectiveSystem)> {
    load(SINGLE_CGM, SINGLE_PRF, "single")
}

/// One player with two reachable, unordered classes: nothing is dominant.
pub fn split() -> Result<(Cgm, ObjectiveSystem)> {
    load(SPLIT_CGM, SPLIT_PRF, "split")
}

/// The three-player latch model with its objectives.
pub fn enemies3() -> Result<(Cgm, ObjectiveSystem)> {
    load(ENEMIES3_CGM, ENEMIES3_PRF, "enemies3")
}
