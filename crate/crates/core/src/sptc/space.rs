use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{partitions, CoalitionStructure, Decision, Sptc};
use crate::game::ExpandedCgm;

pub const DEFAULT_CAP: usize = 200_000;

/// Memoryless profiles over the states of `M̄`, indexed in mixed radix with
/// the first state most significant; at each state the digit is
/// `joint * |partitions| + partition`. Spaces larger than the cap are
/// sampled uniformly with a seeded generator instead.
#[derive(Clone, Debug)]
pub struct SptcSpace<'a> {
    ex: &'a ExpandedCgm,
    structures: Vec<CoalitionStructure>,
    radix: u128,
    /// `None` when the size overflows `u128`.
    size: Option<u128>,
    cap: usize,
    seed: u64,
}

impl<'a> SptcSpace<'a> {
    pub fn new(ex: &'a ExpandedCgm, cap: usize, seed: u64) -> Self {
        let structures = partitions(ex.model.agents());
        let radix = (ex.model.joint_count() * structures.len()) as u128;
        let size = (0..ex.model.num_states()).try_fold(1u128, |acc, _| acc.checked_mul(radix));
        SptcSpace { ex, structures, radix, size, cap, seed }
    }

    pub fn size(&self) -> Option<u128> {
        self.size
    }

    pub fn exhaustive(&self) -> bool {
        self.size.is_some_and(|n| n <= self.cap as u128)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The profile with the given index.
    pub fn profile(&self, mut index: u128) -> Sptc {
        let n = self.ex.model.num_states();
        let p = self.structures.len() as u128;
        let mut decisions = vec![None; n];
        for u in (0..n).rev() {
            let digit = index % self.radix;
            index /= self.radix;
            decisions[u] = Some(Decision {
                joint: (digit / p) as usize,
                structure: self.structures[(digit % p) as usize].clone(),
            });
        }
        Sptc::memoryless(self.ex, decisions.into_iter().map(Option::unwrap).collect())
            .expect("decoded decisions are in range")
    }

    /// Indices visited: all of them in order, or `cap` seeded samples.
    pub fn indices(&self) -> Vec<u128> {
        if self.exhaustive() {
            return (0..self.size.unwrap()).collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.ex.model.num_states() as u32;
        (0..self.cap)
            .map(|_| match self.size {
                Some(size) => rng.gen_range(0..size),
                // Digit by digit when the size does not fit.
                None => (0..n).fold(0u128, |acc, _| {
                    acc.wrapping_mul(self.radix).wrapping_add(rng.gen_range(0..self.radix))
                }),
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u128, Sptc)> + '_ {
        self.indices().into_iter().map(move |i| (i, self.profile(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{expand, Cgm};
    use std::collections::HashSet;

    fn one_player() -> Cgm {
        Cgm::parse(
            "states: a b\ninit: a\nplayers: 1\nactions 1: x y\ntrans: a (x) -> b\ntrans: a (y) -> a\n\
             trans: b (*) -> b\n",
            "m",
        )
        .unwrap()
    }

    #[test]
    fn exhaustive_order_and_distinctness() {
        let ex = expand(&one_player()).unwrap();
        let space = SptcSpace::new(&ex, DEFAULT_CAP, 0);
        let n = ex.model.num_states() as u32;
        assert_eq!(space.size(), Some(2u128.pow(n)));
        assert!(space.exhaustive());
        let all: Vec<_> = space.iter().collect();
        assert_eq!(all[0].1.state_decisions().iter().map(|d| d.joint).collect::<Vec<_>>(), vec![0; n as usize]);
        // Index 1 changes the last state only.
        let last = all[1].1.state_decisions();
        assert_eq!(last[n as usize - 1].joint, 1);
        assert!(last[..n as usize - 1].iter().all(|d| d.joint == 0));
        let distinct: HashSet<String> = all.iter().map(|(_, s)| s.to_text(&ex)).collect();
        assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn sampling_is_seeded() {
        let ex = expand(&one_player()).unwrap();
        let a = SptcSpace::new(&ex, 3, 9);
        assert!(!a.exhaustive());
        assert_eq!(a.indices(), SptcSpace::new(&ex, 3, 9).indices());
        assert_eq!(a.indices().len(), 3);
    }
}
