//! Per-trial random streams and random subsets.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sumprod_core::energy::FpSet;
use sumprod_core::group::{ElementCode, GroupDesc};
use sumprod_core::set::GroupSet;

use crate::config::Scenario;

/// The stream for `(seed, scenario, sub-experiment, trial)`. Streams do
/// not depend on scheduling, so results are identical for any pool size.
pub fn trial_rng(seed: u64, scenario: Scenario, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&scenario.id().to_le_bytes());
    key[16..24].copy_from_slice(&stream.to_le_bytes());
    key[24..].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// A uniform `size`-subset of the group.
pub fn random_group_set(rng: &mut impl Rng, group: GroupDesc, size: usize) -> GroupSet {
    let order = group.order() as usize;
    let picked = sample(rng, order, size.min(order));
    GroupSet::new(group, picked.into_iter().map(|c| ElementCode(c as u64))).expect("codes below the order")
}

/// A uniform `size`-subset of an explicit pool.
pub fn random_subset_of<T: Copy>(rng: &mut impl Rng, pool: &[T], size: usize) -> Vec<T> {
    let mut idx = sample(rng, pool.len(), size.min(pool.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| pool[i]).collect()
}

/// A uniform `size`-subset of F_p.
pub fn random_fp_set(rng: &mut impl Rng, p: u64, size: usize) -> FpSet {
    let picked = sample(rng, p as usize, size.min(p as usize));
    FpSet::new(p, picked.into_iter().map(|x| x as u64)).expect("residues below p")
}

/// Raw residues, for building brick factors.
pub fn random_residues(rng: &mut impl Rng, p: u64, size: usize) -> Vec<u64> {
    random_fp_set(rng, p, size).elems().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(1, Scenario::Freiman, 0, 5).gen();
        let b: u64 = trial_rng(1, Scenario::Freiman, 0, 5).gen();
        let c: u64 = trial_rng(1, Scenario::Freiman, 0, 6).gen();
        let d: u64 = trial_rng(1, Scenario::SignedCover, 0, 5).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn subsets_have_the_requested_size() {
        let mut rng = trial_rng(0, Scenario::Selftest, 0, 0);
        let g = GroupDesc::heisenberg(5, 1).unwrap();
        assert_eq!(random_group_set(&mut rng, g, 40).len(), 40);
        assert_eq!(random_group_set(&mut rng, g, 500).len(), 125);
        assert_eq!(random_fp_set(&mut rng, 7, 4).len(), 4);
        assert_eq!(random_subset_of(&mut rng, &[1, 2, 3], 2).len(), 2);
    }
}
