//! Reproducible random almost-group automata.
//!
//! The generator is ChaCha8 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64(seed)`. Shuffles are Fisher–Yates driven by
//! `gen_range` from `rand` 0.8. Both crates are pinned in the manifest, so
//! the same `(n, m, seed)` yields the same automaton on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Automaton, Letter, Transformation};
use crate::error::{Error, Result};
use crate::state_set::{StateId, MAX_STATES};

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random permutation of `0..n`.
pub fn random_permutation<R: Rng>(n: usize, rng: &mut R) -> Vec<StateId> {
    let mut v: Vec<StateId> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
    v
}

/// Identity with `p ↦ q` for distinct random `p, q`, optionally followed by a
/// random permutation.
pub fn random_defect_letter<R: Rng>(n: usize, post_permute: bool, rng: &mut R) -> Transformation {
    let p = rng.gen_range(0..n);
    let mut q = rng.gen_range(0..n - 1);
    if q >= p {
        q += 1;
    }
    let mut images: Vec<StateId> = (0..n).collect();
    images[p] = q;
    if post_permute {
        let pi = random_permutation(n, rng);
        images.iter_mut().for_each(|x| *x = pi[*x]);
    }
    Transformation::from_images(images).expect("in range")
}

/// `m` random permutation letters `b, c, …` plus a defect-1 letter `a`
/// (listed first).
pub fn random_almost_group(n: usize, m: usize, seed: u64, post_permute: bool) -> Result<Automaton> {
    if !(2..=MAX_STATES).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "state count must be in 2..={MAX_STATES}, got {n}"
        )));
    }
    if m == 0 || m > 25 {
        return Err(Error::InvalidParameter(format!(
            "permutation letter count must be in 1..=25, got {m}"
        )));
    }
    let mut rng = rng_for(seed);
    let perms: Vec<Vec<StateId>> = (0..m).map(|_| random_permutation(n, &mut rng)).collect();
    let a = random_defect_letter(n, post_permute, &mut rng);
    let mut letters = vec![Letter {
        name: "a".into(),
        map: a,
    }];
    for (i, p) in perms.into_iter().enumerate() {
        letters.push(Letter {
            name: ((b'b' + i as u8) as char).to_string(),
            map: Transformation::from_images(p).expect("in range"),
        });
    }
    Automaton::new(n, letters)
}
