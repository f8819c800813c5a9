#![allow(dead_code)]

use commlb::sample;
use commlb::{InputDistribution, Pseudotranscript, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random relation, pseudotranscript and full-support distribution on a
/// domain of at most `max_x × max_y × max_z`.
pub struct Instance {
    pub rel: Relation,
    pub q: Pseudotranscript,
    pub mu: InputDistribution,
}

pub fn instance(seed: u64, max_x: usize, max_y: usize, max_z: usize) -> Instance {
    let mut r = rng(seed);
    let nx = r.gen_range(1..=max_x);
    let ny = r.gen_range(1..=max_y);
    let nz = r.gen_range(1..=max_z);
    let rel = sample::relation(&mut r, nx, ny, nz);
    let depth = r.gen_range(0..=3);
    let q = sample::pseudotranscript(&mut r, nx, ny, nz, depth);
    let full = r.gen_bool(0.7);
    let mu = sample::distribution(&mut r, nx, ny, full);
    Instance { rel, q, mu }
}
