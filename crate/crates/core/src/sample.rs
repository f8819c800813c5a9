//! Seeded random instances for property checks and demos.
//!
//! Pseudotranscripts are sampled as transcripts of random protocols in
//! which each message bit is drawn with an input-dependent probability, so
//! the factors `α, β` take generic rational values rather than 0/1.

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::distribution::InputDistribution;
use crate::lp::{Cmp, LinearProgram};
use crate::measures::Joint;
use crate::pseudotranscript::Pseudotranscript;
use crate::rational::{int, ratio, Rational};
use crate::relation::Relation;

const BIT_PROBS: [(i64, i64); 9] = [
    (0, 1),
    (1, 4),
    (1, 3),
    (1, 2),
    (1, 2),
    (2, 3),
    (3, 4),
    (1, 1),
    (1, 5),
];

/// Each cell accepts one random output, sometimes two.
pub fn relation<R: Rng>(rng: &mut R, x_size: usize, y_size: usize, z_size: usize) -> Relation {
    let accept = (0..x_size)
        .map(|_| {
            (0..y_size)
                .map(|_| {
                    let z = rng.gen_range(0..z_size);
                    let mut zs = vec![z];
                    if z_size > 1 && rng.gen_bool(0.15) {
                        zs.push((z + 1) % z_size);
                    }
                    zs
                })
                .collect()
        })
        .collect();
    Relation::new(z_size, accept).expect("sampled relation is valid")
}

/// Random small-integer weights normalised to 1. With `full_support` every
/// cell gets positive mass.
pub fn distribution<R: Rng>(
    rng: &mut R,
    x_size: usize,
    y_size: usize,
    full_support: bool,
) -> InputDistribution {
    loop {
        let lo = if full_support { 1 } else { 0 };
        let w: Vec<i64> = (0..x_size * y_size).map(|_| rng.gen_range(lo..=6)).collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        let probs = w.iter().map(|&v| ratio(v, total)).collect();
        return InputDistribution::new(x_size, y_size, probs).expect("normalised");
    }
}

/// Random joint distribution over `rows × cols`.
pub fn joint<R: Rng>(rng: &mut R, rows: usize, cols: usize, full_support: bool) -> Joint {
    let d = distribution(rng, rows, cols, full_support);
    Joint::new(rows, cols, d.probs().to_vec()).expect("normalised")
}

/// A random protocol with private and public coins, flattened to its
/// transcript distribution. `depth` bounds the number of rounds.
pub fn pseudotranscript<R: Rng>(
    rng: &mut R,
    x_size: usize,
    y_size: usize,
    z_size: usize,
    depth: usize,
) -> Pseudotranscript {
    let mut outcomes = Vec::new();
    grow(
        rng,
        depth,
        vec![Rational::one(); x_size],
        vec![Rational::one(); y_size],
        z_size,
        &mut outcomes,
    );
    Pseudotranscript::new(x_size, y_size, z_size, outcomes).expect("protocol transcripts factorize")
}

fn grow<R: Rng>(
    rng: &mut R,
    depth: usize,
    alpha: Vec<Rational>,
    beta: Vec<Rational>,
    z_size: usize,
    out: &mut Vec<(usize, Vec<Rational>)>,
) {
    let dead = alpha.iter().all(Zero::is_zero) || beta.iter().all(Zero::is_zero);
    if depth == 0 || dead || rng.gen_bool(0.15) {
        let matrix = alpha
            .iter()
            .flat_map(|a| beta.iter().map(move |b| a * b))
            .collect();
        out.push((rng.gen_range(0..z_size), matrix));
        return;
    }
    match rng.gen_range(0..10) {
        // public coin
        0 => {
            let (n, d) = *[(1, 2), (1, 3), (2, 3), (1, 4)].choose(rng).unwrap();
            let p = ratio(n, d);
            let scale = |v: &[Rational], s: &Rational| v.iter().map(|a| a * s).collect();
            grow(rng, depth - 1, scale(&alpha, &p), beta.clone(), z_size, out);
            let q = Rational::one() - p;
            grow(rng, depth - 1, scale(&alpha, &q), beta, z_size, out);
        }
        k => {
            let alice = k % 2 == 1;
            let side = if alice { &alpha } else { &beta };
            let p1: Vec<Rational> = side
                .iter()
                .map(|_| {
                    let (n, d) = BIT_PROBS[rng.gen_range(0..BIT_PROBS.len())];
                    ratio(n, d)
                })
                .collect();
            for bit in [false, true] {
                let next: Vec<Rational> = side
                    .iter()
                    .zip(&p1)
                    .map(|(a, p)| if bit { a * p } else { a * (Rational::one() - p) })
                    .collect();
                if alice {
                    grow(rng, depth - 1, next, beta.clone(), z_size, out);
                } else {
                    grow(rng, depth - 1, alpha.clone(), next, z_size, out);
                }
            }
        }
    }
}

/// A small random LP with mixed constraint senses; may be infeasible or
/// unbounded.
pub fn linear_program<R: Rng>(rng: &mut R, num_vars: usize, num_rows: usize) -> LinearProgram {
    let objective = (0..num_vars).map(|_| int(rng.gen_range(-2..=4))).collect();
    let mut lp = LinearProgram::new(objective);
    for _ in 0..num_rows {
        let mut coeffs = Vec::new();
        for j in 0..num_vars {
            if rng.gen_bool(0.7) {
                coeffs.push((j, ratio(rng.gen_range(-3..=4), rng.gen_range(1..=3))));
            }
        }
        let cmp = [Cmp::Eq, Cmp::Ge, Cmp::Le, Cmp::Le][rng.gen_range(0..4)];
        lp.add(coeffs, cmp, int(rng.gen_range(-4..=6)));
    }
    // keep most instances bounded
    if rng.gen_bool(0.8) {
        let all = (0..num_vars).map(|j| (j, Rational::one())).collect();
        lp.add(all, Cmp::Le, int(rng.gen_range(1..=10)));
    }
    lp
}
