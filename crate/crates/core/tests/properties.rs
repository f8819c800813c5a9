mod common;

use std::collections::BTreeSet;

use commlb::bounds::{self, verify_certificate, CertificateMode};
use commlb::constructions::{lift, prune, slice};
use commlb::lp::{self, check_feasible, Cmp, LinearProgram, LpStatus};
use commlb::measures::{
    internal_cost, renyi_inf_cost, renyi_inf_mi, shannon_cost_of_pseudotranscript, shannon_mi,
    Joint,
};
use commlb::protocols::{
    enumerate_protocols, enumerate_zero_error, transcript_pseudotranscript, PublicCoinProtocol,
};
use commlb::pseudotranscript::{average_error, channel_of, pseudotranscript_error};
use commlb::rational::{self, int, ratio, Rational};
use commlb::sample;
use commlb::tiles::{average_tiling_error, enumerate_tiles, tile_count, tiling_error};
use commlb::{ErrorFn, InputDistribution};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use common::{instance, rng};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn tile_universe_is_complete_and_duplicate_free(nx in 1usize..=4, ny in 1usize..=4, nz in 1usize..=3) {
        let tiles = enumerate_tiles(nx, ny, nz).unwrap();
        let expected = ((1u128 << nx) - 1) * ((1u128 << ny) - 1) * nz as u128;
        prop_assert_eq!(tiles.len() as u128, expected);
        prop_assert_eq!(tile_count(nx, ny, nz), expected);
        prop_assert!(tiles.windows(2).all(|w| w[0] < w[1]));
        let unique: BTreeSet<_> = tiles.iter().collect();
        prop_assert_eq!(unique.len(), tiles.len());
    }

    #[test]
    fn average_error_of_exact_cover_is_weighted_cell_error(seed in any::<u64>()) {
        let inst = instance(seed, 4, 4, 3);
        let w = slice(&inst.rel, &inst.q).unwrap().weighting;
        prop_assert!(w.exact_cover_violation(inst.rel.x_size(), inst.rel.y_size()).is_none());
        let avg = average_tiling_error(&inst.rel, &w, &inst.mu).unwrap();
        let weighted = tiling_error(&inst.rel, &w)
            .iter()
            .zip(inst.mu.probs())
            .fold(Rational::zero(), |acc, (e, m)| acc + e * m);
        prop_assert_eq!(avg, weighted);
    }

    #[test]
    fn shannon_never_exceeds_renyi(seed in any::<u64>(), rows in 1usize..=6, cols in 1usize..=6, full in any::<bool>()) {
        let joint = sample::joint(&mut rng(seed), rows, cols, full);
        let i = shannon_mi(&joint);
        prop_assert!(i >= -1e-12);
        prop_assert!(i <= renyi_inf_mi(&joint).unwrap().bits + 1e-9);
    }

    #[test]
    fn renyi_cost_matches_mi_on_full_support(seed in any::<u64>()) {
        let mut inst = instance(seed, 3, 3, 2);
        inst.mu = sample::distribution(&mut rng(seed ^ 1), inst.rel.x_size(), inst.rel.y_size(), true);
        let ch = channel_of(&inst.q);
        let joint = Joint::from_channel(inst.mu.probs(), &ch).unwrap();
        prop_assert_eq!(
            renyi_inf_mi(&joint).unwrap().exact_argument,
            renyi_inf_cost(&ch).exact_argument
        );
    }

    #[test]
    fn merging_outcomes_never_increases_renyi_argument(seed in any::<u64>()) {
        let inst = instance(seed, 3, 3, 2);
        let ch = channel_of(&inst.q);
        prop_assume!(ch.cols() >= 2);
        let mut r = rng(seed);
        let a = r.gen_range(0..ch.cols());
        let b = (a + r.gen_range(1..ch.cols())) % ch.cols();
        let before = renyi_inf_cost(&ch).exact_argument.unwrap();
        let after = renyi_inf_cost(&ch.merge_columns(a, b)).exact_argument.unwrap();
        prop_assert!(after <= before);
    }

    #[test]
    fn shannon_mi_ignores_outcome_labels(seed in any::<u64>(), rows in 1usize..=5, cols in 1usize..=5) {
        let joint = sample::joint(&mut rng(seed), rows, cols, false);
        let mut perm: Vec<usize> = (0..cols).collect();
        rand::seq::SliceRandom::shuffle(&mut perm[..], &mut rng(seed ^ 7));
        prop_assert!((shannon_mi(&joint) - shannon_mi(&joint.permute_cols(&perm))).abs() <= 1e-12);
    }

    #[test]
    fn rescaled_factors_reproduce_the_matrix(seed in any::<u64>(), n in 1i64..50, d in 1i64..50) {
        let inst = instance(seed, 4, 4, 2);
        let c = ratio(n, d);
        let ny = inst.q.y_size();
        for o in inst.q.outcomes() {
            let f = o.factors();
            for (cell, p) in o.matrix().iter().enumerate() {
                let (x, y) = (cell / ny, cell % ny);
                prop_assert_eq!(&(&f.alpha[x] * &c) * &(&f.beta[y] / &c), p.clone());
            }
        }
    }

    #[test]
    fn column_maxima_sum_to_at_least_one(seed in any::<u64>()) {
        let inst = instance(seed, 4, 4, 3);
        let arg = inst.q.renyi_argument();
        prop_assert!(arg >= Rational::one());
        prop_assert!(renyi_inf_cost(&channel_of(&inst.q)).bits >= 0.0);
    }

    #[test]
    fn pseudotranscript_error_is_a_probability(seed in any::<u64>()) {
        let inst = instance(seed, 4, 4, 3);
        for e in pseudotranscript_error(&inst.rel, &inst.q).unwrap() {
            prop_assert!(e >= Rational::zero() && e <= Rational::one());
        }
    }

    #[test]
    fn shannon_cost_is_below_renyi_cost(seed in any::<u64>()) {
        let inst = instance(seed, 4, 4, 3);
        let external = shannon_cost_of_pseudotranscript(&inst.q, &inst.mu).unwrap();
        prop_assert!(external >= -1e-12);
        prop_assert!(internal_cost(&inst.q, &inst.mu).unwrap() >= -1e-12);
        prop_assert!(external <= rational::log2(&inst.q.renyi_argument()) + 1e-9);
    }

    #[test]
    fn telescope_and_area_identities(seed in any::<u64>()) {
        let inst = instance(seed, 4, 4, 3);
        let s = slice(&inst.rel, &inst.q).unwrap();
        for (qi, os) in s.outcomes.iter().enumerate() {
            for x in 0..inst.q.x_size() {
                for y in 0..inst.q.y_size() {
                    prop_assert_eq!(&os.telescope(x, y), inst.q.prob(qi, x, y));
                }
            }
            prop_assert_eq!(os.total(), &os.alpha_max * &os.beta_max);
            for p in &os.pieces {
                prop_assert!(p.omega > Rational::zero());
                prop_assert_eq!(&p.omega, &(&p.sigma * &p.tau));
                prop_assert_eq!(p.tile.z, os.z);
            }
        }
        prop_assert_eq!(&s.total, &inst.q.renyi_argument());
        prop_assert_eq!(s.weighting.total(), s.total.clone());
        prop_assert_eq!(
            tiling_error(&inst.rel, &s.weighting),
            pseudotranscript_error(&inst.rel, &inst.q).unwrap()
        );
    }

    #[test]
    fn lift_after_slice_keeps_argument_and_error(seed in any::<u64>()) {
        let inst = instance(seed, 4, 4, 3);
        let s = slice(&inst.rel, &inst.q).unwrap();
        let back = lift(&inst.rel, &s.weighting).unwrap();
        prop_assert_eq!(back.renyi_argument(), inst.q.renyi_argument());
        prop_assert_eq!(
            pseudotranscript_error(&inst.rel, &back).unwrap(),
            pseudotranscript_error(&inst.rel, &inst.q).unwrap()
        );
        prop_assert_eq!(
            average_error(&inst.rel, &back, &inst.mu).unwrap(),
            average_error(&inst.rel, &inst.q, &inst.mu).unwrap()
        );
    }
}

fn random_eps<R: Rng>(r: &mut R) -> Rational {
    [int(0), ratio(1, 10), ratio(1, 4), ratio(1, 3), ratio(1, 2), int(1)][r.gen_range(0..6)].clone()
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn bound_ordering_and_certificates(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (nx, ny, nz) = (r.gen_range(1..=3), r.gen_range(1..=3), r.gen_range(1..=2));
        let rel = sample::relation(&mut r, nx, ny, nz);
        let eps = random_eps(&mut r);
        let full = r.gen_bool(0.5);
        let mu = sample::distribution(&mut r, nx, ny, full);
        let errfn = ErrorFn::constant(nx, ny, eps.clone()).unwrap();

        let p = bounds::prt(&rel, &errfn).unwrap();
        let rx = bounds::relaxed_prt(&rel, &eps).unwrap();
        let rm = bounds::relaxed_prt_mu(&rel, &eps, &mu).unwrap();
        prop_assert!(rx.value <= p.value);
        prop_assert!(rm.value <= rx.value);

        prop_assert!(verify_certificate(&rel, &p.certificate, &CertificateMode::Prt(errfn)).unwrap().pass());
        prop_assert!(verify_certificate(&rel, &rx.certificate, &CertificateMode::Relaxed(eps.clone())).unwrap().pass());
        prop_assert!(verify_certificate(&rel, &rm.certificate, &CertificateMode::RelaxedMu(eps, mu)).unwrap().pass());
        prop_assert_eq!(p.certificate.total(), p.value);
    }

    #[test]
    fn prt_is_monotone_in_the_error_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (nx, ny) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let rel = sample::relation(&mut r, nx, ny, 2);
        let low: Vec<Rational> = (0..nx * ny).map(|_| random_eps(&mut r)).collect();
        let high: Vec<Rational> = low
            .iter()
            .map(|e| (e + ratio(r.gen_range(0..=4), 8)).min(Rational::one()))
            .collect();
        let a = bounds::prt(&rel, &ErrorFn::from_values(nx, ny, low).unwrap()).unwrap();
        let b = bounds::prt(&rel, &ErrorFn::from_values(nx, ny, high).unwrap()).unwrap();
        prop_assert!(b.value <= a.value);
    }

    #[test]
    fn partition_bound_matches_pseudotranscripts(seed in any::<u64>()) {
        let inst = instance(seed, 3, 3, 2);
        let errfn = ErrorFn::from_values(
            inst.rel.x_size(),
            inst.rel.y_size(),
            pseudotranscript_error(&inst.rel, &inst.q).unwrap(),
        ).unwrap();
        let p = bounds::prt(&inst.rel, &errfn).unwrap();
        prop_assert!(p.value <= inst.q.renyi_argument());
        let lifted = lift(&inst.rel, &p.certificate).unwrap();
        prop_assert_eq!(lifted.renyi_argument(), p.value.clone());
        prop_assert!(ErrorFn::from_values(
            inst.rel.x_size(),
            inst.rel.y_size(),
            pseudotranscript_error(&inst.rel, &lifted).unwrap(),
        ).unwrap().le(&errfn));
    }

    #[test]
    fn pruning_claims_hold(seed in any::<u64>(), quarter in any::<bool>()) {
        let inst = instance(seed, 3, 3, 2);
        let delta = if quarter { ratio(1, 4) } else { ratio(1, 2) };
        let res = prune(&inst.rel, &inst.q, &inst.mu, &delta).unwrap();
        prop_assert!(res.missing_mass.pass, "{:?}", res.missing_mass);
        prop_assert!(res.tile_bound.pass, "{:?}", res.tile_bound);
        prop_assert!(res.feasible);
        prop_assert!(res.final_inequality.pass, "{:?}", res.final_inequality);
        prop_assert!(res.markov.pass, "{:?}", res.markov);
        prop_assert!(res.hyperbola.iter().all(|h| h.pass));
    }

    #[test]
    fn lp_round_trip_duality_and_determinism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let m = r.gen_range(1..=5);
        // build constraints around a known feasible point
        let x0: Vec<Rational> = (0..n).map(|_| ratio(r.gen_range(0..=6), r.gen_range(1..=3))).collect();
        let objective: Vec<Rational> = (0..n).map(|_| int(r.gen_range(0..=5))).collect();
        let mut lp = LinearProgram::new(objective);
        for _ in 0..m {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if r.gen_bool(0.7) {
                    coeffs.push((j, ratio(r.gen_range(-3..=4), r.gen_range(1..=2))));
                }
            }
            let lhs = coeffs.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &x0[*j]);
            let slack = int(r.gen_range(0..=2));
            match r.gen_range(0..3) {
                0 => lp.add(coeffs, Cmp::Eq, lhs),
                1 => lp.add(coeffs, Cmp::Ge, lhs - slack),
                _ => lp.add(coeffs, Cmp::Le, lhs + slack),
            }
        }
        prop_assert!(check_feasible(&lp, &x0).unwrap().all_pass());
        let sol = lp::solve(&lp).unwrap();
        // nonnegative costs keep the program bounded
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(check_feasible(&lp, &sol.assignment).unwrap().all_pass());
        prop_assert_eq!(&lp.objective_value(&sol.assignment), &sol.value);
        prop_assert!(lp.objective_value(&x0) >= sol.value);

        // another vertex, from a different objective, is feasible and no better
        let mut other = lp.clone();
        other.objective = (0..n).map(|_| int(r.gen_range(0..=5))).collect();
        let alt = lp::solve(&other).unwrap();
        prop_assert!(lp.objective_value(&alt.assignment) >= sol.value);

        let again = lp::solve(&lp).unwrap();
        prop_assert_eq!(again.assignment, sol.assignment);
        prop_assert_eq!(again.pivots, sol.pivots);
    }

    #[test]
    fn random_lps_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.gen_range(1..=6), r.gen_range(1..=5));
        let lp = sample::linear_program(&mut r, n, m);
        let sol = lp::solve(&lp).unwrap();
        if sol.status == LpStatus::Optimal {
            prop_assert!(check_feasible(&lp, &sol.assignment).unwrap().all_pass());
        }
        prop_assert_eq!(lp::solve(&lp).unwrap(), sol);
    }

    #[test]
    fn zero_error_chain(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (nx, ny) = (r.gen_range(1..=3), r.gen_range(1..=2));
        let rel = sample::relation(&mut r, nx, ny, 2);
        let p = bounds::prt(&rel, &ErrorFn::zero(nx, ny)).unwrap();
        if let Some((bits, tree)) = enumerate_zero_error(&rel, 4).unwrap() {
            prop_assert!(p.value <= int(1 << bits));
            prop_assert!(tree.error(&rel).iter().all(Zero::is_zero));
            prop_assert_eq!(tree.worst_case_bits(nx, ny), bits);
        }
    }
}

#[test]
fn enumerated_protocols_satisfy_the_transcript_inequalities() {
    let mut r = rng(11);
    for (nx, ny, depth) in [(2, 2, 2), (2, 1, 3), (3, 1, 2)] {
        let trees = enumerate_protocols(nx, ny, 2, depth, 100_000).unwrap();
        let rel = sample::relation(&mut r, nx, ny, 2);
        for tree in &trees {
            let protocol = PublicCoinProtocol::deterministic(tree.clone());
            let q = transcript_pseudotranscript(nx, ny, 2, &protocol).unwrap();
            let arg = renyi_inf_cost(&channel_of(&q)).exact_argument.unwrap();
            assert!(rational::log2(&arg) <= protocol.worst_case_bits(nx, ny) as f64 + 1e-9);
            assert_eq!(pseudotranscript_error(&rel, &q).unwrap(), protocol.error(&rel));
        }
        // public-coin mixtures of two random trees
        for _ in 0..200 {
            let a = trees[r.gen_range(0..trees.len())].clone();
            let b = trees[r.gen_range(0..trees.len())].clone();
            let w = ratio(r.gen_range(1..=3), 4);
            let protocol = PublicCoinProtocol::new(vec![(w.clone(), a), (Rational::one() - w, b)]).unwrap();
            let q = transcript_pseudotranscript(nx, ny, 2, &protocol).unwrap();
            let arg = q.renyi_argument();
            assert!(rational::log2(&arg) <= protocol.worst_case_bits(nx, ny) as f64 + 1e-9);
            assert_eq!(pseudotranscript_error(&rel, &q).unwrap(), protocol.error(&rel));
        }
    }
}

#[test]
fn point_mass_distribution_needs_one_tile() {
    let rel = commlb::Relation::equality(1);
    let mu = InputDistribution::point(2, 2, 1, 0);
    assert_eq!(bounds::relaxed_prt_mu(&rel, &int(0), &mu).unwrap().value, int(1));
}
