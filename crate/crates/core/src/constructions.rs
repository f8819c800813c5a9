//! Conversions between pseudotranscripts and fractional tilings.
//!
//! * [`lift`]: an exact-cover tiling becomes a pseudotranscript with one
//!   outcome per tile, `p(t | x, y) = w(t)·1[(x, y) ∈ t]`.
//! * [`slice`]: each outcome's rank-one matrix `α(x)β(y)` is cut into nested
//!   upper-right rectangles. With `X` sorted so that `α(x_1) ≤ … ≤ α(x_M)`
//!   and `α(x_0) = 0`, the tile `t_ij = ({x_i..x_M} × {y_j..y_N}, z_q)` gets
//!   weight `ω = σ·τ` with `σ = α(x_i) − α(x_{i−1})` and
//!   `τ = β(y_j) − β(y_{j−1})`. Summing over tiles that contain `(x, y)`
//!   telescopes back to `p(q | x, y)`.
//! * [`prune`]: drops the sliced pieces whose corner `α̂·β̂` reaches
//!   `θ_q = p(q)·2^Δ`, with `Δ = (I(XY;Q) + 1)/δ`. What remains is a
//!   relaxed-partition certificate of size about `2^Δ`, at the price of at
//!   most `δ` extra average error.
//!
//! Some write-ups abbreviate the threshold exponent to `Δ ≈ I(XY;Q)/δ`; the
//! `+1` is what makes the missing-mass bound go through, so it is kept.

use num_traits::{One, Signed, Zero};

use crate::bounds::{self, verify_certificate, CertificateMode, Limits};
use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::measures::shannon_cost_of_pseudotranscript;
use crate::pseudotranscript::{average_error, Pseudotranscript};
use crate::rational::{self, Rational};
use crate::relation::Relation;
use crate::tiles::{Tile, TileWeighting};

/// Lifts an exact-cover tiling to a pseudotranscript, one outcome per
/// positive-weight tile in canonical tile order.
pub fn lift(rel: &Relation, w: &TileWeighting) -> Result<Pseudotranscript> {
    w.validate(rel)?;
    let (nx, ny) = (rel.x_size(), rel.y_size());
    if let Some((x, y, mass)) = w.exact_cover_violation(nx, ny) {
        return Err(Error::Precondition(format!(
            "tiling is not an exact cover: cell ({x}, {y}) has mass {}",
            rational::format(&mass)
        )));
    }
    let outcomes = w
        .iter()
        .filter(|(_, v)| v.is_positive())
        .map(|(t, v)| {
            let matrix = (0..nx * ny)
                .map(|c| {
                    if t.contains(c / ny, c % ny) {
                        v.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            (t.z, matrix)
        })
        .collect();
    Pseudotranscript::new(nx, ny, rel.z_size(), outcomes)
}

/// One rectangle `t_ij` cut from an outcome matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicePiece {
    pub tile: Tile,
    /// Positions `(i, j)` in the sorted orders, starting at 1.
    pub index: (usize, usize),
    pub sigma: Rational,
    pub tau: Rational,
    pub omega: Rational,
    /// `α̂ = α(x_i)`, the smallest `α` over the tile's rows.
    pub alpha_min: Rational,
    /// `β̂ = β(y_j)`.
    pub beta_min: Rational,
}

/// The slicing of a single outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSlice {
    pub z: usize,
    /// `X` sorted by ascending `α`, ties by index.
    pub x_order: Vec<usize>,
    /// `Y` sorted by ascending `β`, ties by index.
    pub y_order: Vec<usize>,
    pub alpha_max: Rational,
    pub beta_max: Rational,
    /// Pieces with `σ > 0` and `τ > 0`, in `(i, j)` order.
    pub pieces: Vec<SlicePiece>,
}

impl OutcomeSlice {
    pub fn total(&self) -> Rational {
        rational::sum(self.pieces.iter().map(|p| &p.omega))
    }

    /// `Σ_{t ∋ (x, y)} σ_t τ_t`.
    pub fn telescope(&self, x: usize, y: usize) -> Rational {
        rational::sum(
            self.pieces
                .iter()
                .filter(|p| p.tile.contains(x, y))
                .map(|p| &p.omega),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceResult {
    /// Indexed like the pseudotranscript's outcomes.
    pub outcomes: Vec<OutcomeSlice>,
    /// `w(t) = Σ_q ω_{q,t}`.
    pub weighting: TileWeighting,
    /// `Σ_{q,t} ω_{q,t}`.
    pub total: Rational,
}

fn sorted_by(values: &[Rational]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]).then(a.cmp(&b)));
    order
}

/// Increments `v(o_k) − v(o_{k−1})` along `order`, with a zero before the
/// first element.
fn increments(values: &[Rational], order: &[usize]) -> Vec<Rational> {
    let mut prev = Rational::zero();
    order
        .iter()
        .map(|&i| {
            let d = &values[i] - &prev;
            prev = values[i].clone();
            d
        })
        .collect()
}

fn suffix_mask(order: &[usize], from: usize) -> u64 {
    order[from..].iter().fold(0, |m, &i| m | 1u64 << i)
}

pub fn slice_outcome(z: usize, alpha: &[Rational], beta: &[Rational]) -> OutcomeSlice {
    let x_order = sorted_by(alpha);
    let y_order = sorted_by(beta);
    let sigma = increments(alpha, &x_order);
    let tau = increments(beta, &y_order);
    let mut pieces = Vec::new();
    for (i, s) in sigma.iter().enumerate() {
        if !s.is_positive() {
            continue;
        }
        for (j, t) in tau.iter().enumerate() {
            if !t.is_positive() {
                continue;
            }
            pieces.push(SlicePiece {
                tile: Tile::new(suffix_mask(&x_order, i), suffix_mask(&y_order, j), z),
                index: (i + 1, j + 1),
                sigma: s.clone(),
                tau: t.clone(),
                omega: s * t,
                alpha_min: alpha[x_order[i]].clone(),
                beta_min: beta[y_order[j]].clone(),
            });
        }
    }
    OutcomeSlice {
        z,
        alpha_max: alpha[*x_order.last().expect("nonempty alphabet")].clone(),
        beta_max: beta[*y_order.last().expect("nonempty alphabet")].clone(),
        x_order,
        y_order,
        pieces,
    }
}

/// Slices every outcome of `q`. The resulting weighting is an exact cover
/// with the same per-cell error as `q` and total weight `Σ_q max p(q|x,y)`.
pub fn slice(rel: &Relation, q: &Pseudotranscript) -> Result<SliceResult> {
    q.check_relation(rel)?;
    let outcomes: Vec<OutcomeSlice> = q
        .outcomes()
        .iter()
        .map(|o| slice_outcome(o.z(), &o.factors().alpha, &o.factors().beta))
        .collect();
    let mut weighting = TileWeighting::new();
    for p in outcomes.iter().flat_map(|o| &o.pieces) {
        weighting.add(p.tile, p.omega.clone());
    }
    let total = outcomes.iter().map(OutcomeSlice::total).fold(Rational::zero(), |a, b| a + b);
    Ok(SliceResult {
        outcomes,
        weighting,
        total,
    })
}

/// Area of the part of `[0, α*] × [0, β*]` under the hyperbola `xy = θ`.
pub fn hyperbola_area_bound(alpha_max: &Rational, beta_max: &Rational, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Precondition(format!(
            "hyperbola threshold must be positive, got {theta}"
        )));
    }
    let corner = rational::to_f64(&(alpha_max * beta_max));
    Ok(if theta <= corner {
        theta * (1.0 + (corner / theta).ln())
    } else {
        corner
    })
}

/// Tolerance on log-domain comparisons in the pruning checks.
pub const LOG_TOLERANCE: f64 = 1e-6;

/// An inequality `lhs ≤ rhs` checked on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl Check {
    fn le(lhs: f64, rhs: f64, tol: f64) -> Check {
        Check {
            pass: lhs <= rhs + tol,
            lhs,
            rhs,
        }
    }
}

/// Per-outcome comparison of the surviving weight with the hyperbola area.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolaCheck {
    pub outcome: usize,
    pub theta: f64,
    pub surviving: Rational,
    /// `None` when `θ_q = 0`, in which case every piece is removed.
    pub bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PruneResult {
    pub delta: Rational,
    /// `I(XY; Q)` in bits.
    pub information: f64,
    /// `Δ = (I + 1)/δ`.
    pub big_delta: f64,
    /// Average error of `Q` under `μ`.
    pub epsilon: Rational,
    /// `p(q)` under `μ`.
    pub marginal: Vec<Rational>,
    /// `θ_q = p(q)·2^Δ`.
    pub theta: Vec<f64>,
    pub slice: SliceResult,
    /// Removed `(outcome, piece index)` pairs.
    pub bad_set: Vec<(usize, usize)>,
    /// `Σ_{(q,t) ∈ ℬ} p(q, t)`.
    pub removed_mass: Rational,
    /// Total of the surviving `ω`.
    pub surviving_weight: Rational,
    /// `w′`.
    pub certificate: TileWeighting,
    /// `|X||Y| = 1`: the bound holds with nothing to prove and the
    /// log-log terms are undefined.
    pub trivial: bool,
    /// Removed mass against `δ`, compared exactly.
    pub missing_mass: Check,
    /// `log2 Σ_{∉ℬ} ω` against `Δ + log2 log2 |X||Y| + 2`.
    pub tile_bound: Check,
    /// `w′` has cover at most 1 everywhere and average error at most `ε + δ`.
    pub feasible: bool,
    pub pruned_error: Rational,
    /// `relaxed_prt_mu(f, ε + δ)`, with `ε + δ` capped at 1.
    pub relaxed_value: Rational,
    /// `δ·log2 relaxed_prt_mu − (δ·log2 log2 |X||Y| + 3)` against `I`.
    pub final_inequality: Check,
    pub hyperbola: Vec<HyperbolaCheck>,
    /// `Σ_{(q,t) ∈ 𝒟} p(q,t) φ(q,t)` against `I + 1`.
    pub markov: Check,
}

impl PruneResult {
    pub fn all_pass(&self) -> bool {
        self.missing_mass.pass
            && self.tile_bound.pass
            && self.feasible
            && self.final_inequality.pass
            && self.markov.pass
            && self.hyperbola.iter().all(|h| h.pass)
    }
}

pub fn prune(
    rel: &Relation,
    q: &Pseudotranscript,
    mu: &InputDistribution,
    delta: &Rational,
) -> Result<PruneResult> {
    prune_with(rel, q, mu, delta, &Limits::default())
}

pub fn prune_with(
    rel: &Relation,
    q: &Pseudotranscript,
    mu: &InputDistribution,
    delta: &Rational,
    limits: &Limits,
) -> Result<PruneResult> {
    if !delta.is_positive() || delta > &Rational::one() {
        return Err(Error::Precondition(format!(
            "delta must lie in (0, 1], got {}",
            rational::format(delta)
        )));
    }
    q.check_relation(rel)?;
    mu.check_shape(rel.x_size(), rel.y_size())?;
    let (nx, ny) = (rel.x_size(), rel.y_size());
    let cells = nx * ny;

    let epsilon = average_error(rel, q, mu)?;
    let information = shannon_cost_of_pseudotranscript(q, mu)?;
    let delta_f = rational::to_f64(delta);
    let big_delta = (information + 1.0) / delta_f;
    let scale = big_delta.exp2();
    let marginal = q.outcome_marginal(mu)?;
    let theta: Vec<f64> = marginal.iter().map(|p| rational::to_f64(p) * scale).collect();
    let slice = slice(rel, q)?;

    let mass_in = |tile: &Tile| {
        rational::sum(
            (0..cells)
                .filter(|&c| tile.contains(c / ny, c % ny))
                .map(|c| mu.probs().get(c).expect("shape checked")),
        )
    };

    let mut bad_set = Vec::new();
    let mut removed_mass = Rational::zero();
    let mut certificate = TileWeighting::new();
    let mut hyperbola = Vec::new();
    let mut markov_sum = 0.0;
    for (qi, os) in slice.outcomes.iter().enumerate() {
        let mut surviving = Rational::zero();
        let matrix = q.outcomes()[qi].matrix();
        for (pi, piece) in os.pieces.iter().enumerate() {
            let corner = &piece.alpha_min * &piece.beta_min;
            // rounding the exact corner down keeps borderline pieces
            if rational::to_f64_floor(&corner) >= theta[qi] {
                bad_set.push((qi, pi));
                removed_mass += &piece.omega * mass_in(&piece.tile);
            } else {
                surviving += &piece.omega;
                certificate.add(piece.tile, piece.omega.clone());
            }
            if corner >= marginal[qi] && marginal[qi].is_positive() {
                for c in (0..cells).filter(|&c| piece.tile.contains(c / ny, c % ny)) {
                    let m = &mu.probs()[c];
                    if m.is_zero() {
                        continue;
                    }
                    let ratio = &matrix[c] / &marginal[qi];
                    markov_sum += rational::to_f64(&(&piece.omega * m)) * rational::log2(&ratio);
                }
            }
        }
        let (bound, pass) = if theta[qi] > 0.0 {
            let b = hyperbola_area_bound(&os.alpha_max, &os.beta_max, theta[qi])?;
            let s = rational::to_f64(&surviving);
            (Some(b), s <= b * (1.0 + LOG_TOLERANCE) + LOG_TOLERANCE)
        } else {
            (None, surviving.is_zero())
        };
        hyperbola.push(HyperbolaCheck {
            outcome: qi,
            theta: theta[qi],
            surviving,
            bound,
            pass,
        });
    }
    let surviving_weight = certificate.total();

    let trivial = cells == 1;
    let loglog = (cells as f64).log2().log2();

    let missing_mass = Check {
        pass: &removed_mass <= delta,
        lhs: rational::to_f64(&removed_mass),
        rhs: delta_f,
    };
    let tile_bound = if trivial {
        Check {
            pass: true,
            lhs: rational::log2(&surviving_weight),
            rhs: f64::INFINITY,
        }
    } else {
        Check::le(
            rational::log2(&surviving_weight),
            big_delta + loglog + 2.0,
            LOG_TOLERANCE,
        )
    };

    let target = (&epsilon + delta).min(Rational::one());
    let report = verify_certificate(rel, &certificate, &CertificateMode::RelaxedMu(target.clone(), mu.clone()))?;
    let pruned_error = report
        .average_error
        .clone()
        .expect("distributional mode reports the average");
    let feasible = report.pass() && pruned_error <= &epsilon + delta;

    let relaxed_value = bounds::relaxed_prt_mu_with(rel, &target, mu, limits)?.value;
    let final_inequality = if trivial {
        Check {
            pass: true,
            lhs: f64::NEG_INFINITY,
            rhs: information,
        }
    } else {
        let lhs = delta_f * rational::log2(&relaxed_value) - (delta_f * loglog + 3.0);
        Check::le(lhs, information, LOG_TOLERANCE)
    };
    let markov = Check::le(markov_sum, information + 1.0, LOG_TOLERANCE);

    Ok(PruneResult {
        delta: delta.clone(),
        information,
        big_delta,
        epsilon,
        marginal,
        theta,
        slice,
        bad_set,
        removed_mass,
        surviving_weight,
        certificate,
        trivial,
        missing_mass,
        tile_bound,
        feasible,
        pruned_error,
        relaxed_value,
        final_inequality,
        hyperbola,
        markov,
    })
}
