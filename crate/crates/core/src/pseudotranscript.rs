//! Pseudotranscripts: channels `p(q | x, y)` whose every outcome matrix is a
//! nonnegative rank-one product `α(q, x) β(q, y)`, each outcome carrying an
//! output label.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::measures::Channel;
use crate::rational::{self, Rational};
use crate::relation::{check_sizes, Relation};

/// `α` and `β` with `α(x) β(y) = M(x, y)` for one outcome matrix `M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOne {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl RankOne {
    pub fn product(&self, x: usize, y: usize) -> Rational {
        &self.alpha[x] * &self.beta[y]
    }

    pub fn alpha_max(&self) -> Rational {
        self.alpha.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn beta_max(&self) -> Rational {
        self.beta.iter().max().cloned().unwrap_or_else(Rational::zero)
    }
}

/// Why a matrix is not a nonnegative rank-one product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorizationWitness {
    NegativeEntry {
        cell: (usize, usize),
    },
    /// Both `support` cells are nonzero but `missing`, which shares a row with
    /// one and a column with the other, is zero.
    NonRectangularSupport {
        support: [(usize, usize); 2],
        missing: (usize, usize),
    },
    NonzeroMinor {
        rows: (usize, usize),
        cols: (usize, usize),
        minor: Rational,
    },
}

impl fmt::Display for FactorizationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorizationWitness::NegativeEntry { cell } => {
                write!(f, "negative entry at {cell:?}")
            }
            FactorizationWitness::NonRectangularSupport { support, missing } => write!(
                f,
                "support is not a rectangle: {:?} and {:?} are nonzero but {:?} is zero",
                support[0], support[1], missing
            ),
            FactorizationWitness::NonzeroMinor { rows, cols, minor } => write!(
                f,
                "2x2 minor on rows {rows:?}, columns {cols:?} equals {}",
                rational::format(minor)
            ),
        }
    }
}

/// Decides whether `matrix` (row-major, `x_size × y_size`) is a nonnegative
/// rank-one product and returns factors anchored at the first support cell.
///
/// With anchor `(x0, y0)`, `α(x) = M(x, y0)` and `β(y) = M(x0, y) / M(x0, y0)`.
/// The all-zero matrix factors as `α ≡ 0, β ≡ 0`.
pub fn check_and_factorize(
    x_size: usize,
    y_size: usize,
    matrix: &[Rational],
) -> Result<RankOne, FactorizationWitness> {
    assert_eq!(matrix.len(), x_size * y_size, "matrix shape mismatch");
    let at = |x: usize, y: usize| &matrix[x * y_size + y];
    if let Some(i) = matrix.iter().position(Signed::is_negative) {
        return Err(FactorizationWitness::NegativeEntry {
            cell: (i / y_size, i % y_size),
        });
    }
    let Some(anchor) = matrix.iter().position(|v| !v.is_zero()) else {
        return Ok(RankOne {
            alpha: vec![Rational::zero(); x_size],
            beta: vec![Rational::zero(); y_size],
        });
    };
    let (x0, y0) = (anchor / y_size, anchor % y_size);

    let row_support: Vec<Option<usize>> = (0..x_size)
        .map(|x| (0..y_size).find(|&y| !at(x, y).is_zero()))
        .collect();
    let col_support: Vec<Option<usize>> = (0..y_size)
        .map(|y| (0..x_size).find(|&x| !at(x, y).is_zero()))
        .collect();
    for x in 0..x_size {
        let Some(yr) = row_support[x] else { continue };
        for y in 0..y_size {
            let Some(xc) = col_support[y] else { continue };
            if at(x, y).is_zero() {
                return Err(FactorizationWitness::NonRectangularSupport {
                    support: [(x, yr), (xc, y)],
                    missing: (x, y),
                });
            }
        }
    }

    let pivot = at(x0, y0);
    let alpha: Vec<Rational> = (0..x_size).map(|x| at(x, y0).clone()).collect();
    let beta: Vec<Rational> = (0..y_size).map(|y| at(x0, y) / pivot).collect();
    for x in 0..x_size {
        for y in 0..y_size {
            if &alpha[x] * &beta[y] != *at(x, y) {
                let minor = pivot * at(x, y) - at(x0, y) * at(x, y0);
                return Err(FactorizationWitness::NonzeroMinor {
                    rows: (x0, x),
                    cols: (y0, y),
                    minor,
                });
            }
        }
    }
    Ok(RankOne { alpha, beta })
}

/// One outcome of a pseudotranscript: its label, matrix and factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    z: usize,
    matrix: Vec<Rational>,
    factors: RankOne,
}

impl Outcome {
    pub fn z(&self) -> usize {
        self.z
    }

    /// Row-major `p(q | x, y)`.
    pub fn matrix(&self) -> &[Rational] {
        &self.matrix
    }

    pub fn factors(&self) -> &RankOne {
        &self.factors
    }

    pub fn max_prob(&self) -> Rational {
        self.matrix.iter().max().cloned().unwrap_or_else(Rational::zero)
    }
}

/// A validated pseudotranscript. Outcomes with identically zero matrices
/// are dropped on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pseudotranscript {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    outcomes: Vec<Outcome>,
}

impl Pseudotranscript {
    /// `outcomes` are `(z_q, p(q|·,·))` pairs with row-major matrices.
    pub fn new(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        outcomes: Vec<(usize, Vec<Rational>)>,
    ) -> Result<Self> {
        check_sizes(x_size, y_size, z_size)?;
        let cells = x_size * y_size;
        let mut kept = Vec::with_capacity(outcomes.len());
        let mut mass = vec![Rational::zero(); cells];
        for (i, (z, matrix)) in outcomes.into_iter().enumerate() {
            if z >= z_size {
                return Err(Error::invalid(format!(
                    "outcome {i} has label {z} outside 0..{z_size}"
                )));
            }
            if matrix.len() != cells {
                return Err(Error::invalid(format!(
                    "outcome {i} matrix has {} entries, expected {cells}",
                    matrix.len()
                )));
            }
            let factors = check_and_factorize(x_size, y_size, &matrix)
                .map_err(|witness| Error::NotFactorizable { outcome: i, witness })?;
            if matrix.iter().all(Zero::is_zero) {
                continue;
            }
            for (m, p) in mass.iter_mut().zip(&matrix) {
                *m += p;
            }
            kept.push(Outcome { z, matrix, factors });
        }
        if let Some((i, m)) = mass.iter().enumerate().find(|(_, m)| !m.is_one()) {
            return Err(Error::invalid(format!(
                "outcome probabilities at ({}, {}) sum to {}, not 1",
                i / y_size,
                i % y_size,
                rational::format(m)
            )));
        }
        Ok(Pseudotranscript {
            x_size,
            y_size,
            z_size,
            outcomes: kept,
        })
    }

    /// The transcript of a protocol that outputs `z` without communicating.
    pub fn constant(x_size: usize, y_size: usize, z_size: usize, z: usize) -> Result<Self> {
        Self::new(x_size, y_size, z_size, vec![(z, vec![Rational::one(); x_size * y_size])])
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn prob(&self, q: usize, x: usize, y: usize) -> &Rational {
        &self.outcomes[q].matrix[x * self.y_size + y]
    }

    /// `Σ_q max_{x,y} p(q | x, y)`, the exact argument of `I∞(X,Y : Q)`.
    pub fn renyi_argument(&self) -> Rational {
        self.outcomes
            .iter()
            .fold(Rational::zero(), |acc, o| acc + o.max_prob())
    }

    /// Marginal `p(q)` of each outcome under `μ`.
    pub fn outcome_marginal(&self, mu: &InputDistribution) -> Result<Vec<Rational>> {
        mu.check_shape(self.x_size, self.y_size)?;
        Ok(self
            .outcomes
            .iter()
            .map(|o| {
                o.matrix
                    .iter()
                    .zip(mu.probs())
                    .fold(Rational::zero(), |acc, (p, m)| acc + p * m)
            })
            .collect())
    }

    pub(crate) fn check_relation(&self, rel: &Relation) -> Result<()> {
        let fits = (rel.x_size(), rel.y_size()) == (self.x_size, self.y_size)
            && self.outcomes.iter().all(|o| o.z < rel.z_size());
        if !fits {
            return Err(Error::invalid(format!(
                "pseudotranscript over {}x{}x{} does not match relation over {}x{}x{}",
                self.x_size,
                self.y_size,
                self.z_size,
                rel.x_size(),
                rel.y_size(),
                rel.z_size()
            )));
        }
        Ok(())
    }
}

/// `err_{f,Q}(x, y) = Σ_{q : z_q ∉ f(x,y)} p(q | x, y)`, row-major.
pub fn pseudotranscript_error(rel: &Relation, q: &Pseudotranscript) -> Result<Vec<Rational>> {
    q.check_relation(rel)?;
    let ny = q.y_size;
    let mut err = vec![Rational::zero(); q.x_size * ny];
    for o in &q.outcomes {
        for (cell, p) in o.matrix.iter().enumerate() {
            if !p.is_zero() && !rel.accepts(cell / ny, cell % ny, o.z) {
                err[cell] += p;
            }
        }
    }
    Ok(err)
}

/// `Σ μ(x, y) err_{f,Q}(x, y)`.
pub fn average_error(
    rel: &Relation,
    q: &Pseudotranscript,
    mu: &InputDistribution,
) -> Result<Rational> {
    mu.check_shape(q.x_size, q.y_size)?;
    let err = pseudotranscript_error(rel, q)?;
    Ok(err
        .iter()
        .zip(mu.probs())
        .fold(Rational::zero(), |acc, (e, m)| acc + e * m))
}

/// Rows indexed by `(x, y)` row-major, columns by outcome.
pub fn channel_of(q: &Pseudotranscript) -> Channel {
    let cells = q.x_size * q.y_size;
    let probs = (0..cells)
        .flat_map(|cell| q.outcomes.iter().map(move |o| o.matrix[cell].clone()))
        .collect();
    Channel::new(cells, q.outcomes.len(), probs).expect("pseudotranscript rows are stochastic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::renyi_inf_cost;
    use crate::rational::{int, ratio};

    fn outer(alpha: &[Rational], beta: &[Rational]) -> Vec<Rational> {
        alpha
            .iter()
            .flat_map(|a| beta.iter().map(move |b| a * b))
            .collect()
    }

    #[test]
    fn accepts_outer_product() {
        let m = outer(&[ratio(1, 2), int(1)], &[int(1), ratio(1, 3)]);
        let f = check_and_factorize(2, 2, &m).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(f.product(x, y), m[x * 2 + y]);
            }
        }
        // anchor is (0, 0): α is column 0, β is row 0 scaled to β(0) = 1
        assert_eq!(f.alpha, vec![ratio(1, 2), int(1)]);
        assert_eq!(f.beta, vec![int(1), ratio(1, 3)]);
    }

    #[test]
    fn rejects_diagonal_support() {
        let m = vec![int(1), int(0), int(0), int(1)];
        match check_and_factorize(2, 2, &m) {
            Err(FactorizationWitness::NonRectangularSupport { support, missing }) => {
                assert_eq!(missing, (0, 1));
                assert_eq!(support, [(0, 0), (1, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_full_rank_with_minor() {
        let m = vec![ratio(1, 2), ratio(1, 4), ratio(1, 4), ratio(1, 2)];
        match check_and_factorize(2, 2, &m) {
            Err(FactorizationWitness::NonzeroMinor { rows, cols, minor }) => {
                assert_eq!((rows, cols), ((0, 1), (0, 1)));
                assert_eq!(minor, ratio(3, 16));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_matrix_factors_trivially() {
        let f = check_and_factorize(2, 3, &vec![int(0); 6]).unwrap();
        assert!(f.alpha.iter().chain(&f.beta).all(Zero::is_zero));
    }

    #[test]
    fn anchor_skips_zero_rows() {
        let m = outer(&[int(0), ratio(1, 2), ratio(1, 4)], &[int(0), int(1), ratio(1, 2)]);
        let f = check_and_factorize(3, 3, &m).unwrap();
        assert_eq!(f.alpha, vec![int(0), ratio(1, 2), ratio(1, 4)]);
        assert_eq!(f.beta, vec![int(0), int(1), ratio(1, 2)]);
    }

    #[test]
    fn constructor_validates() {
        assert!(Pseudotranscript::new(1, 2, 1, vec![(0, vec![int(1), ratio(1, 2)])]).is_err());
        let err = Pseudotranscript::new(
            2,
            2,
            2,
            vec![
                (0, vec![int(1), int(0), int(0), int(1)]),
                (1, vec![int(0), int(1), int(1), int(0)]),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotFactorizable { outcome: 0, .. }), "{err}");
        assert!(Pseudotranscript::new(1, 1, 1, vec![(1, vec![int(1)])]).is_err());
    }

    #[test]
    fn zero_outcomes_are_dropped() {
        let q = Pseudotranscript::new(
            1,
            2,
            2,
            vec![(0, vec![int(0), int(0)]), (1, vec![int(1), int(1)])],
        )
        .unwrap();
        assert_eq!(q.outcomes().len(), 1);
        assert_eq!(q.outcomes()[0].z(), 1);
    }

    #[test]
    fn error_examples() {
        let rel = Relation::equality(1);
        // Q outputs x == y exactly, via the four singleton rectangles
        let mut outcomes = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                let mut m = vec![int(0); 4];
                m[x * 2 + y] = int(1);
                outcomes.push((usize::from(x == y), m));
            }
        }
        let q = Pseudotranscript::new(2, 2, 2, outcomes).unwrap();
        assert_eq!(pseudotranscript_error(&rel, &q).unwrap(), vec![int(0); 4]);

        // constant output 0 is wrong exactly on the diagonal; with a relation
        // accepting 0 everywhere but (0, 0), the error is 1 only there
        let rel2 = Relation::new(
            2,
            vec![vec![vec![1], vec![0, 1]], vec![vec![0], vec![0]]],
        )
        .unwrap();
        let c = Pseudotranscript::constant(2, 2, 2, 0).unwrap();
        assert_eq!(
            pseudotranscript_error(&rel2, &c).unwrap(),
            vec![int(1), int(0), int(0), int(0)]
        );
        let mu = InputDistribution::uniform(2, 2);
        assert_eq!(average_error(&rel2, &c, &mu).unwrap(), ratio(1, 4));
    }

    #[test]
    fn channel_adapter() {
        let c = Pseudotranscript::constant(2, 3, 1, 0).unwrap();
        let ch = channel_of(&c);
        assert_eq!((ch.rows(), ch.cols()), (6, 1));
        assert!((0..6).all(|r| ch.get(r, 0).is_one()));

        let q = Pseudotranscript::new(
            2,
            1,
            1,
            vec![(0, vec![ratio(1, 2), int(1)]), (0, vec![ratio(1, 2), int(0)])],
        )
        .unwrap();
        assert_eq!(renyi_inf_cost(&channel_of(&q)).exact_argument, Some(ratio(3, 2)));
        assert_eq!(q.renyi_argument(), ratio(3, 2));
    }
}
