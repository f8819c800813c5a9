//! Shannon and order-∞ Rényi information quantities.
//!
//! All inputs are exact rationals. The order-∞ quantities expose the exact
//! argument of the logarithm so equalities can be checked without rounding;
//! Shannon quantities are returned in bits as `f64`. Logs are base 2 and
//! `0 · log(0/0)` terms are taken to be 0.

use num_traits::{One, Signed, Zero};

use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::pseudotranscript::Pseudotranscript;
use crate::rational::{self, Rational};

/// A conditional law `p(b | a)`, stored row-major with one row per `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    rows: usize,
    cols: usize,
    probs: Vec<Rational>,
}

impl Channel {
    pub fn new(rows: usize, cols: usize, probs: Vec<Rational>) -> Result<Self> {
        if probs.len() != rows * cols {
            return Err(Error::invalid(format!(
                "channel has {} entries, expected {rows}x{cols}",
                probs.len()
            )));
        }
        if probs.iter().any(Signed::is_negative) {
            return Err(Error::invalid("channel has a negative entry"));
        }
        for a in 0..rows {
            let s = rational::sum(&probs[a * cols..(a + 1) * cols]);
            if !s.is_one() {
                return Err(Error::invalid(format!(
                    "channel row {a} sums to {}",
                    rational::format(&s)
                )));
            }
        }
        Ok(Channel { rows, cols, probs })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("channel matrix is ragged"));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let probs = (0..n * n)
            .map(|i| if i / n == i % n { rational::one() } else { rational::zero() })
            .collect();
        Self::new(n, n, probs).expect("identity is a channel")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, b: usize) -> &Rational {
        &self.probs[a * self.cols + b]
    }

    /// Merges outcome columns `b1` and `b2` into `b1`.
    pub fn merge_columns(&self, b1: usize, b2: usize) -> Channel {
        assert!(b1 != b2 && b1 < self.cols && b2 < self.cols);
        let mut probs = Vec::with_capacity(self.rows * (self.cols - 1));
        for a in 0..self.rows {
            for b in 0..self.cols {
                if b == b2 {
                    continue;
                }
                let mut p = self.get(a, b).clone();
                if b == b1 {
                    p += self.get(a, b2);
                }
                probs.push(p);
            }
        }
        Channel::new(self.rows, self.cols - 1, probs).expect("merging keeps rows stochastic")
    }
}

/// A joint distribution over `A × B`, row-major with one row per `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Joint {
    rows: usize,
    cols: usize,
    probs: Vec<Rational>,
}

impl Joint {
    pub fn new(rows: usize, cols: usize, probs: Vec<Rational>) -> Result<Self> {
        if probs.len() != rows * cols {
            return Err(Error::invalid(format!(
                "joint has {} entries, expected {rows}x{cols}",
                probs.len()
            )));
        }
        if probs.iter().any(Signed::is_negative) {
            return Err(Error::invalid("joint has a negative entry"));
        }
        let s = rational::sum(&probs);
        if s.is_zero() {
            return Err(Error::invalid("joint distribution has no mass"));
        }
        if !s.is_one() {
            return Err(Error::invalid(format!(
                "joint sums to {}, not 1",
                rational::format(&s)
            )));
        }
        Ok(Joint { rows, cols, probs })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("joint matrix is ragged"));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    /// `p(a, b) = p_A(a) · p(b | a)`.
    pub fn from_channel(input: &[Rational], ch: &Channel) -> Result<Self> {
        if input.len() != ch.rows {
            return Err(Error::invalid("input marginal does not match channel rows"));
        }
        let probs = (0..ch.rows)
            .flat_map(|a| (0..ch.cols).map(move |b| (a, b)))
            .map(|(a, b)| &input[a] * ch.get(a, b))
            .collect();
        Self::new(ch.rows, ch.cols, probs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, b: usize) -> &Rational {
        &self.probs[a * self.cols + b]
    }

    pub fn row_marginal(&self) -> Vec<Rational> {
        (0..self.rows)
            .map(|a| rational::sum(&self.probs[a * self.cols..(a + 1) * self.cols]))
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|b| (0..self.rows).fold(Rational::zero(), |acc, a| acc + self.get(a, b)))
            .collect()
    }

    /// Swaps columns according to `perm` (new column `i` is old `perm[i]`).
    pub fn permute_cols(&self, perm: &[usize]) -> Joint {
        let probs = (0..self.rows)
            .flat_map(|a| perm.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.get(a, b).clone())
            .collect();
        Joint::new(self.rows, self.cols, probs).expect("permutation keeps a distribution")
    }
}

/// An information value: the exact argument of the logarithm (when there is
/// one) and the value in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoValue {
    pub exact_argument: Option<Rational>,
    pub bits: f64,
}

impl InfoValue {
    pub fn from_argument(arg: Rational) -> Self {
        let bits = rational::log2(&arg);
        InfoValue {
            exact_argument: Some(arg),
            bits,
        }
    }
}

/// `I∞(A : B) = log Σ_b max_a p(b|a)`; depends on the channel only.
pub fn renyi_inf_cost(ch: &Channel) -> InfoValue {
    let arg = (0..ch.cols)
        .map(|b| {
            (0..ch.rows)
                .map(|a| ch.get(a, b))
                .max()
                .cloned()
                .unwrap_or_else(Rational::zero)
        })
        .fold(Rational::zero(), |acc, m| acc + m);
    InfoValue::from_argument(arg)
}

/// `I∞(A ; B)`: like [`renyi_inf_cost`], but the max ranges only over rows
/// with `p_A(a) > 0`.
pub fn renyi_inf_mi(joint: &Joint) -> Result<InfoValue> {
    let pa = joint.row_marginal();
    if pa.iter().all(Zero::is_zero) {
        return Err(Error::invalid("joint distribution has no mass"));
    }
    let mut arg = Rational::zero();
    for b in 0..joint.cols {
        let best = (0..joint.rows)
            .filter(|&a| pa[a].is_positive())
            .map(|a| joint.get(a, b) / &pa[a])
            .max()
            .unwrap_or_else(Rational::zero);
        arg += best;
    }
    Ok(InfoValue::from_argument(arg))
}

/// Shannon mutual information `I(A; B)` in bits.
pub fn shannon_mi(joint: &Joint) -> f64 {
    let pa = joint.row_marginal();
    let pb = joint.col_marginal();
    let mut total = 0.0;
    for a in 0..joint.rows {
        for b in 0..joint.cols {
            let p = joint.get(a, b);
            if p.is_zero() {
                continue;
            }
            // p(a,b) / (p(a) p(b)) computed exactly before the log
            let ratio = p / (&pa[a] * &pb[b]);
            total += rational::to_f64(p) * rational::log2(&ratio);
        }
    }
    total
}

/// Exact joint `p(x, y, q) = μ(x, y) p(q | x, y)`, indexed `[q][cell]`.
fn joint_xyq(q: &Pseudotranscript, mu: &InputDistribution) -> Vec<Vec<Rational>> {
    q.outcomes()
        .iter()
        .map(|o| {
            o.matrix()
                .iter()
                .zip(mu.probs())
                .map(|(p, m)| p * m)
                .collect()
        })
        .collect()
}

/// External information cost `I(XY; Q)` in bits under `μ`.
pub fn shannon_cost_of_pseudotranscript(
    q: &Pseudotranscript,
    mu: &InputDistribution,
) -> Result<f64> {
    mu.check_shape(q.x_size(), q.y_size())?;
    let joint = joint_xyq(q, mu);
    let mut total = 0.0;
    for (qi, row) in joint.iter().enumerate() {
        let pq = rational::sum(row);
        for (cell, p) in row.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let ratio = &q.outcomes()[qi].matrix()[cell] / &pq;
            total += rational::to_f64(p) * rational::log2(&ratio);
        }
    }
    Ok(total)
}

/// Internal information cost `I(X; Q | Y) + I(Y; Q | X)` in bits under `μ`.
pub fn internal_cost(q: &Pseudotranscript, mu: &InputDistribution) -> Result<f64> {
    mu.check_shape(q.x_size(), q.y_size())?;
    let (nx, ny) = (q.x_size(), q.y_size());
    let px = mu.x_marginal();
    let py = mu.y_marginal();
    let joint = joint_xyq(q, mu);
    let mut total = 0.0;
    for (qi, row) in joint.iter().enumerate() {
        // p(q, y) and p(q, x)
        let mut pqy = vec![Rational::zero(); ny];
        let mut pqx = vec![Rational::zero(); nx];
        for x in 0..nx {
            for y in 0..ny {
                pqy[y] += &row[x * ny + y];
                pqx[x] += &row[x * ny + y];
            }
        }
        let m = q.outcomes()[qi].matrix();
        for x in 0..nx {
            for y in 0..ny {
                let p = &row[x * ny + y];
                if p.is_zero() {
                    continue;
                }
                let p_q_given_y = &pqy[y] / &py[y];
                let p_q_given_x = &pqx[x] / &px[x];
                let cond = &m[x * ny + y];
                let pf = rational::to_f64(p);
                total += pf * rational::log2(&(cond / p_q_given_y));
                total += pf * rational::log2(&(cond / p_q_given_x));
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn identity_channel_costs_log_n() {
        let v = renyi_inf_cost(&Channel::identity(4));
        assert_eq!(v.exact_argument, Some(int(4)));
        assert_eq!(v.bits, 2.0);
    }

    #[test]
    fn constant_channel_costs_nothing() {
        let ch = Channel::new(3, 1, vec![int(1); 3]).unwrap();
        let v = renyi_inf_cost(&ch);
        assert_eq!(v.exact_argument, Some(int(1)));
        assert_eq!(v.bits, 0.0);
    }

    #[test]
    fn three_halves_channel() {
        let ch = Channel::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 2)],
            vec![int(1), int(0)],
        ])
        .unwrap();
        assert_eq!(renyi_inf_cost(&ch).exact_argument, Some(ratio(3, 2)));
    }

    #[test]
    fn channel_rows_must_be_stochastic() {
        assert!(Channel::new(1, 2, vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Channel::new(1, 2, vec![ratio(3, 2), ratio(-1, 2)]).is_err());
    }

    #[test]
    fn renyi_mi_examples() {
        let indep = Joint::new(2, 2, vec![ratio(1, 4); 4]).unwrap();
        let v = renyi_inf_mi(&indep).unwrap();
        assert_eq!(v.exact_argument, Some(int(1)));
        assert_eq!(v.bits, 0.0);

        let diag = Joint::from_rows(vec![
            vec![ratio(1, 3), int(0), int(0)],
            vec![int(0), ratio(1, 3), int(0)],
            vec![int(0), int(0), ratio(1, 3)],
        ])
        .unwrap();
        let v = renyi_inf_mi(&diag).unwrap();
        assert_eq!(v.exact_argument, Some(int(3)));
        assert!((v.bits - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn zero_rows_are_ignored_by_renyi_mi() {
        // Row 1 has no mass; its would-be conditional would be a point mass on
        // column 1. Only row 0 counts: conditional (1/2, 1/2) sums to 1.
        let joint = Joint::from_rows(vec![vec![ratio(1, 2), ratio(1, 2)], vec![int(0), int(0)]])
            .unwrap();
        assert_eq!(renyi_inf_mi(&joint).unwrap().exact_argument, Some(int(1)));
        // the channel form with a point-mass second row would give 3/2
        let ch = Channel::from_rows(vec![vec![ratio(1, 2), ratio(1, 2)], vec![int(0), int(1)]])
            .unwrap();
        assert_eq!(renyi_inf_cost(&ch).exact_argument, Some(ratio(3, 2)));
    }

    #[test]
    fn degenerate_joint_rejected() {
        assert!(Joint::new(2, 2, vec![int(0); 4]).is_err());
    }

    #[test]
    fn shannon_examples() {
        let indep = Joint::new(2, 3, vec![ratio(1, 6); 6]).unwrap();
        assert!(shannon_mi(&indep).abs() < 1e-12);

        // (X, Y) uniform on {0,1}², Q = X xor Y; rows are the four (x, y) pairs
        let mut probs = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                let q = x ^ y;
                probs.push(if q == 0 { ratio(1, 4) } else { int(0) });
                probs.push(if q == 1 { ratio(1, 4) } else { int(0) });
            }
        }
        let xor = Joint::new(4, 2, probs).unwrap();
        assert!((shannon_mi(&xor) - 1.0).abs() < 1e-12);

        // binary symmetric channel with crossover 1/4 and uniform input
        let bsc = Joint::from_rows(vec![
            vec![ratio(3, 8), ratio(1, 8)],
            vec![ratio(1, 8), ratio(3, 8)],
        ])
        .unwrap();
        // oracle: 1 - H(1/4) with H evaluated directly
        let h = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        assert!((shannon_mi(&bsc) - (1.0 - h)).abs() < 1e-12);
        assert!((shannon_mi(&bsc) - 0.188_721_875_540_867).abs() < 1e-12);
    }
}
