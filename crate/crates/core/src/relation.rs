//! Finite relations `f: X × Y → 2^Z` and error-bound functions.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest alphabet handled with bitmask representations.
pub const MAX_ALPHABET: usize = 63;

/// A relation given as an explicit table of accepted outputs per cell.
///
/// Cells are indexed row-major, `cell = x * y_size + y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    x_size: usize,
    y_size: usize,
    z_size: usize,
    accept: Vec<u64>,
}

impl Relation {
    /// `accept[x][y]` lists the outputs accepted at `(x, y)`.
    pub fn new(z_size: usize, accept: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let x_size = accept.len();
        let y_size = accept.first().map_or(0, Vec::len);
        check_sizes(x_size, y_size, z_size)?;
        let mut masks = Vec::with_capacity(x_size * y_size);
        for (x, row) in accept.iter().enumerate() {
            if row.len() != y_size {
                return Err(Error::invalid(format!(
                    "accept row {x} has {} columns, expected {y_size}",
                    row.len()
                )));
            }
            for (y, zs) in row.iter().enumerate() {
                let mut mask = 0u64;
                for &z in zs {
                    if z >= z_size {
                        return Err(Error::invalid(format!(
                            "accept[{x}][{y}] contains output {z} outside 0..{z_size}"
                        )));
                    }
                    mask |= 1 << z;
                }
                if mask == 0 {
                    return Err(Error::invalid(format!("accept[{x}][{y}] is empty")));
                }
                masks.push(mask);
            }
        }
        Ok(Relation {
            x_size,
            y_size,
            z_size,
            accept: masks,
        })
    }

    /// Builds a total function relation from `value(x, y)`.
    pub fn from_fn(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        value: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let accept = (0..x_size)
            .map(|x| (0..y_size).map(|y| vec![value(x, y)]).collect())
            .collect();
        Self::new(z_size, accept)
    }

    /// Every output accepted everywhere.
    pub fn constant(x_size: usize, y_size: usize, z_size: usize) -> Result<Self> {
        let all: Vec<usize> = (0..z_size).collect();
        Self::new(z_size, vec![vec![all; y_size]; x_size])
    }

    /// Equality on `bits`-bit strings.
    pub fn equality(bits: u32) -> Self {
        let n = 1usize << bits;
        Self::from_fn(n, n, 2, |x, y| usize::from(x == y)).expect("valid sizes")
    }

    /// Set intersection on `bits`-bit strings; `and(1)` is the AND of two bits.
    pub fn and(bits: u32) -> Self {
        let n = 1usize << bits;
        Self::from_fn(n, n, 2, |x, y| usize::from(x & y != 0)).expect("valid sizes")
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

    pub fn cells(&self) -> usize {
        self.x_size * self.y_size
    }

    pub fn accepts(&self, x: usize, y: usize, z: usize) -> bool {
        self.accept[x * self.y_size + y] >> z & 1 == 1
    }

    pub fn accept_mask(&self, x: usize, y: usize) -> u64 {
        self.accept[x * self.y_size + y]
    }

    pub fn accepted(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.z_size).filter(|&z| self.accepts(x, y, z)).collect()
    }
}

pub(crate) fn check_sizes(x_size: usize, y_size: usize, z_size: usize) -> Result<()> {
    for (name, n) in [("x_size", x_size), ("y_size", y_size), ("z_size", z_size)] {
        if n == 0 {
            return Err(Error::invalid(format!("{name} must be positive")));
        }
        if n > MAX_ALPHABET {
            return Err(Error::invalid(format!(
                "{name} = {n} exceeds the supported maximum {MAX_ALPHABET}"
            )));
        }
    }
    Ok(())
}

/// Per-cell error bound `ℰ(x, y) ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorFn {
    x_size: usize,
    y_size: usize,
    values: Vec<Rational>,
}

impl ErrorFn {
    pub fn constant(x_size: usize, y_size: usize, eps: Rational) -> Result<Self> {
        Self::from_values(x_size, y_size, vec![eps; x_size * y_size])
    }

    pub fn zero(x_size: usize, y_size: usize) -> Self {
        Self::constant(x_size, y_size, rational::zero()).expect("zero is a valid error")
    }

    /// Row-major values, one per cell.
    pub fn from_values(x_size: usize, y_size: usize, values: Vec<Rational>) -> Result<Self> {
        if values.len() != x_size * y_size {
            return Err(Error::invalid(format!(
                "error function has {} values, expected {}",
                values.len(),
                x_size * y_size
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_negative() || *v > &Rational::one())
        {
            return Err(Error::invalid(format!(
                "error bound {} at ({}, {}) is outside [0, 1]",
                rational::format(v),
                i / y_size,
                i % y_size
            )));
        }
        Ok(ErrorFn {
            x_size,
            y_size,
            values,
        })
    }

    pub fn from_matrix(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let x_size = rows.len();
        let y_size = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != y_size) {
            return Err(Error::invalid("error matrix is ragged"));
        }
        Self::from_values(x_size, y_size, rows.into_iter().flatten().collect())
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn get(&self, x: usize, y: usize) -> &Rational {
        &self.values[x * self.y_size + y]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &ErrorFn) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn rejects_bad_accept_sets() {
        assert!(Relation::new(2, vec![vec![vec![]]]).is_err());
        assert!(Relation::new(2, vec![vec![vec![2]]]).is_err());
        assert!(Relation::new(2, vec![vec![vec![0], vec![1]], vec![vec![0]]]).is_err());
        assert!(Relation::new(0, vec![vec![vec![0]]]).is_err());
    }

    #[test]
    fn eq_and_and_tables() {
        let eq = Relation::equality(1);
        assert!(eq.accepts(0, 0, 1) && eq.accepts(1, 1, 1));
        assert!(eq.accepts(0, 1, 0) && !eq.accepts(0, 1, 1));
        let and = Relation::and(1);
        assert_eq!(and.accepted(1, 1), vec![1]);
        assert_eq!(and.accepted(1, 0), vec![0]);
    }

    #[test]
    fn error_fn_range_checked() {
        assert!(ErrorFn::constant(2, 2, ratio(1, 10)).is_ok());
        assert!(ErrorFn::constant(2, 2, ratio(11, 10)).is_err());
        assert!(ErrorFn::constant(2, 2, ratio(-1, 10)).is_err());
        assert!(ErrorFn::from_values(2, 2, vec![ratio(0, 1); 3]).is_err());
    }
}
