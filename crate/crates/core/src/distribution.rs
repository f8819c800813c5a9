use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A joint distribution `μ` over `X × Y`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDistribution {
    x_size: usize,
    y_size: usize,
    probs: Vec<Rational>,
}

impl InputDistribution {
    pub fn new(x_size: usize, y_size: usize, probs: Vec<Rational>) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::invalid("distribution needs a nonempty domain"));
        }
        if probs.len() != x_size * y_size {
            return Err(Error::invalid(format!(
                "distribution has {} entries, expected {}",
                probs.len(),
                x_size * y_size
            )));
        }
        if let Some(i) = probs.iter().position(|p| p.is_negative()) {
            return Err(Error::invalid(format!(
                "negative probability at ({}, {})",
                i / y_size,
                i % y_size
            )));
        }
        let total = rational::sum(&probs);
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "distribution sums to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(InputDistribution {
            x_size,
            y_size,
            probs,
        })
    }

    pub fn from_matrix(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let x_size = rows.len();
        let y_size = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != y_size) {
            return Err(Error::invalid("distribution matrix is ragged"));
        }
        Self::new(x_size, y_size, rows.into_iter().flatten().collect())
    }

    pub fn uniform(x_size: usize, y_size: usize) -> Self {
        let n = (x_size * y_size) as i64;
        Self::new(x_size, y_size, vec![rational::ratio(1, n); x_size * y_size])
            .expect("uniform distribution is valid")
    }

    pub fn point(x_size: usize, y_size: usize, x: usize, y: usize) -> Self {
        let mut probs = vec![Rational::zero(); x_size * y_size];
        probs[x * y_size + y] = Rational::one();
        Self::new(x_size, y_size, probs).expect("point mass is valid")
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn get(&self, x: usize, y: usize) -> &Rational {
        &self.probs[x * self.y_size + y]
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn x_marginal(&self) -> Vec<Rational> {
        (0..self.x_size)
            .map(|x| rational::sum(&self.probs[x * self.y_size..(x + 1) * self.y_size]))
            .collect()
    }

    pub fn y_marginal(&self) -> Vec<Rational> {
        (0..self.y_size)
            .map(|y| {
                (0..self.x_size).fold(Rational::zero(), |acc, x| acc + self.get(x, y))
            })
            .collect()
    }

    pub(crate) fn check_shape(&self, x_size: usize, y_size: usize) -> Result<()> {
        if (self.x_size, self.y_size) != (x_size, y_size) {
            return Err(Error::invalid(format!(
                "distribution is {}x{}, expected {x_size}x{y_size}",
                self.x_size, self.y_size
            )));
        }
        Ok(())
    }
}
