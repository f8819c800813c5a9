//! Tiles (labelled combinatorial rectangles) and weightings over them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::relation::{check_sizes, Relation};

/// Default cap on `(2^|X| - 1)(2^|Y| - 1)|Z|`.
pub const DEFAULT_TILE_CAP: u128 = 1_000_000;

/// A rectangle `xs × ys` labelled with output `z`. Sets are bitmasks over
/// the input alphabets; the derived order is the canonical tile order
/// (by `xs` mask, then `ys` mask, then `z`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tile {
    pub xs: u64,
    pub ys: u64,
    pub z: usize,
}

impl Tile {
    pub fn new(xs: u64, ys: u64, z: usize) -> Self {
        Tile { xs, ys, z }
    }

    /// Builds a tile from index lists.
    pub fn from_sets(xs: &[usize], ys: &[usize], z: usize) -> Self {
        let mask = |s: &[usize]| s.iter().fold(0u64, |m, &i| m | 1 << i);
        Tile::new(mask(xs), mask(ys), z)
    }

    pub fn full(x_size: usize, y_size: usize, z: usize) -> Self {
        Tile::new(low_bits(x_size), low_bits(y_size), z)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.xs >> x & 1 == 1 && self.ys >> y & 1 == 1
    }

    pub fn xs_list(&self) -> Vec<usize> {
        bits_of(self.xs)
    }

    pub fn ys_list(&self) -> Vec<usize> {
        bits_of(self.ys)
    }

    pub fn area(&self) -> u32 {
        self.xs.count_ones() * self.ys.count_ones()
    }

    /// Checks the tile is nonempty and fits the given alphabets.
    pub fn validate(&self, x_size: usize, y_size: usize, z_size: usize) -> Result<()> {
        if self.xs == 0 || self.ys == 0 {
            return Err(Error::invalid(format!("tile {self} has an empty side")));
        }
        if self.xs & !low_bits(x_size) != 0
            || self.ys & !low_bits(y_size) != 0
            || self.z >= z_size
        {
            return Err(Error::invalid(format!(
                "tile {self} is out of range for alphabets {x_size}x{y_size}x{z_size}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}x{:?}, z={})", self.xs_list(), self.ys_list(), self.z)
    }
}

pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bits_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn tile_count(x_size: usize, y_size: usize, z_size: usize) -> u128 {
    let side = |n: usize| {
        if n >= 127 {
            u128::MAX
        } else {
            (1u128 << n) - 1
        }
    };
    side(x_size)
        .saturating_mul(side(y_size))
        .saturating_mul(z_size as u128)
}

/// All nonempty tiles in canonical order, under [`DEFAULT_TILE_CAP`].
pub fn enumerate_tiles(x_size: usize, y_size: usize, z_size: usize) -> Result<Vec<Tile>> {
    enumerate_tiles_capped(x_size, y_size, z_size, DEFAULT_TILE_CAP)
}

pub fn enumerate_tiles_capped(
    x_size: usize,
    y_size: usize,
    z_size: usize,
    cap: u128,
) -> Result<Vec<Tile>> {
    check_sizes(x_size, y_size, z_size)?;
    let count = tile_count(x_size, y_size, z_size);
    if count > cap {
        return Err(Error::SizeLimit {
            what: "tile",
            count,
            cap,
        });
    }
    let mut tiles = Vec::with_capacity(count as usize);
    for xs in 1..=low_bits(x_size) {
        for ys in 1..=low_bits(y_size) {
            for z in 0..z_size {
                tiles.push(Tile::new(xs, ys, z));
            }
        }
    }
    Ok(tiles)
}

/// Nonnegative weights on tiles; absent tiles weigh zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TileWeighting {
    entries: BTreeMap<Tile, Rational>,
}

impl TileWeighting {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `w` to the weight of `tile`; zero results are dropped.
    pub fn add(&mut self, tile: Tile, w: Rational) {
        if w.is_zero() {
            return;
        }
        let slot = self.entries.entry(tile).or_insert_with(Rational::zero);
        *slot += w;
        if slot.is_zero() {
            self.entries.remove(&tile);
        }
    }

    pub fn weight(&self, tile: &Tile) -> Rational {
        self.entries.get(tile).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tile, &Rational)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> Rational {
        rational::sum(self.entries.values())
    }

    /// Checks every tile fits the relation and every weight lies in `[0, 1]`.
    pub fn validate(&self, rel: &Relation) -> Result<()> {
        for (t, w) in &self.entries {
            t.validate(rel.x_size(), rel.y_size(), rel.z_size())?;
            if w.is_negative() || w > &Rational::one() {
                return Err(Error::invalid(format!(
                    "tile {t} has weight {} outside [0, 1]",
                    rational::format(w)
                )));
            }
        }
        Ok(())
    }

    /// `Σ_{t ∋ (x,y)} w(t)` for every cell, row-major.
    pub fn cover_mass(&self, x_size: usize, y_size: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); x_size * y_size];
        for (t, w) in &self.entries {
            for x in bits_of(t.xs) {
                for y in bits_of(t.ys) {
                    out[x * y_size + y] += w;
                }
            }
        }
        out
    }

    /// `Σ_{t ∋ (x,y), z_t ∈ f(x,y)} w(t)` for every cell, row-major.
    pub fn correct_mass(&self, rel: &Relation) -> Vec<Rational> {
        self.mass_where(rel, true)
    }

    fn mass_where(&self, rel: &Relation, correct: bool) -> Vec<Rational> {
        let y_size = rel.y_size();
        let mut out = vec![Rational::zero(); rel.cells()];
        for (t, w) in &self.entries {
            for x in bits_of(t.xs) {
                for y in bits_of(t.ys) {
                    if rel.accepts(x, y, t.z) == correct {
                        out[x * y_size + y] += w;
                    }
                }
            }
        }
        out
    }

    /// The first cell whose cover mass differs from 1, if any.
    pub fn exact_cover_violation(&self, x_size: usize, y_size: usize) -> Option<(usize, usize, Rational)> {
        self.cover_mass(x_size, y_size)
            .into_iter()
            .enumerate()
            .find(|(_, m)| !m.is_one())
            .map(|(i, m)| (i / y_size, i % y_size, m))
    }
}

impl FromIterator<(Tile, Rational)> for TileWeighting {
    fn from_iter<I: IntoIterator<Item = (Tile, Rational)>>(iter: I) -> Self {
        let mut w = TileWeighting::new();
        for (t, r) in iter {
            w.add(t, r);
        }
        w
    }
}

/// `err_{f,w}(x, y)`: weight of incorrectly labelled tiles covering each cell.
pub fn tiling_error(rel: &Relation, w: &TileWeighting) -> Vec<Rational> {
    w.mass_where(rel, false)
}

/// `1 − Σ μ(x,y) · (correct mass at (x,y))`.
pub fn average_tiling_error(
    rel: &Relation,
    w: &TileWeighting,
    mu: &InputDistribution,
) -> Result<Rational> {
    mu.check_shape(rel.x_size(), rel.y_size())?;
    let correct = w.correct_mass(rel);
    let avg = mu
        .probs()
        .iter()
        .zip(&correct)
        .fold(Rational::zero(), |acc, (p, c)| acc + p * c);
    Ok(Rational::one() - avg)
}
