//! Deterministic protocol trees, public-coin mixtures of them, and an
//! exhaustive search for optimal zero-error protocols on tiny domains.
//!
//! Each internal node is one bit sent by Alice (a function of `x`) or Bob (a
//! function of `y`). Longer messages are consecutive nodes with the same
//! speaker. Public coins are not counted as communication; they only
//! appear in the outcome of the transcript pseudotranscript.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pseudotranscript::Pseudotranscript;
use crate::rational::{self, Rational};
use crate::relation::{check_sizes, Relation};
use crate::tiles::{bits_of, low_bits};

/// Largest `|X|`, `|Y|` accepted by [`enumerate_zero_error`].
pub const SEARCH_ALPHABET_CAP: usize = 3;
/// Largest bit budget accepted by [`enumerate_zero_error`].
pub const SEARCH_BITS_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Speaker {
    Alice,
    Bob,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProtocolTree {
    Leaf {
        z: usize,
    },
    Node {
        speaker: Speaker,
        /// The bit sent for each value of the speaker's input.
        msg: Vec<u8>,
        children: Box<[ProtocolTree; 2]>,
    },
}

/// Result of running a tree on one input pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    /// Leaf index in left-to-right order.
    pub leaf: usize,
    pub bits: Vec<u8>,
    pub z: usize,
}

impl ProtocolTree {
    pub fn leaf(z: usize) -> Self {
        ProtocolTree::Leaf { z }
    }

    pub fn node(speaker: Speaker, msg: Vec<u8>, zero: ProtocolTree, one: ProtocolTree) -> Self {
        ProtocolTree::Node {
            speaker,
            msg,
            children: Box::new([zero, one]),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ProtocolTree::Leaf { .. } => 1,
            ProtocolTree::Node { children, .. } => children.iter().map(Self::leaf_count).sum(),
        }
    }

    /// Output labels of the leaves, left to right.
    pub fn leaf_labels(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut Vec<usize>) {
        match self {
            ProtocolTree::Leaf { z } => out.push(*z),
            ProtocolTree::Node { children, .. } => {
                children.iter().for_each(|c| c.collect_labels(out));
            }
        }
    }

    /// Height of the tree, counting unreachable branches too.
    pub fn depth(&self) -> usize {
        match self {
            ProtocolTree::Leaf { .. } => 0,
            ProtocolTree::Node { children, .. } => {
                1 + children.iter().map(Self::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn validate(&self, x_size: usize, y_size: usize, z_size: usize) -> Result<()> {
        check_sizes(x_size, y_size, z_size)?;
        self.validate_at(x_size, y_size, z_size, &mut String::from("root"))
    }

    fn validate_at(&self, nx: usize, ny: usize, nz: usize, path: &mut String) -> Result<()> {
        match self {
            ProtocolTree::Leaf { z } if *z >= nz => Err(Error::invalid(format!(
                "leaf at {path} outputs {z}, outside 0..{nz}"
            ))),
            ProtocolTree::Leaf { .. } => Ok(()),
            ProtocolTree::Node {
                speaker,
                msg,
                children,
            } => {
                let n = match speaker {
                    Speaker::Alice => nx,
                    Speaker::Bob => ny,
                };
                if msg.len() != n {
                    return Err(Error::invalid(format!(
                        "node at {path} has {} message bits, expected {n}",
                        msg.len()
                    )));
                }
                if let Some(b) = msg.iter().find(|b| **b > 1) {
                    return Err(Error::invalid(format!("node at {path} sends non-bit {b}")));
                }
                for (bit, child) in children.iter().enumerate() {
                    let len = path.len();
                    path.push_str(&format!(".{bit}"));
                    child.validate_at(nx, ny, nz, path)?;
                    path.truncate(len);
                }
                Ok(())
            }
        }
    }

    pub fn run(&self, x: usize, y: usize) -> Run {
        let mut node = self;
        let mut bits = Vec::new();
        let mut leaf = 0;
        loop {
            match node {
                ProtocolTree::Leaf { z } => return Run { leaf, bits, z: *z },
                ProtocolTree::Node {
                    speaker,
                    msg,
                    children,
                } => {
                    let b = match speaker {
                        Speaker::Alice => msg[x],
                        Speaker::Bob => msg[y],
                    };
                    if b == 1 {
                        leaf += children[0].leaf_count();
                    }
                    bits.push(b);
                    node = &children[usize::from(b)];
                }
            }
        }
    }

    /// `max_{x,y} #bits(π, x, y)`.
    pub fn worst_case_bits(&self, x_size: usize, y_size: usize) -> usize {
        (0..x_size)
            .flat_map(|x| (0..y_size).map(move |y| (x, y)))
            .map(|(x, y)| self.run(x, y).bits.len())
            .max()
            .unwrap_or(0)
    }

    /// Per-cell indicator that the output is rejected, row-major.
    pub fn error(&self, rel: &Relation) -> Vec<Rational> {
        (0..rel.cells())
            .map(|c| {
                let (x, y) = (c / rel.y_size(), c % rel.y_size());
                if rel.accepts(x, y, self.run(x, y).z) {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            })
            .collect()
    }
}

/// Trees weighted by a public coin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicCoinProtocol {
    pub branches: Vec<(Rational, ProtocolTree)>,
}

impl PublicCoinProtocol {
    pub fn new(branches: Vec<(Rational, ProtocolTree)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::invalid("a public-coin protocol needs at least one tree"));
        }
        if let Some((w, _)) = branches.iter().find(|(w, _)| w.is_negative()) {
            return Err(Error::invalid(format!(
                "coin weight {} is negative",
                rational::format(w)
            )));
        }
        let total = rational::sum(branches.iter().map(|(w, _)| w));
        if !total.is_one() {
            return Err(Error::invalid(format!(
                "coin weights sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(PublicCoinProtocol { branches })
    }

    pub fn deterministic(tree: ProtocolTree) -> Self {
        PublicCoinProtocol {
            branches: vec![(Rational::one(), tree)],
        }
    }

    /// Worst-case communication over inputs and coin values.
    pub fn worst_case_bits(&self, x_size: usize, y_size: usize) -> usize {
        self.branches
            .iter()
            .map(|(_, t)| t.worst_case_bits(x_size, y_size))
            .max()
            .unwrap_or(0)
    }

    /// `Pr[output ∉ f(x, y)]` per cell.
    pub fn error(&self, rel: &Relation) -> Vec<Rational> {
        let mut err = vec![Rational::zero(); rel.cells()];
        for (w, t) in &self.branches {
            for (e, bad) in err.iter_mut().zip(t.error(rel)) {
                if !bad.is_zero() {
                    *e += w;
                }
            }
        }
        err
    }
}

/// The transcript-plus-coin pseudotranscript: one outcome per (coin, leaf),
/// `p(q | x, y) = weight · 1[leaf reached]`. Unreachable leaves vanish.
pub fn transcript_pseudotranscript(
    x_size: usize,
    y_size: usize,
    z_size: usize,
    protocol: &PublicCoinProtocol,
) -> Result<Pseudotranscript> {
    let mut outcomes = Vec::new();
    for (w, tree) in &protocol.branches {
        tree.validate(x_size, y_size, z_size)?;
        let labels = tree.leaf_labels();
        let mut matrices = vec![vec![Rational::zero(); x_size * y_size]; labels.len()];
        for x in 0..x_size {
            for y in 0..y_size {
                matrices[tree.run(x, y).leaf][x * y_size + y] = w.clone();
            }
        }
        outcomes.extend(labels.into_iter().zip(matrices));
    }
    Pseudotranscript::new(x_size, y_size, z_size, outcomes)
}

/// Minimum worst-case communication of a zero-error deterministic protocol,
/// with a witness, or `None` if none exists within `max_bits`.
pub fn enumerate_zero_error(
    rel: &Relation,
    max_bits: usize,
) -> Result<Option<(usize, ProtocolTree)>> {
    let side = rel.x_size().max(rel.y_size());
    if side > SEARCH_ALPHABET_CAP {
        return Err(Error::SizeLimit {
            what: "protocol search alphabet",
            count: side as u128,
            cap: SEARCH_ALPHABET_CAP as u128,
        });
    }
    if max_bits > SEARCH_BITS_CAP {
        return Err(Error::SizeLimit {
            what: "protocol search bit budget",
            count: max_bits as u128,
            cap: SEARCH_BITS_CAP as u128,
        });
    }
    let mut search = Search {
        rel,
        memo: HashMap::new(),
    };
    let (xs, ys) = (low_bits(rel.x_size()), low_bits(rel.y_size()));
    for bits in 0..=max_bits {
        if let Some(tree) = search.solve(xs, ys, bits) {
            return Ok(Some((bits, tree)));
        }
    }
    Ok(None)
}

struct Search<'a> {
    rel: &'a Relation,
    memo: HashMap<(u64, u64, usize), Option<ProtocolTree>>,
}

impl Search<'_> {
    /// A zero-error tree for the rectangle `xs × ys` using at most `budget`
    /// bits, if one exists.
    fn solve(&mut self, xs: u64, ys: u64, budget: usize) -> Option<ProtocolTree> {
        if let Some(hit) = self.memo.get(&(xs, ys, budget)) {
            return hit.clone();
        }
        let found = self.search(xs, ys, budget);
        self.memo.insert((xs, ys, budget), found.clone());
        found
    }

    fn search(&mut self, xs: u64, ys: u64, budget: usize) -> Option<ProtocolTree> {
        let common = bits_of(xs)
            .into_iter()
            .flat_map(|x| bits_of(ys).into_iter().map(move |y| (x, y)))
            .fold(u64::MAX, |m, (x, y)| m & self.rel.accept_mask(x, y));
        if common != 0 {
            return Some(ProtocolTree::leaf(common.trailing_zeros() as usize));
        }
        if budget == 0 {
            return None;
        }
        for speaker in [Speaker::Alice, Speaker::Bob] {
            let set = match speaker {
                Speaker::Alice => xs,
                Speaker::Bob => ys,
            };
            for part in proper_subsets(set) {
                let rest = set & !part;
                let (zero, one) = match speaker {
                    Speaker::Alice => (
                        self.solve(part, ys, budget - 1),
                        self.solve(rest, ys, budget - 1),
                    ),
                    Speaker::Bob => (
                        self.solve(xs, part, budget - 1),
                        self.solve(xs, rest, budget - 1),
                    ),
                };
                if let (Some(zero), Some(one)) = (zero, one) {
                    let n = match speaker {
                        Speaker::Alice => self.rel.x_size(),
                        Speaker::Bob => self.rel.y_size(),
                    };
                    let msg = (0..n).map(|i| u8::from(rest >> i & 1 == 1)).collect();
                    return Some(ProtocolTree::node(speaker, msg, zero, one));
                }
            }
        }
        None
    }
}

/// Nonempty proper subsets of `set`, in increasing order.
fn proper_subsets(set: u64) -> impl Iterator<Item = u64> {
    let mut sub = 0u64;
    std::iter::from_fn(move || loop {
        sub = sub.wrapping_sub(set) & set;
        if sub == 0 {
            return None;
        }
        if sub != set {
            return Some(sub);
        }
    })
}

/// Every canonical tree of depth at most `max_depth`: each internal node
/// splits the inputs still consistent with the transcript into two nonempty
/// parts, so no leaf is unreachable. Inputs outside the current rectangle
/// send 0.
pub fn enumerate_protocols(
    x_size: usize,
    y_size: usize,
    z_size: usize,
    max_depth: usize,
    cap: usize,
) -> Result<Vec<ProtocolTree>> {
    check_sizes(x_size, y_size, z_size)?;
    let mut count = 0usize;
    let out = trees_for(
        low_bits(x_size),
        low_bits(y_size),
        (x_size, y_size, z_size),
        max_depth,
        cap,
        &mut count,
    )?;
    Ok(out)
}

fn trees_for(
    xs: u64,
    ys: u64,
    sizes: (usize, usize, usize),
    depth: usize,
    cap: usize,
    count: &mut usize,
) -> Result<Vec<ProtocolTree>> {
    let (nx, ny, nz) = sizes;
    let mut out: Vec<ProtocolTree> = (0..nz).map(ProtocolTree::leaf).collect();
    if depth > 0 {
        for speaker in [Speaker::Alice, Speaker::Bob] {
            let (set, n) = match speaker {
                Speaker::Alice => (xs, nx),
                Speaker::Bob => (ys, ny),
            };
            for part in proper_subsets(set) {
                let rest = set & !part;
                let (a, b) = match speaker {
                    Speaker::Alice => ((part, ys), (rest, ys)),
                    Speaker::Bob => ((xs, part), (xs, rest)),
                };
                let zeros = trees_for(a.0, a.1, sizes, depth - 1, cap, count)?;
                let ones = trees_for(b.0, b.1, sizes, depth - 1, cap, count)?;
                let msg: Vec<u8> = (0..n).map(|i| u8::from(rest >> i & 1 == 1)).collect();
                for z in &zeros {
                    for o in &ones {
                        out.push(ProtocolTree::node(speaker, msg.clone(), z.clone(), o.clone()));
                    }
                }
            }
        }
    }
    *count += out.len();
    if out.len() > cap || *count > cap.saturating_mul(4) {
        return Err(Error::SizeLimit {
            what: "protocol",
            count: out.len().max(*count) as u128,
            cap: cap as u128,
        });
    }
    Ok(out)
}
