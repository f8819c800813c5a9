//! Exact rational linear programming.
//!
//! A two-phase revised simplex over [`Rational`] with Bland's rule, so every
//! run terminates and is fully deterministic. Problems are stated as
//!
//! ```text
//! minimize c·w  subject to  a_i·w {=, ≥, ≤} b_i,  w ≥ 0
//! ```
//!
//! Inequalities become slack or surplus columns internally; rows that need
//! it get an artificial column for phase one.

use num_traits::{Signed, Zero};

mod num;

use num::Q;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on the number of structural variables.
pub const DEFAULT_VAR_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Ge,
    Le,
}

impl Cmp {
    fn flipped(self) -> Cmp {
        match self {
            Cmp::Eq => Cmp::Eq,
            Cmp::Ge => Cmp::Le,
            Cmp::Le => Cmp::Ge,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Cmp::Eq => lhs == rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Le => lhs <= rhs,
        }
    }
}

/// One row `Σ coeffs · w  cmp  rhs`, with sparse coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) -> Self {
        Constraint { coeffs, cmp, rhs }
    }

    pub fn lhs(&self, w: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (j, a)| acc + a * &w[*j])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Minimized.
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<Rational>) -> Self {
        LinearProgram {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, cmp, rhs));
    }

    pub fn objective_value(&self, w: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(w)
            .fold(Rational::zero(), |acc, (c, x)| acc + c * x)
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::invalid(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some((j, _)) = c.coeffs.iter().find(|(j, _)| *j >= self.num_vars) {
                return Err(Error::invalid(format!(
                    "constraint {i} references variable {j} of {}",
                    self.num_vars
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; zero unless optimal.
    pub value: Rational,
    /// Dense values of the structural variables; empty unless optimal.
    pub assignment: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    /// Nonzero entries of the assignment.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
    }

    /// The optimal value, or an error naming the status.
    pub fn optimal_value(&self) -> Result<&Rational> {
        match self.status {
            LpStatus::Optimal => Ok(&self.value),
            s => Err(Error::LpStatus(s.as_str())),
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    solve_capped(lp, DEFAULT_VAR_CAP)
}

pub fn solve_capped(lp: &LinearProgram, var_cap: usize) -> Result<LpSolution> {
    if lp.num_vars > var_cap {
        return Err(Error::SizeLimit {
            what: "LP variable",
            count: lp.num_vars as u128,
            cap: var_cap as u128,
        });
    }
    lp.validate()?;
    Simplex::build(lp).run(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Simplex {
    m: usize,
    columns: Vec<Vec<(usize, Q)>>,
    kinds: Vec<ColKind>,
    /// Explicit basis inverse, row-major `m × m`.
    binv: Vec<Vec<Q>>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    xb: Vec<Q>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Simplex {
        let m = lp.constraints.len();
        let mut columns: Vec<Vec<(usize, Q)>> = vec![Vec::new(); lp.num_vars];
        let mut kinds = vec![ColKind::Structural; lp.num_vars];
        let mut rhs = Vec::with_capacity(m);
        let mut cmps = Vec::with_capacity(m);
        for (i, c) in lp.constraints.iter().enumerate() {
            let negate = c.rhs.is_negative();
            // merge duplicate indices so each column has one entry per row
            let mut row: Vec<(usize, Rational)> = c.coeffs.clone();
            row.sort_by_key(|(j, _)| *j);
            let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
            for (j, a) in row {
                match merged.last_mut() {
                    Some((k, b)) if *k == j => *b += a,
                    _ => merged.push((j, a)),
                }
            }
            for (j, a) in merged {
                if !a.is_zero() {
                    let a = if negate { -a } else { a };
                    columns[j].push((i, Q::from(&a)));
                }
            }
            let b = if negate { -c.rhs.clone() } else { c.rhs.clone() };
            rhs.push(Q::from(&b));
            cmps.push(if negate { c.cmp.flipped() } else { c.cmp });
        }
        let mut basis = vec![usize::MAX; m];
        for (i, cmp) in cmps.iter().enumerate() {
            match cmp {
                Cmp::Le => {
                    basis[i] = columns.len();
                    columns.push(vec![(i, Q::ONE)]);
                    kinds.push(ColKind::Slack);
                }
                Cmp::Ge => {
                    columns.push(vec![(i, -&Q::ONE)]);
                    kinds.push(ColKind::Slack);
                }
                Cmp::Eq => {}
            }
        }
        for (i, cmp) in cmps.iter().enumerate() {
            if *cmp != Cmp::Le {
                basis[i] = columns.len();
                columns.push(vec![(i, Q::ONE)]);
                kinds.push(ColKind::Artificial);
            }
        }
        let mut in_basis = vec![false; columns.len()];
        for &b in &basis {
            in_basis[b] = true;
        }
        let binv = (0..m)
            .map(|i| (0..m).map(|k| if i == k { Q::ONE } else { Q::ZERO }).collect())
            .collect();
        Simplex {
            m,
            columns,
            kinds,
            binv,
            basis,
            in_basis,
            xb: rhs,
            pivots: 0,
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution> {
        if self.kinds.contains(&ColKind::Artificial) {
            let phase1: Vec<Q> = self
                .kinds
                .iter()
                .map(|k| if *k == ColKind::Artificial { Q::ONE } else { Q::ZERO })
                .collect();
            // phase one is bounded below by zero
            let _ = self.optimize(&phase1, true);
            let infeasible = self
                .basis
                .iter()
                .zip(&self.xb)
                .any(|(b, v)| self.kinds[*b] == ColKind::Artificial && v.is_positive());
            if infeasible {
                return Ok(self.finish(LpStatus::Infeasible, lp));
            }
            self.drive_out_artificials();
        }
        let mut cost: Vec<Q> = lp.objective.iter().map(Q::from).collect();
        cost.resize(self.columns.len(), Q::ZERO);
        match self.optimize(&cost, false) {
            Outcome::Optimal => Ok(self.finish(LpStatus::Optimal, lp)),
            Outcome::Unbounded => Ok(self.finish(LpStatus::Unbounded, lp)),
        }
    }

    fn finish(&self, status: LpStatus, lp: &LinearProgram) -> LpSolution {
        if status != LpStatus::Optimal {
            return LpSolution {
                status,
                value: Rational::zero(),
                assignment: Vec::new(),
                pivots: self.pivots,
            };
        }
        let mut assignment = vec![Rational::zero(); lp.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.num_vars {
                assignment[b] = self.xb[i].to_rational();
            }
        }
        let value = lp.objective_value(&assignment);
        LpSolution {
            status,
            value,
            assignment,
            pivots: self.pivots,
        }
    }

    /// Simplex iterations under `cost` with Bland's rule: the entering column
    /// is the lowest-index improving one, ratio ties leave by lowest basic
    /// index.
    fn optimize(&mut self, cost: &[Q], allow_artificial: bool) -> Outcome {
        loop {
            let y = self.duals(cost);
            let entering = (0..self.columns.len()).find(|&j| {
                if self.in_basis[j] || (!allow_artificial && self.kinds[j] == ColKind::Artificial)
                {
                    return false;
                }
                let mut d = cost[j].clone();
                for (k, a) in &self.columns[j] {
                    if !y[*k].is_zero() {
                        d -= &y[*k] * a;
                    }
                }
                d.is_negative()
            });
            let Some(e) = entering else {
                return Outcome::Optimal;
            };
            let u = self.ftran(e);
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.m {
                if !u[i].is_positive() {
                    continue;
                }
                let ratio = &self.xb[i] / &u[i];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Outcome::Unbounded;
            };
            self.pivot(r, e, &u);
        }
    }

    /// `c_B^T B^{-1}`.
    fn duals(&self, cost: &[Q]) -> Vec<Q> {
        let mut y = vec![Q::ZERO; self.m];
        for (i, &b) in self.basis.iter().enumerate() {
            let c = &cost[b];
            if c.is_zero() {
                continue;
            }
            for (k, v) in self.binv[i].iter().enumerate() {
                if !v.is_zero() {
                    y[k] = &y[k] + &(c * v);
                }
            }
        }
        y
    }

    /// `B^{-1} A_j`.
    fn ftran(&self, j: usize) -> Vec<Q> {
        self.binv.iter().map(|row| self.row_times(row, j)).collect()
    }

    fn row_times(&self, row: &[Q], j: usize) -> Q {
        self.columns[j].iter().fold(Q::ZERO, |acc, (k, a)| {
            if row[*k].is_zero() {
                acc
            } else {
                &acc + &(&row[*k] * a)
            }
        })
    }

    fn pivot(&mut self, r: usize, e: usize, u: &[Q]) {
        let piv = u[r].clone();
        for v in self.binv[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &piv;
            }
        }
        self.xb[r] = &self.xb[r] / &piv;
        let pivot_row = self.binv[r].clone();
        let nz: Vec<usize> = (0..self.m).filter(|&k| !pivot_row[k].is_zero()).collect();
        for i in 0..self.m {
            if i == r || u[i].is_zero() {
                continue;
            }
            let f = &u[i];
            for &k in &nz {
                self.binv[i][k] -= f * &pivot_row[k];
            }
            let delta = f * &self.xb[r];
            self.xb[i] -= delta;
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[e] = true;
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Pivots zero-valued artificials out of the basis where possible. Rows
    /// where no other column has a nonzero entry are redundant; their
    /// artificial stays basic at zero and never moves again.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.kinds[self.basis[r]] != ColKind::Artificial {
                continue;
            }
            let candidate = (0..self.columns.len()).find(|&j| {
                !self.in_basis[j]
                    && self.kinds[j] != ColKind::Artificial
                    && !self.row_times(&self.binv[r], j).is_zero()
            });
            if let Some(j) = candidate {
                let u = self.ftran(j);
                self.pivot(r, j, &u);
            }
        }
    }
}

/// Exact evaluation of one constraint against an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintCheck {
    pub index: usize,
    pub lhs: Rational,
    pub cmp: Cmp,
    pub rhs: Rational,
    /// `lhs − rhs`.
    pub slack: Rational,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub constraints: Vec<ConstraintCheck>,
    /// Variables with a negative value.
    pub negative_vars: Vec<usize>,
    pub objective: Rational,
}

impl FeasibilityReport {
    pub fn all_pass(&self) -> bool {
        self.negative_vars.is_empty() && self.constraints.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.constraints.iter().filter(|c| !c.ok)
    }
}

pub fn check_feasible(lp: &LinearProgram, assignment: &[Rational]) -> Result<FeasibilityReport> {
    if assignment.len() != lp.num_vars {
        return Err(Error::invalid(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            lp.num_vars
        )));
    }
    lp.validate()?;
    let constraints = lp
        .constraints
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let lhs = c.lhs(assignment);
            let ok = c.cmp.holds(&lhs, &c.rhs);
            ConstraintCheck {
                index,
                slack: &lhs - &c.rhs,
                lhs,
                cmp: c.cmp,
                rhs: c.rhs.clone(),
                ok,
            }
        })
        .collect();
    let negative_vars = assignment
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_negative())
        .map(|(j, _)| j)
        .collect();
    Ok(FeasibilityReport {
        constraints,
        negative_vars,
        objective: lp.objective_value(assignment),
    })
}
