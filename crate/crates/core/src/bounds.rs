//! Partition-bound linear programs over the full tile universe.
//!
//! * `prt(f, ℰ)`: exact cover of every cell, incorrect mass at most `ℰ(x, y)`.
//! * `relaxed_prt(f, ε)`: cover at most 1, correct mass at least `1 − ε`.
//! * `relaxed_prt_mu(f, ε, μ)`: cover at most 1, correct mass at least
//!   `1 − ε` on average under `μ`.

use num_traits::{One, Signed, Zero};

use crate::distribution::InputDistribution;
use crate::error::{Error, Result};
use crate::lp::{self, Cmp, LinearProgram, LpStatus};
use crate::rational::{self, Rational};
use crate::relation::{ErrorFn, Relation};
use crate::tiles::{
    average_tiling_error, enumerate_tiles_capped, tiling_error, Tile, TileWeighting,
    DEFAULT_TILE_CAP,
};

/// Size caps applied when building and solving bound LPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub tile_cap: u128,
    pub var_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            tile_cap: DEFAULT_TILE_CAP,
            var_cap: lp::DEFAULT_VAR_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub value: Rational,
    pub log2_value: f64,
    pub certificate: TileWeighting,
}

/// A bound LP together with the tile behind each column.
#[derive(Debug, Clone)]
pub struct PartitionLp {
    pub tiles: Vec<Tile>,
    pub lp: LinearProgram,
}

impl PartitionLp {
    pub fn solve(&self, limits: &Limits) -> Result<BoundResult> {
        let sol = lp::solve_capped(&self.lp, limits.var_cap)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::LpStatus(sol.status.as_str()));
        }
        let certificate = sol
            .support()
            .map(|(j, w)| (self.tiles[j], w.clone()))
            .collect();
        Ok(BoundResult {
            log2_value: rational::log2(&sol.value),
            value: sol.value,
            certificate,
        })
    }

    /// Dense column vector for a weighting; tiles outside the universe are
    /// an error.
    pub fn assignment_of(&self, w: &TileWeighting) -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); self.tiles.len()];
        for (t, v) in w.iter() {
            let j = self
                .tiles
                .binary_search(t)
                .map_err(|_| Error::invalid(format!("tile {t} is not in the tile universe")))?;
            out[j] = v.clone();
        }
        Ok(out)
    }
}

fn universe(rel: &Relation, limits: &Limits) -> Result<Vec<Tile>> {
    enumerate_tiles_capped(rel.x_size(), rel.y_size(), rel.z_size(), limits.tile_cap)
}

/// Column indices of tiles containing each cell, and of those whose label is
/// accepted there.
fn incidence(rel: &Relation, tiles: &[Tile]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let ny = rel.y_size();
    let mut cover = vec![Vec::new(); rel.cells()];
    let mut correct = vec![Vec::new(); rel.cells()];
    for (j, t) in tiles.iter().enumerate() {
        for x in t.xs_list() {
            for y in t.ys_list() {
                cover[x * ny + y].push(j);
                if rel.accepts(x, y, t.z) {
                    correct[x * ny + y].push(j);
                }
            }
        }
    }
    (cover, correct)
}

fn ones(cols: &[usize]) -> Vec<(usize, Rational)> {
    cols.iter().map(|&j| (j, Rational::one())).collect()
}

fn check_eps(eps: &Rational) -> Result<()> {
    if eps.is_negative() || eps > &Rational::one() {
        return Err(Error::invalid(format!(
            "error parameter {} is outside [0, 1]",
            rational::format(eps)
        )));
    }
    Ok(())
}

pub fn prt_lp(rel: &Relation, errfn: &ErrorFn, limits: &Limits) -> Result<PartitionLp> {
    if (errfn.x_size(), errfn.y_size()) != (rel.x_size(), rel.y_size()) {
        return Err(Error::invalid("error function shape does not match the relation"));
    }
    let tiles = universe(rel, limits)?;
    let (cover, correct) = incidence(rel, &tiles);
    let mut lp = LinearProgram::new(vec![Rational::one(); tiles.len()]);
    for cell in 0..rel.cells() {
        lp.add(ones(&cover[cell]), Cmp::Eq, Rational::one());
    }
    for (cell, e) in errfn.values().iter().enumerate() {
        lp.add(ones(&correct[cell]), Cmp::Ge, Rational::one() - e);
    }
    Ok(PartitionLp { tiles, lp })
}

pub fn relaxed_prt_lp(rel: &Relation, eps: &Rational, limits: &Limits) -> Result<PartitionLp> {
    check_eps(eps)?;
    let tiles = universe(rel, limits)?;
    let (cover, correct) = incidence(rel, &tiles);
    let mut lp = LinearProgram::new(vec![Rational::one(); tiles.len()]);
    for cell in 0..rel.cells() {
        lp.add(ones(&cover[cell]), Cmp::Le, Rational::one());
    }
    for cols in &correct {
        lp.add(ones(cols), Cmp::Ge, Rational::one() - eps);
    }
    Ok(PartitionLp { tiles, lp })
}

pub fn relaxed_prt_mu_lp(
    rel: &Relation,
    eps: &Rational,
    mu: &InputDistribution,
    limits: &Limits,
) -> Result<PartitionLp> {
    check_eps(eps)?;
    mu.check_shape(rel.x_size(), rel.y_size())?;
    let tiles = universe(rel, limits)?;
    let (cover, correct) = incidence(rel, &tiles);
    let mut lp = LinearProgram::new(vec![Rational::one(); tiles.len()]);
    for cell in 0..rel.cells() {
        lp.add(ones(&cover[cell]), Cmp::Le, Rational::one());
    }
    let mut avg: Vec<Rational> = vec![Rational::zero(); tiles.len()];
    for (cell, cols) in correct.iter().enumerate() {
        let p = &mu.probs()[cell];
        if p.is_zero() {
            continue;
        }
        for &j in cols {
            avg[j] += p;
        }
    }
    let coeffs = avg
        .into_iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .collect();
    lp.add(coeffs, Cmp::Ge, Rational::one() - eps);
    Ok(PartitionLp { tiles, lp })
}

pub fn prt(rel: &Relation, errfn: &ErrorFn) -> Result<BoundResult> {
    prt_with(rel, errfn, &Limits::default())
}

pub fn prt_with(rel: &Relation, errfn: &ErrorFn, limits: &Limits) -> Result<BoundResult> {
    prt_lp(rel, errfn, limits)?.solve(limits)
}

pub fn relaxed_prt(rel: &Relation, eps: &Rational) -> Result<BoundResult> {
    relaxed_prt_with(rel, eps, &Limits::default())
}

pub fn relaxed_prt_with(rel: &Relation, eps: &Rational, limits: &Limits) -> Result<BoundResult> {
    relaxed_prt_lp(rel, eps, limits)?.solve(limits)
}

pub fn relaxed_prt_mu(
    rel: &Relation,
    eps: &Rational,
    mu: &InputDistribution,
) -> Result<BoundResult> {
    relaxed_prt_mu_with(rel, eps, mu, &Limits::default())
}

pub fn relaxed_prt_mu_with(
    rel: &Relation,
    eps: &Rational,
    mu: &InputDistribution,
    limits: &Limits,
) -> Result<BoundResult> {
    relaxed_prt_mu_lp(rel, eps, mu, limits)?.solve(limits)
}

/// Which constraint family a certificate is checked against.
#[derive(Debug, Clone)]
pub enum CertificateMode {
    Prt(ErrorFn),
    Relaxed(Rational),
    RelaxedMu(Rational, InputDistribution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub total_weight: Rational,
    /// Per-cell `Σ_{t ∋ (x,y)} w(t)`, row-major.
    pub cover_mass: Vec<Rational>,
    /// Per-cell `err_{f,w}`, row-major.
    pub error: Vec<Rational>,
    /// Average error under `μ`, in the distributional mode.
    pub average_error: Option<Rational>,
    pub violations: Vec<String>,
}

impl CertificateReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_certificate(
    rel: &Relation,
    w: &TileWeighting,
    mode: &CertificateMode,
) -> Result<CertificateReport> {
    w.validate(rel)?;
    let (nx, ny) = (rel.x_size(), rel.y_size());
    let cover_mass = w.cover_mass(nx, ny);
    let correct = w.correct_mass(rel);
    let error = tiling_error(rel, w);
    let mut violations = Vec::new();
    let cell = |i: usize| (i / ny, i % ny);
    let mut average_error = None;
    match mode {
        CertificateMode::Prt(errfn) => {
            if (errfn.x_size(), errfn.y_size()) != (nx, ny) {
                return Err(Error::invalid("error function shape does not match the relation"));
            }
            for (i, m) in cover_mass.iter().enumerate() {
                if !m.is_one() {
                    violations.push(format!(
                        "cover mass at {:?} is {}, expected 1",
                        cell(i),
                        rational::format(m)
                    ));
                }
            }
            for (i, (e, bound)) in error.iter().zip(errfn.values()).enumerate() {
                if e > bound {
                    violations.push(format!(
                        "error at {:?} is {}, exceeds {}",
                        cell(i),
                        rational::format(e),
                        rational::format(bound)
                    ));
                }
            }
        }
        CertificateMode::Relaxed(eps) => {
            check_eps(eps)?;
            push_cover_le_one(&cover_mass, ny, &mut violations);
            let need = Rational::one() - eps;
            for (i, c) in correct.iter().enumerate() {
                if c < &need {
                    violations.push(format!(
                        "correct mass at {:?} is {}, below {}",
                        cell(i),
                        rational::format(c),
                        rational::format(&need)
                    ));
                }
            }
        }
        CertificateMode::RelaxedMu(eps, mu) => {
            check_eps(eps)?;
            push_cover_le_one(&cover_mass, ny, &mut violations);
            let avg = average_tiling_error(rel, w, mu)?;
            if &avg > eps {
                violations.push(format!(
                    "average error {} exceeds {}",
                    rational::format(&avg),
                    rational::format(eps)
                ));
            }
            average_error = Some(avg);
        }
    }
    Ok(CertificateReport {
        total_weight: w.total(),
        cover_mass,
        error,
        average_error,
        violations,
    })
}

fn push_cover_le_one(cover: &[Rational], ny: usize, violations: &mut Vec<String>) {
    for (i, m) in cover.iter().enumerate() {
        if m > &Rational::one() {
            violations.push(format!(
                "cover mass at {:?} is {}, exceeds 1",
                (i / ny, i % ny),
                rational::format(m)
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn constant_relation_needs_one_tile() {
        let rel = Relation::constant(3, 2, 2).unwrap();
        let r = prt(&rel, &ErrorFn::zero(3, 2)).unwrap();
        assert_eq!(r.value, int(1));
        assert_eq!(r.log2_value, 0.0);
        assert_eq!(r.certificate.len(), 1);
    }

    #[test]
    fn eq_and_and_anchors() {
        let eq = prt(&Relation::equality(1), &ErrorFn::zero(2, 2)).unwrap();
        assert_eq!(eq.value, int(4));
        assert_eq!(eq.log2_value, 2.0);
        let and = prt(&Relation::and(1), &ErrorFn::zero(2, 2)).unwrap();
        assert_eq!(and.value, int(3));
    }

    #[test]
    fn relaxed_at_eps_one_is_zero() {
        for rel in [Relation::equality(1), Relation::and(1)] {
            let r = relaxed_prt(&rel, &int(1)).unwrap();
            assert_eq!(r.value, int(0));
            assert!(r.certificate.is_empty());
            let mu = InputDistribution::uniform(2, 2);
            assert_eq!(relaxed_prt_mu(&rel, &int(1), &mu).unwrap().value, int(0));
        }
    }

    #[test]
    fn relaxed_zero_error_anchors() {
        assert_eq!(relaxed_prt(&Relation::equality(1), &int(0)).unwrap().value, int(4));
        assert_eq!(relaxed_prt(&Relation::and(1), &int(0)).unwrap().value, int(3));
        let mu = InputDistribution::uniform(2, 2);
        assert_eq!(
            relaxed_prt_mu(&Relation::equality(1), &int(0), &mu).unwrap().value,
            int(4)
        );
        let point = InputDistribution::point(2, 2, 1, 0);
        assert_eq!(
            relaxed_prt_mu(&Relation::equality(1), &int(0), &point).unwrap().value,
            int(1)
        );
    }

    #[test]
    fn eps_out_of_range_rejected() {
        assert!(relaxed_prt(&Relation::equality(1), &ratio(3, 2)).is_err());
    }

    #[test]
    fn certificates_round_trip_and_perturbation_fails() {
        let rel = Relation::equality(1);
        let errfn = ErrorFn::zero(2, 2);
        let r = prt(&rel, &errfn).unwrap();
        let mode = CertificateMode::Prt(errfn);
        let rep = verify_certificate(&rel, &r.certificate, &mode).unwrap();
        assert!(rep.pass(), "{:?}", rep.violations);
        assert_eq!(rep.total_weight, int(4));

        let mut bumped = r.certificate.clone();
        let (t, _) = bumped.iter().next().map(|(t, w)| (*t, w.clone())).unwrap();
        bumped.add(t, ratio(-1, 1000));
        let rep = verify_certificate(&rel, &bumped, &mode).unwrap();
        assert!(!rep.pass());
        assert!(rep.violations.iter().any(|v| v.contains("cover mass")));
    }

    #[test]
    fn out_of_range_tile_is_an_error() {
        let rel = Relation::equality(1);
        let w: TileWeighting = [(Tile::from_sets(&[2], &[0], 0), int(1))].into_iter().collect();
        assert!(verify_certificate(&rel, &w, &CertificateMode::Relaxed(int(0))).is_err());
    }

    #[test]
    fn hand_written_eq_certificate_against_lp() {
        let rel = Relation::equality(1);
        let plp = prt_lp(&rel, &ErrorFn::zero(2, 2), &Limits::default()).unwrap();
        let w: TileWeighting = (0..2)
            .flat_map(|x| (0..2).map(move |y| (x, y)))
            .map(|(x, y)| (Tile::from_sets(&[x], &[y], usize::from(x == y)), int(1)))
            .collect();
        let report = lp::check_feasible(&plp.lp, &plp.assignment_of(&w).unwrap()).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.objective, int(4));
    }
}
