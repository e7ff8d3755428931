//! Exact linear programming over `max c.x s.t. A x <= b` (x free).
//!
//! The solver runs a two-phase tableau simplex with Bland's rule on the dual
//! `min b.y s.t. A^T y = c, y >= 0`. A dual basis is a set of rows of `A`, so
//! an optimal dual basis directly yields the basic partition and the primal
//! basic solution `A_tau^{-1} b_tau`.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::polyops::HPolytope;
use crate::ratgeom::{dot, solve_linear_system, RatMatrix, RatVector, Rational};

/// Split of the row indices into `tau` (`d` rows, invertible) and `eta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasicPartition {
    pub tau: Vec<usize>,
    pub eta: Vec<usize>,
}

impl BasicPartition {
    fn from_tau(tau: Vec<usize>, m: usize) -> Self {
        let eta = (0..m).filter(|i| !tau.contains(i)).collect();
        BasicPartition { tau, eta }
    }

    /// Primal basic solution `A_tau^{-1} b_tau`.
    pub fn basic_solution(&self, a: &RatMatrix, b: &[Rational]) -> Option<RatVector> {
        let sub = a.select_rows(&self.tau);
        let rhs: Vec<Rational> = self.tau.iter().map(|&i| b[i].clone()).collect();
        solve_linear_system(&sub, &rhs).ok().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub primal: RatVector,
    /// Nonnegative multipliers with `dual^T A = c^T`.
    pub dual: RatVector,
    /// `None` only when `A` lacks full column rank (no vertex exists).
    pub partition: Option<BasicPartition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(Optimum),
    /// `certificate >= 0`, `certificate^T A = 0`, `certificate^T b < 0`.
    Infeasible { certificate: RatVector },
    /// `A ray <= 0` and `c.ray > 0`; the feasible set is nonempty.
    Unbounded { ray: RatVector },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible { .. } => LpStatus::Infeasible,
            LpOutcome::Unbounded { .. } => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            LpOutcome::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        self.optimum().map(|o| &o.value)
    }
}

pub fn maximize(c: &[Rational], p: &HPolytope) -> Result<LpOutcome> {
    if c.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: c.len(),
        });
    }
    Ok(solve(c, p.a(), p.b()))
}

/// Dimension-checked entry point over raw `(A, b)`.
pub fn maximize_system(c: &[Rational], a: &RatMatrix, b: &[Rational]) -> Result<LpOutcome> {
    if c.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: c.len(),
        });
    }
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    Ok(solve(c, a, b))
}

pub(crate) fn solve(c: &[Rational], a: &RatMatrix, b: &[Rational]) -> LpOutcome {
    let mut t = DualTableau::new(c, a);
    match t.phase_one() {
        PhaseOne::Feasible => {}
        PhaseOne::Infeasible { ray } => {
            // No dual solution: the primal is infeasible or unbounded.
            let zero = vec![Rational::zero(); a.cols()];
            let mut feas = DualTableau::new(&zero, a);
            let _ = feas.phase_one();
            return match feas.phase_two(b) {
                PhaseTwo::Unbounded { certificate } => LpOutcome::Infeasible { certificate },
                PhaseTwo::Optimal => LpOutcome::Unbounded { ray },
            };
        }
    }
    match t.phase_two(b) {
        PhaseTwo::Unbounded { certificate } => LpOutcome::Infeasible { certificate },
        PhaseTwo::Optimal => LpOutcome::Optimal(t.optimum(c, a, b)),
    }
}

enum PhaseOne {
    Feasible,
    Infeasible { ray: RatVector },
}

enum PhaseTwo {
    Optimal,
    Unbounded { certificate: RatVector },
}

/// Tableau for `A'^T y + art = c'`, where rows were sign-flipped so `c' >= 0`.
/// Columns `0..m` are `y`, `m..m+d` artificials, and the last is the rhs.
struct DualTableau {
    m: usize,
    d: usize,
    signs: Vec<bool>,
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl DualTableau {
    fn new(c: &[Rational], a: &RatMatrix) -> Self {
        let (m, d) = (a.rows(), a.cols());
        let mut rows = Vec::with_capacity(d);
        let mut signs = Vec::with_capacity(d);
        for k in 0..d {
            let flip = c[k].is_negative();
            signs.push(flip);
            let mut row = Vec::with_capacity(m + d + 1);
            for j in 0..m {
                let v = a.get(j, k).clone();
                row.push(if flip { -v } else { v });
            }
            for kk in 0..d {
                row.push(if kk == k { Rational::one() } else { Rational::zero() });
            }
            row.push(c[k].abs());
            rows.push(row);
        }
        DualTableau {
            m,
            d,
            signs,
            rows,
            basis: (m..m + d).collect(),
        }
    }

    fn rhs(&self) -> usize {
        self.m + self.d
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = self.rows[r][col].recip();
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Simplex multipliers `cost_B B^{-1}`, read off the artificial columns.
    fn multipliers(&self, cost: &dyn Fn(usize) -> Rational) -> Vec<Rational> {
        (0..self.d)
            .map(|k| {
                self.rows
                    .iter()
                    .zip(&self.basis)
                    .fold(Rational::zero(), |acc, (row, &bv)| {
                        let cb = cost(bv);
                        if cb.is_zero() {
                            acc
                        } else {
                            acc + cb * &row[self.m + k]
                        }
                    })
            })
            .collect()
    }

    fn reduced_cost(&self, col: usize, cost: &dyn Fn(usize) -> Rational) -> Rational {
        let mut rc = cost(col);
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            if !row[col].is_zero() {
                let cb = cost(bv);
                if !cb.is_zero() {
                    rc -= cb * &row[col];
                }
            }
        }
        rc
    }

    /// Bland's rule: least entering index, ties in the ratio test broken by
    /// least basic variable index. Returns `Err(col)` for an unbounded column.
    fn run(&mut self, eligible: usize, cost: &dyn Fn(usize) -> Rational) -> Result<(), usize> {
        let rhs = self.rhs();
        loop {
            let Some(col) = (0..eligible).find(|&j| {
                !self.basis.contains(&j) && self.reduced_cost(j, cost).is_negative()
            }) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[col];
                let better = match &best {
                    None => true,
                    Some((br, bratio)) => {
                        ratio < *bratio || (ratio == *bratio && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return Err(col),
            }
        }
    }

    fn phase_one(&mut self) -> PhaseOne {
        let m = self.m;
        let cost = move |j: usize| {
            if j >= m {
                Rational::one()
            } else {
                Rational::zero()
            }
        };
        let total = self.m + self.d;
        // Phase I is bounded below by zero, so `run` cannot report unbounded.
        let _ = self.run(total, &cost);
        let rhs = self.rhs();
        let infeas = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, &bv)| bv >= m)
            .fold(Rational::zero(), |acc, (row, _)| acc + &row[rhs]);
        if infeas.is_positive() {
            let w = self.multipliers(&cost);
            let ray = w
                .into_iter()
                .zip(&self.signs)
                .map(|(v, &flip)| if flip { -v } else { v })
                .collect();
            return PhaseOne::Infeasible { ray };
        }
        // Drive zero-level artificials out of the basis where possible; rows
        // where this fails are linearly dependent and stay inert.
        for r in 0..self.d {
            if self.basis[r] >= m {
                if let Some(col) = (0..m).find(|&j| !self.rows[r][j].is_zero()) {
                    self.pivot(r, col);
                }
            }
        }
        PhaseOne::Feasible
    }

    fn phase_two(&mut self, b: &[Rational]) -> PhaseTwo {
        let m = self.m;
        let cost = |j: usize| {
            if j < m {
                b[j].clone()
            } else {
                Rational::zero()
            }
        };
        match self.run(m, &cost) {
            Ok(()) => PhaseTwo::Optimal,
            Err(col) => {
                let mut certificate = RatVector::zeros(m);
                certificate[col] = Rational::one();
                for (row, &bv) in self.rows.iter().zip(&self.basis) {
                    if bv < m {
                        certificate[bv] = -row[col].clone();
                    }
                }
                PhaseTwo::Unbounded { certificate }
            }
        }
    }

    fn optimum(&self, c: &[Rational], a: &RatMatrix, b: &[Rational]) -> Optimum {
        let m = self.m;
        let cost = |j: usize| {
            if j < m {
                b[j].clone()
            } else {
                Rational::zero()
            }
        };
        let primal: RatVector = self
            .multipliers(&cost)
            .into_iter()
            .zip(&self.signs)
            .map(|(v, &flip)| if flip { -v } else { v })
            .collect();
        let rhs = self.rhs();
        let mut dual = RatVector::zeros(m);
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            if bv < m {
                dual[bv] = row[rhs].clone();
            }
        }
        let partition = if self.basis.iter().all(|&bv| bv < m) {
            let tau: Vec<usize> = self.basis.iter().copied().sorted().collect();
            Some(BasicPartition::from_tau(tau, a.rows()))
        } else {
            None
        };
        let value = dot(c, &primal);
        debug_assert_eq!(value, dot(&dual, b));
        Optimum {
            value,
            primal,
            dual,
            partition,
        }
    }
}

/// All basic partitions of the rows of `A`, lexicographic in `tau`.
pub fn enumerate_basic_partitions(a: &RatMatrix) -> Result<Vec<BasicPartition>> {
    let (m, d) = (a.rows(), a.cols());
    let rank = a.rank();
    if rank < d {
        return Err(Error::RankDeficient { rank, cols: d });
    }
    Ok((0..m)
        .combinations(d)
        .filter(|tau| a.select_rows(tau).rank() == d)
        .map(|tau| BasicPartition::from_tau(tau, m))
        .collect())
}

/// Exhaustive self-check: the best objective over all feasible basic
/// solutions, or `None` when no basic solution is feasible. Agrees with
/// [`maximize`] whenever the latter is optimal and `A` has full column rank.
pub fn maximize_by_partitions(c: &[Rational], p: &HPolytope) -> Result<Option<Rational>> {
    if c.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: c.len(),
        });
    }
    let parts = enumerate_basic_partitions(p.a())?;
    Ok(parts
        .iter()
        .filter_map(|part| part.basic_solution(p.a(), p.b()))
        .filter(|x| p.contains(x))
        .map(|x| dot(c, &x))
        .max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratgeom::{rat, RatVector};

    fn v(e: &[i64]) -> RatVector {
        RatVector::from_ints(e)
    }

    fn unit_simplex(d: usize, a: i64) -> HPolytope {
        let mut rows: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { -1 } else { 0 }).collect())
            .collect();
        rows.push(vec![1; d]);
        let mut b = vec![0; d];
        b.push(a);
        HPolytope::from_ints(d, &rows, &b).unwrap()
    }

    fn assert_certified(c: &RatVector, p: &HPolytope, out: &LpOutcome) {
        match out {
            LpOutcome::Optimal(o) => {
                assert!(p.contains(&o.primal));
                assert!(o.dual.iter().all(|y| !y.is_negative()));
                let yta = p.a().transpose().mul_vec(&o.dual).unwrap();
                assert_eq!(&yta, c);
                assert_eq!(o.value, o.dual.dot(p.b()));
                for (j, y) in o.dual.iter().enumerate() {
                    if y.is_positive() {
                        assert_eq!(dot(p.a().row(j), &o.primal), p.b()[j]);
                    }
                }
                if let Some(part) = &o.partition {
                    assert_eq!(part.basic_solution(p.a(), p.b()).unwrap(), o.primal);
                }
            }
            LpOutcome::Infeasible { certificate } => {
                assert!(certificate.iter().all(|y| !y.is_negative()));
                assert!(p.a().transpose().mul_vec(certificate).unwrap().is_zero());
                assert!(certificate.dot(p.b()).is_negative());
            }
            LpOutcome::Unbounded { ray } => {
                let ar = p.a().mul_vec(ray).unwrap();
                assert!(ar.iter().all(|v| !v.is_positive()));
                assert!(ray.dot(c).is_positive());
            }
        }
    }

    #[test]
    fn simplex_sum_is_one() {
        let p = unit_simplex(3, 1);
        let c = v(&[1, 1, 1]);
        let out = maximize(&c, &p).unwrap();
        assert_eq!(out.value(), Some(&rat(1)));
        assert_certified(&c, &p, &out);
    }

    #[test]
    fn big_m_for_first_coordinate() {
        let p = unit_simplex(3, 1);
        let c = v(&[-1, 0, 0]);
        let out = maximize(&c, &p).unwrap();
        assert_eq!(out.value(), Some(&rat(0)));
        assert_certified(&c, &p, &out);
        // M = min{5 - x1 : x in P1} = 5 - max x1
        let max_x1 = maximize(&v(&[1, 0, 0]), &p).unwrap();
        assert_eq!(rat(5) - max_x1.value().unwrap(), rat(4));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let p = HPolytope::from_ints(1, &[vec![1], vec![-1]], &[0, -1]).unwrap();
        let c = v(&[1]);
        let out = maximize(&c, &p).unwrap();
        assert_eq!(out.status(), LpStatus::Infeasible);
        assert_certified(&c, &p, &out);
        // also with a zero objective and with an objective the dual cannot meet
        for c in [v(&[0]), v(&[-3])] {
            let out = maximize(&c, &p).unwrap();
            assert_eq!(out.status(), LpStatus::Infeasible);
            assert_certified(&c, &p, &out);
        }
    }

    #[test]
    fn half_plane_is_unbounded() {
        let p = HPolytope::from_ints(2, &[vec![-1, 0]], &[0]).unwrap();
        let c = v(&[0, 1]);
        let out = maximize(&c, &p).unwrap();
        assert_eq!(out.status(), LpStatus::Unbounded);
        assert_certified(&c, &p, &out);
        // bounded direction on a rank-deficient system: optimal, no vertex
        let c = v(&[-1, 0]);
        let out = maximize(&c, &p).unwrap();
        assert_eq!(out.value(), Some(&rat(0)));
        assert_eq!(out.optimum().unwrap().partition, None);
        assert_certified(&c, &p, &out);
    }

    #[test]
    fn no_rows() {
        let p = HPolytope::from_ints(2, &[], &[]).unwrap();
        assert_eq!(maximize(&v(&[0, 0]), &p).unwrap().value(), Some(&rat(0)));
        let out = maximize(&v(&[1, -2]), &p).unwrap();
        assert_eq!(out.status(), LpStatus::Unbounded);
    }

    #[test]
    fn dimension_mismatch() {
        let p = unit_simplex(3, 1);
        assert!(matches!(
            maximize(&v(&[1, 1]), &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hyper_rectangle_partitions() {
        for d in 1..=4usize {
            let mut rows = Vec::new();
            for s in [1i64, -1] {
                for i in 0..d {
                    rows.push((0..d).map(|j| if i == j { s } else { 0 }).collect::<Vec<_>>());
                }
            }
            let b = vec![1; 2 * d];
            let p = HPolytope::from_ints(d, &rows, &b).unwrap();
            let parts = enumerate_basic_partitions(p.a()).unwrap();
            assert_eq!(parts.len(), 1 << d);
            for part in &parts {
                let coords: Vec<usize> = part.tau.iter().map(|&r| r % d).sorted().collect();
                assert_eq!(coords, (0..d).collect::<Vec<_>>());
            }
            assert!(parts.windows(2).all(|w| w[0].tau < w[1].tau));
        }
    }

    #[test]
    fn rank_deficient_partitions_rejected() {
        let a = RatMatrix::from_int_rows(2, &[&[1, 0], &[-1, 0]]).unwrap();
        assert!(matches!(
            enumerate_basic_partitions(&a),
            Err(Error::RankDeficient { rank: 1, cols: 2 })
        ));
        let a = RatMatrix::from_int_rows(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(enumerate_basic_partitions(&a).unwrap().len(), 2);
    }

    #[test]
    fn deterministic_partition() {
        let p = unit_simplex(3, 1);
        let c = v(&[1, 1, 1]);
        let a = maximize(&c, &p).unwrap();
        let b = maximize(&c, &p).unwrap();
        assert_eq!(a, b);
    }
}
