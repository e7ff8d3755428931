//! Single-polytope operations and the inequality type shared by the whole
//! crate.

use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::ratgeom::{
    affine_rank, dot, primitive_scale, rat, solve_linear_system, Coordinates, LiftedPoint,
    RatMatrix, RatVector, Rational,
};

/// `{ x in R^d : A x <= b }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    a: RatMatrix,
    b: RatVector,
}

impl HPolytope {
    pub fn new(a: RatMatrix, b: RatVector) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: b.len(),
            });
        }
        Ok(HPolytope { a, b })
    }

    pub fn from_rows<R: AsRef<[Rational]>>(d: usize, rows: &[R], b: RatVector) -> Result<Self> {
        HPolytope::new(RatMatrix::from_rows(d, rows)?, b)
    }

    pub fn from_ints(d: usize, rows: &[Vec<i64>], b: &[i64]) -> Result<Self> {
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        HPolytope::new(RatMatrix::from_int_rows(d, &refs)?, RatVector::from_ints(b))
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &RatMatrix {
        &self.a
    }

    pub fn b(&self) -> &RatVector {
        &self.b
    }

    /// Row `j` as an inequality over `x` only.
    pub fn row_inequality(&self, j: usize) -> LinearInequality {
        LinearInequality::new(
            RatVector::new(self.a.row(j).to_vec()),
            RatVector::default(),
            self.b[j].clone(),
        )
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.a
            .row_iter()
            .zip(self.b.iter())
            .all(|(row, bj)| dot(row, x) <= *bj)
    }

    pub fn select_rows(&self, idx: &[usize]) -> HPolytope {
        HPolytope {
            a: self.a.select_rows(idx),
            b: idx.iter().map(|&i| self.b[i].clone()).collect(),
        }
    }

    /// Rows of `A` that `x` satisfies with equality.
    pub fn tight_rows(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.num_rows())
            .filter(|&j| dot(self.a.row(j), x) == self.b[j])
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        let zero = vec![Rational::zero(); self.dim()];
        matches!(lp::solve(&zero, &self.a, &self.b), LpOutcome::Infeasible { .. })
    }

    /// `max c.x` over the polytope.
    pub fn maximize(&self, c: &[Rational]) -> Result<LpOutcome> {
        lp::maximize(c, self)
    }
}

/// Sorted, duplicate-free extreme point set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VRep {
    pub points: Vec<RatVector>,
}

impl VRep {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RatVector> {
        self.points.iter()
    }
}

/// `alpha.x + mu.z <= rho`. With `mu` empty the inequality lives in `R^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearInequality {
    pub alpha: RatVector,
    pub mu: RatVector,
    pub rho: Rational,
}

impl LinearInequality {
    pub fn new(alpha: RatVector, mu: RatVector, rho: Rational) -> Self {
        LinearInequality { alpha, mu, rho }
    }

    pub fn from_ints(alpha: &[i64], mu: &[i64], rho: i64) -> Self {
        LinearInequality::new(RatVector::from_ints(alpha), RatVector::from_ints(mu), rat(rho))
    }

    /// `-z_j <= 0`.
    pub fn z_nonnegative(d: usize, n: usize, j: usize) -> Self {
        LinearInequality::new(RatVector::zeros(d), RatVector::unit(n, j).neg(), Rational::zero())
    }

    /// `sum_j z_j <= 1`.
    pub fn z_sum_at_most_one(d: usize, n: usize) -> Self {
        LinearInequality::new(
            RatVector::zeros(d),
            vec![Rational::one(); n].into(),
            Rational::one(),
        )
    }

    pub fn d(&self) -> usize {
        self.alpha.len()
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.mu.is_zero() && self.rho.is_zero()
    }

    /// Vertical inequalities have a nonzero `x`-part.
    pub fn is_vertical(&self) -> bool {
        !self.alpha.is_zero()
    }

    pub fn lhs<P: Coordinates + ?Sized>(&self, p: &P) -> Rational {
        let d = self.d();
        let mut acc = Rational::zero();
        for (i, c) in self.alpha.iter().chain(self.mu.iter()).enumerate() {
            if !c.is_zero() {
                acc += c * p.coord(i);
            }
        }
        debug_assert_eq!(p.dim(), d + self.n());
        acc
    }

    pub fn satisfied_by<P: Coordinates + ?Sized>(&self, p: &P) -> bool {
        self.lhs(p) <= self.rho
    }

    pub fn is_tight_at<P: Coordinates + ?Sized>(&self, p: &P) -> bool {
        self.lhs(p) == self.rho
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        LinearInequality::new(self.alpha.scaled(s), self.mu.scaled(s), &self.rho * s)
    }

    /// Same `x`-part with `n` zero `z` coefficients.
    pub fn with_zero_z(&self, n: usize) -> Self {
        LinearInequality::new(self.alpha.clone(), RatVector::zeros(n), self.rho.clone())
    }

    pub fn canonical(&self) -> Result<Self> {
        canonicalize(self)
    }

    /// Full coefficient vector `(alpha, mu)`.
    pub fn normal(&self) -> RatVector {
        self.alpha.concat(&self.mu)
    }
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    first: &mut bool,
    c: &Rational,
    var: &str,
) -> fmt::Result {
    if c.is_zero() {
        return Ok(());
    }
    let mag = c.abs();
    match (*first, c.is_negative()) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    *first = false;
    if mag.is_one() {
        write!(f, "{var}")
    } else {
        write!(f, "{mag} {var}")
    }
}

impl fmt::Display for LinearInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.alpha.iter().enumerate() {
            write_term(f, &mut first, c, &format!("x{}", i + 1))?;
        }
        for (j, c) in self.mu.iter().enumerate() {
            write_term(f, &mut first, c, &format!("z{}", j + 1))?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " <= {}", self.rho)
    }
}

pub fn is_bounded(p: &HPolytope) -> bool {
    if p.is_empty() {
        return true;
    }
    (0..p.dim()).all(|i| {
        [Rational::one(), -Rational::one()].into_iter().all(|s| {
            let c = RatVector::unit(p.dim(), i).scaled(&s);
            matches!(lp::solve(&c, p.a(), p.b()), LpOutcome::Optimal(_))
        })
    })
}

/// Maximizes a common slack `t <= 1` over `A_j x + t <= b_j`; full
/// dimensional iff the optimum is positive. Zero rows need `b_j > 0`.
pub fn is_full_dimensional(p: &HPolytope) -> bool {
    let d = p.dim();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for j in 0..p.num_rows() {
        let row = p.a().row(j);
        if row.iter().all(Zero::is_zero) {
            if !p.b()[j].is_positive() {
                return false;
            }
            continue;
        }
        let mut r = row.to_vec();
        r.push(Rational::one());
        rows.push(r);
        rhs.push(p.b()[j].clone());
    }
    let mut cap = vec![Rational::zero(); d];
    cap.push(Rational::one());
    rows.push(cap);
    rhs.push(Rational::one());
    let a = RatMatrix::from_rows(d + 1, &rows).expect("uniform rows");
    let c = RatVector::unit(d + 1, d);
    match lp::solve(&c, &a, &rhs) {
        LpOutcome::Optimal(o) => o.value.is_positive(),
        _ => false,
    }
}

fn check_polytope(p: &HPolytope) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    if !is_bounded(p) {
        return Err(Error::Unbounded);
    }
    Ok(())
}

/// Extreme points by basic-partition exhaustion.
pub fn extreme_points(p: &HPolytope) -> Result<VRep> {
    check_polytope(p)?;
    let d = p.dim();
    if d == 0 {
        return Ok(VRep {
            points: vec![RatVector::default()],
        });
    }
    let mut points: Vec<RatVector> = (0..p.num_rows())
        .combinations(d)
        .filter_map(|tau| {
            let sub = p.a().select_rows(&tau);
            let rhs: Vec<Rational> = tau.iter().map(|&i| p.b()[i].clone()).collect();
            solve_linear_system(&sub, &rhs).ok().flatten()
        })
        .filter(|x| p.contains(x))
        .collect();
    points.sort();
    points.dedup();
    Ok(VRep { points })
}

/// Indices of an irredundant subsystem describing the same set. Rows are
/// tested in order against the rows still kept, so duplicates keep the first.
pub fn remove_redundant_rows(p: &HPolytope) -> Result<Vec<usize>> {
    if p.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let m = p.num_rows();
    let mut alive = vec![true; m];
    for j in 0..m {
        let others: Vec<usize> = (0..m).filter(|&i| i != j && alive[i]).collect();
        let sub = p.select_rows(&others);
        let needed = match lp::solve(p.a().row(j), sub.a(), sub.b()) {
            LpOutcome::Optimal(o) => o.value > p.b()[j],
            LpOutcome::Unbounded { .. } => true,
            LpOutcome::Infeasible { .. } => unreachable!("subsystem of a nonempty system"),
        };
        alive[j] = needed;
    }
    Ok((0..m).filter(|&j| alive[j]).collect())
}

pub fn remove_redundant(p: &HPolytope) -> Result<HPolytope> {
    Ok(p.select_rows(&remove_redundant_rows(p)?))
}

/// Scale by the positive rational that makes every entry integral with
/// gcd 1.
pub fn canonicalize(q: &LinearInequality) -> Result<LinearInequality> {
    let s = primitive_scale(q.alpha.iter().chain(q.mu.iter()).chain(std::iter::once(&q.rho)))
        .ok_or(Error::ZeroInequality)?;
    Ok(q.scaled(&s))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceCheck {
    pub valid: bool,
    pub tight: Vec<LiftedPoint>,
}

pub fn face_tight_points(points: &[LiftedPoint], q: &LinearInequality) -> FaceCheck {
    let mut valid = true;
    let mut tight = Vec::new();
    for p in points {
        let v = q.lhs(p);
        if v > q.rho {
            valid = false;
        } else if v == q.rho {
            tight.push(p.clone());
        }
    }
    FaceCheck { valid, tight }
}

/// Valid on every point and tight on `dim` affinely independent ones.
pub fn describes_facet(points: &[LiftedPoint], q: &LinearInequality, dim: usize) -> bool {
    let check = face_tight_points(points, q);
    check.valid && !check.tight.is_empty() && affine_rank(&check.tight).ok() == Some(dim)
}
