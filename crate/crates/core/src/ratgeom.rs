//! Exact rational scalars, vectors and matrices, plus the affine-geometry
//! primitives (rank, linear solves, hyperplanes through points) used by the
//! rest of the crate. Nothing here touches floating point.

use std::fmt;
use std::ops::{Deref, DerefMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Anything that can be read as a point of `R^k`.
pub trait Coordinates {
    fn dim(&self) -> usize;
    fn coord(&self, i: usize) -> &Rational;
}

impl<T: Coordinates + ?Sized> Coordinates for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn coord(&self, i: usize) -> &Rational {
        (**self).coord(i)
    }
}

impl Coordinates for [Rational] {
    fn dim(&self) -> usize {
        self.len()
    }
    fn coord(&self, i: usize) -> &Rational {
        &self[i]
    }
}

impl Coordinates for Vec<Rational> {
    fn dim(&self) -> usize {
        self.len()
    }
    fn coord(&self, i: usize) -> &Rational {
        &self[i]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RatVector(Vec<Rational>);

impl RatVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        RatVector(vec![Rational::zero(); len])
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        entries.iter().map(|&v| rat(v)).collect()
    }

    /// The `i`-th standard unit vector of length `len`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[i] = Rational::one();
        v
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &[Rational]) -> Rational {
        debug_assert_eq!(self.len(), other.len());
        dot(&self.0, other)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        self.0.iter().map(|v| v * factor).collect()
    }

    pub fn neg(&self) -> Self {
        self.0.iter().map(|v| -v).collect()
    }

    pub fn concat(&self, other: &RatVector) -> Self {
        self.0.iter().chain(other.0.iter()).cloned().collect()
    }

    pub fn push(&mut self, v: Rational) {
        self.0.push(v);
    }
}

impl AsRef<[Rational]> for RatVector {
    fn as_ref(&self) -> &[Rational] {
        &self.0
    }
}

impl Deref for RatVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl DerefMut for RatVector {
    fn deref_mut(&mut self) -> &mut [Rational] {
        &mut self.0
    }
}

impl FromIterator<Rational> for RatVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RatVector(iter.into_iter().collect())
    }
}

impl From<Vec<Rational>> for RatVector {
    fn from(v: Vec<Rational>) -> Self {
        RatVector(v)
    }
}

impl Coordinates for RatVector {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn coord(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows. `cols` is needed to describe a matrix with
    /// no rows.
    pub fn from_rows<R: AsRef<[Rational]>>(cols: usize, rows: &[R]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(RatMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_int_rows(cols: usize, rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect();
        Self::from_rows(cols, &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        RatMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        RatMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RatVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self.row_iter().map(|r| dot(r, v)).collect())
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<Rational>> = self.row_iter().map(|r| r.to_vec()).collect();
        row_reduce(&mut rows, self.cols).len()
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: RatVector = self.row(i).iter().cloned().collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// In-place reduced row echelon form restricted to the first `ncols` columns
/// (extra trailing columns are carried along). Pivots are the first nonzero
/// entry found scanning down each column. Returns the pivot columns.
pub(crate) fn row_reduce(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for v in rows[r].iter_mut().skip(c) {
                *v *= &inv;
            }
        }
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, below) = tail.split_first_mut().expect("pivot row exists");
        for other in head.iter_mut().chain(below.iter_mut()) {
            if other[c].is_zero() {
                continue;
            }
            let factor = other[c].clone();
            for (v, p) in other.iter_mut().zip(pivot_row.iter()).skip(c) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `M v = rhs` exactly. `Ok(None)` means `M` is singular.
pub fn solve_linear_system(m: &RatMatrix, rhs: &[Rational]) -> Result<Option<RatVector>> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if rhs.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: rhs.len(),
        });
    }
    let n = m.cols;
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = m.row(i).to_vec();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut rows, n);
    if pivots.len() < n {
        return Ok(None);
    }
    Ok(Some(rows.into_iter().map(|mut r| r.pop().expect("rhs column")).collect()))
}

fn check_uniform<P: Coordinates>(points: &[P]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyPointSet)?;
    let dim = first.dim();
    for p in points {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
    }
    Ok(dim)
}

/// Maximum number of affinely independent points among `points`
/// (dimension of the affine hull plus one).
pub fn affine_rank<P: Coordinates>(points: &[P]) -> Result<usize> {
    let dim = check_uniform(points)?;
    let base = &points[0];
    let mut rows: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| (0..dim).map(|i| p.coord(i) - base.coord(i)).collect())
        .collect();
    Ok(row_reduce(&mut rows, dim).len() + 1)
}

/// A hyperplane `normal . x = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyperplane {
    pub normal: RatVector,
    pub rhs: Rational,
}

/// Positive rational `s` such that `s * entries` is integral with gcd 1.
/// Returns `None` when all entries are zero.
pub fn primitive_scale<'a, I>(entries: I) -> Option<Rational>
where
    I: IntoIterator<Item = &'a Rational> + Clone,
{
    let mut lcm = BigInt::one();
    for v in entries.clone() {
        lcm = lcm.lcm(v.denom());
    }
    let mut gcd = BigInt::zero();
    for v in entries {
        if !v.is_zero() {
            let scaled = v.numer() * (&lcm / v.denom());
            gcd = gcd.gcd(&scaled);
        }
    }
    if gcd.is_zero() {
        None
    } else {
        Some(Rational::new(lcm, gcd.abs()))
    }
}

/// Hyperplane containing `k` points of `R^k`. `Ok(None)` when the points are
/// affinely dependent. The result is primitive integral (normal and rhs share
/// gcd 1) with the first nonzero normal entry positive.
pub fn hyperplane_through<P: Coordinates>(points: &[P]) -> Result<Option<Hyperplane>> {
    let k = check_uniform(points)?;
    if points.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: points.len(),
        });
    }
    // Null space of [p_i | -1]; affinely independent points give rank k.
    let minus_one = -Rational::one();
    let mut rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            let mut r: Vec<Rational> = (0..k).map(|i| p.coord(i).clone()).collect();
            r.push(minus_one.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut rows, k + 1);
    if pivots.len() < k {
        return Ok(None);
    }
    let free = (0..=k)
        .find(|c| !pivots.contains(c))
        .expect("one free column");
    let mut sol = vec![Rational::zero(); k + 1];
    sol[free] = Rational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        sol[pc] = -rows[r][free].clone();
    }
    let normal_nonzero = sol[..k].iter().any(|v| !v.is_zero());
    if !normal_nonzero {
        return Ok(None);
    }
    let mut scale = primitive_scale(sol.iter()).expect("nonzero solution");
    let lead = sol[..k].iter().find(|v| !v.is_zero()).expect("nonzero normal");
    if lead.is_negative() {
        scale = -scale;
    }
    let rhs = sol.pop().expect("rhs entry") * &scale;
    let normal = sol.into_iter().map(|v| v * &scale).collect();
    Ok(Some(Hyperplane { normal, rhs }))
}

/// A point of the extended space: `x` in `R^d` stacked on `z` in `R^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiftedPoint {
    pub x: RatVector,
    pub z: RatVector,
}

impl LiftedPoint {
    pub fn new(x: RatVector, z: RatVector) -> Self {
        LiftedPoint { x, z }
    }

    /// `x` placed on the copy of polytope `i`: `z = e_i`, with `e_0 = 0`.
    pub fn on_polytope(x: RatVector, n: usize, i: usize) -> Self {
        let z = if i == 0 {
            RatVector::zeros(n)
        } else {
            RatVector::unit(n, i - 1)
        };
        LiftedPoint { x, z }
    }

    pub fn to_vector(&self) -> RatVector {
        self.x.concat(&self.z)
    }
}

impl Coordinates for LiftedPoint {
    fn dim(&self) -> usize {
        self.x.len() + self.z.len()
    }
    fn coord(&self, i: usize) -> &Rational {
        let d = self.x.len();
        if i < d {
            &self.x[i]
        } else {
            &self.z[i - d]
        }
    }
}

impl fmt::Display for LiftedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} | {}]", self.x, self.z)
    }
}
