//! Instance families with known hulls, the common-matrix feasibility
//! condition, and the closed-form hull it licenses.

use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hullenum::{Facet, FacetList, Provenance};
use crate::lifting::{non_vertical, DisjunctionInstance};
use crate::lp::{self, enumerate_basic_partitions, BasicPartition, LpOutcome};
use crate::polyops::{
    canonicalize, extreme_points, is_full_dimensional, remove_redundant_rows, HPolytope,
    LinearInequality,
};
use crate::ratgeom::{affine_rank, dot, rat, RatMatrix, RatVector, Rational};

/// Why a closed-form hypothesis rejected an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypothesisFailure {
    /// The basic solution of `tau` is feasible for some right-hand sides
    /// and not for others.
    Phi { tau: Vec<usize>, feasible: Vec<bool> },
    /// `A_row x <= b^i_row` misses `P_i` entirely.
    EmptyFace { row: usize, polytope: usize },
    /// `A_row x <= b^i_row` is a facet of no `P_i`.
    NoFacet { row: usize },
}

impl fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisFailure::Phi { tau, feasible } => {
                let tau = tau.iter().map(|i| i + 1).join(",");
                let bits = feasible.iter().map(|&b| if b { '1' } else { '0' }).join("");
                write!(f, "condition Phi fails at tau=({tau}), feasibility by polytope {bits}")
            }
            HypothesisFailure::EmptyFace { row, polytope } => {
                write!(f, "row {} gives an empty face of polytope {polytope}", row + 1)
            }
            HypothesisFailure::NoFacet { row } => {
                write!(f, "row {} is a facet of no polytope", row + 1)
            }
        }
    }
}

/// Bounds `(l_i, u_i)` for each box `P_i`.
pub type BoxBounds = (RatVector, RatVector);

fn box_dim(bounds: &[BoxBounds]) -> Result<usize> {
    let d = bounds
        .first()
        .map(|b| b.0.len())
        .ok_or_else(|| Error::ParameterDomain("no boxes given".into()))?;
    for (i, (l, u)) in bounds.iter().enumerate() {
        if l.len() != d || u.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: l.len().max(u.len()),
            });
        }
        if l.iter().zip(u.iter()).any(|(a, b)| a >= b) {
            return Err(Error::ParameterDomain(format!(
                "box {i} has a lower bound not below its upper bound"
            )));
        }
    }
    Ok(d)
}

/// The matrix `[I; -I]`.
pub fn hyperrect_matrix(d: usize) -> RatMatrix {
    let rows: Vec<RatVector> = (0..d)
        .map(|i| RatVector::unit(d, i))
        .chain((0..d).map(|i| RatVector::unit(d, i).neg()))
        .collect();
    RatMatrix::from_rows(d, &rows).expect("uniform rows")
}

pub fn gen_hyperrect(bounds: &[BoxBounds]) -> Result<DisjunctionInstance> {
    let d = box_dim(bounds)?;
    let a = hyperrect_matrix(d);
    let polytopes = bounds
        .iter()
        .map(|(l, u)| {
            let b: RatVector = u.iter().cloned().chain(l.iter().map(|v| -v)).collect();
            HPolytope::new(a.clone(), b)
        })
        .collect::<Result<Vec<_>>>()?;
    DisjunctionInstance::new(polytopes)
}

/// `x_i + sum_j (u_0i - u_ji) z_j <= u_0i`, `x_i + sum_j (l_0i - l_ji) z_j >= l_0i`,
/// `z >= 0` and `sum z <= 1`.
pub fn hyperrect_hull(bounds: &[BoxBounds]) -> Result<FacetList> {
    let d = box_dim(bounds)?;
    if bounds.len() < 2 {
        return Err(Error::ParameterDomain("need at least two boxes".into()));
    }
    let n = bounds.len() - 1;
    let (l0, u0) = &bounds[0];
    let mut facets = Vec::new();
    for i in 0..d {
        let upper_mu: RatVector = bounds[1..].iter().map(|(_, u)| &u0[i] - &u[i]).collect();
        let upper = LinearInequality::new(RatVector::unit(d, i), upper_mu, u0[i].clone());
        let lower_mu: RatVector = bounds[1..].iter().map(|(l, _)| &l[i] - &l0[i]).collect();
        let lower = LinearInequality::new(RatVector::unit(d, i).neg(), lower_mu, -&l0[i]);
        for (q, row) in [(upper, i), (lower, d + i)] {
            let mut f = Facet::new(canonicalize(&q)?, Provenance::Lifting);
            f.lifted_from = (0..=n).map(|p| (p, row)).collect();
            facets.push(f);
        }
    }
    facets.extend(non_vertical(d, n));
    Ok(FacetList::from_facets(d, n, facets))
}

fn check_reflected_params(d: usize, a: &Rational) -> Result<()> {
    if d < 3 {
        return Err(Error::ParameterDomain(format!("need d >= 3, got {d}")));
    }
    if !a.is_positive() {
        return Err(Error::ParameterDomain(format!("need a > 0, got {a}")));
    }
    Ok(())
}

/// `P_0 = {x_i <= b, sum x >= d b - a}`, `P_1 = {x >= 0, sum x <= a}`.
pub fn gen_reflected_simplex(d: usize, a: &Rational, b: &Rational) -> Result<DisjunctionInstance> {
    check_reflected_params(d, a)?;
    let mut up: Vec<RatVector> = (0..d).map(|i| RatVector::unit(d, i)).collect();
    up.push(vec![-Rational::one(); d].into());
    let mut b0: RatVector = vec![b.clone(); d].into();
    b0.push(a - rat(d as i64) * b);
    let mut down: Vec<RatVector> = (0..d).map(|i| RatVector::unit(d, i).neg()).collect();
    down.push(vec![Rational::one(); d].into());
    let mut b1 = RatVector::zeros(d);
    b1.push(a.clone());
    DisjunctionInstance::new(vec![
        HPolytope::from_rows(d, &up, b0)?,
        HPolytope::from_rows(d, &down, b1)?,
    ])
}

fn subset_sum(d: usize, set: &[usize], sign: &Rational) -> RatVector {
    (0..d)
        .map(|i| {
            if set.contains(&i) {
                sign.clone()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// Closed-form facet list of the reflected-simplex hull: the `2(d+1)`
/// liftings, `0 <= z <= 1`, and for `2 <= m <= d-1` the families
/// `-sum_{T0} x + (a - (d+1-m) b) z <= a - (d+1-m) b` (`|T0| = d+1-m`) and
/// `sum_{T1} x + (m b - a) z <= m b` (`|T1| = m`).
pub fn reflected_simplex_hull(d: usize, a: &Rational, b: &Rational) -> Result<FacetList> {
    check_reflected_params(d, a)?;
    let one = Rational::one();
    let minus = -Rational::one();
    let db = rat(d as i64) * b;
    let mut lifted = Vec::new();
    for i in 0..d {
        lifted.push((
            LinearInequality::new(RatVector::unit(d, i), vec![b - a].into(), b.clone()),
            (0, i),
        ));
        lifted.push((
            LinearInequality::new(RatVector::unit(d, i).neg(), vec![a - b].into(), a - b),
            (1, i),
        ));
    }
    lifted.push((
        LinearInequality::new(vec![minus.clone(); d].into(), vec![a - &db].into(), a - &db),
        (0, d),
    ));
    lifted.push((
        LinearInequality::new(vec![one.clone(); d].into(), vec![&db - a].into(), db.clone()),
        (1, d),
    ));
    let mut facets = Vec::new();
    for (q, src) in lifted {
        let mut f = Facet::new(canonicalize(&q)?, Provenance::Lifting);
        f.lifted_from = vec![src];
        facets.push(f);
    }
    facets.extend(non_vertical(d, 1));
    for m in 2..d {
        let t = rat((d + 1 - m) as i64);
        let c0 = a - &t * b;
        for t0 in (0..d).combinations(d + 1 - m) {
            let q = LinearInequality::new(subset_sum(d, &t0, &minus), vec![c0.clone()].into(), c0.clone());
            facets.push(Facet::new(canonicalize(&q)?, Provenance::Other));
        }
        let mb = rat(m as i64) * b;
        for t1 in (0..d).combinations(m) {
            let q = LinearInequality::new(subset_sum(d, &t1, &one), vec![&mb - a].into(), mb.clone());
            facets.push(Facet::new(canonicalize(&q)?, Provenance::Other));
        }
    }
    Ok(FacetList::from_facets(d, 1, facets))
}

/// Which first row the padded simplex uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PaddedRow {
    /// `(1, 0, 0)`, so that `(5, 5, 5)` is the basic solution for `tau = (1, 2, 3)`.
    #[default]
    Shifted,
    /// `(1, 0, 1)`, which leaves `P_0` empty.
    Skewed,
}

/// The two 8-row systems of the padded reflected simplex, unvalidated.
pub fn padded_reflected_simplex_polytopes(row: PaddedRow) -> Vec<HPolytope> {
    let first = match row {
        PaddedRow::Shifted => vec![1, 0, 0],
        PaddedRow::Skewed => vec![1, 0, 1],
    };
    let rows = vec![
        first,
        vec![0, 1, 0],
        vec![0, 0, 1],
        vec![-1, -1, -1],
        vec![-1, 0, 0],
        vec![0, -1, 0],
        vec![0, 0, -1],
        vec![1, 1, 1],
    ];
    [
        [5, 5, 5, -14, -4, -4, -4, 15],
        [1, 1, 1, 0, 0, 0, 0, 1],
    ]
    .iter()
    .map(|b| HPolytope::from_ints(3, &rows, b).expect("fixed 8x3 data"))
    .collect()
}

/// The reflected simplex for `(3, 1, 5)` on one 8-row matrix, each simplex
/// padded with the other's shifted facets. The skewed first row makes
/// `P_0` empty (`x1 + x3 <= 5` against `x1, x3 >= 4`), so that variant fails
/// instance validation.
pub fn gen_padded_reflected_simplex(row: PaddedRow) -> Result<DisjunctionInstance> {
    DisjunctionInstance::new(padded_reflected_simplex_polytopes(row))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiEntry {
    pub partition: BasicPartition,
    /// `A_tau^{-1} b^i_tau` for each right-hand side.
    pub solutions: Vec<RatVector>,
    pub feasible: Vec<bool>,
}

impl PhiEntry {
    pub fn uniform(&self) -> bool {
        self.feasible.iter().all_equal()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiReport {
    pub holds: bool,
    /// First partition, in lexicographic order, with mixed feasibility.
    pub witness: Option<BasicPartition>,
    pub table: Vec<PhiEntry>,
}

impl PhiReport {
    pub fn witness_entry(&self) -> Option<&PhiEntry> {
        let w = self.witness.as_ref()?;
        self.table.iter().find(|e| &e.partition == w)
    }
}

pub fn check_phi(a: &RatMatrix, bs: &[RatVector]) -> Result<PhiReport> {
    for b in bs {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: b.len(),
            });
        }
    }
    let mut table = Vec::new();
    for partition in enumerate_basic_partitions(a)? {
        let mut solutions = Vec::with_capacity(bs.len());
        let mut feasible = Vec::with_capacity(bs.len());
        for b in bs {
            let x = partition
                .basic_solution(a, b)
                .ok_or_else(|| Error::Internal("basis matrix is singular".into()))?;
            feasible.push(
                partition
                    .eta
                    .iter()
                    .all(|&j| dot(a.row(j), &x) <= b[j]),
            );
            solutions.push(x);
        }
        table.push(PhiEntry {
            partition,
            solutions,
            feasible,
        });
    }
    let witness = table.iter().find(|e| !e.uniform()).map(|e| e.partition.clone());
    Ok(PhiReport {
        holds: witness.is_none(),
        witness,
        table,
    })
}

/// Right-hand sides of every polytope, requiring one shared matrix.
pub fn common_rhs(inst: &DisjunctionInstance) -> Result<(&RatMatrix, Vec<RatVector>)> {
    let a = inst.common_matrix().ok_or_else(|| {
        Error::InvalidInstance("polytopes do not share one constraint matrix".into())
    })?;
    Ok((a, inst.polytopes().iter().map(|p| p.b().clone()).collect()))
}

/// Every vertex tight on exactly `d` rows.
pub fn is_simple(p: &HPolytope) -> Result<bool> {
    let d = p.dim();
    Ok(extreme_points(p)?
        .iter()
        .all(|x| p.tight_rows(x).len() == d))
}

/// `P_0 = P` and `P_i = {A x <= b + delta_i}`, with the condition-Phi report.
pub fn gen_rhs_perturbation(
    p: &HPolytope,
    deltas: &[RatVector],
) -> Result<(DisjunctionInstance, PhiReport)> {
    if !is_full_dimensional(p) {
        return Err(Error::ParameterDomain("base polytope is not full dimensional".into()));
    }
    if remove_redundant_rows(p)?.len() != p.num_rows() {
        return Err(Error::ParameterDomain("base description is redundant".into()));
    }
    if !is_simple(p)? {
        return Err(Error::ParameterDomain("base polytope is not simple".into()));
    }
    let mut polytopes = vec![p.clone()];
    for delta in deltas {
        if delta.len() != p.num_rows() {
            return Err(Error::DimensionMismatch {
                expected: p.num_rows(),
                found: delta.len(),
            });
        }
        let b: RatVector = p.b().iter().zip(delta.iter()).map(|(x, y)| x + y).collect();
        polytopes.push(HPolytope::new(p.a().clone(), b)?);
    }
    let inst = DisjunctionInstance::new(polytopes)?;
    let bs: Vec<RatVector> = inst.polytopes().iter().map(|q| q.b().clone()).collect();
    let report = check_phi(p.a(), &bs)?;
    Ok((inst, report))
}

/// `A x + sum_i (b^0 - b^i) z_i <= b^0` with the non-vertical inequalities,
/// emitted only after condition Phi and the face and facet hypotheses pass.
pub fn common_matrix_hull(inst: &DisjunctionInstance) -> Result<FacetList> {
    let (a, bs) = common_rhs(inst)?;
    let report = check_phi(a, &bs)?;
    if let Some(e) = report.witness_entry() {
        return Err(Error::Hypothesis(HypothesisFailure::Phi {
            tau: e.partition.tau.clone(),
            feasible: e.feasible.clone(),
        }));
    }
    let (d, n) = (inst.d(), inst.n());
    for row in 0..a.rows() {
        for (i, p) in inst.polytopes().iter().enumerate() {
            let max = match lp::maximize(a.row(row), p)? {
                LpOutcome::Optimal(o) => o.value,
                _ => return Err(Error::Internal("face LP over a polytope not optimal".into())),
            };
            if max != bs[i][row] {
                return Err(Error::Hypothesis(HypothesisFailure::EmptyFace { row, polytope: i }));
            }
        }
        let facet_somewhere = (0..=n).any(|i| {
            inst.is_full_dimensional(i) && {
                let tight: Vec<&RatVector> = inst
                    .extreme_points(i)
                    .iter()
                    .filter(|x| dot(a.row(row), x) == bs[i][row])
                    .collect();
                affine_rank(&tight).ok() == Some(d)
            }
        });
        if !facet_somewhere {
            return Err(Error::Hypothesis(HypothesisFailure::NoFacet { row }));
        }
    }
    let mut facets = Vec::new();
    for row in 0..a.rows() {
        let mu: RatVector = bs[1..].iter().map(|b| &bs[0][row] - &b[row]).collect();
        let q = LinearInequality::new(a.row(row).to_vec().into(), mu, bs[0][row].clone());
        let mut f = Facet::new(canonicalize(&q)?, Provenance::Lifting);
        f.lifted_from = (0..=n).map(|i| (i, row)).collect();
        facets.push(f);
    }
    facets.extend(non_vertical(d, n));
    Ok(FacetList::from_facets(d, n, facets))
}

/// Inequalities of the list implied by the others (none, for a minimal
/// description).
pub fn implied_inequalities(list: &FacetList) -> Result<Vec<LinearInequality>> {
    let qs: Vec<&LinearInequality> = list.iter().map(|f| &f.inequality).collect();
    let dim = list.d + list.n;
    let mut implied = Vec::new();
    for (j, q) in qs.iter().enumerate() {
        let rows: Vec<RatVector> = qs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, o)| o.normal())
            .collect();
        let rhs: RatVector = qs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, o)| o.rho.clone())
            .collect();
        let others = HPolytope::from_rows(dim, &rows, rhs)?;
        let redundant = match lp::maximize(&q.normal(), &others)? {
            LpOutcome::Optimal(o) => o.value <= q.rho,
            LpOutcome::Unbounded { .. } => false,
            LpOutcome::Infeasible { .. } => true,
        };
        if redundant {
            implied.push((*q).clone());
        }
    }
    Ok(implied)
}
