//! Full optimal big-M lifting of polytope inequalities into `(x, z)` space.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hullenum::{Facet, FacetList, Provenance};
use crate::lp::LpOutcome;
use crate::polyops::{
    canonicalize, extreme_points, is_bounded, is_full_dimensional, remove_redundant_rows,
    HPolytope, LinearInequality, VRep,
};
use crate::ratgeom::{LiftedPoint, RatMatrix, RatVector, Rational};

/// The disjunction `x in P_0 or ... or P_n`, with cached vertex data.
#[derive(Clone, Debug)]
pub struct DisjunctionInstance {
    d: usize,
    polytopes: Vec<HPolytope>,
    vertices: Vec<VRep>,
    full_dim: Vec<bool>,
    lifted: Vec<LiftedPoint>,
    offsets: Vec<usize>,
}

impl PartialEq for DisjunctionInstance {
    fn eq(&self, other: &Self) -> bool {
        self.polytopes == other.polytopes
    }
}

impl DisjunctionInstance {
    pub fn new(polytopes: Vec<HPolytope>) -> Result<Self> {
        if polytopes.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least two polytopes, got {}",
                polytopes.len()
            )));
        }
        let d = polytopes[0].dim();
        if d == 0 {
            return Err(Error::InvalidInstance("dimension must be at least 1".into()));
        }
        for p in &polytopes {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
        }
        for (i, p) in polytopes.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidInstance(format!("polytope {i} is empty")));
            }
            if !is_bounded(p) {
                return Err(Error::InvalidInstance(format!("polytope {i} is unbounded")));
            }
        }
        let full_dim: Vec<bool> = polytopes.iter().map(is_full_dimensional).collect();
        if !full_dim.iter().any(|&f| f) {
            return Err(Error::InvalidInstance(
                "no polytope is full dimensional".into(),
            ));
        }
        let n = polytopes.len() - 1;
        let vertices = polytopes
            .iter()
            .map(extreme_points)
            .collect::<Result<Vec<_>>>()?;
        let mut lifted = Vec::new();
        let mut offsets = vec![0];
        for (i, vr) in vertices.iter().enumerate() {
            lifted.extend(
                vr.iter()
                    .map(|x| LiftedPoint::on_polytope(x.clone(), n, i)),
            );
            offsets.push(lifted.len());
        }
        Ok(DisjunctionInstance {
            d,
            polytopes,
            vertices,
            full_dim,
            lifted,
            offsets,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.polytopes.len() - 1
    }

    pub fn polytopes(&self) -> &[HPolytope] {
        &self.polytopes
    }

    pub fn polytope(&self, i: usize) -> &HPolytope {
        &self.polytopes[i]
    }

    pub fn extreme_points(&self, i: usize) -> &VRep {
        &self.vertices[i]
    }

    pub fn is_full_dimensional(&self, i: usize) -> bool {
        self.full_dim[i]
    }

    /// Every `(x, e_i)` with `x` an extreme point of `P_i`, grouped by `i`.
    pub fn lifted_points(&self) -> &[LiftedPoint] {
        &self.lifted
    }

    pub fn lifted_points_of(&self, i: usize) -> &[LiftedPoint] {
        &self.lifted[self.offsets[i]..self.offsets[i + 1]]
    }

    /// The shared constraint matrix, when every polytope uses the same one.
    pub fn common_matrix(&self) -> Option<&RatMatrix> {
        let a = self.polytopes[0].a();
        self.polytopes.iter().all(|p| p.a() == a).then_some(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftingResult {
    pub origin: usize,
    pub source: LinearInequality,
    /// `M_0..M_n`; the entry at `origin` is zero.
    pub big_m: Vec<Rational>,
    pub lifted: LinearInequality,
}

fn check_source(q: &LinearInequality, inst: &DisjunctionInstance) -> Result<()> {
    if q.d() != inst.d() {
        return Err(Error::DimensionMismatch {
            expected: inst.d(),
            found: q.d(),
        });
    }
    if !q.mu.is_zero() {
        return Err(Error::InvalidInstance(
            "source inequality must not involve z".into(),
        ));
    }
    Ok(())
}

fn max_over(q: &LinearInequality, p: &HPolytope) -> Result<Rational> {
    match p.maximize(&q.alpha)? {
        LpOutcome::Optimal(o) => Ok(o.value),
        other => Err(Error::Internal(format!(
            "lifting LP over a nonempty polytope ended {:?}",
            other.status()
        ))),
    }
}

/// `M_i = min { rho - alpha.x : x in P_i }`.
fn big_m(q: &LinearInequality, inst: &DisjunctionInstance, i: usize) -> Result<Rational> {
    Ok(&q.rho - max_over(q, inst.polytope(i))?)
}

fn check_valid(q: &LinearInequality, inst: &DisjunctionInstance, k: usize) -> Result<()> {
    let max = max_over(q, inst.polytope(k))?;
    if max > q.rho {
        return Err(Error::InvalidForPolytope {
            polytope: k,
            max,
            rhs: q.rho.clone(),
        });
    }
    Ok(())
}

fn assemble(q: &LinearInequality, k: usize, big_m: Vec<Rational>) -> LiftingResult {
    let n = big_m.len() - 1;
    let lifted = if k == 0 {
        // alpha.x + sum_i M_i z_i <= rho
        LinearInequality::new(q.alpha.clone(), big_m[1..].to_vec().into(), q.rho.clone())
    } else {
        // alpha.x + sum_{i != k} (M_i - M_0) z_i - M_0 z_k <= rho - M_0
        let m0 = &big_m[0];
        let mu: RatVector = (1..=n)
            .map(|i| if i == k { -m0.clone() } else { &big_m[i] - m0 })
            .collect();
        LinearInequality::new(q.alpha.clone(), mu, &q.rho - m0)
    };
    LiftingResult {
        origin: k,
        source: LinearInequality::new(q.alpha.clone(), RatVector::default(), q.rho.clone()),
        big_m,
        lifted,
    }
}

/// Lifting of an inequality valid for `P_k`, `k` in `0..=n`.
pub fn lift(q: &LinearInequality, k: usize, inst: &DisjunctionInstance) -> Result<LiftingResult> {
    let order: Vec<usize> = (0..=inst.n()).collect();
    lift_in_order(q, k, inst, &order)
}

pub fn lift_from_p0(q: &LinearInequality, inst: &DisjunctionInstance) -> Result<LiftingResult> {
    lift(q, 0, inst)
}

pub fn lift_from_pk(
    q: &LinearInequality,
    k: usize,
    inst: &DisjunctionInstance,
) -> Result<LiftingResult> {
    if k == 0 || k > inst.n() {
        return Err(Error::InvalidInstance(format!(
            "source index {k} is not in 1..={}",
            inst.n()
        )));
    }
    lift(q, k, inst)
}

/// Computes the `M_i` one index at a time in the given order. The closed form
/// does not depend on the order; this exists so that claim can be tested.
pub fn lift_in_order(
    q: &LinearInequality,
    k: usize,
    inst: &DisjunctionInstance,
    order: &[usize],
) -> Result<LiftingResult> {
    check_source(q, inst)?;
    if k > inst.n() {
        return Err(Error::InvalidInstance(format!(
            "source index {k} exceeds n = {}",
            inst.n()
        )));
    }
    check_valid(q, inst, k)?;
    let mut ms = vec![Rational::zero(); inst.n() + 1];
    for &i in order {
        if i != k {
            ms[i] = big_m(q, inst, i)?;
        }
    }
    Ok(assemble(q, k, ms))
}

/// Liftings of every irredundant row of every `P_i`, plus `z_j >= 0` and
/// `sum z_j <= 1`, canonical and deduplicated.
pub fn full_lifting_system(inst: &DisjunctionInstance) -> Result<FacetList> {
    let (d, n) = (inst.d(), inst.n());
    let mut facets = Vec::new();
    for (i, p) in inst.polytopes().iter().enumerate() {
        for row in remove_redundant_rows(p)? {
            let res = lift(&p.row_inequality(row), i, inst)?;
            facets.push(Facet {
                inequality: canonicalize(&res.lifted)?,
                provenance: Provenance::Lifting,
                lifted_from: vec![(i, row)],
                signatures: Vec::new(),
            });
        }
    }
    facets.extend(non_vertical(d, n));
    Ok(FacetList::from_facets(d, n, facets))
}

pub(crate) fn non_vertical(d: usize, n: usize) -> Vec<Facet> {
    (0..n)
        .map(|j| LinearInequality::z_nonnegative(d, n, j))
        .chain(std::iter::once(LinearInequality::z_sum_at_most_one(d, n)))
        .map(|q| Facet::new(q, Provenance::NonVertical))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyops::{describes_facet, face_tight_points};
    use crate::ratgeom::rat;

    fn interval(lo: i64, hi: i64) -> HPolytope {
        HPolytope::from_ints(1, &[vec![1], vec![-1]], &[hi, -lo]).unwrap()
    }

    fn reflected_3_1_5() -> DisjunctionInstance {
        let p0 = HPolytope::from_ints(
            3,
            &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            &[5, 5, 5, -14],
        )
        .unwrap();
        let p1 = HPolytope::from_ints(
            3,
            &[vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1], vec![1, 1, 1]],
            &[0, 0, 0, 1],
        )
        .unwrap();
        DisjunctionInstance::new(vec![p0, p1]).unwrap()
    }

    fn x_only(alpha: &[i64], rho: i64) -> LinearInequality {
        LinearInequality::from_ints(alpha, &[], rho)
    }

    #[test]
    fn two_intervals_from_p0() {
        let inst = DisjunctionInstance::new(vec![interval(0, 5), interval(2, 3)]).unwrap();
        let r = lift_from_p0(&x_only(&[1], 5), &inst).unwrap();
        assert_eq!(r.lifted, LinearInequality::from_ints(&[1], &[2], 5));
        assert_eq!(r.big_m, vec![rat(0), rat(2)]);
    }

    #[test]
    fn reflected_simplex_liftings() {
        let inst = reflected_3_1_5();
        let r = lift_from_p0(&x_only(&[1, 0, 0], 5), &inst).unwrap();
        assert_eq!(r.lifted, LinearInequality::from_ints(&[1, 0, 0], &[4], 5));
        let r = lift_from_p0(&x_only(&[-1, -1, -1], -14), &inst).unwrap();
        assert_eq!(r.lifted, LinearInequality::from_ints(&[-1, -1, -1], &[-14], -14));
        let r = lift_from_pk(&x_only(&[-1, 0, 0], 0), 1, &inst).unwrap();
        assert_eq!(r.lifted, LinearInequality::from_ints(&[-1, 0, 0], &[-4], -4));
        let r = lift_from_pk(&x_only(&[1, 1, 1], 1), 1, &inst).unwrap();
        assert_eq!(r.lifted, LinearInequality::from_ints(&[1, 1, 1], &[14], 15));
    }

    #[test]
    fn three_intervals_from_p1() {
        let inst =
            DisjunctionInstance::new(vec![interval(0, 1), interval(2, 3), interval(4, 5)]).unwrap();
        let r = lift_from_pk(&x_only(&[1], 3), 1, &inst).unwrap();
        assert_eq!(r.big_m, vec![rat(2), rat(0), rat(-2)]);
        assert_eq!(r.lifted, LinearInequality::from_ints(&[1], &[-2, -4], 1));
        let sys = full_lifting_system(&inst).unwrap();
        assert_eq!(sys.count(Provenance::Lifting), 2);
        assert_eq!(sys.count(Provenance::NonVertical), 3);
        assert!(sys.contains(&LinearInequality::from_ints(&[1], &[-2, -4], 1)));
        assert!(sys.contains(&LinearInequality::from_ints(&[-1], &[2, 4], 0)));
        // each bound is recovered from all three intervals
        let upper = sys
            .iter()
            .find(|f| f.inequality == LinearInequality::from_ints(&[1], &[-2, -4], 1))
            .unwrap();
        assert_eq!(upper.lifted_from, vec![(0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn invalid_source() {
        let inst = reflected_3_1_5();
        match lift_from_p0(&x_only(&[1, 0, 0], 4), &inst) {
            Err(Error::InvalidForPolytope { polytope: 0, max, rhs }) => {
                assert_eq!(max, rat(5));
                assert_eq!(rhs, rat(4));
            }
            other => panic!("{other:?}"),
        }
        assert!(lift_from_pk(&x_only(&[1, 0, 0], 1), 0, &inst).is_err());
    }

    #[test]
    fn reflected_simplex_system() {
        let inst = reflected_3_1_5();
        let sys = full_lifting_system(&inst).unwrap();
        assert_eq!(sys.count(Provenance::Lifting), 8);
        assert_eq!(sys.count(Provenance::NonVertical), 2);
        assert_eq!(sys.len(), 10);
        for f in sys.iter() {
            assert!(face_tight_points(inst.lifted_points(), &f.inequality).valid);
            assert!(describes_facet(inst.lifted_points(), &f.inequality, 4));
        }
    }

    #[test]
    fn boxes_pair_up() {
        let sq = |lo: i64, hi: i64| {
            HPolytope::from_ints(
                2,
                &[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
                &[hi, hi, -lo, -lo],
            )
            .unwrap()
        };
        let inst = DisjunctionInstance::new(vec![sq(0, 2), sq(3, 4)]).unwrap();
        let sys = full_lifting_system(&inst).unwrap();
        assert_eq!(sys.len(), 6);
        assert!(sys.contains(&LinearInequality::from_ints(&[-1, 0], &[3], 0)));
        assert!(sys.contains(&LinearInequality::from_ints(&[0, 1], &[-2], 2)));
        assert!(sys.iter().all(|f| f.provenance != Provenance::Lifting || f.lifted_from.len() == 2));
    }

    #[test]
    fn order_does_not_matter() {
        let inst =
            DisjunctionInstance::new(vec![interval(0, 1), interval(2, 3), interval(4, 5)]).unwrap();
        let q = x_only(&[-1], -2);
        let a = lift_in_order(&q, 1, &inst, &[0, 1, 2]).unwrap();
        let b = lift_in_order(&q, 1, &inst, &[2, 1, 0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn instance_validation() {
        assert!(DisjunctionInstance::new(vec![interval(0, 1)]).is_err());
        let empty = HPolytope::from_ints(1, &[vec![1], vec![-1]], &[0, -1]).unwrap();
        assert!(DisjunctionInstance::new(vec![interval(0, 1), empty]).is_err());
        let point = interval(1, 1);
        assert!(DisjunctionInstance::new(vec![point.clone(), point.clone()]).is_err());
        let inst = DisjunctionInstance::new(vec![point, interval(0, 2)]).unwrap();
        assert!(!inst.is_full_dimensional(0));
        assert_eq!(inst.lifted_points().len(), 3);
        assert_eq!(inst.lifted_points_of(1).len(), 2);
    }
}
