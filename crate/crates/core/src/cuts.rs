//! Nonnegative aggregation, mixed-integer rounding, and the reflection
//! `x -> b e - x`, `z -> 1 - z` used to move cuts between the two sides of a
//! reflected pair of polytopes.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::families::gen_reflected_simplex;
use crate::hullenum::{Facet, FacetList, Provenance};
use crate::lifting::{lift, DisjunctionInstance};
use crate::polyops::{canonicalize, LinearInequality};
use crate::ratgeom::{rat, RatVector, Rational};

/// `sum_i w_i q_i`, not canonicalized.
pub fn aggregate(qs: &[LinearInequality], w: &[Rational]) -> Result<LinearInequality> {
    if qs.is_empty() {
        return Err(Error::InvalidWeights("no inequalities to aggregate".into()));
    }
    if qs.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: qs.len(),
            found: w.len(),
        });
    }
    if let Some(bad) = w.iter().find(|v| v.is_negative()) {
        return Err(Error::InvalidWeights(format!("negative weight {bad}")));
    }
    if w.iter().all(Zero::is_zero) {
        return Err(Error::InvalidWeights("all weights are zero".into()));
    }
    let (d, n) = (qs[0].d(), qs[0].n());
    let mut acc = LinearInequality::new(RatVector::zeros(d), RatVector::zeros(n), Rational::zero());
    for (q, wi) in qs.iter().zip(w) {
        if q.d() != d || q.n() != n {
            return Err(Error::DimensionMismatch {
                expected: d + n,
                found: q.d() + q.n(),
            });
        }
        if wi.is_zero() {
            continue;
        }
        for (a, b) in acc.alpha.iter_mut().zip(q.alpha.iter()) {
            *a += wi * b;
        }
        for (a, b) in acc.mu.iter_mut().zip(q.mu.iter()) {
            *a += wi * b;
        }
        acc.rho += wi * &q.rho;
    }
    Ok(acc)
}

fn frac(v: &Rational) -> Rational {
    v - v.floor()
}

/// The rounding formula itself, with no precondition checks:
/// `sum_j (floor(g_j) + (f_j - f_0)^+ / (1 - f_0)) z_j
///  + 1/(1 - f_0) sum_{a_i < 0} a_i x_i <= floor(rho)`.
pub fn mir_formula(base: &LinearInequality) -> LinearInequality {
    let f0 = frac(&base.rho);
    let denom = Rational::one() - &f0;
    let alpha = base
        .alpha
        .iter()
        .map(|a| {
            if a.is_negative() {
                a / &denom
            } else {
                Rational::zero()
            }
        })
        .collect();
    let mu = base
        .mu
        .iter()
        .map(|g| {
            let excess = frac(g) - &f0;
            if excess.is_positive() {
                g.floor() + excess / &denom
            } else {
                g.floor()
            }
        })
        .collect();
    LinearInequality::new(alpha, mu, base.rho.floor())
}

fn check_valid(q: &LinearInequality, inst: &DisjunctionInstance) -> Result<()> {
    for i in 0..=inst.n() {
        if inst.lifted_points_of(i).iter().any(|p| !q.satisfied_by(p)) {
            return Err(Error::InvalidForHull {
                inequality: q.to_string(),
                polytope: i,
            });
        }
    }
    Ok(())
}

fn polytope_with_negative_coordinate(inst: &DisjunctionInstance) -> Option<usize> {
    (0..=inst.n()).find(|&i| {
        inst.extreme_points(i)
            .iter()
            .any(|x| x.iter().any(Signed::is_negative))
    })
}

/// MIR cut from a base inequality valid for the hull, canonicalized. The
/// formula is only sound when `x >= 0` holds on every polytope.
pub fn mir(base: &LinearInequality, inst: &DisjunctionInstance) -> Result<LinearInequality> {
    if base.d() != inst.d() || base.n() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.d() + inst.n(),
            found: base.d() + base.n(),
        });
    }
    if let Some(polytope) = polytope_with_negative_coordinate(inst) {
        return Err(Error::NonnegativityFails { polytope });
    }
    check_valid(base, inst)?;
    let cut = canonicalize(&mir_formula(base))?;
    check_valid(&cut, inst).map_err(|e| Error::Internal(format!("MIR output invalid: {e}")))?;
    Ok(cut)
}

/// Substitutes `x_i <- b - x_i`, `z_1 <- 1 - z_1` and canonicalizes.
pub fn involute(q: &LinearInequality, b: &Rational) -> Result<LinearInequality> {
    if q.n() != 1 {
        return Err(Error::ParameterDomain(format!(
            "involution needs exactly one z variable, got {}",
            q.n()
        )));
    }
    let sum_alpha: Rational = q.alpha.iter().sum();
    let sum_mu: Rational = q.mu.iter().sum();
    let rho = &q.rho - b * sum_alpha - sum_mu;
    canonicalize(&LinearInequality::new(q.alpha.neg(), q.mu.neg(), rho))
}

fn x_only(alpha: RatVector, rho: Rational) -> LinearInequality {
    LinearInequality::new(alpha, RatVector::default(), rho)
}

/// Cut for one `T0` by the case analysis on `a` against `t b`, `t = |T0|`.
fn reflected_cut(
    inst: &DisjunctionInstance,
    t0: &[usize],
    a: &Rational,
    b: &Rational,
    checked_mir: bool,
) -> Result<LinearInequality> {
    let d = inst.d();
    let m = d + 1 - t0.len();
    let t = rat(t0.len() as i64);
    let tb = &t * b;
    let lower = |i: usize| lift(&x_only(RatVector::unit(d, i).neg(), Rational::zero()), 1, inst);

    let (parts, weights): (Vec<LinearInequality>, Vec<Rational>) = if *a < tb {
        // x_i <= b lifted from P0 for i outside T0, and the lifted sum row.
        let div = &tb + rat(m as i64 - 2) * a;
        let w = div.recip();
        let mut parts = Vec::new();
        for i in (0..d).filter(|i| !t0.contains(i)) {
            parts.push(lift(&x_only(RatVector::unit(d, i), b.clone()), 0, inst)?.lifted);
        }
        let sum_row = x_only(
            vec![-Rational::one(); d].into(),
            a - rat(d as i64) * b,
        );
        parts.push(lift(&sum_row, 0, inst)?.lifted);
        let n = parts.len();
        (parts, vec![w; n])
    } else if *a > tb {
        let r = (&t * (a - b) + (a - &tb)) / rat(2);
        let parts = t0.iter().map(|&i| lower(i).map(|l| l.lifted)).collect::<Result<Vec<_>>>()?;
        let n = parts.len();
        (parts, vec![r.recip(); n])
    } else {
        // z-augmented sum: the z coefficient cancels, r only needs to
        // exceed (d - m) a.
        let extra = rat((d - m) as i64) * a;
        let r = &extra + Rational::one();
        let mut parts = t0.iter().map(|&i| lower(i).map(|l| l.lifted)).collect::<Result<Vec<_>>>()?;
        let mut weights = vec![r.recip(); parts.len()];
        parts.push(LinearInequality::z_nonnegative(d, 1, 0));
        weights.push(extra / &r);
        (parts, weights)
    };
    let base = aggregate(&parts, &weights)?;
    if checked_mir {
        mir(&base, inst)
    } else {
        // The rounding argument needs x >= 0; without it the output is
        // still certified on every lifted extreme point.
        check_valid(&base, inst)?;
        let cut = canonicalize(&mir_formula(&base))?;
        check_valid(&cut, inst)?;
        Ok(cut)
    }
}

/// The non-lifting facets of the reflected-simplex hull rebuilt by MIR and
/// the reflection, for every `2 <= m <= d - 1`.
pub fn derive_reflected_simplex_cuts(d: usize, a: &Rational, b: &Rational) -> Result<FacetList> {
    let inst = gen_reflected_simplex(d, a, b)?;
    let checked = polytope_with_negative_coordinate(&inst).is_none();
    let mut facets = Vec::new();
    for m in 2..d {
        for t0 in (0..d).combinations(d + 1 - m) {
            let cut = reflected_cut(&inst, &t0, a, b, checked)?;
            let mirror = involute(&cut, b)?;
            facets.push(Facet::new(cut, Provenance::Mir));
            facets.push(Facet::new(mirror, Provenance::Mir));
        }
    }
    Ok(FacetList::from_facets(d, 1, facets))
}
