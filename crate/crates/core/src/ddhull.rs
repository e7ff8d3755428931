//! Second independent hull oracle: the double description method on the
//! homogenized polar cone `{(a, beta) : a.v <= beta for every lifted point v}`.
//! Its extreme rays are the facets of the hull. Used where the exhaustive
//! subset oracle is over its cap.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hullenum::{Facet, FacetList, Provenance};
use crate::lifting::DisjunctionInstance;
use crate::polyops::{canonicalize, LinearInequality};
use crate::ratgeom::{solve_linear_system, RatMatrix, RatVector, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains_all(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    y: Vec<BigInt>,
    zeros: Bits,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive(mut y: Vec<BigInt>) -> Vec<BigInt> {
    let g = y.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in y.iter_mut() {
            *v = &*v / &g;
        }
    }
    y
}

/// Facets of the convex hull of the lifted extreme points.
pub fn double_description_hull(inst: &DisjunctionInstance) -> Result<FacetList> {
    let (d, n) = (inst.d(), inst.n());
    let dim = d + n;
    let pts = inst.lifted_points();

    let mut lcm = BigInt::one();
    for p in pts {
        for c in p.x.iter().chain(p.z.iter()) {
            lcm = lcm.lcm(c.denom());
        }
    }
    // Constraint rows (L v, -1): a.(L v) - beta <= 0.
    let rows: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| {
            p.x.iter()
                .chain(p.z.iter())
                .map(|c| c.numer() * (&lcm / c.denom()))
                .chain(std::iter::once(-BigInt::one()))
                .collect()
        })
        .collect();
    let as_rat = |r: &Vec<BigInt>| -> Vec<Rational> {
        r.iter().cloned().map(Rational::from_integer).collect()
    };

    // Greedy choice of dim + 1 linearly independent rows for the start cone.
    let mut basis: Vec<usize> = Vec::with_capacity(dim + 1);
    for (i, r) in rows.iter().enumerate() {
        let mut trial: Vec<Vec<Rational>> = basis.iter().map(|&j| as_rat(&rows[j])).collect();
        trial.push(as_rat(r));
        if RatMatrix::from_rows(dim + 1, &trial)?.rank() == trial.len() {
            basis.push(i);
            if basis.len() == dim + 1 {
                break;
            }
        }
    }
    if basis.len() < dim + 1 {
        return Err(Error::Internal("lifted points are not full dimensional".into()));
    }
    let m = RatMatrix::from_rows(dim + 1, &basis.iter().map(|&j| as_rat(&rows[j])).collect::<Vec<_>>())?;

    let tight_set = |y: &[BigInt], upto: &[bool]| -> Bits {
        let mut z = Bits::new(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if upto[i] && dot(r, y).is_zero() {
                z.set(i);
            }
        }
        z
    };

    let mut done = vec![false; rows.len()];
    for &j in &basis {
        done[j] = true;
    }
    let mut rays: Vec<Ray> = Vec::with_capacity(dim + 1);
    for j in 0..=dim {
        let mut e = vec![Rational::zero(); dim + 1];
        e[j] = -Rational::one();
        let y = solve_linear_system(&m, &e)?
            .ok_or_else(|| Error::Internal("start basis is singular".into()))?;
        let den = y.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let y = primitive(y.iter().map(|v| v.numer() * (&den / v.denom())).collect());
        let zeros = tight_set(&y, &done);
        rays.push(Ray { y, zeros });
    }

    for i in 0..rows.len() {
        if done[i] {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot(&rows[i], &r.y)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        let mut fresh = Vec::new();
        for &p in &plus {
            for &q in &minus {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 1 < dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|k| k == p || k == q || !rays[k].zeros.contains_all(&common));
                if !adjacent {
                    continue;
                }
                let y: Vec<BigInt> = rays[q]
                    .y
                    .iter()
                    .zip(&rays[p].y)
                    .map(|(a, b)| &values[p] * a - &values[q] * b)
                    .collect();
                let mut zeros = common;
                zeros.set(i);
                fresh.push(Ray { y: primitive(y), zeros });
            }
        }
        let mut keep: Vec<Ray> = rays
            .into_iter()
            .zip(&values)
            .filter(|(_, v)| !v.is_positive())
            .map(|(mut r, v)| {
                if v.is_zero() {
                    r.zeros.set(i);
                }
                r
            })
            .collect();
        keep.extend(fresh);
        rays = keep;
        done[i] = true;
    }

    let mut facets = Vec::with_capacity(rays.len());
    for r in rays {
        let (a, beta) = r.y.split_at(dim);
        if a.iter().all(Zero::is_zero) {
            return Err(Error::Internal("polar cone has the trivial ray".into()));
        }
        let coeffs: Vec<Rational> = a.iter().cloned().map(Rational::from_integer).collect();
        let mut alpha = coeffs;
        let mu = alpha.split_off(d);
        let q = LinearInequality::new(
            RatVector::new(alpha),
            RatVector::new(mu),
            Rational::new(beta[0].clone(), lcm.clone()),
        );
        let q = canonicalize(&q)?;
        let prov = if q.is_vertical() {
            Provenance::Other
        } else {
            Provenance::NonVertical
        };
        facets.push(Facet::new(q, prov));
    }
    Ok(FacetList::from_facets(d, n, facets))
}
