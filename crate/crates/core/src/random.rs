//! Seeded generators for randomized instance suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::families::{gen_rhs_perturbation, BoxBounds};
use crate::lifting::DisjunctionInstance;
use crate::polyops::{is_bounded, is_full_dimensional, remove_redundant, HPolytope};
use crate::ratgeom::{ratio, RatVector, Rational};

/// Uniform over `p/q` with `lo*q <= p <= hi*q` and `1 <= q <= max_den`.
pub fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    ratio(rng.gen_range(lo * q..=hi * q), q)
}

/// Full-dimensional bounded polytope in `R^d` with at most `max_rows`
/// irredundant rows. Intervals for `d = 1`, random polygons-style systems
/// otherwise.
pub fn random_polytope<R: Rng>(rng: &mut R, d: usize, max_rows: usize) -> HPolytope {
    assert!(max_rows > d, "need more than d rows for a bounded polytope");
    loop {
        let center: Vec<Rational> = (0..d).map(|_| random_rational(rng, -4, 4, 3)).collect();
        let k = rng.gen_range(d + 1..=max_rows);
        let mut rows: Vec<RatVector> = Vec::with_capacity(k);
        let mut rhs: Vec<Rational> = Vec::with_capacity(k);
        for _ in 0..k {
            let a: Vec<i64> = loop {
                let a: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
                if a.iter().any(|&v| v != 0) {
                    break a;
                }
            };
            let a = RatVector::from_ints(&a);
            let slack = random_rational(rng, 0, 3, 4) + ratio(1, 4);
            rhs.push(a.dot(&center) + slack);
            rows.push(a);
        }
        let Ok(p) = HPolytope::from_rows(d, &rows, rhs.into()) else {
            continue;
        };
        if !is_bounded(&p) || !is_full_dimensional(&p) {
            continue;
        }
        return remove_redundant(&p).expect("nonempty by construction");
    }
}

pub fn random_instance<R: Rng>(
    rng: &mut R,
    d: usize,
    n: usize,
    max_rows: usize,
) -> DisjunctionInstance {
    let polytopes = (0..=n).map(|_| random_polytope(rng, d, max_rows)).collect();
    DisjunctionInstance::new(polytopes).expect("generated polytopes are valid")
}

pub fn random_boxes<R: Rng>(rng: &mut R, d: usize, n: usize) -> Vec<BoxBounds> {
    (0..=n)
        .map(|_| {
            let lo: Vec<Rational> = (0..d).map(|_| random_rational(rng, -5, 5, 3)).collect();
            let hi: Vec<Rational> = lo
                .iter()
                .map(|l| l + random_rational(rng, 0, 4, 3) + ratio(1, 3))
                .collect();
            (lo.into(), hi.into())
        })
        .collect()
}

/// A simple full-dimensional polytope in `R^3` from a small catalogue
/// (cube, simplex, prism, truncated cube), scaled and shifted.
pub fn random_simple_polytope<R: Rng>(rng: &mut R) -> HPolytope {
    let s = rng.gen_range(2..=4i64);
    let shift: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
    let (rows, b): (Vec<Vec<i64>>, Vec<i64>) = match rng.gen_range(0..4) {
        0 => (
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![-1, 0, 0],
                vec![0, -1, 0],
                vec![0, 0, -1],
            ],
            vec![s, s, s, 0, 0, 0],
        ),
        1 => (
            vec![vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1], vec![1, 1, 1]],
            vec![0, 0, 0, s],
        ),
        2 => (
            vec![
                vec![-1, 0, 0],
                vec![0, -1, 0],
                vec![1, 1, 0],
                vec![0, 0, -1],
                vec![0, 0, 1],
            ],
            vec![0, 0, s, 0, s],
        ),
        _ => (
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![-1, 0, 0],
                vec![0, -1, 0],
                vec![0, 0, -1],
                vec![1, 1, 1],
            ],
            vec![s, s, s, 0, 0, 0, 3 * s - 1],
        ),
    };
    // b_j + a_j . shift moves the polytope by shift
    let b: Vec<i64> = rows
        .iter()
        .zip(&b)
        .map(|(a, bj)| bj + a.iter().zip(&shift).map(|(x, y)| x * y).sum::<i64>())
        .collect();
    HPolytope::from_ints(3, &rows, &b).expect("well-formed catalogue entry")
}

/// Right-hand-side perturbation of a random simple polytope with `n` extra
/// polytopes, retried until condition Phi holds.
pub fn random_phi_perturbation<R: Rng>(rng: &mut R, n: usize) -> DisjunctionInstance {
    loop {
        let base = random_simple_polytope(rng);
        let m = base.num_rows();
        let mut scale = 2i64;
        for _ in 0..6 {
            let deltas: Vec<RatVector> = (0..n)
                .map(|_| {
                    (0..m)
                        .map(|_| random_rational(rng, -1, 1, 4) / Rational::from_integer(scale.into()))
                        .collect()
                })
                .collect();
            if let Ok((inst, report)) = gen_rhs_perturbation(&base, &deltas) {
                if report.holds {
                    return inst;
                }
            }
            scale *= 2;
        }
    }
}

/// Shuffled copy of `0..len`, for order-independence checks.
pub fn random_order<R: Rng>(rng: &mut R, len: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..len).collect();
    v.shuffle(rng);
    v
}
