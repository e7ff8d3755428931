use disjhull::hullenum::{compare, enumerate_facets, enumerate_signatures, oracle_hull, Provenance};
use disjhull::lifting::{full_lifting_system, lift, lift_in_order, DisjunctionInstance};
use disjhull::lp::{maximize, maximize_by_partitions, LpOutcome};
use disjhull::polyops::{describes_facet, extreme_points, remove_redundant_rows, HPolytope, LinearInequality};
use disjhull::random::{random_instance, random_order, random_polytope};
use disjhull::ratgeom::{dot, RatVector, Rational};
use disjhull::{double_description_hull, DEFAULT_ORACLE_CAP};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, d: usize, n: usize) -> DisjunctionInstance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), d, n, 6)
}

fn compositions(total: usize, parts: usize, cap: usize) -> usize {
    if parts == 0 {
        return usize::from(total == 0);
    }
    (1..=cap.min(total))
        .map(|v| compositions(total - v, parts - 1, cap))
        .sum()
}

/// Relabels `P_0 <-> P_k`: a point on `P_0` moves to `z = e_k` and vice versa.
fn swap_first(inst: &DisjunctionInstance, k: usize) -> DisjunctionInstance {
    let mut ps = inst.polytopes().to_vec();
    ps.swap(0, k);
    DisjunctionInstance::new(ps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lp_value_matches_vertices(seed in any::<u64>(), d in 1usize..=3, c in proptest::collection::vec(-4i64..=4, 3)) {
        let p = random_polytope(&mut ChaCha8Rng::seed_from_u64(seed), d, 6);
        let c = RatVector::from_ints(&c[..d]);
        let best = extreme_points(&p).unwrap().iter().map(|x| dot(&c, x)).max().unwrap();
        let out = maximize(&c, &p).unwrap();
        prop_assert_eq!(out.value(), Some(&best));
        prop_assert_eq!(maximize_by_partitions(&c, &p).unwrap(), Some(best));
        let again = maximize(&c, &p).unwrap();
        prop_assert_eq!(&out, &again);
        if let LpOutcome::Optimal(o) = out {
            for (j, y) in o.dual.iter().enumerate() {
                if *y > Rational::zero() {
                    prop_assert_eq!(dot(p.a().row(j), &o.primal), p.b()[j].clone());
                }
            }
        }
    }

    #[test]
    fn liftings_are_valid_facets(seed in any::<u64>(), d in 1usize..=2, n in 1usize..=3) {
        let inst = instance(seed, d, n);
        for f in full_lifting_system(&inst).unwrap().iter() {
            prop_assert!(inst.lifted_points().iter().all(|p| f.inequality.satisfied_by(p)));
            prop_assert!(describes_facet(inst.lifted_points(), &f.inequality, d + n));
        }
    }

    #[test]
    fn lifting_order_is_irrelevant(seed in any::<u64>(), n in 1usize..=3) {
        let inst = instance(seed, 2, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a);
        for k in 0..=n {
            let p = inst.polytope(k);
            for row in remove_redundant_rows(p).unwrap() {
                let q = p.row_inequality(row);
                let a = lift(&q, k, &inst).unwrap();
                let b = lift_in_order(&q, k, &inst, &random_order(&mut rng, n + 1)).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn lifting_from_pk_is_lifting_from_p0_after_swap(seed in any::<u64>(), n in 1usize..=3) {
        let inst = instance(seed, 2, n);
        for k in 1..=n {
            let swapped = swap_first(&inst, k);
            let p = inst.polytope(k);
            for row in remove_redundant_rows(p).unwrap() {
                let q = p.row_inequality(row);
                let direct = lift(&q, k, &inst).unwrap().lifted;
                let via = lift(&q, 0, &swapped).unwrap().lifted;
                // substitute z'_k = 1 - sum_j z_j and z'_i = z_i otherwise
                let mk = via.mu[k - 1].clone();
                let mu: RatVector = (0..n)
                    .map(|j| if j == k - 1 { -mk.clone() } else { &via.mu[j] - &mk })
                    .collect();
                let substituted = LinearInequality::new(via.alpha.clone(), mu, &via.rho - &mk);
                prop_assert_eq!(direct, substituted);
            }
        }
    }

    #[test]
    fn small_d_hull_is_lifting_hull(seed in any::<u64>(), d in 1usize..=2, n in 1usize..=2) {
        let inst = instance(seed, d, n);
        let sig = enumerate_facets(&inst).unwrap();
        let lifting = full_lifting_system(&inst).unwrap();
        let oracle = oracle_hull(&inst, DEFAULT_ORACLE_CAP).unwrap();
        prop_assert!(compare(&sig, &lifting).unwrap().equal);
        prop_assert!(compare(&sig, &oracle).unwrap().equal);
        for f in sig.iter().filter(|f| f.provenance == Provenance::Lifting) {
            let extreme = f.signatures.iter().any(|s| {
                s.0.iter().filter(|&&v| v == d).count() >= 1 && s.0.iter().filter(|&&v| v == 1).count() >= n
            });
            prop_assert!(extreme, "{} lacks a (d,1,..,1)-type signature", f.inequality);
        }
    }

    #[test]
    fn oracles_agree(seed in any::<u64>(), d in 1usize..=3, n in 1usize..=2) {
        let inst = instance(seed, d, n);
        let dd = double_description_hull(&inst).unwrap();
        let subsets = oracle_hull(&inst, DEFAULT_ORACLE_CAP).unwrap();
        prop_assert!(compare(&dd, &subsets).unwrap().equal);
        prop_assert!(compare(&dd, &enumerate_facets(&inst).unwrap()).unwrap().equal);
    }
}

#[test]
fn signature_counts_match_brute_force() {
    for d in 1..=5 {
        for n in 1..=5 {
            let sigs = enumerate_signatures(d, n);
            assert_eq!(sigs.len(), compositions(n + d, n + 1, d), "d={d} n={n}");
            assert!(sigs.windows(2).all(|w| w[0] > w[1]));
            assert!(sigs.iter().all(|s| s.0.iter().sum::<usize>() == n + d));
        }
    }
}

#[test]
fn nonvertical_facets_follow_full_dimensionality() {
    // P0 a point, P1 full dimensional: z >= 0 need not be a facet, sum z <= 1 is
    let point = HPolytope::from_ints(1, &[vec![1], vec![-1]], &[1, -1]).unwrap();
    let seg = HPolytope::from_ints(1, &[vec![1], vec![-1]], &[3, -2]).unwrap();
    let inst = DisjunctionInstance::new(vec![point, seg]).unwrap();
    let hull = enumerate_facets(&inst).unwrap();
    let sum = LinearInequality::new(RatVector::zeros(1), vec![Rational::one()].into(), Rational::one());
    assert!(hull.contains(&sum));
    assert_eq!(
        hull.inequalities(),
        oracle_hull(&inst, DEFAULT_ORACLE_CAP).unwrap().inequalities()
    );
}
