//! Facet enumeration for the disjunctive hull: the signature method, a
//! brute-force oracle that shares none of its geometry code, and set
//! comparison of facet lists.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lifting::{full_lifting_system, non_vertical, DisjunctionInstance};
use crate::polyops::{canonicalize, describes_facet, remove_redundant_rows, LinearInequality};
use crate::ratgeom::{affine_rank, dot, hyperplane_through, LiftedPoint, RatVector, Rational};

/// Default bound on `C(V, d+n)` for [`oracle_hull`].
pub const DEFAULT_ORACLE_CAP: u128 = 10_000_000;

/// How many of a facet's affinely independent tight points come from each
/// `P_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature(pub Vec<usize>);

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    NonVertical,
    Lifting,
    Mir,
    Other,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::NonVertical => "nonvertical",
            Provenance::Lifting => "lifting",
            Provenance::Mir => "mir",
            Provenance::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nonvertical" => Some(Provenance::NonVertical),
            "lifting" => Some(Provenance::Lifting),
            "mir" => Some(Provenance::Mir),
            "other" => Some(Provenance::Other),
            _ => None,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub inequality: LinearInequality,
    pub provenance: Provenance,
    /// `(polytope, row)` pairs whose lifting gives this inequality.
    pub lifted_from: Vec<(usize, usize)>,
    pub signatures: Vec<Signature>,
}

impl Facet {
    pub fn new(inequality: LinearInequality, provenance: Provenance) -> Self {
        Facet {
            inequality,
            provenance,
            lifted_from: Vec::new(),
            signatures: Vec::new(),
        }
    }
}

/// Canonical, sorted, duplicate-free list of inequalities for the hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetList {
    pub d: usize,
    pub n: usize,
    facets: Vec<Facet>,
}

impl FacetList {
    /// Sorts and merges entries with equal inequalities. The merged entry
    /// keeps the least provenance tag and the union of the source records.
    pub fn from_facets(d: usize, n: usize, facets: impl IntoIterator<Item = Facet>) -> Self {
        let mut map: BTreeMap<LinearInequality, Facet> = BTreeMap::new();
        for f in facets {
            match map.get_mut(&f.inequality) {
                Some(e) => {
                    e.provenance = e.provenance.min(f.provenance);
                    e.lifted_from.extend(f.lifted_from);
                    e.signatures.extend(f.signatures);
                }
                None => {
                    map.insert(f.inequality.clone(), f);
                }
            }
        }
        let facets = map
            .into_values()
            .map(|mut f| {
                f.lifted_from.sort();
                f.lifted_from.dedup();
                f.signatures.sort_by(|a, b| b.cmp(a));
                f.signatures.dedup();
                f
            })
            .collect();
        FacetList { d, n, facets }
    }

    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Facet> {
        self.facets.iter()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, q: &LinearInequality) -> bool {
        self.get(q).is_some()
    }

    pub fn get(&self, q: &LinearInequality) -> Option<&Facet> {
        self.facets
            .binary_search_by(|f| f.inequality.cmp(q))
            .ok()
            .map(|i| &self.facets[i])
    }

    pub fn inequalities(&self) -> BTreeSet<LinearInequality> {
        self.facets.iter().map(|f| f.inequality.clone()).collect()
    }

    pub fn count(&self, p: Provenance) -> usize {
        self.facets.iter().filter(|f| f.provenance == p).count()
    }

    pub fn counts(&self) -> BTreeMap<Provenance, usize> {
        let mut m = BTreeMap::new();
        for f in &self.facets {
            *m.entry(f.provenance).or_insert(0) += 1;
        }
        m
    }
}

impl<'a> IntoIterator for &'a FacetList {
    type Item = &'a Facet;
    type IntoIter = std::slice::Iter<'a, Facet>;
    fn into_iter(self) -> Self::IntoIter {
        self.facets.iter()
    }
}

/// Compositions of `n + d` into `n + 1` parts in `1..=d`, lexicographically
/// descending.
pub fn enumerate_signatures(d: usize, n: usize) -> Vec<Signature> {
    fn rec(parts: usize, total: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Signature>) {
        if parts == 0 {
            if total == 0 {
                out.push(Signature(cur.clone()));
            }
            return;
        }
        let rest = parts - 1;
        if total < parts || total > parts * cap {
            return;
        }
        let hi = cap.min(total - rest);
        let lo = total.saturating_sub(rest * cap).max(1);
        for v in (lo..=hi).rev() {
            cur.push(v);
            rec(rest, total - v, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d >= 1 && n >= 1 {
        rec(n + 1, n + d, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Orients the hyperplane through `sel` so that every point satisfies `<=`.
/// `None` when points lie strictly on both sides.
fn oriented(sel: &[&LiftedPoint], all: &[LiftedPoint], d: usize) -> Option<LinearInequality> {
    let h = hyperplane_through(sel).ok()??;
    let (mut below, mut above) = (false, false);
    for p in all {
        let v: Rational = h
            .normal
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c * crate::ratgeom::Coordinates::coord(p, i))
            .sum();
        if v < h.rhs {
            below = true;
        } else if v > h.rhs {
            above = true;
        }
        if below && above {
            return None;
        }
    }
    let mut normal = h.normal.into_inner();
    let mu = normal.split_off(d);
    let q = LinearInequality::new(normal.into(), mu.into(), h.rhs);
    Some(if above { q.scaled(&-Rational::one()) } else { q })
}

/// Every facet of the hull: non-vertical candidates that pass the facet
/// test, plus hyperplanes through point selections of every signature.
pub fn enumerate_facets(inst: &DisjunctionInstance) -> Result<FacetList> {
    let (d, n) = (inst.d(), inst.n());
    let all = inst.lifted_points();
    let lifting = full_lifting_system(inst)?;

    let mut facets: Vec<Facet> = non_vertical(d, n)
        .into_iter()
        .filter(|f| describes_facet(all, &f.inequality, d + n))
        .collect();

    let signatures = enumerate_signatures(d, n);
    let mut pools: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
    for sig in &signatures {
        for (i, &s) in sig.0.iter().enumerate() {
            if !pools.contains_key(&(i, s)) {
                pools.insert((i, s), pool_subsets(inst, i, s)?);
            }
        }
    }
    let scaled = ScaledVertices::new(inst);

    let found: Vec<(LinearInequality, Signature)> = signatures
        .into_par_iter()
        .flat_map_iter(|sig| {
            let pools: Vec<&Vec<Vec<usize>>> = sig
                .0
                .iter()
                .enumerate()
                .map(|(i, &s)| &pools[&(i, s)])
                .collect();
            let hits = match &scaled {
                Some(sv) => sv.selections(&pools),
                None => rational_selections(inst, &pools),
            };
            debug_assert!(hits.iter().all(|q| describes_facet(all, q, d + n)));
            hits.into_iter().map(move |q| (q, sig.clone()))
        })
        .collect();

    for (q, sig) in found {
        let mut f = match lifting.get(&q) {
            Some(l) if l.provenance == Provenance::Lifting => {
                let mut f = Facet::new(q, Provenance::Lifting);
                f.lifted_from = l.lifted_from.clone();
                f
            }
            _ if !q.is_vertical() => Facet::new(q, Provenance::NonVertical),
            _ => Facet::new(q, Provenance::Other),
        };
        f.signatures.push(sig);
        facets.push(f);
    }
    Ok(FacetList::from_facets(d, n, facets))
}

/// Vertex subsets of `P_i` of size `s` that can appear in a selection:
/// affinely independent, and on a common facet when `P_i` is full
/// dimensional. A selection always yields a hyperplane with nonzero
/// x-part, and such a hyperplane touches a full-dimensional `P_i` in a
/// proper face.
fn pool_subsets(inst: &DisjunctionInstance, i: usize, s: usize) -> Result<Vec<Vec<usize>>> {
    let verts: Vec<&RatVector> = inst.extreme_points(i).iter().collect();
    let masks: Option<Vec<Vec<bool>>> = if inst.is_full_dimensional(i) {
        let p = inst.polytope(i);
        let rows = remove_redundant_rows(p)?;
        Some(
            verts
                .iter()
                .map(|v| rows.iter().map(|&r| dot(p.a().row(r), v) == p.b()[r]).collect())
                .collect(),
        )
    } else {
        None
    };
    let mut out = Vec::new();
    for c in (0..verts.len()).combinations(s) {
        if let Some(m) = &masks {
            let shared = (0..m[c[0]].len()).any(|r| c.iter().all(|&k| m[k][r]));
            if !shared {
                continue;
            }
        }
        let pts: Vec<&RatVector> = c.iter().map(|&k| verts[k]).collect();
        if affine_rank(&pts)? == s {
            out.push(c);
        }
    }
    Ok(out)
}

/// Selections through exact rational elimination, for coordinates too
/// large for the integer kernel.
fn rational_selections(inst: &DisjunctionInstance, pools: &[&Vec<Vec<usize>>]) -> BTreeSet<LinearInequality> {
    let (d, all) = (inst.d(), inst.lifted_points());
    let mut hits = BTreeSet::new();
    for choice in pools.iter().map(|p| p.iter()).multi_cartesian_product() {
        let sel: Vec<&LiftedPoint> = choice
            .iter()
            .enumerate()
            .flat_map(|(i, idx)| idx.iter().map(move |&k| &inst.lifted_points_of(i)[k]))
            .collect();
        if let Some(q) = oriented(&sel, all, d) {
            hits.insert(canonicalize(&q).expect("nonzero normal"));
        }
    }
    hits
}

const KERNEL_MAX_DIM: usize = 8;

/// Vertices scaled to integers by a common denominator, for the fast
/// selection kernel.
struct ScaledVertices {
    d: usize,
    lcm: BigInt,
    verts: Vec<Vec<Vec<i128>>>,
}

impl ScaledVertices {
    fn new(inst: &DisjunctionInstance) -> Option<Self> {
        let d = inst.d();
        if d > KERNEL_MAX_DIM {
            return None;
        }
        let mut lcm = BigInt::one();
        for i in 0..=inst.n() {
            for v in inst.extreme_points(i).iter() {
                for c in v.iter() {
                    lcm = lcm.lcm(c.denom());
                }
            }
        }
        let verts: Vec<Vec<Vec<BigInt>>> = (0..=inst.n())
            .map(|i| {
                inst.extreme_points(i)
                    .iter()
                    .map(|v| v.iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
                    .collect()
            })
            .collect();
        // Minors of the difference matrix are below the Hadamard bound h;
        // elimination forms products of two minors and the validity test
        // forms sums of d products alpha_j * x_j. Both must fit in i128.
        let bmax = verts.iter().flatten().flatten().map(|v| v.abs()).max().unwrap_or_default();
        let root_d = BigInt::from((1..=d).find(|r| r * r >= d).unwrap_or(d));
        let h = num_traits::pow(BigInt::from(2) * &bmax * root_d, d - 1);
        let limit = BigInt::one() << 120;
        if &h * &h * 4 >= limit || &h * &bmax * BigInt::from(4 * d) >= limit {
            return None;
        }
        let verts = verts
            .into_iter()
            .map(|vs| vs.into_iter().map(|v| v.iter().map(|c| c.to_i128().expect("bounded")).collect()).collect())
            .collect();
        Some(ScaledVertices { d, lcm, verts })
    }

    /// Normal of the x-part: orthogonal to the `d - 1` within-polytope
    /// difference vectors, by cofactor expansion. `None` when they are
    /// dependent.
    fn normal(&self, diffs: &[[i128; KERNEL_MAX_DIM]]) -> Option<[i128; KERNEL_MAX_DIM]> {
        let d = self.d;
        let mut alpha = [0i128; KERNEL_MAX_DIM];
        match d {
            1 => {
                alpha[0] = 1;
                return Some(alpha);
            }
            2 => {
                alpha[0] = diffs[0][1];
                alpha[1] = -diffs[0][0];
                return (alpha[0] != 0 || alpha[1] != 0).then_some(alpha);
            }
            3 => {
                let (u, v) = (&diffs[0], &diffs[1]);
                alpha[0] = u[1] * v[2] - u[2] * v[1];
                alpha[1] = u[2] * v[0] - u[0] * v[2];
                alpha[2] = u[0] * v[1] - u[1] * v[0];
                return alpha[..3].iter().any(|&a| a != 0).then_some(alpha);
            }
            _ => {}
        }
        let mut nonzero = false;
        for (j, a) in alpha.iter_mut().enumerate().take(d) {
            let mut m = [[0i128; KERNEL_MAX_DIM]; KERNEL_MAX_DIM];
            for (r, row) in diffs.iter().enumerate() {
                let mut c = 0;
                for (col, &v) in row.iter().enumerate().take(d) {
                    if col != j {
                        m[r][c] = v;
                        c += 1;
                    }
                }
            }
            let det = small_det(&mut m, d - 1);
            *a = if j % 2 == 0 { det } else { -det };
            nonzero |= det != 0;
        }
        nonzero.then_some(alpha)
    }

    /// Same hyperplanes as trying every selection of the signature. A
    /// polytope contributing a single point adds no difference vector, so
    /// the normal is fixed by the others and the point can be taken at the
    /// extreme of `alpha` directly instead of looping over the vertices.
    fn selections(&self, pools: &[&Vec<Vec<usize>>]) -> BTreeSet<LinearInequality> {
        let d = self.d;
        let mut hits = BTreeSet::new();
        let mut seen: HashSet<Vec<i128>> = HashSet::new();
        if pools.iter().any(|p| p.is_empty()) {
            return hits;
        }
        let multi: Vec<usize> = (0..pools.len()).filter(|&i| pools[i][0].len() > 1).collect();
        let mut pos = vec![0usize; multi.len()];
        let mut diffs = vec![[0i128; KERNEL_MAX_DIM]; d.saturating_sub(1)];
        let mut ms = vec![0i128; pools.len()];
        'outer: loop {
            let mut r = 0;
            for (slot, &i) in multi.iter().enumerate() {
                let idx = &pools[i][pos[slot]];
                let base = &self.verts[i][idx[0]];
                for &k in &idx[1..] {
                    for (c, v) in self.verts[i][k].iter().enumerate() {
                        diffs[r][c] = v - base[c];
                    }
                    r += 1;
                }
            }
            if let Some(alpha) = self.normal(&diffs) {
                let dot = |v: &[i128]| -> i128 { v.iter().zip(&alpha).map(|(a, b)| a * b).sum() };
                let (mut up, mut down) = (true, true);
                for (slot, &i) in multi.iter().enumerate() {
                    let m = dot(&self.verts[i][pools[i][pos[slot]][0]]);
                    for v in &self.verts[i] {
                        let t = dot(v);
                        up &= t <= m;
                        down &= t >= m;
                        if !up && !down {
                            break;
                        }
                    }
                    if !up && !down {
                        break;
                    }
                    ms[i] = m;
                }
                for (flag, sign) in [(up, 1i128), (down, -1i128)] {
                    if !flag {
                        continue;
                    }
                    for i in (0..pools.len()).filter(|i| !multi.contains(i)) {
                        let vals = self.verts[i].iter().map(|v| dot(v));
                        ms[i] = if sign > 0 { vals.max() } else { vals.min() }.expect("nonempty vertex list");
                    }
                    let mut key: Vec<i128> = alpha[..d].iter().map(|a| sign * a).collect();
                    key.extend(ms[1..].iter().map(|m| sign * (ms[0] - m)));
                    key.push(sign * ms[0]);
                    let g = key.iter().fold(0i128, |g, &v| gcd_i128(g, v));
                    key.iter_mut().for_each(|v| *v /= g);
                    if seen.insert(key.clone()) {
                        hits.insert(self.inequality(key));
                    }
                }
            }
            for slot in (0..multi.len()).rev() {
                pos[slot] += 1;
                if pos[slot] < pools[multi[slot]].len() {
                    continue 'outer;
                }
                pos[slot] = 0;
            }
            break;
        }
        hits
    }

    /// `key = (alpha, mu', rho')` in scaled coordinates.
    fn inequality(&self, mut key: Vec<i128>) -> LinearInequality {
        let l = Rational::from_integer(self.lcm.clone());
        let rho = Rational::from_integer(key.pop().expect("nonempty key").into()) / &l;
        let mut alpha: Vec<Rational> = key.into_iter().map(|v| Rational::from_integer(v.into())).collect();
        let mu: Vec<Rational> = alpha.split_off(self.d).into_iter().map(|v| v / &l).collect();
        canonicalize(&LinearInequality::new(alpha.into(), mu.into(), rho)).expect("nonzero normal")
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Fraction-free determinant of the leading `k x k` block. Callers keep
/// entries small enough that no product overflows.
fn small_det(m: &mut [[i128; KERNEL_MAX_DIM]; KERNEL_MAX_DIM], k: usize) -> i128 {
    let mut sign = 1i128;
    let mut prev = 1i128;
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        for r in c + 1..k {
            for j in c + 1..k {
                m[r][j] = (m[r][j] * m[c][c] - m[r][c] * m[c][j]) / prev;
            }
            m[r][c] = 0;
        }
        prev = m[c][c];
    }
    sign * m[k - 1][k - 1]
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Fraction-free Gaussian elimination with overflow detection.
fn det_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let k = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| m[r][c] != 0) else {
            return Some(0);
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        for r in c + 1..k {
            for j in c + 1..k {
                let v = m[r][j]
                    .checked_mul(m[c][c])?
                    .checked_sub(m[r][c].checked_mul(m[c][j])?)?;
                m[r][j] = v / prev;
            }
            m[r][c] = 0;
        }
        prev = m[c][c];
    }
    Some(sign * m[k - 1][k - 1])
}

fn det_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let k = m.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !m[r][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            m.swap(p, c);
            negate = !negate;
        }
        for r in c + 1..k {
            for j in c + 1..k {
                let v = &m[r][j] * &m[c][c] - &m[r][c] * &m[c][j];
                m[r][j] = v / &prev;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[c][c].clone();
    }
    let d = m[k - 1][k - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Integer hyperplane `normal.y = rhs` through `k` points of `Z^k`, from the
/// cofactor expansion of `det [y 1; p_1 1; ...; p_k 1] = 0`.
fn cofactor_hyperplane(pts: &[&Vec<BigInt>], small: Option<&[&Vec<i128>]>) -> (Vec<BigInt>, BigInt) {
    let k = pts.len();
    let mut coeffs = Vec::with_capacity(k + 1);
    for skip in 0..=k {
        let sign = if skip % 2 == 0 { 1 } else { -1 };
        let fast = small.and_then(|sp| {
            let minor: Vec<Vec<i128>> = sp
                .iter()
                .map(|p| {
                    (0..=k)
                        .filter(|&j| j != skip)
                        .map(|j| if j < k { p[j] } else { 1 })
                        .collect()
                })
                .collect();
            det_i128(minor)
        });
        let det = match fast {
            Some(v) => BigInt::from(v),
            None => {
                let minor: Vec<Vec<BigInt>> = pts
                    .iter()
                    .map(|p| {
                        (0..=k)
                            .filter(|&j| j != skip)
                            .map(|j| if j < k { p[j].clone() } else { BigInt::one() })
                            .collect()
                    })
                    .collect();
                det_big(minor)
            }
        };
        coeffs.push(if sign > 0 { det } else { -det });
    }
    let constant = coeffs.pop().expect("k + 1 cofactors");
    (coeffs, -constant)
}

/// Facets of the convex hull of the lifted extreme points by checking every
/// `(d+n)`-subset. Independent of the lifting and signature code.
pub fn oracle_hull(inst: &DisjunctionInstance, cap: u128) -> Result<FacetList> {
    let (d, n) = (inst.d(), inst.n());
    let k = d + n;
    let pts = inst.lifted_points();
    let candidates = binomial(pts.len(), k);
    if candidates > cap {
        return Err(Error::OracleCapExceeded { candidates, cap });
    }

    // Common denominator so all points become integral.
    let mut lcm = BigInt::one();
    for p in pts {
        for c in p.x.iter().chain(p.z.iter()) {
            lcm = lcm.lcm(c.denom());
        }
    }
    let ints: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| {
            p.x.iter()
                .chain(p.z.iter())
                .map(|c| c.numer() * (&lcm / c.denom()))
                .collect()
        })
        .collect();
    // The i128 path is used only while entries stay far from overflow.
    let small: Option<Vec<Vec<i128>>> = ints
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.to_i128().filter(|x| x.abs() < (1 << 20)))
                .collect()
        })
        .collect();

    let candidates: Vec<(Vec<BigInt>, BigInt)> = match oracle_small_candidates(&ints, k) {
        Some(c) => c,
        None => oracle_big_candidates(&ints, small.as_deref(), k),
    };
    let mut facets = Vec::new();
    for (normal, rhs) in candidates {
        let tight: Vec<&LiftedPoint> = ints
            .iter()
            .zip(pts)
            .filter(|(p, _)| normal.iter().zip(p.iter()).map(|(a, b)| a * b).sum::<BigInt>() == rhs)
            .map(|(_, p)| p)
            .collect();
        if affine_rank(&tight)? != k {
            continue;
        }
        // normal.(lcm x) <= rhs  <=>  normal.x <= rhs / lcm
        let mut alpha: Vec<Rational> = normal.into_iter().map(Rational::from_integer).collect();
        let mu = alpha.split_off(d);
        let q = LinearInequality::new(
            RatVector::new(alpha),
            RatVector::new(mu),
            Rational::new(rhs, lcm.clone()),
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

/// Valid hyperplanes through affinely independent `k`-subsets, oriented
/// and primitive, without duplicates.
fn oracle_big_candidates(ints: &[Vec<BigInt>], small: Option<&[Vec<i128>]>, k: usize) -> Vec<(Vec<BigInt>, BigInt)> {
    let mut seen: HashSet<(Vec<BigInt>, BigInt)> = HashSet::new();
    let mut out = Vec::new();
    for idx in (0..ints.len()).combinations(k) {
        let sel: Vec<&Vec<BigInt>> = idx.iter().map(|&i| &ints[i]).collect();
        let sel_small: Option<Vec<&Vec<i128>>> = small.map(|s| idx.iter().map(|&i| &s[i]).collect());
        let (mut normal, mut rhs) = cofactor_hyperplane(&sel, sel_small.as_deref());
        let g = normal.iter().fold(rhs.abs(), |g, v| g.gcd(v));
        if normal.iter().all(Zero::is_zero) || g.is_zero() {
            continue;
        }
        for v in normal.iter_mut() {
            *v = &*v / &g;
        }
        rhs = &rhs / &g;
        let values: Vec<BigInt> = ints
            .iter()
            .map(|p| normal.iter().zip(p).map(|(a, b)| a * b).sum())
            .collect();
        let above = values.iter().any(|v| *v > rhs);
        let below = values.iter().any(|v| *v < rhs);
        if above && below {
            continue;
        }
        if above {
            for v in normal.iter_mut() {
                *v = -&*v;
            }
            rhs = -rhs;
        }
        if seen.insert((normal.clone(), rhs.clone())) {
            out.push((normal, rhs));
        }
    }
    out
}

const ORACLE_FAST_DIM: usize = 12;

/// The same candidates in fixed-size i128 arithmetic. `None` when the
/// coordinates are too large to rule out overflow in advance.
fn oracle_small_candidates(ints: &[Vec<BigInt>], k: usize) -> Option<Vec<(Vec<BigInt>, BigInt)>> {
    if k > ORACLE_FAST_DIM || k < 2 {
        return None;
    }
    // Normals are (k-1)-minors of differences, below h = (2B sqrt k)^(k-1).
    let bmax = ints.iter().flatten().map(|v| v.abs()).max().unwrap_or_default();
    let root_k = BigInt::from((1..=k).find(|r| r * r >= k).unwrap_or(k));
    let h = num_traits::pow(BigInt::from(2) * &bmax * root_k, k - 1);
    let limit = BigInt::one() << 120;
    if &h * &h * 4 >= limit || &h * &bmax * BigInt::from(4 * k) >= limit {
        return None;
    }
    let pts: Vec<Vec<i128>> = ints
        .iter()
        .map(|p| p.iter().map(|v| v.to_i128().expect("bounded")).collect())
        .collect();
    let mut seen: HashSet<Vec<i128>> = HashSet::new();
    let mut out = Vec::new();
    let mut minor = [[0i128; ORACLE_FAST_DIM]; ORACLE_FAST_DIM];
    for idx in (0..pts.len()).combinations(k) {
        let base = &pts[idx[0]];
        let mut normal = vec![0i128; k];
        for (j, nj) in normal.iter_mut().enumerate() {
            for (r, &i) in idx[1..].iter().enumerate() {
                let mut c = 0;
                for col in (0..k).filter(|&col| col != j) {
                    minor[r][c] = pts[i][col] - base[col];
                    c += 1;
                }
            }
            let det = bareiss(&mut minor, k - 1);
            *nj = if j % 2 == 0 { det } else { -det };
        }
        if normal.iter().all(|&v| v == 0) {
            continue;
        }
        let rhs: i128 = normal.iter().zip(base).map(|(a, b)| a * b).sum();
        let (mut above, mut below) = (false, false);
        for p in &pts {
            let v: i128 = normal.iter().zip(p).map(|(a, b)| a * b).sum();
            above |= v > rhs;
            below |= v < rhs;
            if above && below {
                break;
            }
        }
        if above && below {
            continue;
        }
        let sign = if above { -1 } else { 1 };
        let g = normal.iter().fold(rhs.abs(), |g, &v| {
            let (mut a, mut b) = (g, v.abs());
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        });
        let mut key: Vec<i128> = normal.iter().map(|v| sign * v / g).collect();
        key.push(sign * rhs / g);
        if seen.insert(key.clone()) {
            let rhs = key.pop().expect("nonempty key");
            out.push((key.into_iter().map(BigInt::from).collect(), BigInt::from(rhs)));
        }
    }
    Some(out)
}

fn bareiss(m: &mut [[i128; ORACLE_FAST_DIM]; ORACLE_FAST_DIM], k: usize) -> i128 {
    let mut sign = 1i128;
    let mut prev = 1i128;
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        for r in c + 1..k {
            for j in c + 1..k {
                m[r][j] = (m[r][j] * m[c][c] - m[r][c] * m[c][j]) / prev;
            }
            m[r][c] = 0;
        }
        prev = m[c][c];
    }
    sign * m[k - 1][k - 1]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareReport {
    pub equal: bool,
    pub only_in_a: Vec<LinearInequality>,
    pub only_in_b: Vec<LinearInequality>,
}

pub fn compare(a: &FacetList, b: &FacetList) -> Result<CompareReport> {
    if a.d != b.d {
        return Err(Error::DimensionMismatch {
            expected: a.d,
            found: b.d,
        });
    }
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    let (sa, sb) = (a.inequalities(), b.inequalities());
    let only_in_a: Vec<_> = sa.difference(&sb).cloned().collect();
    let only_in_b: Vec<_> = sb.difference(&sa).cloned().collect();
    Ok(CompareReport {
        equal: only_in_a.is_empty() && only_in_b.is_empty(),
        only_in_a,
        only_in_b,
    })
}
