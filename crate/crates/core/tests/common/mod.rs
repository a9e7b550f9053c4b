//! Instance generators and brute-force oracles shared by the integration tests.
//! The oracles avoid the library's LP and double-description code paths.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use gurarii::banach::{operator_norm, subspace, LinMap, Space, SpaceRef};
use gurarii::exactlin::{rat, QMat, QVec, Rat};
use gurarii::polytope::Ball;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(r: &mut ChaCha8Rng) -> Rat {
    rat(r.gen_range(-4..=4), r.gen_range(1..=4))
}

pub fn small_vec(r: &mut ChaCha8Rng, n: usize) -> QVec {
    (0..n).map(|_| small_rat(r)).collect()
}

pub fn nonzero_vec(r: &mut ChaCha8Rng, n: usize) -> QVec {
    loop {
        let v = small_vec(r, n);
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// ℓ1, ℓ∞ or a random polytope containing scaled coordinate vectors.
pub fn random_space(r: &mut ChaCha8Rng, dim: usize) -> SpaceRef {
    if dim == 0 {
        return Arc::new(Space::zero());
    }
    match r.gen_range(0..4) {
        0 => Arc::new(Space::l1(dim)),
        1 => Arc::new(Space::linf(dim)),
        _ => {
            let mut pts: Vec<QVec> = (0..dim)
                .map(|k| {
                    let mut e = vec![Rat::zero(); dim];
                    e[k] = rat(r.gen_range(1..=3), r.gen_range(1..=2));
                    e
                })
                .collect();
            for _ in 0..r.gen_range(1..=3) {
                pts.push(nonzero_vec(r, dim));
            }
            Space::shared(Ball::from_vrep(dim, pts).unwrap()).unwrap()
        }
    }
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMat {
    QMat::from_rows((0..rows).map(|_| small_vec(r, cols)).collect(), cols).unwrap()
}

/// A random map scaled down to norm at most 1.
pub fn random_nonexpansive(r: &mut ChaCha8Rng, x: &SpaceRef, y: &SpaceRef) -> LinMap {
    let t = LinMap::new(random_matrix(r, y.dim(), x.dim()), x.clone(), y.clone()).unwrap();
    let n = operator_norm(&t);
    if n > Rat::one() {
        t.scale(&n.recip())
    } else {
        t
    }
}

/// A random isometric embedding of a `k`-dimensional subspace of `y`.
pub fn random_isometry(r: &mut ChaCha8Rng, y: &SpaceRef, k: usize) -> LinMap {
    loop {
        let basis: Vec<QVec> = (0..k).map(|_| nonzero_vec(r, y.dim())).collect();
        if let Ok(m) = subspace(y, &basis) {
            return m;
        }
    }
}

/// `a·s + b·t` for maps with equal spaces.
pub fn combo(a: &Rat, s: &LinMap, b: &Rat, t: &LinMap) -> LinMap {
    let m = s.matrix().scale(a).add(&t.matrix().scale(b)).unwrap();
    LinMap::new(m, s.domain().clone(), s.codomain().clone()).unwrap()
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Unique solution of a square system by Gauss–Jordan elimination.
pub fn gauss_solve(mut a: Vec<QVec>, mut b: QVec) -> Option<QVec> {
    let n = a.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].recip();
        for k in 0..n {
            a[col][k] = &a[col][k] * &inv;
        }
        b[col] = &b[col] * &inv;
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for k in 0..n {
                    let d = &f * &a[col][k];
                    a[i][k] -= d;
                }
                let d = &f * &b[col];
                b[i] -= d;
            }
        }
    }
    Some(b)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn with_negatives(vs: &[QVec]) -> Vec<QVec> {
    vs.iter().flat_map(|v| [v.clone(), v.iter().map(|x| -x).collect()]).collect()
}

fn sign_normal(v: QVec) -> QVec {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.iter().map(|y| -y).collect(),
        _ => v,
    }
}

/// Facet functionals (one per ± pair) of `conv{±p}`, by solving `φ·v = 1` on
/// every `dim`-subset of points and keeping the valid ones.
pub fn brute_facets(dim: usize, points: &[QVec]) -> BTreeSet<QVec> {
    let pts = with_negatives(points);
    let mut out = BTreeSet::new();
    for s in subsets(pts.len(), dim) {
        let a: Vec<QVec> = s.iter().map(|&i| pts[i].clone()).collect();
        if let Some(phi) = gauss_solve(a, vec![Rat::one(); dim]) {
            if pts.iter().all(|p| dot(&phi, p).abs() <= Rat::one()) {
                out.insert(sign_normal(phi));
            }
        }
    }
    out
}

/// Vertices (one per ± pair) of `{x : |φ(x)| ≤ 1}`.
pub fn brute_vertices(dim: usize, facets: &[QVec]) -> BTreeSet<QVec> {
    let fs = with_negatives(facets);
    let mut out = BTreeSet::new();
    for s in subsets(fs.len(), dim) {
        let a: Vec<QVec> = s.iter().map(|&i| fs[i].clone()).collect();
        if let Some(x) = gauss_solve(a, vec![Rat::one(); dim]) {
            if fs.iter().all(|f| dot(f, &x).abs() <= Rat::one()) {
                out.insert(sign_normal(x));
            }
        }
    }
    out
}

/// `max |φ(x)|` over the given functionals.
pub fn gauge(facets: &BTreeSet<QVec>, x: &[Rat]) -> Rat {
    facets.iter().map(|f| dot(f, x).abs()).max().unwrap_or_else(Rat::zero)
}

/// Operator norm as the maximum of `‖Tv‖` over domain vertices, with the
/// codomain norm evaluated through brute-force facets.
pub fn brute_operator_norm(t: &LinMap) -> Rat {
    if t.domain().dim() == 0 || t.codomain().dim() == 0 {
        return Rat::zero();
    }
    let facets = brute_facets(t.codomain().dim(), t.codomain().vertices());
    let dom = brute_vertices(t.domain().dim(), t.domain().facets());
    dom.iter().map(|v| gauge(&facets, &t.apply(v).unwrap())).max().unwrap()
}

/// `min_t ‖x + t·k‖` over the candidates where two facet values cross.
pub fn coset_min(facets: &BTreeSet<QVec>, x: &[Rat], k: &[Rat]) -> Rat {
    let fs = with_negatives(&facets.iter().cloned().collect::<Vec<_>>());
    let mut ts = vec![Rat::zero()];
    for a in &fs {
        for b in &fs {
            let slope = dot(a, k) - dot(b, k);
            if !slope.is_zero() {
                ts.push((dot(b, x) - dot(a, x)) / slope);
            }
        }
    }
    ts.iter()
        .map(|t| {
            let p: QVec = x.iter().zip(k).map(|(a, b)| a + t * b).collect();
            gauge(facets, &p)
        })
        .min()
        .unwrap()
}

/// Random points of the unit sphere of a space given by its facets.
pub fn sphere_points(r: &mut ChaCha8Rng, facets: &BTreeSet<QVec>, dim: usize, count: usize) -> Vec<QVec> {
    (0..count)
        .map(|_| {
            let v = nonzero_vec(r, dim);
            let n = gauge(facets, &v);
            v.iter().map(|x| x / &n).collect()
        })
        .collect()
}
