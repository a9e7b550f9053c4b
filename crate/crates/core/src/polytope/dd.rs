//! Double description method for centrally symmetric polytopes.
//!
//! The polytope `{x : |a·x| ≤ 1 for all a}` is homogenized to the pointed cone
//! `{(t, x) : t ≥ 0, t − a·x ≥ 0, t + a·x ≥ 0}`. Rays are kept as primitive
//! integer vectors together with the set of processed constraints they make
//! tight; adjacency is decided by the combinatorial test.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{canonical_sign, primitive_integer, rank, solve_linear, QMat, QVec, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

/// Vertices of `{x ∈ ℚ^dim : |a·x| ≤ 1 for every a in rows}`, one canonical
/// representative per `±` pair (first nonzero coordinate positive), sorted
/// lexicographically. Fails when the rows do not span (the set is unbounded).
pub(crate) fn symmetric_vertices(rows: &[QVec], dim: usize) -> Result<Vec<QVec>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    for r in rows {
        if r.len() != dim {
            return Err(Error::dim("polytope constraint", dim, r.len()));
        }
    }
    if rows.is_empty() || rank(&QMat::from_rows(rows.to_vec(), dim)?) < dim {
        return Err(Error::NotANorm(
            "constraints do not bound the polytope".into(),
        ));
    }

    // Homogenized integer constraint rows, deduplicated, `t ≥ 0` first.
    let d = dim + 1;
    let mut hrows: Vec<Vec<BigInt>> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |r: Vec<BigInt>, hrows: &mut Vec<Vec<BigInt>>| {
        if seen.insert(r.clone()) {
            hrows.push(r);
        }
    };
    let mut t_row = vec![BigInt::zero(); d];
    t_row[0] = BigInt::one();
    push(t_row, &mut hrows);
    for a in rows {
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        // l·(t ∓ a·x) with l the common denominator of a
        let l = a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = a.iter().map(|x| x.numer() * (&l / x.denom())).collect();
        for sgn in [-1i32, 1] {
            let mut r = Vec::with_capacity(d);
            r.push(l.clone());
            r.extend(ints.iter().map(|x| x * BigInt::from(sgn)));
            push(primitive(r), &mut hrows);
        }
    }
    let m = hrows.len();

    // Initial simplicial cone from the first d independent rows.
    let as_rat = |r: &Vec<BigInt>| -> QVec { r.iter().map(|x| Rat::from_integer(x.clone())).collect() };
    let mut basis_idx: Vec<usize> = Vec::new();
    let mut basis_rows: Vec<QVec> = Vec::new();
    for (i, r) in hrows.iter().enumerate() {
        let mut trial = basis_rows.clone();
        trial.push(as_rat(r));
        if rank(&QMat::from_rows(trial.clone(), d)?) == trial.len() {
            basis_rows = trial;
            basis_idx.push(i);
            if basis_idx.len() == d {
                break;
            }
        }
    }
    debug_assert_eq!(basis_idx.len(), d);
    let bmat = QMat::from_rows(basis_rows, d)?;
    let mut rays: Vec<Ray> = Vec::with_capacity(d);
    for k in 0..d {
        let mut e = vec![Rat::zero(); d];
        e[k] = Rat::one();
        let y = solve_linear(&bmat, &e)?.expect("basis matrix is invertible");
        let mut zeros = Bits::new(m);
        for (kk, &bi) in basis_idx.iter().enumerate() {
            if kk != k {
                zeros.set(bi);
            }
        }
        rays.push(Ray {
            v: primitive_integer(&y),
            zeros,
        });
    }

    let threshold = (d as u32).saturating_sub(2);
    for (hi, h) in hrows.iter().enumerate() {
        if basis_idx.contains(&hi) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| idot(h, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zeros.set(hi);
                }
            }
            continue;
        }
        let mut fresh = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() < threshold {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(r, ray)| r == p || r == n || !common.subset_of(&ray.zeros));
                if !adjacent {
                    continue;
                }
                let sp = &vals[p];
                let sn = &vals[n];
                let v: Vec<BigInt> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(yn, yp)| sp * yn - sn * yp)
                    .collect();
                let mut zeros = common;
                zeros.set(hi);
                fresh.push(Ray {
                    v: primitive(v),
                    zeros,
                });
            }
        }
        let mut next = Vec::with_capacity(pos.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                r.zeros.set(hi);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }

    let mut out = BTreeSet::new();
    for r in rays {
        let t = &r.v[0];
        debug_assert!(t.is_positive(), "bounded polytope has no rays at infinity");
        if !t.is_positive() {
            continue;
        }
        let tr = Rat::from_integer(t.clone());
        let x: QVec = r.v[1..]
            .iter()
            .map(|c| Rat::from_integer(c.clone()) / &tr)
            .collect();
        out.insert(canonical_sign(x));
    }
    Ok(out.into_iter().collect())
}
