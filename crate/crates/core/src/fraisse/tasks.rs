//! The task stream driving the chain construction.
//!
//! A task is described by a small template that is instantiated against the
//! current chain: it extends `U_k` and/or `V_k` by one coordinate and extends
//! `F_k` to the new coordinate. Templates are ordered by the total bit size
//! of their data, then lexicographically; stream position `p` emits a fresh
//! template when `p` is even and re-emits an earlier one when `p` is odd, so
//! every template reappears infinitely often.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Chain, Task};
use crate::banach::{operator_norm, LinMap, Space, SpaceRef};
use crate::exactlin::{bitlen, concat, int, rat, rat_bits, scale, QMat, QVec, Rat};
use crate::polytope::Ball;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaskTemplate {
    pub k: usize,
    pub ext_u: bool,
    pub ext_v: bool,
    /// Offset of the new domain vertex along the first vertex of `U_k`.
    pub c: Rat,
    /// Offset of the new codomain vertex along the first vertex of `V_k`.
    pub d: Rat,
    /// Component of the image of the new domain vector along the first vertex of `V_k`.
    pub b: Rat,
    /// Component of the image of the new domain vector along the new codomain vector.
    pub t: Rat,
}

impl TaskTemplate {
    pub fn zero() -> Self {
        TaskTemplate {
            k: 0,
            ext_u: false,
            ext_v: false,
            c: Rat::zero(),
            d: Rat::zero(),
            b: Rat::zero(),
            t: Rat::zero(),
        }
    }

    pub fn size(&self) -> u64 {
        bitlen(&BigInt::from(self.k))
            + self.ext_u as u64
            + self.ext_v as u64
            + [&self.c, &self.d, &self.b, &self.t].iter().map(|r| rat_bits(r)).sum::<u64>()
    }

    fn key(&self) -> (usize, bool, bool, &Rat, &Rat, &Rat, &Rat) {
        (self.k, self.ext_u, self.ext_v, &self.c, &self.d, &self.b, &self.t)
    }
}

impl PartialOrd for TaskTemplate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TaskTemplate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.key().cmp(&other.key()))
    }
}

fn offsets() -> Vec<Rat> {
    vec![int(0), rat(1, 2), int(1)]
}

fn couplings() -> Vec<Rat> {
    vec![int(-1), int(0), rat(1, 2), int(1)]
}

/// All templates of exactly the given size, in lexicographic order.
pub fn size_class(size: u64) -> Vec<TaskTemplate> {
    let mut out = Vec::new();
    let kmax = if size >= 63 { usize::MAX } else { (1usize << size) - 1 };
    for k in 0..=kmax {
        let kb = bitlen(&BigInt::from(k));
        if kb > size {
            break;
        }
        for ext_u in [false, true] {
            for ext_v in [false, true] {
                let zero = vec![int(0)];
                let cs = if ext_u { offsets() } else { zero.clone() };
                let ds = if ext_v { offsets() } else { zero.clone() };
                let bs = if ext_u { couplings() } else { zero.clone() };
                let ts = if ext_u && ext_v { couplings() } else { zero.clone() };
                for c in &cs {
                    for d in &ds {
                        for b in &bs {
                            for t in &ts {
                                let tpl = TaskTemplate {
                                    k,
                                    ext_u,
                                    ext_v,
                                    c: c.clone(),
                                    d: d.clone(),
                                    b: b.clone(),
                                    t: t.clone(),
                                };
                                if tpl.size() == size {
                                    out.push(tpl);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// The `index`-th template of the fresh stream; each size class is rotated
/// cyclically by `seed`.
pub fn template_at(index: usize, seed: u64) -> TaskTemplate {
    let mut remaining = index;
    let mut size = 0;
    loop {
        let class = size_class(size);
        if remaining < class.len() {
            let shift = (seed % class.len() as u64) as usize;
            return class[(remaining + shift) % class.len()].clone();
        }
        remaining -= class.len();
        size += 1;
    }
}

/// Inverse of the Cantor pairing `(x, y) ↦ (x+y)(x+y+1)/2 + y`.
pub fn cantor_unpair(z: usize) -> (usize, usize) {
    let mut w = 0;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

/// Template index emitted at stream position `p`.
pub fn template_index(p: usize) -> usize {
    if p % 2 == 0 {
        p / 2
    } else {
        cantor_unpair((p - 1) / 2).0
    }
}

/// The stream task at position `p`, instantiated against the chain.
pub fn task_at(chain: &Chain, p: usize) -> (TaskTemplate, Task) {
    let tpl = template_at(template_index(p), chain.seed);
    let task = instantiate(chain, &tpl);
    (tpl, task)
}

/// The first `budget` tasks of the stream.
pub fn enumerate_tasks(chain: &Chain, budget: usize) -> Vec<Task> {
    (0..budget).map(|p| task_at(chain, p).1).collect()
}

fn extend_space(base: &SpaceRef, offset: &Rat) -> SpaceRef {
    let n = base.dim();
    let mut vrep: Vec<QVec> = base.vertices().iter().map(|v| concat(v, &[Rat::zero()])).collect();
    let apex = match base.vertices().first() {
        Some(w) => concat(&scale(w, offset), &[Rat::one()]),
        None => vec![Rat::one()],
    };
    vrep.push(apex);
    Space::shared(Ball::from_vrep(n + 1, vrep).expect("dimensions agree")).expect("extension of a norm is a norm")
}

/// Instantiates a template against stage `min(k, last)`. A template whose `k`
/// is not an existing stage still yields a task; it simply fails condition (*).
pub fn instantiate(chain: &Chain, tpl: &TaskTemplate) -> Task {
    let k = tpl.k.min(chain.len() - 1);
    let st = &chain.stages[k];
    let (u, v) = (st.u.clone(), st.v.clone());
    let x = if tpl.ext_u { extend_space(&u, &tpl.c) } else { u.clone() };
    let y = if tpl.ext_v { extend_space(&v, &tpl.d) } else { v.clone() };
    let (a, bdim) = (u.dim(), v.dim());
    let mut base = QMat::zeros(y.dim(), x.dim());
    base.set_block(0, 0, st.f.matrix());
    let mut col = vec![Rat::zero(); y.dim()];
    if tpl.ext_u {
        if let Some(w) = v.vertices().first() {
            for (r, wr) in w.iter().enumerate() {
                col[r] = wr * &tpl.b;
            }
        }
        if tpl.ext_v {
            col[bdim] = tpl.t.clone();
        }
    }
    let mut t = None;
    for s in [int(1), rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 16), int(0)] {
        let mut m = base.clone();
        if tpl.ext_u {
            let scaled: Vec<Vec<Rat>> = col.iter().map(|x| vec![x * &s]).collect();
            m.set_block(0, a, &QMat::from_rows(scaled, 1).expect("column"));
        }
        let cand = LinMap::new(m, x.clone(), y.clone()).expect("shapes");
        if operator_norm(&cand) <= Rat::one() {
            t = Some(cand);
            break;
        }
    }
    let t = t.expect("the coupling-free extension is nonexpansive");
    Task {
        i: LinMap::leading_inclusion(u, x).expect("extension"),
        j: LinMap::leading_inclusion(v, y).expect("extension"),
        t,
        k: tpl.k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_template_is_zero() {
        assert_eq!(template_at(0, 0), TaskTemplate::zero());
        assert_eq!(size_class(0), vec![TaskTemplate::zero()]);
    }

    #[test]
    fn classes_are_sorted_and_sized() {
        for s in 0..6 {
            let c = size_class(s);
            assert!(c.iter().all(|t| t.size() == s));
            assert!(c.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn unpair_inverts_pairing() {
        for x in 0..20 {
            for y in 0..20 {
                let z = (x + y) * (x + y + 1) / 2 + y;
                assert_eq!(cantor_unpair(z), (x, y));
            }
        }
    }

    #[test]
    fn every_template_recurs() {
        for idx in 0..5 {
            let hits = (0..400).filter(|&p| template_index(p) == idx).count();
            assert!(hits >= 3, "template {idx} seen {hits} times");
        }
    }
}
