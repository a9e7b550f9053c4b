//! Embedding an operator into the chain along a truncation sequence, and
//! finite back-and-forth transcripts between two chains.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::witness::{g_witness, OperatorSquare, WitnessSeed};
use super::{cantor_unpair, Chain};
use crate::amalgam::square_sum;
use crate::banach::{classify_embedding, map_distance, span_subspace, LinMap, Space, SpaceRef};
use crate::error::{Error, Result};
use crate::exactlin::{column_basis, solve_linear, unit, QVec, Rat};
use crate::rationalize::restricted_operator;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsTerms {
    /// `ε_n = scale·2^{−n}` for `n ≥ 1`.
    Dyadic { scale: Rat },
    /// `ε_1, ε_2, …`; past the end the last term keeps halving.
    Explicit(Vec<Rat>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsSchedule {
    pub eps0: Rat,
    pub terms: EpsTerms,
}

fn pow2(n: usize) -> Rat {
    Rat::from_integer(num_bigint::BigInt::one() << n)
}

impl EpsSchedule {
    /// `ε_n = scale·2^{−n}` for all `n ≥ 0`.
    pub fn dyadic(scale: Rat) -> Self {
        EpsSchedule {
            eps0: scale.clone(),
            terms: EpsTerms::Dyadic { scale },
        }
    }

    pub fn eps(&self, n: usize) -> Rat {
        if n == 0 {
            return self.eps0.clone();
        }
        match &self.terms {
            EpsTerms::Dyadic { scale } => scale / pow2(n),
            EpsTerms::Explicit(list) => {
                if n <= list.len() {
                    list[n - 1].clone()
                } else {
                    list.last().cloned().unwrap_or_else(|| self.eps0.clone()) / pow2(n - list.len())
                }
            }
        }
    }

    /// `Σ_{n≥1} ε_n`.
    pub fn tail_sum(&self) -> Rat {
        match &self.terms {
            EpsTerms::Dyadic { scale } => scale.clone(),
            EpsTerms::Explicit(list) => {
                list.iter().fold(Rat::zero(), |a, b| a + b) + list.last().cloned().unwrap_or_else(|| self.eps0.clone())
            }
        }
    }

    pub fn is_decreasing(&self) -> bool {
        match &self.terms {
            EpsTerms::Dyadic { scale } => scale.is_positive() && scale / pow2(1) < self.eps0,
            EpsTerms::Explicit(list) => {
                let mut prev = self.eps0.clone();
                for e in list {
                    if !e.is_positive() || *e >= prev {
                        return false;
                    }
                    prev = e.clone();
                }
                prev.is_positive()
            }
        }
    }

    /// `3·Σ_{n≥1} ε_n < ε − ε_0`.
    pub fn satisfies_s(&self, eps: &Rat) -> bool {
        self.tail_sum() * Rat::from_integer(3.into()) < eps - &self.eps0
    }

    /// `η_n = 2ε_{n−1} + 3ε_n + ε_{n+1}`.
    pub fn eta(&self, n: usize) -> Rat {
        Rat::from_integer(2.into()) * self.eps(n - 1) + Rat::from_integer(3.into()) * self.eps(n) + self.eps(n + 1)
    }

    /// The dyadic schedule with the largest `c = 2^{−k}` such that
    /// `3c < ε − ε_0` and `c/2 < ε_0`.
    pub fn for_back_and_forth(eps0: &Rat, eps: &Rat) -> Result<Self> {
        if !eps0.is_positive() || eps0 >= eps {
            return Err(Error::ScheduleInfeasible(format!("ε₀ = {eps0} is not in (0, ε) for ε = {eps}")));
        }
        let mut c = Rat::one();
        while Rat::from_integer(3.into()) * &c >= eps - eps0 || &c / pow2(1) >= *eps0 {
            c /= pow2(1);
        }
        Ok(EpsSchedule {
            eps0: eps0.clone(),
            terms: EpsTerms::Dyadic { scale: c },
        })
    }
}

/// Greedy extension of an independent family by further candidates.
fn extend_basis(basis: &[QVec], candidates: &[QVec], dim: usize) -> Vec<QVec> {
    let all: Vec<QVec> = basis.iter().chain(candidates).cloned().collect();
    column_basis(&all, dim).into_iter().map(|k| all[k].clone()).collect()
}

/// The `n`-th truncation of `T: X → Y`: `X_n` spanned by the first `n`
/// coordinate vectors, `Y_n` by the previous `Y` basis, the `T`-images of the
/// new domain vectors and the `n`-th codomain coordinate vector.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub x: LinMap,
    pub y: LinMap,
    pub op: LinMap,
}

pub fn truncations(t: &LinMap, depth: usize) -> Result<Vec<Truncation>> {
    let (dx, dy) = (t.domain().dim(), t.codomain().dim());
    let mut out = Vec::with_capacity(depth + 1);
    let mut yb: Vec<QVec> = Vec::new();
    for n in 0..=depth {
        let xb: Vec<QVec> = (0..n.min(dx)).map(|k| unit(dx, k)).collect();
        let mut cand: Vec<QVec> = Vec::new();
        if n >= 1 && n <= dx {
            cand.push(t.apply(&xb[n - 1])?);
        }
        if n >= 1 && n <= dy {
            cand.push(unit(dy, n - 1));
        }
        yb = extend_basis(&yb, &cand, dy);
        let x = span_subspace(t.domain(), &xb)?;
        let y = span_subspace(t.codomain(), &yb)?;
        let op = restricted_operator(t, &x, &y)?;
        out.push(Truncation { x, y, op });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct UniversalTranscript {
    pub squares: Vec<OperatorSquare>,
    /// Chain stage receiving each square.
    pub stages: Vec<usize>,
    pub chain: Chain,
    pub report: Report,
}

/// Embeds the truncations `T_0 ⊆ T_1 ⊆ ⋯ ⊆ T_depth` of `T` into the chain,
/// each step extending the previous square by a (G*) witness.
pub fn embed_operator(chain: &Chain, t: &LinMap, schedule: &EpsSchedule, depth: usize) -> Result<UniversalTranscript> {
    if depth == 0 {
        return Err(Error::bound("depth ≥ 1", 1, 0));
    }
    let tr = truncations(t, depth)?;
    let mut chain = chain.clone();
    let mut r = Report::new();
    let zero = OperatorSquare::zero_into(&chain, 0);
    let first = OperatorSquare::new(tr[0].op.clone(), zero.t, LinMap::zero(tr[0].op.domain().clone(), zero.i0.codomain().clone()), LinMap::zero(tr[0].op.codomain().clone(), zero.i1.codomain().clone()))?;
    let mut squares = vec![first];
    let mut stages = vec![0];
    for n in 0..depth {
        let prev = &squares[n];
        let eps_n = schedule.eps(n);
        let x0 = LinMap::leading_inclusion(tr[n].op.domain().clone(), tr[n + 1].op.domain().clone())?;
        let y0 = LinMap::leading_inclusion(tr[n].op.codomain().clone(), tr[n + 1].op.codomain().clone())?;
        let seed = WitnessSeed {
            stage: stages[n],
            i: prev.i0.clone(),
            j: prev.i1.clone(),
        };
        let three = Rat::from_integer(3.into()) * &eps_n;
        let w = g_witness(&chain, &tr[n + 1].op, &x0, &y0, &seed, &three)?;
        chain = w.chain;
        let m = w.m;
        let st = &chain.stages[m];
        let sq = OperatorSquare::new(tr[n + 1].op.clone(), st.f.clone(), w.i_prime, w.j_prime)?;
        let lift_i = chain.incl_u(stages[n], m)?.compose(&prev.i0)?;
        let lift_j = chain.incl_v(stages[n], m)?.compose(&prev.i1)?;
        r.le(
            format!("(ii) ‖i_{}↾X_{n} − i_{n}‖ ≤ 3ε_{n}", n + 1),
            &map_distance(&sq.i0.compose(&x0)?, &lift_i)?,
            &three,
        );
        r.le(
            format!("(ii) ‖j_{}↾Y_{n} − j_{n}‖ ≤ 3ε_{n}", n + 1),
            &map_distance(&sq.i1.compose(&y0)?, &lift_j)?,
            &three,
        );
        squares.push(sq);
        stages.push(m);
    }
    for (n, sq) in squares.iter().enumerate() {
        let e = schedule.eps(n);
        for (leg, name) in [(&sq.i0, "i"), (&sq.i1, "j")] {
            let c = classify_embedding(leg, &e)?;
            r.verdict(
                format!("(i) {name}_{n} is an ε_{n}-embedding"),
                "ε-embedding",
                &format!("{:?}", c.verdict),
                c.verdict.is_eps(),
            );
        }
        r.le(format!("(i) defect of square {n} ≤ ε_{n}"), &sq.defect, &e);
    }
    Ok(UniversalTranscript {
        squares,
        stages,
        chain,
        report: r,
    })
}

/// `T↾`: an operator `op: X → Y` sitting in a chain stage through isometric
/// `x: X → U_stage`, `y: Y → V_stage` with `F_stage∘x = y∘op`.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub stage: usize,
    pub x: LinMap,
    pub y: LinMap,
    pub op: LinMap,
}

impl Restriction {
    /// The restriction of stage `stage` to the spans of the given vectors,
    /// closed under `F`.
    pub fn spanned(chain: &Chain, stage: usize, dom: &[QVec], cod: &[QVec]) -> Result<Self> {
        let st = &chain.stages[stage];
        let x = span_subspace(&st.u, dom)?;
        let mut yv: Vec<QVec> = cod.to_vec();
        for c in x.matrix().col_vecs() {
            yv.push(st.f.apply(&c)?);
        }
        let y = span_subspace(&st.v, &yv)?;
        let op = restricted_operator(&st.f, &x, &y)?;
        Ok(Restriction { stage, x, y, op })
    }

    pub fn whole(chain: &Chain, stage: usize) -> Self {
        let st = &chain.stages[stage];
        Restriction {
            stage,
            x: LinMap::identity(st.u.clone()),
            y: LinMap::identity(st.v.clone()),
            op: st.f.clone(),
        }
    }

    fn lifted(&self, chain: &Chain, to: usize) -> Result<(LinMap, LinMap)> {
        Ok((
            chain.incl_u(self.stage, to)?.compose(&self.x)?,
            chain.incl_v(self.stage, to)?.compose(&self.y)?,
        ))
    }

    /// `self ⊆ other` as a square of coordinate maps.
    fn inclusion(&self, chain: &Chain, other: &Restriction) -> Result<(LinMap, LinMap)> {
        let (lx, ly) = self.lifted(chain, other.stage)?;
        Ok((
            restricted_operator(&lx, &LinMap::identity(self.x.domain().clone()), &other.x)?,
            restricted_operator(&ly, &LinMap::identity(self.y.domain().clone()), &other.y)?,
        ))
    }

    fn contains(&self, chain: &Chain, u: &[Rat], v: &[Rat]) -> Result<bool> {
        let lu = pad(u, chain.stages[self.stage].u.dim());
        let lv = pad(v, chain.stages[self.stage].v.dim());
        Ok(solve_linear(self.x.matrix(), &lu)?.is_some()
            && solve_linear(self.y.matrix(), &lv)?.is_some())
    }
}

fn pad(v: &[Rat], n: usize) -> QVec {
    let mut out = v.to_vec();
    out.resize(n, Rat::zero());
    out
}

/// A seed square between restrictions of two chains.
#[derive(Clone, Debug)]
pub struct BnfSeed {
    pub src: Restriction,
    pub dst: Restriction,
    pub square: OperatorSquare,
}

impl BnfSeed {
    /// The zero square between the zero stages.
    pub fn zero(a: &Chain, b: &Chain) -> Result<Self> {
        let src = Restriction::whole(a, 0);
        let dst = Restriction::whole(b, 0);
        let square = OperatorSquare::new(
            src.op.clone(),
            dst.op.clone(),
            LinMap::zero(src.op.domain().clone(), dst.op.domain().clone()),
            LinMap::zero(src.op.codomain().clone(), dst.op.codomain().clone()),
        )?;
        Ok(BnfSeed { src, dst, square })
    }
}

impl BnfSeed {
    /// Realizes the whole stage `stage` of `a` inside `b` by a (G*) witness
    /// and scales both legs by `scale`; returns the seed and the extended `b`.
    pub fn by_witness(a: &Chain, stage: usize, b: &Chain, scale: &Rat) -> Result<(Self, Chain)> {
        let src = Restriction::whole(a, stage);
        let z: SpaceRef = Arc::new(Space::zero());
        let b0 = &b.stages[0];
        let seed = WitnessSeed {
            stage: 0,
            i: LinMap::zero(z.clone(), b0.u.clone()),
            j: LinMap::zero(z.clone(), b0.v.clone()),
        };
        let x0 = LinMap::zero(z.clone(), src.op.domain().clone());
        let y0 = LinMap::zero(z, src.op.codomain().clone());
        let w = g_witness(b, &src.op, &x0, &y0, &seed, &Rat::one())?;
        let dst = Restriction::spanned(&w.chain, w.m, &w.i_prime.matrix().col_vecs(), &w.j_prime.matrix().col_vecs())?;
        let i0 = restricted_operator(&w.i_prime, &LinMap::identity(src.x.domain().clone()), &dst.x)?.scale(scale);
        let i1 = restricted_operator(&w.j_prime, &LinMap::identity(src.y.domain().clone()), &dst.y)?.scale(scale);
        let square = OperatorSquare::new(src.op.clone(), dst.op.clone(), i0, i1)?;
        Ok((BnfSeed { src, dst, square }, w.chain))
    }
}

#[derive(Clone, Debug)]
pub struct BnfTranscript {
    /// `k_n: T_n → T′_n`, `n = 0, …, depth`.
    pub k_squares: Vec<OperatorSquare>,
    /// `ℓ_n: T′_n → T_{n+1}`, `n = 0, …, depth − 1`.
    pub l_squares: Vec<OperatorSquare>,
    pub etas: Vec<Rat>,
    pub schedule: EpsSchedule,
    pub a: Chain,
    pub b: Chain,
    pub t: Vec<Restriction>,
    pub t_prime: Vec<Restriction>,
    pub report: Report,
}

/// Vectors absorbed at step `n`: the coordinate vector of index
/// `cantor_unpair(n).0` (cyclically) of the reference stage, on both sides.
fn absorbed(u_dim: usize, v_dim: usize, n: usize) -> (QVec, QVec) {
    let x = cantor_unpair(n).0;
    let pick = |d: usize| if d == 0 { Vec::new() } else { unit(d, x % d) };
    (pick(u_dim), pick(v_dim))
}

/// One half step: from `f: P → Q` (`P` in `home`, `Q` in the other chain),
/// an exact embedding `g: Q → home` with `g∘f` close to `P ⊆ P_next`, where
/// `P_next` also absorbs `(u, v)`.
fn half_step(
    home: &Chain,
    p: &Restriction,
    q: &Restriction,
    f: &OperatorSquare,
    close: &Rat,
    absorb: &(QVec, QVec),
) -> Result<(Chain, Restriction, OperatorSquare)> {
    let seed = WitnessSeed {
        stage: p.stage,
        i: p.x.clone(),
        j: p.y.clone(),
    };
    let (chain, m, gx, gy) = if f.is_exact() {
        let w = g_witness(home, &q.op, &f.i0, &f.i1, &seed, close)?;
        if !w.report.all_pass() {
            return Err(Error::bound("(G*) witness checks", "all pass", "failure"));
        }
        (w.chain, w.m, w.i_prime, w.j_prime)
    } else {
        let eps_l = if f.eps.is_positive() { f.eps.clone() } else { f.defect.clone() };
        let ss = square_sum(&p.op, &q.op, &f.i0, &f.i1, &eps_l, &f.defect)?;
        let w = g_witness(home, &ss.map, &ss.domain.ix, &ss.codomain.ix, &seed, close)?;
        if !w.report.all_pass() {
            return Err(Error::bound("(G*) witness checks", "all pass", "failure"));
        }
        let gx = w.i_prime.compose(&ss.domain.jy)?;
        let gy = w.j_prime.compose(&ss.codomain.jy)?;
        (w.chain, w.m, gx, gy)
    };
    let m2 = chain.last_index();
    let gx = chain.incl_u(m, m2)?.compose(&gx)?;
    let gy = chain.incl_v(m, m2)?.compose(&gy)?;
    let m = m2;
    let (lx, ly) = p.lifted(&chain, m)?;
    let st = &chain.stages[m];
    let mut dom = lx.matrix().col_vecs();
    dom.extend(gx.matrix().col_vecs());
    let mut cod = ly.matrix().col_vecs();
    cod.extend(gy.matrix().col_vecs());
    if !absorb.0.is_empty() {
        dom.push(pad(&absorb.0, st.u.dim()));
    }
    if !absorb.1.is_empty() {
        cod.push(pad(&absorb.1, st.v.dim()));
    }
    let next = Restriction::spanned(&chain, m, &dom, &cod)?;
    let gx = restricted_operator(&gx, &LinMap::identity(q.x.domain().clone()), &next.x)?;
    let gy = restricted_operator(&gy, &LinMap::identity(q.y.domain().clone()), &next.y)?;
    let g = OperatorSquare::new(q.op.clone(), next.op.clone(), gx, gy)?;
    Ok((chain, next, g))
}

/// `‖outer∘inner − incl‖` on both legs.
fn closeness(outer: &OperatorSquare, inner: &OperatorSquare, incl: &(LinMap, LinMap)) -> Result<Rat> {
    let dx = map_distance(&outer.i0.compose(&inner.i0)?, &incl.0)?;
    let dy = map_distance(&outer.i1.compose(&inner.i1)?, &incl.1)?;
    Ok(dx.max(dy))
}

/// A depth-`depth` back-and-forth transcript between chains `A` and `B`
/// starting from a strict `ε`-embedding of operators.
pub fn back_and_forth(a: &Chain, b: &Chain, seed: &BnfSeed, eps: &Rat, depth: usize) -> Result<BnfTranscript> {
    let sq = &seed.square;
    let eps0 = if sq.is_exact() {
        let mut e = Rat::one();
        while e >= eps / Rat::from_integer(2.into()) {
            e /= Rat::from_integer(2.into());
        }
        e
    } else {
        sq.eps.clone().max(sq.defect.clone())
    };
    if !sq.is_strict(eps) {
        return Err(Error::ScheduleInfeasible(format!(
            "seed is not a strict ε-embedding: quality {}, defect {}, ε = {eps}",
            sq.eps, sq.defect
        )));
    }
    let schedule = EpsSchedule::for_back_and_forth(&eps0, eps)?;
    let mut r = Report::new();
    r.verdict(
        "(s) 3 Σ ε_n < ε − ε₀",
        &format!("< {}", eps - &eps0),
        &(schedule.tail_sum() * Rat::from_integer(3.into())).to_string(),
        schedule.satisfies_s(eps),
    );
    let (ra, rb) = (a.last_index(), b.last_index());
    let (au, av) = (a.stages[ra].u.dim(), a.stages[ra].v.dim());
    let (bu, bv) = (b.stages[rb].u.dim(), b.stages[rb].v.dim());

    let mut a = a.clone();
    let mut b = b.clone();
    let mut t = vec![seed.src.clone()];
    let mut tp = vec![seed.dst.clone()];
    let mut ks = vec![sq.clone()];
    let mut ls: Vec<OperatorSquare> = Vec::new();
    let two = Rat::from_integer(2.into());
    for n in 0..depth {
        let close_l = &two * schedule.eps(n) + schedule.eps(n + 1);
        let (a2, next, l) = half_step(&a, &t[n], &tp[n], &ks[n], &close_l, &absorbed(au, av, n))?;
        a = a2;
        t.push(next);
        ls.push(l);
        let close_k = &two * schedule.eps(n + 1) + schedule.eps(n + 2);
        let (b2, next, k) = half_step(&b, &tp[n], &t[n + 1], &ls[n], &close_k, &absorbed(bu, bv, n))?;
        b = b2;
        tp.push(next);
        ks.push(k);
    }

    let mut etas = Vec::new();
    for n in 0..=depth {
        let e = schedule.eps(n);
        r.verdict(
            format!("(1) k_{n} is an ε_{n}-embedding of operators"),
            &format!("quality, defect ≤ {e}"),
            &format!("{}, {}", ks[n].eps, ks[n].defect),
            ks[n].is_eps_embedding(&e),
        );
        if n < depth {
            let e1 = schedule.eps(n + 1);
            r.verdict(
                format!("(2) ℓ_{n} is an ε_{}-embedding of operators", n + 1),
                &format!("quality, defect ≤ {e1}"),
                &format!("{}, {}", ls[n].eps, ls[n].defect),
                ls[n].is_eps_embedding(&e1),
            );
            let bound3 = &two * &e + &e1;
            let incl = t[n].inclusion(&a, &t[n + 1])?;
            r.le(format!("(3) ‖ℓ_{n}∘k_{n} − (T_{n} ⊆ T_{})‖ ≤ 2ε_{n} + ε_{}", n + 1, n + 1), &closeness(&ls[n], &ks[n], &incl)?, &bound3);
            let bound4 = &two * &e1 + schedule.eps(n + 2);
            let incl = tp[n].inclusion(&b, &tp[n + 1])?;
            r.le(
                format!("(4) ‖k_{}∘ℓ_{n} − (T′_{n} ⊆ T′_{})‖ ≤ 2ε_{} + ε_{}", n + 1, n + 1, n + 1, n + 2),
                &closeness(&ks[n + 1], &ls[n], &incl)?,
                &bound4,
            );
            let (u, v) = absorbed(au, av, n);
            r.identity(format!("(5) u_{n}, v_{n} ∈ T_{}", n + 1), t[n + 1].contains(&a, &u, &v)?);
            let (u, v) = absorbed(bu, bv, n);
            r.identity(format!("(5) u′_{n}, v′_{n} ∈ T′_{}", n + 1), tp[n + 1].contains(&b, &u, &v)?);
        }
        if n >= 1 {
            let eta = schedule.eta(n);
            r.eq_rat(
                format!("η_{n} = 2ε_{} + 3ε_{n} + ε_{}", n - 1, n + 1),
                &eta,
                &(&two * schedule.eps(n - 1) + Rat::from_integer(3.into()) * &e + schedule.eps(n + 1)),
            );
            let ia = t[n - 1].inclusion(&a, &t[n])?;
            let ib = tp[n - 1].inclusion(&b, &tp[n])?;
            let dx = map_distance(&ks[n].i0.compose(&ia.0)?, &ib.0.compose(&ks[n - 1].i0)?)?;
            let dy = map_distance(&ks[n].i1.compose(&ia.1)?, &ib.1.compose(&ks[n - 1].i1)?)?;
            r.le(format!("‖k_{n}↾T_{} − k_{}‖ ≤ η_{n}", n - 1, n - 1), &dx.max(dy), &eta);
            etas.push(eta);
        }
    }
    let total = etas.iter().fold(Rat::zero(), |s, e| s + e);
    r.lt("Σ η_n < 2ε", &total, &(&two * eps));
    Ok(BnfTranscript {
        k_squares: ks,
        l_squares: ls,
        etas,
        schedule,
        a,
        b,
        t,
        t_prime: tp,
        report: r,
    })
}
