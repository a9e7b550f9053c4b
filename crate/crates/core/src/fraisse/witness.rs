//! The (G*)-witness pipeline and the space, kernel and surjectivity
//! witnesses reduced to it.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{realize_on_demand, Chain, Task};
use crate::amalgam::{induced_map, pushout, square_sum};
use crate::banach::{
    classify_embedding, embedding_quality, is_isometric, map_distance, operator_norm, subspace, LinMap, Space,
    SpaceRef,
};
use crate::error::{Error, Result};
use crate::exactlin::{is_zero_vec, solve_linear, unit, QMat, QVec, Rat};
use crate::rationalize::{repair_operator, restricted_operator, RepairMode};
use crate::report::Report;

/// A square `T∘i0 ≈ i1∘S` from `S: X → Y` to `T: Z → W`.
#[derive(Clone, Debug)]
pub struct OperatorSquare {
    pub s: LinMap,
    pub t: LinMap,
    pub i0: LinMap,
    pub i1: LinMap,
    /// The larger embedding quality of the two legs.
    pub eps: Rat,
    /// `‖T∘i0 − i1∘S‖`.
    pub defect: Rat,
}

impl OperatorSquare {
    pub fn new(s: LinMap, t: LinMap, i0: LinMap, i1: LinMap) -> Result<Self> {
        let defect = map_distance(&t.compose(&i0)?, &i1.compose(&s)?)?;
        let mut eps = Rat::zero();
        for (leg, name) in [(&i0, "i0"), (&i1, "i1")] {
            match embedding_quality(leg)? {
                Some(q) => eps = eps.max(q),
                None => {
                    return Err(Error::bound(
                        format!("{name} is an injective nonexpansive map"),
                        "embedding",
                        "not an embedding",
                    ))
                }
            }
        }
        Ok(OperatorSquare {
            s,
            t,
            i0,
            i1,
            eps,
            defect,
        })
    }

    /// The zero square from `0 → 0` into stage `n`.
    pub fn zero_into(chain: &Chain, n: usize) -> Self {
        let z: SpaceRef = Arc::new(Space::zero());
        let st = &chain.stages[n];
        OperatorSquare {
            s: LinMap::zero(z.clone(), z.clone()),
            t: st.f.clone(),
            i0: LinMap::zero(z.clone(), st.u.clone()),
            i1: LinMap::zero(z, st.v.clone()),
            eps: Rat::zero(),
            defect: Rat::zero(),
        }
    }

    /// Both legs isometric and the square commutes.
    pub fn is_exact(&self) -> bool {
        self.eps.is_zero() && self.defect.is_zero()
    }

    pub fn is_eps_embedding(&self, e: &Rat) -> bool {
        self.eps <= *e && self.defect <= *e
    }

    pub fn is_strict(&self, e: &Rat) -> bool {
        self.eps < *e && self.defect < *e
    }
}

/// Embeddings `i: X0 → U_stage`, `j: Y0 → V_stage` of the restricted operator.
#[derive(Clone, Debug)]
pub struct WitnessSeed {
    pub stage: usize,
    pub i: LinMap,
    pub j: LinMap,
}

#[derive(Clone, Debug)]
pub struct GWitness {
    pub i_prime: LinMap,
    pub j_prime: LinMap,
    pub m: usize,
    pub chain: Chain,
    pub report: Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Domain,
    Codomain,
}

fn inverse(m: &LinMap) -> Result<Option<LinMap>> {
    let n = m.domain().dim();
    if m.codomain().dim() != n {
        return Ok(None);
    }
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        match solve_linear(m.matrix(), &unit(n, k))? {
            Some(c) => cols.push(c),
            None => return Ok(None),
        }
    }
    Ok(Some(LinMap::new(QMat::from_cols(&cols, n)?, m.codomain().clone(), m.domain().clone())?))
}

fn require_isometric(t: &LinMap, name: &str) -> Result<()> {
    if !is_isometric(t)? {
        return Err(Error::bound(format!("{name} isometric"), "isometric", "not isometric"));
    }
    Ok(())
}

fn same(a: &SpaceRef, b: &SpaceRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Given `T: X → Y`, isometric `x0: X0 → X`, `y0: Y0 → Y` with `T(X0) ⊆ Y0`,
/// and a seed square of `T↾X0` into stage `n`, finds a later stage `m` and
/// embeddings `i′: X → U_m`, `j′: Y → V_m` with `F_m∘i′ = j′∘T` exactly and
/// `i′↾X0`, `j′↾Y0` within `ε` of the seed.
///
/// An exact seed skips the correction amalgam; an approximate one is first
/// corrected with the square sum, which costs its quality plus its defect.
pub fn g_witness(
    chain: &Chain,
    t: &LinMap,
    x0: &LinMap,
    y0: &LinMap,
    seed: &WitnessSeed,
    eps: &Rat,
) -> Result<GWitness> {
    if !eps.is_positive() {
        return Err(Error::bound("ε > 0", "positive", eps));
    }
    let tn = operator_norm(t);
    if tn > Rat::one() {
        return Err(Error::bound("‖T‖ ≤ 1", 1, tn));
    }
    if !same(x0.codomain(), t.domain()) || !same(y0.codomain(), t.codomain()) {
        return Err(Error::NotANorm("X0, Y0 must embed in the domain and codomain of T".into()));
    }
    require_isometric(x0, "X0 ⊆ X")?;
    require_isometric(y0, "Y0 ⊆ Y")?;
    let n = seed.stage;
    if n >= chain.len() {
        return Err(Error::bound("seed stage exists", chain.len() - 1, n));
    }
    let st = chain.stages[n].clone();
    if !same(seed.i.domain(), x0.domain()) || !same(seed.j.domain(), y0.domain()) {
        return Err(Error::NotANorm("seed embeddings start at X0, Y0".into()));
    }
    if !same(seed.i.codomain(), &st.u) || !same(seed.j.codomain(), &st.v) {
        return Err(Error::NotANorm("seed embeddings land in U_n, V_n".into()));
    }
    let t0 = restricted_operator(t, x0, y0)?;
    let sq = OperatorSquare::new(t0.clone(), st.f.clone(), seed.i.clone(), seed.j.clone())?;

    let mut r = Report::new();
    r.note(format!("step 1: seed lands in stage {n}; no distortion needed"));

    if sq.is_exact() {
        if let (Some(xi), Some(yi)) = (inverse(x0)?, inverse(y0)?) {
            let i_prime = seed.i.compose(&xi)?;
            let j_prime = seed.j.compose(&yi)?;
            r.note(format!("X0 = X and Y0 = Y: T is already realized at stage {n}"));
            check_witness(&mut r, chain, t, x0, y0, seed, &i_prime, &j_prime, n, eps)?;
            return Ok(GWitness {
                i_prime,
                j_prime,
                m: n,
                chain: chain.clone(),
                report: r,
            });
        }
    }

    // step 2: embed T↾X0 and F_n into one operator T2 with isometric legs
    let (x_leg, u_leg, y_leg, v_leg, t2) = if sq.is_exact() {
        r.note("step 2: seed square is exact; T2 = F_n");
        (
            seed.i.clone(),
            LinMap::identity(st.u.clone()),
            seed.j.clone(),
            LinMap::identity(st.v.clone()),
            st.f.clone(),
        )
    } else {
        let eps_l = if sq.eps.is_positive() { sq.eps.clone() } else { sq.defect.clone() };
        let delta_l = sq.defect.clone();
        if !r.lt("ε_L + δ_L < ε", &(&eps_l + &delta_l), eps) {
            return Err(Error::bound("ε_L + δ_L < ε", eps, &eps_l + &delta_l));
        }
        let ss = square_sum(&t0, &st.f, &seed.i, &seed.j, &eps_l, &delta_l)?;
        r.note(format!("step 2: square sum with ε_L = {eps_l}, δ_L = {delta_l}"));
        (ss.domain.ix, ss.domain.jy, ss.codomain.ix, ss.codomain.jy, ss.map)
    };

    // step 3: glue X and Y onto the corrected spaces
    let px = pushout(&x_leg, x0)?;
    let py = pushout(&y_leg, y0)?;
    let t3 = induced_map(&px, &py, &t2, t)?;
    let ku = px.g.compose(&u_leg)?;
    let kv = py.g.compose(&v_leg)?;

    // step 4: rationalize and realize
    let delta = eps / Rat::from_integer(3.into());
    let rep = repair_operator(&t3, &ku, &kv, &delta)?;
    r.note(format!("step 4: δ = {delta}, repair {:?}", rep.mode));
    let (ku, kv) = if rep.mode == RepairMode::Unchanged {
        (ku, kv)
    } else {
        (rep.x.pinned.clone(), rep.y.pinned.clone())
    };
    let jx = px.j.with_spaces(px.j.domain().clone(), rep.t.domain().clone())?;
    let task = Task {
        t: rep.t.clone(),
        i: ku,
        j: kv,
        k: n,
    };
    let (out, real) = realize_on_demand(chain, &task, "g-witness")?;
    let m = out.last_index();
    let i_prime = real.i_prime.compose(&jx)?;
    let j_prime = real.j_prime.compose(&py.j)?;
    check_witness(&mut r, &out, t, x0, y0, seed, &i_prime, &j_prime, m, eps)?;
    Ok(GWitness {
        i_prime,
        j_prime,
        m,
        chain: out,
        report: r,
    })
}

#[allow(clippy::too_many_arguments)]
fn check_witness(
    r: &mut Report,
    chain: &Chain,
    t: &LinMap,
    x0: &LinMap,
    y0: &LinMap,
    seed: &WitnessSeed,
    i_prime: &LinMap,
    j_prime: &LinMap,
    m: usize,
    eps: &Rat,
) -> Result<()> {
    let fm = &chain.stages[m].f;
    r.identity("F_m∘i′ = j′∘T", fm.compose(i_prime)?.matrix() == j_prime.compose(t)?.matrix());
    let iu = chain.incl_u(seed.stage, m)?.compose(&seed.i)?;
    let jv = chain.incl_v(seed.stage, m)?.compose(&seed.j)?;
    r.lt("‖i′↾X0 − i‖ < ε", &map_distance(&i_prime.compose(x0)?, &iu)?, eps);
    r.lt("‖j′↾Y0 − j‖ < ε", &map_distance(&j_prime.compose(y0)?, &jv)?, eps);
    for (leg, name) in [(i_prime, "i′"), (j_prime, "j′")] {
        let c = classify_embedding(leg, eps)?;
        r.verdict(
            format!("{name} is an ε-embedding"),
            "ε-embedding",
            &format!("{:?} (lower {}, upper {})", c.verdict, c.lower, c.upper),
            c.verdict.is_eps(),
        );
    }
    Ok(())
}

/// An `ε`-embedding `f: X → U_m` (domain side) or `X → V_m` (codomain side)
/// extending `i: X0 → U_n` (resp. `V_n`) up to `ε`, via the (G*) witness.
pub fn space_witness(
    chain: &Chain,
    side: Side,
    x0: &LinMap,
    stage: usize,
    i: &LinMap,
    eps: &Rat,
) -> Result<(LinMap, GWitness)> {
    let st = chain.stages[stage].clone();
    let z: SpaceRef = Arc::new(Space::zero());
    let x = x0.codomain().clone();
    match side {
        Side::Domain => {
            let t0 = st.f.compose(i)?;
            let p = pushout(x0, &t0)?;
            let seed = WitnessSeed {
                stage,
                i: i.clone(),
                j: LinMap::identity(st.v.clone()),
            };
            let w = g_witness(chain, &p.g, x0, &p.j, &seed, eps)?;
            Ok((w.i_prime.clone(), w))
        }
        Side::Codomain => {
            let t = LinMap::zero(z.clone(), x);
            let seed = WitnessSeed {
                stage,
                i: LinMap::zero(z.clone(), st.u.clone()),
                j: i.clone(),
            };
            let w = g_witness(chain, &t, &LinMap::identity(z), x0, &seed, eps)?;
            Ok((w.j_prime.clone(), w))
        }
    }
}

/// An `ε`-embedding `i′: X → U_m` with `F_m∘i′ = 0`, extending
/// `i: X0 → ker F_n` up to `ε`.
pub fn kernel_witness(chain: &Chain, x0: &LinMap, stage: usize, i: &LinMap, eps: &Rat) -> Result<(LinMap, GWitness)> {
    let st = chain.stages[stage].clone();
    if !st.f.compose(i)?.matrix().is_zero() {
        return Err(Error::bound("F_n∘i = 0", "0", "nonzero"));
    }
    let z: SpaceRef = Arc::new(Space::zero());
    let t = LinMap::zero(x0.codomain().clone(), z.clone());
    let seed = WitnessSeed {
        stage,
        i: i.clone(),
        j: LinMap::zero(z.clone(), st.v.clone()),
    };
    let w = g_witness(chain, &t, x0, &LinMap::identity(z), &seed, eps)?;
    let mut w = w;
    let fm = &w.chain.stages[w.m].f;
    let zero = fm.compose(&w.i_prime)?.matrix().is_zero();
    w.report.identity("F_m∘i′ = 0", zero);
    Ok((w.i_prime.clone(), w))
}

/// A stage `m ≥ n` and `u ∈ U_m` with `F_m(u) = v`, for nonzero `v ∈ V_n`.
pub fn surjectivity_witness(chain: &Chain, stage: usize, v: &[Rat]) -> Result<(usize, QVec, Chain, Report)> {
    let st = chain.stages[stage].clone();
    if v.len() != st.v.dim() {
        return Err(Error::dim("v in V_n", st.v.dim(), v.len()));
    }
    if is_zero_vec(v) {
        return Err(Error::bound("v ≠ 0", "nonzero", "0"));
    }
    let mut r = Report::new();
    if let Some(u) = solve_linear(st.f.matrix(), v)? {
        r.identity("F_n(u) = v", st.f.apply(&u)? == v);
        return Ok((stage, u, chain.clone(), r));
    }
    let j = subspace(&st.v, &[v.to_vec()])?;
    let line = j.domain().clone();
    let z: SpaceRef = Arc::new(Space::zero());
    let seed = WitnessSeed {
        stage,
        i: LinMap::zero(z.clone(), st.u.clone()),
        j,
    };
    let id = LinMap::identity(line.clone());
    let w = g_witness(chain, &id, &LinMap::zero(z, line.clone()), &id, &seed, &Rat::one())?;
    r.extend(w.report);
    let u = w.i_prime.apply(&[Rat::one()])?;
    let mut padded = v.to_vec();
    padded.resize(w.chain.stages[w.m].v.dim(), Rat::zero());
    r.identity("F_m(u) = v", w.chain.stages[w.m].f.apply(&u)? == padded);
    Ok((w.m, u, w.chain, r))
}
