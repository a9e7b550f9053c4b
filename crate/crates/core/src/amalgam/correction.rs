use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::require_nonexpansive;
use crate::banach::{
    classify_embedding, is_isometric, lower_isometry_bound, map_distance, operator_norm, LinMap,
    Space, SpaceRef,
};
use crate::error::{Error, Result};
use crate::exactlin::{concat, lp_solve, neg, scale, LpProblem, QMat, QVec, Rat, Relation, Sense};
use crate::polytope::Ball;

/// `X ⊕_{(f,ε)} Y` with its canonical isometric legs.
#[derive(Clone, Debug)]
pub struct CorrectionResult {
    pub z0: SpaceRef,
    pub ix: LinMap,
    pub jy: LinMap,
    pub eps: Rat,
    pub f: LinMap,
}

/// The correction amalgam: the unit ball is the hull of `ball X × 0`,
/// `0 × ball Y` and the points `(w, −f w)` with `w = v/ε` over the vertex
/// representatives `v` of `X`.
///
/// `f` must be nonexpansive. For `ε < 1` it must also satisfy
/// `‖f x‖ ≥ (1−ε)‖x‖`, which is what makes `i_X` isometric; ε-embeddings
/// always qualify.
pub fn correction_sum(f: &LinMap, eps: &Rat) -> Result<CorrectionResult> {
    if !eps.is_positive() {
        return Err(Error::bound("ε > 0", "positive", eps));
    }
    require_nonexpansive(f, "f")?;
    let x = f.domain().clone();
    let y = f.codomain().clone();
    let (n, m) = (x.dim(), y.dim());
    if *eps < Rat::one() && n > 0 {
        let (lower, _) = lower_isometry_bound(f)?;
        let floor = Rat::one() - eps;
        if lower < floor {
            return Err(Error::bound("‖f(x)‖ ≥ (1−ε)‖x‖", floor, lower));
        }
    }
    let z0 = if n + m == 0 {
        Arc::new(Space::zero())
    } else {
        let zx = vec![Rat::zero(); n];
        let zy = vec![Rat::zero(); m];
        let inv = eps.recip();
        let mut vrep: Vec<QVec> = Vec::new();
        for v in x.vertices() {
            vrep.push(concat(v, &zy));
            let fv = f.apply(v)?;
            vrep.push(scale(&concat(v, &neg(&fv)), &inv));
        }
        vrep.extend(y.vertices().iter().map(|w| concat(&zx, w)));
        Space::shared(Ball::from_vrep(n + m, vrep)?)?
    };
    let mut l = QMat::zeros(n + m, n);
    l.set_block(0, 0, &QMat::identity(n));
    let mut r = QMat::zeros(n + m, m);
    r.set_block(n, 0, &QMat::identity(m));
    let ix = LinMap::new(l, x, z0.clone())?;
    let jy = LinMap::new(r, y, z0.clone())?;
    if !is_isometric(&ix)? {
        return Err(Error::bound("i_X isometric", "isometric", "not isometric"));
    }
    if !is_isometric(&jy)? {
        return Err(Error::bound("j_Y isometric", "isometric", "not isometric"));
    }
    let d = map_distance(&ix, &jy.compose(f)?)?;
    if d > *eps {
        return Err(Error::bound("‖i_X − j_Y∘f‖ ≤ ε", eps, d));
    }
    Ok(CorrectionResult {
        z0,
        ix,
        jy,
        eps: eps.clone(),
        f: f.clone(),
    })
}

/// `inf{‖x‖ + ‖y‖ + ε‖w‖ : v = (x + w, y − f w)}` as an exact LP.
pub fn correction_norm_inf(c: &CorrectionResult, v: &[Rat]) -> Result<Rat> {
    let x = c.f.domain();
    let y = c.f.codomain();
    let (n, m) = (x.dim(), y.dim());
    if v.len() != n + m {
        return Err(Error::dim("correction_norm_inf vector", n + m, v.len()));
    }
    // variables: x (n), w (n), y (m), a, b, t
    let nv = 2 * n + m + 3;
    let (ia, ib, it) = (2 * n + m, 2 * n + m + 1, 2 * n + m + 2);
    let mut obj = vec![Rat::zero(); nv];
    obj[ia] = Rat::one();
    obj[ib] = Rat::one();
    obj[it] = c.eps.clone();
    let mut p = LpProblem::new(obj, Sense::Min);
    for k in 0..n {
        let mut row = vec![Rat::zero(); nv];
        row[k] = Rat::one();
        row[n + k] = Rat::one();
        p.constrain(row, Relation::Eq, v[k].clone());
    }
    for r in 0..m {
        let mut row = vec![Rat::zero(); nv];
        row[2 * n + r] = Rat::one();
        for k in 0..n {
            let a = &c.f.matrix()[(r, k)];
            if !a.is_zero() {
                row[n + k] = -a.clone();
            }
        }
        p.constrain(row, Relation::Eq, v[n + r].clone());
    }
    let mut epi = |offset: usize, fun: &[Rat], slot: usize| {
        for sgn in [Rat::one(), -Rat::one()] {
            let mut row = vec![Rat::zero(); nv];
            for (k, a) in fun.iter().enumerate() {
                row[offset + k] = -(a * &sgn);
            }
            row[slot] = Rat::one();
            p.constrain(row, Relation::Ge, Rat::zero());
        }
    };
    for phi in x.facets() {
        epi(0, phi, ia);
        epi(n, phi, it);
    }
    for psi in y.facets() {
        epi(2 * n, psi, ib);
    }
    for slot in [ia, ib, it] {
        let mut row = vec![Rat::zero(); nv];
        row[slot] = Rat::one();
        p.constrain(row, Relation::Ge, Rat::zero());
    }
    Ok(lp_solve(&p)?.value()?.clone())
}

/// `h(x, y) = i(x) + j(y)`, the unique arrow out of the initial object.
pub fn mediating_map(c: &CorrectionResult, i: &LinMap, j: &LinMap) -> Result<LinMap> {
    if i.domain() != c.f.domain() || j.domain() != c.f.codomain() {
        return Err(Error::NotANorm("mediating pair has the wrong domains".into()));
    }
    if i.codomain() != j.codomain() {
        return Err(Error::NotANorm("mediating pair has different codomains".into()));
    }
    require_nonexpansive(i, "i")?;
    require_nonexpansive(j, "j")?;
    let d = map_distance(i, &j.compose(&c.f)?)?;
    if d > c.eps {
        return Err(Error::bound("‖i − j∘f‖ ≤ ε", &c.eps, d));
    }
    let h = LinMap::new(QMat::hcat(i.matrix(), j.matrix())?, c.z0.clone(), i.codomain().clone())?;
    require_nonexpansive(&h, "h")?;
    if !h.compose(&c.ix)?.equals(i) || !h.compose(&c.jy)?.equals(j) {
        return Err(Error::bound("h∘i_X = i and h∘j_Y = j", "equal", "differs"));
    }
    Ok(h)
}

/// `T0 ⊕ T1` between correction amalgams.
#[derive(Clone, Debug)]
pub struct SquareSum {
    pub map: LinMap,
    pub domain: CorrectionResult,
    pub codomain: CorrectionResult,
}

/// For a δ-commutative square `f1∘T0 ≈ T1∘f0` with ε-embeddings `f0`, `f1`,
/// the block map `T0 ⊕ T1: X0 ⊕_{(f0,ε+δ)} Y0 → X1 ⊕_{(f1,ε)} Y1`.
pub fn square_sum(
    t0: &LinMap,
    t1: &LinMap,
    f0: &LinMap,
    f1: &LinMap,
    eps: &Rat,
    delta: &Rat,
) -> Result<SquareSum> {
    require_nonexpansive(t0, "T0")?;
    require_nonexpansive(t1, "T1")?;
    if delta.is_negative() {
        return Err(Error::bound("δ ≥ 0", "nonnegative", delta));
    }
    for (f, name) in [(f0, "f0"), (f1, "f1")] {
        let c = classify_embedding(f, eps)?;
        if !c.verdict.is_eps() {
            return Err(Error::bound(
                format!("{name} is an ε-embedding: lower ≥ (1+ε)⁻¹, upper ≤ 1"),
                format!("{} / 1", (Rat::one() + eps).recip()),
                format!("{} / {}", c.lower, c.upper),
            ));
        }
    }
    let defect = map_distance(&f1.compose(t0)?, &t1.compose(f0)?)?;
    if defect > *delta {
        return Err(Error::bound("‖f1∘T0 − T1∘f0‖ ≤ δ", delta, defect));
    }
    let domain = correction_sum(f0, &(eps + delta))?;
    let codomain = correction_sum(f1, eps)?;
    let map = LinMap::new(
        QMat::block_diag(t0.matrix(), t1.matrix()),
        domain.z0.clone(),
        codomain.z0.clone(),
    )?;
    let n = operator_norm(&map);
    if n > Rat::one() {
        return Err(Error::bound("‖T0 ⊕ T1‖ ≤ 1", 1, n));
    }
    if !map.compose(&domain.ix)?.equals(&codomain.ix.compose(t0)?)
        || !map.compose(&domain.jy)?.equals(&codomain.jy.compose(t1)?)
    {
        return Err(Error::bound("(T0⊕T1)∘i_X0 = i_X1∘T0, (T0⊕T1)∘j_Y0 = j_Y1∘T1", "equal", "differs"));
    }
    Ok(SquareSum {
        map,
        domain,
        codomain,
    })
}
