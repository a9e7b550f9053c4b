//! Norm repair for rational spaces: exact Hahn–Banach extension of
//! functionals, δ-equivalent renorming that keeps a subspace isometric, and
//! renorming that makes a slightly expansive operator nonexpansive.
//!
//! All norms here are already rational in standard coordinates, so no
//! approximation step is needed; the constructions reduce to LPs and rescaling.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::banach::{dual_norm_eval, is_isometric, norm_eval, operator_norm, LinMap, Space, SpaceRef};
use crate::error::{Error, Result};
use crate::exactlin::{dot, lp_solve, max_rat, scale, solve_linear, LpProblem, QMat, QVec, Rat, Relation, Sense};
use crate::polytope::Ball;

#[derive(Clone, Debug)]
pub struct NormRepair {
    pub original: SpaceRef,
    pub repaired: SpaceRef,
    pub delta: Rat,
    /// The pinned inclusion, with the repaired space as codomain.
    pub pinned: LinMap,
}

/// Smallest `δ ≥ 0` with `(1+δ)⁻¹‖x‖_b ≤ ‖x‖_a ≤ (1+δ)‖x‖_b` for all `x`.
/// Both ratios are maximized at vertices of the respective unit balls.
pub fn equivalence_delta(a: &Space, b: &Space) -> Result<Rat> {
    if a.dim() != b.dim() {
        return Err(Error::dim("norm equivalence", a.dim(), b.dim()));
    }
    let mut vals = Vec::new();
    for v in a.vertices() {
        vals.push(norm_eval(b, v)?);
    }
    for v in b.vertices() {
        vals.push(norm_eval(a, v)?);
    }
    let worst = max_rat(vals.iter()).unwrap_or_else(Rat::one);
    Ok((worst - Rat::one()).max(Rat::zero()))
}

fn require_isometric(t: &LinMap, name: &str) -> Result<()> {
    if !is_isometric(t)? {
        return Err(Error::bound(format!("{name} isometric"), "isometric", "not isometric"));
    }
    Ok(())
}

/// A norm-minimal extension `ψ` of `φ` along `incl: X → Y`, i.e. `ψ∘incl = φ`
/// with `‖ψ‖_{Y*} = ‖φ‖_{X*}`.
pub fn extend_functional(phi: &[Rat], incl: &LinMap) -> Result<QVec> {
    let x = incl.domain();
    let y = incl.codomain();
    if phi.len() != x.dim() {
        return Err(Error::dim("functional", x.dim(), phi.len()));
    }
    require_isometric(incl, "incl")?;
    let m = y.dim();
    if m == 0 {
        return Ok(Vec::new());
    }
    // variables: ψ (m), s
    let mut obj = vec![Rat::zero(); m + 1];
    obj[m] = Rat::one();
    let mut p = LpProblem::new(obj, Sense::Min);
    for (k, target) in phi.iter().enumerate() {
        let mut row = incl.matrix().col(k);
        row.push(Rat::zero());
        p.constrain(row, Relation::Eq, target.clone());
    }
    for v in y.vertices() {
        let mut row = v.clone();
        row.push(-Rat::one());
        p.constrain(row.clone(), Relation::Le, Rat::zero());
        row[m] = Rat::one();
        p.constrain(row, Relation::Ge, Rat::zero());
    }
    let (_, point) = lp_solve(&p)?.into_optimal()?;
    let psi: QVec = point[..m].to_vec();
    let want = dual_norm_eval(x, phi)?;
    let got = dual_norm_eval(y, &psi)?;
    if got != want {
        return Err(Error::bound("‖ψ‖_{Y*} = ‖φ‖_{X*}", want, got));
    }
    Ok(psi)
}

/// Renorms `Y` by the extensions of `X`'s facet functionals together with
/// `Y`'s own functionals scaled by `(1+δ)⁻¹`. The result is δ-equivalent to
/// the original and restricts to the original norm on `X`.
pub fn repair_norm(y: &SpaceRef, incl: &LinMap, delta: &Rat) -> Result<NormRepair> {
    if !delta.is_positive() {
        return Err(Error::bound("δ > 0", "positive", delta));
    }
    if incl.codomain() != y {
        return Err(Error::NotANorm("inclusion does not land in the repaired space".into()));
    }
    require_isometric(incl, "incl")?;
    let shrink = (Rat::one() + delta).recip();
    let mut hrep: Vec<QVec> = Vec::new();
    for phi in incl.domain().facets() {
        hrep.push(extend_functional(phi, incl)?);
    }
    hrep.extend(y.facets().iter().map(|psi| scale(psi, &shrink)));
    let repaired = if y.dim() == 0 {
        Arc::new(Space::zero())
    } else {
        Space::shared(Ball::from_hrep(y.dim(), hrep)?)?
    };
    let pinned = incl.with_spaces(incl.domain().clone(), repaired.clone())?;
    require_isometric(&pinned, "pinned inclusion")?;
    let d = equivalence_delta(&repaired, y)?;
    if d > *delta {
        return Err(Error::bound("‖·‖′ δ-equivalent to ‖·‖", delta, d));
    }
    Ok(NormRepair {
        original: y.clone(),
        repaired,
        delta: delta.clone(),
        pinned,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairMode {
    /// `T` was already nonexpansive.
    Unchanged,
    /// The domain norm was multiplied by `(1+δ)²`.
    Rescaled,
    /// The domain norm became `max(‖x‖, ‖Tx‖)`, which keeps a nonzero `X0` pinned.
    MaxNorm,
}

#[derive(Clone, Debug)]
pub struct OperatorRepair {
    pub x: NormRepair,
    pub y: NormRepair,
    pub t: LinMap,
    /// `(1+δ)² − 1`.
    pub eps: Rat,
    pub mode: RepairMode,
}

fn unchanged(space: &SpaceRef, pinned: &LinMap, eps: &Rat) -> NormRepair {
    NormRepair {
        original: space.clone(),
        repaired: space.clone(),
        delta: eps.clone(),
        pinned: pinned.clone(),
    }
}

/// Makes `T: X → Y` nonexpansive by renorming its domain, keeping the
/// isometric embeddings `i0: X0 → X`, `j0: Y0 → Y` isometric. Requires
/// `‖T‖ ≤ (1+δ)²` and `T∘i0 = j0∘T0` for a nonexpansive `T0`.
///
/// The rescale by `(1+δ)²` would shrink a nonzero `X0`, so in that case the
/// domain norm is replaced by `max(‖x‖, ‖Tx‖)` instead; on `X0` this equals
/// `‖x‖` because `T0` is nonexpansive.
pub fn repair_operator(t: &LinMap, i0: &LinMap, j0: &LinMap, delta: &Rat) -> Result<OperatorRepair> {
    if !delta.is_positive() {
        return Err(Error::bound("δ > 0", "positive", delta));
    }
    if i0.codomain() != t.domain() || j0.codomain() != t.codomain() {
        return Err(Error::NotANorm("pinned embeddings do not land in the operator's spaces".into()));
    }
    require_isometric(i0, "i0")?;
    require_isometric(j0, "j0")?;
    let t0 = restricted_operator(t, i0, j0)?;
    let n0 = operator_norm(&t0);
    if n0 > Rat::one() {
        return Err(Error::bound("‖T0‖ ≤ 1", 1, n0));
    }
    let growth = (Rat::one() + delta) * (Rat::one() + delta);
    let eps = &growth - Rat::one();
    let norm = operator_norm(t);
    if norm > growth {
        return Err(Error::bound("‖T‖ ≤ (1+δ)²", &growth, norm));
    }
    let x = t.domain();
    let (mode, xr) = if norm <= Rat::one() {
        (RepairMode::Unchanged, x.clone())
    } else if i0.domain().dim() == 0 {
        (RepairMode::Rescaled, Arc::new(x.scaled(&growth)))
    } else {
        let mut hrep = x.facets().to_vec();
        for psi in t.codomain().facets() {
            let pulled: QVec = (0..x.dim()).map(|k| dot(psi, &t.matrix().col(k))).collect();
            if pulled.iter().any(|c| !c.is_zero()) {
                hrep.push(pulled);
            }
        }
        (RepairMode::MaxNorm, Space::shared(Ball::from_hrep(x.dim(), hrep)?)?)
    };
    let t2 = t.with_spaces(xr.clone(), t.codomain().clone())?;
    let n2 = operator_norm(&t2);
    if n2 > Rat::one() {
        return Err(Error::bound("‖T′‖ ≤ 1", 1, n2));
    }
    let pinned_x = i0.with_spaces(i0.domain().clone(), xr.clone())?;
    require_isometric(&pinned_x, "X0 ⊆ X′")?;
    let d = equivalence_delta(&xr, x)?;
    if d > eps {
        return Err(Error::bound("‖·‖′_X ε-equivalent to ‖·‖_X", &eps, d));
    }
    Ok(OperatorRepair {
        x: NormRepair {
            original: x.clone(),
            repaired: xr,
            delta: eps.clone(),
            pinned: pinned_x,
        },
        y: unchanged(t.codomain(), j0, &eps),
        t: t2,
        eps,
        mode,
    })
}

/// The operator `T0: X0 → Y0` with `j0∘T0 = T∘i0`, if it exists.
pub fn restricted_operator(t: &LinMap, i0: &LinMap, j0: &LinMap) -> Result<LinMap> {
    let ti = t.matrix().mul(i0.matrix())?;
    let mut cols = Vec::with_capacity(ti.cols());
    for k in 0..ti.cols() {
        match solve_linear(j0.matrix(), &ti.col(k))? {
            Some(c) => cols.push(c),
            None => return Err(Error::bound("T(X0) ⊆ j0(Y0)", "contained", "not contained")),
        }
    }
    LinMap::new(
        QMat::from_cols(&cols, j0.domain().dim())?,
        i0.domain().clone(),
        j0.domain().clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banach::subspace;
    use crate::exactlin::{int, ivec, rat};

    #[test]
    fn extension_examples() {
        let x = Arc::new(Space::linf(2));
        let id = LinMap::identity(x.clone());
        assert_eq!(extend_functional(&ivec(&[1, 2]), &id).unwrap(), ivec(&[1, 2]));
        assert_eq!(extend_functional(&ivec(&[0, 0]), &id).unwrap(), ivec(&[0, 0]));
        let line = subspace(&x, &[ivec(&[1, 0])]).unwrap();
        assert_eq!(extend_functional(&ivec(&[1]), &line).unwrap(), ivec(&[1, 0]));
    }

    #[test]
    fn repair_identity_is_trivial() {
        let y = Arc::new(Space::l1(2));
        let r = repair_norm(&y, &LinMap::identity(y.clone()), &rat(1, 4)).unwrap();
        assert_eq!(*r.repaired, *y);
    }

    #[test]
    fn repair_over_zero_scales() {
        let y = Arc::new(Space::l1(2));
        let z = LinMap::zero(Arc::new(Space::zero()), y.clone());
        let r = repair_norm(&y, &z, &rat(1, 4)).unwrap();
        assert_eq!(*r.repaired, y.scaled(&rat(4, 5)));
    }

    #[test]
    fn repair_pins_line_in_l1() {
        let y = Arc::new(Space::l1(2));
        let incl = subspace(&y, &[ivec(&[1, 0])]).unwrap();
        let r = repair_norm(&y, &incl, &rat(1, 4)).unwrap();
        assert_eq!(norm_eval(&r.repaired, &ivec(&[1, 0])).unwrap(), int(1));
        for v in y.vertices() {
            let n = norm_eval(&r.repaired, v).unwrap();
            assert!(n >= rat(4, 5) && n <= rat(5, 4));
        }
    }

    #[test]
    fn repair_operator_rescale() {
        let l = Arc::new(Space::line());
        let t = LinMap::identity(l.clone()).scale(&rat(6, 5));
        let z = Arc::new(Space::zero());
        let r = repair_operator(&t, &LinMap::zero(z.clone(), l.clone()), &LinMap::zero(z, l.clone()), &rat(1, 5)).unwrap();
        assert_eq!(r.mode, RepairMode::Rescaled);
        assert_eq!(*r.x.repaired, l.scaled(&rat(36, 25)));
        assert_eq!(operator_norm(&r.t), rat(5, 6));
        assert_eq!(r.eps, rat(11, 25));
    }

    #[test]
    fn repair_operator_unchanged() {
        let x = Arc::new(Space::linf(2));
        let id = LinMap::identity(x.clone());
        let r = repair_operator(&id, &id, &id, &rat(1, 4)).unwrap();
        assert_eq!(r.mode, RepairMode::Unchanged);
        assert_eq!(*r.x.repaired, *x);
    }

    #[test]
    fn repair_operator_keeps_pin() {
        let x = Arc::new(Space::linf(2));
        let y = Arc::new(Space::linf(2));
        // expands e2 slightly, fixes e1
        let t = LinMap::new(QMat::from_ratios(&[&[(1, 1), (0, 1)], &[(0, 1), (9, 8)]]), x.clone(), y.clone()).unwrap();
        let i0 = subspace(&x, &[ivec(&[1, 0])]).unwrap();
        let j0 = subspace(&y, &[ivec(&[1, 0])]).unwrap();
        let r = repair_operator(&t, &i0, &j0, &rat(1, 4)).unwrap();
        assert_eq!(r.mode, RepairMode::MaxNorm);
        assert!(operator_norm(&r.t) <= int(1));
        assert!(equivalence_delta(&r.x.repaired, &x).unwrap() <= r.eps);
    }

    #[test]
    fn repair_operator_too_large() {
        let l = Arc::new(Space::line());
        let t = LinMap::identity(l.clone()).scale(&int(2));
        let z = Arc::new(Space::zero());
        assert!(repair_operator(&t, &LinMap::zero(z.clone(), l.clone()), &LinMap::zero(z, l), &rat(1, 5)).is_err());
    }
}
