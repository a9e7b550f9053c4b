//! Amalgamation in the category of Banach spaces with nonexpansive maps:
//! pushouts, the ε-correction amalgam and the sum of a δ-commutative square.

mod correction;

pub use correction::{
    correction_norm_inf, correction_sum, mediating_map, square_sum, CorrectionResult, SquareSum,
};

use num_traits::One;

use crate::banach::{is_isometric, l1_sum, operator_norm, quotient, L1Sum, LinMap, SpaceRef};
use crate::error::{Error, Result};
use crate::exactlin::{column_basis, concat, neg, unit, QMat, QVec, Rat};

#[derive(Clone, Debug)]
pub struct PushoutResult {
    pub w: SpaceRef,
    pub g: LinMap,
    pub j: LinMap,
    pub delta_basis: Vec<QVec>,
    /// The quotient map `X ⊕₁ Y → W`.
    pub q: LinMap,
    /// A right inverse of `q` on coordinates.
    pub section: QMat,
    pub sum: L1Sum,
}

pub(crate) fn require_nonexpansive(t: &LinMap, name: &str) -> Result<()> {
    let n = operator_norm(t);
    if n > Rat::one() {
        return Err(Error::bound(format!("‖{name}‖ ≤ 1"), 1, n));
    }
    Ok(())
}

/// Pushout of `i: Z → X` and `f: Z → Y`: `W = (X ⊕₁ Y)/Δ` with
/// `Δ = {(i z, −f z)}`, and `g`, `j` the induced legs.
pub fn pushout(i: &LinMap, f: &LinMap) -> Result<PushoutResult> {
    if i.domain() != f.domain() {
        return Err(Error::NotANorm("pushout legs have different domains".into()));
    }
    require_nonexpansive(i, "i")?;
    require_nonexpansive(f, "f")?;
    let x = i.codomain();
    let y = f.codomain();
    let sum = l1_sum(x, y);
    let zdim = i.domain().dim();
    let gens: Vec<QVec> = (0..zdim)
        .map(|k| {
            let e = unit(zdim, k);
            concat(&i.apply(&e).expect("shape"), &neg(&f.apply(&e).expect("shape")))
        })
        .collect();
    let delta_basis: Vec<QVec> = column_basis(&gens, sum.space.dim())
        .into_iter()
        .map(|k| gens[k].clone())
        .collect();
    let quo = quotient(&sum.space, &delta_basis)?;
    let g = quo.q.compose(&sum.inl)?;
    let j = quo.q.compose(&sum.inr)?;
    if g.compose(i)?.matrix() != j.compose(f)?.matrix() {
        return Err(Error::bound("g∘i = j∘f", "equal", "differs"));
    }
    if is_isometric(i)? && !is_isometric(&j)? {
        return Err(Error::bound("j isometric when i is", "isometric", "not isometric"));
    }
    Ok(PushoutResult {
        w: quo.space.clone(),
        g,
        j,
        delta_basis,
        q: quo.q,
        section: quo.section,
        sum,
    })
}

/// The map `W_src → W_dst` induced by `a: X_src → X_dst` and `b: Y_src → Y_dst`,
/// i.e. `q_dst ∘ (a ⊕ b)` factored through `q_src`. Fails when `a ⊕ b` does not
/// carry `Δ_src` into `Δ_dst`.
pub fn induced_map(src: &PushoutResult, dst: &PushoutResult, a: &LinMap, b: &LinMap) -> Result<LinMap> {
    let ab = QMat::block_diag(a.matrix(), b.matrix());
    let through = dst.q.matrix().mul(&ab)?;
    let m = through.mul(&src.section)?;
    if m.mul(src.q.matrix())? != through {
        return Err(Error::bound("induced map respects Δ", "equal", "differs"));
    }
    LinMap::new(m, src.w.clone(), dst.w.clone())
}

/// For a competing cocone `g′: X → P`, `j′: Y → P` with `g′∘i = j′∘f`, the
/// unique map `W → P` through which it factors.
pub fn pushout_factor(p: &PushoutResult, g2: &LinMap, j2: &LinMap) -> Result<LinMap> {
    let h = QMat::hcat(g2.matrix(), j2.matrix())?;
    let m = h.mul(&p.section)?;
    if m.mul(p.q.matrix())? != h {
        return Err(Error::bound("g′∘i = j′∘f", "equal", "differs"));
    }
    LinMap::new(m, p.w.clone(), g2.codomain().clone())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::banach::{subspace, Space};
    use crate::exactlin::ivec;
    use crate::polytope::{symmetric_hull, Ball};

    #[test]
    fn pushout_over_zero() {
        let z = Arc::new(Space::zero());
        let x = Arc::new(Space::linf(2));
        let y = Arc::new(Space::line());
        let p = pushout(&LinMap::zero(z.clone(), x.clone()), &LinMap::zero(z, y.clone())).unwrap();
        let s = l1_sum(&x, &y);
        assert_eq!(*p.w, *s.space);
        assert_eq!(p.g.matrix(), s.inl.matrix());
        assert_eq!(p.j.matrix(), s.inr.matrix());
    }

    #[test]
    fn pushout_along_identity() {
        let x = Arc::new(Space::linf(2));
        let y = Arc::new(Space::l1(2));
        let f = LinMap::new(QMat::from_ratios(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 2)]]), x.clone(), y.clone()).unwrap();
        let p = pushout(&LinMap::identity(x), &f).unwrap();
        // Y-side coordinates are eliminated, so W lives on X's coordinates
        // and j is an isometric bijection Y → W
        assert_eq!(p.w.dim(), 2);
        assert!(is_isometric(&p.j).unwrap());
        assert_eq!(p.g.matrix(), &QMat::identity(2));
        assert_eq!(p.j.matrix().mul(f.matrix()).unwrap(), QMat::identity(2));
    }

    #[test]
    fn pushout_of_line_in_square() {
        let x = Arc::new(Space::linf(2));
        let i = subspace(&x, &[ivec(&[1, 0])]).unwrap();
        let z = i.domain().clone();
        let y = Arc::new(Space::line());
        let f = LinMap::identity(z.clone()).with_spaces(z, y).unwrap();
        let p = pushout(&i, &f).unwrap();
        assert_eq!(p.delta_basis, vec![ivec(&[1, 0, -1])]);
        assert_eq!(p.w.dim(), 2);
        assert!(is_isometric(&p.j).unwrap());
        let imgs: Vec<Ball> = [&p.g, &p.j]
            .iter()
            .map(|m| {
                let v = m.domain().vertices().iter().map(|v| m.apply(v).unwrap()).collect();
                Ball::from_vrep(2, v).unwrap()
            })
            .collect();
        assert_eq!(symmetric_hull(&imgs).unwrap(), *p.w.ball());
    }
}
