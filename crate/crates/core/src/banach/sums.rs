use std::sync::Arc;

use num_traits::Zero;

use super::{LinMap, Space, SpaceRef};
use crate::error::{Error, Result};
use crate::exactlin::{canonical_sign, concat, dot, echelon, neg, rank, PivotOrder, QMat, QVec, Rat};
use crate::polytope::{image_ball, Ball};

/// `X ⊕₁ Y` with its two coordinate embeddings.
#[derive(Clone, Debug)]
pub struct L1Sum {
    pub space: SpaceRef,
    pub inl: LinMap,
    pub inr: LinMap,
}

/// The ℓ1-sum. Facets of the free sum are the products `(φ, ±ψ)`.
pub fn l1_sum(x: &SpaceRef, y: &SpaceRef) -> L1Sum {
    let (n, m) = (x.dim(), y.dim());
    let space = if n == 0 {
        (**y).clone()
    } else if m == 0 {
        (**x).clone()
    } else {
        let zx = vec![Rat::zero(); n];
        let zy = vec![Rat::zero(); m];
        let mut vrep: Vec<QVec> = x.vertices().iter().map(|v| concat(v, &zy)).collect();
        vrep.extend(y.vertices().iter().map(|w| concat(&zx, w)));
        let mut hrep = Vec::new();
        for phi in x.facets() {
            for psi in y.facets() {
                hrep.push(concat(phi, psi));
                hrep.push(canonical_sign(concat(phi, &neg(psi))));
            }
        }
        Space {
            ball: Ball::from_parts(n + m, Some(vrep), Some(hrep)).expect("dimensions agree"),
        }
    };
    let space = Arc::new(space);
    let mut l = QMat::zeros(n + m, n);
    l.set_block(0, 0, &QMat::identity(n));
    let mut r = QMat::zeros(n + m, m);
    r.set_block(n, 0, &QMat::identity(m));
    L1Sum {
        inl: LinMap::new(l, x.clone(), space.clone()).expect("block shapes"),
        inr: LinMap::new(r, y.clone(), space.clone()).expect("block shapes"),
        space,
    }
}

/// `X / span(kernel)` realized on the complement coordinates.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: SpaceRef,
    pub q: LinMap,
    /// Right inverse of `q` placing a complement vector back in its coordinates.
    pub section: QMat,
    /// Coordinates eliminated by the kernel (rightmost pivots).
    pub pivots: Vec<usize>,
    /// Surviving coordinates, in ascending order.
    pub complement: Vec<usize>,
}

/// Quotient by the span of independent kernel vectors. Pivots are taken from
/// the rightmost coordinates, so leading coordinates survive whenever possible;
/// `q(v)` subtracts the kernel combination that clears the pivot coordinates
/// and keeps the rest.
pub fn quotient(x: &SpaceRef, kernel: &[QVec]) -> Result<Quotient> {
    let n = x.dim();
    for k in kernel {
        if k.len() != n {
            return Err(Error::dim("quotient kernel vector", n, k.len()));
        }
    }
    let kmat = QMat::from_rows(kernel.to_vec(), n)?;
    if rank(&kmat) != kernel.len() {
        return Err(Error::NotANorm("quotient kernel vectors are dependent".into()));
    }
    let ech = echelon(&kmat, PivotOrder::Rightmost);
    let pivots = ech.pivots.clone();
    let complement = ech.free_cols();
    let c = complement.len();
    let mut qm = QMat::zeros(c, n);
    let mut section = QMat::zeros(n, c);
    for (pos, &j) in complement.iter().enumerate() {
        qm.set_block(pos, j, &QMat::identity(1));
        section.set_block(j, pos, &QMat::identity(1));
    }
    for (row, &p) in ech.rows.iter().zip(&pivots) {
        for (pos, &j) in complement.iter().enumerate() {
            if !row[j].is_zero() {
                qm.set_block(pos, p, &QMat::from_rows(vec![vec![-row[j].clone()]], 1)?);
            }
        }
    }
    let space = if c == n {
        x.clone()
    } else if c == 0 {
        Arc::new(Space::zero())
    } else {
        Space::shared(image_ball(x.ball(), &qm)?)?
    };
    Ok(Quotient {
        q: LinMap::new(qm, x.clone(), space.clone())?,
        space,
        section,
        pivots,
        complement,
    })
}

/// The subspace spanned by independent `basis` vectors, carried on `ℚ^k` with
/// the restricted norm, together with its isometric embedding into `X`.
pub fn subspace(x: &SpaceRef, basis: &[QVec]) -> Result<LinMap> {
    let n = x.dim();
    let b = QMat::from_cols(basis, n)?;
    let k = basis.len();
    if rank(&b) != k {
        return Err(Error::NotANorm("subspace basis vectors are dependent".into()));
    }
    let space = if k == 0 {
        Arc::new(Space::zero())
    } else {
        let hrep: Vec<QVec> = x
            .facets()
            .iter()
            .map(|phi| (0..k).map(|j| dot(phi, &b.col(j))).collect())
            .collect();
        Space::shared(Ball::from_hrep(k, hrep)?)?
    };
    LinMap::new(b, space, x.clone())
}

/// The subspace spanned by any family of vectors: a maximal independent
/// subfamily (greedy, in order) is used as the basis.
pub fn span_subspace(x: &SpaceRef, vectors: &[QVec]) -> Result<LinMap> {
    let idx = crate::exactlin::column_basis(vectors, x.dim());
    let basis: Vec<QVec> = idx.into_iter().map(|i| vectors[i].clone()).collect();
    subspace(x, &basis)
}
