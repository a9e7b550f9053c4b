//! Centrally symmetric rational polytopes, used as unit balls.
//!
//! A ball is stored by representatives: the vertex set is `{±v : v ∈ vrep}`
//! and the facet functionals are `{±φ : φ ∈ hrep}`, with the ball equal to
//! `{x : |φ(x)| ≤ 1 for all φ}`. Representatives carry a canonical sign (first
//! nonzero coordinate positive) and are kept in lexicographic order.

mod dd;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{
    canonical_sign, dot, lp_solve, rank, LpProblem, QMat, QVec, Rat, Relation, Sense,
};

/// Largest ambient dimension the vertex/facet conversions accept.
pub const DIM_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    dim: usize,
    vrep: Option<Vec<QVec>>,
    hrep: Option<Vec<QVec>>,
}

fn canonical_set(dim: usize, vs: Vec<QVec>, what: &'static str) -> Result<Vec<QVec>> {
    let mut set = BTreeSet::new();
    for v in vs {
        if v.len() != dim {
            return Err(Error::dim(what, dim, v.len()));
        }
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        set.insert(canonical_sign(v));
    }
    Ok(set.into_iter().collect())
}

impl Ball {
    /// `conv{±v}` over the given vectors. Zero vectors and sign duplicates are dropped.
    pub fn from_vrep(dim: usize, vrep: Vec<QVec>) -> Result<Ball> {
        Ok(Ball {
            dim,
            vrep: Some(canonical_set(dim, vrep, "vrep entry")?),
            hrep: None,
        })
    }

    /// `{x : max |φ(x)| ≤ 1}` over the given functionals.
    pub fn from_hrep(dim: usize, hrep: Vec<QVec>) -> Result<Ball> {
        Ok(Ball {
            dim,
            vrep: None,
            hrep: Some(canonical_set(dim, hrep, "hrep entry")?),
        })
    }

    pub fn from_parts(dim: usize, vrep: Option<Vec<QVec>>, hrep: Option<Vec<QVec>>) -> Result<Ball> {
        if vrep.is_none() && hrep.is_none() {
            return Err(Error::NotANorm("ball has neither vrep nor hrep".into()));
        }
        Ok(Ball {
            dim,
            vrep: vrep.map(|v| canonical_set(dim, v, "vrep entry")).transpose()?,
            hrep: hrep.map(|h| canonical_set(dim, h, "hrep entry")).transpose()?,
        })
    }

    /// The unique ball of the zero space.
    pub fn zero_space() -> Ball {
        Ball {
            dim: 0,
            vrep: Some(Vec::new()),
            hrep: Some(Vec::new()),
        }
    }

    /// Unit ball of ℓ1 on ℚ^n.
    pub fn l1(n: usize) -> Ball {
        let vs = (0..n).map(|i| crate::exactlin::unit(n, i)).collect();
        Ball::from_vrep(n, vs).expect("unit vectors have the right length")
    }

    /// Unit ball of ℓ∞ on ℚ^n.
    pub fn linf(n: usize) -> Ball {
        let hs = (0..n).map(|i| crate::exactlin::unit(n, i)).collect();
        Ball::from_hrep(n, hs).expect("unit vectors have the right length")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vrep(&self) -> Option<&[QVec]> {
        self.vrep.as_deref()
    }

    pub fn hrep(&self) -> Option<&[QVec]> {
        self.hrep.as_deref()
    }

    pub fn is_complete(&self) -> bool {
        self.vrep.is_some() && self.hrep.is_some()
    }

    pub fn without_hrep(&self) -> Option<Ball> {
        self.vrep.as_ref().map(|v| Ball {
            dim: self.dim,
            vrep: Some(v.clone()),
            hrep: None,
        })
    }

    /// `max_φ |φ(x)|` over the facet functionals. Requires an hrep.
    pub fn norm(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.dim {
            return Err(Error::dim("norm argument", self.dim, x.len()));
        }
        let h = self
            .hrep
            .as_ref()
            .ok_or_else(|| Error::NotANorm("hrep missing; complete the ball first".into()))?;
        Ok(h.iter().map(|f| dot(f, x).abs()).max().unwrap_or_else(Rat::zero))
    }

    /// `max_v |φ(v)|` over the vertex representatives (the dual norm). Requires a vrep.
    pub fn dual_norm(&self, phi: &[Rat]) -> Result<Rat> {
        if phi.len() != self.dim {
            return Err(Error::dim("dual norm argument", self.dim, phi.len()));
        }
        let v = self
            .vrep
            .as_ref()
            .ok_or_else(|| Error::NotANorm("vrep missing; complete the ball first".into()))?;
        Ok(v.iter().map(|p| dot(phi, p).abs()).max().unwrap_or_else(Rat::zero))
    }

    /// Minkowski gauge of `x` computed from the vertices alone, by the LP
    /// `min Σλᵢ s.t. x = Σμᵢvᵢ, |μᵢ| ≤ λᵢ`. Independent of the hrep.
    pub fn gauge_from_vertices(&self, x: &[Rat]) -> Result<Rat> {
        if x.len() != self.dim {
            return Err(Error::dim("gauge argument", self.dim, x.len()));
        }
        let vs = self
            .vrep
            .as_ref()
            .ok_or_else(|| Error::NotANorm("vrep missing".into()))?;
        if self.dim == 0 {
            return Ok(Rat::zero());
        }
        let k = vs.len();
        // variables: μ_0..μ_{k-1}, λ_0..λ_{k-1}
        let mut obj = vec![Rat::zero(); 2 * k];
        for o in obj.iter_mut().skip(k) {
            *o = Rat::one();
        }
        let mut p = LpProblem::new(obj, Sense::Min);
        for i in 0..k {
            let mut a = vec![Rat::zero(); 2 * k];
            a[k + i] = Rat::one();
            a[i] = -Rat::one();
            p.constrain(a.clone(), Relation::Ge, Rat::zero());
            a[i] = Rat::one();
            p.constrain(a, Relation::Ge, Rat::zero());
        }
        for (c, xc) in x.iter().enumerate() {
            let mut a = vec![Rat::zero(); 2 * k];
            for (i, v) in vs.iter().enumerate() {
                a[i] = v[c].clone();
            }
            p.constrain(a, Relation::Eq, xc.clone());
        }
        Ok(lp_solve(&p)?.value()?.clone())
    }

    /// Maximizes `φ` over the H-polytope `{x : |ψ(x)| ≤ 1}`. Requires an hrep.
    fn support_over_hrep(&self, phi: &[Rat]) -> Result<Rat> {
        let hs = self.hrep.as_ref().expect("caller checked hrep");
        let mut p = LpProblem::new(phi.to_vec(), Sense::Max);
        for h in hs {
            p.constrain(h.clone(), Relation::Le, Rat::one());
            p.constrain(h.clone(), Relation::Ge, -Rat::one());
        }
        Ok(lp_solve(&p)?.value()?.clone())
    }
}

/// Computes both representations, irredundant and canonically ordered.
/// Idempotent. When both are supplied they are checked to describe the same
/// set by mutual containment.
pub fn complete_representations(b: &Ball) -> Result<Ball> {
    let dim = b.dim;
    if dim == 0 {
        return Ok(Ball::zero_space());
    }
    if dim > DIM_CAP {
        return Err(Error::CapExceeded {
            cap: DIM_CAP,
            needed: dim,
            what: "ball dimension".into(),
        });
    }
    if let Some(vs) = &b.vrep {
        if vs.is_empty() || rank(&QMat::from_rows(vs.clone(), dim)?) < dim {
            return Err(Error::NotANorm("vertex representatives do not span".into()));
        }
        let hrep = dd::symmetric_vertices(vs, dim)?;
        let vrep = dd::symmetric_vertices(&hrep, dim)?;
        if let Some(given) = &b.hrep {
            // conv(V) ⊆ H-set
            for v in &vrep {
                for g in given {
                    if dot(g, v).abs() > Rat::one() {
                        return Err(Error::NotANorm(
                            "vrep and hrep describe different sets (vertex outside hrep)".into(),
                        ));
                    }
                }
            }
            // H-set ⊆ conv(V)
            let hb = Ball {
                dim,
                vrep: None,
                hrep: Some(given.clone()),
            };
            if rank(&QMat::from_rows(given.clone(), dim)?) < dim {
                return Err(Error::NotANorm("hrep functionals do not separate".into()));
            }
            for f in &hrep {
                if hb.support_over_hrep(f)? > Rat::one() {
                    return Err(Error::NotANorm(
                        "vrep and hrep describe different sets (hrep region larger)".into(),
                    ));
                }
            }
        }
        return Ok(Ball {
            dim,
            vrep: Some(vrep),
            hrep: Some(hrep),
        });
    }
    let hs = b.hrep.as_ref().expect("ball has a representation");
    let vrep = dd::symmetric_vertices(hs, dim)?;
    let hrep = dd::symmetric_vertices(&vrep, dim)?;
    Ok(Ball {
        dim,
        vrep: Some(vrep),
        hrep: Some(hrep),
    })
}

/// Exact linear image `A(b)`; `A` must map onto its codomain.
pub fn image_ball(b: &Ball, a: &QMat) -> Result<Ball> {
    if a.cols() != b.dim {
        return Err(Error::dim("image_ball matrix columns", b.dim, a.cols()));
    }
    let vs = match &b.vrep {
        Some(v) => v.clone(),
        None => complete_representations(b)?.vrep.expect("completed"),
    };
    if rank(a) < a.rows() {
        return Err(Error::NotANorm(
            "linear image is not full-dimensional".into(),
        ));
    }
    let imgs = vs
        .iter()
        .map(|v| a.apply(v))
        .collect::<Result<Vec<_>>>()?;
    complete_representations(&Ball::from_vrep(a.rows(), imgs)?)
}

/// Convex hull of the union of the given balls (all in the same dimension).
pub fn symmetric_hull(parts: &[Ball]) -> Result<Ball> {
    let dim = parts
        .first()
        .map(|p| p.dim)
        .ok_or_else(|| Error::NotANorm("hull of no parts".into()))?;
    let mut all = Vec::new();
    for p in parts {
        if p.dim != dim {
            return Err(Error::dim("symmetric_hull part", dim, p.dim));
        }
        match &p.vrep {
            Some(v) => all.extend(v.iter().cloned()),
            None => all.extend(complete_representations(p)?.vrep.expect("completed")),
        }
    }
    if dim == 0 {
        return Ok(Ball::zero_space());
    }
    complete_representations(&Ball::from_vrep(dim, all)?)
}
