//! Rational polyhedral Banach spaces in standard coordinates and the linear
//! maps between them.

mod sums;

pub use sums::{l1_sum, quotient, span_subspace, subspace, L1Sum, Quotient};

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{dot, lp_solve, LpProblem, QMat, QVec, Rat, Relation, Sense};
use crate::polytope::{complete_representations, Ball};

/// A finite-dimensional normed space `(ℚ^dim, ‖·‖)` whose unit ball is a
/// rational symmetric polytope. The ball always carries both representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    ball: Ball,
}

pub type SpaceRef = Arc<Space>;

impl Space {
    pub fn new(ball: Ball) -> Result<Space> {
        Ok(Space {
            ball: complete_representations(&ball)?,
        })
    }

    pub fn shared(ball: Ball) -> Result<SpaceRef> {
        Space::new(ball).map(Arc::new)
    }

    pub fn zero() -> Space {
        Space {
            ball: Ball::zero_space(),
        }
    }

    pub fn l1(n: usize) -> Space {
        Space::new(Ball::l1(n)).expect("ℓ1 ball is a norm")
    }

    pub fn linf(n: usize) -> Space {
        Space::new(Ball::linf(n)).expect("ℓ∞ ball is a norm")
    }

    /// `(ℚ, |·|)`.
    pub fn line() -> Space {
        Space::l1(1)
    }

    pub fn dim(&self) -> usize {
        self.ball.dim()
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    /// Vertex representatives of the unit ball.
    pub fn vertices(&self) -> &[QVec] {
        self.ball.vrep().expect("space balls are complete")
    }

    /// Facet functionals: `‖x‖ = max |φ(x)|`.
    pub fn facets(&self) -> &[QVec] {
        self.ball.hrep().expect("space balls are complete")
    }

    /// The space with norm `factor · ‖·‖` (factor > 0).
    pub fn scaled(&self, factor: &Rat) -> Space {
        assert!(factor.is_positive(), "norm scale must be positive");
        let v = self.vertices().iter().map(|v| crate::exactlin::scale(v, &factor.recip())).collect();
        let h = self.facets().iter().map(|h| crate::exactlin::scale(h, factor)).collect();
        Space {
            ball: Ball::from_parts(self.dim(), Some(v), Some(h)).expect("dimensions preserved"),
        }
    }
}

/// A linear map between two spaces, given by its matrix in standard coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct LinMap {
    matrix: QMat,
    domain: SpaceRef,
    codomain: SpaceRef,
}

impl fmt::Debug for LinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinMap({}→{}: ", self.domain.dim(), self.codomain.dim())?;
        for i in 0..self.matrix.rows() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, ")")
    }
}

fn same_space(a: &SpaceRef, b: &SpaceRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl LinMap {
    pub fn new(matrix: QMat, domain: SpaceRef, codomain: SpaceRef) -> Result<LinMap> {
        if matrix.cols() != domain.dim() {
            return Err(Error::dim("map matrix columns", domain.dim(), matrix.cols()));
        }
        if matrix.rows() != codomain.dim() {
            return Err(Error::dim("map matrix rows", codomain.dim(), matrix.rows()));
        }
        Ok(LinMap {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn identity(space: SpaceRef) -> LinMap {
        LinMap {
            matrix: QMat::identity(space.dim()),
            domain: space.clone(),
            codomain: space,
        }
    }

    pub fn zero(domain: SpaceRef, codomain: SpaceRef) -> LinMap {
        LinMap {
            matrix: QMat::zeros(codomain.dim(), domain.dim()),
            domain,
            codomain,
        }
    }

    /// Inclusion of `domain` as the leading coordinates of `codomain`.
    pub fn leading_inclusion(domain: SpaceRef, codomain: SpaceRef) -> Result<LinMap> {
        if domain.dim() > codomain.dim() {
            return Err(Error::dim("leading inclusion", codomain.dim(), domain.dim()));
        }
        Ok(LinMap {
            matrix: QMat::leading_inclusion(codomain.dim(), domain.dim()),
            domain,
            codomain,
        })
    }

    pub fn matrix(&self) -> &QMat {
        &self.matrix
    }

    pub fn domain(&self) -> &SpaceRef {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceRef {
        &self.codomain
    }

    pub fn apply(&self, x: &[Rat]) -> Result<QVec> {
        self.matrix.apply(x)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinMap) -> Result<LinMap> {
        if !same_space(&inner.codomain, &self.domain) {
            return Err(Error::NotANorm(
                "composition of maps with mismatched middle spaces".into(),
            ));
        }
        Ok(LinMap {
            matrix: self.matrix.mul(&inner.matrix)?,
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
        })
    }

    /// `self − other`, for maps between the same spaces.
    pub fn sub(&self, other: &LinMap) -> Result<LinMap> {
        self.check_parallel(other)?;
        Ok(LinMap {
            matrix: self.matrix.sub(&other.matrix)?,
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
        })
    }

    pub fn scale(&self, s: &Rat) -> LinMap {
        LinMap {
            matrix: self.matrix.scale(s),
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
        }
    }

    /// Same matrix, new (equal-dimensional) spaces.
    pub fn with_spaces(&self, domain: SpaceRef, codomain: SpaceRef) -> Result<LinMap> {
        LinMap::new(self.matrix.clone(), domain, codomain)
    }

    fn check_parallel(&self, other: &LinMap) -> Result<()> {
        if !same_space(&self.domain, &other.domain) || !same_space(&self.codomain, &other.codomain) {
            return Err(Error::NotANorm("maps act between different spaces".into()));
        }
        Ok(())
    }

    /// Exact matrix equality with matching spaces.
    pub fn equals(&self, other: &LinMap) -> bool {
        self.check_parallel(other).is_ok() && self.matrix == other.matrix
    }
}

/// `‖x‖_X = max_φ |φ(x)|`.
pub fn norm_eval(x_space: &Space, x: &[Rat]) -> Result<Rat> {
    x_space.ball.norm(x)
}

/// `‖φ‖_{X*} = max_v |φ(v)|` over the unit-ball vertices.
pub fn dual_norm_eval(x_space: &Space, phi: &[Rat]) -> Result<Rat> {
    x_space.ball.dual_norm(phi)
}

/// Exact operator norm: the maximum of `‖Tv‖` over the domain's vertex representatives.
pub fn operator_norm(t: &LinMap) -> Rat {
    operator_norm_witness(t).0
}

/// Operator norm together with a vertex attaining it (`None` on a zero-dimensional domain).
pub fn operator_norm_witness(t: &LinMap) -> (Rat, Option<QVec>) {
    let mut best = Rat::zero();
    let mut arg = None;
    for v in t.domain.vertices() {
        let img = t.apply(v).expect("dimensions checked at construction");
        let n = norm_eval(&t.codomain, &img).expect("dimensions checked at construction");
        if arg.is_none() || n > best {
            best = n;
            arg = Some(v.clone());
        }
    }
    (best, arg)
}

/// `min ‖Tx‖` over the domain unit sphere, with a point of the sphere attaining it.
///
/// The sphere is the union of the facets `{φ(x) = 1, |ψ(x)| ≤ 1}`; on each one
/// the minimum of the polyhedral norm is an LP. Only one facet of each `±`
/// pair is visited since `‖T(−x)‖ = ‖Tx‖`. A zero-dimensional domain has an
/// empty sphere; the bound is then reported as 1.
pub fn lower_isometry_bound(t: &LinMap) -> Result<(Rat, Option<QVec>)> {
    let dom = &t.domain;
    let cod = &t.codomain;
    let n = dom.dim();
    if n == 0 {
        return Ok((Rat::one(), None));
    }
    let mut best: Option<(Rat, QVec)> = None;
    // rows of codomain functionals pulled back through T
    let pulled: Vec<QVec> = cod
        .facets()
        .iter()
        .map(|psi| (0..n).map(|j| dot(psi, &t.matrix.col(j))).collect())
        .collect();
    for phi in dom.facets() {
        // variables: x_0..x_{n-1}, t
        let mut obj = vec![Rat::zero(); n + 1];
        obj[n] = Rat::one();
        let mut p = LpProblem::new(obj, Sense::Min);
        let with_t = |row: &QVec, coef: Rat| {
            let mut r = row.clone();
            r.push(coef);
            r
        };
        for g in &pulled {
            let neg: QVec = g.iter().map(|x| -x).collect();
            p.constrain(with_t(&neg, Rat::one()), Relation::Ge, Rat::zero());
            p.constrain(with_t(g, Rat::one()), Relation::Ge, Rat::zero());
        }
        if pulled.is_empty() {
            p.constrain(with_t(&vec![Rat::zero(); n], Rat::one()), Relation::Ge, Rat::zero());
        }
        p.constrain(with_t(phi, Rat::zero()), Relation::Eq, Rat::one());
        for psi in dom.facets() {
            p.constrain(with_t(psi, Rat::zero()), Relation::Le, Rat::one());
            p.constrain(with_t(psi, Rat::zero()), Relation::Ge, -Rat::one());
        }
        let (val, pt) = lp_solve(&p)?.into_optimal()?;
        let x: QVec = pt[..n].to_vec();
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, x));
        }
    }
    let (v, x) = best.expect("a full-dimensional ball has facets");
    Ok((v, Some(x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Isometric,
    StrictEps,
    Eps,
    NotEps,
}

impl Verdict {
    /// True for every verdict that makes the map an ε-embedding.
    pub fn is_eps(self) -> bool {
        !matches!(self, Verdict::NotEps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingClass {
    pub lower: Rat,
    pub upper: Rat,
    pub verdict: Verdict,
}

/// Classifies `T` against `(1+ε)^{-1}‖x‖ ≤ ‖Tx‖ ≤ ‖x‖`.
///
/// Maps out of the zero space are vacuously isometric (`lower = upper = 1`).
pub fn classify_embedding(t: &LinMap, eps: &Rat) -> Result<EmbeddingClass> {
    if !eps.is_positive() {
        return Err(Error::bound("ε > 0", "positive", eps));
    }
    if t.domain.dim() == 0 {
        return Ok(EmbeddingClass {
            lower: Rat::one(),
            upper: Rat::one(),
            verdict: Verdict::Isometric,
        });
    }
    let upper = operator_norm(t);
    let lower = lower_bound_by_pullback(t)?;
    let threshold = (Rat::one() + eps).recip();
    let one = Rat::one();
    let verdict = if lower == one && upper == one {
        Verdict::Isometric
    } else if upper <= one && lower > threshold {
        Verdict::StrictEps
    } else if upper <= one && lower >= threshold {
        Verdict::Eps
    } else {
        Verdict::NotEps
    };
    Ok(EmbeddingClass {
        lower,
        upper,
        verdict,
    })
}

/// `min ‖Tx‖` over the unit sphere computed from the other side: for injective
/// `T` the pulled-back ball `{x : ‖Tx‖ ≤ 1}` is a polytope and the minimum is
/// `1 / max ‖v‖` over its vertices. Agrees with [`lower_isometry_bound`].
pub fn lower_bound_by_pullback(t: &LinMap) -> Result<Rat> {
    let n = t.domain.dim();
    if n == 0 {
        return Ok(Rat::one());
    }
    let pulled: Vec<QVec> = t
        .codomain
        .facets()
        .iter()
        .map(|psi| (0..n).map(|j| dot(psi, &t.matrix.col(j))).collect())
        .collect();
    if pulled.is_empty() || crate::exactlin::rank(&QMat::from_rows(pulled.clone(), n)?) < n {
        return Ok(Rat::zero());
    }
    let pullback = complete_representations(&Ball::from_hrep(n, pulled)?)?;
    let mut worst = Rat::zero();
    for v in pullback.vrep().expect("completed") {
        let nv = norm_eval(&t.domain, v)?;
        if nv > worst {
            worst = nv;
        }
    }
    Ok(worst.recip())
}

pub fn is_isometric(t: &LinMap) -> Result<bool> {
    if t.domain.dim() == 0 {
        return Ok(true);
    }
    Ok(operator_norm(t) == Rat::one() && lower_bound_by_pullback(t)? == Rat::one())
}

/// Smallest δ ≥ 0 such that `T` is a δ-embedding, or `None` if `T` expands
/// some vector or is not injective.
pub fn embedding_quality(t: &LinMap) -> Result<Option<Rat>> {
    if t.domain.dim() == 0 {
        return Ok(Some(Rat::zero()));
    }
    if operator_norm(t) > Rat::one() {
        return Ok(None);
    }
    let lower = lower_bound_by_pullback(t)?;
    if !lower.is_positive() {
        return Ok(None);
    }
    Ok(Some(lower.recip() - Rat::one()))
}

/// `‖S − T‖`.
pub fn map_distance(s: &LinMap, t: &LinMap) -> Result<Rat> {
    Ok(operator_norm(&s.sub(t)?))
}
