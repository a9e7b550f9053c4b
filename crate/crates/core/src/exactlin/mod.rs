//! Exact rational scalars, vectors, matrices, linear systems and linear programs.
//!
//! Every quantity in the crate is a [`Rat`]; there is no floating point anywhere.

mod linalg;
mod lp;
mod matrix;

pub use linalg::{column_basis, echelon, kernel_basis, rank, solve_linear, Echelon, PivotOrder};
pub use lp::{lp_solve, LpOutcome, LpProblem, Relation, Sense};
pub use matrix::QMat;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exact rational scalar. Always stored in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// Exact rational vector.
pub type QVec = Vec<Rat>;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

pub fn zeros(n: usize) -> QVec {
    vec![Rat::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

pub fn qvec(entries: &[(i64, i64)]) -> QVec {
    entries.iter().map(|&(p, q)| rat(p, q)).collect()
}

pub fn ivec(entries: &[i64]) -> QVec {
    entries.iter().map(|&p| int(p)).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rat], s: &Rat) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Rat]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Rat]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Concatenates two vectors.
pub fn concat(a: &[Rat], b: &[Rat]) -> QVec {
    a.iter().chain(b).cloned().collect()
}

/// Flips the sign so the first nonzero coordinate is positive.
pub fn canonical_sign(v: QVec) -> QVec {
    match v.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => neg(&v),
        _ => v,
    }
}

/// Lexicographic comparison of equal-length rational vectors.
pub fn lex_cmp(a: &[Rat], b: &[Rat]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Formats as `p/q`, dropping `/1`.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// Parses `p/q` or `p`. Zero denominators and malformed text are errors.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let err = |msg: &str| Error::Parse {
        at: format!("rational \"{s}\""),
        msg: msg.to_string(),
    };
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(p).map_err(|_| err("malformed numerator"))?;
    let den = BigInt::from_str(q).map_err(|_| err("malformed denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rat::new(num, den))
}

/// Number of bits of |n|, with `bitlen(0) = 0`.
pub fn bitlen(n: &BigInt) -> u64 {
    n.bits()
}

/// Size of a rational in bits: numerator bits + denominator bits - 1, plus one for a sign.
pub fn rat_bits(r: &Rat) -> u64 {
    bitlen(r.numer()) + bitlen(r.denom()) - 1 + u64::from(r.is_negative())
}

/// Smallest common denominator scaling, returning a primitive integer vector
/// pointing in the same direction (zero stays zero).
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

pub fn max_rat<'a>(it: impl IntoIterator<Item = &'a Rat>) -> Option<Rat> {
    it.into_iter().max().cloned()
}
