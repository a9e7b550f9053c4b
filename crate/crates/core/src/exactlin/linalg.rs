use num_traits::{One, Zero};

use super::{QMat, QVec, Rat};
use crate::error::{Error, Result};

/// Which end of the column range pivots are taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    /// Scan columns 0, 1, 2, ... (ordinary reduced row echelon form).
    Leftmost,
    /// Scan columns from the last one backwards.
    Rightmost,
}

/// Reduced echelon form: each row has a 1 in its pivot column and every other
/// row has a 0 there. Zero rows are dropped.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<QVec>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_cols(&self) -> Vec<usize> {
        (0..self.cols).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// Gauss-Jordan elimination with exact arithmetic; the first usable row (in
/// input order) becomes the pivot row.
pub fn echelon(a: &QMat, order: PivotOrder) -> Echelon {
    let mut rows = a.row_vecs();
    let cols = a.cols();
    let col_order: Vec<usize> = match order {
        PivotOrder::Leftmost => (0..cols).collect(),
        PivotOrder::Rightmost => (0..cols).rev().collect(),
    };
    let mut pivots = Vec::new();
    let mut next = 0;
    for &c in &col_order {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = Rat::one() / &rows[next][c];
        for x in rows[next].iter_mut() {
            *x *= &inv;
        }
        let prow = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        next += 1;
    }
    rows.truncate(next);
    Echelon { rows, pivots, cols }
}

pub fn rank(a: &QMat) -> usize {
    echelon(a, PivotOrder::Leftmost).rank()
}

/// Returns some `x` with `A·x = b` exactly, or `None` when the system is inconsistent.
/// Free variables are set to zero.
pub fn solve_linear(a: &QMat, b: &[Rat]) -> Result<Option<QVec>> {
    if a.rows() != b.len() {
        return Err(Error::dim("solve_linear rhs", a.rows(), b.len()));
    }
    let n = a.cols();
    let rhs = QMat::from_cols(&[b.to_vec()], a.rows())?;
    let aug = QMat::hcat(a, &rhs)?;
    let ech = echelon(&aug, PivotOrder::Leftmost);
    if ech.pivots.contains(&n) {
        return Ok(None);
    }
    let mut x = vec![Rat::zero(); n];
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        x[p] = row[n].clone();
    }
    Ok(Some(x))
}

/// Basis of the null space of `A`, one vector per free column of the reduced
/// row echelon form (leftmost pivots), with a 1 in that free coordinate.
pub fn kernel_basis(a: &QMat) -> Vec<QVec> {
    let ech = echelon(a, PivotOrder::Leftmost);
    let n = a.cols();
    ech.free_cols()
        .into_iter()
        .map(|f| {
            let mut v = vec![Rat::zero(); n];
            v[f] = Rat::one();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Indices of a maximal linearly independent subfamily, chosen greedily in order.
pub fn column_basis(vectors: &[QVec], dim: usize) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    let mut basis: Vec<QVec> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(v.clone());
        let m = QMat::from_rows(trial, dim).expect("uniform dimension");
        if rank(&m) == basis.len() + 1 {
            basis.push(v.clone());
            kept.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{ivec, qvec};

    #[test]
    fn solve_identity() {
        let x = solve_linear(&QMat::identity(2), &qvec(&[(3, 1), (-1, 2)])).unwrap();
        assert_eq!(x, Some(qvec(&[(3, 1), (-1, 2)])));
    }

    #[test]
    fn solve_inconsistent() {
        let a = QMat::from_ints(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve_linear(&a, &ivec(&[1, 3])).unwrap(), None);
    }

    #[test]
    fn solve_diagonal() {
        let a = QMat::from_ints(&[&[2, 0], &[0, 4]]);
        let x = solve_linear(&a, &ivec(&[1, 1])).unwrap();
        assert_eq!(x, Some(qvec(&[(1, 2), (1, 4)])));
    }

    #[test]
    fn solve_dimension_mismatch() {
        assert!(solve_linear(&QMat::identity(2), &ivec(&[1])).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&QMat::identity(3)).is_empty());
        assert_eq!(kernel_basis(&QMat::from_ints(&[&[1, 1]])), vec![ivec(&[-1, 1])]);
        let k = kernel_basis(&QMat::zeros(2, 3));
        assert_eq!(k, vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])]);
    }

    #[test]
    fn rightmost_pivots() {
        let a = QMat::from_ints(&[&[1, -1]]);
        let e = echelon(&a, PivotOrder::Rightmost);
        assert_eq!(e.pivots, vec![1]);
        assert_eq!(e.rows[0], ivec(&[-1, 1]));
    }

    #[test]
    fn greedy_basis() {
        let vs = vec![ivec(&[1, 0]), ivec(&[2, 0]), ivec(&[1, 1])];
        assert_eq!(column_basis(&vs, 2), vec![0, 2]);
    }
}
