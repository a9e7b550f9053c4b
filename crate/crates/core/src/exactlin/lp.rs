//! Two-phase dense simplex over exact rationals.
//!
//! All decision variables are free; internally each is split as `x = x⁺ − x⁻`.
//! Pivoting uses Bland's rule (lowest eligible entering column, ties in the
//! ratio test broken by the lowest basic variable index), so the solver is
//! deterministic and cannot cycle on degenerate problems.

use num_traits::{Signed, Zero};

use super::{dot, QVec, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: QVec,
    pub constraints: Vec<(QVec, Relation, Rat)>,
    pub sense: Sense,
}

impl LpProblem {
    pub fn new(objective: QVec, sense: Sense) -> Self {
        LpProblem {
            objective,
            constraints: Vec::new(),
            sense,
        }
    }

    pub fn constrain(&mut self, coeffs: QVec, rel: Relation, rhs: Rat) -> &mut Self {
        self.constraints.push((coeffs, rel, rhs));
        self
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: QVec },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    /// The optimal value, or an error naming the status.
    pub fn value(&self) -> Result<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Err(Error::Lp("infeasible".into())),
            LpOutcome::Unbounded => Err(Error::Lp("unbounded".into())),
        }
    }

    pub fn into_optimal(self) -> Result<(Rat, QVec)> {
        match self {
            LpOutcome::Optimal { value, point } => Ok((value, point)),
            LpOutcome::Infeasible => Err(Error::Lp("infeasible".into())),
            LpOutcome::Unbounded => Err(Error::Lp("unbounded".into())),
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rat>>, // each row: ncols coefficients followed by the rhs
    basis: Vec<usize>,
    ncols: usize,
    cost: Vec<Rat>, // reduced costs, followed by minus the objective value
}

enum Pivoting {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.ncols]
    }

    fn price(&mut self, c: &[Rat]) {
        let mut cost: Vec<Rat> = c.to_vec();
        cost.push(Rat::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (x, y) in cost.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= cb * y;
                }
            }
        }
        self.cost = cost;
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.rows[r][j].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rat>| {
            if row[j].is_zero() {
                return;
            }
            let f = row[j].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = j;
    }

    /// Minimizes the currently priced objective over columns `< allowed`.
    fn run(&mut self, allowed: usize) -> Pivoting {
        loop {
            let Some(j) = (0..allowed).find(|&j| self.cost[j].is_negative()) else {
                return Pivoting::Optimal;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return Pivoting::Unbounded,
                Some((r, _)) => self.pivot(r, j),
            }
        }
    }
}

/// Solves the linear program exactly.
pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome> {
    let n = p.dim();
    for (a, _, _) in &p.constraints {
        if a.len() != n {
            return Err(Error::dim("lp constraint", n, a.len()));
        }
    }
    let m = p.constraints.len();

    // Normalize to nonnegative right-hand sides; `a·x ≥ 0` becomes `−a·x ≤ 0`
    // so that its slack starts in the basis.
    let mut rows: Vec<(QVec, Relation, Rat)> = Vec::with_capacity(m);
    for (a, rel, b) in &p.constraints {
        if b.is_negative() || (b.is_zero() && *rel == Relation::Ge) {
            let rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            rows.push((a.iter().map(|x| -x).collect(), rel, -b));
        } else {
            rows.push((a.clone(), *rel, b.clone()));
        }
    }

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let structural = 2 * n;
    let art0 = structural + n_slack;
    let ncols = art0 + n_art;

    let mut tab_rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut t) = (structural, art0);
    for (a, rel, b) in rows {
        let mut row = vec![Rat::zero(); ncols + 1];
        for (k, x) in a.iter().enumerate() {
            if !x.is_zero() {
                row[k] = x.clone();
                row[n + k] = -x.clone();
            }
        }
        row[ncols] = b;
        match rel {
            Relation::Le => {
                row[s] = Rat::from_integer(1.into());
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = Rat::from_integer((-1).into());
                s += 1;
                row[t] = Rat::from_integer(1.into());
                basis.push(t);
                t += 1;
            }
            Relation::Eq => {
                row[t] = Rat::from_integer(1.into());
                basis.push(t);
                t += 1;
            }
        }
        tab_rows.push(row);
    }

    let mut tab = Tableau {
        rows: tab_rows,
        basis,
        ncols,
        cost: Vec::new(),
    };

    if n_art > 0 {
        let mut c1 = vec![Rat::zero(); ncols];
        for c in c1.iter_mut().skip(art0) {
            *c = Rat::from_integer(1.into());
        }
        tab.price(&c1);
        tab.run(ncols);
        if !tab.cost[ncols].is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining (zero-level) artificials out of the basis.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art0 {
                match (0..art0).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let sign = match p.sense {
        Sense::Min => Rat::from_integer(1.into()),
        Sense::Max => Rat::from_integer((-1).into()),
    };
    let mut c2 = vec![Rat::zero(); ncols];
    for (k, c) in p.objective.iter().enumerate() {
        c2[k] = c * &sign;
        c2[n + k] = -(c * &sign);
    }
    tab.price(&c2);
    if let Pivoting::Unbounded = tab.run(art0) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut split = vec![Rat::zero(); structural];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < structural {
            split[b] = tab.rhs(i).clone();
        }
    }
    let point: QVec = (0..n).map(|k| &split[k] - &split[n + k]).collect();
    let value = dot(&p.objective, &point);
    Ok(LpOutcome::Optimal { value, point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{int, ivec};

    #[test]
    fn bounded_max() {
        let mut p = LpProblem::new(ivec(&[1]), Sense::Max);
        p.constrain(ivec(&[1]), Relation::Le, int(5));
        let (v, x) = lp_solve(&p).unwrap().into_optimal().unwrap();
        assert_eq!(v, int(5));
        assert_eq!(x, ivec(&[5]));
    }

    #[test]
    fn unbounded_max() {
        let mut p = LpProblem::new(ivec(&[1]), Sense::Max);
        p.constrain(ivec(&[1]), Relation::Ge, int(0));
        assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn epigraph_min() {
        // variables (t, x, y)
        let mut p = LpProblem::new(ivec(&[1, 0, 0]), Sense::Min);
        p.constrain(ivec(&[1, -1, -1]), Relation::Ge, int(0));
        p.constrain(ivec(&[1, 1, 1]), Relation::Ge, int(0));
        p.constrain(ivec(&[0, 1, 0]), Relation::Eq, int(1));
        p.constrain(ivec(&[0, 0, 1]), Relation::Eq, int(1));
        assert_eq!(lp_solve(&p).unwrap().value().unwrap(), &int(2));
    }

    #[test]
    fn infeasible() {
        let mut p = LpProblem::new(ivec(&[1]), Sense::Min);
        p.constrain(ivec(&[1]), Relation::Ge, int(2));
        p.constrain(ivec(&[1]), Relation::Le, int(1));
        assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn redundant_equalities() {
        let mut p = LpProblem::new(ivec(&[1, 1]), Sense::Max);
        p.constrain(ivec(&[1, 1]), Relation::Eq, int(2));
        p.constrain(ivec(&[2, 2]), Relation::Eq, int(4));
        p.constrain(ivec(&[1, 0]), Relation::Le, int(7));
        assert_eq!(lp_solve(&p).unwrap().value().unwrap(), &int(2));
    }

    #[test]
    fn dimension_mismatch() {
        let mut p = LpProblem::new(ivec(&[1, 1]), Sense::Max);
        p.constrain(ivec(&[1]), Relation::Le, int(1));
        assert!(lp_solve(&p).is_err());
    }
}
