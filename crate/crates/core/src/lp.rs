//! A small exact linear-programming solver (two-phase tableau simplex with
//! Bland's anti-cycling rule). All variables are nonnegative.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, x: Vec<Rational> },
}

/// `maximize objective . x` over `x >= 0` and the constraints.
#[derive(Debug, Clone)]
pub struct Lp {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rational>,
}

impl Lp {
    pub fn new(num_vars: usize) -> Self {
        Lp {
            num_vars,
            constraints: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
        }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, cmp: Cmp, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars;
        let m = self.constraints.len();
        let slack_count = self.constraints.iter().filter(|c| c.cmp != Cmp::Eq).count();
        let art0 = n + slack_count;
        let total = art0 + m;
        let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = n;
        for (i, c) in self.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); total + 1];
            row[..n].clone_from_slice(&c.coeffs);
            match c.cmp {
                Cmp::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Cmp::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Cmp::Eq => {}
            }
            row[total] = c.rhs.clone();
            if row[total].is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
            }
            row[art0 + i] = Rational::one();
            t.push(row);
            basis.push(art0 + i);
        }

        let mut phase1 = vec![Rational::zero(); total];
        for c in phase1[art0..].iter_mut() {
            *c = -Rational::one();
        }
        let mut tab = Tableau { t, basis, total };
        match tab.optimize(&phase1, total) {
            Some(v) if v.is_zero() => {}
            Some(_) => return LpOutcome::Infeasible,
            None => unreachable!("phase one is bounded"),
        }
        tab.expel_artificials(art0);

        let mut obj = vec![Rational::zero(); total];
        obj[..n].clone_from_slice(&self.objective);
        match tab.optimize(&obj, art0) {
            None => LpOutcome::Unbounded,
            Some(value) => {
                let mut x = vec![Rational::zero(); n];
                for (i, &b) in tab.basis.iter().enumerate() {
                    if b < n {
                        x[b] = tab.t[i][total].clone();
                    }
                }
                LpOutcome::Optimal { value, x }
            }
        }
    }

    /// Some feasible point, ignoring the objective.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let mut lp = self.clone();
        lp.objective = vec![Rational::zero(); self.num_vars];
        match lp.solve() {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau {
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    total: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj` allowing only columns `< allowed` to enter. Returns the
    /// optimal value, or `None` when unbounded.
    fn optimize(&mut self, obj: &[Rational], allowed: usize) -> Option<Rational> {
        let total = self.total;
        loop {
            // Reduced costs z_j - c_j; a negative entry can improve the objective.
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z = self
                    .t
                    .iter()
                    .zip(&self.basis)
                    .fold(Rational::zero(), |acc, (row, &b)| acc + &obj[b] * &row[j]);
                (z - &obj[j]).is_negative()
            });
            let Some(j) = entering else {
                return Some(
                    self.t
                        .iter()
                        .zip(&self.basis)
                        .fold(Rational::zero(), |acc, (row, &b)| acc + &obj[b] * &row[total]),
                );
            };
            let mut best: Option<(Rational, usize)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[total] / &row[j];
                let better = match &best {
                    None => true,
                    Some((r, bi)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((ratio, i));
                }
            }
            let (_, r) = best?;
            self.pivot(r, j);
        }
    }

    fn expel_artificials(&mut self, art0: usize) {
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] >= art0 {
                if let Some(j) = (0..art0).find(|&j| !self.t[i][j].is_zero()) {
                    self.pivot(i, j);
                } else {
                    // Redundant equation.
                    self.t.remove(i);
                    self.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
    }
}
