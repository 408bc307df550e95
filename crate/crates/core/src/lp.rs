//! Exact two-phase simplex over rationals. Pivots by largest reduced cost and switches to
//! Bland's rule after a run of degenerate pivots, so it always terminates.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Variables are non-negative unless marked free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub names: Vec<String>,
    pub free: Vec<bool>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rational>,
    pub direction: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Empty unless optimal.
    pub solution: Vec<Rational>,
    pub value: Rational,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            names: (0..n).map(|i| alloc::format!("x{i}")).collect(),
            free: vec![false; n],
            constraints: Vec::new(),
            objective: vec![Rational::zero(); n],
            direction: Direction::Maximize,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.len(), "constraint width must match the variable count");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) {
        assert_eq!(objective.len(), self.len());
        self.objective = objective;
        self.direction = Direction::Maximize;
    }

    pub fn minimize(&mut self, objective: Vec<Rational>) {
        assert_eq!(objective.len(), self.len());
        self.objective = objective;
        self.direction = Direction::Minimize;
    }

    /// Exact feasibility check of a candidate point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.len() {
            return false;
        }
        if x.iter().zip(&self.free).any(|(v, &f)| !f && v.is_negative()) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = dot(&c.coeffs, x);
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| if x.is_zero() || y.is_zero() { acc } else { acc + x * y })
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const BLAND_AFTER: usize = 32;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x /= &p;
            }
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    let delta = &f * pv;
                    self.rows[i][j] -= delta;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` over allowed columns. Returns false if unbounded.
    /// Prices by largest reduced cost, falling back to Bland's rule after a run of degenerate pivots.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        let ncols = cost.len();
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            let mut entering: Option<(usize, Rational)> = None;
            for j in 0..ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut z = Rational::zero();
                for (i, &b) in self.basis.iter().enumerate() {
                    let t = &self.rows[i][j];
                    if !t.is_zero() && !cost[b].is_zero() {
                        z += &cost[b] * t;
                    }
                }
                let reduced = &cost[j] - z;
                if reduced.is_positive() && entering.as_ref().is_none_or(|(_, r)| reduced > *r) {
                    entering = Some((j, reduced));
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _)) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let t = &self.rows[i][j];
                if t.is_positive() {
                    let ratio = &self.rhs[i] / t;
                    let better = match &leave {
                        None => true,
                        Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, step)) = leave else { return false };
            if step.is_zero() {
                degenerate_run += 1;
                bland |= degenerate_run > BLAND_AFTER;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, j);
        }
    }
}

pub fn solve_lp(p: &LinearProgram) -> LpResult {
    let n = p.len();
    // column layout: split originals (x+ then x- for free vars), then slacks, then artificials
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut ncols = 0;
    for &f in &p.free {
        let plus = ncols;
        ncols += 1;
        let minus = if f {
            ncols += 1;
            Some(ncols - 1)
        } else {
            None
        };
        col_of.push((plus, minus));
    }
    let structural = ncols;
    let mut rows_spec: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &p.constraints {
        let mut row = vec![Rational::zero(); structural];
        for (k, a) in c.coeffs.iter().enumerate() {
            let (plus, minus) = col_of[k];
            row[plus] = a.clone();
            if let Some(mi) = minus {
                row[mi] = -a.clone();
            }
        }
        match c.relation {
            Relation::Eq => {
                rows_spec.push((row.clone(), Relation::Le, c.rhs.clone()));
                rows_spec.push((row, Relation::Ge, c.rhs.clone()));
            }
            r => rows_spec.push((row, r, c.rhs.clone())),
        }
    }
    let m = rows_spec.len();
    let slack0 = structural;
    let art0 = slack0 + m;
    let mut needs_art = Vec::with_capacity(m);
    for (_, rel, rhs) in &rows_spec {
        // a zero right-hand side can be negated freely, so only strict sign mismatches need one
        needs_art.push(match rel {
            Relation::Le => rhs.is_negative(),
            _ => rhs.is_positive(),
        });
    }
    let nart = needs_art.iter().filter(|&&b| b).count();
    let total = art0 + nart;
    let mut t = Tableau { rows: Vec::with_capacity(m), rhs: Vec::with_capacity(m), basis: Vec::with_capacity(m) };
    let mut next_art = art0;
    for (i, (row, rel, rhs)) in rows_spec.into_iter().enumerate() {
        let mut full = vec![Rational::zero(); total];
        for (j, a) in row.into_iter().enumerate() {
            full[j] = a;
        }
        full[slack0 + i] = if rel == Relation::Le { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
        let mut b = rhs;
        if b.is_negative() || (b.is_zero() && rel == Relation::Ge) {
            for x in full.iter_mut() {
                *x = -x.clone();
            }
            b = -b;
        }
        if needs_art[i] {
            full[next_art] = Rational::from_integer(1.into());
            t.basis.push(next_art);
            next_art += 1;
        } else {
            t.basis.push(slack0 + i);
        }
        t.rows.push(full);
        t.rhs.push(b);
    }

    if nart > 0 {
        let mut cost = vec![Rational::zero(); total];
        for c in cost.iter_mut().skip(art0) {
            *c = Rational::from_integer((-1).into());
        }
        t.optimize(&cost, &vec![true; total]);
        let infeasible = t.basis.iter().zip(&t.rhs).any(|(&b, v)| b >= art0 && !v.is_zero());
        if infeasible {
            return LpResult { status: LpStatus::Infeasible, solution: Vec::new(), value: Rational::zero() };
        }
        // drive zero-valued artificials out of the basis; drop redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art0 {
                match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let sign = if p.direction == Direction::Maximize { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
    let mut cost = vec![Rational::zero(); total];
    for (k, c) in p.objective.iter().enumerate() {
        let (plus, minus) = col_of[k];
        cost[plus] = &sign * c;
        if let Some(mi) = minus {
            cost[mi] = -(&sign * c);
        }
    }
    let allowed: Vec<bool> = (0..total).map(|j| j < art0).collect();
    if !t.optimize(&cost, &allowed) {
        return LpResult { status: LpStatus::Unbounded, solution: Vec::new(), value: Rational::zero() };
    }
    let mut col_val = vec![Rational::zero(); total];
    for (i, &b) in t.basis.iter().enumerate() {
        col_val[b] = t.rhs[i].clone();
    }
    let solution: Vec<Rational> = col_of
        .iter()
        .map(|&(plus, minus)| match minus {
            Some(mi) => &col_val[plus] - &col_val[mi],
            None => col_val[plus].clone(),
        })
        .collect();
    assert!(p.is_feasible(&solution), "simplex returned a point violating the constraints");
    let value = dot(&p.objective, &solution);
    LpResult { status: LpStatus::Optimal, solution, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn bounded_single_variable() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![int(1)], Relation::Le, int(3));
        lp.maximize(vec![int(1)]);
        let r = solve_lp(&lp);
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.solution, vec![int(3)]);
    }

    #[test]
    fn contradictory_bound_is_infeasible() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![int(1)], Relation::Le, int(-1));
        lp.maximize(vec![int(1)]);
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
    }

    #[test]
    fn degenerate_tie_is_deterministic() {
        let mut lp = LinearProgram::new(2);
        lp.add(vec![int(1), int(1)], Relation::Le, int(1));
        lp.maximize(vec![int(1), int(1)]);
        let a = solve_lp(&lp);
        let b = solve_lp(&lp);
        assert_eq!(a.value, int(1));
        assert_eq!(a, b);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![int(1)], Relation::Ge, int(1));
        lp.maximize(vec![int(1)]);
        assert_eq!(solve_lp(&lp).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_goes_negative() {
        let mut lp = LinearProgram::new(1);
        lp.free[0] = true;
        lp.add(vec![int(1)], Relation::Ge, int(-5));
        lp.minimize(vec![int(1)]);
        let r = solve_lp(&lp);
        assert_eq!(r.solution, vec![int(-5)]);
        assert_eq!(r.value, int(-5));
    }

    #[test]
    fn equality_rows_hold_exactly() {
        let mut lp = LinearProgram::new(3);
        lp.add(vec![int(1), int(1), int(1)], Relation::Eq, int(1));
        lp.add(vec![int(1), int(-1), int(0)], Relation::Ge, int(0));
        lp.maximize(vec![int(0), int(1), int(2)]);
        let r = solve_lp(&lp);
        assert_eq!(r.value, int(2));
        assert!(lp.is_feasible(&r.solution));
    }
}
