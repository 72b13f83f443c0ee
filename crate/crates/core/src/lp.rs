//! Dense exact two-phase simplex with Bland's rule.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::polyhedra::RationalPolyhedron;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<Rational>, value: Rational },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced profits `c_j − c_B B⁻¹ A_j`.
    profit: Vec<Rational>,
    value: Rational,
    /// Columns allowed to enter.
    enterable: Vec<bool>,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.profit[c].is_zero() {
            let f = self.profit[c].clone();
            for (x, y) in self.profit.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.value += &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn run(&mut self) -> Step {
        loop {
            let entering = (0..self.profit.len()).find(|&j| self.enterable[j] && self.profit[j].is_positive());
            let Some(c) = entering else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Step::Unbounded,
            }
        }
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        self.profit = cost.to_vec();
        self.value = Rational::zero();
        for i in 0..self.rows.len() {
            let cb = cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for (x, y) in self.profit.iter_mut().zip(&self.rows[i]) {
                if !y.is_zero() {
                    *x -= &cb * y;
                }
            }
            self.value += &cb * &self.rhs[i];
        }
    }
}

/// Maximize `objective · x` over the polyhedron.
pub fn maximize(poly: &RationalPolyhedron, objective: &[Rational]) -> LpOutcome {
    let n = poly.dim;
    assert_eq!(objective.len(), n, "objective length");
    let n_eq = poly.equalities.len();
    let n_le = poly.inequalities.len();
    let m = n_eq + n_le;
    // Columns: x⁺ (n), x⁻ (n), slacks (n_le), artificials (m).
    let n_struct = 2 * n + n_le;
    let ncols = n_struct + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (k, (a, b)) in poly.equalities.iter().chain(&poly.inequalities).enumerate() {
        let mut row = vec![Rational::zero(); ncols];
        for (j, x) in a.iter().enumerate() {
            row[j] = x.clone();
            row[n + j] = -x.clone();
        }
        if k >= n_eq {
            row[2 * n + (k - n_eq)] = Rational::one();
        }
        let mut b = b.clone();
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            b = -b;
        }
        row[n_struct + k] = Rational::one();
        rows.push(row);
        rhs.push(b);
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis: (n_struct..ncols).collect(),
        profit: Vec::new(),
        value: Rational::zero(),
        enterable: (0..ncols).map(|j| j < n_struct).collect(),
    };

    // Phase 1: maximize −Σ artificials.
    let phase1: Vec<Rational> = (0..ncols)
        .map(|j| if j < n_struct { Rational::zero() } else { -Rational::one() })
        .collect();
    t.set_objective(&phase1);
    t.run();
    if t.value.is_negative() {
        return LpOutcome::Infeasible;
    }

    // Drive basic artificials out, dropping redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n_struct {
            match (0..n_struct).find(|&j| !t.rows[i][j].is_zero()) {
                Some(c) => {
                    t.pivot(i, c);
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

    let mut cost = vec![Rational::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        cost[j] = c.clone();
        cost[n + j] = -c.clone();
    }
    t.set_objective(&cost);
    if let Step::Unbounded = t.run() {
        return LpOutcome::Unbounded;
    }

    let mut full = vec![Rational::zero(); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        full[b] = t.rhs[i].clone();
    }
    let point: Vec<Rational> = (0..n).map(|j| &full[j] - &full[n + j]).collect();
    LpOutcome::Optimal {
        point,
        value: t.value,
    }
}

/// Minimize `objective · x`; the reported value is the minimum.
pub fn minimize(poly: &RationalPolyhedron, objective: &[Rational]) -> LpOutcome {
    let neg: Vec<Rational> = objective.iter().map(|x| -x.clone()).collect();
    match maximize(poly, &neg) {
        LpOutcome::Optimal { point, value } => LpOutcome::Optimal { point, value: -value },
        other => other,
    }
}
