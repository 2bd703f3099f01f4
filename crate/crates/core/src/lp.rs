//! Exact rational linear programming: a dense two-phase simplex over
//! arbitrary-size-free rationals (128-bit numerator/denominator, checked).
//!
//! The pivot rule starts with Dantzig's largest-improvement choice and
//! permanently switches to Bland's rule after a fixed number of pivots, so
//! the solver cannot cycle. All arithmetic is exact; overflow of the i128
//! backing panics rather than wrapping.

use num::rational::Ratio;
use num::{One, Signed, Zero};
use thiserror::Error;

pub type Rat = Ratio<i128>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("malformed dimensions: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rat>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

pub fn rat(x: i64) -> Rat {
    Ratio::from_integer(x as i128)
}

fn checked_mul(a: &Rat, b: &Rat) -> Rat {
    use num::CheckedMul;
    a.checked_mul(b).expect("exact rational overflow in simplex")
}

fn checked_sub(a: &Rat, b: &Rat) -> Rat {
    use num::CheckedSub;
    a.checked_sub(b).expect("exact rational overflow in simplex")
}

fn checked_div(a: &Rat, b: &Rat) -> Rat {
    use num::CheckedDiv;
    a.checked_div(b).expect("exact rational overflow in simplex")
}

struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    basis: Vec<usize>,
    reduced: Vec<Rat>,
    objective: Rat,
}

impl Tableau {
    /// Recomputes reduced costs and objective from scratch for cost vector c.
    fn install_costs(&mut self, c: &[Rat]) {
        let basic_costs: Vec<Rat> = self.basis.iter().map(|&j| c[j].clone()).collect();
        for j in 0..self.cols {
            let mut r = c[j].clone();
            for i in 0..self.rows {
                r = checked_sub(&r, &checked_mul(&basic_costs[i], &self.a[i][j]));
            }
            self.reduced[j] = r;
        }
        let mut obj = Rat::zero();
        for i in 0..self.rows {
            obj = obj + checked_mul(&basic_costs[i], &self.b[i]);
        }
        self.objective = obj;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.a[row][col].clone();
        for j in 0..self.cols {
            self.a[row][j] = checked_div(&self.a[row][j], &pivot);
        }
        self.b[row] = checked_div(&self.b[row], &pivot);
        for i in 0..self.rows {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            let factor = self.a[i][col].clone();
            for j in 0..self.cols {
                let delta = checked_mul(&factor, &self.a[row][j]);
                self.a[i][j] = checked_sub(&self.a[i][j], &delta);
            }
            self.b[i] = checked_sub(&self.b[i], &checked_mul(&factor, &self.b[row]));
        }
        if !self.reduced[col].is_zero() {
            let factor = self.reduced[col].clone();
            for j in 0..self.cols {
                let delta = checked_mul(&factor, &self.a[row][j]);
                self.reduced[j] = checked_sub(&self.reduced[j], &delta);
            }
            self.objective = self.objective + checked_mul(&factor, &self.b[row]);
        }
        self.basis[row] = col;
    }

    /// Minimizes the installed cost row. `allowed` masks the usable columns.
    /// Returns false when the problem is unbounded below.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let bland_after = 4 * (self.rows + self.cols);
        let mut iterations = 0usize;
        loop {
            let use_bland = iterations >= bland_after;
            let mut entering: Option<usize> = None;
            for j in 0..self.cols {
                if !allowed[j] || self.reduced[j] >= Rat::zero() {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(best) => {
                        if !use_bland && self.reduced[j] < self.reduced[best] {
                            entering = Some(j);
                        }
                    }
                }
                if use_bland {
                    break;
                }
            }
            let Some(col) = entering else {
                return true; // optimal
            };
            // Ratio test; ties broken by smallest basis index (Bland-safe).
            let mut leaving: Option<(usize, Rat)> = None;
            for i in 0..self.rows {
                if self.a[i][col] <= Rat::zero() {
                    continue;
                }
                let ratio = checked_div(&self.b[i], &self.a[i][col]);
                match &leaving {
                    None => leaving = Some((i, ratio)),
                    Some((best_i, best_ratio)) => {
                        if ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best_i])
                        {
                            leaving = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false; // unbounded
            };
            self.pivot(row, col);
            iterations += 1;
        }
    }

    fn point(&self, n: usize) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); n];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < n {
                x[j] = self.b[i].clone();
            }
        }
        x
    }
}

fn check_dims(a: &[Vec<Rat>], b: &[Rat]) -> Result<usize, LpError> {
    if a.len() != b.len() {
        return Err(LpError::Malformed(format!(
            "{} constraint rows but {} right-hand sides",
            a.len(),
            b.len()
        )));
    }
    let n = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != n) {
        return Err(LpError::Malformed("ragged constraint matrix".into()));
    }
    if n == 0 {
        return Err(LpError::Malformed("no variables".into()));
    }
    Ok(n)
}

/// Phase-1 tableau for {Ax = b, x >= 0} with artificial variables basic.
fn phase_one(a: &[Vec<Rat>], b: &[Rat], n: usize) -> Tableau {
    let m = a.len();
    let cols = n + m;
    let mut rows_a: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for i in 0..m {
        let negate = b[i] < Rat::zero();
        let mut row: Vec<Rat> = Vec::with_capacity(cols);
        for j in 0..n {
            row.push(if negate { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        rows_a.push(row);
        rhs.push(if negate { -b[i].clone() } else { b[i].clone() });
    }
    let mut tableau = Tableau {
        rows: m,
        cols,
        a: rows_a,
        b: rhs,
        basis: (n..n + m).collect(),
        reduced: vec![Rat::zero(); cols],
        objective: Rat::zero(),
    };
    let mut costs = vec![Rat::zero(); cols];
    for j in n..cols {
        costs[j] = Rat::one();
    }
    tableau.install_costs(&costs);
    let allowed = vec![true; cols];
    let bounded = tableau.optimize(&allowed);
    debug_assert!(bounded, "phase-1 objective is bounded below by zero");
    tableau
}

/// Feasibility of {Ax = b, x >= 0}: a rational witness or an infeasibility
/// verdict.
pub fn lp_feasible(a: &[Vec<Rat>], b: &[Rat]) -> Result<Feasibility, LpError> {
    let n = check_dims(a, b)?;
    let tableau = phase_one(a, b, n);
    if tableau.objective > Rat::zero() {
        return Ok(Feasibility::Infeasible);
    }
    Ok(Feasibility::Feasible(tableau.point(n)))
}

/// Minimizes c·x over {Ax = b, x >= 0}.
pub fn solve_min(c: &[Rat], a: &[Vec<Rat>], b: &[Rat]) -> Result<LpOutcome, LpError> {
    let n = check_dims(a, b)?;
    if c.len() != n {
        return Err(LpError::Malformed(format!(
            "objective has {} entries for {} variables",
            c.len(),
            n
        )));
    }
    let mut tableau = phase_one(a, b, n);
    if tableau.objective > Rat::zero() {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive artificial variables out of the basis; rows that cannot pivot
    // on an original column are redundant and drop out implicitly because
    // their artificial stays at zero.
    for i in 0..tableau.rows {
        if tableau.basis[i] < n {
            continue;
        }
        if let Some(col) = (0..n).find(|&j| !tableau.a[i][j].is_zero()) {
            tableau.pivot(i, col);
        }
    }
    let mut costs = vec![Rat::zero(); tableau.cols];
    costs[..n].clone_from_slice(c);
    tableau.install_costs(&costs);
    let mut allowed = vec![false; tableau.cols];
    allowed[..n].fill(true);
    if !tableau.optimize(&allowed) {
        return Ok(LpOutcome::Unbounded);
    }
    Ok(LpOutcome::Optimal { value: tableau.objective.clone(), point: tableau.point(n) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_feasible() {
        // x1 + x2 = 1, x >= 0.
        let a = vec![vec![rat(1), rat(1)]];
        let b = vec![rat(1)];
        let Feasibility::Feasible(x) = lp_feasible(&a, &b).unwrap() else {
            panic!("expected feasible");
        };
        assert_eq!(x[0] + x[1], rat(1));
        assert!(x.iter().all(|v| *v >= Rat::zero()));
    }

    #[test]
    fn simple_infeasible() {
        // x1 = -1, x >= 0.
        let a = vec![vec![rat(1)]];
        let b = vec![rat(-1)];
        assert_eq!(lp_feasible(&a, &b).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn convex_combination_outside_triangle() {
        // (1,1) as a convex combination of (0,0),(1,0),(0,1): infeasible.
        let a = vec![
            vec![rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(1)],
            vec![rat(1), rat(1), rat(1)],
        ];
        let b = vec![rat(1), rat(1), rat(1)];
        assert_eq!(lp_feasible(&a, &b).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn convex_combination_inside() {
        // (1/2, 1/2) is in that triangle.
        let a = vec![
            vec![rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(1)],
            vec![rat(1), rat(1), rat(1)],
        ];
        let b = vec![Ratio::new(1, 2), Ratio::new(1, 2), rat(1)];
        let Feasibility::Feasible(x) = lp_feasible(&a, &b).unwrap() else {
            panic!("expected feasible");
        };
        // Witness satisfies the constraints exactly.
        assert_eq!(x[1].clone(), Ratio::new(1, 2));
        assert_eq!(x[2].clone(), Ratio::new(1, 2));
        assert_eq!(x[0].clone() + x[1].clone() + x[2].clone(), rat(1));
    }

    #[test]
    fn minimization() {
        // min -x1 - x2 st x1 + s1 = 2, x2 + s2 = 3: optimum -5 at (2,3).
        let a = vec![
            vec![rat(1), rat(0), rat(1), rat(0)],
            vec![rat(0), rat(1), rat(0), rat(1)],
        ];
        let b = vec![rat(2), rat(3)];
        let c = vec![rat(-1), rat(-1), rat(0), rat(0)];
        let LpOutcome::Optimal { value, point } = solve_min(&c, &a, &b).unwrap() else {
            panic!("expected optimal");
        };
        assert_eq!(value, rat(-5));
        assert_eq!(point[0], rat(2));
        assert_eq!(point[1], rat(3));
    }

    #[test]
    fn unbounded_detected() {
        // min -x1 st x1 - x2 = 0: x1 can grow without bound.
        let a = vec![vec![rat(1), rat(-1)]];
        let b = vec![rat(0)];
        let c = vec![rat(-1), rat(0)];
        assert_eq!(solve_min(&c, &a, &b).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_handled() {
        // Duplicate constraint rows leave an artificial basic at zero.
        let a = vec![vec![rat(1), rat(1)], vec![rat(1), rat(1)]];
        let b = vec![rat(1), rat(1)];
        let c = vec![rat(1), rat(0)];
        let LpOutcome::Optimal { value, .. } = solve_min(&c, &a, &b).unwrap() else {
            panic!("expected optimal");
        };
        assert_eq!(value, rat(0));
    }

    #[test]
    fn malformed_dimensions() {
        assert!(lp_feasible(&[vec![rat(1)]], &[]).is_err());
        assert!(lp_feasible(&[vec![rat(1)], vec![rat(1), rat(2)]], &[rat(1), rat(2)]).is_err());
        assert!(solve_min(&[rat(1), rat(2)], &[vec![rat(1)]], &[rat(1)]).is_err());
    }
}
