//! Independent valuation oracle through exact sparse polynomials.
//!
//! The product of the unipotent factors 1 + z_t f_{β_t} over the sequence
//! is a lower unitriangular matrix with polynomial entries; the k×k minor
//! on rows J and columns 1..k is the Plücker coordinate p̄_J expressed in
//! the sequence coordinates z_1, ..., z_d. Its ≺_Ψ-minimal exponent is the
//! valuation, giving a route entirely separate from the wedge action.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num::BigInt;
use thiserror::Error;

use crate::plucker::PluckerIndex;
use crate::seq::{ExponentVector, IteratedSequence};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("the zero polynomial has no lowest term")]
    ZeroPolynomial,
}

/// A sparse multivariate polynomial in z_1, ..., z_d with exact integer
/// coefficients. No zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparsePoly {
    terms: BTreeMap<ExponentVector, BigInt>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly::default()
    }

    pub fn constant(d: usize, value: i64) -> Self {
        let mut p = SparsePoly::zero();
        p.add_term(ExponentVector::zero(d), BigInt::from(value));
        p
    }

    /// The variable z_t (1-based) in d variables.
    pub fn variable(t: usize, d: usize) -> Self {
        let mut exp = vec![0u32; d];
        exp[t - 1] = 1;
        let mut p = SparsePoly::zero();
        p.add_term(ExponentVector(exp), BigInt::from(1));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &ExponentVector) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &BigInt)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, m: ExponentVector, c: BigInt) {
        use num::Zero as _;
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if entry.is_zero() {
            // Re-borrow to remove; entry key no longer available, so prune lazily.
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.add(mb), ca * cb);
            }
        }
        out
    }

    /// Scales by z_t (multiplication by the single variable).
    fn mul_var(&self, t: usize) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (m, c) in self.terms() {
            let mut exp = m.0.clone();
            exp[t - 1] += 1;
            out.add_term(ExponentVector(exp), c.clone());
        }
        out
    }

    /// Print form sorted by ≺_Ψ ascending, like `+1*z1*z4 -1*z2*z3`.
    pub fn to_psi_string(&self, seq: &IteratedSequence) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut monomials: Vec<&ExponentVector> = self.terms.keys().collect();
        monomials.sort_by(|a, b| seq.psi_compare(a, b).expect("exponents match sequence"));
        monomials
            .iter()
            .map(|m| {
                let c = &self.terms[*m];
                let vars = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(t, &e)| {
                        if e == 1 {
                            format!("z{}", t + 1)
                        } else {
                            format!("z{}^{}", t + 1, e)
                        }
                    })
                    .join("*");
                let sign = if c.sign() == num::bigint::Sign::Minus { "-" } else { "+" };
                let mag = c.magnitude();
                if vars.is_empty() {
                    format!("{sign}{mag}")
                } else {
                    format!("{sign}{mag}*{vars}")
                }
            })
            .join(" ")
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let rendered = self
            .terms
            .iter()
            .map(|(m, c)| format!("{c}*z^{m}"))
            .join(" + ");
        f.write_str(&rendered)
    }
}

/// Lower unitriangular matrix of exact polynomials in z_1, ..., z_d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericMatrix {
    n: usize,
    entries: Vec<Vec<SparsePoly>>,
}

impl GenericMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> &SparsePoly {
        &self.entries[row - 1][col - 1]
    }
}

/// The product over t = 1..d, left to right, of (1 + z_t E_{j_t, i_t}) for
/// β_t = ε_{i_t} - ε_{j_t}.
pub fn generic_matrix(seq: &IteratedSequence) -> GenericMatrix {
    let n = seq.n() as usize;
    let d = seq.d();
    let mut entries: Vec<Vec<SparsePoly>> =
        (0..n).map(|r| (0..n).map(|c| SparsePoly::constant(d, (r == c) as i64)).collect()).collect();
    for (t, root) in seq.roots().iter().enumerate() {
        // Right-multiplying by 1 + z E_{j,i} adds z · (column j) to column i.
        let i = (root.i() - 1) as usize;
        let j = (root.j() - 1) as usize;
        for r in 0..n {
            let scaled = entries[r][j].mul_var(t + 1);
            entries[r][i] = entries[r][i].add(&scaled);
        }
    }
    GenericMatrix { n, entries }
}

/// Determinant of the k×k submatrix of the generic matrix with rows J and
/// columns 1..k, expanded by cofactors along the first column.
pub fn minor_polynomial(seq: &IteratedSequence, index: &PluckerIndex) -> SparsePoly {
    let matrix = generic_matrix(seq);
    minor_of(&matrix, index)
}

/// Same minor computed from an already-built generic matrix.
pub fn minor_of(matrix: &GenericMatrix, index: &PluckerIndex) -> SparsePoly {
    let rows: Vec<usize> = index.indices().iter().map(|&r| r as usize).collect();
    let cols: Vec<usize> = (1..=index.len()).collect();
    determinant(matrix, &rows, &cols)
}

fn determinant(matrix: &GenericMatrix, rows: &[usize], cols: &[usize]) -> SparsePoly {
    if rows.len() == 1 {
        return matrix.entry(rows[0], cols[0]).clone();
    }
    let mut acc = SparsePoly::zero();
    for (r, &row) in rows.iter().enumerate() {
        let entry = matrix.entry(row, cols[0]);
        if entry.is_zero() {
            continue;
        }
        let rest_rows: Vec<usize> =
            rows.iter().copied().enumerate().filter(|&(x, _)| x != r).map(|(_, v)| v).collect();
        let minor = determinant(matrix, &rest_rows, &cols[1..]);
        let term = entry.mul(&minor);
        if r % 2 == 0 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
    }
    acc
}

/// v_S(f): the ≺_Ψ-minimal exponent in the support of f.
pub fn lowest_term_valuation(
    p: &SparsePoly,
    seq: &IteratedSequence,
) -> Result<ExponentVector, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(seq
        .psi_min(p.support())
        .expect("supports match the sequence length")
        .expect("nonzero polynomial")
        .clone())
}
