//! Exact action of root-operator monomials on Λ^k Cⁿ and the valuations of
//! Plücker coordinates.
//!
//! The root operator f_{i,j} acts on Cⁿ by e_i -> e_j and everything else
//! to zero, and on wedge powers by the Leibniz rule. Applying the monomial
//! f_{β_1}^{m_1} ∘ ... ∘ f_{β_d}^{m_d} (rightmost factor first) to the
//! highest weight vector e_1 ∧ ... ∧ e_k and reading off the coefficient of
//! e_J yields the valuation of the Plücker coordinate p_J as the
//! ≺_Ψ-minimal exponent with nonzero coefficient.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::plucker::{plucker_indices, PluckerIndex};
use crate::seq::{ExponentVector, IteratedSequence, PositiveRoot};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WedgeError {
    #[error("no monomial in {{0,1}}^d reaches e_{index}; sequence is not birational")]
    NoAdmissibleMonomial { index: String },
    #[error("index {0} is not a k-subset of [n] for this sequence")]
    InvalidIndex(String),
}

/// An exact integer linear combination of wedge basis vectors, keyed by the
/// strictly increasing index tuple. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WedgeVector {
    terms: BTreeMap<PluckerIndex, i64>,
}

impl WedgeVector {
    pub fn zero() -> Self {
        WedgeVector::default()
    }

    /// The highest weight vector e_1 ∧ ... ∧ e_k.
    pub fn highest_weight(k: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(PluckerIndex::new((1..=k).collect()), 1);
        WedgeVector { terms }
    }

    pub fn single(index: PluckerIndex, coefficient: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coefficient != 0 {
            terms.insert(index, coefficient);
        }
        WedgeVector { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, index: &PluckerIndex) -> i64 {
        self.terms.get(index).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PluckerIndex, i64)> {
        self.terms.iter().map(|(idx, &c)| (idx, c))
    }

    fn add_term(&mut self, index: PluckerIndex, coefficient: i64) {
        if coefficient == 0 {
            return;
        }
        let entry = self.terms.entry(index);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coefficient);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let next = *o.get() + coefficient;
                if next == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = next;
                }
            }
        }
    }
}

/// Leibniz action of f_{i,j} on a wedge vector. Factors equal to e_i move
/// to e_j; results are re-sorted with the sign of the sorting permutation
/// and terms with a repeated factor vanish.
pub fn apply_root_operator(root: PositiveRoot, w: &WedgeVector) -> WedgeVector {
    let mut out = WedgeVector::zero();
    for (index, coefficient) in w.terms() {
        for (pos, &entry) in index.indices().iter().enumerate() {
            if entry != root.i() {
                continue;
            }
            let mut moved: Vec<u32> = index.indices().to_vec();
            moved[pos] = root.j();
            if let Some((sorted, sign)) = PluckerIndex::sorted_with_sign(moved) {
                out.add_term(sorted, coefficient * sign as i64);
            }
        }
    }
    out
}

/// f_{β_1}^{m_1} ∘ ... ∘ f_{β_d}^{m_d} (e_1 ∧ ... ∧ e_k), rightmost factor
/// applied first. Exponents >= 2 annihilate the wedge power.
pub fn apply_monomial(m: &ExponentVector, seq: &IteratedSequence) -> Result<WedgeVector, crate::seq::SeqError> {
    if m.len() != seq.d() {
        return Err(crate::seq::SeqError::LengthMismatch { expected: seq.d(), got: m.len() });
    }
    let mut w = WedgeVector::highest_weight(seq.k());
    for (t, &root) in seq.roots().iter().enumerate().rev() {
        for _ in 0..m.0[t] {
            if w.is_zero() {
                return Ok(w);
            }
            w = apply_root_operator(root, &w);
        }
    }
    Ok(w)
}

/// For every Plücker index J, the list of (m, coefficient of e_J in
/// f_S^m(e_1 ∧ ... ∧ e_k)) over all m in {0,1}^d with nonzero coefficient.
///
/// Computed by a depth-first walk over the d apply/skip choices so partial
/// products are shared across monomials.
pub fn coefficient_table(
    seq: &IteratedSequence,
) -> BTreeMap<PluckerIndex, Vec<(ExponentVector, i64)>> {
    let mut table: BTreeMap<PluckerIndex, Vec<(ExponentVector, i64)>> = BTreeMap::new();
    let start = WedgeVector::highest_weight(seq.k());
    let d = seq.d();
    // Stack entry: next position to decide (counting down from d to 0) and
    // the vector obtained from the decided suffix.
    let mut stack: Vec<(usize, u64, WedgeVector)> = vec![(d, 0u64, start)];
    while let Some((t, mask, w)) = stack.pop() {
        if w.is_zero() {
            continue;
        }
        if t == 0 {
            let m = ExponentVector::from_mask(mask, d);
            for (index, coefficient) in w.terms() {
                table.entry(index.clone()).or_default().push((m.clone(), coefficient));
            }
            continue;
        }
        let root = seq.roots()[t - 1];
        let applied = apply_root_operator(root, &w);
        stack.push((t - 1, mask, w));
        if !applied.is_zero() {
            stack.push((t - 1, mask | (1 << (t - 1)), applied));
        }
    }
    for entries in table.values_mut() {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
    }
    table
}

/// v_S(p̄_J): the ≺_Ψ-minimum over all m in {0,1}^d whose monomial sends the
/// highest weight vector to a nonzero multiple of e_J.
pub fn valuation_plucker(
    seq: &IteratedSequence,
    index: &PluckerIndex,
) -> Result<ExponentVector, WedgeError> {
    if index.len() != seq.k() as usize
        || index.indices().iter().any(|&x| x == 0 || x > seq.n())
    {
        return Err(WedgeError::InvalidIndex(index.to_string()));
    }
    // Weight constraint: Σ m_t β_t = (ε_1 + ... + ε_k) − Σ_{j ∈ J} ε_j.
    let mut target = vec![0i64; seq.n() as usize];
    for i in 1..=seq.k() {
        target[(i - 1) as usize] += 1;
    }
    for &j in index.indices() {
        target[(j - 1) as usize] -= 1;
    }
    let d = seq.d();
    let mut best: Option<ExponentVector> = None;
    for mask in 0u64..(1 << d) {
        let mut weight = vec![0i64; seq.n() as usize];
        for (t, root) in seq.roots().iter().enumerate() {
            if (mask >> t) & 1 == 1 {
                weight[(root.i() - 1) as usize] += 1;
                weight[(root.j() - 1) as usize] -= 1;
            }
        }
        if weight != target {
            continue;
        }
        let m = ExponentVector::from_mask(mask, d);
        let w = apply_monomial(&m, seq).expect("mask length matches d");
        if w.coefficient(index) == 0 {
            continue;
        }
        best = Some(match best {
            None => m,
            Some(cur) => {
                if seq.psi_compare(&m, &cur).expect("equal lengths") == std::cmp::Ordering::Less {
                    m
                } else {
                    cur
                }
            }
        });
    }
    best.ok_or_else(|| WedgeError::NoAdmissibleMonomial { index: index.to_string() })
}

/// The weighting matrix M_S: one column per Plücker index (lexicographic
/// order), column J = v_S(p̄_J).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightingMatrix {
    k: u32,
    n: u32,
    d: usize,
    indices: Vec<PluckerIndex>,
    columns: Vec<ExponentVector>,
}

impl WeightingMatrix {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn indices(&self) -> &[PluckerIndex] {
        &self.indices
    }

    pub fn columns(&self) -> &[ExponentVector] {
        &self.columns
    }

    pub fn column(&self, index: &PluckerIndex) -> Option<&ExponentVector> {
        self.indices.iter().position(|i| i == index).map(|p| &self.columns[p])
    }

    /// Rows as an integer matrix: d rows, one entry per Plücker index.
    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.d)
            .map(|r| self.columns.iter().map(|c| c.0[r] as i64).collect())
            .collect()
    }

    /// CSV with a header of `i.j` labels followed by the d rows.
    pub fn to_csv(&self, table_order: bool) -> String {
        let order = self.order(table_order);
        let mut out = String::new();
        out.push_str(&order.iter().map(|&p| self.indices[p].to_string()).join(","));
        out.push('\n');
        for r in 0..self.d {
            out.push_str(&order.iter().map(|&p| self.columns[p].0[r].to_string()).join(","));
            out.push('\n');
        }
        out
    }

    fn order(&self, table_order: bool) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.indices.len()).collect();
        if table_order {
            order.sort_by_key(|&p| {
                self.indices[p].indices().iter().rev().copied().collect::<Vec<_>>()
            });
        }
        order
    }
}

/// Assembles M_S from the coefficient table of the sequence.
pub fn weighting_matrix(seq: &IteratedSequence) -> Result<WeightingMatrix, WedgeError> {
    let table = coefficient_table(seq);
    let indices = plucker_indices(seq.k(), seq.n()).expect("sequence dimensions are valid");
    let mut columns = Vec::with_capacity(indices.len());
    for index in &indices {
        let entries = table
            .get(index)
            .ok_or_else(|| WedgeError::NoAdmissibleMonomial { index: index.to_string() })?;
        let min = seq
            .psi_min(entries.iter().map(|(m, _)| m))
            .expect("table monomials have length d")
            .expect("entry lists are nonempty")
            .clone();
        columns.push(min);
    }
    Ok(WeightingMatrix { k: seq.k(), n: seq.n(), d: seq.d(), indices, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::build_iterated_sequence;

    fn root(i: u32, j: u32) -> PositiveRoot {
        PositiveRoot::new(i, j).unwrap()
    }

    fn table1_s() -> IteratedSequence {
        build_iterated_sequence(2, 4, &[vec![1, 2], vec![1, 2]]).unwrap()
    }

    fn table1_s_prime() -> IteratedSequence {
        build_iterated_sequence(2, 4, &[vec![3, 2], vec![1, 2]]).unwrap()
    }

    #[test]
    fn operator_action_examples() {
        let e12 = WedgeVector::highest_weight(2);
        // f_{2,3}(e1 ∧ e2) = e1 ∧ e3
        let w = apply_root_operator(root(2, 3), &e12);
        assert_eq!(w, WedgeVector::single(PluckerIndex::pair(1, 3), 1));
        // f_{1,3}(e1 ∧ e3) = e3 ∧ e3 = 0
        let e13 = WedgeVector::single(PluckerIndex::pair(1, 3), 1);
        assert!(apply_root_operator(root(1, 3), &e13).is_zero());
        // f_{1,3}(e1 ∧ e2) = e3 ∧ e2 = -e2 ∧ e3
        let w = apply_root_operator(root(1, 3), &e12);
        assert_eq!(w, WedgeVector::single(PluckerIndex::pair(2, 3), -1));
    }

    #[test]
    fn operator_is_nilpotent() {
        // f² = 0 on the wedge power for every root and basis vector.
        for n in 3..=6u32 {
            for idx in plucker_indices(2, n).unwrap() {
                let w = WedgeVector::single(idx, 1);
                for i in 1..n {
                    for j in (i + 1)..=n {
                        let once = apply_root_operator(root(i, j), &w);
                        let twice = apply_root_operator(root(i, j), &once);
                        assert!(twice.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn monomial_examples() {
        let s = table1_s();
        // m = (1,0,0,1) reaches the e3∧e4 weight space.
        let w = apply_monomial(&ExponentVector(vec![1, 0, 0, 1]), &s).unwrap();
        assert_eq!(w.coefficient(&PluckerIndex::pair(3, 4)).abs(), 1);
        assert_eq!(w.terms().count(), 1);

        // m = 0 is the identity.
        let w = apply_monomial(&ExponentVector::zero(4), &s).unwrap();
        assert_eq!(w, WedgeVector::highest_weight(2));

        // f_{1,3} annihilates e1∧e3 mid-composition.
        let sp = table1_s_prime();
        let w = apply_monomial(&ExponentVector(vec![1, 0, 1, 1]), &sp).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn exponent_two_annihilates() {
        let s = table1_s();
        let w = apply_monomial(&ExponentVector(vec![2, 0, 0, 0]), &s).unwrap();
        assert!(w.is_zero());
    }

    #[test]
    fn valuations_match_table1() {
        let s = table1_s();
        let expected = [
            ((1, 2), vec![0, 0, 0, 0]),
            ((1, 3), vec![0, 0, 0, 1]),
            ((2, 3), vec![0, 0, 1, 0]),
            ((1, 4), vec![0, 1, 0, 0]),
            ((2, 4), vec![1, 0, 0, 0]),
            ((3, 4), vec![1, 0, 0, 1]),
        ];
        for ((i, j), v) in expected {
            assert_eq!(
                valuation_plucker(&s, &PluckerIndex::pair(i, j)).unwrap(),
                ExponentVector(v),
                "v_S(p_{i}{j})"
            );
        }

        let sp = table1_s_prime();
        let expected = [
            ((1, 2), vec![0, 0, 0, 0]),
            ((1, 3), vec![0, 0, 0, 1]),
            ((2, 3), vec![0, 0, 1, 0]),
            ((1, 4), vec![1, 0, 0, 1]),
            ((2, 4), vec![1, 0, 1, 0]),
            ((3, 4), vec![0, 1, 1, 0]),
        ];
        for ((i, j), v) in expected {
            assert_eq!(
                valuation_plucker(&sp, &PluckerIndex::pair(i, j)).unwrap(),
                ExponentVector(v),
                "v_S'(p_{i}{j})"
            );
        }
    }

    #[test]
    fn weighting_matrix_table1() {
        let m = weighting_matrix(&table1_s()).unwrap();
        assert_eq!(m.d(), 4);
        let cols: Vec<Vec<u32>> = m.columns().iter().map(|c| c.0.clone()).collect();
        assert_eq!(
            cols,
            vec![
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 1],
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![1, 0, 0, 0],
                vec![1, 0, 0, 1],
            ]
        );

        let mp = weighting_matrix(&table1_s_prime()).unwrap();
        let cols: Vec<Vec<u32>> = mp.columns().iter().map(|c| c.0.clone()).collect();
        assert_eq!(
            cols,
            vec![
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 1],
                vec![1, 0, 0, 1],
                vec![0, 0, 1, 0],
                vec![1, 0, 1, 0],
                vec![0, 1, 1, 0],
            ]
        );
    }

    #[test]
    fn weighting_matrix_n3_base() {
        let s = build_iterated_sequence(2, 3, &[vec![1, 2]]).unwrap();
        let m = weighting_matrix(&s).unwrap();
        let cols: Vec<Vec<u32>> = m.columns().iter().map(|c| c.0.clone()).collect();
        assert_eq!(cols, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn valuation_of_leading_index_is_zero() {
        for s in crate::seq::enumerate_iterated_sequences(2, 5).unwrap() {
            let lead = PluckerIndex::pair(1, 2);
            assert!(valuation_plucker(&s, &lead).unwrap().is_zero());
        }
    }

    #[test]
    fn valuations_are_zero_one_and_satisfy_weight_constraint() {
        for s in crate::seq::enumerate_iterated_sequences(2, 5).unwrap() {
            let m = weighting_matrix(&s).unwrap();
            for (index, col) in m.indices().iter().zip(m.columns()) {
                assert!(col.is_zero_one());
                let mut weight = vec![0i64; s.n() as usize];
                for (t, r) in s.roots().iter().enumerate() {
                    weight[(r.i() - 1) as usize] += col.0[t] as i64;
                    weight[(r.j() - 1) as usize] -= col.0[t] as i64;
                }
                let mut target = vec![0i64; s.n() as usize];
                target[0] += 1;
                target[1] += 1;
                for &j in index.indices() {
                    target[(j - 1) as usize] -= 1;
                }
                assert_eq!(weight, target, "weight constraint for {index}");
            }
        }
    }

    #[test]
    fn matrix_has_full_rank() {
        for s in crate::seq::enumerate_iterated_sequences(2, 5).unwrap() {
            let m = weighting_matrix(&s).unwrap();
            assert_eq!(crate::linalg::integer_rank(&m.rows()), s.d());
        }
    }

    #[test]
    fn coefficient_table_agrees_with_direct_valuation() {
        let s = build_iterated_sequence(2, 5, &[vec![3, 1], vec![2, 3], vec![2, 1]]).unwrap();
        let m = weighting_matrix(&s).unwrap();
        for index in plucker_indices(2, 5).unwrap() {
            assert_eq!(&valuation_plucker(&s, &index).unwrap(), m.column(&index).unwrap());
        }
    }

    #[test]
    fn csv_output() {
        let m = weighting_matrix(&table1_s()).unwrap();
        let csv = m.to_csv(false);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "1.2,1.3,1.4,2.3,2.4,3.4");
        assert_eq!(lines.next().unwrap(), "0,0,0,0,1,1");
        let csv = m.to_csv(true);
        assert!(csv.starts_with("1.2,1.3,2.3,1.4,2.4,3.4\n"));
    }
}
