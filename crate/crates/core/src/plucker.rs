//! Plücker index sets, the quadratic generators of the Plücker ideal, and
//! initial forms with respect to weight vectors and weighting matrices.
//!
//! For k=2 the generators are the three-term relations
//! R_{r,s,u,v} = p_{rs}p_{uv} - p_{ru}p_{sv} + p_{rv}p_{su} with
//! r < s < u < v, one per 4-subset of [n]. For general k one relation is
//! produced per pair (i, j) with i in I_{k-1,n} and j in I_{k+1,n}; terms
//! with a repeated index are dropped and relations whose terms cancel are
//! omitted.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num::rational::Ratio;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::seq::IteratedSequence;
use crate::trees::{tree_from_sequence, tree_weight_vector};
use crate::wedge::{weighting_matrix, WeightingMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PluckerError {
    #[error("invalid parameters k={k}, n={n}: need 1 <= k < n")]
    InvalidParams { k: u32, n: u32 },
    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("operation requires k=2, got k={k}")]
    RequiresK2 { k: u32 },
    #[error("index {0} does not belong to the given matrix")]
    UnknownIndex(PluckerIndex),
}

/// A strictly increasing k-tuple from [n], printed as `i.j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PluckerIndex(Vec<u32>);

impl PluckerIndex {
    /// Builds an index from entries that must be strictly increasing.
    pub fn new(indices: Vec<u32>) -> Self {
        assert!(
            indices.windows(2).all(|w| w[0] < w[1]) && indices.first().map_or(false, |&f| f >= 1),
            "Plücker index must be strictly increasing and 1-based: {indices:?}"
        );
        PluckerIndex(indices)
    }

    pub fn pair(i: u32, j: u32) -> Self {
        PluckerIndex::new(vec![i, j])
    }

    /// Sorts arbitrary distinct entries, returning the sign of the sorting
    /// permutation, or None when an entry repeats.
    pub fn sorted_with_sign(mut indices: Vec<u32>) -> Option<(Self, i8)> {
        let mut sign = 1i8;
        for a in 1..indices.len() {
            let mut b = a;
            while b > 0 && indices[b - 1] > indices[b] {
                indices.swap(b - 1, b);
                sign = -sign;
                b -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((PluckerIndex(indices), sign))
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.0.contains(&x)
    }
}

impl fmt::Display for PluckerIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.iter().map(|i| i.to_string()).join("."))
    }
}

impl Serialize for PluckerIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for i in &self.0 {
            seq.serialize_element(i)?;
        }
        seq.end()
    }
}

/// All strictly increasing k-tuples from [n] in lexicographic order.
pub fn plucker_indices(k: u32, n: u32) -> Result<Vec<PluckerIndex>, PluckerError> {
    if k == 0 || k >= n {
        return Err(PluckerError::InvalidParams { k, n });
    }
    Ok((1..=n)
        .combinations(k as usize)
        .map(PluckerIndex::new)
        .collect())
}

/// The same index set in the row order of printed valuation tables:
/// sorted by reversed tuple, i.e. (1,2),(1,3),(2,3),(1,4),(2,4),(3,4).
pub fn plucker_indices_table_order(k: u32, n: u32) -> Result<Vec<PluckerIndex>, PluckerError> {
    let mut indices = plucker_indices(k, n)?;
    indices.sort_by(|a, b| {
        let ra: Vec<u32> = a.indices().iter().rev().copied().collect();
        let rb: Vec<u32> = b.indices().iter().rev().copied().collect();
        ra.cmp(&rb)
    });
    Ok(indices)
}

/// The generating data of a quadratic Plücker relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RelationTag {
    /// k=2 three-term relation for the 4-subset r < s < u < v.
    Quadruple { r: u32, s: u32, u: u32, v: u32 },
    /// General-k relation for i in I_{k-1,n}, j in I_{k+1,n}.
    Pair { i: Vec<u32>, j: Vec<u32> },
}

impl fmt::Display for RelationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationTag::Quadruple { r, s, u, v } => write!(f, "R[{r}.{s}.{u}.{v}]"),
            RelationTag::Pair { i, j } => write!(
                f,
                "R[{}|{}]",
                i.iter().map(|x| x.to_string()).join("."),
                j.iter().map(|x| x.to_string()).join(".")
            ),
        }
    }
}

/// One term of a quadratic relation: coefficient times p_A p_B.
pub type RelationTerm = (i8, PluckerIndex, PluckerIndex);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PluckerRelation {
    pub tag: RelationTag,
    pub terms: Vec<RelationTerm>,
}

impl fmt::Display for PluckerRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.tag, format_terms(&self.terms))
    }
}

pub(crate) fn format_terms(terms: &[RelationTerm]) -> String {
    terms
        .iter()
        .map(|(c, a, b)| format!("{}p[{a}]*p[{b}]", if *c >= 0 { "+" } else { "-" }))
        .join(" ")
}

/// Quadratic generators of the Plücker ideal.
pub fn plucker_relations(k: u32, n: u32) -> Result<Vec<PluckerRelation>, PluckerError> {
    if k == 0 || k >= n {
        return Err(PluckerError::InvalidParams { k, n });
    }
    if k == 2 {
        // One three-term relation per 4-subset.
        return Ok((1..=n)
            .combinations(4)
            .map(|q| {
                let (r, s, u, v) = (q[0], q[1], q[2], q[3]);
                PluckerRelation {
                    tag: RelationTag::Quadruple { r, s, u, v },
                    terms: vec![
                        (1, PluckerIndex::pair(r, s), PluckerIndex::pair(u, v)),
                        (-1, PluckerIndex::pair(r, u), PluckerIndex::pair(s, v)),
                        (1, PluckerIndex::pair(r, v), PluckerIndex::pair(s, u)),
                    ],
                }
            })
            .collect());
    }
    let mut relations = Vec::new();
    for i in (1..=n).combinations((k - 1) as usize) {
        for j in (1..=n).combinations((k + 1) as usize) {
            // Accumulate coefficients per unordered monomial so identically
            // cancelling terms drop out.
            let mut acc: BTreeMap<(PluckerIndex, PluckerIndex), i64> = BTreeMap::new();
            for (s, &js) in j.iter().enumerate() {
                if i.contains(&js) {
                    continue; // p_{i ∪ js} = 0
                }
                let r = i.iter().filter(|&&x| x < js).count();
                let sort_sign = if (k as usize - 1 - r) % 2 == 0 { 1i64 } else { -1 };
                let alt_sign = if s % 2 == 0 { 1i64 } else { -1 };
                let mut with = i.clone();
                with.push(js);
                with.sort_unstable();
                let a = PluckerIndex::new(with);
                let b = PluckerIndex::new(
                    j.iter().copied().filter(|&x| x != js).collect::<Vec<_>>(),
                );
                let key = if a <= b { (a, b) } else { (b, a) };
                *acc.entry(key).or_insert(0) += alt_sign * sort_sign;
            }
            let terms: Vec<RelationTerm> = acc
                .into_iter()
                .filter(|&(_, c)| c != 0)
                .map(|((a, b), c)| {
                    debug_assert!(c.abs() == 1);
                    (c as i8, a, b)
                })
                .collect();
            if !terms.is_empty() {
                relations.push(PluckerRelation { tag: RelationTag::Pair { i: i.clone(), j: j.clone() }, terms });
            }
        }
    }
    Ok(relations)
}

/// An exact rational weight vector indexed by I_{k,n} in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    k: u32,
    n: u32,
    indices: Vec<PluckerIndex>,
    entries: Vec<Ratio<i64>>,
    position: BTreeMap<PluckerIndex, usize>,
}

impl WeightVector {
    pub fn new(k: u32, n: u32, entries: Vec<Ratio<i64>>) -> Result<Self, PluckerError> {
        let indices = plucker_indices(k, n)?;
        if entries.len() != indices.len() {
            return Err(PluckerError::WeightLength { expected: indices.len(), got: entries.len() });
        }
        let position = indices.iter().cloned().zip(0..).collect();
        Ok(WeightVector { k, n, indices, entries, position })
    }

    pub fn from_integers(k: u32, n: u32, entries: &[i64]) -> Result<Self, PluckerError> {
        WeightVector::new(k, n, entries.iter().map(|&e| Ratio::from_integer(e)).collect())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn entries(&self) -> &[Ratio<i64>] {
        &self.entries
    }

    pub fn get(&self, index: &PluckerIndex) -> Result<Ratio<i64>, PluckerError> {
        self.position
            .get(index)
            .map(|&p| self.entries[p])
            .ok_or_else(|| PluckerError::UnknownIndex(index.clone()))
    }
}

/// Surviving terms of a relation under a weight or matrix initial form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialForm {
    pub tag: RelationTag,
    pub terms: Vec<RelationTerm>,
}

impl InitialForm {
    /// Index pairs of the surviving terms, coefficient ignored.
    pub fn term_set(&self) -> Vec<(PluckerIndex, PluckerIndex)> {
        self.terms.iter().map(|(_, a, b)| (a.clone(), b.clone())).collect()
    }
}

impl fmt::Display for InitialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(&self.terms))
    }
}

/// Terms of R whose total weight w_A + w_B attains the minimum.
pub fn initial_form_weight(
    w: &WeightVector,
    relation: &PluckerRelation,
) -> Result<InitialForm, PluckerError> {
    let weights: Vec<Ratio<i64>> = relation
        .terms
        .iter()
        .map(|(_, a, b)| Ok(w.get(a)? + w.get(b)?))
        .collect::<Result<_, PluckerError>>()?;
    let min = weights.iter().min().expect("relations are nonempty").clone();
    let terms = relation
        .terms
        .iter()
        .zip(&weights)
        .filter(|(_, wt)| **wt == min)
        .map(|(t, _)| t.clone())
        .collect();
    Ok(InitialForm { tag: relation.tag.clone(), terms })
}

/// Terms of R whose summed valuation column is ≺_Ψ-minimal.
pub fn initial_form_matrix(
    matrix: &WeightingMatrix,
    relation: &PluckerRelation,
    seq: &IteratedSequence,
) -> Result<InitialForm, PluckerError> {
    let sums: Vec<crate::seq::ExponentVector> = relation
        .terms
        .iter()
        .map(|(_, a, b)| {
            let ca = matrix.column(a).ok_or_else(|| PluckerError::UnknownIndex(a.clone()))?;
            let cb = matrix.column(b).ok_or_else(|| PluckerError::UnknownIndex(b.clone()))?;
            Ok(ca.add(cb))
        })
        .collect::<Result<_, PluckerError>>()?;
    let min = seq
        .psi_min(sums.iter())
        .expect("columns share the sequence length")
        .expect("relations are nonempty")
        .clone();
    let terms = relation
        .terms
        .iter()
        .zip(&sums)
        .filter(|(_, s)| **s == min)
        .map(|(t, _)| t.clone())
        .collect();
    Ok(InitialForm { tag: relation.tag.clone(), terms })
}

/// Counts of initial forms by surviving-term cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct InitialFormCounts {
    pub monomial_count: usize,
    pub binomial_count: usize,
    pub trinomial_count: usize,
}

pub fn classify_initial_forms(forms: &[InitialForm]) -> InitialFormCounts {
    let mut counts = InitialFormCounts::default();
    for form in forms {
        match form.terms.len() {
            1 => counts.monomial_count += 1,
            2 => counts.binomial_count += 1,
            3 => counts.trinomial_count += 1,
            _ => {}
        }
    }
    counts
}

/// Per-relation comparison of the matrix-side and tree-side initial forms.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub relation: RelationTag,
    pub init_matrix: Vec<(i8, PluckerIndex, PluckerIndex)>,
    pub init_tree: Vec<(i8, PluckerIndex, PluckerIndex)>,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropositionReport {
    pub checks: Vec<RelationCheck>,
}

impl PropositionReport {
    pub fn all_agree(&self) -> bool {
        self.checks.iter().all(|c| c.agree)
    }

    pub fn disagreements(&self) -> usize {
        self.checks.iter().filter(|c| !c.agree).count()
    }
}

/// Checks init_{M_S}(R) = init_{w_{T_S}}(R) for every three-term generator.
pub fn verify_proposition(seq: &IteratedSequence) -> Result<PropositionReport, PluckerError> {
    if seq.k() != 2 {
        return Err(PluckerError::RequiresK2 { k: seq.k() });
    }
    let matrix = weighting_matrix(seq).expect("validated iterated sequences have valuations");
    let (tree, _) = tree_from_sequence(seq).expect("k=2 checked above");
    let w = tree_weight_vector(&tree).to_weight_vector();
    let relations = plucker_relations(2, seq.n())?;
    let mut checks = Vec::with_capacity(relations.len());
    for relation in &relations {
        let by_matrix = initial_form_matrix(&matrix, relation, seq)?;
        let by_tree = initial_form_weight(&w, relation)?;
        let agree = by_matrix.term_set() == by_tree.term_set();
        checks.push(RelationCheck {
            relation: relation.tag.clone(),
            init_matrix: by_matrix.terms,
            init_tree: by_tree.terms,
            agree,
        });
    }
    Ok(PropositionReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::build_iterated_sequence;

    #[test]
    fn indices_examples() {
        let idx = plucker_indices(2, 4).unwrap();
        let expected: Vec<PluckerIndex> = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
            .iter()
            .map(|&(i, j)| PluckerIndex::pair(i, j))
            .collect();
        assert_eq!(idx, expected);

        let idx1 = plucker_indices(1, 3).unwrap();
        assert_eq!(idx1.len(), 3);
        assert_eq!(idx1[0], PluckerIndex::new(vec![1]));

        let idx3 = plucker_indices(3, 5).unwrap();
        assert_eq!(idx3.len(), 10);
        assert_eq!(idx3[0], PluckerIndex::new(vec![1, 2, 3]));

        assert!(plucker_indices(4, 4).is_err());
    }

    #[test]
    fn table_order_matches_printed_tables() {
        let idx = plucker_indices_table_order(2, 4).unwrap();
        let expected: Vec<PluckerIndex> = [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]
            .iter()
            .map(|&(i, j)| PluckerIndex::pair(i, j))
            .collect();
        assert_eq!(idx, expected);
    }

    #[test]
    fn k2_relations() {
        let rels = plucker_relations(2, 4).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(
            rels[0].terms,
            vec![
                (1, PluckerIndex::pair(1, 2), PluckerIndex::pair(3, 4)),
                (-1, PluckerIndex::pair(1, 3), PluckerIndex::pair(2, 4)),
                (1, PluckerIndex::pair(1, 4), PluckerIndex::pair(2, 3)),
            ]
        );
        assert_eq!(plucker_relations(2, 5).unwrap().len(), 5);
        assert_eq!(plucker_relations(2, 6).unwrap().len(), 15);
    }

    /// Independent oracle: every generated relation must vanish when the
    /// Plücker variables are evaluated as actual minors of a matrix.
    #[test]
    fn relations_vanish_on_minors() {
        use rand::Rng as _;
        use rand::SeedableRng as _;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for &(k, n) in &[(2u32, 5u32), (3, 6), (4, 6)] {
            // Random n x k integer matrix; p_J = det of rows J.
            let mat: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..k).map(|_| rng.gen_range(-5i64..=5)).collect())
                .collect();
            let mut minors: BTreeMap<PluckerIndex, i64> = BTreeMap::new();
            for idx in plucker_indices(k, n).unwrap() {
                let rows: Vec<&Vec<i64>> =
                    idx.indices().iter().map(|&r| &mat[(r - 1) as usize]).collect();
                minors.insert(idx, det_i64(&rows));
            }
            for rel in plucker_relations(k, n).unwrap() {
                let value: i64 = rel
                    .terms
                    .iter()
                    .map(|(c, a, b)| *c as i64 * minors[a] * minors[b])
                    .sum();
                assert_eq!(value, 0, "relation {rel} does not vanish");
            }
        }
    }

    fn det_i64(rows: &[&Vec<i64>]) -> i64 {
        let k = rows.len();
        if k == 1 {
            return rows[0][0];
        }
        let mut acc = 0i64;
        for (r, row) in rows.iter().enumerate() {
            let rest: Vec<&Vec<i64>> =
                rows.iter().enumerate().filter(|&(x, _)| x != r).map(|(_, v)| *v).collect();
            let minor = det_minor(&rest, 1);
            let sign = if r % 2 == 0 { 1 } else { -1 };
            acc += sign * row[0] * minor;
        }
        acc
    }

    fn det_minor(rows: &[&Vec<i64>], col_offset: usize) -> i64 {
        if rows[0].len() - col_offset == 1 {
            return rows[0][col_offset];
        }
        let mut acc = 0i64;
        for (r, row) in rows.iter().enumerate() {
            let rest: Vec<&Vec<i64>> =
                rows.iter().enumerate().filter(|&(x, _)| x != r).map(|(_, v)| *v).collect();
            let sign = if r % 2 == 0 { 1 } else { -1 };
            acc += sign * row[col_offset] * det_minor(&rest, col_offset + 1);
        }
        acc
    }

    #[test]
    fn general_k_drops_degenerate_relations() {
        // For i ⊂ j the relation cancels identically and must be omitted.
        let rels = plucker_relations(3, 5).unwrap();
        for rel in &rels {
            assert!(!rel.terms.is_empty());
            if let RelationTag::Pair { i, j } = &rel.tag {
                assert!(!i.iter().all(|x| j.contains(x)), "degenerate relation kept: {rel}");
            }
        }
    }

    #[test]
    fn initial_form_weight_examples() {
        let rel = &plucker_relations(2, 4).unwrap()[0];
        // Tree with cherries {1,4},{2,3}: w14 = w23 = 0, all others -1.
        let w = WeightVector::from_integers(2, 4, &[-1, -1, 0, 0, -1, -1]).unwrap();
        let form = initial_form_weight(&w, rel).unwrap();
        assert_eq!(
            form.terms,
            vec![
                (1, PluckerIndex::pair(1, 2), PluckerIndex::pair(3, 4)),
                (-1, PluckerIndex::pair(1, 3), PluckerIndex::pair(2, 4)),
            ]
        );

        let zero = WeightVector::from_integers(2, 4, &[0; 6]).unwrap();
        assert_eq!(initial_form_weight(&zero, rel).unwrap().terms.len(), 3);

        let generic = WeightVector::from_integers(2, 4, &[0, 5, 9, 1, 2, 3]).unwrap();
        let form = initial_form_weight(&generic, rel).unwrap();
        assert_eq!(form.terms.len(), 1);
    }

    #[test]
    fn initial_form_matrix_table1() {
        let s = build_iterated_sequence(2, 4, &[vec![1, 2], vec![1, 2]]).unwrap();
        let m = weighting_matrix(&s).unwrap();
        let rel = &plucker_relations(2, 4).unwrap()[0];
        let form = initial_form_matrix(&m, rel, &s).unwrap();
        assert_eq!(
            form.terms,
            vec![
                (1, PluckerIndex::pair(1, 2), PluckerIndex::pair(3, 4)),
                (-1, PluckerIndex::pair(1, 3), PluckerIndex::pair(2, 4)),
            ]
        );
    }

    /// The middle-pairing quartet split keeps the outer terms, whose
    /// relation coefficients are both +1. Initial forms therefore need not
    /// have opposite signs.
    #[test]
    fn initial_form_matrix_outer_pair() {
        let s = build_iterated_sequence(2, 4, &[vec![2, 1], vec![1, 2]]).unwrap();
        let m = weighting_matrix(&s).unwrap();
        let rel = &plucker_relations(2, 4).unwrap()[0];
        let form = initial_form_matrix(&m, rel, &s).unwrap();
        assert_eq!(
            form.terms,
            vec![
                (1, PluckerIndex::pair(1, 2), PluckerIndex::pair(3, 4)),
                (1, PluckerIndex::pair(1, 4), PluckerIndex::pair(2, 3)),
            ]
        );
    }

    #[test]
    fn classify_counts() {
        let rel = &plucker_relations(2, 4).unwrap()[0];
        let w0 = WeightVector::from_integers(2, 4, &[0; 6]).unwrap();
        let trin = initial_form_weight(&w0, rel).unwrap();
        let generic = WeightVector::from_integers(2, 4, &[0, 5, 9, 1, 2, 3]).unwrap();
        let mono = initial_form_weight(&generic, rel).unwrap();
        let counts = classify_initial_forms(&[trin, mono]);
        assert_eq!(counts.trinomial_count, 1);
        assert_eq!(counts.monomial_count, 1);
        assert_eq!(counts.binomial_count, 0);
    }

    #[test]
    fn verify_proposition_small() {
        let s = build_iterated_sequence(2, 4, &[vec![1, 2], vec![1, 2]]).unwrap();
        let report = verify_proposition(&s).unwrap();
        assert_eq!(report.checks.len(), 1);
        assert!(report.all_agree());

        let s6 =
            build_iterated_sequence(2, 6, &[vec![4, 5], vec![2, 3], vec![2, 3], vec![1, 2]])
                .unwrap();
        let report = verify_proposition(&s6).unwrap();
        assert_eq!(report.checks.len(), 15);
        assert!(report.all_agree());
    }

    #[test]
    fn verify_proposition_sweep_n5() {
        for s in crate::seq::enumerate_iterated_sequences(2, 5).unwrap() {
            let report = verify_proposition(&s).unwrap();
            assert_eq!(report.checks.len(), 5);
            assert!(report.all_agree(), "disagreement for {s}");
        }
    }
}
