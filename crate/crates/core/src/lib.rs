//! Exact combinatorics of iterated birational sequences for Grassmannians.
//!
//! The crate computes valuations of Plücker coordinates attached to an
//! iterated sequence of positive roots, both through the wedge-power
//! representation ([`wedge`]) and through minors of a generic unipotent
//! matrix ([`poly`]). It compares the induced initial forms of the Plücker
//! relations with the weight vectors of trivalent trees ([`plucker`],
//! [`trees`]) and certifies the combinatorics of the resulting lattice
//! polytopes with exact rational linear programming ([`polytope`], [`lp`]).
//!
//! All arithmetic is exact: integers, big integers for polynomial
//! coefficients and rationals for the LP kernel. No floating point is used
//! anywhere.

pub mod linalg;
pub mod lp;
pub mod plucker;
pub mod poly;
pub mod polytope;
pub mod seq;
pub mod trees;
pub mod wedge;

pub use plucker::{
    classify_initial_forms, initial_form_matrix, initial_form_weight, plucker_indices,
    plucker_indices_table_order, plucker_relations, verify_proposition, InitialForm,
    InitialFormCounts, PluckerError, PluckerIndex, PluckerRelation, PropositionReport,
    RelationCheck, RelationTag, WeightVector,
};
pub use polytope::{
    affine_dimension, interior_lattice_points, is_vertex, no_polytope_report, InteriorReport,
    PointSet, PolytopeError, PolytopeReport,
};
pub use seq::{
    build_iterated_sequence, enumerate_iterated_sequences, parse_steps, sample_iterated_sequence,
    ExponentVector, IteratedSequence, PositiveRoot, SeqError,
};
pub use trees::{
    canonical_form, enumerate_labeled_trees, enumerate_tree_classes, find_cherries,
    leaf_isomorphism, permute_tree, permute_weight, random_labeled_tree, sequence_from_tree,
    tree_from_sequence, tree_graph_path, tree_weight_vector, CanonicalTree, LabeledTree,
    Permutation, TreeError, TreeWeightVector,
};
pub use wedge::{
    apply_monomial, apply_root_operator, coefficient_table, valuation_plucker, weighting_matrix,
    WedgeError, WedgeVector, WeightingMatrix,
};
pub use linalg::integer_rank;
pub use lp::{lp_feasible, rat, solve_min, Feasibility, LpError, LpOutcome, Rat};
pub use poly::{
    generic_matrix, lowest_term_valuation, minor_of, minor_polynomial, GenericMatrix, PolyError,
    SparsePoly,
};
