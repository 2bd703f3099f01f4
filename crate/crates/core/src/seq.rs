//! Positive roots, the height function, the Ψ-weighted reverse lexicographic
//! order and iterated sequences.
//!
//! An iterated sequence for Gr(k, Cⁿ) is stored as one step per level
//! l = n, n-1, ..., k+1. The step at level l is an ordered tuple of k
//! distinct indices (i_1, ..., i_k) ⊂ [l-1] contributing the root block
//! (ε_{i_1} - ε_l, ..., ε_{i_k} - ε_l). The base block at level k+1 is
//! forced to be a permutation of [k].

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("invalid root indices ({i},{j}): need 1 <= i < j")]
    InvalidRoot { i: u32, j: u32 },
    #[error("invalid dimensions k={k}, n={n}: need 1 <= k < n")]
    InvalidDims { k: u32, n: u32 },
    #[error("expected {expected} steps (levels {n} down to {base}), got {got}")]
    WrongStepCount { expected: usize, got: usize, n: u32, base: u32 },
    #[error("step at level {level} must have {k} indices, got {got}")]
    StepWrongLength { level: u32, k: u32, got: usize },
    #[error("repeated index in step at level {level}")]
    RepeatedIndex { level: u32 },
    #[error("index {index} out of range [1,{max}] in step at level {level}")]
    IndexOutOfRange { level: u32, index: u32, max: u32 },
    #[error("base step at level {level} is not a permutation of 1..={k}")]
    BaseNotPermutation { level: u32, k: u32 },
    #[error("exponent vector has length {got}, sequence has d={expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("enumeration is only implemented for k=2, got k={k}")]
    EnumerationUnsupported { k: u32 },
    #[error("cannot parse sequence: {0}")]
    Parse(String),
}

/// A positive root ε_i - ε_j with 1 <= i < j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositiveRoot {
    i: u32,
    j: u32,
}

impl PositiveRoot {
    pub fn new(i: u32, j: u32) -> Result<Self, SeqError> {
        if i == 0 || i >= j {
            return Err(SeqError::InvalidRoot { i, j });
        }
        Ok(PositiveRoot { i, j })
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// height(ε_i - ε_j) = j - i.
    pub fn height(&self) -> i64 {
        (self.j - self.i) as i64
    }
}

impl fmt::Display for PositiveRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}-e{}", self.i, self.j)
    }
}

/// An exponent vector m in Z_{>=0}^d; coordinate t pairs with the t-th root
/// of the sequence it is used with.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentVector(pub Vec<u32>);

impl ExponentVector {
    pub fn zero(d: usize) -> Self {
        ExponentVector(vec![0; d])
    }

    /// Builds the 0/1 vector whose support is the set bits of `mask`
    /// (bit t-1 toggles coordinate t).
    pub fn from_mask(mask: u64, d: usize) -> Self {
        ExponentVector((0..d).map(|t| ((mask >> t) & 1) as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_zero_one(&self) -> bool {
        self.0.iter().all(|&x| x <= 1)
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        debug_assert_eq!(self.len(), other.len());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (t, x) in self.0.iter().enumerate() {
            if t > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// An iterated sequence of positive roots for Gr(k, Cⁿ).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IteratedSequence {
    k: u32,
    n: u32,
    roots: Vec<PositiveRoot>,
    /// steps[0] is the step at level n, steps.last() the base step at level k+1.
    steps: Vec<Vec<u32>>,
}

impl IteratedSequence {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// d = k(n-k), the number of roots.
    pub fn d(&self) -> usize {
        (self.k * (self.n - self.k)) as usize
    }

    /// Roots in sequence order: level-descending blocks of length k.
    pub fn roots(&self) -> &[PositiveRoot] {
        &self.roots
    }

    /// Steps for levels n, n-1, ..., k+1 in that order.
    pub fn steps(&self) -> &[Vec<u32>] {
        &self.steps
    }

    /// The step at level l (k+1 <= l <= n).
    pub fn step_at_level(&self, l: u32) -> &[u32] {
        assert!(l > self.k && l <= self.n, "level {l} out of range");
        &self.steps[(self.n - l) as usize]
    }

    /// Ψ_S(m) = Σ_t m_t · height(β_t).
    pub fn psi_weight(&self, m: &ExponentVector) -> Result<i64, SeqError> {
        if m.len() != self.d() {
            return Err(SeqError::LengthMismatch { expected: self.d(), got: m.len() });
        }
        Ok(self
            .roots
            .iter()
            .zip(&m.0)
            .map(|(root, &e)| e as i64 * root.height())
            .sum())
    }

    /// Compares a and b in the Ψ-weighted reverse lexicographic order:
    /// a ≺ b iff Ψ(a) < Ψ(b), or Ψ(a) = Ψ(b) and a ><sub>lex</sub> b.
    pub fn psi_compare(&self, a: &ExponentVector, b: &ExponentVector) -> Result<Ordering, SeqError> {
        let pa = self.psi_weight(a)?;
        let pb = self.psi_weight(b)?;
        Ok(match pa.cmp(&pb) {
            Ordering::Equal => b.0.cmp(&a.0),
            ord => ord,
        })
    }

    /// The ≺_Ψ-minimum of a nonempty collection.
    pub fn psi_min<'a, I>(&self, items: I) -> Result<Option<&'a ExponentVector>, SeqError>
    where
        I: IntoIterator<Item = &'a ExponentVector>,
    {
        let mut best: Option<&ExponentVector> = None;
        for item in items {
            best = Some(match best {
                None => item,
                Some(cur) => {
                    if self.psi_compare(item, cur)? == Ordering::Less {
                        item
                    } else {
                        cur
                    }
                }
            });
        }
        Ok(best)
    }

    /// Text form `k=2 n=6 steps=4.5;2.3;2.3;1.2` (levels descending,
    /// indices dot-separated).
    pub fn to_text(&self) -> String {
        let steps = self
            .steps
            .iter()
            .map(|s| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("."))
            .collect::<Vec<_>>()
            .join(";");
        format!("k={} n={} steps={}", self.k, self.n, steps)
    }

    pub fn from_text(text: &str) -> Result<Self, SeqError> {
        let mut k = None;
        let mut n = None;
        let mut steps: Option<Vec<Vec<u32>>> = None;
        for token in text.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| SeqError::Parse(format!("expected key=value, got `{token}`")))?;
            match key {
                "k" => {
                    k = Some(value.parse::<u32>().map_err(|e| SeqError::Parse(e.to_string()))?)
                }
                "n" => {
                    n = Some(value.parse::<u32>().map_err(|e| SeqError::Parse(e.to_string()))?)
                }
                "steps" => steps = Some(parse_steps(value)?),
                other => return Err(SeqError::Parse(format!("unknown key `{other}`"))),
            }
        }
        let k = k.ok_or_else(|| SeqError::Parse("missing k=".into()))?;
        let n = n.ok_or_else(|| SeqError::Parse("missing n=".into()))?;
        let steps = steps.ok_or_else(|| SeqError::Parse("missing steps=".into()))?;
        build_iterated_sequence(k, n, &steps)
    }
}

/// Parses `4.5;2.3;2.3;1.2` into step tuples.
pub fn parse_steps(value: &str) -> Result<Vec<Vec<u32>>, SeqError> {
    value
        .split(';')
        .map(|part| {
            part.split('.')
                .map(|x| x.trim().parse::<u32>().map_err(|e| SeqError::Parse(e.to_string())))
                .collect()
        })
        .collect()
}

impl fmt::Display for IteratedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    k: u32,
    n: u32,
    steps: Vec<Vec<u32>>,
}

impl Serialize for IteratedSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SequenceRepr { k: self.k, n: self.n, steps: self.steps.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IteratedSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SequenceRepr::deserialize(deserializer)?;
        build_iterated_sequence(repr.k, repr.n, &repr.steps).map_err(D::Error::custom)
    }
}

/// Builds and validates an iterated sequence from its steps, given for
/// levels n down to k+1.
pub fn build_iterated_sequence(
    k: u32,
    n: u32,
    steps: &[Vec<u32>],
) -> Result<IteratedSequence, SeqError> {
    if k == 0 || k >= n {
        return Err(SeqError::InvalidDims { k, n });
    }
    let expected = (n - k) as usize;
    if steps.len() != expected {
        return Err(SeqError::WrongStepCount { expected, got: steps.len(), n, base: k + 1 });
    }
    let mut roots = Vec::with_capacity((k * (n - k)) as usize);
    for (pos, step) in steps.iter().enumerate() {
        let level = n - pos as u32;
        if step.len() != k as usize {
            return Err(SeqError::StepWrongLength { level, k, got: step.len() });
        }
        for (a, &idx) in step.iter().enumerate() {
            if idx == 0 || idx > level - 1 {
                return Err(SeqError::IndexOutOfRange { level, index: idx, max: level - 1 });
            }
            if step[..a].contains(&idx) {
                return Err(SeqError::RepeatedIndex { level });
            }
            roots.push(PositiveRoot::new(idx, level)?);
        }
        if level == k + 1 {
            // k distinct indices in [k] are automatically a permutation of
            // [k]; kept as an explicit check of the base-block contract.
            let mut seen = vec![false; k as usize];
            for &idx in step {
                seen[(idx - 1) as usize] = true;
            }
            if seen.iter().any(|&s| !s) {
                return Err(SeqError::BaseNotPermutation { level, k });
            }
        }
    }
    Ok(IteratedSequence { k, n, roots, steps: steps.to_vec() })
}

/// Streams every iterated sequence for Gr(2, Cⁿ) with PBW-type base block.
/// The count is Π_{l=3}^{n} (l-1)(l-2).
pub fn enumerate_iterated_sequences(
    k: u32,
    n: u32,
) -> Result<impl Iterator<Item = IteratedSequence>, SeqError> {
    if k != 2 {
        return Err(SeqError::EnumerationUnsupported { k });
    }
    if n < 3 {
        return Err(SeqError::InvalidDims { k, n });
    }
    // One odometer digit per level l = n..3; digit at level l enumerates
    // ordered pairs (i, j), i != j, from [l-1].
    let levels: Vec<u32> = (3..=n).rev().collect();
    let pairs_per_level: Vec<Vec<Vec<u32>>> = levels
        .iter()
        .map(|&l| {
            let mut pairs = Vec::new();
            for i in 1..l {
                for j in 1..l {
                    if i != j {
                        pairs.push(vec![i, j]);
                    }
                }
            }
            pairs
        })
        .collect();
    let mut digits = vec![0usize; levels.len()];
    let mut done = false;
    Ok(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let steps: Vec<Vec<u32>> = digits
            .iter()
            .zip(&pairs_per_level)
            .map(|(&d, pairs)| pairs[d].clone())
            .collect();
        let seq = build_iterated_sequence(2, n, &steps)
            .expect("enumerated steps are valid by construction");
        // Advance the odometer, last digit fastest.
        done = true;
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < pairs_per_level[pos].len() {
                done = false;
                break;
            }
            digits[pos] = 0;
        }
        Some(seq)
    }))
}

/// Draws a uniformly random iterated sequence (PBW base for k=2; random
/// distinct step indices for general k).
pub fn sample_iterated_sequence<R: rand::Rng>(
    k: u32,
    n: u32,
    rng: &mut R,
) -> Result<IteratedSequence, SeqError> {
    if k == 0 || k >= n {
        return Err(SeqError::InvalidDims { k, n });
    }
    let mut steps = Vec::new();
    for l in ((k + 1)..=n).rev() {
        let mut pool: Vec<u32> = (1..l).collect();
        // Partial Fisher-Yates: the first k entries become the step.
        for a in 0..k as usize {
            let b = rng.gen_range(a..pool.len());
            pool.swap(a, b);
        }
        steps.push(pool[..k as usize].to_vec());
    }
    build_iterated_sequence(k, n, &steps)
}
