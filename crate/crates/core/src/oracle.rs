//! Brute-force ground truth by enumeration of closed words.
//!
//! A closed word `i_1 i_2 … i_k i_1` is a closed walk with `k` steps. Words
//! that differ by a renaming of the letters contribute equally to
//! `E[tr X^k]`, so only one canonical word per class is enumerated: letters
//! are numbered by first occurrence, which makes the words exactly the
//! restricted growth strings of length `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{int, EnsembleParams, ParamError};

/// Largest word length the enumeration accepts.
pub const MAX_WORD_LENGTH: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("word length must be at least 1")]
    EmptyWord,
    #[error("word length {k} exceeds the enumeration bound {max}")]
    TooLong { k: usize, max: usize },
    #[error("exact moments are only rational for even k, got k = {0}")]
    OddOrder(usize),
    #[error("matrix size must be positive")]
    ZeroSize,
    #[error("moment model has no {kind} moment of order {order}")]
    MissingMoment { kind: &'static str, order: String },
    #[error("invalid moment model: {0}")]
    InvalidModel(String),
    #[error("invalid letter {0:?} in word")]
    InvalidLetter(char),
    #[error(transparent)]
    Params(#[from] ParamError),
}

/// Structural kind of a walk graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleType {
    /// `e = v - 1`.
    Tree,
    /// At least one step `i_j = i_{j+1}`.
    SelfLoop,
    /// `e = v`, no self-loop, each cycle edge walked twice in one direction.
    CycleOneWay,
    /// `e = v`, no self-loop, each cycle edge walked once in each direction.
    CycleBothWays,
    Other,
}

impl CycleType {
    pub const ALL: [CycleType; 5] = [
        CycleType::Tree,
        CycleType::SelfLoop,
        CycleType::CycleOneWay,
        CycleType::CycleBothWays,
        CycleType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CycleType::Tree => "tree",
            CycleType::SelfLoop => "self-loop",
            CycleType::CycleOneWay => "cycle-one-way",
            CycleType::CycleBothWays => "cycle-both-ways",
            CycleType::Other => "other",
        }
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CycleType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CycleType::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                format!("unknown cycle type {s:?}; expected one of tree, self-loop, cycle-one-way, cycle-both-ways, other")
            })
    }
}

/// Directed traversal counts of an edge `{i, j}` with `i < j`: `forward`
/// counts steps `i → j`. Self-loops store their count in `forward`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Traversal {
    pub forward: u32,
    pub backward: u32,
}

impl Traversal {
    pub fn total(self) -> u32 {
        self.forward + self.backward
    }
}

/// A canonical closed word and the structure of its walk graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkClass {
    word: Vec<u8>,
    v: usize,
    e: usize,
    edges: Vec<((u8, u8), Traversal)>,
    has_self_loop: bool,
    cycle_type: CycleType,
}

impl WalkClass {
    /// Zero-based canonical letters.
    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Number of steps `k`.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Edges sorted by endpoints, self-loops as `(i, i)`.
    pub fn edge_traversals(&self) -> &[((u8, u8), Traversal)] {
        &self.edges
    }

    pub fn has_self_loop(&self) -> bool {
        self.has_self_loop
    }

    pub fn cycle_type(&self) -> CycleType {
        self.cycle_type
    }

    /// Some edge is walked an odd number of times.
    pub fn has_odd_edge(&self) -> bool {
        self.edges.iter().any(|(_, t)| t.total() % 2 == 1)
    }

    /// One-based rendering, `1`..`9` then `a`, `b`, ….
    pub fn word_string(&self) -> String {
        self.word
            .iter()
            .map(|&c| char::from_digit(u32::from(c) + 1, 36).expect("letter below 36"))
            .collect()
    }
}

impl fmt::Display for WalkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word_string())
    }
}

/// Parse a word rendered by [`WalkClass::word_string`] (any labelling).
pub fn parse_word(s: &str) -> Result<Vec<u32>, OracleError> {
    s.chars()
        .map(|c| c.to_digit(36).ok_or(OracleError::InvalidLetter(c)))
        .collect()
}

/// Relabel letters by order of first occurrence, starting at 0.
fn canonicalize(word: &[u32]) -> Vec<u8> {
    let mut seen: Vec<u32> = Vec::new();
    word.iter()
        .map(|c| match seen.iter().position(|s| s == c) {
            Some(i) => i as u8,
            None => {
                seen.push(*c);
                (seen.len() - 1) as u8
            }
        })
        .collect()
}

/// Classify the closed walk `word[0] word[1] … word[k-1] word[0]`.
pub fn classify_walk(word: &[u32]) -> Result<WalkClass, OracleError> {
    if word.is_empty() {
        return Err(OracleError::EmptyWord);
    }
    if word.len() > u8::MAX as usize {
        return Err(OracleError::TooLong {
            k: word.len(),
            max: u8::MAX as usize,
        });
    }
    Ok(classify_canonical(canonicalize(word)))
}

fn classify_canonical(word: Vec<u8>) -> WalkClass {
    let k = word.len();
    let v = usize::from(*word.iter().max().expect("nonempty")) + 1;
    let mut edges: Vec<((u8, u8), Traversal)> = Vec::with_capacity(k);
    let mut has_self_loop = false;
    for j in 0..k {
        let (a, b) = (word[j], word[(j + 1) % k]);
        has_self_loop |= a == b;
        let key = (a.min(b), a.max(b));
        let idx = match edges.iter().position(|(e, _)| *e == key) {
            Some(i) => i,
            None => {
                edges.push((key, Traversal::default()));
                edges.len() - 1
            }
        };
        let t = &mut edges[idx].1;
        if a <= b {
            t.forward += 1;
        } else {
            t.backward += 1;
        }
    }
    edges.sort_by_key(|(e, _)| *e);
    let e = edges.len();

    let cycle_type = if e + 1 == v {
        CycleType::Tree
    } else if has_self_loop {
        CycleType::SelfLoop
    } else if e == v {
        unicyclic_kind(v, &edges)
    } else {
        CycleType::Other
    };

    WalkClass {
        word,
        v,
        e,
        edges,
        has_self_loop,
        cycle_type,
    }
}

/// Strip leaves until only the cycle of a connected unicyclic graph remains,
/// then read the traversal pattern on it.
fn unicyclic_kind(v: usize, edges: &[((u8, u8), Traversal)]) -> CycleType {
    let mut alive = vec![true; edges.len()];
    let mut degree = vec![0usize; v];
    for ((a, b), _) in edges {
        degree[usize::from(*a)] += 1;
        degree[usize::from(*b)] += 1;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for (idx, ((a, b), _)) in edges.iter().enumerate() {
            let (a, b) = (usize::from(*a), usize::from(*b));
            if alive[idx] && (degree[a] == 1 || degree[b] == 1) {
                alive[idx] = false;
                degree[a] -= 1;
                degree[b] -= 1;
                changed = true;
            }
        }
    }
    let cycle: Vec<Traversal> = edges
        .iter()
        .zip(&alive)
        .filter(|(_, &on)| on)
        .map(|((_, t), _)| *t)
        .collect();
    if cycle.len() < 3 {
        return CycleType::Other;
    }
    if cycle
        .iter()
        .all(|t| (t.forward, t.backward) == (2, 0) || (t.forward, t.backward) == (0, 2))
    {
        CycleType::CycleOneWay
    } else if cycle.iter().all(|t| (t.forward, t.backward) == (1, 1)) {
        CycleType::CycleBothWays
    } else {
        CycleType::Other
    }
}

/// Restricted growth strings of a fixed length, optionally with a fixed prefix.
///
/// Depth-first in lexicographic order; memory is `O(k)`.
#[derive(Debug, Clone)]
pub struct CanonicalWords {
    word: Vec<u8>,
    fixed: usize,
    started: bool,
    done: bool,
}

impl CanonicalWords {
    pub fn new(k: usize) -> Self {
        Self::with_prefix(k, &[]).expect("empty prefix is valid")
    }

    /// Words of length `k` starting with `prefix`, which must itself be a
    /// canonical word no longer than `k`.
    pub fn with_prefix(k: usize, prefix: &[u8]) -> Option<Self> {
        if prefix.len() > k || !is_canonical(prefix) {
            return None;
        }
        let mut word = prefix.to_vec();
        word.resize(k, 0);
        Some(Self {
            word,
            fixed: prefix.len(),
            started: false,
            done: k == 0,
        })
    }
}

fn is_canonical(word: &[u8]) -> bool {
    let mut next = 0u8;
    for &c in word {
        if c > next {
            return false;
        }
        if c == next {
            next += 1;
        }
    }
    true
}

impl Iterator for CanonicalWords {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.word.clone());
        }
        let k = self.word.len();
        for i in (self.fixed.max(1)..k).rev() {
            let bound = *self.word[..i].iter().max().expect("i >= 1");
            if self.word[i] <= bound {
                self.word[i] += 1;
                self.word[i + 1..].iter_mut().for_each(|c| *c = 0);
                return Some(self.word.clone());
            }
        }
        self.done = true;
        None
    }
}

/// One [`WalkClass`] per equivalence class of closed words of length `k`.
pub fn enumerate_canonical_words(k: usize) -> impl Iterator<Item = WalkClass> {
    CanonicalWords::new(k).map(classify_canonical)
}

/// Canonical prefixes used to split an enumeration across threads.
fn split_prefixes(k: usize) -> Vec<Vec<u8>> {
    let depth = k.min(4);
    CanonicalWords::new(depth).collect()
}

fn check_length(k: usize) -> Result<(), OracleError> {
    if k == 0 {
        Err(OracleError::EmptyWord)
    } else if k > MAX_WORD_LENGTH {
        Err(OracleError::TooLong {
            k,
            max: MAX_WORD_LENGTH,
        })
    } else {
        Ok(())
    }
}

/// Class counts of length-`k` words by `(v, e, cycle type)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassCensus {
    pub k: usize,
    pub counts: BTreeMap<(usize, usize, CycleType), u64>,
}

impl ClassCensus {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Classes with `v` vertices and `e` edges, optionally of one kind only.
    pub fn count(&self, v: usize, e: usize, filter: Option<CycleType>) -> u64 {
        self.counts
            .iter()
            .filter(|((cv, ce, ct), _)| *cv == v && *ce == e && filter.is_none_or(|f| f == *ct))
            .map(|(_, n)| n)
            .sum()
    }

    fn merge(mut self, other: Self) -> Self {
        for (key, n) in other.counts {
            *self.counts.entry(key).or_default() += n;
        }
        self
    }
}

pub fn class_census(k: usize) -> Result<ClassCensus, OracleError> {
    check_length(k)?;
    let census = split_prefixes(k)
        .into_par_iter()
        .map(|prefix| {
            let mut c = ClassCensus {
                k,
                ..Default::default()
            };
            for word in CanonicalWords::with_prefix(k, &prefix).expect("valid prefix") {
                let cls = classify_canonical(word);
                *c.counts.entry((cls.v, cls.e, cls.cycle_type)).or_default() += 1;
            }
            c
        })
        .reduce(
            || ClassCensus {
                k,
                ..Default::default()
            },
            ClassCensus::merge,
        );
    Ok(census)
}

/// Number of classes of length-`k` words with `v` letters and `e` edges.
pub fn count_classes(
    k: usize,
    v: usize,
    e: usize,
    filter: Option<CycleType>,
) -> Result<BigInt, OracleError> {
    Ok(BigInt::from(class_census(k)?.count(v, e, filter)))
}

/// Off-diagonal entry moments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffDiagonalMoments {
    /// `table[m] = E[W^m]`.
    Real(Vec<BigRational>),
    /// `table[a][b] = E[W^a conj(W)^b]`.
    Complex(Vec<Vec<BigRational>>),
}

/// Full moment tables of an entry distribution.
///
/// Diagonal entries are real in both cases: `diag[m] = E[W_ii^m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentModel {
    offdiag: OffDiagonalMoments,
    diag: Vec<BigRational>,
}

/// `E[Z^m]` for a centred Gaussian of variance `var`: `(m-1)!! var^{m/2}`.
fn gaussian_moments(var: &BigRational, max_order: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for m in 1..=max_order {
        out.push(if m % 2 == 1 {
            BigRational::zero()
        } else {
            &out[m - 2] * int(m as i64 - 1) * var
        });
    }
    out
}

/// `E[W^m]` for `W = ±c` with `c² = c2`.
fn symmetric_sign_moments(c2: &BigRational, max_order: usize) -> Vec<BigRational> {
    (0..=max_order)
        .map(|m| {
            if m % 2 == 1 {
                BigRational::zero()
            } else {
                num_traits::pow(c2.clone(), m / 2)
            }
        })
        .collect()
}

impl MomentModel {
    pub fn real(offdiag: Vec<BigRational>, diag: Vec<BigRational>) -> Result<Self, OracleError> {
        let model = Self {
            offdiag: OffDiagonalMoments::Real(offdiag),
            diag,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn complex(
        offdiag: Vec<Vec<BigRational>>,
        diag: Vec<BigRational>,
    ) -> Result<Self, OracleError> {
        let model = Self {
            offdiag: OffDiagonalMoments::Complex(offdiag),
            diag,
        };
        model.validate()?;
        Ok(model)
    }

    /// Real Gaussian entries, off-diagonal variance 1, diagonal variance 2.
    pub fn goe(max_order: usize) -> Self {
        let max_order = max_order.max(4);
        Self::real(
            gaussian_moments(&int(1), max_order),
            gaussian_moments(&int(2), max_order),
        )
        .expect("GOE model is valid")
    }

    /// Standard complex Gaussian off the diagonal, `E[W^a conj(W)^b] = a! δ_ab`,
    /// and real standard Gaussian diagonal.
    pub fn gue(max_order: usize) -> Self {
        let max_order = max_order.max(4);
        let mut table = vec![vec![BigRational::zero(); max_order + 1]; max_order + 1];
        let mut fact = BigRational::one();
        for (a, row) in table.iter_mut().enumerate() {
            if a > 0 {
                fact *= int(a as i64);
            }
            row[a] = fact.clone();
        }
        Self::complex(table, gaussian_moments(&int(1), max_order)).expect("GUE model is valid")
    }

    /// `W = ±σ` off the diagonal and `±s` on it, independent fair signs.
    pub fn rademacher(
        sigma2: BigRational,
        s2: BigRational,
        max_order: usize,
    ) -> Result<Self, OracleError> {
        let max_order = max_order.max(4);
        Self::real(
            symmetric_sign_moments(&sigma2, max_order),
            symmetric_sign_moments(&s2, max_order),
        )
    }

    /// The sparse three-point law matching arbitrary `(r, σ², s², α)`.
    ///
    /// Off the diagonal `|W| = c` with probability `q = σ⁴/α` and `0`
    /// otherwise, where `c² = α/σ²`; the sign is a fair coin (real case) or
    /// the phase is uniform (complex case). The diagonal is Gaussian with
    /// variance `s²`.
    pub fn three_point(params: &EnsembleParams, max_order: usize) -> Result<Self, OracleError> {
        let max_order = max_order.max(4);
        let sigma2 = params.sigma2();
        let alpha = params.alpha();
        let q = sigma2 * sigma2 / alpha;
        let c2 = alpha / sigma2;
        let abs_moment = |m: usize| -> BigRational {
            // E[|W|^{2m}]
            if m == 0 {
                BigRational::one()
            } else {
                &q * num_traits::pow(c2.clone(), m)
            }
        };
        let diag = gaussian_moments(params.s2(), max_order);
        if params.is_real() {
            let table = (0..=max_order)
                .map(|m| {
                    if m % 2 == 1 {
                        BigRational::zero()
                    } else {
                        abs_moment(m / 2)
                    }
                })
                .collect();
            Self::real(table, diag)
        } else {
            let mut table = vec![vec![BigRational::zero(); max_order + 1]; max_order + 1];
            for (a, row) in table.iter_mut().enumerate() {
                row[a] = abs_moment(a);
            }
            Self::complex(table, diag)
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.offdiag, OffDiagonalMoments::Real(_))
    }

    /// Largest `a + b` covered by both tables.
    pub fn max_order(&self) -> usize {
        let off = match &self.offdiag {
            OffDiagonalMoments::Real(t) => t.len().saturating_sub(1),
            OffDiagonalMoments::Complex(t) => t
                .iter()
                .map(Vec::len)
                .min()
                .unwrap_or(0)
                .min(t.len())
                .saturating_sub(1),
        };
        off.min(self.diag.len().saturating_sub(1))
    }

    /// `E[W^a conj(W)^b]`; in the real case only `a + b` matters.
    pub fn offdiag_moment(&self, a: u32, b: u32) -> Option<&BigRational> {
        match &self.offdiag {
            OffDiagonalMoments::Real(t) => t.get((a + b) as usize),
            OffDiagonalMoments::Complex(t) => t.get(a as usize)?.get(b as usize),
        }
    }

    pub fn diag_moment(&self, m: u32) -> Option<&BigRational> {
        self.diag.get(m as usize)
    }

    fn moment_or_err(&self, a: u32, b: u32) -> Result<&BigRational, OracleError> {
        self.offdiag_moment(a, b)
            .ok_or_else(|| OracleError::MissingMoment {
                kind: "off-diagonal",
                order: if self.is_real() {
                    (a + b).to_string()
                } else {
                    format!("({a}, {b})")
                },
            })
    }

    /// The `(r, σ², s², α)` the tables imply.
    pub fn params(&self) -> Result<EnsembleParams, OracleError> {
        let r = u8::from(self.is_real());
        let sigma2 = self.moment_or_err(1, 1)?.clone();
        let alpha = self.moment_or_err(2, 2)?.clone();
        let s2 = self
            .diag_moment(2)
            .ok_or(OracleError::MissingMoment {
                kind: "diagonal",
                order: "2".into(),
            })?
            .clone();
        Ok(EnsembleParams::new(r, sigma2, s2, alpha)?)
    }

    fn validate(&self) -> Result<(), OracleError> {
        let bad = |m: &str| Err(OracleError::InvalidModel(m.to_string()));
        if self.max_order() < 4 {
            return bad("tables must cover moments up to order 4");
        }
        if !self.diag[0].is_one() || !self.diag[1].is_zero() {
            return bad("diagonal entries must have E[1] = 1 and mean 0");
        }
        match &self.offdiag {
            OffDiagonalMoments::Real(t) => {
                if !t[0].is_one() || !t[1].is_zero() {
                    return bad("off-diagonal entries must have E[1] = 1 and mean 0");
                }
            }
            OffDiagonalMoments::Complex(t) => {
                if t.len() != t[0].len() {
                    return bad("complex moment table must be square");
                }
                if !t[0][0].is_one() || !t[1][0].is_zero() || !t[0][1].is_zero() {
                    return bad("off-diagonal entries must have E[1] = 1 and mean 0");
                }
                if !t[2][0].is_zero() || !t[0][2].is_zero() {
                    return bad("complex entries must have E[W^2] = 0");
                }
            }
        }
        self.params()?;
        Ok(())
    }
}

/// `E[W_c]`: product of edge moments over the walk graph of `cls`.
pub fn expected_word_product(
    cls: &WalkClass,
    model: &MomentModel,
) -> Result<BigRational, OracleError> {
    // centred entries: a single traversal kills the product
    if cls
        .edges
        .iter()
        .any(|((a, b), t)| a != b && t.total() == 1 || a == b && t.forward == 1)
    {
        return Ok(BigRational::zero());
    }
    let mut acc = BigRational::one();
    for ((a, b), t) in &cls.edges {
        let m = if a == b {
            model
                .diag_moment(t.forward)
                .ok_or_else(|| OracleError::MissingMoment {
                    kind: "diagonal",
                    order: t.forward.to_string(),
                })?
        } else {
            model.moment_or_err(t.forward, t.backward)?
        };
        if m.is_zero() {
            return Ok(BigRational::zero());
        }
        acc *= m;
    }
    Ok(acc)
}

/// `E[tr X^k]` as a polynomial in `n`, grouped by vertex count.
///
/// `m_k(n) = Σ_v n(n-1)…(n-v+1) · A_v / (n^{1+k/2} σ^k)` with
/// `A_v = Σ_{classes with v letters} E[W_c]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPolynomial {
    pub k: usize,
    pub sigma2: BigRational,
    /// `by_vertices[v] = A_v`.
    pub by_vertices: Vec<BigRational>,
}

impl MomentPolynomial {
    /// Exact `m_k(n)`.
    pub fn eval(&self, n: u64) -> BigRational {
        assert!(n >= 1, "matrix size must be positive");
        let n_big = BigInt::from(n);
        let mut falling = BigInt::one();
        let mut sum = BigRational::zero();
        for (v, a) in self.by_vertices.iter().enumerate() {
            if v > 0 {
                falling *= &n_big - BigInt::from(v - 1);
            }
            if !a.is_zero() {
                sum += a * BigRational::from_integer(falling.clone());
            }
        }
        let half = self.k / 2;
        let denom = BigRational::from_integer(n_big.pow(1 + half as u32))
            * num_traits::pow(self.sigma2.clone(), half);
        sum / denom
    }
}

pub fn moment_polynomial(k: usize, model: &MomentModel) -> Result<MomentPolynomial, OracleError> {
    check_length(k)?;
    if k % 2 == 1 {
        return Err(OracleError::OddOrder(k));
    }
    let sigma2 = model.params()?.sigma2().clone();
    let partials: Vec<Vec<BigRational>> = split_prefixes(k)
        .into_par_iter()
        .map(|prefix| {
            let mut acc = vec![BigRational::zero(); k + 1];
            for word in CanonicalWords::with_prefix(k, &prefix).expect("valid prefix") {
                let cls = classify_canonical(word);
                let ew = expected_word_product(&cls, model)?;
                if !ew.is_zero() {
                    acc[cls.v] += ew;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_, OracleError>>()?;
    let mut by_vertices = vec![BigRational::zero(); k + 1];
    for part in partials {
        for (slot, x) in by_vertices.iter_mut().zip(part) {
            *slot += x;
        }
    }
    Ok(MomentPolynomial {
        k,
        sigma2,
        by_vertices,
    })
}

/// Exact `m_k(n) = E[∫ x^k dμ_n]` for even `k`.
pub fn exact_moment(k: usize, n: u64, model: &MomentModel) -> Result<BigRational, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroSize);
    }
    Ok(moment_polynomial(k, model)?.eval(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{catalan, nu_moment, semicircle_moment};
    use num_traits::Signed;

    fn classify_str(s: &str) -> WalkClass {
        classify_walk(&parse_word(s).unwrap()).unwrap()
    }

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    /// Bell numbers by the triangle recurrence.
    fn bell(n: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![*row.last().unwrap()];
            for x in &row {
                next.push(next.last().unwrap() + x);
            }
            row = next;
        }
        row[0]
    }

    #[test]
    fn enumeration_small() {
        let words: Vec<String> = enumerate_canonical_words(2)
            .map(|c| c.word_string())
            .collect();
        assert_eq!(words, vec!["11", "12"]);
        for k in 1..=9 {
            assert_eq!(CanonicalWords::new(k).count() as u64, bell(k), "k={k}");
        }
    }

    #[test]
    fn prefixes_partition_the_enumeration() {
        let k = 7;
        let total: usize = split_prefixes(k)
            .iter()
            .map(|p| CanonicalWords::with_prefix(k, p).unwrap().count())
            .sum();
        assert_eq!(total as u64, bell(k));
        assert!(CanonicalWords::with_prefix(4, &[0, 2]).is_none());
        assert!(CanonicalWords::with_prefix(2, &[0, 1, 2]).is_none());
    }

    #[test]
    fn k4_listings() {
        let census = class_census(4).unwrap();
        assert_eq!(census.total(), 15);
        assert_eq!(census.count(3, 2, None), u64::try_from(catalan(2)).unwrap());
        let loops: Vec<String> = enumerate_canonical_words(4)
            .filter(|c| c.v() == 2 && c.e() == 2 && c.has_self_loop())
            .map(|c| c.word_string())
            .collect();
        assert_eq!(loops, vec!["1112", "1121", "1211", "1222"]);
    }

    #[test]
    fn classify_examples() {
        let c = classify_str("1212");
        assert_eq!((c.v(), c.e()), (2, 1));
        assert_eq!(
            c.edge_traversals(),
            &[(
                (0, 1),
                Traversal {
                    forward: 2,
                    backward: 2
                }
            )]
        );
        assert_eq!(c.cycle_type(), CycleType::Tree);

        let c = classify_str("123123");
        assert_eq!((c.v(), c.e()), (3, 3));
        assert_eq!(c.cycle_type(), CycleType::CycleOneWay);

        let c = classify_str("123213");
        assert_eq!(c.cycle_type(), CycleType::CycleBothWays);

        let c = classify_str("1121");
        assert_eq!((c.v(), c.e()), (2, 2));
        assert!(c.has_self_loop());
        assert_eq!(c.cycle_type(), CycleType::SelfLoop);

        // relabelled input is canonicalised
        assert_eq!(classify_str("3535").word_string(), "1212");
        assert!(matches!(classify_walk(&[]), Err(OracleError::EmptyWord)));
    }

    #[test]
    fn cycle_with_single_traversals_is_other() {
        // square walked once around plus two back-and-forths
        let c = classify_str("12343414");
        assert_eq!((c.v(), c.e()), (4, 4));
        assert_eq!(c.cycle_type(), CycleType::Other);
        assert_eq!(
            expected_word_product(&c, &MomentModel::goe(8)).unwrap(),
            BigRational::zero()
        );
    }

    #[test]
    fn both_way_triangles_at_k6() {
        assert_eq!(
            count_classes(6, 3, 3, Some(CycleType::CycleBothWays)).unwrap(),
            BigInt::from(3)
        );
        assert_eq!(
            count_classes(6, 3, 3, Some(CycleType::CycleOneWay)).unwrap(),
            BigInt::from(1)
        );
    }

    #[test]
    fn word_products() {
        let gue = MomentModel::gue(8);
        let goe = MomentModel::goe(8);
        assert_eq!(
            expected_word_product(&classify_str("12"), &gue).unwrap(),
            int(1)
        );
        assert_eq!(
            expected_word_product(&classify_str("1212"), &goe).unwrap(),
            int(3)
        );
        assert_eq!(
            expected_word_product(&classify_str("1212"), &gue).unwrap(),
            int(2)
        );
        assert_eq!(
            expected_word_product(&classify_str("1111"), &goe).unwrap(),
            int(12)
        );
        assert!(expected_word_product(&classify_str("1122"), &goe)
            .unwrap()
            .is_zero());
        // E[W^2] = 0 for complex entries
        assert!(expected_word_product(&classify_str("123123"), &gue)
            .unwrap()
            .is_zero());
        assert_eq!(
            expected_word_product(&classify_str("123123"), &goe).unwrap(),
            int(1)
        );
    }

    #[test]
    fn missing_moment_is_reported() {
        let model = MomentModel::goe(4);
        let err = expected_word_product(&classify_str("121212"), &model).unwrap_err();
        assert_eq!(
            err,
            OracleError::MissingMoment {
                kind: "off-diagonal",
                order: "6".into()
            }
        );
    }

    #[test]
    fn model_validation() {
        assert!(matches!(
            MomentModel::real(
                vec![int(1), int(1), int(1), int(0), int(1)],
                vec![int(1), int(0), int(1), int(0), int(3)]
            ),
            Err(OracleError::InvalidModel(_))
        ));
        assert_eq!(MomentModel::goe(6).params().unwrap(), EnsembleParams::goe());
        assert_eq!(MomentModel::gue(6).params().unwrap(), EnsembleParams::gue());
        assert_eq!(
            MomentModel::rademacher(int(1), int(1), 6)
                .unwrap()
                .params()
                .unwrap(),
            EnsembleParams::rademacher()
        );
        let p = EnsembleParams::new(0, ratio(3, 2), ratio(1, 3), int(5)).unwrap();
        assert_eq!(
            MomentModel::three_point(&p, 8).unwrap().params().unwrap(),
            p
        );
    }

    #[test]
    fn exact_low_moments() {
        let n_values = [1u64, 2, 3, 10, 77];
        for model in [
            MomentModel::goe(4),
            MomentModel::gue(4),
            MomentModel::rademacher(ratio(4, 1), ratio(1, 2), 4).unwrap(),
        ] {
            let p = model.params().unwrap();
            for &n in &n_values {
                let expect = int(1) + (p.diagonal_ratio() - int(1)) / int(n as i64);
                assert_eq!(exact_moment(2, n, &model).unwrap(), expect);
            }
        }
        for &n in &n_values {
            let nn = int(n as i64);
            assert_eq!(
                exact_moment(4, n, &MomentModel::gue(4)).unwrap(),
                int(2) + int(1) / (&nn * &nn)
            );
            assert_eq!(
                exact_moment(4, n, &MomentModel::goe(4)).unwrap(),
                int(2) + int(5) / &nn + int(5) / (&nn * &nn)
            );
        }
    }

    #[test]
    fn exact_moment_at_n1_is_diag_moment() {
        // a 1x1 matrix is W_11 / σ
        let model = MomentModel::goe(8);
        assert_eq!(exact_moment(6, 1, &model).unwrap(), int(15 * 8));
    }

    #[test]
    fn odd_and_oversized_orders_rejected() {
        let m = MomentModel::goe(14);
        assert_eq!(exact_moment(3, 10, &m), Err(OracleError::OddOrder(3)));
        assert!(matches!(
            exact_moment(14, 10, &m),
            Err(OracleError::TooLong { .. })
        ));
        assert_eq!(exact_moment(2, 0, &m), Err(OracleError::ZeroSize));
    }

    #[test]
    fn inequalities_hold_for_nonzero_classes() {
        let model = MomentModel::goe(9);
        for k in 1..=9 {
            for cls in enumerate_canonical_words(k) {
                if !expected_word_product(&cls, &model).unwrap().is_zero() {
                    assert!(cls.v() <= cls.e() + 1 && cls.e() <= k / 2, "{cls}");
                }
                if k % 2 == 1 {
                    assert!(cls.has_odd_edge(), "{cls}");
                }
            }
        }
    }

    #[test]
    fn leading_order_is_semicircle() {
        let model =
            MomentModel::three_point(&EnsembleParams::new(1, int(2), int(3), int(9)).unwrap(), 8)
                .unwrap();
        let poly = moment_polynomial(8, &model).unwrap();
        let top = &poly.by_vertices[5] / num_traits::pow(int(2), 4);
        assert_eq!(top, BigRational::from_integer(semicircle_moment(8)));
        // next order is ν_8 after the falling-factorial correction
        let n = 1_000_000u64;
        let m = poly.eval(n);
        let scaled = (m - BigRational::from_integer(semicircle_moment(8))) * int(n as i64);
        let diff = scaled - nu_moment(8, &model.params().unwrap());
        assert!(diff.abs() < ratio(1, 1000));
    }
}
