//! Perfect matchings of "color 0" and the face count `F(M, G)`.
//!
//! Matchings are enumerated in a fixed order: the smallest unmatched vertex
//! is paired with each remaining vertex in increasing order, recursively.
//! The position of a matching in that order is its *index*; [`rank`] and
//! [`unrank`] convert between the two, which is what lets surveys shard the
//! enumeration and resume it from a checkpoint.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{check_involution, count_cycles, partner_from_edges, Color, ColoredGraph, GraphError, MAX_N};

/// Identifier of the enumeration rule, recorded in binary cache headers.
pub const ENUMERATION_RULE_ID: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("matching covers {matching} vertices but the graph has {graph}")]
    SizeMismatch { matching: usize, graph: usize },
    #[error(transparent)]
    Invalid(#[from] GraphError),
    #[error("index {index} out of range for m = {m} ({count} matchings)")]
    IndexOutOfRange { index: u64, m: usize, count: u64 },
}

/// A perfect matching on `0..2m`, stored as its partner involution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    partner: Vec<u8>,
}

impl Matching {
    pub fn from_partners(partner: Vec<u8>) -> Result<Self, MatchingError> {
        if partner.is_empty() || !partner.len().is_multiple_of(2) || partner.len() / 2 > MAX_N {
            return Err(GraphError::BadSize(partner.len() / 2).into());
        }
        check_involution(0, &partner)?;
        Ok(Matching { partner })
    }

    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self, MatchingError> {
        if m == 0 || m > MAX_N {
            return Err(GraphError::BadSize(m).into());
        }
        Ok(Matching { partner: partner_from_edges(0, m, edges)? })
    }

    /// The matching that copies the color-`c` edges of `g`.
    pub fn parallel_to(g: &ColoredGraph, c: Color) -> Self {
        Matching { partner: g.partners(c).to_vec() }
    }

    pub(crate) fn from_partners_unchecked(partner: Vec<u8>) -> Self {
        debug_assert!(check_involution(0, &partner).is_ok());
        Matching { partner }
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, v: usize) -> usize {
        self.partner[v] as usize
    }

    pub fn partners(&self) -> &[u8] {
        &self.partner
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(v, &p)| v < p as usize)
            .map(|(v, &p)| (v, p as usize))
            .collect()
    }

    /// Number of edges present in `self` but not in `other`.
    pub fn edge_difference(&self, other: &Matching) -> usize {
        self.partner
            .iter()
            .zip(&other.partner)
            .enumerate()
            .filter(|&(v, (&a, &b))| a != b && v < a as usize)
            .count()
    }
}

/// `(2m - 1)!!`, the number of perfect matchings on `2m` points.
///
/// Panics on overflow (`m > 33`).
pub fn double_factorial(m: usize) -> u64 {
    (1..m as u64).fold(1u64, |acc, k| acc.checked_mul(2 * k + 1).expect("(2m-1)!! overflows u64"))
}

/// Index of `matching` in the enumeration order.
pub fn rank(matching: &Matching) -> u64 {
    let m = matching.m();
    let mut remaining: Vec<u8> = (0..2 * m as u8).collect();
    let mut index = 0u64;
    for k in 0..m {
        let u = remaining.remove(0);
        let p = matching.partner[u as usize];
        let digit = remaining.iter().position(|&w| w == p).expect("partner is unmatched");
        remaining.remove(digit);
        index += digit as u64 * double_factorial(m - k - 1);
    }
    index
}

/// The matching at position `index` of the enumeration order on `2m` vertices.
pub fn unrank(m: usize, index: u64) -> Result<Matching, MatchingError> {
    if m == 0 || m > MAX_N {
        return Err(GraphError::BadSize(m).into());
    }
    let count = double_factorial(m);
    if index >= count {
        return Err(MatchingError::IndexOutOfRange { index, m, count });
    }
    let mut digits = vec![0u8; m];
    let mut rest = index;
    for (k, d) in digits.iter_mut().enumerate() {
        let w = double_factorial(m - k - 1);
        *d = (rest / w) as u8;
        rest %= w;
    }
    let mut partner = vec![0u8; 2 * m];
    fill_from_digits(&digits, &mut partner);
    Ok(Matching { partner })
}

fn fill_from_digits(digits: &[u8], partner: &mut [u8]) {
    let mut remaining: Vec<u8> = (0..partner.len() as u8).collect();
    for &d in digits {
        let u = remaining.remove(0);
        let v = remaining.remove(d as usize);
        partner[u as usize] = v;
        partner[v as usize] = u;
    }
}

/// Streams all perfect matchings on `2m` vertices in enumeration order.
pub fn enumerate_matchings(m: usize) -> Matchings {
    Matchings::starting_at(m, 0)
}

/// Iterator over the enumeration order, optionally starting mid-stream.
#[derive(Clone, Debug)]
pub struct Matchings {
    /// Mixed-radix digits; digit `k` ranges over `0..2(m-k)-1`.
    digits: Vec<u8>,
    partner: Vec<u8>,
    index: u64,
    end: u64,
    /// `partner` still holds the matching at `index - 1`.
    stale: bool,
}

impl Matchings {
    /// Starts at `index` (clamped to the end of the stream).
    pub fn starting_at(m: usize, index: u64) -> Self {
        assert!((1..=MAX_N).contains(&m), "m out of range");
        let end = double_factorial(m);
        let index = index.min(end);
        let mut digits = vec![0u8; m];
        let mut rest = index.min(end - 1);
        for (k, d) in digits.iter_mut().enumerate() {
            let w = double_factorial(m - k - 1);
            *d = (rest / w) as u8;
            rest %= w;
        }
        let mut partner = vec![0u8; 2 * m];
        fill_from_digits(&digits, &mut partner);
        Matchings { digits, partner, index, end, stale: false }
    }

    /// Restricts the stream to indices below `end`.
    pub fn until(mut self, end: u64) -> Self {
        self.end = self.end.min(end).max(self.index);
        self
    }

    /// Index of the next matching to be yielded.
    pub fn position(&self) -> u64 {
        self.index
    }

    /// Like `next`, but lends the partner array instead of allocating.
    pub fn next_partners(&mut self) -> Option<(u64, &[u8])> {
        if self.index >= self.end {
            return None;
        }
        if self.stale {
            self.advance_digits();
            fill_from_digits(&self.digits, &mut self.partner);
        }
        self.stale = true;
        self.index += 1;
        Some((self.index - 1, &self.partner))
    }

    fn advance_digits(&mut self) {
        let m = self.digits.len();
        for k in (0..m).rev() {
            let radix = (2 * (m - k) - 1) as u8;
            self.digits[k] += 1;
            if self.digits[k] < radix {
                return;
            }
            self.digits[k] = 0;
        }
    }
}

impl Iterator for Matchings {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        self.next_partners().map(|(_, p)| Matching { partner: p.to_vec() })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.index) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Matchings {}

/// `F(M, G)`: the number of faces of colors `(0, i)` summed over `i = 1, 2, 3`.
pub fn faces_with_color0(g: &ColoredGraph, m: &Matching) -> Result<usize, MatchingError> {
    if m.partner.len() != g.vertex_count() {
        return Err(MatchingError::SizeMismatch { matching: m.partner.len(), graph: g.vertex_count() });
    }
    Ok(faces_unchecked(g, &m.partner))
}

#[inline]
pub(crate) fn faces_unchecked(g: &ColoredGraph, partner0: &[u8]) -> usize {
    Color::ALL.iter().map(|&c| count_cycles(partner0, g.partners(c))).sum()
}

/// Per-color breakdown `(F01, F02, F03)` of [`faces_with_color0`].
pub fn faces_by_color(g: &ColoredGraph, m: &Matching) -> Result<[usize; 3], MatchingError> {
    if m.partner.len() != g.vertex_count() {
        return Err(MatchingError::SizeMismatch { matching: m.partner.len(), graph: g.vertex_count() });
    }
    Ok(Color::ALL.map(|c| count_cycles(&m.partner, g.partners(c))))
}

/// Serializes as a list of `[a, b]` edges.
impl Serialize for Matching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.edges().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let edges = Vec::<(usize, usize)>::deserialize(d)?;
        Matching::from_edges(edges.len(), &edges).map_err(serde::de::Error::custom)
    }
}
