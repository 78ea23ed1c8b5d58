//! 3-regular 3-edge-colored multigraphs and their bicolored faces.
//!
//! A [`ColoredGraph`] on `2n` vertices is stored as one fixed-point-free
//! involution per color: `partner(c, v)` is the unique color-`c` neighbor of
//! `v`. Parallel edges of different colors cost nothing in this
//! representation, so the 2-vertex triple edge is an ordinary graph.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported `n`. Vertex labels are stored as `u8` and `0xFF` is
/// reserved as the "unmatched" sentinel by the search code.
pub const MAX_N: usize = 127;

pub(crate) const UNMATCHED: u8 = u8::MAX;

/// One of the three graph colors. Color 0 is reserved for Wick matchings and
/// never appears here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Color {
    One = 1,
    Two = 2,
    Three = 3,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::One, Color::Two, Color::Three];

    /// Zero-based array index (`One` is 0).
    #[inline]
    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(i: usize) -> Color {
        Color::ALL[i]
    }

    /// The two colors different from `self`, in increasing order.
    pub fn others(self) -> (Color, Color) {
        match self {
            Color::One => (Color::Two, Color::Three),
            Color::Two => (Color::One, Color::Three),
            Color::Three => (Color::One, Color::Two),
        }
    }

    /// The color different from both `self` and `other`.
    ///
    /// Panics if the two colors are equal.
    pub fn third(self, other: Color) -> Color {
        assert_ne!(self, other, "third() needs two distinct colors");
        Color::from_index(3 - self.index() - other.index())
    }
}

impl From<Color> for u8 {
    fn from(c: Color) -> u8 {
        c as u8
    }
}

impl TryFrom<u8> for Color {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Color::One),
            2 => Ok(Color::Two),
            3 => Ok(Color::Three),
            _ => Err(format!("color must be 1, 2 or 3, got {v}")),
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("n must be between 1 and {MAX_N}, got {0}")]
    BadSize(usize),
    #[error("color {color}: expected {expected} edges, got {got}")]
    WrongEdgeCount { color: u8, expected: usize, got: usize },
    #[error("color {color}: vertex {vertex} is out of range (graph has {vertices} vertices)")]
    VertexOutOfRange { color: u8, vertex: usize, vertices: usize },
    #[error("color {color}: loop at vertex {vertex}")]
    Loop { color: u8, vertex: usize },
    #[error("color {color}: vertex {vertex} is matched twice")]
    MatchedTwice { color: u8, vertex: usize },
    #[error("color {color}: vertex {vertex} is not matched")]
    Unmatched { color: u8, vertex: usize },
}

/// Checks that `partner` is a fixed-point-free involution on `0..len`.
/// `color` is only used for error messages (0 for Wick matchings).
pub(crate) fn check_involution(color: u8, partner: &[u8]) -> Result<(), GraphError> {
    let len = partner.len();
    for (v, &p) in partner.iter().enumerate() {
        let p = p as usize;
        if p >= len {
            return Err(GraphError::VertexOutOfRange { color, vertex: p, vertices: len });
        }
        if p == v {
            return Err(GraphError::Loop { color, vertex: v });
        }
        if partner[p] as usize != v {
            return Err(GraphError::MatchedTwice { color, vertex: p });
        }
    }
    Ok(())
}

/// Builds a partner array from an edge list, rejecting anything that is not a
/// perfect matching on `0..2n`.
pub(crate) fn partner_from_edges(
    color: u8,
    n: usize,
    edges: &[(usize, usize)],
) -> Result<Vec<u8>, GraphError> {
    let len = 2 * n;
    if edges.len() != n {
        return Err(GraphError::WrongEdgeCount { color, expected: n, got: edges.len() });
    }
    let mut partner = vec![UNMATCHED; len];
    for &(a, b) in edges {
        for v in [a, b] {
            if v >= len {
                return Err(GraphError::VertexOutOfRange { color, vertex: v, vertices: len });
            }
        }
        if a == b {
            return Err(GraphError::Loop { color, vertex: a });
        }
        for v in [a, b] {
            if partner[v] != UNMATCHED {
                return Err(GraphError::MatchedTwice { color, vertex: v });
            }
        }
        partner[a] = b as u8;
        partner[b] = a as u8;
    }
    if let Some(v) = partner.iter().position(|&p| p == UNMATCHED) {
        return Err(GraphError::Unmatched { color, vertex: v });
    }
    Ok(partner)
}

/// Number of cycles in the union of two perfect matchings on the same vertex
/// set. Every component of such a union is an even cycle (a 2-cycle when the
/// two matchings share an edge).
pub(crate) fn count_cycles(a: &[u8], b: &[u8]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    let len = a.len();
    let mut seen = [false; 2 * MAX_N + 2];
    let mut cycles = 0;
    for start in 0..len {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut v = start;
        loop {
            seen[v] = true;
            let w = a[v] as usize;
            seen[w] = true;
            v = b[w] as usize;
            if v == start {
                break;
            }
        }
    }
    cycles
}

/// A 3-regular 3-edge-colored multigraph on `2n` vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    n: usize,
    partner: [Vec<u8>; 3],
}

impl ColoredGraph {
    /// Builds a graph from the three color classes given as edge lists over
    /// `0..2n`. Each list must be a perfect matching.
    pub fn new(
        n: usize,
        edges1: &[(usize, usize)],
        edges2: &[(usize, usize)],
        edges3: &[(usize, usize)],
    ) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_N {
            return Err(GraphError::BadSize(n));
        }
        Ok(ColoredGraph {
            n,
            partner: [
                partner_from_edges(1, n, edges1)?,
                partner_from_edges(2, n, edges2)?,
                partner_from_edges(3, n, edges3)?,
            ],
        })
    }

    /// Builds a graph from three partner arrays of length `2n`.
    pub fn from_partners(partner: [Vec<u8>; 3]) -> Result<Self, GraphError> {
        let len = partner[0].len();
        if len == 0 || !len.is_multiple_of(2) || len / 2 > MAX_N {
            return Err(GraphError::BadSize(len / 2));
        }
        for (c, p) in partner.iter().enumerate() {
            if p.len() != len {
                return Err(GraphError::WrongEdgeCount {
                    color: c as u8 + 1,
                    expected: len / 2,
                    got: p.len() / 2,
                });
            }
            check_involution(c as u8 + 1, p)?;
        }
        Ok(ColoredGraph { n: len / 2, partner })
    }

    /// The only graph with `n = 1`: two vertices joined by one edge of each
    /// color.
    pub fn triple_edge() -> Self {
        let e = [(0, 1)];
        ColoredGraph::new(1, &e, &e, &e).expect("valid")
    }

    /// The complete graph on four vertices with its unique (up to relabeling)
    /// maximally single-trace coloring.
    pub fn tetrahedron() -> Self {
        ColoredGraph::new(2, &[(0, 1), (2, 3)], &[(1, 2), (3, 0)], &[(0, 2), (1, 3)])
            .expect("valid")
    }

    /// A uniformly random triple of perfect matchings on `2n` vertices.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!((1..=MAX_N).contains(&n));
        let mut one = || {
            let mut verts: Vec<u8> = (0..2 * n as u8).collect();
            verts.shuffle(rng);
            let mut p = vec![0u8; 2 * n];
            for pair in verts.chunks(2) {
                p[pair[0] as usize] = pair[1];
                p[pair[1] as usize] = pair[0];
            }
            p
        };
        let partner = [one(), one(), one()];
        ColoredGraph { n, partner }
    }

    /// Half the number of vertices.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        2 * self.n
    }

    /// The color-`c` neighbor of `v`.
    #[inline]
    pub fn partner(&self, c: Color, v: usize) -> usize {
        self.partner[c.index()][v] as usize
    }

    /// Raw partner array of one color.
    #[inline]
    pub fn partners(&self, c: Color) -> &[u8] {
        &self.partner[c.index()]
    }

    /// Edges of color `c` as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self, c: Color) -> Vec<(usize, usize)> {
        self.partners(c)
            .iter()
            .enumerate()
            .filter(|&(v, &p)| v < p as usize)
            .map(|(v, &p)| (v, p as usize))
            .collect()
    }

    /// Number of faces of colors `(i, j)`, i.e. cycles alternating between
    /// the two colors.
    ///
    /// Panics if `i == j`.
    pub fn count_faces(&self, i: Color, j: Color) -> usize {
        assert_ne!(i, j, "faces need two distinct colors");
        count_cycles(self.partners(i), self.partners(j))
    }

    /// All `(i, j)` faces, ordered by their smallest vertex.
    ///
    /// Each face starts at its smallest vertex and leaves it along color
    /// `i`, so the color-`i` edges of the face are exactly the steps
    /// `cycle[2t] -> cycle[2t + 1]`.
    pub fn faces(&self, i: Color, j: Color) -> Vec<Face> {
        assert_ne!(i, j, "faces need two distinct colors");
        let (pi, pj) = (self.partners(i), self.partners(j));
        let mut seen = vec![false; self.vertex_count()];
        let mut out = Vec::new();
        for start in 0..self.vertex_count() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            loop {
                let w = pi[v] as usize;
                seen[v] = true;
                seen[w] = true;
                cycle.push(v);
                cycle.push(w);
                v = pj[w] as usize;
                if v == start {
                    break;
                }
            }
            out.push(Face { first: i, second: j, cycle });
        }
        out
    }

    pub fn face_profile(&self) -> FaceProfile {
        FaceProfile {
            f12: self.count_faces(Color::One, Color::Two),
            f13: self.count_faces(Color::One, Color::Three),
            f23: self.count_faces(Color::Two, Color::Three),
            connected: self.is_connected(),
            bipartite: self.is_bipartite(),
        }
    }

    /// Maximally single-trace: exactly one face for every pair of colors.
    pub fn is_mst(&self) -> bool {
        self.count_faces(Color::One, Color::Two) == 1
            && self.count_faces(Color::One, Color::Three) == 1
            && self.count_faces(Color::Two, Color::Three) == 1
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.vertex_count()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.vertex_count() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = Vec::new();
            comp[start] = id;
            stack.push(start);
            while let Some(v) = stack.pop() {
                members.push(v);
                for c in Color::ALL {
                    let w = self.partner(c, v);
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// 2-colorability of the underlying multigraph. Parallel edges never
    /// create odd cycles, so they need no special handling.
    pub fn is_bipartite(&self) -> bool {
        let mut side = vec![u8::MAX; self.vertex_count()];
        let mut stack = Vec::new();
        for start in 0..self.vertex_count() {
            if side[start] != u8::MAX {
                continue;
            }
            side[start] = 0;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for c in Color::ALL {
                    let w = self.partner(c, v);
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[v];
                        stack.push(w);
                    } else if side[w] == side[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Disjoint union; `other`'s vertices are shifted by `2 * self.n()`.
    pub fn disjoint_union(&self, other: &ColoredGraph) -> ColoredGraph {
        let shift = self.vertex_count() as u8;
        let partner = std::array::from_fn(|c| {
            let mut p = self.partner[c].clone();
            p.extend(other.partner[c].iter().map(|&w| w + shift));
            p
        });
        ColoredGraph::from_partners(partner).expect("union of valid graphs is valid")
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    ///
    /// Panics if `perm` is not a permutation of `0..2n`.
    pub fn relabel(&self, perm: &[usize]) -> ColoredGraph {
        assert_eq!(perm.len(), self.vertex_count());
        let mut check = vec![false; perm.len()];
        for &p in perm {
            assert!(!std::mem::replace(&mut check[p], true), "not a permutation");
        }
        let partner = std::array::from_fn(|c| {
            let mut p = vec![0u8; perm.len()];
            for (v, &w) in self.partner[c].iter().enumerate() {
                p[perm[v]] = perm[w as usize] as u8;
            }
            p
        });
        ColoredGraph { n: self.n, partner }
    }

    /// The graph with its colors renamed: color `c` of the result carries
    /// the edges of color `perm[c]` of `self`.
    pub fn permute_colors(&self, perm: [Color; 3]) -> ColoredGraph {
        ColoredGraph {
            n: self.n,
            partner: std::array::from_fn(|c| self.partner[perm[c].index()].clone()),
        }
    }

    /// The induced subgraph on a union of connected components, relabeled
    /// to `0..` in the order given.
    pub(crate) fn restrict(&self, vertices: &[usize]) -> ColoredGraph {
        let mut new = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            new[v] = i;
        }
        let partner = std::array::from_fn(|c| {
            vertices.iter().map(|&v| new[self.partner[c][v] as usize] as u8).collect()
        });
        ColoredGraph::from_partners(partner).expect("components are closed under all colors")
    }
}

impl fmt::Debug for ColoredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ColoredGraph")
            .field("n", &self.n)
            .field("e1", &self.edges(Color::One))
            .field("e2", &self.edges(Color::Two))
            .field("e3", &self.edges(Color::Three))
            .finish()
    }
}

/// A bicolored cycle of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub first: Color,
    pub second: Color,
    /// Cyclic vertex sequence; `cycle[2t] -> cycle[2t + 1]` is a `first`
    /// colored edge and `cycle[2t + 1] -> cycle[2t + 2]` a `second` colored one.
    pub cycle: Vec<usize>,
}

impl Face {
    /// Number of vertices, twice the number of edges of either color.
    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// The `first`-colored edges as `(tail, head)` in traversal order.
    pub fn first_color_steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cycle.chunks(2).map(|p| (p[0], p[1]))
    }
}

/// Face counts for the three color pairs plus connectivity flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceProfile {
    pub f12: usize,
    pub f13: usize,
    pub f23: usize,
    pub connected: bool,
    pub bipartite: bool,
}

impl FaceProfile {
    pub fn is_mst(&self) -> bool {
        self.f12 == 1 && self.f13 == 1 && self.f23 == 1
    }

    /// Face count for an unordered pair of distinct colors.
    pub fn get(&self, i: Color, j: Color) -> usize {
        match (i.min(j), i.max(j)) {
            (Color::One, Color::Two) => self.f12,
            (Color::One, Color::Three) => self.f13,
            (Color::Two, Color::Three) => self.f23,
            _ => panic!("faces need two distinct colors"),
        }
    }
}
