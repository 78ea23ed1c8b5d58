//! Canonical forms for color-preserving isomorphism.
//!
//! In a connected edge-colored cubic graph, a color-preserving isomorphism
//! is pinned down by the image of a single vertex: from there every other
//! vertex is reached along colored edges, and colors are never exchanged.
//! So a canonical labeling only has to try the `2n` possible roots. From
//! each root we number vertices in discovery order (colors 1, 2, 3 from each
//! vertex in turn) and write down the partner table under that numbering;
//! the lexicographically smallest table is the code. Comparison against the
//! best table so far happens while the table is being written, so most
//! roots are abandoned after a few entries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{Color, ColoredGraph};

const NONE: u8 = u8::MAX;

/// Code identifying a color-preserving isomorphism class.
///
/// Layout: for each connected component in sorted order, one byte with the
/// component's half vertex count followed by its `3 * 2k` partner bytes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    n: usize,
    code: Vec<u8>,
}

impl CanonicalForm {
    /// Form of a connected graph from [`Canonicalizer::connected_code`].
    pub(crate) fn from_connected(n: usize, code: &[u8]) -> Self {
        let mut full = Vec::with_capacity(code.len() + 1);
        full.push(n as u8);
        full.extend_from_slice(code);
        CanonicalForm { n, code: full }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn code(&self) -> &[u8] {
        &self.code
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.code)
    }

    pub fn from_hex(s: &str) -> Result<Self, String> {
        let code = hex::decode(s).map_err(|e| e.to_string())?;
        let mut at = 0;
        let mut n = 0;
        while at < code.len() {
            let k = code[at] as usize;
            at += 1 + 6 * k;
            n += k;
        }
        if at != code.len() || n == 0 {
            return Err("malformed canonical code".into());
        }
        Ok(CanonicalForm { n, code })
    }

    /// Rebuilds a representative graph from the code.
    pub fn to_graph(&self) -> ColoredGraph {
        let mut partner: [Vec<u8>; 3] = Default::default();
        let mut at = 0;
        let mut offset = 0u8;
        while at < self.code.len() {
            let k = self.code[at] as usize;
            at += 1;
            for t in 0..2 * k {
                for (c, p) in partner.iter_mut().enumerate() {
                    p.push(self.code[at + 3 * t + c] + offset);
                }
            }
            at += 6 * k;
            offset += 2 * k as u8;
        }
        ColoredGraph::from_partners(partner).expect("code encodes a valid graph")
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalForm::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Reusable buffers for canonicalizing many connected graphs of one size.
pub struct Canonicalizer {
    label: Vec<u8>,
    order: Vec<u8>,
    best: Vec<u8>,
}

impl Canonicalizer {
    pub fn new(n: usize) -> Self {
        Canonicalizer { label: vec![NONE; 2 * n], order: vec![0; 2 * n], best: vec![0; 6 * n] }
    }

    /// Minimal partner table of a connected graph given by three partner
    /// arrays. The result is borrowed from the internal buffer.
    ///
    /// For a disconnected graph only the component of each root is encoded,
    /// so callers must check connectivity first.
    pub fn connected_code(&mut self, p: [&[u8]; 3]) -> &[u8] {
        let len = p[0].len();
        self.label.resize(len, NONE);
        self.order.resize(len, 0);
        self.best.resize(3 * len, 0);
        let mut have_best = false;
        for root in 0..len {
            self.label.fill(NONE);
            self.label[root] = 0;
            self.order[0] = root as u8;
            let mut next = 1u8;
            // `smaller` once this root's table is already below the best.
            let mut smaller = !have_best;
            let mut pos = 0;
            let mut abandoned = false;
            'walk: for t in 0..len {
                if t >= next as usize {
                    // Component exhausted before all vertices were seen.
                    break;
                }
                let v = self.order[t] as usize;
                for pc in p {
                    let w = pc[v] as usize;
                    if self.label[w] == NONE {
                        self.label[w] = next;
                        self.order[next as usize] = w as u8;
                        next += 1;
                    }
                    let x = self.label[w];
                    if smaller {
                        self.best[pos] = x;
                    } else if x < self.best[pos] {
                        smaller = true;
                        self.best[pos] = x;
                    } else if x > self.best[pos] {
                        abandoned = true;
                        break 'walk;
                    }
                    pos += 1;
                }
            }
            if !abandoned {
                have_best = true;
            }
        }
        &self.best[..3 * len]
    }
}

/// Canonical form under color-preserving relabeling.
pub fn canonical_form(g: &ColoredGraph) -> CanonicalForm {
    let comps = g.components();
    let mut parts: Vec<Vec<u8>> = comps
        .iter()
        .map(|vs| {
            let sub = if comps.len() == 1 { g.clone() } else { g.restrict(vs) };
            let mut canon = Canonicalizer::new(sub.n());
            let code = canon.connected_code([sub.partners(Color::One), sub.partners(Color::Two), sub.partners(Color::Three)]);
            let mut part = Vec::with_capacity(code.len() + 1);
            part.push(sub.n() as u8);
            part.extend_from_slice(code);
            part
        })
        .collect();
    parts.sort();
    CanonicalForm { n: g.n(), code: parts.concat() }
}

pub fn is_isomorphic(g: &ColoredGraph, h: &ColoredGraph) -> bool {
    g.n() == h.n() && canonical_form(g) == canonical_form(h)
}

/// Canonical form up to color-preserving relabeling *and* any permutation
/// of the three colors. For reporting only; nothing else in the crate
/// identifies graphs that differ by a color swap.
pub fn canonical_form_up_to_colors(g: &ColoredGraph) -> CanonicalForm {
    use Color::*;
    [[One, Two, Three], [One, Three, Two], [Two, One, Three], [Two, Three, One], [Three, One, Two], [Three, Two, One]]
        .into_iter()
        .map(|perm| canonical_form(&g.permute_colors(perm)))
        .min()
        .unwrap()
}

/// Explicit color-preserving isomorphism `g -> h` (as `map[v]` for each
/// vertex `v` of `g`), found by trying every image of one root per
/// component and propagating along colored edges.
pub fn find_isomorphism(g: &ColoredGraph, h: &ColoredGraph) -> Option<Vec<usize>> {
    if g.n() != h.n() {
        return None;
    }
    let gc = g.components();
    let hc = h.components();
    if gc.len() != hc.len() {
        return None;
    }
    let mut map = vec![usize::MAX; g.vertex_count()];
    let mut used = vec![false; hc.len()];
    if assign_components(g, h, &gc, &hc, 0, &mut used, &mut map) {
        Some(map)
    } else {
        None
    }
}

fn assign_components(
    g: &ColoredGraph,
    h: &ColoredGraph,
    gc: &[Vec<usize>],
    hc: &[Vec<usize>],
    k: usize,
    used: &mut [bool],
    map: &mut [usize],
) -> bool {
    if k == gc.len() {
        return true;
    }
    let root = gc[k][0];
    for (j, comp) in hc.iter().enumerate() {
        if used[j] || comp.len() != gc[k].len() {
            continue;
        }
        for &target in comp {
            if propagate(g, h, root, target, map) {
                used[j] = true;
                if assign_components(g, h, gc, hc, k + 1, used, map) {
                    return true;
                }
                used[j] = false;
            }
            for &v in &gc[k] {
                map[v] = usize::MAX;
            }
        }
    }
    false
}

fn propagate(g: &ColoredGraph, h: &ColoredGraph, root: usize, target: usize, map: &mut [usize]) -> bool {
    let mut inverse = std::collections::HashMap::new();
    map[root] = target;
    inverse.insert(target, root);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for c in Color::ALL {
            let w = g.partner(c, v);
            let image = h.partner(c, map[v]);
            if map[w] == usize::MAX {
                if inverse.contains_key(&image) {
                    return false;
                }
                map[w] = image;
                inverse.insert(image, w);
                stack.push(w);
            } else if map[w] != image {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::enumerate_matchings;
    use crate::table::survey_fixed_colors;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn shuffled(g: &ColoredGraph, rng: &mut ChaCha8Rng) -> (ColoredGraph, Vec<usize>) {
        let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
        perm.shuffle(rng);
        (g.relabel(&perm), perm)
    }

    /// Tries all `(2n)!` permutations.
    fn brute_isomorphic(g: &ColoredGraph, h: &ColoredGraph) -> bool {
        fn rec(g: &ColoredGraph, h: &ColoredGraph, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
            let len = g.vertex_count();
            if perm.len() == len {
                return Color::ALL.iter().all(|&c| (0..len).all(|v| h.partner(c, perm[v]) == perm[g.partner(c, v)]));
            }
            for t in 0..len {
                if !used[t] {
                    used[t] = true;
                    perm.push(t);
                    if rec(g, h, perm, used) {
                        return true;
                    }
                    perm.pop();
                    used[t] = false;
                }
            }
            false
        }
        g.n() == h.n() && rec(g, h, &mut Vec::new(), &mut vec![false; g.vertex_count()])
    }

    fn all_graphs(n: usize) -> Vec<ColoredGraph> {
        let ms: Vec<_> = enumerate_matchings(n).collect();
        let mut out = Vec::new();
        for a in &ms {
            for b in &ms {
                for c in &ms {
                    out.push(
                        ColoredGraph::from_partners([a.partners().to_vec(), b.partners().to_vec(), c.partners().to_vec()])
                            .unwrap(),
                    );
                }
            }
        }
        out
    }

    #[test]
    fn relabeling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut graphs = vec![ColoredGraph::triple_edge(), ColoredGraph::tetrahedron()];
        graphs.extend((0..10).map(|_| ColoredGraph::random(rng.gen_range(1..9), &mut rng)));
        for g in &graphs {
            let code = canonical_form(g);
            for _ in 0..100 {
                let (h, _) = shuffled(g, &mut rng);
                assert_eq!(canonical_form(&h), code);
            }
        }
    }

    #[test]
    fn distinguishes_face_profiles() {
        let t = ColoredGraph::tetrahedron();
        let p = ColoredGraph::new(2, &[(0, 1), (2, 3)], &[(1, 2), (3, 0)], &[(0, 1), (2, 3)]).unwrap();
        assert_ne!(canonical_form(&t), canonical_form(&p));
        assert!(is_isomorphic(&ColoredGraph::triple_edge(), &ColoredGraph::triple_edge()));
    }

    #[test]
    fn code_round_trips_to_isomorphic_graph() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let g = ColoredGraph::random(rng.gen_range(1..8), &mut rng);
            let code = canonical_form(&g);
            let back = CanonicalForm::from_hex(&code.to_hex()).unwrap();
            assert_eq!(back, code);
            let rep = code.to_graph();
            assert_eq!(canonical_form(&rep), code);
            assert!(find_isomorphism(&g, &rep).is_some());
        }
    }

    #[test]
    fn complete_against_brute_force_small() {
        // All graphs with n <= 2, plus a sample at n = 3 (the full n = 3 set
        // is checked in the integration tests).
        for n in 1..=2 {
            let graphs = all_graphs(n);
            for g in &graphs {
                for h in &graphs {
                    let same = canonical_form(g) == canonical_form(h);
                    assert_eq!(same, brute_isomorphic(g, h));
                    assert_eq!(same, find_isomorphism(g, h).is_some());
                }
            }
        }
    }

    #[test]
    fn witness_map_is_an_isomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let g = ColoredGraph::random(rng.gen_range(1..10), &mut rng);
            let (h, _) = shuffled(&g, &mut rng);
            let map = find_isomorphism(&g, &h).unwrap();
            assert_eq!(g.relabel(&map), h);
        }
    }

    #[test]
    fn color_orbit_code() {
        let g = ColoredGraph::new(2, &[(0, 1), (2, 3)], &[(1, 2), (3, 0)], &[(0, 1), (2, 3)]).unwrap();
        let swapped = g.permute_colors([Color::Three, Color::Two, Color::One]);
        assert_eq!(canonical_form_up_to_colors(&g), canonical_form_up_to_colors(&swapped));
        // Same colors swapped E2/E3 instead: not color-preserving isomorphic.
        let other = g.permute_colors([Color::One, Color::Three, Color::Two]);
        assert_ne!(canonical_form(&g), canonical_form(&other));
    }

    #[test]
    fn survey_sweep_at_n3_collapses() {
        let (e1, e2) = survey_fixed_colors(3);
        let codes: HashSet<CanonicalForm> = enumerate_matchings(3)
            .map(|m| canonical_form(&ColoredGraph::from_partners([e1.clone(), e2.clone(), m.partners().to_vec()]).unwrap()))
            .collect();
        assert!(codes.len() < 15);
    }
}
