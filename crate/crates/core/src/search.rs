//! Exact maximization of `F(M, G)` over all color-0 matchings.
//!
//! The search builds `M` one edge at a time in enumeration order. For each
//! graph color `c` it keeps the open paths of `M ∪ E_c` as an "other end"
//! table over the still-unmatched vertices: adding the edge `{u, v}` closes a
//! `(0, c)` face exactly when `v` is the other end of `u`'s path, and
//! otherwise splices two paths together. Both cases are O(1) to apply and to
//! undo, so no face is ever recounted from scratch.
//!
//! Pruning uses the admissible bound `closed + 3 * remaining`: one new
//! color-0 edge closes at most one face per color. Branches are cut only when
//! this bound is strictly below the best value found, so ties survive and
//! the maximizer count stays exact.

use serde::{Deserialize, Serialize};

use crate::graph::{ColoredGraph, UNMATCHED};
use crate::matching::{rank, Matching};

/// Path-end bookkeeping for `K` fixed involutions against a growing matching.
pub(crate) struct FaceTracker<const K: usize> {
    ends: [Vec<u8>; K],
}

impl<const K: usize> FaceTracker<K> {
    pub(crate) fn new(colors: [&[u8]; K]) -> Self {
        FaceTracker { ends: colors.map(|p| p.to_vec()) }
    }

    /// Which colors get a face closed by adding `{u, v}`.
    #[inline(always)]
    pub(crate) fn closes(&self, u: usize, v: usize) -> [bool; K] {
        std::array::from_fn(|c| self.ends[c][u] as usize == v)
    }

    #[inline(always)]
    pub(crate) fn join(&mut self, u: usize, v: usize) -> [(u8, u8); K] {
        std::array::from_fn(|c| {
            let ends = &mut self.ends[c];
            let a = ends[u];
            let b = ends[v];
            if a as usize != v {
                ends[a as usize] = b;
                ends[b as usize] = a;
            }
            (a, b)
        })
    }

    #[inline(always)]
    pub(crate) fn unjoin(&mut self, u: usize, v: usize, saved: [(u8, u8); K]) {
        for (c, (a, b)) in saved.into_iter().enumerate() {
            if a as usize != v {
                self.ends[c][a as usize] = u as u8;
                self.ends[c][b as usize] = v as u8;
            }
        }
    }
}

/// Knobs for [`max_faces_with`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Enable branch-and-bound pruning.
    pub prune: bool,
    /// Maximum number of search-tree nodes to visit. The first complete
    /// matching is always reached regardless.
    pub budget: Option<u64>,
    /// Stop as soon as a matching with more than this many faces is found.
    pub stop_above: Option<usize>,
    /// A value known to be attained by some matching. Seeding the search
    /// with it only tightens pruning; the result is unchanged.
    pub known_lower_bound: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { prune: true, budget: None, stop_above: None, known_lower_bound: None }
    }
}

impl SearchOptions {
    pub fn exhaustive() -> Self {
        SearchOptions { prune: false, ..Default::default() }
    }
}

/// Best matching found by a search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxFaceResult {
    pub max_f: usize,
    /// First maximizer in enumeration order.
    pub witness: Matching,
    pub witness_index: u64,
    /// Number of matchings attaining `max_f`.
    pub maximizer_count: u64,
    /// Complete matchings evaluated.
    pub matchings_examined: u64,
    /// Subtrees (or table entries) skipped by the bound.
    pub pruned: u64,
}

/// Outcome of a possibly interrupted search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Exact(MaxFaceResult),
    /// The search stopped early; `max_f` is only a lower bound and
    /// `maximizer_count` only counts what was seen.
    LowerBound(MaxFaceResult),
}

impl SearchOutcome {
    pub fn is_exact(&self) -> bool {
        matches!(self, SearchOutcome::Exact(_))
    }

    pub fn result(&self) -> &MaxFaceResult {
        match self {
            SearchOutcome::Exact(r) | SearchOutcome::LowerBound(r) => r,
        }
    }

    pub fn into_result(self) -> MaxFaceResult {
        match self {
            SearchOutcome::Exact(r) | SearchOutcome::LowerBound(r) => r,
        }
    }
}

/// Exact `max_M F(M, G)` with pruning.
pub fn max_faces(g: &ColoredGraph) -> MaxFaceResult {
    match max_faces_with(g, &SearchOptions::default()) {
        SearchOutcome::Exact(r) => r,
        SearchOutcome::LowerBound(_) => unreachable!("no budget was set"),
    }
}

pub fn max_faces_with(g: &ColoredGraph, opts: &SearchOptions) -> SearchOutcome {
    let len = g.vertex_count();
    let mut s = Dfs {
        tracker: FaceTracker::new([g.partners(crate::Color::One), g.partners(crate::Color::Two), g.partners(crate::Color::Three)]),
        partner0: vec![UNMATCHED; len],
        m: g.n(),
        best: opts.known_lower_bound.unwrap_or(0),
        count: 0,
        witness: None,
        examined: 0,
        pruned: 0,
        nodes: 0,
        prune: opts.prune,
        budget: opts.budget.unwrap_or(u64::MAX),
        stop_above: opts.stop_above.unwrap_or(usize::MAX),
        halted: false,
    };
    s.descend(0, 0, 0);
    let witness = s
        .witness
        .map(Matching::from_partners_unchecked)
        .expect("known_lower_bound exceeded the true maximum");
    let result = MaxFaceResult {
        max_f: s.best,
        witness_index: rank(&witness),
        witness,
        maximizer_count: s.count,
        matchings_examined: s.examined,
        pruned: s.pruned,
    };
    if s.halted {
        SearchOutcome::LowerBound(result)
    } else {
        SearchOutcome::Exact(result)
    }
}

struct Dfs {
    tracker: FaceTracker<3>,
    partner0: Vec<u8>,
    m: usize,
    best: usize,
    count: u64,
    witness: Option<Vec<u8>>,
    examined: u64,
    pruned: u64,
    nodes: u64,
    prune: bool,
    budget: u64,
    stop_above: usize,
    halted: bool,
}

impl Dfs {
    fn descend(&mut self, from: usize, placed: usize, closed: usize) {
        self.nodes += 1;
        if placed == self.m {
            self.leaf(closed);
            return;
        }
        if self.nodes > self.budget && self.witness.is_some() {
            self.halted = true;
            return;
        }
        let mut u = from;
        while self.partner0[u] != UNMATCHED {
            u += 1;
        }
        let rest = 3 * (self.m - placed - 1);
        for v in u + 1..self.partner0.len() {
            if self.partner0[v] != UNMATCHED {
                continue;
            }
            let gain = self.tracker.closes(u, v).iter().filter(|&&b| b).count();
            if self.prune && closed + gain + rest < self.best {
                self.pruned += 1;
                continue;
            }
            let saved = self.tracker.join(u, v);
            self.partner0[u] = v as u8;
            self.partner0[v] = u as u8;
            self.descend(u + 1, placed + 1, closed + gain);
            self.partner0[u] = UNMATCHED;
            self.partner0[v] = UNMATCHED;
            self.tracker.unjoin(u, v, saved);
            if self.halted {
                return;
            }
        }
    }

    fn leaf(&mut self, total: usize) {
        self.examined += 1;
        if total > self.best || (total == self.best && self.witness.is_none()) {
            self.best = total;
            self.count = 1;
            self.witness = Some(self.partner0.clone());
        } else if total == self.best {
            self.count += 1;
        }
        if total > self.stop_above {
            self.halted = true;
        }
    }
}

/// Histogram of `F(M, G)` over all matchings: entry `f` counts the matchings
/// with exactly `f` faces.
pub fn face_histogram(g: &ColoredGraph) -> Vec<u64> {
    let m = g.n();
    let mut hist = vec![0u64; 3 * m + 1];
    let colors = [g.partners(crate::Color::One), g.partners(crate::Color::Two), g.partners(crate::Color::Three)];
    let mut tracker = FaceTracker::new(colors);
    let mut partner0 = vec![UNMATCHED; 2 * m];
    histogram_dfs(&mut tracker, &mut partner0, 0, 0, 0, &mut hist);
    hist
}

/// Same as [`face_histogram`], split over the partner of vertex 0 and run
/// on the rayon pool.
pub fn face_histogram_parallel(g: &ColoredGraph) -> Vec<u64> {
    use rayon::prelude::*;
    let m = g.n();
    if m < 4 {
        return face_histogram(g);
    }
    let colors = [g.partners(crate::Color::One), g.partners(crate::Color::Two), g.partners(crate::Color::Three)];
    (1..2 * m)
        .into_par_iter()
        .map(|v| {
            let mut hist = vec![0u64; 3 * m + 1];
            let mut tracker = FaceTracker::new(colors);
            let mut partner0 = vec![UNMATCHED; 2 * m];
            let gain = tracker.closes(0, v).iter().filter(|&&b| b).count();
            tracker.join(0, v);
            partner0[0] = v as u8;
            partner0[v] = 0;
            histogram_dfs(&mut tracker, &mut partner0, 1, 1, gain, &mut hist);
            hist
        })
        .reduce(
            || vec![0u64; 3 * m + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn histogram_dfs(
    tracker: &mut FaceTracker<3>,
    partner0: &mut [u8],
    from: usize,
    placed: usize,
    closed: usize,
    hist: &mut [u64],
) {
    let m = partner0.len() / 2;
    if placed == m {
        hist[closed] += 1;
        return;
    }
    let mut u = from;
    while partner0[u] != UNMATCHED {
        u += 1;
    }
    for v in u + 1..partner0.len() {
        if partner0[v] != UNMATCHED {
            continue;
        }
        let gain = tracker.closes(u, v).iter().filter(|&&b| b).count();
        let saved = tracker.join(u, v);
        partner0[u] = v as u8;
        partner0[v] = u as u8;
        histogram_dfs(tracker, partner0, u + 1, placed + 1, closed + gain, hist);
        partner0[u] = UNMATCHED;
        partner0[v] = UNMATCHED;
        tracker.unjoin(u, v, saved);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{double_factorial, enumerate_matchings, faces_with_color0};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain scan of the matching stream with full recounts.
    fn brute_max(g: &ColoredGraph) -> (usize, Matching, u64) {
        let mut best = 0;
        let mut witness = None;
        let mut count = 0;
        for m in enumerate_matchings(g.n()) {
            let f = faces_with_color0(g, &m).unwrap();
            if f > best {
                best = f;
                witness = Some(m);
                count = 1;
            } else if f == best {
                count += 1;
            }
        }
        (best, witness.unwrap(), count)
    }

    #[test]
    fn small_known_maxima() {
        assert_eq!(max_faces(&ColoredGraph::triple_edge()).max_f, 3);
        assert_eq!(max_faces(&ColoredGraph::tetrahedron()).max_f, 4);
    }

    #[test]
    fn pruned_exhaustive_and_brute_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=5 {
            for _ in 0..15 {
                let g = ColoredGraph::random(n, &mut rng);
                let (best, witness, count) = brute_max(&g);
                let pruned = max_faces(&g);
                let full = max_faces_with(&g, &SearchOptions::exhaustive()).into_result();
                for r in [&pruned, &full] {
                    assert_eq!(r.max_f, best);
                    assert_eq!(r.witness, witness);
                    assert_eq!(r.maximizer_count, count);
                    assert_eq!(faces_with_color0(&g, &r.witness).unwrap(), r.max_f);
                    assert!(r.max_f <= 3 * n);
                }
                assert_eq!(full.matchings_examined, double_factorial(n));
                assert_eq!(full.pruned, 0);
            }
        }
    }

    #[test]
    fn seeded_search_is_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let n = rng.gen_range(2..=6);
            let g = ColoredGraph::random(n, &mut rng);
            let plain = max_faces(&g);
            let seeded = max_faces_with(
                &g,
                &SearchOptions { known_lower_bound: Some(n + 2), ..Default::default() },
            );
            assert_eq!(seeded, SearchOutcome::Exact(MaxFaceResult { matchings_examined: seeded.result().matchings_examined, pruned: seeded.result().pruned, ..plain }));
        }
    }

    #[test]
    fn budget_yields_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = ColoredGraph::random(7, &mut rng);
        let out = max_faces_with(&g, &SearchOptions { budget: Some(10), ..SearchOptions::exhaustive() });
        assert!(!out.is_exact());
        let r = out.result();
        assert_eq!(faces_with_color0(&g, &r.witness).unwrap(), r.max_f);
        assert!(r.max_f <= max_faces(&g).max_f);
    }

    #[test]
    fn stop_above_finds_witness() {
        let g = ColoredGraph::tetrahedron();
        let out = max_faces_with(&g, &SearchOptions { stop_above: Some(3), ..Default::default() });
        assert!(!out.is_exact());
        assert_eq!(out.result().max_f, 4);
    }

    #[test]
    fn histogram_sums_to_double_factorial() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=6 {
            let g = ColoredGraph::random(n, &mut rng);
            let h = face_histogram(&g);
            assert_eq!(h.iter().sum::<u64>(), double_factorial(n));
            assert_eq!(h, face_histogram_parallel(&g));
            let top = h.iter().rposition(|&c| c > 0).unwrap();
            let r = max_faces(&g);
            assert_eq!(top, r.max_f);
            assert_eq!(h[top], r.maximizer_count);
        }
    }
}
