//! Gaussian moments of trace invariants.
//!
//! With covariance `<T_abc T_a'b'c'> = N^-nu d_aa' d_bb' d_cc'`, Wick's
//! theorem gives `<Tr_G(T)> = N^(-nu n) * sum_M N^F(M,G)`, so the exact
//! moment is the histogram of `F` over all matchings shifted by `nu n`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Color, ColoredGraph};
use crate::matching::{enumerate_matchings, faces_unchecked};
use crate::search::{face_histogram_parallel, max_faces};

/// Largest `n` enumerated without `force`.
pub const DEFAULT_MOMENT_CAP: usize = 8;
/// Largest number of index assignments `N^(3n)` per Monte-Carlo sample.
pub const MC_TERM_CAP: u64 = 1 << 20;
/// Samples per independently seeded block.
pub const MC_BLOCK: u64 = 4096;
/// Generator used by [`mc_estimate`], recorded in reports.
pub const MC_RNG: &str = "chacha20/rand_chacha-0.3";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MomentError {
    #[error("n = {n} exceeds the enumeration cap {cap}; pass force to override")]
    TooLarge { n: usize, cap: usize },
    #[error("N^(3n) = {size}^{exponent} index assignments exceeds the cap of {cap}")]
    TooManyTerms { size: u64, exponent: u32, cap: u64 },
    #[error("N must be at least 1")]
    ZeroN,
    #[error("graph must be connected")]
    Disconnected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentPolynomial {
    pub nu: u32,
    pub n: usize,
    /// Exponent of `N` mapped to the number of matchings contributing it.
    pub terms: BTreeMap<i64, u64>,
}

impl MomentPolynomial {
    pub fn top_exponent(&self) -> i64 {
        *self.terms.keys().next_back().expect("at least one matching")
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.terms.values().sum()
    }

    /// `sum_M N^F(M,G)`, before the `N^(-nu n)` prefactor.
    pub fn wick_sum(&self, size: u64) -> u128 {
        let shift = self.nu as i64 * self.n as i64;
        self.terms.iter().map(|(&e, &c)| c as u128 * (size as u128).pow((e + shift) as u32)).sum()
    }

    /// `<Tr_G(T)>` at `N = size`.
    pub fn evaluate(&self, size: u64) -> f64 {
        self.terms.iter().map(|(&e, &c)| c as f64 * (size as f64).powi(e as i32)).sum()
    }
}

pub fn moment_polynomial(g: &ColoredGraph, nu: u32, force: bool) -> Result<MomentPolynomial, MomentError> {
    if g.n() > DEFAULT_MOMENT_CAP && !force {
        return Err(MomentError::TooLarge { n: g.n(), cap: DEFAULT_MOMENT_CAP });
    }
    let shift = nu as i64 * g.n() as i64;
    let terms = face_histogram_parallel(g)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(f, c)| (f as i64 - shift, c))
        .collect();
    Ok(MomentPolynomial { nu, n: g.n(), terms })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub rng: String,
}

/// Edge index of each vertex's color-`c` edge, colors laid out in blocks
/// of `n` so an assignment is one flat vector of `3n` values.
fn edge_slots(g: &ColoredGraph) -> Vec<[usize; 3]> {
    let mut slots = vec![[0; 3]; g.vertex_count()];
    for c in Color::ALL {
        for (e, (u, v)) in g.edges(c).into_iter().enumerate() {
            slots[u][c.index()] = c.index() * g.n() + e;
            slots[v][c.index()] = c.index() * g.n() + e;
        }
    }
    slots
}

/// `Tr_G(T)` by summing over all edge index assignments.
pub fn trace_invariant(g: &ColoredGraph, size: usize, tensor: &[f64]) -> f64 {
    let slots = edge_slots(g);
    let edges = 3 * g.n();
    let mut idx = vec![0usize; edges];
    let mut total = 0.0;
    loop {
        let mut term = 1.0;
        for s in &slots {
            term *= tensor[(idx[s[0]] * size + idx[s[1]]) * size + idx[s[2]]];
        }
        total += term;
        let mut d = 0;
        loop {
            if d == edges {
                return total;
            }
            idx[d] += 1;
            if idx[d] < size {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Sample mean of `Tr_G(T)` over Gaussian tensors with entry variance
/// `N^-nu`.
///
/// Samples are drawn in blocks of [`MC_BLOCK`]; block `b` uses a ChaCha20
/// stream `b` under `seed`, so the result does not depend on the thread
/// count.
pub fn mc_estimate(g: &ColoredGraph, size: usize, nu: u32, samples: u64, seed: u64) -> Result<McEstimate, MomentError> {
    if size == 0 {
        return Err(MomentError::ZeroN);
    }
    let exponent = 3 * g.n() as u32;
    let terms = (size as u64).checked_pow(exponent);
    if terms.is_none_or(|t| t > MC_TERM_CAP) {
        return Err(MomentError::TooManyTerms { size: size as u64, exponent, cap: MC_TERM_CAP });
    }
    let sd = (size as f64).powf(-(nu as f64) / 2.0);
    let normal = Normal::new(0.0, sd).expect("finite standard deviation");
    let blocks = samples.div_ceil(MC_BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut tensor = vec![0.0; size * size * size];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                tensor.iter_mut().for_each(|t| *t = normal.sample(&mut rng));
                let x = trace_invariant(g, size, &tensor);
                s1 += x;
                s2 += x * x;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let k = samples as f64;
    let mean = s1 / k;
    let var = (s2 / k - mean * mean).max(0.0) * k / (k - 1.0).max(1.0);
    Ok(McEstimate { mean, std_error: (var / k).sqrt(), samples, seed, rng: MC_RNG.into() })
}

/// Largest `n` for which the pair check enumerates matchings of `G ⊔ G`.
pub const PAIR_CHECK_MAX_N: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    /// `max_M F(M, G ⊔ G)` over all matchings.
    pub union_max: usize,
    /// `2 max_f`, attained by pairing each copy with its own witness.
    pub disjoint_max: usize,
    /// Best `F` among matchings with at least one edge between the copies.
    pub connected_max: usize,
    pub connected_beats_disjoint: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingExponents {
    pub nu: u32,
    /// Leading exponent of `<Tr_G Tr_G>`.
    pub pair: Option<i64>,
    /// Leading exponent of its connected part.
    pub pair_connected: Option<i64>,
    /// Leading exponent of `<Tr_G>^2`.
    pub squared: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub n: usize,
    pub max_f: usize,
    /// `3n`, twice the threshold.
    pub threshold_times_two: usize,
    pub violates: bool,
    pub pair: Option<PairCheck>,
    pub exponents: Vec<LeadingExponents>,
}

pub fn factorization_diagnostic(g: &ColoredGraph, nus: &[u32]) -> Result<FactorizationReport, MomentError> {
    if !g.is_connected() {
        return Err(MomentError::Disconnected);
    }
    let n = g.n();
    let max_f = max_faces(g).max_f;
    let pair = (n <= PAIR_CHECK_MAX_N).then(|| {
        let gg = g.disjoint_union(g);
        let half = g.vertex_count();
        let mut union_max = 0;
        let mut connected_max = 0;
        let mut it = enumerate_matchings(2 * n);
        while let Some((_, p)) = it.next_partners() {
            let f = faces_unchecked(&gg, p);
            union_max = union_max.max(f);
            if (0..half).any(|v| p[v] as usize >= half) {
                connected_max = connected_max.max(f);
            }
        }
        PairCheck { union_max, disjoint_max: 2 * max_f, connected_max, connected_beats_disjoint: connected_max >= 2 * max_f }
    });
    let exponents = nus
        .iter()
        .map(|&nu| {
            let shift = 2 * nu as i64 * n as i64;
            LeadingExponents {
                nu,
                pair: pair.as_ref().map(|p| p.union_max as i64 - shift),
                pair_connected: pair.as_ref().map(|p| p.connected_max as i64 - shift),
                squared: 2 * max_f as i64 - shift,
            }
        })
        .collect();
    Ok(FactorizationReport { n, max_f, threshold_times_two: 3 * n, violates: 2 * max_f <= 3 * n, pair, exponents })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_edge_moment() {
        let p = moment_polynomial(&ColoredGraph::triple_edge(), 2, false).unwrap();
        assert_eq!(p.terms, BTreeMap::from([(1, 1)]));
        assert_eq!(p.evaluate(3), 3.0);
        assert_eq!(p.wick_sum(3), 27);
    }

    #[test]
    fn tetrahedron_moment() {
        let p = moment_polynomial(&ColoredGraph::tetrahedron(), 2, false).unwrap();
        assert_eq!(p.total_multiplicity(), 3);
        assert_eq!(p.top_exponent(), 0);
    }

    #[test]
    fn trace_of_constant_tensor() {
        // All entries 1: every assignment contributes 1.
        let g = ColoredGraph::tetrahedron();
        assert_eq!(trace_invariant(&g, 2, &[1.0; 8]), 64.0);
    }

    #[test]
    fn mc_is_seed_deterministic() {
        let g = ColoredGraph::triple_edge();
        let a = mc_estimate(&g, 2, 2, 5000, 9).unwrap();
        let b = mc_estimate(&g, 2, 2, 5000, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.mean, mc_estimate(&g, 2, 2, 5000, 10).unwrap().mean);
    }

    #[test]
    fn guards() {
        let mut rng = <rand_chacha::ChaCha8Rng as SeedableRng>::seed_from_u64(1);
        let big = ColoredGraph::random(9, &mut rng);
        assert_eq!(moment_polynomial(&big, 2, false), Err(MomentError::TooLarge { n: 9, cap: 8 }));
        let g = ColoredGraph::random(4, &mut rng);
        assert!(matches!(mc_estimate(&g, 6, 2, 10, 0), Err(MomentError::TooManyTerms { .. })));
        assert_eq!(mc_estimate(&g, 0, 2, 10, 0), Err(MomentError::ZeroN));
    }

    #[test]
    fn triple_edge_pair() {
        let r = factorization_diagnostic(&ColoredGraph::triple_edge(), &[0, 2]).unwrap();
        let pair = r.pair.unwrap();
        assert_eq!((pair.union_max, pair.disjoint_max), (6, 6));
        assert!(!pair.connected_beats_disjoint);
        assert!(!r.violates);
    }
}
