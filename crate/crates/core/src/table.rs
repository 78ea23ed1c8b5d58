//! Precomputed `(F01, F02)` for every matching against two fixed colors.
//!
//! Surveys hold colors 1 and 2 fixed and only vary color 3, so the `(0, 1)`
//! and `(0, 2)` face counts of each matching can be computed once. With the
//! table sorted by `F01 + F02` in decreasing order, a maximization only has
//! to count `(0, 3)` faces and can stop as soon as `F01 + F02 + m` drops
//! below the best value seen, since `F03 <= m`.

use std::io::Read;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{count_cycles, Color, ColoredGraph, UNMATCHED};
use crate::matching::{double_factorial, rank, Matching, ENUMERATION_RULE_ID};
use crate::search::{FaceTracker, MaxFaceResult};

const CACHE_MAGIC: &[u8; 4] = b"TFPT";
const CACHE_VERSION: u32 = 1;

/// Default memory cap for a table: 1 GiB.
pub const DEFAULT_TABLE_CAP: u64 = 1 << 30;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table for m = {m} needs {required} bytes, cap is {cap}")]
    TooLarge { m: usize, required: u64, cap: u64 },
    #[error("graph colors 1/2 differ from the table's fixed matchings")]
    ColorMismatch,
    #[error("fixed matchings must have equal even length")]
    BadFixedColors,
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub struct PartialFaceTable {
    m: usize,
    e1: Vec<u8>,
    e2: Vec<u8>,
    /// `(F01, F02)` in enumeration order.
    faces: Vec<(u8, u8)>,
    /// Flat partner arrays in enumeration order, `2m` bytes each.
    partners: Vec<u8>,
    /// Indices sorted by `F01 + F02` descending, then index ascending.
    order: Vec<u32>,
}

/// Bytes a table for `m` edges occupies.
pub fn table_size_estimate(m: usize) -> u64 {
    double_factorial(m) * (2 * m as u64 + 2 + 4)
}

impl PartialFaceTable {
    /// Table for the survey's fixed colors: `E1 = {0,1},{2,3},...` and
    /// `E2 = {1,2},{3,4},...,{2m-1,0}`.
    pub fn for_survey(m: usize, cap: u64) -> Result<Self, TableError> {
        let (e1, e2) = survey_fixed_colors(m);
        Self::new(&e1, &e2, cap)
    }

    pub fn new(e1: &[u8], e2: &[u8], cap: u64) -> Result<Self, TableError> {
        if e1.len() != e2.len() || e1.is_empty() || !e1.len().is_multiple_of(2) {
            return Err(TableError::BadFixedColors);
        }
        let m = e1.len() / 2;
        let required = table_size_estimate(m);
        if required > cap {
            return Err(TableError::TooLarge { m, required, cap });
        }
        let count = double_factorial(m) as usize;
        let mut faces = Vec::with_capacity(count);
        let mut partners = Vec::with_capacity(count * 2 * m);
        let mut tracker = FaceTracker::new([e1, e2]);
        let mut partner0 = vec![UNMATCHED; 2 * m];
        fill(&mut tracker, &mut partner0, 0, 0, [0, 0], &mut |p, f| {
            faces.push((f[0] as u8, f[1] as u8));
            partners.extend_from_slice(p);
        });
        let order = sorted_order(&faces);
        Ok(PartialFaceTable { m, e1: e1.to_vec(), e2: e2.to_vec(), faces, partners, order })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// `(F01, F02)` of the matching at `index`.
    pub fn get(&self, index: usize) -> (usize, usize) {
        let (a, b) = self.faces[index];
        (a as usize, b as usize)
    }

    pub fn matching(&self, index: usize) -> Matching {
        Matching::from_partners_unchecked(self.partner_slice(index).to_vec())
    }

    fn partner_slice(&self, index: usize) -> &[u8] {
        let w = 2 * self.m;
        &self.partners[index * w..(index + 1) * w]
    }

    pub fn fixed_colors(&self) -> (&[u8], &[u8]) {
        (&self.e1, &self.e2)
    }

    /// Exact `max_M F(M, G)` for a graph whose colors 1 and 2 are the
    /// table's fixed matchings. Same result (maximum, first maximizer,
    /// maximizer count) as the branch-and-bound search.
    ///
    /// `known_lower_bound` must be attained by some matching.
    pub fn max_faces(
        &self,
        g: &ColoredGraph,
        known_lower_bound: Option<usize>,
    ) -> Result<MaxFaceResult, TableError> {
        if g.partners(Color::One) != self.e1.as_slice() || g.partners(Color::Two) != self.e2.as_slice() {
            return Err(TableError::ColorMismatch);
        }
        let e3 = g.partners(Color::Three);
        let mut best = known_lower_bound.unwrap_or(0);
        let mut witness: Option<u32> = None;
        let mut count = 0u64;
        let mut examined = 0u64;
        for &idx in &self.order {
            let (f1, f2) = self.faces[idx as usize];
            let partial = f1 as usize + f2 as usize;
            if partial + self.m < best {
                break;
            }
            examined += 1;
            let total = partial + count_cycles(self.partner_slice(idx as usize), e3);
            if total > best || (total == best && witness.is_none()) {
                best = total;
                count = 1;
                witness = Some(idx);
            } else if total == best {
                count += 1;
                witness = witness.map(|w| w.min(idx));
            }
        }
        let idx = witness.expect("known_lower_bound exceeded the true maximum");
        let witness = self.matching(idx as usize);
        debug_assert_eq!(rank(&witness), idx as u64);
        Ok(MaxFaceResult {
            max_f: best,
            witness,
            witness_index: idx as u64,
            maximizer_count: count,
            matchings_examined: examined,
            pruned: self.faces.len() as u64 - examined,
        })
    }

    /// Writes the `(F01, F02)` pairs with a versioned header and a trailing
    /// SHA-256 digest. Matchings themselves are not stored; they are
    /// regenerated from the enumeration rule on load.
    pub fn save(&self, path: &Path) -> Result<(), TableError> {
        let mut buf = Vec::with_capacity(64 + 2 * self.faces.len());
        buf.extend_from_slice(CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.m as u32).to_le_bytes());
        buf.extend_from_slice(&ENUMERATION_RULE_ID.to_le_bytes());
        buf.extend_from_slice(&self.e1);
        buf.extend_from_slice(&self.e2);
        buf.extend_from_slice(&(self.faces.len() as u64).to_le_bytes());
        for &(a, b) in &self.faces {
            buf.push(a);
            buf.push(b);
        }
        let digest = Sha256::digest(&buf);
        buf.extend_from_slice(&digest);
        crate::io::write_atomic(path, &buf)?;
        Ok(())
    }

    /// Loads a cache written by [`save`](Self::save), checking header,
    /// digest, and agreement with a fresh recomputation.
    pub fn load(path: &Path, cap: u64) -> Result<Self, TableError> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        let bad = |msg: &str| TableError::Cache(msg.to_string());
        if buf.len() < 20 + 32 || &buf[..4] != CACHE_MAGIC {
            return Err(bad("bad magic"));
        }
        let (body, digest) = buf.split_at(buf.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(bad("digest mismatch"));
        }
        let word = |at: usize| u32::from_le_bytes(body[at..at + 4].try_into().unwrap());
        if word(4) != CACHE_VERSION {
            return Err(bad("unsupported version"));
        }
        if word(12) != ENUMERATION_RULE_ID {
            return Err(bad("unknown enumeration rule"));
        }
        let m = word(8) as usize;
        let mut at = 16;
        if body.len() < at + 4 * m + 8 {
            return Err(bad("truncated header"));
        }
        let e1 = body[at..at + 2 * m].to_vec();
        at += 2 * m;
        let e2 = body[at..at + 2 * m].to_vec();
        at += 2 * m;
        let count = u64::from_le_bytes(body[at..at + 8].try_into().unwrap());
        at += 8;
        if count != double_factorial(m) || body.len() != at + 2 * count as usize {
            return Err(bad("entry count mismatch"));
        }
        let table = Self::new(&e1, &e2, cap)?;
        let stored = body[at..].chunks(2).map(|p| (p[0], p[1]));
        if !table.faces.iter().copied().eq(stored) {
            return Err(bad("entries disagree with recomputation"));
        }
        Ok(table)
    }
}

impl std::fmt::Debug for PartialFaceTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartialFaceTable").field("m", &self.m).field("len", &self.faces.len()).finish()
    }
}

/// The fixed colors 1 and 2 used by surveys, as partner arrays.
pub fn survey_fixed_colors(m: usize) -> (Vec<u8>, Vec<u8>) {
    let len = 2 * m;
    let e1 = (0..len).map(|v| (v ^ 1) as u8).collect();
    let e2 = (0..len)
        .map(|v| if v % 2 == 1 { (v + 1) % len } else { (v + len - 1) % len } as u8)
        .collect();
    (e1, e2)
}

fn sorted_order(faces: &[(u8, u8)]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..faces.len() as u32).collect();
    order.sort_by_key(|&i| {
        let (a, b) = faces[i as usize];
        (std::cmp::Reverse(a as u16 + b as u16), i)
    });
    order
}

fn fill(
    tracker: &mut FaceTracker<2>,
    partner0: &mut [u8],
    from: usize,
    placed: usize,
    closed: [usize; 2],
    emit: &mut impl FnMut(&[u8], [usize; 2]),
) {
    let m = partner0.len() / 2;
    if placed == m {
        emit(partner0, closed);
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
        let gain = tracker.closes(u, v);
        let next = [closed[0] + gain[0] as usize, closed[1] + gain[1] as usize];
        let saved = tracker.join(u, v);
        partner0[u] = v as u8;
        partner0[v] = u as u8;
        fill(tracker, partner0, u + 1, placed + 1, next, emit);
        partner0[u] = UNMATCHED;
        partner0[v] = UNMATCHED;
        tracker.unjoin(u, v, saved);
    }
}
