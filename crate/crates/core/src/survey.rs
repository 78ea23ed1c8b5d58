//! Exhaustive surveys over graphs with fixed colors 1 and 2.
//!
//! Phase 1 sweeps every color-3 matching, canonicalizes the resulting
//! graph and keeps the first candidate of each class. Phase 2 visits the
//! classes in code order and maximizes `F`. Both phases run in chunks; a
//! checkpoint is written after each chunk when a path is configured.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bounds::{certified_lower_bound, BoundError, Rule};
use crate::canonical::{canonical_form, CanonicalForm, Canonicalizer};
use crate::graph::{count_cycles, Color, ColoredGraph, FaceProfile};
use crate::io::{serialize_graph, write_atomic, Convention};
use crate::matching::{double_factorial, unrank, Matching, Matchings};
use crate::search::{max_faces, max_faces_with, MaxFaceResult, SearchOptions};
use crate::table::{survey_fixed_colors, PartialFaceTable, TableError, DEFAULT_TABLE_CAP};

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_SURVEY_CAP: usize = 9;
pub const DEFAULT_COUNT_CAP: usize = 7;
/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "TENFAC_WORKERS";

const CHECKPOINT_MAGIC: &[u8; 4] = b"TFCK";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SurveyMode {
    /// Every color-3 matching against the fixed single-cycle colors 1, 2.
    SingleFacePair,
    /// As above, keeping only graphs with `F13 = F23 = 1`.
    MstOnly,
    /// Every connected graph: colors 1 and 2 run over one representative
    /// per cycle type of `E1 ∪ E2`.
    AllColored,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MaxPolicy {
    /// Exact maximum for every class.
    Exact,
    /// Exact maximum for MST classes; others keep their certificate unless
    /// it fails to clear `3n/2`.
    CertifyNonMst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MaxEngine {
    /// Branch and bound per class.
    Search,
    /// Scan of the precomputed `(F01, F02)` table, counting only `F03`.
    Table,
}

#[derive(Clone, Debug)]
pub struct SurveyConfig {
    pub n: usize,
    pub mode: SurveyMode,
    pub max_policy: MaxPolicy,
    /// Both engines return the same maximum, first maximizer and maximizer
    /// count, so the report does not record which one ran.
    pub engine: MaxEngine,
    /// `None` reads [`WORKERS_ENV`], then falls back to the CPU count.
    pub workers: Option<usize>,
    /// Candidates per phase-1 chunk.
    pub chunk_size: u64,
    /// Classes per phase-2 chunk.
    pub class_chunk: usize,
    pub checkpoint: Option<PathBuf>,
    pub cap: usize,
    pub table_cap: u64,
    /// Stop with [`SurveyError::Interrupted`] after this many chunks in the
    /// current invocation. Simulates a crash for resume tests.
    pub interrupt_after: Option<u64>,
}

impl SurveyConfig {
    pub fn new(n: usize, mode: SurveyMode) -> Self {
        SurveyConfig {
            n,
            mode,
            max_policy: MaxPolicy::Exact,
            engine: MaxEngine::Search,
            workers: None,
            chunk_size: 1 << 16,
            class_chunk: 512,
            checkpoint: None,
            cap: DEFAULT_SURVEY_CAP,
            table_cap: DEFAULT_TABLE_CAP,
            interrupt_after: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("n = {n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("n must be at least 1")]
    Empty,
    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
    #[error("interrupted after {chunks} chunks; checkpoint written")]
    Interrupted { chunks: u64 },
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub code: CanonicalForm,
    /// Candidate index of the representative: cycle type times `(2n-1)!!`
    /// plus the rank of its color-3 matching.
    pub representative: u64,
    pub profile: FaceProfile,
    pub mst: bool,
    pub bipartite: bool,
    pub max_f: Option<usize>,
    pub maximizer_count: Option<u64>,
    pub bound: Option<usize>,
    pub rule: Option<Rule>,
    pub violates: bool,
    /// Kept for violators only.
    pub witness: Option<Matching>,
    pub graph: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub n: usize,
    pub mode: SurveyMode,
    pub max_policy: MaxPolicy,
    pub threshold_times_two: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub candidates: u64,
    pub classes: u64,
    pub mst_classes: u64,
    /// Exact `max_f` over MST classes.
    pub mst_max_f_histogram: BTreeMap<usize, u64>,
    /// Exact `max_f` over every class where it was computed.
    pub max_f_histogram: BTreeMap<usize, u64>,
    pub violators: Vec<CanonicalForm>,
    pub violators_all_mst: bool,
    /// Non-MST classes with `n <= 9` and no certificate above `3n/2`.
    pub theorem_failures: Vec<CanonicalForm>,
    /// Classes whose certificate exceeds the exact maximum.
    pub inconsistent: Vec<CanonicalForm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub runtime_seconds: f64,
    pub workers: usize,
    pub resumed: bool,
    pub engine: MaxEngine,
    /// Complete matchings evaluated by the exact maxima.
    pub matchings_examined: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub format_version: u32,
    pub config: ReportConfig,
    pub summary: SurveySummary,
    pub classes: Vec<ClassRecord>,
    pub provenance: Provenance,
}

impl SurveyReport {
    /// JSON of everything except provenance. Equal across worker counts
    /// and resumes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        #[derive(Serialize)]
        struct View<'a> {
            format_version: u32,
            config: &'a ReportConfig,
            summary: &'a SurveySummary,
            classes: &'a [ClassRecord],
        }
        serde_json::to_vec(&View {
            format_version: self.format_version,
            config: &self.config,
            summary: &self.summary,
            classes: &self.classes,
        })
        .expect("report serializes")
    }

    pub fn mst_records(&self) -> impl Iterator<Item = &ClassRecord> {
        self.classes.iter().filter(|r| r.mst)
    }
}

/// Partitions of `n` in decreasing lexicographic order, `[n]` first.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=left.min(max)).rev() {
            cur.push(k);
            rec(left - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Colors 1 and 2 forming disjoint alternating cycles of the given half
/// lengths.
pub fn cycle_type_colors(parts: &[usize]) -> (Vec<u8>, Vec<u8>) {
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for &k in parts {
        let offset = e1.len() as u8;
        let (a, b) = survey_fixed_colors(k);
        e1.extend(a.into_iter().map(|v| v + offset));
        e2.extend(b.into_iter().map(|v| v + offset));
    }
    (e1, e2)
}

fn cycle_types(n: usize, mode: SurveyMode) -> Vec<(Vec<u8>, Vec<u8>)> {
    match mode {
        SurveyMode::AllColored => partitions(n).iter().map(|p| cycle_type_colors(p)).collect(),
        _ => vec![survey_fixed_colors(n)],
    }
}

fn connected(p: [&[u8]; 3], seen: &mut Vec<bool>, stack: &mut Vec<usize>) -> bool {
    seen.clear();
    seen.resize(p[0].len(), false);
    seen[0] = true;
    stack.push(0);
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for pc in p {
            let w = pc[v] as usize;
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == p[0].len()
}

/// Dedup map from canonical code (without the size prefix) to the
/// smallest candidate index.
type Dedup = HashMap<Vec<u8>, u64>;

fn sweep(n: usize, mode: SurveyMode, types: &[(Vec<u8>, Vec<u8>)], start: u64, end: u64) -> (Dedup, u64) {
    let per_type = double_factorial(n);
    let mut map = Dedup::new();
    let mut canon = Canonicalizer::new(n);
    let (mut seen, mut stack) = (Vec::new(), Vec::new());
    let mut kept = 0;
    let mut at = start;
    while at < end {
        let t = (at / per_type) as usize;
        let stop = end.min((t as u64 + 1) * per_type);
        let (e1, e2) = (&types[t].0, &types[t].1);
        let mut it = Matchings::starting_at(n, at % per_type).until(stop - t as u64 * per_type);
        while let Some((idx, e3)) = it.next_partners() {
            let keep = match mode {
                SurveyMode::SingleFacePair => true,
                SurveyMode::MstOnly => count_cycles(e1, e3) == 1 && count_cycles(e2, e3) == 1,
                SurveyMode::AllColored => connected([e1, e2, e3], &mut seen, &mut stack),
            };
            if keep {
                kept += 1;
                let code = canon.connected_code([e1, e2, e3]);
                let global = t as u64 * per_type + idx;
                match map.get_mut(code) {
                    Some(old) => *old = (*old).min(global),
                    None => {
                        map.insert(code.to_vec(), global);
                    }
                }
            }
        }
        at = stop;
    }
    (map, kept)
}

fn merge(into: &mut Dedup, from: Dedup) {
    for (code, idx) in from {
        into.entry(code).and_modify(|old| *old = (*old).min(idx)).or_insert(idx);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Fingerprint {
    n: usize,
    mode: SurveyMode,
    max_policy: MaxPolicy,
    report_format: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: Fingerprint,
    /// Next unprocessed candidate index.
    next_candidate: u64,
    candidates_kept: u64,
    /// `(hex code, candidate index)`, sorted.
    dedup: Vec<(String, u64)>,
    /// Records for the first classes in code order.
    records: Vec<ClassRecord>,
    matchings_examined: u64,
    runtime_seconds: f64,
}

fn checkpoint_error(path: &Path, reason: impl Into<String>) -> SurveyError {
    SurveyError::Checkpoint { path: path.to_path_buf(), reason: reason.into() }
}

fn save_checkpoint(path: &Path, ck: &Checkpoint) -> Result<(), SurveyError> {
    let payload = serde_json::to_vec(ck).expect("checkpoint serializes");
    let mut buf = Vec::with_capacity(payload.len() + 48);
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    buf.extend_from_slice(&Sha256::digest(&payload));
    buf.extend_from_slice(&payload);
    write_atomic(path, &buf)?;
    Ok(())
}

fn load_checkpoint(path: &Path) -> Result<Checkpoint, SurveyError> {
    let buf = std::fs::read(path)?;
    if buf.len() < 48 || &buf[..4] != CHECKPOINT_MAGIC {
        return Err(checkpoint_error(path, "bad magic"));
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(checkpoint_error(path, format!("version {version}, expected {CHECKPOINT_VERSION}")));
    }
    let len = u64::from_le_bytes(buf[8..16].try_into().unwrap()) as usize;
    let payload = &buf[48..];
    if payload.len() != len {
        return Err(checkpoint_error(path, format!("payload is {} bytes, header says {len}", payload.len())));
    }
    if Sha256::digest(payload).as_slice() != &buf[16..48] {
        return Err(checkpoint_error(path, "checksum mismatch"));
    }
    serde_json::from_slice(payload).map_err(|e| checkpoint_error(path, e.to_string()))
}

pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

struct Context<'a> {
    n: usize,
    cfg: &'a SurveyConfig,
    types: Vec<(Vec<u8>, Vec<u8>)>,
    table: Option<PartialFaceTable>,
}

impl Context<'_> {
    fn graph(&self, candidate: u64) -> ColoredGraph {
        let per_type = double_factorial(self.n);
        let (e1, e2) = &self.types[(candidate / per_type) as usize];
        let e3 = unrank(self.n, candidate % per_type).expect("index in range");
        ColoredGraph::from_partners([e1.clone(), e2.clone(), e3.partners().to_vec()]).expect("valid candidate")
    }

    fn exact(&self, g: &ColoredGraph, seed: Option<usize>) -> MaxFaceResult {
        match &self.table {
            Some(t) if t.fixed_colors() == (g.partners(Color::One), g.partners(Color::Two)) => {
                t.max_faces(g, seed).expect("colors checked")
            }
            _ => max_faces_with(g, &SearchOptions { known_lower_bound: seed, ..Default::default() }).into_result(),
        }
    }

    fn record(&self, code: &[u8], candidate: u64) -> (ClassRecord, u64) {
        let n = self.n;
        let g = self.graph(candidate);
        let profile = g.face_profile();
        let mst = profile.is_mst();
        let cert = certified_lower_bound(&g);
        let cert_ok = cert.as_ref().is_ok_and(|c| c.exceeds_threshold());
        let need_exact = self.cfg.max_policy == MaxPolicy::Exact || mst || !cert_ok;
        let exact = need_exact.then(|| self.exact(&g, cert.as_ref().ok().map(|c| c.bound)));
        let violates = exact.as_ref().is_some_and(|r| 2 * r.max_f <= 3 * n);
        let (witness, graph) = match &exact {
            Some(r) if violates => {
                let text = serialize_graph(&g, Convention::Table3)
                    .or_else(|_| serialize_graph(&g, Convention::Explicit))
                    .expect("explicit always serializes");
                (Some(r.witness.clone()), Some(text))
            }
            _ => (None, None),
        };
        let (bound, rule) = match &cert {
            Ok(c) => (Some(c.bound), Some(c.rule)),
            Err(BoundError::TheoremViolation { .. }) => (None, None),
            Err(e) => panic!("certificate failed: {e}"),
        };
        let record = ClassRecord {
            code: CanonicalForm::from_connected(n, code),
            representative: candidate,
            profile,
            mst,
            bipartite: profile.bipartite,
            max_f: exact.as_ref().map(|r| r.max_f),
            maximizer_count: exact.as_ref().map(|r| r.maximizer_count),
            bound,
            rule,
            violates,
            witness,
            graph,
        };
        (record, exact.map_or(0, |r| r.matchings_examined))
    }
}

/// Runs (or resumes) a survey.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveyReport, SurveyError> {
    if cfg.n == 0 {
        return Err(SurveyError::Empty);
    }
    if cfg.n > cfg.cap {
        return Err(SurveyError::CapExceeded { n: cfg.n, cap: cfg.cap });
    }
    let workers = cfg.workers.unwrap_or_else(default_workers).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SurveyError::Pool(e.to_string()))?;
    pool.install(|| run_in_pool(cfg, workers))
}

fn run_in_pool(cfg: &SurveyConfig, workers: usize) -> Result<SurveyReport, SurveyError> {
    let started = Instant::now();
    let n = cfg.n;
    let fingerprint = Fingerprint { n, mode: cfg.mode, max_policy: cfg.max_policy, report_format: REPORT_FORMAT_VERSION };
    let types = cycle_types(n, cfg.mode);
    let total = types.len() as u64 * double_factorial(n);

    let mut ck = Checkpoint {
        fingerprint: fingerprint.clone(),
        next_candidate: 0,
        candidates_kept: 0,
        dedup: Vec::new(),
        records: Vec::new(),
        matchings_examined: 0,
        runtime_seconds: 0.0,
    };
    let mut resumed = false;
    if let Some(path) = cfg.checkpoint.as_deref().filter(|p| p.exists()) {
        ck = load_checkpoint(path)?;
        if ck.fingerprint != fingerprint {
            return Err(checkpoint_error(path, format!("written for {:?}, not {:?}", ck.fingerprint, fingerprint)));
        }
        resumed = true;
    }
    let mut dedup: Dedup = Dedup::with_capacity(ck.dedup.len());
    for (hex_code, idx) in std::mem::take(&mut ck.dedup) {
        let code = hex::decode(&hex_code).map_err(|e| checkpoint_error(cfg.checkpoint.as_deref().unwrap(), e.to_string()))?;
        dedup.insert(code, idx);
    }

    let runtime_before = ck.runtime_seconds;
    let mut chunks = 0u64;
    let mut after_chunk = |ck: &mut Checkpoint, dedup: &Dedup| -> Result<(), SurveyError> {
        chunks += 1;
        if let Some(path) = &cfg.checkpoint {
            let mut entries: Vec<(String, u64)> = dedup.iter().map(|(c, &i)| (hex::encode(c), i)).collect();
            entries.sort();
            ck.dedup = entries;
            ck.runtime_seconds = runtime_before + started.elapsed().as_secs_f64();
            save_checkpoint(path, ck)?;
            ck.dedup.clear();
        }
        if cfg.interrupt_after == Some(chunks) {
            return Err(SurveyError::Interrupted { chunks });
        }
        Ok(())
    };

    // Phase 1.
    let chunk = cfg.chunk_size.max(1);
    while ck.next_candidate < total {
        let start = ck.next_candidate;
        let end = total.min(start + chunk);
        let pieces = (workers as u64 * 4).min(end - start).max(1);
        let step = (end - start).div_ceil(pieces);
        let parts: Vec<(Dedup, u64)> = (0..pieces)
            .into_par_iter()
            .map(|p| {
                let a = start + p * step;
                let b = end.min(a + step);
                if a >= b {
                    (Dedup::new(), 0)
                } else {
                    sweep(n, cfg.mode, &types, a, b)
                }
            })
            .collect();
        for (map, kept) in parts {
            merge(&mut dedup, map);
            ck.candidates_kept += kept;
        }
        ck.next_candidate = end;
        after_chunk(&mut ck, &dedup)?;
    }

    // Phase 2.
    let mut classes: Vec<(&Vec<u8>, u64)> = dedup.iter().map(|(c, &i)| (c, i)).collect();
    classes.sort();
    // Every MST class has colors 1 and 2 from the first cycle type.
    let table = match cfg.engine == MaxEngine::Table && !classes.is_empty() {
        true => Some(PartialFaceTable::new(&types[0].0, &types[0].1, cfg.table_cap)?),
        false => None,
    };
    let ctx = Context { n, cfg, types: types.clone(), table };
    while ck.records.len() < classes.len() {
        let done = ck.records.len();
        let batch = &classes[done..classes.len().min(done + cfg.class_chunk.max(1))];
        let out: Vec<(ClassRecord, u64)> = batch.par_iter().map(|&(code, idx)| ctx.record(code, idx)).collect();
        for (rec, examined) in out {
            ck.matchings_examined += examined;
            ck.records.push(rec);
        }
        after_chunk(&mut ck, &dedup)?;
    }

    let runtime = runtime_before + started.elapsed().as_secs_f64();
    Ok(assemble(cfg, ck, total, workers, runtime, resumed))
}

fn assemble(cfg: &SurveyConfig, ck: Checkpoint, total: u64, workers: usize, runtime: f64, resumed: bool) -> SurveyReport {
    let records = ck.records;
    let mut mst_hist = BTreeMap::new();
    let mut hist = BTreeMap::new();
    for r in &records {
        if let Some(f) = r.max_f {
            *hist.entry(f).or_insert(0) += 1;
            if r.mst {
                *mst_hist.entry(f).or_insert(0) += 1;
            }
        }
    }
    let violators: Vec<CanonicalForm> = records.iter().filter(|r| r.violates).map(|r| r.code.clone()).collect();
    let summary = SurveySummary {
        candidates: total,
        classes: records.len() as u64,
        mst_classes: records.iter().filter(|r| r.mst).count() as u64,
        mst_max_f_histogram: mst_hist,
        max_f_histogram: hist,
        violators_all_mst: records.iter().filter(|r| r.violates).all(|r| r.mst),
        violators,
        theorem_failures: records
            .iter()
            .filter(|r| !r.mst && cfg.n <= 9 && r.bound.is_none_or(|b| 2 * b <= 3 * cfg.n))
            .map(|r| r.code.clone())
            .collect(),
        inconsistent: records
            .iter()
            .filter(|r| matches!((r.bound, r.max_f), (Some(b), Some(f)) if b > f))
            .map(|r| r.code.clone())
            .collect(),
    };
    SurveyReport {
        format_version: REPORT_FORMAT_VERSION,
        config: ReportConfig { n: cfg.n, mode: cfg.mode, max_policy: cfg.max_policy, threshold_times_two: 3 * cfg.n },
        summary,
        classes: records,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            runtime_seconds: runtime,
            workers,
            resumed,
            engine: cfg.engine,
            matchings_examined: ck.matchings_examined,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violator {
    pub code: CanonicalForm,
    pub graph: String,
    pub max_f: usize,
    pub witness: Matching,
}

/// Violators of a finished survey, each re-checked by an unpruned search.
///
/// Panics if the unpruned search disagrees with the report.
pub fn violators_of(report: &SurveyReport) -> Vec<Violator> {
    report
        .classes
        .iter()
        .filter(|r| r.violates)
        .map(|r| {
            let text = r.graph.as_deref().expect("violators keep their graph");
            let g = crate::io::parse_graph_auto(text).expect("report graph parses");
            let check = max_faces_with(&g, &SearchOptions::exhaustive()).into_result();
            assert_eq!(Some(check.max_f), r.max_f, "unpruned search disagrees for {}", r.code);
            Violator { code: r.code.clone(), graph: text.to_string(), max_f: check.max_f, witness: check.witness }
        })
        .collect()
}

/// All classes with `max_f <= 3n/2`, from a single-face-pair survey.
pub fn find_violators(n: usize, workers: Option<usize>) -> Result<Vec<Violator>, SurveyError> {
    let mut cfg = SurveyConfig::new(n, SurveyMode::SingleFacePair);
    cfg.max_policy = MaxPolicy::CertifyNonMst;
    cfg.workers = workers;
    Ok(violators_of(&run_survey(&cfg)?))
}

/// Number of connected classes under color-preserving isomorphism.
pub fn count_colored_graphs(n: usize) -> Result<u64, SurveyError> {
    count_colored_graphs_with_cap(n, DEFAULT_COUNT_CAP)
}

pub fn count_colored_graphs_with_cap(n: usize, cap: usize) -> Result<u64, SurveyError> {
    if n == 0 {
        return Err(SurveyError::Empty);
    }
    if n > cap {
        return Err(SurveyError::CapExceeded { n, cap });
    }
    let types = cycle_types(n, SurveyMode::AllColored);
    let per_type = double_factorial(n);
    let maps: Vec<Dedup> = (0..types.len() as u64)
        .into_par_iter()
        .map(|t| sweep(n, SurveyMode::AllColored, &types, t * per_type, (t + 1) * per_type).0)
        .collect();
    let mut all = Dedup::new();
    for m in maps {
        merge(&mut all, m);
    }
    Ok(all.len() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRow {
    /// 1-based position in the input.
    pub row: usize,
    pub n: usize,
    pub code: CanonicalForm,
    pub connected: bool,
    pub mst: bool,
    pub bipartite: bool,
    pub max_f: usize,
    pub violates: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub pass: bool,
    /// 1-based rows that fail the claim.
    pub failing_rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub rows: Vec<FixtureRow>,
    pub claims: Vec<Claim>,
    pub all_pass: bool,
}

impl FixtureReport {
    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn summary_line(&self) -> String {
        let total = self.rows.len();
        let good = self.rows.iter().filter(|r| r.connected && r.mst && !r.bipartite && r.violates).count();
        let max = self.rows.iter().map(|r| r.max_f).max().unwrap_or(0);
        let uniform = self.rows.iter().all(|r| r.max_f == max);
        let distinct = self.claim("pairwise_non_isomorphic").is_some_and(|c| c.pass);
        format!(
            "{good}/{total} pass: MST, non-bipartite, maxF={}{}",
            if uniform { max.to_string() } else { "mixed".into() },
            if distinct { "" } else { "; duplicate classes present" }
        )
    }
}

/// Checks the claims made about a violator list.
pub fn verify_fixture_set(fixtures: &[ColoredGraph]) -> FixtureReport {
    let table = fixtures.first().and_then(|g| PartialFaceTable::for_survey(g.n(), DEFAULT_TABLE_CAP).ok());
    let rows: Vec<FixtureRow> = fixtures
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let profile = g.face_profile();
            let max_f = match &table {
                Some(t) if t.m() == g.n() => t.max_faces(g, None).map(|r| r.max_f).unwrap_or_else(|_| max_faces(g).max_f),
                _ => max_faces(g).max_f,
            };
            FixtureRow {
                row: i + 1,
                n: g.n(),
                code: canonical_form(g),
                connected: profile.connected,
                mst: profile.is_mst(),
                bipartite: profile.bipartite,
                max_f,
                violates: 2 * max_f <= 3 * g.n(),
            }
        })
        .collect();
    let failing = |pred: &dyn Fn(&FixtureRow) -> bool| -> Vec<usize> { rows.iter().filter(|r| !pred(r)).map(|r| r.row).collect() };
    let mut first_seen: HashMap<&CanonicalForm, usize> = HashMap::new();
    let mut duplicates = Vec::new();
    for r in &rows {
        if let Some(&earlier) = first_seen.get(&r.code) {
            duplicates.push(earlier);
            duplicates.push(r.row);
        } else {
            first_seen.insert(&r.code, r.row);
        }
    }
    duplicates.sort();
    duplicates.dedup();
    let claim = |name: &str, failing_rows: Vec<usize>| Claim { name: name.into(), pass: failing_rows.is_empty(), failing_rows };
    let claims = vec![
        claim("connected", failing(&|r| r.connected)),
        claim("mst", failing(&|r| r.mst)),
        claim("non_bipartite", failing(&|r| !r.bipartite)),
        claim("violates", failing(&|r| r.violates)),
        claim("max_f_equals_threshold", failing(&|r| 2 * r.max_f == 3 * r.n)),
        claim("pairwise_non_isomorphic", duplicates),
    ];
    let all_pass = !rows.is_empty() && claims.iter().all(|c| c.pass);
    FixtureReport { rows, claims, all_pass }
}
