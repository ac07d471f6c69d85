//! Exhaustive search for integer polynomials of small positive Mahler measure.
//!
//! Candidates are enumerated degree by degree as coefficient vectors (leading
//! coefficient most significant, digits in increasing order), one canonical
//! representative per orbit of `f ↦ -f`, `f(t) ↦ f(-t)` and `f(t) ↦ t^d f(1/t)`.
//! The enumeration index space is cut into fixed chunks that are evaluated in
//! fixed-size parallel batches; the pruning cutoff only changes between batches,
//! so results do not depend on the number of workers.

use std::cmp::Ordering;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::entropy::EntropyInterval;
use crate::mahler::{mahler_of_split, Bounded, MahlerError, MahlerOptions};
use crate::poly::{bigint_to_f64, cyclotomic_split, CyclotomicSplit, LaurentPoly};

/// Raw enumeration indices per chunk.
pub const CHUNK_SIZE: u64 = 256;
/// Chunks per batch; the cutoff is refreshed between batches.
pub const BATCH_CHUNKS: u64 = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_degree: usize,
    /// Bound on `|coefficient|`.
    pub height: u64,
    /// Restrict leading and constant coefficients to `±1`.
    pub monic_reciprocal_only: bool,
    pub top_k: usize,
    /// Certification tolerance in nats.
    pub eps: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_degree: 10, height: 1, monic_reciprocal_only: true, top_k: 10, eps: 1e-10 }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), LehmerError> {
        let bad = |m: &str| Err(LehmerError::InvalidConfig(m.to_string()));
        if self.max_degree < 1 {
            return bad("max_degree must be at least 1");
        }
        if self.height < 1 || self.height > (1 << 53) {
            return bad("height must be between 1 and 2^53");
        }
        if self.top_k < 1 {
            return bad("top_k must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be positive and finite");
        }
        Space::new(self).map(|_| ())
    }

    /// SHA-256 of the serialized config, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Debug, Error)]
pub enum LehmerError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("checkpoint config mismatch: file has {found}, this search is {expected}")]
    CheckpointMismatch { expected: String, found: String },
    #[error("unreadable checkpoint {path}: {msg}")]
    CorruptCheckpoint { path: PathBuf, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Mahler(#[from] MahlerError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    /// Canonical representative.
    pub poly: LaurentPoly,
    pub measure: EntropyInterval,
    pub degree: usize,
    /// Raw enumeration index at which the representative was met.
    pub discovered_at: u64,
    /// `false` when the precision ceiling stopped refinement before `eps`.
    pub tolerance_met: bool,
}

/// Ranking: smaller `measure.hi`, then smaller degree, then canonical order.
pub fn record_order(a: &SearchRecord, b: &SearchRecord) -> Ordering {
    a.measure
        .hi
        .value()
        .total_cmp(&b.measure.hi.value())
        .then(a.degree.cmp(&b.degree))
        .then_with(|| cmp_desc(&descending(&a.poly), &descending(&b.poly)))
}

fn descending(f: &LaurentPoly) -> Vec<BigInt> {
    f.coeffs().iter().rev().cloned().collect()
}

/// Lexicographic order on descending coefficients, comparing `(|c|, c < 0)`.
fn cmp_desc<T: Signed + Ord>(a: &[T], b: &[T]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let o = x.abs().cmp(&y.abs()).then(x.is_negative().cmp(&y.is_negative()));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

/// The eight images of a descending coefficient vector under sign, `t ↦ -t`
/// and reversal.
fn orbit<T: Signed + Clone>(desc: &[T]) -> [Vec<T>; 8] {
    let d = desc.len() - 1;
    let rev: Vec<T> = desc.iter().rev().cloned().collect();
    let alt = |v: &[T]| -> Vec<T> {
        v.iter().enumerate().map(|(i, c)| if (d - i) % 2 == 1 { -c.clone() } else { c.clone() }).collect()
    };
    let neg = |v: &[T]| -> Vec<T> { v.iter().map(|c| -c.clone()).collect() };
    let (a, b) = (alt(desc), alt(&rev));
    [neg(desc), neg(&rev), neg(&a), neg(&b), desc.to_vec(), rev, a, b]
}

fn is_canonical<T: Signed + Ord + Clone>(desc: &[T]) -> bool {
    orbit(desc).iter().all(|g| cmp_desc(desc, g) != Ordering::Greater)
}

/// Orbit representative of `f` under sign, monomial shifts, `t ↦ -t` and `t ↦ 1/t`.
pub fn canonicalize(f: &LaurentPoly) -> LaurentPoly {
    if f.is_zero() {
        return LaurentPoly::zero();
    }
    let desc = descending(f);
    let best = orbit(&desc).into_iter().min_by(|a, b| cmp_desc(a, b)).expect("nonempty orbit");
    LaurentPoly::new(best.into_iter().rev().collect(), 0)
}

/// The raw index space: degrees `1..=max_degree`, each a mixed-radix block.
#[derive(Debug, Clone)]
struct Space {
    /// `(degree, first index, count)`.
    blocks: Vec<(usize, u64, u64)>,
    total: u64,
    ends: Vec<i64>,
    mid: Vec<i64>,
}

impl Space {
    fn new(c: &SearchConfig) -> Result<Space, LehmerError> {
        let h = c.height as i64;
        let ends: Vec<i64> = if c.monic_reciprocal_only { vec![-1, 1] } else { (-h..=h).filter(|&x| x != 0).collect() };
        let mid: Vec<i64> = (-h..=h).collect();
        let too_big = || LehmerError::InvalidConfig("search space exceeds 2^64 candidates".into());
        let mut blocks = Vec::new();
        let mut total = 0u64;
        for d in 1..=c.max_degree {
            let mut count = (ends.len() as u64).checked_mul(ends.len() as u64).ok_or_else(too_big)?;
            for _ in 1..d {
                count = count.checked_mul(mid.len() as u64).ok_or_else(too_big)?;
            }
            blocks.push((d, total, count));
            total = total.checked_add(count).ok_or_else(too_big)?;
        }
        Ok(Space { blocks, total, ends, mid })
    }

    fn empty() -> Space {
        Space { blocks: Vec::new(), total: 0, ends: Vec::new(), mid: Vec::new() }
    }

    /// Descending coefficients at raw index `i`.
    fn decode(&self, i: u64) -> Vec<i64> {
        let &(d, start, _) = self.blocks.iter().rev().find(|b| b.1 <= i).expect("index in range");
        let mut r = i - start;
        let mut digits = vec![0i64; d + 1];
        let e = self.ends.len() as u64;
        let m = self.mid.len() as u64;
        digits[d] = self.ends[(r % e) as usize];
        r /= e;
        for k in (1..d).rev() {
            digits[k] = self.mid[(r % m) as usize];
            r /= m;
        }
        digits[0] = self.ends[r as usize];
        digits
    }

    fn chunks(&self) -> u64 {
        self.total.div_ceil(CHUNK_SIZE)
    }
}

fn from_desc(desc: &[i64]) -> LaurentPoly {
    LaurentPoly::new(desc.iter().rev().map(|&c| BigInt::from(c)).collect(), 0)
}

/// Canonical, non-Kronecker candidates with their raw indices, in enumeration order.
pub fn enumerate_indexed(config: &SearchConfig) -> impl Iterator<Item = (u64, LaurentPoly)> {
    let space = if config.max_degree == 0 || config.height == 0 {
        Space::empty()
    } else {
        Space::new(config).unwrap_or_else(|_| Space::empty())
    };
    (0..space.total).filter_map(move |i| {
        let desc = space.decode(i);
        if !is_canonical(&desc) {
            return None;
        }
        let f = from_desc(&desc);
        let split = cyclotomic_split(&f).expect("nonzero");
        (!split.is_kronecker()).then_some((i, f))
    })
}

/// One canonical representative per orbit, skipping measure-zero polynomials.
pub fn enumerate(config: &SearchConfig) -> impl Iterator<Item = LaurentPoly> {
    enumerate_indexed(config).map(|(_, f)| f)
}

/// `m(f) >= max(log|c_0|, log|c_d|, max_k log(|c_k| / C(d, k)))`.
fn cheap_lower_bound(desc: &[i64]) -> f64 {
    let d = desc.len() - 1;
    let mut best = 0.0f64;
    let mut binom = 1.0f64;
    for (k, &c) in desc.iter().rev().enumerate() {
        if k > 0 {
            binom = binom * (d + 1 - k) as f64 / k as f64;
        }
        let lb = (c.unsigned_abs() as f64).ln() - binom.ln();
        best = best.max(lb);
    }
    best.max((desc[0].unsigned_abs() as f64).ln()).max((desc[d].unsigned_abs() as f64).ln())
}

/// Certified lower bound on `m(f)` from double-precision Smith discs of the
/// non-cyclotomic part.
fn smith_lower_bound(split: &CyclotomicSplit) -> Option<f64> {
    let coeffs: Vec<f64> = split.remainder.coeffs().iter().map(bigint_to_f64).collect();
    if coeffs.iter().any(|c| c.abs() > 9.0e15) {
        return None;
    }
    let content = bigint_to_f64(&split.content);
    let lb = crate::roots::measure_lower_bound_f64(&coeffs)?;
    Some(lb + content.ln().next_down())
}

#[derive(Debug, Clone, Default)]
pub struct Progress {
    pub chunks_done: u64,
    pub total_chunks: u64,
    /// Canonical non-Kronecker candidates seen so far in this run.
    pub candidates: u64,
    /// Candidates discarded by a certified lower bound.
    pub pruned: u64,
    pub best: Option<SearchRecord>,
}

type ProgressFn<'a> = dyn Fn(&Progress) + Sync + 'a;

pub struct SearchOptions<'a> {
    /// Worker threads; 0 picks the rayon default.
    pub workers: usize,
    /// JSON-lines checkpoint, rewritten atomically after each batch.
    pub checkpoint: Option<PathBuf>,
    /// Continue from `checkpoint` if it exists.
    pub resume: bool,
    /// Stop after this many batches (for interruption tests).
    pub max_batches: Option<u64>,
    pub mahler: MahlerOptions,
    pub progress: Option<&'a ProgressFn<'a>>,
}

impl Default for SearchOptions<'_> {
    fn default() -> Self {
        SearchOptions {
            workers: 0,
            checkpoint: None,
            resume: true,
            max_batches: None,
            mahler: MahlerOptions::default(),
            progress: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub records: Vec<SearchRecord>,
    pub complete: bool,
    pub progress: Progress,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    #[serde(rename = "type")]
    kind: String,
    config_hash: String,
    config: SearchConfig,
    next_chunk: u64,
    total_chunks: u64,
    complete: bool,
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    #[serde(rename = "type")]
    kind: String,
    rank: usize,
    #[serde(flatten)]
    record: SearchRecord,
}

/// Serialized checkpoint: a header line followed by one record per line.
pub fn checkpoint_text(config: &SearchConfig, records: &[SearchRecord], next_chunk: u64, complete: bool) -> String {
    let total_chunks = Space::new(config).map(|s| s.chunks()).unwrap_or(0);
    let header = Header {
        kind: "header".into(),
        config_hash: config.hash(),
        config: config.clone(),
        next_chunk,
        total_chunks,
        complete,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (i, r) in records.iter().enumerate() {
        let line = RecordLine { kind: "record".into(), rank: i + 1, record: r.clone() };
        out.push_str(&serde_json::to_string(&line).expect("record serializes"));
        out.push('\n');
    }
    out
}

fn write_atomic(path: &Path, text: &str) -> Result<(), LehmerError> {
    let io = |source| LehmerError::Io { path: path.to_path_buf(), source };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(text.as_bytes()).map_err(io)?;
        file.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

/// Parsed checkpoint: `(config, records, next_chunk, complete)`.
pub fn read_checkpoint(path: &Path) -> Result<(SearchConfig, Vec<SearchRecord>, u64, bool), LehmerError> {
    let text = fs::read_to_string(path).map_err(|source| LehmerError::Io { path: path.to_path_buf(), source })?;
    let corrupt = |msg: String| LehmerError::CorruptCheckpoint { path: path.to_path_buf(), msg };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Header = serde_json::from_str(lines.next().ok_or_else(|| corrupt("empty file".into()))?)
        .map_err(|e| corrupt(format!("header: {e}")))?;
    if header.kind != "header" || header.config_hash != header.config.hash() {
        return Err(corrupt("header hash does not match its config".into()));
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate() {
        let r: RecordLine = serde_json::from_str(line).map_err(|e| corrupt(format!("record {}: {e}", n + 1)))?;
        records.push(r.record);
    }
    Ok((header.config, records, header.next_chunk, header.complete))
}

fn merge(records: &mut Vec<SearchRecord>, more: impl IntoIterator<Item = SearchRecord>, k: usize) {
    records.extend(more);
    records.sort_by(record_order);
    records.truncate(k);
}

struct ChunkResult {
    records: Vec<SearchRecord>,
    candidates: u64,
    pruned: u64,
}

fn eval_chunk(
    space: &Space,
    chunk: u64,
    config: &SearchConfig,
    opts: &MahlerOptions,
    cutoff: Option<f64>,
) -> Result<ChunkResult, MahlerError> {
    let start = chunk * CHUNK_SIZE;
    let end = (start + CHUNK_SIZE).min(space.total);
    let mut out = ChunkResult { records: Vec::new(), candidates: 0, pruned: 0 };
    for i in start..end {
        let desc = space.decode(i);
        if !is_canonical(&desc) {
            continue;
        }
        let f = from_desc(&desc);
        let split = cyclotomic_split(&f).expect("nonzero");
        if split.is_kronecker() {
            continue;
        }
        out.candidates += 1;
        if let Some(c) = cutoff {
            let lb = cheap_lower_bound(&desc);
            if lb * (1.0 - 1e-12) - 1e-12 > c || smith_lower_bound(&split).is_some_and(|lb| lb - 1e-12 > c) {
                out.pruned += 1;
                continue;
            }
        }
        match mahler_of_split(split, config.eps, opts, cutoff)? {
            Bounded::Exceeds => out.pruned += 1,
            Bounded::Done(m) => {
                let rec = SearchRecord {
                    degree: f.degree(),
                    poly: f,
                    measure: m.value,
                    discovered_at: i,
                    tolerance_met: m.tolerance_met,
                };
                merge(&mut out.records, [rec], config.top_k);
            }
        }
    }
    Ok(out)
}

/// Runs the search to completion with default options.
pub fn search(config: &SearchConfig) -> Result<Vec<SearchRecord>, LehmerError> {
    Ok(search_with(config, &SearchOptions::default())?.records)
}

pub fn search_with(config: &SearchConfig, options: &SearchOptions<'_>) -> Result<SearchOutcome, LehmerError> {
    config.validate()?;
    let space = Space::new(config)?;
    let total_chunks = space.chunks();
    let mut records = Vec::new();
    let mut next = 0u64;

    if let Some(path) = options.checkpoint.as_deref().filter(|p| options.resume && p.exists()) {
        let (found, recs, n, complete) = read_checkpoint(path)?;
        if found.hash() != config.hash() {
            return Err(LehmerError::CheckpointMismatch {
                expected: config.hash()[..12].to_string(),
                found: found.hash()[..12].to_string(),
            });
        }
        records = recs;
        next = n.min(total_chunks);
        if complete {
            next = total_chunks;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| LehmerError::InvalidConfig(format!("thread pool: {e}")))?;

    let mut progress = Progress { chunks_done: next, total_chunks, ..Progress::default() };
    let mut batches = 0u64;
    while next < total_chunks {
        if options.max_batches.is_some_and(|m| batches >= m) {
            break;
        }
        let cutoff = if records.len() == config.top_k { records.last().map(|r| r.measure.hi.value()) } else { None };
        let end = (next + BATCH_CHUNKS).min(total_chunks);
        let results: Vec<Result<ChunkResult, MahlerError>> = pool.install(|| {
            (next..end).into_par_iter().map(|c| eval_chunk(&space, c, config, &options.mahler, cutoff)).collect()
        });
        for r in results {
            let r = r?;
            progress.candidates += r.candidates;
            progress.pruned += r.pruned;
            merge(&mut records, r.records, config.top_k);
        }
        next = end;
        batches += 1;
        progress.chunks_done = next;
        progress.best = records.first().cloned();
        if let Some(path) = &options.checkpoint {
            write_atomic(path, &checkpoint_text(config, &records, next, next == total_chunks))?;
        }
        if let Some(cb) = options.progress {
            cb(&progress);
        }
    }
    let complete = next >= total_chunks;
    if complete {
        if let Some(path) = &options.checkpoint {
            write_atomic(path, &checkpoint_text(config, &records, total_chunks, true))?;
        }
    }
    Ok(SearchOutcome { records, complete, progress })
}
