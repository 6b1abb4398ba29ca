//! Exhaustive depth-first search for maximum-length circuit codes.
//!
//! Words are grown one transition at a time in first-occurrence form (label
//! `m + 1` may appear only after `1..=m`), which picks one representative per
//! label permutation while keeping every rotation of every code reachable.
//!
//! A partial word is pruned as soon as a segment ending at the newest
//! transition spans fewer cube steps than any completed cycle would require.
//! For a segment of length `m` inside a prefix, the cycle it ends up in has
//! length at least `n_lb` (the current depth plus one, or the best length
//! already found, whichever is larger), so its cycle distance is at least
//! `min(m, n_lb - m)` and `delta >= min(m, n_lb - m, k)` must hold. Segments
//! that wrap around are only checked once the word closes, with the full
//! verifier.
//!
//! Symmetric mode grows the half word `h` of `(h, h)`. Segments within `h`
//! have cycle distance equal to their length, so they are held to
//! `min(m, k)`; the cross-boundary pairs are checked on every candidate
//! acceptance.
//!
//! Workers share only a monotone best length (stale reads merely weaken
//! pruning), a node counter, and a stop flag. Each worker keeps its own
//! witnesses; the merge keeps every word of the global maximum length, so the
//! witness set does not depend on the worker count.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, classify, IsomorphismClass};
use crate::error::{Error, Result};
use crate::model::{label_bit, CodeParams, Label, TransitionSequence};
use crate::verify::{bit_runs, check_spread};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    General,
    Symmetric,
    /// Symmetric codes whose longest bit run is at least `k + l`.
    Family,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::General => "general",
            SearchMode::Symmetric => "symmetric",
            SearchMode::Family => "family",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    pub mode: SearchMode,
    /// Family parameter; required in family mode, rejected otherwise.
    pub family_l: Option<usize>,
    /// Only codes of at least this length are of interest.
    pub target: Option<usize>,
    /// Longest cycle considered (default `2^d`).
    pub max_len: Option<usize>,
    pub node_budget: Option<u64>,
    pub time_limit: Option<Duration>,
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mode: SearchMode::General,
            family_l: None,
            target: None,
            max_len: None,
            node_budget: None,
            time_limit: None,
            workers: 1,
        }
    }
}

impl SearchOptions {
    pub fn general() -> Self {
        Self::default()
    }

    pub fn symmetric() -> Self {
        Self {
            mode: SearchMode::Symmetric,
            ..Self::default()
        }
    }

    pub fn family(l: usize) -> Self {
        Self {
            mode: SearchMode::Family,
            family_l: Some(l),
            ..Self::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_target(mut self, target: usize) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.max_len = Some(max_len);
        self
    }

    pub fn with_node_budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match (self.mode, self.family_l) {
            (SearchMode::Family, None) => {
                return Err(Error::InvalidOptions("family mode needs l".into()))
            }
            (SearchMode::Family, Some(l)) if l < 2 => {
                return Err(Error::InvalidOptions(format!(
                    "family parameter l must be >= 2, got {l}"
                )))
            }
            (SearchMode::General | SearchMode::Symmetric, Some(_)) => {
                return Err(Error::InvalidOptions(
                    "l is only meaningful in family mode".into(),
                ))
            }
            _ => {}
        }
        if let Some(t) = self.target {
            if t % 2 != 0 || t < 4 {
                return Err(Error::InvalidOptions(format!(
                    "target must be even and >= 4, got {t}"
                )));
            }
        }
        if let Some(m) = self.max_len {
            if m < 4 {
                return Err(Error::InvalidOptions(format!(
                    "max length must be >= 4, got {m}"
                )));
            }
            if let Some(t) = self.target {
                if t > m {
                    return Err(Error::InvalidOptions(format!(
                        "target {t} exceeds max length {m}"
                    )));
                }
            }
        }
        if self.workers == 0 {
            return Err(Error::InvalidOptions(
                "worker count must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub d: usize,
    pub k: usize,
    pub mode: SearchMode,
    pub l: Option<usize>,
    /// Longest accepted code length, 0 when none was found.
    pub n: usize,
    /// True only when the whole search tree was traversed.
    pub exhaustive: bool,
    /// Canonical forms (shift and relabel) of all codes of length `n`.
    pub witnesses: Vec<TransitionSequence>,
    pub nodes: u64,
    pub seconds: f64,
}

impl SearchRecord {
    pub fn params(&self) -> CodeParams {
        CodeParams {
            d: self.d,
            k: self.k,
        }
    }
}

/// A record together with every accepted word of maximum length, as found
/// in the first-occurrence search space.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub record: SearchRecord,
    pub codes: Vec<TransitionSequence>,
}

/// All maximum codes of a completed search, grouped into isomorphism classes.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub record: SearchRecord,
    pub classes: Vec<IsomorphismClass>,
}

struct Shared {
    best: AtomicUsize,
    nodes: AtomicU64,
    stop: AtomicBool,
    deadline: Option<Instant>,
    budget: Option<u64>,
}

impl Shared {
    fn best(&self) -> usize {
        self.best.load(Ordering::Relaxed)
    }
}

#[derive(Clone)]
struct Prefix {
    word: Vec<Label>,
    verts: Vec<u64>,
    maxlab: Vec<Label>,
}

struct Worker<'a> {
    d: Label,
    k: usize,
    params: CodeParams,
    mode: SearchMode,
    family_run: usize,
    floor: usize,
    cap: usize,
    shared: &'a Shared,
    word: Vec<Label>,
    /// verts[i] = vertex after the first i transitions
    verts: Vec<u64>,
    /// maxlab[i] = largest label among the first i transitions
    maxlab: Vec<Label>,
    nodes: u64,
    unflushed: u64,
    best_len: usize,
    found: Vec<Vec<Label>>,
    split_depth: Option<usize>,
    frontier: Vec<Prefix>,
}

const FLUSH_EVERY: u64 = 1 << 12;

enum Step {
    Prune,
    Descend,
}

impl<'a> Worker<'a> {
    fn new(params: CodeParams, opts: &SearchOptions, cap: usize, shared: &'a Shared) -> Self {
        Worker {
            d: params.d as Label,
            k: params.k,
            params,
            mode: opts.mode,
            family_run: params.k + opts.family_l.unwrap_or(0),
            floor: opts.target.unwrap_or(4),
            cap,
            shared,
            word: Vec::new(),
            verts: vec![0],
            maxlab: vec![0],
            nodes: 0,
            unflushed: 0,
            best_len: 0,
            found: Vec::new(),
            split_depth: None,
            frontier: Vec::new(),
        }
    }

    fn seed(&mut self, prefix: &Prefix) {
        self.word.clone_from(&prefix.word);
        self.verts.clone_from(&prefix.verts);
        self.maxlab.clone_from(&prefix.maxlab);
    }

    fn flush(&mut self) {
        let total = self
            .shared
            .nodes
            .fetch_add(self.unflushed, Ordering::Relaxed)
            + self.unflushed;
        self.unflushed = 0;
        if let Some(budget) = self.shared.budget {
            if total >= budget {
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
        if let Some(deadline) = self.shared.deadline {
            if Instant::now() >= deadline {
                self.shared.stop.store(true, Ordering::Relaxed);
            }
        }
    }

    fn record(&mut self, len: usize, word: &[Label]) {
        if len > self.best_len {
            self.best_len = len;
            self.found.clear();
        }
        if len == self.best_len {
            self.found.push(word.to_vec());
        }
        self.shared.best.fetch_max(len, Ordering::Relaxed);
    }

    fn lower_bound(&self) -> usize {
        self.shared.best().max(self.floor)
    }

    /// Pushes `label` and decides whether the new node is worth expanding.
    /// Accepted codes are recorded on the way.
    fn enter(&mut self, label: Label) -> Step {
        let depth = self.word.len() + 1;
        let v = self.verts[depth - 1] ^ label_bit(label);
        self.nodes += 1;
        self.unflushed += 1;
        match self.mode {
            SearchMode::General => self.enter_general(label, depth, v),
            SearchMode::Symmetric | SearchMode::Family => self.enter_symmetric(label, depth, v),
        }
    }

    fn push(&mut self, label: Label, v: u64) {
        self.word.push(label);
        self.verts.push(v);
        let m = *self.maxlab.last().unwrap();
        self.maxlab.push(m.max(label));
    }

    fn pop(&mut self) {
        self.word.pop();
        self.verts.pop();
        self.maxlab.pop();
    }

    fn enter_general(&mut self, label: Label, depth: usize, v: u64) -> Step {
        if v == 0 {
            if depth >= 4 && depth >= self.lower_bound() && depth <= self.cap {
                self.word.push(label);
                let candidate = TransitionSequence::from_vec_unchecked(self.word.clone());
                self.word.pop();
                if check_spread(&candidate, self.params)
                    .map(|v| v.is_valid())
                    .unwrap_or(false)
                {
                    self.record(depth, candidate.as_slice());
                }
            }
            return Step::Prune;
        }
        if depth >= self.cap || v.count_ones() as usize > self.cap - depth {
            return Step::Prune;
        }
        let n_lb = self.lower_bound().max(depth + 1);
        for m in 1..=depth {
            let need = m.min(self.k).min(n_lb - m) as u32;
            if (v ^ self.verts[depth - m]).count_ones() < need {
                return Step::Prune;
            }
        }
        self.push(label, v);
        Step::Descend
    }

    fn enter_symmetric(&mut self, label: Label, depth: usize, v: u64) -> Step {
        if 2 * depth > self.cap {
            return Step::Prune;
        }
        for m in 1..=depth {
            let need = m.min(self.k) as u32;
            if (v ^ self.verts[depth - m]).count_ones() < need {
                return Step::Prune;
            }
        }
        self.push(label, v);
        let n = 2 * depth;
        if n >= 4 && n >= self.lower_bound() && self.cross_pairs_ok() {
            let candidate = TransitionSequence::from_vec_unchecked(self.word.clone()).doubled();
            let valid = check_spread(&candidate, self.params)
                .map(|v| v.is_valid())
                .unwrap_or(false);
            let admitted = self.mode == SearchMode::Symmetric
                || bit_runs(&candidate).longest >= self.family_run;
            if valid && admitted {
                self.record(n, candidate.as_slice());
            }
        }
        Step::Descend
    }

    /// Checks the vertex pairs of `(h, h)` straddling the two copies, given
    /// that pairs within one copy already passed. Pair `(x_i, x_{h+j})` with
    /// `i >= j` spans `gap = h - (i - j)` steps; smaller gaps go first since
    /// they fail most often.
    fn cross_pairs_ok(&self) -> bool {
        let h = self.word.len();
        let half = self.verts[h];
        for gap in 1..=h {
            let need = gap.min(self.k) as u32;
            let diff = h - gap;
            for j in 0..h - diff {
                let i = j + diff;
                if (self.verts[i] ^ self.verts[j] ^ half).count_ones() < need {
                    return false;
                }
            }
        }
        true
    }

    fn child_limit(&self) -> Label {
        (*self.maxlab.last().unwrap() + 1).min(self.d)
    }

    /// Explores every descendant of the current word, iteratively.
    fn run(&mut self) {
        let base = self.word.len();
        let mut next: Vec<Label> = vec![1];
        loop {
            if self.shared.stop.load(Ordering::Relaxed) {
                break;
            }
            let level = next.len() - 1;
            let label = next[level];
            if label > self.child_limit() {
                next.pop();
                if level == 0 {
                    break;
                }
                self.pop();
                continue;
            }
            next[level] += 1;
            if self.word.last() == Some(&label) {
                continue;
            }
            if let Step::Descend = self.enter(label) {
                if self.split_depth == Some(self.word.len()) {
                    self.frontier.push(Prefix {
                        word: self.word.clone(),
                        verts: self.verts.clone(),
                        maxlab: self.maxlab.clone(),
                    });
                    self.pop();
                } else {
                    next.push(1);
                }
            }
            if self.unflushed >= FLUSH_EVERY {
                self.flush();
            }
        }
        self.flush();
        debug_assert!(self.shared.stop.load(Ordering::Relaxed) || self.word.len() == base);
    }
}

fn default_cap(d: usize) -> usize {
    1usize.checked_shl(d as u32).unwrap_or(usize::MAX)
}

struct Partial {
    best_len: usize,
    found: Vec<Vec<Label>>,
    nodes: u64,
}

fn merge(parts: impl IntoIterator<Item = Partial>) -> Partial {
    let mut out = Partial {
        best_len: 0,
        found: Vec::new(),
        nodes: 0,
    };
    for p in parts {
        out.nodes += p.nodes;
        if p.best_len > out.best_len {
            out.best_len = p.best_len;
            out.found = p.found;
        } else if p.best_len == out.best_len {
            out.found.extend(p.found);
        }
    }
    out
}

/// Runs the search described by `opts` and returns the record together with
/// every accepted maximum-length word.
pub fn search(params: CodeParams, opts: &SearchOptions) -> Result<SearchOutcome> {
    let params = CodeParams::new(params.d, params.k)?;
    opts.validate()?;
    let started = Instant::now();
    let cap = opts.max_len.unwrap_or_else(|| default_cap(params.d));
    let shared = Shared {
        best: AtomicUsize::new(0),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        deadline: opts.time_limit.map(|t| started + t),
        budget: opts.node_budget,
    };

    let merged = if opts.workers <= 1 {
        let mut w = Worker::new(params, opts, cap, &shared);
        w.run();
        Partial {
            best_len: w.best_len,
            found: w.found,
            nodes: w.nodes,
        }
    } else {
        parallel_search(params, opts, cap, &shared)?
    };

    let exhaustive = !shared.stop.load(Ordering::Relaxed);
    let mut codes: Vec<TransitionSequence> = merged
        .found
        .into_iter()
        .map(TransitionSequence::from_vec_unchecked)
        .collect();
    codes.sort();
    let n = if codes.is_empty() { 0 } else { merged.best_len };
    let mut witnesses: Vec<TransitionSequence> = codes
        .par_iter()
        .map(|c| canonical_form(c, false).sequence)
        .collect();
    witnesses.sort();
    witnesses.dedup();

    Ok(SearchOutcome {
        record: SearchRecord {
            d: params.d,
            k: params.k,
            mode: opts.mode,
            l: opts.family_l,
            n,
            exhaustive,
            witnesses,
            nodes: merged.nodes,
            seconds: started.elapsed().as_secs_f64(),
        },
        codes,
    })
}

fn parallel_search(
    params: CodeParams,
    opts: &SearchOptions,
    cap: usize,
    shared: &Shared,
) -> Result<Partial> {
    let wanted = 32 * opts.workers;
    // split the tree at the shallowest depth giving enough independent subtrees
    let mut depth = 1;
    let splitter = loop {
        let mut w = Worker::new(params, opts, cap, shared);
        w.split_depth = Some(depth);
        w.run();
        if w.frontier.len() >= wanted || w.frontier.is_empty() || depth >= 2 * params.k + 8 {
            break w;
        }
        // discard the trial's node count and witnesses; the next trial redoes them
        shared.nodes.fetch_sub(w.nodes, Ordering::Relaxed);
        depth += 1;
    };
    let frontier = splitter.frontier;
    let head = Partial {
        best_len: splitter.best_len,
        found: splitter.found,
        nodes: splitter.nodes,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidOptions(format!("cannot start worker pool: {e}")))?;
    let parts: Vec<Partial> = pool.install(|| {
        frontier
            .par_iter()
            .map(|prefix| {
                let mut w = Worker::new(params, opts, cap, shared);
                w.seed(prefix);
                w.run();
                Partial {
                    best_len: w.best_len,
                    found: w.found,
                    nodes: w.nodes,
                }
            })
            .collect()
    });
    Ok(merge(std::iter::once(head).chain(parts)))
}

/// Maximum code length for the mode in `opts`.
pub fn max_length(params: CodeParams, opts: &SearchOptions) -> Result<SearchRecord> {
    search(params, opts).map(|o| o.record)
}

/// Maximum length of a symmetric code.
pub fn symmetric_max(params: CodeParams, opts: &SearchOptions) -> Result<SearchRecord> {
    let opts = SearchOptions {
        mode: SearchMode::Symmetric,
        family_l: None,
        ..opts.clone()
    };
    max_length(params, &opts)
}

/// Maximum length of a symmetric code containing a bit run of length
/// at least `k + l`.
pub fn family_symmetric_max(
    params: CodeParams,
    l: usize,
    opts: &SearchOptions,
) -> Result<SearchRecord> {
    let opts = SearchOptions {
        mode: SearchMode::Family,
        family_l: Some(l),
        ..opts.clone()
    };
    max_length(params, &opts)
}

/// Every maximum-length code, grouped into isomorphism classes under shift
/// and relabeling. Fails unless the search ran to completion.
pub fn enumerate_max(params: CodeParams, opts: &SearchOptions) -> Result<Enumeration> {
    let outcome = search(params, opts)?;
    if !outcome.record.exhaustive {
        return Err(Error::IncompleteEnumeration {
            nodes: outcome.record.nodes,
        });
    }
    let classes = classify(&outcome.codes, false);
    Ok(Enumeration {
        record: outcome.record,
        classes,
    })
}
