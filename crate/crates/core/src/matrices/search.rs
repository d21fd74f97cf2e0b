//! Search for alphabet matrices with definite determinant.
//!
//! The upper triangle is enumerated as a code vector. The first `prefix_len`
//! codes form a prefix; prefixes are processed independently (in parallel) and
//! merged in prefix order, so results do not depend on scheduling. Each raw
//! matrix goes through: all-variables-present filter, an exact integer-point
//! sign filter, the symmetry filter (keep only canonical representatives),
//! then the symbolic determinant and [`decide`].

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::canonical::{tri_index, triangle_len, Canonicalizer, Code};
use super::{canonical_id, det_symbolic, det::integer_det_sign, json, obstruction_check};
use super::{Alphabet, AlphabetSpec, GoodPairCandidate, ObstructionStatus, SymbolicMatrix};
use crate::definiteness::{decide, quick_refute, Budget, Effort, Kind};
use crate::error::{contract, Error, Result};

pub const CHECKPOINT_MAGIC: &str = "goodpair-search-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Raw matrices per prefix are kept at or below this.
const SUFFIX_LIMIT: u64 = 200_000;
/// Prefixes handled between checkpoint writes.
const ROUND: u64 = 256;
/// Randomized samples per deterministic batch.
const BATCH: u64 = 4096;
const RANDOM_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Randomized { samples: u64 },
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub l: usize,
    pub n: usize,
    pub mode: SearchMode,
    pub alphabet: AlphabetSpec,
    pub budget: Budget,
    /// Search even when an obstruction rules the pair out.
    pub force: bool,
    /// Keep only canonical representatives (and skip non-minimal prefixes).
    pub prune_symmetry: bool,
    pub seed: u64,
    pub workers: Option<usize>,
    /// Stop after this many prefixes (exhaustive mode).
    pub max_prefixes: Option<u64>,
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
}

impl SearchConfig {
    pub fn new(l: usize, n: usize) -> Self {
        SearchConfig {
            l,
            n,
            mode: SearchMode::Exhaustive,
            alphabet: AlphabetSpec::Lemma,
            budget: Budget::default(),
            force: false,
            prune_symmetry: true,
            seed: 0,
            workers: None,
            max_prefixes: None,
            checkpoint: None,
            resume: false,
        }
    }
}

/// Counts per pipeline stage. Every scanned matrix lands in exactly one of
/// the stage counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub scanned: u64,
    pub missing_variable: u64,
    pub numeric_refuted: u64,
    pub symmetry_pruned: u64,
    pub duplicates: u64,
    pub sample_refuted: u64,
    pub decided_indefinite: u64,
    pub identically_zero: u64,
    pub unknown: u64,
    pub definite: u64,
    /// Refutations backed by an exact zero or sign change.
    pub exact_witnesses: u64,
    pub prefixes_pruned: u64,
}

impl SearchStats {
    fn merge(&mut self, o: &SearchStats) {
        self.scanned += o.scanned;
        self.missing_variable += o.missing_variable;
        self.numeric_refuted += o.numeric_refuted;
        self.symmetry_pruned += o.symmetry_pruned;
        self.duplicates += o.duplicates;
        self.sample_refuted += o.sample_refuted;
        self.decided_indefinite += o.decided_indefinite;
        self.identically_zero += o.identically_zero;
        self.unknown += o.unknown;
        self.definite += o.definite;
        self.exact_witnesses += o.exact_witnesses;
        self.prefixes_pruned += o.prefixes_pruned;
    }

    pub fn refuted(&self) -> u64 {
        self.missing_variable + self.numeric_refuted + self.sample_refuted + self.decided_indefinite + self.identically_zero
    }
}

/// A canonical matrix whose determinant could not be decided within budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownCandidate {
    #[serde(with = "json::matrix_serde")]
    pub matrix: SymbolicMatrix,
    pub det_text: String,
    pub canonical_id: String,
    pub effort: Effort,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub l: usize,
    pub n: usize,
    pub mode: SearchMode,
    pub alphabet: AlphabetSpec,
    pub obstruction: ObstructionStatus,
    pub forced: bool,
    pub prune_symmetry: bool,
    pub seed: u64,
    pub prefix_len: usize,
    pub prefixes_total: u64,
    pub prefixes_done: u64,
    pub stats: SearchStats,
    pub accepted: usize,
    pub unknown_ids: Vec<String>,
    /// True only when every prefix of an exhaustive search was closed.
    pub exhaustive: bool,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub summary: SearchSummary,
    pub candidates: Vec<GoodPairCandidate>,
    pub unknowns: Vec<UnknownCandidate>,
}

impl SearchOutcome {
    pub fn canonical_ids(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.canonical_id.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub magic: String,
    pub version: u32,
    pub l: usize,
    pub n: usize,
    pub alphabet: AlphabetSpec,
    pub prune_symmetry: bool,
    pub prefix_len: usize,
    pub next_prefix: u64,
    pub accepted_ids: Vec<String>,
    pub stats: SearchStats,
    pub candidates: Vec<GoodPairCandidate>,
    pub unknowns: Vec<UnknownCandidate>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.get("magic").and_then(|m| m.as_str()) != Some(CHECKPOINT_MAGIC) {
            return Err(Error::Incompatible(format!("{} is not a search checkpoint", path.display())));
        }
        let version = value.get("version").and_then(|v| v.as_u64());
        if version != Some(CHECKPOINT_VERSION as u64) {
            return Err(Error::Incompatible(format!(
                "checkpoint version {version:?} is not supported (expected {CHECKPOINT_VERSION})"
            )));
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(self)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Exact integer evaluation tables: `values[p][code]` is the entry value at
/// test point `p`.
struct PointFilter {
    values: Vec<Vec<i64>>,
}

impl PointFilter {
    fn new(alphabet: &Alphabet, size: usize, seed: u64) -> Self {
        let l = alphabet.l();
        let unit = |v: usize, s: i64| {
            let mut x = vec![0i64; l];
            x[v] = s;
            x
        };
        let mut points = vec![unit(0, 1)];
        if size % 2 == 1 {
            points.push(unit(0, -1));
        }
        points.extend((1..l).map(|v| unit(v, 1)));
        for i in 0..l {
            for j in i + 1..l {
                for s in [1, -1] {
                    let mut x = unit(i, 1);
                    x[j] = s;
                    points.push(x);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        while points.len() < l + l * l + RANDOM_POINTS {
            let x: Vec<i64> = (0..l).map(|_| rng.gen_range(-9..=9)).collect();
            if x.iter().any(|&c| c != 0) {
                points.push(x);
            }
        }
        let values = points
            .iter()
            .map(|x| {
                (0..alphabet.len() as Code)
                    .map(|c| alphabet.coefficients(c).iter().zip(x).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect();
        PointFilter { values }
    }

    /// Whether some test point gives a zero or a sign different from the first.
    fn refutes(&self, codes: &[Code], size: usize, pairs: &[(usize, usize)], buf: &mut Vec<i64>) -> bool {
        let mut reference = 0i8;
        for table in &self.values {
            buf.clear();
            buf.resize(size * size, 0);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let v = table[codes[k] as usize];
                buf[i * size + j] = v;
                buf[j * size + i] = v;
            }
            let s = integer_det_sign(buf, size);
            if s == 0 {
                return true;
            }
            if reference == 0 {
                reference = s;
            } else if s != reference {
                return true;
            }
        }
        false
    }
}

struct Engine<'a> {
    config: &'a SearchConfig,
    alphabet: &'a Alphabet,
    canon: Canonicalizer<'a>,
    filter: PointFilter,
    size: usize,
    pairs: Vec<(usize, usize)>,
    full_mask: u32,
}

#[derive(Default)]
struct Partial {
    stats: SearchStats,
    candidates: Vec<GoodPairCandidate>,
    unknowns: Vec<UnknownCandidate>,
}

impl Partial {
    fn absorb(&mut self, other: Partial) {
        self.stats.merge(&other.stats);
        self.candidates.extend(other.candidates);
        self.unknowns.extend(other.unknowns);
    }
}

enum Screen {
    Refuted,
    Survives,
}

impl Engine<'_> {
    fn screen(&self, codes: &[Code], stats: &mut SearchStats, buf: &mut Vec<i64>) -> Screen {
        stats.scanned += 1;
        let mask = codes.iter().fold(0u32, |m, &c| m | self.alphabet.var_mask(c));
        if mask != self.full_mask {
            // Some z_v is absent, so the matrix vanishes at e_v.
            stats.missing_variable += 1;
            stats.exact_witnesses += 1;
            return Screen::Refuted;
        }
        if self.filter.refutes(codes, self.size, &self.pairs, buf) {
            stats.numeric_refuted += 1;
            stats.exact_witnesses += 1;
            return Screen::Refuted;
        }
        Screen::Survives
    }

    fn symbolic(&self, codes: &[Code], out: &mut Partial) -> Result<()> {
        let matrix = self.alphabet.decode(self.size, codes);
        let det = det_symbolic(&matrix);
        let budget = &self.config.budget;
        if quick_refute(&det, budget)?.is_some() {
            out.stats.sample_refuted += 1;
            out.stats.exact_witnesses += 1;
            return Ok(());
        }
        let verdict = decide(&det, budget)?;
        let id = canonical_id(&matrix);
        match verdict.kind {
            Kind::Indefinite => {
                out.stats.decided_indefinite += 1;
                out.stats.exact_witnesses += 1;
            }
            Kind::IdenticallyZero => {
                out.stats.identically_zero += 1;
                out.stats.exact_witnesses += 1;
            }
            Kind::Unknown => {
                log::warn!("undecided determinant {det} for candidate {id}");
                out.stats.unknown += 1;
                out.unknowns.push(UnknownCandidate {
                    det_text: det.to_string(),
                    matrix,
                    canonical_id: id,
                    effort: verdict.effort,
                });
            }
            Kind::PositiveDefinite | Kind::NegativeDefinite => {
                out.stats.definite += 1;
                out.candidates.push(GoodPairCandidate {
                    l: self.config.l,
                    n: self.config.n,
                    det_text: det.to_string(),
                    matrix,
                    det,
                    verdict,
                    canonical_id: id,
                });
            }
        }
        Ok(())
    }

    /// Whether some var-action/diagonal-sign element maps the prefix to a
    /// strictly smaller one; those elements fix positions, so the whole
    /// subtree then holds no canonical matrix.
    fn prefix_is_minimal(&self, prefix: &[Code]) -> bool {
        let k = prefix.len();
        for action in self.alphabet.actions() {
            for mask in 0u32..(1 << (self.size - 1)) {
                let neg = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
                for (idx, &(i, j)) in self.pairs[..k].iter().enumerate() {
                    let mut c = action[prefix[idx] as usize];
                    if neg(i) != neg(j) {
                        c = self.alphabet.negate(c);
                    }
                    match c.cmp(&prefix[idx]) {
                        std::cmp::Ordering::Less => return false,
                        std::cmp::Ordering::Greater => break,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
        }
        true
    }

    fn run_prefix(&self, index: u64, prefix_len: usize) -> Result<Partial> {
        let base = self.alphabet.len() as u64;
        let total = triangle_len(self.size);
        let mut codes = vec![0 as Code; total];
        let mut rest = index;
        for k in (0..prefix_len).rev() {
            codes[k] = (rest % base) as Code;
            rest /= base;
        }
        let mut out = Partial::default();
        if self.config.prune_symmetry && !self.prefix_is_minimal(&codes[..prefix_len]) {
            out.stats.prefixes_pruned += 1;
            return Ok(out);
        }
        let mut buf = Vec::with_capacity(self.size * self.size);
        loop {
            if let Screen::Survives = self.screen(&codes, &mut out.stats, &mut buf) {
                if self.config.prune_symmetry && !self.canon.is_canonical(&codes) {
                    out.stats.symmetry_pruned += 1;
                } else {
                    self.symbolic(&codes, &mut out)?;
                }
            }
            // Odometer over the suffix, last position fastest.
            let mut k = total;
            loop {
                if k == prefix_len {
                    return Ok(out);
                }
                k -= 1;
                codes[k] += 1;
                if (codes[k] as u64) < base {
                    break;
                }
                codes[k] = 0;
            }
        }
    }

    fn run_batch(&self, batch: u64, count: u64, seen: &HashSet<String>) -> Result<Partial> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(batch);
        let base = self.alphabet.len() as Code;
        let total = triangle_len(self.size);
        let mut out = Partial::default();
        let mut buf = Vec::with_capacity(self.size * self.size);
        let mut local = HashSet::new();
        for _ in 0..count {
            let codes: Vec<Code> = (0..total).map(|_| rng.gen_range(0..base)).collect();
            if let Screen::Refuted = self.screen(&codes, &mut out.stats, &mut buf) {
                continue;
            }
            let canon = if self.config.prune_symmetry { self.canon.canonical(&codes) } else { codes };
            let id = canonical_id(&self.alphabet.decode(self.size, &canon));
            if seen.contains(&id) || !local.insert(id) {
                out.stats.duplicates += 1;
                continue;
            }
            self.symbolic(&canon, &mut out)?;
        }
        Ok(out)
    }
}

fn choose_prefix_len(base: u64, total: usize) -> usize {
    let mut suffix = 0;
    let mut width = 1u64;
    while suffix < total && width.saturating_mul(base) <= SUFFIX_LIMIT {
        width *= base;
        suffix += 1;
    }
    total - suffix
}

/// Runs a search; see the module docs for the pipeline.
pub fn search(config: &SearchConfig) -> Result<SearchOutcome> {
    config.budget.validate()?;
    let report = obstruction_check(config.l, config.n)?;
    if report.status != ObstructionStatus::Passes && !config.force {
        let which = match report.status {
            ObstructionStatus::FailsParity => "Obstruction 1 (n - l is odd)",
            _ => "Obstruction 2 (n < 2l)",
        };
        return Err(Error::Precondition(format!(
            "({}, {}) is ruled out by {which}; use force to search anyway",
            config.l, config.n
        )));
    }
    match config.workers {
        Some(w) if w > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Contract(format!("cannot start worker pool: {e}")))?
            .install(|| run(config, report.status)),
        Some(_) => contract("worker count must be positive"),
        None => run(config, report.status),
    }
}

fn run(config: &SearchConfig, obstruction: ObstructionStatus) -> Result<SearchOutcome> {
    let size = config.n - config.l;
    let alphabet = Alphabet::new(config.l, config.alphabet)?;
    let canon = Canonicalizer::new(&alphabet, size)?;
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|i| (i..size).map(move |j| (i, j))).collect();
    debug_assert!(pairs.iter().enumerate().all(|(k, &(i, j))| tri_index(size, i, j) == k));
    let engine = Engine {
        config,
        alphabet: &alphabet,
        canon,
        filter: PointFilter::new(&alphabet, size, config.seed),
        size,
        pairs,
        full_mask: (1u32 << config.l) - 1,
    };
    let base = alphabet.len() as u64;
    let total = triangle_len(size);
    let prefix_len = choose_prefix_len(base, total);
    let prefixes_total = base
        .checked_pow(prefix_len as u32)
        .ok_or_else(|| Error::Contract("search space too large to index".into()))?;

    let mut summary = SearchSummary {
        l: config.l,
        n: config.n,
        mode: config.mode,
        alphabet: config.alphabet,
        obstruction,
        forced: config.force,
        prune_symmetry: config.prune_symmetry,
        seed: config.seed,
        prefix_len,
        prefixes_total,
        prefixes_done: 0,
        stats: SearchStats::default(),
        accepted: 0,
        unknown_ids: Vec::new(),
        exhaustive: false,
        truncated: false,
    };
    let mut acc = Partial::default();

    match config.mode {
        SearchMode::Exhaustive => {
            let mut next = 0u64;
            if config.resume {
                let path = config.checkpoint.as_deref().ok_or_else(|| Error::Contract("resume needs a checkpoint path".into()))?;
                let cp = Checkpoint::load(path)?;
                if cp.l != config.l
                    || cp.n != config.n
                    || cp.alphabet != config.alphabet
                    || cp.prune_symmetry != config.prune_symmetry
                    || cp.prefix_len != prefix_len
                {
                    return Err(Error::Incompatible("checkpoint was written for a different search".into()));
                }
                next = cp.next_prefix;
                acc.stats = cp.stats;
                acc.candidates = cp.candidates;
                acc.unknowns = cp.unknowns;
            }
            let stop = config.max_prefixes.map_or(prefixes_total, |m| prefixes_total.min(next.saturating_add(m)));
            while next < stop {
                let end = stop.min(next + ROUND);
                let parts = (next..end)
                    .into_par_iter()
                    .map(|i| engine.run_prefix(i, prefix_len))
                    .collect::<Result<Vec<_>>>()?;
                for p in parts {
                    acc.absorb(p);
                }
                next = end;
                if let Some(path) = &config.checkpoint {
                    checkpoint_of(config, prefix_len, next, &acc).save(path)?;
                }
            }
            summary.prefixes_done = next;
            summary.exhaustive = next == prefixes_total;
            summary.truncated = !summary.exhaustive;
        }
        SearchMode::Randomized { samples } => {
            let batches = samples.div_ceil(BATCH);
            let mut seen: HashSet<String> = HashSet::new();
            let mut b = 0;
            while b < batches {
                let end = batches.min(b + 64);
                let parts = (b..end)
                    .into_par_iter()
                    .map(|i| engine.run_batch(i, BATCH.min(samples - i * BATCH), &seen))
                    .collect::<Result<Vec<_>>>()?;
                for mut p in parts {
                    // Drop ids already reported by an earlier batch of this round.
                    let before = p.candidates.len() + p.unknowns.len();
                    p.candidates.retain(|c| !seen.contains(&c.canonical_id));
                    p.unknowns.retain(|u| !seen.contains(&u.canonical_id));
                    let dropped = (before - p.candidates.len() - p.unknowns.len()) as u64;
                    p.stats.duplicates += dropped;
                    p.stats.definite = p.stats.definite.saturating_sub(dropped);
                    seen.extend(p.candidates.iter().map(|c| c.canonical_id.clone()));
                    seen.extend(p.unknowns.iter().map(|u| u.canonical_id.clone()));
                    acc.absorb(p);
                }
                b = end;
            }
            acc.stats.unknown = acc.unknowns.len() as u64;
            summary.prefixes_done = 0;
            summary.truncated = true;
        }
    }
    summary.stats = acc.stats;
    summary.accepted = acc.candidates.len();
    summary.unknown_ids = acc.unknowns.iter().map(|u| u.canonical_id.clone()).collect();
    Ok(SearchOutcome { summary, candidates: acc.candidates, unknowns: acc.unknowns })
}

fn checkpoint_of(config: &SearchConfig, prefix_len: usize, next: u64, acc: &Partial) -> Checkpoint {
    Checkpoint {
        magic: CHECKPOINT_MAGIC.to_string(),
        version: CHECKPOINT_VERSION,
        l: config.l,
        n: config.n,
        alphabet: config.alphabet,
        prune_symmetry: config.prune_symmetry,
        prefix_len,
        next_prefix: next,
        accepted_ids: acc.candidates.iter().map(|c| c.canonical_id.clone()).collect(),
        stats: acc.stats,
        candidates: acc.candidates.clone(),
        unknowns: acc.unknowns.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{canonical_form, m24};

    #[test]
    fn finds_the_two_by_two_example() {
        let out = search(&SearchConfig::new(2, 4)).unwrap();
        assert!(out.summary.exhaustive);
        let target = canonical_id(&canonical_form(&m24()).unwrap());
        assert!(out.canonical_ids().contains(&target.as_str()));
        for c in &out.candidates {
            assert!(c.reverify().unwrap());
        }
        assert_eq!(out.summary.stats.scanned, 125);
    }

    #[test]
    fn obstructed_pairs_need_force() {
        assert!(matches!(search(&SearchConfig::new(2, 5)), Err(Error::Precondition(_))));
        let mut cfg = SearchConfig::new(2, 5);
        cfg.force = true;
        let out = search(&cfg).unwrap();
        assert!(out.candidates.is_empty() && out.summary.exhaustive);
        assert_eq!(out.summary.stats.unknown, 0);
    }

    #[test]
    fn prefix_length_keeps_suffix_small() {
        assert_eq!(choose_prefix_len(5, 3), 0);
        assert_eq!(choose_prefix_len(7, 10), 4);
    }

    #[test]
    fn randomized_is_reproducible() {
        let mut cfg = SearchConfig::new(2, 4);
        cfg.mode = SearchMode::Randomized { samples: 500 };
        cfg.seed = 7;
        let a = search(&cfg).unwrap();
        let b = search(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(!a.summary.exhaustive);
        assert!(!a.candidates.is_empty());
    }
}
