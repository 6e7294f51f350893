//! Exhaustive enumeration of the equivalence classes of `S_n` under a
//! replacement set.
//!
//! The engine walks ranks `0..n!` with a visited bitset and an explicit BFS
//! frontier per component. Seeds are taken in increasing rank order, so each
//! seed is the lexicographically smallest member of its component and classes
//! come out sorted by representative. Bit markings are monotone, which is the
//! only synchronization the sharded expansion needs: results are identical to
//! single-worker execution regardless of scheduling.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::frontier::Frontier;
use crate::pattern::{apply_positions, visit_occurrences, Move, Occurrence, ReplacementSet};
use crate::perm::{raw, Parity, Permutation, FACTORIALS, MAX_N};

/// Fixed engine overhead reserved for chunk buffers and bookkeeping.
const BASE_OVERHEAD: u64 = 1 << 20;

/// Frontier chunks at least this large are sharded across workers.
const PARALLEL_MIN: usize = 4096;
const PARALLEL_SUB: usize = 1024;

/// Summary of one nontrivial equivalence class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassSummary {
    pub size: u64,
    pub representative: Permutation,
    pub even_count: u64,
    pub odd_count: u64,
}

impl ClassSummary {
    /// True when all members share one parity.
    pub fn parity_pure(&self) -> bool {
        self.even_count == 0 || self.odd_count == 0
    }
}

/// The partition of `S_n` into equivalence classes. Nontrivial classes are
/// listed individually; singletons are only counted.
#[derive(Debug, Clone)]
pub struct ClassPartition {
    pub n: usize,
    pub pi: ReplacementSet,
    pub total_classes: u64,
    pub nontrivial_classes: u64,
    pub singleton_count: u64,
    pub classes: Vec<ClassSummary>,
}

impl ClassPartition {
    pub fn nontrivial_count(&self) -> u64 {
        self.nontrivial_classes
    }

    /// Filters the listed (nontrivial) classes by a predicate on their
    /// summaries. The always-true predicate returns the full list.
    pub fn filter_classes<F>(&self, pred: F) -> Vec<&ClassSummary>
    where
        F: Fn(&ClassSummary) -> bool,
    {
        self.classes.iter().filter(|c| pred(c)).collect()
    }

    /// True when every nontrivial class is parity-pure.
    pub fn all_parity_pure(&self) -> bool {
        self.classes.iter().all(|c| c.parity_pure())
    }
}

impl Serialize for ClassPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let patterns: Vec<String> = self.pi.patterns().iter().map(|p| p.to_string()).collect();
        let mut st = serializer.serialize_struct("ClassPartition", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("patterns", &patterns)?;
        st.serialize_field("adjacency", &self.pi.adjacency())?;
        st.serialize_field("total_classes", &self.total_classes)?;
        st.serialize_field("nontrivial_classes", &self.nontrivial_classes)?;
        st.serialize_field("singleton_count", &self.singleton_count)?;
        st.serialize_field("classes", &self.classes)?;
        st.end()
    }
}

/// Neighbor generation shared by all searches. Calls `f` with the rank and
/// letters of every move result (duplicates included; callers dedupe), plus
/// the generating occurrence for certificate tracking.
struct Expander<'a> {
    n: usize,
    patterns: Vec<&'a [u8]>,
    adjacency: bool,
}

impl<'a> Expander<'a> {
    fn new(n: usize, pi: &'a ReplacementSet) -> Expander<'a> {
        Expander {
            n,
            patterns: pi.patterns().iter().map(|p| p.letters()).collect(),
            adjacency: pi.adjacency(),
        }
    }

    fn expand<F>(&self, host: &[u8], mut f: F) -> Result<()>
    where
        F: FnMut(u64, &[u8], &[u8], usize, usize) -> Result<()>,
    {
        let mut scratch = [0u8; MAX_N];
        let mut result: Result<()> = Ok(());
        for (m_idx, pat) in self.patterns.iter().enumerate() {
            visit_occurrences(host, pat, self.adjacency, &mut |pos| {
                for (t_idx, target) in self.patterns.iter().enumerate() {
                    if t_idx == m_idx {
                        continue;
                    }
                    scratch[..self.n].copy_from_slice(host);
                    apply_positions(&mut scratch[..self.n], pos, target);
                    let rank = raw::rank_of(&scratch[..self.n]);
                    if let Err(e) = f(rank, &scratch[..self.n], pos, m_idx, t_idx) {
                        result = Err(e);
                        return false;
                    }
                }
                true
            });
            if result.is_err() {
                break;
            }
        }
        result
    }
}

#[derive(Debug, Clone, Copy)]
struct CompStats {
    size: u64,
    even: u64,
    odd: u64,
    min_rank: u64,
}

impl CompStats {
    fn seed(rank: u64, letters: &[u8]) -> CompStats {
        let mut s = CompStats {
            size: 0,
            even: 0,
            odd: 0,
            min_rank: rank,
        };
        s.absorb(rank, letters);
        s
    }

    fn empty() -> CompStats {
        CompStats {
            size: 0,
            even: 0,
            odd: 0,
            min_rank: u64::MAX,
        }
    }

    fn absorb(&mut self, rank: u64, letters: &[u8]) {
        self.size += 1;
        if raw::inversions_of(letters) % 2 == 0 {
            self.even += 1;
        } else {
            self.odd += 1;
        }
        self.min_rank = self.min_rank.min(rank);
    }

    fn merge(&mut self, other: CompStats) {
        self.size += other.size;
        self.even += other.even;
        self.odd += other.odd;
        self.min_rank = self.min_rank.min(other.min_rank);
    }
}

#[inline]
fn claim(visited: &[AtomicU64], rank: u64) -> bool {
    let word = (rank >> 6) as usize;
    let bit = 1u64 << (rank & 63);
    visited[word].fetch_or(bit, Ordering::Relaxed) & bit == 0
}

fn check_scope(n: usize, pi: &ReplacementSet) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::LengthCap { n });
    }
    if pi.c() > n {
        return Err(Error::PatternLongerThanHost { c: pi.c(), n });
    }
    Ok(())
}

/// Partitions all of `S_n` into connected components of the move graph.
pub fn enumerate_classes(n: usize, pi: &ReplacementSet, config: &RunConfig) -> Result<ClassPartition> {
    check_scope(n, pi)?;
    let state_count = FACTORIALS[n];
    let bitset_words = state_count.div_ceil(64) as usize;
    let required = bitset_words as u64 * 8 + BASE_OVERHEAD;
    if required > config.memory_budget {
        return Err(Error::ResourceBudget {
            what: format!("visited bitset for S_{n}"),
            required,
            budget: config.memory_budget,
        });
    }
    // Current and next frontier each get half of what the bitset leaves over.
    let spill_threshold = ((config.memory_budget - required) / 2 / 8) as usize;

    let pool = if config.worker_count > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.worker_count)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?,
        )
    } else {
        None
    };

    let visited: Vec<AtomicU64> = (0..bitset_words).map(|_| AtomicU64::new(0)).collect();
    // Mask the slack bits past n! so the seed scan terminates cleanly.
    let excess = bitset_words as u64 * 64 - state_count;
    if excess > 0 {
        let mask = !0u64 << (64 - excess);
        visited[bitset_words - 1].fetch_or(mask, Ordering::Relaxed);
    }

    let expander = Expander::new(n, pi);
    let mut classes = Vec::new();
    let mut singleton_count = 0u64;
    let mut word_idx = 0usize;
    let mut seed_letters = [0u8; MAX_N];

    loop {
        while word_idx < bitset_words && visited[word_idx].load(Ordering::Relaxed) == u64::MAX {
            word_idx += 1;
        }
        if word_idx >= bitset_words {
            break;
        }
        let word = visited[word_idx].load(Ordering::Relaxed);
        let seed = word_idx as u64 * 64 + (!word).trailing_zeros() as u64;
        let claimed = claim(&visited, seed);
        debug_assert!(claimed, "seed scan is single-threaded");

        raw::unrank_into(seed, n, &mut seed_letters);
        let mut stats = CompStats::seed(seed, &seed_letters[..n]);
        let mut frontier = Frontier::new(spill_threshold);
        frontier.push(seed)?;

        while !frontier.is_empty() {
            let mut next = Frontier::new(spill_threshold);
            frontier.drain_chunks(&mut |chunk| {
                if let (Some(pool), true) = (&pool, chunk.len() >= PARALLEL_MIN) {
                    let parts: Vec<(Vec<u64>, CompStats)> = pool.install(|| {
                        chunk
                            .par_chunks(PARALLEL_SUB)
                            .map(|sub| expand_subchunk(&expander, sub, &visited))
                            .collect()
                    });
                    for (ranks, part) in parts {
                        stats.merge(part);
                        for r in ranks {
                            next.push(r)?;
                        }
                    }
                } else {
                    let mut host = [0u8; MAX_N];
                    for &r in chunk {
                        raw::unrank_into(r, n, &mut host);
                        expander.expand(&host[..n], |r2, letters, _, _, _| {
                            if claim(&visited, r2) {
                                stats.absorb(r2, letters);
                                next.push(r2)?;
                            }
                            Ok(())
                        })?;
                    }
                }
                Ok(())
            })?;
            frontier = next;
        }

        if stats.size == 1 {
            singleton_count += 1;
        } else {
            debug_assert_eq!(stats.min_rank, seed, "seed must be the component minimum");
            classes.push(ClassSummary {
                size: stats.size,
                representative: Permutation::unrank(stats.min_rank, n)?,
                even_count: stats.even,
                odd_count: stats.odd,
            });
        }
    }

    let nontrivial_classes = classes.len() as u64;
    debug_assert_eq!(
        classes.iter().map(|c| c.size).sum::<u64>() + singleton_count,
        state_count
    );
    Ok(ClassPartition {
        n,
        pi: pi.clone(),
        total_classes: nontrivial_classes + singleton_count,
        nontrivial_classes,
        singleton_count,
        classes,
    })
}

fn expand_subchunk(
    expander: &Expander<'_>,
    chunk: &[u64],
    visited: &[AtomicU64],
) -> (Vec<u64>, CompStats) {
    let mut out = Vec::new();
    let mut stats = CompStats::empty();
    let mut host = [0u8; MAX_N];
    for &r in chunk {
        raw::unrank_into(r, expander.n, &mut host);
        expander
            .expand(&host[..expander.n], |r2, letters, _, _, _| {
                if claim(visited, r2) {
                    stats.absorb(r2, letters);
                    out.push(r2);
                }
                Ok(())
            })
            .expect("in-memory expansion cannot fail");
    }
    (out, stats)
}

/// Sparse BFS bookkeeping costs, used to enforce the memory budget without a
/// full `S_n` bitset.
const SET_ENTRY_COST: u64 = 16;
const PARENT_ENTRY_COST: u64 = 48;

/// Summarizes the component of `p` alone, by frontier search from `p`.
pub fn class_of(p: &Permutation, pi: &ReplacementSet, config: &RunConfig) -> Result<ClassSummary> {
    check_scope(p.n(), pi)?;
    let n = p.n();
    let expander = Expander::new(n, pi);
    let mut visited: HashSet<u64> = HashSet::new();
    let start = p.rank();
    visited.insert(start);
    let mut stats = CompStats::seed(start, p.letters());
    let mut frontier = vec![start];
    let mut host = [0u8; MAX_N];
    while !frontier.is_empty() {
        let approx = visited.len() as u64 * SET_ENTRY_COST + frontier.len() as u64 * 8;
        if approx > config.memory_budget {
            return Err(Error::ResourceBudget {
                what: format!("component search from {p}"),
                required: approx,
                budget: config.memory_budget,
            });
        }
        let mut next = Vec::new();
        for &r in &frontier {
            raw::unrank_into(r, n, &mut host);
            expander.expand(&host[..n], |r2, letters, _, _, _| {
                if visited.insert(r2) {
                    stats.absorb(r2, letters);
                    next.push(r2);
                }
                Ok(())
            })?;
        }
        frontier = next;
    }
    Ok(ClassSummary {
        size: stats.size,
        representative: Permutation::unrank(stats.min_rank, n)?,
        even_count: stats.even,
        odd_count: stats.odd,
    })
}

#[derive(Clone, Copy)]
struct CompactMove {
    positions: [u8; MAX_N],
    c: u8,
    matched: u8,
    target: u8,
}

/// Whether `a` and `b` lie in the same component; optionally returns a replay
/// certificate (a legal move sequence transforming `a` into `b`).
pub fn are_equivalent(
    a: &Permutation,
    b: &Permutation,
    pi: &ReplacementSet,
    want_certificate: bool,
    config: &RunConfig,
) -> Result<(bool, Option<Vec<Move>>)> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch { a: a.n(), b: b.n() });
    }
    check_scope(a.n(), pi)?;
    if a == b {
        return Ok((true, want_certificate.then(Vec::new)));
    }
    let n = a.n();
    let target_rank = b.rank();
    let expander = Expander::new(n, pi);
    let mut visited: HashSet<u64> = HashSet::new();
    let mut parents: HashMap<u64, (u64, CompactMove)> = HashMap::new();
    let start = a.rank();
    visited.insert(start);
    let mut frontier = vec![start];
    let mut host = [0u8; MAX_N];
    let mut found = false;
    'bfs: while !frontier.is_empty() {
        let approx = visited.len() as u64 * SET_ENTRY_COST
            + parents.len() as u64 * PARENT_ENTRY_COST
            + frontier.len() as u64 * 8;
        if approx > config.memory_budget {
            return Err(Error::ResourceBudget {
                what: format!("equivalence search from {a}"),
                required: approx,
                budget: config.memory_budget,
            });
        }
        let mut next = Vec::new();
        for &r in &frontier {
            raw::unrank_into(r, n, &mut host);
            expander.expand(&host[..n], |r2, _, pos, m_idx, t_idx| {
                if visited.insert(r2) {
                    if want_certificate {
                        let mut positions = [0u8; MAX_N];
                        positions[..pos.len()].copy_from_slice(pos);
                        parents.insert(
                            r2,
                            (
                                r,
                                CompactMove {
                                    positions,
                                    c: pos.len() as u8,
                                    matched: m_idx as u8,
                                    target: t_idx as u8,
                                },
                            ),
                        );
                    }
                    next.push(r2);
                }
                Ok(())
            })?;
            if visited.contains(&target_rank) {
                found = true;
                break 'bfs;
            }
        }
        frontier = next;
    }
    if !found && !visited.contains(&target_rank) {
        return Ok((false, None));
    }
    if !want_certificate {
        return Ok((true, None));
    }
    // Walk the parent chain back from b and reverse it.
    let mut chain = Vec::new();
    let mut cur = target_rank;
    while cur != start {
        let (prev, cm) = parents[&cur];
        let positions: Vec<usize> = cm.positions[..cm.c as usize]
            .iter()
            .map(|&p| p as usize + 1)
            .collect();
        let occurrence = Occurrence::new(positions, pi.patterns()[cm.matched as usize].clone())?;
        chain.push(Move::new(occurrence, pi.patterns()[cm.target as usize].clone())?);
        cur = prev;
    }
    chain.reverse();
    Ok((true, Some(chain)))
}

/// Quantifier for member-level class filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberQuantifier {
    Any,
    All,
}

/// Filters the nontrivial classes of `partition` by a predicate evaluated on
/// member letters (1-based), re-walking each class from its representative.
/// `Any` keeps classes with at least one satisfying member, `All` keeps
/// classes whose every member satisfies the predicate; both short-circuit.
pub fn filter_classes_by_members<F>(
    partition: &ClassPartition,
    quantifier: MemberQuantifier,
    pred: F,
    config: &RunConfig,
) -> Result<Vec<ClassSummary>>
where
    F: Fn(&[u8]) -> bool,
{
    let n = partition.n;
    let expander = Expander::new(n, &partition.pi);
    let mut out = Vec::new();
    let mut host = [0u8; MAX_N];
    for class in &partition.classes {
        let start = class.representative.rank();
        let mut decided: Option<bool> = None;
        let first = pred(class.representative.letters());
        match (quantifier, first) {
            (MemberQuantifier::Any, true) => decided = Some(true),
            (MemberQuantifier::All, false) => decided = Some(false),
            _ => {}
        }
        let mut visited: HashSet<u64> = HashSet::new();
        visited.insert(start);
        let mut frontier = vec![start];
        while decided.is_none() && !frontier.is_empty() {
            let approx = visited.len() as u64 * SET_ENTRY_COST + frontier.len() as u64 * 8;
            if approx > config.memory_budget {
                return Err(Error::ResourceBudget {
                    what: format!("member scan of class {}", class.representative),
                    required: approx,
                    budget: config.memory_budget,
                });
            }
            let mut next = Vec::new();
            for &r in &frontier {
                raw::unrank_into(r, n, &mut host);
                expander.expand(&host[..n], |r2, letters, _, _, _| {
                    if visited.insert(r2) {
                        match (quantifier, pred(letters)) {
                            (MemberQuantifier::Any, true) => decided = Some(true),
                            (MemberQuantifier::All, false) => decided = Some(false),
                            _ => next.push(r2),
                        }
                    }
                    Ok(())
                })?;
                if decided.is_some() {
                    break;
                }
            }
            frontier = next;
        }
        let keep = decided.unwrap_or(matches!(quantifier, MemberQuantifier::All));
        if keep {
            out.push(class.clone());
        }
    }
    Ok(out)
}

/// Permutations with no available move under `pi`: for replacement sets whose
/// patterns pairwise differ, exactly the avoiders of every pattern in `pi`.
pub fn count_avoiders(n: usize, pi: &ReplacementSet) -> Result<u64> {
    check_scope(n, pi)?;
    let mut count = 0u64;
    let mut host = [0u8; MAX_N];
    for r in 0..FACTORIALS[n] {
        raw::unrank_into(r, n, &mut host);
        let mut avoided = true;
        for pat in pi.patterns() {
            if !visit_occurrences(&host[..n], pat.letters(), pi.adjacency(), &mut |_| false) {
                avoided = false;
                break;
            }
        }
        if avoided {
            count += 1;
        }
    }
    Ok(count)
}
