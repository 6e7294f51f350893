//! Pattern-occurrence enumeration and replacement moves: the generator of the
//! equivalence relation.
//!
//! An occurrence of a pattern `pi` in a host permutation is a set of positions
//! whose letters appear in the same relative order as `pi`. A move rearranges
//! the letters at one occurrence so that they realize another pattern from the
//! replacement set, leaving every other position untouched.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::{pattern_of, Permutation, MAX_N};

/// A set of equal-length patterns plus the adjacency flag; determines one
/// pattern-replacement equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementSet {
    patterns: Vec<Permutation>,
    adjacency: bool,
}

impl ReplacementSet {
    /// Builds a replacement set, deduplicating and canonically ordering the
    /// patterns. All patterns must share one length `c >= 2`.
    pub fn new(patterns: Vec<Permutation>, adjacency: bool) -> Result<ReplacementSet> {
        if patterns.is_empty() {
            return Err(Error::EmptyPatternSet);
        }
        let c = patterns[0].n();
        if c < 2 {
            return Err(Error::PatternTooShort { c });
        }
        for p in &patterns {
            if p.n() != c {
                return Err(Error::MixedPatternLengths { a: c, b: p.n() });
            }
        }
        let mut patterns = patterns;
        patterns.sort();
        patterns.dedup();
        Ok(ReplacementSet {
            patterns,
            adjacency,
        })
    }

    /// The adjacency-constrained set of cyclic word-rotations of `m`.
    pub fn rotations_of(m: &Permutation) -> Result<ReplacementSet> {
        ReplacementSet::new(rotations(m), true)
    }

    pub fn patterns(&self) -> &[Permutation] {
        &self.patterns
    }

    pub fn adjacency(&self) -> bool {
        self.adjacency
    }

    /// Common pattern length.
    pub fn c(&self) -> usize {
        self.patterns[0].n()
    }

    /// Canonical textual form: comma-separated patterns in sorted order, with
    /// an `adj:` prefix when the adjacency constraint is on.
    pub fn spec_string(&self) -> String {
        let body = self
            .patterns
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if self.adjacency {
            format!("adj:{body}")
        } else {
            body
        }
    }
}

impl fmt::Display for ReplacementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl FromStr for ReplacementSet {
    type Err = Error;

    /// Parses the textual form used by the CLI and config files, e.g.
    /// `"1234,3421"` or `"adj:1324,3241,2413,4132"`.
    fn from_str(s: &str) -> Result<ReplacementSet> {
        let s = s.trim();
        let (adjacency, body) = match s.strip_prefix("adj:") {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if body.is_empty() {
            return Err(Error::Parse("empty pattern set".into()));
        }
        let patterns = body
            .split(',')
            .map(|tok| tok.trim().parse::<Permutation>())
            .collect::<Result<Vec<_>>>()?;
        ReplacementSet::new(patterns, adjacency)
    }
}

impl Serialize for ReplacementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.spec_string())
    }
}

impl<'de> Deserialize<'de> for ReplacementSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One realized pattern occurrence: strictly increasing 1-based positions in
/// the host and the pattern they standardize to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub positions: Vec<usize>,
    pub matched: Permutation,
}

impl Occurrence {
    pub fn new(positions: Vec<usize>, matched: Permutation) -> Result<Occurrence> {
        if positions.len() != matched.n() {
            return Err(Error::LengthMismatch {
                a: positions.len(),
                b: matched.n(),
            });
        }
        if positions.is_empty() || positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("positions must be strictly increasing".into()));
        }
        Ok(Occurrence { positions, matched })
    }
}

/// A single pattern-replacement: rearrange the letters at `occurrence` so
/// they realize `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub occurrence: Occurrence,
    pub target: Permutation,
}

impl Move {
    pub fn new(occurrence: Occurrence, target: Permutation) -> Result<Move> {
        if occurrence.matched.n() != target.n() {
            return Err(Error::LengthMismatch {
                a: occurrence.matched.n(),
                b: target.n(),
            });
        }
        Ok(Move { occurrence, target })
    }
}

/// Visits every occurrence of `pat` in `host` as a 0-based position slice.
/// Subsequences when `adjacency` is false, contiguous windows when true;
/// position sequences are produced in lexicographic order. The visitor
/// returns `false` to stop early; the function returns `false` if stopped.
pub(crate) fn visit_occurrences(
    host: &[u8],
    pat: &[u8],
    adjacency: bool,
    f: &mut impl FnMut(&[u8]) -> bool,
) -> bool {
    let n = host.len();
    let c = pat.len();
    if c > n {
        return true;
    }
    if adjacency {
        let mut positions = [0u8; MAX_N];
        'window: for s in 0..=n - c {
            for i in 1..c {
                for j in 0..i {
                    if (host[s + j] < host[s + i]) != (pat[j] < pat[i]) {
                        continue 'window;
                    }
                }
            }
            for (i, slot) in positions.iter_mut().enumerate().take(c) {
                *slot = (s + i) as u8;
            }
            if !f(&positions[..c]) {
                return false;
            }
        }
        true
    } else {
        let mut positions = [0u8; MAX_N];
        subsequences(host, pat, 0, 0, &mut positions, f)
    }
}

fn subsequences(
    host: &[u8],
    pat: &[u8],
    depth: usize,
    start: usize,
    positions: &mut [u8; MAX_N],
    f: &mut impl FnMut(&[u8]) -> bool,
) -> bool {
    let n = host.len();
    let c = pat.len();
    if depth == c {
        return f(&positions[..c]);
    }
    // Enough room must remain for the unpicked slots.
    'cand: for q in start..=n - (c - depth) {
        for j in 0..depth {
            if (host[positions[j] as usize] < host[q]) != (pat[j] < pat[depth]) {
                continue 'cand;
            }
        }
        positions[depth] = q as u8;
        if !subsequences(host, pat, depth + 1, q + 1, positions, f) {
            return false;
        }
    }
    true
}

/// Rearranges `letters` at the 0-based `positions` so they realize `target`:
/// the letter multiset there is preserved, only the order changes.
pub(crate) fn apply_positions(letters: &mut [u8], positions: &[u8], target: &[u8]) {
    let c = positions.len();
    let mut vals = [0u8; MAX_N];
    for i in 0..c {
        vals[i] = letters[positions[i] as usize];
    }
    vals[..c].sort_unstable();
    for i in 0..c {
        letters[positions[i] as usize] = vals[target[i] as usize - 1];
    }
}

/// All occurrences of `pattern` in `host`, in lexicographic order of position
/// sequences. Positions in the result are 1-based.
pub fn occurrences(host: &Permutation, pattern: &Permutation, adjacency: bool) -> Vec<Occurrence> {
    let mut out = Vec::new();
    visit_occurrences(host.letters(), pattern.letters(), adjacency, &mut |pos| {
        out.push(Occurrence {
            positions: pos.iter().map(|&p| p as usize + 1).collect(),
            matched: pattern.clone(),
        });
        true
    });
    out
}

/// Whether `host` contains `pattern` as a (not necessarily adjacent)
/// subsequence; short-circuits on the first occurrence.
pub fn contains(host: &Permutation, pattern: &Permutation) -> bool {
    !visit_occurrences(host.letters(), pattern.letters(), false, &mut |_| false)
}

/// Applies one replacement move. Errors if the occurrence positions no longer
/// realize the recorded pattern in this host.
pub fn apply_move(host: &Permutation, mv: &Move) -> Result<Permutation> {
    let n = host.n();
    let ok = mv.occurrence.positions.iter().all(|&p| p >= 1 && p <= n)
        && mv.occurrence.positions.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(Error::StaleOccurrence {
            positions: mv.occurrence.positions.clone(),
            expected: mv.occurrence.matched.to_string(),
        });
    }
    let picked: Vec<u8> = mv
        .occurrence
        .positions
        .iter()
        .map(|&p| host.letters()[p - 1])
        .collect();
    if pattern_of(&picked)? != mv.occurrence.matched {
        return Err(Error::StaleOccurrence {
            positions: mv.occurrence.positions.clone(),
            expected: mv.occurrence.matched.to_string(),
        });
    }
    let mut letters = host.letters().to_vec();
    let positions0: Vec<u8> = mv.occurrence.positions.iter().map(|&p| p as u8 - 1).collect();
    apply_positions(&mut letters, &positions0, mv.target.letters());
    Permutation::new(letters)
}

/// All distinct permutations reachable from `host` by a single replacement
/// move under `pi`; `host` itself is excluded.
pub fn neighbors(host: &Permutation, pi: &ReplacementSet) -> BTreeSet<Permutation> {
    let mut out = BTreeSet::new();
    let mut scratch = host.letters().to_vec();
    for matched in pi.patterns() {
        visit_occurrences(host.letters(), matched.letters(), pi.adjacency(), &mut |pos| {
            for target in pi.patterns() {
                if target == matched {
                    continue;
                }
                scratch.copy_from_slice(host.letters());
                apply_positions(&mut scratch, pos, target.letters());
                if scratch != host.letters() {
                    out.insert(Permutation::new(scratch.clone()).expect("letter multiset preserved"));
                }
            }
            true
        });
    }
    out
}

/// The cyclic left-rotations of the word `m`, in rotation order. All
/// rotations of a permutation word are distinct, so the result has `c`
/// entries.
pub fn rotations(m: &Permutation) -> Vec<Permutation> {
    let c = m.n();
    let mut out = Vec::with_capacity(c);
    let mut word = m.letters().to_vec();
    for _ in 0..c {
        let p = Permutation::new(word.clone()).expect("rotation of a permutation word");
        if !out.contains(&p) {
            out.push(p);
        }
        word.rotate_left(1);
    }
    out
}

/// The unique cyclic word-rotation of `m` that starts with letter 1.
pub fn rotate_to_leading_one(m: &Permutation) -> Permutation {
    let pos = m
        .letters()
        .iter()
        .position(|&v| v == 1)
        .expect("permutation contains letter 1");
    let mut word = m.letters().to_vec();
    word.rotate_left(pos);
    Permutation::new(word).expect("rotation of a permutation word")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::FACTORIALS;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn set(specs: &[&str], adjacency: bool) -> ReplacementSet {
        ReplacementSet::new(specs.iter().map(|s| p(s)).collect(), adjacency).unwrap()
    }

    #[test]
    fn occurrence_examples() {
        // 21354 contains 132 via the letters 2, 5, 4 at positions 1, 4, 5.
        let occs = occurrences(&p("21354"), &p("132"), false);
        let position_sets: Vec<&[usize]> = occs.iter().map(|o| &o.positions[..]).collect();
        assert!(position_sets.contains(&&[1, 4, 5][..]));
        assert_eq!(position_sets, vec![&[1, 4, 5][..], &[2, 4, 5], &[3, 4, 5]]);

        // Only the windows 1-3 and 2-4 of 1234 are adjacent 123 patterns.
        let occs = occurrences(&p("1234"), &p("123"), true);
        let position_sets: Vec<&[usize]> = occs.iter().map(|o| &o.positions[..]).collect();
        assert_eq!(position_sets, vec![&[1, 2, 3][..], &[2, 3, 4]]);

        // Without adjacency every triple of 1234 is increasing.
        assert_eq!(occurrences(&p("1234"), &p("123"), false).len(), 4);
    }

    #[test]
    fn contains_examples() {
        assert!(contains(&p("21354"), &p("132")));
        assert!(!contains(&p("1234"), &p("321")));
    }

    #[test]
    fn contains_agrees_with_enumeration_on_s7() {
        let pat = p("1234");
        for r in (0..FACTORIALS[7]).step_by(101) {
            let host = Permutation::unrank(r, 7).unwrap();
            assert_eq!(
                contains(&host, &pat),
                !occurrences(&host, &pat, false).is_empty()
            );
        }
    }

    #[test]
    fn apply_move_examples() {
        // 13524 with the 123 occurrence at letters 1, 2, 4 becomes 23541.
        let mv = Move::new(
            Occurrence::new(vec![1, 4, 5], p("123")).unwrap(),
            p("231"),
        )
        .unwrap();
        assert_eq!(apply_move(&p("13524"), &mv).unwrap(), p("23541"));

        // Identity replacement leaves the host unchanged.
        let mv = Move::new(
            Occurrence::new(vec![1, 4, 5], p("123")).unwrap(),
            p("123"),
        )
        .unwrap();
        assert_eq!(apply_move(&p("13524"), &mv).unwrap(), p("13524"));

        // 123...n with the last k letters of the increasing run reversed.
        let host = Permutation::identity(8).unwrap();
        let mv = Move::new(
            Occurrence::new(vec![6, 7, 8], p("123")).unwrap(),
            p("321"),
        )
        .unwrap();
        assert_eq!(apply_move(&host, &mv).unwrap(), p("12345876"));
    }

    #[test]
    fn apply_move_rejects_stale_occurrences() {
        let mv = Move::new(
            Occurrence::new(vec![1, 2, 3], p("123")).unwrap(),
            p("321"),
        )
        .unwrap();
        assert!(matches!(
            apply_move(&p("321"), &mv),
            Err(Error::StaleOccurrence { .. })
        ));
    }

    #[test]
    fn neighbor_examples() {
        // Rearranging 3, 4, 2 of 1342 into a 123 pattern yields 1234.
        let nb = neighbors(&p("1342"), &set(&["123", "231"], false));
        assert!(nb.contains(&p("1234")));

        // A singleton set admits only identity replacements.
        assert!(neighbors(&p("1342"), &set(&["123"], false)).is_empty());

        // Adjacent window reversals of 1234.
        let nb = neighbors(&p("1234"), &set(&["123", "321"], true));
        let expect: BTreeSet<Permutation> = [p("3214"), p("1432")].into();
        assert_eq!(nb, expect);
    }

    #[test]
    fn neighbor_symmetry_exhaustive_s5_pairs_of_s3() {
        let s3: Vec<Permutation> = (0..6).map(|r| Permutation::unrank(r, 3).unwrap()).collect();
        let mut pairs = Vec::new();
        for i in 0..s3.len() {
            for j in i + 1..s3.len() {
                pairs.push((s3[i].clone(), s3[j].clone()));
            }
        }
        for adjacency in [false, true] {
            for (a, b) in &pairs {
                let pi = ReplacementSet::new(vec![a.clone(), b.clone()], adjacency).unwrap();
                for r in 0..FACTORIALS[5] {
                    let host = Permutation::unrank(r, 5).unwrap();
                    for q in neighbors(&host, &pi) {
                        assert!(
                            neighbors(&q, &pi).contains(&host),
                            "asymmetry: {host} -> {q} under {pi}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn adjacency_occurrences_are_a_subset() {
        for r in (0..FACTORIALS[6]).step_by(7) {
            let host = Permutation::unrank(r, 6).unwrap();
            for pat in ["123", "231", "1324"] {
                let pat = p(pat);
                let all: Vec<Vec<usize>> = occurrences(&host, &pat, false)
                    .into_iter()
                    .map(|o| o.positions)
                    .collect();
                for adj in occurrences(&host, &pat, true) {
                    assert!(all.contains(&adj.positions));
                }
            }
        }
    }

    #[test]
    fn es_move_parity_delta_is_constant_on_s6() {
        // Under {12...k, k...21} a replacement acts as floor(k/2)
        // transpositions: parity flips for k = 3 and is preserved for k = 4.
        for k in [3usize, 4] {
            let asc = Permutation::identity(k).unwrap();
            let desc = Permutation::new((1..=k as u8).rev().collect()).unwrap();
            let expected_delta = (k * (k - 1) / 2) % 2;
            for r in 0..FACTORIALS[6] {
                let host = Permutation::unrank(r, 6).unwrap();
                for (from, to) in [(&asc, &desc), (&desc, &asc)] {
                    for occ in occurrences(&host, from, false) {
                        let mv = Move::new(occ, to.clone()).unwrap();
                        let out = apply_move(&host, &mv).unwrap();
                        let delta = (host.inversions() + out.inversions()) % 2;
                        assert_eq!(delta, expected_delta, "k={k} host={host} -> {out}");
                    }
                }
            }
        }
    }

    #[test]
    fn rotation_examples() {
        let rots: BTreeSet<Permutation> = rotations(&p("1324")).into_iter().collect();
        let expect: BTreeSet<Permutation> =
            [p("1324"), p("3241"), p("2413"), p("4132")].into();
        assert_eq!(rots, expect);
        assert_eq!(rotations(&p("12")), vec![p("12"), p("21")]);
        assert_eq!(rotations(&p("123")), vec![p("123"), p("231"), p("312")]);
    }

    #[test]
    fn rotate_to_leading_one_examples() {
        assert_eq!(rotate_to_leading_one(&p("3241")), p("1324"));
        assert_eq!(rotate_to_leading_one(&p("1324")), p("1324"));
        assert_eq!(rotate_to_leading_one(&p("2413")), p("1324"));
    }

    #[test]
    fn spec_string_roundtrip() {
        let pi = set(&["3421", "1234"], false);
        assert_eq!(pi.spec_string(), "1234,3421");
        assert_eq!(pi.spec_string().parse::<ReplacementSet>().unwrap(), pi);

        let rot = ReplacementSet::rotations_of(&p("1324")).unwrap();
        assert_eq!(rot.spec_string(), "adj:1324,2413,3241,4132");
        assert_eq!(rot.spec_string().parse::<ReplacementSet>().unwrap(), rot);

        assert!("".parse::<ReplacementSet>().is_err());
        assert!("12,345".parse::<ReplacementSet>().is_err());
        assert!("1".parse::<ReplacementSet>().is_err());
    }
}
