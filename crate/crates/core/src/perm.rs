//! Permutation values, lexicographic ranking, parity, and monotone-subsequence
//! primitives.
//!
//! Letters are 1-based throughout the public surface: the permutation written
//! `21354` maps position 1 to letter 2. Lengths are capped at [`MAX_N`] so
//! every rank fits comfortably in a `u64`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Engine-wide hard cap on permutation length.
pub const MAX_N: usize = 12;

/// `FACTORIALS[i] = i!` for `i <= MAX_N`.
pub const FACTORIALS: [u64; MAX_N + 1] = {
    let mut f = [1u64; MAX_N + 1];
    let mut i = 1;
    while i <= MAX_N {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

/// Sign of a permutation, i.e. its inversion count mod 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_inversions(inv: usize) -> Parity {
        if inv % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A permutation of `1..=n`, `n <= 12`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    letters: Vec<u8>,
}

impl Permutation {
    /// Builds a permutation after checking that `letters` is a bijection on
    /// `{1..n}` with `n <= 12`.
    pub fn new(letters: Vec<u8>) -> Result<Permutation> {
        let n = letters.len();
        if n == 0 || n > MAX_N {
            return Err(Error::LengthCap { n });
        }
        let mut seen = [false; MAX_N + 1];
        for &v in &letters {
            if v == 0 || v as usize > n {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("letter {v} out of range"),
                });
            }
            if seen[v as usize] {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("letter {v} repeated"),
                });
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { letters })
    }

    /// The identity permutation `12...n`.
    pub fn identity(n: usize) -> Result<Permutation> {
        if n == 0 || n > MAX_N {
            return Err(Error::LengthCap { n });
        }
        Ok(Permutation {
            letters: (1..=n as u8).collect(),
        })
    }

    /// The `r`-th permutation of `1..=n` in lexicographic order (`r < n!`).
    pub fn unrank(rank: u64, n: usize) -> Result<Permutation> {
        if n == 0 || n > MAX_N {
            return Err(Error::LengthCap { n });
        }
        if rank >= FACTORIALS[n] {
            return Err(Error::RankOutOfRange { rank, n });
        }
        let mut buf = [0u8; MAX_N];
        raw::unrank_into(rank, n, &mut buf);
        Ok(Permutation {
            letters: buf[..n].to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    /// Lexicographic rank in `0..n!` (the identity ranks 0).
    pub fn rank(&self) -> u64 {
        raw::rank_of(&self.letters)
    }

    /// Number of pairs `i < j` with `letters[i] > letters[j]`.
    pub fn inversions(&self) -> usize {
        inversions(&self.letters)
    }

    pub fn parity(&self) -> Parity {
        Parity::from_inversions(self.inversions())
    }

    /// Lengths of the longest increasing and longest decreasing subsequences.
    pub fn longest_monotone(&self) -> (usize, usize) {
        longest_monotone(&self.letters)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for &v in &self.letters {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts both the compact digit form (`"21354"`) and the
    /// comma-separated form (`"10,1,2,3,4,5,6,7,8,9"`).
    fn from_str(s: &str) -> Result<Permutation> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty permutation string".into()));
        }
        let letters: Vec<u8> = if s.contains(',') {
            s.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad letter {tok:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .filter(|&d| d >= 1)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad digit {ch:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(letters)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Inversion count of any word with distinct letters (used directly by the
/// pseudo-parity definition, which counts inversions of non-permutation
/// words).
pub fn inversions(word: &[u8]) -> usize {
    let mut inv = 0;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// Longest increasing / longest decreasing subsequence lengths of a word with
/// distinct letters.
pub fn longest_monotone(word: &[u8]) -> (usize, usize) {
    let n = word.len();
    if n == 0 {
        return (0, 0);
    }
    let mut up = vec![1usize; n];
    let mut down = vec![1usize; n];
    for i in 0..n {
        for j in 0..i {
            if word[j] < word[i] {
                up[i] = up[i].max(up[j] + 1);
            } else {
                down[i] = down[i].max(down[j] + 1);
            }
        }
    }
    (
        up.iter().copied().max().unwrap(),
        down.iter().copied().max().unwrap(),
    )
}

/// The standardization of a word with distinct entries: each entry is replaced
/// by its rank within the word, giving a permutation of `1..=len`.
pub fn pattern_of(word: &[u8]) -> Result<Permutation> {
    let len = word.len();
    if len == 0 || len > MAX_N {
        return Err(Error::LengthCap { n: len });
    }
    let mut sorted: Vec<u8> = word.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidWord);
    }
    let letters = word
        .iter()
        .map(|v| (sorted.binary_search(v).unwrap() + 1) as u8)
        .collect();
    Ok(Permutation { letters })
}

/// Allocation-free primitives over raw 1-based letter slices. The class
/// engines run on these; `Permutation` wraps them.
pub(crate) mod raw {
    use super::{FACTORIALS, MAX_N};

    /// Lexicographic rank via the Lehmer code.
    pub fn rank_of(letters: &[u8]) -> u64 {
        let n = letters.len();
        let mut rank = 0u64;
        for i in 0..n {
            let mut smaller_right = 0u64;
            for j in i + 1..n {
                if letters[j] < letters[i] {
                    smaller_right += 1;
                }
            }
            rank += smaller_right * FACTORIALS[n - 1 - i];
        }
        rank
    }

    /// Writes the `rank`-th permutation of `1..=n` into `buf[..n]`.
    pub fn unrank_into(mut rank: u64, n: usize, buf: &mut [u8; MAX_N]) {
        let mut pool = [0u8; MAX_N];
        for (i, slot) in pool.iter_mut().enumerate().take(n) {
            *slot = i as u8 + 1;
        }
        for i in 0..n {
            let f = FACTORIALS[n - 1 - i];
            let d = (rank / f) as usize;
            rank %= f;
            buf[i] = pool[d];
            pool.copy_within(d + 1..n, d);
        }
    }

    /// Inversion count; kept separate from the public fn so hot loops can use
    /// fixed-size buffers without slicing overhead.
    pub fn inversions_of(letters: &[u8]) -> usize {
        let mut inv = 0;
        for i in 0..letters.len() {
            for j in i + 1..letters.len() {
                if letters[i] > letters[j] {
                    inv += 1;
                }
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn rank_identity_and_reversal() {
        assert_eq!(p("123").rank(), 0);
        assert_eq!(p("321").rank(), 5);
    }

    #[test]
    fn rank_matches_lexicographic_scan_of_s5() {
        // Oracle: generate S_5 in lexicographic order and compare indices.
        let mut all: Vec<Vec<u8>> = Vec::new();
        let mut cur: Vec<u8> = (1..=5).collect();
        loop {
            all.push(cur.clone());
            // next_permutation
            let Some(i) = (0..4).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..5).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let target = p("21354");
        let idx = all.iter().position(|v| v[..] == *target.letters()).unwrap();
        assert_eq!(target.rank(), idx as u64);
        assert_eq!(idx, 25);
        assert_eq!(Permutation::unrank(25, 5).unwrap(), target);
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(Permutation::unrank(0, 4).unwrap(), p("1234"));
        assert_eq!(Permutation::unrank(23, 4).unwrap(), p("4321"));
        // 8th permutation of S_4 in lexicographic order.
        assert_eq!(Permutation::unrank(7, 4).unwrap(), p("2143"));
        assert!(matches!(
            Permutation::unrank(24, 4),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn roundtrip_exhaustive_up_to_8() {
        for n in 1..=8 {
            for r in 0..FACTORIALS[n] {
                let q = Permutation::unrank(r, n).unwrap();
                assert_eq!(q.rank(), r, "round trip failed at n={n} r={r}");
            }
        }
    }

    #[test]
    fn parity_and_inversions() {
        assert_eq!(p("1234").parity(), Parity::Even);
        assert_eq!(p("2134").parity(), Parity::Odd);
        assert_eq!(p("1234").inversions(), 0);
        assert_eq!(p("4321").inversions(), 6);
        // Word-level count used by the pseudo-parity definition.
        assert_eq!(inversions(&[1, 6, 2, 8]), 1);
        assert_eq!(p("21537468").inversions(), 5);
        assert_eq!(p("21537468").parity(), Parity::Odd);
    }

    #[test]
    fn parity_agrees_with_inversions_on_s6() {
        for r in 0..FACTORIALS[6] {
            let q = Permutation::unrank(r, 6).unwrap();
            assert_eq!(q.parity(), Parity::from_inversions(q.inversions()));
        }
    }

    #[test]
    fn longest_monotone_examples() {
        assert_eq!(p("12345").longest_monotone(), (5, 1));
        assert_eq!(p("21354").longest_monotone(), (3, 2));
    }

    #[test]
    fn erdos_szekeres_base_fact_on_s5() {
        // (k-1)^2 = 4 < 5 for k = 3: every permutation of S_5 has an
        // increasing or decreasing subsequence of length 3.
        for r in 0..FACTORIALS[5] {
            let q = Permutation::unrank(r, 5).unwrap();
            let (lis, lds) = q.longest_monotone();
            assert!(lis.max(lds) >= 3, "{q}");
        }
    }

    #[test]
    fn pattern_of_examples() {
        assert_eq!(pattern_of(&[2, 5, 4]).unwrap(), p("132"));
        assert_eq!(pattern_of(&[1, 2, 3]).unwrap(), p("123"));
        assert_eq!(pattern_of(&[9, 1, 7, 3]).unwrap(), p("4132"));
        assert!(matches!(pattern_of(&[3, 3]), Err(Error::InvalidWord)));
    }

    #[test]
    fn pattern_of_is_idempotent_on_permutations() {
        for r in 0..FACTORIALS[5] {
            let q = Permutation::unrank(r, 5).unwrap();
            assert_eq!(pattern_of(q.letters()).unwrap(), q);
        }
    }

    #[test]
    fn parse_and_display_both_formats() {
        assert_eq!(p("21354").to_string(), "21354");
        let long: Permutation = "10,1,2,3,4,5,6,7,8,9".parse().unwrap();
        assert_eq!(long.to_string(), "10,1,2,3,4,5,6,7,8,9");
        assert_eq!(long.letters()[0], 10);
        // Comma form is accepted for short permutations too.
        assert_eq!("2,1,3".parse::<Permutation>().unwrap(), p("213"));
        assert!("0123".parse::<Permutation>().is_err());
        assert!("122".parse::<Permutation>().is_err());
        assert!("".parse::<Permutation>().is_err());
    }

    #[test]
    fn rejects_bad_letter_vectors() {
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![2, 3]).is_err());
        assert!(Permutation::new((1..=13).collect()).is_err());
    }
}
