//! Guards and shard-parallel folding for exhaustive enumeration.
//!
//! Work is split into numbered units; unit `u` belongs to shard `u % shards`.
//! Shards run on the rayon pool and their partial results are merged in shard
//! order, so any merge that is associative and commutative gives the same
//! answer for every shard count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of candidate patterns an enumeration may visit.
pub const DEFAULT_MAX_ENUMERATION: u64 = 1 << 32;

/// Default cap on marker inflation rounds.
pub const DEFAULT_MAX_MARKER_DEPTH: usize = 64;

/// Environment variable overriding the enumeration guard.
pub const GUARD_ENV: &str = "MARKERLAB_GUARD_BYTES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guards {
    #[serde(default = "default_max_enumeration")]
    pub max_enumeration: u64,
    #[serde(default = "default_max_marker_depth")]
    pub max_marker_depth: usize,
    /// Lifts the enumeration guard (never the depth cap).
    #[serde(default)]
    pub unsafe_override: bool,
}

fn default_max_enumeration() -> u64 {
    DEFAULT_MAX_ENUMERATION
}

fn default_max_marker_depth() -> usize {
    DEFAULT_MAX_MARKER_DEPTH
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_enumeration: DEFAULT_MAX_ENUMERATION,
            max_marker_depth: DEFAULT_MAX_MARKER_DEPTH,
            unsafe_override: false,
        }
    }
}

impl Guards {
    /// Applies `MARKERLAB_GUARD_BYTES` when set to a positive integer.
    pub fn with_env(mut self) -> Result<Self> {
        if let Ok(v) = std::env::var(GUARD_ENV) {
            let n: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::config(GUARD_ENV, format!("expected a positive integer, got {v:?}")))?;
            if n == 0 {
                return Err(Error::config(GUARD_ENV, "must be positive"));
            }
            self.max_enumeration = n;
        }
        Ok(self)
    }

    /// Fails when `alphabet^cells` exceeds the guard.
    pub fn check_space(&self, what: &str, alphabet: usize, cells: usize) -> Result<()> {
        let needed = (alphabet as f64).powi(cells as i32);
        self.check_count(what, needed)
    }

    pub fn check_count(&self, what: &str, needed: f64) -> Result<()> {
        if self.unsafe_override || needed <= self.max_enumeration as f64 {
            return Ok(());
        }
        Err(Error::Guard { what: what.into(), needed: format!("{needed:.3e}"), limit: self.max_enumeration as u128 })
    }
}

/// Shard count plus guards, threaded through every enumerating call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub shards: usize,
    pub guards: Guards,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { shards: 1, guards: Guards::default() }
    }
}

impl RunOptions {
    pub fn with_shards(shards: usize) -> Self {
        RunOptions { shards: shards.max(1), ..Default::default() }
    }
}

/// Folds `work` over units `0..units` split into `shards` interleaved shards.
pub fn sharded_fold<T, W, M>(units: usize, shards: usize, zero: T, work: W, merge: M) -> T
where
    T: Send + Sync + Clone,
    W: Fn(&mut T, usize) + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let shards = shards.max(1);
    let parts: Vec<T> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut acc = zero.clone();
            let mut u = s;
            while u < units {
                work(&mut acc, u);
                u += shards;
            }
            acc
        })
        .collect();
    parts.into_iter().fold(zero, merge)
}

/// Writes the base-`a` digits of `code` into `out`, most significant first.
pub fn decode_word(mut code: u64, a: usize, out: &mut [u8]) {
    for slot in out.iter_mut().rev() {
        *slot = (code % a as u64) as u8;
        code /= a as u64;
    }
}

/// Inverse of [`decode_word`].
pub fn encode_word(w: &[u8], a: usize) -> u64 {
    w.iter().fold(0u64, |acc, &x| acc * a as u64 + x as u64)
}

/// Advances `w` to the next word in lexicographic order; false after the last one.
pub fn next_word(w: &mut [u8], a: usize) -> bool {
    for i in (0..w.len()).rev() {
        if (w[i] as usize) + 1 < a {
            w[i] += 1;
            return true;
        }
        w[i] = 0;
    }
    false
}

/// Number of leading cells used to split `len`-letter words into shard units.
pub fn prefix_len(a: usize, len: usize) -> usize {
    let mut p = 0;
    let mut units = 1usize;
    while p < len && units < 256 {
        units = units.saturating_mul(a);
        p += 1;
    }
    p
}

/// Visits every word of `A^len` exactly once, sharded by prefix, folding into `T`.
pub fn fold_all_words<T, W, M>(a: usize, len: usize, shards: usize, zero: T, work: W, merge: M) -> T
where
    T: Send + Sync + Clone,
    W: Fn(&mut T, &[u8]) + Sync,
    M: Fn(T, T) -> T + Sync,
{
    if a == 0 {
        return zero;
    }
    let p = prefix_len(a, len);
    let units = a.pow(p as u32);
    sharded_fold(
        units,
        shards,
        zero,
        |acc, u| {
            let mut w = vec![0u8; len];
            decode_word(u as u64, a, &mut w[..p]);
            loop {
                work(acc, &w);
                if !next_word(&mut w[p..], a) {
                    break;
                }
            }
        },
        merge,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_counts_every_word_once_for_any_shard_count() {
        for shards in [1, 2, 3, 8] {
            let n = fold_all_words(3, 5, shards, 0u64, |acc, _| *acc += 1, |a, b| a + b);
            assert_eq!(n, 243);
            let s = fold_all_words(2, 6, shards, 0u64, |acc, w| *acc += encode_word(w, 2), |a, b| a + b);
            assert_eq!(s, (0..64).sum::<u64>());
        }
    }

    #[test]
    fn codes_round_trip() {
        let mut w = [0u8; 4];
        decode_word(encode_word(&[2, 0, 1, 2], 3), 3, &mut w);
        assert_eq!(w, [2, 0, 1, 2]);
    }

    #[test]
    fn guard_rejects_large_spaces() {
        let g = Guards { max_enumeration: 1000, ..Default::default() };
        assert!(g.check_space("t", 2, 9).is_ok());
        assert!(matches!(g.check_space("t", 2, 10), Err(Error::Guard { .. })));
        let lifted = Guards { unsafe_override: true, ..g };
        assert!(lifted.check_space("t", 2, 40).is_ok());
    }
}
