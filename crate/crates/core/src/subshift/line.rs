//! Exact languages of SFTs on Z through the essential follower graph.
//!
//! With span `L` (longest forbidden hull, at least 2) the states are words of
//! length `L-1` and edges are locally admissible `L`-words. After trimming
//! states without predecessors or successors, a word of length at least `L`
//! occurs in some point iff each of its `L`-subwords is an edge of the trimmed
//! graph. Shorter words are prefixes of such edges.

use std::collections::HashSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::enumerate::{decode_word, encode_word, prefix_len, sharded_fold, Guards};
use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// Largest dense edge table we are willing to allocate.
const MAX_TABLE: f64 = (1u64 << 26) as f64;

/// Residual target for the Perron power iteration.
pub const PERRON_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LineSft {
    a: usize,
    span: usize,
    /// Over `a^span` codes: true for edges between essential states.
    allowed: Vec<bool>,
    /// For each length `< span`, the codes of words that occur in the language.
    short: Vec<HashSet<u64>>,
}

impl LineSft {
    /// Builds the automaton from forbidden patterns on Z.
    pub fn new(a: usize, forbidden: &[Pattern], guards: &Guards) -> Result<LineSft> {
        let mut words: Vec<Vec<Option<u8>>> = Vec::new();
        let mut span = 2usize;
        for f in forbidden {
            let (lo, hi) = f
                .shape()
                .z_bounds()
                .ok_or_else(|| Error::config("forbidden", "forbidden patterns on Z need a non-empty shape"))?;
            let len = (hi - lo + 1) as usize;
            let mut w = vec![None; len];
            for (p, &s) in f.shape().points().iter().zip(f.symbols()) {
                if s as usize >= a {
                    return Err(Error::config("forbidden", format!("symbol index {s} outside the alphabet")));
                }
                w[(p.coords()[0] - lo) as usize] = Some(s);
            }
            span = span.max(len);
            words.push(w);
        }
        let table = (a as f64).powi(span as i32);
        if table > MAX_TABLE {
            return Err(Error::Guard {
                what: "follower-graph edge table".into(),
                needed: format!("{table:.3e}"),
                limit: MAX_TABLE as u128,
            });
        }
        guards.check_count("follower-graph edge table", table)?;
        let n_edges = a.pow(span as u32);
        let n_states = a.pow(span as u32 - 1);
        let mut local = vec![true; n_edges];
        let mut buf = vec![0u8; span];
        for (code, ok) in local.iter_mut().enumerate() {
            decode_word(code as u64, a, &mut buf);
            *ok = !words.iter().any(|f| occurs_in(f, &buf));
        }
        // trim states with no in-edge or no out-edge until stable
        let mut alive = vec![true; n_states];
        loop {
            let mut has_out = vec![false; n_states];
            let mut has_in = vec![false; n_states];
            for (code, &ok) in local.iter().enumerate() {
                if !ok {
                    continue;
                }
                let (u, v) = (code / a, code % n_states);
                if alive[u] && alive[v] {
                    has_out[u] = true;
                    has_in[v] = true;
                }
            }
            let mut changed = false;
            for s in 0..n_states {
                if alive[s] && !(has_out[s] && has_in[s]) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let allowed: Vec<bool> = local
            .iter()
            .enumerate()
            .map(|(code, &ok)| ok && alive[code / a] && alive[code % n_states])
            .collect();
        let mut short = vec![HashSet::new(); span];
        for (code, &ok) in allowed.iter().enumerate() {
            if !ok {
                continue;
            }
            decode_word(code as u64, a, &mut buf);
            for (len, set) in short.iter_mut().enumerate() {
                set.insert(encode_word(&buf[..len], a));
            }
        }
        Ok(LineSft { a, span, allowed, short })
    }

    pub fn alphabet_size(&self) -> usize {
        self.a
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn is_empty(&self) -> bool {
        !self.allowed.iter().any(|&b| b)
    }

    /// Whether the `span`-word with this code is an essential edge.
    #[inline]
    pub fn edge_ok(&self, code: u64) -> bool {
        self.allowed[code as usize]
    }

    /// Membership of a left-to-right word in the exact language.
    pub fn accepts(&self, w: &[u8]) -> bool {
        if w.iter().any(|&s| s as usize >= self.a) {
            return false;
        }
        if w.len() < self.span {
            return self.short[w.len()].contains(&encode_word(w, self.a));
        }
        w.windows(self.span).all(|win| self.allowed[encode_word(win, self.a) as usize])
    }

    /// The same language read right to left.
    pub fn mirrored(&self) -> LineSft {
        let mut buf = vec![0u8; self.span];
        let mut allowed = vec![false; self.allowed.len()];
        for (code, slot) in allowed.iter_mut().enumerate() {
            decode_word(code as u64, self.a, &mut buf);
            buf.reverse();
            *slot = self.allowed[encode_word(&buf, self.a) as usize];
        }
        let short = self
            .short
            .iter()
            .enumerate()
            .map(|(len, set)| {
                set.iter()
                    .map(|&c| {
                        let mut w = vec![0u8; len];
                        decode_word(c, self.a, &mut w);
                        w.reverse();
                        encode_word(&w, self.a)
                    })
                    .collect()
            })
            .collect();
        LineSft { a: self.a, span: self.span, allowed, short }
    }

    /// Exact number of words of length `len`, by dynamic programming over states.
    pub fn count(&self, len: usize) -> Result<u128> {
        if len < self.span {
            return Ok(self.short[len].len() as u128);
        }
        let n_states = self.a.pow(self.span as u32 - 1);
        let mut dp = vec![0u128; n_states];
        for (code, &ok) in self.allowed.iter().enumerate() {
            if ok {
                dp[code / self.a] = 1;
            }
        }
        for _ in 0..(len + 1 - self.span) {
            let mut next = vec![0u128; n_states];
            for (code, &ok) in self.allowed.iter().enumerate() {
                if ok && dp[code / self.a] > 0 {
                    let v = code % n_states;
                    next[v] = next[v]
                        .checked_add(dp[code / self.a])
                        .ok_or_else(|| Error::Domain(format!("word count overflows u128 at length {len}")))?;
                }
            }
            dp = next;
        }
        Ok(dp.iter().sum())
    }

    /// Folds over every word of length `len` in lexicographic order within each shard.
    pub fn fold_words<T, W, M>(&self, len: usize, shards: usize, zero: T, work: W, merge: M) -> T
    where
        T: Send + Sync + Clone,
        W: Fn(&mut T, &[u8]) + Sync,
        M: Fn(T, T) -> T + Sync,
    {
        if len < self.span {
            let mut codes: Vec<u64> = self.short[len].iter().copied().collect();
            codes.sort_unstable();
            return sharded_fold(
                codes.len(),
                shards,
                zero,
                |acc, u| {
                    let mut w = vec![0u8; len];
                    decode_word(codes[u], self.a, &mut w);
                    work(acc, &w);
                },
                merge,
            );
        }
        let p = prefix_len(self.a, len).max(1);
        let units = self.a.pow(p as u32);
        sharded_fold(
            units,
            shards,
            zero,
            |acc, u| {
                let mut w = vec![0u8; len];
                decode_word(u as u64, self.a, &mut w[..p]);
                if self.accepts(&w[..p]) {
                    self.dfs(&mut w, p, acc, &work);
                }
            },
            merge,
        )
    }

    fn dfs<T, W: Fn(&mut T, &[u8])>(&self, w: &mut Vec<u8>, i: usize, acc: &mut T, work: &W) {
        if i == w.len() {
            work(acc, w);
            return;
        }
        for s in 0..self.a as u8 {
            w[i] = s;
            let ok = if i + 1 >= self.span {
                self.allowed[encode_word(&w[i + 1 - self.span..=i], self.a) as usize]
            } else {
                self.short[i + 1].contains(&encode_word(&w[..=i], self.a))
            };
            if ok {
                self.dfs(w, i + 1, acc, work);
            }
        }
    }

    /// All words of length `len`, left to right, in lexicographic order.
    pub fn words(&self, len: usize, shards: usize) -> Vec<Vec<u8>> {
        let mut out = self.fold_words(
            len,
            shards,
            Vec::new(),
            |acc: &mut Vec<Vec<u8>>, w| acc.push(w.to_vec()),
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        out.sort();
        out
    }

    /// Perron eigenvalue of the essential graph: max over strongly connected components.
    pub fn perron_eigenvalue(&self) -> Result<f64> {
        let n_states = self.a.pow(self.span as u32 - 1);
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n_states, 0);
        let nodes: Vec<_> = (0..n_states).map(|_| g.add_node(())).collect();
        for (code, &ok) in self.allowed.iter().enumerate() {
            if ok {
                g.add_edge(nodes[code / self.a], nodes[code % n_states], ());
            }
        }
        let mut best: Option<f64> = None;
        for comp in tarjan_scc(&g) {
            let idx: Vec<usize> = comp.iter().map(|n| n.index()).collect();
            let pos = |s: usize| idx.iter().position(|&x| x == s);
            let mut edges = Vec::new();
            for &u in &idx {
                for e in g.neighbors(nodes[u]) {
                    if let Some(j) = pos(e.index()) {
                        edges.push((pos(u).expect("member"), j));
                    }
                }
            }
            if edges.is_empty() {
                continue;
            }
            let lam = power_iteration(idx.len(), &edges)?;
            best = Some(best.map_or(lam, |b: f64| b.max(lam)));
        }
        best.ok_or_else(|| Error::Domain("the subshift is empty".into()))
    }
}

// power iteration on A + I, which is primitive whenever A is irreducible
fn power_iteration(n: usize, edges: &[(usize, usize)]) -> Result<f64> {
    let mut v = vec![1.0f64 / n as f64; n];
    for _ in 0..1_000_000 {
        let mut w = v.clone();
        for &(i, j) in edges {
            w[i] += v[j];
        }
        let norm: f64 = w.iter().sum();
        let mu = norm / v.iter().sum::<f64>();
        for x in w.iter_mut() {
            *x /= norm;
        }
        let resid = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if resid < PERRON_TOLERANCE {
            return Ok(mu - 1.0);
        }
    }
    Err(Error::Domain("power iteration did not converge".into()))
}

fn occurs_in(f: &[Option<u8>], w: &[u8]) -> bool {
    if f.len() > w.len() {
        return false;
    }
    (0..=w.len() - f.len()).any(|o| f.iter().enumerate().all(|(i, s)| s.is_none_or(|s| w[o + i] == s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> LineSft {
        LineSft::new(2, &[Pattern::z_word(&[1, 1])], &Guards::default()).unwrap()
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let g = golden();
        let mut fib = vec![1u128, 2];
        for i in 2..30 {
            let next = fib[i - 1] + fib[i - 2];
            fib.push(next);
        }
        for (len, &want) in fib.iter().enumerate().take(28) {
            assert_eq!(g.count(len).unwrap(), want, "len {len}");
        }
        assert_eq!(g.words(4, 3).len(), 8);
    }

    #[test]
    fn trimming_removes_dead_ends() {
        // forbidding 01 and 10 leaves only the two fixed points
        let f = [Pattern::z_word(&[0, 1]), Pattern::z_word(&[1, 0])];
        let l = LineSft::new(2, &f, &Guards::default()).unwrap();
        assert_eq!(l.count(5).unwrap(), 2);
        assert!((l.perron_eigenvalue().unwrap() - 1.0).abs() < 1e-12);
        // forbidding 00 and 11 leaves the alternating orbit
        let f = [Pattern::z_word(&[0, 0]), Pattern::z_word(&[1, 1])];
        let l = LineSft::new(2, &f, &Guards::default()).unwrap();
        assert_eq!(l.count(7).unwrap(), 2);
    }

    #[test]
    fn gapped_forbidden_patterns() {
        // x(0) = x(2) = 1 forbidden
        let shape = crate::shape::Shape::from_ints(&[0, 2]);
        let f = Pattern::new(shape, vec![1, 1]).unwrap();
        let l = LineSft::new(2, &[f], &Guards::default()).unwrap();
        assert!(l.accepts(&[1, 1, 0, 0, 1]));
        assert!(!l.accepts(&[1, 0, 1]));
    }

    #[test]
    fn perron_values() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((golden().perron_eigenvalue().unwrap() - phi).abs() < 1e-11);
        let full = LineSft::new(2, &[], &Guards::default()).unwrap();
        assert!((full.perron_eigenvalue().unwrap() - 2.0).abs() < 1e-11);
    }

    #[test]
    fn mirror_reverses_words() {
        let f = [Pattern::z_word(&[0, 1, 1])];
        let l = LineSft::new(2, &f, &Guards::default()).unwrap();
        let m = l.mirrored();
        assert!(!l.accepts(&[0, 1, 1]));
        assert!(!m.accepts(&[1, 1, 0]));
        assert!(m.accepts(&[0, 1, 1]));
    }
}
