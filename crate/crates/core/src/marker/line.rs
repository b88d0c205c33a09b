//! Exact marker evaluation on Z through boundary summaries.
//!
//! Positions are split into a window P = [0, plen), a left strip Lo = [-s, -1]
//! and a right strip Ro = [plen, plen + s), where s is the reach of S⁻¹S. The
//! F-values on Lo depend on everything to the left only through the F-values
//! on the first s cells of P, so a left context is summarised by the levels on
//! Lo and a table from those s bits to the F-bits of Lo. Summaries are found
//! by extending the context one cell at a time until every Lo value is
//! determined; right summaries come from the mirrored marker.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::enumerate::{encode_word, RunOptions};
use crate::error::{Error, Result};
use crate::subshift::LineSft;

use super::{MarkerConstruction, MarkerVariant, Resolution, UNLISTED};

/// Levels on the strip and the strip's F-bits for each assignment of the s boundary bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Summary {
    levels: Vec<u32>,
    table: Vec<u32>,
    /// Strip cells that can be in F, as (level, cell) in increasing level order.
    order: Vec<(u32, usize)>,
}

impl Summary {
    /// Cells never in F cannot subtract anything, so their levels are dropped.
    fn new(mut levels: Vec<u32>, table: Vec<u32>) -> Summary {
        let any = table.iter().fold(0u32, |x, &t| x | t);
        for (q, l) in levels.iter_mut().enumerate() {
            if (any >> q) & 1 == 0 {
                *l = UNLISTED;
            }
        }
        let mut order: Vec<(u32, usize)> =
            levels.iter().enumerate().filter(|(_, &l)| l != UNLISTED).map(|(q, &l)| (l, q)).collect();
        order.sort_unstable();
        Summary { levels, table, order }
    }
}

#[derive(Debug, Clone)]
struct Side {
    sft: LineSft,
    /// T offsets in canonical T order.
    t_off: Vec<i64>,
    t0: i64,
    summaries: HashMap<u64, Vec<Summary>>,
    context: usize,
}

#[derive(Debug, Clone)]
pub struct LineMarker<'m> {
    m: &'m MarkerConstruction,
    a: usize,
    s: usize,
    t_width: usize,
    key_len: usize,
    neigh: Vec<i64>,
    subtract: bool,
    left: Side,
    right: Side,
}

impl<'m> LineMarker<'m> {
    pub fn new(m: &'m MarkerConstruction, opts: &RunOptions) -> Result<LineMarker<'m>> {
        let p = m.params();
        if !p.x.group().is_z() {
            return Err(Error::Precondition("boundary summaries need the group Z".into()));
        }
        let a = m.alphabet_size();
        let sft = p.x.line_sft(opts)?;
        let t_off: Vec<i64> = p.t.points().iter().map(|g| g.coords()[0]).collect();
        // the hull includes 0 so that the core also carries the symbols on P
        let (t0, t1) = p.t.z_bounds().expect("T is non-empty");
        let (t0, t1) = (t0.min(0), t1.max(0));
        let neigh: Vec<i64> = m.neighbors().iter().map(|d| d.coords()[0]).collect();
        let s = neigh.iter().map(|d| d.unsigned_abs() as usize).max().unwrap_or(0).max(1);
        let t_width = (t1 - t0) as usize;
        let key_len = (s + t_width).max(sft.span() - 1);
        let subtract = m.variant() == MarkerVariant::Standard;
        let mut lm = LineMarker {
            m,
            a,
            s,
            t_width,
            key_len,
            neigh,
            subtract,
            left: Side { sft: sft.clone(), t_off: t_off.clone(), t0, summaries: HashMap::new(), context: 0 },
            right: Side {
                sft: sft.mirrored(),
                t_off: t_off.iter().map(|t| -t).collect(),
                t0: -t1,
                summaries: HashMap::new(),
                context: 0,
            },
        };
        let cap = opts.guards.max_marker_depth.saturating_mul(s);
        opts.guards.check_count("boundary keys", (a as f64).powi(key_len as i32))?;
        for right in [false, true] {
            let side = if right { &lm.right } else { &lm.left };
            let keys = side.sft.words(key_len, 1);
            let found: Vec<(u64, Vec<Summary>, usize)> = keys
                .par_iter()
                .map(|k| lm.key_summaries(side, k, cap).map(|(sums, depth)| (encode_word(k, a), sums, depth)))
                .collect::<Result<_>>()?;
            let context = found.iter().map(|f| f.2).max().unwrap_or(0);
            let summaries: HashMap<u64, Vec<Summary>> = found.into_iter().map(|(k, s, _)| (k, s)).collect();
            let side = if right { &mut lm.right } else { &mut lm.left };
            side.summaries = summaries;
            side.context = context;
        }
        Ok(lm)
    }

    /// Longest left and right contexts any summary needed.
    pub fn contexts(&self) -> (usize, usize) {
        (self.left.context, self.right.context)
    }

    pub fn summary_counts(&self) -> (usize, usize) {
        let c = |s: &Side| s.summaries.values().map(Vec::len).sum();
        (c(&self.left), c(&self.right))
    }

    /// Smallest window length the core evaluation accepts.
    pub fn min_window(&self) -> usize {
        self.key_len.saturating_sub(self.t_width).max(self.s)
    }

    /// Core cells read for a window of length `plen` start at `t0` relative to the window.
    pub fn core_offset(&self) -> i64 {
        self.left.t0
    }

    pub fn core_len(&self, plen: usize) -> usize {
        plen + self.t_width
    }

    /// The symbols on P inside a core word.
    pub fn window_cells<'c>(&self, core: &'c [u8], plen: usize) -> &'c [u8] {
        let lo = (-self.left.t0) as usize;
        &core[lo..lo + plen]
    }

    #[inline]
    fn level_at(&self, side: &Side, cells: &[u8], first: usize) -> u32 {
        // cells[first] holds cell p + t0 for the position p being read
        let mut code = 0u64;
        for &t in &side.t_off {
            code = code * self.a as u64 + cells[first + (t - side.t0) as usize] as u64;
        }
        self.m.level_of_code(code)
    }

    /// All distinct summaries of admissible left contexts of `key` (cells t0 .. t0 + key_len).
    fn key_summaries(&self, side: &Side, key: &[u8], cap: usize) -> Result<(Vec<Summary>, usize)> {
        let s = self.s;
        let kl = self.key_len;
        let mut buf = vec![0u8; cap + kl];
        buf[cap..].copy_from_slice(key);
        // levels of positions q in [-c, s-1], stored at q + cap
        let mut lv = vec![UNLISTED; cap + s];
        for q in 0..s {
            lv[cap + q] = self.level_at(side, &buf, cap + q);
        }
        let mut out = HashSet::new();
        let mut depth = 0;
        self.dfs(side, &mut buf, &mut lv, 0, cap, &mut out, &mut depth)?;
        let mut v: Vec<Summary> = out.into_iter().collect();
        v.sort();
        Ok((v, depth))
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        side: &Side,
        buf: &mut [u8],
        lv: &mut [u32],
        c: usize,
        cap: usize,
        out: &mut HashSet<Summary>,
        depth: &mut usize,
    ) -> Result<()> {
        if c >= self.s {
            if let Some(sum) = self.try_resolve(lv, c, cap) {
                *depth = (*depth).max(c);
                out.insert(sum);
                return Ok(());
            }
        }
        if c == cap {
            return Err(Error::DepthCap { cap: cap / self.s, what: "marker boundary context".into() });
        }
        let span = side.sft.span();
        let cell = cap - c - 1;
        for sym in 0..self.a as u8 {
            buf[cell] = sym;
            if !side.sft.edge_ok(encode_word(&buf[cell..cell + span], self.a)) {
                continue;
            }
            // position -(c+1) reads cells starting at buf index cap - c - 1
            lv[cap - c - 1] = self.level_at(side, buf, cell);
            self.dfs(side, buf, lv, c + 1, cap, out, depth)?;
        }
        Ok(())
    }

    /// Evaluates Lo for every boundary assignment with the context [-c, -1] known.
    fn try_resolve(&self, lv: &[u32], c: usize, cap: usize) -> Option<Summary> {
        let s = self.s;
        let lo = cap - c;
        let mut order: Vec<(u32, usize)> = (lo..cap).filter(|&i| lv[i] != UNLISTED).map(|i| (lv[i], i)).collect();
        order.sort_unstable();
        let n = cap + s;
        let mut table = Vec::with_capacity(1 << s);
        // 0 = out, 1 = in, 2 = undetermined
        let mut val = vec![0u8; n];
        for combo in 0..(1u32 << s) {
            val[lo..cap].fill(0);
            for j in 0..s {
                val[cap + j] = ((combo >> j) & 1) as u8;
            }
            for &(l, i) in &order {
                if !self.subtract {
                    val[i] = 1;
                    continue;
                }
                let mut forced = false;
                let mut maybe = false;
                for &d in &self.neigh {
                    let h = i as i64 + d;
                    if h < lo as i64 {
                        maybe |= l > 0;
                        continue;
                    }
                    let h = h as usize;
                    if lv[h] < l {
                        match val[h] {
                            1 => forced = true,
                            2 => maybe = true,
                            _ => {}
                        }
                    }
                }
                val[i] = if forced {
                    0
                } else if maybe {
                    2
                } else {
                    1
                };
            }
            let mut bits = 0u32;
            for q in 0..s {
                match val[cap - s + q] {
                    2 => return None,
                    1 => bits |= 1 << q,
                    _ => {}
                }
            }
            table.push(bits);
        }
        Some(Summary::new(lv[cap - s..cap].to_vec(), table))
    }

    /// Folds over every admissible core word for P = [0, plen) together with
    /// every F-assignment on P that some bi-infinite extension realises.
    ///
    /// The callback receives the core cells `[t0, plen - 1 + t1]` left to right
    /// and the F-bits of P (bit i for position i).
    pub fn fold_resolved<T, W, M>(&self, plen: usize, opts: &RunOptions, zero: T, work: W, merge: M) -> Result<T>
    where
        T: Send + Sync + Clone,
        W: Fn(&mut T, &[u8], u64) + Sync,
        M: Fn(T, T) -> T + Sync,
    {
        if plen < self.min_window() || plen > 64 {
            return Err(Error::Window(format!(
                "window length {plen} outside [{}, 64] for boundary summaries",
                self.min_window()
            )));
        }
        let s = self.s;
        let kl = self.key_len;
        let a = self.a;
        let core_len = self.core_len(plen);
        opts.guards.check_count("marker core words", (a as f64).powi(core_len as i32))?;
        let empty: Vec<Summary> = Vec::new();
        Ok(self.left.sft.fold_words(
            core_len,
            opts.shards,
            zero,
            |acc, core| {
                let lkey = encode_word(&core[..kl], a);
                let rkey = core[core_len - kl..].iter().rev().fold(0u64, |c, &x| c * a as u64 + x as u64);
                let ls = self.left.summaries.get(&lkey).unwrap_or(&empty);
                let rs = self.right.summaries.get(&rkey).unwrap_or(&empty);
                // index i <-> position i - s
                let n = plen + 2 * s;
                let mut lv = vec![UNLISTED; n];
                for p in 0..plen {
                    lv[s + p] = self.level_at(&self.left, core, p);
                }
                let mut mid: Vec<(u32, usize)> =
                    (s..s + plen).filter(|&i| lv[i] != UNLISTED).map(|i| (lv[i], i)).collect();
                mid.sort_unstable();
                let mut f = vec![false; n];
                let mut order: Vec<(u32, usize)> = Vec::with_capacity(n);
                let mut seen: Vec<u64> = Vec::new();
                for l in ls {
                    for r in rs {
                        lv[..s].copy_from_slice(&l.levels);
                        for j in 0..s {
                            // mirrored strip position -s + j sits at plen + s - 1 - j
                            lv[n - 1 - j] = r.levels[j];
                        }
                        merge_orders(&mut order, &mid, &l.order, &r.order, n);
                        f.iter_mut().for_each(|b| *b = false);
                        for &(l_i, i) in &order {
                            f[i] = if i < s {
                                let combo = (0..s).fold(0u32, |c, j| c | ((f[s + j] as u32) << j));
                                (l.table[combo as usize] >> i) & 1 == 1
                            } else if i >= s + plen {
                                let combo = (0..s).fold(0u32, |c, j| c | ((f[s + plen - 1 - j] as u32) << j));
                                (r.table[combo as usize] >> (n - 1 - i)) & 1 == 1
                            } else if !self.subtract {
                                true
                            } else {
                                !self.neigh.iter().any(|&d| {
                                    let h = i as i64 + d;
                                    h >= 0 && (h as usize) < n && lv[h as usize] < l_i && f[h as usize]
                                })
                            };
                        }
                        seen.push((0..plen).fold(0u64, |b, p| b | ((f[s + p] as u64) << p)));
                    }
                }
                seen.sort_unstable();
                seen.dedup();
                for &bits in &seen {
                    work(acc, core, bits);
                }
            },
            merge,
        ))
    }

    /// Largest number of F-positions in [0, n) over all points of X.
    pub fn max_in_count(&self, n: usize, opts: &RunOptions) -> Result<(usize, Resolution)> {
        let plen = n.max(self.min_window());
        let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
        let best = self.fold_resolved(
            plen,
            opts,
            0usize,
            |acc, _, bits| *acc = (*acc).max((bits & mask).count_ones() as usize),
            |x, y| x.max(y),
        )?;
        let (l, r) = self.contexts();
        Ok((best, Resolution::BoundarySummary { left_context: l, right_context: r }))
    }

    /// Distinct (core, F-bits) pairs for P = [0, plen), sorted.
    pub fn resolved_pairs(&self, plen: usize, opts: &RunOptions) -> Result<Vec<(Vec<u8>, u64)>> {
        let mut v = self.fold_resolved(
            plen,
            opts,
            Vec::new(),
            |acc: &mut Vec<(Vec<u8>, u64)>, core, bits| acc.push((core.to_vec(), bits)),
            |mut x, mut y| {
                x.append(&mut y);
                x
            },
        )?;
        v.sort();
        v.dedup();
        Ok(v)
    }
}

/// Merges the level-sorted window, left-strip and right-strip entries.
fn merge_orders(out: &mut Vec<(u32, usize)>, mid: &[(u32, usize)], left: &[(u32, usize)], right: &[(u32, usize)], n: usize) {
    out.clear();
    out.extend_from_slice(mid);
    for &(l, q) in left {
        out.push((l, q));
    }
    for &(l, j) in right {
        out.push((l, n - 1 - j));
    }
    if !left.is_empty() || !right.is_empty() {
        // insertion sort: mid is sorted and at most 2s entries are appended
        for k in mid.len()..out.len() {
            let mut m = k;
            while m > 0 && out[m - 1].0 > out[m].0 {
                out.swap(m - 1, m);
                m -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupId;
    use crate::marker::{build_marker, FieldEvaluator, MarkerParams, Tri};
    use crate::pattern::Alphabet;
    use crate::shape::Shape;
    use crate::subshift::SubshiftSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn marker(x: SubshiftSpec, s: Shape, t: Shape, k: usize) -> MarkerConstruction {
        build_marker(MarkerParams::new(s, t, k, x).unwrap(), &RunOptions::default()).unwrap()
    }

    /// Every determined in-window value on a long word must match some resolved assignment of its core.
    fn agrees_with_window(m: &MarkerConstruction, seed: u64, gen: impl Fn(&mut ChaCha8Rng, usize) -> Vec<u8>) {
        let opts = RunOptions::default();
        let lm = LineMarker::new(m, &opts).unwrap();
        let plen = lm.min_window().max(4);
        let pairs = lm.resolved_pairs(plen, &opts).unwrap();
        let mut by_core: HashMap<Vec<u8>, Vec<u64>> = HashMap::new();
        for (c, b) in pairs {
            by_core.entry(c).or_default().push(b);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 80usize;
        let w = Shape::interval(0, len as i64);
        let ev = FieldEvaluator::new(m, &w).unwrap();
        let mut tested = 0;
        while tested < 200 {
            let x = gen(&mut rng, len);
            tested += 1;
            let field = ev.eval(&x);
            let start = 40usize;
            let lo = (start as i64 + lm.core_offset()) as usize;
            let core = &x[lo..lo + lm.core_len(plen)];
            let options = &by_core[core];
            let fits = |b: u64| {
                (0..plen).all(|p| match field.values[start + p] {
                    Tri::InF => (b >> p) & 1 == 1,
                    Tri::NotInF => (b >> p) & 1 == 0,
                    Tri::Undetermined => true,
                })
            };
            assert!(options.iter().any(|&b| fits(b)), "core {core:?} options {options:?}");
        }
    }

    #[test]
    fn matches_window_evaluation_on_the_full_shift() {
        let full = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
        let m = marker(full, Shape::interval(0, 3), Shape::interval(0, 8), 2);
        agrees_with_window(&m, 1, |rng, len| (0..len).map(|_| rng.gen_range(0..2)).collect());
    }

    #[test]
    fn matches_window_evaluation_on_the_golden_mean() {
        let m = marker(SubshiftSpec::golden_mean(), Shape::interval(0, 3), Shape::interval(0, 6), 2);
        agrees_with_window(&m, 2, |rng, len| {
            let mut x = vec![0u8; len];
            for i in 1..len {
                x[i] = if x[i - 1] == 1 { 0 } else { rng.gen_range(0..2) };
            }
            x
        });
    }

    #[test]
    fn skip_subtraction_marks_every_listed_position() {
        let full = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
        let m = marker(full, Shape::interval(0, 3), Shape::interval(0, 8), 2).with_variant(MarkerVariant::SkipSubtraction);
        let opts = RunOptions::default();
        let lm = LineMarker::new(&m, &opts).unwrap();
        let (best, _) = lm.max_in_count(12, &opts).unwrap();
        assert!(best > 3);
    }

    #[test]
    fn shard_count_does_not_change_results() {
        let m = marker(SubshiftSpec::golden_mean(), Shape::interval(0, 3), Shape::interval(0, 8), 2);
        let o1 = RunOptions::with_shards(1);
        let o4 = RunOptions::with_shards(4);
        let a = LineMarker::new(&m, &o1).unwrap().resolved_pairs(10, &o1).unwrap();
        let b = LineMarker::new(&m, &o4).unwrap().resolved_pairs(10, &o4).unwrap();
        assert_eq!(a, b);
    }
}
