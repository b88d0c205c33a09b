//! Local admissibility on an arbitrary finite window: no forbidden pattern may
//! occur at any translate that fits inside the window.

use std::collections::HashSet;

use crate::enumerate::{decode_word, sharded_fold};
use crate::error::Result;
use crate::pattern::Pattern;
use crate::shape::Shape;

#[derive(Debug, Clone)]
struct Constraint {
    cells: Vec<usize>,
    symbols: Vec<u8>,
}

/// Forbidden-translate constraints compiled against one window.
#[derive(Debug, Clone)]
pub struct LocalSearch {
    a: usize,
    n: usize,
    constraints: Vec<Constraint>,
}

/// A search order for a given set of pre-assigned cells.
#[derive(Debug, Clone)]
pub struct Plan {
    free: Vec<usize>,
    at_step: Vec<Vec<usize>>,
    initial: Vec<usize>,
}

impl LocalSearch {
    pub fn new(window: &Shape, a: usize, forbidden: &[Pattern]) -> Result<LocalSearch> {
        let grp = window.group();
        let mut constraints = Vec::new();
        let mut seen = HashSet::new();
        for f in forbidden {
            let pts = f.shape().points();
            let Some(f0) = pts.first() else { continue };
            let f0inv = grp.inv(f0);
            for w in window.points() {
                let g = grp.mul(&f0inv, w);
                let cells: Option<Vec<usize>> = pts.iter().map(|p| window.index_of(&grp.mul(p, &g))).collect();
                if let Some(cells) = cells {
                    let key = (cells.clone(), f.symbols().to_vec());
                    if seen.insert(key) {
                        constraints.push(Constraint { cells, symbols: f.symbols().to_vec() });
                    }
                }
            }
        }
        Ok(LocalSearch { a, n: window.len(), constraints })
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn is_admissible(&self, w: &[u8]) -> bool {
        self.constraints.iter().all(|c| !violated(c, w))
    }

    pub fn plan(&self, fixed: &[bool]) -> Plan {
        let free: Vec<usize> = (0..self.n).filter(|&i| !fixed[i]).collect();
        let mut step_of = vec![usize::MAX; self.n];
        for (k, &c) in free.iter().enumerate() {
            step_of[c] = k;
        }
        let mut at_step = vec![Vec::new(); free.len()];
        let mut initial = Vec::new();
        for (ci, c) in self.constraints.iter().enumerate() {
            let last = c.cells.iter().filter(|&&x| !fixed[x]).map(|&x| step_of[x]).max();
            match last {
                Some(k) => at_step[k].push(ci),
                None => initial.push(ci),
            }
        }
        Plan { free, at_step, initial }
    }

    /// Folds over all admissible completions of `base` (fixed cells per `plan`).
    pub fn fold<T, W, M>(&self, plan: &Plan, base: &[u8], shards: usize, zero: T, work: W, merge: M) -> T
    where
        T: Send + Sync + Clone,
        W: Fn(&mut T, &[u8]) + Sync,
        M: Fn(T, T) -> T + Sync,
    {
        if plan.initial.iter().any(|&ci| violated(&self.constraints[ci], base)) {
            return zero;
        }
        let p = plan.free.len().min(if shards > 1 { 8 } else { 0 });
        let mut units = 1usize;
        for _ in 0..p {
            units *= self.a;
        }
        sharded_fold(
            units,
            shards,
            zero,
            |acc, u| {
                let mut w = base.to_vec();
                let mut pre = vec![0u8; p];
                decode_word(u as u64, self.a, &mut pre);
                for (k, &s) in pre.iter().enumerate() {
                    w[plan.free[k]] = s;
                    if plan.at_step[k].iter().any(|&ci| violated(&self.constraints[ci], &w)) {
                        return;
                    }
                }
                self.dfs(plan, &mut w, p, acc, &work);
            },
            merge,
        )
    }

    /// Single-threaded completion visitor, used inside already-sharded loops.
    pub fn for_each(&self, plan: &Plan, base: &[u8], f: &mut dyn FnMut(&[u8])) {
        if plan.initial.iter().any(|&ci| violated(&self.constraints[ci], base)) {
            return;
        }
        let mut w = base.to_vec();
        self.dfs_mut(plan, &mut w, 0, f);
    }

    fn dfs<T, W: Fn(&mut T, &[u8])>(&self, plan: &Plan, w: &mut Vec<u8>, k: usize, acc: &mut T, work: &W) {
        if k == plan.free.len() {
            work(acc, w);
            return;
        }
        let cell = plan.free[k];
        for s in 0..self.a as u8 {
            w[cell] = s;
            if plan.at_step[k].iter().all(|&ci| !violated(&self.constraints[ci], w)) {
                self.dfs(plan, w, k + 1, acc, work);
            }
        }
    }

    fn dfs_mut(&self, plan: &Plan, w: &mut Vec<u8>, k: usize, f: &mut dyn FnMut(&[u8])) {
        if k == plan.free.len() {
            f(w);
            return;
        }
        let cell = plan.free[k];
        for s in 0..self.a as u8 {
            w[cell] = s;
            if plan.at_step[k].iter().all(|&ci| !violated(&self.constraints[ci], w)) {
                self.dfs_mut(plan, w, k + 1, f);
            }
        }
    }
}

#[inline]
fn violated(c: &Constraint, w: &[u8]) -> bool {
    c.cells.iter().zip(&c.symbols).all(|(&i, &s)| w[i] == s)
}
