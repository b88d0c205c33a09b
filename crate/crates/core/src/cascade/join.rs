//! Topological joinings J(π, ψ) = {(πx, ψx)} of two factors of one source.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::enumerate::RunOptions;
use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::subshift::{bits_per_cell, language, BlockCode, SubshiftSpec};

use super::{decode, CascadeParams};

/// Joined window language on F_n with its two projections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinedSystem {
    pub window: Shape,
    pub left_alphabet: usize,
    pub right_alphabet: usize,
    /// Sorted (left word, right word) pairs, each in canonical window order.
    pub pairs: Vec<(Vec<u8>, Vec<u8>)>,
}

impl JoinedSystem {
    pub fn from_pairs(window: Shape, left_alphabet: usize, right_alphabet: usize, pairs: HashSet<(Vec<u8>, Vec<u8>)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort();
        JoinedSystem { window, left_alphabet, right_alphabet, pairs }
    }

    pub fn joined_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn left_count(&self) -> usize {
        self.pairs.iter().map(|p| &p.0).collect::<HashSet<_>>().len()
    }

    pub fn right_count(&self) -> usize {
        self.pairs.iter().map(|p| &p.1).collect::<HashSet<_>>().len()
    }

    pub fn bits(&self) -> f64 {
        bits_per_cell(self.joined_count() as u128, self.window.len())
    }

    pub fn left_bits(&self) -> f64 {
        bits_per_cell(self.left_count() as u128, self.window.len())
    }

    pub fn right_bits(&self) -> f64 {
        bits_per_cell(self.right_count() as u128, self.window.len())
    }

    /// The joined language on a sub-window, by restriction.
    pub fn restrict(&self, sub: &Shape) -> Result<JoinedSystem> {
        let idx = sub
            .points()
            .iter()
            .map(|g| self.window.index_of(g).ok_or_else(|| Error::Window(format!("{g} outside the join window"))))
            .collect::<Result<Vec<usize>>>()?;
        let pick = |w: &[u8]| idx.iter().map(|&i| w[i]).collect::<Vec<u8>>();
        let set = self.pairs.iter().map(|(l, r)| (pick(l), pick(r))).collect();
        Ok(JoinedSystem::from_pairs(sub.clone(), self.left_alphabet, self.right_alphabet, set))
    }
}

fn reads(c: &BlockCode, src: &Shape, out: &Shape) -> Result<Vec<usize>> {
    let grp = src.group();
    let mut v = Vec::with_capacity(out.len() * c.memory().len());
    for g in out.points() {
        for s in c.memory().points() {
            v.push(src.index_of(&grp.mul(s, g)).ok_or_else(|| Error::Window("code reads outside the source window".into()))?);
        }
    }
    Ok(v)
}

fn apply_reads(c: &BlockCode, reads: &[usize], u: &[u8]) -> Vec<u8> {
    let width = c.memory().len();
    let mut buf = vec![0u8; width];
    reads
        .chunks(width)
        .map(|chunk| {
            for (b, &i) in buf.iter_mut().zip(chunk) {
                *b = u[i];
            }
            c.eval(&buf)
        })
        .collect()
}

fn check_source(c: &BlockCode, x: &SubshiftSpec) -> Result<()> {
    if c.group() != x.group() {
        return Err(Error::GroupMismatch(c.group(), x.group()));
    }
    if c.source().len() != x.alphabet().len() {
        return Err(Error::Window(format!("code `{}` expects {} source symbols", c.name(), c.source().len())));
    }
    Ok(())
}

/// L_{F_n}(J(π, ψ)) from the source language on the union-memory window.
pub fn join(pi: &BlockCode, psi: &BlockCode, x: &SubshiftSpec, n: usize, opts: &RunOptions) -> Result<JoinedSystem> {
    check_source(pi, x)?;
    check_source(psi, x)?;
    let f = x.group().folner_set(n)?.elements;
    let src = pi.memory().union(psi.memory())?.product(&f)?;
    let l = language(x, &src, opts)?;
    let (rp, rq) = (reads(pi, &src, &f)?, reads(psi, &src, &f)?);
    let set = l.words().iter().map(|u| (apply_reads(pi, &rp, u), apply_reads(psi, &rq, u))).collect();
    Ok(JoinedSystem::from_pairs(f, pi.target().len(), psi.target().len(), set))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityReport {
    pub n: usize,
    pub joined: usize,
    pub left: usize,
    pub right: usize,
    pub joined_bits: f64,
    pub sum_bits: f64,
    /// joined <= left * right.
    pub holds: bool,
}

pub fn check_joining_subadditivity(j: &JoinedSystem) -> SubadditivityReport {
    let (joined, left, right) = (j.joined_count(), j.left_count(), j.right_count());
    SubadditivityReport {
        n: j.window.len(),
        joined,
        left,
        right,
        joined_bits: j.bits(),
        sum_bits: j.left_bits() + j.right_bits(),
        holds: (joined as u128) <= (left as u128) * (right as u128),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowerReport {
    pub n: usize,
    /// Largest number of J₀-patterns (left on S F_n, right on F_n) over one J₁-pattern on F_n.
    pub max_joined_fiber: usize,
    /// Largest number of left patterns on S F_n over one image pattern on F_n.
    pub max_left_fiber: usize,
    pub joined_bits: f64,
    pub left_bits: f64,
    pub holds: bool,
}

type Fiber = HashSet<Vec<u8>>;

/// Compares the fibers of J₀ = J(π₀, ψ) → J₁ = J(c∘π₀, ψ) with those of π₀ → c∘π₀.
pub fn check_special_flower(
    pi0: &BlockCode,
    c: &BlockCode,
    psi: &BlockCode,
    x: &SubshiftSpec,
    n: usize,
    opts: &RunOptions,
) -> Result<FlowerReport> {
    check_source(pi0, x)?;
    check_source(psi, x)?;
    if c.source().len() != pi0.target().len() || c.group() != x.group() {
        return Err(Error::Precondition("the left code must act on the left coordinate of J₀".into()));
    }
    let f = x.group().folner_set(n)?.elements;
    let sf = c.memory().product(&f)?;
    let src = pi0.memory().product(&sf)?.union(&psi.memory().product(&f)?)?;
    let l = language(x, &src, opts)?;
    let (r0, rq, rc) = (reads(pi0, &src, &sf)?, reads(psi, &src, &f)?, reads(c, &sf, &f)?);
    let mut joined: HashMap<(Vec<u8>, Vec<u8>), Fiber> = HashMap::new();
    let mut left: HashMap<Vec<u8>, Fiber> = HashMap::new();
    for u in l.words() {
        let x0 = apply_reads(pi0, &r0, u);
        let y1 = apply_reads(c, &rc, &x0);
        let z = apply_reads(psi, &rq, u);
        joined.entry((y1.clone(), z)).or_default().insert(x0.clone());
        left.entry(y1).or_default().insert(x0);
    }
    let max_joined_fiber = joined.values().map(HashSet::len).max().unwrap_or(0);
    let max_left_fiber = left.values().map(HashSet::len).max().unwrap_or(0);
    Ok(FlowerReport {
        n,
        max_joined_fiber,
        max_left_fiber,
        joined_bits: bits_per_cell(max_joined_fiber as u128, f.len()),
        left_bits: bits_per_cell(max_left_fiber as u128, f.len()),
        holds: max_joined_fiber <= max_left_fiber,
    })
}

/// J(ψ_m, π) on F_n for every cascade stage m = 0..=M, with π a code on X₀.
pub fn cascade_stage_joins(
    x: &SubshiftSpec,
    params: &CascadeParams,
    stages: usize,
    n: usize,
    pi: &BlockCode,
    opts: &RunOptions,
) -> Result<Vec<JoinedSystem>> {
    check_source(pi, x)?;
    let run = super::run_cascade_data(x, params, stages, n, Some(pi), opts)?;
    let len = run.window.len();
    let (lb, rb) = (run.alphabet.extended.len() as u128, run.alphabet.extended.len() as u128);
    Ok(run
        .data
        .join
        .iter()
        .map(|set| {
            let pairs = set.iter().map(|&(l, r)| (decode(lb, l, len), decode(rb, r, len))).collect();
            JoinedSystem::from_pairs(run.window.clone(), pi.target().len(), run.alphabet.extended.len(), pairs)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupId;
    use crate::pattern::Alphabet;
    use crate::subshift::{entropy_estimate, product_alphabet};

    fn full2() -> SubshiftSpec {
        SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2))
    }

    #[test]
    fn diagonal_join_is_the_source() {
        let x = SubshiftSpec::golden_mean();
        let id = BlockCode::identity(Alphabet::numeric(2), GroupId::Z);
        let opts = RunOptions::default();
        for n in 1..=10 {
            let j = join(&id, &id, &x, n, &opts).unwrap();
            assert_eq!(j.joined_count() as u128, entropy_estimate(&x, n, &opts).unwrap().count);
            assert!(check_joining_subadditivity(&j).holds);
        }
    }

    #[test]
    fn product_join_is_exactly_multiplicative() {
        let (l, r) = (Alphabet::numeric(2), Alphabet::numeric(3));
        let x = SubshiftSpec::full_shift(GroupId::Z, product_alphabet(&l, &r));
        let p1 = BlockCode::projection(&l, &r, true, GroupId::Z);
        let p2 = BlockCode::projection(&l, &r, false, GroupId::Z);
        for n in 1..=4 {
            let rep = check_joining_subadditivity(&join(&p1, &p2, &x, n, &RunOptions::default()).unwrap());
            assert_eq!(rep.joined, rep.left * rep.right);
            assert_eq!(rep.left, 2usize.pow(n as u32));
        }
    }

    #[test]
    fn xor_flower_fibers_coincide() {
        let x = full2();
        let id = BlockCode::identity(Alphabet::numeric(2), GroupId::Z);
        let k = BlockCode::constant(Alphabet::numeric(2), Alphabet::numeric(1), GroupId::Z, 0).unwrap();
        let r = check_special_flower(&id, &BlockCode::xor(), &k, &x, 6, &RunOptions::default()).unwrap();
        assert_eq!(r.max_joined_fiber, r.max_left_fiber);
        assert_eq!(r.max_left_fiber, 2);
    }

    #[test]
    fn restriction_matches_a_direct_join() {
        let x = full2();
        let id = BlockCode::identity(Alphabet::numeric(2), GroupId::Z);
        let opts = RunOptions::default();
        let big = join(&id, &BlockCode::xor(), &x, 8, &opts).unwrap();
        let small = join(&id, &BlockCode::xor(), &x, 5, &opts).unwrap();
        assert_eq!(big.restrict(&small.window).unwrap(), small);
    }
}
