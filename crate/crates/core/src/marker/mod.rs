//! Krieger-type marker sets.
//!
//! 𝒩 lists the T-patterns without k periods from S⁻¹S. Position g carries
//! level i when `x(Tg) = w_i`, and lies in F when no position `d g`
//! (d ∈ S⁻¹S) of strictly lower level lies in F. Evaluation on a finite window
//! is three-valued: a point stays undetermined only while some neighbour that
//! could subtract it is unknown.

pub mod generic;
pub mod line;

use std::collections::HashMap;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enumerate::{decode_word, encode_word, RunOptions};
use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::pattern::{count_periods_upto, period_pairs, Pattern};
use crate::shape::{Shape, Side};
use crate::subshift::{language, LocalSearch, SubshiftSpec};

pub use line::LineMarker;

/// Largest dense level table.
const MAX_LEVEL_TABLE: u64 = 1 << 26;

/// Witness lists in reports are truncated to this many entries.
pub const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone)]
pub struct MarkerParams {
    pub s: Shape,
    pub t: Shape,
    pub k: usize,
    pub x: SubshiftSpec,
}

impl MarkerParams {
    pub fn new(s: Shape, t: Shape, k: usize, x: SubshiftSpec) -> Result<MarkerParams> {
        if s.is_empty() || t.is_empty() {
            return Err(Error::EmptyShape("marker S and T".into()));
        }
        if k == 0 || k > s.len() {
            return Err(Error::config("k", format!("need 1 <= k <= |S| = {}", s.len())));
        }
        if s.group() != x.group() || t.group() != x.group() {
            return Err(Error::GroupMismatch(s.group(), x.group()));
        }
        if !x.is_sft() {
            return Err(Error::Precondition("markers are built on SFT presentations".into()));
        }
        Ok(MarkerParams { s, t, k, x })
    }
}

/// `SkipSubtraction` drops the defining subtraction so that F is the plain union
/// of the cylinders; it exists as a negative control for the verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkerVariant {
    Standard,
    SkipSubtraction,
}

#[derive(Debug, Clone)]
pub struct MarkerConstruction {
    params: MarkerParams,
    variant: MarkerVariant,
    ss: Shape,
    neighbors: Vec<GroupPoint>,
    words: Vec<Vec<u8>>,
    level: Vec<u32>,
}

/// Level of an unlisted pattern.
pub const UNLISTED: u32 = u32::MAX;

impl MarkerConstruction {
    pub fn params(&self) -> &MarkerParams {
        &self.params
    }

    pub fn variant(&self) -> MarkerVariant {
        self.variant
    }

    pub fn with_variant(mut self, variant: MarkerVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn r(&self) -> usize {
        self.words.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.words.is_empty()
    }

    /// Listed patterns in canonical order, each in canonical T order.
    pub fn nonperiodic(&self) -> &[Vec<u8>] {
        &self.words
    }

    /// S⁻¹S.
    pub fn period_shape(&self) -> &Shape {
        &self.ss
    }

    /// S⁻¹S without the identity.
    pub fn neighbors(&self) -> &[GroupPoint] {
        &self.neighbors
    }

    pub fn alphabet_size(&self) -> usize {
        self.params.x.alphabet().len()
    }

    /// Zero-based level of a T-pattern code, or [`UNLISTED`].
    #[inline]
    pub fn level_of_code(&self, code: u64) -> u32 {
        self.level[code as usize]
    }

    pub fn level_of(&self, w: &[u8]) -> u32 {
        self.level_of_code(encode_word(w, self.alphabet_size()))
    }
}

/// Lists 𝒩 ∩ (locally admissible T-patterns) in canonical order.
pub fn build_marker(p: MarkerParams, opts: &RunOptions) -> Result<MarkerConstruction> {
    let a = p.x.alphabet().len();
    let tn = p.t.len();
    opts.guards.check_space("marker pattern space", a, tn)?;
    let space = (a as u64).checked_pow(tn as u32).filter(|&s| s <= MAX_LEVEL_TABLE).ok_or_else(|| Error::Guard {
        what: "marker level table".into(),
        needed: format!("{}^{}", a, tn),
        limit: MAX_LEVEL_TABLE as u128,
    })?;
    let ss = p.s.inverse().product(&p.s)?;
    let neighbors: Vec<GroupPoint> = ss.points().iter().filter(|g| !g.is_identity()).cloned().collect();
    let pairs = period_pairs(&p.t, &ss);
    let local = LocalSearch::new(&p.t, a, p.x.forbidden())?;
    let k = p.k;
    let found: Vec<u64> = crate::enumerate::sharded_fold(
        space as usize,
        opts.shards,
        Vec::new(),
        |acc: &mut Vec<u64>, u| {
            let mut w = vec![0u8; tn];
            decode_word(u as u64, a, &mut w);
            if local.is_admissible(&w) && count_periods_upto(&w, &pairs, k) < k {
                acc.push(u as u64);
            }
        },
        |mut x, mut y| {
            x.append(&mut y);
            x
        },
    );
    let mut codes = found;
    codes.sort_unstable();
    let mut level = vec![UNLISTED; space as usize];
    let mut words = Vec::with_capacity(codes.len());
    for (i, &c) in codes.iter().enumerate() {
        level[c as usize] = i as u32;
        let mut w = vec![0u8; tn];
        decode_word(c, a, &mut w);
        words.push(w);
    }
    Ok(MarkerConstruction { params: p, variant: MarkerVariant::Standard, ss, neighbors, words, level })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tri {
    InF,
    NotInF,
    Undetermined,
}

impl Tri {
    pub fn is_determined(self) -> bool {
        self != Tri::Undetermined
    }
}

/// Per-point level knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Level {
    Unknown,
    Unlisted,
    Listed(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerField {
    pub window: Shape,
    pub values: Vec<Tri>,
    pub levels: Vec<Level>,
}

impl MarkerField {
    pub fn get(&self, g: &GroupPoint) -> Option<Tri> {
        self.window.index_of(g).map(|i| self.values[i])
    }

    pub fn count(&self, t: Tri) -> usize {
        self.values.iter().filter(|&&v| v == t).count()
    }
}

/// Precomputed reads for evaluating many patterns on one window.
#[derive(Debug, Clone)]
pub struct FieldEvaluator<'m> {
    m: &'m MarkerConstruction,
    window: Shape,
    t_reads: Vec<Option<Vec<usize>>>,
    neigh: Vec<Vec<Option<usize>>>,
}

impl<'m> FieldEvaluator<'m> {
    pub fn new(m: &'m MarkerConstruction, window: &Shape) -> Result<FieldEvaluator<'m>> {
        let grp = window.group();
        if grp != m.params.x.group() {
            return Err(Error::GroupMismatch(grp, m.params.x.group()));
        }
        let mut t_reads = Vec::with_capacity(window.len());
        let mut neigh = Vec::with_capacity(window.len());
        for g in window.points() {
            t_reads.push(m.params.t.points().iter().map(|t| window.index_of(&grp.mul(t, g))).collect());
            neigh.push(m.neighbors.iter().map(|d| window.index_of(&grp.mul(d, g))).collect());
        }
        Ok(FieldEvaluator { m, window: window.clone(), t_reads, neigh })
    }

    pub fn window(&self) -> &Shape {
        &self.window
    }

    pub fn levels(&self, x: &[u8]) -> Vec<Level> {
        let a = self.m.alphabet_size();
        self.t_reads
            .iter()
            .map(|r| match r {
                None => Level::Unknown,
                Some(cells) => {
                    let code = cells.iter().fold(0u64, |c, &i| c * a as u64 + x[i] as u64);
                    match self.m.level_of_code(code) {
                        UNLISTED => Level::Unlisted,
                        l => Level::Listed(l),
                    }
                }
            })
            .collect()
    }

    /// Three-valued evaluation in increasing level order.
    pub fn eval(&self, x: &[u8]) -> MarkerField {
        let levels = self.levels(x);
        let n = levels.len();
        let mut values = vec![Tri::Undetermined; n];
        let mut order: Vec<(u32, usize)> = Vec::new();
        for (i, l) in levels.iter().enumerate() {
            match l {
                Level::Unlisted => values[i] = Tri::NotInF,
                Level::Listed(v) => order.push((*v, i)),
                Level::Unknown => {}
            }
        }
        order.sort_unstable();
        for &(lv, i) in &order {
            if self.m.variant == MarkerVariant::SkipSubtraction {
                values[i] = Tri::InF;
                continue;
            }
            let mut forced = false;
            let mut maybe = false;
            for h in &self.neigh[i] {
                match h {
                    None => maybe |= lv > 0,
                    Some(h) => match levels[*h] {
                        Level::Unknown => maybe |= lv > 0,
                        Level::Unlisted => {}
                        Level::Listed(lh) if lh < lv => match values[*h] {
                            Tri::InF => forced = true,
                            Tri::Undetermined => maybe = true,
                            Tri::NotInF => {}
                        },
                        Level::Listed(_) => {}
                    },
                }
            }
            values[i] = if forced {
                Tri::NotInF
            } else if maybe {
                Tri::Undetermined
            } else {
                Tri::InF
            };
        }
        MarkerField { window: self.window.clone(), values, levels }
    }
}

/// Evaluates the marker field of a finite pattern.
pub fn eval_marker_field(m: &MarkerConstruction, x: &Pattern) -> Result<MarkerField> {
    Ok(FieldEvaluator::new(m, x.shape())?.eval(x.symbols()))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DisjointnessWitness {
    pub position: GroupPoint,
    /// Elements p of S with p⁻¹g in F.
    pub shifts: Vec<GroupPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PeriodicityWitness {
    pub position: GroupPoint,
    pub pattern: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ExclusivityWitness {
    pub position: GroupPoint,
    pub level: u32,
    pub neighbor: GroupPoint,
    pub neighbor_level: u32,
}

/// Aggregated verification of the two marker conclusions and the level subtraction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MarkerVerification {
    pub windows: u64,
    pub disjoint_checked: u64,
    pub disjoint_violations: u64,
    pub periodic_checked: u64,
    pub periodic_violations: u64,
    pub exclusive_checked: u64,
    pub exclusive_violations: u64,
    pub disjoint_witnesses: Vec<DisjointnessWitness>,
    pub periodic_witnesses: Vec<PeriodicityWitness>,
    pub exclusive_witnesses: Vec<ExclusivityWitness>,
}

impl MarkerVerification {
    pub fn holds(&self) -> bool {
        self.disjoint_violations == 0 && self.periodic_violations == 0 && self.exclusive_violations == 0
    }

    pub fn merge(mut self, o: MarkerVerification) -> MarkerVerification {
        self.windows += o.windows;
        self.disjoint_checked += o.disjoint_checked;
        self.disjoint_violations += o.disjoint_violations;
        self.periodic_checked += o.periodic_checked;
        self.periodic_violations += o.periodic_violations;
        self.exclusive_checked += o.exclusive_checked;
        self.exclusive_violations += o.exclusive_violations;
        self.disjoint_witnesses.extend(o.disjoint_witnesses);
        self.periodic_witnesses.extend(o.periodic_witnesses);
        self.exclusive_witnesses.extend(o.exclusive_witnesses);
        keep_smallest(&mut self.disjoint_witnesses);
        keep_smallest(&mut self.periodic_witnesses);
        keep_smallest(&mut self.exclusive_witnesses);
        self
    }
}

/// Keeps the MAX_WITNESSES smallest witnesses, so the kept set does not depend on sharding.
fn keep_smallest<T: Ord>(v: &mut Vec<T>) {
    v.sort();
    v.dedup();
    v.truncate(MAX_WITNESSES);
}

/// Checks conclusions (1), (2) and level exclusivity on one evaluated window.
#[derive(Debug, Clone)]
pub struct FieldVerifier {
    k: usize,
    s_points: Vec<GroupPoint>,
    /// Per position: indices of p⁻¹g for p in S.
    s_reads: Vec<Option<Vec<usize>>>,
    /// Per position: indices of s⁻¹g for s in S⁻¹S.
    ss_reads: Vec<Option<Vec<usize>>>,
    neigh: Vec<Vec<Option<usize>>>,
    t_reads: Vec<Option<Vec<usize>>>,
    pairs: Vec<Vec<(usize, usize)>>,
    window: Shape,
}

impl FieldVerifier {
    pub fn new(m: &MarkerConstruction, window: &Shape) -> Result<FieldVerifier> {
        let grp = window.group();
        let p = &m.params;
        let idx = |pts: &[GroupPoint], g: &GroupPoint| -> Option<Vec<usize>> {
            pts.iter().map(|s| window.index_of(&grp.mul(&grp.inv(s), g))).collect()
        };
        let mut s_reads = Vec::new();
        let mut ss_reads = Vec::new();
        let mut neigh = Vec::new();
        let mut t_reads = Vec::new();
        for g in window.points() {
            s_reads.push(idx(p.s.points(), g));
            ss_reads.push(idx(m.ss.points(), g));
            neigh.push(m.neighbors.iter().map(|d| window.index_of(&grp.mul(d, g))).collect());
            t_reads.push(p.t.points().iter().map(|t| window.index_of(&grp.mul(t, g))).collect());
        }
        Ok(FieldVerifier {
            k: p.k,
            s_points: p.s.points().to_vec(),
            s_reads,
            ss_reads,
            neigh,
            t_reads,
            pairs: period_pairs(&p.t, &m.ss),
            window: window.clone(),
        })
    }

    pub fn verify(&self, x: &[u8], field: &MarkerField, out: &mut MarkerVerification) {
        out.windows += 1;
        let pts = self.window.points();
        for (gi, g) in pts.iter().enumerate() {
            if let Some(reads) = &self.s_reads[gi] {
                let ins: Vec<usize> = (0..reads.len()).filter(|&j| field.values[reads[j]] == Tri::InF).collect();
                if reads.iter().all(|&r| field.values[r].is_determined()) {
                    out.disjoint_checked += 1;
                }
                if ins.len() > self.k {
                    out.disjoint_violations += 1;
                    out.disjoint_witnesses.push(DisjointnessWitness {
                        position: g.clone(),
                        shifts: ins.iter().map(|&j| self.s_points[j].clone()).collect(),
                    });
                    keep_smallest(&mut out.disjoint_witnesses);
                }
            }
            if let (Some(reads), Some(cells)) = (&self.ss_reads[gi], &self.t_reads[gi]) {
                if reads.iter().all(|&r| field.values[r] == Tri::NotInF) {
                    out.periodic_checked += 1;
                    let w: Vec<u8> = cells.iter().map(|&c| x[c]).collect();
                    if count_periods_upto(&w, &self.pairs, self.k) < self.k {
                        out.periodic_violations += 1;
                        out.periodic_witnesses.push(PeriodicityWitness { position: g.clone(), pattern: w });
                        keep_smallest(&mut out.periodic_witnesses);
                    }
                }
            }
            if let (Tri::InF, Level::Listed(lv)) = (field.values[gi], field.levels[gi]) {
                out.exclusive_checked += 1;
                for h in self.neigh[gi].iter().flatten() {
                    if let Level::Listed(lh) = field.levels[*h] {
                        if lh < lv && field.values[*h] == Tri::InF {
                            out.exclusive_violations += 1;
                            out.exclusive_witnesses.push(ExclusivityWitness {
                                position: g.clone(),
                                level: lv,
                                neighbor: pts[*h].clone(),
                                neighbor_level: lh,
                            });
                            keep_smallest(&mut out.exclusive_witnesses);
                        }
                    }
                }
            }
        }
    }
}

/// Conclusion (1) on one window.
pub fn verify_marker_disjointness(m: &MarkerConstruction, x: &Pattern) -> Result<MarkerVerification> {
    let field = eval_marker_field(m, x)?;
    let mut out = MarkerVerification::default();
    FieldVerifier::new(m, x.shape())?.verify(x.symbols(), &field, &mut out);
    out.periodic_checked = 0;
    out.periodic_violations = 0;
    out.periodic_witnesses.clear();
    Ok(out)
}

/// Conclusion (2) on one window.
pub fn verify_marker_periodicity(m: &MarkerConstruction, x: &Pattern) -> Result<MarkerVerification> {
    let field = eval_marker_field(m, x)?;
    let mut out = MarkerVerification::default();
    FieldVerifier::new(m, x.shape())?.verify(x.symbols(), &field, &mut out);
    out.disjoint_checked = 0;
    out.disjoint_violations = 0;
    out.disjoint_witnesses.clear();
    Ok(out)
}

/// Runs every check on every pattern of L_W(X).
pub fn verify_marker_language(m: &MarkerConstruction, w: &Shape, opts: &RunOptions) -> Result<MarkerVerification> {
    let lang = language(&m.params.x, w, opts)?;
    let ev = FieldEvaluator::new(m, w)?;
    let ver = FieldVerifier::new(m, w)?;
    let words = lang.words();
    Ok(crate::enumerate::sharded_fold(
        words.len(),
        opts.shards,
        MarkerVerification::default(),
        |acc, u| {
            let f = ev.eval(&words[u]);
            ver.verify(&words[u], &f, acc);
        },
        MarkerVerification::merge,
    ))
}

/// Runs every check on `count` seeded random locally admissible patterns on W.
pub fn verify_marker_sampled(
    m: &MarkerConstruction,
    w: &Shape,
    count: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<MarkerVerification> {
    let a = m.alphabet_size();
    let local = LocalSearch::new(w, a, m.params.x.forbidden())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    let mut tries = 0usize;
    while samples.len() < count {
        tries += 1;
        if tries > count.saturating_mul(1000).max(1000) {
            return Err(Error::Domain("rejection sampling found too few admissible windows".into()));
        }
        let x: Vec<u8> = (0..w.len()).map(|_| rng.gen_range(0..a as u8)).collect();
        if local.is_admissible(&x) {
            samples.push(x);
        }
    }
    let ev = FieldEvaluator::new(m, w)?;
    let ver = FieldVerifier::new(m, w)?;
    Ok(crate::enumerate::sharded_fold(
        samples.len(),
        opts.shards,
        MarkerVerification::default(),
        |acc, u| {
            let f = ev.eval(&samples[u]);
            ver.verify(&samples[u], &f, acc);
        },
        MarkerVerification::merge,
    ))
}

/// How a fully resolved window evaluation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    /// Boundary summaries of left and right contexts (Z only).
    BoundarySummary { left_context: usize, right_context: usize },
    /// Enumeration of T (N ∪ {e})^r P for the first r resolving every window.
    Inflation { rounds: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub n: usize,
    pub window_size: usize,
    pub max_in: usize,
    pub density: String,
    pub density_value: f64,
    pub resolution: Resolution,
}

/// D_n(F): the largest number of F-positions in F_n over all points, divided by |F_n|.
pub fn density_of_f(m: &MarkerConstruction, n: usize, opts: &RunOptions) -> Result<DensityReport> {
    let grp = m.params.x.group();
    let f = grp.folner_set(n)?.elements;
    let (max_in, resolution) = if grp.is_z() {
        let lm = LineMarker::new(m, opts)?;
        let (max_in, res) = lm.max_in_count(n, opts)?;
        (max_in, res)
    } else {
        let (sets, rounds) = generic::resolve_window(m, &f, opts)?;
        (sets.iter().map(|(_, b)| b.iter().filter(|&&v| v).count()).max().unwrap_or(0), Resolution::Inflation { rounds })
    };
    let d = Ratio::new(max_in as i64, f.len() as i64);
    Ok(DensityReport {
        n,
        window_size: f.len(),
        max_in,
        density: d.to_string(),
        density_value: d.to_f64().unwrap_or(f64::NAN),
        resolution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityLemmaReport {
    pub density: DensityReport,
    pub m: usize,
    pub k: usize,
    pub delta: String,
    /// (k+1)(1+δ)/((1-δ)m) + δ.
    pub bound: String,
    pub bound_value: f64,
    pub margin: f64,
    pub holds: bool,
    /// Marker conclusion (1) verified on the language of the tile window.
    pub precondition_verified: bool,
}

/// Compares D_n(F) with the density bound for tiles of minimum size m.
pub fn check_density_lemma(
    m: &MarkerConstruction,
    tiles: &[Shape],
    delta: Ratio<i64>,
    n: usize,
    opts: &RunOptions,
) -> Result<DensityLemmaReport> {
    let min = tiles.iter().map(Shape::len).min().ok_or_else(|| Error::config("tiles", "need at least one tile"))?;
    let k = m.params.k;
    let bound = Ratio::from_integer((k + 1) as i64) * (Ratio::one() + delta)
        / ((Ratio::one() - delta) * Ratio::from_integer(min as i64))
        + delta;
    let check_win = m.params.t.product(&m.ss)?.product(&m.ss)?;
    let pre = verify_marker_language(m, &check_win, opts)?;
    if pre.disjoint_violations > 0 {
        return Err(Error::Precondition(format!(
            "marker is not (S,k+1)-disjoint: {} violations",
            pre.disjoint_violations
        )));
    }
    let density = density_of_f(m, n, opts)?;
    let observed = Ratio::new(density.max_in as i64, density.window_size as i64);
    let bound_value = bound.to_f64().unwrap_or(f64::NAN);
    Ok(DensityLemmaReport {
        margin: bound_value - density.density_value,
        holds: observed <= bound,
        density,
        m: min,
        k,
        delta: delta.to_string(),
        bound: bound.to_string(),
        bound_value,
        precondition_verified: true,
    })
}

/// Summary for dumps: counts and the first few listed patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkerSummary {
    pub r: usize,
    pub nonperiodic_count: usize,
    pub trivial: bool,
    pub sample_members: Vec<String>,
}

pub fn marker_summary(m: &MarkerConstruction, samples: usize) -> MarkerSummary {
    let alpha = m.params.x.alphabet();
    let t = &m.params.t;
    let sample_members = m
        .words
        .iter()
        .take(samples)
        .map(|w| match crate::subshift::z_layout(t) {
            Some((_, perm)) => alpha.render(&crate::subshift::canonical_to_ltr(&perm, w)),
            None => alpha.render(w),
        })
        .collect();
    MarkerSummary { r: m.r(), nonperiodic_count: m.r(), trivial: m.is_trivial(), sample_members }
}

/// Positions of σ^s F at g, i.e. s⁻¹g, for each s in `shifts`.
pub fn shifted_positions(shifts: &Shape, g: &GroupPoint) -> Result<Shape> {
    shifts.inverse().translate(g, Side::Right)
}

/// Level of each listed pattern keyed by its left-to-right reading, for Z dumps.
pub fn z_levels(m: &MarkerConstruction) -> Option<HashMap<Vec<u8>, u32>> {
    let (_, perm) = crate::subshift::z_layout(&m.params.t)?;
    Some(
        m.words
            .iter()
            .enumerate()
            .map(|(i, w)| (crate::subshift::canonical_to_ltr(&perm, w), i as u32))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupId;
    use crate::pattern::Alphabet;

    fn full2() -> SubshiftSpec {
        SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2))
    }

    fn cand2(x: SubshiftSpec) -> MarkerConstruction {
        let p = MarkerParams::new(Shape::interval(0, 3), Shape::interval(0, 8), 2, x).unwrap();
        build_marker(p, &RunOptions::default()).unwrap()
    }

    #[test]
    fn k_one_gives_empty_marker() {
        let p = MarkerParams::new(Shape::interval(0, 3), Shape::interval(0, 6), 1, full2()).unwrap();
        assert!(build_marker(p, &RunOptions::default()).unwrap().is_trivial());
    }

    #[test]
    fn listed_patterns_lack_small_periods() {
        let m = cand2(full2());
        let lv = z_levels(&m).unwrap();
        assert!(lv.contains_key(&vec![0, 0, 0, 1, 0, 1, 1, 1]));
        assert!(!lv.contains_key(&vec![0, 1, 0, 1, 0, 1, 0, 1]));
        let words: Vec<&Vec<u8>> = m.nonperiodic().iter().collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
    }

    #[test]
    fn constant_configuration_is_outside_f() {
        let m = cand2(full2());
        let x = Pattern::z_word(&[0; 20]);
        let f = eval_marker_field(&m, &x).unwrap();
        assert!(f.values.iter().all(|&v| v != Tri::InF));
        assert!(f.count(Tri::NotInF) > 0);
    }

    #[test]
    fn first_level_is_always_in() {
        let m = cand2(full2());
        let w1 = m.nonperiodic()[0].clone();
        let x = Pattern::new(Shape::interval(0, 8), w1).unwrap();
        let f = eval_marker_field(&m, &x).unwrap();
        assert_eq!(f.get(&GroupPoint::z(0)), Some(Tri::InF));
    }

    #[test]
    fn golden_mean_windows_verify() {
        let m = cand2(SubshiftSpec::golden_mean());
        let v = verify_marker_language(&m, &Shape::interval(0, 14), &RunOptions::default()).unwrap();
        assert!(v.holds(), "{v:?}");
        assert_eq!(v.windows, 987);
    }

    #[test]
    fn skipping_the_subtraction_breaks_disjointness() {
        let m = cand2(full2()).with_variant(MarkerVariant::SkipSubtraction);
        let v = verify_marker_language(&m, &Shape::interval(0, 14), &RunOptions::default()).unwrap();
        assert!(v.disjoint_violations > 0);
        assert!(!v.disjoint_witnesses.is_empty());
    }

    #[test]
    fn sampled_full_shift_windows_verify() {
        let m = cand2(full2());
        let v = verify_marker_sampled(&m, &Shape::interval(0, 30), 200, 7, &RunOptions::default()).unwrap();
        assert!(v.holds());
        assert_eq!(v.windows, 200);
    }
}
