//! Subshift specifications, window languages and entropy estimators.

pub mod code;
pub mod line;
pub mod local;

use std::collections::HashMap;

use serde::Serialize;

use crate::enumerate::RunOptions;
use crate::error::{Error, Result};
use crate::group::GroupId;
use crate::pattern::{Alphabet, Pattern};
use crate::shape::Shape;

pub use code::{apply_code, product_alphabet, push_language, BlockCode, CodeReader, Totality};
pub use line::LineSft;
pub use local::LocalSearch;

/// Finite-n slack for asymptotic inequalities, in bits.
pub const ASYMPTOTIC_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone)]
pub enum Provenance {
    Sft,
    /// Image of `source` under the codes applied in order.
    Image { source: Box<SubshiftSpec>, codes: Vec<BlockCode> },
}

#[derive(Debug, Clone)]
pub struct SubshiftSpec {
    group: GroupId,
    alphabet: Alphabet,
    forbidden: Vec<Pattern>,
    provenance: Provenance,
}

impl SubshiftSpec {
    pub fn sft(group: GroupId, alphabet: Alphabet, forbidden: Vec<Pattern>) -> Result<SubshiftSpec> {
        for (i, f) in forbidden.iter().enumerate() {
            if f.shape().is_empty() {
                return Err(Error::config(format!("forbidden[{i}].shape"), "must be non-empty"));
            }
            if f.shape().group() != group {
                return Err(Error::config(
                    format!("forbidden[{i}].shape"),
                    format!("points belong to {} but the subshift lives on {}", f.shape().group(), group),
                ));
            }
            if f.symbols().iter().any(|&s| s as usize >= alphabet.len()) {
                return Err(Error::config(format!("forbidden[{i}].symbols"), "symbol outside the alphabet"));
            }
        }
        Ok(SubshiftSpec { group, alphabet, forbidden, provenance: Provenance::Sft })
    }

    pub fn full_shift(group: GroupId, alphabet: Alphabet) -> SubshiftSpec {
        SubshiftSpec { group, alphabet, forbidden: Vec::new(), provenance: Provenance::Sft }
    }

    /// Binary sequences without two adjacent ones.
    pub fn golden_mean() -> SubshiftSpec {
        SubshiftSpec::sft(GroupId::Z, Alphabet::numeric(2), vec![Pattern::z_word(&[1, 1])]).expect("valid")
    }

    pub fn image(source: SubshiftSpec, codes: Vec<BlockCode>) -> Result<SubshiftSpec> {
        let mut alphabet = source.alphabet.clone();
        for c in &codes {
            if c.source().len() != alphabet.len() {
                return Err(Error::Window(format!("code {} expects {} symbols", c.name(), c.source().len())));
            }
            if c.group() != source.group {
                return Err(Error::GroupMismatch(c.group(), source.group));
            }
            alphabet = c.target().clone();
        }
        let (base, chain) = match source.provenance {
            Provenance::Sft => (source, codes),
            Provenance::Image { source: inner, codes: mut prior } => {
                prior.extend(codes);
                (*inner, prior)
            }
        };
        Ok(SubshiftSpec {
            group: base.group,
            alphabet,
            forbidden: Vec::new(),
            provenance: Provenance::Image { source: Box::new(base), codes: chain },
        })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_sft(&self) -> bool {
        matches!(self.provenance, Provenance::Sft)
    }

    /// The exact automaton of a Z-SFT.
    pub fn line_sft(&self, opts: &RunOptions) -> Result<LineSft> {
        if !self.group.is_z() || !self.is_sft() {
            return Err(Error::Precondition("exact line languages need an SFT on Z".into()));
        }
        LineSft::new(self.alphabet.len(), &self.forbidden, &opts.guards)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    LocallyAdmissibleSuperset,
}

impl Exactness {
    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }

    pub fn and(self, other: Exactness) -> Exactness {
        if self.is_exact() && other.is_exact() {
            Exactness::Exact
        } else {
            Exactness::LocallyAdmissibleSuperset
        }
    }
}

/// The set of patterns on one window, each listed in canonical window order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowLanguage {
    window: Shape,
    alphabet_size: usize,
    words: Vec<Vec<u8>>,
    exactness: Exactness,
}

impl WindowLanguage {
    pub fn from_words(window: Shape, alphabet_size: usize, mut words: Vec<Vec<u8>>, exactness: Exactness) -> Self {
        words.sort_unstable();
        words.dedup();
        WindowLanguage { window, alphabet_size, words, exactness }
    }

    pub fn window(&self) -> &Shape {
        &self.window
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.words.binary_search_by(|x| x.as_slice().cmp(w)).is_ok()
    }

    pub fn patterns(&self) -> impl Iterator<Item = Pattern> + '_ {
        self.words.iter().map(|w| Pattern::new(self.window.clone(), w.clone()).expect("window sized"))
    }

    pub fn restrict(&self, sub: &Shape) -> Result<WindowLanguage> {
        let idx = sub
            .points()
            .iter()
            .map(|p| self.window.index_of(p).ok_or_else(|| Error::Window(format!("point {p} outside the window"))))
            .collect::<Result<Vec<usize>>>()?;
        let words = self.words.iter().map(|w| idx.iter().map(|&i| w[i]).collect()).collect();
        Ok(WindowLanguage::from_words(sub.clone(), self.alphabet_size, words, self.exactness))
    }

    /// log2(count) / |window|.
    pub fn bits(&self) -> f64 {
        bits_per_cell(self.len() as u128, self.window.len())
    }
}

pub fn bits_per_cell(count: u128, cells: usize) -> f64 {
    if count == 0 || cells == 0 {
        0.0
    } else {
        (count as f64).log2() / cells as f64
    }
}

/// For an interval of Z, `perm[i]` is the left-to-right offset of the i-th canonical point.
pub fn z_layout(window: &Shape) -> Option<(i64, Vec<usize>)> {
    let (lo, _) = window.z_bounds()?;
    if !window.is_z_interval() {
        return None;
    }
    Some((lo, window.points().iter().map(|p| (p.coords()[0] - lo) as usize).collect()))
}

pub fn ltr_to_canonical(perm: &[usize], ltr: &[u8]) -> Vec<u8> {
    perm.iter().map(|&o| ltr[o]).collect()
}

pub fn canonical_to_ltr(perm: &[usize], canon: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; canon.len()];
    for (&o, &s) in perm.iter().zip(canon) {
        out[o] = s;
    }
    out
}

/// True iff x agrees with w along `T g`, i.e. the shifted point lies in the cylinder [w].
pub fn in_cylinder(x: &Pattern, w: &Pattern, g: &crate::group::GroupPoint) -> bool {
    Pattern::read_translate(x, w.shape(), g).is_some_and(|p| p.symbols() == w.symbols())
}

/// Window the chain of codes needs on its source to produce `w`.
pub fn source_window(codes: &[BlockCode], w: &Shape) -> Result<Shape> {
    let mut win = w.clone();
    for c in codes.iter().rev() {
        win = c.memory().product(&win)?;
    }
    Ok(win)
}

/// L_W(X). Exact on Z, a locally admissible superset on other groups.
pub fn language(x: &SubshiftSpec, w: &Shape, opts: &RunOptions) -> Result<WindowLanguage> {
    if w.group() != x.group() {
        return Err(Error::GroupMismatch(w.group(), x.group()));
    }
    match x.provenance() {
        Provenance::Sft => sft_language(x, w, opts),
        Provenance::Image { source, codes } => {
            let src = source_window(codes, w)?;
            let mut l = sft_language(source, &src, opts)?;
            for c in codes {
                l = push_language(&l, c)?;
            }
            l.restrict(w)
        }
    }
}

fn sft_language(x: &SubshiftSpec, w: &Shape, opts: &RunOptions) -> Result<WindowLanguage> {
    let a = x.alphabet().len();
    if x.group().is_z() && !w.is_empty() {
        let (lo, hi) = w.z_bounds().expect("non-empty");
        let hull = Shape::interval(lo, hi + 1);
        let sft = x.line_sft(opts)?;
        let len = hull.len();
        opts.guards.check_count("window language", sft.count(len)? as f64)?;
        let (_, perm) = z_layout(&hull).expect("interval");
        let words = sft.fold_words(
            len,
            opts.shards,
            Vec::new(),
            |acc: &mut Vec<Vec<u8>>, ltr| acc.push(ltr_to_canonical(&perm, ltr)),
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        let l = WindowLanguage::from_words(hull.clone(), a, words, Exactness::Exact);
        return if hull == *w { Ok(l) } else { l.restrict(w) };
    }
    opts.guards.check_space("window language", a, w.len())?;
    let search = LocalSearch::new(w, a, x.forbidden())?;
    let plan = search.plan(&vec![false; w.len()]);
    let words = search.fold(
        &plan,
        &vec![0u8; w.len()],
        opts.shards,
        Vec::new(),
        |acc: &mut Vec<Vec<u8>>, word| acc.push(word.to_vec()),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    let exactness = if x.forbidden().is_empty() { Exactness::Exact } else { Exactness::LocallyAdmissibleSuperset };
    Ok(WindowLanguage::from_words(w.clone(), a, words, exactness))
}

/// |L_W(X)|, by dynamic programming where possible.
pub fn language_count(x: &SubshiftSpec, w: &Shape, opts: &RunOptions) -> Result<(u128, Exactness)> {
    if x.is_sft() && x.group().is_z() && w.is_z_interval() {
        return Ok((x.line_sft(opts)?.count(w.len())?, Exactness::Exact));
    }
    if x.is_sft() && x.forbidden().is_empty() {
        let a = x.alphabet().len() as u128;
        let count = a.checked_pow(w.len() as u32).ok_or_else(|| Error::Domain("count overflows u128".into()))?;
        return Ok((count, Exactness::Exact));
    }
    let l = language(x, w, opts)?;
    Ok((l.len() as u128, l.exactness()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub n: usize,
    pub window_size: usize,
    pub count: u128,
    pub bits: f64,
    pub exact: bool,
}

/// log2 |L_{F_n}(X)| / |F_n|.
pub fn entropy_estimate(x: &SubshiftSpec, n: usize, opts: &RunOptions) -> Result<EntropyEstimate> {
    let f = x.group().folner_set(n)?.elements;
    let (count, ex) = language_count(x, &f, opts)?;
    Ok(EntropyEstimate { n, window_size: f.len(), count, bits: bits_per_cell(count, f.len()), exact: ex.is_exact() })
}

/// log2 of the Perron eigenvalue of the essential follower graph.
pub fn entropy_exact_z(x: &SubshiftSpec, opts: &RunOptions) -> Result<f64> {
    if !x.group().is_z() {
        return Err(Error::Precondition(format!("exact entropy needs Z, got {}", x.group())));
    }
    let lambda = x.line_sft(opts)?.perron_eigenvalue()?;
    Ok(if lambda <= 0.0 { 0.0 } else { lambda.log2() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalEstimate {
    pub n: usize,
    pub window_size: usize,
    pub image_count: usize,
    pub max_fiber: usize,
    pub bits: f64,
}

/// Largest fiber size over image words, grouped from an enumerated source language.
pub fn fiber_sizes(source: &WindowLanguage, c: &BlockCode, w: &Shape) -> Result<HashMap<Vec<u8>, usize>> {
    let reader = c.reader(source.window())?;
    let out_win = reader.output_window().clone();
    let idx = w
        .points()
        .iter()
        .map(|p| out_win.index_of(p).ok_or_else(|| Error::Window(format!("point {p} not produced by the code"))))
        .collect::<Result<Vec<usize>>>()?;
    let mut fibers: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut out = Vec::new();
    for u in source.words() {
        reader.apply(c, u, &mut out);
        let key: Vec<u8> = idx.iter().map(|&i| out[i]).collect();
        *fibers.entry(key).or_default() += 1;
    }
    Ok(fibers)
}

/// max_w log2 |{u in L_{S F_n}(X) : c(u) = w}| / |F_n|.
pub fn conditional_entropy_estimate(
    c: &BlockCode,
    x: &SubshiftSpec,
    n: usize,
    opts: &RunOptions,
) -> Result<ConditionalEstimate> {
    let f = x.group().folner_set(n)?.elements;
    let src = c.memory().product(&f)?;
    let l = language(x, &src, opts)?;
    let fibers = fiber_sizes(&l, c, &f)?;
    let max_fiber = fibers.values().copied().max().unwrap_or(0);
    Ok(ConditionalEstimate {
        n,
        window_size: f.len(),
        image_count: fibers.len(),
        max_fiber,
        bits: bits_per_cell(max_fiber as u128, f.len()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BowenReport {
    pub n: usize,
    pub h_source: f64,
    pub h_image: f64,
    pub h_conditional: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl BowenReport {
    pub fn from_values(n: usize, h_source: f64, h_image: f64, h_conditional: f64) -> BowenReport {
        let holds = h_source <= h_image + h_conditional + ASYMPTOTIC_TOLERANCE;
        BowenReport { n, h_source, h_image, h_conditional, tolerance: ASYMPTOTIC_TOLERANCE, holds }
    }
}

/// ĥ(X) <= ĥ(c X) + ĥ(X | c X) + tolerance at index n.
pub fn check_bowen_inequality(c: &BlockCode, x: &SubshiftSpec, n: usize, opts: &RunOptions) -> Result<BowenReport> {
    let h_source = entropy_estimate(x, n, opts)?.bits;
    let f = x.group().folner_set(n)?.elements;
    let src = c.memory().product(&f)?;
    let l = language(x, &src, opts)?;
    let fibers = fiber_sizes(&l, c, &f)?;
    let h_image = bits_per_cell(fibers.len() as u128, f.len());
    let max_fiber = fibers.values().copied().max().unwrap_or(0);
    let h_cond = bits_per_cell(max_fiber as u128, f.len());
    Ok(BowenReport::from_values(n, h_source, h_image, h_cond))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Alphabet;

    fn opts() -> RunOptions {
        RunOptions::default()
    }

    #[test]
    fn golden_mean_window_counts() {
        let x = SubshiftSpec::golden_mean();
        assert_eq!(language(&x, &Shape::interval(0, 4), &opts()).unwrap().len(), 8);
        assert_eq!(language(&x, &Shape::interval(0, 10), &opts()).unwrap().len(), 144);
        assert_eq!(language_count(&x, &Shape::interval(0, 10), &opts()).unwrap().0, 144);
    }

    #[test]
    fn full_shift_pair_window() {
        let x = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
        let l = language(&x, &Shape::interval(0, 2), &opts()).unwrap();
        assert_eq!(l.len(), 4);
        assert!(l.exactness().is_exact());
    }

    #[test]
    fn non_interval_windows_restrict_the_hull() {
        let x = SubshiftSpec::golden_mean();
        let l = language(&x, &Shape::from_ints(&[0, 2]), &opts()).unwrap();
        assert_eq!(l.len(), 4);
    }

    #[test]
    fn entropy_values() {
        let x = SubshiftSpec::golden_mean();
        let e = entropy_estimate(&x, 10, &opts()).unwrap();
        assert_eq!(e.count, 144);
        assert!((e.bits - 144f64.log2() / 10.0).abs() < 1e-15);
        let h = entropy_exact_z(&x, &opts()).unwrap();
        assert!((h - ((1.0 + 5f64.sqrt()) / 2.0).log2()).abs() < 1e-12);
        let one = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(1));
        assert_eq!(entropy_estimate(&one, 7, &opts()).unwrap().bits, 0.0);
        assert_eq!(entropy_exact_z(&one, &opts()).unwrap(), 0.0);
    }

    #[test]
    fn xor_push_is_surjective() {
        let x = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
        let l = language(&x, &Shape::interval(0, 5), &opts()).unwrap();
        let img = push_language(&l, &BlockCode::xor()).unwrap();
        assert_eq!(img.len(), 16);
        assert_eq!(img.window(), &Shape::interval(0, 4));
    }

    #[test]
    fn image_language_matches_push() {
        let x = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
        let y = SubshiftSpec::image(x, vec![BlockCode::xor()]).unwrap();
        assert_eq!(language(&y, &Shape::interval(0, 6), &opts()).unwrap().len(), 64);
    }

    #[test]
    fn conditional_estimates() {
        let two = Alphabet::numeric(2);
        let x = SubshiftSpec::full_shift(GroupId::Z, two.clone());
        let id = BlockCode::identity(two.clone(), GroupId::Z);
        assert_eq!(conditional_entropy_estimate(&id, &x, 5, &opts()).unwrap().bits, 0.0);
        let c = BlockCode::constant(two.clone(), two.clone(), GroupId::Z, 0).unwrap();
        assert_eq!(conditional_entropy_estimate(&c, &x, 4, &opts()).unwrap().bits, 1.0);
        let prod = SubshiftSpec::full_shift(GroupId::Z, code::product_alphabet(&two, &two));
        let p1 = BlockCode::projection(&two, &two, true, GroupId::Z);
        assert_eq!(conditional_entropy_estimate(&p1, &prod, 6, &opts()).unwrap().bits, 1.0);
        let b = check_bowen_inequality(&p1, &prod, 6, &opts()).unwrap();
        assert_eq!((b.h_source, b.h_image, b.h_conditional), (2.0, 1.0, 1.0));
        assert!(b.holds);
    }

    #[test]
    fn two_dimensional_languages_are_supersets() {
        let z2 = GroupId::zd(2).unwrap();
        let h = Pattern::new(Shape::from_tuples(z2, &[vec![0, 0], vec![1, 0]]).unwrap(), vec![1, 1]).unwrap();
        let x = SubshiftSpec::sft(z2, Alphabet::numeric(2), vec![h]).unwrap();
        let l = language(&x, &Shape::cuboid(z2, &[2, 2]).unwrap(), &opts()).unwrap();
        assert_eq!(l.len(), 9);
        assert_eq!(l.exactness(), Exactness::LocallyAdmissibleSuperset);
    }
}
