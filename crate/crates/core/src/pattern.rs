//! Alphabets, patterns, periods, periodic-pattern counts and the binomial tail bound.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::{fold_all_words, RunOptions};
use crate::error::{Error, Result};
use crate::group::GroupPoint;
use crate::shape::{Shape, Side};

/// Ordered list of distinct symbol tokens. Symbols are referred to by index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Alphabet> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::config("alphabet", "needs at least one symbol"));
        }
        if symbols.len() > 250 {
            return Err(Error::config("alphabet", "at most 250 symbols are supported"));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::config("alphabet", "symbols must be non-empty"));
            }
            if symbols[..i].contains(s) {
                return Err(Error::config("alphabet", format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The alphabet {0, 1, ..., n-1} with decimal tokens.
    pub fn numeric(n: usize) -> Alphabet {
        Alphabet::new((0..n).map(|i| i.to_string())).expect("valid numeric alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: u8) -> &str {
        &self.symbols[i as usize]
    }

    pub fn index_of(&self, token: &str) -> Option<u8> {
        self.symbols.iter().position(|s| s == token).map(|i| i as u8)
    }

    /// Appends one fresh token per entry of `preferred`, renaming on collision.
    /// Returns the new alphabet and the indices of the added tokens.
    pub fn extended(&self, preferred: &[&str]) -> (Alphabet, Vec<u8>) {
        let mut symbols = self.symbols.clone();
        let mut added = Vec::new();
        for p in preferred {
            let mut tok = p.to_string();
            let mut i = 1;
            while symbols.contains(&tok) {
                tok = format!("{p}{i}");
                i += 1;
            }
            added.push(symbols.len() as u8);
            symbols.push(tok);
        }
        (Alphabet { symbols }, added)
    }

    /// Renders a word as tokens, concatenated when every token is one character.
    pub fn render(&self, w: &[u8]) -> String {
        let short = self.symbols.iter().all(|s| s.chars().count() == 1);
        let toks: Vec<&str> = w.iter().map(|&i| self.symbol(i)).collect();
        if short {
            toks.concat()
        } else {
            toks.join(" ")
        }
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Alphabet> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Vec<String> {
        a.symbols
    }
}

/// A total assignment of symbol indices to a shape, listed in canonical shape order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    shape: Shape,
    symbols: Vec<u8>,
}

impl Pattern {
    pub fn new(shape: Shape, symbols: Vec<u8>) -> Result<Pattern> {
        if shape.len() != symbols.len() {
            return Err(Error::Window(format!(
                "pattern has {} symbols for a shape of {} points",
                symbols.len(),
                shape.len()
            )));
        }
        Ok(Pattern { shape, symbols })
    }

    /// A word on the interval [0, len) of Z.
    pub fn z_word(symbols: &[u8]) -> Pattern {
        Pattern { shape: Shape::interval(0, symbols.len() as i64), symbols: z_to_canonical(symbols) }
    }

    /// A word on [lo, lo + len) of Z, given left to right.
    pub fn z_word_at(lo: i64, symbols: &[u8]) -> Pattern {
        let shape = Shape::interval(lo, lo + symbols.len() as i64);
        let mut out = vec![0u8; symbols.len()];
        for (i, p) in shape.points().iter().enumerate() {
            out[i] = symbols[(p.coords()[0] - lo) as usize];
        }
        Pattern { shape, symbols: out }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn get(&self, p: &GroupPoint) -> Option<u8> {
        self.shape.index_of(p).map(|i| self.symbols[i])
    }

    /// Left-to-right reading of a pattern on Z.
    pub fn z_symbols(&self) -> Option<Vec<u8>> {
        let (lo, _) = self.shape.z_bounds()?;
        if !self.shape.is_z_interval() {
            return None;
        }
        let mut out = vec![0u8; self.symbols.len()];
        for (p, &s) in self.shape.points().iter().zip(&self.symbols) {
            out[(p.coords()[0] - lo) as usize] = s;
        }
        Some(out)
    }

    pub fn restrict(&self, sub: &Shape) -> Result<Pattern> {
        let symbols = sub
            .points()
            .iter()
            .map(|p| self.get(p).ok_or_else(|| Error::Window(format!("point {p} outside pattern shape"))))
            .collect::<Result<Vec<u8>>>()?;
        Pattern::new(sub.clone(), symbols)
    }

    /// The pattern read off `x` along `T g`, indexed by T: `w(t) = x(t g)`.
    pub fn read_translate(x: &Pattern, t: &Shape, g: &GroupPoint) -> Option<Pattern> {
        let grp = t.group();
        let symbols = t.points().iter().map(|s| x.get(&grp.mul(s, g))).collect::<Option<Vec<u8>>>()?;
        Some(Pattern { shape: t.clone(), symbols })
    }
}

// maps a left-to-right word on [0,len) to canonical (norm-then-lex) order
fn z_to_canonical(w: &[u8]) -> Vec<u8> {
    let shape = Shape::interval(0, w.len() as i64);
    shape.points().iter().map(|p| w[p.coords()[0] as usize]).collect()
}

/// k distinct periods drawn from a candidate shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodSet {
    pub elements: Vec<GroupPoint>,
}

/// True iff w(g) = w(gs) whenever g and gs both lie in the shape of w.
pub fn is_period(w: &Pattern, s: &GroupPoint) -> bool {
    let grp = w.shape.group();
    w.shape.points().iter().zip(&w.symbols).all(|(g, &a)| match w.get(&grp.mul(g, s)) {
        Some(b) => a == b,
        None => true,
    })
}

/// The first k periods of w from S in canonical order, if w has that many.
pub fn has_k_periods(w: &Pattern, s: &Shape, k: usize) -> Option<PeriodSet> {
    if k == 0 {
        return Some(PeriodSet { elements: Vec::new() });
    }
    let mut elements = Vec::with_capacity(k);
    for p in s.points() {
        if is_period(w, p) {
            elements.push(p.clone());
            if elements.len() == k {
                return Some(PeriodSet { elements });
            }
        }
    }
    None
}

/// Index pairs (i, j) with T[i]·s = T[j] for each s in S, in S's canonical order.
pub(crate) fn period_pairs(t: &Shape, s: &Shape) -> Vec<Vec<(usize, usize)>> {
    let grp = t.group();
    s.points()
        .iter()
        .map(|sp| {
            t.points()
                .iter()
                .enumerate()
                .filter_map(|(i, g)| t.index_of(&grp.mul(g, sp)).map(|j| (i, j)))
                .collect()
        })
        .collect()
}

/// Counts periods from the precomputed pair lists, stopping once `k` are found.
pub(crate) fn count_periods_upto(w: &[u8], pairs: &[Vec<(usize, usize)>], k: usize) -> usize {
    let mut found = 0;
    for ps in pairs {
        if ps.iter().all(|&(i, j)| w[i] == w[j]) {
            found += 1;
            if found >= k {
                break;
            }
        }
    }
    found
}

/// Result of an exhaustive count of patterns with k periods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KPeriodicCount {
    pub alphabet_size: usize,
    pub shape_size: usize,
    pub candidates: usize,
    pub k: usize,
    pub count: u64,
    /// |A|^(2|T|/k) as a base-2 logarithm, for display.
    pub bound_log2: f64,
    /// count <= |A|^(2|T|/k), decided exactly as count^k <= |A|^(2|T|).
    pub within_bound: bool,
    /// Whether k log_|A| |S| < |T|/(2k) and |T Δ Ts| < |T|/(2k²) for all s in S.
    pub hypotheses: bool,
}

/// Exhaustively counts the patterns in A^T having k periods from S.
pub fn count_k_periodic(
    alphabet_size: usize,
    t: &Shape,
    s: &Shape,
    k: usize,
    opts: &RunOptions,
) -> Result<KPeriodicCount> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    if t.is_empty() {
        return Err(Error::EmptyShape("T".into()));
    }
    if t.group() != s.group() {
        return Err(Error::GroupMismatch(t.group(), s.group()));
    }
    opts.guards.check_space("periodic-pattern count", alphabet_size, t.len())?;
    let pairs = period_pairs(t, s);
    let count = if k > s.len() {
        0
    } else {
        fold_all_words(
            alphabet_size,
            t.len(),
            opts.shards,
            0u64,
            |acc, w| {
                if count_periods_upto(w, &pairs, k) >= k {
                    *acc += 1;
                }
            },
            |a, b| a + b,
        )
    };
    let a = BigUint::from(alphabet_size);
    let within_bound = BigUint::from(count).pow(k as u32) <= a.pow(2 * t.len() as u32);
    Ok(KPeriodicCount {
        alphabet_size,
        shape_size: t.len(),
        candidates: s.len(),
        k,
        count,
        bound_log2: 2.0 * t.len() as f64 / k as f64 * (alphabet_size as f64).log2(),
        within_bound,
        hypotheses: periodic_hypotheses(alphabet_size, t, s, k)?,
    })
}

/// The two hypotheses of the periodic-pattern bound, decided in integers. Equality counts as failure.
pub fn periodic_hypotheses(alphabet_size: usize, t: &Shape, s: &Shape, k: usize) -> Result<bool> {
    if alphabet_size < 2 || s.is_empty() {
        return Ok(false);
    }
    let k2 = (k * k) as u32;
    // k log_A |S| < |T|/(2k)  <=>  |S|^(2k^2) < |A|^|T|
    let lhs = BigUint::from(s.len()).pow(2 * k2);
    let rhs = BigUint::from(alphabet_size).pow(t.len() as u32);
    if lhs >= rhs {
        return Ok(false);
    }
    for p in s.points() {
        let ts = t.translate(p, Side::Right)?;
        let d = t.sym_diff(&ts)?.len();
        if 2 * (k2 as usize) * d >= t.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// H(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy needs 0 <= x <= 1, got {x}")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// Outcome of the binomial tail bound at one (n, alpha).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinomialTail {
    pub n: u32,
    pub alpha: String,
    pub terms: u64,
    #[serde(serialize_with = "ser_biguint")]
    pub sum: BigUint,
    pub sum_log2: f64,
    pub bound_log2: f64,
    pub holds: bool,
}

fn ser_biguint<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Slack allowed for floating-point rounding in the binomial comparison.
pub const BINOMIAL_SLACK: f64 = 1e-9;

/// Checks sum_{k <= floor(alpha n)} C(n,k) <= 2^(H(alpha) n) with an exact big-integer sum.
pub fn binomial_tail_check(n: u32, alpha: Ratio<i64>) -> Result<BinomialTail> {
    if n == 0 || n > 10_000 {
        return Err(Error::Domain(format!("n must be in 1..=10000, got {n}")));
    }
    if alpha < Ratio::zero() || alpha >= Ratio::new(1, 2) {
        return Err(Error::Domain(format!("alpha must satisfy 0 <= alpha < 1/2, got {alpha}")));
    }
    let kmax = (alpha * Ratio::from_integer(n as i64)).floor().to_integer() as u64;
    let mut c = BigUint::one();
    let mut sum = BigUint::zero();
    for k in 0..=kmax {
        sum += &c;
        c = c * BigUint::from(n as u64 - k) / BigUint::from(k + 1);
    }
    let a = *alpha.numer() as f64 / *alpha.denom() as f64;
    let bound_log2 = binary_entropy(a)? * n as f64;
    let sum_log2 = log2_big(&sum);
    Ok(BinomialTail {
        n,
        alpha: alpha.to_string(),
        terms: kmax + 1,
        sum,
        sum_log2,
        bound_log2,
        holds: sum_log2 <= bound_log2 + BINOMIAL_SLACK,
    })
}

/// log2 of a positive big integer from its leading 64 bits.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("fits in 64 bits");
    (top as f64).log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupId;

    fn w(s: &str) -> Pattern {
        Pattern::z_word(&s.bytes().map(|b| b - b'0').collect::<Vec<_>>())
    }

    #[test]
    fn periods_of_small_words() {
        assert!(is_period(&w("01010"), &GroupPoint::z(2)));
        assert!(!is_period(&w("01010"), &GroupPoint::z(1)));
        assert!(!is_period(&w("00010"), &GroupPoint::z(2)));
        assert!(is_period(&w("00110"), &GroupPoint::z(0)));
    }

    #[test]
    fn period_witnesses() {
        let s = Shape::from_ints(&[0, 1, 2]);
        let got = has_k_periods(&w("00000"), &s, 3).unwrap();
        assert_eq!(got.elements.len(), 3);
        let s2 = Shape::from_ints(&[-1, 0, 1, 2]);
        let got = has_k_periods(&w("01010"), &s2, 2).unwrap();
        assert_eq!(got.elements, vec![GroupPoint::z(0), GroupPoint::z(2)]);
        assert!(has_k_periods(&w("00110"), &Shape::from_ints(&[1, 2]), 1).is_none());
    }

    #[test]
    fn canonical_storage_of_z_words() {
        let p = Pattern::z_word_at(-1, &[7, 8, 9]);
        assert_eq!(p.get(&GroupPoint::z(-1)), Some(7));
        assert_eq!(p.z_symbols().unwrap(), vec![7, 8, 9]);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn k_periodic_counts_on_z() {
        let opts = RunOptions::default();
        let t = Shape::interval(0, 6);
        let c = count_k_periodic(2, &t, &Shape::from_ints(&[1, 2]), 1, &opts).unwrap();
        assert_eq!(c.count, 4);
        let c = count_k_periodic(2, &t, &Shape::from_ints(&[1]), 1, &opts).unwrap();
        assert_eq!(c.count, 2);
        let c = count_k_periodic(2, &t, &Shape::from_ints(&[0]), 2, &opts).unwrap();
        assert_eq!(c.count, 0);
    }

    #[test]
    fn hypotheses_hold_for_long_windows() {
        let t = Shape::interval(0, 20);
        assert!(periodic_hypotheses(2, &t, &Shape::from_ints(&[0, 1]), 2).unwrap());
        assert!(!periodic_hypotheses(2, &Shape::interval(0, 12), &Shape::from_ints(&[0, 1]), 2).unwrap());
        let z2 = GroupId::zd(2).unwrap();
        let e = Shape::new(z2, [z2.identity()]).unwrap();
        assert!(periodic_hypotheses(2, &Shape::cuboid(z2, &[3, 3]).unwrap(), &e, 2).unwrap());
    }

    #[test]
    fn binomial_examples() {
        let r = binomial_tail_check(4, Ratio::new(1, 4)).unwrap();
        assert_eq!(r.sum, BigUint::from(5u32));
        assert!(r.holds);
        assert!((r.bound_log2 - 3.245112497836531).abs() < 1e-12);
        let r = binomial_tail_check(10, Ratio::new(0, 1)).unwrap();
        assert_eq!(r.sum, BigUint::from(1u32));
        assert!(r.holds);
        assert!(binomial_tail_check(10, Ratio::new(1, 2)).is_err());
    }

    #[test]
    fn fresh_tokens_avoid_collisions() {
        let a = Alphabet::new(["a", "x"]).unwrap();
        let (b, idx) = a.extended(&["a", "b"]);
        assert_eq!(b.symbols(), &["a", "x", "a1", "b"]);
        assert_eq!(idx, vec![2, 3]);
    }
}
