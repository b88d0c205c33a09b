//! Sliding block codes: (φx)(g) = f(x(Sg)).

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupId;
use crate::pattern::{Alphabet, Pattern};
use crate::shape::Shape;

use super::WindowLanguage;

/// Local rule: receives the source symbols on `S g` in canonical order of S.
pub type Rule = Arc<dyn Fn(&[u8]) -> u8 + Send + Sync>;

/// Whether the local rule is meaningful on every source pattern or only on the source language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Totality {
    Full,
    SourceLanguage,
}

#[derive(Clone)]
pub struct BlockCode {
    name: String,
    source: Alphabet,
    target: Alphabet,
    memory: Shape,
    rule: Rule,
    totality: Totality,
}

impl fmt::Debug for BlockCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockCode")
            .field("name", &self.name)
            .field("memory", &self.memory)
            .field("source", &self.source.len())
            .field("target", &self.target.len())
            .finish()
    }
}

impl BlockCode {
    pub fn new(
        name: impl Into<String>,
        source: Alphabet,
        target: Alphabet,
        memory: Shape,
        rule: Rule,
        totality: Totality,
    ) -> Result<BlockCode> {
        if memory.is_empty() {
            return Err(Error::EmptyShape("code memory".into()));
        }
        Ok(BlockCode { name: name.into(), source, target, memory, rule, totality })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Alphabet {
        &self.source
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn memory(&self) -> &Shape {
        &self.memory
    }

    pub fn totality(&self) -> Totality {
        self.totality
    }

    pub fn group(&self) -> GroupId {
        self.memory.group()
    }

    #[inline]
    pub fn eval(&self, local: &[u8]) -> u8 {
        (self.rule)(local)
    }

    pub fn identity(alphabet: Alphabet, group: GroupId) -> BlockCode {
        let memory = Shape::new(group, [group.identity()]).expect("identity point");
        BlockCode {
            name: "identity".into(),
            source: alphabet.clone(),
            target: alphabet,
            memory,
            rule: Arc::new(|w| w[0]),
            totality: Totality::Full,
        }
    }

    pub fn constant(source: Alphabet, target: Alphabet, group: GroupId, symbol: u8) -> Result<BlockCode> {
        if symbol as usize >= target.len() {
            return Err(Error::Domain(format!("symbol {symbol} outside the target alphabet")));
        }
        let memory = Shape::new(group, [group.identity()])?;
        Ok(BlockCode {
            name: "constant".into(),
            source,
            target,
            memory,
            rule: Arc::new(move |_| symbol),
            totality: Totality::Full,
        })
    }

    /// x(g) XOR x(g+1) on binary sequences over Z.
    pub fn xor() -> BlockCode {
        BlockCode {
            name: "xor".into(),
            source: Alphabet::numeric(2),
            target: Alphabet::numeric(2),
            memory: Shape::from_ints(&[0, 1]),
            rule: Arc::new(|w| w[0] ^ w[1]),
            totality: Totality::Full,
        }
    }

    /// Projection of the product alphabet `left x right` onto one coordinate.
    pub fn projection(left: &Alphabet, right: &Alphabet, first: bool, group: GroupId) -> BlockCode {
        let source = product_alphabet(left, right);
        let nr = right.len() as u8;
        let (target, rule): (Alphabet, Rule) = if first {
            (left.clone(), Arc::new(move |w| w[0] / nr))
        } else {
            (right.clone(), Arc::new(move |w| w[0] % nr))
        };
        let memory = Shape::new(group, [group.identity()]).expect("identity point");
        BlockCode {
            name: if first { "projection-1" } else { "projection-2" }.into(),
            source,
            target,
            memory,
            rule,
            totality: Totality::Full,
        }
    }

    /// Index map from an input window to the memory reads of each output point.
    pub fn reader(&self, window: &Shape) -> Result<CodeReader> {
        let out = window.deflate(&self.memory)?;
        if out.is_empty() {
            return Err(Error::Window("deflated window is empty".into()));
        }
        let grp = window.group();
        let mut reads = Vec::with_capacity(out.len() * self.memory.len());
        for g in out.points() {
            for s in self.memory.points() {
                reads.push(window.index_of(&grp.mul(s, g)).expect("deflated window fits"));
            }
        }
        Ok(CodeReader { input: window.clone(), output: out, width: self.memory.len(), reads })
    }
}

/// Cells of the product alphabet are indexed `i * |right| + j`.
pub fn product_alphabet(left: &Alphabet, right: &Alphabet) -> Alphabet {
    let mut syms = Vec::new();
    for a in left.symbols() {
        for b in right.symbols() {
            syms.push(format!("({a},{b})"));
        }
    }
    Alphabet::new(syms).expect("product of distinct tokens is distinct")
}

/// Precomputed read positions of a code on a fixed input window.
#[derive(Debug, Clone)]
pub struct CodeReader {
    input: Shape,
    output: Shape,
    width: usize,
    reads: Vec<usize>,
}

impl CodeReader {
    pub fn output_window(&self) -> &Shape {
        &self.output
    }

    pub fn input_window(&self) -> &Shape {
        &self.input
    }

    pub fn apply(&self, code: &BlockCode, x: &[u8], out: &mut Vec<u8>) {
        out.clear();
        let mut buf = vec![0u8; self.width];
        for chunk in self.reads.chunks(self.width) {
            for (b, &i) in buf.iter_mut().zip(chunk) {
                *b = x[i];
            }
            out.push(code.eval(&buf));
        }
    }
}

/// Applies `c` to a pattern, giving a pattern on the deflated window.
pub fn apply_code(c: &BlockCode, x: &Pattern) -> Result<Pattern> {
    if c.group() != x.shape().group() {
        return Err(Error::GroupMismatch(c.group(), x.shape().group()));
    }
    let reader = c.reader(x.shape())?;
    let mut out = Vec::new();
    reader.apply(c, x.symbols(), &mut out);
    Pattern::new(reader.output.clone(), out)
}

/// Image of a window language under a code, on the deflated window.
pub fn push_language(l: &WindowLanguage, c: &BlockCode) -> Result<WindowLanguage> {
    if l.alphabet_size() != c.source().len() {
        return Err(Error::Window(format!(
            "language alphabet has {} symbols, code expects {}",
            l.alphabet_size(),
            c.source().len()
        )));
    }
    let reader = c.reader(l.window())?;
    let mut out = Vec::new();
    let mut words = Vec::with_capacity(l.len());
    for w in l.words() {
        reader.apply(c, w, &mut out);
        words.push(out.clone());
    }
    Ok(WindowLanguage::from_words(reader.output.clone(), c.target().len(), words, l.exactness()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_example() {
        let x = Pattern::z_word(&[0, 1, 1, 0]);
        let y = apply_code(&BlockCode::xor(), &x).unwrap();
        assert_eq!(y.z_symbols().unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn identity_and_constant() {
        let x = Pattern::z_word(&[1, 0, 1]);
        let id = BlockCode::identity(Alphabet::numeric(2), GroupId::Z);
        assert_eq!(apply_code(&id, &x).unwrap(), x);
        let c = BlockCode::constant(Alphabet::numeric(2), Alphabet::numeric(2), GroupId::Z, 1).unwrap();
        assert_eq!(apply_code(&c, &x).unwrap().z_symbols().unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn empty_deflation_is_an_error() {
        let x = Pattern::z_word(&[1]);
        assert!(apply_code(&BlockCode::xor(), &x).is_err());
    }

    #[test]
    fn projection_reads_coordinates() {
        let a = Alphabet::numeric(2);
        let b = Alphabet::numeric(3);
        let p1 = BlockCode::projection(&a, &b, true, GroupId::Z);
        let p2 = BlockCode::projection(&a, &b, false, GroupId::Z);
        // (1,2) has index 1*3+2
        assert_eq!(p1.eval(&[5]), 1);
        assert_eq!(p2.eval(&[5]), 2);
        assert_eq!(p1.source().symbol(5), "(1,2)");
    }
}
