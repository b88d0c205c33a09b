//! Marker resolution on any group by inflating the window until no position of
//! interest is left undetermined.

use crate::enumerate::RunOptions;
use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::subshift::language;

use super::{FieldEvaluator, MarkerConstruction, Tri};

/// The cell window T (S⁻¹S)^r P.
pub fn inflated_window(m: &MarkerConstruction, p: &Shape, rounds: usize) -> Result<Shape> {
    let mut pos = p.clone();
    for _ in 0..rounds {
        pos = m.period_shape().product(&pos)?;
    }
    m.params().t.product(&pos)
}

/// Resolved window: the symbols on P and the F-values on P, one entry per distinct pair.
pub type ResolvedPair = (Vec<u8>, Vec<bool>);

/// Distinct (x on P, F on P) pairs over all admissible patterns of the first
/// inflated window that determines every position of P, with the round count.
pub fn resolve_window(m: &MarkerConstruction, p: &Shape, opts: &RunOptions) -> Result<(Vec<ResolvedPair>, usize)> {
    let cap = opts.guards.max_marker_depth;
    for rounds in 0..=cap {
        let w = inflated_window(m, p, rounds)?;
        let lang = language(&m.params().x, &w, opts)?;
        let ev = FieldEvaluator::new(m, &w)?;
        let idx: Vec<usize> = p.points().iter().map(|g| w.index_of(g).expect("P lies in its inflation")).collect();
        let words = lang.words();
        let found: Option<Vec<ResolvedPair>> = crate::enumerate::sharded_fold(
            words.len(),
            opts.shards,
            Some(Vec::new()),
            |acc: &mut Option<Vec<ResolvedPair>>, u| {
                let Some(v) = acc else { return };
                let f = ev.eval(&words[u]);
                if idx.iter().any(|&i| f.values[i] == Tri::Undetermined) {
                    *acc = None;
                } else {
                    v.push((
                        idx.iter().map(|&i| words[u][i]).collect(),
                        idx.iter().map(|&i| f.values[i] == Tri::InF).collect(),
                    ));
                }
            },
            |x, y| match (x, y) {
                (Some(mut x), Some(mut y)) => {
                    x.append(&mut y);
                    Some(x)
                }
                _ => None,
            },
        );
        if let Some(mut v) = found {
            v.sort();
            v.dedup();
            return Ok((v, rounds));
        }
    }
    Err(Error::DepthCap { cap, what: "marker window inflation".into() })
}
