//! δ-disjointness, α-covers, greedy quasitile centers and the covering bound.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use petgraph::algo::maximum_flow::dinics;
use petgraph::graph::DiGraph;
use petgraph::visit::EdgeRef;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupId, GroupPoint};
use crate::shape::{Shape, Side};

/// Nested tiles `T_1 ⊆ ... ⊆ T_N` with `e ∈ T_1`, and a rational δ in (0,1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasitileSystem {
    tiles: Vec<Shape>,
    delta: Ratio<i64>,
}

impl QuasitileSystem {
    pub fn new(tiles: Vec<Shape>, delta: Ratio<i64>) -> Result<QuasitileSystem> {
        let first = tiles.first().ok_or_else(|| Error::config("tiles", "need at least one tile"))?;
        if delta <= Ratio::zero() || delta >= Ratio::one() {
            return Err(Error::config("delta", "must lie strictly between 0 and 1"));
        }
        if !first.contains(&first.group().identity()) {
            return Err(Error::config("tiles[0]", "must contain the identity"));
        }
        for (i, w) in tiles.windows(2).enumerate() {
            if w[0].group() != w[1].group() {
                return Err(Error::GroupMismatch(w[0].group(), w[1].group()));
            }
            if !w[0].is_subset(&w[1]) {
                return Err(Error::config(format!("tiles[{}]", i + 1), "tiles must be nested"));
            }
        }
        Ok(QuasitileSystem { tiles, delta })
    }

    pub fn tiles(&self) -> &[Shape] {
        &self.tiles
    }

    pub fn delta(&self) -> Ratio<i64> {
        self.delta
    }

    pub fn group(&self) -> GroupId {
        self.tiles[0].group()
    }
}

/// Center sets `C_1..C_N` for a target D.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenterFamily {
    pub centers: Vec<Shape>,
    pub target: Shape,
}

impl CenterFamily {
    pub fn all_centers(&self) -> Result<Shape> {
        let mut pts = Vec::new();
        for c in &self.centers {
            pts.extend(c.points().iter().cloned());
        }
        Shape::new(self.target.group(), pts)
    }

    pub fn total(&self) -> usize {
        self.centers.iter().map(Shape::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disjointness {
    pub holds: bool,
    pub witness: Option<Vec<Shape>>,
}

fn quota(size: usize, delta: Ratio<i64>) -> usize {
    let keep = (Ratio::one() - delta) * Ratio::from_integer(size as i64);
    keep.floor().to_integer() as usize + 1
}

/// Decides whether pairwise disjoint `B_i ⊆ A_i` with `|B_i| > (1-δ)|A_i|` exist.
pub fn check_delta_disjoint(family: &[Shape], delta: Ratio<i64>) -> Result<Disjointness> {
    let first = family.first().ok_or_else(|| Error::EmptyShape("δ-disjoint family".into()))?;
    for a in family {
        if a.group() != first.group() {
            return Err(Error::GroupMismatch(a.group(), first.group()));
        }
    }
    let mut g: DiGraph<(), u64> = DiGraph::new();
    let src = g.add_node(());
    let sink = g.add_node(());
    let mut elem: HashMap<&GroupPoint, petgraph::graph::NodeIndex> = HashMap::new();
    let mut need = 0u64;
    let mut set_nodes = Vec::with_capacity(family.len());
    for a in family {
        let q = quota(a.len(), delta) as u64;
        need += q;
        let node = g.add_node(());
        g.add_edge(src, node, q);
        set_nodes.push(node);
    }
    for (a, &node) in family.iter().zip(&set_nodes) {
        for p in a.points() {
            let e = *elem.entry(p).or_insert_with(|| g.add_node(()));
            g.add_edge(node, e, 1);
        }
    }
    for &e in elem.values() {
        g.add_edge(e, sink, 1);
    }
    let (flow, flows) = dinics(&g, src, sink);
    if flow < need {
        return Ok(Disjointness { holds: false, witness: None });
    }
    let mut node_point: HashMap<petgraph::graph::NodeIndex, &GroupPoint> = HashMap::new();
    for (p, &e) in &elem {
        node_point.insert(e, p);
    }
    let mut witness = Vec::with_capacity(family.len());
    for (a, &node) in family.iter().zip(&set_nodes) {
        let pts: Vec<GroupPoint> = g
            .edges(node)
            .filter(|e| flows[e.id().index()] > 0)
            .map(|e| node_point[&e.target()].clone())
            .collect();
        witness.push(Shape::new(a.group(), pts)?);
    }
    Ok(Disjointness { holds: true, witness: Some(witness) })
}

/// |B ∩ ∪ A_i| ≥ α|B|, exactly.
pub fn check_alpha_cover(family: &[Shape], b: &Shape, alpha: Ratio<i64>) -> Result<bool> {
    if b.is_empty() {
        return Err(Error::EmptyShape("covered set".into()));
    }
    let mut hit: HashSet<&GroupPoint> = HashSet::new();
    for a in family {
        if a.group() != b.group() {
            return Err(Error::GroupMismatch(a.group(), b.group()));
        }
        for p in a.points() {
            if b.contains(p) {
                hit.insert(p);
            }
        }
    }
    Ok(Ratio::from_integer(hit.len() as i64) >= alpha * Ratio::from_integer(b.len() as i64))
}

/// Greedy center search, largest tiles first.
pub fn find_centers(q: &QuasitileSystem, d: &Shape) -> Result<Option<CenterFamily>> {
    let grp = q.group();
    if d.group() != grp {
        return Err(Error::GroupMismatch(d.group(), grp));
    }
    let n = q.tiles.len();
    let delta = q.delta;
    let cover_target = Ratio::one() - delta;
    let candidates = q.tiles[n - 1].inverse().product(d)?;
    let goal = cover_target * Ratio::from_integer(d.len() as i64);
    let mut taken: HashSet<GroupPoint> = HashSet::new();
    let mut covered_d: HashSet<GroupPoint> = HashSet::new();
    let mut centers: Vec<Vec<GroupPoint>> = vec![Vec::new(); n];
    // pass 0 places disjoint tiles, pass 1 admits δ-overlaps, pass 2 fills leftovers
    'levels: for i in (0..n).rev() {
        let tile = &q.tiles[i];
        let mut level_tiles: Vec<Shape> = Vec::new();
        let mut level_points: HashSet<GroupPoint> = HashSet::new();
        for pass in 0..3 {
            let need_new = if pass < 2 {
                cover_target * Ratio::from_integer(tile.len() as i64)
            } else {
                Ratio::one()
            };
            for c in candidates.points() {
                if centers[i].contains(c) {
                    continue;
                }
                let tc = tile.translate(c, Side::Right)?;
                let pts = tc.points();
                if !pts.iter().any(|p| d.contains(p)) || pts.iter().any(|p| taken.contains(p)) {
                    continue;
                }
                let fresh = pts.iter().filter(|p| d.contains(p) && !covered_d.contains(*p)).count();
                if Ratio::from_integer(fresh as i64) < need_new {
                    continue;
                }
                if pts.iter().any(|p| level_points.contains(p)) {
                    if pass == 0 {
                        continue;
                    }
                    let comp = overlap_component(&level_tiles, &tc);
                    let mut fam: Vec<Shape> = comp.iter().map(|&j| level_tiles[j].clone()).collect();
                    fam.push(tc.clone());
                    if !check_delta_disjoint(&fam, delta)?.holds {
                        continue;
                    }
                }
                for p in pts {
                    level_points.insert(p.clone());
                    if d.contains(p) {
                        covered_d.insert(p.clone());
                    }
                }
                level_tiles.push(tc);
                centers[i].push(c.clone());
            }
            if Ratio::from_integer(covered_d.len() as i64) >= goal {
                break 'levels;
            }
        }
        taken.extend(level_points);
    }
    if Ratio::from_integer(covered_d.len() as i64) < goal {
        return Ok(None);
    }
    let centers = centers.into_iter().map(|c| Shape::new(grp, c)).collect::<Result<Vec<_>>>()?;
    Ok(Some(CenterFamily { centers, target: d.clone() }))
}

// Indices of accepted tiles connected to `t` through chains of overlaps.
fn overlap_component(tiles: &[Shape], t: &Shape) -> Vec<usize> {
    let mut in_comp = vec![false; tiles.len()];
    let mut frontier: Vec<&Shape> = vec![t];
    let mut out = Vec::new();
    while let Some(cur) = frontier.pop() {
        for (j, other) in tiles.iter().enumerate() {
            if !in_comp[j] && other.points().iter().any(|p| cur.contains(p)) {
                in_comp[j] = true;
                out.push(j);
                frontier.push(other);
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CenterCheck {
    pub levels_disjoint: bool,
    pub cross_level_disjoint: bool,
    pub covers: bool,
    pub trimmed: bool,
}

impl CenterCheck {
    pub fn ok(&self) -> bool {
        self.levels_disjoint && self.cross_level_disjoint && self.covers && self.trimmed
    }
}

/// Checks conditions (1)-(3) of a quasitiling plus the trimming normalization.
pub fn verify_centers(q: &QuasitileSystem, fam: &CenterFamily) -> Result<CenterCheck> {
    if fam.centers.len() != q.tiles.len() {
        return Err(Error::Window("one center set per tile is required".into()));
    }
    let mut levels = Vec::new();
    let mut levels_disjoint = true;
    let mut trimmed = true;
    let mut all_translates = Vec::new();
    for (tile, cs) in q.tiles.iter().zip(&fam.centers) {
        let translates: Vec<Shape> =
            cs.points().iter().map(|c| tile.translate(c, Side::Right)).collect::<Result<_>>()?;
        if !translates.is_empty() {
            levels_disjoint &= check_delta_disjoint(&translates, q.delta)?.holds;
        }
        trimmed &= translates.iter().all(|t| !t.intersection(&fam.target).map(|s| s.is_empty()).unwrap_or(true));
        levels.push(tile.product(cs)?);
        all_translates.extend(translates);
    }
    let mut cross_level_disjoint = true;
    for i in 0..levels.len() {
        for j in (i + 1)..levels.len() {
            cross_level_disjoint &= levels[i].intersection(&levels[j])?.is_empty();
        }
    }
    let covers = check_alpha_cover(&levels, &fam.target, Ratio::one() - q.delta)?;
    Ok(CenterCheck { levels_disjoint, cross_level_disjoint, covers, trimmed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    pub n: usize,
    pub folner_size: usize,
    pub m: usize,
    pub delta: String,
    /// |S S⁻¹ F_n Δ F_n| / |F_n| and whether it is below δ.
    pub precondition_ratio: String,
    pub precondition_holds: bool,
    pub centers: Option<Shape>,
    pub center_count: Option<usize>,
    pub bound: String,
    pub bound_value: f64,
    pub bound_holds: bool,
    pub cover_holds: bool,
}

impl CoveringReport {
    /// The bound is only claimed where the precondition holds.
    pub fn passes(&self) -> bool {
        !self.precondition_holds || (self.bound_holds && self.cover_holds)
    }
}

/// Centers whose S-translates (1-δ)-cover F_n, with the cardinality bound `(1+δ)|F_n| / ((1-δ) m)`.
pub fn covering_with_bound(tiles: &[Shape], delta: Ratio<i64>, n: usize) -> Result<CoveringReport> {
    let q = QuasitileSystem::new(tiles.to_vec(), delta)?;
    let grp = q.group();
    let f = grp.folner_set(n)?.elements;
    let s = &q.tiles[q.tiles.len() - 1];
    let m = q.tiles[0].len();
    let ss = s.product(&s.inverse())?;
    let ratio = Ratio::new(ss.product(&f)?.sym_diff(&f)?.len() as i64, f.len() as i64);
    let precondition_holds = ratio < delta;
    let bound = (Ratio::one() + delta) * Ratio::from_integer(f.len() as i64)
        / ((Ratio::one() - delta) * Ratio::from_integer(m as i64));
    let fam = find_centers(&q, &f)?;
    let (centers, bound_holds, cover_holds) = match &fam {
        Some(fam) => {
            let c = fam.all_centers()?;
            let translates: Vec<Shape> =
                c.points().iter().map(|p| s.translate(p, Side::Right)).collect::<Result<_>>()?;
            let cover = check_alpha_cover(&translates, &f, Ratio::one() - delta)?;
            let within = Ratio::from_integer(c.len() as i64) <= bound;
            (Some(c), within, cover)
        }
        None => (None, false, false),
    };
    Ok(CoveringReport {
        n,
        folner_size: f.len(),
        m,
        delta: delta.to_string(),
        precondition_ratio: ratio.to_string(),
        precondition_holds,
        center_count: centers.as_ref().map(Shape::len),
        centers,
        bound: bound.to_string(),
        bound_value: bound.to_f64().unwrap_or(f64::NAN),
        bound_holds,
        cover_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn disjointness_examples() {
        let a = Shape::interval(0, 4);
        let b = Shape::interval(4, 8);
        assert!(check_delta_disjoint(&[a.clone(), b], r(1, 100)).unwrap().holds);
        let c = Shape::interval(2, 6);
        let res = check_delta_disjoint(&[a.clone(), c.clone()], r(3, 10)).unwrap();
        assert!(res.holds);
        let w = res.witness.unwrap();
        assert_eq!((w[0].len(), w[1].len()), (3, 3));
        assert!(w[0].intersection(&w[1]).unwrap().is_empty());
        assert!(!check_delta_disjoint(&[a, c], r(1, 5)).unwrap().holds);
    }

    #[test]
    fn cover_examples() {
        let fam = [Shape::interval(0, 5)];
        let b = Shape::interval(0, 10);
        assert!(check_alpha_cover(&fam, &b, r(1, 2)).unwrap());
        assert!(!check_alpha_cover(&fam, &b, r(51, 100)).unwrap());
        assert!(check_alpha_cover(std::slice::from_ref(&b), &b, r(1, 1)).unwrap());
    }

    #[test]
    fn interval_tiling() {
        let q = QuasitileSystem::new(vec![Shape::interval(0, 5)], r(1, 10)).unwrap();
        let fam = find_centers(&q, &Shape::interval(0, 20)).unwrap().unwrap();
        assert_eq!(fam.centers[0], Shape::from_ints(&[0, 5, 10, 15]));
        assert!(verify_centers(&q, &fam).unwrap().ok());
    }

    #[test]
    fn small_target_inside_first_tile() {
        let q = QuasitileSystem::new(vec![Shape::interval(0, 3), Shape::interval(0, 6)], r(1, 10)).unwrap();
        let fam = find_centers(&q, &Shape::interval(0, 2)).unwrap().unwrap();
        assert!(verify_centers(&q, &fam).unwrap().ok());
        assert_eq!(fam.total(), 1);
    }

    #[test]
    fn covering_examples() {
        let rep = covering_with_bound(&[Shape::interval(0, 5)], r(1, 5), 20).unwrap();
        assert_eq!(rep.center_count, Some(4));
        assert!(rep.bound_holds && rep.cover_holds);
        assert_eq!(rep.bound, "6");
        let rep = covering_with_bound(&[Shape::from_ints(&[0])], r(1, 2), 4).unwrap();
        assert_eq!(rep.center_count, Some(4));
        assert_eq!(rep.bound, "12");
        let z2 = GroupId::zd(2).unwrap();
        let rep = covering_with_bound(&[Shape::cuboid(z2, &[3, 3]).unwrap()], r(1, 5), 12).unwrap();
        assert_eq!(rep.center_count, Some(16));
        assert_eq!(rep.bound, "24");
        assert!(rep.bound_holds && rep.cover_holds);
    }

    #[test]
    fn system_validation() {
        assert!(QuasitileSystem::new(vec![Shape::interval(1, 3)], r(1, 10)).is_err());
        assert!(QuasitileSystem::new(vec![Shape::interval(0, 3), Shape::interval(1, 5)], r(1, 10)).is_err());
        assert!(QuasitileSystem::new(vec![Shape::interval(0, 3)], r(1, 1)).is_err());
    }
}
