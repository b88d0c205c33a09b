//! Finite subsets of a group, stored extensionally in canonical order.

use std::collections::HashSet;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{GroupId, GroupPoint};

/// Which side a translate multiplies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A finite set of group points, deduplicated and sorted in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    group: GroupId,
    elems: Vec<GroupPoint>,
}

impl Shape {
    pub fn new(group: GroupId, points: impl IntoIterator<Item = GroupPoint>) -> Result<Shape> {
        let mut elems: Vec<GroupPoint> = points.into_iter().collect();
        for p in &elems {
            if p.coords().len() != group.dim() {
                return Err(Error::Dimension { group, got: p.coords().len(), want: group.dim() });
            }
        }
        elems.sort();
        elems.dedup();
        Ok(Shape { group, elems })
    }

    pub fn empty(group: GroupId) -> Shape {
        Shape { group, elems: Vec::new() }
    }

    /// Points of Z given as plain integers.
    pub fn from_ints(xs: &[i64]) -> Shape {
        Shape::new(GroupId::Z, xs.iter().map(|&x| GroupPoint::z(x))).expect("Z points are 1-dimensional")
    }

    /// The interval [lo, hi) of Z.
    pub fn interval(lo: i64, hi: i64) -> Shape {
        Shape::new(GroupId::Z, (lo..hi).map(GroupPoint::z)).expect("Z points are 1-dimensional")
    }

    /// An axis-parallel box with the given side lengths anchored at the origin.
    pub fn cuboid(group: GroupId, sides: &[i64]) -> Result<Shape> {
        if sides.len() != group.dim() {
            return Err(Error::Dimension { group, got: sides.len(), want: group.dim() });
        }
        let mut pts = Vec::new();
        let mut c = vec![0i64; sides.len()];
        if sides.iter().any(|&s| s <= 0) {
            return Ok(Shape::empty(group));
        }
        'outer: loop {
            pts.push(group.point(&c)?);
            for i in (0..c.len()).rev() {
                c[i] += 1;
                if c[i] < sides[i] {
                    continue 'outer;
                }
                c[i] = 0;
            }
            break;
        }
        Shape::new(group, pts)
    }

    pub fn from_tuples(group: GroupId, tuples: &[Vec<i64>]) -> Result<Shape> {
        let pts = tuples.iter().map(|t| group.point(t)).collect::<Result<Vec<_>>>()?;
        Shape::new(group, pts)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.elems
    }

    pub fn contains(&self, p: &GroupPoint) -> bool {
        self.elems.binary_search(p).is_ok()
    }

    /// Position of `p` in canonical order.
    pub fn index_of(&self, p: &GroupPoint) -> Option<usize> {
        self.elems.binary_search(p).ok()
    }

    fn same_group(&self, other: &Shape) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch(self.group, other.group));
        }
        Ok(())
    }

    /// AK = {ak : a in A, k in K}.
    pub fn product(&self, k: &Shape) -> Result<Shape> {
        self.same_group(k)?;
        let g = self.group;
        let mut set = HashSet::with_capacity(self.len() * k.len());
        for a in &self.elems {
            for b in &k.elems {
                set.insert(g.mul(a, b));
            }
        }
        Shape::new(g, set)
    }

    pub fn inverse(&self) -> Shape {
        let g = self.group;
        Shape::new(g, self.elems.iter().map(|p| g.inv(p))).expect("same group")
    }

    /// `Left` gives gA, `Right` gives Ag.
    pub fn translate(&self, h: &GroupPoint, side: Side) -> Result<Shape> {
        let g = self.group;
        if h.coords().len() != g.dim() {
            return Err(Error::Dimension { group: g, got: h.coords().len(), want: g.dim() });
        }
        let it = self.elems.iter().map(|a| match side {
            Side::Left => g.mul(h, a),
            Side::Right => g.mul(a, h),
        });
        Shape::new(g, it)
    }

    pub fn sym_diff(&self, other: &Shape) -> Result<Shape> {
        self.same_group(other)?;
        let a = self.elems.iter().filter(|p| !other.contains(p));
        let b = other.elems.iter().filter(|p| !self.contains(p));
        Shape::new(self.group, a.chain(b).cloned())
    }

    pub fn union(&self, other: &Shape) -> Result<Shape> {
        self.same_group(other)?;
        Shape::new(self.group, self.elems.iter().chain(other.elems.iter()).cloned())
    }

    pub fn intersection(&self, other: &Shape) -> Result<Shape> {
        self.same_group(other)?;
        Ok(Shape { group: self.group, elems: self.elems.iter().filter(|p| other.contains(p)).cloned().collect() })
    }

    pub fn difference(&self, other: &Shape) -> Result<Shape> {
        self.same_group(other)?;
        Ok(Shape { group: self.group, elems: self.elems.iter().filter(|p| !other.contains(p)).cloned().collect() })
    }

    pub fn is_subset(&self, other: &Shape) -> bool {
        self.group == other.group && self.elems.iter().all(|p| other.contains(p))
    }

    /// {g : Sg ⊆ self}, the points where a code with memory `s` can be read.
    pub fn deflate(&self, s: &Shape) -> Result<Shape> {
        self.same_group(s)?;
        let g = self.group;
        let Some(s0) = s.elems.first() else {
            return Err(Error::EmptyShape("code memory".into()));
        };
        let s0inv = g.inv(s0);
        let cands = self.elems.iter().map(|w| g.mul(&s0inv, w));
        let keep: Vec<GroupPoint> =
            cands.filter(|c| s.elems.iter().all(|t| self.contains(&g.mul(t, c)))).collect();
        Shape::new(g, keep)
    }

    /// Integer bounds of a Z shape, if it is a non-empty subset of Z.
    pub fn z_bounds(&self) -> Option<(i64, i64)> {
        if !self.group.is_z() || self.elems.is_empty() {
            return None;
        }
        let xs = self.elems.iter().map(|p| p.coords()[0]);
        Some((xs.clone().min()?, xs.max()?))
    }

    /// Sorted integer coordinates of a Z shape.
    pub fn z_values(&self) -> Option<Vec<i64>> {
        if !self.group.is_z() {
            return None;
        }
        let mut v: Vec<i64> = self.elems.iter().map(|p| p.coords()[0]).collect();
        v.sort_unstable();
        Some(v)
    }

    /// True when the shape is a contiguous interval of Z.
    pub fn is_z_interval(&self) -> bool {
        match self.z_bounds() {
            Some((lo, hi)) => (hi - lo + 1) as usize == self.len(),
            None => false,
        }
    }
}

impl Serialize for Shape {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_products() {
        let a = Shape::from_ints(&[0, 1]);
        assert_eq!(a.product(&a).unwrap(), Shape::from_ints(&[0, 1, 2]));
        let e = Shape::from_ints(&[0]);
        let k = Shape::from_ints(&[3, -7, 11]);
        assert_eq!(e.product(&k).unwrap(), k);
    }

    #[test]
    fn heisenberg_singleton_product() {
        let h = GroupId::Heisenberg3;
        let a = Shape::from_tuples(h, &[vec![1, 0, 0]]).unwrap();
        let b = Shape::from_tuples(h, &[vec![0, 1, 0]]).unwrap();
        assert_eq!(a.product(&b).unwrap().points()[0].coords(), &[1, 1, 1]);
    }

    #[test]
    fn inverse_and_sym_diff() {
        let a = Shape::from_ints(&[0, 1, 2]);
        assert_eq!(a.inverse(), Shape::from_ints(&[0, -1, -2]));
        assert!(a.sym_diff(&a).unwrap().is_empty());
        let s = Shape::from_ints(&[1, 2]);
        assert_eq!(s.inverse().product(&s).unwrap(), Shape::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn canonical_order_is_enumeration_order() {
        let a = Shape::from_ints(&[2, -1, 0, 1, -2]);
        let v: Vec<i64> = a.points().iter().map(|p| p.coords()[0]).collect();
        assert_eq!(v, vec![0, -1, 1, -2, 2]);
    }

    #[test]
    fn deflate_interval() {
        let w = Shape::interval(0, 4);
        let s = Shape::from_ints(&[0, 1]);
        assert_eq!(w.deflate(&s).unwrap(), Shape::interval(0, 3));
    }

    #[test]
    fn group_mismatch_is_reported() {
        let a = Shape::from_ints(&[0]);
        let b = Shape::cuboid(GroupId::zd(2).unwrap(), &[1, 1]).unwrap();
        assert!(matches!(a.product(&b), Err(Error::GroupMismatch(..))));
    }
}
