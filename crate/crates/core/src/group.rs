//! Supported groups: Z, Z^d and the discrete Heisenberg group H3.
//!
//! Points carry plain integer coordinates. The Heisenberg product is
//! `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b')`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::shape::Shape;

/// Which group a point or shape lives in.
#[derive(Debug, Clone, Copy)]
pub enum GroupId {
    Z,
    Zd(usize),
    Heisenberg3,
}

impl GroupId {
    /// `Zd(1)` collapses to `Z`.
    pub fn zd(d: usize) -> Result<GroupId> {
        match d {
            0 => Err(Error::Domain("Z^d needs d >= 1".into())),
            1 => Ok(GroupId::Z),
            d => Ok(GroupId::Zd(d)),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            GroupId::Z => 1,
            GroupId::Zd(d) => d,
            GroupId::Heisenberg3 => 3,
        }
    }

    pub fn is_abelian(&self) -> bool {
        !matches!(self, GroupId::Heisenberg3)
    }

    pub fn is_z(&self) -> bool {
        self.dim() == 1 && self.is_abelian()
    }

    pub fn identity(&self) -> GroupPoint {
        GroupPoint { coords: SmallVec::from_elem(0, self.dim()) }
    }

    pub fn point(&self, coords: &[i64]) -> Result<GroupPoint> {
        if coords.len() != self.dim() {
            return Err(Error::Dimension { group: *self, got: coords.len(), want: self.dim() });
        }
        Ok(GroupPoint { coords: SmallVec::from_slice(coords) })
    }

    pub fn mul(&self, a: &GroupPoint, b: &GroupPoint) -> GroupPoint {
        let mut coords: SmallVec<[i64; 3]> =
            a.coords.iter().zip(b.coords.iter()).map(|(x, y)| x + y).collect();
        if let GroupId::Heisenberg3 = self {
            coords[2] += a.coords[0] * b.coords[1];
        }
        GroupPoint { coords }
    }

    pub fn inv(&self, a: &GroupPoint) -> GroupPoint {
        let mut coords: SmallVec<[i64; 3]> = a.coords.iter().map(|x| -x).collect();
        if let GroupId::Heisenberg3 = self {
            coords[2] += a.coords[0] * a.coords[1];
        }
        GroupPoint { coords }
    }

    /// The m-th element (1-based) of the fixed enumeration: sup-norm shells, lexicographic inside a shell.
    pub fn enumeration(&self, m: usize) -> Result<GroupPoint> {
        if m == 0 {
            return Err(Error::Domain("enumeration index starts at 1".into()));
        }
        Ok(self.enumeration_prefix(m).pop().expect("prefix has m elements"))
    }

    /// G_m = {g_1, ..., g_m} in enumeration order.
    pub fn enumeration_prefix(&self, m: usize) -> Vec<GroupPoint> {
        let d = self.dim();
        let mut out = Vec::with_capacity(m);
        let mut r: i64 = 0;
        while out.len() < m {
            shell(d, r, &mut |c| {
                if out.len() < m {
                    out.push(GroupPoint { coords: SmallVec::from_slice(c) });
                }
            });
            r += 1;
        }
        out
    }

    /// The canonical Følner box: [0,n)^d, or [0,n) x [0,n) x [0,n^2) for H3.
    pub fn folner_set(&self, n: usize) -> Result<FolnerSet> {
        if n == 0 {
            return Err(Error::Domain("Følner index must be >= 1".into()));
        }
        let n = n as i64;
        let sides: Vec<i64> = match self {
            GroupId::Heisenberg3 => vec![n, n, n * n],
            _ => vec![n; self.dim()],
        };
        let mut pts = Vec::new();
        let mut c = vec![0i64; sides.len()];
        loop {
            pts.push(GroupPoint { coords: SmallVec::from_slice(&c) });
            let mut i = c.len();
            loop {
                if i == 0 {
                    return Ok(FolnerSet { n: n as usize, elements: Shape::new(*self, pts)? });
                }
                i -= 1;
                c[i] += 1;
                if c[i] < sides[i] {
                    break;
                }
                c[i] = 0;
            }
        }
    }

    pub fn token(&self) -> String {
        match self {
            GroupId::Z => "Z".into(),
            GroupId::Zd(d) => format!("Z^{d}"),
            GroupId::Heisenberg3 => "H3".into(),
        }
    }
}

// visits every point of sup-norm exactly r in lexicographic order
fn shell(d: usize, r: i64, f: &mut dyn FnMut(&[i64])) {
    let mut c = vec![-r; d];
    loop {
        if c.iter().any(|x| x.abs() == r) || r == 0 {
            f(&c);
        }
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            c[i] += 1;
            if c[i] <= r {
                break;
            }
            c[i] = -r;
        }
    }
}

impl PartialEq for GroupId {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.is_abelian() == other.is_abelian()
    }
}
impl Eq for GroupId {}

impl Hash for GroupId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim().hash(state);
        self.is_abelian().hash(state);
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

impl FromStr for GroupId {
    type Err = Error;
    fn from_str(s: &str) -> Result<GroupId> {
        let t = s.trim();
        match t {
            "Z" => Ok(GroupId::Z),
            "H3" => Ok(GroupId::Heisenberg3),
            _ => {
                let d = t
                    .strip_prefix("Z^")
                    .or_else(|| t.strip_prefix('Z'))
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| Error::config("group", format!("unknown group token {t:?}")))?;
                GroupId::zd(d).map_err(|e| Error::config("group", e.to_string()))
            }
        }
    }
}

impl Serialize for GroupId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.token())
    }
}

impl<'de> Deserialize<'de> for GroupId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e| match e {
            Error::Config { msg, .. } => serde::de::Error::custom(msg),
            e => serde::de::Error::custom(e),
        })
    }
}

/// A group element as an integer coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupPoint {
    coords: SmallVec<[i64; 3]>,
}

impl GroupPoint {
    /// Shorthand for an element of Z.
    pub fn z(x: i64) -> GroupPoint {
        GroupPoint { coords: SmallVec::from_slice(&[x]) }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn sup_norm(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// Canonical order: sup-norm first, then lexicographic. This is the enumeration order.
impl Ord for GroupPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sup_norm()
            .cmp(&other.sup_norm())
            .then_with(|| self.coords.cmp(&other.coords))
    }
}

impl PartialOrd for GroupPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for GroupPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.coords.len() == 1 {
            s.serialize_i64(self.coords[0])
        } else {
            self.coords.as_slice().serialize(s)
        }
    }
}

/// F_n together with its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolnerSet {
    pub n: usize,
    pub elements: Shape,
}

/// |KU Δ U| / |U| as an exact rational.
pub fn invariance_ratio(k: &Shape, u: &Shape) -> Result<Ratio<i64>> {
    if u.is_empty() {
        return Err(Error::EmptyShape("U in invariance ratio".into()));
    }
    if k.is_empty() {
        return Err(Error::EmptyShape("K in invariance ratio".into()));
    }
    let ku = k.product(u)?;
    let num = ku.sym_diff(u)?.len() as i64;
    Ok(Ratio::new(num, u.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_enumeration_alternates_around_zero() {
        let g = GroupId::Z;
        let first: Vec<i64> = g.enumeration_prefix(5).iter().map(|p| p.coords()[0]).collect();
        assert_eq!(first, vec![0, -1, 1, -2, 2]);
        assert_eq!(g.enumeration(3).unwrap(), GroupPoint::z(1));
    }

    #[test]
    fn z2_shell_one_is_lexicographic() {
        let g = GroupId::zd(2).unwrap();
        let p = g.enumeration_prefix(9);
        assert!(p[0].is_identity());
        assert_eq!(p[1].coords(), &[-1, -1]);
        assert_eq!(p[8].coords(), &[1, 1]);
        let mut sorted = p.clone();
        sorted.sort();
        assert_eq!(sorted, p);
    }

    #[test]
    fn heisenberg_product_and_inverse() {
        let h = GroupId::Heisenberg3;
        let a = h.point(&[1, 0, 0]).unwrap();
        let b = h.point(&[0, 1, 0]).unwrap();
        assert_eq!(h.mul(&a, &b).coords(), &[1, 1, 1]);
        assert_eq!(h.mul(&b, &a).coords(), &[1, 1, 0]);
        let x = h.point(&[2, -3, 5]).unwrap();
        assert!(h.mul(&x, &h.inv(&x)).is_identity());
        assert!(h.mul(&h.inv(&x), &x).is_identity());
    }

    #[test]
    fn folner_boxes() {
        let z = GroupId::Z.folner_set(3).unwrap();
        assert_eq!(z.elements.len(), 3);
        let h = GroupId::Heisenberg3.folner_set(2).unwrap();
        assert_eq!(h.elements.len(), 16);
    }

    #[test]
    fn tokens_round_trip() {
        for t in ["Z", "Z^2", "Z^3", "H3"] {
            assert_eq!(t.parse::<GroupId>().unwrap().token(), t);
        }
        assert_eq!("Z^1".parse::<GroupId>().unwrap(), GroupId::Z);
        assert!("Q".parse::<GroupId>().is_err());
    }
}
