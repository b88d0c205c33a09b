//! Parameter selection for the cascade and the exact checks of its hypotheses.

use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::enumerate::Guards;
use crate::error::{Error, Result};
use crate::group::GroupId;
use crate::pattern::binary_entropy;
use crate::shape::Shape;

/// Search grid depth for δ = 2^-i, m₀ = 2^j and η = 2^-i.
const GRID: u32 = 30;

/// Largest tile we materialise as an explicit shape.
pub const MAX_TILE_POINTS: u64 = 100_000;

pub(crate) fn ratio_str<S: Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Safety {
    Certified,
    UnsafeOverride,
}

/// A tile given by box side lengths anchored at the identity, or explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tile {
    Box(Vec<i64>),
    Explicit(Shape),
}

impl Tile {
    pub fn size(&self) -> u128 {
        match self {
            Tile::Box(sides) => sides.iter().map(|&s| s.max(0) as u128).product(),
            Tile::Explicit(s) => s.len() as u128,
        }
    }

    pub fn shape(&self, group: GroupId) -> Result<Shape> {
        match self {
            Tile::Explicit(s) => Ok(s.clone()),
            Tile::Box(sides) => {
                if self.size() > MAX_TILE_POINTS as u128 {
                    return Err(Error::Guard {
                        what: "explicit tile".into(),
                        needed: self.size().to_string(),
                        limit: MAX_TILE_POINTS as u128,
                    });
                }
                Shape::cuboid(group, sides)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeParams {
    pub group: GroupId,
    pub epsilon: f64,
    pub k: usize,
    #[serde(serialize_with = "ratio_str")]
    pub delta: Ratio<i64>,
    pub m0: usize,
    #[serde(serialize_with = "ratio_str")]
    pub eta: Ratio<i64>,
    /// Quasitiles whose union is the marker's S.
    pub s_tiles: Vec<Tile>,
    /// Quasitiles for the periodic-pattern count; their union is the marker's T.
    pub t_tiles: Vec<Tile>,
    pub safety: Safety,
}

impl CascadeParams {
    /// Small parameters run without the certified inequalities.
    pub fn unsafe_override(s: Shape, t: Shape, k: usize, delta: Ratio<i64>, eta: Ratio<i64>) -> Result<CascadeParams> {
        if s.group() != t.group() {
            return Err(Error::GroupMismatch(s.group(), t.group()));
        }
        Ok(CascadeParams {
            group: s.group(),
            epsilon: f64::NAN,
            k,
            delta,
            m0: s.len(),
            eta,
            s_tiles: vec![Tile::Explicit(s)],
            t_tiles: vec![Tile::Explicit(t)],
            safety: Safety::UnsafeOverride,
        })
    }

    fn union(&self, tiles: &[Tile]) -> Result<Shape> {
        let mut it = tiles.iter();
        let first = it.next().ok_or_else(|| Error::config("tiles", "need at least one tile"))?;
        let mut u = first.shape(self.group)?;
        for t in it {
            u = u.union(&t.shape(self.group)?)?;
        }
        Ok(u)
    }

    /// S = union of the S-tiles.
    pub fn s_shape(&self) -> Result<Shape> {
        self.union(&self.s_tiles)
    }

    /// T = union of the T-tiles.
    pub fn t_shape(&self) -> Result<Shape> {
        self.union(&self.t_tiles)
    }
}

/// (k+1)(1+δ)/((1-δ)m₀) + δ.
pub fn density_bound(k: usize, delta: Ratio<i64>, m0: usize) -> Ratio<i128> {
    let delta = Ratio::new(*delta.numer() as i128, *delta.denom() as i128);
    Ratio::from_integer((k + 1) as i128) * (Ratio::one() + delta)
        / ((Ratio::one() - delta) * Ratio::from_integer(m0 as i128))
        + delta
}

fn density_ineq_value(k: usize, delta: Ratio<i64>, m0: usize, log_a: f64) -> Option<f64> {
    let beta = density_bound(k, delta, m0).to_f64()?;
    if beta >= 0.5 {
        return None;
    }
    Some(binary_entropy(beta).ok()? + beta * log_a)
}

fn coverage_ineq_value(k: usize, eta: Ratio<i64>, log_a: f64) -> f64 {
    let eta = eta.to_f64().unwrap_or(f64::NAN);
    log_a * (2.0 / (k as f64 * (1.0 - eta)) + eta)
}

/// Each displayed hypothesis with the value it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamChecks {
    /// 4 log|A| / k < ε.
    pub k_bound: bool,
    pub density_ineq_value: Option<f64>,
    pub density_ineq: bool,
    pub coverage_ineq_value: f64,
    pub coverage_ineq: bool,
    /// |S| >= k and min |S_i| >= m₀.
    pub s_size: bool,
    /// 2k² log_|A| |SS⁻¹| <= |T₁|.
    pub t_size: bool,
    /// |T_i Δ T_i s| < |T_i| / (2k²) for every s in SS⁻¹.
    pub t_invariance: bool,
}

impl ParamChecks {
    pub fn all(&self) -> bool {
        self.k_bound && self.density_ineq && self.coverage_ineq && self.s_size && self.t_size && self.t_invariance
    }
}

fn box_sides(t: &Tile) -> Option<&[i64]> {
    match t {
        Tile::Box(s) => Some(s),
        Tile::Explicit(_) => None,
    }
}

/// |T Δ T v| for a box T and a translation v of Z^d, maximised over |v_i| <= r.
fn box_worst_sym_diff(sides: &[i64], r: i64) -> u128 {
    let full: u128 = sides.iter().map(|&s| s as u128).product();
    let inner: u128 = sides.iter().map(|&s| (s - r).max(0) as u128).product();
    2 * (full - inner)
}

pub fn check_parameters(p: &CascadeParams, alphabet_size: usize) -> Result<ParamChecks> {
    let log_a = (alphabet_size as f64).log2();
    let k = p.k;
    let density_ineq_value = density_ineq_value(k, p.delta, p.m0, log_a);
    let coverage_ineq_value = coverage_ineq_value(k, p.eta, log_a);
    let s_min = p.s_tiles.iter().map(Tile::size).min().unwrap_or(0);
    let s_boxes: Option<Vec<&[i64]>> = p.s_tiles.iter().map(box_sides).collect();
    let t_boxes: Option<Vec<&[i64]>> = p.t_tiles.iter().map(box_sides).collect();
    let two_k2 = 2 * (k as u128) * (k as u128);
    let t_min = p.t_tiles.iter().map(Tile::size).min().unwrap_or(0);
    let (s_len, ss_len, t_size_ok, t_inv_ok) = match (p.group, s_boxes, t_boxes) {
        (GroupId::Z | GroupId::Zd(_), Some(sb), Some(tb)) if sb.len() == 1 => {
            let sides = sb[0];
            let r = sides.iter().copied().max().unwrap_or(1) - 1;
            let ss: u128 = sides.iter().map(|&s| (2 * s - 1) as u128).product();
            let ok = tb.iter().all(|t| {
                let size: u128 = t.iter().map(|&s| s as u128).product();
                two_k2 * box_worst_sym_diff(t, r) < size
            });
            let s_len: u128 = sides.iter().map(|&s| s as u128).product();
            (s_len, ss, None, Some(ok))
        }
        _ => {
            let s = p.s_shape()?;
            let ss = s.product(&s.inverse())?;
            let mut ok = true;
            for t in &p.t_tiles {
                let t = t.shape(p.group)?;
                for g in ss.points() {
                    let d = t.sym_diff(&t.translate(g, crate::shape::Side::Right)?)?.len() as u128;
                    ok &= two_k2 * d < t.len() as u128;
                }
            }
            (s.len() as u128, ss.len() as u128, None::<bool>, Some(ok))
        }
    };
    let _ = t_size_ok;
    let t_size = if alphabet_size < 2 {
        true
    } else {
        two_k2 as f64 * (ss_len as f64).ln() / (alphabet_size as f64).ln() <= t_min as f64
    };
    Ok(ParamChecks {
        k_bound: 4.0 * log_a / (k as f64) < p.epsilon,
        density_ineq: density_ineq_value.is_some_and(|v| v < p.epsilon / 2.0),
        density_ineq_value,
        coverage_ineq: coverage_ineq_value < p.epsilon / 2.0,
        coverage_ineq_value,
        s_size: s_len >= k as u128 && s_min >= p.m0 as u128,
        t_size,
        t_invariance: t_inv_ok.unwrap_or(false),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterChoice {
    pub params: CascadeParams,
    pub checks: ParamChecks,
    /// Whether the marker and tiles fit the enumeration guards.
    pub feasible: bool,
    pub warnings: Vec<String>,
}

fn pow2_ratio(i: u32) -> Ratio<i64> {
    Ratio::new(1, 1i64 << i)
}

/// Smallest box side with side^d >= n.
fn box_side(n: u128, d: usize) -> i64 {
    let mut s = 1i64;
    while (s as u128).pow(d as u32) < n {
        s += 1;
    }
    s
}

/// k from ε, then (δ, m₀), then η, then box tiles meeting the T constraints.
pub fn choose_parameters(epsilon: f64, alphabet_size: usize, group: GroupId, guards: &Guards) -> Result<ParameterChoice> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if alphabet_size == 0 {
        return Err(Error::Domain("alphabet must be non-empty".into()));
    }
    let log_a = (alphabet_size as f64).log2();
    let k = (4.0 * log_a / epsilon).floor() as usize + 1;
    let mut warnings = Vec::new();
    let mut density_ineq = None;
    'outer: for j in 0..=GRID {
        for i in 1..=GRID {
            let (d, m0) = (pow2_ratio(i), 1usize << j);
            if density_ineq_value(k, d, m0, log_a).is_some_and(|v| v < epsilon / 2.0) {
                density_ineq = Some((d, m0));
                break 'outer;
            }
        }
    }
    let (delta, m0) = density_ineq.unwrap_or_else(|| {
        warnings.push("no (delta, m0) on the search grid satisfies the density inequality".into());
        (pow2_ratio(GRID), 1usize << GRID)
    });
    let eta = (1..=GRID).map(pow2_ratio).find(|&e| coverage_ineq_value(k, e, log_a) < epsilon / 2.0).unwrap_or_else(|| {
        warnings.push("no eta on the search grid satisfies the coverage inequality".into());
        pow2_ratio(GRID)
    });
    let d = group.dim();
    let s_side = box_side(m0.max(k) as u128, d);
    let r = s_side - 1;
    let two_k2 = 2 * (k as u128) * (k as u128);
    let ss_len = ((2 * s_side - 1) as u128).pow(d as u32);
    let need = if alphabet_size < 2 {
        1.0
    } else {
        two_k2 as f64 * (ss_len as f64).ln() / (alphabet_size as f64).ln()
    };
    let mut t_side = 1i64;
    loop {
        let sides = vec![t_side; d];
        let size = (t_side as u128).pow(d as u32);
        if size as f64 >= need && two_k2 * box_worst_sym_diff(&sides, r) < size {
            break;
        }
        t_side = if t_side < 1 << 20 { t_side + 1 } else { t_side.saturating_mul(2) };
        if t_side > 1 << 40 {
            warnings.push("T tile search exceeded 2^40 per side".into());
            break;
        }
    }
    if group == GroupId::Heisenberg3 {
        warnings.push("box tiles for H3 use the Z^3 side formula; invariance is re-checked on explicit shapes only when small".into());
    }
    let params = CascadeParams {
        group,
        epsilon,
        k,
        delta,
        m0,
        eta,
        s_tiles: vec![Tile::Box(vec![s_side; d])],
        t_tiles: vec![Tile::Box(vec![t_side; d])],
        safety: Safety::Certified,
    };
    let t_cells = (t_side as u128).pow(d as u32);
    let feasible = t_cells <= MAX_TILE_POINTS as u128
        && guards.check_space("marker pattern space", alphabet_size, t_cells as usize).is_ok();
    if !feasible {
        warnings.push(format!(
            "certified T has {t_cells} cells; |A|^|T| is far beyond desk scale, run with unsafe-override and smaller values"
        ));
    }
    let checks = if group == GroupId::Heisenberg3 && !feasible {
        ParamChecks {
            k_bound: 4.0 * log_a / (k as f64) < epsilon,
            density_ineq_value: density_ineq_value(k, delta, m0, log_a),
            density_ineq: density_ineq.is_some(),
            coverage_ineq_value: coverage_ineq_value(k, eta, log_a),
            coverage_ineq: coverage_ineq_value(k, eta, log_a) < epsilon / 2.0,
            s_size: true,
            t_size: t_cells as f64 >= need,
            t_invariance: false,
        }
    } else {
        check_parameters(&params, alphabet_size)?
    };
    Ok(ParameterChoice { params, checks, feasible, warnings })
}
