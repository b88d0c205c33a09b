//! Verification suites: parameter grids over the library's checks.

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cascade::join::{cascade_stage_joins, check_joining_subadditivity, check_special_flower, join};
use crate::cascade::{run_cascade_data, summarize, CascadeParams};
use crate::enumerate::RunOptions;
use crate::error::{Error, Result};
use crate::group::GroupId;
use crate::marker::{build_marker, check_density_lemma, verify_marker_language, verify_marker_sampled, MarkerParams, MarkerVariant};
use crate::pattern::{binomial_tail_check, count_k_periodic, Alphabet, Pattern};
use crate::quasitile::covering_with_bound;
use crate::shape::Shape;
use crate::subshift::{product_alphabet, BlockCode, SubshiftSpec};

pub const SUITES: [&str; 7] = ["periods", "grinch", "covering", "marker", "density", "cascade", "joining"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instances: Vec<Instance>,
    pub violations: usize,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, instances: Vec<Instance>) -> SuiteReport {
        let violations = instances.iter().filter(|i| !i.pass).count();
        SuiteReport { suite: suite.into(), instances, violations, pass: violations == 0 }
    }
}

fn inst(name: impl Into<String>, pass: bool, detail: impl Serialize) -> Result<Instance> {
    Ok(Instance { name: name.into(), pass, detail: serde_json::to_value(detail)? })
}

/// Marker inputs shared by the marker, density and cascade suites.
#[derive(Debug, Clone)]
pub struct MarkerInstance {
    pub x: SubshiftSpec,
    pub s: Shape,
    pub t: Shape,
    pub k: usize,
    pub variant: MarkerVariant,
    pub window: usize,
    pub density_n: usize,
    pub tiles: Vec<Shape>,
    pub delta: Ratio<i64>,
    pub random_windows: usize,
    pub random_window_len: usize,
    pub seed: u64,
}

impl MarkerInstance {
    /// S = {0,1,2}, T = [0,8), k = 2, window 14, interval tile of length 8 and δ = 1/4.
    pub fn standard(x: SubshiftSpec) -> MarkerInstance {
        MarkerInstance {
            x,
            s: Shape::interval(0, 3),
            t: Shape::interval(0, 8),
            k: 2,
            variant: MarkerVariant::Standard,
            window: 14,
            density_n: 12,
            tiles: vec![Shape::interval(0, 8)],
            delta: Ratio::new(1, 4),
            random_windows: 10_000,
            random_window_len: 32,
            seed: 0,
        }
    }
}

/// Exhaustive periodic-pattern counts over the standard grid plus one instance meeting the hypotheses.
pub fn suite_periods(opts: &RunOptions) -> Result<SuiteReport> {
    let z2 = GroupId::zd(2)?;
    let mut cases: Vec<(String, Shape, Shape)> = Vec::new();
    let z_s = [vec![1, 2], vec![1, 2, 3], vec![0, 1, 2], vec![-1, 1]];
    for len in 6..=12 {
        for s in &z_s {
            cases.push((format!("Z T=[0,{len}) S={s:?}"), Shape::interval(0, len), Shape::from_ints(s)));
        }
    }
    let z2_s: [Vec<Vec<i64>>; 3] =
        [vec![vec![1, 0], vec![0, 1]], vec![vec![0, 0], vec![1, 0], vec![0, 1]], vec![vec![1, 0], vec![2, 0], vec![0, 1]]];
    for sides in [[3, 3], [4, 3]] {
        for s in &z2_s {
            cases.push((
                format!("Z2 T={}x{} S={s:?}", sides[0], sides[1]),
                Shape::cuboid(z2, &sides)?,
                Shape::from_tuples(z2, s)?,
            ));
        }
    }
    let mut instances = Vec::new();
    for a in [2usize, 3] {
        for (name, t, s) in &cases {
            for k in [2usize, 3, 4] {
                let c = count_k_periodic(a, t, s, k, opts)?;
                // the bound is claimed only under the hypotheses
                instances.push(inst(format!("|A|={a} {name} k={k}"), !c.hypotheses || c.within_bound, &c)?);
            }
        }
    }
    let c = count_k_periodic(2, &Shape::interval(0, 20), &Shape::from_ints(&[0, 1]), 2, opts)?;
    instances.push(inst("|A|=2 Z T=[0,20) S=[0, 1] k=2", c.hypotheses && c.within_bound, &c)?);
    Ok(SuiteReport::new("periods", instances))
}

/// Binomial tail bound for n <= 200 and α = 1/100, ..., 49/100.
pub fn suite_grinch() -> Result<SuiteReport> {
    let mut instances = Vec::new();
    for j in 1..=49 {
        let alpha = Ratio::new(j, 100);
        let mut worst = f64::NEG_INFINITY;
        let mut fails = Vec::new();
        for n in 1..=200u32 {
            let b = binomial_tail_check(n, alpha)?;
            worst = worst.max(b.sum_log2 - b.bound_log2);
            if !b.holds {
                fails.push(n);
            }
        }
        instances.push(inst(
            format!("alpha={alpha}"),
            fails.is_empty(),
            json!({"n_max": 200, "worst_log2_margin": worst, "failing_n": fails}),
        )?);
    }
    Ok(SuiteReport::new("grinch", instances))
}

/// Covering bound on Z and Z² boxes wherever the invariance precondition holds.
pub fn suite_covering() -> Result<SuiteReport> {
    let z2 = GroupId::zd(2)?;
    let deltas = [Ratio::new(1, 10), Ratio::new(1, 5), Ratio::new(1, 4)];
    let mut instances = Vec::new();
    for m in [5i64, 8, 9] {
        let z_tile = Shape::interval(0, m);
        let z2_sides = match m {
            5 => [5, 1],
            8 => [4, 2],
            _ => [3, 3],
        };
        let z2_tile = Shape::cuboid(z2, &z2_sides)?;
        for &delta in &deltas {
            for n in 1..=40 {
                let rep = covering_with_bound(std::slice::from_ref(&z_tile), delta, n)?;
                instances.push(inst(format!("Z m={m} delta={delta} n={n}"), rep.passes(), summary(&rep))?);
            }
            for n in (4..=40).step_by(4) {
                let rep = covering_with_bound(std::slice::from_ref(&z2_tile), delta, n)?;
                instances.push(inst(
                    format!("Z2 {}x{} delta={delta} n={n}", z2_sides[0], z2_sides[1]),
                    rep.passes(),
                    summary(&rep),
                )?);
            }
        }
    }
    Ok(SuiteReport::new("covering", instances))
}

fn summary(r: &crate::quasitile::CoveringReport) -> Value {
    json!({
        "n": r.n, "folner_size": r.folner_size, "m": r.m, "delta": r.delta,
        "precondition_ratio": r.precondition_ratio, "precondition_holds": r.precondition_holds,
        "center_count": r.center_count, "bound": r.bound, "bound_holds": r.bound_holds, "cover_holds": r.cover_holds,
    })
}

/// Exhaustive marker verification on every admissible window, and the k = 1 degeneracy.
pub fn suite_marker(mi: &MarkerInstance, opts: &RunOptions) -> Result<SuiteReport> {
    let p = MarkerParams::new(mi.s.clone(), mi.t.clone(), mi.k, mi.x.clone())?;
    let m = build_marker(p, opts)?.with_variant(mi.variant);
    let w = window_shape(mi.x.group(), mi.window)?;
    let v = verify_marker_language(&m, &w, opts)?;
    let mut instances = vec![inst(
        format!("k={} window={}", mi.k, mi.window),
        v.holds(),
        json!({"r": m.r(), "variant": mi.variant, "verification": v}),
    )?];
    if mi.random_windows > 0 {
        let w = window_shape(mi.x.group(), mi.random_window_len)?;
        let v = verify_marker_sampled(&m, &w, mi.random_windows, mi.seed, opts)?;
        instances.push(inst(
            format!("random windows={} length={} seed={}", mi.random_windows, mi.random_window_len, mi.seed),
            v.holds(),
            json!({"verification": v}),
        )?);
    }
    let trivial = build_marker(MarkerParams::new(mi.s.clone(), mi.t.clone(), 1, mi.x.clone())?, opts)?;
    instances.push(inst("k=1", trivial.is_trivial(), json!({"r": trivial.r()}))?);
    Ok(SuiteReport::new("marker", instances))
}

fn window_shape(group: GroupId, n: usize) -> Result<Shape> {
    if group.is_z() {
        Ok(Shape::interval(0, n as i64))
    } else {
        Ok(group.folner_set(n)?.elements)
    }
}

/// Observed D_n(F) against the density bound.
pub fn suite_density(mi: &MarkerInstance, opts: &RunOptions) -> Result<SuiteReport> {
    let p = MarkerParams::new(mi.s.clone(), mi.t.clone(), mi.k, mi.x.clone())?;
    let m = build_marker(p, opts)?.with_variant(mi.variant);
    let rep = match check_density_lemma(&m, &mi.tiles, mi.delta, mi.density_n, opts) {
        Err(Error::Precondition(msg)) => {
            return Ok(SuiteReport::new("density", vec![inst("precondition", false, json!({"error": msg}))?]));
        }
        r => r?,
    };
    Ok(SuiteReport::new("density", vec![inst(format!("n={}", mi.density_n), rep.holds, &rep)?]))
}

/// The cascade's per-stage checks; advisory checks are listed but never fail the suite.
pub fn suite_cascade(
    x: &SubshiftSpec,
    params: &CascadeParams,
    stages: usize,
    n: usize,
    tolerance: f64,
    opts: &RunOptions,
) -> Result<(SuiteReport, crate::cascade::CascadeReport)> {
    let run = run_cascade_data(x, params, stages, n, None, opts)?;
    let rep = summarize(x, params, stages, n, &run, tolerance)?;
    let instances = rep
        .checks
        .iter()
        .map(|c| {
            let name = match c.stage {
                Some(s) => format!("{} m={s}", c.name),
                None => c.name.clone(),
            };
            inst(name, c.holds || c.advisory, c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((SuiteReport::new("cascade", instances), rep))
}

/// S = {0,1,2}, T = [0,8), k = 2, δ = η = 1/4.
pub fn standard_cascade_params() -> CascadeParams {
    CascadeParams::unsafe_override(Shape::interval(0, 3), Shape::interval(0, 8), 2, Ratio::new(1, 4), Ratio::new(1, 4))
        .expect("same group")
}

/// Golden mean in each coordinate of the product alphabet.
pub fn golden_product() -> Result<(SubshiftSpec, Alphabet, Alphabet)> {
    let (l, r) = (Alphabet::numeric(2), Alphabet::numeric(2));
    let ab = product_alphabet(&l, &r);
    let mut forbidden = Vec::new();
    for a in 0..4u8 {
        for b in 0..4u8 {
            if a / 2 == 1 && b / 2 == 1 || a % 2 == 1 && b % 2 == 1 {
                forbidden.push(Pattern::z_word(&[a, b]));
            }
        }
    }
    Ok((SubshiftSpec::sft(GroupId::Z, ab, forbidden)?, l, r))
}

/// Joined-count subadditivity and the special-flower fiber inequality on the standard examples.
pub fn suite_joining(x: &SubshiftSpec, n_max: usize, opts: &RunOptions) -> Result<SuiteReport> {
    let grp = x.group();
    let a = x.alphabet().clone();
    let id = BlockCode::identity(a.clone(), grp);
    let one = Alphabet::numeric(1);
    let konst = BlockCode::constant(a.clone(), one.clone(), grp, 0)?;
    let mut instances = Vec::new();
    for n in 1..=n_max {
        let d = check_joining_subadditivity(&join(&id, &id, x, n, opts)?);
        instances.push(inst(format!("diagonal n={n}"), d.holds, &d)?);
        let c = join(&id, &konst, x, n, opts)?;
        let cr = check_joining_subadditivity(&c);
        instances.push(inst(format!("identity-constant n={n}"), cr.holds && c.joined_count() == c.left_count(), &cr)?);
    }
    let (prod, l, r) = golden_product()?;
    let p1 = BlockCode::projection(&l, &r, true, GroupId::Z);
    let p2 = BlockCode::projection(&l, &r, false, GroupId::Z);
    for n in 1..=n_max {
        let rep = check_joining_subadditivity(&join(&p1, &p2, &prod, n, opts)?);
        let exact = rep.joined == rep.left * rep.right;
        instances.push(inst(format!("product n={n}"), rep.holds && exact, &rep)?);
    }
    let full2 = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
    let joins = cascade_stage_joins(&full2, &standard_cascade_params(), 3, n_max, &BlockCode::xor(), opts)?;
    for (m, j) in joins.iter().enumerate() {
        for n in 1..=n_max {
            let rep = check_joining_subadditivity(&j.restrict(&Shape::interval(0, n as i64))?);
            instances.push(inst(format!("cascade stage {m} with xor n={n}"), rep.holds, &rep)?);
        }
    }
    let id2 = BlockCode::identity(Alphabet::numeric(2), GroupId::Z);
    let k2 = BlockCode::constant(Alphabet::numeric(2), one, GroupId::Z, 0)?;
    let gm = SubshiftSpec::golden_mean();
    for n in 1..=n_max {
        let f = check_special_flower(&id2, &id2, &BlockCode::xor(), &full2, n, opts)?;
        instances.push(inst(format!("flower identity-left n={n}"), f.holds, &f)?);
        let f = check_special_flower(&id2, &BlockCode::xor(), &k2, &full2, n, opts)?;
        instances.push(inst(
            format!("flower xor-left trivial-right n={n}"),
            f.holds && f.max_joined_fiber == f.max_left_fiber,
            &f,
        )?);
        let f = check_special_flower(&id2, &BlockCode::xor(), &k2, &gm, n, opts)?;
        instances.push(inst(format!("flower constant-right golden-mean n={n}"), f.holds, &f)?);
    }
    Ok(SuiteReport::new("joining", instances))
}
