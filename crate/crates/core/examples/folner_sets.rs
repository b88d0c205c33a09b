//! Følner boxes on Z, Z² and the Heisenberg group, with their invariance ratios.

use markerlab::group::{invariance_ratio, GroupId};
use markerlab::shape::Shape;

fn main() -> markerlab::error::Result<()> {
    for g in [GroupId::Z, GroupId::zd(2)?, GroupId::Heisenberg3] {
        let gens: Vec<_> = g.enumeration_prefix(2 * g.dim() + 1);
        let k = Shape::new(g, gens)?;
        println!("{g}: first elements {:?}", k.points().iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>());
        for n in [2, 4, 8] {
            let f = g.folner_set(n)?.elements;
            let r = invariance_ratio(&k, &f)?;
            println!("  n={n:>2} |F_n|={:>5} |KF_n Δ F_n|/|F_n| = {r}", f.len());
        }
    }
    Ok(())
}
