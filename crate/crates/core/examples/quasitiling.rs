//! Greedy center families for a quasitile system, and the covering bound on Z and Z².

use num_rational::Ratio;

use markerlab::group::GroupId;
use markerlab::quasitile::{covering_with_bound, find_centers, verify_centers, QuasitileSystem};
use markerlab::shape::Shape;

fn main() -> markerlab::error::Result<()> {
    let q = QuasitileSystem::new(vec![Shape::interval(0, 4), Shape::interval(0, 16)], Ratio::new(1, 4))?;
    let target = Shape::interval(0, 200);
    match find_centers(&q, &target)? {
        Some(fam) => {
            for (tile, c) in q.tiles().iter().zip(&fam.centers) {
                println!("tile of size {:>2}: {} centers", tile.len(), c.len());
            }
            println!("checks: {:?}", verify_centers(&q, &fam)?);
        }
        None => println!("no family for this target"),
    }
    let z2 = GroupId::zd(2)?;
    for (tile, n) in [(Shape::interval(0, 8), 40), (Shape::cuboid(z2, &[3, 3])?, 40)] {
        let r = covering_with_bound(&[tile], Ratio::new(1, 4), n)?;
        println!(
            "{} m={} n={}: precondition {} ({}), |C|={:?} <= {}: {}, cover {}",
            r.folner_size, r.m, r.n, r.precondition_holds, r.precondition_ratio, r.center_count, r.bound, r.bound_holds, r.cover_holds
        );
    }
    Ok(())
}
