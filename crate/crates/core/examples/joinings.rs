//! Joinings of two factors of one shift: count subadditivity and the fiber inequality.

use markerlab::cascade::join::{check_joining_subadditivity, check_special_flower, join};
use markerlab::enumerate::RunOptions;
use markerlab::group::GroupId;
use markerlab::pattern::Alphabet;
use markerlab::subshift::{BlockCode, SubshiftSpec};

fn main() -> markerlab::error::Result<()> {
    let opts = RunOptions::default();
    let x = SubshiftSpec::golden_mean();
    let id = BlockCode::identity(Alphabet::numeric(2), GroupId::Z);
    let xor = BlockCode::xor();
    for n in [4, 8, 12] {
        let r = check_joining_subadditivity(&join(&id, &xor, &x, n, &opts)?);
        println!("n={n:>2}: |J|={:>4} <= {:>4} x {:>4}: {}", r.joined, r.left, r.right, r.holds);
    }
    let konst = BlockCode::constant(Alphabet::numeric(2), Alphabet::numeric(1), GroupId::Z, 0)?;
    let f = check_special_flower(&id, &xor, &konst, &x, 8, &opts)?;
    println!("fibers over the joined factor {} <= over the left factor {}: {}", f.max_joined_fiber, f.max_left_fiber, f.holds);
    Ok(())
}
