//! Window-count entropy estimates against the Perron value, for built-in and custom shifts.

use markerlab::enumerate::RunOptions;
use markerlab::group::GroupId;
use markerlab::pattern::{Alphabet, Pattern};
use markerlab::subshift::{entropy_estimate, entropy_exact_z, SubshiftSpec};

fn main() -> markerlab::error::Result<()> {
    let opts = RunOptions::default();
    // no two consecutive 2s, and 0 is never followed by 1
    let custom = SubshiftSpec::sft(
        GroupId::Z,
        Alphabet::numeric(3),
        vec![Pattern::z_word(&[2, 2]), Pattern::z_word(&[0, 1])],
    )?;
    let shifts = [
        ("golden mean", SubshiftSpec::golden_mean()),
        ("full 2-shift", SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2))),
        ("custom", custom),
    ];
    for (name, x) in &shifts {
        println!("{name}: Perron {:.6} bits", entropy_exact_z(x, &opts)?);
        for n in [4, 8, 16, 24] {
            let e = entropy_estimate(x, n, &opts)?;
            println!("  n={n:>2} count={:>10} bits={:.6}", e.count, e.bits);
        }
    }
    let z2 = SubshiftSpec::full_shift(GroupId::zd(2)?, Alphabet::numeric(2));
    println!("full shift on Z2, n=3: {:.6} bits", entropy_estimate(&z2, 3, &opts)?.bits);
    Ok(())
}
