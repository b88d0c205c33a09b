//! The entropy-lowering cascade on the full 2-shift, and the certified parameter search.

use num_rational::Ratio;

use markerlab::cascade::{choose_parameters, run_cascade, CascadeParams};
use markerlab::enumerate::{Guards, RunOptions};
use markerlab::group::GroupId;
use markerlab::pattern::Alphabet;
use markerlab::shape::Shape;
use markerlab::subshift::SubshiftSpec;

fn main() -> markerlab::error::Result<()> {
    let choice = choose_parameters(1.0, 2, GroupId::Z, &Guards::default())?;
    println!("epsilon=1: k={} feasible={} {:?}", choice.params.k, choice.feasible, choice.warnings);

    let x = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
    let p = CascadeParams::unsafe_override(Shape::interval(0, 3), Shape::interval(0, 8), 2, Ratio::new(1, 4), Ratio::new(1, 4))?;
    let rep = run_cascade(&x, &p, 3, 10, &RunOptions::default())?;
    let mut csv = Vec::new();
    rep.write_ladder_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    for c in &rep.checks {
        println!("{:<24} m={:?} {} <= {} {}", c.name, c.stage, c.lhs, c.rhs, if c.holds { "ok" } else if c.advisory { "advisory" } else { "FAIL" });
    }
    Ok(())
}
