//! Builds a marker set, evaluates it on a word and verifies both marker conclusions exhaustively.

use num_rational::Ratio;

use markerlab::enumerate::RunOptions;
use markerlab::marker::{
    build_marker, check_density_lemma, eval_marker_field, marker_summary, verify_marker_language, MarkerParams, Tri,
};
use markerlab::pattern::Pattern;
use markerlab::shape::Shape;
use markerlab::subshift::SubshiftSpec;

fn main() -> markerlab::error::Result<()> {
    let opts = RunOptions::default();
    let x = SubshiftSpec::golden_mean();
    let m = build_marker(MarkerParams::new(Shape::interval(0, 3), Shape::interval(0, 8), 2, x)?, &opts)?;
    let s = marker_summary(&m, 4);
    println!("{} non-periodic patterns on T, e.g. {:?}", s.r, s.sample_members);

    let word = [0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0];
    let field = eval_marker_field(&m, &Pattern::z_word(&word))?;
    let row: String = field
        .window
        .points()
        .iter()
        .map(|g| match field.get(g) {
            Some(Tri::InF) => 'F',
            Some(Tri::NotInF) => '.',
            _ => '?',
        })
        .collect();
    println!("word  {}\nfield {row}", word.iter().map(|c| c.to_string()).collect::<String>());

    let v = verify_marker_language(&m, &Shape::interval(0, 14), &opts)?;
    println!("length-14 windows: {} disjointness and {} periodicity violations", v.disjoint_violations, v.periodic_violations);
    let d = check_density_lemma(&m, &[Shape::interval(0, 8)], Ratio::new(1, 4), 12, &opts)?;
    println!("D_12(F) = {} <= {}: {}", d.density.density, d.bound, d.holds);
    Ok(())
}
