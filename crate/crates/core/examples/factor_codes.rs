//! Sliding block codes, image languages and the Bowen-type inequality.

use markerlab::enumerate::RunOptions;
use markerlab::group::GroupId;
use markerlab::pattern::Alphabet;
use markerlab::shape::Shape;
use markerlab::subshift::{check_bowen_inequality, language, push_language, BlockCode, SubshiftSpec};

fn main() -> markerlab::error::Result<()> {
    let opts = RunOptions::default();
    let gm = SubshiftSpec::golden_mean();
    let xor = BlockCode::xor();
    let src = language(&gm, &Shape::interval(0, 9), &opts)?;
    let img = push_language(&src, &xor)?;
    println!("golden mean on [0,9): {} words; xor image on [0,8): {} words", src.len(), img.len());
    for w in img.words().iter().take(5) {
        println!("  {}", img_render(w));
    }
    let full = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(2));
    for (name, x) in [("golden mean", &gm), ("full 2-shift", &full)] {
        let b = check_bowen_inequality(&xor, x, 10, &opts)?;
        println!(
            "{name}: h(X) {:.4} <= h(image) {:.4} + h(X|image) {:.4} (+{}): {}",
            b.h_source, b.h_image, b.h_conditional, b.tolerance, b.holds
        );
    }
    Ok(())
}

fn img_render(w: &[u8]) -> String {
    Alphabet::numeric(2).render(w)
}
