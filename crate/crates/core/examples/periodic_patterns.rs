//! Exhaustive counts of patterns with k periods, and the binomial tail bound.

use num_rational::Ratio;

use markerlab::enumerate::RunOptions;
use markerlab::pattern::{binomial_tail_check, count_k_periodic};
use markerlab::shape::Shape;

fn main() -> markerlab::error::Result<()> {
    let opts = RunOptions::default();
    let s = Shape::from_ints(&[2, 3, 4, 6]);
    for len in [8, 12, 20] {
        let t = Shape::interval(0, len);
        for k in [2, 3] {
            let c = count_k_periodic(2, &t, &s, k, &opts)?;
            println!(
                "|T|={len:>2} k={k}: {:>6} patterns, bound 2^{:.1}, within bound {}, hypotheses {}",
                c.count, c.bound_log2, c.within_bound, c.hypotheses
            );
        }
    }
    for (n, j) in [(50, 10), (100, 25), (200, 49)] {
        let b = binomial_tail_check(n, Ratio::new(j, 100))?;
        println!("n={n} alpha={j}/100: log2 sum {:.4} <= n H(alpha) {:.4}: {}", b.sum_log2, b.bound_log2, b.holds);
    }
    Ok(())
}
