//! Property checks against brute-force oracles written independently of the library.

use num_rational::Ratio;
use proptest::prelude::*;

use markerlab::cascade::join::{check_joining_subadditivity, join};
use markerlab::enumerate::RunOptions;
use markerlab::group::GroupId;
use markerlab::pattern::{binomial_tail_check, count_k_periodic, Alphabet, Pattern};
use markerlab::quasitile::covering_with_bound;
use markerlab::shape::Shape;
use markerlab::subshift::{entropy_estimate, language, BlockCode, SubshiftSpec};

fn words(a: u8, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|w| (0..a).map(move |c| [w.clone(), vec![c]].concat())).collect();
    }
    out
}

fn has_period(w: &[u8], s: i64) -> bool {
    let n = w.len() as i64;
    (0..n).filter(|&i| (0..n).contains(&(i + s))).all(|i| w[i as usize] == w[(i + s) as usize])
}

fn avoids(w: &[u8], forbidden: &[Vec<u8>]) -> bool {
    forbidden.iter().all(|f| f.len() > w.len() || !w.windows(f.len()).any(|x| x == f.as_slice()))
}

fn opts() -> RunOptions {
    RunOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn periodic_count_matches_brute_force(
        a in 2u8..=3,
        len in 1i64..=7,
        s in proptest::collection::btree_set(-3i64..=3, 1..=4),
        k in 1usize..=3,
    ) {
        let s: Vec<i64> = s.into_iter().collect();
        let got = count_k_periodic(a as usize, &Shape::interval(0, len), &Shape::from_ints(&s), k, &opts()).unwrap();
        let want = words(a, len as usize)
            .iter()
            .filter(|w| s.iter().filter(|&&p| has_period(w, p)).count() >= k)
            .count() as u64;
        prop_assert_eq!(got.count, want);
    }

    #[test]
    fn sft_language_matches_brute_force(
        forbidden in proptest::collection::vec(proptest::collection::vec(0u8..2, 1..=3), 0..=3),
        n in 1usize..=8,
    ) {
        let pats = forbidden.iter().map(|f| Pattern::z_word(f)).collect();
        let x = SubshiftSpec::sft(GroupId::Z, Alphabet::numeric(2), pats).unwrap();
        // spans <= 3 give a 4-vertex 2-block graph, so a 5-cell extension on each side reaches a cycle
        let mut brute: Vec<Vec<u8>> = words(2, n + 10)
            .into_iter()
            .filter(|w| avoids(w, &forbidden))
            .map(|w| w[5..5 + n].to_vec())
            .collect();
        brute.sort();
        brute.dedup();
        let got = language(&x, &Shape::interval(0, n as i64), &opts()).unwrap();
        let mut got: Vec<Vec<u8>> = got.words().to_vec();
        got.sort();
        prop_assert_eq!(got, brute);
    }

    #[test]
    fn binomial_sum_matches_pascal(n in 1u32..=120, j in 0i64..50) {
        let alpha = Ratio::new(j, 100);
        let r = binomial_tail_check(n, alpha).unwrap();
        let kmax = (j as u32 * n) / 100;
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        let sum: u128 = row[..=kmax as usize].iter().sum();
        prop_assert_eq!(r.sum.to_string(), sum.to_string());
        prop_assert!(r.holds);
    }

    #[test]
    fn covering_bound_holds_under_its_precondition(m in 3i64..=10, d in 1i64..=4, n in 1usize..=40) {
        let delta = Ratio::new(d, 16);
        let r = covering_with_bound(&[Shape::interval(0, m)], delta, n).unwrap();
        if r.precondition_holds {
            prop_assert!(r.bound_holds && r.cover_holds);
        }
    }

    #[test]
    fn full_shift_entropy_is_log_alphabet(a in 2usize..=4, n in 1usize..=20) {
        let x = SubshiftSpec::full_shift(GroupId::Z, Alphabet::numeric(a));
        let e = entropy_estimate(&x, n, &opts()).unwrap();
        prop_assert_eq!(e.count, (a as u128).pow(n as u32));
        prop_assert!((e.bits - (a as f64).log2()).abs() < 1e-12);
    }

    #[test]
    fn joins_are_subadditive(n in 1usize..=9) {
        let x = SubshiftSpec::golden_mean();
        let id = BlockCode::identity(Alphabet::numeric(2), GroupId::Z);
        let r = check_joining_subadditivity(&join(&id, &BlockCode::xor(), &x, n, &opts()).unwrap());
        prop_assert!(r.holds);
        // (x|[0,n), xor image) determines x on [0,n], and conversely
        prop_assert_eq!(r.joined as u128, entropy_estimate(&x, n + 1, &opts()).unwrap().count);
    }
}

#[test]
fn golden_mean_counts_are_fibonacci() {
    let x = SubshiftSpec::golden_mean();
    for n in 1..=14 {
        let brute = words(2, n).into_iter().filter(|w| !w.windows(2).any(|p| p == [1, 1])).count() as u128;
        assert_eq!(entropy_estimate(&x, n, &opts()).unwrap().count, brute);
    }
}
