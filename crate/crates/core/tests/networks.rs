use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use steiner_cover_core::covering::{canonical_covering, monodromy, subset_loop};
use steiner_cover_core::families::{hexagon_families_derived, pentagon_families_printed, ClassTCatalogue};
use steiner_cover_core::fixtures::{hexagon_config, pentagon_config};
use steiner_cover_core::sampling::{planar_topologies, random_convex_config, random_network};

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn perimeter_is_twice_length(seed in any::<u64>(), m in 2usize..=6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (_, cov) = random_convex_config(&mut rng, m);
        let (net, set) = random_network(&mut rng, &cov, &planar_topologies(m)).unwrap();
        prop_assert!((set.perimeter() - 2.0 * net.length()).abs() <= 1e-9);
    }
}

#[test]
fn split_lemma_and_cover_hold() {
    let cov = canonical_covering(&pentagon_config()).unwrap();
    let cat = ClassTCatalogue::build(&cov).unwrap();
    let split = cat.split_check();
    assert!(split.checked > 0 && split.violations.is_empty(), "{:?}", split.violations);
    assert!(cat.cover(&pentagon_families_printed()).passed());

    let cov = canonical_covering(&hexagon_config()).unwrap();
    let cat = ClassTCatalogue::build(&cov).unwrap();
    let split = cat.split_check();
    assert!(split.checked > 0 && split.violations.is_empty(), "{:?}", split.violations);
    let cover = cat.cover(&hexagon_families_derived());
    assert!(cover.passed(), "{} uncovered", cover.uncovered.len());
}

#[test]
fn pentagon_subset_loops() {
    let cov = canonical_covering(&pentagon_config()).unwrap();
    for mask in 1u32..32 {
        let subset: Vec<usize> = (1..=5).filter(|j| mask & (1 << (j - 1)) != 0).collect();
        let perm = monodromy(&cov, &subset_loop(&cov, &subset)).unwrap();
        if subset.len() == 5 {
            assert!(perm.is_identity());
        } else {
            assert!(perm.is_transitive(), "{subset:?} {perm}");
        }
    }
    assert!(monodromy(&cov, &subset_loop(&cov, &[])).unwrap().is_identity());
}
