mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redist_tda::graph::{canonical_class, DEFAULT_CANON_LIMIT};

#[test]
fn canonical_keys_agree_with_permutation_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..400 {
        let k = rng.gen_range(1..=7);
        let p = rng.gen_range(0.0..0.7);
        let e1 = random_connected(k, p, &mut rng);
        let e2 = if rng.gen_bool(0.5) {
            // random relabeling of e1
            let mut perm: Vec<usize> = (0..k).collect();
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            e1.iter().map(|&(u, v)| (perm[u], perm[v])).collect()
        } else {
            random_connected(k, p, &mut rng)
        };
        let k1 = canonical_class(&district_graph(k, &e1), DEFAULT_CANON_LIMIT).unwrap();
        let k2 = canonical_class(&district_graph(k, &e2), DEFAULT_CANON_LIMIT).unwrap();
        assert_eq!(k1 == k2, isomorphic(k, &e1, &e2), "{e1:?} vs {e2:?}");
    }
}
