use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specwalk::gadget::SignedSparseMatrix;

/// Circulant ±1 matrix with neighbors `i ± 1, i ± 2` and seeded signs.
/// Needs `n ≥ 5` so the four neighbors are distinct.
pub fn signed_circulant(n: usize, seed: u64) -> SignedSparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sign = HashMap::new();
    for i in 0..n {
        for s in [1, 2] {
            let j = (i + s) % n;
            sign.insert((i.min(j), i.max(j)), if rng.random::<bool>() { 1i8 } else { -1 });
        }
    }
    let rows = (0..n)
        .map(|i| {
            let mut row: Vec<(usize, i8)> = [n - 2, n - 1, 1, 2]
                .iter()
                .map(|&s| {
                    let j = (i + s) % n;
                    (j, sign[&(i.min(j), i.max(j))])
                })
                .collect();
            row.sort_unstable();
            row
        })
        .collect();
    SignedSparseMatrix::from_rows(n, rows).expect("circulant signs are symmetric")
}
