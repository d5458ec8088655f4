use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Latin hypercube design on `[-1, 1]^dim`.
///
/// Each dimension is cut into `count` equal strata; a random permutation pairs
/// strata across dimensions and each point is jittered uniformly inside its
/// stratum. Output depends only on the arguments.
pub fn lhs_samples(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![0.0; dim]; count];
    let width = 2.0 / count as f64;
    let mut strata: Vec<usize> = (0..count).collect();
    for d in 0..dim {
        strata.shuffle(&mut rng);
        for (point, &s) in out.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            point[d] = (-1.0 + (s as f64 + u) * width).min(1.0);
        }
    }
    out
}
