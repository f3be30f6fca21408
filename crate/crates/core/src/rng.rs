//! Counter-based random substreams.
//!
//! Path `m` of an ensemble always draws from ChaCha8 stream `m` of the key
//! derived from the master seed, so a path's noise does not depend on which
//! thread generates it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Generator for substream `stream` of `master_seed`.
pub fn substream(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Fill `out` with i.i.d. standard normals from substream `stream`.
pub fn fill_standard_normal(master_seed: u64, stream: u64, out: &mut [f64]) {
    let mut rng = substream(master_seed, stream);
    for x in out.iter_mut() {
        *x = StandardNormal.sample(&mut rng);
    }
}

pub fn standard_normals(master_seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    fill_standard_normal(master_seed, stream, &mut v);
    v
}
