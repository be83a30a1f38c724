use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::peaks::PeakSet;
use crate::error::{domain, Result};

/// Multiply each amplitude by `1 + ε u`, `u` uniform on `[-1, 1]`, reproducible per seed.
pub fn inject_noise(peaks: &PeakSet, relative_error: f64, seed: u64) -> Result<PeakSet> {
    if !(relative_error >= 0.0) {
        return domain(format!("relative error must be non-negative, got {relative_error}"));
    }
    let mut out = peaks.clone();
    if relative_error == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in &mut out.peaks {
        let u: f64 = rng.random_range(-1.0..=1.0);
        p.amplitude *= 1.0 + relative_error * u;
    }
    out.metadata.seed = Some(seed);
    Ok(out)
}
