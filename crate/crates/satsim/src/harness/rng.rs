//! Seed derivation and quality sampling.
//!
//! One named generator (ChaCha12) everywhere; per-purpose streams are
//! derived by hashing `(master seed, purpose tag, index)` so concurrent
//! sweep points never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, LogNormal, Normal, Uniform};

use crate::error::Result;
use crate::model::{QualityDistribution, QualityModel};

/// splitmix64 finalizer; good avalanche for cheap seed mixing.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Deterministic sub-seed for `(master, purpose, index)`.
pub fn derive_seed(master: u64, purpose: &str, index: u64) -> u64 {
    let mut h = mix(master);
    for b in purpose.bytes() {
        h = mix(h ^ u64::from(b));
    }
    mix(h ^ index)
}

/// The crate's generator, seeded.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Draw `builders` i.i.d. qualities from `spec`. Identical
/// `(spec, builders, seed)` triples produce identical draws.
pub fn sample_qualities(
    spec: &QualityDistribution,
    builders: usize,
    seed: u64,
    outside_quality: f64,
) -> Result<QualityModel> {
    spec.validate()?;
    let mut rng = seeded_rng(seed);
    let realized: Vec<f64> = match *spec {
        QualityDistribution::Constant { value } => vec![value; builders],
        QualityDistribution::Normal { mu, sigma } => {
            let dist = Normal::new(mu, sigma).expect("validated");
            (0..builders).map(|_| dist.sample(&mut rng)).collect()
        }
        QualityDistribution::Uniform { lo, hi } => {
            let dist = Uniform::new(lo, hi).expect("validated");
            (0..builders).map(|_| dist.sample(&mut rng)).collect()
        }
        QualityDistribution::LogNormal { mu, sigma } => {
            let dist = LogNormal::new(mu, sigma).expect("validated");
            (0..builders).map(|_| dist.sample(&mut rng)).collect()
        }
    };
    QualityModel::new(*spec, realized, outside_quality)
}
