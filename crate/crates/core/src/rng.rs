//! Deterministic RNG substreams. Every replicate (and every lemma grid point)
//! draws from its own ChaCha8 stream keyed by (master seed, domain label,
//! lane indices), so results cannot depend on thread scheduling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives an independent stream from a master seed, a domain label, and two
/// integer lanes (typically sample size and replicate index).
pub fn substream(master_seed: u64, domain: &str, lane_a: u64, lane_b: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&fnv1a(domain.as_bytes()).to_le_bytes());
    seed[16..24].copy_from_slice(&lane_a.to_le_bytes());
    seed[24..32].copy_from_slice(&lane_b.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// One standard normal draw via Box-Muller on the uniform stream.
///
/// The sine partner is discarded; callers filling a vector should prefer
/// [`fill_standard_normal`], which consumes both.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let (z0, _z1) = box_muller_pair(rng);
    z0
}

/// Fills `out` with i.i.d. standard normals, consuming uniforms in pairs.
pub fn fill_standard_normal<R: Rng>(rng: &mut R, out: &mut [f64]) {
    let mut i = 0;
    while i + 1 < out.len() {
        let (z0, z1) = box_muller_pair(rng);
        out[i] = z0;
        out[i + 1] = z1;
        i += 2;
    }
    if i < out.len() {
        out[i] = standard_normal(rng);
    }
}

fn box_muller_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    // 1 - u maps [0,1) to (0,1], keeping ln finite
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}
