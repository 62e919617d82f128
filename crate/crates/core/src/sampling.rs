//! Reproducible random streams and the two primitive distributions every
//! sampler is built on: standard Gaussian vectors and uniform points on
//! spheres.
//!
//! A stream is keyed by `(seed, stream_id)`. The key expands into a ChaCha8
//! key/stream pair, so sample `i` of a run always consumes stream `i`
//! no matter which worker thread draws it.
//!
//! Gaussians come from the Marsaglia polar method with the logarithm taken
//! from `libm`, so the bits do not depend on the platform's math library:
//!
//! ```text
//! repeat u, v ~ U(-1, 1) until 0 < s = u² + v² < 1
//! z₁ = u·√(−2 ln s / s),  z₂ = v·√(−2 ln s / s)
//! ```
//!
//! `z₂` is cached and returned by the following call.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::geometry::{norm, Point};

/// Gaussian vectors with a norm below this are redrawn before normalising.
pub const UNDERFLOW_GUARD: f64 = 1e-150;

/// A source of independent standard normal deviates.
pub trait NormalSource {
    fn next_gaussian(&mut self) -> f64;

    fn fill_gaussian(&mut self, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = self.next_gaussian());
    }
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
            spare: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random mantissa bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl NormalSource for RngStream {
    fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.next_uniform() - 1.0;
            let v = 2.0 * self.next_uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * libm::log(s) / s).sqrt();
                self.spare = Some(v * factor);
                return u * factor;
            }
        }
    }
}

/// Mixes a run seed with a tag (row index, grid cell, replication) into an
/// independent seed, using two rounds of SplitMix64 finalisation.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn gaussian_vector<S: NormalSource + ?Sized>(source: &mut S, dim: usize) -> Result<Point> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut v = vec![0.0; dim];
    source.fill_gaussian(&mut v);
    Ok(Point::from_vec_unchecked(v))
}

/// Uniform point on the sphere of the given radius around `center`, by
/// normalising a Gaussian vector. In one dimension this is `center ± radius`
/// with equal probability.
pub fn uniform_on_sphere<S: NormalSource + ?Sized>(
    source: &mut S,
    center: &Point,
    radius: f64,
) -> Result<Point> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidRadius(radius));
    }
    let mut out = vec![0.0; center.dim()];
    sphere_point_into(source, center.coords(), radius, &mut out);
    Ok(Point::from_vec_unchecked(out))
}

/// Allocation-free core of [`uniform_on_sphere`]; `out` doubles as scratch.
pub(crate) fn sphere_point_into<S: NormalSource + ?Sized>(
    source: &mut S,
    center: &[f64],
    radius: f64,
    out: &mut [f64],
) {
    let n = loop {
        source.fill_gaussian(out);
        let n = norm(out);
        if n >= UNDERFLOW_GUARD {
            break n;
        }
    };
    if out.len() == 1 {
        out[0] = center[0] + radius.copysign(out[0]);
        return;
    }
    let scale = radius / n;
    out.iter_mut()
        .zip(center)
        .for_each(|(v, c)| *v = c + scale * *v);
}
