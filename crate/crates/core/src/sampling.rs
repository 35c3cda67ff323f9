//! Seeded Poisson point processes and counter-based per-trial streams.
//!
//! A trial's randomness is a pure function of `(master_seed, trial_index)`:
//! [`derive_trial_seed`] mixes the pair through a 64-bit finalizer and the
//! result seeds a ChaCha8 stream. Trials can therefore be scheduled on any
//! number of threads, in any order, without changing a single bit of output.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::geom::{Point, SquareWorld};
#[allow(unused_imports)]
use crate::math::MathExt;

/// Mean below which the Poisson count is drawn by inversion.
const INVERSION_CUTOFF: f64 = 30.0;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seed for trial `trial_index` under `master_seed`.
///
/// Both steps are bijections on `u64`, so distinct trial indices never
/// collide for a fixed master seed.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    let base = mix64(master_seed);
    mix64(base.wrapping_add(trial_index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

pub fn stream_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One Poisson(`mean`) variate: inversion for small means, PTRS
/// transformed rejection (Hörmann) above.
pub fn poisson_count<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    if mean < INVERSION_CUTOFF {
        poisson_inversion(mean, rng)
    } else {
        poisson_ptrs(mean, rng)
    }
}

fn poisson_inversion<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let u = unit_f64(rng);
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // tail below double precision
            break;
        }
        cdf = next;
    }
    k
}

fn poisson_ptrs<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = unit_f64(rng) - 0.5;
        let v = unit_f64(rng);
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - (k + 1.0).lgamma();
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// A Poisson sample of the square world, indexed `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub world: SquareWorld,
    pub seed: u64,
    pub points: Vec<Point>,
}

impl PointSet {
    /// Wraps hand-placed points; `seed` is recorded as 0.
    pub fn from_points(world: SquareWorld, points: Vec<Point>) -> Self {
        Self {
            world,
            seed: 0,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl core::ops::Index<usize> for PointSet {
    type Output = Point;
    fn index(&self, i: usize) -> &Point {
        &self.points[i]
    }
}

/// Unit-intensity Poisson process on `world`: `m ~ Poisson(area)` then `m`
/// i.i.d. uniform points. Fully determined by `(world, seed)`.
pub fn sample_poisson_square(world: SquareWorld, seed: u64) -> PointSet {
    let mut rng = stream_rng(seed);
    let m = poisson_count(world.area(), &mut rng) as usize;
    let side = world.side();
    let points = (0..m)
        .map(|_| {
            let x = side * unit_f64(&mut rng);
            let y = side * unit_f64(&mut rng);
            Point::new(x, y)
        })
        .collect();
    PointSet {
        world,
        seed,
        points,
    }
}
