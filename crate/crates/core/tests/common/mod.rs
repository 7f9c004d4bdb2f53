#![allow(dead_code)]

use ff8v::weights::Angles;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Angles strictly inside (0, pi/2), away from the ends.
pub fn open_quarter(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(0.05..1.52)
}

pub fn random_field(r: &mut ChaCha8Rng, n: usize) -> Vec<Angles> {
    (0..n).map(|_| Angles::new(open_quarter(r), open_quarter(r))).collect()
}

/// Field in the probability regime 0 < alpha <= beta < pi/2.
pub fn ordered_field(r: &mut ChaCha8Rng, n: usize) -> Vec<Angles> {
    (0..n)
        .map(|_| {
            let a = open_quarter(r);
            let b = open_quarter(r);
            Angles::new(a.min(b), a.max(b))
        })
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
