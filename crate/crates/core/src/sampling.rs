//! Random states on the constraint manifold and random test sequences.
//!
//! Chains are drawn in angle space (bounded turning per link) so every link
//! has unit length by construction.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ChainError, Result};
use crate::seq::Seq;
use crate::state::ChainState;

/// Parameters for random chains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainSampler {
    /// Largest turning angle between consecutive links, in radians.
    pub max_turn: f64,
    /// Scale of the random link angular velocities.
    pub velocity_scale: f64,
}

impl Default for ChainSampler {
    fn default() -> Self {
        Self {
            max_turn: 1.0,
            velocity_scale: 1.0,
        }
    }
}

impl ChainSampler {
    /// Turning below a right angle keeps every `α_i > 0`.
    pub fn acute() -> Self {
        Self {
            max_turn: 1.2,
            velocity_scale: 1.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize, dim: usize) -> Result<ChainState> {
        if n == 0 {
            return Err(ChainError::Size("n must be positive".into()));
        }
        if dim < 2 {
            return Err(ChainError::UnsupportedDimension { dim, expected: 2 });
        }
        if dim == 2 {
            let mut theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let mut links = Vec::with_capacity(n);
            let mut rates = Vec::with_capacity(n);
            for _ in 0..n {
                let w: f64 = self.velocity_scale * rng.sample::<f64, _>(StandardNormal);
                links.push(vec![theta.cos(), theta.sin()]);
                rates.push(vec![-w * theta.sin(), w * theta.cos()]);
                theta += rng.random_range(-1.0..=1.0) * self.max_turn;
            }
            return ChainState::from_links(&links, &rates, 0.0);
        }
        let mut link = random_unit(rng, dim);
        let mut links = Vec::with_capacity(n);
        let mut rates = Vec::with_capacity(n);
        for _ in 0..n {
            let v: Vec<f64> = (0..dim)
                .map(|_| self.velocity_scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            rates.push(remove_component(&v, &link));
            links.push(link.clone());
            // rotate toward a random orthogonal direction by at most max_turn
            let axis = normalize(&remove_component(&random_unit(rng, dim), &link));
            let angle = rng.random_range(-1.0..=1.0) * self.max_turn;
            link = normalize(&link.iter().zip(&axis).map(|(l, a)| angle.cos() * l + angle.sin() * a).collect::<Vec<_>>());
        }
        ChainState::from_links(&links, &rates, 0.0)
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// `v - ⟨v, u⟩ u` for unit `u`.
pub fn remove_component(v: &[f64], u: &[f64]) -> Vec<f64> {
    let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
    v.iter().zip(u).map(|(a, b)| a - p * b).collect()
}

/// Scalar sequence `f_1 ..= f_len` with standard normal entries, optionally
/// scaled by a random power of ten so extreme magnitudes are exercised.
pub fn random_sequence<R: Rng + ?Sized>(rng: &mut R, len: usize, spread_scales: bool) -> Seq {
    let scale = if spread_scales {
        10f64.powf(rng.random_range(-3.0..3.0))
    } else {
        1.0
    };
    Seq::scalars(1, (0..len).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect())
}
