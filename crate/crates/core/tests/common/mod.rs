#![allow(dead_code)]

use hyperklein::{build_frame, from_klein, HyperboloidPoint, KleinPoint, LorentzFrame, LorentzVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v = gaussian(rng, n);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Klein point uniform in direction with hyperbolic radius uniform in `[0, s_max]`.
pub fn klein_in_ball(rng: &mut ChaCha8Rng, d: usize, s_max: f64) -> KleinPoint {
    let rad = (rng.random::<f64>() * s_max).tanh();
    KleinPoint::new(unit(rng, d).into_iter().map(|x| x * rad).collect()).unwrap()
}

/// Point at hyperbolic radius at most `s_max / kappa` from the canonical origin.
pub fn point_in_ball(rng: &mut ChaCha8Rng, d: usize, kappa: f64, s_max: f64) -> HyperboloidPoint {
    let frame = LorentzFrame::canonical(d, kappa).unwrap();
    from_klein(&frame, &klein_in_ball(rng, d, s_max)).unwrap()
}

/// Frame at a random base point with random Gram-Schmidt seeds.
pub fn random_frame(rng: &mut ChaCha8Rng, d: usize, kappa: f64, s_max: f64) -> LorentzFrame {
    let x0 = point_in_ball(rng, d, kappa, s_max);
    let seeds: Vec<LorentzVector> = (0..d)
        .map(|_| LorentzVector::new(gaussian(rng, d + 1)).unwrap())
        .collect();
    build_frame(&x0, Some(&seeds)).unwrap()
}

/// Norm of `a ^ b` over `|a| |b|`, computed from the 2x2 minors.
pub fn scaled_wedge(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let m = a[i] * b[j] - a[j] * b[i];
            sum += m * m;
        }
    }
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    sum.sqrt() / (na * nb)
}
