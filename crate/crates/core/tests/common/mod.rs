#![allow(dead_code)]

use covdc::cpoly::{CPoly1, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss_c(r: &mut ChaCha8Rng) -> C64 {
    let u: f64 = r.gen::<f64>().max(1e-300);
    let v: f64 = r.gen();
    let m = (-2.0 * u.ln()).sqrt() / std::f64::consts::SQRT_2;
    C64::from_polar(m, std::f64::consts::TAU * v)
}

/// Gaussian coefficients, exact degree `d`.
pub fn random_poly(r: &mut ChaCha8Rng, d: usize) -> CPoly1 {
    let mut c: Vec<C64> = (0..=d).map(|_| gauss_c(r)).collect();
    if c[d].norm() < 0.1 {
        c[d] = C64::new(1.0, 0.0);
    }
    CPoly1::new(c).unwrap()
}

/// Companion-matrix eigenvalues via complex Schur.
pub fn companion_roots(p: &CPoly1) -> Vec<C64> {
    let d = p.degree();
    let lead = p.leading();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -p.coeff(i) / lead;
    }
    m.schur().eigenvalues().expect("schur").iter().copied().collect()
}

/// Greedy matching distance between two multisets of equal size.
pub fn match_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (k, dist) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &y)| (k, (x - y).norm() / x.norm().max(1.0)))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .unwrap();
        used[k] = true;
        worst = worst.max(dist);
    }
    worst
}
