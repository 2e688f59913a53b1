use std::f64::consts::TAU;

use super::{CPoly1, C64};
use crate::error::{Error, Result};

pub fn coeff_norm(p: &CPoly1) -> f64 {
    p.coeff_norm()
}

/// Minimum of `|q|` over the closed unit disc: polar grid seeds, then damped Newton
/// towards zeros projected onto the disc, and golden-section refinement on the circle.
pub fn min_modulus_on_disc(q: &CPoly1, grid: usize) -> (f64, C64) {
    if q.is_zero() {
        return (0.0, C64::new(0.0, 0.0));
    }
    if q.degree() == 0 {
        return (q.coeff(0).norm(), C64::new(0.0, 0.0));
    }
    let rings = (grid / 4).max(8);
    let mut seeds: Vec<(f64, C64)> = Vec::with_capacity(rings * grid + 1);
    seeds.push((q.eval(C64::new(0.0, 0.0)).norm(), C64::new(0.0, 0.0)));
    for i in 1..=rings {
        let r = i as f64 / rings as f64;
        for j in 0..grid {
            let z = C64::from_polar(r, TAU * j as f64 / grid as f64);
            seeds.push((q.eval(z).norm(), z));
        }
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = seeds[0];
    for &(v0, z0) in seeds.iter().take(8) {
        let (v, z) = descend(q, z0, v0);
        if v < best.0 {
            best = (v, z);
        }
        let (vb, zb) = boundary_refine(q, z0.arg(), TAU / grid as f64);
        if vb < best.0 {
            best = (vb, zb);
        }
    }
    best
}

fn project(z: C64) -> C64 {
    let r = z.norm();
    if r > 1.0 {
        z / r
    } else {
        z
    }
}

fn descend(q: &CPoly1, mut z: C64, mut v: f64) -> (f64, C64) {
    for _ in 0..60 {
        let (val, d) = q.taylor_at_first_two(z);
        if d.norm() == 0.0 || v == 0.0 {
            break;
        }
        let step = val / d;
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let cand = project(z - step * t);
            let cv = q.eval(cand).norm();
            if cv < v {
                z = cand;
                v = cv;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved || (step * t).norm() < 1e-15 {
            break;
        }
    }
    (v, z)
}

fn boundary_refine(q: &CPoly1, theta: f64, width: f64) -> (f64, C64) {
    let g = |t: f64| q.eval(C64::from_polar(1.0, t)).norm();
    let (mut a, mut b) = (theta - width, theta + width);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    (g(t), C64::from_polar(1.0, t))
}

/// `max_j min_{z ∈ 𝔻} |p^{(j)}(z)|`; an upper estimate within the descent tolerance.
pub fn triple_norm(p: &CPoly1, grid: usize) -> Result<f64> {
    if grid < 64 {
        return Err(Error::InvalidInput("triple_norm grid must be >= 64".into()));
    }
    Ok(triple_norm_detail(p, grid).0)
}

/// Triple norm plus the order attaining it and the per-order minima.
pub fn triple_norm_detail(p: &CPoly1, grid: usize) -> (f64, usize, Vec<f64>) {
    let mins: Vec<f64> = (0..=p.degree())
        .map(|j| min_modulus_on_disc(&p.deriv(j), grid).0)
        .collect();
    let (arg, val) = mins
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (j, &m)| if m > acc.1 { (j, m) } else { acc });
    (val, arg, mins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let z = CPoly1::from_real(&[0.0, 1.0]).unwrap();
        assert!((triple_norm(&z, 64).unwrap() - 1.0).abs() < 1e-12);
        let z2 = CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert!((triple_norm(&z2, 64).unwrap() - 2.0).abs() < 1e-12);
        let z5 = CPoly1::from_real(&[5.0, 1.0]).unwrap();
        assert!((triple_norm(&z5, 64).unwrap() - 4.0).abs() < 1e-9);
        assert!(triple_norm(&z5, 32).is_err());
    }
}
