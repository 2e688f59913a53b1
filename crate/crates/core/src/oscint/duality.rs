use std::f64::consts::{SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex as FftComplex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::bump::BumpSpec;
use super::quad::{integrate, Phase, QuadSpec};
use crate::cpoly::{roots, AnalyticFn, CPoly1, C64, ROOT_TOL};
use crate::error::{Error, Result};
use crate::sublevel::{measure_quadtree, Constraint, PlanarDomain, QuadtreeOptions};

/// Largest admissible fraction of `∫|ψ̃|` beyond `|w| = W`.
pub const TAIL_LIMIT: f64 = 0.01;

/// Radial Fourier profile `Ψ(ρ) = ψ̂(ρ, 0)` of the plateau `ψ = plateau(1, 2)` on `C = R^2`,
/// from the FFT of the projection `∫ψ(x, y) dy` (projection-slice).
#[derive(Clone, Debug)]
pub struct PlateauTransform {
    /// Frequency spacing.
    pub step: f64,
    pub values: Vec<f64>,
}

impl PlateauTransform {
    /// `samples` points across the support diameter, zero-padded 16 times.
    pub fn new(samples: usize) -> Result<Self> {
        if samples < 32 {
            return Err(Error::InvalidInput("fourier grid must be >= 32".into()));
        }
        let psi = BumpSpec::plateau(1.0, 2.0);
        let h = 4.0 / samples as f64;
        let n = (16 * samples).next_power_of_two();
        let half = n / 2;
        let mut buf: Vec<FftComplex<f64>> = vec![FftComplex::new(0.0, 0.0); n];
        // x_m = (m - half) h
        for (m, b) in buf.iter_mut().enumerate() {
            let x = (m as f64 - half as f64) * h;
            if x.abs() >= 2.0 {
                continue;
            }
            let ymax = (4.0 - x * x).sqrt();
            let ny = (ymax / h).floor() as i64;
            let s: f64 = (-ny..=ny).map(|k| psi.profile((x * x + (k as f64 * h).powi(2)).sqrt())).sum();
            *b = FftComplex::new(s * h, 0.0);
        }
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let values = (0..half)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * buf[k].re * h
            })
            .collect();
        Ok(PlateauTransform { step: 1.0 / (n as f64 * h), values })
    }

    pub fn max_frequency(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    /// Linear interpolation of `Ψ`, zero beyond the computed range.
    pub fn at(&self, rho: f64) -> f64 {
        let t = rho / self.step;
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return 0.0;
        }
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// `ψ̃(w) = 2 ψ̂(w_1 + w_2, w_1 - w_2)`: the density with `ψ(ζ) = ∫ ψ̃(w) e(wζ) dw`.
    /// It is radial, `ψ̃(w) = 2 Ψ(√2 |w|)`.
    pub fn dual(&self, w: f64) -> f64 {
        2.0 * self.at(SQRT_2 * w)
    }

    /// `∫_{|w| <= W} |ψ̃(w)| dw` (W = ∞ for the whole computed range).
    pub fn dual_mass(&self, radius: f64) -> f64 {
        // in ρ = √2 |w|: ∫ |ψ̃| dw = 2π ∫ |Ψ(ρ)| ρ dρ
        let rmax = (SQRT_2 * radius).min(self.max_frequency());
        let k = (rmax / self.step).floor() as usize;
        let mut s = 0.0;
        for i in 0..k {
            let (a, b) = (i as f64 * self.step, (i + 1) as f64 * self.step);
            s += 0.5 * (self.values[i].abs() * a + self.values[i + 1].abs() * b) * self.step;
        }
        TAU * s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityCheck {
    /// Largest measured `|{|z| <= R : |f(z) - a| <= ε}|` over the sampled `a`.
    pub lhs: f64,
    pub worst_a: C64,
    /// Estimate of `∫_{|w| <= W} |ψ̃(w)| |I_{φ_R}(w f / ε)| dw`.
    pub rhs: f64,
    pub rhs_stderr: f64,
    /// Fraction of `∫|ψ̃|` beyond `W`.
    pub tail: f64,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityOptions {
    pub fourier_grid: usize,
    /// Draws of `w` from the density `|ψ̃|` for the right-hand side.
    pub w_samples: usize,
    pub a_samples: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for DualityOptions {
    fn default() -> Self {
        DualityOptions { fourier_grid: 256, w_samples: 64, a_samples: 16, tolerance: 0.05, seed: 0 }
    }
}

/// Sublevel measure against its oscillatory upper bound with `ψ = plateau(1, 2)` and
/// `φ_R = plateau(R, 3R/2)`.
pub fn duality_check(f: &CPoly1, eps: f64, radius: f64, w_max: f64, opts: &DualityOptions) -> Result<DualityCheck> {
    if !(eps > 0.0 && radius > 0.0 && w_max > 0.0) {
        return Err(Error::InvalidInput("eps, R and W must be positive".into()));
    }
    if f.degree() < 1 {
        return Err(Error::DegreeTooLow { need: 1, got: f.degree() });
    }
    if opts.w_samples == 0 {
        return Err(Error::InvalidInput("w_samples must be >= 1".into()));
    }
    let tr = PlateauTransform::new(opts.fourier_grid)?;
    if SQRT_2 * w_max > tr.max_frequency() {
        return Err(Error::InvalidInput(format!(
            "W = {w_max} beyond the resolved frequency range; raise the fourier grid"
        )));
    }
    let total = tr.dual_mass(f64::INFINITY);
    let inner = tr.dual_mass(w_max);
    let tail = (total - inner).max(0.0) / total;
    if tail > TAIL_LIMIT {
        return Err(Error::TailTooFat(tail));
    }

    let (lhs, worst_a) = worst_sublevel(f, eps, radius, opts)?;

    // radial density of |ψ̃| in s = |w|, tabulated for inverse-CDF sampling
    let bins = 4096;
    let ds = w_max / bins as f64;
    let mut cdf = Vec::with_capacity(bins + 1);
    cdf.push(0.0);
    for i in 0..bins {
        let (a, b) = (i as f64 * ds, (i + 1) as f64 * ds);
        let g = |s: f64| tr.dual(s).abs() * TAU * s;
        cdf.push(cdf[i] + 0.5 * (g(a) + g(b)) * ds);
    }
    let mass = cdf[bins];
    let phi = BumpSpec::plateau(radius, 1.5 * radius);
    let quad = QuadSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xd0a1);
    let mut vals = Vec::with_capacity(opts.w_samples);
    for i in 0..opts.w_samples {
        // stratified in the radial quantile
        let u = (i as f64 + rng.gen::<f64>()) / opts.w_samples as f64 * mass;
        let k = cdf.partition_point(|c| *c < u).clamp(1, bins);
        let frac = (u - cdf[k - 1]) / (cdf[k] - cdf[k - 1]).max(1e-300);
        let s = ((k - 1) as f64 + frac.clamp(0.0, 1.0)) * ds;
        let w = C64::from_polar(s, TAU * rng.gen::<f64>());
        let phase = f.scale(w / eps);
        let r = integrate(&Phase::from(phase), &phi, &quad)?;
        vals.push(r.value.norm());
    }
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let rhs = mass * mean;
    let rhs_stderr = mass * (var / m).sqrt();
    Ok(DualityCheck {
        lhs,
        worst_a,
        rhs,
        rhs_stderr,
        tail,
        holds: lhs <= rhs * (1.0 + opts.tolerance),
    })
}

/// Candidate levels: values at the critical points inside the disc, at the center and
/// at random points of the disc.
fn worst_sublevel(f: &CPoly1, eps: f64, radius: f64, opts: &DualityOptions) -> Result<(f64, C64)> {
    let mut levels = vec![f.eval(C64::new(0.0, 0.0))];
    let df = f.deriv(1);
    if df.degree() >= 1 {
        for r in roots(&df, ROOT_TOL)? {
            if r.z.norm() <= radius {
                levels.push(f.eval(r.z));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa11);
    for _ in 0..opts.a_samples {
        let z = C64::from_polar(radius * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
        levels.push(f.eval(z));
    }
    let fun = AnalyticFn::Poly(f.clone());
    let domain = PlanarDomain::Disc { center: C64::new(0.0, 0.0), radius };
    let slope = (1..=f.degree()).map(|k| f.deriv(k).abs_sum(radius)).fold(0.0, f64::max).max(1.0);
    let opts_q = QuadtreeOptions {
        base: 128,
        min_cell: (eps / slope / 40.0).min(radius / 512.0),
        ..QuadtreeOptions::default()
    };
    let mut best = (0.0, levels[0]);
    for a in levels {
        let m = measure_quadtree(&fun, &[Constraint::sublevel(a, eps)], &domain, &opts_q)?.value;
        if m > best.0 {
            best = (m, a);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `∫∫ ψ(x, y) cos(2πρx) dx dy` by a direct midpoint rule.
    fn direct(rho: f64) -> f64 {
        let psi = BumpSpec::plateau(1.0, 2.0);
        let n = 800;
        let h = 4.0 / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let x = -2.0 + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -2.0 + (j as f64 + 0.5) * h;
                s += psi.value(&[C64::new(x, y)]) * (TAU * rho * x).cos();
            }
        }
        s * h * h
    }

    #[test]
    fn transform_matches_direct_integrals() {
        let tr = PlateauTransform::new(256).unwrap();
        let mass = direct(0.0);
        assert!((tr.at(0.0) - mass).abs() < 1e-6 * mass, "{} {mass}", tr.at(0.0));
        // the density at the origin is twice the mass of ψ
        assert!((tr.dual(0.0) - 2.0 * mass).abs() < 1e-6 * mass);
        for rho in [0.25, 0.7, 1.3] {
            let d = direct(rho);
            assert!((tr.at(rho) - d).abs() < 2e-3 * mass, "rho {rho}: {} {d}", tr.at(rho));
        }
        assert!(mass > PI && mass < 4.0 * PI);
    }

    #[test]
    fn tail_guard() {
        let f = CPoly1::from_real(&[0.0, 1.0]).unwrap();
        let r = duality_check(&f, 0.1, 1.0, 0.05, &DualityOptions::default());
        assert!(matches!(r, Err(Error::TailTooFat(_))));
    }

    #[test]
    fn linear_and_quadratic_hold() {
        let o = DualityOptions { w_samples: 24, ..Default::default() };
        let f = CPoly1::from_real(&[0.0, 1.0]).unwrap();
        let r = duality_check(&f, 0.1, 1.0, 6.0, &o).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.lhs - PI * 0.01).abs() < 1e-3, "{r:?}");
        let f = CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let r = duality_check(&f, 0.05, 1.0, 6.0, &o).unwrap();
        assert!(r.holds, "{r:?}");
    }
}
