use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::{build_power_basis, rotate_to_e1};
use super::measure::{measure_mc, MeasureEstimate, Method};
use crate::cpoly::{roots, CPoly1, CPolyN, MultiIndex, C64, ROOT_TOL};
use crate::error::{Error, Result};
use crate::functionals::RegionSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceComparison {
    pub sliced: MeasureEstimate,
    pub direct: MeasureEstimate,
}

impl SliceComparison {
    /// `|sliced - direct| / sqrt(se_1^2 + se_2^2)`.
    pub fn z_score(&self) -> f64 {
        let s1 = self.sliced.stderr.unwrap_or(0.0);
        let s2 = self.direct.stderr.unwrap_or(0.0);
        let se = (s1 * s1 + s2 * s2).sqrt();
        let diff = (self.sliced.value - self.direct.value).abs();
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Measure of `{z in B^2 : |∂^α P(z)| >= mu, |P(z)| <= eps}` two ways: plain Monte
/// Carlo, and by splitting along the power-basis directions `u_j` (each point goes to
/// the `j` maximizing `|c_j (u_j·∇)^k P|`) and integrating the measures of the complex
/// lines `b + t u_j` over the orthogonal disc. Each line measure is sampled from the
/// union of discs around the roots of the restricted polynomial that must contain
/// `{|q| <= eps}`.
pub fn slice_measure_nd(
    p: &CPolyN,
    alpha: &MultiIndex,
    mu: f64,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<SliceComparison> {
    let n = p.nvars();
    if n > 2 {
        return Err(Error::DimensionTooHigh(n));
    }
    if n != 2 || alpha.len() != 2 {
        return Err(Error::InvalidInput("slicing needs two variables".into()));
    }
    let k = alpha.order();
    if k == 0 || k > p.degree() {
        return Err(Error::InvalidInput(format!("|alpha| = {k} outside 1..=deg P")));
    }
    let da = p.deriv(alpha);
    let direct = measure_mc(
        |z| p.eval(z).norm() <= eps && da.eval(z).norm() >= mu,
        &RegionSpec::ball(vec![C64::new(0.0, 0.0); 2], 1.0),
        samples,
        seed,
    )?;

    let basis = build_power_basis(2, k, seed)?;
    let coeffs = &basis.recon_coeffs[alpha];
    let dirs: Vec<(Vec<C64>, Vec<C64>)> = basis
        .unit_vectors
        .iter()
        .map(|u| {
            let r = rotate_to_e1(u)?;
            // image of e2 under R^*: the orthogonal direction
            Ok((u.clone(), r.apply_adjoint(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)])))
        })
        .collect::<Result<_>>()?;
    let order_k = MultiIndex::all_of_order(2, k);
    let dk: Vec<(MultiIndex, CPolyN)> = order_k.iter().map(|g| (g.clone(), p.deriv(g))).collect();
    // |c_j (u_j·∇)^k P(z)| up to the common factor k!
    let dominant = |z: &[C64]| -> usize {
        let t: Vec<C64> = dk.iter().map(|(g, d)| d.eval(z) / g.factorial() as f64).collect();
        let mut best = (0, -1.0);
        for (j, ((u, _), c)) in dirs.iter().zip(coeffs).enumerate() {
            let v: C64 = order_k.iter().zip(&t).map(|(g, tg)| g.monomial(u) * tg).sum();
            let m = (c * v).norm();
            if m > best.1 {
                best = (j, m);
            }
        }
        best.0
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x51ce));
    let deg = p.degree() as usize;
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let wp = C64::from_polar(rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>());
        let rho = (1.0 - wp.norm_sqr()).max(0.0).sqrt();
        let mut x = 0.0;
        for (j, (u, e2)) in dirs.iter().enumerate() {
            let b = [e2[0] * wp, e2[1] * wp];
            // q(t) = P(b + t u) = Σ_m t^m Σ_{|γ|=m} u^γ T_γ(b)
            let taylor = p.taylor_at(&b);
            let mut q = vec![C64::new(0.0, 0.0); deg + 1];
            for (g, tg) in &taylor {
                q[g.order() as usize] += g.monomial(u) * tg;
            }
            let discs = cover_discs(&q, eps, rho)?;
            if discs.is_empty() {
                continue;
            }
            let total: f64 = discs.iter().map(|(_, r)| r * r).sum();
            let mut pick = rng.gen::<f64>() * total;
            let mut idx = discs.len() - 1;
            for (i, (_, r)) in discs.iter().enumerate() {
                if pick < r * r {
                    idx = i;
                    break;
                }
                pick -= r * r;
            }
            let (c, r) = discs[idx];
            let t = c + C64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>());
            if t.norm() > rho {
                continue;
            }
            let z = [b[0] + t * u[0], b[1] + t * u[1]];
            if p.eval(&z).norm() <= eps && da.eval(&z).norm() >= mu && dominant(&z) == j {
                let cover = discs.iter().filter(|(c, r)| (t - c).norm() <= *r).count().max(1);
                x += std::f64::consts::PI * total / cover as f64;
            }
        }
        sum += x;
        sum2 += x * x;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum2 / m - mean * mean).max(0.0);
    let pi = std::f64::consts::PI;
    let sliced = MeasureEstimate {
        value: pi * mean,
        stderr: Some(pi * (var / m).sqrt()),
        resolution_bound: None,
        method: Method::Mc,
        resolution: None,
        samples: Some(samples),
        seed: Some(seed),
    };
    Ok(SliceComparison { sliced, direct })
}

/// Discs `(center, radius)` containing `{|t| <= rho : |q(t)| <= eps}`.
fn cover_discs(q: &[C64], eps: f64, rho: f64) -> Result<Vec<(C64, f64)>> {
    let scale = q.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let m = q.iter().rposition(|c| c.norm() > 1e-13 * scale.max(1e-300));
    let whole = vec![(C64::new(0.0, 0.0), rho)];
    match m {
        None => Ok(if eps >= 0.0 { whole } else { Vec::new() }),
        Some(0) => Ok(if q[0].norm() <= eps { whole } else { Vec::new() }),
        Some(m) => {
            let poly = CPoly1::new(q[..=m].to_vec())?;
            let r = (eps / q[m].norm()).powf(1.0 / m as f64);
            if r >= 2.0 * rho {
                return Ok(whole);
            }
            let mut out: Vec<(C64, f64)> = roots(&poly, ROOT_TOL)?
                .into_iter()
                .filter(|root| root.z.norm() <= rho + r)
                .map(|root| (root.z, r))
                .collect();
            out.dedup_by(|a, b| (a.0 - b.0).norm() < 1e-14);
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(c: f64, a: u32, b: u32) -> (MultiIndex, C64) {
        (MultiIndex(vec![a, b]), C64::new(c, 0.0))
    }

    #[test]
    fn square_and_product_agree() {
        let p = CPolyN::new(2, [mono(1.0, 2, 0)]).unwrap();
        let r = slice_measure_nd(&p, &MultiIndex(vec![2, 0]), 1.0, 0.1, 20_000, 1).unwrap();
        assert!(r.z_score() < 3.0, "{r:?}");
        assert!(r.direct.value > 0.0);

        let p = CPolyN::new(2, [mono(1.0, 1, 1)]).unwrap();
        let r = slice_measure_nd(&p, &MultiIndex(vec![1, 1]), 0.5, 0.05, 20_000, 2).unwrap();
        assert!(r.z_score() < 3.0, "{r:?}");
    }

    #[test]
    fn linear_with_large_mu_is_empty() {
        let p = CPolyN::new(2, [mono(0.5, 1, 0), mono(0.5, 0, 1)]).unwrap();
        let r = slice_measure_nd(&p, &MultiIndex(vec![1, 0]), 1.0, 0.1, 10_000, 3).unwrap();
        assert_eq!(r.direct.value, 0.0);
        assert_eq!(r.sliced.value, 0.0);
    }

    #[test]
    fn wrong_dimension() {
        let p = CPolyN::new(3, [(MultiIndex(vec![1, 0, 0]), C64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(
            slice_measure_nd(&p, &MultiIndex(vec![1, 0, 0]), 1.0, 0.1, 10_000, 0),
            Err(Error::DimensionTooHigh(3))
        ));
    }
}
