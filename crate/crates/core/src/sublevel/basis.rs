use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measure::gauss;
use crate::cpoly::poly1::{binom, factorial};
use crate::cpoly::{multi_factorial, MultiIndex, C64};
use crate::error::{Error, Result};

/// Largest space dimension `C(n+k-1, k)` accepted.
pub const MAX_BASIS_DIM: usize = 500;

/// Unit vectors `u_j` with `z^α = Σ_j c_j (u_j·z)^k` for every `|α| = k`;
/// equivalently `∂^α = Σ_j c_j (u_j·∇)^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerBasis {
    pub nvars: usize,
    pub order: u32,
    pub unit_vectors: Vec<Vec<C64>>,
    pub recon_coeffs: BTreeMap<MultiIndex, Vec<C64>>,
    /// Condition number of the Gram matrix `(u_i·ū_j)^k`.
    pub gram_condition: f64,
    /// Largest reconstruction error over all α at 50 random points of the unit ball.
    pub residual: f64,
}

pub fn basis_dim(n: usize, k: u32) -> usize {
    binom(n + k as usize - 1, k as usize).round() as usize
}

/// `u·z` without conjugation.
pub fn pairing(u: &[C64], z: &[C64]) -> C64 {
    u.iter().zip(z).map(|(a, b)| a * b).sum()
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn random_ball(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    use rand::Rng;
    let u = random_unit(n, rng);
    let r = rng.gen::<f64>().powf(1.0 / (2 * n) as f64);
    u.into_iter().map(|x| x * r).collect()
}

impl PowerBasis {
    pub fn dim(&self) -> usize {
        self.unit_vectors.len()
    }

    /// `Σ_j c_j (u_j·z)^k` for the stored coefficients of `alpha`.
    pub fn reconstruct(&self, alpha: &MultiIndex, z: &[C64]) -> Option<C64> {
        let c = self.recon_coeffs.get(alpha)?;
        Some(
            c.iter()
                .zip(&self.unit_vectors)
                .map(|(cj, u)| cj * pairing(u, z).powu(self.order))
                .sum(),
        )
    }

    fn measure_residual(&self, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let z = random_ball(self.nvars, &mut rng);
            let powers: Vec<C64> = self.unit_vectors.iter().map(|u| pairing(u, &z).powu(self.order)).collect();
            for (alpha, c) in &self.recon_coeffs {
                let s: C64 = c.iter().zip(&powers).map(|(a, b)| a * b).sum();
                worst = worst.max((s - alpha.monomial(&z)).norm());
            }
        }
        worst
    }
}

/// Chooses `d` directions out of a random candidate pool by greedy pivoting on the
/// normalized evaluation rows `√(k!/β!) u^β` (an approximate Fekete selection),
/// then solves for the coefficients of every monomial.
pub fn build_power_basis(n: usize, k: u32, seed: u64) -> Result<PowerBasis> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput("n and k must be >= 1".into()));
    }
    let d = basis_dim(n, k);
    if d > MAX_BASIS_DIM {
        return Err(Error::DimensionTooHigh(d));
    }
    let alphas = MultiIndex::all_of_order(n, k);
    debug_assert_eq!(alphas.len(), d);
    let kf = factorial(k as usize);
    let weights: Vec<f64> = alphas.iter().map(|b| (kf / multi_factorial(b)).sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row = |u: &[C64]| -> Vec<C64> { alphas.iter().zip(&weights).map(|(b, w)| b.monomial(u) * *w).collect() };

    let pool = if d == 1 { 1 } else { (4 * d).max(d + 16) };
    let candidates: Vec<Vec<C64>> = (0..pool).map(|_| random_unit(n, &mut rng)).collect();
    let mut rows: Vec<Vec<C64>> = candidates.iter().map(|u| row(u)).collect();
    let mut norms: Vec<f64> = rows.iter().map(|r| r.iter().map(|x| x.norm_sqr()).sum()).collect();
    let mut taken = vec![false; pool];
    let mut chosen = Vec::with_capacity(d);
    // modified Gram-Schmidt on the remaining rows, pivoting on residual norm
    for _ in 0..d {
        let (p, _) = norms
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("pool larger than dimension");
        taken[p] = true;
        chosen.push(p);
        let nrm = norms[p].sqrt();
        let q: Vec<C64> = rows[p].iter().map(|x| x / nrm).collect();
        for i in 0..pool {
            if taken[i] {
                continue;
            }
            let proj: C64 = rows[i].iter().zip(&q).map(|(a, b)| a * b.conj()).sum();
            for (a, b) in rows[i].iter_mut().zip(&q) {
                *a -= proj * b;
            }
            norms[i] = rows[i].iter().map(|x| x.norm_sqr()).sum();
        }
    }
    let unit_vectors: Vec<Vec<C64>> = chosen.iter().map(|&i| candidates[i].clone()).collect();

    let w = DMatrix::from_fn(d, d, |j, b| {
        alphas[b].monomial(&unit_vectors[j]) * weights[b]
    });
    let sv = w.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let gram_condition = if smin > 0.0 { (smax / smin).powi(2) } else { f64::INFINITY };

    let wt = w.transpose();
    let lu = wt.clone().full_piv_lu();
    let mut recon_coeffs = BTreeMap::new();
    for (b, alpha) in alphas.iter().enumerate() {
        let mut rhs = DVector::<C64>::zeros(d);
        rhs[b] = C64::new(1.0 / weights[b], 0.0);
        let mut c = lu
            .solve(&rhs)
            .ok_or_else(|| Error::RootFindingFailed("singular power basis".into()))?;
        // one step of iterative refinement
        let r = &rhs - &wt * &c;
        if let Some(dc) = lu.solve(&r) {
            c += dc;
        }
        recon_coeffs.insert(alpha.clone(), c.iter().copied().collect());
    }
    let mut basis = PowerBasis {
        nvars: n,
        order: k,
        unit_vectors,
        recon_coeffs,
        gram_condition,
        residual: 0.0,
    };
    basis.residual = basis.measure_residual(seed);
    Ok(basis)
}

/// Unitary `R` with `R u = e_1`: a complex Householder reflection times a phase.
/// For `g(w) = f(R^* w)`, `∂_{w_1} g = (u·∇) f`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMap {
    pub matrix: DMatrix<C64>,
}

impl UnitaryMap {
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (&self.matrix * DVector::from_column_slice(v)).iter().copied().collect()
    }

    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        (self.matrix.adjoint() * DVector::from_column_slice(v)).iter().copied().collect()
    }
}

pub fn rotate_to_e1(u: &[C64]) -> Result<UnitaryMap> {
    let n = u.len();
    let norm = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n == 0 || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput("rotate_to_e1 needs a unit vector".into()));
    }
    let phase = if u[0].norm() > 0.0 { u[0] / u[0].norm() } else { C64::new(1.0, 0.0) };
    let mut v = DVector::from_column_slice(u);
    v[0] += phase;
    let vv = v.norm_squared();
    let id = DMatrix::<C64>::identity(n, n);
    // H u = -phase e1, so R = -conj(phase) H
    let h = &id - (&v * v.adjoint()) * C64::new(2.0 / vv, 0.0);
    Ok(UnitaryMap { matrix: h * (-phase.conj()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_single_vector() {
        for k in [1, 5, 40] {
            let b = build_power_basis(1, k, 3).unwrap();
            assert_eq!(b.dim(), 1);
            let u = b.unit_vectors[0][0];
            let c = b.recon_coeffs[&MultiIndex(vec![k])][0];
            assert!((c * u.powu(k) - 1.0).norm() < 1e-12);
            assert!(b.residual < 1e-12);
        }
    }

    #[test]
    fn small_bases_reconstruct() {
        let b = build_power_basis(2, 2, 1).unwrap();
        assert_eq!(b.dim(), 3);
        let z = [C64::new(0.3, -0.2), C64::new(-0.1, 0.5)];
        let v = b.reconstruct(&MultiIndex(vec![1, 1]), &z).unwrap();
        assert!((v - z[0] * z[1]).norm() < 1e-10);
        let b = build_power_basis(3, 3, 2).unwrap();
        assert_eq!(b.dim(), 10);
        assert!(b.residual < 1e-10, "{}", b.residual);
        for u in &b.unit_vectors {
            let nrm: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            assert!((nrm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn householder_rotations() {
        let e1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let r = rotate_to_e1(&e1).unwrap();
        // a sign-fixed reflection: diagonal, unimodular, fixing e1
        assert!((r.matrix[(0, 0)] - 1.0).norm() < 1e-15);
        assert!(r.matrix[(0, 1)].norm() < 1e-15 && r.matrix[(1, 0)].norm() < 1e-15);
        assert!((r.matrix[(1, 1)].norm() - 1.0).abs() < 1e-15);

        let e2 = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let r = rotate_to_e1(&e2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let v = random_ball(2, &mut rng);
            let a: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            let b: f64 = r.apply(&v).iter().map(|x| x.norm_sqr()).sum();
            assert!((a - b).abs() < 1e-14);
        }
        for n in 1..6 {
            let u = random_unit(n, &mut rng);
            let img = rotate_to_e1(&u).unwrap().apply(&u);
            assert!((img[0] - 1.0).norm() < 1e-14);
            assert!(img[1..].iter().all(|x| x.norm() < 1e-14));
        }
    }
}
