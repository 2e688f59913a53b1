use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cpoly::poly1::binom;
use crate::cpoly::{CPoly1, CPolyN, C64};
use crate::error::{Error, Result};
use crate::functionals::{h_inf, RegionSpec};
use crate::oscint::{integrate, BumpSpec, OscResult, Phase, QuadSpec};

/// `w_d z^d + ... + w_1 z`; `w[k-1]` multiplies `z^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentPhase {
    pub w: Vec<C64>,
}

/// `w_1 z^{k_1} + ... + w_d z^{k_d}` with `k_1 < ... < k_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsePhase {
    pub exponents: Vec<u32>,
    pub w: Vec<C64>,
}

impl MomentPhase {
    pub fn new(w: Vec<C64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidInput("moment phase needs d >= 1".into()));
        }
        Ok(MomentPhase { w })
    }

    pub fn degree(&self) -> usize {
        self.w.len()
    }
}

/// Checks `0 < k_1 < ... < k_d`.
pub fn validate_exponents(exponents: &[u32]) -> Result<()> {
    if exponents.is_empty() || exponents[0] == 0 || exponents.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidInput("exponents must be positive and strictly increasing".into()));
    }
    Ok(())
}

impl SparsePhase {
    /// Requires the sparse regime `K < k_d (k_d + 1) / 2`.
    pub fn new(exponents: Vec<u32>, w: Vec<C64>) -> Result<Self> {
        validate_exponents(&exponents)?;
        if exponents.len() != w.len() {
            return Err(Error::InvalidInput("one coefficient per exponent".into()));
        }
        let top = *exponents.last().expect("nonempty") as u64;
        let k: u64 = exponents.iter().map(|&e| e as u64).sum();
        if 2 * k >= top * (top + 1) {
            return Err(Error::InvalidInput(format!(
                "exponent sum {k} is not below {} (not sparse)",
                top * (top + 1) / 2
            )));
        }
        Ok(SparsePhase { exponents, w })
    }

    pub fn exponent_sum(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CoefficientPhase {
    Moment(MomentPhase),
    Sparse(SparsePhase),
}

impl CoefficientPhase {
    pub fn exponents(&self) -> Vec<u32> {
        match self {
            CoefficientPhase::Moment(m) => (1..=m.w.len() as u32).collect(),
            CoefficientPhase::Sparse(s) => s.exponents.clone(),
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        match self {
            CoefficientPhase::Moment(m) => &m.w,
            CoefficientPhase::Sparse(s) => &s.w,
        }
    }

    pub fn poly(&self) -> Result<CPoly1> {
        assemble(&self.exponents(), self.coeffs())
    }
}

pub fn assemble(exponents: &[u32], w: &[C64]) -> Result<CPoly1> {
    let top = exponents.iter().copied().max().unwrap_or(0) as usize;
    let mut c = vec![C64::new(0.0, 0.0); top + 1];
    for (&e, &x) in exponents.iter().zip(w) {
        c[e as usize] += x;
    }
    CPoly1::new(c)
}

/// `I(w) = ∫ e(P_w(z)) φ(z) dz`.
pub fn coefficient_integral(phase: &CoefficientPhase, phi: &BumpSpec, quad: &QuadSpec) -> Result<OscResult> {
    integrate(&Phase::from(phase.poly()?), phi, quad)
}

/// `H(w)`: infimum over the support of `φ` of `max_k |P^{(k)}/k!|^{1/k}`, by grid and descent.
pub fn coefficient_h(phase: &CoefficientPhase, phi: &BumpSpec, grid: usize, refine: usize) -> Result<f64> {
    let p = phase.poly()?;
    if p.degree() < 1 {
        return Ok(0.0);
    }
    let region = RegionSpec::disc(phi.center[0], phi.outer_radius);
    Ok(h_inf(&CPolyN::from_poly1(&p), &region, grid, refine)?.value)
}

/// Row `i` holds the Taylor coefficient of order `k_i` at `z` as a linear form in `w`:
/// `Σ_{m >= i} C(k_m, k_i) z^{k_m - k_i} w_m`. Upper triangular with unit diagonal.
pub fn taylor_map(exponents: &[u32], z: C64) -> DMatrix<C64> {
    let d = exponents.len();
    DMatrix::from_fn(d, d, |i, m| {
        if m < i {
            C64::new(0.0, 0.0)
        } else {
            let (ki, km) = (exponents[i] as usize, exponents[m] as usize);
            z.powu((km - ki) as u32) * binom(km, ki)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscint::QuadRule;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn sparse_regime() {
        assert!(SparsePhase::new(vec![1, 3], vec![c(1.0), c(1.0)]).is_ok());
        assert!(SparsePhase::new(vec![2, 3], vec![c(1.0), c(1.0)]).is_ok());
        assert!(SparsePhase::new(vec![1, 2], vec![c(1.0), c(1.0)]).is_err());
        assert!(SparsePhase::new(vec![3, 1], vec![c(1.0), c(1.0)]).is_err());
    }

    #[test]
    fn integral_is_the_same_object() {
        let phi = BumpSpec::plateau(0.5, 1.0);
        let q = QuadSpec { rule: QuadRule::TensorTrapezoid, ..Default::default() };
        let lam = 30.0;
        let m = CoefficientPhase::Moment(MomentPhase::new(vec![c(0.0), c(lam)]).unwrap());
        let direct = integrate(&CPoly1::from_real(&[0.0, 0.0, lam]).unwrap().into(), &phi, &q).unwrap();
        assert_eq!(coefficient_integral(&m, &phi, &q).unwrap().value, direct.value);
        let s = CoefficientPhase::Sparse(SparsePhase::new(vec![1, 3], vec![c(0.0), c(lam)]).unwrap());
        let direct = integrate(&CPoly1::from_real(&[0.0, 0.0, 0.0, lam]).unwrap().into(), &phi, &q).unwrap();
        assert_eq!(coefficient_integral(&s, &phi, &q).unwrap().value, direct.value);
        let zero = CoefficientPhase::Moment(MomentPhase::new(vec![c(0.0); 3]).unwrap());
        let mass = integrate(&CPoly1::zero().into(), &phi, &q).unwrap();
        assert_eq!(coefficient_integral(&zero, &phi, &q).unwrap().value, mass.value);
    }

    #[test]
    fn h_of_simple_phases() {
        let phi = BumpSpec::plateau(0.5, 1.0);
        let lin = CoefficientPhase::Moment(MomentPhase::new(vec![c(1.0), c(0.0)]).unwrap());
        assert!((coefficient_h(&lin, &phi, 48, 100).unwrap() - 1.0).abs() < 1e-9);
        let sq = CoefficientPhase::Moment(MomentPhase::new(vec![c(0.0), c(1.0)]).unwrap());
        assert!((coefficient_h(&sq, &phi, 48, 100).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn change_of_variables_is_unimodular() {
        for d in 1..=4u32 {
            let e: Vec<u32> = (1..=d).collect();
            let t = taylor_map(&e, C64::new(0.37, -0.81));
            assert!((t.determinant() - 1.0).norm() < 1e-12);
        }
        let t = taylor_map(&[1, 3], C64::new(0.5, 0.5));
        assert!((t.determinant() - 1.0).norm() < 1e-12);
    }
}
