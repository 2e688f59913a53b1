//! Root-cluster bounds built from the roots of `f'`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cpoly::{roots, CPoly1, C64, ROOT_TOL};
use crate::error::{Error, Result};
use crate::oscint::{integrate, BumpSpec, OscResult, Phase, QuadSpec};

/// Largest number of distinct roots accepted by the enumeration.
pub const MAX_DISTINCT_ROOTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCluster {
    pub anchor: usize,
    /// Sorted indices, always containing `anchor`.
    pub members: Vec<usize>,
    /// Multiplicity sum over the members.
    pub s: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExponentMode {
    /// Exponent `2/(S+1)`, the oscillatory integral bound.
    Integral,
    /// Exponent `1/S`, the sublevel radii.
    Sublevel,
    /// Exponent `1/(S+1)`, compared against `H`.
    Functional,
}

impl ExponentMode {
    fn exponent(self, s: u32) -> f64 {
        match self {
            ExponentMode::Integral => 2.0 / (s as f64 + 1.0),
            ExponentMode::Sublevel => 1.0 / s as f64,
            ExponentMode::Functional => 1.0 / (s as f64 + 1.0),
        }
    }
}

/// All clusters containing `anchor`, in bitmask order.
pub fn clusters(mults: &[u32], anchor: usize) -> Result<Vec<RootCluster>> {
    let m = mults.len();
    if m > MAX_DISTINCT_ROOTS {
        return Err(Error::TooManyRoots(m));
    }
    if anchor >= m {
        return Err(Error::InvalidInput(format!("anchor {anchor} out of range for {m} roots")));
    }
    let others: Vec<usize> = (0..m).filter(|&i| i != anchor).collect();
    let mut out = Vec::with_capacity(1 << others.len());
    for mask in 0u32..(1u32 << others.len()) {
        let mut members = vec![anchor];
        members.extend(
            others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &i)| i),
        );
        members.sort_unstable();
        let s = members.iter().map(|&i| mults[i]).sum();
        out.push(RootCluster { anchor, members, s });
    }
    Ok(out)
}

/// `[1 / |a prod_{k not in C} (w_anchor - w_k)^{m_k}|]^{p}`, or with the
/// reciprocal dropped in `Functional` mode.
pub fn ps_quantity(a: C64, roots: &[C64], mults: &[u32], cluster: &RootCluster, mode: ExponentMode) -> f64 {
    let w = roots[cluster.anchor];
    let mut prod = a.norm();
    for (k, (&r, &m)) in roots.iter().zip(mults).enumerate() {
        if cluster.members.binary_search(&k).is_err() {
            prod *= (w - r).norm().powi(m as i32);
        }
    }
    let p = mode.exponent(cluster.s);
    match mode {
        ExponentMode::Functional => prod.powf(p),
        _ => prod.recip().powf(p),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootBound {
    pub root: usize,
    pub cluster: RootCluster,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PSBound {
    /// Leading coefficient of the factored polynomial.
    pub lead: C64,
    pub roots: Vec<C64>,
    pub mults: Vec<u32>,
    pub per_root: Vec<RootBound>,
    pub overall: f64,
}

/// Distinct roots and multiplicities of `p`.
pub fn factor(p: &CPoly1) -> Result<(C64, Vec<C64>, Vec<u32>)> {
    let rs = roots(p, ROOT_TOL)?;
    if rs.len() > MAX_DISTINCT_ROOTS {
        return Err(Error::TooManyRoots(rs.len()));
    }
    Ok((
        p.leading(),
        rs.iter().map(|r| r.z).collect(),
        rs.iter().map(|r| r.multiplicity as u32).collect(),
    ))
}

/// `max_j min_{C containing j}` of the cluster quantity for the factored `p`.
pub fn max_min_bound(lead: C64, roots: &[C64], mults: &[u32], mode: ExponentMode) -> Result<PSBound> {
    let mut per_root = Vec::with_capacity(roots.len());
    for j in 0..roots.len() {
        let best = clusters(mults, j)?
            .into_iter()
            .map(|c| {
                let v = ps_quantity(lead, roots, mults, &c, mode);
                (c, v)
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("at least one cluster");
        per_root.push(RootBound {
            root: j,
            cluster: best.0,
            value: best.1,
        });
    }
    let overall = per_root.iter().map(|r| r.value).fold(0.0, f64::max);
    Ok(PSBound {
        lead,
        roots: roots.to_vec(),
        mults: mults.to_vec(),
        per_root,
        overall,
    })
}

/// The bound for `|I_φ(f)|` from the roots of `f'`.
pub fn ps_bound(f: &CPoly1) -> Result<PSBound> {
    if f.degree() < 2 {
        return Err(Error::DegreeTooLow {
            need: 2,
            got: f.degree(),
        });
    }
    let (lead, rs, ms) = factor(&f.deriv(1))?;
    max_min_bound(lead, &rs, &ms, ExponentMode::Integral)
}

/// `H_f(z) = max_k |f^{(k)}(z)/k!|^{1/k}`.
pub fn h_value(f: &CPoly1, z: C64) -> f64 {
    f.taylor_at(z)
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsVsH {
    pub max_violation_ratio: f64,
    pub worst_point: C64,
    /// Root attaining the min at the worst point.
    pub worst_root: usize,
}

/// `min_xi max_{C containing xi} [|a prod|]^{1/(S+1)} / H_f(z)` maximized over
/// uniform samples `z` in the disc of radius 2 and the critical points inside it, where
/// `H_f` has its narrow minima at large scale.
pub fn ps_vs_h(f: &CPoly1, z_samples: usize, seed: u64) -> Result<PsVsH> {
    if f.degree() < 2 {
        return Err(Error::DegreeTooLow {
            need: 2,
            got: f.degree(),
        });
    }
    let (lead, rs, ms) = factor(&f.deriv(1))?;
    // min over roots of max over clusters; independent of z
    let mut lhs = f64::INFINITY;
    let mut arg = 0;
    for j in 0..rs.len() {
        let v = clusters(&ms, j)?
            .iter()
            .map(|c| ps_quantity(lead, &rs, &ms, c, ExponentMode::Functional))
            .fold(0.0, f64::max);
        if v < lhs {
            lhs = v;
            arg = j;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = PsVsH {
        max_violation_ratio: 0.0,
        worst_point: C64::new(0.0, 0.0),
        worst_root: arg,
    };
    let samples = (0..z_samples.max(1))
        .map(|_| C64::from_polar(2.0 * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>()))
        .collect::<Vec<_>>();
    for z in samples.into_iter().chain(rs.iter().copied().filter(|r| r.norm() <= 2.0)) {
        let ratio = lhs / h_value(f, z);
        if ratio > out.max_violation_ratio {
            out.max_violation_ratio = ratio;
            out.worst_point = z;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsVsIntegral {
    pub integral: OscResult,
    pub bound: f64,
    /// `|I_φ(f)| / bound`.
    pub ratio: f64,
}

pub fn ps_vs_integral(f: &CPoly1, phi: &BumpSpec, quad: &QuadSpec) -> Result<PsVsIntegral> {
    let bound = ps_bound(f)?.overall;
    let integral = integrate(&Phase::from(f.clone()), phi, quad)?;
    let ratio = integral.value.norm() / bound;
    Ok(PsVsIntegral { integral, bound, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn cluster_counts() {
        assert_eq!(clusters(&[1], 0).unwrap().len(), 1);
        assert_eq!(clusters(&[1, 2, 1], 0).unwrap().len(), 4);
        let m = vec![1u32; 12];
        let all = clusters(&m, 5).unwrap();
        assert_eq!(all.len(), 2048);
        assert!(all.iter().all(|c| c.s as usize == c.members.len() && c.members.contains(&5)));
        assert!(matches!(clusters(&[1; 13], 0), Err(Error::TooManyRoots(13))));
    }

    #[test]
    fn quantities() {
        let single = RootCluster { anchor: 0, members: vec![0], s: 2 };
        let v = ps_quantity(c(3.0), &[c(0.0)], &[2], &single, ExponentMode::Integral);
        assert!((v - (1.0f64 / 3.0).powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((v - 0.4807).abs() < 1e-4);

        let rs = [c(1.0), c(-1.0)];
        let one = RootCluster { anchor: 0, members: vec![0], s: 1 };
        assert!((ps_quantity(c(1.0), &rs, &[1, 1], &one, ExponentMode::Integral) - 0.5).abs() < 1e-12);
        let both = RootCluster { anchor: 0, members: vec![0, 1], s: 2 };
        assert!((ps_quantity(c(1.0), &rs, &[1, 1], &both, ExponentMode::Integral) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_for_examples() {
        let cube = CPoly1::from_real(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        let b = ps_bound(&cube).unwrap();
        assert!((b.overall - 3f64.powf(-2.0 / 3.0)).abs() < 1e-9);

        let f = CPoly1::from_real(&[0.0, -1.0, 0.0, 1.0 / 3.0]).unwrap();
        let b = ps_bound(&f).unwrap();
        // each root: min(1/2, 1) = 1/2
        assert!((b.overall - 0.5).abs() < 1e-12, "{b:?}");
        assert!(ps_bound(&CPoly1::from_real(&[0.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn bound_rescales_algebraically() {
        let f = CPoly1::from_real(&[0.3, -1.0, 0.5, 1.0, 0.2]).unwrap();
        let lam = 7.5;
        let b = ps_bound(&f.scale(c(lam))).unwrap();
        let (lead, rs, ms) = factor(&f.deriv(1)).unwrap();
        let direct = max_min_bound(lead * lam, &rs, &ms, ExponentMode::Integral).unwrap();
        assert!((b.overall - direct.overall).abs() < 1e-9 * direct.overall);
    }

    #[test]
    fn vs_h_square() {
        let f = CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let r = ps_vs_h(&f, 200, 1).unwrap();
        // lhs = 2^{1/2}; H_f(z) >= 1
        assert!(r.max_violation_ratio <= 2f64.sqrt() + 1e-12);
        let g = CPoly1::from_real(&[0.0, -1.0, 0.0, 1.0 / 3.0]).unwrap();
        assert!(ps_vs_h(&g, 50, 2).unwrap().max_violation_ratio.is_finite());
    }

    #[test]
    fn integral_ratio_is_scale_stable() {
        let phi = BumpSpec::plateau(0.5, 1.0);
        let q = QuadSpec::default();
        for k in [2usize, 3] {
            let g = CPoly1::monomial(c(1.0), k).unwrap();
            let a = ps_vs_integral(&g.scale(c(100.0)), &phi, &q).unwrap();
            let b = ps_vs_integral(&g.scale(c(1000.0)), &phi, &q).unwrap();
            let r = a.ratio / b.ratio;
            assert!(r > 0.5 && r < 2.0, "k={k}: {} {}", a.ratio, b.ratio);
        }
    }
}
