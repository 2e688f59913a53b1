use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::bump::BumpSpec;
use super::quad::{integrate, OscResult, Phase, QuadRule, QuadSpec};
use crate::cpoly::{CPolyN, C64};
use crate::error::{Error, Result};
use crate::fit::loglog_fit;
use crate::functionals::{h_inf, DerivFunctional, RegionSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub lambda: f64,
    pub abs: f64,
    pub err: f64,
    pub rule: QuadRule,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub samples: Vec<DecaySample>,
    /// Samples left out of the fit because `|I|` came out exactly zero.
    pub dropped: usize,
}

/// `λ_0 · q^i`, the log-spaced grid used by the decay scans.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::InvalidInput("log grid needs 0 < lo < hi and count >= 2".into()));
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| lo * (step * i as f64).exp()).collect())
}

/// Least-squares slope of `log |I_φ(λP)|` against `log λ`.
pub fn decay_fit(p: &CPolyN, phi: &BumpSpec, lambdas: &[f64], quad: &QuadSpec) -> Result<DecayFit> {
    if lambdas.len() < 5 {
        return Err(Error::InvalidInput("decay fit needs at least 5 values of lambda".into()));
    }
    if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidInput("lambda values must be positive".into()));
    }
    let logs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let step = logs[1] - logs[0];
    let spaced = step > 0.0 && logs.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-6 * step.max(1.0));
    if !spaced {
        return Err(Error::InvalidInput("lambda grid must be increasing and log-spaced".into()));
    }
    let mut samples = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let f = Phase::Poly(p.scale(C64::new(lam, 0.0)));
        let r = integrate(&f, phi, quad)?;
        samples.push(DecaySample {
            lambda: lam,
            abs: r.value.norm(),
            err: r.err,
            rule: r.quad_used.rule,
            converged: r.converged,
        });
    }
    let pts: Vec<(f64, f64)> = samples.iter().filter(|s| s.abs > 0.0).map(|s| (s.lambda, s.abs)).collect();
    let dropped = samples.len() - pts.len();
    let fit = loglog_fit(&pts)?;
    Ok(DecayFit {
        slope: fit.slope,
        intercept: fit.intercept,
        residual: fit.residual,
        samples,
        dropped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThmRatio {
    pub integral: OscResult,
    /// `H_{P,φ}`: infimum of the H functional over the support of `φ`.
    pub h: f64,
    /// `|I_φ(P)| · H²`.
    pub ratio: f64,
}

/// The scale-invariant quantity `|I_φ(P)| H_{P,φ}^2`.
pub fn thm_bound_check(p: &CPolyN, phi: &BumpSpec, quad: &QuadSpec) -> Result<ThmRatio> {
    phi.validate()?;
    if p.nvars() != phi.nvars() {
        return Err(Error::InvalidInput("phase and bump dimensions differ".into()));
    }
    if p.degree() < 1 {
        return Err(Error::Precondition("H vanishes identically for a constant phase".into()));
    }
    let grid = if p.nvars() == 1 { 48 } else { 16 };
    let region = RegionSpec::ball(phi.center.clone(), phi.outer_radius);
    let h = h_inf(p, &region, grid, 200)?.value;
    if !(h > 0.0) {
        return Err(Error::Precondition("H vanishes on the support".into()));
    }
    let integral = integrate(&Phase::Poly(p.clone()), phi, quad)?;
    let ratio = integral.value.norm() * h * h;
    Ok(ThmRatio { integral, h, ratio })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub centers: Vec<C64>,
    /// `ε / J(center)`.
    pub radii: Vec<f64>,
    /// Largest number of the 3×-dilated discs sharing a point.
    pub max_overlap: usize,
    /// Largest `max(J(z)/J(c), J(c)/J(z))` over grid points `z` of a dilated disc.
    pub j_ratio_max: f64,
    /// Candidate points not covered by any dilated disc.
    pub uncovered: usize,
}

/// Default upper limit for `ε` in [`covering_decomposition`].
pub const COVERING_EPS_MAX: f64 = 0.1;

/// Greedy Vitali selection of disjoint discs `D(z, ε/J(z))`, largest first, over a
/// `grid × grid` lattice of the support of `φ` (n = 1).
pub fn covering_decomposition(p: &CPolyN, phi: &BumpSpec, eps: f64, grid: usize) -> Result<Covering> {
    phi.validate()?;
    if p.nvars() != 1 || phi.nvars() != 1 {
        return Err(Error::DimensionTooHigh(p.nvars().max(phi.nvars())));
    }
    if !(eps > 0.0 && eps <= COVERING_EPS_MAX) {
        return Err(Error::Precondition(format!("eps must lie in (0, {COVERING_EPS_MAX}]")));
    }
    if grid < 8 {
        return Err(Error::InvalidInput("covering grid must be >= 8".into()));
    }
    let jfun = DerivFunctional::j(p, true)?;
    let c0 = phi.center[0];
    let r = phi.outer_radius;
    let h = 2.0 * r / grid as f64;
    let mut cands: Vec<(C64, f64)> = Vec::new();
    for i in 0..grid {
        for k in 0..grid {
            let z = c0 + C64::new(-r + (i as f64 + 0.5) * h, -r + (k as f64 + 0.5) * h);
            if (z - c0).norm() <= r {
                let j = jfun.value(&[z]);
                if !(j > 0.0) {
                    return Err(Error::Precondition("J vanishes on the support".into()));
                }
                cands.push((z, j));
            }
        }
    }
    // buckets of side 3·max radius: every relevant center sits in the 3×3 neighbourhood
    let jmin = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let cell = 3.0 * eps / jmin;
    let key = |z: C64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let near = |buckets: &HashMap<(i64, i64), Vec<usize>>, z: C64| -> Vec<usize> {
        let (a, b) = key(z);
        let mut out = Vec::new();
        for da in -1..=1 {
            for db in -1..=1 {
                if let Some(v) = buckets.get(&(a + da, b + db)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out
    };

    // largest radius first, lattice order breaks ties
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| cands[a].1.total_cmp(&cands[b].1));
    let mut centers: Vec<C64> = Vec::new();
    let mut radii: Vec<f64> = Vec::new();
    let mut jc = Vec::new();
    for idx in order {
        let (z, j) = cands[idx];
        let rad = eps / j;
        if near(&buckets, z).iter().all(|&s| (z - centers[s]).norm() > rad + radii[s]) {
            buckets.entry(key(z)).or_default().push(centers.len());
            centers.push(z);
            radii.push(rad);
            jc.push(j);
        }
    }

    let mut j_ratio_max: f64 = 1.0;
    let mut uncovered = 0;
    for &(z, j) in &cands {
        let mut covered = false;
        for s in near(&buckets, z) {
            if (z - centers[s]).norm() <= 3.0 * radii[s] {
                covered = true;
                j_ratio_max = j_ratio_max.max((j / jc[s]).max(jc[s] / j));
            }
        }
        if !covered {
            uncovered += 1;
        }
    }
    let max_overlap = max_depth(&centers, &radii.iter().map(|x| 3.0 * x).collect::<Vec<_>>());
    Ok(Covering { centers, radii, max_overlap, j_ratio_max, uncovered })
}

/// Maximum depth of an arrangement of open discs. The maximum is attained near a
/// center or near an intersection point of two boundary circles; each intersection
/// point is probed just inside both discs, so tangencies and lattice ties don't count.
fn max_depth(centers: &[C64], radii: &[f64]) -> usize {
    let depth = |p: C64| -> usize {
        centers
            .iter()
            .zip(radii)
            .filter(|(c, r)| (p - *c).norm() < **r)
            .count()
    };
    let mut best = centers.iter().map(|&c| depth(c)).max().unwrap_or(0);
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let mut by_re: Vec<usize> = (0..centers.len()).collect();
    by_re.sort_by(|&a, &b| centers[a].re.total_cmp(&centers[b].re));
    for (pos, &i) in by_re.iter().enumerate() {
        for &k in &by_re[pos + 1..] {
            if centers[k].re - centers[i].re >= 2.0 * rmax {
                break;
            }
            let d = (centers[k] - centers[i]).norm();
            let (ri, rk) = (radii[i], radii[k]);
            if d == 0.0 || d >= ri + rk || d <= (ri - rk).abs() {
                continue;
            }
            let a = (ri * ri - rk * rk + d * d) / (2.0 * d);
            let hh = (ri * ri - a * a).max(0.0).sqrt();
            let u = (centers[k] - centers[i]) / d;
            let base = centers[i] + u * a;
            let perp = C64::new(-u.im, u.re) * hh;
            let nudge = 1e-7 * ri.min(rk);
            for p in [base + perp, base - perp] {
                // step towards the chord midpoint, which lies inside both discs
                let q = p + (base - p) / (base - p).norm().max(1e-300) * nudge;
                best = best.max(depth(q));
            }
        }
    }
    best
}
