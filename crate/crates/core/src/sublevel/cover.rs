use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measure::{measure_quadtree, Constraint, PlanarDomain, QuadtreeOptions};
use crate::cpoly::{derived_zero_set, nearest_derived_zero, roots, AnalyticFn, CPoly1, CPolyN, C64, ROOT_TOL};
use crate::error::{Error, Result};
use crate::functionals::{h_inf, RegionSpec};
use crate::psbound::{max_min_bound, ExponentMode, MAX_DISTINCT_ROOTS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscCoverCheck {
    pub maxratio: f64,
    pub violations: usize,
    /// Sublevel points actually tested.
    pub samples: usize,
    pub worst_point: C64,
}

fn uniform_disc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>())
}

/// Points of `{z in D_R : |P^{(k)}(z)| >= mu, |P(z)| <= eps}` from preimages of
/// uniform values in the `eps` disc. Gives up after `20 * count` draws.
pub fn sample_local_sublevel(
    p: &CPoly1,
    k: usize,
    eps: f64,
    mu: f64,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<C64>> {
    if p.degree() == 0 {
        return Err(Error::DegreeTooLow { need: 1, got: 0 });
    }
    let dk = p.deriv(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..20 * count.max(1) {
        if out.len() >= count {
            break;
        }
        let w = uniform_disc(&mut rng, eps);
        let shifted = p.add_const(-w);
        for r in roots(&shifted, ROOT_TOL)? {
            if r.z.norm() <= radius && dk.eval(r.z).norm() >= mu && out.len() < count {
                out.push(r.z);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySublevel);
    }
    Ok(out)
}

/// Largest distance from a sampled local sublevel point to the derived zero set,
/// in units of `(eps/mu)^{1/k}`; `violations` counts ratios above `c_d`.
#[allow(clippy::too_many_arguments)]
pub fn verify_disc_cover(
    p: &CPoly1,
    k: usize,
    eps: f64,
    mu: f64,
    radius: f64,
    samples: usize,
    seed: u64,
    c_d: f64,
) -> Result<DiscCoverCheck> {
    if k == 0 || k > p.degree() {
        return Err(Error::InvalidInput(format!("k = {k} must be in 1..=deg P")));
    }
    if !(eps > 0.0 && mu > 0.0 && radius > 0.0) {
        return Err(Error::InvalidInput("eps, mu, R must be positive".into()));
    }
    let zeros = derived_zero_set(p)?;
    let pts = sample_local_sublevel(p, k, eps, mu, radius, samples, seed)?;
    let unit = (eps / mu).powf(1.0 / k as f64);
    let mut out = DiscCoverCheck {
        maxratio: 0.0,
        violations: 0,
        samples: pts.len(),
        worst_point: pts[0],
    };
    for z in pts {
        let (_, d) = nearest_derived_zero(&zeros, z).expect("nonempty derived zero set");
        let ratio = d / unit;
        if ratio > c_d {
            out.violations += 1;
        }
        if ratio > out.maxratio {
            out.maxratio = ratio;
            out.worst_point = z;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KwSandwich {
    pub roots: Vec<C64>,
    pub mults: Vec<u32>,
    pub r: Vec<f64>,
    pub inner_ok: bool,
    pub outer_ok: bool,
    pub inner_violations: usize,
    pub outer_violations: usize,
}

/// Checks `U (B_{2^-d r_j} n D_R) ⊆ {|P| <= 1} ⊆ U B_{2^d r_j}` on a grid of the
/// square `[-R, R]^2` plus points on the inner circles.
pub fn kw_sandwich(p: &CPoly1, radius: f64, grid: usize) -> Result<KwSandwich> {
    let d = p.degree();
    if d == 0 {
        return Err(Error::DegreeTooLow { need: 1, got: 0 });
    }
    if grid < 2 {
        return Err(Error::InvalidInput("grid must be >= 2".into()));
    }
    let rs = roots(p, ROOT_TOL)?;
    if rs.len() > MAX_DISTINCT_ROOTS {
        return Err(Error::TooManyRoots(rs.len()));
    }
    let zs: Vec<C64> = rs.iter().map(|r| r.z).collect();
    let ms: Vec<u32> = rs.iter().map(|r| r.multiplicity as u32).collect();
    let radii: Vec<f64> = max_min_bound(p.leading(), &zs, &ms, ExponentMode::Sublevel)?
        .per_root
        .iter()
        .map(|b| b.value)
        .collect();
    let shrink = 0.5f64.powi(d as i32);
    let grow = 2f64.powi(d as i32);
    // absolute slack for roundoff at the level set
    let level = 1.0 + 1e-9;

    let mut inner_bad = 0;
    let mut outer_bad = 0;
    let h = 2.0 * radius / (grid - 1) as f64;
    for i in 0..grid {
        for j in 0..grid {
            let z = C64::new(-radius + i as f64 * h, -radius + j as f64 * h);
            if z.norm() > radius {
                continue;
            }
            let small = p.eval(z).norm() <= level;
            let near = |s: f64| zs.iter().zip(&radii).any(|(w, r)| (z - w).norm() <= s * r);
            if !small && near(shrink) {
                inner_bad += 1;
            }
            if small && !near(grow) {
                outer_bad += 1;
            }
        }
    }
    for (w, r) in zs.iter().zip(&radii) {
        let rho = shrink * r;
        for t in 0..64 {
            for frac in [0.5, 1.0] {
                let z = w + C64::from_polar(frac * rho, std::f64::consts::TAU * t as f64 / 64.0);
                if z.norm() <= radius && p.eval(z).norm() > level {
                    inner_bad += 1;
                }
            }
        }
    }
    Ok(KwSandwich {
        roots: zs,
        mults: ms,
        r: radii,
        inner_ok: inner_bad == 0,
        outer_ok: outer_bad == 0,
        inner_violations: inner_bad,
        outer_violations: outer_bad,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HEquivalence {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `H_{f,R}` as computed.
    pub h_inf: f64,
    /// Value of `a` attaining `rhs`.
    pub best_a: C64,
    /// Whether `best_a` is the witness `f(z_*)`.
    pub witness_best: bool,
}

/// `min(R, 1/H_{f,R})^2` against the largest measured `|{z in D_R : |f(z) - a| <= 1}|`
/// over `a = f(z_*)` and `a_samples` values `f(z)` at random `z` in the disc.
pub fn h_sublevel_equivalence(
    f: &CPoly1,
    radius: f64,
    grid: usize,
    a_samples: usize,
    seed: u64,
) -> Result<HEquivalence> {
    if f.degree() == 0 {
        return Err(Error::DegreeTooLow { need: 1, got: 0 });
    }
    let region = RegionSpec::disc(C64::new(0.0, 0.0), radius);
    let inf = h_inf(&CPolyN::from_poly1(f), &region, grid, 200)?;
    let scale = radius.min(1.0 / inf.value);
    let lhs = scale * scale;

    let fun = AnalyticFn::Poly(f.clone());
    let dom = PlanarDomain::Disc {
        center: C64::new(0.0, 0.0),
        radius,
    };
    let opts = QuadtreeOptions {
        base: 32,
        min_cell: scale / 128.0,
        ..QuadtreeOptions::default()
    };
    let measure = |a: C64| -> Result<f64> {
        Ok(measure_quadtree(&fun, &[Constraint::sublevel(a, 1.0)], &dom, &opts)?.value)
    };
    let witness = f.eval(inf.minimizer[0]);
    let mut best_a = witness;
    let mut rhs = measure(witness)?;
    let mut witness_best = true;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..a_samples {
        let a = f.eval(uniform_disc(&mut rng, radius));
        let m = measure(a)?;
        if m > rhs {
            rhs = m;
            best_a = a;
            witness_best = false;
        }
    }
    Ok(HEquivalence {
        lhs,
        rhs,
        ratio: rhs / lhs,
        h_inf: inf.value,
        best_a,
        witness_best,
    })
}
