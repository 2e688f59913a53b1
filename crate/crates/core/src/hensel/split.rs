use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lemma::{check_conditions, iterate_with, IterateOptions, Thresholds};
use crate::cpoly::poly1::factorial;
use crate::cpoly::{roots, AnalyticFn, DerivedZero, C64, ROOT_TOL};
use crate::error::{Error, Result};

/// Discs of a common radius around located zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscCover {
    pub centers: Vec<DerivedZero>,
    pub radius: f64,
}

impl DiscCover {
    pub fn covers(&self, z: C64) -> bool {
        let r = self.radius * (1.0 + 1e-9);
        self.centers.iter().any(|c| (c.z - z).norm() <= r)
    }

    fn insert(&mut self, j: usize, z: C64) {
        let dup = self
            .centers
            .iter()
            .any(|c| c.j == j && (c.z - z).norm() <= 1e-9 * z.norm().max(1.0));
        if !dup {
            self.centers.push(DerivedZero { j, z });
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitOptions {
    pub samples: usize,
    pub seed: u64,
    /// Smallness tolerance for `eps * M^{2k-1}` when `k >= 2`.
    pub tau: f64,
    /// Polar grid resolution for the derivative lower bound check.
    pub check_grid: usize,
    pub thresholds: Thresholds,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            samples: 400,
            seed: 0,
            tau: 1e-2,
            check_grid: 48,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCover {
    /// Class index `1..=k`.
    pub class: usize,
    /// Derivative of `f` the Hensel call was run on.
    pub derivative: usize,
    /// Hensel order used for this class.
    pub order: usize,
    pub cover: DiscCover,
    pub points: usize,
    /// Points whose Hensel conditions passed.
    pub conditions_ok: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub k: usize,
    pub eps: f64,
    pub classes: Vec<ClassCover>,
    pub samples: usize,
    /// Points whose designated Hensel call failed.
    pub residue: usize,
    /// Points not inside their class cover.
    pub uncovered: usize,
}

impl SplitReport {
    pub fn covers(&self) -> Vec<DiscCover> {
        self.classes.iter().map(|c| c.cover.clone()).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.classes.iter().map(|c| c.cover.radius).fold(0.0, f64::max)
    }
}

/// Points of `{z in D : |f(z)| <= eps}`. Polynomials use preimages of
/// uniform targets in the `eps`-disc; other functions use Newton from a seed grid.
pub fn sample_sublevel(f: &AnalyticFn, eps: f64, count: usize, seed: u64) -> Result<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let target = |rng: &mut ChaCha8Rng| {
        let r = eps * rng.gen::<f64>().sqrt();
        C64::from_polar(r, std::f64::consts::TAU * rng.gen::<f64>())
    };
    let max_rounds = count.max(1) * 8;
    if let Some(p) = f.as_poly() {
        if p.degree() == 0 {
            return Err(Error::DegreeTooLow { need: 1, got: 0 });
        }
        for _ in 0..max_rounds {
            if out.len() >= count {
                break;
            }
            let w = target(&mut rng);
            for r in roots(&p.add_const(-w), ROOT_TOL)? {
                if r.z.norm() <= 1.0 && out.len() < count {
                    out.push(r.z);
                }
            }
        }
    } else {
        for _ in 0..max_rounds {
            if out.len() >= count {
                break;
            }
            let w = target(&mut rng);
            let mut z = C64::from_polar(rng.gen::<f64>().sqrt(), std::f64::consts::TAU * rng.gen::<f64>());
            for _ in 0..60 {
                let d = f.eval(1, z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = (f.eval(0, z) - w) / d;
                z -= step;
                if !(z.norm() <= 2.0) || step.norm() <= 1e-15 * z.norm().max(1.0) {
                    break;
                }
            }
            if z.norm() <= 1.0 && f.eval(0, z).norm() <= eps {
                out.push(z);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptySublevel);
    }
    Ok(out)
}

fn check_lower_bound(f: &AnalyticFn, k: usize, grid: usize) -> Result<()> {
    let rings = grid.max(4);
    let spokes = 2 * rings;
    let mut worst = f.eval(k, C64::new(0.0, 0.0)).norm();
    for a in 1..=rings {
        let r = a as f64 / rings as f64;
        for b in 0..spokes {
            let z = C64::from_polar(r, std::f64::consts::TAU * b as f64 / spokes as f64);
            worst = worst.min(f.eval(k, z).norm());
        }
    }
    if worst < 1.0 {
        return Err(Error::Precondition(format!("min |f^({k})| on the disc grid = {worst:.3e} < 1")));
    }
    Ok(())
}

/// Cover of the sublevel set when `|f'| >= 1` on the disc.
pub fn sublevel_split_k1(f: &AnalyticFn, eps: f64, sup_bound: f64, opts: &SplitOptions) -> Result<SplitReport> {
    if !(eps > 0.0) || !(sup_bound > 0.0) {
        return Err(Error::InvalidInput("eps and M must be positive".into()));
    }
    if 64.0 * eps * sup_bound > 1.0 {
        return Err(Error::SmallnessViolated(format!("64 eps M = {:.3e} > 1", 64.0 * eps * sup_bound)));
    }
    check_lower_bound(f, 1, opts.check_grid)?;
    let pts = sample_sublevel(f, eps, opts.samples, opts.seed)?;
    let mut class = ClassCover {
        class: 1,
        derivative: 0,
        order: 1,
        cover: DiscCover { centers: Vec::new(), radius: 2.0 * eps },
        points: 0,
        conditions_ok: 0,
    };
    let mut residue = 0;
    let mut located = Vec::with_capacity(pts.len());
    for &z in &pts {
        match run_hensel(f, z, 1, sup_bound, &opts.thresholds) {
            Some((root, ok)) => {
                class.points += 1;
                class.conditions_ok += ok as usize;
                class.cover.insert(0, root);
                located.push(z);
            }
            None => residue += 1,
        }
    }
    let uncovered = residue + located.iter().filter(|&&z| !class.cover.covers(z)).count();
    Ok(SplitReport {
        k: 1,
        eps,
        classes: vec![class],
        samples: pts.len(),
        residue,
        uncovered,
    })
}

/// Cover of the sublevel set when `|f^{(k)}| >= 1` on the disc, split into
/// `k` classes by the chain of derivative ratios.
pub fn sublevel_split_k(
    f: &AnalyticFn,
    k: usize,
    eps: f64,
    sup_bound: f64,
    eta: f64,
    c0: f64,
    opts: &SplitOptions,
) -> Result<SplitReport> {
    if k == 1 {
        return sublevel_split_k1(f, eps, sup_bound, opts);
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    if !(eps > 0.0) || !(sup_bound > 0.0) || !(eta > 0.0) || !(c0 > 0.0) {
        return Err(Error::InvalidInput("eps, M, eta, c0 must be positive".into()));
    }
    let small = eps * sup_bound.powi(2 * k as i32 - 1);
    if small > opts.tau {
        return Err(Error::SmallnessViolated(format!(
            "eps M^(2k-1) = {small:.3e} > {:.3e}",
            opts.tau
        )));
    }
    check_lower_bound(f, k, opts.check_grid)?;
    let e = eps.powf(1.0 / k as f64);
    let kf = k as f64;
    let a = c0 * sup_bound.powf((kf - 1.0) / kf);
    // d[j] for 2 <= j <= k-1
    let mut d = vec![0.0; k + 1];
    if k >= 3 {
        d[2] = sup_bound.powf(-1.0 / kf);
        for j in 3..k {
            d[j] = eta * d[j - 1];
        }
    }
    let dk: f64 = (2..k).map(|j| d[j]).product();
    let radius = |class: usize| match class {
        1 => 2.0 * a * e,
        c if c == k => 2.0 / (a * dk) * e,
        c => 2.0 * d[c] * e,
    };
    let mut classes: Vec<ClassCover> = (1..=k)
        .map(|c| ClassCover {
            class: c,
            derivative: if c == 1 { k - 1 } else { k - c },
            order: if c == 1 { 1 } else { c - 1 },
            cover: DiscCover { centers: Vec::new(), radius: radius(c) },
            points: 0,
            conditions_ok: 0,
        })
        .collect();

    let pts = sample_sublevel(f, eps, opts.samples, opts.seed)?;
    let mut residue = 0;
    let mut placed: Vec<(usize, C64)> = Vec::with_capacity(pts.len());
    for &z in &pts {
        let abs: Vec<f64> = (0..=k).map(|i| f.eval(i, z).norm()).collect();
        let class = if abs[k - 1] <= a * e {
            1
        } else {
            (2..k).find(|&j| abs[k - j] <= d[j] * e * abs[k - j + 1]).unwrap_or(k)
        };
        let cc = &mut classes[class - 1];
        let phi = f.derivative(cc.derivative);
        // sup of f^{(i)} on the 7/4 disc is at most i! 4^i M
        let sup = factorial(cc.derivative) * 4f64.powi(cc.derivative as i32) * sup_bound;
        match run_hensel(&phi, z, cc.order, sup, &opts.thresholds) {
            Some((root, ok)) => {
                cc.points += 1;
                cc.conditions_ok += ok as usize;
                cc.cover.insert(cc.derivative, root);
                placed.push((class, z));
            }
            None => residue += 1,
        }
    }
    let uncovered = residue
        + placed
            .iter()
            .filter(|(c, z)| !classes[c - 1].cover.covers(*z))
            .count();
    Ok(SplitReport {
        k,
        eps,
        classes,
        samples: pts.len(),
        residue,
        uncovered,
    })
}

/// Located root and whether the conditions passed; `None` if the run failed.
fn run_hensel(phi: &AnalyticFn, z0: C64, order: usize, sup: f64, th: &Thresholds) -> Option<(C64, bool)> {
    let cond = check_conditions(phi, z0, order, sup, th).ok()?;
    let cert = iterate_with(phi, z0, &IterateOptions::default(), Some(&cond)).ok()?;
    Some((cert.root, cond.ok))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::CPoly1;

    fn poly(c: &[f64]) -> AnalyticFn {
        AnalyticFn::Poly(CPoly1::from_real(c).unwrap())
    }

    #[test]
    fn identity_single_disc() {
        let f = poly(&[0.0, 1.0]);
        let rep = sublevel_split_k1(&f, 1e-3, 1.75, &SplitOptions::default()).unwrap();
        let cov = &rep.classes[0].cover;
        assert_eq!(cov.centers.len(), 1);
        assert!(cov.centers[0].z.norm() < 1e-15);
        assert!((cov.radius - 2e-3).abs() < 1e-18);
        assert_eq!(rep.uncovered, 0);
    }

    #[test]
    fn exp_counterexample_not_small() {
        let f = AnalyticFn::ExpCounterexample { n: 20.0 };
        let m = 40f64.exp() / 20.0;
        let r = sublevel_split_k1(&f, 1e-4, m, &SplitOptions::default());
        assert!(matches!(r, Err(Error::SmallnessViolated(_))));
    }

    #[test]
    fn shifted_quadratic_near_two() {
        let f = poly(&[-4.0, 0.0, 1.0]).shifted(C64::new(2.0, 0.0));
        let m = f.sup_bound(1.75);
        let rep = sublevel_split_k1(&f, 1e-5, m, &SplitOptions::default()).unwrap();
        let cov = &rep.classes[0].cover;
        assert_eq!(cov.centers.len(), 1);
        // back in the original coordinate the center is 2
        assert!((cov.centers[0].z + 2.0 - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(rep.uncovered, 0);
    }

    #[test]
    fn square_k2_centered_at_origin() {
        let f = poly(&[0.0, 0.0, 1.0]);
        let rep = sublevel_split_k(&f, 2, 1e-6, 3.0625, 0.25, 64.0, &SplitOptions::default()).unwrap();
        for c in &rep.classes {
            for z in &c.cover.centers {
                assert!(z.z.norm() < 1e-12);
            }
            assert!(c.cover.radius / 1e-3 < 1e3);
        }
        assert_eq!(rep.uncovered, 0);
    }

    #[test]
    fn cubic_dominant_k3_covered() {
        // f''' = 6 * 1.2 >= 1 on the disc
        let f = poly(&[0.01, -0.02, 0.1, 1.2]);
        let m = f.sup_bound(1.75);
        let eps = 1e-2 / m.powi(5) * 0.5;
        let rep = sublevel_split_k(&f, 3, eps, m, 0.25, 64.0, &SplitOptions::default()).unwrap();
        assert_eq!(rep.uncovered, 0, "{rep:?}");
        assert!(rep.samples > 100);
    }
}
