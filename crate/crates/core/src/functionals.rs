//! The H and J derivative functionals, their infima over discs and balls, and the
//! ratio experiments built on the J infimum.

use serde::{Deserialize, Serialize};

use crate::cpoly::{multi_factorial, CPoly1, CPolyN, MultiIndex, C64};
use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LineFit};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HEvaluation {
    pub value: f64,
    pub argmax_alpha: MultiIndex,
    pub at: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionKind {
    Disc,
    Ball,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub center: Vec<C64>,
    pub radius: f64,
}

impl RegionSpec {
    pub fn disc(center: C64, radius: f64) -> Self {
        Self {
            kind: RegionKind::Disc,
            center: vec![center],
            radius,
        }
    }

    pub fn ball(center: Vec<C64>, radius: f64) -> Self {
        Self {
            kind: if center.len() == 1 {
                RegionKind::Disc
            } else {
                RegionKind::Ball
            },
            center,
            radius,
        }
    }

    pub fn nvars(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        dist2(z, &self.center) <= self.radius * self.radius * (1.0 + 1e-12)
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidInput("region radius must be finite and positive".into()));
        }
        if self.center.is_empty() {
            return Err(Error::InvalidInput("region needs a center".into()));
        }
        Ok(())
    }

    /// Nearest point of the region.
    pub fn project(&self, z: &mut [C64]) {
        let d = dist2(z, &self.center).sqrt();
        if d > self.radius {
            let s = self.radius / d;
            for (zi, ci) in z.iter_mut().zip(&self.center) {
                *zi = *ci + (*zi - *ci) * s;
            }
        }
    }
}

fn dist2(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfResult {
    pub value: f64,
    pub minimizer: Vec<C64>,
    pub upper: f64,
    pub lower: f64,
}

/// Pointwise evaluator for `max_{|α| ≥ min_order} |∂^α f/α!|^{1/|α|}` (or without the
/// factorials when `scaled` is false).
#[derive(Clone, Debug)]
pub struct DerivFunctional {
    poly: CPolyN,
    uni: Option<CPoly1>,
    min_order: u32,
    scaled: bool,
}

impl DerivFunctional {
    pub fn h(f: &CPolyN, scaled: bool) -> Result<Self> {
        if f.degree() < 1 {
            return Err(Error::DegreeTooLow {
                need: 1,
                got: f.degree() as usize,
            });
        }
        Ok(Self::build(f, 1, scaled))
    }

    pub fn j(f: &CPolyN, scaled: bool) -> Result<Self> {
        if f.degree() < 2 {
            return Err(Error::DegreeTooLow {
                need: 2,
                got: f.degree() as usize,
            });
        }
        Ok(Self::build(f, 2, scaled))
    }

    fn build(f: &CPolyN, min_order: u32, scaled: bool) -> Self {
        Self {
            poly: f.clone(),
            uni: f.to_poly1().ok(),
            min_order,
            scaled,
        }
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    /// Value only; the hot path used by grids and descent.
    pub fn value(&self, z: &[C64]) -> f64 {
        if let Some(p) = &self.uni {
            let t = p.taylor_at(z[0]);
            let mut best = 0.0;
            let mut fact = 1.0;
            for (k, tk) in t.iter().enumerate().skip(1) {
                fact *= k as f64;
                if (k as u32) < self.min_order {
                    continue;
                }
                let m = if self.scaled { tk.norm() } else { tk.norm() * fact };
                let v = m.powf(1.0 / k as f64);
                if v > best {
                    best = v;
                }
            }
            best
        } else {
            self.eval(z).value
        }
    }

    pub fn eval(&self, z: &[C64]) -> HEvaluation {
        let t = self.poly.taylor_at(z);
        let mut entries: Vec<(&MultiIndex, &C64)> =
            t.iter().filter(|(a, _)| a.order() >= self.min_order).collect();
        entries.sort_by(|a, b| a.0.order().cmp(&b.0.order()).then_with(|| a.0.cmp(b.0)));
        let mut best = 0.0;
        let mut arg = entries
            .first()
            .map(|e| e.0.clone())
            .unwrap_or_else(|| MultiIndex::zeros(self.poly.nvars()));
        for (a, c) in entries {
            let m = if self.scaled {
                c.norm()
            } else {
                c.norm() * multi_factorial(a)
            };
            let v = m.powf(1.0 / a.order() as f64);
            if v > best {
                best = v;
                arg = a.clone();
            }
        }
        HEvaluation {
            value: best,
            argmax_alpha: arg,
            at: z.to_vec(),
        }
    }
}

/// `H_f(z)` with factorial scaling.
pub fn h_point(f: &CPolyN, z: &[C64]) -> Result<HEvaluation> {
    Ok(DerivFunctional::h(f, true)?.eval(z))
}

/// `J_f(z)` with factorial scaling.
pub fn j_point(f: &CPolyN, z: &[C64]) -> Result<HEvaluation> {
    Ok(DerivFunctional::j(f, true)?.eval(z))
}

/// Number of descent seeds taken from the grid.
const SEEDS: usize = 8;

/// Infimum of a pointwise functional over a region: grid seeding, coordinate descent
/// from the best seeds, bracket from the grid covering radius and a local slope estimate.
pub fn functional_inf(
    fun: &DerivFunctional,
    region: &RegionSpec,
    grid: usize,
    refine_iters: usize,
) -> Result<InfResult> {
    region.validate()?;
    if grid < 16 {
        return Err(Error::InvalidInput("grid must be >= 16 per real dimension".into()));
    }
    let n = region.nvars();
    if n != fun.nvars() {
        return Err(Error::InvalidInput("region and polynomial dimensions differ".into()));
    }
    let dim = 2 * n;
    let total = (grid as u64).saturating_pow(dim as u32);
    if total > 1 << 26 {
        return Err(Error::BudgetExceeded {
            needed: total,
            cap: 1 << 26,
        });
    }
    let r = region.radius;
    let h = 2.0 * r / (grid - 1) as f64;
    let mut pts: Vec<(f64, Vec<C64>)> = Vec::new();
    let mut idx = vec![0usize; dim];
    let mut z = vec![C64::new(0.0, 0.0); n];
    loop {
        for (i, zi) in z.iter_mut().enumerate() {
            let x = -r + h * idx[2 * i] as f64;
            let y = -r + h * idx[2 * i + 1] as f64;
            *zi = region.center[i] + C64::new(x, y);
        }
        if region.contains(&z) {
            pts.push((fun.value(&z), z.clone()));
        }
        let mut k = 0;
        loop {
            if k == dim {
                break;
            }
            idx[k] += 1;
            if idx[k] < grid {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == dim {
            break;
        }
    }
    // Boundary samples (the infimum is often attained on the sphere).
    if n == 1 {
        for j in 0..4 * grid {
            let w = region.center[0]
                + C64::from_polar(r, std::f64::consts::TAU * j as f64 / (4 * grid) as f64);
            pts.push((fun.value(&[w]), vec![w]));
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let grid_min = pts[0].0;

    let mut slope: f64 = 0.0;
    let mut best = pts[0].clone();
    for (v0, z0) in pts.iter().take(SEEDS) {
        slope = slope.max(local_slope(fun, region, z0, *v0, h));
        let (v, z) = coordinate_descent(fun, region, z0.clone(), *v0, h, refine_iters);
        if v < best.0 {
            best = (v, z);
        }
    }
    let covering = h * (dim as f64).sqrt() / 2.0;
    let lower = (grid_min - slope * covering).min(best.0).max(0.0);
    Ok(InfResult {
        value: best.0,
        minimizer: best.1,
        upper: best.0,
        lower,
    })
}

fn local_slope(fun: &DerivFunctional, region: &RegionSpec, z: &[C64], v: f64, h: f64) -> f64 {
    let mut s: f64 = 0.0;
    for i in 0..z.len() {
        for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
            let mut w = z.to_vec();
            w[i] += dir * h;
            region.project(&mut w);
            let step = dist2(&w, z).sqrt();
            if step > 0.0 {
                s = s.max((fun.value(&w) - v).abs() / step);
            }
        }
    }
    s
}

fn coordinate_descent(
    fun: &DerivFunctional,
    region: &RegionSpec,
    mut z: Vec<C64>,
    mut v: f64,
    h: f64,
    iters: usize,
) -> (f64, Vec<C64>) {
    let mut step = h;
    let floor = 1e-13 * region.radius.max(1.0);
    for _ in 0..iters {
        let mut improved = false;
        for i in 0..z.len() {
            for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let mut w = z.clone();
                w[i] += dir * step;
                region.project(&mut w);
                let wv = fun.value(&w);
                if wv < v {
                    v = wv;
                    z = w;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < floor {
                break;
            }
        }
    }
    (v, z)
}

/// `H_{f,R}`-type infimum with factorial scaling.
pub fn h_inf(f: &CPolyN, region: &RegionSpec, grid: usize, refine_iters: usize) -> Result<InfResult> {
    functional_inf(&DerivFunctional::h(f, true)?, region, grid, refine_iters)
}

/// Same with the `|α| ≥ 2` restriction.
pub fn j_inf(f: &CPolyN, region: &RegionSpec, grid: usize, refine_iters: usize) -> Result<InfResult> {
    functional_inf(&DerivFunctional::j(f, true)?, region, grid, refine_iters)
}

/// Grid and refinement used by the ratio experiments.
const RATIO_GRID: usize = 48;
const RATIO_REFINE: usize = 200;

fn j_inf_disc(q: &CPoly1, radius: f64) -> Result<f64> {
    let f = CPolyN::from_poly1(q);
    Ok(j_inf(&f, &RegionSpec::disc(C64::new(0.0, 0.0), radius), RATIO_GRID, RATIO_REFINE)?.value)
}

/// `Ω_R(f) = min(R, 1/J_{f,R})`.
pub fn omega(f: &CPoly1, radius: f64) -> Result<f64> {
    let j = j_inf_disc(f, radius)?;
    Ok(if j > 0.0 { radius.min(1.0 / j) } else { radius })
}

/// `[min(1, J_{Q,1}^{-1}) / min(1, J_{Q,2}^{-1})]²`.
pub fn cd_ratio(q: &CPoly1) -> Result<f64> {
    if q.degree() < 2 {
        return Err(Error::DegreeTooLow {
            need: 2,
            got: q.degree(),
        });
    }
    let clamp = |j: f64| if j > 1.0 { 1.0 / j } else { 1.0 };
    let j1 = j_inf_disc(q, 1.0)?;
    let j2 = j_inf_disc(q, 2.0)?;
    Ok((clamp(j1) / clamp(j2)).powi(2))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CdFamily {
    pub d: usize,
    pub points: Vec<(f64, f64)>,
    pub fit: LineFit,
}

/// `cd_ratio` over `a (z - 3/2)^d` for the given moduli `a`.
pub fn cd_family_decay(d: usize, a_values: &[f64]) -> Result<CdFamily> {
    if d < 3 {
        return Err(Error::InvalidInput("cd_family_decay needs d >= 3".into()));
    }
    if a_values.len() < 2 || a_values.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) {
        return Err(Error::InvalidInput("a_values must be positive and increasing".into()));
    }
    let base = CPoly1::from_roots(&vec![C64::new(1.5, 0.0); d])?;
    let mut points = Vec::with_capacity(a_values.len());
    for &a in a_values {
        points.push((a, cd_ratio(&base.scale(C64::new(a, 0.0)))?));
    }
    let fit = loglog_fit(&points)?;
    Ok(CdFamily { d, points, fit })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuarticReport {
    pub samples: usize,
    /// `(min, max)` of `J_{Q,1}/m`, `J_{Q,2}/m`, `J_{Q,1}/J_{Q,2}` with `m = max(|c|^{1/3}, |d|^{1/4})`.
    pub j1_over_m: (f64, f64),
    pub j2_over_m: (f64, f64),
    pub j1_over_j2: (f64, f64),
    /// Largest `max(ρ, 1/ρ)` over all ratios.
    pub spread: f64,
}

/// Quartics `a + bz + cz³ + dz⁴` with log-uniform coefficient moduli in `[1e-3, 1e3]`.
pub fn quartic_subspace_check(samples: usize, seed: u64) -> Result<QuarticReport> {
    use rand::{Rng, SeedableRng};
    if samples < 100 {
        return Err(Error::InvalidInput("quartic_subspace_check needs >= 100 samples".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let coef = |rng: &mut rand_chacha::ChaCha8Rng| {
        let m = 10f64.powf(rng.gen_range(-3.0..3.0));
        C64::from_polar(m, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    let upd = |r: &mut (f64, f64), x: f64| {
        r.0 = r.0.min(x);
        r.1 = r.1.max(x);
    };
    let mut rep = QuarticReport {
        samples,
        j1_over_m: (f64::INFINITY, 0.0),
        j2_over_m: (f64::INFINITY, 0.0),
        j1_over_j2: (f64::INFINITY, 0.0),
        spread: 1.0,
    };
    for _ in 0..samples {
        let (a, b, c, d) = (coef(&mut rng), coef(&mut rng), coef(&mut rng), coef(&mut rng));
        let q = CPoly1::new(vec![a, b, C64::new(0.0, 0.0), c, d])?;
        let m = c.norm().powf(1.0 / 3.0).max(d.norm().powf(0.25));
        let j1 = j_inf_disc(&q, 1.0)?;
        let j2 = j_inf_disc(&q, 2.0)?;
        for (slot, x) in [
            (&mut rep.j1_over_m, j1 / m),
            (&mut rep.j2_over_m, j2 / m),
            (&mut rep.j1_over_j2, j1 / j2),
        ] {
            upd(slot, x);
            rep.spread = rep.spread.max(x.max(1.0 / x));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(c: &[f64]) -> CPolyN {
        CPolyN::from_poly1(&CPoly1::from_real(c).unwrap())
    }

    fn o() -> Vec<C64> {
        vec![C64::new(0.0, 0.0)]
    }

    #[test]
    fn point_examples() {
        let e = h_point(&uni(&[0.0, 0.0, 0.0, 1.0]), &o()).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.argmax_alpha, MultiIndex(vec![3]));
        let e = h_point(&uni(&[0.0, 0.0, 4.0]), &o()).unwrap();
        assert!((e.value - 2.0).abs() < 1e-15);
        assert_eq!(e.argmax_alpha, MultiIndex(vec![2]));
        let lam = CPolyN::from_poly1(&CPoly1::new(vec![C64::new(0.0, 0.0), C64::new(3.0, 4.0)]).unwrap());
        assert!((h_point(&lam, &[C64::new(0.7, 0.1)]).unwrap().value - 5.0).abs() < 1e-14);
        let cubic = uni(&[0.0, 0.0, 0.0, 1.0]);
        assert!((j_point(&cubic, &[C64::new(1.0, 0.0)]).unwrap().value - 3f64.sqrt()).abs() < 1e-14);
        assert!(matches!(j_point(&uni(&[1.0, 2.0]), &o()), Err(Error::DegreeTooLow { .. })));
    }

    #[test]
    fn ties_prefer_lowest_order() {
        // z + z²/... : at 0 both |α|=1 and |α|=2 give 1.
        let e = h_point(&uni(&[0.0, 1.0, 1.0]), &o()).unwrap();
        assert_eq!(e.argmax_alpha, MultiIndex(vec![1]));
    }

    #[test]
    fn inf_examples() {
        let r = h_inf(&uni(&[0.0, 1.0]), &RegionSpec::disc(C64::new(0.0, 0.0), 1.0), 32, 50).unwrap();
        assert_eq!(r.value, 1.0);
        let r = h_inf(&uni(&[0.0, 0.0, 1.0]), &RegionSpec::disc(C64::new(0.0, 0.0), 1.0), 32, 80).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.minimizer[0].norm() <= 0.5);
        assert!(r.lower <= r.value && r.value <= r.upper);
    }

    #[test]
    fn omega_and_cd() {
        let q = CPoly1::new(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((omega(&q, 1.0).unwrap() - 0.5).abs() < 1e-12);
        let q = CPoly1::from_real(&[0.0, 0.0, 0.25]).unwrap();
        assert_eq!(omega(&q, 1.0).unwrap(), 1.0);
        let q = CPoly1::new(vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(7.0, -2.0)]).unwrap();
        assert!((cd_ratio(&q).unwrap() - 1.0).abs() < 1e-12);
    }
}
