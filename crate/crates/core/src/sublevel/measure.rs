use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cpoly::{AnalyticFn, CPolyN, MultiIndex, C64};
use crate::error::{Error, Result};
use crate::functionals::RegionSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Grid,
    Mc,
    Quadtree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// Binomial standard error (Monte Carlo only).
    pub stderr: Option<f64>,
    /// Area of cells whose membership is uncertain (grid and quadtree).
    pub resolution_bound: Option<f64>,
    pub method: Method,
    pub resolution: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

/// Lebesgue measure of a disc or ball (real dimension `2n`).
pub fn region_volume(region: &RegionSpec) -> f64 {
    let n = region.nvars() as i32;
    let pi = std::f64::consts::PI;
    // volume of the unit ball in R^{2n} is pi^n / n!
    let fact: f64 = (1..=n).map(f64::from).product();
    pi.powi(n) / fact * region.radius.powi(2 * n)
}

/// Cell-center counting on a uniform grid of the bounding box.
pub fn measure_grid(pred: impl Fn(&[C64]) -> bool, region: &RegionSpec, resolution: usize) -> Result<MeasureEstimate> {
    let n = region.nvars();
    if n > 2 {
        return Err(Error::DimensionTooHigh(n));
    }
    if resolution < 32 {
        return Err(Error::InvalidInput("grid resolution must be >= 32".into()));
    }
    let dims = 2 * n;
    let h = 2.0 * region.radius / resolution as f64;
    let coord = |i: usize| -region.radius + (i as f64 + 0.5) * h;
    let total = resolution.pow(dims as u32);
    let mut inside = vec![false; total];
    let mut point = vec![C64::new(0.0, 0.0); n];
    let mut idx = vec![0usize; dims];
    for (flat, slot) in inside.iter_mut().enumerate() {
        let mut rem = flat;
        for i in idx.iter_mut() {
            *i = rem % resolution;
            rem /= resolution;
        }
        for v in 0..n {
            point[v] = region.center[v] + C64::new(coord(idx[2 * v]), coord(idx[2 * v + 1]));
        }
        *slot = region.contains(&point) && pred(&point);
    }
    let cell = h.powi(dims as i32);
    let count = inside.iter().filter(|&&b| b).count();
    // Cells with a differing axis neighbour straddle the boundary.
    let mut boundary = 0usize;
    for (flat, &b) in inside.iter().enumerate() {
        let mut stride = 1;
        let mut differs = false;
        for _ in 0..dims {
            let pos = (flat / stride) % resolution;
            if pos + 1 < resolution && inside[flat + stride] != b {
                differs = true;
            }
            if pos > 0 && inside[flat - stride] != b {
                differs = true;
            }
            stride *= resolution;
        }
        boundary += differs as usize;
    }
    Ok(MeasureEstimate {
        value: count as f64 * cell,
        stderr: None,
        resolution_bound: Some(boundary as f64 * cell),
        method: Method::Grid,
        resolution: Some(resolution),
        samples: None,
        seed: None,
    })
}

/// Uniform point in the region.
pub fn sample_region(region: &RegionSpec, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let n = region.nvars();
    let dims = 2 * n;
    let mut g: Vec<f64> = (0..dims).map(|_| gauss(rng)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = region.radius * rng.gen::<f64>().powf(1.0 / dims as f64);
    for x in g.iter_mut() {
        *x *= r / norm;
    }
    (0..n)
        .map(|v| region.center[v] + C64::new(g[2 * v], g[2 * v + 1]))
        .collect()
}

pub(crate) fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u = rng.gen::<f64>().max(1e-300);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn measure_mc(
    pred: impl Fn(&[C64]) -> bool,
    region: &RegionSpec,
    samples: usize,
    seed: u64,
) -> Result<MeasureEstimate> {
    if samples < 10_000 {
        return Err(Error::InvalidInput("Monte Carlo needs >= 1e4 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..samples).filter(|_| pred(&sample_region(region, &mut rng))).count();
    let vol = region_volume(region);
    let p = hits as f64 / samples as f64;
    Ok(MeasureEstimate {
        value: vol * p,
        stderr: Some(vol * (p * (1.0 - p) / samples as f64).sqrt()),
        resolution_bound: None,
        method: Method::Mc,
        resolution: None,
        samples: Some(samples),
        seed: Some(seed),
    })
}

/// Differential operator `sum c_alpha(z) d^alpha`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub alpha: MultiIndex,
    pub coeff: CPolyN,
}

/// `|L f(z)| >= mu && |f(z) - a| <= eps`.
pub fn local_sublevel_predicate(
    f: &CPolyN,
    op: &[OperatorTerm],
    mu: f64,
    eps: f64,
    a: C64,
) -> Result<impl Fn(&[C64]) -> bool> {
    let deg = f.degree();
    for t in op {
        let k = t.alpha.order();
        if k == 0 || k > deg {
            return Err(Error::InvalidInput(format!("operator order {k} outside 1..={deg}")));
        }
        if t.alpha.len() != f.nvars() || t.coeff.nvars() != f.nvars() {
            return Err(Error::InvalidInput("operator variable count mismatch".into()));
        }
    }
    let derivs: Vec<(CPolyN, CPolyN)> = op.iter().map(|t| (t.coeff.clone(), f.deriv(&t.alpha))).collect();
    let f = f.clone();
    Ok(move |z: &[C64]| {
        let lf: C64 = derivs.iter().map(|(c, d)| c.eval(z) * d.eval(z)).sum();
        lf.norm() >= mu && (f.eval(z) - a).norm() <= eps
    })
}

/// Axis-aligned rectangle or disc in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PlanarDomain {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disc { center: C64, radius: f64 },
}

impl PlanarDomain {
    pub fn unit_square() -> Self {
        PlanarDomain::Rect { x0: -1.0, x1: 1.0, y0: -1.0, y1: 1.0 }
    }

    fn bbox(&self) -> (f64, f64, f64, f64) {
        match *self {
            PlanarDomain::Rect { x0, x1, y0, y1 } => (x0, x1, y0, y1),
            PlanarDomain::Disc { center, radius } => (
                center.re - radius,
                center.re + radius,
                center.im - radius,
                center.im + radius,
            ),
        }
    }

    /// 1 inside, -1 outside, 0 straddling, for the square of half-width `h` at `c`.
    fn classify(&self, c: C64, h: f64) -> i8 {
        match *self {
            PlanarDomain::Rect { x0, x1, y0, y1 } => {
                if c.re - h >= x0 && c.re + h <= x1 && c.im - h >= y0 && c.im + h <= y1 {
                    1
                } else if c.re + h <= x0 || c.re - h >= x1 || c.im + h <= y0 || c.im - h >= y1 {
                    -1
                } else {
                    0
                }
            }
            PlanarDomain::Disc { center, radius } => {
                let d = (c - center).norm();
                let diag = h * std::f64::consts::SQRT_2;
                if d + diag <= radius {
                    1
                } else if d - diag >= radius {
                    -1
                } else {
                    0
                }
            }
        }
    }

    fn contains(&self, z: C64) -> bool {
        match *self {
            PlanarDomain::Rect { x0, x1, y0, y1 } => z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1,
            PlanarDomain::Disc { center, radius } => (z - center).norm() <= radius,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// `|f^{(order)}(z) - target|` compared against `level`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub order: usize,
    pub target: C64,
    pub level: f64,
    pub bound: Bound,
}

impl Constraint {
    pub fn sublevel(a: C64, eps: f64) -> Self {
        Constraint { order: 0, target: a, level: eps, bound: Bound::AtMost }
    }

    pub fn derivative_at_least(order: usize, mu: f64) -> Self {
        Constraint {
            order,
            target: C64::new(0.0, 0.0),
            level: mu,
            bound: Bound::AtLeast,
        }
    }

    /// Four-term Taylor enclosure of the constraint on a disc of radius `rho`.
    fn classify(&self, f: &AnalyticFn, c: C64, rho: f64) -> i8 {
        let v = (f.eval(self.order, c) - self.target).norm();
        let mut spread = 0.0;
        let mut term = 1.0;
        for j in 1..=4 {
            term *= rho / j as f64;
            let w = if j == 4 { 2.0 } else { 1.0 };
            spread += w * f.eval(self.order + j, c).norm() * term;
        }
        let (lo, hi) = (v - spread, v + spread);
        match self.bound {
            Bound::AtMost if hi <= self.level => 1,
            Bound::AtMost if lo > self.level => -1,
            Bound::AtLeast if lo >= self.level => 1,
            Bound::AtLeast if hi < self.level => -1,
            _ => 0,
        }
    }

    fn holds(&self, f: &AnalyticFn, z: C64) -> bool {
        let v = (f.eval(self.order, z) - self.target).norm();
        match self.bound {
            Bound::AtMost => v <= self.level,
            Bound::AtLeast => v >= self.level,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadtreeOptions {
    /// Base cells per side of the bounding box.
    pub base: usize,
    /// Subdivide until the cell side is at most this.
    pub min_cell: f64,
    /// Hard cap on the number of leaves visited.
    pub max_cells: u64,
}

impl Default for QuadtreeOptions {
    fn default() -> Self {
        QuadtreeOptions { base: 128, min_cell: 1e-4, max_cells: 1 << 26 }
    }
}

/// Measure of `{z in domain : all constraints hold}` by adaptive subdivision.
/// Cells are accepted or rejected whole when the Taylor enclosure decides every
/// constraint; undecided cells at the finest level are counted by their center.
pub fn measure_quadtree(
    f: &AnalyticFn,
    constraints: &[Constraint],
    domain: &PlanarDomain,
    opts: &QuadtreeOptions,
) -> Result<MeasureEstimate> {
    if opts.base == 0 || !(opts.min_cell > 0.0) {
        return Err(Error::InvalidInput("quadtree needs base >= 1 and min_cell > 0".into()));
    }
    let (x0, x1, y0, y1) = domain.bbox();
    let side = (x1 - x0).max(y1 - y0);
    let h0 = side / opts.base as f64 / 2.0;
    let mut stack: Vec<(C64, f64)> = Vec::new();
    for i in 0..opts.base {
        for j in 0..opts.base {
            let c = C64::new(x0 + (2 * i + 1) as f64 * h0, y0 + (2 * j + 1) as f64 * h0);
            stack.push((c, h0));
        }
    }
    let mut value = 0.0;
    let mut uncertain = 0.0;
    let mut visited: u64 = 0;
    while let Some((c, h)) = stack.pop() {
        visited += 1;
        if visited > opts.max_cells {
            return Err(Error::BudgetExceeded { needed: visited, cap: opts.max_cells });
        }
        let dom = domain.classify(c, h);
        if dom < 0 {
            continue;
        }
        let rho = h * std::f64::consts::SQRT_2;
        let mut state = dom;
        for con in constraints {
            match con.classify(f, c, rho) {
                -1 => {
                    state = -1;
                    break;
                }
                0 => state = 0,
                _ => {}
            }
        }
        let area = 4.0 * h * h;
        match state {
            -1 => {}
            1 => value += area,
            _ if 2.0 * h <= opts.min_cell => {
                uncertain += area;
                if domain.contains(c) && constraints.iter().all(|k| k.holds(f, c)) {
                    value += area;
                }
            }
            _ => {
                let q = h / 2.0;
                for (dx, dy) in [(-q, -q), (q, -q), (-q, q), (q, q)] {
                    stack.push((c + C64::new(dx, dy), q));
                }
            }
        }
    }
    Ok(MeasureEstimate {
        value,
        stderr: None,
        resolution_bound: Some(uncertain),
        method: Method::Quadtree,
        resolution: Some(opts.base),
        samples: Some(visited as usize),
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::CPoly1;
    use std::f64::consts::PI;

    fn unit_disc() -> RegionSpec {
        RegionSpec::disc(C64::new(0.0, 0.0), 1.0)
    }

    #[test]
    fn grid_examples() {
        let m = measure_grid(|z| z[0].norm() <= 0.5, &unit_disc(), 512).unwrap();
        assert!((m.value / (PI / 4.0) - 1.0).abs() < 0.01);
        assert_eq!(measure_grid(|_| false, &unit_disc(), 64).unwrap().value, 0.0);
        let eps = 0.01;
        let m = measure_grid(|z| (z[0] * z[0]).norm() <= eps, &unit_disc(), 512).unwrap();
        assert!((m.value / (PI * eps) - 1.0).abs() < 0.02);
        let ball = RegionSpec::ball(vec![C64::new(0.0, 0.0); 3], 1.0);
        assert!(matches!(measure_grid(|_| true, &ball, 32), Err(Error::DimensionTooHigh(3))));
    }

    #[test]
    fn mc_examples() {
        let a = measure_mc(|z| z[0].re >= 0.0, &unit_disc(), 20_000, 7).unwrap();
        assert!((a.value - PI / 2.0).abs() <= 3.0 * a.stderr.unwrap());
        let b = measure_mc(|z| z[0].re >= 0.0, &unit_disc(), 20_000, 7).unwrap();
        assert_eq!(a.value, b.value);
        let ball = RegionSpec::ball(vec![C64::new(0.0, 0.0); 2], 1.0);
        let full = measure_mc(|_| true, &ball, 10_000, 1).unwrap();
        assert!((full.value - PI * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn local_predicates() {
        let f = CPolyN::from_poly1(&CPoly1::from_real(&[0.0, 1.0]).unwrap());
        let op = [OperatorTerm {
            alpha: MultiIndex(vec![1]),
            coeff: CPolyN::from_poly1(&CPoly1::from_real(&[1.0]).unwrap()),
        }];
        let p = local_sublevel_predicate(&f, &op, 1.0, 0.5, C64::new(0.0, 0.0)).unwrap();
        assert!(p(&[C64::new(0.3, 0.3)]) && !p(&[C64::new(0.6, 0.0)]));
        let bad = [OperatorTerm { alpha: MultiIndex(vec![2]), coeff: op[0].coeff.clone() }];
        assert!(local_sublevel_predicate(&f, &bad, 1.0, 0.5, C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn quadtree_small_disc() {
        // |z^2| <= eps is a disc of radius sqrt(eps)
        let f = AnalyticFn::Poly(CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap());
        let eps = 1e-6;
        let dom = PlanarDomain::Disc { center: C64::new(0.0, 0.0), radius: 1.0 };
        let opts = QuadtreeOptions { base: 64, min_cell: 1e-5, ..Default::default() };
        let m = measure_quadtree(&f, &[Constraint::sublevel(C64::new(0.0, 0.0), eps)], &dom, &opts).unwrap();
        assert!((m.value / (PI * eps) - 1.0).abs() < 0.01, "{m:?}");
        assert!(m.resolution_bound.unwrap() < 0.1 * PI * eps);
    }

    #[test]
    fn quadtree_with_derivative_constraint() {
        // |z| <= 1/2 and |f'| = |2z| >= 1/2: annulus 1/4 <= |z| <= 1/2 for f = z^2, eps = 1/4
        let f = AnalyticFn::Poly(CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap());
        let dom = PlanarDomain::Disc { center: C64::new(0.0, 0.0), radius: 1.0 };
        let cons = [
            Constraint::sublevel(C64::new(0.0, 0.0), 0.25),
            Constraint::derivative_at_least(1, 0.5),
        ];
        let opts = QuadtreeOptions { base: 32, min_cell: 1e-3, ..Default::default() };
        let m = measure_quadtree(&f, &cons, &dom, &opts).unwrap();
        let exact = PI * (0.25 - 0.0625);
        assert!((m.value / exact - 1.0).abs() < 0.01);
    }
}
