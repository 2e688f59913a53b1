//! Monte Carlo measures of `{w : H(w) <= Q}` in coefficient space.
//!
//! The set is covered by one box per lattice point `z_rs = (r + is)/Q`; a box bounds the
//! Taylor coefficients of `P_w` at `z_rs`. Boxes overlap, so the union volume is
//! estimated with the Karp-Luby weighting `1/N(w)`, `N(w)` being the number of boxes
//! holding `w`.

use std::f64::consts::{SQRT_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::level::{h_at_most, Cubic, EXACT_DEGREE};
use super::phase::{validate_exponents, SparsePhase};
use crate::cpoly::poly1::binom;
use crate::cpoly::C64;
use crate::error::{Error, Result};
use crate::fit::loglog_fit;

/// Cap on the total number of Monte Carlo draws of one scan.
pub const MAX_SCAN_SAMPLES: u64 = 1 << 28;
/// Largest `Q` accepted (the lattice has about `πQ²` points).
pub const MAX_Q: f64 = 512.0;
/// Largest dyadic shell index.
pub const MAX_SHELL: u32 = 8;

/// Which coefficients are free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// `w_1 z + ... + w_d z^d`.
    Moment(usize),
    /// `Σ w_i z^{k_i}`.
    Sparse(Vec<u32>),
}

impl Family {
    pub fn exponents(&self) -> Vec<u32> {
        match self {
            Family::Moment(d) => (1..=*d as u32).collect(),
            Family::Sparse(e) => e.clone(),
        }
    }

    fn validate(&self) -> Result<Vec<u32>> {
        let e = self.exponents();
        validate_exponents(&e)?;
        let top = *e.last().expect("nonempty") as usize;
        if top > EXACT_DEGREE {
            return Err(Error::DegreeCap { degree: top, cap: EXACT_DEGREE });
        }
        Ok(e)
    }
}

/// `c_k = Σ_{l=0}^{D-k} C(k+l, l) √2^l`: moving the base point by at most `√2/Q`
/// inflates `|P^{(k)}/k!|` from `Q^k` to at most `c_k Q^k`.
pub fn box_constant(k: usize, degree: usize) -> f64 {
    (0..=degree.saturating_sub(k)).map(|l| binom(k + l, l) * SQRT_2.powi(l as i32)).sum()
}

/// Lattice points `(r + is)/Q` whose cell `[r, r+1] x [s, s+1] / Q` meets the closed unit disc.
fn in_lattice(r: i64, s: i64, q: f64) -> bool {
    let near = |i: i64| {
        let (lo, hi) = (i as f64 / q, (i + 1) as f64 / q);
        if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            hi
        } else {
            0.0
        }
    };
    near(r).hypot(near(s)) <= 1.0
}

struct Boxes {
    q: f64,
    exponents: Vec<u32>,
    top: usize,
    /// Orders `k` whose Taylor coefficient is bounded: the exponents plus the gap below the top one.
    orders: Vec<usize>,
    /// `c_k Q^k`, indexed by `k`.
    bound: [f64; 4],
    span: i64,
    cells: Vec<C64>,
    /// Per-cell coordinate radii, in exponent order.
    radii: Vec<Vec<f64>>,
    cumulative: Vec<f64>,
    total: f64,
}

impl Boxes {
    fn new(exponents: &[u32], q: f64) -> Self {
        let top = *exponents.last().expect("nonempty") as usize;
        let below = if exponents.len() > 1 { exponents[exponents.len() - 2] as usize } else { 0 };
        let mut orders: Vec<usize> = exponents.iter().map(|&k| k as usize).collect();
        orders.extend(below + 1..top);
        orders.sort_unstable();
        let mut bound = [0.0; 4];
        for (k, b) in bound.iter_mut().enumerate().skip(1).take(top) {
            *b = box_constant(k, top) * q.powi(k as i32);
        }
        let span = q.ceil() as i64 + 1;
        let (mut cells, mut radii, mut cumulative) = (Vec::new(), Vec::new(), Vec::new());
        let mut total = 0.0;
        for r in -span..span {
            for s in -span..span {
                if !in_lattice(r, s, q) {
                    continue;
                }
                let z = C64::new(r as f64, s as f64) / q;
                let mut rad: Vec<f64> = exponents.iter().map(|&k| bound[k as usize]).collect();
                // gap orders depend on the top coefficient alone and shrink its box
                let last = rad.len() - 1;
                for k in below + 1..top {
                    let scale = binom(top, k) * z.norm().powi((top - k) as i32);
                    if scale > 0.0 {
                        rad[last] = rad[last].min(bound[k] / scale);
                    }
                }
                let vol: f64 = rad.iter().map(|x| std::f64::consts::PI * x * x).product();
                total += vol;
                cells.push(z);
                radii.push(rad);
                cumulative.push(total);
            }
        }
        Boxes { q, exponents: exponents.to_vec(), top, orders, bound, span, cells, radii, cumulative, total }
    }

    fn contains(&self, p: &Cubic, z: C64) -> bool {
        let b = p.taylor(z);
        self.orders.iter().all(|&k| b[k].norm() <= self.bound[k] * (1.0 + 1e-12))
    }

    /// Cell drawn with probability proportional to its volume, then a uniform point of its box.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Cubic {
        let u = rng.gen::<f64>() * self.total;
        let cell = self.cumulative.partition_point(|&c| c <= u).min(self.cells.len() - 1);
        let z = self.cells[cell];
        let y: Vec<C64> = self.radii[cell]
            .iter()
            .map(|&r| C64::from_polar(r * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>()))
            .collect();
        // back-substitution through the unit upper triangular Taylor map
        let d = self.exponents.len();
        let mut w = vec![C64::new(0.0, 0.0); d];
        for i in (0..d).rev() {
            let ki = self.exponents[i] as usize;
            let mut acc = y[i];
            for m in i + 1..d {
                let km = self.exponents[m] as usize;
                acc -= z.powu((km - ki) as u32) * binom(km, ki) * w[m];
            }
            w[i] = acc;
        }
        let mut a = [C64::new(0.0, 0.0); 4];
        for (&k, x) in self.exponents.iter().zip(w) {
            a[k as usize] = x;
        }
        Cubic(a)
    }

    /// Number of boxes holding `p`.
    fn multiplicity(&self, p: &Cubic) -> usize {
        let (mut r0, mut r1, mut s0, mut s1) = (-self.span, self.span - 1, -self.span, self.span - 1);
        let lead = p.0[self.top];
        if self.top >= 2 && lead != C64::new(0.0, 0.0) {
            // |b_{top-1}(z)| = |a_{top-1} + top a_top z| is bounded: z lies in a disc
            let center = -p.0[self.top - 1] / (lead * self.top as f64);
            let rad = self.bound[self.top - 1] / (self.top as f64 * lead.norm()) * (1.0 + 1e-9);
            let lo = |x: f64| ((x - rad) * self.q).floor().max(-1e9) as i64;
            let hi = |x: f64| ((x + rad) * self.q).ceil().min(1e9) as i64;
            r0 = r0.max(lo(center.re));
            r1 = r1.min(hi(center.re));
            s0 = s0.max(lo(center.im));
            s1 = s1.min(hi(center.im));
        }
        let mut n = 0;
        for r in r0..=r1 {
            for s in s0..=s1 {
                if in_lattice(r, s, self.q) && self.contains(p, C64::new(r as f64, s as f64) / self.q) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Karp-Luby estimate of `|{lower < H <= Q}|` with its standard error and hit rate.
    fn measure(&self, lower: Option<f64>, samples: usize, rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
        let (mut sum, mut sum2, mut hits) = (0.0, 0.0, 0usize);
        for _ in 0..samples {
            let p = self.sample(rng);
            if !h_at_most(&p, self.q) || lower.is_some_and(|l| h_at_most(&p, l)) {
                continue;
            }
            hits += 1;
            let x = 1.0 / self.multiplicity(&p).max(1) as f64;
            sum += x;
            sum2 += x * x;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = (sum2 / n - mean * mean).max(0.0) / n;
        (self.total * mean, self.total * var.sqrt(), hits as f64 / n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub family: Family,
    pub q_values: Vec<f64>,
    pub measures: Vec<f64>,
    pub measure_stderr: Vec<f64>,
    /// Fraction of draws with `H <= Q`.
    pub hit_rates: Vec<f64>,
    pub fitted_slope: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicResult {
    pub family: Family,
    pub q: f64,
    pub r_values: Vec<u32>,
    /// `|E_r|`, `E_r = {2^r < H <= 2^{r+1}}`.
    pub shell_measures: Vec<f64>,
    pub shell_stderr: Vec<f64>,
    /// `2^{-2rq} |E_r|`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// `terms[r+1] / terms[r]`.
    pub ratios: Vec<f64>,
    pub ratio_stderr: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl DyadicResult {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_budget(points: usize, samples: usize) -> Result<()> {
    let needed = points as u64 * samples as u64;
    if needed > MAX_SCAN_SAMPLES {
        return Err(Error::BudgetExceeded { needed, cap: MAX_SCAN_SAMPLES });
    }
    Ok(())
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Measure of `{H <= Q}` at each `Q` and the log-log slope.
pub fn scan_family(family: &Family, q_grid: &[f64], samples: usize, seed: u64) -> Result<ScanResult> {
    let exponents = family.validate()?;
    if q_grid.len() < 2 || q_grid.windows(2).any(|p| p[0] >= p[1]) || q_grid[0] < 1.0 {
        return Err(Error::InvalidInput("Q grid must be increasing, at least 2 points, Q >= 1".into()));
    }
    if q_grid[q_grid.len() - 1] > MAX_Q {
        return Err(Error::InvalidInput(format!("Q above {MAX_Q}")));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    check_budget(q_grid.len(), samples)?;
    let (mut measures, mut measure_stderr, mut hit_rates) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &q) in q_grid.iter().enumerate() {
        let (m, e, h) = Boxes::new(&exponents, q).measure(None, samples, &mut stream(seed, i));
        measures.push(m);
        measure_stderr.push(e);
        hit_rates.push(h);
    }
    let pts: Vec<(f64, f64)> = q_grid.iter().copied().zip(measures.iter().copied()).collect();
    let fit = loglog_fit(&pts)?;
    Ok(ScanResult {
        family: family.clone(),
        q_values: q_grid.to_vec(),
        measures,
        measure_stderr,
        hit_rates,
        fitted_slope: fit.slope,
        stderr: fit.slope_stderr,
        samples,
        seed,
    })
}

/// Moment family of degree `d ∈ {2, 3}` over at least four values of `Q`.
pub fn sublevel_scaling(d: usize, q_grid: &[f64], samples: usize, seed: u64) -> Result<ScanResult> {
    if !(2..=3).contains(&d) {
        return Err(Error::InvalidInput(format!("moment scan needs d in {{2, 3}}, got {d}")));
    }
    if q_grid.len() < 4 {
        return Err(Error::InvalidInput("moment scan needs at least 4 values of Q".into()));
    }
    scan_family(&Family::Moment(d), q_grid, samples, seed)
}

/// Sparse family; the exponents must be in the sparse regime.
pub fn sparse_scaling(exponents: &[u32], q_grid: &[f64], samples: usize, seed: u64) -> Result<ScanResult> {
    SparsePhase::new(exponents.to_vec(), vec![C64::new(0.0, 0.0); exponents.len()])?;
    scan_family(&Family::Sparse(exponents.to_vec()), q_grid, samples, seed)
}

/// Dyadic shells `r = 0..=r_max` and the terms `2^{-2rq}|E_r|`.
pub fn dyadic_family(family: &Family, q: f64, r_max: u32, samples: usize, seed: u64) -> Result<DyadicResult> {
    let exponents = family.validate()?;
    if r_max < 1 || r_max > MAX_SHELL {
        return Err(Error::InvalidInput(format!("r_max must be in 1..={MAX_SHELL}")));
    }
    if !(q > 0.0) || samples == 0 {
        return Err(Error::InvalidInput("q and samples must be positive".into()));
    }
    check_budget(r_max as usize + 1, samples)?;
    let (mut shell_measures, mut shell_stderr, mut terms) = (Vec::new(), Vec::new(), Vec::new());
    for r in 0..=r_max {
        let upper = 2f64.powi(r as i32 + 1);
        let (m, e, _) = Boxes::new(&exponents, upper).measure(Some(upper / 2.0), samples, &mut stream(seed, r as usize));
        shell_measures.push(m);
        shell_stderr.push(e);
        terms.push(2f64.powf(-2.0 * r as f64 * q) * m);
    }
    let partial_sums = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let rel: Vec<f64> = shell_measures.iter().zip(&shell_stderr).map(|(m, e)| e / m).collect();
    let ratios: Vec<f64> = terms.windows(2).map(|t| t[1] / t[0]).collect();
    let ratio_stderr = ratios.iter().enumerate().map(|(i, x)| x * rel[i].hypot(rel[i + 1])).collect();
    Ok(DyadicResult {
        family: family.clone(),
        q,
        r_values: (0..=r_max).collect(),
        shell_measures,
        shell_stderr,
        terms,
        partial_sums,
        ratios,
        ratio_stderr,
        samples,
        seed,
    })
}

/// Moment family of degree 2 (the only desk-scale case).
pub fn dyadic_tail(d: usize, q: f64, r_max: u32, samples: usize, seed: u64) -> Result<DyadicResult> {
    if d != 2 {
        return Err(Error::InvalidInput(format!("dyadic tail runs at d = 2, got {d}")));
    }
    dyadic_family(&Family::Moment(d), q, r_max, samples, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCover {
    pub covered_fraction: f64,
    pub accepted: usize,
    pub proposals: usize,
    /// Coefficients of the first few uncovered samples.
    pub uncovered: Vec<Vec<C64>>,
}

/// Draws `w` with `H(w) <= Q` and checks that some lattice box holds it.
pub fn box_cover_check(d: usize, q: f64, samples: usize, seed: u64) -> Result<BoxCover> {
    if d == 0 || d > EXACT_DEGREE {
        return Err(Error::DegreeCap { degree: d, cap: EXACT_DEGREE });
    }
    if !(1.0..=MAX_Q).contains(&q) || samples == 0 {
        return Err(Error::InvalidInput("need 1 <= Q <= 512 and samples > 0".into()));
    }
    let boxes = Boxes::new(&Family::Moment(d).exponents(), q);
    let mut rng = stream(seed, 0);
    let (mut accepted, mut proposals, mut covered) = (0, 0, 0);
    let mut uncovered = Vec::new();
    while accepted < samples && proposals < 100 * samples {
        proposals += 1;
        // Taylor data at a random base point, spread a little past the H <= Q boundary
        let z = C64::from_polar(rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
        let mut t = [C64::new(0.0, 0.0); 4];
        for (k, x) in t.iter_mut().enumerate().skip(1).take(d) {
            *x = C64::from_polar(1.5 * q.powi(k as i32) * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
        }
        // coefficients of Σ t_k (u - z)^k
        let mut a = [C64::new(0.0, 0.0); 4];
        for (k, &tk) in t.iter().enumerate().skip(1) {
            for j in 0..=k {
                a[j] += tk * binom(k, j) * (-z).powu((k - j) as u32);
            }
        }
        a[0] = C64::new(0.0, 0.0);
        let p = Cubic(a);
        if !h_at_most(&p, q) {
            continue;
        }
        accepted += 1;
        if boxes.multiplicity(&p) > 0 {
            covered += 1;
        } else if uncovered.len() < 8 {
            uncovered.push(a[1..=d].to_vec());
        }
    }
    if accepted == 0 {
        return Err(Error::EmptySublevel);
    }
    Ok(BoxCover { covered_fraction: covered as f64 / accepted as f64, accepted, proposals, uncovered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `|{H <= Q}|` for `w_1 z + w_2 z²`: `|w_2| <= Q²` and `|w_1| <= Q + 2|w_2|`.
    fn quadratic_measure(q: f64) -> f64 {
        2.0 * PI * PI * (q.powi(8) + 4.0 * q.powi(7) / 3.0 + q.powi(6) / 2.0)
    }

    #[test]
    fn constants() {
        assert_eq!(box_constant(2, 2), 1.0);
        assert!((box_constant(1, 2) - (1.0 + 2.0 * SQRT_2)).abs() < 1e-12);
        assert!((box_constant(1, 3) - (1.0 + 2.0 * SQRT_2 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_scan_matches_closed_form() {
        let scan = sublevel_scaling(2, &[2.0, 4.0, 8.0, 16.0], 40_000, 3).unwrap();
        for (i, &q) in scan.q_values.iter().enumerate() {
            let exact = quadratic_measure(q);
            let err = (scan.measures[i] - exact).abs();
            assert!(err <= 4.0 * scan.measure_stderr[i] + 1e-3 * exact, "Q={q}: {} vs {exact}", scan.measures[i]);
        }
    }

    #[test]
    fn sparse_top_gap_is_consistent() {
        // exponents (1, 2) spelled as a sparse family are the moment family
        let a = scan_family(&Family::Sparse(vec![1, 2]), &[4.0, 8.0], 2000, 9).unwrap();
        let b = scan_family(&Family::Moment(2), &[4.0, 8.0], 2000, 9).unwrap();
        assert_eq!(a.measures, b.measures);
        assert!(sparse_scaling(&[1, 2], &[4.0, 8.0], 10, 0).is_err());
        assert!(sparse_scaling(&[1, 3], &[4.0, 8.0], 2000, 0).is_ok());
    }

    #[test]
    fn boxes_cover_the_sublevel_set() {
        let c = box_cover_check(2, 10.0, 2000, 1).unwrap();
        assert_eq!(c.covered_fraction, 1.0, "{c:?}");
        let c = box_cover_check(3, 30.0, 500, 2).unwrap();
        assert_eq!(c.covered_fraction, 1.0, "{c:?}");
    }

    #[test]
    fn preconditions() {
        assert!(sublevel_scaling(4, &[4.0, 8.0, 16.0, 32.0], 10, 0).is_err());
        assert!(sublevel_scaling(2, &[4.0, 8.0, 16.0], 10, 0).is_err());
        assert!(matches!(
            sublevel_scaling(2, &[4.0, 8.0, 16.0, 32.0], 1 << 27, 0),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(dyadic_tail(3, 4.5, 4, 10, 0).is_err());
        assert!(dyadic_tail(2, 4.5, 9, 10, 0).is_err());
    }
}
