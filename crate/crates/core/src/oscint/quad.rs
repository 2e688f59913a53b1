use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use super::bump::{smooth_step, BumpSpec};
use crate::cpoly::{roots, AnalyticFn, CPoly1, CPolyN, C64, ROOT_TOL};
use crate::error::{Error, Result};

/// Hard cap on integrand evaluations per quadrature pass.
pub const POINT_BUDGET: u64 = 1 << 26;

/// Minimum samples per oscillation of the real phase along each axis.
pub const NYQUIST_FACTOR: f64 = 6.0;

const GAUSS_ORDER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    TensorTrapezoid,
    TensorGauss,
    /// Polar rules on discs around the critical points of a univariate polynomial
    /// phase, cut off smoothly; the non-stationary remainder is dropped.
    Localized,
    /// Tensor trapezoid when it fits the budget, otherwise `Localized`.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub rule: QuadRule,
    pub points_per_dim: usize,
    pub adaptive: bool,
    pub refine_threshold: f64,
    /// Phase change, in cycles, at the edge of the plateau of each localizing cutoff.
    pub local_cycles: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rule: QuadRule::Auto,
            points_per_dim: 64,
            adaptive: true,
            refine_threshold: 1e-6,
            local_cycles: 6.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscResult {
    pub value: C64,
    /// Difference between the last two refinements.
    pub err: f64,
    /// Rule actually used and the final resolution.
    pub quad_used: QuadSpec,
    pub points: u64,
    pub converged: bool,
}

/// Phase function on `C^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Phase {
    Poly(CPolyN),
    Analytic(AnalyticFn),
}

impl From<CPolyN> for Phase {
    fn from(p: CPolyN) -> Self {
        Phase::Poly(p)
    }
}

impl From<CPoly1> for Phase {
    fn from(p: CPoly1) -> Self {
        Phase::Analytic(AnalyticFn::Poly(p))
    }
}

impl From<AnalyticFn> for Phase {
    fn from(f: AnalyticFn) -> Self {
        Phase::Analytic(f)
    }
}

impl Phase {
    pub fn nvars(&self) -> usize {
        match self {
            Phase::Poly(p) => p.nvars(),
            Phase::Analytic(_) => 1,
        }
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        match self {
            Phase::Poly(p) => p.eval(z),
            Phase::Analytic(f) => f.eval(0, z[0]),
        }
    }

    /// Univariate polynomial form, when there is one.
    pub fn as_poly1(&self) -> Option<CPoly1> {
        match self {
            Phase::Poly(p) => p.to_poly1().ok(),
            Phase::Analytic(AnalyticFn::Poly(p)) => Some(p.clone()),
            Phase::Analytic(_) => None,
        }
    }

    /// Largest `|∂_i f|` over grid samples of the support ball, padded by 25%.
    fn gradient_bound(&self, phi: &BumpSpec) -> f64 {
        let n = self.nvars();
        let r = phi.outer_radius;
        let per: usize = if n == 1 { 33 } else { 11 };
        let total = per.pow(2 * n as u32);
        let grads: Vec<CPolyN> = match self {
            Phase::Poly(p) => (0..n).map(|i| p.deriv(&crate::cpoly::MultiIndex::unit(n, i, 1))).collect(),
            Phase::Analytic(_) => Vec::new(),
        };
        let mut best: f64 = 0.0;
        let mut z = vec![C64::new(0.0, 0.0); n];
        for flat in 0..total {
            let mut rem = flat;
            for (v, zv) in z.iter_mut().enumerate() {
                let a = rem % per;
                rem /= per;
                let b = rem % per;
                rem /= per;
                let x = -r + 2.0 * r * a as f64 / (per - 1) as f64;
                let y = -r + 2.0 * r * b as f64 / (per - 1) as f64;
                *zv = phi.center[v] + C64::new(x, y);
            }
            let r2: f64 = z.iter().zip(&phi.center).map(|(a, c)| (a - c).norm_sqr()).sum();
            if r2 > r * r * 1.0001 {
                continue;
            }
            let g = match self {
                Phase::Poly(_) => grads.iter().map(|d| d.eval(&z).norm()).fold(0.0, f64::max),
                Phase::Analytic(f) => f.eval(1, z[0]).norm(),
            };
            best = best.max(g);
        }
        1.25 * best
    }
}

/// `e(w) = exp(2πi(Re w + Im w))`.
#[inline]
fn character(w: C64) -> C64 {
    let (s, c) = (TAU * (w.re + w.im)).sin_cos();
    C64::new(c, s)
}

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre() -> &'static ([f64; GAUSS_ORDER], [f64; GAUSS_ORDER]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<([f64; GAUSS_ORDER], [f64; GAUSS_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut x = [0.0; GAUSS_ORDER];
        let mut w = [0.0; GAUSS_ORDER];
        for i in 0..n {
            let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, t);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
                let dt = p1 / dp;
                t -= dt;
                if dt.abs() < 1e-16 {
                    let (mut q0, mut q1) = (1.0, t);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * t * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    let dq = n as f64 * (t * q1 - q0) / (t * t - 1.0);
                    w[i] = 2.0 / ((1.0 - t * t) * dq * dq);
                    break;
                }
            }
            x[i] = t;
        }
        (x, w)
    })
}

/// Nodes and weights for `[a, b]` with about `points` nodes.
fn nodes_1d(rule: QuadRule, a: f64, b: f64, points: usize) -> Vec<(f64, f64)> {
    match rule {
        QuadRule::TensorGauss => {
            let panels = points.div_ceil(GAUSS_ORDER).max(1);
            let (gx, gw) = gauss_legendre();
            let h = (b - a) / panels as f64;
            let mut out = Vec::with_capacity(panels * GAUSS_ORDER);
            for p in 0..panels {
                let mid = a + (p as f64 + 0.5) * h;
                for (x, w) in gx.iter().zip(gw) {
                    out.push((mid + 0.5 * h * x, 0.5 * h * w));
                }
            }
            out
        }
        _ => {
            let h = (b - a) / points as f64;
            (0..points).map(|i| (a + (i as f64 + 0.5) * h, h)).collect()
        }
    }
}

fn tensor_pass(f: &Phase, phi: &BumpSpec, rule: QuadRule, points: usize) -> C64 {
    let n = phi.nvars();
    let r = phi.outer_radius;
    let axes: Vec<Vec<(f64, f64)>> = (0..2 * n)
        .map(|i| {
            let c = if i % 2 == 0 { phi.center[i / 2].re } else { phi.center[i / 2].im };
            nodes_1d(rule, c - r, c + r, points)
        })
        .collect();
    let m = axes[0].len();
    let mut total = C64::new(0.0, 0.0);
    let mut z = vec![C64::new(0.0, 0.0); n];
    if n == 1 {
        for &(x, wx) in &axes[0] {
            let mut row = C64::new(0.0, 0.0);
            for &(y, wy) in &axes[1] {
                z[0] = C64::new(x, y);
                let b = phi.value(&z);
                if b != 0.0 {
                    row += character(f.eval(&z)) * (b * wy);
                }
            }
            total += row * wx;
        }
        return total;
    }
    let count = m.pow(2 * n as u32);
    for flat in 0..count {
        let mut rem = flat;
        let mut w = 1.0;
        for (v, zv) in z.iter_mut().enumerate() {
            let (x, wx) = axes[2 * v][rem % m];
            rem /= m;
            let (y, wy) = axes[2 * v + 1][rem % m];
            rem /= m;
            *zv = C64::new(x, y);
            w *= wx * wy;
        }
        let b = phi.value(&z);
        if b != 0.0 {
            total += character(f.eval(&z)) * (b * w);
        }
    }
    total
}

/// Points per dimension for the tensor rules, from the Nyquist guard.
fn tensor_points(f: &Phase, phi: &BumpSpec, quad: &QuadSpec) -> usize {
    let cycles = SQRT_2 * f.gradient_bound(phi) * 2.0 * phi.outer_radius;
    quad.points_per_dim.max((NYQUIST_FACTOR * cycles).ceil() as usize).max(8)
}

fn tensor_cost(points: usize, n: usize) -> u64 {
    (points as u64).saturating_pow(2 * n as u32)
}

/// `∫ e(f(z)) φ(z) dz` over the support of `φ`.
pub fn integrate(f: &Phase, phi: &BumpSpec, quad: &QuadSpec) -> Result<OscResult> {
    phi.validate()?;
    let n = phi.nvars();
    if n != f.nvars() {
        return Err(Error::InvalidInput("phase and bump dimensions differ".into()));
    }
    if n > 2 {
        return Err(Error::DimensionTooHigh(n));
    }
    let rule = match quad.rule {
        QuadRule::Auto => {
            let p = tensor_points(f, phi, quad);
            if tensor_cost(p, n) <= POINT_BUDGET || f.as_poly1().is_none() || n != 1 {
                QuadRule::TensorTrapezoid
            } else {
                QuadRule::Localized
            }
        }
        r => r,
    };
    match rule {
        QuadRule::Localized => {
            let p = f
                .as_poly1()
                .filter(|_| n == 1)
                .ok_or_else(|| Error::InvalidInput("localized rule needs a univariate polynomial".into()))?;
            localized(&p, phi, quad)
        }
        _ => tensor(f, phi, quad, rule),
    }
}

fn tensor(f: &Phase, phi: &BumpSpec, quad: &QuadSpec, rule: QuadRule) -> Result<OscResult> {
    let n = phi.nvars();
    let mut p = tensor_points(f, phi, quad);
    if tensor_cost(p, n) > POINT_BUDGET {
        return Err(Error::BudgetExceeded { needed: tensor_cost(p, n), cap: POINT_BUDGET });
    }
    let mut used = 0u64;
    let coarse = (p / 2).max(4);
    let mut prev = tensor_pass(f, phi, rule, coarse);
    used += tensor_cost(coarse, n);
    loop {
        let v = tensor_pass(f, phi, rule, p);
        used += tensor_cost(p, n);
        let err = (v - prev).norm();
        let converged = err < quad.refine_threshold * (1.0 + v.norm());
        let next = 2 * p;
        if !quad.adaptive || converged || tensor_cost(next, n) > POINT_BUDGET {
            return Ok(OscResult {
                value: v,
                err,
                quad_used: QuadSpec { rule, points_per_dim: p, ..*quad },
                points: used,
                converged,
            });
        }
        prev = v;
        p = next;
    }
}

#[derive(Clone, Debug)]
struct LocalDisc {
    center: C64,
    /// Cutoff is 1 on `|z - c| <= rho` and 0 beyond `2 rho`.
    rho: f64,
    members: Vec<C64>,
}

/// Smallest radius at which some Taylor term of `f` about `c` reaches `cycles`.
fn local_radius(taylor: &[C64], cycles: f64) -> f64 {
    taylor
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(j, a)| (cycles / a.norm()).powf(1.0 / j as f64))
        .fold(f64::INFINITY, f64::min)
}

fn build_discs(p: &CPoly1, phi: &BumpSpec, cycles: f64) -> Result<Vec<LocalDisc>> {
    let center = phi.center[0];
    let dp = p.deriv(1);
    if dp.degree() == 0 {
        return Ok(Vec::new());
    }
    let mut discs: Vec<LocalDisc> = roots(&dp, ROOT_TOL)?
        .into_iter()
        .flat_map(|r| std::iter::repeat(r.z).take(r.multiplicity))
        .map(|z| LocalDisc { center: z, rho: local_radius(&p.taylor_at(z), cycles), members: vec![z] })
        .collect();
    // merge overlapping discs until they are disjoint
    loop {
        let mut merged = false;
        'outer: for i in 0..discs.len() {
            for j in (i + 1)..discs.len() {
                if (discs[i].center - discs[j].center).norm() < 2.0 * (discs[i].rho + discs[j].rho) {
                    let mut members = discs[i].members.clone();
                    members.extend(discs[j].members.iter().copied());
                    let c = members.iter().sum::<C64>() / members.len() as f64;
                    let spread = members.iter().map(|m| (m - c).norm()).fold(0.0, f64::max);
                    let rho = local_radius(&p.taylor_at(c), cycles).max(1.5 * spread);
                    discs[i] = LocalDisc { center: c, rho, members };
                    discs.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    discs.retain(|d| (d.center - center).norm() - 2.0 * d.rho < phi.outer_radius);
    Ok(discs)
}

/// Sum of `j |a_j| r^{j-1}`: bound for `|f'|` on the disc of radius `r` about the base point.
fn derivative_bound(taylor: &[C64], r: f64) -> f64 {
    taylor
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, a)| j as f64 * a.norm() * r.powi(j as i32 - 1))
        .sum()
}

fn localized(p: &CPoly1, phi: &BumpSpec, quad: &QuadSpec) -> Result<OscResult> {
    let discs = build_discs(p, phi, quad.local_cycles)?;
    let run = |factor: f64, count_only: bool| -> Result<(C64, u64)> {
        let mut total = C64::new(0.0, 0.0);
        let mut used = 0u64;
        for d in &discs {
            let taylor = p.taylor_at(d.center);
            let dist = (d.center - phi.center[0]).norm();
            // whole support inside the plateau of the cutoff: no cutoff needed
            let full = dist + phi.outer_radius <= d.rho;
            let outer = if full { dist + phi.outer_radius } else { 2.0 * d.rho };
            let cycles_r = SQRT_2 * derivative_bound(&taylor, outer) * outer;
            let nr = ((factor * cycles_r).ceil() as usize).max(4 * GAUSS_ORDER);
            let radial = nodes_1d(QuadRule::TensorGauss, 0.0, outer, nr);
            for &(r, wr) in &radial {
                let cyc = TAU * r * SQRT_2 * derivative_bound(&taylor, r);
                let nt = ((factor * cyc).ceil() as usize).max(32);
                used += nt as u64;
                if used > POINT_BUDGET {
                    return Err(Error::BudgetExceeded { needed: used, cap: POINT_BUDGET });
                }
                if count_only {
                    continue;
                }
                let cut = if full { 1.0 } else { smooth_step((2.0 * d.rho - r) / d.rho) };
                if cut == 0.0 {
                    continue;
                }
                let dt = TAU / nt as f64;
                let mut ring = C64::new(0.0, 0.0);
                for t in 0..nt {
                    let z = d.center + C64::from_polar(r, dt * t as f64);
                    let b = phi.value(&[z]);
                    if b != 0.0 {
                        ring += character(p.eval(z)) * b;
                    }
                }
                total += ring * (dt * r * wr * cut);
            }
        }
        Ok((total, used))
    };
    let mut factor = NYQUIST_FACTOR * (quad.points_per_dim as f64 / 64.0).max(1.0);
    let (mut prev, mut used) = run(factor / 2.0, false)?;
    loop {
        let (_, need) = run(factor, true)?;
        let (v, u) = run(factor, false)?;
        used += u;
        let err = (v - prev).norm();
        let converged = err < quad.refine_threshold * (1.0 + v.norm());
        let fits_next = need.saturating_mul(2) <= POINT_BUDGET;
        if !quad.adaptive || converged || !fits_next {
            return Ok(OscResult {
                value: v,
                err,
                quad_used: QuadSpec {
                    rule: QuadRule::Localized,
                    points_per_dim: (factor / NYQUIST_FACTOR * 64.0) as usize,
                    ..*quad
                },
                points: used,
                converged,
            });
        }
        prev = v;
        factor *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> CPoly1 {
        CPoly1::from_real(c).unwrap()
    }

    #[test]
    fn gauss_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre();
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(w).map(|(x, w)| x.powi(30) * w).sum();
        assert!((m - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn zero_phase_gives_mass() {
        let phi = BumpSpec::plateau(0.5, 1.0);
        let q = QuadSpec { refine_threshold: 1e-10, ..Default::default() };
        let a = integrate(&poly(&[0.0]).into(), &phi, &q).unwrap();
        let g = integrate(&poly(&[0.0]).into(), &phi, &QuadSpec { rule: QuadRule::TensorGauss, ..q }).unwrap();
        assert!(a.value.im.abs() < 1e-14);
        // plateau mass lies between the inner and outer disc areas
        assert!(a.value.re > PI / 4.0 && a.value.re < PI);
        assert!((a.value - g.value).norm() < 1e-9);
    }

    #[test]
    fn localized_matches_tensor() {
        let phi = BumpSpec::plateau(0.5, 1.0);
        for (k, lam) in [(2, 60.0), (3, 60.0), (4, 60.0)] {
            let mut c = vec![0.0; k + 1];
            c[k] = lam;
            let f: Phase = poly(&c).into();
            let q = QuadSpec { refine_threshold: 1e-9, ..Default::default() };
            let t = integrate(&f, &phi, &QuadSpec { rule: QuadRule::TensorTrapezoid, ..q }).unwrap();
            let l = integrate(&f, &phi, &QuadSpec { rule: QuadRule::Localized, ..q }).unwrap();
            let rel = (t.value - l.value).norm() / t.value.norm();
            assert!(rel < 1e-3, "k={k} tensor {:?} local {:?} rel {rel:e}", t.value, l.value);
        }
    }

    #[test]
    fn modulation_and_conjugation() {
        let phi = BumpSpec::plateau(0.5, 1.0);
        let q = QuadSpec { refine_threshold: 1e-10, ..Default::default() };
        let f = poly(&[0.0, 0.3, 2.0, -1.0]);
        let a = integrate(&f.clone().into(), &phi, &q).unwrap();
        let c = C64::new(0.2, 0.15);
        let b = integrate(&f.add_const(c).into(), &phi, &q).unwrap();
        assert!((b.value - character(c) * a.value).norm() < 1e-8);
        let neg = integrate(&f.scale(C64::new(-1.0, 0.0)).into(), &phi, &q).unwrap();
        // φ is real, so I(-f) = conj I(f)
        assert!((neg.value - a.value.conj()).norm() < 1e-8, "{:?} {:?}", neg.value, a.value);
    }

    #[test]
    fn budget_exceeded_for_huge_two_variable_phase() {
        let p = CPolyN::new(2, [(crate::cpoly::MultiIndex(vec![1, 0]), C64::new(1e4, 0.0))]).unwrap();
        let phi = BumpSpec::plateau_n(0.5, 1.0, 2);
        let r = integrate(&p.into(), &phi, &QuadSpec::default());
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }
}
