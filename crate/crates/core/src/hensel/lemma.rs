use serde::{Deserialize, Serialize};

use crate::cpoly::{AnalyticFn, C64};
use crate::error::{Error, Result};

const VANISH_FLOOR: f64 = 1e-300;
const UNIT: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Bound on `delta * M`.
    pub theta_delta: f64,
    /// Bound on `delta_1` (only used when the order is at least 2).
    pub theta_1: f64,
    /// Bound on `delta_k`, `2 <= k <= order - 1`.
    pub theta_bulk: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            theta_delta: 1.0 / 64.0,
            theta_1: 1.0 / 64.0,
            theta_bulk: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HenselConditions {
    /// Derivative order paired with `phi'` in `delta`.
    pub order: usize,
    pub delta: f64,
    /// `delta_k` for `1 <= k <= order - 1` (index 0 holds `delta_1`).
    pub delta_k: Vec<f64>,
    /// Upper bound for `|phi|` on the disc of radius 7/4.
    pub sup_bound: f64,
    pub step0: f64,
    pub ok: bool,
    /// Which inequality failed first, if any.
    pub failed: Option<String>,
}

impl HenselConditions {
    /// Contraction factor `Λ` governing the step decay.
    ///
    /// With order 1 the second derivative is bounded through Cauchy on a
    /// disc of radius 1/2 around the iterate.
    pub fn contraction(&self) -> f64 {
        if self.order >= 2 {
            4.0 * self.delta_k[0]
        } else {
            8.0 * self.sup_bound * self.delta
        }
    }
}

pub fn check_conditions(
    phi: &AnalyticFn,
    z0: C64,
    order: usize,
    sup_bound: f64,
    th: &Thresholds,
) -> Result<HenselConditions> {
    if order == 0 {
        return Err(Error::InvalidInput("Hensel order must be >= 1".into()));
    }
    if !(sup_bound > 0.0) || !sup_bound.is_finite() {
        return Err(Error::InvalidInput("sup bound must be positive and finite".into()));
    }
    let d: Vec<C64> = (0..=order + 1).map(|k| phi.eval(k, z0)).collect();
    for (k, v) in d.iter().enumerate().take(order + 1).skip(1) {
        if !(v.norm() > VANISH_FLOOR) {
            return Err(Error::DerivativeVanishes(k));
        }
    }
    let a0 = d[0].norm();
    let a1 = d[1].norm();
    let delta = a0 / (a1 * d[order].norm());
    let delta_k: Vec<f64> = (1..order)
        .map(|k| d[k + 1].norm() * a0 / (d[k].norm() * a1))
        .collect();
    let step0 = a0 / a1;
    let mut failed = None;
    if !(delta * sup_bound <= th.theta_delta) {
        failed = Some(format!("delta*M = {:.3e} > {:.3e}", delta * sup_bound, th.theta_delta));
    } else if order >= 2 && !(delta_k[0] <= th.theta_1) {
        failed = Some(format!("delta_1 = {:.3e} > {:.3e}", delta_k[0], th.theta_1));
    } else if let Some((k, v)) = delta_k
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, v)| !(**v <= th.theta_bulk))
    {
        failed = Some(format!("delta_{} = {:.3e} > {:.3e}", k + 1, v, th.theta_bulk));
    } else if !(step0 <= 0.125) {
        failed = Some(format!("step0 = {step0:.3e} > 1/8"));
    }
    Ok(HenselConditions {
        order,
        delta,
        delta_k,
        sup_bound,
        step0,
        ok: failed.is_none(),
        failed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub domain_center: C64,
    pub domain_radius: f64,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions {
            tol: 1e-14,
            max_iter: 60,
            domain_center: C64::new(0.0, 0.0),
            domain_radius: 1.25,
        }
    }
}

/// Claims (1)-(4) at one step: measured value and bound for each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub step: usize,
    pub step_len: f64,
    pub step_bound: f64,
    pub residual: f64,
    pub residual_bound: f64,
    pub slope: f64,
    pub slope_floor: f64,
    /// `(k, |phi^(k)(z_{n-1})|, cap)` for `2 <= k <= order`.
    pub higher: Vec<(usize, f64, f64)>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HenselCertificate {
    pub root: C64,
    pub iterates: Vec<C64>,
    pub final_residual: f64,
    pub bound: f64,
    pub within_bound: bool,
    pub claim_trace: Vec<ClaimRecord>,
    /// `None` when no conditions were supplied.
    pub claims_hold: Option<bool>,
    pub conditions: Option<HenselConditions>,
}

/// Newton iteration without condition bookkeeping.
pub fn iterate(phi: &AnalyticFn, z0: C64, tol: f64, max_iter: usize) -> Result<HenselCertificate> {
    let opts = IterateOptions {
        tol,
        max_iter,
        ..IterateOptions::default()
    };
    iterate_with(phi, z0, &opts, None)
}

/// Runs `z_n = z_{n-1} - phi(z_{n-1})/phi'(z_{n-1})` and records the claim trace.
/// With `conditions`, the four claims are checked at every step against the
/// contraction factor derived from them.
pub fn iterate_with(
    phi: &AnalyticFn,
    z0: C64,
    opts: &IterateOptions,
    conditions: Option<&HenselConditions>,
) -> Result<HenselCertificate> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let order = conditions.map_or(1, |c| c.order);
    let base: Vec<f64> = (0..=order.max(1)).map(|k| phi.eval(k, z0).norm()).collect();
    if !(base[1] > VANISH_FLOOR) {
        return Err(Error::DerivativeVanishesAtIterate(0));
    }
    let step0 = base[0] / base[1];
    let lambda = conditions.map(|c| c.contraction());
    let sup = conditions.map_or(0.0, |c| c.sup_bound);

    let mut iterates = vec![z0];
    let mut trace = Vec::new();
    let mut all_hold = true;
    let mut z = z0;
    let mut value = phi.eval(0, z);
    let mut converged = value.norm() <= opts.tol;
    let mut n = 0;
    while !converged {
        n += 1;
        if n > opts.max_iter {
            return Err(Error::MaxIterations(opts.max_iter));
        }
        let slope = phi.eval(1, z);
        if !(slope.norm() > VANISH_FLOOR) {
            return Err(Error::DerivativeVanishesAtIterate(n - 1));
        }
        let step = value / slope;
        let next = z - step;

        let rec = claim_record(phi, n, z, next, value, slope, &base, order, lambda, sup);
        all_hold &= rec.holds;
        trace.push(rec);

        let off = (next - opts.domain_center).norm();
        if !(off <= opts.domain_radius) {
            return Err(Error::LeftDomain { step: n, modulus: next.norm() });
        }
        z = next;
        iterates.push(z);
        value = phi.eval(0, z);
        converged = value.norm() <= opts.tol || step.norm() <= opts.tol * z.norm().max(1.0);
    }
    let bound = 2.0 * step0;
    let slack = 16.0 * UNIT * z0.norm().max(1.0);
    Ok(HenselCertificate {
        root: z,
        final_residual: value.norm(),
        bound,
        within_bound: (z - z0).norm() <= bound + slack,
        iterates,
        claim_trace: trace,
        claims_hold: conditions.map(|_| all_hold),
        conditions: conditions.cloned(),
    })
}

#[allow(clippy::too_many_arguments)]
fn claim_record(
    phi: &AnalyticFn,
    n: usize,
    prev: C64,
    next: C64,
    value: C64,
    slope: C64,
    base: &[f64],
    order: usize,
    lambda: Option<f64>,
    sup: f64,
) -> ClaimRecord {
    let step_len = (next - prev).norm();
    let residual = value.norm();
    let slope_abs = slope.norm();
    // eps_{n-1} = sum_{j=2}^{n} 2^{-j}, epsilon_{n-1} = sum_{j=1}^{n-1} 2^{-j}
    let lower_eps = 0.5 - 0.5f64.powi(n as i32);
    let upper_eps = 1.0 - 0.5f64.powi(n as i32 - 1);
    let higher: Vec<(usize, f64, f64)> = (2..=order)
        .map(|k| (k, phi.eval(k, prev).norm(), (1.0 + upper_eps) * base[k]))
        .collect();
    let Some(lambda) = lambda else {
        return ClaimRecord {
            step: n,
            step_len,
            step_bound: f64::INFINITY,
            residual,
            residual_bound: f64::INFINITY,
            slope: slope_abs,
            slope_floor: 0.0,
            higher,
            holds: true,
        };
    };
    let expo = 2f64.powi(n as i32 - 1) - 1.0;
    let decay = lambda.powf(expo);
    let step0 = base[0] / base[1];
    // Rounding floor: evaluation error of phi is about u * sup.
    let step_slack = 16.0 * UNIT * prev.norm().max(1.0) + 16.0 * UNIT * sup / base[1];
    let res_slack = 16.0 * UNIT * sup;
    let step_bound = step0 * decay;
    let residual_bound = base[0] * decay;
    let slope_floor = (1.0 - lower_eps) * base[1];
    let deriv_slack = |k: usize| {
        1e-12 * base[k] + 64.0 * UNIT * sup * crate::cpoly::poly1::factorial(k) * 2f64.powi(k as i32)
    };
    let holds = step_len <= step_bound + step_slack
        && residual <= residual_bound + res_slack
        && slope_abs + deriv_slack(1) >= slope_floor
        && higher.iter().all(|&(k, v, cap)| v <= cap + deriv_slack(k));
    ClaimRecord {
        step: n,
        step_len,
        step_bound,
        residual,
        residual_bound,
        slope: slope_abs,
        slope_floor,
        higher,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::CPoly1;

    fn poly(c: &[f64]) -> AnalyticFn {
        AnalyticFn::Poly(CPoly1::from_real(c).unwrap())
    }

    #[test]
    fn conditions_quadratic() {
        let phi = poly(&[-1.0, 0.0, 1.0]);
        let c = check_conditions(&phi, C64::new(1.1, 0.0), 1, 2.0625, &Thresholds::default()).unwrap();
        assert!((c.delta - 0.21 / 4.84).abs() < 1e-12);
        assert!((c.delta * c.sup_bound - 0.0895).abs() < 1e-3);
        assert!((c.step0 - 0.21 / 2.2).abs() < 1e-12);
        assert!(!c.ok);
    }

    #[test]
    fn conditions_linear_and_cubic() {
        let phi = poly(&[0.0, 1.0]);
        let c = check_conditions(&phi, C64::new(0.001, 0.0), 1, 1.75, &Thresholds::default()).unwrap();
        assert!((c.delta - 0.001).abs() < 1e-15 && (c.step0 - 0.001).abs() < 1e-15);
        assert!(c.ok);

        let cube = poly(&[0.0, 0.0, 0.0, 1.0]);
        let z0 = C64::new(0.5, 0.0);
        let c1 = check_conditions(&cube, z0, 1, 5.36, &Thresholds::default()).unwrap();
        assert!(c1.delta_k.is_empty());
        // z^3 at 1/2: phi = 1/8, phi' = 3/4, phi'' = 3
        let c2 = check_conditions(&cube, z0, 2, 5.36, &Thresholds::default()).unwrap();
        assert!((c2.delta_k[0] - 3.0 * 0.125 / 0.5625).abs() < 1e-12);
        assert!((c2.delta - 0.125 / (0.75 * 3.0)).abs() < 1e-12);
        assert!(check_conditions(&cube, C64::new(0.0, 0.0), 1, 5.36, &Thresholds::default()).is_err());
    }

    #[test]
    fn newton_examples() {
        let phi = poly(&[-1.0, 0.0, 1.0]);
        let cert = iterate(&phi, C64::new(1.1, 0.0), 1e-14, 50).unwrap();
        assert!((cert.root - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(cert.within_bound && (cert.bound - 0.21 / 1.1).abs() < 1e-12);

        let lin = poly(&[0.0, 1.0]);
        let cert = iterate(&lin, C64::new(0.05, 0.0), 1e-14, 50).unwrap();
        assert_eq!(cert.iterates.len(), 2);
        assert_eq!(cert.root, C64::new(0.0, 0.0));
    }

    #[test]
    fn nonvanishing_derivative_escapes() {
        let phi = AnalyticFn::ExpCounterexample { n: 10.0 }.derivative(1);
        let r = iterate(&phi, C64::new(0.0, 0.0), 1e-14, 50);
        assert!(matches!(r, Err(Error::LeftDomain { .. }) | Err(Error::MaxIterations(_))));
    }

    #[test]
    fn claims_hold_when_conditions_ok() {
        // (z - 0.3)(z + 0.9)(z - 0.2i) near 0.3
        let p = CPoly1::from_roots(&[C64::new(0.3, 0.0), C64::new(-0.9, 0.0), C64::new(0.0, 0.2)]).unwrap();
        let sup = p.abs_sum(1.75);
        let phi = AnalyticFn::Poly(p);
        let z0 = C64::new(0.3 + 2e-4, 1e-4);
        let cond = check_conditions(&phi, z0, 1, sup, &Thresholds::default()).unwrap();
        assert!(cond.ok, "{cond:?}");
        let cert = iterate_with(&phi, z0, &IterateOptions::default(), Some(&cond)).unwrap();
        assert_eq!(cert.claims_hold, Some(true), "{:?}", cert.claim_trace);
        assert!(cert.within_bound);
    }
}
