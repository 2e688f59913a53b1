use serde::{Deserialize, Serialize};

use super::lemma::{check_conditions, iterate_with, HenselCertificate, IterateOptions, Thresholds};
use crate::cpoly::poly1::factorial;
use crate::cpoly::{
    derived_zero_set, min_modulus_on_disc, nearest_derived_zero, AnalyticFn, CPoly1, DerivedZero, C64,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseConstants {
    /// Base of the `c_j` and `rho_l` families.
    pub kappa: f64,
    /// Constant in the reported `dist <= c_bound * eps^{1/k}` check.
    pub c_bound: f64,
    /// Largest admissible `eps`.
    pub eps_max: f64,
    pub thresholds: Thresholds,
    pub tol: f64,
    /// Polar grid used to find the derivative bounded below on the disc.
    pub grid: usize,
}

impl Default for CaseConstants {
    fn default() -> Self {
        CaseConstants {
            kappa: 1e-2,
            c_bound: 100.0,
            eps_max: 1e-2,
            thresholds: Thresholds::default(),
            tol: 1e-14,
            grid: 64,
        }
    }
}

impl CaseConstants {
    /// `c_{top-m} = kappa^{m (top + 1 - m)}`, so `c_top = 1` and
    /// `c_{i}^2 = kappa^2 c_{i-1} c_{i+1}`.
    pub fn c(&self, top: usize, m: usize) -> f64 {
        self.kappa.powi((m * (top + 1 - m)) as i32)
    }

    /// Threshold in `(I_l)`: `rho_{j-l+1} = kappa^l`.
    pub fn rho_for(&self, l: usize) -> f64 {
        self.kappa.powi(l as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LocatorCase {
    /// `K = K_0`.
    Case0,
    /// `K = K_1`.
    Case1,
    /// `K = K_j` with `j >= 2`; `subcase` in `1..=j`.
    General { j: usize, subcase: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Located {
    /// Derivative order whose zero was found.
    pub j: usize,
    pub zero: C64,
    pub dist: f64,
    pub case: Option<LocatorCase>,
    /// Hensel order used (`phi = Q^{(top - order)}`), 0 in fallback.
    pub order: usize,
    /// False when a non-designated order had to be used.
    pub designated: bool,
    pub fallback: bool,
    pub fallback_reason: Option<String>,
    /// `dist <= c_bound * eps^{1/k}`.
    pub bound_ok: bool,
    pub top: usize,
    pub k_values: Vec<f64>,
    pub certificate: Option<HenselCertificate>,
}

/// Per-polynomial data shared by all queries: the top order and derived zeros.
#[derive(Clone, Debug)]
pub struct DerivativeLocator {
    q: CPoly1,
    top: usize,
    zeros: Vec<DerivedZero>,
    sups: Vec<f64>,
    consts: CaseConstants,
}

impl DerivativeLocator {
    pub fn new(q: &CPoly1, consts: CaseConstants) -> Result<Self> {
        let d = q.degree();
        if d == 0 {
            return Err(Error::DegreeTooLow { need: 1, got: 0 });
        }
        // Order whose normalized derivative is largest from below on the disc.
        let mut top = 0;
        let mut best = 0.0;
        for j in 0..=d {
            let m = min_modulus_on_disc(&q.deriv(j), consts.grid).0 / factorial(j);
            if m > best {
                best = m;
                top = j;
            }
        }
        let sups = (0..=d).map(|j| q.deriv(j).abs_sum(1.75)).collect();
        Ok(DerivativeLocator {
            q: q.clone(),
            top,
            zeros: derived_zero_set(q)?,
            sups,
            consts,
        })
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn derived_zeros(&self) -> &[DerivedZero] {
        &self.zeros
    }

    pub fn locate(&self, z0: C64, k: usize, eps: f64) -> Result<Located> {
        let q = &self.q;
        let c = &self.consts;
        if k == 0 || k > q.degree() {
            return Err(Error::InvalidInput(format!("k = {k} must be in 1..=deg Q")));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        if eps > c.eps_max {
            return Err(Error::SmallnessViolated(format!("eps = {eps:e} > {:e}", c.eps_max)));
        }
        let derivs = q.derivs_at(z0);
        let abs: Vec<f64> = derivs.iter().map(|v| v.norm()).collect();
        if abs[k] < 1.0 {
            return Err(Error::Precondition(format!("|Q^({k})(z0)| = {} < 1", abs[k])));
        }
        if abs[0] > eps {
            return Err(Error::Precondition(format!("|Q(z0)| = {:e} > eps", abs[0])));
        }
        let top = self.top;
        let scale = eps.powf(1.0 / k as f64);
        if top == 0 {
            return self.fallback(z0, scale, Vec::new(), None, "no derivative bounded below on the disc");
        }
        let k_values: Vec<f64> = (0..top)
            .map(|j| (c.c(top, j) * abs[top - j] / eps).powf(1.0 / (top - j) as f64))
            .collect();
        let jmax = k_values
            .iter()
            .enumerate()
            .fold(0, |b, (j, &v)| if v > k_values[b] { j } else { b });
        let (case, order) = match jmax {
            0 => (LocatorCase::Case0, 1),
            1 => (LocatorCase::Case1, 2),
            j => {
                let kj = k_values[j];
                let sub = (1..j)
                    .find(|&l| kj * abs[top - l] <= c.rho_for(l) * abs[top - l + 1])
                    .unwrap_or(j);
                let order = if sub == j { j + 1 } else { sub };
                (LocatorCase::General { j, subcase: sub }, order)
            }
        };

        let mut first_failure = None;
        let candidates = std::iter::once(order).chain((1..=top).filter(|&l| l != order));
        for l in candidates {
            match self.attempt(z0, l) {
                Ok(cert) => {
                    let dist = (cert.root - z0).norm();
                    return Ok(Located {
                        j: top - l,
                        zero: cert.root,
                        dist,
                        case: Some(case),
                        order: l,
                        designated: l == order,
                        fallback: false,
                        fallback_reason: first_failure,
                        bound_ok: dist <= c.c_bound * scale,
                        top,
                        k_values,
                        certificate: Some(cert),
                    });
                }
                Err(why) if first_failure.is_none() => {
                    first_failure = Some(format!("order {l}: {why}"));
                }
                Err(_) => {}
            }
        }
        let reason = first_failure.unwrap_or_default();
        self.fallback(z0, scale, k_values, Some(case), &reason)
    }

    /// Hensel run on `Q^{(top - order)}` with its derivative of that order.
    fn attempt(&self, z0: C64, order: usize) -> std::result::Result<HenselCertificate, String> {
        let c = &self.consts;
        let idx = self.top - order;
        let phi = AnalyticFn::Poly(self.q.deriv(idx));
        let cond = check_conditions(&phi, z0, order, self.sups[idx].max(f64::MIN_POSITIVE), &c.thresholds)
            .map_err(|e| e.to_string())?;
        if !cond.ok {
            return Err(cond.failed.unwrap_or_default());
        }
        let opts = IterateOptions {
            tol: c.tol,
            ..IterateOptions::default()
        };
        let cert = iterate_with(&phi, z0, &opts, Some(&cond)).map_err(|e| e.to_string())?;
        if !cert.within_bound {
            return Err(format!("root outside 2*step0 = {:.3e}", cert.bound));
        }
        Ok(cert)
    }

    fn fallback(
        &self,
        z0: C64,
        scale: f64,
        k_values: Vec<f64>,
        case: Option<LocatorCase>,
        reason: &str,
    ) -> Result<Located> {
        let (dz, dist) = nearest_derived_zero(&self.zeros, z0)
            .ok_or_else(|| Error::CaseAnalysisFailed(reason.to_string()))?;
        Ok(Located {
            j: dz.j,
            zero: dz.z,
            dist,
            case,
            order: 0,
            designated: false,
            fallback: true,
            fallback_reason: Some(reason.to_string()),
            bound_ok: dist <= self.consts.c_bound * scale,
            top: self.top,
            k_values,
            certificate: None,
        })
    }
}

/// One-shot form of [`DerivativeLocator::locate`].
pub fn locate_derivative_zero(
    q: &CPoly1,
    z0: C64,
    k: usize,
    eps: f64,
    consts: CaseConstants,
) -> Result<Located> {
    DerivativeLocator::new(q, consts)?.locate(z0, k, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family_is_log_convex() {
        let c = CaseConstants::default();
        let top = 6;
        for i in 1..top {
            // c_i^2 = kappa^2 c_{i-1} c_{i+1}
            let ci = c.c(top, top - i);
            let lo = c.c(top, top - i + 1);
            let hi = c.c(top, top - i - 1);
            assert!((ci * ci / (lo * hi) - 1e-4).abs() < 1e-16);
        }
        assert_eq!(c.c(top, 0), 1.0);
    }

    #[test]
    fn square_at_origin() {
        let q = CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let r = locate_derivative_zero(&q, C64::new(0.01, 0.0), 2, 1e-4, CaseConstants::default()).unwrap();
        assert!(r.zero.norm() < 1e-12, "{r:?}");
        assert!(r.j <= 1);
        assert!((r.dist - 0.01).abs() < 1e-12);
        assert!(r.bound_ok);
    }

    #[test]
    fn cubic_near_critical_point() {
        // Q = z^3 - 3z + 2 vanishes to second order at 1.
        let q = CPoly1::from_real(&[2.0, -3.0, 0.0, 1.0]).unwrap();
        let eps = 1e-6;
        // |Q(1 + t)| = |t^2 (3 + t)| = eps
        let t = (eps / 3.0f64).sqrt() * 0.999;
        let z0 = C64::new(1.0 + t, 0.0);
        let r = locate_derivative_zero(&q, z0, 1, eps, CaseConstants::default());
        // |Q'(z0)| < 1 here, so the k = 1 hypothesis fails.
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = locate_derivative_zero(&q, z0, 2, eps, CaseConstants::default()).unwrap();
        assert!((r.zero - C64::new(1.0, 0.0)).norm() < 1e-6, "{r:?}");
        assert!(r.dist <= 100.0 * eps.sqrt());
    }

    #[test]
    fn preconditions() {
        let q = CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let c = CaseConstants::default();
        assert!(matches!(
            locate_derivative_zero(&q, C64::new(0.5, 0.0), 2, 1e-4, c),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            locate_derivative_zero(&q, C64::new(0.0, 0.0), 2, 0.5, c),
            Err(Error::SmallnessViolated(_))
        ));
    }
}
