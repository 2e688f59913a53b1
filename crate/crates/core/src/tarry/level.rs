//! Exact decision of `H ≤ Q` on the closed unit disc for polynomials of degree at most 3.

use std::f64::consts::{PI, TAU};

use crate::cpoly::C64;
use crate::error::{Error, Result};

/// Highest degree handled by [`h_at_most`].
pub const EXACT_DEGREE: usize = 3;

const ARC_SAMPLES: usize = 64;

/// Coefficients `a[k]` of `z^k`, `k <= 3`; the constant term is ignored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cubic(pub [C64; 4]);

impl Cubic {
    pub fn from_slice(a: &[C64]) -> Result<Self> {
        let top = a.iter().rposition(|c| *c != C64::new(0.0, 0.0)).unwrap_or(0);
        if top > EXACT_DEGREE {
            return Err(Error::DegreeCap { degree: top, cap: EXACT_DEGREE });
        }
        let mut c = [C64::new(0.0, 0.0); 4];
        c[..=top.min(a.len().saturating_sub(1))].copy_from_slice(&a[..=top.min(a.len().saturating_sub(1))]);
        Ok(Cubic(c))
    }

    /// Taylor coefficients `P^{(k)}(z)/k!`, `k = 0..=3` (the constant slot is left at zero).
    pub fn taylor(&self, z: C64) -> [C64; 4] {
        let [_, _, a2, a3] = self.0;
        [C64::new(0.0, 0.0), self.d1(z), a2 + a3 * 3.0 * z, a3]
    }

    fn d1(&self, z: C64) -> C64 {
        let [_, a1, a2, a3] = self.0;
        a1 + z * (a2 * 2.0 + z * a3 * 3.0)
    }

    /// `max_k |P^{(k)}(z)/k!|^{1/k}`.
    pub fn g(&self, z: C64) -> f64 {
        let [_, _, a2, a3] = self.0;
        let b2 = a2 + a3 * 3.0 * z;
        self.d1(z).norm().max(b2.norm().sqrt()).max(a3.norm().cbrt())
    }
}

/// Whether `inf_{|z| <= 1} max_k |P^{(k)}(z)/k!|^{1/k} <= q`.
pub fn h_at_most(p: &Cubic, q: f64) -> bool {
    let [_, a1, a2, a3] = p.0;
    let zero = C64::new(0.0, 0.0);
    if a3 == zero {
        if a2 == zero {
            return a1.norm() <= q;
        }
        // min over the disc of |a1 + 2 a2 z| is max(0, |a1| - 2|a2|)
        return a2.norm() <= q * q && (a1.norm() - 2.0 * a2.norm()).max(0.0) <= q;
    }
    if a3.norm() > q * q * q {
        return false;
    }
    // K = disc ∩ {|a2 + 3 a3 z| <= q^2}, a convex set
    let c = -a2 / (a3 * 3.0);
    let rho = q * q / (3.0 * a3.norm());
    let dc = c.norm();
    if dc > 1.0 + rho {
        return false;
    }
    let in_k = |z: C64| z.norm() <= 1.0 + 1e-12 && (z - c).norm() <= rho * (1.0 + 1e-12);
    let disc = (a2 * a2 - a1 * a3 * 3.0).sqrt();
    for s in [1.0, -1.0] {
        let root = (-a2 + disc * s) / (a3 * 3.0);
        if in_k(root) {
            return true;
        }
    }
    // no zero of P' in K: the minimum of |P'| sits on the boundary
    let f = |z: C64| p.d1(z).norm();
    let phase = if dc > 0.0 { c.arg() } else { 0.0 };
    let mut arcs: Vec<(C64, f64, f64, f64)> = Vec::new();
    if dc == 0.0 {
        if rho >= 1.0 {
            arcs.push((zero, 1.0, 0.0, TAU));
        } else {
            arcs.push((c, rho, 0.0, TAU));
        }
    } else {
        let kappa = (1.0 + dc * dc - rho * rho) / (2.0 * dc);
        if kappa <= -1.0 {
            arcs.push((zero, 1.0, 0.0, TAU));
        } else if kappa <= 1.0 {
            let t = kappa.acos();
            arcs.push((zero, 1.0, phase - t, phase + t));
        }
        let lam = (1.0 - dc * dc - rho * rho) / (2.0 * rho * dc);
        if lam >= 1.0 {
            arcs.push((c, rho, 0.0, TAU));
        } else if lam >= -1.0 {
            let t = lam.acos();
            arcs.push((c, rho, phase + t, phase + TAU - t));
        }
    }
    for (center, radius, t0, t1) in arcs {
        let at = |t: f64| f(center + C64::from_polar(radius, t));
        let closed = t1 - t0 >= TAU;
        let h = (t1 - t0) / ARC_SAMPLES as f64;
        let vals: Vec<f64> = (0..=ARC_SAMPLES).map(|i| at(t0 + h * i as f64)).collect();
        if vals.iter().any(|v| *v <= q) {
            return true;
        }
        // refine around every sampled local minimum; a closed circle wraps around
        let last = if closed { ARC_SAMPLES - 1 } else { ARC_SAMPLES };
        for i in 0..=last {
            let prev = match i {
                0 if closed => vals[ARC_SAMPLES - 1],
                0 => f64::INFINITY,
                _ => vals[i - 1],
            };
            let next = if i == ARC_SAMPLES { f64::INFINITY } else { vals[i + 1] };
            if vals[i] > prev || vals[i] > next {
                continue;
            }
            let ti = t0 + h * i as f64;
            let (lo, hi) = if closed { (ti - h, ti + h) } else { ((ti - h).max(t0), (ti + h).min(t1)) };
            if golden_min(&at, lo, hi, q) <= q {
                return true;
            }
        }
    }
    false
}

/// Golden-section minimum of `f` on `[lo, hi]`, stopping early once it drops to `q`.
fn golden_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, q: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1.min(f2) <= q || hi - lo < 1e-13 * PI {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// `H` itself, by bisection on [`h_at_most`].
pub fn h_exact(p: &Cubic) -> f64 {
    let mut hi = p.g(C64::new(0.0, 0.0));
    if hi == 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if h_at_most(p, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpoly::{CPoly1, CPolyN};
    use crate::functionals::{h_inf, RegionSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cubic(a: [(f64, f64); 4]) -> Cubic {
        Cubic(a.map(|(x, y)| C64::new(x, y)))
    }

    #[test]
    fn quadratic_closed_form() {
        let p = cubic([(0.0, 0.0), (5.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        // max(1, 5 - 2)
        assert!((h_exact(&p) - 3.0).abs() < 1e-12);
        let p = cubic([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!((h_exact(&p) - 1.0).abs() < 1e-12);
        let p = cubic([(0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!((h_exact(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubics_match_grid_infimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for i in 0..40 {
            let s: f64 = [1.0, 4.0, 30.0][i % 3];
            let mut a = [C64::new(0.0, 0.0); 4];
            for (k, x) in a.iter_mut().enumerate().skip(1) {
                *x = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * s.powi(k as i32);
            }
            let p = Cubic(a);
            let exact = h_exact(&p);
            let poly = CPolyN::from_poly1(&CPoly1::new(a.to_vec()).unwrap());
            let grid = h_inf(&poly, &RegionSpec::disc(C64::new(0.0, 0.0), 1.0), 64, 300).unwrap();
            // the grid value is an upper estimate; the exact value sits inside its bracket
            assert!(exact <= grid.value * (1.0 + 1e-9), "{exact} {grid:?}");
            assert!(exact >= grid.lower * (1.0 - 1e-9), "{exact} {grid:?}");
            assert!(grid.value - exact <= 1e-3 * exact.max(1.0), "{exact} {}", grid.value);
        }
    }

    #[test]
    fn minimum_across_the_seam_of_a_closed_circle() {
        // the constraint disc lies inside the unit disc and |P'| is smallest on its
        // boundary just below angle 2π
        let s = 19.835119391933535;
        let a = [(0.8839689719067303, -0.1463331394822119), (-0.8625533203960299, -0.47952595460114583), (-0.24094391183028985, -0.0911192060779595)];
        let mut c = [C64::new(0.0, 0.0); 4];
        for (k, (x, y)) in a.iter().enumerate() {
            c[k + 1] = C64::new(*x, *y) * f64::powi(s, k as i32 + 1);
        }
        let p = Cubic(c);
        let h = h_exact(&p);
        for k in 1..200 {
            assert!(h_at_most(&p, h * (1.0 + 1e-9 * k as f64)), "{k}");
        }
        let centre = -c[2] / (c[3] * 3.0);
        let rho = h * h / (3.0 * c[3].norm());
        let dense = (0..200_000)
            .map(|i| p.d1(centre + C64::from_polar(rho, TAU * i as f64 / 200_000.0)).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(dense >= h * (1.0 - 1e-9), "{dense} {h}");
    }

    #[test]
    fn degree_cap() {
        let a = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        assert!(matches!(Cubic::from_slice(&a), Err(Error::DegreeCap { .. })));
        assert!(Cubic::from_slice(&a[..3]).is_ok());
    }
}
