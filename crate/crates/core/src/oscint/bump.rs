use serde::{Deserialize, Serialize};

use super::jet::{Jet, JetSpace};
use crate::cpoly::{MultiIndex, C64};
use crate::error::{Error, Result};

/// Highest derivative order available from [`bump_eval`].
pub const MAX_BUMP_ORDER: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BumpKind {
    /// `exp(-1/(1 - |z-c|^2/R^2))` inside the outer ball.
    Mollifier,
    /// 1 on the inner ball, 0 outside the outer ball, smooth step between.
    Plateau,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub kind: BumpKind,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub center: Vec<C64>,
}

/// `exp(-1/t)` for `t > 0`.
fn h(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step, 0 at `t <= 0` and 1 at `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = h(t);
        a / (a + h(1.0 - t))
    }
}

impl BumpSpec {
    pub fn plateau(inner: f64, outer: f64) -> Self {
        BumpSpec {
            kind: BumpKind::Plateau,
            inner_radius: inner,
            outer_radius: outer,
            center: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn plateau_n(inner: f64, outer: f64, n: usize) -> Self {
        BumpSpec {
            center: vec![C64::new(0.0, 0.0); n],
            ..Self::plateau(inner, outer)
        }
    }

    pub fn mollifier(radius: f64) -> Self {
        BumpSpec {
            kind: BumpKind::Mollifier,
            inner_radius: 0.0,
            outer_radius: radius,
            center: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn nvars(&self) -> usize {
        self.center.len()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            BumpKind::Plateau => self.inner_radius > 0.0 && self.outer_radius > self.inner_radius,
            BumpKind::Mollifier => self.outer_radius > 0.0,
        };
        if !ok || !self.outer_radius.is_finite() || self.center.is_empty() {
            return Err(Error::InvalidInput("bump radii must satisfy 0 < inner < outer".into()));
        }
        Ok(())
    }

    /// `φ(R^{-1} ·)`-style dilation about the center.
    pub fn dilate(&self, factor: f64) -> Self {
        BumpSpec {
            inner_radius: self.inner_radius * factor,
            outer_radius: self.outer_radius * factor,
            ..self.clone()
        }
    }

    /// Radial profile at distance `r` from the center.
    pub fn profile(&self, r: f64) -> f64 {
        match self.kind {
            BumpKind::Plateau => {
                smooth_step((self.outer_radius - r) / (self.outer_radius - self.inner_radius))
            }
            BumpKind::Mollifier => {
                let s = r / self.outer_radius;
                if s >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - s * s)).exp()
                }
            }
        }
    }

    pub fn value(&self, z: &[C64]) -> f64 {
        let r2: f64 = z.iter().zip(&self.center).map(|(a, b)| (a - b).norm_sqr()).sum();
        self.profile(r2.sqrt())
    }

    /// Jet of the bump at `z` in the real coordinates `(x_1, y_1, x_2, y_2, ...)`.
    fn jet(&self, z: &[C64], order: usize) -> Jet {
        let n = self.nvars();
        let space = JetSpace::new(2 * n, order);
        let mut r2 = Jet::constant(&space, 0.0);
        for (v, (zi, ci)) in z.iter().zip(&self.center).enumerate() {
            let d = zi - ci;
            let x = Jet::variable(&space, 2 * v, d.re);
            let y = Jet::variable(&space, 2 * v + 1, d.im);
            r2 = r2.add(&x.mul(&x)).add(&y.mul(&y));
        }
        let r = r2.value().sqrt();
        match self.kind {
            BumpKind::Plateau => {
                if r <= self.inner_radius {
                    return Jet::constant(&space, 1.0);
                }
                if r >= self.outer_radius {
                    return Jet::constant(&space, 0.0);
                }
                let w = self.outer_radius - self.inner_radius;
                let t = r2.sqrt().scale(-1.0 / w).offset(self.outer_radius / w);
                let step_part = |t: &Jet| -> Jet {
                    // exp(-1/t) underflows for t < 1/745, as do all its derivatives
                    if t.value() * 745.0 < 1.0 {
                        Jet::constant(&space, 0.0)
                    } else {
                        t.recip().scale(-1.0).exp()
                    }
                };
                let a = step_part(&t);
                let b = step_part(&t.scale(-1.0).offset(1.0));
                a.mul(&a.add(&b).recip())
            }
            BumpKind::Mollifier => {
                let s = r / self.outer_radius;
                if s >= 1.0 || (1.0 - s * s) * 745.0 < 1.0 {
                    return Jet::constant(&space, 0.0);
                }
                let q = r2.scale(-1.0 / (self.outer_radius * self.outer_radius)).offset(1.0);
                q.recip().scale(-1.0).exp()
            }
        }
    }
}

/// `∂^β φ(z)` for a real multi-index `β` over `(x_1, y_1, ..., x_n, y_n)`.
pub fn bump_eval(spec: &BumpSpec, z: &[C64], order: &MultiIndex) -> Result<f64> {
    spec.validate()?;
    let n = spec.nvars();
    if z.len() != n || order.len() != 2 * n {
        return Err(Error::InvalidInput(format!(
            "bump in {n} complex variables needs a point of length {n} and a real multi-index of length {}",
            2 * n
        )));
    }
    let k = order.order();
    if k > MAX_BUMP_ORDER {
        return Err(Error::OrderTooHigh(k as usize));
    }
    if k == 0 {
        return Ok(spec.value(z));
    }
    let beta: Vec<u8> = order.0.iter().map(|&b| b as u8).collect();
    Ok(spec.jet(z, k as usize).derivative(&beta).expect("multi-index within jet order"))
}

/// Grid estimate of `max_{|β| <= N} sup |∂^β φ|` over the support box (n = 1 only).
pub fn cn_norm(spec: &BumpSpec, order: u32, grid: usize) -> Result<f64> {
    spec.validate()?;
    if order > MAX_BUMP_ORDER {
        return Err(Error::OrderTooHigh(order as usize));
    }
    if spec.nvars() != 1 {
        return Err(Error::DimensionTooHigh(spec.nvars()));
    }
    let r = spec.outer_radius;
    let c = spec.center[0];
    let mut best: f64 = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let x = -r + 2.0 * r * (i as f64 + 0.5) / grid as f64;
            let y = -r + 2.0 * r * (j as f64 + 0.5) / grid as f64;
            if x * x + y * y >= r * r {
                continue;
            }
            let jet = spec.jet(&[c + C64::new(x, y)], order as usize);
            for a in 0..=order {
                for b in 0..=(order - a) {
                    let d = jet.derivative(&[a as u8, b as u8]).expect("in range");
                    best = best.max(d.abs());
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    #[test]
    fn plateau_values() {
        let b = BumpSpec::plateau(0.5, 1.0);
        let z0 = [C64::new(0.0, 0.0)];
        assert_eq!(bump_eval(&b, &z0, &mi(&[0, 0])).unwrap(), 1.0);
        for o in [[0, 0], [1, 0], [2, 3]] {
            assert_eq!(bump_eval(&b, &[C64::new(1.5, 0.0)], &mi(&o)).unwrap(), 0.0);
        }
        let v = bump_eval(&b, &[C64::new(0.6, 0.3)], &mi(&[0, 0])).unwrap();
        assert!(v > 0.0 && v < 1.0);
        assert!(matches!(
            bump_eval(&b, &z0, &mi(&[5, 4])),
            Err(Error::OrderTooHigh(9))
        ));
    }

    #[test]
    fn derivatives_match_differences() {
        let hstep = 1e-5;
        for b in [BumpSpec::plateau(0.5, 1.0), BumpSpec::mollifier(1.0)] {
            let z = C64::from_polar(0.75, 0.4);
            let fd = (b.value(&[z + hstep]) - b.value(&[z - hstep])) / (2.0 * hstep);
            let d = bump_eval(&b, &[z], &mi(&[1, 0])).unwrap();
            assert!((fd - d).abs() < 1e-6, "{fd} {d}");
            let ih = C64::new(0.0, hstep);
            let fdy = (b.value(&[z + ih]) - b.value(&[z - ih])) / (2.0 * hstep);
            let dxy = bump_eval(&b, &[z], &mi(&[1, 1])).unwrap();
            let fdxy = (bump_eval(&b, &[z + ih], &mi(&[1, 0])).unwrap()
                - bump_eval(&b, &[z - ih], &mi(&[1, 0])).unwrap())
                / (2.0 * hstep);
            assert!((fdy - bump_eval(&b, &[z], &mi(&[0, 1])).unwrap()).abs() < 1e-6);
            assert!((fdxy - dxy).abs() < 1e-5);
        }
    }

    #[test]
    fn two_variable_bump() {
        let b = BumpSpec::plateau_n(0.5, 1.0, 2);
        let z = [C64::new(0.4, 0.1), C64::new(0.2, -0.3)];
        let hstep = 1e-5;
        let zp = [z[0], z[1] + C64::new(0.0, hstep)];
        let zm = [z[0], z[1] - C64::new(0.0, hstep)];
        let fd = (b.value(&zp) - b.value(&zm)) / (2.0 * hstep);
        let d = bump_eval(&b, &z, &mi(&[0, 0, 0, 1])).unwrap();
        assert!((fd - d).abs() < 1e-6);
    }

    #[test]
    fn cn_norms_grow_with_order() {
        let b = BumpSpec::plateau(0.5, 1.0);
        let n0 = cn_norm(&b, 0, 40).unwrap();
        let n2 = cn_norm(&b, 2, 40).unwrap();
        assert!((n0 - 1.0).abs() < 1e-12);
        assert!(n2 > n0);
    }
}
