use std::f64::consts::TAU;

use super::{AnalyticFn, C64};
use crate::error::{Error, Result};

/// Largest node count tried before giving up.
pub const MAX_QUADPTS: usize = 1 << 18;

/// Winding number of `f` around the circle, by the trapezoidal rule on `f'/f`.
/// Doubles the node count while the raw value is more than 0.1 from an integer.
pub fn count_zeros_argument_principle(
    f: &AnalyticFn,
    center: C64,
    radius: f64,
    quadpts: usize,
) -> Result<usize> {
    if quadpts < 256 {
        return Err(Error::InvalidInput("quadpts must be >= 256".into()));
    }
    if radius <= 0.0 {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let mut n = quadpts;
    loop {
        let raw = winding(f, center, radius, n)?;
        let rounded = raw.round();
        if (raw - rounded).abs() <= 0.1 && rounded >= 0.0 {
            return Ok(rounded as usize);
        }
        if n >= MAX_QUADPTS {
            return Err(Error::Inconclusive(raw));
        }
        n *= 2;
    }
}

fn winding(f: &AnalyticFn, center: C64, radius: f64, n: usize) -> Result<f64> {
    let mut acc = C64::new(0.0, 0.0);
    let mut closest = f64::INFINITY;
    for j in 0..n {
        let w = C64::from_polar(radius, TAU * j as f64 / n as f64);
        let z = center + w;
        let v = f.eval(0, z);
        let d = f.eval(1, z);
        // Newton distance |f/f'| estimates how far the nearest zero is from the node.
        let dist = if v.norm() == 0.0 { 0.0 } else { (v / d).norm() };
        closest = closest.min(dist);
        acc += d / v * w;
    }
    if !(closest > 1e-12 * radius) || !acc.re.is_finite() {
        return Err(Error::ZeroOnContour(closest));
    }
    Ok(acc.re / n as f64)
}
