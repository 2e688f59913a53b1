//! Single-cell probe of the lower bound behind the integrability threshold, `d = 2`.

use serde::{Deserialize, Serialize};

use crate::cpoly::{CPoly1, C64};
use crate::error::{Error, Result};
use crate::oscint::{integrate, BumpSpec, Phase, QuadSpec};

pub const MAX_PROBE_LEVEL: u32 = 6;

/// `∫ e(w²) dw` truncated by `plateau(R/2, R)` for each radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FresnelConstant {
    pub radii: Vec<f64>,
    pub values: Vec<C64>,
    pub estimate: C64,
    /// Largest distance between consecutive truncations.
    pub spread: f64,
}

pub fn fresnel_constant(radii: &[f64], quad: &QuadSpec) -> Result<FresnelConstant> {
    if radii.len() < 2 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidInput("need at least two positive radii".into()));
    }
    let square: Phase = CPoly1::from_real(&[0.0, 0.0, 1.0])?.into();
    let values = radii
        .iter()
        .map(|&r| integrate(&square, &BumpSpec::plateau(r / 2.0, r), quad).map(|o| o.value))
        .collect::<Result<Vec<_>>>()?;
    let spread = values.windows(2).map(|v| (v[1] - v[0]).norm()).fold(0.0, f64::max);
    Ok(FresnelConstant { radii: radii.to_vec(), estimate: *values.last().expect("nonempty"), values, spread })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityParams {
    pub m: u32,
    /// Cutoff radius in units of `1/Q_m`.
    pub a: f64,
    /// Size of the linear Taylor coefficient in units of `Q_m`.
    pub c1: f64,
    /// `Q_m = base^m`.
    pub base: f64,
}

impl Default for NecessityParams {
    fn default() -> Self {
        NecessityParams { m: 3, a: 3.0, c1: 0.05, base: 4.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityProbe {
    pub params: NecessityParams,
    pub q_m: f64,
    pub z_rs: C64,
    /// Taylor coefficients at `z_rs`: `[y_1, y_2]`.
    pub y: [C64; 2],
    /// Piece localized near `z_rs`.
    pub ii1: C64,
    /// The rest of the integral.
    pub ii2: C64,
    /// `|II¹| Q_m²`, the quantity bounded below.
    pub ii1_scaled: f64,
    pub ii2_scaled: f64,
    pub main_ok: bool,
}

/// Phase `y_2 u² + y_1 u` in the local variable `u = z - z_rs`; the localized piece uses
/// `plateau(a/Q, 2a/Q)`, the full integral the unit bump `plateau(1/2, 1)` at the origin.
pub fn necessity_probe(params: &NecessityParams, quad: &QuadSpec) -> Result<NecessityProbe> {
    let NecessityParams { m, a, c1, base } = *params;
    if m == 0 || m > MAX_PROBE_LEVEL {
        return Err(Error::InvalidInput(format!("level m must be in 1..={MAX_PROBE_LEVEL}")));
    }
    if !(a > 0.0 && c1 >= 0.0 && base > 1.0) {
        return Err(Error::InvalidInput("need a > 0, c1 >= 0, base > 1".into()));
    }
    let q = base.powi(m as i32);
    let unit = C64::new(1.0, 1.0);
    let z_rs = unit * 0.25 + unit / q;
    if 2.0 * a / q + z_rs.norm() > 0.5 {
        return Err(Error::Precondition(format!(
            "cutoff disc of radius {} around z_rs leaves the half disc",
            2.0 * a / q
        )));
    }
    let y = [C64::new(c1 * q, 0.0), unit * (2.5 * q * q)];
    let phase: Phase = CPoly1::new(vec![C64::new(0.0, 0.0), y[0], y[1]])?.into();
    let local = BumpSpec::plateau(a / q, 2.0 * a / q);
    let full = BumpSpec { center: vec![-z_rs], ..BumpSpec::plateau(0.5, 1.0) };
    let ii1 = integrate(&phase, &local, quad)?.value;
    let ii2 = integrate(&phase, &full, quad)?.value - ii1;
    Ok(NecessityProbe {
        params: *params,
        q_m: q,
        z_rs,
        y,
        ii1,
        ii2,
        ii1_scaled: ii1.norm() * q * q,
        ii2_scaled: ii2.norm() * q * q,
        main_ok: ii1.norm() > 2.0 * ii2.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresnel_constant_is_stable() {
        let c = fresnel_constant(&[4.0, 8.0, 12.0], &QuadSpec::default()).unwrap();
        // Re w² + Im w² is a quadratic form of determinant -2: |∫ e(w²)| = 1/√8
        let exact = C64::new(1.0 / 8f64.sqrt(), 0.0);
        assert!((c.estimate - exact).norm() < 1e-3, "{c:?}");
        assert!(c.spread < 1e-3, "{c:?}");
    }

    #[test]
    fn default_probe_has_dominant_main_term() {
        let p = necessity_probe(&NecessityParams::default(), &QuadSpec::default()).unwrap();
        assert!(p.main_ok, "{p:?}");
        // stationary phase at the critical point: |II¹| ≈ |c_2| / |y_2|
        let predicted = 1.0 / 8f64.sqrt() / p.y[1].norm();
        assert!((p.ii1.norm() / predicted - 1.0).abs() < 0.05, "{p:?}");
    }

    #[test]
    fn large_linear_term_moves_the_critical_point_out() {
        let p = NecessityParams { c1: 60.0, ..Default::default() };
        let p = necessity_probe(&p, &QuadSpec::default()).unwrap();
        assert!(!p.main_ok, "{p:?}");
    }

    #[test]
    fn preconditions() {
        let bad = NecessityParams { m: 7, ..Default::default() };
        assert!(necessity_probe(&bad, &QuadSpec::default()).is_err());
        let wide = NecessityParams { m: 1, a: 1.0, ..Default::default() };
        assert!(matches!(necessity_probe(&wide, &QuadSpec::default()), Err(Error::Precondition(_))));
    }
}
