//! Complex polynomials, analytic test functions, root finding and zero counting.

mod analytic;
mod multi;
mod norms;
mod parse;
pub(crate) mod poly1;
mod roots;
mod zeros;

use std::f64::consts::TAU;

pub use analytic::AnalyticFn;
pub use multi::{multi_factorial, CPolyN, MultiIndex};
pub use norms::{coeff_norm, min_modulus_on_disc, triple_norm, triple_norm_detail};
pub use num_complex::Complex64 as C64;
pub use parse::{parse_phase, parse_poly, parse_poly1, parse_poly_json};
pub use poly1::{CPoly1, DEGREE_CAP};
pub use roots::{root_multiset, roots, roots_with, Root, RootOptions};
pub use zeros::{count_zeros_argument_principle, MAX_QUADPTS};

use crate::error::Result;

/// Default root-finder tolerance.
pub const ROOT_TOL: f64 = 1e-12;

/// The character `e(w) = exp(2πi (Re w + Im w))`.
pub fn char_e(w: C64) -> C64 {
    C64::from_polar(1.0, TAU * (w.re + w.im))
}

/// Real phase `Re w + Im w` of the character.
pub fn char_phase(w: C64) -> f64 {
    w.re + w.im
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DerivedZero {
    /// Derivative order.
    pub j: usize,
    pub z: C64,
}

/// Distinct zeros of `p^{(j)}` for `0 ≤ j < deg p`.
pub fn derived_zero_set(p: &CPoly1) -> Result<Vec<DerivedZero>> {
    let d = p.degree();
    if d == 0 {
        return Err(crate::error::Error::DegreeTooLow { need: 1, got: 0 });
    }
    let mut out = Vec::new();
    for j in 0..d {
        for r in roots(&p.deriv(j), ROOT_TOL)? {
            out.push(DerivedZero { j, z: r.z });
        }
    }
    Ok(out)
}

/// Distance to the nearest derived zero, ties broken by `(j, |z|, arg z)`.
pub fn nearest_derived_zero(set: &[DerivedZero], z: C64) -> Option<(DerivedZero, f64)> {
    let key = |d: &DerivedZero| (d.j, d.z.norm(), d.z.arg());
    set.iter()
        .map(|d| (*d, (d.z - z).norm()))
        .min_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    key(&a.0)
                        .partial_cmp(&key(&b.0))
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_e_examples() {
        assert!((char_e(C64::new(0.0, 0.0)) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((char_e(C64::new(0.5, 0.0)) - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((char_e(C64::new(0.25, 0.25)) - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derived_zero_examples() {
        let z2 = CPoly1::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let s = derived_zero_set(&z2).unwrap();
        assert_eq!(s, vec![DerivedZero { j: 0, z: C64::new(0.0, 0.0) }, DerivedZero { j: 1, z: C64::new(0.0, 0.0) }]);

        let p = CPoly1::from_real(&[0.0, -3.0, 0.0, 1.0]).unwrap();
        let s = derived_zero_set(&p).unwrap();
        assert_eq!(s.len(), 6);
        for d in &s {
            assert!(p.deriv(d.j).eval(d.z).norm() < 1e-12);
        }
        let lin = CPoly1::from_real(&[5.0, 1.0]).unwrap();
        let s = derived_zero_set(&lin).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].z - C64::new(-5.0, 0.0)).norm() < 1e-14);
    }
}
