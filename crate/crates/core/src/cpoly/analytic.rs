use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{CPoly1, C64};

/// Analytic function with closed-form derivatives of every order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AnalyticFn {
    Poly(CPoly1),
    /// `(e^{N(z+1)} - 1)/N`.
    ExpCounterexample { n: f64 },
    /// Square of the exponential counterexample.
    ExpSquare { n: f64 },
    /// `2 sin(N z)/N`.
    RealSine { n: f64 },
    /// `order`-th derivative of `inner`.
    Derivative { inner: Box<AnalyticFn>, order: usize },
    /// `inner(z + shift)`.
    Shift { inner: Box<AnalyticFn>, shift: C64 },
}

fn expm1_complex(w: C64) -> C64 {
    let (a, b) = (w.re, w.im);
    let s = (b / 2.0).sin();
    C64::new(a.exp_m1() * b.cos() - 2.0 * s * s, a.exp() * b.sin())
}

impl AnalyticFn {
    pub fn poly(p: CPoly1) -> Self {
        AnalyticFn::Poly(p)
    }

    /// `k`-th derivative at `z`.
    pub fn eval(&self, k: usize, z: C64) -> C64 {
        match self {
            AnalyticFn::Poly(p) => p.eval_deriv(k, z),
            AnalyticFn::ExpCounterexample { n } => {
                let w = (z + 1.0) * *n;
                if k == 0 {
                    expm1_complex(w) / *n
                } else {
                    w.exp() * n.powi(k as i32 - 1)
                }
            }
            AnalyticFn::ExpSquare { n } => {
                let w = (z + 1.0) * *n;
                if k == 0 {
                    let f = expm1_complex(w) / *n;
                    f * f
                } else {
                    let e = w.exp();
                    let kk = k as i32;
                    (e * e * (2.0 * n).powi(kk) - e * 2.0 * n.powi(kk)) / (n * n)
                }
            }
            AnalyticFn::RealSine { n } => {
                (z * *n + FRAC_PI_2 * k as f64).sin() * (2.0 * n.powi(k as i32 - 1))
            }
            AnalyticFn::Derivative { inner, order } => inner.eval(k + order, z),
            AnalyticFn::Shift { inner, shift } => inner.eval(k, z + shift),
        }
    }

    pub fn value(&self, z: C64) -> C64 {
        self.eval(0, z)
    }

    pub fn derivative(&self, order: usize) -> Self {
        match self {
            AnalyticFn::Poly(p) => AnalyticFn::Poly(p.deriv(order)),
            AnalyticFn::Derivative { inner, order: o } => AnalyticFn::Derivative {
                inner: inner.clone(),
                order: o + order,
            },
            _ if order == 0 => self.clone(),
            _ => AnalyticFn::Derivative {
                inner: Box::new(self.clone()),
                order,
            },
        }
    }

    /// `z ↦ self(z + c)`; polynomials are shifted exactly.
    pub fn shifted(&self, c: C64) -> Self {
        match self {
            AnalyticFn::Poly(p) => AnalyticFn::Poly(p.taylor_shift(c)),
            AnalyticFn::Shift { inner, shift } => AnalyticFn::Shift {
                inner: inner.clone(),
                shift: shift + c,
            },
            _ => AnalyticFn::Shift {
                inner: Box::new(self.clone()),
                shift: c,
            },
        }
    }

    pub fn as_poly(&self) -> Option<&CPoly1> {
        match self {
            AnalyticFn::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            AnalyticFn::Poly(p) => format!("poly(deg {})", p.degree()),
            AnalyticFn::ExpCounterexample { n } => format!("exp_counterexample(N={n})"),
            AnalyticFn::ExpSquare { n } => format!("exp_square(N={n})"),
            AnalyticFn::RealSine { n } => format!("real_sine(N={n})"),
            AnalyticFn::Derivative { inner, order } => format!("d^{order} {}", inner.label()),
            AnalyticFn::Shift { inner, shift } => format!("{}(z + {shift})", inner.label()),
        }
    }

    /// Upper bound for `max |f|` on the closed disc of radius `r` about 0.
    pub fn sup_bound(&self, r: f64) -> f64 {
        match self {
            AnalyticFn::Poly(p) => p.abs_sum(r),
            AnalyticFn::ExpCounterexample { n } => ((n * (1.0 + r)).exp() + 1.0) / n,
            AnalyticFn::ExpSquare { n } => (((n * (1.0 + r)).exp() + 1.0) / n).powi(2),
            AnalyticFn::RealSine { n } => 2.0 * (n * r).cosh() / n,
            AnalyticFn::Derivative { inner, order } => {
                // Cauchy estimate from the disc of radius r + 1/2.
                let s = 0.5;
                inner.sup_bound(r + s) * super::poly1::factorial(*order) / s.powi(*order as i32)
            }
            AnalyticFn::Shift { inner, shift } => inner.sup_bound(r + shift.norm()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex_step_check(f: &AnalyticFn, z: C64) {
        // Analytic: f'(z) ≈ (f(z+h) - f(z-h)) / 2h for real h and for imaginary h.
        for k in 0..3 {
            let h = 1e-5;
            let hr = C64::new(h, 0.0);
            let hi = C64::new(0.0, h);
            let fd_r = (f.eval(k, z + hr) - f.eval(k, z - hr)) / (2.0 * h);
            let fd_i = (f.eval(k, z + hi) - f.eval(k, z - hi)) / (hi * 2.0);
            let exact = f.eval(k + 1, z);
            let scale = exact.norm().max(1e-12);
            assert!((fd_r - exact).norm() / scale < 1e-6, "{} k={k}", f.label());
            assert!((fd_i - exact).norm() / scale < 1e-6, "{} k={k}", f.label());
        }
    }

    #[test]
    fn builtin_derivatives_consistent() {
        let z = C64::new(-0.3, 0.4);
        for f in [
            AnalyticFn::ExpCounterexample { n: 5.0 },
            AnalyticFn::ExpSquare { n: 3.0 },
            AnalyticFn::RealSine { n: 4.0 },
            AnalyticFn::Poly(CPoly1::from_real(&[1.0, -2.0, 0.5, 3.0]).unwrap()),
        ] {
            complex_step_check(&f, z);
            complex_step_check(&f.derivative(1), z);
        }
    }

    #[test]
    fn exp_zero_lattice() {
        let f = AnalyticFn::ExpCounterexample { n: 50.0 };
        let z = C64::new(-1.0, 2.0 * std::f64::consts::PI * 3.0 / 50.0);
        assert!(f.value(z).norm() < 1e-14);
        assert_eq!(f.value(C64::new(-1.0, 0.0)), C64::new(0.0, 0.0));
    }
}
