use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

/// Default degree cap for univariate polynomials.
pub const DEGREE_CAP: usize = 20;

/// Univariate complex polynomial, little-endian coefficients, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct CPoly1 {
    coeffs: Vec<C64>,
}

impl TryFrom<Vec<C64>> for CPoly1 {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        CPoly1::new(v)
    }
}

impl From<CPoly1> for Vec<C64> {
    fn from(p: CPoly1) -> Self {
        p.coeffs
    }
}

fn trim(mut v: Vec<C64>) -> Vec<C64> {
    while v.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
        v.pop();
    }
    v
}

impl CPoly1 {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        Self::with_cap(coeffs, DEGREE_CAP)
    }

    pub fn with_cap(coeffs: Vec<C64>, cap: usize) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let coeffs = trim(coeffs);
        if coeffs.len() > cap + 1 {
            return Err(Error::DegreeCap {
                degree: coeffs.len() - 1,
                cap,
            });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `c z^k`.
    pub fn monomial(c: C64, k: usize) -> Result<Self> {
        let mut v = vec![C64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Result<Self> {
        let mut v = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); v.len() + 1];
            for (j, &c) in v.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * r;
            }
            v = next;
        }
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, j: usize) -> C64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Taylor coefficients `p^{(j)}(z)/j!` for `j = 0..=degree`, by repeated synthetic division.
    pub fn taylor_at(&self, z: C64) -> Vec<C64> {
        let mut b = self.coeffs.clone();
        let n = b.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let t = b[j + 1] * z;
                b[j] += t;
            }
        }
        b
    }

    /// `p^{(j)}(z)` for `j = 0..=degree`.
    pub fn derivs_at(&self, z: C64) -> Vec<C64> {
        let mut t = self.taylor_at(z);
        let mut f = 1.0;
        for (j, v) in t.iter_mut().enumerate() {
            if j > 0 {
                f *= j as f64;
            }
            *v *= f;
        }
        t
    }

    /// k-th derivative evaluated at z.
    pub fn eval_deriv(&self, k: usize, z: C64) -> C64 {
        if k > self.degree() || self.is_zero() {
            return C64::new(0.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for j in (k..self.coeffs.len()).rev() {
            acc = acc * z + self.coeffs[j] * falling(j, k);
        }
        acc
    }

    pub fn deriv(&self, k: usize) -> Self {
        if k >= self.coeffs.len() {
            return Self::zero();
        }
        let coeffs = (k..self.coeffs.len())
            .map(|j| self.coeffs[j] * falling(j, k))
            .collect();
        Self {
            coeffs: trim(coeffs),
        }
    }

    /// `q(w) = p(w + c)`.
    pub fn taylor_shift(&self, c: C64) -> Self {
        Self {
            coeffs: trim(self.taylor_at(c)),
        }
    }

    /// `q(w) = p(a w)`.
    pub fn rescale_arg(&self, a: C64) -> Self {
        let mut pow = C64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * pow);
            pow *= a;
        }
        Self { coeffs: trim(out) }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: trim(self.coeffs.iter().map(|&c| c * s).collect()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: trim((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect()),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn add_const(&self, c: C64) -> Self {
        let mut v = self.coeffs.clone();
        if v.is_empty() {
            v.push(C64::new(0.0, 0.0));
        }
        v[0] += c;
        Self { coeffs: trim(v) }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut v = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    /// `max_j |c_j|`.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c_j| r^j`, an upper bound for `max_{|z| ≤ r} |p|`.
    pub fn abs_sum(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }
}

/// `j (j-1) ... (j-k+1)` as f64.
pub(crate) fn falling(j: usize, k: usize) -> f64 {
    ((j + 1 - k)..=j).fold(1.0, |acc, x| acc * x as f64)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, x| acc * x as f64)
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn deriv_examples() {
        let p = CPoly1::monomial(c(1.0, 0.0), 3).unwrap();
        assert_eq!(p.deriv(2).coeffs(), &[c(0.0, 0.0), c(6.0, 0.0)]);
        let q = CPoly1::from_real(&[0.0, 2.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(q.deriv(6).is_zero());
        assert_eq!(q.deriv(0), q);
    }

    #[test]
    fn shift_examples() {
        let p = CPoly1::monomial(c(1.0, 0.0), 2).unwrap();
        assert_eq!(
            p.taylor_shift(c(1.0, 0.0)).coeffs(),
            &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]
        );
        let z = CPoly1::monomial(c(1.0, 0.0), 1).unwrap();
        assert_eq!(z.taylor_shift(c(0.0, 1.0)).coeffs(), &[c(0.0, 1.0), c(1.0, 0.0)]);
    }

    #[test]
    fn derivs_match_eval_deriv() {
        let p = CPoly1::new(vec![c(1.0, -2.0), c(0.5, 0.5), c(-3.0, 0.0), c(0.0, 2.0), c(1.0, 1.0)])
            .unwrap();
        let z = c(0.3, -0.8);
        let d = p.derivs_at(z);
        for k in 0..=5 {
            let direct = p.eval_deriv(k, z);
            let via = d.get(k).copied().unwrap_or_default();
            assert!((direct - via).norm() < 1e-12 * (1.0 + direct.norm()));
            assert!((p.deriv(k).eval(z) - direct).norm() < 1e-12 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn cap_and_trim() {
        assert!(CPoly1::new(vec![c(1.0, 0.0); 22]).is_err());
        let p = CPoly1::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(p.degree(), 0);
        assert_eq!(CPoly1::new(vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, -4.0)]).unwrap().coeff_norm(), 4.0);
        assert_eq!(CPoly1::zero().coeff_norm(), 0.0);
    }
}
