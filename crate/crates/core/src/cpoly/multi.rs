use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly1::{binom, factorial};
use super::{CPoly1, C64};
use crate::error::{Error, Result};

/// Multi-index `α = (α₁,…,αₙ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize, k: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = k;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α!` as u64; exact for `|α| ≤ 20`.
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&a| (1..=a as u64).product::<u64>())
            .product()
    }

    pub fn add(&self, other: &Self) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if componentwise non-negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// All multi-indices in `n` variables with `|α| = k`, lexicographically descending in α₁.
    pub fn all_of_order(n: usize, k: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if i == n - 1 {
                cur[i] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for a in (0..=left).rev() {
                cur[i] = a;
                rec(i + 1, left - a, cur, out);
            }
        }
        if n > 0 {
            rec(0, k, &mut cur, &mut out);
        }
        out
    }

    /// `z^α`.
    pub fn monomial(&self, z: &[C64]) -> C64 {
        self.0
            .iter()
            .zip(z)
            .fold(C64::new(1.0, 0.0), |acc, (&a, &zi)| acc * zi.powu(a))
    }
}

/// Multivariate complex polynomial as a sparse map from exponents to coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CPolyN {
    nvars: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

impl CPolyN {
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, C64)>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::InvalidInput("nvars must be >= 1".into()));
        }
        let mut map: BTreeMap<MultiIndex, C64> = BTreeMap::new();
        for (a, c) in terms {
            if a.len() != nvars {
                return Err(Error::InvalidInput(format!(
                    "multi-index of length {} in a polynomial of {} variables",
                    a.len(),
                    nvars
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
            *map.entry(a).or_default() += c;
        }
        map.retain(|_, c| *c != C64::new(0.0, 0.0));
        Ok(Self { nvars, terms: map })
    }

    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, C64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.order()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        self.terms.iter().map(|(a, &c)| c * a.monomial(z)).sum()
    }

    pub fn deriv(&self, alpha: &MultiIndex) -> Self {
        let terms = self.terms.iter().filter_map(|(b, &c)| {
            let rest = b.checked_sub(alpha)?;
            let f: f64 = b
                .0
                .iter()
                .zip(&alpha.0)
                .map(|(&bi, &ai)| ((bi - ai + 1)..=bi).fold(1.0, |acc, x| acc * x as f64))
                .product();
            Some((rest, c * f))
        });
        Self::new(self.nvars, terms.collect::<Vec<_>>()).unwrap_or_else(|_| Self::zero(self.nvars))
    }

    /// `∂^α f(z)/α!` for one α.
    pub fn scaled_deriv_at(&self, alpha: &MultiIndex, z: &[C64]) -> C64 {
        self.terms
            .iter()
            .filter_map(|(b, &c)| {
                let rest = b.checked_sub(alpha)?;
                let w: f64 = b
                    .0
                    .iter()
                    .zip(&alpha.0)
                    .map(|(&bi, &ai)| binom(bi as usize, ai as usize))
                    .product();
                Some(c * w * rest.monomial(z))
            })
            .sum()
    }

    /// `∂^α f(z)` for one α.
    pub fn deriv_at(&self, alpha: &MultiIndex, z: &[C64]) -> C64 {
        self.scaled_deriv_at(alpha, z) * alpha.factorial() as f64
    }

    /// All Taylor coefficients `T_α = ∂^α f(z)/α!` at `z` for `α` up to the degree, keyed by α.
    pub fn taylor_at(&self, z: &[C64]) -> BTreeMap<MultiIndex, C64> {
        let mut out: BTreeMap<MultiIndex, C64> = BTreeMap::new();
        for (b, &c) in &self.terms {
            for alpha in sub_indices(b) {
                let rest = b.checked_sub(&alpha).expect("sub-index");
                let w: f64 = b
                    .0
                    .iter()
                    .zip(&alpha.0)
                    .map(|(&bi, &ai)| binom(bi as usize, ai as usize))
                    .product();
                *out.entry(alpha).or_default() += c * w * rest.monomial(z);
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.nvars, self.terms.iter().map(|(a, &c)| (a.clone(), c * s)))
            .unwrap_or_else(|_| Self::zero(self.nvars))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::InvalidInput("variable count mismatch".into()));
        }
        Self::new(
            self.nvars,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(a, &c)| (a.clone(), c)),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::InvalidInput("variable count mismatch".into()));
        }
        let mut v = Vec::new();
        for (a, &c) in &self.terms {
            for (b, &d) in &other.terms {
                v.push((a.add(b), c * d));
            }
        }
        Self::new(self.nvars, v)
    }

    pub fn from_poly1(p: &CPoly1) -> Self {
        Self::new(
            1,
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(j, &c)| (MultiIndex(vec![j as u32]), c)),
        )
        .expect("univariate conversion")
    }

    pub fn to_poly1(&self) -> Result<CPoly1> {
        if self.nvars != 1 {
            return Err(Error::InvalidInput("not univariate".into()));
        }
        let d = self.degree() as usize;
        let mut v = vec![C64::new(0.0, 0.0); d + 1];
        for (a, &c) in &self.terms {
            v[a.0[0] as usize] = c;
        }
        CPoly1::new(v)
    }

    /// `f(R z)` coefficientwise.
    pub fn rescale_arg(&self, r: f64) -> Self {
        Self::new(
            self.nvars,
            self.terms
                .iter()
                .map(|(a, &c)| (a.clone(), c * r.powi(a.order() as i32))),
        )
        .unwrap_or_else(|_| Self::zero(self.nvars))
    }

    /// Sum of coefficient moduli times `r^{|α|}`: bound for `|f|` on the polydisc of radius r.
    pub fn abs_sum(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c.norm() * r.powi(a.order() as i32))
            .sum()
    }
}

/// All `α ≤ b` componentwise.
fn sub_indices(b: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex(Vec::with_capacity(b.len()))];
    for &bi in &b.0 {
        let mut next = Vec::with_capacity(out.len() * (bi as usize + 1));
        for prefix in &out {
            for a in 0..=bi {
                let mut p = prefix.clone();
                p.0.push(a);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `α!` as f64 (for orders beyond the u64 range).
pub fn multi_factorial(alpha: &MultiIndex) -> f64 {
    alpha.0.iter().map(|&a| factorial(a as usize)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deriv_mixed() {
        let p = CPolyN::new(2, [(MultiIndex(vec![1, 2]), C64::new(1.0, 0.0))]).unwrap();
        let d = p.deriv(&MultiIndex(vec![1, 1]));
        let expect = CPolyN::new(2, [(MultiIndex(vec![0, 1]), C64::new(2.0, 0.0))]).unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn taylor_matches_deriv() {
        let p = CPolyN::new(
            2,
            [
                (MultiIndex(vec![2, 1]), C64::new(1.0, 2.0)),
                (MultiIndex(vec![0, 3]), C64::new(-0.5, 0.0)),
                (MultiIndex(vec![1, 0]), C64::new(3.0, 0.0)),
            ],
        )
        .unwrap();
        let z = [C64::new(0.2, -0.4), C64::new(-0.7, 0.1)];
        for (a, t) in p.taylor_at(&z) {
            let direct = p.deriv(&a).eval(&z) / a.factorial() as f64;
            assert!((t - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn orders_enumerated() {
        assert_eq!(MultiIndex::all_of_order(2, 3).len(), 4);
        assert_eq!(MultiIndex::all_of_order(3, 3).len(), 10);
        assert_eq!(MultiIndex(vec![3, 2]).factorial(), 12);
    }
}
