//! Truncated multivariate Taylor series for exact derivatives of the bumps.

use std::sync::Arc;

/// Monomials of total degree `<= order` in `vars` variables and their product table.
#[derive(Debug)]
pub struct JetSpace {
    pub vars: usize,
    pub order: usize,
    exps: Vec<Vec<u8>>,
    /// `(i, j, k)` with `exps[i] + exps[j] = exps[k]`.
    products: Vec<(usize, usize, usize)>,
}

impl JetSpace {
    pub fn new(vars: usize, order: usize) -> Arc<Self> {
        let mut exps: Vec<Vec<u8>> = vec![vec![0; vars]];
        for deg in 1..=order {
            let mut next = Vec::new();
            rec(vars, deg, 0, &mut vec![0; vars], &mut next);
            exps.extend(next);
        }
        let degree: Vec<usize> = exps.iter().map(|e| e.iter().map(|&x| x as usize).sum()).collect();
        let lookup: std::collections::HashMap<&[u8], usize> =
            exps.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
        let index = |e: &[u8]| lookup.get(e).copied();
        let mut products = Vec::new();
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                if degree[i] + degree[j] <= order {
                    let s: Vec<u8> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                    products.push((i, j, index(&s).expect("closed under addition")));
                }
            }
        }
        Arc::new(JetSpace { vars, order, exps, products })
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        self.exps.iter().position(|x| x.as_slice() == e)
    }
}

fn rec(vars: usize, left: usize, i: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if i == vars - 1 {
        cur[i] = left as u8;
        out.push(cur.clone());
        return;
    }
    for a in (0..=left).rev() {
        cur[i] = a as u8;
        rec(vars, left - a, i + 1, cur, out);
    }
}

/// `Σ c_β x^β`; coefficient `β` equals `∂^β g / β!` at the base point.
#[derive(Clone, Debug)]
pub struct Jet {
    space: Arc<JetSpace>,
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, c: f64) -> Self {
        let mut coeffs = vec![0.0; space.len()];
        coeffs[0] = c;
        Jet { space: space.clone(), coeffs }
    }

    /// The coordinate `x_i` based at `value`.
    pub fn variable(space: &Arc<JetSpace>, i: usize, value: f64) -> Self {
        let mut j = Self::constant(space, value);
        if space.order >= 1 {
            let mut e = vec![0u8; space.vars];
            e[i] = 1;
            j.coeffs[space.index_of(&e).expect("linear monomial")] = 1.0;
        }
        j
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `∂^β` at the base point.
    pub fn derivative(&self, beta: &[u8]) -> Option<f64> {
        let i = self.space.index_of(beta)?;
        let fact: f64 = beta.iter().map(|&b| (1..=b as u64).product::<u64>() as f64).product();
        Some(self.coeffs[i] * fact)
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Jet { space: self.space.clone(), coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet { space: self.space.clone(), coeffs: self.coeffs.iter().map(|a| a * s).collect() }
    }

    pub fn offset(&self, c: f64) -> Self {
        let mut j = self.clone();
        j.coeffs[0] += c;
        j
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &self.space.products {
            coeffs[k] += self.coeffs[i] * o.coeffs[j];
        }
        Jet { space: self.space.clone(), coeffs }
    }

    /// `g(self)` from the Taylor coefficients `g^{(j)}(a)/j!` at `a = self.value()`.
    fn compose(&self, taylor: &[f64]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let n = self.space.order;
        let mut out = Jet::constant(&self.space, taylor[n]);
        for j in (0..n).rev() {
            out = out.mul(&delta).offset(taylor[j]);
        }
        out
    }

    pub fn exp(&self) -> Self {
        let a = self.value().exp();
        let mut t = vec![a; self.space.order + 1];
        let mut fact = 1.0;
        for (j, v) in t.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            *v = a / fact;
        }
        self.compose(&t)
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let t: Vec<f64> = (0..=self.space.order)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } / a.powi(j as i32 + 1))
            .collect();
        self.compose(&t)
    }

    pub fn sqrt(&self) -> Self {
        let a = self.value();
        let mut t = Vec::with_capacity(self.space.order + 1);
        // binom(1/2, j) a^{1/2 - j}
        let mut b = 1.0;
        for j in 0..=self.space.order {
            if j > 0 {
                b *= (0.5 - (j - 1) as f64) / j as f64;
            }
            t.push(b * a.powf(0.5 - j as f64));
        }
        self.compose(&t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_sizes() {
        assert_eq!(JetSpace::new(2, 8).len(), 45);
        assert_eq!(JetSpace::new(4, 8).len(), 495);
    }

    #[test]
    fn exp_of_product() {
        // exp(xy) at (1, 2): d/dx = y e^{xy}, d2/dxdy = (1 + xy) e^{xy}
        let s = JetSpace::new(2, 4);
        let x = Jet::variable(&s, 0, 1.0);
        let y = Jet::variable(&s, 1, 2.0);
        let g = x.mul(&y).exp();
        let e2 = 2f64.exp();
        assert!((g.derivative(&[1, 0]).unwrap() - 2.0 * e2).abs() < 1e-12);
        assert!((g.derivative(&[1, 1]).unwrap() - 3.0 * e2).abs() < 1e-12);
        let r = x.recip();
        assert!((r.derivative(&[3, 0]).unwrap() + 6.0).abs() < 1e-12);
        let q = y.sqrt();
        assert!((q.derivative(&[0, 2]).unwrap() + 0.25 * 2f64.powf(-1.5)).abs() < 1e-12);
    }
}
