use serde::{Deserialize, Serialize};

use super::{CPoly1, C64};
use crate::error::{Error, Result};

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub z: C64,
    pub multiplicity: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Distinct roots with multiplicities, using the default iteration cap.
pub fn roots(p: &CPoly1, tol: f64) -> Result<Vec<Root>> {
    roots_with(
        p,
        RootOptions {
            tol,
            ..RootOptions::default()
        },
    )
}

/// Roots repeated according to multiplicity.
pub fn root_multiset(p: &CPoly1, tol: f64) -> Result<Vec<C64>> {
    Ok(roots(p, tol)?
        .into_iter()
        .flat_map(|r| std::iter::repeat(r.z).take(r.multiplicity))
        .collect())
}

pub fn roots_with(p: &CPoly1, opts: RootOptions) -> Result<Vec<Root>> {
    if p.degree() == 0 {
        return Err(Error::DegreeTooLow {
            need: 1,
            got: 0,
        });
    }
    let c = p.coeffs();
    let zero_mult = c.iter().take_while(|x| x.norm() == 0.0).count();
    let reduced = CPoly1::new(c[zero_mult..].to_vec())?;
    let mut raw = if reduced.degree() == 0 {
        Vec::new()
    } else {
        aberth(&reduced, opts.max_iter)?
    };
    for z in raw.iter_mut() {
        *z = polish(&reduced, *z);
    }
    let mut out = cluster(&reduced, &raw, opts.tol);
    if zero_mult > 0 {
        out.push(Root {
            z: C64::new(0.0, 0.0),
            multiplicity: zero_mult,
        });
    }
    out.sort_by(|a, b| {
        (a.z.re, a.z.im)
            .partial_cmp(&(b.z.re, b.z.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Rounding-error bound for evaluating p at z.
fn eval_noise(p: &CPoly1, z: C64) -> f64 {
    8.0 * UNIT_ROUNDOFF * p.abs_sum(z.norm())
}

fn aberth(p: &CPoly1, max_iter: usize) -> Result<Vec<C64>> {
    let n = p.degree();
    let lead = p.leading();
    let center = -p.coeff(n - 1) / (lead * n as f64);
    let t = p.taylor_at(center);
    let radius = (0..n)
        .map(|j| (t[j] / lead).norm().powf(1.0 / (n - j) as f64))
        .fold(0.0, f64::max)
        .max(1e-8);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + C64::from_polar(radius, theta)
        })
        .collect();
    if n == 1 {
        return Ok(vec![-p.coeff(0) / lead]);
    }
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let d = p.taylor_at_first_two(z[i]);
            if d.0.norm() <= eval_noise(p, z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = d.0 / d.1;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += diff.inv();
                    }
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                let bump = 1e-8 * (1.0 + z[i].norm());
                z[i] += C64::new(bump, 0.0);
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * UNIT_ROUNDOFF * z[i].norm().max(1e-300) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence(max_iter))
}

impl CPoly1 {
    /// `(p(z), p'(z))` in one Horner pass.
    pub(crate) fn taylor_at_first_two(&self, z: C64) -> (C64, C64) {
        let mut v = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for &c in self.coeffs().iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    }
}

fn polish(p: &CPoly1, z: C64) -> C64 {
    let mut best = z;
    let mut best_val = p.eval(z).norm();
    let mut cur = z;
    for _ in 0..3 {
        let (v, d) = p.taylor_at_first_two(cur);
        if d.norm() == 0.0 {
            break;
        }
        cur -= v / d;
        let val = p.eval(cur).norm();
        if val < best_val {
            best = cur;
            best_val = val;
        } else {
            break;
        }
    }
    best
}

struct Group {
    members: Vec<usize>,
}

fn centroid(pts: &[C64], members: &[usize]) -> C64 {
    members.iter().map(|&i| pts[i]).sum::<C64>() / members.len() as f64
}

fn group_radius(pts: &[C64], members: &[usize], c: C64) -> f64 {
    members
        .iter()
        .map(|&i| (pts[i] - c).norm())
        .fold(0.0, f64::max)
}

/// Agglomerative clustering in increasing pair distance. A merge is accepted when the
/// merged group fits within `tol^{1/2}` relative to its location (floored at `10^{-3}` of
/// the largest root, so the rule is invariant under `z -> tz`), or when its spread is consistent with a single
/// root of that multiplicity perturbed by evaluation rounding.
fn cluster(p: &CPoly1, pts: &[C64], tol: f64) -> Vec<Root> {
    let n = pts.len();
    let mut label: Vec<usize> = (0..n).collect();
    let mut groups: Vec<Option<Group>> = (0..n).map(|i| Some(Group { members: vec![i] })).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push(((pts[i] - pts[j]).norm(), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let link = tol.sqrt();
    let floor = 1e-3 * pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for (_, i, j) in edges {
        let (a, b) = (label[i], label[j]);
        if a == b {
            continue;
        }
        let mut merged = groups[a].as_ref().map(|g| g.members.clone()).unwrap_or_default();
        merged.extend(groups[b].as_ref().map(|g| g.members.clone()).unwrap_or_default());
        let c = centroid(pts, &merged);
        let rho = group_radius(pts, &merged, c);
        let m = merged.len();
        let accept = rho <= link * c.norm().max(floor) || {
            let t = p.taylor_at(c);
            let tm = t.get(m).copied().unwrap_or_default().norm();
            tm > 0.0 && rho <= 10.0 * (eval_noise(p, c) / tm).powf(1.0 / m as f64)
        };
        if accept {
            for &k in &merged {
                label[k] = a;
            }
            groups[b] = None;
            groups[a] = Some(Group { members: merged });
        }
    }
    groups
        .into_iter()
        .flatten()
        .map(|g| Root {
            z: centroid(pts, &g.members),
            multiplicity: g.members.len(),
        })
        .collect()
}
