//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run all with `cargo test -p covdc --test acceptance`, or a subset with
//! `cargo test -p covdc --test acceptance -- 2 3`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use covdc::cpoly::{
    count_zeros_argument_principle, derived_zero_set, root_multiset, roots, AnalyticFn, CPoly1, CPolyN, MultiIndex,
    C64, ROOT_TOL,
};
use covdc::functionals::{cd_family_decay, cd_ratio, RegionSpec};
use covdc::hensel::{check_conditions, iterate_with, locate_derivative_zero, CaseConstants, IterateOptions, Thresholds};
use covdc::oscint::{covering_decomposition, decay_fit, log_grid, BumpSpec, QuadSpec};
use covdc::psbound::{ps_vs_h, ps_vs_integral};
use covdc::sublevel::{
    basis_dim, build_power_basis, h_sublevel_equivalence, measure_grid, measure_mc, measure_quadtree,
    slice_measure_nd, Constraint, PlanarDomain, QuadtreeOptions,
};
use covdc::tarry::{dyadic_tail, sublevel_scaling};
use covdc::Error;
use rand::Rng;

struct Outcome {
    pass: bool,
    /// Failure that no implementation can remove; reported but not fatal.
    unattainable: bool,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: String) -> Self {
        Outcome { pass, unattainable: false, detail }
    }
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn c1_decay_exponents() -> Outcome {
    let phi = BumpSpec::plateau(0.5, 1.0);
    let lambdas = log_grid(10.0, 1e4, 10).unwrap();
    let mut ok = true;
    let mut linear_ok = true;
    let mut parts = Vec::new();
    for k in 1..=4usize {
        let p = CPolyN::from_poly1(&CPoly1::monomial(C64::new(1.0, 0.0), k).unwrap());
        let target = -2.0 / k as f64;
        let tol = if k == 3 { 0.07 } else { 0.1 };
        let pass = match decay_fit(&p, &phi, &lambdas, &QuadSpec::default()) {
            Ok(fit) => {
                parts.push(format!("k={k} slope {:.4} (dropped {})", fit.slope, fit.dropped));
                (fit.slope - target).abs() <= tol
            }
            Err(e) => {
                parts.push(format!("k={k} {e}"));
                false
            }
        };
        if k == 1 {
            linear_ok = pass;
        } else {
            ok &= pass;
        }
    }
    if ok && !linear_ok {
        parts.push("k=1: the transform of a smooth bump decays faster than any power".into());
    }
    Outcome { pass: ok && linear_ok, unattainable: ok && !linear_ok, detail: parts.join("; ") }
}

fn c2_tarry_scaling() -> Outcome {
    let grid = [4.0, 8.0, 16.0, 32.0];
    let two = sublevel_scaling(2, &grid, 200_000, 1).unwrap();
    let three = sublevel_scaling(3, &grid, 1_000_000, 1).unwrap();
    Outcome::check(
        (two.fitted_slope - 8.0).abs() <= 0.5 && (three.fitted_slope - 14.0).abs() <= 1.0,
        format!(
            "d=2 slope {:.3} ± {:.3}; d=3 slope {:.3} ± {:.3} (1e6 samples per Q)",
            two.fitted_slope, two.stderr, three.fitted_slope, three.stderr
        ),
    )
}

fn c3_tarry_threshold() -> Outcome {
    let above = dyadic_tail(2, 4.5, 6, 200_000, 2).unwrap();
    let below = dyadic_tail(2, 3.5, 6, 200_000, 2).unwrap();
    Outcome::check(
        above.max_ratio() < 0.9 && below.min_ratio() > 1.1,
        format!(
            "q=4.5 ratios in [{:.3}, {:.3}]; q=3.5 ratios in [{:.3}, {:.3}]",
            above.min_ratio(),
            above.max_ratio(),
            below.min_ratio(),
            below.max_ratio()
        ),
    )
}

fn c4_counterexample() -> Outcome {
    let mut ratios = Vec::new();
    let mut scaled = Vec::new();
    for n in [20.0, 50.0] {
        for eps in [1e-3, 1e-4] {
            let f = AnalyticFn::ExpCounterexample { n };
            let opts = QuadtreeOptions { base: 256, min_cell: eps / 50.0, ..Default::default() };
            let m = measure_quadtree(&f, &[Constraint::sublevel(C64::new(0.0, 0.0), eps)], &PlanarDomain::unit_square(), &opts)
                .unwrap();
            ratios.push(m.value / (n * eps * eps));
            scaled.push(m.value / (eps * eps));
        }
    }
    let growth = [scaled[2] / scaled[0], scaled[3] / scaled[1]];
    let s = spread(&ratios);
    Outcome::check(
        s <= 4.0 && growth.iter().all(|g| *g >= 2.0),
        format!(
            "|S|/(N eps²) = {:.4?}, C/c = {s:.3}; |S|/eps² growth 20→50 = {:.3?}",
            ratios, growth
        ),
    )
}

fn c5_hensel_certificates() -> Outcome {
    let mut r = rng(5);
    let (mut runs, mut violations, mut outside, mut left, mut other) = (0, 0, 0, 0, 0);
    for d in 1..=6 {
        let mut ok = 0;
        while ok < 500 {
            let p = random_poly(&mut r, d);
            let rts = roots(&p, ROOT_TOL).unwrap();
            let root = rts[r.gen_range(0..rts.len())].z;
            if root.norm() > 0.95 {
                continue;
            }
            let offset = 10f64.powf(-r.gen_range(0.5..8.0));
            let z0 = root + C64::from_polar(offset, r.gen::<f64>() * std::f64::consts::TAU);
            if z0.norm() > 1.0 {
                continue;
            }
            let order = r.gen_range(1..=d);
            let phi = AnalyticFn::Poly(p.clone());
            let Ok(cond) = check_conditions(&phi, z0, order, p.abs_sum(1.75), &Thresholds::default()) else {
                continue;
            };
            if !cond.ok {
                continue;
            }
            ok += 1;
            runs += 1;
            match iterate_with(&phi, z0, &IterateOptions::default(), Some(&cond)) {
                Ok(cert) => {
                    violations += usize::from(cert.claims_hold != Some(true));
                    outside += usize::from(!cert.within_bound);
                }
                Err(Error::LeftDomain { .. }) => left += 1,
                Err(_) => other += 1,
            }
        }
    }
    Outcome::check(
        violations + outside + left + other == 0,
        format!("{runs} runs: claim violations {violations}, outside 2|φ/φ'| {outside}, LeftDomain {left}, other errors {other}"),
    )
}

/// Instances `Q(z) = ε P(z/ε^{1/k})` with `|P(w0)| <= 1 <= |P^{(k)}(w0)|`, `z0 = ε^{1/k} w0`:
/// the hypotheses hold at every scale. The same `(P, w0)` draws are reused across `ε`, so
/// the comparison isolates the effect of the scale on the computed distances.
fn c6_locator_scale() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut ok = true;
    let (mut located, mut fallbacks, mut refused, mut loc_worst) = (0, 0, 0, 0.0f64);
    for d in 1..=6usize {
        for k in 1..=d.min(3) {
            let mut maxima = Vec::new();
            for eps in [1e-3f64, 1e-6, 1e-9] {
                let mut r = rng(600 + 10 * d as u64 + k as u64);
                let scale = eps.powf(1.0 / k as f64);
                let mut best: f64 = 0.0;
                let mut count = 0;
                while count < 500 {
                    let mut c: Vec<C64> = (0..d).map(|_| gauss_c(&mut r)).collect();
                    c.push(C64::new(1.0, 0.0));
                    let p = CPoly1::new(c).unwrap();
                    let w0 = C64::from_polar(2.0 * r.gen::<f64>().sqrt(), std::f64::consts::TAU * r.gen::<f64>());
                    if p.eval(w0).norm() > 1.0 || p.eval_deriv(k, w0).norm() < 1.0 {
                        continue;
                    }
                    count += 1;
                    let q = CPoly1::new(
                        p.coeffs().iter().enumerate().map(|(j, a)| a * eps / scale.powi(j as i32)).collect(),
                    )
                    .unwrap();
                    let z0 = w0 * scale;
                    let dist = derived_zero_set(&q)
                        .unwrap()
                        .iter()
                        .filter(|z| z.j < k)
                        .map(|z| (z.z - z0).norm())
                        .fold(f64::INFINITY, f64::min);
                    best = best.max(dist / scale);
                    if count % 10 == 0 {
                        match locate_derivative_zero(&q, z0, k, eps, CaseConstants::default()) {
                            Ok(l) => {
                                located += 1;
                                fallbacks += usize::from(l.fallback);
                                loc_worst = loc_worst.max(l.dist / scale);
                            }
                            Err(_) => refused += 1,
                        }
                    }
                }
                maxima.push(best);
            }
            let s = spread(&maxima);
            worst = worst.max(s);
            ok &= s <= 2.0;
            parts.push(format!("d{d}k{k} {:.3} ({:.3})", maxima[0], s));
        }
    }
    Outcome::check(
        ok,
        format!(
            "worst spread {worst:.4}; max dist/ε^(1/k) (spread): {}; locator on every 10th: {located} located ({fallbacks} fallback, worst {loc_worst:.3}), {refused} refused",
            parts.join(" ")
        ),
    )
}

fn c7_h_equivalence() -> Outcome {
    let mut r = rng(11);
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 1..=6 {
        let (mut plain, mut scaled) = (Vec::new(), Vec::new());
        for i in 0..100 {
            let f = random_poly(&mut r, d);
            plain.push(h_sublevel_equivalence(&f, 1.0, 32, 8, i).unwrap().ratio);
            let g = f.scale(C64::new(1000.0, 0.0));
            scaled.push(h_sublevel_equivalence(&g, 1.0, 32, 8, i).unwrap().ratio);
        }
        let both: Vec<f64> = plain.iter().chain(&scaled).copied().collect();
        let (a, b, c) = (spread(&plain), spread(&scaled), spread(&both));
        ok &= a <= 100.0 && b <= 100.0 && c <= 100.0;
        parts.push(format!("d={d} C/c {a:.2} scaled {b:.2} joint {c:.2}"));
    }
    Outcome::check(ok, parts.join("; "))
}

fn c8_cluster_bound() -> Outcome {
    let phi = BumpSpec::plateau(0.5, 1.0);
    let quad = QuadSpec::default();
    let mut r = rng(8);
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [3usize, 4] {
        let (mut int_max, mut int_max_scaled, mut h_max, mut h_max_scaled) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..100 {
            let f = random_poly(&mut r, d).scale(C64::new(10.0, 0.0));
            let g = f.scale(C64::new(1000.0, 0.0));
            int_max = int_max.max(ps_vs_integral(&f, &phi, &quad).unwrap().ratio);
            int_max_scaled = int_max_scaled.max(ps_vs_integral(&g, &phi, &quad).unwrap().ratio);
            h_max = h_max.max(ps_vs_h(&f, 256, i).unwrap().max_violation_ratio);
            h_max_scaled = h_max_scaled.max(ps_vs_h(&g, 256, i).unwrap().max_violation_ratio);
        }
        let ri = spread(&[int_max, int_max_scaled]);
        let rh = spread(&[h_max, h_max_scaled]);
        ok &= ri <= 2.0 && rh <= 2.0 && h_max.is_finite() && h_max_scaled.is_finite();
        parts.push(format!(
            "deg {d}: max |I|/bound {int_max:.4} vs {int_max_scaled:.4} (×{ri:.3}); max PS/H {h_max:.4} vs {h_max_scaled:.4} (×{rh:.3})"
        ));
    }
    Outcome::check(ok, parts.join("; "))
}

fn c9_basis_and_slicing() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=100usize {
        for k in 1..=100u32 {
            if basis_dim(n, k) > 100 {
                break;
            }
            worst = worst.max(build_power_basis(n, k, 7).unwrap().residual);
            count += 1;
        }
    }
    let mut r = rng(9);
    let mut worst_z: f64 = 0.0;
    for i in 0..20u64 {
        let deg = 2 + (i % 2) as u32;
        let mut terms = Vec::new();
        for a in 0..=deg {
            for b in 0..=(deg - a) {
                terms.push((MultiIndex(vec![a, b]), gauss_c(&mut r)));
            }
        }
        let p = CPolyN::new(2, terms).unwrap();
        let order = r.gen_range(1..=deg);
        let first = r.gen_range(0..=order);
        let alpha = MultiIndex(vec![first, order - first]);
        let cmp = slice_measure_nd(&p, &alpha, 0.25, 0.3, 20_000, i).unwrap();
        worst_z = worst_z.max(cmp.z_score());
    }
    Outcome::check(
        worst < 1e-10 && worst_z <= 3.0,
        format!("{count} bases, worst residual {worst:.2e}; slicing worst |z| {worst_z:.3} over 20 instances"),
    )
}

fn c10_covering() -> Outcome {
    let phi = BumpSpec::plateau(0.5, 1.0);
    let mut r = rng(5);
    let (mut unstable, mut jr): (usize, f64) = (0, 0.0);
    let mut overlaps = Vec::new();
    for i in 0..20 {
        let p = CPolyN::from_poly1(&random_poly(&mut r, 2 + i % 5));
        let a = covering_decomposition(&p, &phi, 0.05, 512).unwrap();
        let b = covering_decomposition(&p, &phi, 0.05, 1024).unwrap();
        unstable += usize::from(a.max_overlap != b.max_overlap);
        jr = jr.max(a.j_ratio_max).max(b.j_ratio_max);
        overlaps.push(b.max_overlap);
    }
    Outcome::check(
        unstable == 0 && jr <= 2.0,
        format!("grids 512/1024: overlap changes {unstable}/20, overlaps {overlaps:?}, j_ratio_max {jr:.3}"),
    )
}

fn c11_constants() -> Outcome {
    let mut r = rng(12);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let q = random_poly(&mut r, 2).scale(C64::new(10f64.powf(r.gen_range(-2.0..4.0)), 0.0));
        worst = worst.max((cd_ratio(&q).unwrap() - 1.0).abs());
    }
    let a = [10.0, 100.0, 1e3, 1e4];
    let s3 = cd_family_decay(3, &a).unwrap().fit.slope;
    let s4 = cd_family_decay(4, &a).unwrap().fit.slope;
    Outcome::check(
        worst <= 1e-9 && s3 < 0.0 && s4 < 0.0,
        format!("quadratics |cd_ratio - 1| <= {worst:.1e}; decay slopes d=3 {s3:.4}, d=4 {s4:.4}"),
    )
}

fn c12_oracles() -> Outcome {
    let mut r = rng(11);
    let mut worst_root: f64 = 0.0;
    for i in 0..1000 {
        let p = random_poly(&mut r, 1 + i % 10);
        worst_root = worst_root.max(match_distance(&root_multiset(&p, ROOT_TOL).unwrap(), &companion_roots(&p)));
    }

    let mut r = rng(12);
    let disc = RegionSpec::disc(C64::new(0.0, 0.0), 1.0);
    let mut worst_sigma: f64 = 0.0;
    for i in 0..20u64 {
        let p = random_poly(&mut r, 1 + (i % 5) as usize);
        let eps = 0.3 + r.gen::<f64>();
        let pred = |z: &[C64]| p.eval(z[0]).norm() <= eps;
        let g = measure_grid(pred, &disc, 1024).unwrap();
        let m = measure_mc(pred, &disc, 100_000, i).unwrap();
        worst_sigma = worst_sigma.max((g.value - m.value).abs() / m.stderr.unwrap().max(1e-300));
    }

    let mut r = rng(5);
    let (mut mismatches, mut counted) = (0, 0);
    while counted < 100 {
        let p = random_poly(&mut r, 1 + counted % 8);
        let rs = roots(&p, ROOT_TOL).unwrap();
        let radius = 0.5 + 1.5 * r.gen::<f64>();
        let center = C64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5);
        if rs.iter().any(|x| ((x.z - center).norm() - radius).abs() < 1e-3) {
            continue;
        }
        counted += 1;
        let inside: usize = rs.iter().filter(|x| (x.z - center).norm() < radius).map(|x| x.multiplicity).sum();
        let n = count_zeros_argument_principle(&AnalyticFn::Poly(p), center, radius, 256).unwrap();
        mismatches += usize::from(n != inside);
    }
    Outcome::check(
        worst_root <= 1e-8 && worst_sigma <= 3.0 && mismatches == 0,
        format!(
            "roots vs companion {worst_root:.1e} (1000); grid vs MC worst {worst_sigma:.2}σ (20); argument principle mismatches {mismatches}/100"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "decay exponents", c1_decay_exponents),
        (2, "coefficient sublevel scaling", c2_tarry_scaling),
        (3, "integrability threshold", c3_tarry_threshold),
        (4, "exponential counterexample", c4_counterexample),
        (5, "Hensel certificates", c5_hensel_certificates),
        (6, "locator scale invariance", c6_locator_scale),
        (7, "H-sublevel equivalence", c7_h_equivalence),
        (8, "root-cluster bound ratios", c8_cluster_bound),
        (9, "power basis and slicing", c9_basis_and_slicing),
        (10, "covering diagnostics", c10_covering),
        (11, "derivative constants", c11_constants),
        (12, "oracle equivalences", c12_oracles),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (mut failed, mut tolerated) = (0, 0);
    for (id, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        let note = if out.unattainable { " [unattainable]" } else { "" };
        println!("C{id:<2} {verdict}{note} {name} ({:.1}s): {}", start.elapsed().as_secs_f64(), out.detail);
        if !out.pass {
            if out.unattainable {
                tolerated += 1;
            } else {
                failed += 1;
            }
        }
    }
    println!("acceptance: {failed} failed, {tolerated} unattainable");
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
