use covdc::cpoly::AnalyticFn;
use covdc::functionals::RegionSpec;
use covdc::sublevel::{
    h_sublevel_equivalence, kw_sandwich, measure_grid, measure_mc, measure_quadtree, slice_measure_nd,
    verify_disc_cover, Constraint, MeasureEstimate, PlanarDomain, QuadtreeOptions,
};
use covdc::C64;
use serde_json::json;

use crate::cli::{MethodArg, SublevelCmd};
use crate::error::{usage, CliResult};
use crate::output::{f, Outcome, Table};
use crate::settings::Settings;
use crate::values;

fn opt(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

fn estimate_row(eps: f64, m: &MeasureEstimate) -> Vec<String> {
    vec![f(eps), f(m.value), opt(m.stderr), opt(m.resolution_bound), format!("{:?}", m.method)]
}

pub fn run(cmd: &SublevelCmd, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        SublevelCmd::Measure { phase, eps, a, radius, method, resolution } => {
            let p = values::phase(phase)?;
            let a = values::complex(a)?;
            let n = p.nvars();
            let region = RegionSpec::ball(vec![C64::new(0.0, 0.0); n], *radius);
            let eps = values::floats(eps)?;
            let per = match method {
                MethodArg::Grid => (*resolution as u64).pow(2 * n as u32),
                MethodArg::Mc => *resolution as u64,
                MethodArg::Quadtree => QuadtreeOptions::default().max_cells,
            };
            s.charge(per * eps.len() as u64)?;
            let mut t = Table::new("measure", &["eps", "value", "stderr", "resolution_bound", "method"]);
            for (i, &e) in eps.iter().enumerate() {
                let pred = |z: &[C64]| (p.eval(z) - a).norm() <= e;
                let m = match method {
                    MethodArg::Grid => measure_grid(pred, &region, *resolution)?,
                    MethodArg::Mc => measure_mc(pred, &region, *resolution, s.seed.wrapping_add(i as u64))?,
                    MethodArg::Quadtree => {
                        if n != 1 {
                            return Err(usage("the quadtree method needs a univariate phase"));
                        }
                        let opts = QuadtreeOptions {
                            base: *resolution,
                            min_cell: 2.0 * radius / *resolution as f64 / 64.0,
                            ..QuadtreeOptions::default()
                        };
                        let dom = PlanarDomain::Disc { center: C64::new(0.0, 0.0), radius: *radius };
                        measure_quadtree(&AnalyticFn::Poly(p.to_poly1()?), &[Constraint::sublevel(a, e)], &dom, &opts)?
                    }
                };
                t.push(estimate_row(e, &m));
            }
            Ok(Outcome::new(vec![t], json!({ "a": [a.re, a.im], "radius": radius })))
        }
        SublevelCmd::Cover { phase, k, eps, mu, radius, samples, c_d } => {
            let p = values::phase1(phase)?;
            s.charge(20 * *samples as u64)?;
            let c = verify_disc_cover(&p, *k, *eps, *mu, *radius, *samples, s.seed, *c_d)?;
            let mut t = Table::new("disc_cover", &["k", "eps", "mu", "samples", "maxratio", "violations"]);
            t.push(vec![k.to_string(), f(*eps), f(*mu), c.samples.to_string(), f(c.maxratio), c.violations.to_string()]);
            Ok(Outcome::new(vec![t], json!({ "worst_point": [c.worst_point.re, c.worst_point.im] })))
        }
        SublevelCmd::Kw { phase, radius, grid } => {
            let p = values::phase1(phase)?;
            s.charge((*grid as u64).pow(2))?;
            let k = kw_sandwich(&p, *radius, *grid)?;
            let mut t = Table::new("kw", &["re", "im", "multiplicity", "r"]);
            for ((z, m), r) in k.roots.iter().zip(&k.mults).zip(&k.r) {
                t.push(vec![f(z.re), f(z.im), m.to_string(), f(*r)]);
            }
            Ok(Outcome::new(
                vec![t],
                json!({
                    "inner_ok": k.inner_ok,
                    "outer_ok": k.outer_ok,
                    "inner_violations": k.inner_violations,
                    "outer_violations": k.outer_violations,
                }),
            ))
        }
        SublevelCmd::Equivalence { phase, radius, grid, a_samples } => {
            let p = values::phase1(phase)?;
            let e = h_sublevel_equivalence(&p, *radius, *grid, *a_samples, s.seed)?;
            let mut t = Table::new("equivalence", &["radius", "h_inf", "lhs", "rhs", "ratio", "witness_best"]);
            t.push(vec![f(*radius), f(e.h_inf), f(e.lhs), f(e.rhs), f(e.ratio), e.witness_best.to_string()]);
            Ok(Outcome::new(vec![t], json!({ "ratio": e.ratio, "best_a": [e.best_a.re, e.best_a.im] })))
        }
        SublevelCmd::Slice { phase, alpha, mu, eps, samples } => {
            let p = values::phase(phase)?;
            let alpha = values::multi_index(alpha)?;
            s.charge(2 * *samples as u64)?;
            let c = slice_measure_nd(&p, &alpha, *mu, *eps, *samples, s.seed)?;
            let mut t = Table::new("slice", &["route", "eps", "value", "stderr", "resolution_bound", "method"]);
            for (route, m) in [("sliced", &c.sliced), ("direct", &c.direct)] {
                let mut row = vec![route.to_string()];
                row.extend(estimate_row(*eps, m));
                t.push(row);
            }
            Ok(Outcome::new(vec![t], json!({ "z_score": c.z_score() })))
        }
    }
}
