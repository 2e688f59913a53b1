use covdc::cpoly::CPolyN;
use covdc::oscint::{covering_decomposition, decay_fit, integrate, thm_bound_check, Phase};
use covdc::C64;
use serde_json::json;

use crate::cli::OscintCmd;
use crate::error::CliResult;
use crate::output::{f, Outcome, Table};
use crate::settings::Settings;
use crate::values;

fn dilate(p: &CPolyN, lambda: f64) -> CPolyN {
    p.scale(C64::new(lambda, 0.0))
}

pub fn run(cmd: &OscintCmd, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        OscintCmd::Integrate { phase, lambda, bump, quad } => {
            let p = values::phase(phase)?;
            let phi = values::bump(bump, p.nvars())?;
            let q = values::quad(quad);
            let mut t = Table::new("integrate", &["lambda", "re", "im", "abs", "err", "rule", "points", "converged"]);
            let mut used = 0;
            for l in values::floats(lambda)? {
                let r = integrate(&Phase::Poly(dilate(&p, l)), &phi, &q)?;
                used += r.points;
                s.charge(used)?;
                t.push(vec![
                    f(l),
                    f(r.value.re),
                    f(r.value.im),
                    f(r.value.norm()),
                    f(r.err),
                    format!("{:?}", r.quad_used.rule),
                    r.points.to_string(),
                    r.converged.to_string(),
                ]);
            }
            Ok(Outcome::new(vec![t], json!({ "points": used })))
        }
        OscintCmd::Decay { phase, lambda, bump, quad } => {
            let p = values::phase(phase)?;
            let phi = values::bump(bump, p.nvars())?;
            let lambdas = values::floats(lambda)?;
            let fit = decay_fit(&p, &phi, &lambdas, &values::quad(quad))?;
            let mut t = Table::new("decay", &["lambda", "abs", "err", "rule", "converged"]);
            for d in &fit.samples {
                t.push(vec![f(d.lambda), f(d.abs), f(d.err), format!("{:?}", d.rule), d.converged.to_string()]);
            }
            Ok(Outcome::new(
                vec![t],
                json!({ "slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual, "dropped": fit.dropped }),
            ))
        }
        OscintCmd::Thm { phase, lambda, bump, quad } => {
            let p = values::phase(phase)?;
            let phi = values::bump(bump, p.nvars())?;
            let q = values::quad(quad);
            let mut t = Table::new("thm", &["lambda", "abs", "h", "ratio"]);
            let (mut lo, mut hi, mut used) = (f64::INFINITY, 0.0f64, 0);
            for l in values::floats(lambda)? {
                let r = thm_bound_check(&dilate(&p, l), &phi, &q)?;
                used += r.integral.points;
                s.charge(used)?;
                lo = lo.min(r.ratio);
                hi = hi.max(r.ratio);
                t.push(vec![f(l), f(r.integral.value.norm()), f(r.h), f(r.ratio)]);
            }
            Ok(Outcome::new(vec![t], json!({ "ratio_min": lo, "ratio_max": hi, "points": used })))
        }
        OscintCmd::Cover { phase, eps, grid, bump } => {
            let p = values::phase(phase)?;
            let phi = values::bump(bump, p.nvars())?;
            s.charge((*grid as u64).pow(2))?;
            let mut t = Table::new("cover", &["eps", "discs", "max_overlap", "j_ratio_max", "uncovered"]);
            let mut discs = Table::new("cover_discs", &["eps", "re", "im", "radius"]);
            for e in values::floats(eps)? {
                let c = covering_decomposition(&p, &phi, e, *grid)?;
                t.push(vec![
                    f(e),
                    c.centers.len().to_string(),
                    c.max_overlap.to_string(),
                    f(c.j_ratio_max),
                    c.uncovered.to_string(),
                ]);
                for (z, r) in c.centers.iter().zip(&c.radii) {
                    discs.push(vec![f(e), f(z.re), f(z.im), f(*r)]);
                }
            }
            Ok(Outcome::new(vec![t, discs], json!({ "grid": grid })))
        }
    }
}
