use covdc::cpoly::{AnalyticFn, CPoly1};
use covdc::hensel::{check_conditions, iterate_with, locate_derivative_zero, CaseConstants, IterateOptions, Thresholds};
use serde_json::json;

use crate::cli::{HenselCmd, ThresholdArgs};
use crate::error::CliResult;
use crate::output::{f, Outcome, Table};
use crate::settings::Settings;
use crate::values;

fn thresholds(args: &ThresholdArgs, s: &Settings) -> Thresholds {
    let base = s.thresholds();
    Thresholds {
        theta_delta: args.theta_delta.unwrap_or(base.theta_delta),
        theta_1: args.theta_1.unwrap_or(base.theta_1),
        theta_bulk: args.theta_bulk.unwrap_or(base.theta_bulk),
    }
}

fn sup_bound(p: &CPoly1, sup: Option<f64>) -> f64 {
    sup.unwrap_or_else(|| p.abs_sum(1.75))
}

pub fn run(cmd: &HenselCmd, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        HenselCmd::Iterate { phase, z0, order, sup, tol, max_iter, thresholds: th } => {
            let p = values::phase1(phase)?;
            let z0 = values::complex(z0)?;
            let phi = AnalyticFn::Poly(p.clone());
            let cond = if *order == 0 {
                None
            } else {
                Some(check_conditions(&phi, z0, *order, sup_bound(&p, *sup), &thresholds(th, s))?)
            };
            let opts = IterateOptions { tol: *tol, max_iter: *max_iter, ..IterateOptions::default() };
            let used = cond.as_ref().filter(|c| c.ok);
            let cert = iterate_with(&phi, z0, &opts, used)?;
            let mut t = Table::new("iterates", &["step", "re", "im"]);
            for (i, z) in cert.iterates.iter().enumerate() {
                t.push(vec![i.to_string(), f(z.re), f(z.im)]);
            }
            let mut claims = Table::new(
                "claims",
                &["step", "step_len", "step_bound", "residual", "residual_bound", "slope", "slope_floor", "holds"],
            );
            for c in &cert.claim_trace {
                claims.push(vec![
                    c.step.to_string(),
                    f(c.step_len),
                    f(c.step_bound),
                    f(c.residual),
                    f(c.residual_bound),
                    f(c.slope),
                    f(c.slope_floor),
                    c.holds.to_string(),
                ]);
            }
            Ok(Outcome::new(
                vec![t, claims],
                json!({
                    "root": [cert.root.re, cert.root.im],
                    "final_residual": cert.final_residual,
                    "bound": cert.bound,
                    "within_bound": cert.within_bound,
                    "claims_hold": cert.claims_hold,
                    "conditions": cond,
                }),
            ))
        }
        HenselCmd::Conditions { phase, z0, order, sup, thresholds: th } => {
            let p = values::phase1(phase)?;
            let z0 = values::complex(z0)?;
            let phi = AnalyticFn::Poly(p.clone());
            let th = thresholds(th, s);
            let mut t = Table::new("conditions", &["order", "delta", "delta_k", "sup_bound", "step0", "ok", "failed"]);
            for k in values::uints(order)? {
                let c = check_conditions(&phi, z0, k as usize, sup_bound(&p, *sup), &th)?;
                let dk: Vec<String> = c.delta_k.iter().map(|x| f(*x)).collect();
                t.push(vec![
                    k.to_string(),
                    f(c.delta),
                    dk.join(" "),
                    f(c.sup_bound),
                    f(c.step0),
                    c.ok.to_string(),
                    c.failed.unwrap_or_default(),
                ]);
            }
            Ok(Outcome::new(vec![t], json!({ "thresholds": th })))
        }
        HenselCmd::Locate { phase, z0, k, eps, kappa } => {
            let p = values::phase1(phase)?;
            let z0 = values::complex(z0)?;
            let consts = CaseConstants { kappa: *kappa, thresholds: s.thresholds(), ..CaseConstants::default() };
            let r = locate_derivative_zero(&p, z0, *k, *eps, consts)?;
            let mut t = Table::new("located", &["j", "re", "im", "dist", "scaled_dist", "order", "fallback", "bound_ok"]);
            t.push(vec![
                r.j.to_string(),
                f(r.zero.re),
                f(r.zero.im),
                f(r.dist),
                f(r.dist / eps.powf(1.0 / *k as f64)),
                r.order.to_string(),
                r.fallback.to_string(),
                r.bound_ok.to_string(),
            ]);
            Ok(Outcome::new(
                vec![t],
                json!({
                    "case": r.case,
                    "designated": r.designated,
                    "fallback_reason": r.fallback_reason,
                    "top": r.top,
                    "k_values": r.k_values,
                }),
            ))
        }
    }
}
