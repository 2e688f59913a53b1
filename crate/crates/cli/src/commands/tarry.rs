use covdc::oscint::QuadSpec;
use covdc::C64;
use covdc::tarry::{
    box_cover_check, dyadic_family, fresnel_constant, necessity_probe, sparse_scaling, sublevel_scaling,
    DyadicResult, Family, NecessityParams, ScanResult, SparsePhase,
};
use serde_json::json;

use crate::cli::TarryCmd;
use crate::error::CliResult;
use crate::output::{f, Outcome, Table};
use crate::settings::Settings;
use crate::values;

fn scan_outcome(r: &ScanResult) -> Outcome {
    let mut t = Table::new("scan", &["Q", "measure", "stderr", "hit_rate"]);
    for i in 0..r.q_values.len() {
        t.push(vec![f(r.q_values[i]), f(r.measures[i]), f(r.measure_stderr[i]), f(r.hit_rates[i])]);
    }
    Outcome::new(
        vec![t],
        json!({ "family": r.family, "slope": r.fitted_slope, "slope_stderr": r.stderr, "samples": r.samples, "seed": r.seed }),
    )
}

fn dyadic_outcome(r: &DyadicResult) -> Outcome {
    let mut t = Table::new("dyadic", &["r", "shell_measure", "shell_stderr", "term", "partial_sum", "ratio", "ratio_stderr"]);
    for i in 0..r.r_values.len() {
        let ratio = r.ratios.get(i).map(|x| f(*x)).unwrap_or_default();
        let rse = r.ratio_stderr.get(i).map(|x| f(*x)).unwrap_or_default();
        t.push(vec![
            r.r_values[i].to_string(),
            f(r.shell_measures[i]),
            f(r.shell_stderr[i]),
            f(r.terms[i]),
            f(r.partial_sums[i]),
            ratio,
            rse,
        ]);
    }
    Outcome::new(
        vec![t],
        json!({
            "family": r.family,
            "q": r.q,
            "max_ratio": r.max_ratio(),
            "min_ratio": r.min_ratio(),
            "samples": r.samples,
            "seed": r.seed,
        }),
    )
}

pub fn run(cmd: &TarryCmd, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        TarryCmd::Scan { d, q, samples } => {
            let qs = values::floats(q)?;
            s.charge(*samples as u64 * qs.len() as u64)?;
            Ok(scan_outcome(&sublevel_scaling(*d, &qs, *samples, s.seed)?))
        }
        TarryCmd::Dyadic { d, q, r_max, samples } => {
            s.charge(*samples as u64 * (*r_max as u64 + 1))?;
            Ok(dyadic_outcome(&dyadic_family(&Family::Moment(*d), *q, *r_max, *samples, s.seed)?))
        }
        TarryCmd::Boxes { d, q, samples } => {
            s.charge(*samples as u64)?;
            let b = box_cover_check(*d, *q, *samples, s.seed)?;
            let mut t = Table::new("boxes", &["d", "Q", "accepted", "proposals", "covered_fraction"]);
            t.push(vec![d.to_string(), f(*q), b.accepted.to_string(), b.proposals.to_string(), f(b.covered_fraction)]);
            let uncovered: Vec<Vec<[f64; 2]>> =
                b.uncovered.iter().map(|w| w.iter().map(|c| [c.re, c.im]).collect()).collect();
            Ok(Outcome::new(vec![t], json!({ "covered_fraction": b.covered_fraction, "uncovered": uncovered })))
        }
        TarryCmd::Necessity { m, a, c1, base } => {
            let quad = QuadSpec::default();
            let params = NecessityParams { m: *m, a: *a, c1: *c1, base: *base };
            let p = necessity_probe(&params, &quad)?;
            let fc = fresnel_constant(&[4.0, 8.0, 12.0], &quad)?;
            let mut t = Table::new("necessity", &["m", "Q_m", "ii1_abs", "ii2_abs", "ii1_scaled", "ii2_scaled", "main_ok"]);
            t.push(vec![
                m.to_string(),
                f(p.q_m),
                f(p.ii1.norm()),
                f(p.ii2.norm()),
                f(p.ii1_scaled),
                f(p.ii2_scaled),
                p.main_ok.to_string(),
            ]);
            Ok(Outcome::new(
                vec![t],
                json!({
                    "z_rs": [p.z_rs.re, p.z_rs.im],
                    "fresnel": [fc.estimate.re, fc.estimate.im],
                    "fresnel_spread": fc.spread,
                    "main_ok": p.main_ok,
                }),
            ))
        }
        TarryCmd::Sparse { exponents, q, dyadic_q, r_max, samples } => {
            let e = values::uints(exponents)?;
            match dyadic_q {
                Some(dq) => {
                    SparsePhase::new(e.clone(), vec![C64::new(0.0, 0.0); e.len()])?;
                    s.charge(*samples as u64 * (*r_max as u64 + 1))?;
                    Ok(dyadic_outcome(&dyadic_family(&Family::Sparse(e), *dq, *r_max, *samples, s.seed)?))
                }
                None => {
                    let qs = values::floats(q)?;
                    s.charge(*samples as u64 * qs.len() as u64)?;
                    Ok(scan_outcome(&sparse_scaling(&e, &qs, *samples, s.seed)?))
                }
            }
        }
    }
}
