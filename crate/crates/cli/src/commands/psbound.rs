use covdc::psbound::{ps_bound, ps_vs_h, ps_vs_integral};
use covdc::C64;
use serde_json::json;

use crate::cli::PsboundCmd;
use crate::error::CliResult;
use crate::output::{f, Outcome, Table};
use crate::settings::Settings;
use crate::values;

pub fn run(cmd: &PsboundCmd, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        PsboundCmd::Bound { phase } => {
            let p = values::phase1(phase)?;
            let b = ps_bound(&p)?;
            let mut t = Table::new("psbound", &["root", "re", "im", "multiplicity", "cluster", "cluster_s", "value"]);
            for r in &b.per_root {
                let z = b.roots[r.root];
                let members: Vec<String> = r.cluster.members.iter().map(usize::to_string).collect();
                t.push(vec![
                    r.root.to_string(),
                    f(z.re),
                    f(z.im),
                    b.mults[r.root].to_string(),
                    members.join(" "),
                    r.cluster.s.to_string(),
                    f(r.value),
                ]);
            }
            Ok(Outcome::new(vec![t], json!({ "overall": b.overall, "lead": [b.lead.re, b.lead.im] })))
        }
        PsboundCmd::VsH { phase, samples } => {
            let p = values::phase1(phase)?;
            s.charge(*samples as u64)?;
            let r = ps_vs_h(&p, *samples, s.seed)?;
            let mut t = Table::new("ps_vs_h", &["max_violation_ratio", "worst_re", "worst_im", "worst_root"]);
            t.push(vec![f(r.max_violation_ratio), f(r.worst_point.re), f(r.worst_point.im), r.worst_root.to_string()]);
            Ok(Outcome::new(vec![t], json!({ "max_violation_ratio": r.max_violation_ratio })))
        }
        PsboundCmd::VsIntegral { phase, lambda, bump, quad } => {
            let p = values::phase1(phase)?;
            let phi = values::bump(bump, 1)?;
            let q = values::quad(quad);
            let mut t = Table::new("ps_vs_integral", &["lambda", "abs", "bound", "ratio", "rule"]);
            let (mut worst, mut used) = (0.0f64, 0);
            for l in values::floats(lambda)? {
                let r = ps_vs_integral(&p.scale(C64::new(l, 0.0)), &phi, &q)?;
                used += r.integral.points;
                s.charge(used)?;
                worst = worst.max(r.ratio);
                t.push(vec![f(l), f(r.integral.value.norm()), f(r.bound), f(r.ratio), format!("{:?}", r.integral.quad_used.rule)]);
            }
            Ok(Outcome::new(vec![t], json!({ "ratio_max": worst, "points": used })))
        }
    }
}
