use covdc::cpoly::AnalyticFn;
use covdc::sublevel::{measure_quadtree, Constraint, PlanarDomain, QuadtreeOptions};
use covdc::C64;
use serde_json::json;

use crate::cli::{CounterexampleArgs, FamilyArg};
use crate::error::{usage, CliResult};
use crate::output::{f, Outcome, Table};
use crate::settings::Settings;
use crate::values;

fn family(kind: FamilyArg, n: f64) -> AnalyticFn {
    match kind {
        FamilyArg::Exp => AnalyticFn::ExpCounterexample { n },
        FamilyArg::ExpSquare => AnalyticFn::ExpSquare { n },
        FamilyArg::Sine => AnalyticFn::RealSine { n },
    }
}

/// `|{|f| <= ε} ∩ [-1,1]²|` by quadtree for every `(N, ε)` cell.
pub fn run(args: &CounterexampleArgs, s: &Settings) -> CliResult<Outcome> {
    let ns = values::floats(&args.n)?;
    let eps = values::floats(&args.eps)?;
    if !(args.min_cell > 0.0) {
        return Err(usage("min-cell must be positive"));
    }
    let base = QuadtreeOptions::default();
    s.charge(base.max_cells.saturating_mul((ns.len() * eps.len()) as u64))?;
    let mut t = Table::new(
        "counterexample",
        &["N", "eps", "measure", "ratio_n_eps2", "ratio_eps2", "eps_below_inv_n"],
    );
    let mut normalized = Vec::new();
    for &n in &ns {
        for &e in &eps {
            let opts = QuadtreeOptions { base: args.base, min_cell: e * args.min_cell, ..base };
            let m = measure_quadtree(
                &family(args.family, n),
                &[Constraint::sublevel(C64::new(0.0, 0.0), e)],
                &PlanarDomain::unit_square(),
                &opts,
            )?;
            let r = m.value / (n * e * e);
            if e * n < 1.0 {
                normalized.push(r);
            }
            t.push(vec![f(n), f(e), f(m.value), f(r), f(m.value / (e * e)), (e * n < 1.0).to_string()]);
        }
    }
    let lo = normalized.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = normalized.iter().copied().fold(0.0, f64::max);
    Ok(Outcome::new(
        vec![t],
        json!({
            "family": args.family,
            "ratio_min": if normalized.is_empty() { None } else { Some(lo) },
            "ratio_max": if normalized.is_empty() { None } else { Some(hi) },
            "ratio_spread": if normalized.is_empty() || lo <= 0.0 { None } else { Some(hi / lo) },
        }),
    ))
}
