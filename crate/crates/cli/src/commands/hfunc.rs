use covdc::functionals::{h_inf, h_point, j_inf, j_point, RegionSpec};
use covdc::C64;
use serde_json::json;

use crate::cli::{FunctionalArg, HfuncCmd};
use crate::error::{usage, CliResult};
use crate::output::{f, Outcome, Table};
use crate::settings::Settings;
use crate::values;

fn point_columns(n: usize) -> Vec<String> {
    (1..=n).flat_map(|i| [format!("re{i}"), format!("im{i}")]).collect()
}

fn point_cells(z: &[C64]) -> Vec<String> {
    z.iter().flat_map(|c| [f(c.re), f(c.im)]).collect()
}

pub fn run(cmd: &HfuncCmd, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        HfuncCmd::Point { phase, at, which } => {
            let p = values::phase(phase)?;
            let n = p.nvars();
            let mut cols = point_columns(n);
            cols.extend(["value".to_string(), "argmax_alpha".to_string()]);
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            let mut t = Table::new("hfunc_point", &cols);
            for pt in at.split(';').map(str::trim).filter(|x| !x.is_empty()) {
                let z = values::point(pt)?;
                if z.len() != n {
                    return Err(usage(format!("point {pt:?} has {} coordinates, phase has {n} variables", z.len())));
                }
                let e = match which {
                    FunctionalArg::H => h_point(&p, &z)?,
                    FunctionalArg::J => j_point(&p, &z)?,
                };
                let alpha: Vec<String> = e.argmax_alpha.0.iter().map(u32::to_string).collect();
                let mut row = point_cells(&z);
                row.extend([f(e.value), alpha.join(" ")]);
                t.push(row);
            }
            Ok(Outcome::new(vec![t], json!({ "functional": which })))
        }
        HfuncCmd::Inf { phase, radius, center, which, grid, refine } => {
            let p = values::phase(phase)?;
            let n = p.nvars();
            let c = match center {
                Some(c) => values::point(c)?,
                None => vec![C64::new(0.0, 0.0); n],
            };
            s.charge((*grid as u64).pow(2 * n as u32))?;
            let region = RegionSpec::ball(c, *radius);
            let r = match which {
                FunctionalArg::H => h_inf(&p, &region, *grid, *refine)?,
                FunctionalArg::J => j_inf(&p, &region, *grid, *refine)?,
            };
            let mut cols = vec!["value".to_string(), "lower".to_string(), "upper".to_string()];
            cols.extend(point_columns(n));
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            let mut t = Table::new("hfunc_inf", &cols);
            let mut row = vec![f(r.value), f(r.lower), f(r.upper)];
            row.extend(point_cells(&r.minimizer));
            t.push(row);
            Ok(Outcome::new(vec![t], json!({ "functional": which, "value": r.value, "lower": r.lower, "upper": r.upper })))
        }
    }
}
