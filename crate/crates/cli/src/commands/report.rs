use std::path::{Path, PathBuf};

use covdc::fit::loglog_fit;
use serde_json::json;

use crate::cli::ReportArgs;
use crate::error::{usage, CliResult};
use crate::output::{f, Outcome, Table};
use crate::svg::{loglog, Series};

fn csv_files(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut v: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|q| q.extension().is_some_and(|x| x == "csv"))
                .collect();
            v.sort();
            out.extend(v);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(usage(format!("no such input {}", p.display())));
        }
    }
    if out.is_empty() {
        return Err(usage("no CSV files among the inputs"));
    }
    Ok(out)
}

struct Columns {
    names: Vec<String>,
    /// `None` for columns with a non-numeric cell.
    values: Vec<Option<Vec<f64>>>,
}

fn read_columns(path: &Path) -> CliResult<Columns> {
    let mut r = csv::Reader::from_path(path)?;
    let names: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut values: Vec<Option<Vec<f64>>> = vec![Some(Vec::new()); names.len()];
    for rec in r.records() {
        let rec = rec?;
        for (i, cell) in rec.iter().enumerate().take(names.len()) {
            if let Some(col) = values[i].as_mut() {
                match cell.trim().parse::<f64>() {
                    Ok(v) => col.push(v),
                    Err(_) => values[i] = None,
                }
            }
        }
    }
    Ok(Columns { names, values })
}

fn plot_name(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match path.parent().and_then(Path::file_name) {
        Some(d) => format!("{}_{stem}.svg", d.to_string_lossy()),
        None => format!("{stem}.svg"),
    }
}

/// One SVG per CSV and a table of fitted log-log slopes per plotted column.
pub fn run(args: &ReportArgs) -> CliResult<Outcome> {
    let files = csv_files(&args.inputs)?;
    let wanted_y: Option<Vec<String>> = args.y.as_ref().map(|y| y.split(',').map(|s| s.trim().to_string()).collect());
    let mut table = Table::new("report", &["file", "x", "y", "points", "slope", "intercept"]);
    let mut svgs = Vec::new();
    let mut md = String::from("| file | x | y | points | slope |\n|---|---|---|---|---|\n");
    for path in &files {
        let cols = read_columns(path)?;
        let numeric: Vec<usize> = (0..cols.names.len()).filter(|&i| cols.values[i].as_ref().is_some_and(|v| !v.is_empty())).collect();
        let xi = match &args.x {
            Some(x) => match cols.names.iter().position(|n| n == x) {
                Some(i) if numeric.contains(&i) => i,
                _ => continue,
            },
            None => match numeric.first() {
                Some(&i) => i,
                None => continue,
            },
        };
        let xs = cols.values[xi].as_ref().expect("numeric");
        let mut series = Vec::new();
        for &yi in numeric.iter().filter(|&&i| i != xi) {
            let name = &cols.names[yi];
            if wanted_y.as_ref().is_some_and(|w| !w.contains(name)) {
                continue;
            }
            let ys = cols.values[yi].as_ref().expect("numeric");
            let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
            let positive: Vec<(f64, f64)> = pts.iter().copied().filter(|(x, y)| *x > 0.0 && *y > 0.0).collect();
            let fit = loglog_fit(&positive).ok();
            let (slope, icpt) = fit.map_or((String::new(), String::new()), |l| (f(l.slope), f(l.intercept)));
            let file = path.display().to_string();
            md.push_str(&format!("| {file} | {} | {name} | {} | {slope} |\n", cols.names[xi], positive.len()));
            table.push(vec![file, cols.names[xi].clone(), name.clone(), positive.len().to_string(), slope, icpt]);
            series.push(Series { label: name.clone(), points: pts });
        }
        if !series.is_empty() {
            let title = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            svgs.push((plot_name(path), loglog(&title, &cols.names[xi], &series)));
        }
    }
    let mut out = Outcome::new(vec![table], json!({ "files": files.len(), "plots": svgs.len() }));
    out.files = svgs;
    out.files.push(("summary.md".into(), md));
    Ok(out)
}
