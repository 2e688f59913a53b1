use covdc::cpoly::{parse_poly, CPoly1, CPolyN, MultiIndex};
use covdc::oscint::{log_grid, BumpSpec, QuadRule, QuadSpec};
use covdc::C64;

use crate::cli::{BumpArgs, QuadArgs, RuleArg};
use crate::error::{usage, CliResult};

pub fn phase(s: &str) -> CliResult<CPolyN> {
    Ok(parse_poly(s)?)
}

pub fn phase1(s: &str) -> CliResult<CPoly1> {
    let p = phase(s)?;
    if p.nvars() != 1 {
        return Err(usage(format!("expected a univariate phase, got {} variables", p.nvars())));
    }
    Ok(p.to_poly1()?)
}

/// A complex constant written in the phase grammar, e.g. `0.5-2i`.
pub fn complex(s: &str) -> CliResult<C64> {
    let p = phase(s)?;
    if p.degree() > 0 {
        return Err(usage(format!("{s:?} is not a constant")));
    }
    Ok(p.terms().values().copied().sum())
}

pub fn point(s: &str) -> CliResult<Vec<C64>> {
    s.split(',').map(|c| complex(c.trim())).collect()
}

/// Comma-separated floats; an item `lo:hi:n` expands to `n` log-spaced values.
pub fn floats(s: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(x.parse().map_err(|_| usage(format!("not a number: {x:?}")))?),
            [lo, hi, n] => {
                let lo: f64 = lo.parse().map_err(|_| usage(format!("bad range start {lo:?}")))?;
                let hi: f64 = hi.parse().map_err(|_| usage(format!("bad range end {hi:?}")))?;
                let n: usize = n.parse().map_err(|_| usage(format!("bad range count {n:?}")))?;
                out.extend(log_grid(lo, hi, n)?);
            }
            _ => return Err(usage(format!("bad list item {item:?}"))),
        }
    }
    if out.is_empty() {
        return Err(usage("empty list"));
    }
    Ok(out)
}

pub fn uints(s: &str) -> CliResult<Vec<u32>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("not a non-negative integer: {t:?}"))))
        .collect()
}

pub fn multi_index(s: &str) -> CliResult<MultiIndex> {
    Ok(MultiIndex(uints(s)?))
}

pub fn bump(args: &BumpArgs, nvars: usize) -> CliResult<BumpSpec> {
    let mut b = if args.inner == 0.0 {
        BumpSpec::mollifier(args.outer)
    } else {
        BumpSpec::plateau_n(args.inner, args.outer, nvars)
    };
    b.center = match &args.center {
        Some(c) => point(c)?,
        None => vec![C64::new(0.0, 0.0); nvars],
    };
    if b.center.len() != nvars {
        return Err(usage(format!("center has {} coordinates, phase has {nvars} variables", b.center.len())));
    }
    b.validate()?;
    Ok(b)
}

pub fn quad(args: &QuadArgs) -> QuadSpec {
    let rule = match args.rule {
        RuleArg::Auto => QuadRule::Auto,
        RuleArg::Tensor => QuadRule::TensorTrapezoid,
        RuleArg::Gauss => QuadRule::TensorGauss,
        RuleArg::Localized => QuadRule::Localized,
    };
    QuadSpec { rule, points_per_dim: args.points, ..QuadSpec::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(floats("4, 8,16").unwrap(), vec![4.0, 8.0, 16.0]);
        let r = floats("10:1e4:4").unwrap();
        assert_eq!(r.len(), 4);
        assert!((r[3] - 1e4).abs() < 1e-9);
        assert!(floats("x").is_err());
        assert!(floats("").is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(complex("0.5-2i").unwrap(), C64::new(0.5, -2.0));
        assert_eq!(complex("0").unwrap(), C64::new(0.0, 0.0));
        assert!(complex("z").is_err());
        assert_eq!(point("1, i").unwrap(), vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    }
}
