//! `--grid "r=100,1e3..1e4:10;R=1..5"` parsing and bound rows.

use anyhow::{bail, Context};
use serde::Serialize;
use turan_core::bounds::{all_bounds, BoundReport};

/// Values of `r` and `R` to cross.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub r: Vec<u64>,
    pub big_r: Vec<u64>,
}

fn parse_int(tok: &str) -> anyhow::Result<u64> {
    let tok = tok.trim();
    if let Ok(v) = tok.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = tok
        .parse()
        .with_context(|| format!("bad grid value {tok:?}"))?;
    if !(v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64) {
        bail!("grid value {tok:?} is not a nonnegative integer");
    }
    Ok(v as u64)
}

/// `a`, `a..b` (inclusive, step 1) or `a..b:m` (geometric, factor `m`).
fn parse_list(list: &str) -> anyhow::Result<Vec<u64>> {
    let mut out = Vec::new();
    for item in list.split(',') {
        match item.split_once("..") {
            None => out.push(parse_int(item)?),
            Some((a, rest)) => {
                let (b, factor) = match rest.split_once(':') {
                    Some((b, f)) => (parse_int(b)?, Some(parse_int(f)?)),
                    None => (parse_int(rest)?, None),
                };
                let a = parse_int(a)?;
                if a > b {
                    bail!("empty grid range {item:?}");
                }
                match factor {
                    None => out.extend(a..=b),
                    Some(f) if f >= 2 && a >= 1 => {
                        let mut v = a;
                        while v <= b {
                            out.push(v);
                            v = v.saturating_mul(f);
                        }
                    }
                    Some(_) => bail!("geometric range {item:?} needs a >= 1 and factor >= 2"),
                }
            }
        }
    }
    Ok(out)
}

impl std::str::FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(spec: &str) -> anyhow::Result<Self> {
        let (mut r, mut big_r) = (None, None);
        for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
            let (name, list) = part
                .split_once('=')
                .with_context(|| format!("grid part {part:?} is not name=values"))?;
            let values = parse_list(list)?;
            match name.trim() {
                "r" => r = Some(values),
                "R" | "big_r" | "big-r" => big_r = Some(values),
                other => bail!("unknown grid axis {other:?}; use r and R"),
            }
        }
        Ok(Grid {
            r: r.context("grid needs r=...")?,
            big_r: big_r.context("grid needs R=...")?,
        })
    }
}

impl Grid {
    pub fn cells(&self) -> Vec<(u64, u64)> {
        self.r
            .iter()
            .flat_map(|&r| self.big_r.iter().map(move |&b| (r, b)))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub r: u64,
    pub big_r: u64,
    pub eps1: Option<f64>,
    pub bounds: Vec<BoundReport>,
}

pub fn cell(r: u64, big_r: u64, eps1: Option<f64>) -> turan_core::Result<Cell> {
    Ok(Cell {
        r,
        big_r,
        eps1,
        bounds: all_bounds(r, big_r, eps1)?,
    })
}

/// Finite values as numbers, overflowed ones as `exp(<ln>)`.
fn csv_value(b: &BoundReport) -> String {
    if b.value.is_finite() {
        b.value.to_string()
    } else {
        format!("exp({})", b.ln_value)
    }
}

pub fn write_csv<W: std::io::Write>(cells: &[Cell], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "R", "bound_name", "kind", "value", "assumptions"])?;
    for c in cells {
        for b in &c.bounds {
            w.write_record([
                c.r.to_string(),
                c.big_r.to_string(),
                b.name.clone(),
                b.kind.as_str().to_string(),
                csv_value(b),
                b.assumptions.join("; "),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        let g: Grid = "r=100,1e3..1e5:10;R=1..3".parse().unwrap();
        assert_eq!(g.r, vec![100, 1000, 10_000, 100_000]);
        assert_eq!(g.big_r, vec![1, 2, 3]);
        assert_eq!(g.cells()[..2], [(100, 1), (100, 2)]);
        assert!("r=5".parse::<Grid>().is_err());
        assert!("r=5;Q=1".parse::<Grid>().is_err());
        assert!("r=1.5;R=1".parse::<Grid>().is_err());
        assert!("r=9..3;R=1".parse::<Grid>().is_err());
    }
}
