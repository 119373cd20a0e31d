//! Columnar text format for tabulated maps.
//!
//! ```text
//! # heisenberg-map 1
//! # lo <x> <y> <t>
//! # hi <x> <y> <t>
//! # n <nx> <ny> <nt>
//! # spacing <hx> <hy> <ht>
//! # columns x y t f1 f2 f3
//! x y t f1 f2 f3
//! ...
//! ```
//!
//! Rows follow node order with `x` fastest. Floats are written with 17
//! significant digits, so values round-trip bit for bit.

use std::io::{BufRead, Write};

use super::{Grid, SampledMap};
use crate::error::{Error, Result};
use crate::group::Point;

const MAGIC: &str = "heisenberg-map 1";

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the values of `map` at the nodes of its grid.
pub fn write_map<W: Write>(map: &SampledMap, mut out: W) -> Result<()> {
    let g = map.grid();
    let row = |a: [f64; 3]| a.map(fmt).join(" ");
    writeln!(out, "# {MAGIC}")?;
    writeln!(out, "# lo {}", row(g.lo))?;
    writeln!(out, "# hi {}", row(g.hi))?;
    writeln!(out, "# n {} {} {}", g.n[0], g.n[1], g.n[2])?;
    writeln!(out, "# spacing {}", row(g.spacing()))?;
    writeln!(out, "# columns x y t f1 f2 f3")?;
    for (p, v) in g.nodes().into_iter().zip(map.values()?) {
        writeln!(out, "{} {}", row(p.to_array()), row(v.to_array()))?;
    }
    Ok(())
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(b)) => {
                out.push((b, &s[b..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b, &s[b..]));
    }
    out.into_iter()
        .map(|(b, tok)| (s[..b].chars().count() + 1, tok))
        .collect()
}

fn parse_num<T: std::str::FromStr>(line: usize, col: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, col, format!("cannot parse `{tok}` as a number")))
}

fn header_triple<T: std::str::FromStr + Copy>(
    line: usize,
    toks: &[(usize, &str)],
    key_end: usize,
) -> Result<[T; 3]> {
    if toks.len() != 5 {
        return Err(parse_err(line, key_end, "expected three values"));
    }
    let mut out = Vec::with_capacity(3);
    for &(col, tok) in &toks[2..] {
        out.push(parse_num::<T>(line, col, tok)?);
    }
    Ok([out[0], out[1], out[2]])
}

/// Reads a tabulated map. Errors carry the first offending line and column.
pub fn read_map<R: BufRead>(input: R) -> Result<SampledMap> {
    let mut lo = None;
    let mut hi = None;
    let mut n = None;
    let mut grid: Option<Grid> = None;
    let mut values = Vec::new();
    let mut line_no = 0;
    for line in input.lines() {
        line_no += 1;
        let line = line?;
        let toks = tokens(&line);
        if toks.is_empty() {
            continue;
        }
        if toks[0].1 == "#" || toks[0].1.starts_with('#') {
            if grid.is_some() {
                return Err(parse_err(line_no, 1, "header line after data"));
            }
            let key = toks.get(1).map(|t| t.1);
            let key_end = toks.get(1).map_or(1, |t| t.0);
            match key {
                Some("lo") => lo = Some(header_triple::<f64>(line_no, &toks, key_end)?),
                Some("hi") => hi = Some(header_triple::<f64>(line_no, &toks, key_end)?),
                Some("n") => n = Some(header_triple::<usize>(line_no, &toks, key_end)?),
                _ => {}
            }
            continue;
        }
        let g = match grid {
            Some(g) => g,
            None => {
                let (Some(lo), Some(hi), Some(n)) = (lo, hi, n) else {
                    return Err(parse_err(line_no, 1, "data before complete `lo`, `hi`, `n` header"));
                };
                let g = Grid::new(lo, hi, n)
                    .map_err(|e| parse_err(line_no, 1, format!("bad grid header: {e}")))?;
                values.reserve(g.len());
                grid = Some(g);
                g
            }
        };
        if toks.len() != 6 {
            let col = toks.get(6).map_or(line.chars().count() + 1, |t| t.0);
            return Err(parse_err(line_no, col, format!("expected 6 columns, found {}", toks.len())));
        }
        let mut nums = [0.0; 6];
        for (slot, &(col, tok)) in nums.iter_mut().zip(&toks) {
            *slot = parse_num::<f64>(line_no, col, tok)?;
            if !slot.is_finite() {
                return Err(parse_err(line_no, col, "non-finite value"));
            }
        }
        let idx = values.len();
        if idx >= g.len() {
            return Err(parse_err(line_no, 1, format!("more than {} data rows", g.len())));
        }
        let node = g.node_at(idx).to_array();
        let h = g.spacing();
        for a in 0..3 {
            if (nums[a] - node[a]).abs() > 1e-9 * h[a] {
                return Err(parse_err(
                    line_no,
                    toks[a].0,
                    format!("coordinate {} does not match node {:?}", nums[a], node),
                ));
            }
        }
        values.push(Point::new(nums[3], nums[4], nums[5]));
    }
    let Some(g) = grid else {
        return Err(parse_err(line_no + 1, 1, "no data rows"));
    };
    if values.len() != g.len() {
        return Err(parse_err(
            line_no + 1,
            1,
            format!("truncated: {} of {} rows", values.len(), g.len()),
        ));
    }
    SampledMap::tabulated(g, values)
}
