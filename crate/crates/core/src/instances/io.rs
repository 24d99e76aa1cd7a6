//! Plain-text dataset format.
//!
//! ```text
//! # comments start with '#'
//! d n_sites has_labels
//! x_1 ... x_d weight [label]
//! ```
//!
//! Coordinates are written with 17 significant digits so every finite `f64`
//! survives a round trip bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Dataset, Point};

pub fn format_dataset(x: &Dataset) -> String {
    let labels = x.labels();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", x.dim(), x.len(), labels.is_some() as u8);
    for site in 0..x.len() {
        let mut line = x
            .point(site)
            .coords()
            .iter()
            .map(|c| format!("{c:.16e}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = write!(line, " {}", x.weight(site));
        if let Some(l) = labels {
            let _ = write!(line, " {}", l[site]);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_dataset(x: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_dataset(x))?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    parse_dataset(&fs::read_to_string(path)?)
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(perr(hline, "header must be 'd n_sites has_labels'"));
    }
    let dim: usize = fields[0]
        .parse()
        .map_err(|_| perr(hline, format!("bad dimension '{}'", fields[0])))?;
    let n: usize = fields[1]
        .parse()
        .map_err(|_| perr(hline, format!("bad site count '{}'", fields[1])))?;
    let has_labels = match fields[2] {
        "0" => false,
        "1" => true,
        other => {
            return Err(perr(
                hline,
                format!("has_labels must be 0 or 1, got '{other}'"),
            ))
        }
    };
    if dim == 0 {
        return Err(perr(hline, "dimension must be >= 1"));
    }

    let expected = dim + 1 + has_labels as usize;
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(if has_labels { n } else { 0 });
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        if points.len() == n {
            return Err(perr(lineno, format!("more than {n} site lines")));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != expected {
            return Err(perr(
                lineno,
                format!(
                    "expected {expected} fields (dimension {dim}), found {}",
                    toks.len()
                ),
            ));
        }
        let coords = toks[..dim]
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| perr(lineno, format!("bad coordinate '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let point = Point::new(coords).map_err(|e| perr(lineno, e.to_string()))?;
        let wtok = toks[dim];
        if wtok.starts_with('-') {
            return Err(perr(lineno, format!("negative weight '{wtok}'")));
        }
        let w: u64 = wtok
            .parse()
            .map_err(|_| perr(lineno, format!("bad weight '{wtok}'")))?;
        if w == 0 {
            return Err(perr(lineno, "weight must be positive"));
        }
        if has_labels {
            let t = toks[dim + 1];
            labels.push(
                t.parse::<usize>()
                    .map_err(|_| perr(lineno, format!("bad label '{t}'")))?,
            );
        }
        points.push(point);
        weights.push(w);
    }
    if points.len() != n {
        return Err(perr(
            last_line,
            format!("header declares {n} sites, found {}", points.len()),
        ));
    }
    let x = Dataset::new(points, weights).map_err(|e| perr(hline, e.to_string()))?;
    if has_labels {
        x.with_labels(labels)
            .map_err(|e| perr(hline, e.to_string()))
    } else {
        Ok(x)
    }
}
