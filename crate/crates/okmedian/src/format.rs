//! Text formats for instances and weight vectors.
//!
//! An instance file starts with `n k`, then either `matrix` followed by `n`
//! rows of `n` distances, or `points d` followed by `n` rows of `d`
//! coordinates. Blank lines and lines starting with `#` are skipped.
//!
//! A weight file holds `n` reals, or one of `centrum L`, `kmedian`, `kcenter`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use okmedian_core::instance::metric_from_points;
use okmedian_core::{MetricInstance, WeightVector};

use crate::error::{CliError, CliResult};

/// Points mode keeps the coordinates so they can be written back verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceBody {
    Matrix,
    Points(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub instance: MetricInstance,
    pub body: InstanceBody,
}

fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(source_name: &str, line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { source_name: source_name.to_string(), line, msg: msg.into() }
}

fn numbers<T: std::str::FromStr>(source_name: &str, line: usize, text: &str) -> CliResult<Vec<T>> {
    text.split_whitespace()
        .map(|tok| tok.parse::<T>().map_err(|_| parse_err(source_name, line, format!("bad number `{tok}`"))))
        .collect()
}

pub fn parse_instance(source_name: &str, text: &str) -> CliResult<InstanceFile> {
    let mut lines = records(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(source_name, 1, "empty instance"))?;
    let head: Vec<usize> = numbers(source_name, ln, header)?;
    let [n, k] = head[..] else {
        return Err(parse_err(source_name, ln, "expected `n k`"));
    };
    let (ln, mode) = lines.next().ok_or_else(|| parse_err(source_name, ln, "missing `matrix` or `points d`"))?;
    let mut words = mode.split_whitespace();
    let width = match (words.next(), words.next(), words.next()) {
        (Some("matrix"), None, _) => None,
        (Some("points"), Some(d), None) => {
            Some(d.parse::<usize>().map_err(|_| parse_err(source_name, ln, "bad dimension"))?)
        }
        _ => return Err(parse_err(source_name, ln, "expected `matrix` or `points d`")),
    };
    let expect = width.unwrap_or(n);
    let mut rows = Vec::with_capacity(n);
    for (ln, line) in lines {
        if rows.len() == n {
            return Err(parse_err(source_name, ln, "trailing data"));
        }
        let row: Vec<f64> = numbers(source_name, ln, line)?;
        if row.len() != expect {
            return Err(parse_err(source_name, ln, format!("expected {expect} values, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(parse_err(source_name, text.lines().count(), format!("expected {n} rows, found {}", rows.len())));
    }
    let file = match width {
        None => InstanceFile { instance: MetricInstance::from_rows(&rows, k)?, body: InstanceBody::Matrix },
        Some(_) => InstanceFile { instance: metric_from_points(&rows, k)?, body: InstanceBody::Points(rows) },
    };
    Ok(file)
}

pub fn read_instance(path: &Path) -> CliResult<InstanceFile> {
    let text = fs::read_to_string(path)?;
    parse_instance(&path.display().to_string(), &text)
}

fn push_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

pub fn write_instance(file: &InstanceFile) -> String {
    let inst = &file.instance;
    let n = inst.n();
    let mut out = format!("{} {}\n", n, inst.k());
    match &file.body {
        InstanceBody::Matrix => {
            out.push_str("matrix\n");
            for row in inst.matrix().chunks(n) {
                push_row(&mut out, row);
            }
        }
        InstanceBody::Points(coords) => {
            writeln!(out, "points {}", coords.first().map_or(0, Vec::len)).unwrap();
            for row in coords {
                push_row(&mut out, row);
            }
        }
    }
    out
}

pub fn parse_weights(source_name: &str, text: &str, n: usize) -> CliResult<WeightVector> {
    let body: Vec<(usize, &str)> = records(text).collect();
    let first_line = body.first().map_or(1, |r| r.0);
    let words: Vec<&str> = body.iter().flat_map(|(_, l)| l.split_whitespace()).collect();
    let w = match words[..] {
        ["centrum", ell] => {
            let ell = ell.parse::<usize>().map_err(|_| parse_err(source_name, first_line, "bad centrum size"))?;
            WeightVector::centrum(n, ell)?
        }
        ["kmedian"] => WeightVector::kmedian(n),
        ["kcenter"] => WeightVector::kcenter(n),
        _ => {
            let mut vals = Vec::with_capacity(words.len());
            for (ln, line) in &body {
                vals.extend(numbers::<f64>(source_name, *ln, line)?);
            }
            if vals.len() != n {
                return Err(parse_err(source_name, first_line, format!("expected {n} weights, found {}", vals.len())));
            }
            WeightVector::new(vals)?
        }
    };
    Ok(w)
}

/// `arg` is a path to a weight file if one exists, else the weight text
/// itself.
pub fn load_weights(arg: &str, n: usize) -> CliResult<WeightVector> {
    let path = Path::new(arg);
    if path.is_file() {
        parse_weights(arg, &fs::read_to_string(path)?, n)
    } else {
        parse_weights("<inline>", arg, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let text = "3 1\nmatrix\n0 3 4\n3 0 1\n4 1 0\n";
        let f = parse_instance("t", text).unwrap();
        assert_eq!(f.instance.d(0, 2), 4.0);
        assert_eq!(write_instance(&f), text);
    }

    #[test]
    fn points_round_trip() {
        let text = "# comment\n2 1\npoints 2\n0 0\n3 4\n";
        let f = parse_instance("t", text).unwrap();
        assert_eq!(f.instance.d(0, 1), 5.0);
        assert_eq!(parse_instance("t", &write_instance(&f)).unwrap(), f);
    }

    #[test]
    fn bad_instances() {
        assert!(matches!(parse_instance("t", "2 1\nmatrix\n0 1\n"), Err(CliError::Parse { line: 3, .. })));
        assert!(matches!(parse_instance("t", "2 1\ngrid\n"), Err(CliError::Parse { line: 2, .. })));
        assert!(matches!(parse_instance("t", "2 1\nmatrix\n0 1\n1 x\n"), Err(CliError::Parse { line: 4, .. })));
        assert!(matches!(parse_instance("t", "2 2\nmatrix\n0 1\n1 0\n"), Err(CliError::Core(_))));
    }

    #[test]
    fn weight_forms() {
        assert_eq!(parse_weights("w", "centrum 2", 3).unwrap().as_slice(), &[1.0, 1.0, 0.0]);
        assert_eq!(parse_weights("w", "kmedian\n", 2).unwrap().as_slice(), &[1.0, 1.0]);
        assert_eq!(parse_weights("w", "kcenter", 3).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(parse_weights("w", "3 2\n1", 3).unwrap().as_slice(), &[3.0, 2.0, 1.0]);
        assert!(parse_weights("w", "1 2 3", 3).is_err());
        assert!(parse_weights("w", "1 1", 3).is_err());
        assert!(parse_weights("w", "centrum 4", 3).is_err());
    }
}
