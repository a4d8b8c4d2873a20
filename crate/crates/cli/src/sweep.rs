//! Sweepable command-line values and the CSV format.
//!
//! A sweep is either one fixed value or `start:stop:count` with inclusive
//! endpoints; the count must be at least two so endpoints are always hit
//! exactly. Output files start with a `#`-prefixed header block recording
//! every parameter, then a column header row, then data rows with floats at
//! twelve significant digits, so identical invocations are byte-identical
//! and every file can be reloaded losslessly.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Fixed(f64),
    Range { start: f64, stop: f64, count: usize },
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Sweep::Fixed(v) => vec![v],
            Sweep::Range { start, stop, count } => (0..count)
                .map(|i| {
                    if i + 1 == count {
                        stop
                    } else {
                        start + (stop - start) * (i as f64) / ((count - 1) as f64)
                    }
                })
                .collect(),
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Sweep::Fixed(v) => write!(f, "{v}"),
            Sweep::Range { start, stop, count } => write!(f, "{start}:{stop}:{count}"),
        }
    }
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if !s.contains(':') {
            let v: f64 = s.parse().map_err(|_| format!("not a number: `{s}`"))?;
            return Ok(Sweep::Fixed(v));
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected START:STOP:COUNT, got `{s}`"));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| format!("bad range start `{}`", parts[0]))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| format!("bad range stop `{}`", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad range count `{}`", parts[2]))?;
        if count < 2 {
            return Err(format!("swept variables need at least 2 steps, got {count}"));
        }
        Ok(Sweep::Range { start, stop, count })
    }
}

/// Format a float with twelve significant digits.
pub fn fmt_float(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.11e}")
}

/// Writer for the self-describing CSV layout.
pub struct CsvWriter<'w> {
    sink: &'w mut dyn Write,
}

impl<'w> CsvWriter<'w> {
    pub fn new(sink: &'w mut dyn Write, experiment: &str) -> io::Result<Self> {
        writeln!(sink, "# tool: nla {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(sink, "# experiment: {experiment}")?;
        Ok(Self { sink })
    }

    pub fn param(&mut self, name: &str, value: impl fmt::Display) -> io::Result<()> {
        writeln!(self.sink, "# {name}: {value}")
    }

    pub fn columns(&mut self, names: &[&str]) -> io::Result<()> {
        writeln!(self.sink, "{}", names.join(","))
    }

    pub fn row(&mut self, values: &[f64]) -> io::Result<()> {
        let cells: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
        writeln!(self.sink, "{}", cells.join(","))
    }
}

/// A CSV file read back: header parameters, column names and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Parse a file produced by [`CsvWriter`]; numbers reproduce exactly.
pub fn read_csv(text: &str) -> Result<CsvData, String> {
    let mut params = Vec::new();
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((k, v)) = rest.split_once(": ") {
                params.push((k.to_string(), v.to_string()));
            } else {
                params.push((rest.to_string(), String::new()));
            }
        } else if columns.is_empty() {
            columns = line.split(',').map(str::to_string).collect();
        } else {
            let row: Result<Vec<f64>, _> = line
                .split(',')
                .map(|cell| {
                    if cell == "inf" {
                        Ok(f64::INFINITY)
                    } else if cell == "-inf" {
                        Ok(f64::NEG_INFINITY)
                    } else {
                        cell.parse::<f64>().map_err(|e| format!("bad cell `{cell}`: {e}"))
                    }
                })
                .collect();
            rows.push(row?);
        }
    }
    if columns.is_empty() {
        return Err("no column header found".into());
    }
    Ok(CsvData {
        params,
        columns,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fixed_and_range() {
        assert_eq!("0.5".parse::<Sweep>().unwrap(), Sweep::Fixed(0.5));
        let r: Sweep = "0:1:101".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[100], 1.0);
        assert_eq!(v[50], 0.5);
        assert!("0:1:1".parse::<Sweep>().is_err());
        assert!("0:1".parse::<Sweep>().is_err());
        assert!("x".parse::<Sweep>().is_err());
    }

    #[test]
    fn float_round_trip_is_exact_at_twelve_digits() {
        for v in [0.8 / 0.35, 1.0 / 3.0, 7.238_241_4, 2.285_714_285_714_285_7] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert!((back - v).abs() <= v.abs() * 1e-11);
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut buf: Vec<u8> = Vec::new();
        {
            let mut w = CsvWriter::new(&mut buf, "demo").unwrap();
            w.param("gamma", 0.5).unwrap();
            w.columns(&["t", "g"]).unwrap();
            w.row(&[0.5, 1.0]).unwrap();
            w.row(&[0.8, 0.8 / 0.35]).unwrap();
        }
        let text = String::from_utf8(buf).unwrap();
        let data = read_csv(&text).unwrap();
        assert_eq!(data.columns, vec!["t", "g"]);
        assert_eq!(data.rows.len(), 2);
        let reparsed: f64 = fmt_float(data.rows[1][1]).parse().unwrap();
        assert_eq!(reparsed, data.rows[1][1]);
    }
}
