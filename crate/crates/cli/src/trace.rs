//! CSV traces: `t,x1..xn,u1..um` followed by module-specific columns, every
//! value printed with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use fts_core::Trajectory;

use crate::error::{io, Error, Result};

/// Extra per-sample columns appended after the controls.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Columns {
    pub names: Vec<String>,
    /// One row per trajectory sample.
    pub rows: Vec<Vec<f64>>,
}

impl Columns {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.names.len());
        self.rows.push(row);
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub fn header(traj: &Trajectory, extra: &Columns) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=traj.dim()).map(|i| format!("x{i}")));
    h.extend((1..=traj.control_dim()).map(|i| format!("u{i}")));
    h.extend(extra.names.iter().cloned());
    h
}

pub fn render(traj: &Trajectory, extra: &Columns) -> String {
    let mut out = header(traj, extra).join(",");
    out.push('\n');
    for (i, (t, x, u)) in traj.iter().enumerate() {
        let more = extra.rows.get(i).map(Vec::as_slice).unwrap_or(&[]);
        let mut first = true;
        for v in std::iter::once(&t).chain(x).chain(u).chain(more) {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, traj: &Trajectory, extra: &Columns) -> Result<()> {
    std::fs::write(path, render(traj, extra)).map_err(io(path))
}

/// A trace read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

pub fn parse(text: &str, origin: &str) -> Result<Table> {
    let bad = |line: usize, message: String| Error::Parse {
        origin: origin.to_string(),
        line,
        column: 1,
        message,
    };
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| bad(1, "empty trace".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|v| v.parse::<f64>().map_err(|e| bad(i + 2, format!("`{v}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(bad(i + 2, format!("{} fields, header has {}", row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

pub fn read(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    parse(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fts_core::{integrate, FnField, StepPolicy};

    #[test]
    fn values_survive_the_round_trip_exactly() {
        let f = FnField::new(2, |_, x: &[f64], dx: &mut [f64]| {
            dx[0] = x[1];
            dx[1] = -x[0] / 3.0;
        });
        let traj = integrate(&f, &[1.0 / 3.0, 1e-300], 0.0, 0.1, &StepPolicy::default(), None).unwrap();
        let mut extra = Columns::new(vec!["V".into()]);
        for (_, x, _) in traj.iter() {
            extra.push(vec![x[0] * x[0] + x[1] * x[1]]);
        }
        let table = parse(&render(&traj, &extra), "mem").unwrap();
        assert_eq!(table.header, ["t", "x1", "x2", "V"]);
        assert_eq!(table.rows.len(), traj.len());
        for (i, row) in table.rows.iter().enumerate() {
            assert_eq!(row[0], traj.time(i));
            assert_eq!(&row[1..3], traj.state(i));
            assert_eq!(row[3], extra.rows[i][0]);
        }
    }

    #[test]
    fn malformed_rows_are_located() {
        assert!(matches!(parse("t,x1\n0,1\n1\n", "mem"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse("t,x1\n0,abc\n", "mem"), Err(Error::Parse { line: 2, .. })));
    }
}
