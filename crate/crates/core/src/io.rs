//! Plain CSV export of tables and matrices. Floats use `{:.16e}` so that a
//! value round-trips exactly.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<i8> for Cell {
    fn from(v: i8) -> Self {
        Cell::Int(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::DimensionMismatch(format!(
                "row of {} cells for {} columns",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.render().as_bytes())
    }
}

/// `row,col,re,im` for every entry, row-major.
pub fn complex_matrix_csv(m: &Array2<C64>) -> String {
    let mut out = String::from("row,col,re,im\n");
    for ((i, j), z) in m.indexed_iter() {
        let _ = writeln!(out, "{i},{j},{},{}", format_float(z.re), format_float(z.im));
    }
    out
}

/// `row,col,value` for every entry, row-major.
pub fn real_matrix_csv(m: &Array2<f64>) -> String {
    let mut out = String::from("row,col,value\n");
    for ((i, j), v) in m.indexed_iter() {
        let _ = writeln!(out, "{i},{j},{}", format_float(*v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, std::f64::consts::PI] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn table_layout() {
        let mut t = CsvTable::new(&["l", "d", "tag"]);
        t.push(vec![2usize.into(), 0.5.into(), "a,b".into()])
            .unwrap();
        assert!(t.push(vec![1usize.into()]).is_err());
        assert_eq!(t.render(), "l,d,tag\n2,5.0000000000000000e-1,\"a,b\"\n");
    }

    #[test]
    fn matrix_layouts() {
        let m = array![[C64::new(1.0, -2.0)]];
        assert_eq!(
            complex_matrix_csv(&m),
            "row,col,re,im\n0,0,1.0000000000000000e0,-2.0000000000000000e0\n"
        );
        let r = array![[0.0, 1.0]];
        assert_eq!(real_matrix_csv(&r).lines().count(), 3);
    }
}
