use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
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

/// Seventeen significant digits, scientific notation; round-trips every finite `f64`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v == 0.0 {
        // Keep the sign of negative zero out of the files.
        "0.0000000000000000e0".into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn push_reals(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::Real(v)).collect());
    }

    /// UTF-8 CSV with a header row and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, c) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                match c {
                    Cell::Int(i) => write!(out, "{i}").expect("write to string"),
                    Cell::Real(v) => out.push_str(&format_real(*v)),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[k] {
                    Cell::Int(i) => i as f64,
                    Cell::Real(v) => v,
                })
                .collect(),
        )
    }
}

/// Cell-wise comparison of two CSV texts; `None` when every numeric cell agrees to `tol`
/// and every other cell matches exactly.
pub fn compare_csv(a: &str, b: &str, tol: f64) -> Option<String> {
    let (la, lb): (Vec<&str>, Vec<&str>) = (a.lines().collect(), b.lines().collect());
    if la.len() != lb.len() {
        return Some(format!("{} vs {} lines", la.len(), lb.len()));
    }
    for (n, (x, y)) in la.iter().zip(&lb).enumerate() {
        let (cx, cy): (Vec<&str>, Vec<&str>) = (x.split(',').collect(), y.split(',').collect());
        if cx.len() != cy.len() {
            return Some(format!("line {}: {} vs {} cells", n + 1, cx.len(), cy.len()));
        }
        for (p, q) in cx.iter().zip(&cy) {
            let same = match (p.parse::<f64>(), q.parse::<f64>()) {
                (Ok(u), Ok(v)) => (u.is_nan() && v.is_nan()) || u == v || (u - v).abs() < tol,
                _ => p == q,
            };
            if !same {
                return Some(format!("line {}: {p} vs {q}", n + 1));
            }
        }
    }
    None
}
