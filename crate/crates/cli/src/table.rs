//! CSV result tables: fixed column order, 17-significant-digit reals, and a
//! provenance footer. Identical configs produce byte-identical output.

pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

/// Decimal formatting with 17 significant digits: lossless f64 round trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultTable {
    pub fn new(header: Vec<String>) -> Self {
        ResultTable {
            header,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for line in &self.footer {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_lossless() {
        for x in [1.0 / 3.0, 2.225e-308, 9.9e307, -0.1, 0.0] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = ResultTable::new(vec!["a".into(), "b".into()]);
        t.push_row(vec!["1".into(), "2".into()]);
        t.footer.push("version=0".into());
        assert_eq!(t.to_csv(), "a,b\n1,2\n# version=0\n");
    }
}
