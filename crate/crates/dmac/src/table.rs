//! Plot-data tables: CSV with an optional `#` metadata line and numbers
//! printed to 12 significant digits.

use std::io::Write;

/// Formats `x` with 12 significant digits, in fixed notation for moderate
/// magnitudes and scientific notation otherwise, without trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A table with a header row and numeric cells; `None` cells are empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub metadata: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            ..Self::default()
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> csv::Result<()> {
        if let Some(meta) = &self.metadata {
            writeln!(out, "# {meta}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(fmt_sig).unwrap_or_default()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Reads a table written by [`Table::write_csv`].
    pub fn parse_csv(text: &str) -> Result<Self, String> {
        let metadata = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .map(str::to_string);
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.map_err(|e| e.to_string())?;
            let row = record
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>()
                            .map(Some)
                            .map_err(|e| format!("{cell:?}: {e}"))
                    }
                })
                .collect::<Result<_, String>>()?;
            rows.push(row);
        }
        Ok(Self {
            metadata,
            header,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}
