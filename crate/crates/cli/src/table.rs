use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(
        &self,
        out: &mut dyn Write,
        format: Format,
        precision: usize,
    ) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|c| render(c, precision)))?;
                }
                w.flush()
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        for (h, c) in self.headers.iter().zip(row) {
                            m.insert(h.clone(), json_cell(c, precision));
                        }
                        Value::Object(m)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &records)?;
                writeln!(out)
            }
        }
    }
}

fn render(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(x) => format_g(*x, precision),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(c: &Cell, precision: usize) -> Value {
    match c {
        // Round through the text form so both formats carry identical values.
        Cell::Num(x) => format_g(*x, precision)
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::from(s.as_str()),
    }
}

/// C `%.{p}g`.
pub fn format_g(x: f64, p: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let p = p.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(format_g(2.4e-5, 12), "2.4e-05");
        assert_eq!(format_g(0.123456789012345, 12), "0.123456789012");
        assert_eq!(format_g(1.0, 12), "1");
        assert_eq!(format_g(1234567.0, 6), "1.23457e+06");
        assert_eq!(format_g(100000.0, 6), "100000");
        assert_eq!(format_g(0.0001, 6), "0.0001");
        assert_eq!(format_g(-3.5e120, 12), "-3.5e+120");
        assert_eq!(format_g(f64::NAN, 12), "nan");
        assert_eq!(format_g(9.9999999999999e-5, 6), "0.0001");
    }

    #[test]
    fn round_trips_to_precision() {
        for &x in &[1.0 / 3.0, 6.000043e-6, 0.17749, 1.552119055e-4, 123456.789] {
            for p in 6..=17 {
                let back: f64 = format_g(x, p).parse().unwrap();
                assert!(((back - x) / x).abs() <= 0.5 * 10f64.powi(1 - p as i32));
            }
        }
        let x = 0.1 + 0.2;
        assert_eq!(format_g(x, 17).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_and_json_layout() {
        let mut t = Table::new(&["n", "x", "note"]);
        t.push(vec![Cell::Int(1), Cell::Num(0.5), Cell::Text("a,b".into())]);
        t.push(vec![
            Cell::Int(2),
            Cell::Num(f64::NAN),
            Cell::Text(String::new()),
        ]);
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Csv, 12).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,x,note\n1,0.5,\"a,b\"\n2,nan,\n"
        );
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Json, 12).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["x"], 0.5);
        assert!(v[1]["x"].is_null());
        let keys: Vec<_> = v[0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["n", "x", "note"]);
    }
}
