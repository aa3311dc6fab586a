//! Result rows and their CSV / JSON encodings.

use std::io::Write;

use modssd::modular::LogicalState;
use modssd::Complex64;
use serde_json::{Map, Number, Value as Json};

use crate::config::Format;

#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    /// Row-major square matrix.
    Matrix(Vec<Vec<Complex64>>),
}

#[derive(Debug, Clone, Default)]
pub struct Row(pub Vec<(String, Value)>);

impl Row {
    pub fn int(&mut self, k: &str, v: i64) -> &mut Self {
        self.0.push((k.into(), Value::Int(v)));
        self
    }

    pub fn float(&mut self, k: &str, v: f64) -> &mut Self {
        self.0.push((k.into(), Value::Float(v)));
        self
    }

    pub fn text(&mut self, k: &str, v: impl Into<String>) -> &mut Self {
        self.0.push((k.into(), Value::Text(v.into())));
        self
    }

    pub fn complex(&mut self, k: &str, v: Complex64) -> &mut Self {
        self.float(&format!("{k}_re"), v.re).float(&format!("{k}_im"), v.im)
    }

    pub fn state(&mut self, k: &str, s: &LogicalState) -> &mut Self {
        let n = s.dim();
        let m = (0..n).map(|i| (0..n).map(|j| s.get(i, j)).collect()).collect();
        self.0.push((k.into(), Value::Matrix(m)));
        self
    }

    fn columns(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (k, v) in &self.0 {
            match v {
                Value::Int(i) => out.push((k.clone(), i.to_string())),
                Value::Float(x) => out.push((k.clone(), fmt_float(*x))),
                Value::Text(t) => out.push((k.clone(), t.clone())),
                Value::Matrix(m) => {
                    for (i, r) in m.iter().enumerate() {
                        for (j, z) in r.iter().enumerate() {
                            out.push((format!("{k}_{i}{j}_re"), fmt_float(z.re)));
                            out.push((format!("{k}_{i}{j}_im"), fmt_float(z.im)));
                        }
                    }
                }
            }
        }
        out
    }

    fn json(&self) -> Json {
        let num = |x: f64| Number::from_f64(x).map(Json::Number).unwrap_or(Json::Null);
        let mut map = Map::new();
        for (k, v) in &self.0 {
            match v {
                Value::Int(i) => {
                    map.insert(k.clone(), Json::from(*i));
                }
                Value::Float(x) => {
                    map.insert(k.clone(), num(*x));
                }
                Value::Text(t) => {
                    map.insert(k.clone(), Json::from(t.clone()));
                }
                Value::Matrix(m) => {
                    let part = |f: fn(&Complex64) -> f64| {
                        Json::Array(m.iter().map(|r| Json::Array(r.iter().map(|z| num(f(z))).collect())).collect())
                    };
                    map.insert(format!("{k}_re"), part(|z| z.re));
                    map.insert(format!("{k}_im"), part(|z| z.im));
                }
            }
        }
        Json::Object(map)
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, out: W) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
            if let Some(first) = rows.first() {
                w.write_record(first.columns().iter().map(|(k, _)| k))?;
            }
            for r in rows {
                w.write_record(r.columns().iter().map(|(_, v)| v))?;
            }
            w.flush()
        }
        Format::Json => {
            let mut out = out;
            for r in rows {
                serde_json::to_writer(&mut out, &r.json())?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let s = LogicalState::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let mut r = Row::default();
        r.int("d", 2).float("x", 0.1).state("rho", &s).text("status", "ok");
        let mut buf = Vec::new();
        write_rows(&[r], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("d,x,rho_00_re,rho_00_im,rho_01_re"));
        assert!(lines[1].starts_with("2,1.0000000000000001e-1,1.0000000000000000e0,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_matrix_rows() {
        let s = LogicalState::pure(&[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let mut r = Row::default();
        r.state("rho", &s);
        let j = r.json();
        assert!((j["rho_im"][0][1].as_f64().unwrap() + 0.48).abs() < 1e-15);
        assert!((j["rho_im"][1][0].as_f64().unwrap() - 0.48).abs() < 1e-15);
    }
}
