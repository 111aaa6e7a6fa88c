//! Report rows and their serialization.
//!
//! The schema is fixed: columns `x,observed,predicted,ratio,tail_bound,notes`
//! in that order, floats printed with 12 significant digits, UTF-8, LF line
//! endings. Row values are rounded to the printed precision on construction,
//! so emit -> parse -> emit is the identity byte for byte.

use limitp::empirical::EmpiricalReport;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub x: u64,
    pub observed: f64,
    pub predicted: f64,
    pub ratio: f64,
    pub tail_bound: f64,
    pub notes: String,
}

impl Row {
    pub fn new(x: u64, observed: f64, predicted: f64, tail_bound: f64, notes: String) -> Self {
        let ratio = if predicted != 0.0 {
            observed / predicted
        } else {
            0.0
        };
        Self {
            x,
            observed: round_sig12(observed),
            predicted: round_sig12(predicted),
            ratio: round_sig12(ratio),
            tail_bound: round_sig12(tail_bound),
            notes,
        }
    }

    pub fn from_report(r: &EmpiricalReport) -> Self {
        let mut row = Self::new(r.x, r.observed, r.predicted, r.tail_bound, r.notes.clone());
        // keep the library's ratio convention rather than recomputing
        row.ratio = round_sig12(r.ratio);
        row
    }
}

/// Round to the value of the 12-significant-digit decimal representation.
pub fn round_sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}")
        .parse()
        .expect("scientific float reparses")
}

/// 12 significant digits, scientific notation (valid in CSV and JSON).
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

pub const CSV_HEADER: &str = "x,observed,predicted,ratio,tail_bound,notes";

fn csv_escape(notes: &str) -> String {
    format!("\"{}\"", notes.replace('"', "\"\""))
}

pub fn emit_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.x,
            fmt12(r.observed),
            fmt12(r.predicted),
            fmt12(r.ratio),
            fmt12(r.tail_bound),
            csv_escape(&r.notes)
        ));
    }
    out
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub fn emit_json(rows: &[Row]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in rows.iter().enumerate() {
        out.push_str(&format!(
            "  {{\"x\":{},\"observed\":{},\"predicted\":{},\"ratio\":{},\"tail_bound\":{},\"notes\":\"{}\"}}{}\n",
            r.x,
            fmt12(r.observed),
            fmt12(r.predicted),
            fmt12(r.ratio),
            fmt12(r.tail_bound),
            json_escape(&r.notes),
            if i + 1 < rows.len() { "," } else { "" }
        ));
    }
    out.push_str("]\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_idempotent() {
        for v in [
            std::f64::consts::PI,
            0.3739558136192,
            1.0,
            0.0,
            -2.5e-17,
            6.02e23,
        ] {
            let once = round_sig12(v);
            assert_eq!(once, round_sig12(once));
            assert_eq!(fmt12(once).parse::<f64>().unwrap(), once);
        }
    }

    #[test]
    fn csv_has_fixed_header_and_quoted_notes() {
        let rows = vec![Row::new(10, 4.0, 4.0, 0.0, "a \"b\", c".into())];
        let csv = emit_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let line = lines.next().unwrap();
        assert!(line.starts_with("10,4.00000000000e0,4.00000000000e0,1.00000000000e0,"));
        assert!(line.ends_with("\"a \"\"b\"\", c\""));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_escapes_notes() {
        let rows = vec![Row::new(1, 0.0, 0.0, 0.0, "line\n\"q\"\\".into())];
        let json = emit_json(&rows);
        assert!(json.contains("line\\n\\\"q\\\"\\\\"));
    }
}
