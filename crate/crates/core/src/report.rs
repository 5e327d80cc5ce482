//! Inequality reports and their CSV / JSON renderings.

use serde::Serialize;

use crate::error::Error;

/// Parameters a report was computed at.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportParams {
    pub p: f64,
    pub weight: String,
    pub r: Option<usize>,
    pub k: Option<usize>,
    /// Remaining parameters as `key=value` pairs joined by `;`.
    pub param: String,
}

impl ReportParams {
    pub fn new(p: f64, weight: impl Into<String>) -> Self {
        ReportParams {
            p,
            weight: weight.into(),
            r: None,
            k: None,
            param: String::new(),
        }
    }

    pub fn r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        if !self.param.is_empty() {
            self.param.push(';');
        }
        self.param.push_str(&format!("{key}={value}"));
        self
    }
}

/// One verified inequality `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub check_id: String,
    pub params: ReportParams,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub constant_formula: String,
    pub margin: f64,
    pub pass: bool,
    pub notes: String,
}

/// `lhs <= rhs (1 + 1e-9) + 10 rel_tol (|lhs| + |rhs|)`.
pub fn passes(lhs: f64, rhs: f64, rel_tol: f64) -> bool {
    if lhs.is_nan() || rhs.is_nan() {
        return false;
    }
    lhs <= rhs * (1.0 + 1e-9) + 10.0 * rel_tol * (lhs.abs() + rhs.abs())
}

impl InequalityReport {
    pub fn new(
        check_id: impl Into<String>,
        params: ReportParams,
        lhs: f64,
        rhs: f64,
        constant: f64,
        constant_formula: impl Into<String>,
        rel_tol: f64,
    ) -> Self {
        InequalityReport {
            check_id: check_id.into(),
            params,
            lhs,
            rhs,
            constant,
            constant_formula: constant_formula.into(),
            margin: rhs - lhs,
            pass: passes(lhs, rhs, rel_tol),
            notes: String::new(),
        }
    }

    /// A report for a check that could not be evaluated.
    pub fn failed(check_id: impl Into<String>, params: ReportParams, err: &Error) -> Self {
        InequalityReport {
            check_id: check_id.into(),
            params,
            lhs: f64::NAN,
            rhs: f64::NAN,
            constant: f64::NAN,
            constant_formula: String::new(),
            margin: f64::NAN,
            pass: false,
            notes: format!("error: {err}"),
        }
    }

    pub fn with_note(mut self, note: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note.as_ref());
        self
    }

    /// Forces the verdict; used for empirical rows that are reported, not asserted.
    pub fn informational(mut self) -> Self {
        self.pass = true;
        self.with_note("informational")
    }
}

/// `%.12g`-style rendering.
pub fn fmt_g12(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", v);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}{:02}", trim(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn opt(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "check_id,p,weight,r,k,param,lhs,rhs,constant,margin,pass";

pub fn to_csv(reports: &[InequalityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let row = [
            csv_field(&r.check_id),
            fmt_g12(r.params.p),
            csv_field(&r.params.weight),
            opt(r.params.r),
            opt(r.params.k),
            csv_field(&r.params.param),
            fmt_g12(r.lhs),
            fmt_g12(r.rhs),
            fmt_g12(r.constant),
            fmt_g12(r.margin),
            r.pass.to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json_num(v: f64) -> serde_json::Value {
    let s = fmt_g12(v);
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => serde_json::json!(x),
        _ => serde_json::Value::String(s),
    }
}

pub fn to_json(reports: &[InequalityReport]) -> String {
    let rows: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            serde_json::json!({
                "check_id": r.check_id,
                "p": json_num(r.params.p),
                "weight": r.params.weight,
                "r": r.params.r,
                "k": r.params.k,
                "param": r.params.param,
                "lhs": json_num(r.lhs),
                "rhs": json_num(r.rhs),
                "constant": json_num(r.constant),
                "margin": json_num(r.margin),
                "pass": r.pass,
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("report rows serialize");
    s.push('\n');
    s
}
