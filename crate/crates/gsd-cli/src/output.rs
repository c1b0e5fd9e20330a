//! Deterministic emitters: JSON with sorted keys and `%.17g` floats, and CSV.

use serde::Serialize;
use serde_json::Value;
use std::fmt::Write;

/// C's `%.17g`.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_json(v: &Value, out: &mut String, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                let f = n.as_f64().expect("float");
                let s = g17(f);
                // keep floats recognisable as floats
                if s.contains(['.', 'e']) || !f.is_finite() {
                    out.push_str(&s);
                } else {
                    write!(out, "{s}.0").unwrap();
                }
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            // numeric arrays on one line
            if a.iter().all(|x| x.is_number() || x.is_null()) {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(x, out, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(x, out, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            // serde_json's default map is ordered by key
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_json(x, out, indent + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Serialize to deterministic JSON text (trailing newline included).
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_json(&v, &mut out, 0);
    out.push('\n');
    Ok(out)
}

/// One CSV row of a spectrum listing.
pub struct CsvRow<'a> {
    pub value: f64,
    pub residual: f64,
    pub method: &'a str,
}

/// `index,value,residual,method`, one eigenvalue per line.
pub fn spectrum_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from("index,value,residual,method\n");
    for (i, r) in rows.iter().enumerate() {
        writeln!(out, "{i},{},{},{}", g17(r.value), g17(r.residual), r.method).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (1.6484541547, "1.6484541547"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (1e-4, "0.0001"),
            (0.0, "0"),
        ];
        for (x, s) in cases {
            assert_eq!(g17(x), s, "{x}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [1.0 / 3.0, 2e-300, 7.25e22, -0.000123456789123456789, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_is_sorted_and_reparses() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: Vec<f64>,
            n: usize,
        }
        let s = to_json(&S { zeta: 0.1, alpha: vec![1.0, 2.5], n: 3 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["zeta"].as_f64(), Some(0.1));
        assert_eq!(v["alpha"][0].as_f64(), Some(1.0));
    }

    #[test]
    fn csv_header() {
        let s = spectrum_csv(&[CsvRow { value: 1.5, residual: 0.0, method: "secular" }]);
        assert_eq!(s, "index,value,residual,method\n0,1.5,0,secular\n");
    }
}
