//! JSON documents: lattices, Mukai vectors, isometries, Frobenius data, root sets,
//! requests and reports. Integers are arbitrary precision and written in decimal.

use std::fmt::Write as _;

use mukai_core::{Error, IntMatrix, MukaiVector, Result};
use num_bigint::BigInt;
use serde_json::{Map, Number, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Lattice { gram: IntMatrix },
    MukaiVector(MukaiVector),
    Isometry { matrix: IntMatrix },
    Frobenius { p: BigInt, q: BigInt, charpoly: Vec<BigInt> },
    RootSet { roots: Vec<Vec<BigInt>> },
    Request { command: String, fields: Map<String, Value> },
    Report { kind: String, fields: Map<String, Value> },
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

pub fn int_value(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse::<Number>().expect("decimal integers are valid JSON numbers"))
}

pub fn vec_value(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_value).collect())
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vec_value(r)).collect())
}

pub fn as_int(v: &Value, what: &str) -> Result<BigInt> {
    let Value::Number(n) = v else {
        return Err(malformed(format!("{what}: expected an integer")));
    };
    let s = n.to_string();
    let digits = s.strip_prefix('-').unwrap_or(&s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(format!("{what}: expected an integer, got {s}")));
    }
    s.parse().map_err(|_| malformed(format!("{what}: bad integer {s}")))
}

pub fn as_int_vec(v: &Value, what: &str) -> Result<Vec<BigInt>> {
    let Value::Array(items) = v else {
        return Err(malformed(format!("{what}: expected an array of integers")));
    };
    items.iter().map(|x| as_int(x, what)).collect()
}

pub fn as_rows(v: &Value, what: &str) -> Result<Vec<Vec<BigInt>>> {
    let Value::Array(rows) = v else {
        return Err(malformed(format!("{what}: expected an array of rows")));
    };
    rows.iter().map(|r| as_int_vec(r, what)).collect()
}

pub fn as_matrix(v: &Value, what: &str) -> Result<IntMatrix> {
    let rows = as_rows(v, what)?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(malformed(format!("{what}: rows have different lengths")));
    }
    IntMatrix::from_rows_with_cols(rows, cols)
}

fn expect_keys(obj: &Map<String, Value>, keys: &[&str], what: &str) -> Result<()> {
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(malformed(format!("{what}: unexpected field {k:?}")));
        }
    }
    for k in keys {
        if !obj.contains_key(*k) {
            return Err(malformed(format!("{what}: missing field {k:?}")));
        }
    }
    Ok(())
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let value: Value = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
        Document::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Document> {
        let Value::Object(obj) = value else {
            return Err(malformed("a document must be a JSON object"));
        };
        if let Some(kind) = obj.get("report") {
            let Value::String(kind) = kind else {
                return Err(malformed("report: the \"report\" field must be a string"));
            };
            let mut fields = obj.clone();
            fields.shift_remove("report");
            return Ok(Document::Report { kind: kind.clone(), fields });
        }
        if let Some(command) = obj.get("request") {
            let Value::String(command) = command else {
                return Err(malformed("request: the \"request\" field must be a string"));
            };
            let mut fields = obj.clone();
            fields.shift_remove("request");
            return Ok(Document::Request { command: command.clone(), fields });
        }
        if obj.contains_key("gram") {
            expect_keys(obj, &["gram"], "lattice")?;
            return Ok(Document::Lattice { gram: as_matrix(&obj["gram"], "gram")? });
        }
        if obj.contains_key("c1") {
            expect_keys(obj, &["r", "c1", "s"], "mukai vector")?;
            return Ok(Document::MukaiVector(MukaiVector {
                r: as_int(&obj["r"], "r")?,
                c1: as_int_vec(&obj["c1"], "c1")?,
                s: as_int(&obj["s"], "s")?,
            }));
        }
        if obj.contains_key("matrix") {
            expect_keys(obj, &["matrix"], "isometry")?;
            return Ok(Document::Isometry { matrix: as_matrix(&obj["matrix"], "matrix")? });
        }
        if obj.contains_key("charpoly") {
            expect_keys(obj, &["p", "q", "charpoly"], "frobenius")?;
            return Ok(Document::Frobenius {
                p: as_int(&obj["p"], "p")?,
                q: as_int(&obj["q"], "q")?,
                charpoly: as_int_vec(&obj["charpoly"], "charpoly")?,
            });
        }
        if obj.contains_key("roots") {
            expect_keys(obj, &["roots"], "rootset")?;
            let roots = as_rows(&obj["roots"], "roots")?;
            if let Some(first) = roots.first() {
                if roots.iter().any(|r| r.len() != first.len()) {
                    return Err(malformed("roots: vectors have different lengths"));
                }
            }
            return Ok(Document::RootSet { roots });
        }
        Err(malformed(
            "unrecognised document: expected one of gram, r/c1/s, matrix, p/q/charpoly, roots, request, report",
        ))
    }

    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        match self {
            Document::Lattice { gram } => {
                obj.insert("gram".into(), matrix_value(gram));
            }
            Document::MukaiVector(v) => {
                obj.insert("r".into(), int_value(&v.r));
                obj.insert("c1".into(), vec_value(&v.c1));
                obj.insert("s".into(), int_value(&v.s));
            }
            Document::Isometry { matrix } => {
                obj.insert("matrix".into(), matrix_value(matrix));
            }
            Document::Frobenius { p, q, charpoly } => {
                obj.insert("p".into(), int_value(p));
                obj.insert("q".into(), int_value(q));
                obj.insert("charpoly".into(), vec_value(charpoly));
            }
            Document::RootSet { roots } => {
                obj.insert("roots".into(), Value::Array(roots.iter().map(|r| vec_value(r)).collect()));
            }
            Document::Request { command, fields } => {
                obj.insert("request".into(), Value::String(command.clone()));
                obj.extend(fields.clone());
            }
            Document::Report { kind, fields } => {
                obj.insert("report".into(), Value::String(kind.clone()));
                obj.extend(fields.clone());
            }
        }
        Value::Object(obj)
    }

    pub fn print(&self) -> String {
        render(&self.to_value())
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        _ => false,
    }
}

fn is_matrix(v: &Value) -> bool {
    match v {
        Value::Array(items) => !items.is_empty() && items.iter().all(is_flat),
        _ => false,
    }
}

/// Deterministic layout: objects one field per line, flat arrays inline, matrices one row per line.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn scalar(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON scalars serialize")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(obj) if obj.is_empty() => out.push_str("{}"),
        Value::Object(obj) => {
            out.push_str("{\n");
            for (i, (k, val)) in obj.iter().enumerate() {
                let _ = write!(out, "{pad}  {}: ", scalar(&Value::String(k.clone())));
                write_value(out, val, indent + 1);
                if i + 1 < obj.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{pad}}}");
        }
        Value::Array(items) if is_flat(v) => {
            out.push('[');
            out.push_str(&items.iter().map(scalar).collect::<Vec<_>>().join(", "));
            out.push(']');
        }
        Value::Array(items) if is_matrix(v) => {
            out.push_str("[\n");
            for (i, row) in items.iter().enumerate() {
                let _ = write!(out, "{pad}  ");
                write_value(out, row, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{pad}]");
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                let _ = write!(out, "{pad}  ");
                write_value(out, item, indent + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{pad}]");
        }
        other => out.push_str(&scalar(other)),
    }
}

/// `"1,0,-2"`; the empty string is the empty vector.
pub fn parse_vector(s: &str) -> Result<Vec<BigInt>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let digits = t.strip_prefix('-').or_else(|| t.strip_prefix('+')).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed(format!("bad integer {t:?} in vector {s:?}")));
            }
            t.parse::<BigInt>().map_err(|_| malformed(format!("bad integer {t:?}")))
        })
        .collect()
}

/// Rows separated by `;`, entries by `,`: `"1,0;0,1"`.
pub fn parse_rows(s: &str) -> Result<Vec<Vec<BigInt>>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let rows: Vec<Vec<BigInt>> = s.split(';').map(parse_vector).collect::<Result<_>>()?;
    if let Some(first) = rows.first() {
        if rows.iter().any(|r| r.len() != first.len()) {
            return Err(malformed(format!("rows of {s:?} have different lengths")));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mukai_core::arith::ints;

    #[test]
    fn round_trips() {
        let docs = [
            r#"{"gram": [[2, 1], [1, -2]]}"#,
            r#"{"r": 1, "c1": [0, 3], "s": -123456789012345678901234567890}"#,
            r#"{"matrix": [[1, 0], [0, 1]]}"#,
            r#"{"roots": []}"#,
            r#"{"roots": [[0, 1]]}"#,
            r#"{"report": "disc", "invariant_factors": [2, 6], "order": 12}"#,
            r#"{"request": "pair", "u": [1, 0, 0]}"#,
        ];
        for text in docs {
            let d = Document::parse(text).unwrap();
            assert_eq!(Document::parse(&d.print()).unwrap(), d, "{text}");
        }
    }

    #[test]
    fn big_integers_survive() {
        let d = Document::parse(r#"{"r": 1, "c1": [], "s": -123456789012345678901234567890}"#).unwrap();
        let Document::MukaiVector(v) = &d else { panic!() };
        assert_eq!(v.s.to_string(), "-123456789012345678901234567890");
        assert!(d.print().contains("-123456789012345678901234567890"));
    }

    #[test]
    fn rejects() {
        for text in [
            "[]",
            "{}",
            r#"{"gram": [[1, 2], [3]]}"#,
            r#"{"gram": [[1.5]]}"#,
            r#"{"gram": [[1e3]]}"#,
            r#"{"gram": [[1]], "extra": 0}"#,
            r#"{"r": 1, "c1": [0]}"#,
            r#"{"report": 3}"#,
            r#"{"roots": [[1], [1, 2]]}"#,
            "not json",
        ] {
            assert!(Document::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn layout() {
        let d = Document::Lattice { gram: IntMatrix::from_i64(&[&[2, 0], &[0, -2]]) };
        assert_eq!(d.print(), "{\n  \"gram\": [\n    [2, 0],\n    [0, -2]\n  ]\n}\n");
    }

    #[test]
    fn arguments() {
        assert_eq!(parse_vector("1, 0,-2").unwrap(), ints(&[1, 0, -2]));
        assert_eq!(parse_vector("").unwrap(), ints(&[]));
        assert!(parse_vector("1,,2").is_err());
        assert!(parse_vector("1,x").is_err());
        assert_eq!(parse_rows("1,0;0,1").unwrap(), vec![ints(&[1, 0]), ints(&[0, 1])]);
        assert!(parse_rows("1,0;1").is_err());
    }
}
