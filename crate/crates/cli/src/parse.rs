use arakelov_core::weierstrass::parse_rational;
use arakelov_core::{Error, FinitePlaceInput, Point, PrecisionContext, Result, SiegelMatrix};
use rug::{Complex, Float};
use serde_json::Value;

fn bad(what: &str, s: &str) -> Error {
    Error::Parse(format!("cannot read {what} from {s:?}"))
}

fn real(s: &str, prec: u32) -> Result<Float> {
    let t = s.trim();
    if t.is_empty() || t == "+" {
        return Ok(Float::with_val(prec, 1));
    }
    if t == "-" {
        return Ok(Float::with_val(prec, -1));
    }
    if t.contains('/') {
        return Ok(Float::with_val(prec, &parse_rational(t)?));
    }
    Float::parse(t).map(|v| Float::with_val(prec, v)).map_err(|_| bad("a real number", s))
}

/// "a", "bi", "a+bi", "a-bi", "i", "-i".
pub fn complex_str(s: &str, prec: u32) -> Result<Complex> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex::with_val(prec, (real(&t, prec)?, 0)));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (real(&body[..k], prec)?, real(&body[k..], prec)?),
        None => (Float::with_val(prec, 0), real(body, prec)?),
    };
    Ok(Complex::with_val(prec, (re, im)))
}

fn complex_value(v: &Value, prec: u32) -> Result<Complex> {
    match v {
        Value::String(s) => complex_str(s, prec),
        Value::Number(n) => Ok(Complex::with_val(prec, (n.as_f64().ok_or_else(|| bad("a number", &n.to_string()))?, 0))),
        Value::Array(a) if a.len() == 2 && a.iter().all(|x| !x.is_array()) => {
            let part = |x: &Value| -> Result<Float> {
                match x {
                    Value::String(s) => real(s, prec),
                    Value::Number(n) => Ok(Float::with_val(prec, n.as_f64().unwrap_or(f64::NAN))),
                    _ => Err(bad("a real part", &x.to_string())),
                }
            };
            Ok(Complex::with_val(prec, (part(&a[0])?, part(&a[1])?)))
        }
        _ => Err(bad("a complex number", &v.to_string())),
    }
}

/// A scalar (g = 1) or a nested g×g array of complex entries.
pub fn tau_literal(s: &str, ctx: &PrecisionContext) -> Result<SiegelMatrix> {
    let p = ctx.prec();
    let v: Value = match serde_json::from_str(s) {
        Ok(v) => v,
        Err(_) => Value::String(s.to_string()),
    };
    let rows = match &v {
        Value::Array(rows) if rows.iter().all(|r| r.is_array() && r.as_array().unwrap().iter().any(|x| x.is_array() || x.is_string())) => rows,
        _ => return SiegelMatrix::scalar(complex_value(&v, p)?),
    };
    let g = rows.len();
    let mut entries = Vec::with_capacity(g * g);
    for r in rows {
        let r = r.as_array().unwrap();
        if r.len() != g {
            return Err(Error::Parse(format!("τ must be square, got a row of length {} for g = {g}", r.len())));
        }
        for x in r {
            entries.push(complex_value(x, p)?);
        }
    }
    SiegelMatrix::new(g, entries)
}

/// A complex scalar or a JSON list of complex entries.
pub fn z_literal(s: &str, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    let p = ctx.prec();
    match serde_json::from_str::<Value>(s) {
        Ok(Value::Array(a)) if a.iter().all(|x| x.is_string() || x.is_array()) => a.iter().map(|x| complex_value(x, p)).collect(),
        Ok(v @ Value::Array(_)) | Ok(v @ Value::Number(_)) | Ok(v @ Value::String(_)) => Ok(vec![complex_value(&v, p)?]),
        _ => Ok(vec![complex_str(s, p)?]),
    }
}

/// "s,t" for the point s + tτ.
pub fn lattice_coords(s: &str, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(bad("lattice coordinates s,t", s));
    }
    Ok((real(parts[0], ctx.prec())?, real(parts[1], ctx.prec())?))
}

/// "x,y" with rational coordinates.
pub fn point(s: &str) -> Result<Point> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(bad("a point x,y", s));
    }
    Ok(Point::Affine(parse_rational(parts[0])?, parse_rational(parts[1])?))
}

pub fn finite_places(s: &str) -> Result<Vec<FinitePlaceInput>> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("finite places: {e}")))?;
    let list = if v.is_array() { v } else { Value::Array(vec![v]) };
    serde_json::from_value(list).map_err(|e| Error::Parse(format!("finite places: {e}")))
}
