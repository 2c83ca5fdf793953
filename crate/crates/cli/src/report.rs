use arakelov_core::{HeightBreakdown, PrecisionContext};
use rug::{Complex, Float};
use serde_json::{json, Map, Value};

/// Significant decimal digits carried by `bits` of mantissa.
pub fn digits(bits: u32) -> usize {
    ((bits as f64) * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

/// Plain decimal for moderate exponents, scientific otherwise.
pub fn fmt_float(f: &Float, bits: u32) -> String {
    if f.is_zero() {
        return "0".into();
    }
    if !f.is_finite() {
        return f.to_string();
    }
    let n = digits(bits);
    let s = f.to_string_radix(10, Some(n));
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i64>().unwrap_or(0)),
        None => (s.clone(), 0),
    };
    let neg = mant.starts_with('-');
    let m = mant.trim_start_matches('-');
    let (ip, fp) = m.split_once('.').unwrap_or((m, ""));
    let all: String = format!("{ip}{fp}");
    // value = 0.all × 10^(exp + ip.len())
    let point = exp + ip.len() as i64;
    if !(-6..=24).contains(&point) {
        return s;
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-point) as usize));
        out.push_str(&all);
    } else if point as usize >= all.len() {
        out.push_str(&all);
        out.push_str(&"0".repeat(point as usize - all.len()));
    } else {
        out.push_str(&all[..point as usize]);
        out.push('.');
        out.push_str(&all[point as usize..]);
    }
    if out.contains('.') {
        let t = out.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        out
    }
}

pub fn num(f: &Float, ctx: &PrecisionContext) -> Value {
    Value::String(fmt_float(f, ctx.bits))
}

pub fn cnum(c: &Complex, ctx: &PrecisionContext) -> Value {
    json!({"re": num(c.real(), ctx), "im": num(c.imag(), ctx)})
}

pub fn opt(f: &Option<Float>, ctx: &PrecisionContext) -> Value {
    f.as_ref().map(|x| num(x, ctx)).unwrap_or(Value::Null)
}

/// {"total", "places": [...], "precision_bits", "warnings"} plus extras appended after.
pub fn breakdown_doc(b: &HeightBreakdown, total: &Float, warnings: &[String], ctx: &PrecisionContext) -> Map<String, Value> {
    let places: Vec<Value> = b
        .entries
        .iter()
        .map(|e| {
            json!({
                "place": e.place.to_string(),
                "d_v": e.d_v,
                "alpha": opt(&e.alpha, ctx),
                "lambda": opt(&e.lambda, ctx),
                "mu": opt(&e.mu, ctx),
                "beta": opt(&e.beta, ctx),
                "contribution": num(&e.contribution, ctx),
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("total".into(), num(total, ctx));
    m.insert("places".into(), Value::Array(places));
    m.insert("precision_bits".into(), json!(ctx.bits));
    m.insert("warnings".into(), json!(warnings));
    m
}

pub fn plain_doc(ctx: &PrecisionContext) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("precision_bits".into(), json!(ctx.bits));
    m.insert("warnings".into(), json!(Vec::<String>::new()));
    m
}

fn short(v: &Value) -> String {
    match v {
        Value::String(s) => match s.parse::<f64>() {
            Ok(x) if s.len() > 16 => format!("{x:.12}"),
            _ => s.clone(),
        },
        Value::Null => "-".into(),
        Value::Bool(b) => if *b { "yes".into() } else { "NO".into() },
        other => other.to_string(),
    }
}

/// Human-readable rendering of a result document.
pub fn table(doc: &Map<String, Value>) -> String {
    let mut out = String::new();
    if let Some(Value::Array(places)) = doc.get("places") {
        let cols = ["place", "d_v", "alpha", "lambda", "mu", "beta", "contribution"];
        let rows: Vec<Vec<String>> = places
            .iter()
            .map(|p| cols.iter().map(|c| short(p.get(*c).unwrap_or(&Value::Null))).collect())
            .collect();
        let widths: Vec<usize> = (0..cols.len())
            .map(|i| rows.iter().map(|r| r[i].len()).chain([cols[i].len()]).max().unwrap())
            .collect();
        let line = |cells: Vec<String>| -> String {
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
        };
        out.push_str(&line(cols.iter().map(|s| s.to_string()).collect()));
        out.push('\n');
        for r in rows {
            out.push_str(&line(r));
            out.push('\n');
        }
    }
    for (k, v) in doc {
        if k == "places" || k == "warnings" {
            continue;
        }
        match v {
            Value::Array(items) if items.iter().all(|x| x.is_object()) && !items.is_empty() => {
                out.push_str(&format!("{k}:\n"));
                for it in items {
                    let cells: Vec<String> = it.as_object().unwrap().iter().map(|(a, b)| format!("{a}={}", short(b))).collect();
                    out.push_str(&format!("  {}\n", cells.join("  ")));
                }
            }
            Value::Object(o) => {
                let cells: Vec<String> = o.iter().map(|(a, b)| format!("{a}={}", short(b))).collect();
                out.push_str(&format!("{k}: {}\n", cells.join("  ")));
            }
            _ => out.push_str(&format!("{k}: {}\n", short(v))),
        }
    }
    if let Some(Value::Array(w)) = doc.get("warnings") {
        for x in w {
            out.push_str(&format!("warning: {}\n", x.as_str().unwrap_or("")));
        }
    }
    out
}

/// Largest |a − b| over numeric strings at matching positions of two documents.
pub fn max_delta(a: &Value, b: &Value, prec: u32) -> Option<Float> {
    match (a, b) {
        (Value::String(x), Value::String(y)) => {
            let fx = Float::parse(x).ok().map(|v| Float::with_val(prec, v))?;
            let fy = Float::parse(y).ok().map(|v| Float::with_val(prec, v))?;
            Some((fx - fy).abs())
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).filter_map(|(u, v)| max_delta(u, v, prec)).reduce(|m, d| m.max(&d))
        }
        (Value::Object(x), Value::Object(y)) => x
            .iter()
            .filter(|(k, _)| k.as_str() != "precision_bits")
            .filter_map(|(k, u)| y.get(k).and_then(|v| max_delta(u, v, prec)))
            .reduce(|m, d| m.max(&d)),
        _ => None,
    }
}
