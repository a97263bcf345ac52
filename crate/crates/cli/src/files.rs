//! JSON system files: `{"params": {...}}` or `{"qsde": {...}}`.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use spinreal::algebra::{ComplexRow3, RealMat3, RealRow3, RealVec3};
use spinreal::{BilinearQsde, PhysicalParams};

#[derive(Debug, Clone, PartialEq)]
pub enum SystemFile {
    Params(PhysicalParams),
    Qsde(Box<BilinearQsde>),
}

/// A loaded file together with the SHA-256 of its bytes.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub system: SystemFile,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Loaded, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let sha256 = crate::report::digest(&bytes);
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| format!("{}: invalid JSON: {e}", path.display()))?;
    let system = parse(&value).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Loaded { system, sha256 })
}

pub fn parse(value: &Value) -> Result<SystemFile, String> {
    let obj = value.as_object().ok_or("top level: expected an object")?;
    reject_unknown(obj, "top level", &["params", "qsde"])?;
    match (obj.get("params"), obj.get("qsde")) {
        (Some(p), None) => parse_params(p).map(SystemFile::Params),
        (None, Some(q)) => parse_qsde(q).map(|q| SystemFile::Qsde(Box::new(q))),
        (Some(_), Some(_)) => Err("top level: exactly one of \"params\" and \"qsde\" is allowed, found both".into()),
        (None, None) => Err("top level: expected a \"params\" or \"qsde\" object".into()),
    }
}

fn reject_unknown(obj: &Map<String, Value>, at: &str, allowed: &[&str]) -> Result<(), String> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(format!("{at}: unknown field \"{k}\"")),
        None => Ok(()),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, parent: &str, name: &str) -> Result<&'a Value, String> {
    obj.get(name).ok_or_else(|| format!("{parent}.{name}: missing"))
}

fn real(v: &Value, at: &str) -> Result<f64, String> {
    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| format!("{at}: expected a finite number, got {v}"))
}

fn array<'a>(v: &'a Value, at: &str, len: usize) -> Result<&'a [Value], String> {
    let items = v.as_array().ok_or_else(|| format!("{at}: expected an array of length {len}"))?;
    if items.len() != len {
        return Err(format!("{at}: expected length {len}, got {}", items.len()));
    }
    Ok(items)
}

fn triple(v: &Value, at: &str) -> Result<[f64; 3], String> {
    let items = array(v, at, 3)?;
    let mut out = [0.0; 3];
    for (i, item) in items.iter().enumerate() {
        out[i] = real(item, &format!("{at}[{i}]"))?;
    }
    Ok(out)
}

fn matrix(v: &Value, at: &str) -> Result<RealMat3, String> {
    let rows = array(v, at, 3).map_err(|e| format!("{e} (expected a 3×3 matrix)"))?;
    let mut m = RealMat3::zeros();
    for (i, row) in rows.iter().enumerate() {
        let r = triple(row, &format!("{at}[{i}]")).map_err(|e| format!("{e} (expected a 3×3 matrix)"))?;
        for (j, x) in r.into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

fn parse_params(v: &Value) -> Result<PhysicalParams, String> {
    let obj = v.as_object().ok_or("params: expected an object")?;
    reject_unknown(obj, "params", &["alpha", "lambda"])?;
    let alpha = triple(field(obj, "params", "alpha")?, "params.alpha")?;
    let pairs = array(field(obj, "params", "lambda")?, "params.lambda", 3)?;
    let mut lambda = [Complex64::new(0.0, 0.0); 3];
    for (i, pair) in pairs.iter().enumerate() {
        let at = format!("params.lambda[{i}]");
        let p = array(pair, &at, 2).map_err(|e| format!("{e} (expected a [re, im] pair)"))?;
        lambda[i] = Complex64::new(real(&p[0], &format!("{at}[0]"))?, real(&p[1], &format!("{at}[1]"))?);
    }
    PhysicalParams::new(RealRow3::from(alpha), ComplexRow3::from(lambda)).map_err(|e| format!("params: {e}"))
}

fn parse_qsde(v: &Value) -> Result<BilinearQsde, String> {
    let obj = v.as_object().ok_or("qsde: expected an object")?;
    reject_unknown(obj, "qsde", &["F0", "F", "G1", "G2", "H1", "H2"])?;
    let q = BilinearQsde {
        f0: RealVec3::from(triple(field(obj, "qsde", "F0")?, "qsde.F0")?),
        f: matrix(field(obj, "qsde", "F")?, "qsde.F")?,
        g1: matrix(field(obj, "qsde", "G1")?, "qsde.G1")?,
        g2: matrix(field(obj, "qsde", "G2")?, "qsde.G2")?,
        h1: RealRow3::from(triple(field(obj, "qsde", "H1")?, "qsde.H1")?),
        h2: RealRow3::from(triple(field(obj, "qsde", "H2")?, "qsde.H2")?),
    };
    q.validate().map_err(|e| format!("qsde: {e}"))?;
    Ok(q)
}

/// Writes `-0.0` as `0.0` so equal values always serialize identically.
pub fn num(x: f64) -> Value {
    json!(x + 0.0)
}

fn row(v: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(v.into_iter().map(num).collect())
}

fn rows(m: &RealMat3) -> Value {
    Value::Array((0..3).map(|i| row(m.row(i).iter().copied())).collect())
}

pub fn params_json(p: &PhysicalParams) -> Value {
    json!({
        "alpha": row(p.alpha.iter().copied()),
        "lambda": p.lambda.iter().map(|z| row([z.re, z.im])).collect::<Vec<_>>(),
    })
}

pub fn qsde_json(q: &BilinearQsde) -> Value {
    json!({
        "F0": row(q.f0.iter().copied()),
        "F": rows(&q.f),
        "G1": rows(&q.g1),
        "G2": rows(&q.g2),
        "H1": row(q.h1.iter().copied()),
        "H2": row(q.h2.iter().copied()),
    })
}

pub fn to_json(system: &SystemFile) -> Value {
    match system {
        SystemFile::Params(p) => json!({ "params": params_json(p) }),
        SystemFile::Qsde(q) => json!({ "qsde": qsde_json(q) }),
    }
}

/// Indented JSON with numeric rows kept on one line and a trailing newline.
pub fn render(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn is_flat(items: &[Value]) -> bool {
    items.iter().all(|v| !v.is_array() && !v.is_object())
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, v, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        Value::Array(items) if !items.is_empty() && !is_flat(items) => {
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(out, v, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Array(items) => {
            let cells: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&cells.join(", "));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}
