//! JSON file formats for representations and periodic families.
//!
//! Scalars are JSON numbers or `[re, im]` pairs.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::tauber::{PeriodicFunctionFamily, TrigPoly};
use crate::Rep;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| Complex64::new(x, 0.0)).ok_or_else(|| parse_err("bad number")),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| parse_err("real part is not a number"))?;
            let im = a[1].as_f64().ok_or_else(|| parse_err("imaginary part is not a number"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(parse_err(format!("expected a number or [re, im], got {v}"))),
    }
}

/// `re+imi` with shortest round-trip formatting.
pub fn complex_to_csv(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

/// Inverse of [`complex_to_csv`]; plain reals are accepted.
pub fn complex_from_csv(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|e| parse_err(format!("{s}: {e}")));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| parse_err(format!("malformed complex {s}")))?;
    let re = body[..split].parse::<f64>().map_err(|e| parse_err(format!("{s}: {e}")))?;
    let im = body[split..].parse::<f64>().map_err(|e| parse_err(format!("{s}: {e}")))?;
    Ok(Complex64::new(re, im))
}

/// `"re,im"` or `"re"`, as used on the command line.
pub fn complex_from_pair(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| parse_err(format!("{t}: {e}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(parse_err(format!("expected re or re,im, got {s}"))),
    }
}

fn scalar_list(v: &Value, what: &str) -> Result<Vec<Complex64>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("{what} must be an array")))?
        .iter()
        .map(complex_from_json)
        .collect()
}

fn usize_field(obj: &Value, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(format!("missing or non-integer field \"{key}\"")))
}

/// `{"q": int, "d": int, "matrices": [q × d × d], "left": [d], "v0": [d]}`.
pub fn representation_from_json(v: &Value) -> Result<Rep> {
    let q = usize_field(v, "q")?;
    let d = usize_field(v, "d")?;
    let mats = v.get("matrices").and_then(Value::as_array).ok_or_else(|| parse_err("missing \"matrices\""))?;
    let mut matrices = Vec::with_capacity(mats.len());
    for (r, m) in mats.iter().enumerate() {
        let rows = m.as_array().ok_or_else(|| parse_err(format!("matrix {r} must be an array of rows")))?;
        if rows.len() != d {
            return Err(Error::Malformed(format!("matrix {r} has {} rows, expected {d}", rows.len())));
        }
        let mut entries = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            let row = scalar_list(row, &format!("matrix {r} row {i}"))?;
            if row.len() != d {
                return Err(Error::Malformed(format!("matrix {r} row {i} has {} entries, expected {d}", row.len())));
            }
            entries.extend(row);
        }
        matrices.push(DMatrix::from_row_slice(d, d, &entries));
    }
    if matrices.len() != q {
        return Err(Error::Malformed(format!("{} matrices for q = {q}", matrices.len())));
    }
    let left = scalar_list(v.get("left").ok_or_else(|| parse_err("missing \"left\""))?, "left")?;
    let v0 = scalar_list(v.get("v0").ok_or_else(|| parse_err("missing \"v0\""))?, "v0")?;
    Rep::new(q, matrices, RowDVector::from_vec(left), DVector::from_vec(v0))
}

pub fn representation_from_str(s: &str) -> Result<Rep> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    representation_from_json(&v)
}

fn scalar_json(z: &Complex64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        complex_to_json(*z)
    }
}

pub fn representation_to_json(rep: &Rep) -> Value {
    let d = rep.dim();
    let matrices: Vec<Value> = rep
        .matrices()
        .iter()
        .map(|m| Value::Array((0..d).map(|i| Value::Array((0..d).map(|j| scalar_json(&m[(i, j)])).collect())).collect()))
        .collect();
    json!({
        "q": rep.q(),
        "d": d,
        "matrices": matrices,
        "left": rep.left().iter().map(scalar_json).collect::<Vec<_>>(),
        "v0": rep.v0().iter().map(scalar_json).collect::<Vec<_>>(),
    })
}

/// `{"alpha": real?, "beta": real?, "phi": [[φ_{j,−L}, …, φ_{j,L}], …]}`; `κ` and `q` come from the caller.
pub fn family_from_json(
    v: &Value,
    kappa: Complex64,
    q: f64,
    alpha: f64,
    beta: f64,
) -> Result<PeriodicFunctionFamily<f64>> {
    let phi = v.get("phi").and_then(Value::as_array).ok_or_else(|| parse_err("missing \"phi\""))?;
    let polys = phi
        .iter()
        .enumerate()
        .map(|(j, p)| TrigPoly::new(scalar_list(p, &format!("phi[{j}]"))?))
        .collect::<Result<Vec<_>>>()?;
    if let Some(m) = v.get("m") {
        let m = m.as_u64().ok_or_else(|| parse_err("\"m\" must be an integer"))?;
        if m as usize != polys.len() {
            return Err(Error::Malformed(format!("m = {m} but {} functions given", polys.len())));
        }
    }
    let alpha = v.get("alpha").and_then(Value::as_f64).unwrap_or(alpha);
    let beta = v.get("beta").and_then(Value::as_f64).unwrap_or(beta);
    PeriodicFunctionFamily::new(polys, kappa, q, alpha, beta)
}

pub fn family_to_json(fam: &PeriodicFunctionFamily<f64>) -> Value {
    json!({
        "m": fam.m(),
        "alpha": fam.alpha(),
        "beta": fam.beta(),
        "phi": fam.phi().iter().map(|p| p.coeffs().iter().map(|z| complex_to_json(*z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}
