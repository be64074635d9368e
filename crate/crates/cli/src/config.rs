//! Config files and list arguments.
//!
//! A config file holds flag values, either as `key = value` lines or as a
//! JSON object (a previous report's `config` section works too). Its entries
//! are spliced into the argument list before the command-line flags, so
//! explicit flags win.

use std::fs;
use std::path::Path;

use fockext::{Point2, C64};
use serde_json::Value;

/// Reads a config file into `--key value` arguments.
pub fn config_args(path: &Path) -> Result<Vec<String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| format!("{}: {e}", path.display()))?;
        let obj = match v.get("config") {
            Some(c) if v.get("command").is_some() => c.clone(),
            _ => v,
        };
        let map = obj
            .as_object()
            .ok_or_else(|| format!("{}: expected a JSON object", path.display()))?;
        let mut out = Vec::new();
        for (k, v) in map {
            if k == "command" {
                continue;
            }
            push_json_arg(&mut out, k, v)?;
        }
        Ok(out)
    } else {
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), n + 1))?;
            let (k, v) = (k.trim(), v.trim());
            match v {
                "true" => out.push(format!("--{k}")),
                "false" => {}
                _ => {
                    out.push(format!("--{k}"));
                    out.push(v.to_string());
                }
            }
        }
        Ok(out)
    }
}

fn push_json_arg(out: &mut Vec<String>, key: &str, v: &Value) -> Result<(), String> {
    match v {
        Value::Null | Value::Bool(false) => {}
        Value::Bool(true) => out.push(format!("--{key}")),
        _ => {
            out.push(format!("--{key}"));
            out.push(json_to_arg(v).ok_or_else(|| format!("unsupported value for {key}: {v}"))?);
        }
    }
    Ok(())
}

fn json_to_arg(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let nested = items.iter().any(|i| i.is_array());
            let parts: Option<Vec<String>> = items.iter().map(json_to_arg).collect();
            Some(parts?.join(if nested { ";" } else { "," }))
        }
        _ => None,
    }
}

/// `"-4..4"`, `"1,2,5"` or a mix such as `"1..3,8"`; ranges are inclusive.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some(idx) = part[1..].find("..").map(|i| i + 1) {
            let lo: i64 = part[..idx].trim().parse().map_err(|_| format!("bad range {part:?}"))?;
            let hi: i64 = part[idx + 2..].trim().parse().map_err(|_| format!("bad range {part:?}"))?;
            if hi < lo {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| format!("bad integer {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err(format!("empty list {s:?}"));
    }
    Ok(out)
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let out: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| format!("bad number {p:?}")))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(format!("empty list {s:?}"));
    }
    Ok(out)
}

/// Groups separated by `;`, each a comma list of exactly `width` reals.
pub fn parse_groups(s: &str, width: usize) -> Result<Vec<Vec<f64>>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .map(|g| {
            let v = parse_f64_list(g)?;
            if v.len() != width {
                return Err(format!("expected {width} numbers in {g:?}"));
            }
            Ok(v)
        })
        .collect()
}

/// Points as `x_re,x_im,y_re,y_im` groups separated by `;`.
pub fn parse_points(s: &str) -> Result<Vec<Point2>, String> {
    Ok(parse_groups(s, 4)?
        .into_iter()
        .map(|v| Point2::from_reals([v[0], v[1], v[2], v[3]]))
        .collect())
}

pub fn parse_point(s: &str) -> Result<Point2, String> {
    match parse_points(s)?.as_slice() {
        [p] => Ok(*p),
        _ => Err(format!("expected one point in {s:?}")),
    }
}

/// Complex numbers as `re,im` groups separated by `;`.
pub fn parse_complex_list(s: &str) -> Result<Vec<C64>, String> {
    Ok(parse_groups(s, 2)?.into_iter().map(|v| C64::new(v[0], v[1])).collect())
}

pub fn point_json(p: &Point2) -> Value {
    Value::from(p.to_reals().to_vec())
}

pub fn points_json(ps: &[Point2]) -> Value {
    Value::Array(ps.iter().map(point_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_lists() {
        assert_eq!(parse_int_list("-4..4").unwrap(), (-4..=4).collect::<Vec<_>>());
        assert_eq!(parse_int_list("1..3,8").unwrap(), vec![1, 2, 3, 8]);
        assert_eq!(parse_int_list("-2").unwrap(), vec![-2]);
        assert!(parse_int_list("3..1").is_err());
        assert!(parse_int_list("").is_err());
    }

    #[test]
    fn points() {
        let p = parse_points("0,0,1,0; 1,2,3,4").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].to_reals(), [1.0, 2.0, 3.0, 4.0]);
        assert!(parse_points("1,2,3").is_err());
    }

    #[test]
    fn json_values_become_flags() {
        let mut out = Vec::new();
        push_json_arg(&mut out, "centers", &serde_json::json!([[0.0, 0.0, 1.0, 0.0], [1, 2, 3, 4]])).unwrap();
        push_json_arg(&mut out, "radii", &serde_json::json!([4.0, 8.5])).unwrap();
        push_json_arg(&mut out, "timing", &serde_json::json!(false)).unwrap();
        push_json_arg(&mut out, "eps", &Value::Null).unwrap();
        assert_eq!(out, ["--centers", "0.0,0.0,1.0,0.0;1,2,3,4", "--radii", "4.0,8.5"]);
    }
}
