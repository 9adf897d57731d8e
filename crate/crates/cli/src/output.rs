//! Deterministic serialization. Every float crosses the wire as 17
//! significant digits in scientific notation, so equal values always produce
//! equal bytes and a parse -> re-render pass is the identity.

use std::io::{self, Write};

use serde_json::Value;

use dys_srg::classes::{AlgoParams, FunctionClassParams, Smoothness};
use dys_srg::rates::RateResult;
use dys_srg::symbol::for_each_symbol_point;
use dys_srg::util::fmt_f64;

/// Renders a JSON value with 2-space indentation, object keys in insertion
/// order, floats via [`fmt_f64`], and integers verbatim. Arrays of scalars sit
/// on one line; arrays of containers and all objects go multi-line. Ends with
/// a newline.
pub fn render_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn pad(n: usize, out: &mut String) {
    for _ in 0..n {
        out.push(' ');
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn render_number(n: &serde_json::Number) -> String {
    if n.is_f64() {
        fmt_f64(n.as_f64().expect("checked f64"))
    } else {
        n.to_string()
    }
}

fn render_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization is infallible")
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&render_number(n)),
        Value::String(s) => out.push_str(&render_string(s)),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.iter().all(is_scalar) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, indent, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(indent + 2, out);
                    write_value(item, indent + 2, out);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(indent, out);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
            } else {
                out.push_str("{\n");
                for (i, (k, val)) in map.iter().enumerate() {
                    pad(indent + 2, out);
                    out.push_str(&render_string(k));
                    out.push_str(": ");
                    write_value(val, indent + 2, out);
                    if i + 1 < map.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(indent, out);
                out.push('}');
            }
        }
    }
}

/// JSON value for a smoothness bound: a number when finite, the string "inf"
/// otherwise (JSON has no infinity literal).
pub fn smoothness_value(l: Smoothness) -> Value {
    match l.finite() {
        Some(v) => Value::from(v),
        None => Value::from("inf"),
    }
}

fn opt_num(x: Option<f64>) -> Value {
    match x {
        Some(v) => Value::from(v),
        None => Value::Null,
    }
}

/// The shared "params" object: class bounds plus algorithm parameters, with
/// an optional grid size for sampled outputs.
pub fn params_value(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: Option<usize>,
) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("mu_f".into(), Value::from(f.mu()));
    m.insert("L_f".into(), smoothness_value(f.l()));
    m.insert("mu_g".into(), Value::from(g.mu()));
    m.insert("L_g".into(), smoothness_value(g.l()));
    m.insert("mu_h".into(), Value::from(h.mu()));
    m.insert("L_h".into(), smoothness_value(h.l()));
    m.insert("alpha".into(), Value::from(params.alpha()));
    m.insert("lambda".into(), Value::from(params.lambda()));
    if let Some(n) = grid_n {
        m.insert("grid_n".into(), Value::from(n as u64));
    }
    Value::Object(m)
}

/// One rate row as a JSON object; the breakdown carries only the fields the
/// formula defines.
pub fn rate_value(r: &RateResult) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("name".into(), Value::from(r.name.as_str()));
    m.insert("valid".into(), Value::from(r.valid));
    m.insert("rho".into(), opt_num(r.rho));
    m.insert("condition_note".into(), Value::from(r.condition_note.as_str()));
    let mut b = serde_json::Map::new();
    let fields: [(&str, Option<f64>); 10] = [
        ("c_f", r.breakdown.c_f),
        ("c_g", r.breakdown.c_g),
        ("r_f", r.breakdown.r_f),
        ("r_g", r.breakdown.r_g),
        ("d", r.breakdown.d),
        ("theta", r.breakdown.theta),
        ("nu_f", r.breakdown.nu_f),
        ("nu_g", r.breakdown.nu_g),
        ("xi", r.breakdown.xi),
        ("r", r.breakdown.r),
    ];
    for (name, val) in fields {
        if let Some(v) = val {
            b.insert(name.into(), Value::from(v));
        }
    }
    m.insert("breakdown".into(), Value::Object(b));
    Value::Object(m)
}

/// Rate table as CSV: `name,valid,rho,condition_note`. Invalid rates keep
/// their row with an empty rho column. Notes never contain commas or quotes,
/// so no field needs escaping; the writer asserts that.
pub fn write_rates_csv(w: &mut dyn Write, rates: &[RateResult]) -> io::Result<()> {
    writeln!(w, "name,valid,rho,condition_note")?;
    for r in rates {
        debug_assert!(
            !r.condition_note.contains(',') && !r.condition_note.contains('"'),
            "condition notes are comma-free by construction"
        );
        let rho = match r.rho {
            Some(v) => fmt_f64(v),
            None => String::new(),
        };
        writeln!(w, "{},{},{},{}", r.name.as_str(), r.valid, rho, r.condition_note)?;
    }
    Ok(())
}

/// Streams the symbol cloud as CSV: `re,im,modulus,phi_f,phi_g,phi_h`, one
/// row per grid point in scan order. Angles are recomputed from the flat
/// index with the sampler's own expression, so they match the sampled points
/// bit for bit.
pub fn write_cloud_csv(
    w: &mut dyn Write,
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: usize,
) -> io::Result<()> {
    writeln!(w, "re,im,modulus,phi_f,phi_g,phi_h")?;
    let n = grid_n as f64;
    let phi = |idx: usize| std::f64::consts::TAU * (idx as f64) / n;
    let mut err: Option<io::Error> = None;
    for_each_symbol_point(f, g, h, params, grid_n, |flat, pt| {
        if err.is_some() {
            return;
        }
        let k = flat % grid_n;
        let j = (flat / grid_n) % grid_n;
        let i = flat / (grid_n * grid_n);
        if let Err(e) = writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_f64(pt.value.re),
            fmt_f64(pt.value.im),
            fmt_f64(pt.modulus),
            fmt_f64(phi(i)),
            fmt_f64(phi(j)),
            fmt_f64(phi(k)),
        ) {
            err = Some(e);
        }
    })
    .expect("caller checked finite L_h");
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Streams the symbol cloud as JSON without materializing it. The emitted
/// bytes are exactly what [`render_json`] would produce for the equivalent
/// tree `{"params": .., "sup_modulus": .., "points": [[re, im, modulus,
/// phi_f, phi_g, phi_h], ..]}`; a round-trip test pins that equivalence.
pub fn write_cloud_json(
    w: &mut dyn Write,
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: usize,
    sup_modulus: f64,
) -> io::Result<()> {
    let params_obj = params_value(f, g, h, params, Some(grid_n));
    let mut head = String::from("{\n  \"params\": ");
    write_value(&params_obj, 2, &mut head);
    head.push_str(",\n  \"sup_modulus\": ");
    head.push_str(&fmt_f64(sup_modulus));
    head.push_str(",\n  \"points\": [\n");
    w.write_all(head.as_bytes())?;

    let total = grid_n * grid_n * grid_n;
    let n = grid_n as f64;
    let phi = |idx: usize| std::f64::consts::TAU * (idx as f64) / n;
    let mut err: Option<io::Error> = None;
    for_each_symbol_point(f, g, h, params, grid_n, |flat, pt| {
        if err.is_some() {
            return;
        }
        let k = flat % grid_n;
        let j = (flat / grid_n) % grid_n;
        let i = flat / (grid_n * grid_n);
        let comma = if flat + 1 < total { "," } else { "" };
        if let Err(e) = writeln!(
            w,
            "    [{}, {}, {}, {}, {}, {}]{}",
            fmt_f64(pt.value.re),
            fmt_f64(pt.value.im),
            fmt_f64(pt.modulus),
            fmt_f64(phi(i)),
            fmt_f64(phi(j)),
            fmt_f64(phi(k)),
            comma,
        ) {
            err = Some(e);
        }
    })
    .expect("caller checked finite L_h");
    if let Some(e) = err {
        return Err(e);
    }
    w.write_all(b"  ]\n}\n")
}

/// Iteration log as CSV: `k,residual,pair_ratio`, one row per step, k
/// starting at 1.
pub fn write_iteration_csv(
    w: &mut dyn Write,
    residuals: &[f64],
    pair_ratios: &[f64],
) -> io::Result<()> {
    writeln!(w, "k,residual,pair_ratio")?;
    for (k, (res, ratio)) in residuals.iter().zip(pair_ratios).enumerate() {
        writeln!(w, "{},{},{}", k + 1, fmt_f64(*res), fmt_f64(*ratio))?;
    }
    Ok(())
}
