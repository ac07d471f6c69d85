//! WebAssembly bindings for the browser demo. Every export takes plain
//! strings and returns a JSON document; the page in `www/` draws it.

use std::f64::consts::{LN_2, TAU};

use mahlerkit::calculus::{miss_distance, TraceValues};
use mahlerkit::{mahler, parse, quantum_entropy, synthesize_pair, EntropyInterval, ExtReal};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const EPS: f64 = 1e-10;
const MAX_SAMPLES: usize = 1 << 14;

fn interval(iv: &EntropyInterval) -> Value {
    let end = |x: ExtReal| if x.is_infinite() { json!("inf") } else { json!(x.value()) };
    json!({ "lo": end(iv.lo), "hi": end(iv.hi) })
}

/// Certified roots of `poly` with their position relative to the unit circle.
pub fn root_geometry_json(poly: &str) -> Result<Value, String> {
    let f = parse(poly).map_err(|e| e.to_string())?;
    let m = mahler(&f, EPS, false).map_err(|e| e.to_string())?;
    let roots: Vec<Value> = m
        .root_contributions
        .iter()
        .map(|rc| {
            let (re, im) = rc.ball.center();
            let (lo, hi) = rc.ball.modulus_bounds();
            let side = if lo > 1.0 {
                "outside"
            } else if hi < 1.0 {
                "inside"
            } else {
                "on"
            };
            json!({
                "re": re,
                "im": im,
                "radius": rc.ball.radius(),
                "modulus": { "lo": lo, "hi": hi },
                "side": side,
                "cluster": rc.ball.cluster,
                "contribution": interval(&rc.contribution),
            })
        })
        .collect();
    Ok(json!({
        "polynomial": f.to_string(),
        "measure": interval(&m.value),
        "measure_log2": m.value.midpoint() / LN_2,
        "content": m.split.content.to_string(),
        "cyclotomic": m.split.cyclo_factors.iter().map(|&(d, k)| json!([d, k])).collect::<Vec<_>>(),
        "roots": roots,
        "tolerance_met": m.tolerance_met,
    }))
}

/// `log |f(e^{iθ})|` on `samples` equispaced angles, with its mean and the
/// certified measure it approximates.
pub fn jensen_profile_json(poly: &str, samples: usize) -> Result<Value, String> {
    let f = parse(poly).map_err(|e| e.to_string())?;
    if f.is_zero() {
        return Err("the zero polynomial has no Mahler measure".into());
    }
    let n = samples.clamp(8, MAX_SAMPLES);
    let coeffs = f.coeffs_f64();
    let mut theta = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut sum = 0.0;
    let mut finite = 0usize;
    for k in 0..n {
        // midpoint rule keeps samples off roots of unity
        let th = TAU * (k as f64 + 0.5) / n as f64;
        let (c, s) = (th.cos(), th.sin());
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for &a in coeffs.iter().rev() {
            let r = re * c - im * s + a;
            im = re * s + im * c;
            re = r;
        }
        let v = 0.5 * (re * re + im * im).ln();
        theta.push(th);
        if v.is_finite() {
            sum += v;
            finite += 1;
            values.push(json!(v));
        } else {
            values.push(Value::Null);
        }
    }
    let m = mahler(&f, EPS, false).map_err(|e| e.to_string())?;
    Ok(json!({
        "polynomial": f.to_string(),
        "theta": theta,
        "log_abs": values,
        "mean": if finite > 0 { sum / finite as f64 } else { f64::NAN },
        "measure": interval(&m.value),
    }))
}

/// Builds a system with Cartan entropy `s` and total entropy `t` (nats or
/// `inf`) and evaluates it back.
pub fn synthesize_json(s: &str, t: &str) -> Result<Value, String> {
    let s: ExtReal = s.parse()?;
    let t: ExtReal = t.parse()?;
    let spec = synthesize_pair(s, t).map_err(|e| e.to_string())?;
    let r = quantum_entropy(&spec, EPS).map_err(|e| e.to_string())?;
    let trace: Vec<Value> = r
        .trace
        .iter()
        .map(|e| {
            let values = match &e.values {
                TraceValues::Quantum { cartan, total } => {
                    json!({ "cartan": interval(cartan), "total": interval(total) })
                }
                TraceValues::Classical { ks, hcpa, .. } => json!({ "ks": interval(ks), "hcpa": interval(hcpa) }),
            };
            json!({ "path": e.path, "rule": e.rule, "basis": e.basis, "values": values })
        })
        .collect();
    Ok(json!({
        "spec": spec,
        "cartan": interval(&r.cartan),
        "total": interval(&r.total),
        "miss": { "s": miss_distance(&r.cartan, s), "t": miss_distance(&r.total, t) },
        "trace": trace,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn root_geometry(poly: &str) -> Result<String, JsError> {
    to_js(root_geometry_json(poly))
}

#[wasm_bindgen]
pub fn jensen_profile(poly: &str, samples: usize) -> Result<String, JsError> {
    to_js(jensen_profile_json(poly, samples))
}

#[wasm_bindgen]
pub fn synthesize(s: &str, t: &str) -> Result<String, JsError> {
    to_js(synthesize_json(s, t))
}
