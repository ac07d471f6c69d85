use std::f64::consts::LN_2;

use clap::ValueEnum;
use mahlerkit::{EntropyInterval, ExtReal};
use serde_json::{json, Value};

/// Display units; every value is computed in nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Nats,
    Bits,
    #[value(name = "log2-units")]
    Log2,
}

impl Units {
    pub fn label(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
            Units::Log2 => "log2-units",
        }
    }

    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits | Units::Log2 => nats / LN_2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Output {
    pub json: bool,
    pub units: Units,
    pub digits: usize,
}

impl Output {
    pub fn interval(&self, iv: &EntropyInterval) -> String {
        format!("[{}, {}] {}", self.bound(iv.lo, false), self.bound(iv.hi, true), self.units.label())
    }

    pub fn bound(&self, x: ExtReal, up: bool) -> String {
        if x.is_infinite() {
            return "inf".into();
        }
        sig_digits(self.units.convert(x.value()), self.digits, up)
    }

    pub fn interval_json(&self, iv: &EntropyInterval) -> Value {
        let conv = |x: ExtReal| if x.is_infinite() { json!("inf") } else { json!(self.units.convert(x.value())) };
        json!({ "units": self.units.label(), "lo": conv(iv.lo), "hi": conv(iv.hi) })
    }
}

/// `x` with `digits` significant digits, rounded toward `+∞` when `up`.
pub fn sig_digits(x: f64, digits: usize, up: bool) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.clamp(1, 17) as i32;
    let e = x.abs().log10().floor() as i32;
    let k = digits - 1 - e;
    let scaled = x * 10f64.powi(k);
    let r = if up { scaled.ceil() } else { scaled.floor() };
    if (r - scaled).abs() >= 1.0 || !r.is_finite() {
        return format!("{x}");
    }
    if !(-4..15).contains(&e) {
        let mantissa = r / 10f64.powi(digits - 1);
        let m = trim_zeros(&format!("{:.*}", (digits - 1) as usize, mantissa));
        format!("{m}e{}", e)
    } else if k <= 0 {
        format!("{}", r * 10f64.powi(-k))
    } else {
        let s = format!("{:.*}", k as usize, r / 10f64.powi(k));
        trim_zeros(&s)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
