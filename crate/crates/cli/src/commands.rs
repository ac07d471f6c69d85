use std::io::Read;
use std::path::{Path, PathBuf};

use mahlerkit::calculus::{evaluate, miss_distance, CalculusError, Report, TraceEntry, TraceValues};
use mahlerkit::lehmer::{search_with, LehmerError, Progress, SearchOptions};
use mahlerkit::mahler::{mahler_with, MahlerOptions};
use mahlerkit::{parse, quantum_entropy, synthesize_pair, ExtReal, MahlerError, SearchConfig, SystemSpec};
use serde_json::{json, Value};

use crate::units::Output;

pub const OK: u8 = 0;
pub const INVALID_INPUT: u8 = 1;
pub const PARSE_ERROR: u8 = 2;
pub const TOLERANCE_NOT_MET: u8 = 3;
pub const INCONSISTENT: u8 = 4;
pub const HYPOTHESIS: u8 = 5;
pub const ROUND_TRIP_MISS: u8 = 6;
pub const CHECKPOINT_MISMATCH: u8 = 7;

/// Largest distance between a synthesized system's entropies and its targets.
const SYNTH_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

fn mahler_failure(e: MahlerError) -> Failure {
    let code = match e {
        MahlerError::Inconsistent { .. } => INCONSISTENT,
        MahlerError::PrecisionExhausted { .. } => TOLERANCE_NOT_MET,
        _ => INVALID_INPUT,
    };
    Failure::new(code, e.to_string())
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

pub fn mahler(text: &str, eps: f64, validate: bool, out: &Output) -> Result<u8, Failure> {
    let f = parse(text).map_err(|e| Failure::new(PARSE_ERROR, e.to_string()))?;
    let opts = MahlerOptions { validate, ..MahlerOptions::default() };
    let m = mahler_with(&f, eps, &opts).map_err(mahler_failure)?;
    let code = if m.tolerance_met { OK } else { TOLERANCE_NOT_MET };

    if out.json {
        let mut v = m.to_json();
        v["polynomial"] = json!(f.to_string());
        v["display"] = out.interval_json(&m.value);
        print_json(&v);
    } else {
        println!("f     = {f}");
        if m.value.lo.value() == 0.0 && m.value.hi.value() == 0.0 {
            println!("m(f)  = 0 (exact)");
        } else if out.units == crate::units::Units::Nats {
            let (lo, hi) = m.value_decimal(out.digits);
            println!("m(f)  ∈ [{lo}, {hi}] nats");
        } else {
            println!("m(f)  ∈ {}", out.interval(&m.value));
        }
        println!("width = {:.3e} nats, {} bits of working precision", m.value.width(), m.precision);
        let split = &m.split;
        if split.content != 1.into() {
            println!("content {}", split.content);
        }
        if !split.cyclo_factors.is_empty() {
            let parts: Vec<String> = split
                .cyclo_factors
                .iter()
                .map(|&(d, k)| if k == 1 { format!("Φ{d}") } else { format!("Φ{d}^{k}") })
                .collect();
            println!("cyclotomic factors: {}", parts.join(" "));
        }
        if !m.root_contributions.is_empty() {
            println!("roots of {}:", split.remainder);
            for rc in &m.root_contributions {
                let (re, im) = rc.ball.center();
                let (mlo, mhi) = rc.ball.modulus_bounds();
                let tag = rc.ball.cluster.map(|c| format!("  cluster {c}")).unwrap_or_default();
                println!(
                    "  {re:+.12} {im:+.12}i  ± {:.1e}  |λ| ∈ [{mlo:.9}, {mhi:.9}]  log⁺ {}{tag}",
                    rc.ball.radius(),
                    out.interval(&rc.contribution)
                );
            }
        }
        if let Some(j) = &m.jensen {
            println!(
                "quadrature: {} on {} points (not certified{})",
                out.interval(&j.interval),
                j.grid,
                if j.converged { "" } else { ", not converged" }
            );
        }
        if !m.tolerance_met {
            println!("warning: width above eps = {eps:e}; raise MAHLERKIT_PRECISION_CEILING");
        }
    }
    Ok(code)
}

fn read_spec(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::new(INVALID_INPUT, format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

fn calculus_failure(e: CalculusError) -> Failure {
    match e {
        CalculusError::Hypothesis(_) => Failure::new(HYPOTHESIS, e.to_string()),
        CalculusError::InvalidSpec(_) => Failure::new(PARSE_ERROR, e.to_string()),
        CalculusError::InvalidTarget(_) => Failure::new(INVALID_INPUT, e.to_string()),
        CalculusError::Mahler(m) => mahler_failure(m),
    }
}

fn trace_values(out: &Output, v: &TraceValues) -> String {
    match v {
        TraceValues::Quantum { cartan, total } => {
            format!("cartan {}  total {}", out.interval(cartan), out.interval(total))
        }
        TraceValues::Classical { ks, hcpa, ergodic } => {
            format!("ks {}  hcpa {}  ({ergodic:?})", out.interval(ks), out.interval(hcpa))
        }
    }
}

fn print_trace(out: &Output, trace: &[TraceEntry]) {
    println!("trace:");
    for e in trace {
        let implicit = if e.implicit { " [implicit]" } else { "" };
        println!("  {:<16} {:<22} {}{implicit}", e.path, e.rule, trace_values(out, &e.values));
        println!("  {:<16} {}", "", e.basis);
        for a in &e.assumptions {
            println!("  {:<16} assumes: {a}", "");
        }
        for w in &e.warnings {
            println!("  {:<16} warning: {w}", "");
        }
    }
}

pub fn entropy(path: &Path, eps: f64, out: &Output) -> Result<u8, Failure> {
    let text = read_spec(path)?;
    let spec = SystemSpec::from_json(&text).map_err(|e| Failure::new(PARSE_ERROR, format!("invalid spec: {e}")))?;
    let report = evaluate(&spec, eps, &MahlerOptions::default()).map_err(calculus_failure)?;
    if out.json {
        let mut v = serde_json::to_value(&report).expect("reports serialize");
        match &report {
            Report::Quantum(r) => {
                v["display"] = json!({ "cartan": out.interval_json(&r.cartan), "total": out.interval_json(&r.total) });
            }
            Report::Classical(r) => {
                v["display"] = json!({ "ks": out.interval_json(&r.ks), "hcpa": out.interval_json(&r.hcpa) });
            }
        }
        print_json(&v);
        return Ok(OK);
    }
    match &report {
        Report::Quantum(r) => {
            println!("cartan entropy {}", out.interval(&r.cartan));
            println!("total entropy  {}", out.interval(&r.total));
            print_trace(out, &r.trace);
        }
        Report::Classical(r) => {
            println!("KS entropy     {}", out.interval(&r.ks));
            println!("hcpa           {}", out.interval(&r.hcpa));
            println!("ergodic        {:?}", r.ergodic);
            print_trace(out, &r.trace);
        }
    }
    Ok(OK)
}

fn parse_target(name: &str, text: &str) -> Result<ExtReal, Failure> {
    let t = text.trim();
    let is_inf = matches!(t.to_ascii_lowercase().as_str(), "inf" | "+inf" | "infinity" | "∞");
    if !is_inf && t.parse::<f64>().is_err() {
        return Err(Failure::new(PARSE_ERROR, format!("{name}: not a number or \"inf\": {text:?}")));
    }
    t.parse::<ExtReal>().map_err(|e| Failure::new(INVALID_INPUT, format!("{name}: {e}")))
}

pub fn synthesize(s: &str, t: &str, eps: f64, out: &Output) -> Result<u8, Failure> {
    let (s, t) = (parse_target("s", s)?, parse_target("t", t)?);
    let spec = synthesize_pair(s, t).map_err(calculus_failure)?;
    let r = quantum_entropy(&spec, eps).map_err(calculus_failure)?;
    let (ds, dt) = (miss_distance(&r.cartan, s), miss_distance(&r.total, t));
    let ok = ds <= SYNTH_TOL && dt <= SYNTH_TOL;
    let target = |x: ExtReal| out.bound(x, false);
    if out.json {
        print_json(&json!({
            "spec": spec,
            "target": { "s": s, "t": t },
            "achieved": { "cartan": r.cartan, "total": r.total },
            "display": { "cartan": out.interval_json(&r.cartan), "total": out.interval_json(&r.total) },
            "miss": { "s": ds, "t": dt },
            "ok": ok,
        }));
    } else {
        println!("{}", serde_json::to_string_pretty(&spec).expect("specs serialize"));
        println!("target   s = {}, t = {} {}", target(s), target(t), out.units.label());
        println!("achieved cartan {}", out.interval(&r.cartan));
        println!("         total  {}", out.interval(&r.total));
    }
    if ok {
        Ok(OK)
    } else {
        Err(Failure::new(ROUND_TRIP_MISS, format!("round trip missed the targets by {ds:e}, {dt:e}")))
    }
}

fn lehmer_failure(e: LehmerError) -> Failure {
    let code = match &e {
        LehmerError::InvalidConfig(_) | LehmerError::Io { .. } => INVALID_INPUT,
        LehmerError::CheckpointMismatch { .. } => CHECKPOINT_MISMATCH,
        LehmerError::CorruptCheckpoint { .. } => PARSE_ERROR,
        LehmerError::Mahler(m) => return mahler_failure(m.clone()),
    };
    Failure::new(code, e.to_string())
}

fn report_progress(p: &Progress) {
    let best = p.best.as_ref().map(|r| format!(", best {:.9} ({})", r.measure.hi.value(), r.poly)).unwrap_or_default();
    eprintln!("[{}/{}] candidates {}, pruned {}{best}", p.chunks_done, p.total_chunks, p.candidates, p.pruned);
}

pub fn lehmer(
    config: &SearchConfig,
    checkpoint: Option<PathBuf>,
    resume: bool,
    workers: usize,
    out: &Output,
) -> Result<u8, Failure> {
    config.validate().map_err(lehmer_failure)?;
    let opts = SearchOptions { workers, checkpoint, resume, progress: Some(&report_progress), ..Default::default() };
    let outcome = search_with(config, &opts).map_err(lehmer_failure)?;
    let all_met = outcome.records.iter().all(|r| r.tolerance_met);
    if out.json {
        let records: Vec<Value> = outcome
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut v = serde_json::to_value(r).expect("records serialize");
                v["rank"] = json!(i + 1);
                v["display"] = out.interval_json(&r.measure);
                v
            })
            .collect();
        print_json(&json!({ "config": config, "complete": outcome.complete, "records": records }));
    } else {
        for (i, r) in outcome.records.iter().enumerate() {
            let flag = if r.tolerance_met { "" } else { "  (tolerance not met)" };
            println!("{:>3}  {}  deg {:>2}  {}{flag}", i + 1, out.interval(&r.measure), r.degree, r.poly);
        }
        if outcome.records.is_empty() {
            println!("no polynomial of positive measure in this range");
        }
    }
    Ok(if all_met { OK } else { TOLERANCE_NOT_MET })
}
