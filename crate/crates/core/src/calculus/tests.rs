use std::f64::consts::LN_2;

use proptest::prelude::*;

use super::*;
use crate::poly::parse;

const EPS: f64 = 1e-12;

fn close(iv: &EntropyInterval, x: f64, tol: f64) -> bool {
    miss_distance(iv, ExtReal::new(x).unwrap()) <= tol && iv.width() <= 2.0 * tol
}

fn bern(p: &[f64]) -> ClassicalSpec {
    ClassicalSpec::Bernoulli { p: p.to_vec() }
}

fn q(doc: &str) -> QuantumSpec {
    match SystemSpec::from_json(doc).unwrap() {
        SystemSpec::Quantum(q) => q,
        other => panic!("expected a quantum spec, got {other:?}"),
    }
}

#[test]
fn fair_coin() {
    let r = classical_entropy(&bern(&[0.5, 0.5]), EPS).unwrap();
    assert_eq!(r.ks, EntropyInterval::ln2());
    assert_eq!(r.hcpa, r.ks);
    assert_eq!(r.ergodic, Ergodicity::Ergodic);
}

#[test]
fn weighted_union_gap() {
    let s = ClassicalSpec::WeightedUnion {
        left: Box::new(bern(&[0.5, 0.5])),
        right: Box::new(bern(&[0.25; 4])),
        lambda: 0.5,
    };
    let r = classical_entropy(&s, EPS).unwrap();
    assert!(close(&r.ks, 1.5 * LN_2, 1e-12), "{}", r.ks);
    assert!(close(&r.hcpa, 2.0 * LN_2, 1e-12), "{}", r.hcpa);
    assert!(r.ks.hi < r.hcpa.lo);
    assert_eq!(r.ergodic, Ergodicity::NonErgodic);
}

#[test]
fn algebraic_dual_scales_mahler() {
    let s = ClassicalSpec::AlgebraicDual { f: parse("t - 2").unwrap(), n: Multiplicity::Finite(3) };
    let r = classical_entropy(&s, 1e-12).unwrap();
    assert!(close(&r.ks, 3.0 * LN_2, 3e-12), "{}", r.ks);
    let inf = ClassicalSpec::AlgebraicDual { f: parse("t - 2").unwrap(), n: Multiplicity::Infinite };
    assert_eq!(classical_entropy(&inf, EPS).unwrap().ks, EntropyInterval::INFINITE);
    let cyc = ClassicalSpec::AlgebraicDual { f: parse("t^2 + 1").unwrap(), n: Multiplicity::Infinite };
    let r = classical_entropy(&cyc, EPS).unwrap();
    assert_eq!(r.ks, EntropyInterval::ZERO);
    assert_eq!(r.ergodic, Ergodicity::NonErgodic);
}

#[test]
fn flow_uses_absolute_time() {
    let s = ClassicalSpec::Flow { t: -2.0, inner: Box::new(bern(&[0.5, 0.5])) };
    let r = classical_entropy(&s, EPS).unwrap();
    assert_eq!(r.ks, EntropyInterval::ln2().scale(2.0));
}

#[test]
fn markov_chain() {
    // golden-mean shift with its Parry measure has entropy log φ
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let a = 1.0 / phi;
    let matrix = vec![vec![a, 1.0 - a], vec![1.0, 0.0]];
    let pi0 = phi * phi / (1.0 + phi * phi);
    let s = ClassicalSpec::Markov { matrix, stationary: vec![pi0, 1.0 - pi0] };
    let r = classical_entropy(&s, EPS).unwrap();
    assert!(close(&r.ks, phi.ln(), 1e-12), "{}", r.ks);
    assert_eq!(r.ergodic, Ergodicity::Ergodic);
}

#[test]
fn invalid_classical_specs() {
    let bad = [
        bern(&[0.5, 0.6]),
        bern(&[]),
        bern(&[1.5, -0.5]),
        ClassicalSpec::Markov { matrix: vec![vec![0.5, 0.4], vec![1.0, 0.0]], stationary: vec![0.5, 0.5] },
        ClassicalSpec::Markov { matrix: vec![vec![0.5, 0.5], vec![1.0, 0.0]], stationary: vec![0.5, 0.5] },
        ClassicalSpec::AlgebraicDual { f: crate::poly::LaurentPoly::zero(), n: Multiplicity::Finite(1) },
        ClassicalSpec::WeightedUnion { left: Box::new(bern(&[1.0])), right: Box::new(bern(&[1.0])), lambda: 1.0 },
        ClassicalSpec::Power { m: 0, inner: Box::new(bern(&[1.0])) },
        ClassicalSpec::Flow { t: f64::NAN, inner: Box::new(bern(&[1.0])) },
    ];
    for s in bad {
        assert!(matches!(classical_entropy(&s, EPS), Err(CalculusError::InvalidSpec(_))), "{s:?}");
    }
}

#[test]
fn product_ergodicity_is_conservative() {
    let s = ClassicalSpec::Product {
        left: Box::new(bern(&[0.5, 0.5])),
        right: Box::new(bern(&[0.25; 4])),
        ergodic_override: false,
    };
    let r = classical_entropy(&s, EPS).unwrap();
    assert_eq!(r.ergodic, Ergodicity::Unknown);
    assert!(close(&r.ks, 3.0 * LN_2, 1e-12));
    assert!(r.hcpa.lo <= r.ks.lo && r.hcpa.hi >= r.ks.hi);
    let ClassicalSpec::Product { left, right, .. } = s else { unreachable!() };
    let s = ClassicalSpec::Product { left, right, ergodic_override: true };
    let r = classical_entropy(&s, EPS).unwrap();
    assert_eq!((r.ergodic, r.hcpa), (Ergodicity::Ergodic, r.ks));
}

#[test]
fn presets() {
    let r = quantum_entropy(&QuantumSpec::Padic { p: 3 }, EPS).unwrap();
    assert_eq!((r.cartan, r.total), (EntropyInterval::ZERO, EntropyInterval::ln2()));
    let r = quantum_entropy(&QuantumSpec::TwistedTorusSpecial, EPS).unwrap();
    assert_eq!((r.cartan, r.total), (EntropyInterval::ln2(), EntropyInterval::ln2().scale(2.0)));
    assert!(quantum_entropy(&QuantumSpec::Padic { p: 9 }, EPS).is_err());
    assert!(quantum_entropy(&QuantumSpec::Padic { p: 2 }, EPS).is_err());
}

#[test]
fn tensor_of_flows() {
    for (t, s) in [(2.0f64, 1.0f64), (-0.5, 3.0), (1.25, -2.0)] {
        let bernoulli_flow = ClassicalSpec::Flow { t: s, inner: Box::new(bern(&[0.5, 0.5])) };
        let spec = QuantumSpec::tensor(
            QuantumSpec::Padic { p: 3 }.flow(t),
            QuantumSpec::CrossedProduct { system: bernoulli_flow }.flow(1.0),
        );
        let r = quantum_entropy(&spec, EPS).unwrap();
        assert!(close(&r.cartan, s.abs() * LN_2, 1e-14), "{}", r.cartan);
        assert!(close(&r.total, (t.abs() + s.abs()) * LN_2, 1e-14), "{}", r.total);
    }
}

#[test]
fn twisted_torus_golden() {
    let r = quantum_entropy(&q(r#"{"kind":"twisted_torus","f":"t^2-t-1","n":2}"#), 1e-12).unwrap();
    let m = 0.481_211_825_059_603_4;
    assert!(close(&r.cartan, m, 1e-12), "{}", r.cartan);
    assert!(r.total.lo.value() >= 0.9624 && r.total.hi.value() <= 1.4437, "{}", r.total);
    let gap = r.total.hi.value() - r.total.lo.value();
    assert!((gap - r.cartan.midpoint()).abs() <= 2.0 * r.cartan.width() + 1e-15);
}

#[test]
fn twisted_torus_hypotheses() {
    let err = |doc: &str| quantum_entropy(&q(doc), 1e-10).unwrap_err();
    assert!(
        matches!(err(r#"{"kind":"twisted_torus","f":"t-2","n":2}"#), CalculusError::Hypothesis(m) if m.contains("-2"))
    );
    assert!(matches!(err(r#"{"kind":"twisted_torus","f":"1","n":2}"#), CalculusError::Hypothesis(_)));
    assert!(matches!(err(r#"{"kind":"twisted_torus","f":"t^3","n":2}"#), CalculusError::Hypothesis(_)));
    assert!(matches!(
        err(r#"{"kind":"twisted_torus","f":"t^3 + t^2 - t - 1","n":2}"#),
        CalculusError::Hypothesis(m) if m.contains("cyclotomic")
    ));
    // Salem polynomial: certified unimodular roots
    assert!(matches!(
        err(r#"{"kind":"twisted_torus","f":"t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1","n":2}"#),
        CalculusError::Hypothesis(m) if m.contains("modulus 1")
    ));
    assert!(matches!(err(r#"{"kind":"twisted_torus","f":"t^2-t-1","n":1}"#), CalculusError::InvalidSpec(_)));
}

#[test]
fn twisted_torus_constant_and_infinite() {
    let r = quantum_entropy(&q(r#"{"kind":"twisted_torus","f":"2","n":2}"#), 1e-12).unwrap();
    assert!(close(&r.total, 2.5 * LN_2, 0.5 * LN_2 + 1e-12));
    let r = quantum_entropy(&q(r#"{"kind":"twisted_torus","f":"t^2-3t+1","n":"inf"}"#), 1e-12).unwrap();
    assert_eq!(r.total, EntropyInterval::INFINITE);
    assert!(r.cartan.hi.value() < 1.0);
}

#[test]
fn power_of_padic() {
    let r = quantum_entropy(&QuantumSpec::Padic { p: 3 }.power(5), EPS).unwrap();
    assert_eq!(r.total, EntropyInterval::ln2().scale(5.0));
    assert!(close(&r.total, 5.0 * LN_2, 1e-14));
}

#[test]
fn power_matches_repeated_tensor_on_presets() {
    let leaves =
        [QuantumSpec::Padic { p: 3 }, QuantumSpec::TwistedTorusSpecial, QuantumSpec::Padic { p: 5 }.flow(0.75)];
    for leaf in leaves {
        for m in 1..=12u64 {
            let tensor = (1..m).fold(leaf.clone(), |acc, _| QuantumSpec::tensor(acc, leaf.clone()));
            let a = quantum_entropy(&leaf.clone().power(m), EPS).unwrap();
            let b = quantum_entropy(&tensor, EPS).unwrap();
            assert_eq!((a.cartan, a.total), (b.cartan, b.total), "{leaf:?}^{m}");
        }
    }
}

#[test]
fn infinite_tensor_power_rule() {
    let r = quantum_entropy(&QuantumSpec::Padic { p: 3 }.infinite_tensor_power(), EPS).unwrap();
    assert_eq!((r.cartan, r.total), (EntropyInterval::ZERO, EntropyInterval::INFINITE));
    let coin = QuantumSpec::CrossedProduct { system: ClassicalSpec::fair_coin() };
    let r = quantum_entropy(&coin.infinite_tensor_power(), EPS).unwrap();
    assert_eq!((r.cartan, r.total), (EntropyInterval::INFINITE, EntropyInterval::INFINITE));
}

#[test]
fn time_zero_warns() {
    let r = quantum_entropy(&QuantumSpec::Padic { p: 3 }.flow(0.0), EPS).unwrap();
    assert_eq!(r.total, EntropyInterval::ZERO);
    assert_eq!(r.warnings().count(), 1);
    let inf = QuantumSpec::Padic { p: 3 }.infinite_tensor_power().flow(0.0);
    assert_eq!(quantum_entropy(&inf, EPS).unwrap().total, EntropyInterval::ZERO);
}

#[test]
fn trace_is_post_order_and_complete() {
    let spec = q(r#"{"kind":"tensor",
        "left":{"kind":"flow","t":2.0,"inner":{"kind":"padic","p":3}},
        "right":{"kind":"crossed_product","system":{"kind":"power","m":2,"inner":{"kind":"bernoulli","p":[0.5,0.5]}}}}"#);
    let r = quantum_entropy(&spec, EPS).unwrap();
    let paths: Vec<&str> = r.trace.iter().map(|e| e.path.as_str()).collect();
    assert_eq!(paths, ["$.left.inner", "$.left", "$.right.system.inner", "$.right.system", "$.right", "$"]);
    assert_eq!(r.trace.len(), spec.size());
    assert!(r.trace.iter().all(|e| !e.rule.is_empty() && !e.basis.is_empty()));
    assert!(r.trace.last().unwrap().implicit);
    let js = serde_json::to_value(&r).unwrap();
    assert_eq!(js["total"]["lo"], serde_json::json!("2.772588722239781"));
    assert_eq!(js["trace"][0]["cartan"]["hi"], serde_json::json!("0"));
}

#[test]
fn synthesizer_examples() {
    let z = ExtReal::ZERO;
    let ln2 = ExtReal::new(LN_2).unwrap();
    let spec = synthesize_pair(z, ln2).unwrap();
    assert_eq!(spec, QuantumSpec::Padic { p: 3 });
    let r = quantum_entropy(&spec, EPS).unwrap();
    assert_eq!((r.cartan, r.total), (EntropyInterval::ZERO, EntropyInterval::ln2()));

    let spec = synthesize_pair(ln2, ExtReal::new(3.0 * LN_2).unwrap()).unwrap();
    let QuantumSpec::Tensor { left, right } = &spec else { panic!("{spec:?}") };
    assert!(matches!(**left, QuantumSpec::Flow { t, .. } if (t - 2.0).abs() < 1e-15));
    assert!(matches!(**right, QuantumSpec::CrossedProduct { .. }));
    let r = quantum_entropy(&spec, EPS).unwrap();
    assert!(close(&r.cartan, LN_2, 1e-15) && close(&r.total, 3.0 * LN_2, 1e-15));

    let spec = synthesize_pair(z, ExtReal::INFINITY).unwrap();
    assert_eq!(spec, QuantumSpec::Padic { p: 3 }.infinite_tensor_power());

    let one = ExtReal::new(1.0).unwrap();
    let r = quantum_entropy(&synthesize_pair(one, one).unwrap(), EPS).unwrap();
    assert!(close(&r.cartan, 1.0, 1e-12) && close(&r.total, 1.0, 1e-12));

    assert!(matches!(synthesize_pair(one, ExtReal::new(0.5).unwrap()), Err(CalculusError::InvalidTarget(_))));
}

fn preset() -> impl Strategy<Value = QuantumSpec> {
    prop_oneof![
        (3u64..20)
            .prop_filter("odd prime", |p| [3, 5, 7, 11, 13, 17, 19].contains(p))
            .prop_map(|p| QuantumSpec::Padic { p }),
        Just(QuantumSpec::TwistedTorusSpecial),
        Just(QuantumSpec::CrossedProduct { system: ClassicalSpec::fair_coin() }),
    ]
}

fn target() -> impl Strategy<Value = ExtReal> {
    prop_oneof![
        Just(ExtReal::ZERO),
        Just(ExtReal::INFINITY),
        Just(ExtReal::new(LN_2).unwrap()),
        (0.0f64..50.0).prop_map(|x| ExtReal::new(x).unwrap()),
        (1u32..40).prop_map(|k| ExtReal::new((k as f64).sqrt()).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn synthesize_round_trip(a in target(), b in target()) {
        let (s, t) = if a <= b { (a, b) } else { (b, a) };
        let r = quantum_entropy(&synthesize_pair(s, t).unwrap(), EPS).unwrap();
        prop_assert!(miss_distance(&r.cartan, s) <= 1e-9, "{} vs {}", r.cartan, s);
        prop_assert!(miss_distance(&r.total, t) <= 1e-9, "{} vs {}", r.total, t);
        prop_assert!(r.cartan.width() <= 1e-9 || r.cartan.lo.is_infinite());
        prop_assert!(r.total.width() <= 1e-9 || r.total.lo.is_infinite());
    }

    #[test]
    fn flow_scales_by_absolute_time(leaf in preset(), t in -10.0f64..10.0) {
        let base = quantum_entropy(&leaf, EPS).unwrap();
        let flowed = quantum_entropy(&leaf.flow(t), EPS).unwrap();
        prop_assert_eq!(flowed.cartan, base.cartan.scale(t.abs()));
        prop_assert_eq!(flowed.total, base.total.scale(t.abs()));
    }

    #[test]
    fn nested_flows_compose(leaf in preset(), a in -4.0f64..4.0, b in -4.0f64..4.0) {
        let nested = quantum_entropy(&leaf.clone().flow(a).flow(b), EPS).unwrap();
        let single = quantum_entropy(&leaf.flow(a * b), EPS).unwrap();
        for (x, y) in [(nested.total, single.total), (nested.cartan, single.cartan)] {
            let ulp = |v: f64| (v.next_up() - v).max(f64::MIN_POSITIVE);
            // one rounding per scaling step: three on the nested side, one on the other
            prop_assert!(x.overlaps(&y));
            prop_assert!((x.lo.value() - y.lo.value()).abs() <= 4.0 * ulp(y.lo.value()));
            prop_assert!((x.hi.value() - y.hi.value()).abs() <= 4.0 * ulp(y.hi.value()));
        }
    }

    #[test]
    fn total_dominates_cartan(leaf in preset(), other in preset(), m in 1u64..6, t in -3.0f64..3.0) {
        let spec = QuantumSpec::tensor(leaf.power(m), other.flow(t));
        let r = quantum_entropy(&spec, EPS).unwrap();
        for e in &r.trace {
            if let TraceValues::Quantum { cartan, total } = e.values {
                prop_assert!(total.lo >= cartan.lo);
            }
        }
    }
}
