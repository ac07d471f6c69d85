use mahlerkit_web::{jensen_profile_json, root_geometry_json, synthesize_json};

#[test]
fn geometry_classifies_roots() {
    let g = root_geometry_json("t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1").unwrap();
    let sides: Vec<&str> = g["roots"].as_array().unwrap().iter().map(|r| r["side"].as_str().unwrap()).collect();
    assert_eq!(sides.iter().filter(|s| **s == "outside").count(), 1);
    assert_eq!(sides.iter().filter(|s| **s == "inside").count(), 1);
    assert_eq!(sides.iter().filter(|s| **s == "on").count(), 8);
    assert!(g["measure"]["lo"].as_f64().unwrap() > 0.1623576120077);
}

#[test]
fn geometry_reports_cyclotomic_part() {
    let g = root_geometry_json("t^4 - t^2 + 1").unwrap();
    assert_eq!(g["cyclotomic"][0][0], 12);
    assert_eq!(g["measure"]["hi"], 0.0);
    assert!(root_geometry_json("t^").is_err());
}

#[test]
fn jensen_mean_tracks_measure() {
    let j = jensen_profile_json("t^3 - t - 1", 4096).unwrap();
    assert_eq!(j["theta"].as_array().unwrap().len(), 4096);
    let mean = j["mean"].as_f64().unwrap();
    let lo = j["measure"]["lo"].as_f64().unwrap();
    assert!((mean - lo).abs() < 1e-9, "{mean} vs {lo}");
    assert_eq!(jensen_profile_json("t - 2", 1).unwrap()["theta"].as_array().unwrap().len(), 8);
}

#[test]
fn synthesizer_round_trips() {
    let r = synthesize_json("0.5", "2").unwrap();
    assert!(r["miss"]["s"].as_f64().unwrap() <= 1e-9);
    assert!(r["miss"]["t"].as_f64().unwrap() <= 1e-9);
    assert_eq!(r["spec"]["kind"], "tensor");
    let r = synthesize_json("0", "inf").unwrap();
    assert_eq!(r["total"]["lo"], "inf");
    assert!(synthesize_json("1", "0.5").unwrap_err().contains("s ≤ t"));
    assert!(synthesize_json("-1", "0.5").is_err());
}
