use mahlerkit::lehmer::{
    canonicalize, checkpoint_text, enumerate, read_checkpoint, search_with, LehmerError, SearchConfig, SearchOptions,
};
use mahlerkit::poly::reciprocal;
use mahlerkit::{mahler, LaurentPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(max_degree: usize, height: u64, top_k: usize) -> SearchConfig {
    SearchConfig { max_degree, height, monic_reciprocal_only: true, top_k, eps: 1e-10 }
}

fn orbit(f: &LaurentPoly) -> Vec<LaurentPoly> {
    let mut out = Vec::new();
    for g in [f.clone(), reciprocal(f).unwrap()] {
        for h in [g.clone(), g.negate_variable()] {
            out.push(h.clone());
            out.push(h.neg());
        }
    }
    out
}

#[test]
fn canonical_form_is_orbit_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let deg = rng.gen_range(1..=8);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-3..=3)).collect();
        c[0] = if c[0] == 0 { 1 } else { c[0] };
        c[deg] = if c[deg] == 0 { -2 } else { c[deg] };
        let f = LaurentPoly::from_i64s(&c, rng.gen_range(-2..=2));
        let canon = canonicalize(&f);
        for g in orbit(&f) {
            assert_eq!(canonicalize(&g), canon, "{f} vs {g}");
        }
        let (a, b) = (mahler(&f, 1e-8, false).unwrap(), mahler(&canon, 1e-8, false).unwrap());
        assert!(a.value.overlaps(&b.value));
    }
}

#[test]
fn enumeration_hits_every_orbit_once() {
    let cfg = config(4, 1, 10);
    let reps: Vec<LaurentPoly> = enumerate(&cfg).collect();
    let mut seen = std::collections::HashSet::new();
    for f in &reps {
        assert_eq!(&canonicalize(f), f);
        assert!(seen.insert(f.to_string()), "duplicate {f}");
    }
    assert!(reps.iter().all(|f| f.degree() >= 1 && f.offset() == 0));
}

#[test]
fn interrupted_search_resumes_to_same_result() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(8, 1, 5);
    let path = dir.path().join("run.jsonl");
    let partial = search_with(
        &cfg,
        &SearchOptions { checkpoint: Some(path.clone()), max_batches: Some(1), workers: 2, ..Default::default() },
    )
    .unwrap();
    assert!(!partial.complete);
    let (_, _, next, complete) = read_checkpoint(&path).unwrap();
    assert!(next > 0 && !complete);

    let resumed =
        search_with(&cfg, &SearchOptions { checkpoint: Some(path.clone()), workers: 2, ..Default::default() }).unwrap();
    let fresh = search_with(&cfg, &SearchOptions { workers: 1, ..Default::default() }).unwrap();
    assert!(resumed.complete);
    let key =
        |rs: &[mahlerkit::SearchRecord]| rs.iter().map(|r| (r.poly.to_string(), r.discovered_at)).collect::<Vec<_>>();
    assert_eq!(key(&resumed.records), key(&fresh.records));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), checkpoint_text(&cfg, &fresh.records, next_total(&cfg), true));
}

fn next_total(cfg: &SearchConfig) -> u64 {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.jsonl");
    search_with(cfg, &SearchOptions { checkpoint: Some(p.clone()), workers: 1, ..Default::default() }).unwrap();
    read_checkpoint(&p).unwrap().2
}

#[test]
fn mismatched_checkpoint_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    let opts = || SearchOptions { checkpoint: Some(path.clone()), workers: 1, ..Default::default() };
    search_with(&config(3, 1, 3), &opts()).unwrap();
    let err = search_with(&config(4, 1, 3), &opts()).unwrap_err();
    assert!(matches!(err, LehmerError::CheckpointMismatch { .. }), "{err}");
}

#[test]
fn corrupt_checkpoint_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    std::fs::write(&path, "{\"type\":\"header\"\n").unwrap();
    let err =
        search_with(&config(3, 1, 3), &SearchOptions { checkpoint: Some(path), workers: 1, ..Default::default() })
            .unwrap_err();
    assert!(matches!(err, LehmerError::CorruptCheckpoint { .. }), "{err}");
}

#[test]
fn checkpoints_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(7, 1, 4);
    let texts: Vec<String> = [1usize, 3, 8]
        .iter()
        .map(|&w| {
            let p = dir.path().join(format!("w{w}.jsonl"));
            search_with(&cfg, &SearchOptions { checkpoint: Some(p.clone()), workers: w, ..Default::default() })
                .unwrap();
            std::fs::read_to_string(p).unwrap()
        })
        .collect();
    assert_eq!(texts[0], texts[1]);
    assert_eq!(texts[0], texts[2]);
}

#[test]
fn progress_callback_sees_every_chunk() {
    let cfg = config(6, 1, 3);
    let last = std::sync::Mutex::new(None);
    let cb = |p: &mahlerkit::lehmer::Progress| {
        *last.lock().unwrap() = Some((p.chunks_done, p.total_chunks));
    };
    let out = search_with(&cfg, &SearchOptions { progress: Some(&cb), workers: 1, ..Default::default() }).unwrap();
    let (done, total) = last.lock().unwrap().unwrap();
    assert_eq!(done, total);
    assert_eq!(out.progress.chunks_done, total);
}
