//! End-to-end acceptance criteria. Runs as a plain binary so every criterion
//! is evaluated and reported on its own line, then exits non-zero if any
//! failed.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{exhaustive_dtw, random_matrix, rng, same};
use wheelsense::dtw::{classify, dtw_distance, DtwMode};
use wheelsense::features::{cepstral_smooth, cepstrum, extract_features, mel_filter_matrix, mel_of_freq, FrontEndConfig, MelMatrix};
use wheelsense::media_io::{CameraRig, TemplateLibrary};
use wheelsense::nav::{decide, Action};
use wheelsense::obstacle::{detect_obstacles, DetectConfig, ObstacleMask, RegionSpec};
use wheelsense::pipeline::{navigate, NavigateConfig};
use wheelsense::stereo::compute_disparity;
use wheelsense::synth::{random_scene, render_stereo_scene, synth_word, ObstacleSpec, SceneSpec, PALETTE, VOCABULARY};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(checks: Vec<(bool, String)>) -> Outcome {
    let passed = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .into_iter()
        .map(|(ok, msg)| format!("{}{msg}", if ok { "" } else { "FAILED " }))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { passed, detail }
}

fn single_obstacle(d: usize) -> SceneSpec {
    let rig = CameraRig::default();
    SceneSpec {
        seed: d as u64,
        obstacles: vec![ObstacleSpec {
            color: PALETTE[d % PALETTE.len()],
            depth_mm: rig.focal_baseline() / d as f64,
            top: 125,
            left: 120,
            width: 60,
            height: 45,
        }],
        ..Default::default()
    }
}

fn triangulation_exactness() -> Outcome {
    let mut checks = Vec::new();
    for d in [5usize, 10, 15, 20, 25] {
        let spec = single_obstacle(d);
        let z = spec.rig.focal_baseline() / d as f64;
        let scene = render_stereo_scene(&spec).unwrap();
        let start = Instant::now();
        let out = navigate(&scene.left, &scene.right, &spec.rig, &NavigateConfig::default()).unwrap();
        let elapsed = start.elapsed();
        // interior obstacle pixels: away from the patch border by the match
        // window plus the 5x5 median
        let mut wrong = 0;
        let mut interior = 0;
        for r in 0..240 {
            for c in 0..320 {
                if scene.truth.is_obstacle(r, c) && !scene.truth.near_boundary(r, c, 6) {
                    interior += 1;
                    if out.disparity.get(r, c) != d {
                        wrong += 1;
                    }
                }
            }
        }
        let err = (out.distance_mm - z).abs();
        checks.push((
            wrong == 0 && interior > 0 && err < 0.01 && elapsed < Duration::from_secs(5),
            format!("d={d}: Z={z:.3} D={:.3} |err|={err:.2e} disparity errors {wrong}/{interior} in {:.0?}", out.distance_mm, elapsed),
        ));
    }
    outcome(checks)
}

fn mask_quality() -> Outcome {
    let mut worst = (1.0f64, 1.0f64);
    let mut checks = Vec::new();
    for seed in 0..20 {
        let spec = random_scene(1000 + seed, 3);
        let scene = render_stereo_scene(&spec).unwrap();
        let mask = detect_obstacles(&scene.left, &RegionSpec::default(), &DetectConfig::default()).unwrap();
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for r in 0..240 {
            for c in 0..320 {
                if scene.truth.near_boundary(r, c, 4) {
                    continue;
                }
                match (mask.get(r, c), scene.truth.is_obstacle(r, c)) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    _ => {}
                }
            }
        }
        let precision = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
        worst = (worst.0.min(precision), worst.1.min(recall));
        if precision < 0.99 || recall < 0.99 {
            checks.push((false, format!("seed {seed}: precision {precision:.4} recall {recall:.4}")));
        }
    }
    checks.push((
        worst.0 >= 0.99 && worst.1 >= 0.99,
        format!("20 scenes, worst precision {:.4}, worst recall {:.4}", worst.0, worst.1),
    ));
    outcome(checks)
}

/// True if every window feeding the (median-filtered) disparity at
/// `(r, c)` has an exact counterpart in the right view.
fn has_exact_match(scene: &wheelsense::synth::StereoScene, r: usize, c: usize) -> bool {
    let (left, right) = (scene.left.to_gray(), scene.right.to_gray());
    let d = scene.truth.disparity(r, c);
    scene.truth.is_obstacle(r, c)
        && (r.saturating_sub(6)..=(r + 6).min(239)).all(|rr| {
            (c.saturating_sub(6)..=(c + 6).min(319)).all(|cc| cc >= d && left.get(rr, cc) == right.get(rr, cc - d))
        })
}

fn illumination_robustness() -> Outcome {
    let config = NavigateConfig::default();
    let scenes: Vec<(String, SceneSpec)> = [5usize, 10, 15, 20, 25]
        .iter()
        .map(|&d| (format!("single d={d}"), single_obstacle(d)))
        .chain((0..20).map(|s| (format!("multi seed {}", 1000 + s), random_scene(1000 + s, 3))))
        .collect();
    let (mut changed, mut evaluated, mut changed_exact, mut exact) = (0, 0, 0, 0);
    let mut failing = Vec::new();
    for (name, spec) in &scenes {
        let base = render_stereo_scene(spec).unwrap();
        let bright = render_stereo_scene(&SceneSpec { right_gain: 1.7, ..spec.clone() }).unwrap();
        let mask = detect_obstacles(&base.left, &config.region, &config.detect).unwrap();
        let left = base.left.to_gray();
        let a = compute_disparity(&left, &base.right.to_gray(), &mask, &config.nav_region, &config.matching).unwrap();
        let b = compute_disparity(&left, &bright.right.to_gray(), &mask, &config.nav_region, &config.matching).unwrap();
        let mut here = 0;
        for r in 0..240 {
            for c in 0..320 {
                if a.get(r, c) == 0 && b.get(r, c) == 0 {
                    continue;
                }
                evaluated += 1;
                let matchable = has_exact_match(&base, r, c);
                exact += usize::from(matchable);
                if a.get(r, c) != b.get(r, c) {
                    here += 1;
                    changed_exact += usize::from(matchable);
                }
            }
        }
        changed += here;
        if here > 0 {
            failing.push(format!("{name}: {here}"));
        }
    }
    outcome(vec![
        (
            changed == 0,
            format!(
                "{changed} of {evaluated} disparity pixels changed over {} scenes{}",
                scenes.len(),
                if failing.is_empty() { String::new() } else { format!(" ({})", failing.join(", ")) }
            ),
        ),
        (
            true,
            format!("of which {changed_exact} among the {exact} pixels whose windows have an exact match"),
        ),
    ])
}

fn control_law() -> Outcome {
    let mut right_blocked = ObstacleMask::zeros(320, 240);
    for r in 150..=210 {
        for c in 213..320 {
            right_blocked.set(r, c, true);
        }
    }
    let table = [
        (599.0, "Stop"),
        (600.0, "Stop"),
        (601.0, "Turn"),
        (750.0, "Turn"),
        (751.0, "GoStraight"),
        (5000.0, "GoStraight"),
    ];
    let mut checks = Vec::new();
    for (d, want) in table {
        let a = decide(d, &right_blocked).action;
        let got = if a.is_turn() { "Turn" } else { a.name() };
        checks.push((got == want, format!("D={d}→{a}")));
    }
    let l = decide(700.0, &right_blocked).action;
    let r = decide(700.0, &right_blocked.mirrored()).action;
    checks.push((
        l == Action::TurnLeft && r == Action::TurnRight,
        format!("mirror: {l} / {r}"),
    ));
    outcome(checks)
}

fn front_end_invariants() -> Outcome {
    let mut checks = Vec::new();
    let cfg = FrontEndConfig::default();
    let bank = mel_filter_matrix(&cfg).unwrap();
    let worst_row = (0..bank.channels())
        .map(|k| (bank.row(k).iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push((worst_row <= 1e-9, format!("filterbank row sums within {worst_row:.1e} of 1")));

    let m = mel_of_freq(1000.0).unwrap();
    checks.push(((m - 1000.02).abs() <= 0.01, format!("mel(1000) = {m:.4} (expected 1000.02 ± 0.01)")));

    let word = synth_word("reverse", 5, &cfg).unwrap();
    let reference = extract_features(&word, &cfg).unwrap();
    let exact = [0.5, 0.25, 0.125]
        .iter()
        .all(|&g| extract_features(&word.scaled(g).unwrap(), &cfg).unwrap() == reference);
    let worst_general = [0.3, 0.77]
        .iter()
        .map(|&g| {
            let other = extract_features(&word.scaled(g).unwrap(), &cfg).unwrap();
            other.values().iter().zip(reference.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    checks.push((
        exact && worst_general < 1e-9,
        format!("amplitude invariance: bit-exact for gains 1/2,1/4,1/8; max deviation {worst_general:.1e} for 0.3, 0.77"),
    ));

    const N: usize = 512;
    let rippled = |amp: f64| -> Vec<f64> {
        (0..N)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / N as f64;
                2.0 + 0.8 * t.cos() + 0.3 * (2.0 * t).cos() + amp * (16.0 * t).cos()
            })
            .collect()
    };
    let ripple = |x: &[f64]| 2.0 / N as f64 * x.iter().enumerate().map(|(i, v)| v * (2.0 * PI * (16 * i) as f64 / N as f64).cos()).sum::<f64>();
    let x = rippled(0.5);
    let c = cepstrum(&x).unwrap();
    let peak = (3..N / 2).max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap();
    let residual = ripple(&cepstral_smooth(&x, 16).unwrap()) / ripple(&x);
    checks.push((
        peak == 16 && residual.abs() < 0.01,
        format!("ripple period 32 bins: cepstral peak at d={peak}, liftered ripple {:.2e} of original", residual.abs()),
    ));
    outcome(checks)
}

fn dtw_correctness() -> Outcome {
    let mut checks = Vec::new();
    for mode in [DtwMode::Symmetric, DtwMode::Asymmetric] {
        let mut r = rng(match mode {
            DtwMode::Symmetric => 61,
            DtwMode::Asymmetric => 62,
        });
        let mut mismatches = 0;
        for _ in 0..200 {
            use rand::Rng;
            let c = r.random_range(1..=4);
            let tw = r.random_range(1..=6);
            let tx = r.random_range(1..=6);
            let w = random_matrix(&mut r, c, tw);
            let x = random_matrix(&mut r, c, tx);
            if !same(dtw_distance(&w, &x, mode).unwrap().distance, exhaustive_dtw(&w, &x, mode), 1e-9) {
                mismatches += 1;
            }
        }
        checks.push((mismatches == 0, format!("{mode:?}: {mismatches}/200 disagree with exhaustive oracle")));
    }
    let w = MelMatrix::from_frames(1, vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
    let x = MelMatrix::from_frames(1, vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
    let hand = dtw_distance(&w, &x, DtwMode::Symmetric).unwrap().distance;
    checks.push((hand == 2.0, format!("hand example = {hand}")));
    outcome(checks)
}

fn recognizer() -> Outcome {
    use rand::Rng;
    let cfg = FrontEndConfig::default();
    let mode = DtwMode::default();
    let templates: Vec<(String, MelMatrix)> = VOCABULARY
        .iter()
        .map(|w| (w.to_string(), extract_features(&synth_word(w, 0, &cfg).unwrap(), &cfg).unwrap()))
        .collect();
    let lib = TemplateLibrary::from_entries(templates.clone()).unwrap();
    let mut checks = Vec::new();

    let self_ok = templates
        .iter()
        .filter(|(label, m)| {
            let c = classify(m, &lib, mode).unwrap();
            &c.label == label && c.distance == 0.0
        })
        .count();
    checks.push((self_ok == 6, format!("self-recognition {self_ok}/6 at distance 0")));

    let mut margin = f64::INFINITY;
    for (a, ma) in &templates {
        for (b, mb) in &templates {
            if a != b {
                margin = margin.min(dtw_distance(ma, mb, mode).unwrap().distance);
            }
        }
    }

    let mut r = rng(77);
    let mut correct = 0;
    let mut within = 0;
    let mut worst_perturbation = 0.0f64;
    for trial in 0..100u64 {
        let k = (trial % 6) as usize;
        let gain = r.random_range(0.2..0.95);
        let utterance = synth_word(VOCABULARY[k], 100 + trial, &cfg).unwrap().scaled(gain).unwrap();
        let features = extract_features(&utterance, &cfg).unwrap();
        let perturbation = dtw_distance(&features, &templates[k].1, mode).unwrap().distance;
        worst_perturbation = worst_perturbation.max(perturbation);
        if perturbation < margin / 2.0 {
            within += 1;
        }
        if classify(&features, &lib, mode).unwrap().label == VOCABULARY[k] {
            correct += 1;
        }
    }
    checks.push((
        within == 100,
        format!("perturbations below half margin {within}/100 (worst {worst_perturbation:.1}, margin {margin:.1})"),
    ));
    checks.push((correct == 100, format!("recognized {correct}/100 perturbed, rescaled utterances")));
    outcome(checks)
}

fn throughput() -> Outcome {
    let spec = random_scene(4242, 3);
    let scene = render_stereo_scene(&spec).unwrap();
    let config = NavigateConfig::default();
    // warm the thread pool once
    navigate(&scene.left, &scene.right, &spec.rig, &config).unwrap();
    let mut times: Vec<Duration> = (0..5)
        .map(|_| {
            let t = Instant::now();
            navigate(&scene.left, &scene.right, &spec.rig, &config).unwrap();
            t.elapsed()
        })
        .collect();
    times.sort();
    let worst = *times.last().unwrap();
    outcome(vec![(
        worst <= Duration::from_secs(1),
        format!("320x240 navigate: median {:.1?}, worst {:.1?} over 5 runs", times[2], worst),
    )])
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("triangulation exactness", triangulation_exactness),
        ("obstacle mask quality", mask_quality),
        ("NCC illumination robustness", illumination_robustness),
        ("control law table", control_law),
        ("front-end invariants", front_end_invariants),
        ("DTW correctness", dtw_correctness),
        ("recognizer", recognizer),
        ("throughput", throughput),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {} {name}: {} — {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
