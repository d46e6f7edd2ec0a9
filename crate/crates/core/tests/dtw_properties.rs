mod common;

use common::{exhaustive_dtw, path_cost, random_matrix, rng, same};
use proptest::prelude::*;
use wheelsense::dtw::{classify, dtw_distance, DtwMode};
use wheelsense::features::MelMatrix;
use wheelsense::media_io::TemplateLibrary;

fn modes() -> impl Strategy<Value = DtwMode> {
    prop_oneof![Just(DtwMode::Symmetric), Just(DtwMode::Asymmetric)]
}

fn pair() -> impl Strategy<Value = (MelMatrix, MelMatrix)> {
    (any::<u64>(), 1usize..=3, 1usize..=6, 1usize..=6).prop_map(|(seed, c, tw, tx)| {
        let mut r = rng(seed);
        (random_matrix(&mut r, c, tw), random_matrix(&mut r, c, tx))
    })
}

proptest! {
    #[test]
    fn matches_exhaustive_oracle((w, x) in pair(), mode in modes()) {
        let got = dtw_distance(&w, &x, mode).unwrap();
        let want = exhaustive_dtw(&w, &x, mode);
        prop_assert!(same(got.distance, want, 1e-9), "dp {} vs oracle {}", got.distance, want);
    }

    #[test]
    fn path_is_legal_and_costs_the_distance((w, x) in pair(), mode in modes()) {
        let got = dtw_distance(&w, &x, mode).unwrap();
        if got.distance.is_finite() {
            let cost = path_cost(&w, &x, mode, &got.path);
            prop_assert!(cost.is_some(), "illegal path {:?}", got.path);
            prop_assert!((cost.unwrap() - got.distance).abs() <= 1e-9);
            prop_assert!(got.path.windows(2).all(|p| p[1].0 >= p[0].0 && p[1].1 >= p[0].1));
        } else {
            prop_assert!(got.path.is_empty());
        }
    }

    #[test]
    fn symmetric_mode_is_symmetric((w, x) in pair()) {
        let a = dtw_distance(&w, &x, DtwMode::Symmetric).unwrap().distance;
        let b = dtw_distance(&x, &w, DtwMode::Symmetric).unwrap().distance;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn self_distance_is_zero(seed in any::<u64>(), c in 1usize..4, t in 1usize..20, mode in modes()) {
        let w = random_matrix(&mut rng(seed), c, t);
        let r = dtw_distance(&w, &w, mode).unwrap();
        prop_assert_eq!(r.distance, 0.0);
        if mode == DtwMode::Symmetric {
            prop_assert_eq!(r.path, (0..t).map(|i| (i, i)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn duplicate_template_does_not_change_result(seed in any::<u64>(), dup in 0usize..4, mode in modes()) {
        let mut r = rng(seed);
        let mut entries: Vec<(String, MelMatrix)> =
            (0..4).map(|k| (format!("w{k}"), random_matrix(&mut r, 2, 5))).collect();
        let unknown = random_matrix(&mut r, 2, 5);
        let lib = TemplateLibrary::from_entries(entries.clone()).unwrap();
        let before = classify(&unknown, &lib, mode).unwrap();
        let copy = entries[dup].1.clone();
        entries.push((format!("w{dup}_copy"), copy));
        let lib = TemplateLibrary::from_entries(entries).unwrap();
        let after = classify(&unknown, &lib, mode).unwrap();
        prop_assert_eq!(before.label, after.label);
        prop_assert_eq!(before.distance, after.distance);
    }
}

#[test]
fn oracle_agrees_on_hand_example() {
    let w = MelMatrix::from_frames(1, vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
    let x = MelMatrix::from_frames(1, vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
    assert_eq!(exhaustive_dtw(&w, &x, DtwMode::Symmetric), 2.0);
    assert_eq!(dtw_distance(&w, &x, DtwMode::Symmetric).unwrap().distance, 2.0);
}

#[test]
fn orthogonal_templates_with_perturbation() {
    // six one-hot sequences; the unknown is #3 plus noise below half the margin
    let onehot = |k: usize| MelMatrix::from_frames(6, (0..8).map(|_| (0..6).map(|c| if c == k { 4.0 } else { 0.0 }).collect()).collect()).unwrap();
    let templates: Vec<MelMatrix> = (0..6).map(onehot).collect();
    let mut margin = f64::INFINITY;
    for a in 0..6 {
        for b in 0..6 {
            if a != b {
                margin = margin.min(dtw_distance(&templates[a], &templates[b], DtwMode::Symmetric).unwrap().distance);
            }
        }
    }
    let mut r = rng(11);
    let base = &templates[3];
    let noisy = random_matrix(&mut r, 6, 8).values().iter().zip(base.values()).map(|(n, v)| v + 0.05 * n).collect::<Vec<_>>();
    let unknown = MelMatrix::from_frames(6, noisy.chunks(6).map(|c| c.to_vec()).collect()).unwrap();
    let perturbation = dtw_distance(&unknown, base, DtwMode::Symmetric).unwrap().distance;
    assert!(perturbation < margin / 2.0);
    let lib = TemplateLibrary::from_entries((0..6).map(|k| (format!("t{k}"), templates[k].clone()))).unwrap();
    assert_eq!(classify(&unknown, &lib, DtwMode::Symmetric).unwrap().label, "t3");
}
