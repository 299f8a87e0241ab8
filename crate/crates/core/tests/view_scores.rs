mod common;

use common::*;
use proptest::prelude::*;
use roomgt::io::PfmImage;
use roomgt::viewsel::{rank_views, sample_wall_views, score_candidates, score_maps, WallViewParams};

fn maps(w: usize, h: usize, depths: &[f32], normal: [f32; 3]) -> (PfmImage, PfmImage) {
    let depth = PfmImage::from_data(w, h, 1, depths.to_vec()).unwrap();
    let normals = PfmImage::from_data(w, h, 3, (0..w * h).flat_map(|_| normal).collect()).unwrap();
    (depth, normals)
}

proptest! {
    #[test]
    fn deeper_views_score_higher(depths in prop::collection::vec(0.0f32..8.0, 48), s in 1.01f32..3.0) {
        prop_assume!(depths.iter().any(|&d| d > 1e-3));
        let (d, n) = maps(8, 6, &depths, [0.0, 0.0, 1.0]);
        let scaled: Vec<f32> = depths.iter().map(|x| x * s).collect();
        let (d2, _) = maps(8, 6, &scaled, [0.0, 0.0, 1.0]);
        prop_assert!(score_maps(&d2, &n) > score_maps(&d, &n));
    }

    #[test]
    fn empty_margin_changes_nothing(depths in prop::collection::vec(0.0f32..8.0, 24), pad in 1usize..4) {
        let normal = [0.2, -0.3, 0.9];
        let (d, n) = maps(6, 4, &depths, normal);
        let (w, h) = (6 + 2 * pad, 4 + 2 * pad);
        let mut padded = vec![0.0f32; w * h];
        for y in 0..4 {
            for x in 0..6 {
                padded[(y + pad) * w + x + pad] = depths[y * 6 + x];
            }
        }
        let (d2, n2) = maps(w, h, &padded, normal);
        prop_assert!((score_maps(&d2, &n2) - score_maps(&d, &n)).abs() <= 1e-9 * score_maps(&d, &n).max(1.0));
    }
}

#[test]
fn ranking_is_a_sorted_prefix_of_the_candidates() {
    let scene = cornell();
    let square = [[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]];
    let params = WallViewParams {
        spacing: 1.0,
        ..WallViewParams::default()
    };
    let cams = sample_wall_views(&square, &params).unwrap();
    let cands = score_candidates(&scene, &cams);
    for k in [1, 3, cands.len(), cands.len() + 5] {
        let ranked = rank_views(&cands, k).unwrap();
        assert_eq!(ranked.len(), k.min(cands.len()));
        let mut seen = std::collections::HashSet::new();
        for w in ranked.windows(2) {
            assert!(w[0].score >= w[1].score);
        }
        for r in &ranked {
            assert!(seen.insert(r.index));
            assert_eq!(r.score, cands[r.index].score);
        }
    }
    assert!(rank_views(&[], 1).is_err());
}

#[test]
fn equal_scores_keep_input_order() {
    let scene = cornell();
    let cam = scene.cameras[0].clone();
    let cands = score_candidates(&scene, &[cam.clone(), cam.clone(), cam]);
    let ranked = rank_views(&cands, 3).unwrap();
    assert_eq!(ranked.iter().map(|r| r.index).collect::<Vec<_>>(), vec![0, 1, 2]);
}
