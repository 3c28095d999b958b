mod common;

use common::*;
use longsum::attention::{mean_attention_distance, uniform_distance, uniform_map, ToyModelConfig, ToyTransformer, Window};
use longsum::numerics::Tensor;

#[test]
fn uniform_distance_at_1024() {
    let d = mean_attention_distance(&uniform_map(1024)).unwrap();
    assert!((d - 341.33).abs() < 0.005, "{d}");
    assert!((d - uniform_distance(1024)).abs() < 1e-9);
    assert_eq!(d.round(), 341.0);
}

#[test]
fn diagonal_distance_is_zero() {
    assert_eq!(mean_attention_distance(&Tensor::eye(37)).unwrap(), 0.0);
}

#[test]
fn distance_matches_enumeration() {
    let gap = distance_gap(31);
    assert!(gap < 1e-10, "{gap:e}");
}

#[test]
fn covering_windows_equal_full_attention() {
    let gap = local_full_gap();
    assert!(gap < 1e-9, "{gap:e}");
}

#[test]
fn states_ignore_tokens_beyond_the_receptive_field() {
    assert_eq!(receptive_field_violations(200, 41), 0);
}

#[test]
fn tokens_inside_the_field_do_matter() {
    let cfg = ToyModelConfig { encoder_layers: 2, window: Window::Local(4), ..ToyModelConfig::default() };
    let model = ToyTransformer::new(cfg, 8).unwrap();
    let base: Vec<usize> = (0..20).map(|i| 4 + (i * 13) % 90).collect();
    let mut moved = base.clone();
    moved[14] = 99;
    let (a, _) = model.encoder_states(&base).unwrap();
    let (b, _) = model.encoder_states(&moved).unwrap();
    assert_ne!(a.row(10), b.row(10));
    assert_eq!(a.row(9), b.row(9));
}

#[test]
fn random_model_distances_stay_below_n() {
    let model = ToyTransformer::new(ToyModelConfig::default(), 12).unwrap();
    let tokens: Vec<usize> = (0..48).map(|i| 4 + (i * 7) % 90).collect();
    let (_, maps) = model.encoder_states(&tokens).unwrap();
    for layer in maps {
        for h in 0..layer.heads() {
            let d = mean_attention_distance(&layer.head(h)).unwrap();
            assert!((0.0..=47.0).contains(&d));
        }
    }
}
