// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use proptest::prelude::*;
use ringsim_core::bundled;
use ringsim_core::cnnworkload::*;

/// (kind, K, D, F, S) of the published EfficientNetB7 shape table.
const SHAPES: [(LayerKind, u32, u32, u64, u32); 26] = [
    (LayerKind::DC, 3, 1, 25024, 9),
    (LayerKind::DC, 5, 1, 45216, 25),
    (LayerKind::PC, 1, 8, 288, 8),
    (LayerKind::PC, 1, 12, 2016, 12),
    (LayerKind::PC, 1, 16, 64, 16),
    (LayerKind::PC, 1, 20, 3360, 20),
    (LayerKind::PC, 1, 32, 312, 32),
    (LayerKind::PC, 1, 40, 9600, 40),
    (LayerKind::PC, 1, 48, 2016, 48),
    (LayerKind::PC, 1, 56, 13440, 56),
    (LayerKind::PC, 1, 64, 48, 64),
    (LayerKind::PC, 1, 80, 3360, 80),
    (LayerKind::PC, 1, 96, 29952, 96),
    (LayerKind::PC, 1, 160, 21120, 160),
    (LayerKind::PC, 1, 192, 56, 192),
    (LayerKind::PC, 1, 224, 13440, 224),
    (LayerKind::PC, 1, 288, 452, 288),
    (LayerKind::PC, 1, 384, 29952, 384),
    (LayerKind::PC, 1, 480, 780, 480),
    (LayerKind::PC, 1, 640, 14080, 640),
    (LayerKind::PC, 1, 960, 2064, 960),
    (LayerKind::PC, 1, 1344, 2960, 1344),
    (LayerKind::PC, 1, 2304, 6496, 2304),
    (LayerKind::PC, 1, 3840, 2400, 3840),
    (LayerKind::SC, 3, 3, 64, 27),
    (LayerKind::FC, 1, 2560, 1, 2560),
];

#[test]
fn shape_file_reproduces_table() {
    let w = bundled::get("efficientnet_b7_shapes").unwrap();
    assert_eq!(w.layers.len(), 26);
    let got: Vec<_> = w
        .layers
        .iter()
        .map(|l| (l.kind, l.k, l.d, l.f as u64, l.s()))
        .collect();
    assert_eq!(got, SHAPES.to_vec());
    let dc = &w.layers[0];
    assert_eq!((dc.kind, dc.k, dc.d, dc.f, dc.s()), (LayerKind::DC, 3, 1, 25024, 9));
}

#[test]
fn per_layer_file_aggregates_to_table() {
    let w = bundled::get("efficientnet_b7").unwrap();
    let table = w.shape_table();
    for (kind, k, d, f, _) in SHAPES {
        if kind == LayerKind::FC {
            // The per-layer network ends in a 1000-class classifier.
            assert_eq!(table[&(kind, k, d)], 1000);
        } else {
            assert_eq!(table[&(kind, k, d)], f, "{kind} K={k} D={d}");
        }
    }
    assert_eq!(table.len(), SHAPES.len());
}

#[test]
fn histogram_counts_dkvs_per_length() {
    let w = bundled::get("efficientnet_b7_shapes").unwrap();
    let h = w.s_histogram();
    assert_eq!(h[&9], 25024);
    assert_eq!(h[&27], 64);
    assert_eq!(h.len(), 26);
    assert_eq!(w.total_dkvs(), SHAPES.iter().map(|s| s.3).sum::<u64>());
}

#[test]
fn reduction_factor_grid() {
    for k in 1..=7u32 {
        for f in 1..=1024u32 {
            let (rw, ro) = reduction_factors(k, f);
            let want = 1.0 / f as f64 + 1.0 / (k * k) as f64;
            assert_eq!(rw, want);
            assert_eq!(ro, want);
            assert!(rw > 0.0 && rw <= 2.0);
        }
    }
}

#[test]
fn cost_ratio_matches_reduction_factor() {
    for k in [1, 3, 5, 7] {
        for f in [1, 2, 16, 256, 1000] {
            for d in [1, 3, 32] {
                let dc = LayerSpec::new("dc", LayerKind::DC, k, d, 1, 7, 7).unwrap();
                let sc = LayerSpec::new("sc", LayerKind::SC, k, d, f, 7, 7).unwrap();
                let dsc = dsc_costs(&dc, f).unwrap();
                let full = sc_costs(&sc).unwrap();
                let (r, _) = reduction_factors(k, f);
                let ratio_o = dsc.o as f64 / full.o as f64;
                let ratio_w = dsc.w as f64 / full.w as f64;
                assert!((ratio_o - r).abs() < 1e-12);
                assert!((ratio_w - r).abs() < 1e-12);
                assert_eq!(dsc.r_w, dsc.r_o);
            }
        }
    }
}

#[test]
fn load_from_disk_and_report_errors() {
    let dir = std::env::temp_dir().join(format!("ringsim-wl-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("net.csv");
    std::fs::write(&good, bundled::DSC_SMALL).unwrap();
    let w = load_workload(&good).unwrap();
    assert_eq!(w.name, "net");
    assert_eq!(w.layers.len(), 8);

    let bad = dir.join("bad.csv");
    let mut f = std::fs::File::create(&bad).unwrap();
    writeln!(f, "name,kind,K,D,F,H_out,W_out").unwrap();
    writeln!(f, "p,PC,3,8,8,4,4").unwrap();
    drop(f);
    let err = load_workload(&bad).unwrap_err();
    assert!(matches!(err, WorkloadError::InvariantViolation { line: 2, .. }));
    assert!(err.to_string().contains("bad.csv:2"));

    assert!(matches!(
        load_workload(&dir.join("missing.csv")),
        Err(WorkloadError::Io { .. })
    ));
    let empty = dir.join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert!(load_workload(&empty).unwrap().is_empty());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_header_and_kind() {
    assert!(parse_workload("w", "w", "a,b\n").is_err());
    let t = "name,kind,K,D,F,H_out,W_out\nx,XC,1,1,1,1,1\n";
    assert!(matches!(parse_workload("w", "w", t), Err(WorkloadError::Parse { line: 2, .. })));
}

fn kind() -> impl Strategy<Value = LayerKind> {
    prop_oneof![
        Just(LayerKind::SC),
        Just(LayerKind::DC),
        Just(LayerKind::PC),
        Just(LayerKind::FC)
    ]
}

proptest! {
    #[test]
    fn flattened_size_equals_weight_count(kind in kind(), k in 1u32..8, d in 1u32..600, f in 1u32..600, hw in 1u32..20) {
        let (k, hw) = match kind {
            LayerKind::PC => (1, hw),
            LayerKind::FC => (1, 1),
            _ => (k, hw),
        };
        let l = LayerSpec::new("l", kind, k, d, f, hw, hw).unwrap();
        let m = decompose(&l);
        let weights = match kind {
            LayerKind::SC => sc_costs(&l).unwrap().w,
            LayerKind::DC => (k * k * d) as u64,
            LayerKind::PC | LayerKind::FC => (d * f) as u64,
        };
        prop_assert_eq!(m.s as u64 * m.h as u64, weights);
        prop_assert_eq!(decompose(&l), m);
    }

    #[test]
    fn reduction_factor_peaks_at_unit_kernel(k in 1u32..64, f in 1u32..4096) {
        let (r, _) = reduction_factors(k, f);
        prop_assert!(r > 0.0 && r <= 2.0);
        prop_assert!(r < 2.0 || (k == 1 && f == 1));
    }
}
