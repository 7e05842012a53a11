// SPDX-License-Identifier: Apache-2.0

//! Workloads shipped with the crate.

use crate::cnnworkload::{parse_workload, Workload};

pub const EFFICIENTNET_B7_SHAPES: &str = include_str!("../workloads/efficientnet_b7_shapes.csv");
pub const EFFICIENTNET_B7: &str = include_str!("../workloads/efficientnet_b7.csv");
pub const MOBILENET_V1: &str = include_str!("../workloads/mobilenet_v1.csv");
pub const XCEPTION: &str = include_str!("../workloads/xception.csv");
pub const DSC_SMALL: &str = include_str!("../workloads/dsc_small.csv");

const ALL: [(&str, &str); 5] = [
    ("efficientnet_b7_shapes", EFFICIENTNET_B7_SHAPES),
    ("efficientnet_b7", EFFICIENTNET_B7),
    ("mobilenet_v1", MOBILENET_V1),
    ("xception", XCEPTION),
    ("dsc_small", DSC_SMALL),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ALL.iter().map(|(n, _)| *n)
}

pub fn get(name: &str) -> Option<Workload> {
    ALL.iter().find(|(n, _)| *n == name).map(|(n, text)| {
        parse_workload(n, &format!("<bundled>/{n}.csv"), text).expect("bundled workload parses")
    })
}

/// Per-layer depthwise-separable networks used for system comparisons.
pub fn dsc_heavy() -> Vec<Workload> {
    ["efficientnet_b7", "mobilenet_v1", "xception"]
        .iter()
        .map(|n| get(n).expect("bundled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_file_parses() {
        for n in names() {
            assert!(!get(n).unwrap().is_empty(), "{n}");
        }
        assert!(get("missing").is_none());
    }
}
