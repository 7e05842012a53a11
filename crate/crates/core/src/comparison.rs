// SPDX-License-Identifier: Apache-2.0

//! Area-proportionate comparison of organizations across bit rates.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::archmodel::{validate_config, ArchConfig, ConfigError, Organization, ValidatedArchConfig};
use crate::cnnworkload::Workload;
use crate::simengine::{area_proportionate_counts, simulate, SimError, SimReport};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid comparison: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSpec {
    pub organizations: Vec<Organization>,
    pub bit_rates_gbps: Vec<u32>,
    pub precision_bits: u32,
    pub reference_organization: Organization,
    pub reference_vdpes: u32,
    pub tpcs_per_tile: u32,
    pub baseline_organization: Organization,
    pub baseline_bit_rate_gbps: u32,
    /// Photonic parameter overrides applied to every configuration.
    pub params: Option<serde_json::Map<String, serde_json::Value>>,
}

impl Default for CompareSpec {
    fn default() -> Self {
        CompareSpec {
            organizations: Organization::ALL.to_vec(),
            bit_rates_gbps: vec![1, 3, 5],
            precision_bits: 4,
            reference_organization: Organization::Rmam,
            reference_vdpes: 512,
            tpcs_per_tile: 4,
            baseline_organization: Organization::Rmam,
            baseline_bit_rate_gbps: 1,
            params: None,
        }
    }
}

/// Published area-matched VDPE counts against RMAM with 512 VDPEs.
pub fn published_count(org: Organization, bit_rate_gbps: u32) -> Option<u32> {
    use Organization::*;
    Some(match (org, bit_rate_gbps) {
        (Rmam, 1 | 3 | 5) => 512,
        (Ramm, 1) => 587,
        (Mam, 1) => 568,
        (Amm, 1) => 656,
        (Ramm, 3) => 576,
        (Mam, 3) => 562,
        (Amm, 3) => 629,
        (Ramm, 5) => 567,
        (Mam, 5) => 547,
        (Amm, 5) => 620,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub organization: Organization,
    pub bit_rate_gbps: u32,
    pub n: u32,
    pub y: u32,
    pub total_vdpes: u32,
    pub published_vdpes: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub workload: String,
    pub organization: Organization,
    pub bit_rate_gbps: u32,
    pub total_vdpes: u32,
    pub fps: f64,
    pub fps_per_watt: f64,
    pub total_power_w: f64,
    pub mean_utilization: f64,
    pub normalized_fps: f64,
    pub normalized_fps_per_watt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GmeanRow {
    pub organization: Organization,
    pub bit_rate_gbps: u32,
    pub normalized_fps: f64,
    pub normalized_fps_per_watt: f64,
}

/// Achieved gmean ratio next to the published one. `band` brackets the
/// published value by a factor of two where a band check applies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioCheck {
    pub label: String,
    pub achieved: f64,
    pub published: f64,
    pub band: Option<(f64, f64)>,
}

impl RatioCheck {
    pub fn within_band(&self) -> Option<bool> {
        self.band.map(|(lo, hi)| self.achieved >= lo && self.achieved <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub spec: CompareSpec,
    pub configs: Vec<ValidatedArchConfig>,
    pub counts: Vec<CountRow>,
    pub rows: Vec<CompareRow>,
    pub gmeans: Vec<GmeanRow>,
    pub ratios: Vec<RatioCheck>,
    #[serde(skip)]
    pub reports: Vec<SimReport>,
}

impl CompareReport {
    pub fn gmean(&self, org: Organization, bit_rate_gbps: u32) -> Option<&GmeanRow> {
        self.gmeans
            .iter()
            .find(|g| g.organization == org && g.bit_rate_gbps == bit_rate_gbps)
    }

    pub fn report(&self, workload: &str, org: Organization, bit_rate_gbps: u32) -> Option<&SimReport> {
        self.reports.iter().find(|r| {
            r.workload == workload && r.organization == org && r.bit_rate_gbps == bit_rate_gbps
        })
    }
}

fn gmean(vals: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = vals.fold((0.0, 0usize), |(s, n), v| (s + v.ln(), n + 1));
    (sum / n as f64).exp()
}

/// Area-matched configurations: the reference organization keeps its fixed
/// VDPE count at every bit rate, the others are resized to its area.
pub fn area_matched_configs(spec: &CompareSpec) -> Result<Vec<ValidatedArchConfig>, CompareError> {
    let mut out = Vec::new();
    for &br in &spec.bit_rates_gbps {
        let build = |org: Organization, total: u32| {
            let mut cfg = ArchConfig::new(org, br, spec.precision_bits)
                .with_total_vdpes(total as i64);
            cfg.tpcs_per_tile = spec.tpcs_per_tile as i64;
            cfg.params = spec.params.clone();
            validate_config(&cfg)
        };
        let reference = build(spec.reference_organization, spec.reference_vdpes)?;
        let candidates = spec
            .organizations
            .iter()
            .map(|&o| build(o, spec.reference_vdpes))
            .collect::<Result<Vec<_>, _>>()?;
        let counts = area_proportionate_counts(&reference, &candidates)?;
        for (c, v) in candidates.iter().zip(counts) {
            out.push(c.with_total_vdpes(v));
        }
    }
    Ok(out)
}

pub fn compare(spec: &CompareSpec, workloads: &[Workload]) -> Result<CompareReport, CompareError> {
    if spec.organizations.is_empty() || spec.bit_rates_gbps.is_empty() || workloads.is_empty() {
        return Err(CompareError::Invalid(
            "organizations, bit rates and workloads must be nonempty".into(),
        ));
    }
    let configs = area_matched_configs(spec)?;
    let has_baseline = configs.iter().any(|c| {
        c.organization() == spec.baseline_organization
            && c.bit_rate_gbps() == spec.baseline_bit_rate_gbps
    });
    if !has_baseline {
        return Err(CompareError::Invalid(format!(
            "baseline {}@{} Gbps is not part of the comparison",
            spec.baseline_organization, spec.baseline_bit_rate_gbps
        )));
    }

    let jobs: Vec<(&ValidatedArchConfig, &Workload)> = configs
        .iter()
        .flat_map(|c| workloads.iter().map(move |w| (c, w)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|(c, w)| simulate(w, c))
        .collect::<Result<Vec<_>, _>>()?;

    let baseline = |w: &str| {
        reports
            .iter()
            .find(|r| {
                r.workload == w
                    && r.organization == spec.baseline_organization
                    && r.bit_rate_gbps == spec.baseline_bit_rate_gbps
            })
            .expect("baseline simulated")
    };
    let rows: Vec<CompareRow> = reports
        .iter()
        .map(|r| {
            let b = baseline(&r.workload);
            CompareRow {
                workload: r.workload.clone(),
                organization: r.organization,
                bit_rate_gbps: r.bit_rate_gbps,
                total_vdpes: r.total_vdpes,
                fps: r.fps,
                fps_per_watt: r.fps_per_watt,
                total_power_w: r.total_power_w,
                mean_utilization: r.mean_utilization,
                normalized_fps: r.fps / b.fps,
                normalized_fps_per_watt: r.fps_per_watt / b.fps_per_watt,
            }
        })
        .collect();

    let gmeans: Vec<GmeanRow> = configs
        .iter()
        .map(|c| {
            let sel = || {
                rows.iter().filter(|r| {
                    r.organization == c.organization() && r.bit_rate_gbps == c.bit_rate_gbps()
                })
            };
            GmeanRow {
                organization: c.organization(),
                bit_rate_gbps: c.bit_rate_gbps(),
                normalized_fps: gmean(sel().map(|r| r.normalized_fps)),
                normalized_fps_per_watt: gmean(sel().map(|r| r.normalized_fps_per_watt)),
            }
        })
        .collect();

    let counts = configs
        .iter()
        .map(|c| CountRow {
            organization: c.organization(),
            bit_rate_gbps: c.bit_rate_gbps(),
            n: c.n(),
            y: c.y(),
            total_vdpes: c.total_vdpes(),
            published_vdpes: published_count(c.organization(), c.bit_rate_gbps()),
        })
        .collect();

    let mut report = CompareReport {
        spec: spec.clone(),
        configs,
        counts,
        rows,
        gmeans,
        ratios: Vec::new(),
        reports,
    };
    report.ratios = published_ratios(&report);
    Ok(report)
}

type RatioRow = (&'static str, (Organization, u32), (Organization, u32), f64, bool);

fn published_ratios(report: &CompareReport) -> Vec<RatioCheck> {
    use Organization::*;
    let fps = |o, b| report.gmean(o, b).map(|g| g.normalized_fps);
    let table: [RatioRow; 10] = [
        ("fps RMAM/MAM @1G", (Rmam, 1), (Mam, 1), 1.8, true),
        ("fps RMAM/AMM @1G", (Rmam, 1), (Amm, 1), 17.1, false),
        ("fps RAMM/AMM @1G", (Ramm, 1), (Amm, 1), 1.54, false),
        ("fps RMAM@1G / RMAM@3G", (Rmam, 1), (Rmam, 3), 5.3, true),
        ("fps RMAM@1G / RMAM@5G", (Rmam, 1), (Rmam, 5), 8.0, true),
        ("fps RMAM@1G / MAM@3G", (Rmam, 1), (Mam, 3), 8.3, false),
        ("fps RMAM@1G / MAM@5G", (Rmam, 1), (Mam, 5), 10.2, false),
        ("fps RMAM@1G / AMM@3G", (Rmam, 1), (Amm, 3), 52.57, false),
        ("fps RMAM@1G / AMM@5G", (Rmam, 1), (Amm, 5), 79.8, false),
        ("fps RAMM/AMM @5G", (Ramm, 5), (Amm, 5), 1.0, false),
    ];
    table
        .iter()
        .filter_map(|(label, a, b, published, banded)| {
            let achieved = fps(a.0, a.1)? / fps(b.0, b.1)?;
            Some(RatioCheck {
                label: label.to_string(),
                achieved,
                published: *published,
                band: banded.then(|| (published / 2.0, published * 2.0)),
            })
        })
        .collect()
}
