// SPDX-License-Identifier: Apache-2.0

//! Comb-switch geometry: channel spacing, comb FSR, ring radius and loss.

use std::f64::consts::PI;

use serde::Serialize;

use crate::archmodel::Organization;
use crate::mapper::reconfig_group_count;

pub const DEFAULT_CENTER_WAVELENGTH_NM: f64 = 1550.0;

/// One published comb-switch design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TabulatedDesign {
    pub organization: Organization,
    pub bit_rate_gbps: u32,
    pub n: u32,
    pub cs_fsr_nm: Option<f64>,
    pub radius_um: Option<f64>,
    pub pairs: u32,
    pub insertion_loss_db: f64,
}

const fn row(
    organization: Organization,
    bit_rate_gbps: u32,
    n: u32,
    cs_fsr_nm: Option<f64>,
    radius_um: Option<f64>,
    pairs: u32,
    insertion_loss_db: f64,
) -> TabulatedDesign {
    TabulatedDesign {
        organization,
        bit_rate_gbps,
        n,
        cs_fsr_nm,
        radius_um,
        pairs,
        insertion_loss_db,
    }
}

pub const TABULATED: [TabulatedDesign; 6] = [
    row(Organization::Ramm, 1, 31, Some(4.83), Some(18.17), 3, 0.029),
    row(Organization::Ramm, 3, 20, Some(5.0), Some(17.5), 2, 0.028),
    row(Organization::Ramm, 5, 16, None, None, 0, 0.0),
    row(Organization::Rmam, 1, 43, Some(4.65), Some(18.98), 4, 0.029),
    row(Organization::Rmam, 3, 28, Some(5.35), Some(16.2), 3, 0.026),
    row(Organization::Rmam, 5, 22, Some(4.54), Some(19.49), 2, 0.031),
];

pub fn tabulated(org: Organization, bit_rate_gbps: u32) -> Option<&'static TabulatedDesign> {
    TABULATED
        .iter()
        .find(|r| r.organization == org && r.bit_rate_gbps == bit_rate_gbps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Tabulated,
    Interpolated,
    /// Supplied by the caller.
    Given,
    NotApplicable,
}

/// Mean insertion loss over the populated design points (pairs ≥ 1).
pub fn mean_tabulated_loss_db() -> f64 {
    let used: Vec<f64> = TABULATED
        .iter()
        .filter(|r| r.pairs > 0)
        .map(|r| r.insertion_loss_db)
        .collect();
    used.iter().sum::<f64>() / used.len() as f64
}

/// Insertion loss of one comb-switch stage for (org, BR).
pub fn insertion_loss_db(org: Organization, bit_rate_gbps: u32) -> (f64, Provenance) {
    if !org.is_reconfigurable() {
        return (0.0, Provenance::NotApplicable);
    }
    match tabulated(org, bit_rate_gbps) {
        Some(r) if r.pairs > 0 => (r.insertion_loss_db, Provenance::Tabulated),
        _ => (mean_tabulated_loss_db(), Provenance::Interpolated),
    }
}

pub fn channel_spacing(modulator_fsr_nm: f64, n: u32) -> f64 {
    modulator_fsr_nm / (n as f64 + 1.0)
}

pub fn cs_fsr(delta_nm: f64, n: u32, x: u32) -> f64 {
    n as f64 * delta_nm / x as f64
}

/// Ring radius (µm) for a target FSR (nm).
pub fn radius_from_fsr(cs_fsr_nm: f64, center_wavelength_nm: f64, group_index: f64) -> f64 {
    center_wavelength_nm * center_wavelength_nm / (2.0 * PI * group_index * cs_fsr_nm) / 1000.0
}

/// Modulator FSR that reproduces a tabulated comb FSR through the spacing
/// and comb-FSR relations.
pub fn implied_modulator_fsr(d: &TabulatedDesign, x: u32) -> Option<f64> {
    d.cs_fsr_nm
        .map(|f| f * x as f64 * (d.n as f64 + 1.0) / d.n as f64)
}

pub fn mean_implied_modulator_fsr(x: u32) -> f64 {
    let vals: Vec<f64> = TABULATED
        .iter()
        .filter_map(|d| implied_modulator_fsr(d, x))
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// Least-squares group index for (cs_fsr nm, radius µm) pairs, fitting
/// radius = k / fsr with k = λ² / (2π n_g).
pub fn calibrate_group_index(points: &[(f64, f64)], center_wavelength_nm: f64) -> f64 {
    let num: f64 = points.iter().map(|(f, r)| r / f).sum();
    let den: f64 = points.iter().map(|(f, _)| 1.0 / (f * f)).sum();
    let k_um_nm = num / den;
    center_wavelength_nm * center_wavelength_nm / (2.0 * PI * k_um_nm * 1000.0)
}

pub fn tabulated_fsr_radius_pairs() -> Vec<(f64, f64)> {
    TABULATED
        .iter()
        .filter_map(|d| Some((d.cs_fsr_nm?, d.radius_um?)))
        .collect()
}

/// Group index fitted to every populated design point at 1550 nm.
pub fn calibrated_group_index() -> f64 {
    calibrate_group_index(&tabulated_fsr_radius_pairs(), DEFAULT_CENTER_WAVELENGTH_NM)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignOptions {
    pub modulator_fsr_nm: Option<f64>,
    pub center_wavelength_nm: f64,
    pub group_index: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            modulator_fsr_nm: None,
            center_wavelength_nm: DEFAULT_CENTER_WAVELENGTH_NM,
            group_index: calibrated_group_index(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombSwitchDesign {
    pub organization: Organization,
    pub bit_rate_gbps: u32,
    pub n: u32,
    pub x: u32,
    pub pairs: u32,
    pub modulator_fsr_nm: Option<f64>,
    pub modulator_fsr_provenance: Provenance,
    pub delta_nm: Option<f64>,
    pub cs_fsr_nm: Option<f64>,
    pub radius_um: Option<f64>,
    pub insertion_loss_db: f64,
    pub loss_provenance: Provenance,
    pub center_wavelength_nm: f64,
    pub group_index: f64,
}

pub fn design(
    n: u32,
    x: u32,
    org: Organization,
    bit_rate_gbps: u32,
    opts: &DesignOptions,
) -> CombSwitchDesign {
    let pairs = if org.is_reconfigurable() {
        reconfig_group_count(n, x)
    } else {
        0
    };
    let mut out = CombSwitchDesign {
        organization: org,
        bit_rate_gbps,
        n,
        x,
        pairs,
        modulator_fsr_nm: None,
        modulator_fsr_provenance: Provenance::NotApplicable,
        delta_nm: None,
        cs_fsr_nm: None,
        radius_um: None,
        insertion_loss_db: 0.0,
        loss_provenance: Provenance::NotApplicable,
        center_wavelength_nm: opts.center_wavelength_nm,
        group_index: opts.group_index,
    };
    if pairs == 0 {
        if tabulated(org, bit_rate_gbps).is_some() {
            out.loss_provenance = Provenance::Tabulated;
        }
        return out;
    }
    let row = tabulated(org, bit_rate_gbps).filter(|r| r.n == n && r.pairs > 0);
    let (fsr, fsr_prov) = match (opts.modulator_fsr_nm, row) {
        (Some(f), _) => (f, Provenance::Given),
        (None, Some(r)) => (
            implied_modulator_fsr(r, x).expect("populated row has a comb FSR"),
            Provenance::Tabulated,
        ),
        (None, None) => (mean_implied_modulator_fsr(x), Provenance::Interpolated),
    };
    let delta = channel_spacing(fsr, n);
    let csf = cs_fsr(delta, n, x);
    let (loss, loss_prov) = insertion_loss_db(org, bit_rate_gbps);
    out.modulator_fsr_nm = Some(fsr);
    out.modulator_fsr_provenance = fsr_prov;
    out.delta_nm = Some(delta);
    out.cs_fsr_nm = Some(csf);
    out.radius_um = Some(radius_from_fsr(csf, opts.center_wavelength_nm, opts.group_index));
    out.insertion_loss_db = loss;
    out.loss_provenance = loss_prov;
    out
}
