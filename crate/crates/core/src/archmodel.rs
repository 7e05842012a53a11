// SPDX-License-Identifier: Apache-2.0

//! Accelerator organizations, device parameters and validated configurations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::linkbudget::{self, LinkError};
use crate::mapper::reconfig_group_count;

pub const DEFAULT_REAGGREGATION: i64 = 9;
pub const DEFAULT_TPCS_PER_TILE: i64 = 4;
pub const SUPPORTED_BIT_RATES_GBPS: [u32; 4] = [1, 3, 5, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Organization {
    #[serde(rename = "AMM")]
    Amm,
    #[serde(rename = "MAM")]
    Mam,
    #[serde(rename = "RAMM")]
    Ramm,
    #[serde(rename = "RMAM")]
    Rmam,
}

impl Organization {
    pub const ALL: [Organization; 4] = [
        Organization::Rmam,
        Organization::Ramm,
        Organization::Mam,
        Organization::Amm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Organization::Amm => "AMM",
            Organization::Mam => "MAM",
            Organization::Ramm => "RAMM",
            Organization::Rmam => "RMAM",
        }
    }

    pub fn is_reconfigurable(self) -> bool {
        matches!(self, Organization::Ramm | Organization::Rmam)
    }

    /// AMM-family TPCs give every DKV element its own DIV element.
    pub fn has_dedicated_div(self) -> bool {
        matches!(self, Organization::Amm | Organization::Ramm)
    }

    pub fn fixed_counterpart(self) -> Organization {
        match self {
            Organization::Ramm => Organization::Amm,
            Organization::Rmam => Organization::Mam,
            other => other,
        }
    }
}

impl fmt::Display for Organization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown organization '{0}' (expected AMM, MAM, RAMM or RMAM)")]
pub struct UnknownOrganization(pub String);

impl FromStr for Organization {
    type Err = UnknownOrganization;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AMM" => Ok(Organization::Amm),
            "MAM" => Ok(Organization::Mam),
            "RAMM" => Ok(Organization::Ramm),
            "RMAM" => Ok(Organization::Rmam),
            _ => Err(UnknownOrganization(s.to_string())),
        }
    }
}

/// Device and link constants used by the link-budget equations.
///
/// Lengths are in µm, losses in dB, currents in A.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonicParams {
    pub p_laser_dbm: f64,
    pub responsivity: f64,
    pub load_resistance: f64,
    pub dark_current: f64,
    pub temperature: f64,
    pub rin_db_per_hz: f64,
    pub wall_plug_eff: f64,
    pub il_smf_db: f64,
    pub il_ec_db: f64,
    pub il_mrm_db: f64,
    pub obl_mrm_db: f64,
    pub il_mrr_db: f64,
    pub obl_mrr_db: f64,
    pub el_splitter_db: f64,
    pub il_penalty_db: f64,
    pub il_wg_db_per_mm: f64,
    pub d_mrr_um: f64,
    pub d_element_um: f64,
    pub electron_charge: f64,
    pub boltzmann: f64,
    /// Per-wavelength loss not captured by the per-device terms
    /// (crosstalk, ring detuning), charged once per channel.
    pub excess_loss_per_channel_db: f64,
    /// Constant loss credit subtracted from the chain.
    pub calibration_credit_db: f64,
}

pub fn default_params(org: Organization) -> PhotonicParams {
    let amm_family = org.has_dedicated_div();
    PhotonicParams {
        p_laser_dbm: 10.0,
        responsivity: 1.2,
        load_resistance: 50.0,
        dark_current: 35e-9,
        temperature: 300.0,
        rin_db_per_hz: -140.0,
        wall_plug_eff: 0.1,
        il_smf_db: 0.0,
        il_ec_db: 1.6,
        il_mrm_db: 4.0,
        obl_mrm_db: 0.01,
        il_mrr_db: 0.01,
        obl_mrr_db: 0.01,
        el_splitter_db: 0.01,
        il_penalty_db: if amm_family { 5.8 } else { 4.8 },
        il_wg_db_per_mm: 0.3,
        d_mrr_um: 20.0,
        d_element_um: if amm_family { 100.0 } else { 0.0 },
        electron_charge: 1.602176634e-19,
        boltzmann: 1.380649e-23,
        excess_loss_per_channel_db: if amm_family { 0.032 } else { 0.004 },
        calibration_credit_db: 7.23,
    }
}

impl PhotonicParams {
    /// Replace whole fields from a JSON object. Unknown keys are rejected.
    pub fn with_overrides(&self, overrides: &Map<String, Value>) -> Result<Self, String> {
        let mut merged = match serde_json::to_value(self) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("PhotonicParams serializes to an object"),
        };
        for (k, v) in overrides {
            if !merged.contains_key(k) {
                return Err(format!("unknown parameter '{k}'"));
            }
            merged.insert(k.clone(), v.clone());
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| e.to_string())
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let losses = [
            ("il_smf_db", self.il_smf_db),
            ("il_ec_db", self.il_ec_db),
            ("il_mrm_db", self.il_mrm_db),
            ("obl_mrm_db", self.obl_mrm_db),
            ("il_mrr_db", self.il_mrr_db),
            ("obl_mrr_db", self.obl_mrr_db),
            ("el_splitter_db", self.el_splitter_db),
            ("il_penalty_db", self.il_penalty_db),
            ("il_wg_db_per_mm", self.il_wg_db_per_mm),
            ("excess_loss_per_channel_db", self.excess_loss_per_channel_db),
        ];
        for (name, v) in losses {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(Violation::InvalidParam {
                    field: name.into(),
                    reason: format!("loss must be finite and >= 0, got {v}"),
                });
            }
        }
        let positive = [
            ("responsivity", self.responsivity),
            ("load_resistance", self.load_resistance),
            ("temperature", self.temperature),
            ("d_mrr_um", self.d_mrr_um),
            ("electron_charge", self.electron_charge),
            ("boltzmann", self.boltzmann),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                out.push(Violation::InvalidParam {
                    field: name.into(),
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        if !(self.wall_plug_eff > 0.0 && self.wall_plug_eff <= 1.0) {
            out.push(Violation::InvalidParam {
                field: "wall_plug_eff".into(),
                reason: format!("must lie in (0, 1], got {}", self.wall_plug_eff),
            });
        }
        for (name, v) in [
            ("dark_current", self.dark_current),
            ("d_element_um", self.d_element_um),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                out.push(Violation::InvalidParam {
                    field: name.into(),
                    reason: format!("must be finite and >= 0, got {v}"),
                });
            }
        }
        for (name, v) in [
            ("p_laser_dbm", self.p_laser_dbm),
            ("rin_db_per_hz", self.rin_db_per_hz),
            ("calibration_credit_db", self.calibration_credit_db),
        ] {
            if !v.is_finite() {
                out.push(Violation::InvalidParam {
                    field: name.into(),
                    reason: "must be finite".into(),
                });
            }
        }
        out
    }
}

/// Power, area and latency of one peripheral instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub power_mw: f64,
    pub area_mm2: f64,
    pub latency_ns: f64,
}

/// Same as [`ComponentRecord`] with latency counted in clock cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub power_mw: f64,
    pub area_mm2: f64,
    pub latency_cycles: f64,
}

const fn rec(power_mw: f64, area_mm2: f64, latency_ns: f64) -> ComponentRecord {
    ComponentRecord {
        power_mw,
        area_mm2,
        latency_ns,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeripheralParams {
    pub dac: ComponentRecord,
    /// Keyed by bit rate in Gbps. The conversion latency is one symbol.
    pub adc: BTreeMap<u32, ComponentRecord>,
    pub reduction_network: ComponentRecord,
    pub activation_unit: ComponentRecord,
    pub io_interface: ComponentRecord,
    pub pooling_unit: ComponentRecord,
    pub edram: ComponentRecord,
    pub bus: CycleRecord,
    pub router: CycleRecord,
    pub tia: ComponentRecord,
    pub photodetector: ComponentRecord,
    /// Power is per free spectral range of tuning.
    pub eo_tuning: ComponentRecord,
    pub to_tuning: ComponentRecord,
    pub q_factor: f64,
    pub fwhm_nm: f64,
}

impl Default for PeripheralParams {
    fn default() -> Self {
        let mut adc = BTreeMap::new();
        adc.insert(1, rec(2.55, 0.002, 1.0));
        adc.insert(3, rec(11.0, 0.021, 1.0 / 3.0));
        adc.insert(5, rec(29.0, 0.103, 0.2));
        PeripheralParams {
            dac: rec(30.0, 0.034, 0.78),
            adc,
            reduction_network: rec(0.050, 0.03e-3, 3.125),
            activation_unit: rec(0.52, 0.6e-3, 0.78),
            io_interface: rec(140.18, 24.4e-3, 0.78),
            pooling_unit: rec(0.4, 0.24e-3, 3.125),
            edram: rec(41.1, 166e-3, 1.56),
            bus: CycleRecord {
                power_mw: 7.0,
                area_mm2: 9e-3,
                latency_cycles: 5.0,
            },
            router: CycleRecord {
                power_mw: 42.0,
                area_mm2: 0.151,
                latency_cycles: 2.0,
            },
            tia: rec(7.2, 0.0, 150.0),
            photodetector: rec(2.8, 0.0, 0.0058),
            eo_tuning: rec(0.08, 0.0, 20.0),
            to_tuning: rec(27.5, 0.0, 4000.0),
            q_factor: 8000.0,
            fwhm_nm: 0.2,
        }
    }
}

impl PeripheralParams {
    pub fn adc_for(&self, bit_rate_gbps: u32) -> Option<&ComponentRecord> {
        self.adc.get(&bit_rate_gbps)
    }

    /// Checks that every record is nonnegative.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut check = |name: String, vals: [f64; 3]| {
            if vals.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                out.push(Violation::InvalidParam {
                    field: name,
                    reason: "power, area and latency must be >= 0".into(),
                });
            }
        };
        let plain = [
            ("dac", self.dac),
            ("reduction_network", self.reduction_network),
            ("activation_unit", self.activation_unit),
            ("io_interface", self.io_interface),
            ("pooling_unit", self.pooling_unit),
            ("edram", self.edram),
            ("tia", self.tia),
            ("photodetector", self.photodetector),
            ("eo_tuning", self.eo_tuning),
            ("to_tuning", self.to_tuning),
        ];
        for (name, r) in plain {
            check(name.into(), [r.power_mw, r.area_mm2, r.latency_ns]);
        }
        for (g, r) in &self.adc {
            check(format!("adc[{g}]"), [r.power_mw, r.area_mm2, r.latency_ns]);
        }
        for (name, r) in [("bus", self.bus), ("router", self.router)] {
            check(name.into(), [r.power_mw, r.area_mm2, r.latency_cycles]);
        }
        out
    }
}

/// Keyword accepted for `n` to request the link-budget maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VdpeSizeSpec {
    Auto(AutoKeyword),
    Fixed(i64),
}

impl Default for VdpeSizeSpec {
    fn default() -> Self {
        VdpeSizeSpec::Auto(AutoKeyword::Auto)
    }
}

fn default_x() -> i64 {
    DEFAULT_REAGGREGATION
}

fn default_tpcs_per_tile() -> i64 {
    DEFAULT_TPCS_PER_TILE
}

/// Configuration as it appears in an arch config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchConfig {
    pub organization: Organization,
    pub bit_rate_gbps: i64,
    pub precision_bits: i64,
    #[serde(default)]
    pub n: VdpeSizeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(default = "default_x")]
    pub x: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiles: Option<i64>,
    #[serde(default = "default_tpcs_per_tile")]
    pub tpcs_per_tile: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_vdpes: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Map<String, Value>>,
}

impl ArchConfig {
    /// Link-budget sized config with a single tile.
    pub fn new(organization: Organization, bit_rate_gbps: u32, precision_bits: u32) -> Self {
        ArchConfig {
            organization,
            bit_rate_gbps: bit_rate_gbps as i64,
            precision_bits: precision_bits as i64,
            n: VdpeSizeSpec::default(),
            m: None,
            x: DEFAULT_REAGGREGATION,
            tiles: Some(1),
            tpcs_per_tile: DEFAULT_TPCS_PER_TILE,
            total_vdpes: None,
            params: None,
        }
    }

    pub fn with_n(mut self, n: i64) -> Self {
        self.n = VdpeSizeSpec::Fixed(n);
        self
    }

    pub fn with_m(mut self, m: i64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_x(mut self, x: i64) -> Self {
        self.x = x;
        self
    }

    pub fn with_tiles(mut self, tiles: i64) -> Self {
        self.tiles = Some(tiles);
        self
    }

    pub fn with_total_vdpes(mut self, total: i64) -> Self {
        self.total_vdpes = Some(total);
        self
    }

    pub fn with_params(mut self, params: Map<String, Value>) -> Self {
        self.params = Some(params);
        self
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    InvalidN { n: i64, max: u32 },
    InvalidEnum { field: String, value: String },
    NonPositiveDimension { field: String, value: i64 },
    MissingField { field: String },
    InvalidParam { field: String, reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidN { n, max } => {
                write!(f, "n = {n} exceeds the link-budget limit {max}")
            }
            Violation::InvalidEnum { field, value } => {
                write!(f, "{field}: unsupported value {value}")
            }
            Violation::NonPositiveDimension { field, value } => {
                write!(f, "{field} must be positive, got {value}")
            }
            Violation::MissingField { field } => write!(f, "missing field {field}"),
            Violation::InvalidParam { field, reason } => write!(f, "{field}: {reason}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Link(#[from] LinkError),
}

impl ConfigError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

/// A configuration that passed validation. Fields are read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedArchConfig {
    organization: Organization,
    bit_rate_gbps: u32,
    precision_bits: u32,
    n: u32,
    n_max: u32,
    m: u32,
    x: u32,
    y: u32,
    tpcs_per_tile: u32,
    tiles: u32,
    total_vdpes: u32,
    total_overridden: bool,
    params: PhotonicParams,
    peripherals: PeripheralParams,
}

fn positive(field: &str, v: i64, out: &mut Vec<Violation>) -> u32 {
    if v < 1 || v > u32::MAX as i64 {
        out.push(Violation::NonPositiveDimension {
            field: field.into(),
            value: v,
        });
        1
    } else {
        v as u32
    }
}

fn non_negative(field: &str, v: i64, out: &mut Vec<Violation>) -> u32 {
    if v < 0 || v > u32::MAX as i64 {
        out.push(Violation::NonPositiveDimension {
            field: field.into(),
            value: v,
        });
        0
    } else {
        v as u32
    }
}

pub fn validate_config(cfg: &ArchConfig) -> Result<ValidatedArchConfig, ConfigError> {
    let mut errs = Vec::new();
    let org = cfg.organization;

    let bit_rate = if let Some(b) = u32::try_from(cfg.bit_rate_gbps)
        .ok()
        .filter(|b| SUPPORTED_BIT_RATES_GBPS.contains(b))
    {
        b
    } else {
        errs.push(Violation::InvalidEnum {
            field: "bit_rate_gbps".into(),
            value: cfg.bit_rate_gbps.to_string(),
        });
        1
    };
    let precision = if (1..=8).contains(&cfg.precision_bits) {
        cfg.precision_bits as u32
    } else {
        errs.push(Violation::InvalidEnum {
            field: "precision_bits".into(),
            value: cfg.precision_bits.to_string(),
        });
        1
    };

    let x = positive("x", cfg.x, &mut errs);
    let tpcs_per_tile = positive("tpcs_per_tile", cfg.tpcs_per_tile, &mut errs);
    let fixed_n = match cfg.n {
        VdpeSizeSpec::Fixed(v) => Some(positive("n", v, &mut errs)),
        VdpeSizeSpec::Auto(_) => None,
    };
    let m_req = cfg.m.map(|v| positive("m", v, &mut errs));
    let tiles_req = cfg.tiles.map(|v| non_negative("tiles", v, &mut errs));
    let total_req = cfg
        .total_vdpes
        .map(|v| non_negative("total_vdpes", v, &mut errs));
    if tiles_req.is_none() && total_req.is_none() {
        errs.push(Violation::MissingField {
            field: "tiles".into(),
        });
    }

    let params = match &cfg.params {
        None => default_params(org),
        Some(over) => match default_params(org).with_overrides(over) {
            Ok(p) => p,
            Err(reason) => {
                errs.push(Violation::InvalidParam {
                    field: "params".into(),
                    reason,
                });
                default_params(org)
            }
        },
    };
    errs.extend(params.violations());
    let peripherals = PeripheralParams::default();
    if !errs.is_empty() {
        return Err(ConfigError::Invalid(errs));
    }

    let n_max = linkbudget::max_vdpe_size_with_x(org, precision, bit_rate, x, &params)?;
    let n = match fixed_n {
        Some(n) if n > n_max => {
            return Err(ConfigError::Invalid(vec![Violation::InvalidN {
                n: n as i64,
                max: n_max,
            }]))
        }
        Some(n) => n,
        None if n_max == 0 => {
            return Err(ConfigError::Invalid(vec![Violation::InvalidN { n: 0, max: 0 }]))
        }
        None => n_max,
    };
    let m = m_req.unwrap_or(n);
    let y = if org.is_reconfigurable() {
        reconfig_group_count(n, x)
    } else {
        0
    };

    let per_tile = tpcs_per_tile as u64 * m as u64;
    let (tiles, total_vdpes, total_overridden) = match (total_req, tiles_req) {
        (Some(total), _) => (
            (total as u64).div_ceil(per_tile) as u32,
            total,
            true,
        ),
        (None, Some(tiles)) => {
            let total = tiles as u64 * per_tile;
            if total > u32::MAX as u64 {
                return Err(ConfigError::Invalid(vec![Violation::InvalidParam {
                    field: "tiles".into(),
                    reason: "total VDPE count overflows".into(),
                }]));
            }
            (tiles, total as u32, false)
        }
        (None, None) => unreachable!(),
    };

    Ok(ValidatedArchConfig {
        organization: org,
        bit_rate_gbps: bit_rate,
        precision_bits: precision,
        n,
        n_max,
        m,
        x,
        y,
        tpcs_per_tile,
        tiles,
        total_vdpes,
        total_overridden,
        params,
        peripherals,
    })
}

impl ValidatedArchConfig {
    pub fn organization(&self) -> Organization {
        self.organization
    }
    pub fn bit_rate_gbps(&self) -> u32 {
        self.bit_rate_gbps
    }
    pub fn bit_rate_sps(&self) -> f64 {
        self.bit_rate_gbps as f64 * 1e9
    }
    pub fn symbol_time_s(&self) -> f64 {
        1.0 / self.bit_rate_sps()
    }
    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    /// Largest VDPE size the link budget supports for this config.
    pub fn n_max(&self) -> u32 {
        self.n_max
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn x(&self) -> u32 {
        self.x
    }
    /// Comb-switch pairs per VDPE (0 for fixed organizations).
    pub fn y(&self) -> u32 {
        self.y
    }
    pub fn reconfiguration_enabled(&self) -> bool {
        self.y >= 1
    }
    pub fn tpcs_per_tile(&self) -> u32 {
        self.tpcs_per_tile
    }
    pub fn tiles(&self) -> u32 {
        self.tiles
    }
    pub fn total_vdpes(&self) -> u32 {
        self.total_vdpes
    }
    pub fn total_overridden(&self) -> bool {
        self.total_overridden
    }
    /// TPC count; a partially filled last TPC still counts.
    pub fn tpcs(&self) -> u32 {
        (self.total_vdpes as u64).div_ceil(self.m as u64) as u32
    }
    pub fn params(&self) -> &PhotonicParams {
        &self.params
    }
    pub fn peripherals(&self) -> &PeripheralParams {
        &self.peripherals
    }

    /// Same architecture resized to `total` VDPEs.
    pub fn with_total_vdpes(&self, total: u32) -> ValidatedArchConfig {
        let mut out = self.clone();
        out.total_vdpes = total;
        out.total_overridden = true;
        out.tiles = (total as u64).div_ceil(self.tpcs_per_tile as u64 * self.m as u64) as u32;
        out
    }

    /// Fully resolved file form. Re-validating it gives an equal config.
    pub fn to_config(&self) -> ArchConfig {
        let params = match serde_json::to_value(&self.params) {
            Ok(Value::Object(m)) => m,
            _ => unreachable!("PhotonicParams serializes to an object"),
        };
        ArchConfig {
            organization: self.organization,
            bit_rate_gbps: self.bit_rate_gbps as i64,
            precision_bits: self.precision_bits as i64,
            n: VdpeSizeSpec::Fixed(self.n as i64),
            m: Some(self.m as i64),
            x: self.x as i64,
            tiles: if self.total_overridden {
                None
            } else {
                Some(self.tiles as i64)
            },
            tpcs_per_tile: self.tpcs_per_tile as i64,
            total_vdpes: if self.total_overridden {
                Some(self.total_vdpes as i64)
            } else {
                None
            },
            params: Some(params),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_config()).expect("config serializes")
    }
}

impl Serialize for ValidatedArchConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_config().serialize(s)
    }
}
