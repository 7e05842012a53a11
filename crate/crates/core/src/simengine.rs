// SPDX-License-Identifier: Apache-2.0

//! Weight-stationary latency, power and area model.

use serde::Serialize;
use thiserror::Error;

use crate::archmodel::{ComponentRecord, ValidatedArchConfig};
use crate::cnnworkload::{decompose_for_timing, LayerKind, Workload};
use crate::mapper::{self, Case, MapError, Mode, PassSchedule, ScheduleSummary};
use crate::units::dbm_to_watts;

/// Area of one comb-switch pair in MRR sites.
pub const CS_PAIR_SITES: u32 = 6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("workload has no layers")]
    NoWork,
    #[error("no ADC record for {0} Gbps")]
    MissingAdc(u32),
    #[error("layer {layer}: {source}")]
    Map { layer: String, source: MapError },
}

const NS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatencyModel {
    pub symbol_time_s: f64,
    pub dac_latency_s: f64,
    pub adc_conversion_s: f64,
    pub pd_latency_s: f64,
    pub tia_latency_s: f64,
    pub reduction_step_s: f64,
    pub eo_tuning_s: f64,
    pub to_tuning_s: f64,
    /// Per-layer cost of buffer, interconnect, activation, pooling and IO.
    pub layer_overhead_s: f64,
    pub pipeline_depth: u32,
}

impl LatencyModel {
    /// Bus and router cycles run on the symbol clock.
    pub fn for_arch(arch: &ValidatedArchConfig) -> Result<Self, SimError> {
        let p = arch.peripherals();
        let adc = p
            .adc_for(arch.bit_rate_gbps())
            .ok_or(SimError::MissingAdc(arch.bit_rate_gbps()))?;
        let t = arch.symbol_time_s();
        let layer_overhead_s = (p.edram.latency_ns
            + p.activation_unit.latency_ns
            + p.io_interface.latency_ns
            + p.pooling_unit.latency_ns)
            * NS
            + (p.bus.latency_cycles + p.router.latency_cycles) * t;
        Ok(LatencyModel {
            symbol_time_s: t,
            dac_latency_s: p.dac.latency_ns * NS,
            adc_conversion_s: adc.latency_ns * NS,
            pd_latency_s: p.photodetector.latency_ns * NS,
            tia_latency_s: p.tia.latency_ns * NS,
            reduction_step_s: p.reduction_network.latency_ns * NS,
            eo_tuning_s: p.eo_tuning.latency_ns * NS,
            to_tuning_s: p.to_tuning.latency_ns * NS,
            layer_overhead_s,
            pipeline_depth: 5,
        })
    }

    /// Model with only the tuning and symbol terms, for hand checks.
    pub fn bare(symbol_time_s: f64, eo_tuning_s: f64) -> Self {
        LatencyModel {
            symbol_time_s,
            dac_latency_s: 0.0,
            adc_conversion_s: 0.0,
            pd_latency_s: 0.0,
            tia_latency_s: 0.0,
            reduction_step_s: 0.0,
            eo_tuning_s,
            to_tuning_s: 0.0,
            layer_overhead_s: 0.0,
            pipeline_depth: 0,
        }
    }

    /// reduction levels = ceil(log2(slices per row)).
    pub fn drain_s(&self, slices_per_row: u32) -> f64 {
        let levels = slices_per_row.max(1).next_power_of_two().trailing_zeros();
        self.dac_latency_s
            + self.pd_latency_s
            + self.tia_latency_s
            + self.adc_conversion_s
            + self.reduction_step_s * levels as f64
    }

    pub fn pass_s(&self, divs: u64, slices_per_row: u32) -> f64 {
        self.eo_tuning_s + divs as f64 * self.symbol_time_s + self.drain_s(slices_per_row)
    }

    /// Once-per-layer cost: thermal bias settling plus peripheral overhead.
    pub fn layer_fixed_s(&self) -> f64 {
        self.to_tuning_s + self.layer_overhead_s
    }
}

/// Sum over passes of weight programming, streaming and pipeline drain.
pub fn layer_latency(schedule: &PassSchedule, lat: &LatencyModel) -> f64 {
    let k = schedule.plan().slices_per_row();
    schedule
        .passes()
        .iter()
        .map(|p| lat.pass_s(p.divs_streamed, k))
        .sum()
}

pub fn layer_latency_from_summary(summary: &ScheduleSummary, lat: &LatencyModel) -> f64 {
    summary.passes as f64 * lat.pass_s(summary.divs_per_pass, summary.slices_per_row)
}

/// Instantiated hardware counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inventory {
    pub vdpes: u64,
    pub tpcs: u64,
    pub tiles: u64,
    pub dkv_mrrs: u64,
    pub div_mrrs: u64,
    pub cs_pairs: u64,
    pub lasers: u64,
    pub dkv_dacs: u64,
    pub div_dacs: u64,
    pub adcs: u64,
    pub summation_elements: u64,
}

pub fn inventory(arch: &ValidatedArchConfig) -> Inventory {
    let v = arch.total_vdpes() as u64;
    let n = arch.n() as u64;
    let y = arch.y() as u64;
    let tpcs = arch.tpcs() as u64;
    let div_mrrs = if arch.organization().has_dedicated_div() {
        v * n
    } else {
        tpcs * n
    };
    // One SE per VDPE plus one per comb group.
    let se = v * (1 + y);
    Inventory {
        vdpes: v,
        tpcs,
        tiles: arch.tiles() as u64,
        dkv_mrrs: v * n,
        div_mrrs,
        cs_pairs: v * y,
        lasers: tpcs * n,
        dkv_dacs: v * n,
        div_dacs: div_mrrs,
        adcs: se,
        summation_elements: se,
    }
}

/// Time-averaged activity of the VDPE array.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ActivityStats {
    pub mean_active_mrrs: f64,
    pub mean_occupied_vdpes: f64,
    pub mean_active_channels: f64,
}

impl ActivityStats {
    pub fn from_summary(s: &ScheduleSummary) -> Self {
        ActivityStats {
            mean_active_mrrs: s.mean_active_mrrs,
            mean_occupied_vdpes: s.mean_occupied_vdpes,
            mean_active_channels: s.mean_active_channels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PowerBreakdown {
    pub laser_w: f64,
    pub tuning_w: f64,
    pub dac_w: f64,
    pub adc_w: f64,
    pub pd_tia_w: f64,
    pub peripherals_w: f64,
}

impl PowerBreakdown {
    pub fn total_w(&self) -> f64 {
        self.laser_w + self.tuning_w + self.dac_w + self.adc_w + self.pd_tia_w + self.peripherals_w
    }

    fn scaled_add(&mut self, other: &PowerBreakdown, k: f64) {
        self.laser_w += other.laser_w * k;
        self.tuning_w += other.tuning_w * k;
        self.dac_w += other.dac_w * k;
        self.adc_w += other.adc_w * k;
        self.pd_tia_w += other.pd_tia_w * k;
        self.peripherals_w += other.peripherals_w * k;
    }
}

fn tile_peripherals(arch: &ValidatedArchConfig) -> (f64, f64) {
    let p = arch.peripherals();
    let recs: [ComponentRecord; 5] = [
        p.reduction_network,
        p.activation_unit,
        p.io_interface,
        p.pooling_unit,
        p.edram,
    ];
    let power_mw = recs.iter().map(|r| r.power_mw).sum::<f64>() + p.bus.power_mw + p.router.power_mw;
    let area = recs.iter().map(|r| r.area_mm2).sum::<f64>() + p.bus.area_mm2 + p.router.area_mm2;
    (power_mw * 1e-3, area)
}

/// Power with the array running at the given activity.
///
/// Lasers, thermal bias and tile peripherals draw power whenever the chip is
/// on. Modulator drivers, converters and receivers scale with activity.
pub fn power(arch: &ValidatedArchConfig, stats: &ActivityStats) -> Result<PowerBreakdown, SimError> {
    let inv = inventory(arch);
    let params = arch.params();
    let p = arch.peripherals();
    let adc = p
        .adc_for(arch.bit_rate_gbps())
        .ok_or(SimError::MissingAdc(arch.bit_rate_gbps()))?;
    let mw = 1e-3;
    let n = arch.n() as f64;

    let laser_w = inv.lasers as f64 * dbm_to_watts(params.p_laser_dbm) / params.wall_plug_eff;

    // A ring is tuned across at most one channel spacing, 1/(n+1) of its FSR.
    let tuned_fraction = 1.0 / (n + 1.0);
    let all_rings = (inv.dkv_mrrs + inv.div_mrrs + 2 * inv.cs_pairs) as f64;
    let bias_w = all_rings * p.to_tuning.power_mw * mw * tuned_fraction;
    let active_rings = stats.mean_active_mrrs
        * if arch.organization().has_dedicated_div() {
            2.0
        } else {
            1.0
        };
    let eo_w = active_rings * p.eo_tuning.power_mw * mw * tuned_fraction;

    let mrr_activity = if inv.dkv_mrrs > 0 {
        (stats.mean_active_mrrs / inv.dkv_mrrs as f64).min(1.0)
    } else {
        0.0
    };
    let div_activity = if arch.organization().has_dedicated_div() {
        mrr_activity
    } else if inv.tpcs > 0 {
        ((stats.mean_occupied_vdpes / arch.m() as f64).ceil() / inv.tpcs as f64).min(1.0)
    } else {
        0.0
    };
    let dac_w = (inv.dkv_dacs as f64 * mrr_activity + inv.div_dacs as f64 * div_activity)
        * p.dac.power_mw
        * mw;

    let channels = stats.mean_active_channels.min(inv.summation_elements as f64);
    let adc_w = channels * adc.power_mw * mw;
    let pd_tia_w = channels * (2.0 * p.photodetector.power_mw + p.tia.power_mw) * mw;

    let peripherals_w = inv.tiles as f64 * tile_peripherals(arch).0;

    Ok(PowerBreakdown {
        laser_w,
        tuning_w: bias_w + eo_w,
        dac_w,
        adc_w,
        pd_tia_w,
        peripherals_w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaModel {
    pub mrr_unit_area_mm2: f64,
    pub cs_pair_area_mm2: f64,
    /// MRR-equivalents of one VDPE, including a dedicated DIV element.
    pub vdpe_mrr_equivalents: u32,
    pub mrr_sites: u64,
    pub mrr_area_mm2: f64,
    pub spacing_area_mm2: f64,
    pub converter_area_mm2: f64,
    pub peripheral_area_mm2: f64,
    pub total_mm2: f64,
}

pub fn area(arch: &ValidatedArchConfig) -> Result<AreaModel, SimError> {
    let inv = inventory(arch);
    let params = arch.params();
    let p = arch.peripherals();
    let adc = p
        .adc_for(arch.bit_rate_gbps())
        .ok_or(SimError::MissingAdc(arch.bit_rate_gbps()))?;
    let pitch_mm = params.d_mrr_um / 1000.0;
    let unit = pitch_mm * pitch_mm;
    let dedicated = arch.organization().has_dedicated_div();
    let vdpe_eq = arch.n() * if dedicated { 2 } else { 1 } + CS_PAIR_SITES * arch.y();
    let sites = inv.dkv_mrrs + inv.div_mrrs + CS_PAIR_SITES as u64 * inv.cs_pairs;
    let mrr_area = sites as f64 * unit;
    let spacing = if dedicated {
        inv.vdpes as f64 * params.d_element_um / 1000.0 * pitch_mm
    } else {
        0.0
    };
    let converters = (inv.dkv_dacs + inv.div_dacs) as f64 * p.dac.area_mm2 + inv.adcs as f64 * adc.area_mm2;
    let peripherals = inv.tiles as f64 * tile_peripherals(arch).1;
    Ok(AreaModel {
        mrr_unit_area_mm2: unit,
        cs_pair_area_mm2: CS_PAIR_SITES as f64 * unit,
        vdpe_mrr_equivalents: vdpe_eq,
        mrr_sites: sites,
        mrr_area_mm2: mrr_area,
        spacing_area_mm2: spacing,
        converter_area_mm2: converters,
        peripheral_area_mm2: peripherals,
        total_mm2: mrr_area + spacing + converters + peripherals,
    })
}

/// For each candidate, the largest VDPE count whose area does not exceed
/// the reference configuration's area.
pub fn area_proportionate_counts(
    reference: &ValidatedArchConfig,
    candidates: &[ValidatedArchConfig],
) -> Result<Vec<u32>, SimError> {
    let budget = area(reference)?.total_mm2;
    candidates
        .iter()
        .map(|c| {
            if c == reference {
                return Ok(reference.total_vdpes());
            }
            let fits = |v: u32| area(&c.with_total_vdpes(v)).map(|a| a.total_mm2 <= budget);
            let mut ok = 0u32;
            let mut bad = 1u32;
            while fits(bad)? {
                ok = bad;
                bad = bad.checked_mul(2).expect("VDPE count search overflow");
            }
            while bad - ok > 1 {
                let mid = ok + (bad - ok) / 2;
                if fits(mid)? {
                    ok = mid;
                } else {
                    bad = mid;
                }
            }
            Ok(ok)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerReport {
    pub name: String,
    pub kind: LayerKind,
    pub h: u32,
    pub s: u32,
    pub case: Case,
    pub mode: Mode,
    pub slices_per_row: u32,
    pub passes: u64,
    pub divs_per_pass: u64,
    pub latency_s: f64,
    pub mean_utilization: f64,
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub workload: String,
    pub organization: crate::archmodel::Organization,
    pub bit_rate_gbps: u32,
    pub precision_bits: u32,
    pub n: u32,
    pub y: u32,
    pub total_vdpes: u32,
    pub total_latency_s: f64,
    pub fps: f64,
    /// Time-averaged over the run.
    pub power_breakdown: PowerBreakdown,
    pub total_power_w: f64,
    pub energy_j: f64,
    pub fps_per_watt: f64,
    /// Weighted by DIVs streamed.
    pub mean_utilization: f64,
    pub total_area_mm2: f64,
    pub pass_count: u64,
    pub layers: Vec<LayerReport>,
}

pub fn simulate(workload: &Workload, arch: &ValidatedArchConfig) -> Result<SimReport, SimError> {
    if workload.is_empty() {
        return Err(SimError::NoWork);
    }
    let lat = LatencyModel::for_arch(arch)?;
    let mut layers = Vec::with_capacity(workload.layers.len());
    let mut total_latency = 0.0;
    let mut energy = PowerBreakdown::default();
    let mut util_num = 0.0;
    let mut util_den = 0.0;
    let mut pass_count = 0;
    for layer in &workload.layers {
        let matrix = decompose_for_timing(layer);
        let summary = mapper::plan_summary(&matrix, arch).map_err(|e| SimError::Map {
            layer: layer.name.clone(),
            source: e,
        })?;
        let latency = layer_latency_from_summary(&summary, &lat) + lat.layer_fixed_s();
        let p = power(arch, &ActivityStats::from_summary(&summary))?;
        energy.scaled_add(&p, latency);
        total_latency += latency;
        let divs = summary.passes as f64 * summary.divs_per_pass as f64;
        util_num += summary.mean_utilization * divs;
        util_den += divs;
        pass_count += summary.passes;
        layers.push(LayerReport {
            name: layer.name.clone(),
            kind: layer.kind,
            h: summary.h,
            s: summary.s,
            case: summary.case,
            mode: summary.mode,
            slices_per_row: summary.slices_per_row,
            passes: summary.passes,
            divs_per_pass: summary.divs_per_pass,
            latency_s: latency,
            mean_utilization: summary.mean_utilization,
            power_w: p.total_w(),
        });
    }
    let mut avg = PowerBreakdown::default();
    avg.scaled_add(&energy, 1.0 / total_latency);
    let total_power = avg.total_w();
    let fps = 1.0 / total_latency;
    Ok(SimReport {
        workload: workload.name.clone(),
        organization: arch.organization(),
        bit_rate_gbps: arch.bit_rate_gbps(),
        precision_bits: arch.precision_bits(),
        n: arch.n(),
        y: arch.y(),
        total_vdpes: arch.total_vdpes(),
        total_latency_s: total_latency,
        fps,
        power_breakdown: avg,
        total_power_w: total_power,
        energy_j: energy.total_w(),
        fps_per_watt: fps / total_power,
        mean_utilization: if util_den > 0.0 { util_num / util_den } else { 0.0 },
        total_area_mm2: area(arch)?.total_mm2,
        pass_count,
        layers,
    })
}
