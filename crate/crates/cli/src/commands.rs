// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ringsim_core::archmodel::{
    default_params, validate_config, ArchConfig, ConfigError, Organization, ValidatedArchConfig,
};
use ringsim_core::bundled;
use ringsim_core::cnnworkload::{decompose_for_timing, load_workload, DkvMatrix, LayerKind, Workload};
use ringsim_core::combswitch::{design, DesignOptions};
use ringsim_core::comparison::{compare, CompareSpec};
use ringsim_core::linkbudget::{scalability_csv, scalability_sweep};
use ringsim_core::mapper::{
    functional_eval, plan_mapping, plan_summary, Case, DivValues, Mode, PassSchedule, ScheduleSummary,
};
use ringsim_core::simengine::{simulate, SimReport};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{config_comment, to_csv, to_json, Artifact, Sink};

/// Largest kernel matrix (H·S entries) checked by `map --verify`.
const VERIFY_MAX_ENTRIES: u64 = 4_000_000;
/// Input vectors per layer used by `map --verify`.
const VERIFY_DIVS: u64 = 3;

pub struct Context {
    pub sink: Sink,
    pub seed: u64,
    pub params_file: Option<PathBuf>,
    pub params: Option<Map<String, Value>>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn load_params(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = read_text(path)?;
    let file = path.display().to_string();
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::config(
            Some(&file),
            ConfigError::Parse("parameter overrides must be a JSON object".into()),
        )),
        Err(e) => Err(CliError::config(Some(&file), ConfigError::Parse(e.to_string()))),
    }
}

impl Context {
    fn params_name(&self) -> Option<String> {
        self.params_file.as_ref().map(|p| p.display().to_string())
    }

    fn resolve_arch(&self, a: &ArchArgs) -> Result<ValidatedArchConfig, CliError> {
        let (mut cfg, file) = match (&a.arch, a.org) {
            (Some(path), _) => {
                let file = path.display().to_string();
                let cfg = ArchConfig::from_json(&read_text(path)?).map_err(|e| CliError::config(Some(&file), e))?;
                (cfg, Some(file))
            }
            (None, Some(org)) => {
                let mut cfg = ArchConfig::new(org, a.bit_rate, a.bits);
                if let Some(n) = a.n {
                    cfg = cfg.with_n(n);
                }
                if let Some(x) = a.x {
                    cfg = cfg.with_x(x);
                }
                if let Some(t) = a.tiles {
                    cfg = cfg.with_tiles(t);
                }
                if let Some(v) = a.vdpes {
                    cfg = cfg.with_total_vdpes(v);
                }
                (cfg, None)
            }
            (None, None) => return Err(CliError::Usage("either --arch or --org is required".into())),
        };
        if let Some(over) = &self.params {
            let mut merged = cfg.params.take().unwrap_or_default();
            merged.extend(over.clone());
            cfg.params = Some(merged);
        }
        let name = file.or_else(|| self.params_name());
        validate_config(&cfg).map_err(|e| CliError::config(name.as_deref(), e))
    }
}

pub fn resolve_workload(spec: &str) -> Result<Workload, CliError> {
    if let Some(name) = spec.strip_prefix("bundled:") {
        return bundled::get(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown bundled workload '{name}' (available: {})",
                bundled::names().collect::<Vec<_>>().join(", ")
            ))
        });
    }
    Ok(load_workload(Path::new(spec))?)
}

fn resolve_workloads(specs: &[String]) -> Result<Vec<Workload>, CliError> {
    specs.iter().map(|s| resolve_workload(s)).collect()
}

pub fn scalability(ctx: &Context, a: &ScalabilityArgs) -> Result<(), CliError> {
    let mut params = default_params(a.org);
    if let Some(over) = &ctx.params {
        let file = ctx.params_name();
        params = params
            .with_overrides(over)
            .map_err(|e| CliError::config(file.as_deref(), ConfigError::Parse(e)))?;
        let bad = params.violations();
        if !bad.is_empty() {
            return Err(CliError::config(file.as_deref(), ConfigError::Invalid(bad)));
        }
    }
    let points = scalability_sweep(a.org, &a.bits, &a.bit_rates, &params)?;
    let config = json!({
        "organization": a.org,
        "precision_bits": a.bits,
        "bit_rates_gbps": a.bit_rates,
        "params": params,
    });
    let body = match ctx.sink.format {
        Format::Json => to_json(&json!({ "config": config, "points": points })),
        Format::Csv => format!("# {}\n{}", config_comment(&config), scalability_csv(&points)),
    };
    ctx.sink.emit("scalability", &[Artifact {
        name: ctx.sink.file_name("scalability"),
        body,
    }])
}

pub fn csdesign(ctx: &Context, a: &CsDesignArgs) -> Result<(), CliError> {
    let mut opts = DesignOptions {
        modulator_fsr_nm: a.modulator_fsr,
        ..DesignOptions::default()
    };
    if let Some(g) = a.group_index {
        opts.group_index = g;
    }
    if let Some(c) = a.center_wavelength {
        opts.center_wavelength_nm = c;
    }
    for (name, v) in [
        ("modulator_fsr", opts.modulator_fsr_nm),
        ("group_index", Some(opts.group_index)),
        ("center_wavelength", Some(opts.center_wavelength_nm)),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("--{} must be positive, got {v}", name.replace('_', "-"))));
            }
        }
    }
    if a.n == 0 || a.x == 0 {
        return Err(CliError::Usage("--n and --x must be positive".into()));
    }
    let d = design(a.n, a.x, a.org, a.bit_rate, &opts);
    let config = json!({
        "organization": a.org,
        "bit_rate_gbps": a.bit_rate,
        "n": a.n,
        "x": a.x,
        "options": opts,
    });
    let body = match ctx.sink.format {
        Format::Json => to_json(&json!({ "config": config, "design": d })),
        Format::Csv => to_csv(&[config_comment(&config)], &[d]),
    };
    ctx.sink.emit("csdesign", &[Artifact {
        name: ctx.sink.file_name("csdesign"),
        body,
    }])
}

#[derive(Serialize)]
struct MapLayer {
    name: String,
    kind: LayerKind,
    h: u32,
    s: u32,
    div_count: u64,
    channel_matched: bool,
    summary: ScheduleSummary,
    /// None when verification was not requested or the layer is too large.
    verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<PassSchedule>,
}

#[derive(Serialize)]
struct MapTotals {
    layers: usize,
    passes: u64,
    vdpes_used: u32,
    mean_utilization: f64,
    utilization_histogram: [u64; 10],
    verified_layers: usize,
    failed_layers: usize,
}

#[derive(Serialize)]
struct MapWorkload {
    workload: String,
    layers: Vec<MapLayer>,
    totals: MapTotals,
}

#[derive(Serialize)]
struct MapRow<'a> {
    workload: &'a str,
    layer: &'a str,
    kind: LayerKind,
    h: u32,
    s: u32,
    div_count: u64,
    case: Case,
    mode: Mode,
    slices_per_row: u32,
    passes: u64,
    vdpes_used: u32,
    mean_utilization: f64,
    verified: Option<bool>,
}

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Array2<i64> {
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-8..=8))
}

/// Executes the layer's schedule on random integers and compares it with
/// a direct product.
fn verify_layer(m: &DkvMatrix, arch: &ValidatedArchConfig, seed: u64) -> Result<Option<bool>, CliError> {
    if m.h as u64 * m.s as u64 > VERIFY_MAX_ENTRIES {
        return Ok(None);
    }
    let small = DkvMatrix {
        div_count: m.div_count.min(VERIFY_DIVS),
        ..m.clone()
    };
    let sched = plan_mapping(&small, arch)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let (h, s, d) = (small.h as usize, small.s as usize, small.div_count as usize);
    let kernels = random_matrix(&mut rng, h, s);
    let divs = if small.channel_matched {
        DivValues::PerChannel((0..h).map(|_| random_matrix(&mut rng, d, s)).collect())
    } else {
        DivValues::Shared(random_matrix(&mut rng, d, s))
    };
    let got = functional_eval(&sched, &kernels, &divs)?;
    let ok = (0..h).all(|r| {
        let dv = match &divs {
            DivValues::Shared(x) => x,
            DivValues::PerChannel(v) => &v[r],
        };
        (0..d).all(|i| got[[i, r]] == (0..s).map(|t| dv[[i, t]] * kernels[[r, t]]).sum::<i64>())
    });
    Ok(Some(ok))
}

pub fn map(ctx: &Context, a: &MapArgs) -> Result<(), CliError> {
    let arch = ctx.resolve_arch(&a.arch)?;
    let workloads = resolve_workloads(&a.workload.workloads)?;
    let mut out = Vec::new();
    for w in &workloads {
        let mut layers = Vec::new();
        let mut hist = [0u64; 10];
        let (mut passes, mut used, mut num, mut den) = (0u64, 0u32, 0.0, 0.0);
        for (i, layer) in w.layers.iter().enumerate() {
            let m = decompose_for_timing(layer);
            let summary = plan_summary(&m, &arch)?;
            let verified = if a.verify {
                verify_layer(&m, &arch, ctx.seed.wrapping_add(i as u64))?
            } else {
                None
            };
            let schedule = if a.dump { Some(plan_mapping(&m, &arch)?) } else { None };
            passes += summary.passes;
            used = used.max(summary.vdpes_used);
            for (h, v) in hist.iter_mut().zip(summary.utilization_histogram) {
                *h += v;
            }
            let divs = summary.passes as f64 * summary.divs_per_pass as f64;
            num += summary.mean_utilization * divs;
            den += divs;
            layers.push(MapLayer {
                name: layer.name.clone(),
                kind: layer.kind,
                h: m.h,
                s: m.s,
                div_count: m.div_count,
                channel_matched: m.channel_matched,
                summary,
                verified,
                schedule,
            });
        }
        let totals = MapTotals {
            layers: layers.len(),
            passes,
            vdpes_used: used,
            mean_utilization: if den > 0.0 { num / den } else { 0.0 },
            utilization_histogram: hist,
            verified_layers: layers.iter().filter(|l| l.verified == Some(true)).count(),
            failed_layers: layers.iter().filter(|l| l.verified == Some(false)).count(),
        };
        out.push(MapWorkload {
            workload: w.name.clone(),
            layers,
            totals,
        });
    }
    let failed: usize = out.iter().map(|w| w.totals.failed_layers).sum();
    let config = serde_json::to_value(&arch).expect("config serializes");
    let body = match ctx.sink.format {
        Format::Json => to_json(&json!({ "config": config, "workloads": out })),
        Format::Csv => {
            let rows: Vec<MapRow> = out
                .iter()
                .flat_map(|w| {
                    w.layers.iter().map(|l| MapRow {
                        workload: &w.workload,
                        layer: &l.name,
                        kind: l.kind,
                        h: l.h,
                        s: l.s,
                        div_count: l.div_count,
                        case: l.summary.case,
                        mode: l.summary.mode,
                        slices_per_row: l.summary.slices_per_row,
                        passes: l.summary.passes,
                        vdpes_used: l.summary.vdpes_used,
                        mean_utilization: l.summary.mean_utilization,
                        verified: l.verified,
                    })
                })
                .collect();
            to_csv(&[config_comment(&config)], &rows)
        }
    };
    ctx.sink.emit("map", &[Artifact {
        name: ctx.sink.file_name("map"),
        body,
    }])?;
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} layer schedules disagree with the direct product")));
    }
    Ok(())
}

#[derive(Serialize)]
struct SimRow<'a> {
    workload: &'a str,
    organization: Organization,
    bit_rate_gbps: u32,
    precision_bits: u32,
    n: u32,
    y: u32,
    total_vdpes: u32,
    total_latency_s: f64,
    fps: f64,
    total_power_w: f64,
    fps_per_watt: f64,
    energy_j: f64,
    laser_w: f64,
    tuning_w: f64,
    dac_w: f64,
    adc_w: f64,
    pd_tia_w: f64,
    peripherals_w: f64,
    mean_utilization: f64,
    total_area_mm2: f64,
    pass_count: u64,
}

impl<'a> From<&'a SimReport> for SimRow<'a> {
    fn from(r: &'a SimReport) -> Self {
        let p = &r.power_breakdown;
        SimRow {
            workload: &r.workload,
            organization: r.organization,
            bit_rate_gbps: r.bit_rate_gbps,
            precision_bits: r.precision_bits,
            n: r.n,
            y: r.y,
            total_vdpes: r.total_vdpes,
            total_latency_s: r.total_latency_s,
            fps: r.fps,
            total_power_w: r.total_power_w,
            fps_per_watt: r.fps_per_watt,
            energy_j: r.energy_j,
            laser_w: p.laser_w,
            tuning_w: p.tuning_w,
            dac_w: p.dac_w,
            adc_w: p.adc_w,
            pd_tia_w: p.pd_tia_w,
            peripherals_w: p.peripherals_w,
            mean_utilization: r.mean_utilization,
            total_area_mm2: r.total_area_mm2,
            pass_count: r.pass_count,
        }
    }
}

pub fn simulate_cmd(ctx: &Context, a: &SimulateArgs) -> Result<(), CliError> {
    let arch = ctx.resolve_arch(&a.arch)?;
    let workloads = resolve_workloads(&a.workload.workloads)?;
    let reports = workloads
        .iter()
        .map(|w| simulate(w, &arch))
        .collect::<Result<Vec<_>, _>>()?;
    let config = serde_json::to_value(&arch).expect("config serializes");
    let body = match ctx.sink.format {
        Format::Json => to_json(&json!({ "config": config, "reports": reports })),
        Format::Csv => {
            let rows: Vec<SimRow> = reports.iter().map(SimRow::from).collect();
            to_csv(&[config_comment(&config)], &rows)
        }
    };
    ctx.sink.emit("simulate", &[Artifact {
        name: ctx.sink.file_name("simulate"),
        body,
    }])
}

#[derive(Serialize)]
struct GmeanCsvRow {
    organization: Organization,
    bit_rate_gbps: u32,
    n: u32,
    y: u32,
    total_vdpes: u32,
    published_vdpes: Option<u32>,
    normalized_fps: f64,
    normalized_fps_per_watt: f64,
}

#[derive(Serialize)]
struct RatioCsvRow<'a> {
    label: &'a str,
    achieved: f64,
    published: f64,
    band_low: Option<f64>,
    band_high: Option<f64>,
    within_band: Option<bool>,
}

pub fn compare_cmd(ctx: &Context, a: &CompareArgs) -> Result<(), CliError> {
    let workloads = if a.workloads.is_empty() {
        bundled::dsc_heavy()
    } else {
        resolve_workloads(&a.workloads)?
    };
    let spec = CompareSpec {
        organizations: a.orgs.clone(),
        bit_rates_gbps: a.bit_rates.clone(),
        precision_bits: a.bits,
        reference_organization: a.reference_org,
        reference_vdpes: a.reference_vdpes,
        tpcs_per_tile: a.tpcs_per_tile,
        baseline_organization: a.baseline_org,
        baseline_bit_rate_gbps: a.baseline_bit_rate,
        params: ctx.params.clone(),
    };
    let report = compare(&spec, &workloads)?;
    let artifacts = match ctx.sink.format {
        Format::Json => vec![Artifact {
            name: "compare.json".into(),
            body: to_json(&report),
        }],
        Format::Csv => {
            let config = json!({ "spec": report.spec, "configs": report.configs });
            let mut comments = vec![config_comment(&config)];
            for r in &report.ratios {
                comments.push(format!(
                    "ratio: {}: achieved {:.4}, published {}",
                    r.label, r.achieved, r.published
                ));
            }
            let gmeans: Vec<GmeanCsvRow> = report
                .gmeans
                .iter()
                .zip(&report.counts)
                .map(|(g, c)| GmeanCsvRow {
                    organization: g.organization,
                    bit_rate_gbps: g.bit_rate_gbps,
                    n: c.n,
                    y: c.y,
                    total_vdpes: c.total_vdpes,
                    published_vdpes: c.published_vdpes,
                    normalized_fps: g.normalized_fps,
                    normalized_fps_per_watt: g.normalized_fps_per_watt,
                })
                .collect();
            let ratios: Vec<RatioCsvRow> = report
                .ratios
                .iter()
                .map(|r| RatioCsvRow {
                    label: &r.label,
                    achieved: r.achieved,
                    published: r.published,
                    band_low: r.band.map(|b| b.0),
                    band_high: r.band.map(|b| b.1),
                    within_band: r.within_band(),
                })
                .collect();
            let mut v = vec![Artifact {
                name: "compare.csv".into(),
                body: to_csv(&comments, &gmeans),
            }];
            if ctx.sink.out_dir.is_some() {
                v.push(Artifact {
                    name: "compare_rows.csv".into(),
                    body: to_csv(&[config_comment(&config)], &report.rows),
                });
                v.push(Artifact {
                    name: "compare_ratios.csv".into(),
                    body: to_csv(&[], &ratios),
                });
            }
            v
        }
    };
    ctx.sink.emit("compare", &artifacts)
}
