// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ringsim_core::archmodel::Organization;

#[derive(Debug, Parser)]
#[command(name = "ringsim", version, about = "Design and performance analysis for microring photonic CNN accelerators")]
pub struct Cli {
    /// JSON object of photonic parameter overrides, applied on top of any
    /// architecture file.
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,

    /// Write outputs and a metadata sidecar here instead of stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for randomized verification values.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Largest VDPE size per precision and bit rate.
    Scalability(ScalabilityArgs),
    /// Comb-switch pairs, ring FSR and radius for one VDPE size.
    Csdesign(CsDesignArgs),
    /// Per-layer mapping summary for a workload.
    Map(MapArgs),
    /// Latency, power and area of workloads on one architecture.
    Simulate(SimulateArgs),
    /// Area-matched comparison across organizations and bit rates.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct ScalabilityArgs {
    #[arg(long)]
    pub org: Organization,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5, 6, 7, 8])]
    pub bits: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 3, 5, 10])]
    pub bit_rates: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct CsDesignArgs {
    #[arg(long)]
    pub org: Organization,
    #[arg(long)]
    pub bit_rate: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 9)]
    pub x: u32,
    /// Modulator FSR in nm; derived from known designs when omitted.
    #[arg(long)]
    pub modulator_fsr: Option<f64>,
    #[arg(long)]
    pub group_index: Option<f64>,
    #[arg(long)]
    pub center_wavelength: Option<f64>,
}

/// Architecture from a JSON file or from flags.
#[derive(Debug, Args)]
pub struct ArchArgs {
    #[arg(long, value_name = "FILE", conflicts_with_all = ["org", "n", "x", "tiles", "vdpes"])]
    pub arch: Option<PathBuf>,
    #[arg(long)]
    pub org: Option<Organization>,
    #[arg(long, default_value_t = 1)]
    pub bit_rate: u32,
    #[arg(long, default_value_t = 4)]
    pub bits: u32,
    /// VDPE size; the largest feasible size when omitted.
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(long)]
    pub x: Option<i64>,
    #[arg(long, conflicts_with = "vdpes")]
    pub tiles: Option<i64>,
    /// Total VDPE count; sets the tile count.
    #[arg(long)]
    pub vdpes: Option<i64>,
}

/// A workload CSV path, or `bundled:NAME`.
#[derive(Debug, Args)]
pub struct WorkloadArgs {
    #[arg(long = "workload", value_name = "PATH|bundled:NAME", required = true)]
    pub workloads: Vec<String>,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub arch: ArchArgs,
    /// Include every pass and assignment.
    #[arg(long)]
    pub dump: bool,
    /// Check each schedule against a direct product on random values.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub workload: WorkloadArgs,
    #[command(flatten)]
    pub arch: ArchArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Defaults to the bundled depthwise-separable networks.
    #[arg(long = "workload", value_name = "PATH|bundled:NAME")]
    pub workloads: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = Organization::ALL)]
    pub orgs: Vec<Organization>,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 3, 5])]
    pub bit_rates: Vec<u32>,
    #[arg(long, default_value_t = 4)]
    pub bits: u32,
    #[arg(long, default_value_t = Organization::Rmam)]
    pub reference_org: Organization,
    #[arg(long, default_value_t = 512)]
    pub reference_vdpes: u32,
    #[arg(long, default_value_t = 4)]
    pub tpcs_per_tile: u32,
    #[arg(long, default_value_t = Organization::Rmam)]
    pub baseline_org: Organization,
    #[arg(long, default_value_t = 1)]
    pub baseline_bit_rate: u32,
}
