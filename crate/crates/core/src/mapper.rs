// SPDX-License-Identifier: Apache-2.0

//! Mapping of flattened kernel matrices onto fixed and reconfigurable VDPEs.
//!
//! A single packer walks slice instances in schedule order and feeds a sink.
//! [`plan_mapping`] collects every assignment into a [`PassSchedule`];
//! [`plan_summary`] keeps only the counters needed by the performance model.

use ndarray::Array2;
use serde::Serialize;
use thiserror::Error;

use crate::archmodel::ValidatedArchConfig;
use crate::cnnworkload::DkvMatrix;

/// Comb-switch pairs for a VDPE of `n` wavelengths regrouped in sets of `x`.
pub fn reconfig_group_count(n: u32, x: u32) -> u32 {
    if x >= 1 && n >= 2 * x {
        n / x
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    Mode1,
    Mode2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    /// S > N: N-length slices plus a remainder, one per VDPE.
    Case1,
    /// x < S < N: x-length slices, each in its own comb group.
    Case2,
    /// S ≤ x < N: whole DKV in one comb group.
    Case3,
    /// S = N.
    ExactFit,
    /// S < N on a VDPE that cannot regroup (or gains nothing by it).
    Underfill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum MappingPolicy {
    #[default]
    Adaptive,
    ForceMode1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReconfigurableVdpe {
    pub n: u32,
    pub x: u32,
    pub y: u32,
}

impl ReconfigurableVdpe {
    pub fn new(n: u32, x: u32) -> Self {
        ReconfigurableVdpe {
            n,
            x,
            y: reconfig_group_count(n, x),
        }
    }

    /// VDPE without comb switches.
    pub fn fixed(n: u32) -> Self {
        ReconfigurableVdpe {
            n,
            x: crate::archmodel::DEFAULT_REAGGREGATION as u32,
            y: 0,
        }
    }

    pub fn for_arch(arch: &ValidatedArchConfig) -> Self {
        ReconfigurableVdpe {
            n: arch.n(),
            x: arch.x(),
            y: arch.y(),
        }
    }
}

pub fn select_case(s: u32, vdpe: &ReconfigurableVdpe) -> (Case, Mode) {
    select_case_with(s, vdpe, MappingPolicy::Adaptive)
}

pub fn select_case_with(s: u32, vdpe: &ReconfigurableVdpe, policy: MappingPolicy) -> (Case, Mode) {
    let (n, x, y) = (vdpe.n, vdpe.x, vdpe.y);
    if s > n {
        return (Case::Case1, Mode::Mode1);
    }
    if s == n {
        return (Case::ExactFit, Mode::Mode1);
    }
    if policy == MappingPolicy::Adaptive && y >= 1 {
        if s <= x {
            return (Case::Case3, Mode::Mode2);
        }
        // Regrouping only pays off when one DKV fits in the y groups.
        if s.div_ceil(x) <= y {
            return (Case::Case2, Mode::Mode2);
        }
    }
    (Case::Underfill, Mode::Mode1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlicePlan {
    pub case: Case,
    pub mode: Mode,
    /// Number of full-length slices.
    pub b: u32,
    /// Remainder length (0 when S divides evenly).
    pub c: u32,
    pub slice_lengths: Vec<u32>,
}

impl SlicePlan {
    pub fn slices_per_row(&self) -> u32 {
        self.slice_lengths.len() as u32
    }

    /// Offsets of each slice within the DKV.
    pub fn offsets(&self) -> Vec<u32> {
        let mut acc = 0;
        self.slice_lengths
            .iter()
            .map(|l| {
                let o = acc;
                acc += l;
                o
            })
            .collect()
    }
}

fn split(s: u32, width: u32) -> (u32, u32, Vec<u32>) {
    let b = s / width;
    let c = s % width;
    let mut lens = vec![width; b as usize];
    if c > 0 {
        lens.push(c);
    }
    (b, c, lens)
}

pub fn slice_plan(s: u32, vdpe: &ReconfigurableVdpe, policy: MappingPolicy) -> SlicePlan {
    let (case, mode) = select_case_with(s, vdpe, policy);
    let (b, c, slice_lengths) = match case {
        Case::Case1 => split(s, vdpe.n),
        Case::Case2 => split(s, vdpe.x),
        Case::ExactFit => (1, 0, vec![s]),
        Case::Case3 | Case::Underfill => (0, s, vec![s]),
    };
    SlicePlan {
        case,
        mode,
        b,
        c,
        slice_lengths,
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MapError {
    #[error("matrix has no rows or zero-length rows")]
    EmptyMatrix,
    #[error("architecture has no VDPEs")]
    NoVdpes,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// One slice instance placed on a VDPE (and comb group in Mode2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub vdpe: u32,
    pub group: Option<u32>,
    pub row: u32,
    pub slice_index: u32,
    pub offset: u32,
    pub len: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pass {
    pub mode: Mode,
    pub assignments: Vec<Assignment>,
    pub divs_streamed: u64,
}

impl Pass {
    pub fn occupied_vdpes(&self) -> u32 {
        let mut ids: Vec<u32> = self.assignments.iter().map(|a| a.vdpe).collect();
        ids.dedup();
        ids.len() as u32
    }
}

/// Location of one partial result: pass index and assignment index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartialRef {
    pub pass: u32,
    pub assignment: u32,
}

/// Partials of one DKV row in slice order, summed by the psum network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowReduction {
    pub row: u32,
    pub partials: Vec<PartialRef>,
}

trait PassSink {
    fn place(&mut self, a: Assignment);
    fn close_pass(&mut self, mode: Mode);
}

fn pack(plan: &SlicePlan, h: u32, y: u32, total_vdpes: u32, sink: &mut impl PassSink) {
    let offsets = plan.offsets();
    let mode = plan.mode;
    let mut slot = 0u32;
    let next_vdpe = |slot: &mut u32, sink: &mut dyn PassSink| {
        *slot += 1;
        if *slot == total_vdpes {
            sink.close_pass(mode);
            *slot = 0;
        }
    };
    match mode {
        Mode::Mode1 => {
            for row in 0..h {
                for (j, (&len, &offset)) in plan.slice_lengths.iter().zip(&offsets).enumerate() {
                    sink.place(Assignment {
                        vdpe: slot,
                        group: None,
                        row,
                        slice_index: j as u32,
                        offset,
                        len,
                    });
                    next_vdpe(&mut slot, sink);
                }
            }
        }
        Mode::Mode2 => {
            // Blocks of V·y rows go slice-major, one slice index per pass.
            // The last partial block goes row-major so every tail VDPE sees
            // the same slice mix. Comb groups take instances in order.
            let slices: Vec<(u32, u32)> = plan.slice_lengths.iter().copied().zip(offsets).collect();
            let block = total_vdpes as u64 * y as u64;
            let full = h as u64 / block * block;
            let mut group = 0u32;
            let mut emit = |row: u32, j: usize, slot: &mut u32, sink: &mut dyn PassSink| {
                let (len, offset) = slices[j];
                sink.place(Assignment {
                    vdpe: *slot,
                    group: Some(group),
                    row,
                    slice_index: j as u32,
                    offset,
                    len,
                });
                group += 1;
                if group == y {
                    group = 0;
                    next_vdpe(slot, sink);
                }
            };
            let mut start = 0u64;
            while start < full {
                for j in 0..slices.len() {
                    for row in start..start + block {
                        emit(row as u32, j, &mut slot, sink);
                    }
                }
                start += block;
            }
            for row in full as u32..h {
                for j in 0..slices.len() {
                    emit(row, j, &mut slot, sink);
                }
            }
            if group > 0 {
                next_vdpe(&mut slot, sink);
            }
        }
    }
    if slot > 0 {
        sink.close_pass(mode);
    }
}

/// Fully materialized schedule. Read-only after construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassSchedule {
    plan: SlicePlan,
    n: u32,
    y: u32,
    h: u32,
    s: u32,
    channel_matched: bool,
    div_count: u64,
    total_vdpes: u32,
    passes: Vec<Pass>,
    reductions: Vec<RowReduction>,
}

impl PassSchedule {
    pub fn plan(&self) -> &SlicePlan {
        &self.plan
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn y(&self) -> u32 {
        self.y
    }
    pub fn h(&self) -> u32 {
        self.h
    }
    pub fn s(&self) -> u32 {
        self.s
    }
    pub fn channel_matched(&self) -> bool {
        self.channel_matched
    }
    pub fn div_count(&self) -> u64 {
        self.div_count
    }
    pub fn total_vdpes(&self) -> u32 {
        self.total_vdpes
    }
    pub fn passes(&self) -> &[Pass] {
        &self.passes
    }
    /// Maximum number of VDPEs occupied in any pass.
    pub fn vdpes_used(&self) -> u32 {
        self.passes.iter().map(Pass::occupied_vdpes).max().unwrap_or(0)
    }
    /// Reduction edges, one entry per DKV row in ascending row order.
    pub fn reductions(&self) -> &[RowReduction] {
        &self.reductions
    }
    pub fn summary(&self) -> ScheduleSummary {
        let mut sink = SummarySink::new(self.n);
        for p in &self.passes {
            for a in &p.assignments {
                sink.place(*a);
            }
            sink.close_pass(p.mode);
        }
        sink.finish(self.plan.clone(), self.h, self.s, self.div_count, self.total_vdpes)
    }
}

struct ScheduleSink {
    div_count: u64,
    current: Vec<Assignment>,
    passes: Vec<Pass>,
}

impl PassSink for ScheduleSink {
    fn place(&mut self, a: Assignment) {
        self.current.push(a);
    }
    fn close_pass(&mut self, mode: Mode) {
        self.passes.push(Pass {
            mode,
            assignments: std::mem::take(&mut self.current),
            divs_streamed: self.div_count,
        });
    }
}

/// Counters kept while packing without storing assignments.
struct SummarySink {
    n: u32,
    cur_vdpe: Option<u32>,
    cur_len: u32,
    pass_occupied: u32,
    pass_util_sum: f64,
    pass_channels: u64,
    pass_mrrs: u64,
    passes: u64,
    util_sum: f64,
    histogram: [u64; 10],
    occupied_sum: u64,
    channels_sum: u64,
    mrrs_sum: u64,
    vdpes_used: u32,
    instances: u64,
}

impl SummarySink {
    fn new(n: u32) -> Self {
        SummarySink {
            n,
            cur_vdpe: None,
            cur_len: 0,
            pass_occupied: 0,
            pass_util_sum: 0.0,
            pass_channels: 0,
            pass_mrrs: 0,
            passes: 0,
            util_sum: 0.0,
            histogram: [0; 10],
            occupied_sum: 0,
            channels_sum: 0,
            mrrs_sum: 0,
            vdpes_used: 0,
            instances: 0,
        }
    }

    fn flush_vdpe(&mut self) {
        if self.cur_vdpe.take().is_some() {
            self.pass_occupied += 1;
            self.pass_util_sum += self.cur_len as f64 / self.n as f64;
            self.cur_len = 0;
        }
    }

    fn finish(
        self,
        plan: SlicePlan,
        h: u32,
        s: u32,
        div_count: u64,
        total_vdpes: u32,
    ) -> ScheduleSummary {
        let p = self.passes.max(1) as f64;
        ScheduleSummary {
            case: plan.case,
            mode: plan.mode,
            slices_per_row: plan.slices_per_row(),
            slice_lengths: plan.slice_lengths,
            h,
            s,
            n: self.n,
            passes: self.passes,
            divs_per_pass: div_count,
            total_vdpes,
            vdpes_used: self.vdpes_used,
            slice_instances: self.instances,
            mean_utilization: self.util_sum / p,
            utilization_histogram: self.histogram,
            mean_occupied_vdpes: self.occupied_sum as f64 / p,
            mean_active_channels: self.channels_sum as f64 / p,
            mean_active_mrrs: self.mrrs_sum as f64 / p,
        }
    }
}

impl PassSink for SummarySink {
    fn place(&mut self, a: Assignment) {
        if self.cur_vdpe != Some(a.vdpe) {
            self.flush_vdpe();
            self.cur_vdpe = Some(a.vdpe);
        }
        self.cur_len += a.len;
        self.pass_channels += 1;
        self.pass_mrrs += a.len as u64;
        self.instances += 1;
    }

    fn close_pass(&mut self, _mode: Mode) {
        self.flush_vdpe();
        let frac = self.pass_util_sum / self.pass_occupied.max(1) as f64;
        self.util_sum += frac;
        let bin = ((frac * 10.0).ceil() as usize).clamp(1, 10) - 1;
        self.histogram[bin] += 1;
        self.occupied_sum += self.pass_occupied as u64;
        self.channels_sum += self.pass_channels;
        self.mrrs_sum += self.pass_mrrs;
        self.vdpes_used = self.vdpes_used.max(self.pass_occupied);
        self.passes += 1;
        self.pass_occupied = 0;
        self.pass_util_sum = 0.0;
        self.pass_channels = 0;
        self.pass_mrrs = 0;
    }
}

/// Aggregate view of a schedule. Every pass of one matrix streams the same
/// number of DIVs, so pass means are also DIV-weighted means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleSummary {
    pub case: Case,
    pub mode: Mode,
    pub slices_per_row: u32,
    pub slice_lengths: Vec<u32>,
    pub h: u32,
    pub s: u32,
    pub n: u32,
    pub passes: u64,
    pub divs_per_pass: u64,
    pub total_vdpes: u32,
    pub vdpes_used: u32,
    pub slice_instances: u64,
    pub mean_utilization: f64,
    /// Pass counts by utilization decile: (0,10%], (10,20%], ... (90,100%].
    pub utilization_histogram: [u64; 10],
    pub mean_occupied_vdpes: f64,
    /// Summation channels (SE or comb group) in use per pass.
    pub mean_active_channels: f64,
    /// Active DKV modulators per pass.
    pub mean_active_mrrs: f64,
}

fn check_inputs(matrix: &DkvMatrix, total_vdpes: u32) -> Result<(), MapError> {
    if matrix.h == 0 || matrix.s == 0 {
        return Err(MapError::EmptyMatrix);
    }
    if total_vdpes == 0 {
        return Err(MapError::NoVdpes);
    }
    Ok(())
}

pub fn plan_mapping(matrix: &DkvMatrix, arch: &ValidatedArchConfig) -> Result<PassSchedule, MapError> {
    plan_mapping_on(
        matrix,
        &ReconfigurableVdpe::for_arch(arch),
        arch.total_vdpes(),
        MappingPolicy::Adaptive,
    )
}

pub fn plan_mapping_on(
    matrix: &DkvMatrix,
    vdpe: &ReconfigurableVdpe,
    total_vdpes: u32,
    policy: MappingPolicy,
) -> Result<PassSchedule, MapError> {
    check_inputs(matrix, total_vdpes)?;
    let plan = slice_plan(matrix.s, vdpe, policy);
    let mut sink = ScheduleSink {
        div_count: matrix.div_count,
        current: Vec::new(),
        passes: Vec::new(),
    };
    pack(&plan, matrix.h, vdpe.y, total_vdpes, &mut sink);

    let k = plan.slice_lengths.len();
    let mut slots: Vec<Vec<Option<PartialRef>>> = vec![vec![None; k]; matrix.h as usize];
    for (pi, pass) in sink.passes.iter().enumerate() {
        for (ai, a) in pass.assignments.iter().enumerate() {
            slots[a.row as usize][a.slice_index as usize] = Some(PartialRef {
                pass: pi as u32,
                assignment: ai as u32,
            });
        }
    }
    let reductions = slots
        .into_iter()
        .enumerate()
        .map(|(row, parts)| RowReduction {
            row: row as u32,
            partials: parts
                .into_iter()
                .map(|p| p.expect("packer covers every slice instance"))
                .collect(),
        })
        .collect();

    Ok(PassSchedule {
        plan,
        n: vdpe.n,
        y: vdpe.y,
        h: matrix.h,
        s: matrix.s,
        channel_matched: matrix.channel_matched,
        div_count: matrix.div_count,
        total_vdpes,
        passes: sink.passes,
        reductions,
    })
}

pub fn plan_summary(matrix: &DkvMatrix, arch: &ValidatedArchConfig) -> Result<ScheduleSummary, MapError> {
    plan_summary_on(
        matrix,
        &ReconfigurableVdpe::for_arch(arch),
        arch.total_vdpes(),
        MappingPolicy::Adaptive,
    )
}

pub fn plan_summary_on(
    matrix: &DkvMatrix,
    vdpe: &ReconfigurableVdpe,
    total_vdpes: u32,
    policy: MappingPolicy,
) -> Result<ScheduleSummary, MapError> {
    check_inputs(matrix, total_vdpes)?;
    let plan = slice_plan(matrix.s, vdpe, policy);
    let mut sink = SummarySink::new(vdpe.n);
    pack(&plan, matrix.h, vdpe.y, total_vdpes, &mut sink);
    Ok(sink.finish(plan, matrix.h, matrix.s, matrix.div_count, total_vdpes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilizationReport {
    pub per_pass: Vec<f64>,
    pub mean: f64,
}

pub fn utilization(schedule: &PassSchedule, n: u32) -> UtilizationReport {
    let mut per_pass = Vec::with_capacity(schedule.passes.len());
    let mut weighted = 0.0;
    let mut weights = 0.0;
    for pass in &schedule.passes {
        let mut per_vdpe: Vec<(u32, u32)> = Vec::new();
        for a in &pass.assignments {
            match per_vdpe.last_mut() {
                Some((v, len)) if *v == a.vdpe => *len += a.len,
                _ => per_vdpe.push((a.vdpe, a.len)),
            }
        }
        let frac = per_vdpe.iter().map(|(_, l)| *l as f64 / n as f64).sum::<f64>()
            / per_vdpe.len().max(1) as f64;
        per_pass.push(frac);
        weighted += frac * pass.divs_streamed as f64;
        weights += pass.divs_streamed as f64;
    }
    let mean = if weights > 0.0 { weighted / weights } else { 0.0 };
    UtilizationReport { per_pass, mean }
}

/// Input vectors for functional evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum DivValues {
    /// One div_count × S matrix shared by every DKV row.
    Shared(Array2<i64>),
    /// One div_count × S matrix per DKV row, for channel-matched layers.
    PerChannel(Vec<Array2<i64>>),
}

impl DivValues {
    fn for_row(&self, row: usize) -> &Array2<i64> {
        match self {
            DivValues::Shared(m) => m,
            DivValues::PerChannel(v) => &v[row],
        }
    }
}

/// Executes the schedule slice by slice and reduces partials along the
/// reduction edges. Returns a div_count × H matrix.
pub fn functional_eval(
    schedule: &PassSchedule,
    kernel_values: &Array2<i64>,
    div_values: &DivValues,
) -> Result<Array2<i64>, MapError> {
    let h = schedule.h as usize;
    let s = schedule.s as usize;
    if kernel_values.dim() != (h, s) {
        return Err(MapError::ShapeMismatch(format!(
            "kernel values are {:?}, schedule expects ({h}, {s})",
            kernel_values.dim()
        )));
    }
    let d = schedule.div_count as usize;
    match div_values {
        DivValues::Shared(m) => {
            if schedule.channel_matched {
                return Err(MapError::ShapeMismatch(
                    "channel-matched schedule needs per-channel DIVs".into(),
                ));
            }
            if m.dim() != (d, s) {
                return Err(MapError::ShapeMismatch(format!(
                    "DIV values are {:?}, expected ({d}, {s})",
                    m.dim()
                )));
            }
        }
        DivValues::PerChannel(v) => {
            if !schedule.channel_matched {
                return Err(MapError::ShapeMismatch(
                    "per-channel DIVs given for a schedule without channel matching".into(),
                ));
            }
            if v.len() != h {
                return Err(MapError::ShapeMismatch(format!(
                    "{} DIV channels for {h} rows",
                    v.len()
                )));
            }
            if let Some(bad) = v.iter().find(|m| m.dim() != (d, s)) {
                return Err(MapError::ShapeMismatch(format!(
                    "DIV channel is {:?}, expected ({d}, {s})",
                    bad.dim()
                )));
            }
        }
    }

    let partials: Vec<Vec<Vec<i64>>> = schedule
        .passes
        .iter()
        .map(|pass| {
            pass.assignments
                .iter()
                .map(|a| {
                    let row = a.row as usize;
                    let lo = a.offset as usize;
                    let hi = lo + a.len as usize;
                    let k = kernel_values.row(row);
                    let divs = div_values.for_row(row);
                    (0..d)
                        .map(|i| {
                            let div = divs.row(i);
                            (lo..hi).map(|t| k[t] * div[t]).sum()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut out = Array2::<i64>::zeros((d, h));
    for red in &schedule.reductions {
        for p in &red.partials {
            let vals = &partials[p.pass as usize][p.assignment as usize];
            for (i, v) in vals.iter().enumerate() {
                out[[i, red.row as usize]] += v;
            }
        }
    }
    Ok(out)
}
