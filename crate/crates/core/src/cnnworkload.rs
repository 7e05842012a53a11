// SPDX-License-Identifier: Apache-2.0

//! CNN layer records, cost formulas and kernel flattening.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayerKind {
    SC,
    DC,
    PC,
    FC,
}

impl LayerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::SC => "SC",
            LayerKind::DC => "DC",
            LayerKind::PC => "PC",
            LayerKind::FC => "FC",
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SC" => Ok(LayerKind::SC),
            "DC" => Ok(LayerKind::DC),
            "PC" => Ok(LayerKind::PC),
            "FC" => Ok(LayerKind::FC),
            other => Err(format!("unknown layer kind '{other}'")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkloadError {
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{file}:{line}: parse error: {reason}")]
    Parse {
        file: String,
        line: u64,
        reason: String,
    },
    #[error("{file}:{line}: invalid layer: {reason}")]
    InvariantViolation {
        file: String,
        line: u64,
        reason: String,
    },
    #[error("{0}")]
    InvalidLayer(String),
    #[error("expected a {expected} layer, got {got}")]
    WrongKind { expected: LayerKind, got: LayerKind },
}

/// One layer. For DC rows `f` counts how many times this depthwise shape
/// occurs; every occurrence applies one K×K kernel to each of `d` channels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
    pub k: u32,
    pub d: u32,
    pub f: u32,
    pub h_out: u32,
    pub w_out: u32,
}

impl LayerSpec {
    pub fn new(
        name: impl Into<String>,
        kind: LayerKind,
        k: u32,
        d: u32,
        f: u32,
        h_out: u32,
        w_out: u32,
    ) -> Result<Self, WorkloadError> {
        let l = LayerSpec {
            name: name.into(),
            kind,
            k,
            d,
            f,
            h_out,
            w_out,
        };
        l.check().map_err(WorkloadError::InvalidLayer)?;
        Ok(l)
    }

    fn check(&self) -> Result<(), String> {
        for (field, v) in [
            ("K", self.k),
            ("D", self.d),
            ("F", self.f),
            ("H_out", self.h_out),
            ("W_out", self.w_out),
        ] {
            if v < 1 {
                return Err(format!("{field} must be >= 1"));
            }
        }
        if self.kind == LayerKind::PC && self.k != 1 {
            return Err(format!("PC layer must have K = 1, got {}", self.k));
        }
        if self.kind == LayerKind::FC && (self.h_out != 1 || self.w_out != 1) {
            return Err(format!(
                "FC layer must have H_out = W_out = 1, got {}x{}",
                self.h_out, self.w_out
            ));
        }
        Ok(())
    }

    /// DKV length.
    pub fn s(&self) -> u32 {
        match self.kind {
            LayerKind::SC => self.k * self.k * self.d,
            LayerKind::DC => self.k * self.k,
            LayerKind::PC | LayerKind::FC => self.d,
        }
    }

    pub fn output_positions(&self) -> u64 {
        self.h_out as u64 * self.w_out as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostReport {
    pub w: u64,
    pub o: u64,
    pub o_dc: Option<u64>,
    pub o_pc: Option<u64>,
    pub r_w: Option<f64>,
    pub r_o: Option<f64>,
}

pub fn sc_costs(layer: &LayerSpec) -> Result<CostReport, WorkloadError> {
    if layer.kind != LayerKind::SC {
        return Err(WorkloadError::WrongKind {
            expected: LayerKind::SC,
            got: layer.kind,
        });
    }
    let k2 = layer.k as u64 * layer.k as u64;
    let w = k2 * layer.d as u64 * layer.f as u64;
    Ok(CostReport {
        w,
        o: layer.output_positions() * w,
        o_dc: None,
        o_pc: None,
        r_w: None,
        r_o: None,
    })
}

/// Cost of a depthwise layer followed by a pointwise layer with `f_pc` kernels.
pub fn dsc_costs(layer_dc: &LayerSpec, f_pc: u32) -> Result<CostReport, WorkloadError> {
    if layer_dc.kind != LayerKind::DC {
        return Err(WorkloadError::WrongKind {
            expected: LayerKind::DC,
            got: layer_dc.kind,
        });
    }
    if f_pc < 1 {
        return Err(WorkloadError::InvalidLayer("f_pc must be >= 1".into()));
    }
    let k2 = layer_dc.k as u64 * layer_dc.k as u64;
    let d = layer_dc.d as u64;
    let pos = layer_dc.output_positions();
    let o_dc = pos * k2 * d;
    let o_pc = pos * d * f_pc as u64;
    let sc_w = k2 * d * f_pc as u64;
    let w = k2 * d + d * f_pc as u64;
    let o = o_dc + o_pc;
    Ok(CostReport {
        w,
        o,
        o_dc: Some(o_dc),
        o_pc: Some(o_pc),
        r_w: Some(w as f64 / sc_w as f64),
        r_o: Some(o as f64 / (pos * sc_w) as f64),
    })
}

/// DSC-over-SC ratio, identical for weights and operations.
pub fn reduction_factors(k: u32, f: u32) -> (f64, f64) {
    let r = 1.0 / f as f64 + 1.0 / (k as f64 * k as f64);
    (r, r)
}

/// Flattened kernel matrix of one layer: `h` rows of length `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DkvMatrix {
    pub layer: String,
    pub kind: LayerKind,
    pub h: u32,
    pub s: u32,
    /// Row i pairs only with channel-i input vectors.
    pub channel_matched: bool,
    pub div_count: u64,
}

impl DkvMatrix {
    pub fn new(h: u32, s: u32, div_count: u64) -> Self {
        DkvMatrix {
            layer: String::new(),
            kind: LayerKind::SC,
            h,
            s,
            channel_matched: false,
            div_count,
        }
    }

    pub fn channel_matched(mut self) -> Self {
        self.channel_matched = true;
        self
    }
}

pub fn decompose(layer: &LayerSpec) -> DkvMatrix {
    let (h, div_count, matched) = match layer.kind {
        LayerKind::SC | LayerKind::PC => (layer.f, layer.output_positions(), false),
        LayerKind::DC => (layer.d, layer.output_positions(), true),
        LayerKind::FC => (layer.f, 1, false),
    };
    DkvMatrix {
        layer: layer.name.clone(),
        kind: layer.kind,
        h,
        s: layer.s(),
        channel_matched: matched,
        div_count,
    }
}

/// Matrix used for timing. A DC row stands for `f` occurrences of the
/// depthwise shape, so all D·F channel kernels are scheduled together.
pub fn decompose_for_timing(layer: &LayerSpec) -> DkvMatrix {
    let mut m = decompose(layer);
    if layer.kind == LayerKind::DC {
        m.h = layer.d.saturating_mul(layer.f);
    }
    m
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Workload {
    pub name: String,
    pub layers: Vec<LayerSpec>,
}

pub const WORKLOAD_HEADER: [&str; 7] = ["name", "kind", "K", "D", "F", "H_out", "W_out"];

impl Workload {
    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Total number of flattened kernel vectors.
    pub fn total_dkvs(&self) -> u64 {
        self.layers
            .iter()
            .map(|l| decompose_for_timing(l).h as u64)
            .sum()
    }

    /// DKV count per DKV length.
    pub fn s_histogram(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for l in &self.layers {
            *out.entry(l.s()).or_insert(0) += decompose_for_timing(l).h as u64;
        }
        out
    }

    /// Kernel-instance count per (kind, K, D), the aggregation used for
    /// shape tables. DC layers are keyed with D = 1 since each channel
    /// kernel is a separate K×K×1 kernel.
    pub fn shape_table(&self) -> BTreeMap<(LayerKind, u32, u32), u64> {
        let mut out = BTreeMap::new();
        for l in &self.layers {
            let (key, count) = match l.kind {
                LayerKind::DC => ((l.kind, l.k, 1), l.d as u64 * l.f as u64),
                _ => ((l.kind, l.k, l.d), l.f as u64),
            };
            *out.entry(key).or_insert(0) += count;
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(WORKLOAD_HEADER).expect("in-memory write");
        for l in &self.layers {
            w.write_record([
                l.name.clone(),
                l.kind.to_string(),
                l.k.to_string(),
                l.d.to_string(),
                l.f.to_string(),
                l.h_out.to_string(),
                l.w_out.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

pub fn load_workload(path: &Path) -> Result<Workload, WorkloadError> {
    let text = std::fs::read_to_string(path).map_err(|e| WorkloadError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_workload(&name, &path.display().to_string(), &text)
}

/// Parses workload CSV text. `file` is only used in error messages.
pub fn parse_workload(name: &str, file: &str, text: &str) -> Result<Workload, WorkloadError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let parse_err = |line: u64, reason: String| WorkloadError::Parse {
        file: file.to_string(),
        line,
        reason,
    };
    let mut layers = Vec::new();
    let mut header_seen = false;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if !header_seen {
            let got: Vec<&str> = rec.iter().collect();
            if got != WORKLOAD_HEADER {
                return Err(parse_err(
                    line,
                    format!("expected header {}", WORKLOAD_HEADER.join(",")),
                ));
            }
            header_seen = true;
            continue;
        }
        if rec.len() != WORKLOAD_HEADER.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", WORKLOAD_HEADER.len(), rec.len()),
            ));
        }
        let kind: LayerKind = rec[1].parse().map_err(|e| parse_err(line, e))?;
        let mut nums = [0u32; 5];
        for (i, slot) in nums.iter_mut().enumerate() {
            let field = &rec[i + 2];
            *slot = field.parse().map_err(|_| {
                parse_err(
                    line,
                    format!("{} must be a nonnegative integer, got '{field}'", WORKLOAD_HEADER[i + 2]),
                )
            })?;
        }
        let [k, d, f, h_out, w_out] = nums;
        let layer = LayerSpec {
            name: rec[0].to_string(),
            kind,
            k,
            d,
            f,
            h_out,
            w_out,
        };
        layer
            .check()
            .map_err(|reason| WorkloadError::InvariantViolation {
                file: file.to_string(),
                line,
                reason,
            })?;
        layers.push(layer);
    }
    Ok(Workload {
        name: name.to_string(),
        layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(kind: LayerKind, k: u32, d: u32, f: u32, hw: u32) -> LayerSpec {
        LayerSpec::new("t", kind, k, d, f, hw, hw).unwrap()
    }

    #[test]
    fn sc_weight_counts() {
        assert_eq!(sc_costs(&layer(LayerKind::SC, 3, 3, 1, 1)).unwrap().w, 27);
        let unit = sc_costs(&layer(LayerKind::SC, 1, 1, 1, 1)).unwrap();
        assert_eq!((unit.w, unit.o), (1, 1));
        assert_eq!(sc_costs(&layer(LayerKind::SC, 3, 3, 64, 1)).unwrap().w, 1728);
        assert!(sc_costs(&layer(LayerKind::DC, 3, 3, 1, 1)).is_err());
    }

    #[test]
    fn dsc_operation_counts() {
        assert_eq!(dsc_costs(&layer(LayerKind::DC, 3, 1, 1, 1), 1).unwrap().w, 10);
        let c = dsc_costs(&layer(LayerKind::DC, 3, 3, 1, 1), 1).unwrap();
        assert_eq!((c.o_dc, c.o_pc, c.o), (Some(27), Some(3), 30));
    }

    #[test]
    fn reduction_factor_values() {
        assert_eq!(reduction_factors(1, 1), (2.0, 2.0));
        let (r, _) = reduction_factors(3, 256);
        assert!((r - 0.115_017_361_1).abs() < 1e-9);
    }

    #[test]
    fn decomposition_shapes() {
        let m = decompose(&layer(LayerKind::SC, 3, 3, 1, 1));
        assert_eq!((m.h, m.s), (1, 27));
        let m = decompose(&layer(LayerKind::DC, 3, 3, 1, 4));
        assert_eq!((m.h, m.s, m.channel_matched, m.div_count), (3, 9, true, 16));
        let m = decompose(&layer(LayerKind::PC, 1, 3840, 2400, 1));
        assert_eq!((m.h, m.s), (2400, 3840));
        let m = decompose(&layer(LayerKind::FC, 1, 2560, 1, 1));
        assert_eq!((m.h, m.s, m.div_count), (1, 2560, 1));
    }

    #[test]
    fn layer_invariants() {
        assert!(LayerSpec::new("x", LayerKind::PC, 3, 1, 1, 1, 1).is_err());
        assert!(LayerSpec::new("x", LayerKind::FC, 1, 1, 1, 2, 1).is_err());
        assert!(LayerSpec::new("x", LayerKind::SC, 0, 1, 1, 1, 1).is_err());
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "# comment\nname,kind,K,D,F,H_out,W_out\na,PC,1,8,2,1,1\nb,PC,3,8,2,1,1\n";
        match parse_workload("w", "w.csv", text) {
            Err(WorkloadError::InvariantViolation { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let text = "name,kind,K,D,F,H_out,W_out\na,PC,1,x,2,1,1\n";
        match parse_workload("w", "w.csv", text) {
            Err(WorkloadError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_and_roundtrip() {
        assert!(parse_workload("e", "e.csv", "").unwrap().is_empty());
        assert!(parse_workload("e", "e.csv", "# only\n").unwrap().is_empty());
        let text = "name,kind,K,D,F,H_out,W_out\na,SC,3,3,8,4,4\nb,DC,3,8,1,4,4\n";
        let w = parse_workload("w", "w.csv", text).unwrap();
        assert_eq!(parse_workload("w", "w.csv", &w.to_csv()).unwrap(), w);
    }
}
