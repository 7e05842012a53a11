// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ringsim_core::archmodel::{default_params, validate_config, ArchConfig, Organization};
use ringsim_core::bundled;
use ringsim_core::cnnworkload::{decompose_for_timing, dsc_costs, reduction_factors, sc_costs, DkvMatrix, LayerKind, LayerSpec};
use ringsim_core::combswitch::{calibrated_group_index, design, tabulated, DesignOptions, TABULATED};
use ringsim_core::comparison::{compare, published_count, CompareSpec};
use ringsim_core::linkbudget::max_vdpe_size;
use ringsim_core::mapper::{plan_mapping_on, plan_summary_on, utilization, Case, MappingPolicy, Mode, ReconfigurableVdpe};

const BIT_RATES: [u32; 4] = [1, 3, 5, 10];
const SIZE_TOL: u32 = 1;
const C1_RUNTIME: Duration = Duration::from_secs(5);
const FRONTIER_TOL: u32 = 2;
const RADIUS_TOL: f64 = 0.02;
const ORACLE_CASES: u64 = 1000;
const C4_RUNTIME: Duration = Duration::from_secs(60);
const COUNT_TOL: f64 = 0.05;
const UTIL_EPS: f64 = 1e-12;

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn c1_table_sizes() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let table = [
        (Organization::Mam, [44, 28, 22, 16]),
        (Organization::Amm, [31, 20, 16, 12]),
        (Organization::Rmam, [43, 27, 22, 16]),
        (Organization::Ramm, [31, 20, 16, 12]),
    ];
    for (org, want) in table {
        let p = default_params(org);
        let got: Vec<u32> = BIT_RATES
            .iter()
            .map(|&br| max_vdpe_size(org, 4, br, &p).unwrap_or(0))
            .collect();
        for ((&br, &g), w) in BIT_RATES.iter().zip(&got).zip(want) {
            o.check(g.abs_diff(w) <= SIZE_TOL, format!("{org}@{br}G n={g} want {w}"));
        }
        o.note(format!("{org} {got:?}"));
    }
    let t = start.elapsed();
    o.check(t < C1_RUNTIME, format!("runtime {t:?}"));
    o.note(format!("{:.3}s", t.as_secs_f64()));
    o
}

fn c2_frontier() -> Outcome {
    let mut o = Outcome::new();
    for (org, want) in [(Organization::Mam, 159), (Organization::Amm, 99)] {
        let p = default_params(org);
        let best = BIT_RATES
            .iter()
            .map(|&br| max_vdpe_size(org, 1, br, &p).unwrap_or(0))
            .max()
            .unwrap();
        o.check(best.abs_diff(want) <= FRONTIER_TOL, format!("{org} 1-bit n={best} want {want}"));
        o.note(format!("{org} 1-bit {best}"));
    }
    for org in Organization::ALL {
        let p = default_params(org);
        let grid: Vec<Vec<u32>> = (1..=8)
            .map(|bits| {
                BIT_RATES
                    .iter()
                    .map(|&br| max_vdpe_size(org, bits, br, &p).unwrap_or(0))
                    .collect()
            })
            .collect();
        for b in 0..8 {
            for r in 0..BIT_RATES.len() {
                if b + 1 < 8 {
                    o.check(grid[b + 1][r] <= grid[b][r], format!("{org} rises with precision at {} bits", b + 2));
                }
                if r + 1 < BIT_RATES.len() {
                    o.check(grid[b][r + 1] <= grid[b][r], format!("{org} rises with bit rate at {} bits", b + 1));
                }
            }
        }
    }
    o
}

fn c3_comb_switch() -> Outcome {
    let mut o = Outcome::new();
    let opts = DesignOptions::default();
    let pairs = [
        (Organization::Rmam, [4, 3, 2]),
        (Organization::Ramm, [3, 2, 0]),
    ];
    for (org, want) in pairs {
        for (br, w) in [1, 3, 5].into_iter().zip(want) {
            let row = tabulated(org, br).expect("tabulated row");
            let d = design(row.n, 9, org, br, &opts);
            o.check(d.pairs == w, format!("{org}@{br}G pairs {} want {w}", d.pairs));
        }
    }
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for row in TABULATED.iter().filter(|r| r.pairs > 0) {
        let d = design(row.n, 9, row.organization, row.bit_rate_gbps, &opts);
        let want = row.radius_um.expect("populated row has a radius");
        let err = d.radius_um.map_or(f64::INFINITY, |r| (r / want - 1.0).abs());
        worst = worst.max(err);
        count += 1;
        o.check(err < RADIUS_TOL, format!("{}@{}G radius off by {:.2}%", row.organization, row.bit_rate_gbps, 100.0 * err));
    }
    o.check(count == 5, format!("{count} radii checked"));
    o.note(format!("n_g={:.4} worst radius error {:.2}%", calibrated_group_index(), 100.0 * worst));
    o
}

fn c4_oracle() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut seen: Vec<(Case, bool)> = Vec::new();
    let mut mismatches = 0;
    for seed in 0..ORACLE_CASES {
        let inst = common::random_instance(seed);
        let (case, got, want) = common::run_instance(&inst);
        if got != want {
            mismatches += 1;
        }
        if !seen.contains(&(case, inst.matched)) {
            seen.push((case, inst.matched));
        }
    }
    o.check(mismatches == 0, format!("{mismatches} mismatches"));
    for case in [Case::Case1, Case::Case2, Case::Case3, Case::ExactFit] {
        o.check(seen.iter().any(|(c, _)| *c == case), format!("{case:?} not covered"));
    }
    for case in [Case::Case1, Case::Case2, Case::Case3] {
        o.check(seen.contains(&(case, true)), format!("{case:?} channel-matched not covered"));
    }
    let t = start.elapsed();
    o.check(t < C4_RUNTIME, format!("runtime {t:?}"));
    o.note(format!("{ORACLE_CASES} instances in {:.3}s", t.as_secs_f64()));
    o
}

fn c5_schedules() -> Outcome {
    let mut o = Outcome::new();
    let v = ReconfigurableVdpe::new(20, 9);
    let run = |h, s, vd| plan_mapping_on(&DkvMatrix::new(h, s, 1), &v, vd, MappingPolicy::Adaptive).unwrap();
    let lens = |p: &ringsim_core::mapper::Pass| p.assignments.iter().map(|a| (a.row, a.len)).collect::<Vec<_>>();

    let a = run(1, 32, 2);
    o.check(a.plan().case == Case::Case1, "S=32 not Case1");
    o.check(a.plan().slice_lengths == vec![20, 12], format!("S=32 slices {:?}", a.plan().slice_lengths));
    o.check(a.passes().len() == 1 && a.vdpes_used() == 2, "S=32 not one pass on two VDPEs");
    o.check(a.reductions()[0].partials.len() == 2, "S=32 psums");

    let b = run(2, 16, 1);
    o.check(b.plan().mode == Mode::Mode2 && b.plan().case == Case::Case2, "S=16 not Case2");
    o.check(b.passes().len() == 2, format!("S=16 {} passes", b.passes().len()));
    if b.passes().len() == 2 {
        o.check(lens(&b.passes()[0]) == vec![(0, 9), (1, 9)], "S=16 pass 1");
        o.check(lens(&b.passes()[1]) == vec![(0, 7), (1, 7)], "S=16 pass 2");
    }

    let c = run(2, 8, 1);
    o.check(c.plan().case == Case::Case3, "S=8 not Case3");
    o.check(c.passes().len() == 1 && lens(&c.passes()[0]) == vec![(0, 8), (1, 8)], "S=8 not one pass of two rows");
    o
}

fn c6_utilization() -> Outcome {
    let mut o = Outcome::new();
    let u = |vdpe: ReconfigurableVdpe, h| {
        let s = plan_mapping_on(&DkvMatrix::new(h, 9, 1), &vdpe, 1, MappingPolicy::Adaptive).unwrap();
        utilization(&s, vdpe.n).mean
    };
    let vals = [
        ("RMAM", u(ReconfigurableVdpe::new(43, 9), 4), 36.0 / 43.0),
        ("RAMM", u(ReconfigurableVdpe::new(31, 9), 3), 27.0 / 31.0),
        ("MAM", u(ReconfigurableVdpe::fixed(44), 1), 9.0 / 44.0),
        ("AMM", u(ReconfigurableVdpe::fixed(31), 1), 9.0 / 31.0),
    ];
    for (name, got, want) in vals {
        o.check(got == want, format!("{name} S=9 utilization {got} want {want}"));
    }
    o.check(vals[0].1 > vals[2].1 && vals[1].1 > vals[3].1, "reconfigurable not above fixed at S=9");

    let table = bundled::get("efficientnet_b7_shapes").unwrap();
    let mut compared = 0;
    for br in [1, 3, 5] {
        for (r, f) in [(Organization::Rmam, Organization::Mam), (Organization::Ramm, Organization::Amm)] {
            let ar = validate_config(&ArchConfig::new(r, br, 4)).unwrap();
            let af = validate_config(&ArchConfig::new(f, br, 4)).unwrap();
            let (vr, vf) = (ReconfigurableVdpe::for_arch(&ar), ReconfigurableVdpe::for_arch(&af));
            for layer in &table.layers {
                let m = decompose_for_timing(layer);
                if m.s >= vr.n.min(vf.n) {
                    continue;
                }
                let ur = plan_summary_on(&m, &vr, 512, MappingPolicy::Adaptive).unwrap().mean_utilization;
                let uf = plan_summary_on(&m, &vf, 512, MappingPolicy::Adaptive).unwrap().mean_utilization;
                compared += 1;
                o.check(ur >= uf - UTIL_EPS, format!("{r} vs {f} @{br}G S={}: {ur:.4} < {uf:.4}", m.s));
            }
        }
    }
    o.note(format!("{compared} shape comparisons"));
    o
}

fn dsc_compare() -> ringsim_core::comparison::CompareReport {
    compare(&CompareSpec::default(), &bundled::dsc_heavy()).expect("comparison runs")
}

fn c7_counts(report: &ringsim_core::comparison::CompareReport) -> Outcome {
    let mut o = Outcome::new();
    for row in &report.counts {
        let Some(want) = published_count(row.organization, row.bit_rate_gbps) else {
            continue;
        };
        let err = row.total_vdpes as f64 / want as f64 - 1.0;
        o.check(
            err.abs() <= COUNT_TOL,
            format!("{}@{}G {} vs {want} ({:+.1}%)", row.organization, row.bit_rate_gbps, row.total_vdpes, 100.0 * err),
        );
    }
    o
}

fn c8_system(report: &ringsim_core::comparison::CompareReport) -> Outcome {
    use Organization::*;
    let mut o = Outcome::new();
    for w in bundled::dsc_heavy() {
        let r = |org, br| report.report(&w.name, org, br).expect("simulated");
        let name = &w.name;
        o.check(r(Rmam, 1).fps > r(Mam, 1).fps, format!("{name}: fps RMAM <= MAM @1G"));
        o.check(r(Ramm, 1).fps > r(Amm, 1).fps, format!("{name}: fps RAMM <= AMM @1G"));
        o.check(r(Ramm, 5).fps == r(Amm, 5).fps, format!("{name}: fps RAMM != AMM @5G"));
        o.check(r(Ramm, 5).fps_per_watt == r(Amm, 5).fps_per_watt, format!("{name}: fps/W RAMM != AMM @5G"));
        for br in [3, 5] {
            o.check(
                r(Rmam, 1).fps > r(Rmam, br).fps,
                format!("{name}: RMAM fps @1G {:.1} <= @{br}G {:.1}", r(Rmam, 1).fps, r(Rmam, br).fps),
            );
        }
    }
    for ratio in &report.ratios {
        let band = ratio.within_band();
        o.note(format!("{} {:.3} (published {})", ratio.label, ratio.achieved, ratio.published));
        if band == Some(false) {
            let (lo, hi) = ratio.band.unwrap();
            o.check(false, format!("{} {:.3} outside [{lo}, {hi}]", ratio.label, ratio.achieved));
        }
    }
    o
}

fn c9_costs() -> Outcome {
    let mut o = Outcome::new();
    for k in 1..=7u32 {
        for f in 1..=1024u32 {
            let (rw, ro) = reduction_factors(k, f);
            let want = 1.0 / f as f64 + 1.0 / (k * k) as f64;
            o.check(rw == want && ro == want, format!("R(K={k}, F={f})"));
            if f % 64 == 1 {
                let dc = LayerSpec::new("dc", LayerKind::DC, k, 16, 1, 5, 5).unwrap();
                let sc = LayerSpec::new("sc", LayerKind::SC, k, 16, f, 5, 5).unwrap();
                let (d, s) = (dsc_costs(&dc, f).unwrap(), sc_costs(&sc).unwrap());
                let ratio_w = d.w as f64 / s.w as f64;
                let ratio_o = d.o as f64 / s.o as f64;
                o.check((ratio_w - want).abs() < 1e-12 && (ratio_o - want).abs() < 1e-12, format!("dsc/sc K={k} F={f}"));
            }
        }
    }
    let s_column = [
        9, 25, 8, 12, 16, 20, 32, 40, 48, 56, 64, 80, 96, 160, 192, 224, 288, 384, 480, 640, 960, 1344, 2304, 3840, 27, 2560,
    ];
    let table = bundled::get("efficientnet_b7_shapes").unwrap();
    let got: Vec<u32> = table.layers.iter().map(|l| l.s()).collect();
    o.check(got == s_column, format!("S column {got:?}"));
    o
}

fn main() -> ExitCode {
    let report = dsc_compare();
    let criteria: Vec<(u32, &str, Outcome)> = vec![
        (1, "VDPE size limits", c1_table_sizes()),
        (2, "scalability frontier", c2_frontier()),
        (3, "comb-switch design", c3_comb_switch()),
        (4, "mapping oracle", c4_oracle()),
        (5, "worked schedules", c5_schedules()),
        (6, "utilization", c6_utilization()),
        (7, "area-matched counts", c7_counts(&report)),
        (8, "system directions", c8_system(&report)),
        (9, "cost formulas", c9_costs()),
    ];
    let mut failed = 0;
    for (id, name, out) in &criteria {
        let ok = out.failures.is_empty();
        if !ok {
            failed += 1;
        }
        let mut detail = out.notes.join("; ");
        if !ok {
            if !detail.is_empty() {
                detail.push_str(" | ");
            }
            detail.push_str(&out.failures.join("; "));
        }
        println!("criterion {id}: {} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
