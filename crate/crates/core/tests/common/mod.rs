// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use ndarray::Array2;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ringsim_core::cnnworkload::DkvMatrix;
use ringsim_core::mapper::{functional_eval, plan_mapping_on, Case, DivValues, MappingPolicy, ReconfigurableVdpe};

/// One randomized mapping instance with integer values.
pub struct Instance {
    pub h: u32,
    pub s: u32,
    pub n: u32,
    pub vdpes: u32,
    pub divs: u64,
    pub matched: bool,
    pub kernels: Array2<i64>,
    pub div_values: DivValues,
}

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Array2<i64> {
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-9..=9))
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = rng.gen_range(1..=64);
    let n = rng.gen_range(9..=44);
    let h = rng.gen_range(1..=8);
    let vdpes = rng.gen_range(1..=4);
    let divs = rng.gen_range(1..=3);
    let matched = rng.gen_bool(0.3);
    let kernels = random_matrix(&mut rng, h as usize, s as usize);
    let div_values = if matched {
        DivValues::PerChannel(
            (0..h)
                .map(|_| random_matrix(&mut rng, divs as usize, s as usize))
                .collect(),
        )
    } else {
        DivValues::Shared(random_matrix(&mut rng, divs as usize, s as usize))
    };
    Instance {
        h,
        s,
        n,
        vdpes,
        divs,
        matched,
        kernels,
        div_values,
    }
}

/// Direct dot products, one per (div, row).
pub fn direct_product(kernels: &Array2<i64>, divs: &DivValues, div_count: usize) -> Array2<i64> {
    let (h, s) = kernels.dim();
    Array2::from_shape_fn((div_count, h), |(i, r)| {
        let d = match divs {
            DivValues::Shared(m) => m,
            DivValues::PerChannel(v) => &v[r],
        };
        (0..s).map(|t| d[[i, t]] * kernels[[r, t]]).sum()
    })
}

/// Schedules and evaluates an instance; returns (case, result, oracle).
pub fn run_instance(inst: &Instance) -> (Case, Array2<i64>, Array2<i64>) {
    let vdpe = ReconfigurableVdpe::new(inst.n, 9);
    let mut m = DkvMatrix::new(inst.h, inst.s, inst.divs);
    if inst.matched {
        m = m.channel_matched();
    }
    let sched = plan_mapping_on(&m, &vdpe, inst.vdpes, MappingPolicy::Adaptive).unwrap();
    let got = functional_eval(&sched, &inst.kernels, &inst.div_values).unwrap();
    let want = direct_product(&inst.kernels, &inst.div_values, inst.divs as usize);
    (sched.plan().case, got, want)
}

/// Direct standard convolution, stride 1, no padding.
/// `input` is [c][y][x], `weights` is [f][c][ky][kx]; returns [f][y][x].
pub fn direct_conv(
    input: &[Vec<Vec<i64>>],
    weights: &[Vec<Vec<Vec<i64>>>],
) -> Vec<Vec<Vec<i64>>> {
    let c = input.len();
    let (ih, iw) = (input[0].len(), input[0][0].len());
    let k = weights[0][0].len();
    let (oh, ow) = (ih - k + 1, iw - k + 1);
    weights
        .iter()
        .map(|w| {
            (0..oh)
                .map(|oy| {
                    (0..ow)
                        .map(|ox| {
                            let mut acc = 0;
                            for ch in 0..c {
                                for ky in 0..k {
                                    for kx in 0..k {
                                        acc += w[ch][ky][kx] * input[ch][oy + ky][ox + kx];
                                    }
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}
