// SPDX-License-Identifier: Apache-2.0

//! dB and linear-unit conversions.
//!
//! All internal arithmetic is done on linear quantities (watts, power
//! ratios). Losses given in dB are converted with `10^(dB/10)` exactly once
//! at the boundary.

/// Power ratio for a gain expressed in dB.
pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Linear transmission (≤ 1 for non-negative loss) of a loss given in dB.
pub fn transmission(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * db_to_ratio(dbm)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    ratio_to_db(watts / 1e-3)
}
