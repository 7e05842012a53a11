// SPDX-License-Identifier: Apache-2.0

//! Photodetector sensitivity, laser power and maximum VDPE size.

use serde::Serialize;
use thiserror::Error;

use crate::archmodel::{Organization, PhotonicParams, DEFAULT_REAGGREGATION};
use crate::combswitch;
use crate::mapper::reconfig_group_count;
use crate::units::{db_to_ratio, dbm_to_watts, transmission, watts_to_dbm};

pub const PPD_SEARCH_MIN_W: f64 = 1e-12;
pub const PPD_SEARCH_MAX_W: f64 = 1.0;
pub const MAX_ITERATIONS: u32 = 200;
pub const RELATIVE_TOLERANCE: f64 = 1e-12;
/// Upper bound for the VDPE size search.
pub const MAX_SEARCH_N: u32 = 1 << 16;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinkError {
    #[error("sensitivity solver did not converge for {precision}-bit at {bit_rate_sps} S/s")]
    NoConvergence { precision: u32, bit_rate_sps: f64 },
    #[error("no received power reaches {precision}-bit at {bit_rate_sps} S/s")]
    NonPhysical { precision: u32, bit_rate_sps: f64 },
    #[error("invalid link-budget input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivitySolution {
    pub precision_bits: u32,
    pub bit_rate_sps: f64,
    pub p_pd_opt_w: f64,
    pub beta: f64,
}

impl SensitivitySolution {
    pub fn received_power_dbm(&self) -> f64 {
        watts_to_dbm(self.p_pd_opt_w)
    }
}

/// Noise current scale (A/√Hz) at received power `p_pd_w`.
pub fn noise_current_scale(p_pd_w: f64, params: &PhotonicParams) -> f64 {
    let r = params.responsivity;
    let rin = db_to_ratio(params.rin_db_per_hz);
    let shot = 2.0 * params.electron_charge * (r * p_pd_w + params.dark_current);
    let thermal = 4.0 * params.boltzmann * params.temperature / params.load_resistance;
    let rin_term = r * r * p_pd_w * p_pd_w * rin;
    (shot + thermal + rin_term).sqrt()
}

/// Effective number of bits delivered at received power `p_pd_w`.
pub fn effective_bits(p_pd_w: f64, bit_rate_sps: f64, params: &PhotonicParams) -> f64 {
    let beta = noise_current_scale(p_pd_w, params);
    let snr = params.responsivity * p_pd_w / (beta * (bit_rate_sps / 2f64.sqrt()).sqrt());
    (20.0 * snr.log10() - 1.76) / 6.02
}

/// Smallest received power giving `precision` effective bits.
///
/// Bisection on ln(P) over [1 pW, 1 W]; the upper endpoint of the final
/// bracket is returned so the precision target is always met.
pub fn solve_pd_sensitivity(
    precision: u32,
    bit_rate_sps: f64,
    params: &PhotonicParams,
) -> Result<SensitivitySolution, LinkError> {
    if !(1..=8).contains(&precision) {
        return Err(LinkError::InvalidInput(format!(
            "precision must be in 1..=8, got {precision}"
        )));
    }
    if !(bit_rate_sps > 0.0 && bit_rate_sps.is_finite()) {
        return Err(LinkError::InvalidInput(format!(
            "bit rate must be positive, got {bit_rate_sps}"
        )));
    }
    let target = precision as f64;
    let bits = |ln_p: f64| effective_bits(ln_p.exp(), bit_rate_sps, params);
    let mut lo = PPD_SEARCH_MIN_W.ln();
    let mut hi = PPD_SEARCH_MAX_W.ln();
    if bits(hi) < target {
        return Err(LinkError::NonPhysical {
            precision,
            bit_rate_sps,
        });
    }
    if bits(lo) >= target {
        // The root lies below the bracket.
        return Err(LinkError::NoConvergence {
            precision,
            bit_rate_sps,
        });
    }
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        if 1.0 - (lo - hi).exp() < RELATIVE_TOLERANCE {
            converged = true;
            break;
        }
        let mid = 0.5 * (lo + hi);
        if bits(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged {
        return Err(LinkError::NoConvergence {
            precision,
            bit_rate_sps,
        });
    }
    let p = hi.exp();
    Ok(SensitivitySolution {
        precision_bits: precision,
        bit_rate_sps,
        p_pd_opt_w: p,
        beta: noise_current_scale(p, params),
    })
}

/// Total loss of the chain between laser and detector, in dB, excluding the
/// wall-plug efficiency and the 1:M power split.
pub fn chain_loss_db(n: u32, m: u32, params: &PhotonicParams, extra_loss_db: f64) -> f64 {
    let n = n as f64;
    let m = m as f64;
    let length_mm = (n * params.d_mrr_um + params.d_element_um) / 1000.0;
    params.il_wg_db_per_mm * length_mm
        + params.il_smf_db
        + params.il_ec_db
        + params.il_mrm_db
        + params.il_mrr_db
        + (n - 1.0) * (params.obl_mrm_db + params.obl_mrr_db)
        + m.log2() * params.el_splitter_db
        + params.il_penalty_db
        + n * params.excess_loss_per_channel_db
        - params.calibration_credit_db
        + extra_loss_db
}

/// Laser optical power per wavelength (W) so that `p_pd_opt_w` reaches each
/// of the `m` detectors of a TPC with `n` wavelengths.
pub fn required_laser_power(n: u32, m: u32, p_pd_opt_w: f64, params: &PhotonicParams) -> f64 {
    required_laser_power_with_loss(n, m, p_pd_opt_w, params, 0.0)
}

pub fn required_laser_power_with_loss(
    n: u32,
    m: u32,
    p_pd_opt_w: f64,
    params: &PhotonicParams,
    extra_loss_db: f64,
) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    let wg = db_to_ratio(
        params.il_wg_db_per_mm * (nf * params.d_mrr_um + params.d_element_um) / 1000.0,
    );
    let through = transmission(params.il_smf_db)
        * transmission(params.il_ec_db)
        * transmission(params.il_mrm_db);
    let filter = params.wall_plug_eff * transmission(params.il_mrr_db);
    let passes_mrm = transmission(params.obl_mrm_db).powf(nf - 1.0)
        * transmission(params.el_splitter_db).powf(mf.log2());
    let passes_mrr = transmission(params.obl_mrr_db).powf(nf - 1.0)
        * transmission(params.il_penalty_db);
    let calibration =
        db_to_ratio(nf * params.excess_loss_per_channel_db - params.calibration_credit_db);
    wg * mf / through * p_pd_opt_w / filter / passes_mrm / passes_mrr
        * calibration
        * db_to_ratio(extra_loss_db)
}

/// Comb-switch insertion loss charged on the link when `n` wavelengths give
/// at least one comb-switch pair.
pub fn comb_switch_loss_db(org: Organization, bit_rate_gbps: u32, n: u32, x: u32) -> f64 {
    if org.is_reconfigurable() && reconfig_group_count(n, x) >= 1 {
        combswitch::insertion_loss_db(org, bit_rate_gbps).0
    } else {
        0.0
    }
}

/// Largest n ≥ 1 (with m = n) whose laser power fits the budget; 0 if none.
pub fn max_vdpe_size(
    org: Organization,
    precision: u32,
    bit_rate_gbps: u32,
    params: &PhotonicParams,
) -> Result<u32, LinkError> {
    max_vdpe_size_with_x(org, precision, bit_rate_gbps, DEFAULT_REAGGREGATION as u32, params)
}

pub fn max_vdpe_size_with_x(
    org: Organization,
    precision: u32,
    bit_rate_gbps: u32,
    x: u32,
    params: &PhotonicParams,
) -> Result<u32, LinkError> {
    let sol = match solve_pd_sensitivity(precision, bit_rate_gbps as f64 * 1e9, params) {
        Ok(s) => s,
        Err(LinkError::NonPhysical { .. }) => return Ok(0),
        Err(e) => return Err(e),
    };
    Ok(max_size_for_power(org, bit_rate_gbps, x, sol.p_pd_opt_w, params))
}

/// Returns whether `n` wavelengths fit the laser budget at received power `p_pd`.
pub fn fits_budget(
    org: Organization,
    bit_rate_gbps: u32,
    x: u32,
    n: u32,
    p_pd_opt_w: f64,
    params: &PhotonicParams,
) -> bool {
    let budget = dbm_to_watts(params.p_laser_dbm);
    let cs = comb_switch_loss_db(org, bit_rate_gbps, n, x);
    required_laser_power_with_loss(n, n, p_pd_opt_w, params, cs) <= budget
}

fn max_size_for_power(
    org: Organization,
    bit_rate_gbps: u32,
    x: u32,
    p_pd_opt_w: f64,
    params: &PhotonicParams,
) -> u32 {
    let fits = |n: u32| fits_budget(org, bit_rate_gbps, x, n, p_pd_opt_w, params);
    if !fits(1) {
        return 0;
    }
    let mut ok = 1u32;
    let mut bad = 2u32;
    while bad <= MAX_SEARCH_N && fits(bad) {
        ok = bad;
        bad *= 2;
    }
    if bad > MAX_SEARCH_N {
        return ok;
    }
    while bad - ok > 1 {
        let mid = ok + (bad - ok) / 2;
        if fits(mid) {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    ok
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalabilityPoint {
    pub organization: Organization,
    pub precision_bits: u32,
    pub bit_rate_gbps: u32,
    pub n_max: u32,
    /// `None` when no received power reaches the precision.
    pub received_power_dbm: Option<f64>,
}

pub fn scalability_sweep(
    org: Organization,
    precisions: &[u32],
    bit_rates_gbps: &[u32],
    params: &PhotonicParams,
) -> Result<Vec<ScalabilityPoint>, LinkError> {
    if precisions.is_empty() || bit_rates_gbps.is_empty() {
        return Err(LinkError::InvalidInput(
            "sweep needs at least one precision and one bit rate".into(),
        ));
    }
    let x = DEFAULT_REAGGREGATION as u32;
    let mut out = Vec::with_capacity(precisions.len() * bit_rates_gbps.len());
    for &precision in precisions {
        for &br in bit_rates_gbps {
            if br == 0 {
                return Err(LinkError::InvalidInput("bit rate must be positive".into()));
            }
            let point = match solve_pd_sensitivity(precision, br as f64 * 1e9, params) {
                Ok(sol) => ScalabilityPoint {
                    organization: org,
                    precision_bits: precision,
                    bit_rate_gbps: br,
                    n_max: max_size_for_power(org, br, x, sol.p_pd_opt_w, params),
                    received_power_dbm: Some(sol.received_power_dbm()),
                },
                Err(LinkError::NonPhysical { .. }) => ScalabilityPoint {
                    organization: org,
                    precision_bits: precision,
                    bit_rate_gbps: br,
                    n_max: 0,
                    received_power_dbm: None,
                },
                Err(e) => return Err(e),
            };
            out.push(point);
        }
    }
    Ok(out)
}

pub const SCALABILITY_COLUMNS: [&str; 5] = [
    "organization",
    "precision_bits",
    "bit_rate_gbps",
    "n_max",
    "received_power_dbm",
];

/// CSV form of a sweep. Unreachable points leave the power column empty.
pub fn scalability_csv(points: &[ScalabilityPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCALABILITY_COLUMNS).expect("in-memory write");
    for p in points {
        let power = p
            .received_power_dbm
            .map(|v| format!("{v:.4}"))
            .unwrap_or_default();
        w.write_record([
            p.organization.as_str().to_string(),
            p.precision_bits.to_string(),
            p.bit_rate_gbps.to_string(),
            p.n_max.to_string(),
            power,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
