// SPDX-License-Identifier: Apache-2.0

use ringsim_core::archmodel::*;

fn cfg(org: Organization, br: u32, bits: u32, n: i64) -> ArchConfig {
    ArchConfig::new(org, br, bits).with_n(n)
}

#[test]
fn accepts_link_budget_sizes() {
    let v = validate_config(&cfg(Organization::Mam, 1, 4, 44)).unwrap();
    assert_eq!((v.n(), v.m(), v.x(), v.y()), (44, 44, 9, 0));
    let v = validate_config(&cfg(Organization::Amm, 5, 4, 16)).unwrap();
    assert!(!v.reconfiguration_enabled());
    assert_eq!(v.y(), 0);
}

#[test]
fn rejects_oversized_vdpe() {
    let err = validate_config(&cfg(Organization::Mam, 1, 4, 45)).unwrap_err();
    assert_eq!(err.violations(), &[Violation::InvalidN { n: 45, max: 44 }]);
}

#[test]
fn tabulated_sizes_accept_n_and_reject_above() {
    let table = [
        (Organization::Mam, [44, 28, 22, 16]),
        (Organization::Amm, [31, 20, 16, 12]),
    ];
    for (org, sizes) in table {
        for (br, n) in [1, 3, 5, 10].into_iter().zip(sizes) {
            assert!(validate_config(&cfg(org, br, 4, n)).is_ok(), "{org} {br} {n}");
            for extra in 1..=5 {
                let e = validate_config(&cfg(org, br, 4, n + extra)).unwrap_err();
                assert!(matches!(e.violations()[0], Violation::InvalidN { .. }));
            }
        }
    }
}

#[test]
fn fixed_organizations_never_reconfigure() {
    for org in [Organization::Mam, Organization::Amm] {
        let v = validate_config(&ArchConfig::new(org, 1, 4)).unwrap();
        assert_eq!(v.y(), 0);
        assert!(!v.reconfiguration_enabled());
    }
    let v = validate_config(&ArchConfig::new(Organization::Rmam, 1, 4)).unwrap();
    assert_eq!((v.n(), v.y()), (43, 4));
    assert!(v.reconfiguration_enabled());
}

#[test]
fn reports_every_violation() {
    let text = r#"{"organization":"MAM","bit_rate_gbps":7,"precision_bits":9,
                   "n":0,"m":-1,"x":0,"tiles":1}"#;
    let c = ArchConfig::from_json(text).unwrap();
    let err = validate_config(&c).unwrap_err();
    let v = err.violations();
    assert!(v.contains(&Violation::InvalidEnum {
        field: "bit_rate_gbps".into(),
        value: "7".into()
    }));
    assert!(v.contains(&Violation::InvalidEnum {
        field: "precision_bits".into(),
        value: "9".into()
    }));
    for field in ["n", "m", "x"] {
        assert!(
            v.iter().any(|e| matches!(e, Violation::NonPositiveDimension { field: f, .. } if f == field)),
            "{field}"
        );
    }
}

#[test]
fn unknown_keys_are_errors() {
    let text = r#"{"organization":"MAM","bit_rate_gbps":1,"precision_bits":4,"tiles":1,"speed":3}"#;
    assert!(matches!(ArchConfig::from_json(text), Err(ConfigError::Parse(_))));
    let text = r#"{"organization":"MAM","bit_rate_gbps":1,"precision_bits":4,"tiles":1,
                   "params":{"il_ec_dbx":1.0}}"#;
    let c = ArchConfig::from_json(text).unwrap();
    assert!(matches!(
        validate_config(&c).unwrap_err().violations()[0],
        Violation::InvalidParam { .. }
    ));
    let text = r#"{"organization":"XAM","bit_rate_gbps":1,"precision_bits":4,"tiles":1}"#;
    assert!(ArchConfig::from_json(text).is_err());
}

#[test]
fn defaults_and_auto_size() {
    let text = r#"{"organization":"RAMM","bit_rate_gbps":3,"precision_bits":4,"n":"auto","tiles":2}"#;
    let v = validate_config(&ArchConfig::from_json(text).unwrap()).unwrap();
    assert_eq!((v.n(), v.m(), v.x(), v.tpcs_per_tile()), (20, 20, 9, 4));
    assert_eq!(v.total_vdpes(), 2 * 4 * 20);
    assert!(!v.total_overridden());
}

#[test]
fn param_overrides_change_limits() {
    let mut over = serde_json::Map::new();
    over.insert("p_laser_dbm".into(), serde_json::Value::from(13.0));
    let v = validate_config(&ArchConfig::new(Organization::Mam, 1, 4).with_params(over)).unwrap();
    assert!(v.n() > 44);
    assert_eq!(v.params().p_laser_dbm, 13.0);
}

#[test]
fn serialization_round_trip_is_stable() {
    let configs = [
        ArchConfig::new(Organization::Rmam, 1, 4),
        ArchConfig::new(Organization::Amm, 5, 4).with_n(12).with_m(6).with_tiles(3),
        ArchConfig::new(Organization::Ramm, 3, 4).with_total_vdpes(576),
    ];
    for c in configs {
        let v = validate_config(&c).unwrap();
        let text = v.to_json();
        let again = validate_config(&ArchConfig::from_json(&text).unwrap()).unwrap();
        assert_eq!(again, v);
        assert_eq!(again.to_json(), text);
    }
}

#[test]
fn missing_topology_is_reported() {
    let text = r#"{"organization":"MAM","bit_rate_gbps":1,"precision_bits":4}"#;
    let err = validate_config(&ArchConfig::from_json(text).unwrap()).unwrap_err();
    assert_eq!(
        err.violations(),
        &[Violation::MissingField {
            field: "tiles".into()
        }]
    );
}

#[test]
fn resize_keeps_everything_else() {
    let v = validate_config(&ArchConfig::new(Organization::Mam, 1, 4)).unwrap();
    let r = v.with_total_vdpes(568);
    assert_eq!(r.total_vdpes(), 568);
    assert_eq!(r.tpcs(), 13);
    assert_eq!(r.tiles(), 4);
    assert_eq!((r.n(), r.params()), (v.n(), v.params()));
}
