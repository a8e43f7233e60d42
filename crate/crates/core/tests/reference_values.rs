//! Bundled 6-bus network against frozen high-precision reference values
//! (see `oracles/six_bus_oracle.py`).

use faultloc_core::{beta_coefficient, build_ybus, equivalent_injections, fixtures, C64};
use serde::Deserialize;

#[derive(Deserialize)]
struct Expected {
    bus_ids: Vec<i64>,
    ybus: Vec<Vec<[f64; 2]>>,
    zbus: Vec<Vec<[f64; 2]>>,
    beta: std::collections::HashMap<String, Vec<[f64; 2]>>,
    fault_current: [f64; 2],
    injections: Vec<Injection>,
}

#[derive(Deserialize)]
struct Injection {
    line: String,
    x: f64,
    from: [f64; 2],
    to: [f64; 2],
}

fn expected() -> Expected {
    serde_json::from_str(include_str!("oracles/six_bus_expected.json")).unwrap()
}

fn c(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn assert_close(got: C64, want: C64, rel: f64, scale: f64, what: &str) {
    assert!(
        (got - want).norm() <= rel * scale,
        "{what}: got {got}, want {want} (scale {scale:e})"
    );
}

#[test]
fn ybus_matches_reference_assembly() {
    let want = expected();
    let bench = fixtures::six_bus().unwrap();
    let ids: Vec<i64> = (0..6).map(|k| bench.network.bus_id(k)).collect();
    assert_eq!(ids, want.bus_ids);
    let y = build_ybus(&bench.network).unwrap();
    let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for p in 0..6 {
        for q in 0..6 {
            assert_close(
                y[(p, q)],
                c(want.ybus[p][q]),
                1e-13,
                scale,
                &format!("Y[{p}][{q}]"),
            );
        }
    }
}

#[test]
fn zbus_matches_reference_inverse() {
    let want = expected();
    let bench = fixtures::six_bus().unwrap();
    let scale = bench
        .zbus
        .matrix()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    for p in 0..6 {
        for q in 0..6 {
            assert_close(
                bench.zbus.get(p, q),
                c(want.zbus[p][q]),
                1e-10,
                scale,
                &format!("Z[{p}][{q}]"),
            );
        }
    }
}

#[test]
fn every_beta_matches_direct_evaluation() {
    let want = expected();
    let bench = fixtures::six_bus().unwrap();
    for line in bench.network.lines() {
        let row = &want.beta[&line.id];
        let scale = row.iter().map(|p| c(*p).norm()).fold(0.0, f64::max);
        for (k, p) in row.iter().enumerate() {
            let bus = bench.network.bus_id(k);
            let got = beta_coefficient(&bench.network, &bench.zbus, line, bus).unwrap();
            assert_close(
                got,
                c(*p),
                1e-10,
                scale,
                &format!("beta[{}][{bus}]", line.id),
            );
        }
    }
}

#[test]
fn sensing_rows_follow_the_sensor_order() {
    let want = expected();
    let bench = fixtures::six_bus().unwrap();
    for (m, id) in bench.sensing.row_line_ids.iter().enumerate() {
        let row = &want.beta[id];
        let scale = row.iter().map(|p| c(*p).norm()).fold(0.0, f64::max);
        for (k, &want) in row.iter().enumerate() {
            assert_close(bench.sensing.complex[(m, k)], c(want), 1e-10, scale, id);
        }
    }
}

#[test]
fn equivalent_injections_match_reference() {
    let want = expected();
    let bench = fixtures::six_bus().unwrap();
    let fault = c(want.fault_current);
    for case in &want.injections {
        let line = bench.network.line(&case.line).unwrap();
        let (a, b) = equivalent_injections(line, case.x, fault).unwrap();
        assert_close(a, c(case.from), 1e-13, fault.norm(), &case.line);
        assert_close(b, c(case.to), 1e-13, fault.norm(), &case.line);
    }
}
