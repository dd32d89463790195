//! End-to-end checks on the bundled 9-bus and 30-bus case files.

use std::path::PathBuf;

use vuix_core::grid::{build_dc_jacobian, parse_case, GridError, MeasurementKind};
use vuix_core::stochastic::{sigma2_from_snr, snr_db_of, StateCovariance, SystemModel};
use vuix_core::vuix::closed_form_ranking;

fn case_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../cases")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"))
}

fn model_for(name: &str, snr_db: f64, rho: f64) -> SystemModel {
    let case = parse_case(&case_text(name)).unwrap();
    let jac = build_dc_jacobian(&case).unwrap();
    let cov = StateCovariance::toeplitz(jac.n(), rho).unwrap();
    let noise = sigma2_from_snr(jac.matrix(), &cov, snr_db).unwrap();
    SystemModel::from_jacobian(&jac, cov, noise).unwrap()
}

#[test]
fn case9_dimensions() {
    let case = parse_case(&case_text("case9.m")).unwrap();
    assert_eq!(case.buses.len(), 9);
    assert_eq!(case.branches.len(), 9);
    assert_eq!(case.in_service_branches().len(), 9);
    let jac = build_dc_jacobian(&case).unwrap();
    assert_eq!(jac.m(), 18);
    assert_eq!(jac.n(), 9);
    let flows = jac
        .descriptors()
        .iter()
        .filter(|d| d.kind.is_flow())
        .count();
    assert_eq!(flows, 9);
}

#[test]
fn case30_dimensions() {
    let case = parse_case(&case_text("case30.m")).unwrap();
    assert_eq!(case.buses.len(), 30);
    assert_eq!(case.branches.len(), 41);
    let jac = build_dc_jacobian(&case).unwrap();
    assert_eq!(jac.m(), 71);
    assert_eq!(jac.n(), 30);
}

#[test]
fn case9_model_round_trips_snr() {
    let case = parse_case(&case_text("case9.m")).unwrap();
    let jac = build_dc_jacobian(&case).unwrap();
    let cov = StateCovariance::toeplitz(jac.n(), 0.1).unwrap();
    for target in [0.0, 10.0, 30.0] {
        let noise = sigma2_from_snr(jac.matrix(), &cov, target).unwrap();
        let back = snr_db_of(jac.matrix(), &cov, noise.sigma2());
        assert!(
            (back - target).abs() <= 1e-9,
            "SNR {target} dB round-tripped to {back}"
        );
    }
}

#[test]
fn case9_most_vulnerable_is_an_injection() {
    let model = model_for("case9.m", 30.0, 0.1);
    let ranking = closed_form_ranking(&model);
    let first = ranking.order()[0];
    let last = *ranking.order().last().unwrap();
    let descriptors = model.descriptors().unwrap();
    assert!(
        matches!(descriptors[first].kind, MeasurementKind::Injection { .. }),
        "most vulnerable measurement should be an injection, got {:?}",
        descriptors[first].kind
    );
    assert!(
        descriptors[last].kind.is_flow(),
        "least vulnerable measurement should be a flow, got {:?}",
        descriptors[last].kind
    );
}

#[test]
fn case30_ranking_covers_all_measurements() {
    let model = model_for("case30.m", 30.0, 0.1);
    let ranking = closed_form_ranking(&model);
    assert_eq!(ranking.len(), 71);
    let mut order = ranking.order().to_vec();
    order.sort_unstable();
    assert_eq!(order, (0..71).collect::<Vec<_>>());
}

#[test]
fn malformed_files_produce_typed_errors() {
    // Not a case file at all.
    assert!(matches!(
        parse_case("hello world"),
        Err(GridError::Malformed(_))
    ));

    // Missing baseMVA.
    let no_base = "function mpc = broken\nmpc.bus = [\n1 3;\n2 1;\n];\nmpc.branch = [\n1 2 0 0.5 0 0 0 0 0 0 1;\n];\n";
    assert!(matches!(parse_case(no_base), Err(GridError::Malformed(_))));

    // Unknown bus type code.
    let bad_type = "function mpc = broken\nmpc.baseMVA = 100;\nmpc.bus = [\n1 7;\n2 1;\n];\nmpc.branch = [\n1 2 0 0.5 0 0 0 0 0 0 1;\n];\n";
    assert!(matches!(parse_case(bad_type), Err(GridError::Malformed(_))));

    // In-service branch with zero reactance.
    let zero_x = "function mpc = broken\nmpc.baseMVA = 100;\nmpc.bus = [\n1 3;\n2 1;\n];\nmpc.branch = [\n1 2 0 0.0 0 0 0 0 0 0 1;\n];\n";
    assert!(matches!(
        parse_case(zero_x),
        Err(GridError::NonpositiveReactance { index: 0, .. })
    ));

    // Self-loop.
    let self_loop = "function mpc = broken\nmpc.baseMVA = 100;\nmpc.bus = [\n1 3;\n2 1;\n];\nmpc.branch = [\n1 1 0 0.5 0 0 0 0 0 0 1;\n];\n";
    assert!(matches!(
        parse_case(self_loop),
        Err(GridError::InvalidTopology(_))
    ));

    // Branch endpoint that is not a bus.
    let ghost = "function mpc = broken\nmpc.baseMVA = 100;\nmpc.bus = [\n1 3;\n2 1;\n];\nmpc.branch = [\n1 5 0 0.5 0 0 0 0 0 0 1;\n];\n";
    assert!(matches!(
        parse_case(ghost),
        Err(GridError::InvalidTopology(_))
    ));

    // Duplicate bus ids.
    let dup = "function mpc = broken\nmpc.baseMVA = 100;\nmpc.bus = [\n1 3;\n1 1;\n];\nmpc.branch = [\n1 1 0 0.5 0 0 0 0 0 0 1;\n];\n";
    assert!(matches!(
        parse_case(dup),
        Err(GridError::InvalidTopology(_))
    ));
}
