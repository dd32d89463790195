//! Vulnerability analysis of power-system measurements against additive
//! Gaussian data-integrity attacks.
//!
//! The pipeline has four stages, one module each:
//!
//! 1. [`grid`] — parse a grid case (MATPOWER `.m` or JSON) and build the DC
//!    state-estimation Jacobian `H`: one power-flow row per in-service
//!    branch, one power-injection row per bus.
//! 2. [`stochastic`] — wrap `H` in a Gaussian observation model
//!    `Y = H X + Z` with Toeplitz-correlated states and white noise sized
//!    from a target SNR; precompute the observation covariance
//!    `S_yy = H S_xx H^T + sigma2 I` and its inverse.
//! 3. [`attack`] — evaluate attacks `Y_a = Y + A`: the mutual information
//!    still available to the operator, the KL divergence that exposes the
//!    attacker, the weighted cost `I + lambda D`, and the closed-form
//!    optimal attack constructions.
//! 4. [`vuix`] — rank measurements by the cost change `delta` of probing
//!    each one (the VuIx), in closed form for a clean slate or by seeded,
//!    deterministic Monte Carlo against random existing attacks.
//!
//! All information quantities are in nats. Measurement and bus indices are
//! zero-based throughout the library; command-line layers present 1-based
//! ids.
//!
//! ```
//! use vuix_core::grid::{parse_case, build_dc_jacobian};
//! use vuix_core::stochastic::{sigma2_from_snr, StateCovariance, SystemModel};
//! use vuix_core::vuix::closed_form_ranking;
//!
//! let case = parse_case(r#"{
//!     "name": "toy", "base_mva": 100.0,
//!     "buses": [{"id": 1, "type": "REF"}, {"id": 2, "type": "PQ"}],
//!     "branches": [{"from": 1, "to": 2, "x": 0.5}]
//! }"#)?;
//! let jac = build_dc_jacobian(&case)?;
//! let states = StateCovariance::toeplitz(jac.n(), 0.1)?;
//! let noise = sigma2_from_snr(jac.matrix(), &states, 30.0)?;
//! let model = SystemModel::from_jacobian(&jac, states, noise)?;
//! let ranking = closed_form_ranking(&model);
//! assert_eq!(ranking.len(), 3); // one flow + two injections
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod attack;
pub mod grid;
mod linalg;
pub mod stochastic;
pub mod vuix;

pub use attack::{
    kl_divergence, mutual_information, optimal_gaussian_attack, single_sensor_attack,
    AttackCovariance, AttackError, CostParams, ExistingAttackState, SparseAttack,
};
pub use grid::{
    build_dc_jacobian, build_dc_jacobian_reduced, parse_case, GridCase, GridError, JacobianMatrix,
    MeasurementDescriptor, MeasurementKind,
};
pub use stochastic::{
    sigma2_from_snr, snr_db_of, ModelError, NoiseModel, StateCovariance, SystemModel,
};
pub use vuix::{
    closed_form_ranking, monte_carlo_vuix, most_vulnerable, vuix_ranking, MonteCarloReport,
    VuIxRanking, VuixError, VulnerabilityScore,
};
