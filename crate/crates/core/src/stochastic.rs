//! Gaussian observation model for DC state estimation.
//!
//! States (bus voltage angles) are modeled as a zero-mean multivariate
//! Gaussian with an exponentially decaying correlation structure, observed
//! through the measurement matrix `H` under additive white Gaussian noise:
//!
//! ```text
//! Y = H X + Z,   X ~ N(0, S_xx),   Z ~ N(0, sigma2 * I),
//! ```
//!
//! giving observation covariance `S_yy = H S_xx H^T + sigma2 * I`. The noise
//! level is usually fixed indirectly through a signal-to-noise ratio in dB:
//! `SNR = 10 log10( tr(H S_xx H^T) / (m * sigma2) )`.

use nalgebra::{Cholesky, DMatrix};
use thiserror::Error;

use crate::grid::{JacobianMatrix, MeasurementDescriptor};
use crate::linalg::{logdet_from_cholesky, signal_trace};

/// Relative floor for the smallest eigenvalue when accepting a matrix as
/// positive semidefinite.
const PSD_EIGENVALUE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// Correlation coefficient outside `[0, 1)`.
    #[error("rho must lie in [0, 1), got {0}")]
    InvalidRho(f64),
    /// `tr(H S_xx H^T)` is not strictly positive, so no noise level can
    /// realize a finite SNR.
    #[error("signal trace tr(H Sxx H^T) must be positive, got {0}")]
    DegenerateSignal(f64),
    #[error("noise variance must be strictly positive, got {0}")]
    NonpositiveNoise(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),
    /// The observation covariance failed to factorize. With positive noise
    /// variance this indicates an internal numerical failure.
    #[error("observation covariance is not positive definite")]
    NotPositiveDefinite,
}

/// Covariance of the state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCovariance {
    matrix: DMatrix<f64>,
    rho: Option<f64>,
}

impl StateCovariance {
    /// Exponential-decay (Toeplitz) correlation: entry `(i, j)` equals
    /// `rho^|i - j|`. Requires `0 <= rho < 1`; `rho = 0` yields the identity.
    ///
    /// ```
    /// let c = vuix_core::StateCovariance::toeplitz(3, 0.1).unwrap();
    /// assert_eq!(c.matrix()[(0, 2)], 0.010000000000000002);
    /// assert_eq!(c.matrix()[(2, 1)], 0.1);
    /// ```
    pub fn toeplitz(n: usize, rho: f64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::DimensionMismatch(
                "state dimension must be at least 1".into(),
            ));
        }
        if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
            return Err(ModelError::InvalidRho(rho));
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            let d = i.abs_diff(j) as i32;
            rho.powi(d)
        });
        Ok(StateCovariance {
            matrix,
            rho: Some(rho),
        })
    }

    /// Wraps an arbitrary symmetric positive-semidefinite matrix. Symmetry
    /// is required up to round-off and the smallest eigenvalue may not fall
    /// below `-1e-10` times the largest.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self, ModelError> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(ModelError::DimensionMismatch(format!(
                "state covariance must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-9 * scale {
            return Err(ModelError::NotPositiveSemidefinite(format!(
                "asymmetry {asym} exceeds tolerance"
            )));
        }
        let eigs = matrix.clone().symmetric_eigen().eigenvalues;
        let max_eig = eigs.iter().cloned().fold(0.0_f64, f64::max);
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_EIGENVALUE_SLACK * max_eig.max(1.0) {
            return Err(ModelError::NotPositiveSemidefinite(format!(
                "smallest eigenvalue {min_eig} is negative beyond tolerance"
            )));
        }
        Ok(StateCovariance { matrix, rho: None })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// The decay coefficient when built by [`StateCovariance::toeplitz`].
    pub fn rho(&self) -> Option<f64> {
        self.rho
    }
}

/// Additive white observation noise `Z ~ N(0, sigma2 * I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    sigma2: f64,
}

impl NoiseModel {
    pub fn new(sigma2: f64) -> Result<Self, ModelError> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(ModelError::NonpositiveNoise(sigma2));
        }
        Ok(NoiseModel { sigma2 })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

/// Noise variance realizing a target SNR (in dB):
/// `sigma2 = tr(H S_xx H^T) / (m * 10^(snr_db / 10))`.
pub fn sigma2_from_snr(
    h: &DMatrix<f64>,
    state_cov: &StateCovariance,
    snr_db: f64,
) -> Result<NoiseModel, ModelError> {
    if h.ncols() != state_cov.dim() {
        return Err(ModelError::DimensionMismatch(format!(
            "H has {} columns but the state covariance is {}-dimensional",
            h.ncols(),
            state_cov.dim()
        )));
    }
    let t = signal_trace(h, state_cov.matrix());
    if !t.is_finite() || t <= 0.0 {
        return Err(ModelError::DegenerateSignal(t));
    }
    let m = h.nrows() as f64;
    NoiseModel::new(t / (m * 10f64.powf(snr_db / 10.0)))
}

/// SNR in dB realized by a model `(H, S_xx, sigma2)`.
pub fn snr_db_of(h: &DMatrix<f64>, state_cov: &StateCovariance, sigma2: f64) -> f64 {
    let t = signal_trace(h, state_cov.matrix());
    10.0 * (t / (h.nrows() as f64 * sigma2)).log10()
}

/// The full observation model with its cached covariance algebra.
///
/// Construction computes `S_yy = H S_xx H^T + sigma2 I`, its Cholesky
/// factorization, inverse, and log-determinant once; all attack and ranking
/// computations read these cached values.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    h: DMatrix<f64>,
    descriptors: Option<Vec<MeasurementDescriptor>>,
    state_cov: StateCovariance,
    sigma2: f64,
    obs_cov: DMatrix<f64>,
    obs_cov_inv: DMatrix<f64>,
    obs_logdet: f64,
    snr_db: f64,
}

impl SystemModel {
    /// Builds the model from a grid Jacobian, keeping per-row measurement
    /// descriptors for class-aware reporting.
    pub fn from_jacobian(
        jacobian: &JacobianMatrix,
        state_cov: StateCovariance,
        noise: NoiseModel,
    ) -> Result<Self, ModelError> {
        let mut model = Self::from_parts(jacobian.matrix().clone(), state_cov, noise)?;
        model.descriptors = Some(jacobian.descriptors().to_vec());
        Ok(model)
    }

    /// Builds the model from a raw measurement matrix (no row metadata).
    pub fn from_parts(
        h: DMatrix<f64>,
        state_cov: StateCovariance,
        noise: NoiseModel,
    ) -> Result<Self, ModelError> {
        if h.ncols() != state_cov.dim() {
            return Err(ModelError::DimensionMismatch(format!(
                "H has {} columns but the state covariance is {}-dimensional",
                h.ncols(),
                state_cov.dim()
            )));
        }
        if h.nrows() == 0 {
            return Err(ModelError::DimensionMismatch(
                "H must have at least one row".into(),
            ));
        }
        let m = h.nrows();
        let sigma2 = noise.sigma2();
        let mut obs_cov = &h * state_cov.matrix() * h.transpose();
        for i in 0..m {
            obs_cov[(i, i)] += sigma2;
        }
        let chol = Cholesky::new(obs_cov.clone()).ok_or(ModelError::NotPositiveDefinite)?;
        let obs_logdet = logdet_from_cholesky(&chol);
        let obs_cov_inv = chol.inverse();
        let snr_db = snr_db_of(&h, &state_cov, sigma2);
        Ok(SystemModel {
            h,
            descriptors: None,
            state_cov,
            sigma2,
            obs_cov,
            obs_cov_inv,
            obs_logdet,
            snr_db,
        })
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        self.h.nrows()
    }

    /// Number of state variables.
    pub fn n(&self) -> usize {
        self.h.ncols()
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn state_cov(&self) -> &StateCovariance {
        &self.state_cov
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// `S_yy = H S_xx H^T + sigma2 I`.
    pub fn obs_cov(&self) -> &DMatrix<f64> {
        &self.obs_cov
    }

    pub fn obs_cov_inv(&self) -> &DMatrix<f64> {
        &self.obs_cov_inv
    }

    /// `log det S_yy`.
    pub fn obs_logdet(&self) -> f64 {
        self.obs_logdet
    }

    /// Diagonal entry `(S_yy^-1)_{ii}`: the key per-measurement quantity of
    /// the closed-form vulnerability theory.
    pub fn inv_diag(&self, i: usize) -> f64 {
        self.obs_cov_inv[(i, i)]
    }

    /// Realized SNR in dB (`-inf` when the signal term vanishes).
    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    /// Row descriptors when the model was built from a grid Jacobian.
    pub fn descriptors(&self) -> Option<&[MeasurementDescriptor]> {
        self.descriptors.as_deref()
    }

    /// `H S_xx H^T` recomputed from the stored factors (no noise term).
    pub fn signal_cov(&self) -> DMatrix<f64> {
        &self.h * self.state_cov.matrix() * self.h.transpose()
    }
}
