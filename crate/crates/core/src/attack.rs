//! Information-theoretic attack model.
//!
//! An additive Gaussian attack `A ~ N(0, S_aa)` turns the observation into
//! `Y_a = H X + Z + A` with covariance `S_ya = S_yy + S_aa`. Two quantities
//! grade an attack:
//!
//! * **Disruption** — the mutual information `I(X; Y_a)` still available to
//!   the operator. Smaller is better for the attacker.
//! * **Stealth** — the KL divergence `D(P_ya || P_y)` between attacked and
//!   nominal observation distributions. Smaller means harder to detect.
//!
//! The attacker's objective is the weighted cost `I + lambda * D`; this
//! module evaluates it, the two optimal attack constructions that minimize
//! it (full-rank over the signal subspace, and single-sensor), and the
//! building blocks the ranking layer needs.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{logdet_pd, trace_product_sym};
use crate::stochastic::SystemModel;

/// Covariance scale of the unconstrained optimal Gaussian attack:
/// `S_aa = lambda^SCALE_EXPONENT * H S_xx H^T`. Kept as a named constant
/// because the -1/2 exponent is easy to mistype as -1 when rederiving.
pub const GAUSSIAN_ATTACK_SCALE_EXPONENT: f64 = -0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A covariance that must be positive definite failed to factorize.
    #[error("singular factorization: {0}")]
    SingularFactorization(String),
    /// The disruption/stealth tradeoff requires `lambda >= 1` for the
    /// closed-form attack constructions.
    #[error("lambda must be at least 1 for this attack construction, got {0}")]
    LambdaBelowOne(f64),
    /// The single-sensor variance formula has no real root for these
    /// parameters.
    #[error(
        "negative discriminant in single-sensor variance: w = {w}, sigma2 = {sigma2}, lambda = {lambda}"
    )]
    NegativeDiscriminant { w: f64, sigma2: f64, lambda: f64 },
    /// A probe was requested on a sensor already carrying attack variance.
    #[error("measurement {0} is already in the attacked set")]
    IndexAttacked(usize),
    #[error("invalid attack covariance: {0}")]
    InvalidCovariance(String),
    #[error("invalid attack set: {0}")]
    InvalidAttackSet(String),
    #[error("invalid cost parameters: {0}")]
    InvalidParams(String),
}

/// Symmetric PSD covariance of an additive Gaussian attack, with its support
/// (sensors carrying positive variance).
#[derive(Debug, Clone, PartialEq)]
pub struct AttackCovariance {
    matrix: DMatrix<f64>,
    diag: Option<Vec<f64>>,
    support: Vec<usize>,
}

impl AttackCovariance {
    /// The no-attack covariance (all zeros).
    pub fn zero(m: usize) -> Self {
        AttackCovariance {
            matrix: DMatrix::zeros(m, m),
            diag: Some(vec![0.0; m]),
            support: Vec::new(),
        }
    }

    /// Diagonal attack: independent noise per sensor. Entries must be
    /// nonnegative.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self, AttackError> {
        if diag.iter().any(|&d| !d.is_finite() || d < 0.0) {
            return Err(AttackError::InvalidCovariance(
                "diagonal entries must be finite and nonnegative".into(),
            ));
        }
        let m = diag.len();
        let mut matrix = DMatrix::zeros(m, m);
        for (i, &d) in diag.iter().enumerate() {
            matrix[(i, i)] = d;
        }
        let support = diag
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(AttackCovariance {
            matrix,
            diag: Some(diag.to_vec()),
            support,
        })
    }

    /// Dense attack covariance. Requires symmetry up to round-off and, for
    /// every sensor with zero diagonal, a fully zero row (which positive
    /// semidefiniteness implies); those rows are zeroed exactly.
    pub fn from_matrix(mut matrix: DMatrix<f64>) -> Result<Self, AttackError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(AttackError::DimensionMismatch(format!(
                "attack covariance must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let m = matrix.nrows();
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-9 * scale {
            return Err(AttackError::InvalidCovariance(format!(
                "asymmetry {asym} exceeds tolerance"
            )));
        }
        let mut support = Vec::new();
        for i in 0..m {
            let d = matrix[(i, i)];
            if d > 0.0 {
                support.push(i);
            } else {
                if d < -1e-12 * scale {
                    return Err(AttackError::InvalidCovariance(format!(
                        "negative diagonal entry {d} at sensor {i}"
                    )));
                }
                let row_max = (0..m).map(|j| matrix[(i, j)].abs()).fold(0.0_f64, f64::max);
                if row_max > 1e-9 * scale {
                    return Err(AttackError::InvalidCovariance(format!(
                        "sensor {i} has zero variance but couples to others"
                    )));
                }
                for j in 0..m {
                    matrix[(i, j)] = 0.0;
                    matrix[(j, i)] = 0.0;
                }
            }
        }
        Ok(AttackCovariance {
            matrix,
            diag: None,
            support,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Sensors with positive attack variance, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// The diagonal when the covariance was built as a diagonal matrix.
    fn diagonal_entries(&self) -> Option<&[f64]> {
        self.diag.as_deref()
    }
}

/// Weights of the attacker's objective: `lambda` trades stealth against
/// disruption, `probe_variance` is the variance v added on a single probed
/// sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub lambda: f64,
    pub probe_variance: f64,
}

impl CostParams {
    pub fn new(lambda: f64, probe_variance: f64) -> Result<Self, AttackError> {
        let p = CostParams {
            lambda,
            probe_variance,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(AttackError::InvalidParams(format!(
                "lambda must be finite and nonnegative, got {}",
                self.lambda
            )));
        }
        if !self.probe_variance.is_finite() || self.probe_variance < 0.0 {
            return Err(AttackError::InvalidParams(format!(
                "probe variance must be finite and nonnegative, got {}",
                self.probe_variance
            )));
        }
        Ok(())
    }
}

/// A diagonal attack already present on `k` sensors, each with the same
/// variance. The free set (complement of the attacked set) is where new
/// probes may land.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistingAttackState {
    m: usize,
    variances: Vec<f64>,
    attacked: Vec<usize>,
}

impl ExistingAttackState {
    /// No existing attack; every sensor is free.
    pub fn empty(m: usize) -> Self {
        ExistingAttackState {
            m,
            variances: vec![0.0; m],
            attacked: Vec::new(),
        }
    }

    /// Marks `attacked` sensors (distinct, in range, fewer than `m`) as
    /// carrying `variance` each.
    pub fn new(m: usize, attacked: &[usize], variance: f64) -> Result<Self, AttackError> {
        if attacked.len() >= m && !attacked.is_empty() {
            return Err(AttackError::InvalidAttackSet(format!(
                "attacked set of size {} leaves no free sensor of {m}",
                attacked.len()
            )));
        }
        if !attacked.is_empty() && (!variance.is_finite() || variance <= 0.0) {
            return Err(AttackError::InvalidAttackSet(format!(
                "attack variance must be positive, got {variance}"
            )));
        }
        let mut variances = vec![0.0; m];
        let mut sorted: Vec<usize> = attacked.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != attacked.len() {
            return Err(AttackError::InvalidAttackSet(
                "attacked set contains duplicates".into(),
            ));
        }
        for &i in &sorted {
            if i >= m {
                return Err(AttackError::InvalidAttackSet(format!(
                    "sensor {i} is out of range for m = {m}"
                )));
            }
            variances[i] = variance;
        }
        Ok(ExistingAttackState {
            m,
            variances,
            attacked: sorted,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of attacked sensors.
    pub fn k(&self) -> usize {
        self.attacked.len()
    }

    /// Attacked sensors, ascending.
    pub fn attacked(&self) -> &[usize] {
        &self.attacked
    }

    /// Free sensors, ascending.
    pub fn free_set(&self) -> Vec<usize> {
        (0..self.m).filter(|i| !self.is_attacked(*i)).collect()
    }

    pub fn is_attacked(&self, i: usize) -> bool {
        self.variances.get(i).is_some_and(|&v| v > 0.0)
    }

    /// Per-sensor diagonal of the existing attack covariance.
    pub fn sigma_diag(&self) -> &[f64] {
        &self.variances
    }

    pub fn attack_covariance(&self) -> AttackCovariance {
        AttackCovariance::from_diagonal(&self.variances)
            .expect("existing attack diagonal is validated on construction")
    }
}

fn check_dims(model: &SystemModel, attack: &AttackCovariance) -> Result<(), AttackError> {
    if attack.dim() != model.m() {
        return Err(AttackError::DimensionMismatch(format!(
            "attack covariance is {}-dimensional but the model has {} measurements",
            attack.dim(),
            model.m()
        )));
    }
    Ok(())
}

/// `log det (sigma2 I + S_aa)`, using the scalar-log fast path when the
/// attack is diagonal.
fn logdet_noise_plus_attack(sigma2: f64, attack: &AttackCovariance) -> Result<f64, AttackError> {
    if let Some(diag) = attack.diagonal_entries() {
        return Ok(diag.iter().map(|d| (sigma2 + d).ln()).sum());
    }
    let mut mat = attack.matrix().clone();
    for i in 0..mat.nrows() {
        mat[(i, i)] += sigma2;
    }
    logdet_pd(&mat).ok_or_else(|| {
        AttackError::SingularFactorization("sigma2 I + S_aa is not positive definite".into())
    })
}

fn logdet_attacked_obs(model: &SystemModel, attack: &AttackCovariance) -> Result<f64, AttackError> {
    let ya = model.obs_cov() + attack.matrix();
    logdet_pd(&ya).ok_or_else(|| {
        AttackError::SingularFactorization(
            "attacked observation covariance is not positive definite".into(),
        )
    })
}

/// Mutual information `I(X; Y_a)` in nats between the state and the attacked
/// observations, via the determinant-ratio reduction:
/// `I = 1/2 [ log det(S_yy + S_aa) - log det(sigma2 I + S_aa) ]`.
pub fn mutual_information(
    model: &SystemModel,
    attack: &AttackCovariance,
) -> Result<f64, AttackError> {
    check_dims(model, attack)?;
    let a = logdet_attacked_obs(model, attack)?;
    let b = logdet_noise_plus_attack(model.sigma2(), attack)?;
    Ok(0.5 * (a - b))
}

/// Mutual information computed from the joint state/observation covariance
/// `[[S_xx, S_xx H^T], [H S_xx, S_ya]]`:
/// `I = 1/2 log ( det S_xx * det S_ya / det S_joint )`.
///
/// Requires a strictly positive-definite state covariance. Algebraically
/// identical to [`mutual_information`]; kept as an independent evaluation
/// path for cross-checking.
pub fn mutual_information_joint(
    model: &SystemModel,
    attack: &AttackCovariance,
) -> Result<f64, AttackError> {
    check_dims(model, attack)?;
    let n = model.n();
    let m = model.m();
    let sxx = model.state_cov().matrix();
    let ld_sxx = logdet_pd(sxx).ok_or_else(|| {
        AttackError::SingularFactorization(
            "state covariance must be positive definite for the joint form".into(),
        )
    })?;
    let ya = model.obs_cov() + attack.matrix();
    let ld_ya = logdet_pd(&ya).ok_or_else(|| {
        AttackError::SingularFactorization(
            "attacked observation covariance is not positive definite".into(),
        )
    })?;

    let cross = model.h() * sxx; // H S_xx, the lower-left block
    let mut joint = DMatrix::zeros(n + m, n + m);
    joint.view_mut((0, 0), (n, n)).copy_from(sxx);
    joint.view_mut((0, n), (n, m)).copy_from(&cross.transpose());
    joint.view_mut((n, 0), (m, n)).copy_from(&cross);
    joint.view_mut((n, n), (m, m)).copy_from(&ya);
    let ld_joint = logdet_pd(&joint).ok_or_else(|| {
        AttackError::SingularFactorization("joint covariance is not positive definite".into())
    })?;

    Ok(0.5 * (ld_sxx + ld_ya - ld_joint))
}

/// KL divergence `D(P_ya || P_y)` in nats between attacked and nominal
/// observation distributions:
/// `D = 1/2 [ log det S_yy - log det S_ya - m + tr(S_yy^-1 S_ya) ]`.
pub fn kl_divergence(model: &SystemModel, attack: &AttackCovariance) -> Result<f64, AttackError> {
    check_dims(model, attack)?;
    let ya = model.obs_cov() + attack.matrix();
    let ld_ya = logdet_pd(&ya).ok_or_else(|| {
        AttackError::SingularFactorization(
            "attacked observation covariance is not positive definite".into(),
        )
    })?;
    let tr = trace_product_sym(model.obs_cov_inv(), &ya);
    Ok(0.5 * (model.obs_logdet() - ld_ya - model.m() as f64 + tr))
}

/// Attacker's cost of probing free sensor `i` with variance
/// `params.probe_variance` on top of the existing diagonal attack:
///
/// ```text
/// f = 1/2 (1 - lambda) log det(S_yy + S + v e_i e_i^T)
///   - 1/2 log det(S + v e_i e_i^T + sigma2 I)
///   + 1/2 lambda [ tr(S_yy^-1 (S_yy + S + v e_i e_i^T)) + log det S_yy ]
/// ```
///
/// The value equals `mutual_information + lambda * kl_divergence +
/// lambda * m / 2` for the combined attack covariance; the trailing constant
/// is independent of both the probed sensor and the probe variance, so it
/// cancels in every vulnerability difference.
pub fn cost_f(
    model: &SystemModel,
    state: &ExistingAttackState,
    params: &CostParams,
    i: usize,
) -> Result<f64, AttackError> {
    params.validate()?;
    if state.m() != model.m() {
        return Err(AttackError::DimensionMismatch(format!(
            "attack state covers {} sensors but the model has {}",
            state.m(),
            model.m()
        )));
    }
    if i >= model.m() {
        return Err(AttackError::DimensionMismatch(format!(
            "sensor {i} is out of range for m = {}",
            model.m()
        )));
    }
    if state.is_attacked(i) {
        return Err(AttackError::IndexAttacked(i));
    }

    let m = model.m();
    let sigma2 = model.sigma2();
    let lambda = params.lambda;
    let mut diag = state.sigma_diag().to_vec();
    diag[i] += params.probe_variance;

    let mut ya = model.obs_cov().clone();
    for (j, &d) in diag.iter().enumerate() {
        ya[(j, j)] += d;
    }
    let ld_ya = logdet_pd(&ya).ok_or_else(|| {
        AttackError::SingularFactorization(
            "attacked observation covariance is not positive definite".into(),
        )
    })?;
    let ld_noise: f64 = diag.iter().map(|d| (sigma2 + d).ln()).sum();
    // tr(S_yy^-1 (S_yy + D)) = m + sum_j D_jj (S_yy^-1)_jj for diagonal D.
    let tr = m as f64
        + diag
            .iter()
            .enumerate()
            .map(|(j, &d)| d * model.inv_diag(j))
            .sum::<f64>();
    Ok(0.5 * (1.0 - lambda) * ld_ya - 0.5 * ld_noise + 0.5 * lambda * (tr + model.obs_logdet()))
}

/// The unconstrained cost-minimizing Gaussian attack for `lambda >= 1`:
/// covariance `lambda^(-1/2) H S_xx H^T`, spread over the whole signal
/// subspace.
pub fn optimal_gaussian_attack(
    model: &SystemModel,
    lambda: f64,
) -> Result<AttackCovariance, AttackError> {
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(AttackError::LambdaBelowOne(lambda));
    }
    let scale = lambda.powf(GAUSSIAN_ATTACK_SCALE_EXPONENT);
    AttackCovariance::from_matrix(model.signal_cov() * scale)
}

/// A single-sensor attack: all variance on one measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseAttack {
    /// Attacked sensor (zero-based row).
    pub index: usize,
    /// Optimal attack variance on that sensor.
    pub variance: f64,
}

impl SparseAttack {
    /// Materializes the rank-one covariance `v e_i e_i^T`.
    pub fn covariance(&self, m: usize) -> AttackCovariance {
        let mut diag = vec![0.0; m];
        diag[self.index] = self.variance;
        AttackCovariance::from_diagonal(&diag)
            .expect("sparse attack variance is nonnegative by construction")
    }
}

/// Optimal variance of a single-sensor attack given `w = (S_yy^-1)_{ii}` of
/// the attacked sensor:
/// `v = -sigma2/2 + 1/2 sqrt( sigma2^2 - 4 (w sigma2 - 1) / (lambda w^2) )`.
///
/// This is the raw closed form behind [`single_sensor_attack`] (which gates
/// it on `lambda >= 1`); it evaluates for any positive `lambda`. For
/// `lambda >= 1` the discriminant `lambda u^2 - 4u + 4` (in `u = w sigma2`)
/// is provably nonnegative, and `w sigma2 <= 1` — which holds whenever the
/// observation covariance dominates `sigma2 I` — makes the result
/// nonnegative. The typed error guards the remaining parameter space rather
/// than guessing a projection.
pub fn sparse_attack_variance(w: f64, sigma2: f64, lambda: f64) -> Result<f64, AttackError> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(AttackError::InvalidParams(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    if !(w > 0.0) || !(sigma2 > 0.0) {
        return Err(AttackError::InvalidParams(format!(
            "w and sigma2 must be positive, got w = {w}, sigma2 = {sigma2}"
        )));
    }
    let disc = sigma2 * sigma2 - 4.0 * (w * sigma2 - 1.0) / (lambda * w * w);
    if disc < 0.0 {
        return Err(AttackError::NegativeDiscriminant { w, sigma2, lambda });
    }
    Ok(-sigma2 / 2.0 + 0.5 * disc.sqrt())
}

/// The cost-minimizing single-sensor attack for `lambda >= 1`: attack the
/// sensor with the smallest `(S_yy^-1)_{ii}` (ties to the lowest index) at
/// the variance given by [`sparse_attack_variance`].
pub fn single_sensor_attack(model: &SystemModel, lambda: f64) -> Result<SparseAttack, AttackError> {
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(AttackError::LambdaBelowOne(lambda));
    }
    let mut best = 0;
    let mut w = model.inv_diag(0);
    for i in 1..model.m() {
        let wi = model.inv_diag(i);
        if wi < w {
            w = wi;
            best = i;
        }
    }
    let variance = sparse_attack_variance(w, model.sigma2(), lambda)?;
    Ok(SparseAttack {
        index: best,
        variance,
    })
}
