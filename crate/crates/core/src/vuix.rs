//! Per-measurement vulnerability and the VuIx ranking.
//!
//! The vulnerability of a free measurement `i` is the change
//! `delta = f(S + v e_i e_i^T) - f(S)` in the attacker's cost from probing
//! that one sensor: the more negative, the more attractive the sensor. The
//! VuIx of a measurement is its 1-based position when all free measurements
//! are sorted by ascending `delta` — VuIx 1 is the most vulnerable.
//!
//! With no existing attack, the ranking collapses to a closed form: ascending
//! diagonal of the inverse observation covariance, independent of the
//! stealth weight `lambda` and the probe variance `v`. With an existing
//! attack the ranking is estimated by Monte Carlo over random attacked sets.

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::attack::{AttackError, CostParams, ExistingAttackState};
use crate::stochastic::SystemModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VuixError {
    #[error("measurement {0} is already in the attacked set")]
    IndexAttacked(usize),
    #[error("no free measurements to rank")]
    EmptyFreeSet,
    #[error("attacked-set size k = {k} must be smaller than m = {m}")]
    InvalidK { k: usize, m: usize },
    #[error("trial count must be at least 1, got {0}")]
    InvalidTrials(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

/// The vulnerability `delta` (nats) of one free measurement.
///
/// `delta` may be negative: probing a sensor typically lowers the attacker's
/// cost, and the most vulnerable sensor is the one with the smallest value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VulnerabilityScore {
    /// Zero-based measurement index.
    pub measurement: usize,
    /// Cost change of probing this measurement, in nats.
    pub delta: f64,
}

/// Ascending vulnerability ranking over the free measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct VuIxRanking {
    order: Vec<usize>,
    keys: Vec<f64>,
    vuix_of: Vec<Option<usize>>,
}

impl VuIxRanking {
    fn from_sorted(mut scored: Vec<(usize, f64)>, m: usize) -> Self {
        // Stable sort; equal keys keep ascending measurement order.
        scored.sort_by(|a, b| a.1.total_cmp(&b.1));
        let order: Vec<usize> = scored.iter().map(|&(i, _)| i).collect();
        let keys: Vec<f64> = scored.iter().map(|&(_, k)| k).collect();
        let mut vuix_of = vec![None; m];
        for (pos, &i) in order.iter().enumerate() {
            vuix_of[i] = Some(pos + 1);
        }
        VuIxRanking {
            order,
            keys,
            vuix_of,
        }
    }

    /// Measurements by ascending vulnerability: `order()[0]` is the most
    /// vulnerable (VuIx 1).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Ascending sort keys, aligned with [`order`](Self::order): `delta`
    /// values for a probe-based ranking, inverse observation-covariance
    /// diagonal entries for the closed form.
    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    /// The 1-based VuIx of a measurement, or `None` if it was attacked (and
    /// therefore unranked).
    pub fn vuix_of(&self, measurement: usize) -> Option<usize> {
        self.vuix_of.get(measurement).copied().flatten()
    }

    /// VuIx per measurement index; `None` marks attacked measurements.
    pub fn vuix_map(&self) -> &[Option<usize>] {
        &self.vuix_of
    }

    /// Number of ranked (free) measurements.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Precomputed quantities for evaluating `delta` on many sensors against one
/// fixed existing attack: the diagonal of `(S_yy + S)^-1` and the model's
/// own `(S_yy^-1)` diagonal.
pub struct DeltaContext<'a> {
    model: &'a SystemModel,
    state: &'a ExistingAttackState,
    params: CostParams,
    posterior_inv_diag: Vec<f64>,
}

impl<'a> DeltaContext<'a> {
    pub fn new(
        model: &'a SystemModel,
        state: &'a ExistingAttackState,
        params: CostParams,
    ) -> Result<Self, VuixError> {
        params.validate()?;
        if state.m() != model.m() {
            return Err(VuixError::DimensionMismatch(format!(
                "attack state covers {} sensors but the model has {}",
                state.m(),
                model.m()
            )));
        }
        let m = model.m();
        let posterior_inv_diag = if state.k() == 0 {
            // No attack: (S_yy + S)^-1 is exactly the model's inverse; reuse
            // its floats so the no-attack path is bit-identical to the
            // closed form.
            (0..m).map(|i| model.inv_diag(i)).collect()
        } else {
            let mut ya = model.obs_cov().clone();
            for (j, &d) in state.sigma_diag().iter().enumerate() {
                ya[(j, j)] += d;
            }
            let chol = Cholesky::new(ya).ok_or_else(|| {
                VuixError::Numerical(
                    "attacked observation covariance is not positive definite".into(),
                )
            })?;
            let inv = chol.inverse();
            (0..m).map(|i| inv[(i, i)]).collect()
        };
        Ok(DeltaContext {
            model,
            state,
            params,
            posterior_inv_diag,
        })
    }

    /// `delta` for free measurement `i` via the rank-one determinant lemma:
    ///
    /// ```text
    /// delta = 1/2 (1 - lambda) ln(1 + v p_i) - 1/2 ln(1 + v / sigma2)
    ///       + 1/2 lambda v w_i
    /// ```
    ///
    /// with `p_i = ((S_yy + S)^-1)_{ii}` and `w_i = (S_yy^-1)_{ii}`. Valid
    /// because a free sensor carries no existing attack variance. `v = 0`
    /// yields exactly `0.0`.
    pub fn delta(&self, i: usize) -> Result<f64, VuixError> {
        if i >= self.model.m() {
            return Err(VuixError::DimensionMismatch(format!(
                "sensor {i} is out of range for m = {}",
                self.model.m()
            )));
        }
        if self.state.is_attacked(i) {
            return Err(VuixError::IndexAttacked(i));
        }
        let lambda = self.params.lambda;
        let v = self.params.probe_variance;
        let p = self.posterior_inv_diag[i];
        let w = self.model.inv_diag(i);
        Ok(
            0.5 * (1.0 - lambda) * (v * p).ln_1p() - 0.5 * (v / self.model.sigma2()).ln_1p()
                + 0.5 * lambda * v * w,
        )
    }

    /// Scores for every free measurement, ascending by measurement index.
    pub fn scores(&self) -> Result<Vec<VulnerabilityScore>, VuixError> {
        self.state
            .free_set()
            .into_iter()
            .map(|i| {
                Ok(VulnerabilityScore {
                    measurement: i,
                    delta: self.delta(i)?,
                })
            })
            .collect()
    }
}

/// One-shot [`DeltaContext::delta`]: the vulnerability of probing free
/// sensor `i` with `params.probe_variance` against the existing attack.
pub fn delta(
    model: &SystemModel,
    state: &ExistingAttackState,
    params: &CostParams,
    i: usize,
) -> Result<VulnerabilityScore, VuixError> {
    let ctx = DeltaContext::new(model, state, *params)?;
    Ok(VulnerabilityScore {
        measurement: i,
        delta: ctx.delta(i)?,
    })
}

/// The free measurement with the smallest `delta`; ties go to the lowest
/// index.
pub fn most_vulnerable(
    model: &SystemModel,
    state: &ExistingAttackState,
    params: &CostParams,
) -> Result<usize, VuixError> {
    let ctx = DeltaContext::new(model, state, *params)?;
    let scores = ctx.scores()?;
    scores
        .iter()
        .min_by(|a, b| a.delta.total_cmp(&b.delta))
        .map(|s| s.measurement)
        .ok_or(VuixError::EmptyFreeSet)
}

/// The no-attack ranking in closed form: measurements by ascending
/// `(S_yy^-1)_{ii}`, ties to the lowest index. Independent of `lambda` and
/// the probe variance; keys are the inverse-diagonal entries.
pub fn closed_form_ranking(model: &SystemModel) -> VuIxRanking {
    let scored: Vec<(usize, f64)> = (0..model.m()).map(|i| (i, model.inv_diag(i))).collect();
    VuIxRanking::from_sorted(scored, model.m())
}

/// Full VuIx ranking against an existing attack: `delta` for every free
/// measurement, sorted ascending (stable, index tie-break), VuIx `j`
/// assigned to the `j`-th element.
pub fn vuix_ranking(
    model: &SystemModel,
    state: &ExistingAttackState,
    params: &CostParams,
) -> Result<VuIxRanking, VuixError> {
    let ctx = DeltaContext::new(model, state, *params)?;
    let scores = ctx.scores()?;
    if scores.is_empty() {
        return Err(VuixError::EmptyFreeSet);
    }
    let scored: Vec<(usize, f64)> = scores.iter().map(|s| (s.measurement, s.delta)).collect();
    Ok(VuIxRanking::from_sorted(scored, model.m()))
}

/// Uniformly random `k`-subset of `{0..m-1}` as an attacked set with unit
/// variance on each attacked sensor.
pub fn sample_attacked_set<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    rng: &mut R,
) -> Result<ExistingAttackState, VuixError> {
    sample_attacked_set_with_variance(m, k, 1.0, rng)
}

/// [`sample_attacked_set`] with a configurable per-sensor attack variance.
pub fn sample_attacked_set_with_variance<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    variance: f64,
    rng: &mut R,
) -> Result<ExistingAttackState, VuixError> {
    if k >= m {
        return Err(VuixError::InvalidK { k, m });
    }
    if k == 0 {
        return Ok(ExistingAttackState::empty(m));
    }
    let mut picks = rand::seq::index::sample(rng, m, k).into_vec();
    picks.sort_unstable();
    Ok(ExistingAttackState::new(m, &picks, variance)?)
}

/// VuIx statistics of one measurement across the trials in which it was
/// free. `mean`/`variance` are `None` when coverage is too small to define
/// them (0 and <2 trials respectively); `variance` is the unbiased (n-1)
/// estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVuixStats {
    /// Zero-based measurement index.
    pub measurement: usize,
    /// Trials in which this measurement was free (uncompromised).
    pub coverage: u64,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
}

/// How often each measurement class lands at one rank position.
#[derive(Debug, Clone, PartialEq)]
pub struct RankClassProb {
    /// One-based rank position (1 = most vulnerable).
    pub position: usize,
    pub flow_count: u64,
    pub injection_count: u64,
    /// `flow_count / trials`; every trial fills every position, so
    /// `p_flow + p_injection = 1`.
    pub p_flow: f64,
    pub p_injection: f64,
}

/// Empirical pmf of VuIx values for one measurement class, over all
/// (trial, free measurement of the class) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassVuixPmf {
    /// "flow" or "injection".
    pub label: String,
    /// `counts[j]` = occurrences of VuIx `j + 1` in this class.
    pub counts: Vec<u64>,
    /// `counts` normalized by their sum (all zeros if the class is absent).
    pub probabilities: Vec<f64>,
}

/// Monte Carlo VuIx statistics over uniformly random attacked sets.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub trials: u64,
    pub k: usize,
    pub seed: u64,
    /// One entry per measurement, ascending index.
    pub per_measurement: Vec<MeasurementVuixStats>,
    /// One entry per rank position 1..=(m - k). Empty when the model has no
    /// measurement descriptors (synthetic matrices).
    pub class_prob: Vec<RankClassProb>,
    /// Flow and injection pmfs over VuIx values. Empty without descriptors.
    pub class_pmf: Vec<ClassVuixPmf>,
}

/// Integer accumulators keep the parallel reduction exact: u64 sums are
/// associative and commutative, so the result is independent of how rayon
/// splits the trial range.
struct TrialAccum {
    sum: Vec<u64>,
    sumsq: Vec<u64>,
    cover: Vec<u64>,
    flow_at: Vec<u64>,
    inj_at: Vec<u64>,
}

impl TrialAccum {
    fn new(m: usize, positions: usize) -> Self {
        TrialAccum {
            sum: vec![0; m],
            sumsq: vec![0; m],
            cover: vec![0; m],
            flow_at: vec![0; positions],
            inj_at: vec![0; positions],
        }
    }

    fn merged(mut self, other: TrialAccum) -> Self {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sumsq.iter_mut().zip(&other.sumsq) {
            *a += b;
        }
        for (a, b) in self.cover.iter_mut().zip(&other.cover) {
            *a += b;
        }
        for (a, b) in self.flow_at.iter_mut().zip(&other.flow_at) {
            *a += b;
        }
        for (a, b) in self.inj_at.iter_mut().zip(&other.inj_at) {
            *a += b;
        }
        self
    }
}

/// Monte Carlo VuIx: for each trial, draw a uniformly random `k`-subset of
/// attacked sensors (unit attack variance each), rank the free sensors by
/// `delta` with `params`, and accumulate per-measurement VuIx mean and
/// unbiased variance, per-position class probabilities, and class pmfs.
///
/// Deterministic for a fixed `(model, k, params, trials, seed)`: trial `t`
/// uses an independent substream (`seed`, stream `t`), and accumulation is
/// integer-exact, so results do not depend on the parallelism level.
pub fn monte_carlo_vuix(
    model: &SystemModel,
    k: usize,
    params: &CostParams,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport, VuixError> {
    params.validate()?;
    let m = model.m();
    if k >= m {
        return Err(VuixError::InvalidK { k, m });
    }
    if trials == 0 {
        return Err(VuixError::InvalidTrials(trials));
    }
    let positions = m - k;
    let is_flow: Option<Vec<bool>> = model
        .descriptors()
        .map(|ds| ds.iter().map(|d| d.kind.is_flow()).collect());

    let acc = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialAccum, VuixError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let state = sample_attacked_set(m, k, &mut rng)?;
            let ranking = vuix_ranking(model, &state, params)?;
            let mut acc = TrialAccum::new(m, positions);
            for (pos0, &meas) in ranking.order().iter().enumerate() {
                let rank = (pos0 + 1) as u64;
                acc.sum[meas] += rank;
                acc.sumsq[meas] += rank * rank;
                acc.cover[meas] += 1;
                if let Some(flags) = &is_flow {
                    if flags[meas] {
                        acc.flow_at[pos0] += 1;
                    } else {
                        acc.inj_at[pos0] += 1;
                    }
                }
            }
            Ok(acc)
        })
        .try_reduce(|| TrialAccum::new(m, positions), |a, b| Ok(a.merged(b)))?;

    let per_measurement = (0..m)
        .map(|i| {
            let c = acc.cover[i];
            let mean = (c > 0).then(|| acc.sum[i] as f64 / c as f64);
            let variance = (c > 1).then(|| {
                let cu = c as u128;
                let s = acc.sum[i] as u128;
                let ss = acc.sumsq[i] as u128;
                // Unbiased: (c*ss - s^2) / (c*(c-1)), exact in integers.
                let num = cu * ss - s * s;
                num as f64 / (cu * (cu - 1)) as f64
            });
            MeasurementVuixStats {
                measurement: i,
                coverage: c,
                mean,
                variance,
            }
        })
        .collect();

    let (class_prob, class_pmf) = if is_flow.is_some() {
        let flow_total: u64 = acc.flow_at.iter().sum();
        let inj_total: u64 = acc.inj_at.iter().sum();
        let class_prob = (0..positions)
            .map(|p| RankClassProb {
                position: p + 1,
                flow_count: acc.flow_at[p],
                injection_count: acc.inj_at[p],
                p_flow: acc.flow_at[p] as f64 / trials as f64,
                p_injection: acc.inj_at[p] as f64 / trials as f64,
            })
            .collect();
        let pmf = |label: &str, counts: &[u64], total: u64| ClassVuixPmf {
            label: label.to_string(),
            counts: counts.to_vec(),
            probabilities: counts
                .iter()
                .map(|&c| {
                    if total == 0 {
                        0.0
                    } else {
                        c as f64 / total as f64
                    }
                })
                .collect(),
        };
        (
            class_prob,
            vec![
                pmf("flow", &acc.flow_at, flow_total),
                pmf("injection", &acc.inj_at, inj_total),
            ],
        )
    } else {
        (Vec::new(), Vec::new())
    };

    Ok(MonteCarloReport {
        trials,
        k,
        seed,
        per_measurement,
        class_prob,
        class_pmf,
    })
}
