//! `estimate`: point estimates from an observation file, reported as JSON
//! with bracket diagnostics and the normalized CRLB evaluated at the
//! difference estimate.

use crate::config::EffectiveRun;
use crate::manifest::RunWriter;
use crate::obsfile::read_observations;
use crate::{numerical_err, HarnessResult};
use dualrx_core::channel::Receiver;
use dualrx_core::inference::{
    crlb_normalized, estimate_de, estimate_ml_rx, EstimationProblem, ObservationSet, SkellamModel,
    UnknownParam,
};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct MlReport {
    value: f64,
    clamped: bool,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
    /// Model windowed means (asymptote + known noise mean) at the difference
    /// estimate.
    model_mean_rx1: f64,
    model_mean_rx2: f64,
    sample_mean_rx1: Option<f64>,
    sample_mean_rx2: Option<f64>,
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    unknown: UnknownParam,
    s_count: usize,
    bracket: (f64, f64),
    /// Difference estimate; absent when only one receiver is present.
    epsilon_de: Option<f64>,
    de_failure: Option<String>,
    epsilon_rx1: Option<MlReport>,
    epsilon_rx2: Option<MlReport>,
    /// Normalized CRLB at the difference estimate (needs both receivers).
    crlb_norm_at_de: Option<f64>,
    /// Model mean difference at the bracket ends, for bracket diagnostics.
    bracket_mean_diff: (f64, f64),
    /// Present only when the config declares the noise mean as known.
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<Diagnostics>,
}

pub fn run(run: &EffectiveRun) -> HarnessResult<()> {
    let est = run.config.estimate.as_ref().expect("validated");
    let path = run.observations_path().expect("validated");
    let obs = read_observations(&path)?;
    let mut prob = EstimationProblem::new(est.unknown, run.config.env, est.bracket).map_err(numerical_err)?;
    prob.noise_known = est.noise_known;
    let mut report = EstimateReport {
        unknown: est.unknown,
        s_count: obs.len(),
        bracket: est.bracket,
        epsilon_de: None,
        de_failure: None,
        epsilon_rx1: None,
        epsilon_rx2: None,
        crlb_norm_at_de: None,
        bracket_mean_diff: (
            prob.mean_difference_at(est.bracket.0).map_err(numerical_err)?,
            prob.mean_difference_at(est.bracket.1).map_err(numerical_err)?,
        ),
        diagnostics: None,
    };
    if let Some(g1) = &obs.g1 {
        let ml = estimate_ml_rx(Receiver::Rx1, &prob, g1).map_err(numerical_err)?;
        report.epsilon_rx1 = Some(MlReport { value: ml.value, clamped: ml.clamped });
    }
    if let Some(g2) = &obs.g2 {
        let ml = estimate_ml_rx(Receiver::Rx2, &prob, g2).map_err(numerical_err)?;
        report.epsilon_rx2 = Some(MlReport { value: ml.value, clamped: ml.clamped });
    }
    if let (Some(g1), Some(g2)) = (&obs.g1, &obs.g2) {
        let set = ObservationSet::new(g1.clone(), g2.clone()).map_err(numerical_err)?;
        match estimate_de(&prob, &set) {
            Ok(eps) => {
                report.epsilon_de = Some(eps);
                let at_estimate = est.unknown.with_value(&run.config.env, eps);
                report.crlb_norm_at_de =
                    Some(crlb_normalized(est.unknown, &at_estimate, set.len()).map_err(numerical_err)?);
            }
            Err(e) => report.de_failure = Some(e.to_string()),
        }
    }
    if prob.noise_known {
        if let Some(eps) = report.epsilon_de.or(report.epsilon_rx2.as_ref().map(|m| m.value)) {
            let at = est.unknown.with_value(&run.config.env, eps);
            let model = SkellamModel::from_env(&at).map_err(numerical_err)?;
            let mean_of = |g: &Option<Vec<u64>>| {
                g.as_ref().map(|v| v.iter().map(|&c| c as f64).sum::<f64>() / v.len() as f64)
            };
            report.diagnostics = Some(Diagnostics {
                model_mean_rx1: model.n_hat_1,
                model_mean_rx2: model.n_hat_2,
                sample_mean_rx1: mean_of(&obs.g1),
                sample_mean_rx2: mean_of(&obs.g2),
            });
        }
    }
    let body = serde_json::to_vec_pretty(&report)
        .map_err(|e| crate::HarnessError::Other(anyhow::anyhow!("report encode: {e}")))?;
    let mut writer = RunWriter::new(run)?;
    writer.write_output("estimate.json", &body, 1)?;
    writer.finish()?;
    Ok(())
}
