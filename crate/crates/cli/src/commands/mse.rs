//! `mse`: normalized estimator MSE and the normalized CRLB versus the number
//! of observations S.
//!
//! Columns: `S,crlb_norm,mse_de,mse_rx1,mse_rx2,fail_de,fail_rx1,fail_rx2,
//! clamped_rx1,clamped_rx2`. All three estimators run on the same draws.
//! A study with more than 10% failed trials aborts the run as numerical
//! non-convergence.

use crate::config::EffectiveRun;
use crate::csvio::{num, opt_num, Table};
use crate::manifest::RunWriter;
use crate::{numerical, numerical_err, validation, HarnessResult};
use dualrx_core::inference::{
    crlb_normalized, run_trials, summarize, EstimationProblem, EstimatorKind, StudyConfig,
};

pub fn run(run: &EffectiveRun) -> HarnessResult<()> {
    let env = &run.config.env;
    let study = run.config.study.as_ref().expect("validated");
    let unknown = study.unknown.expect("validated");
    let s_grid = study.s_grid.as_ref().expect("validated");
    let wanted: Vec<EstimatorKind> = match &study.estimators {
        None => EstimatorKind::ALL.to_vec(),
        Some(names) => {
            let mut kinds = Vec::new();
            for n in names {
                let kind = EstimatorKind::ALL
                    .into_iter()
                    .find(|k| k.name() == n)
                    .ok_or_else(|| crate::HarnessError::Validation(format!("unknown estimator '{n}'")))?;
                kinds.push(kind);
            }
            kinds
        }
    };
    if wanted.is_empty() {
        return validation("estimator list must not be empty");
    }
    let prob = match study.bracket {
        Some(b) => EstimationProblem::new(unknown, *env, b),
        None => EstimationProblem::for_study(unknown, *env),
    }
    .map_err(numerical_err)?;
    let mut table = Table::new(&[
        "S",
        "crlb_norm",
        "mse_de",
        "mse_rx1",
        "mse_rx2",
        "fail_de",
        "fail_rx1",
        "fail_rx2",
        "clamped_rx1",
        "clamped_rx2",
    ]);
    for (i, &s_count) in s_grid.iter().enumerate() {
        let mut cfg = StudyConfig::new(study.trials, s_count, study.mode, stream_seed(run.seed, i));
        cfg.t_sim = run.config.sim.as_ref().map_or(1e-3, |s| s.t_sim);
        let outcomes = run_trials(&prob, &cfg).map_err(numerical_err)?;
        let bound = crlb_normalized(unknown, env, s_count).map_err(numerical_err)?;
        let mut cells: [Option<f64>; 3] = [None, None, None];
        let mut fails = [0usize; 3];
        let mut clamped = [0usize; 2];
        for (slot, kind) in EstimatorKind::ALL.into_iter().enumerate() {
            let m = summarize(&outcomes, kind, cfg.trials);
            if kind == EstimatorKind::De && !m.valid {
                return numerical(format!(
                    "study invalid at S={s_count}: {} of {} difference-estimate trials failed",
                    m.failures, m.trials
                ));
            }
            fails[slot] = m.failures;
            match kind {
                EstimatorKind::MlRx1 => clamped[0] = m.clamped,
                EstimatorKind::MlRx2 => clamped[1] = m.clamped,
                EstimatorKind::De => {}
            }
            if wanted.contains(&kind) {
                cells[slot] = Some(m.norm_mse);
            }
        }
        table.push(vec![
            s_count.to_string(),
            num(bound),
            opt_num(cells[0]),
            opt_num(cells[1]),
            opt_num(cells[2]),
            fails[0].to_string(),
            fails[1].to_string(),
            fails[2].to_string(),
            clamped[0].to_string(),
            clamped[1].to_string(),
        ]);
    }
    let mut writer = RunWriter::new(run)?;
    let bytes = table.to_bytes()?;
    writer.write_output("mse.csv", &bytes, table.len())?;
    writer.finish()?;
    Ok(())
}

pub(crate) fn stream_seed(master: u64, index: usize) -> u64 {
    master.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
