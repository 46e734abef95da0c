//! `min-s`: smallest S at which difference estimation strictly beats the
//! downstream receiver's estimator, per noise mean.
//!
//! Columns: `xi` followed by one `s_min_<unknown>_<value>` column per
//! studied variant. An empty cell means the inequality was not reached
//! within `s_max` observations.

use crate::commands::mse::stream_seed;
use crate::config::EffectiveRun;
use crate::csvio::{num, opt_count, Table};
use crate::manifest::RunWriter;
use crate::{numerical_err, validation, HarnessResult};
use dualrx_core::inference::{
    run_trials, summarize, EstimationProblem, EstimatorKind, StudyConfig, UnknownParam,
};

pub fn run(run: &EffectiveRun) -> HarnessResult<()> {
    let env = &run.config.env;
    let study = run.config.study.as_ref().expect("validated");
    let xi_grid = study.xi_grid.as_ref().expect("validated");
    let unknowns = study
        .unknowns
        .clone()
        .unwrap_or_else(|| vec![UnknownParam::Mu, UnknownParam::K]);
    if unknowns.is_empty() {
        return validation("min-s needs at least one unknown");
    }
    // variant list per unknown: explicit values or the env's own value
    let mut panels: Vec<(UnknownParam, f64)> = Vec::new();
    for &u in &unknowns {
        match study.variants.as_ref().and_then(|m| m.get(u.name())) {
            Some(values) if !values.is_empty() => {
                for &v in values {
                    panels.push((u, v));
                }
            }
            _ => panels.push((u, u.get(env))),
        }
    }
    let header: Vec<String> = std::iter::once("xi".to_string())
        .chain(panels.iter().map(|(u, v)| format!("s_min_{}_{}", u.name(), v)))
        .collect();
    let mut table = Table::new(&header);
    for (xi_idx, &xi) in xi_grid.iter().enumerate() {
        let mut row = vec![num(xi)];
        for (panel_idx, &(unknown, value)) in panels.iter().enumerate() {
            let mut base = unknown.with_value(env, value);
            base.xi = xi;
            let prob = match study.bracket {
                Some(b) => EstimationProblem::new(unknown, base, b),
                None => EstimationProblem::for_study(unknown, base),
            }
            .map_err(numerical_err)?;
            let mut found: Option<usize> = None;
            for s_count in 1..=study.s_max {
                let mut cfg = StudyConfig::new(
                    study.trials,
                    s_count,
                    study.mode,
                    stream_seed(run.seed, xi_idx * 97 + panel_idx),
                );
                cfg.t_sim = run.config.sim.as_ref().map_or(1e-3, |s| s.t_sim);
                let outcomes = run_trials(&prob, &cfg).map_err(numerical_err)?;
                let de = summarize(&outcomes, EstimatorKind::De, cfg.trials);
                let rx2 = summarize(&outcomes, EstimatorKind::MlRx2, cfg.trials);
                if de.norm_mse < rx2.norm_mse {
                    found = Some(s_count);
                    break;
                }
            }
            row.push(opt_count(found));
        }
        table.push(row);
    }
    let mut writer = RunWriter::new(run)?;
    let bytes = table.to_bytes()?;
    writer.write_output("min_s.csv", &bytes, table.len())?;
    writer.finish()?;
    Ok(())
}
