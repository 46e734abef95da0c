//! `overlay`: particle-simulation ensemble means against the analytic
//! windowed signal, both including the noise mean.
//!
//! Columns: `t,analytic_rx1,analytic_rx2,empirical_rx1,se_rx1,empirical_rx2,
//! se_rx2,agreement_rx1,agreement_rx2` where agreement is
//! `|analytic - empirical| / SE`.

use crate::config::EffectiveRun;
use crate::csvio::{num, Table};
use crate::manifest::RunWriter;
use crate::{numerical_err, HarnessResult};
use dualrx_core::channel::{received_signal, Receiver, SeriesSpec};
use dualrx_core::simulator::{ensemble_curve, SimConfig};

pub fn run(run: &EffectiveRun) -> HarnessResult<()> {
    let env = &run.config.env;
    let series = SeriesSpec::default();
    let grid = run.config.grid.as_ref().expect("validated");
    let sim_block = run.config.sim.as_ref().expect("validated");
    let times = grid.times();
    let cfg = SimConfig {
        t_sim: sim_block.t_sim,
        t_end: sim_block.t_end,
        realizations: sim_block.realizations,
        seed: run.seed,
        window_schedule: Vec::new(),
        observation_gap: 2.0 * env.delta,
        bridge_absorption: sim_block.bridge_absorption,
    };
    let curve = ensemble_curve(env, &cfg, &times).map_err(numerical_err)?;
    let mut table = Table::new(&[
        "t",
        "analytic_rx1",
        "analytic_rx2",
        "empirical_rx1",
        "se_rx1",
        "empirical_rx2",
        "se_rx2",
        "agreement_rx1",
        "agreement_rx2",
    ]);
    for (j, &t) in times.iter().enumerate() {
        let mut analytic = [0.0f64; 2];
        for rx in Receiver::BOTH {
            analytic[rx.index()] = received_signal(rx, t, env, &series).map_err(numerical_err)? + env.xi;
        }
        let agree = |rx: usize| {
            let se = curve.std_err[rx][j];
            if se > 0.0 {
                (analytic[rx] - curve.mean[rx][j]).abs() / se
            } else {
                f64::INFINITY
            }
        };
        table.push(vec![
            num(t),
            num(analytic[0]),
            num(analytic[1]),
            num(curve.mean[0][j]),
            num(curve.std_err[0][j]),
            num(curve.mean[1][j]),
            num(curve.std_err[1][j]),
            num(agree(0)),
            num(agree(1)),
        ]);
    }
    let mut writer = RunWriter::new(run)?;
    let bytes = table.to_bytes()?;
    writer.write_output("overlay.csv", &bytes, table.len())?;
    writer.finish()?;
    Ok(())
}
