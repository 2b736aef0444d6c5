use alloc::vec::Vec;

use num_traits::Float;

use crate::error::Result;

use super::config::{ExperimentConfig, SweepParam};
use super::executor::PacketExecutor;
use super::packet::{MethodResidual, PacketResult, PacketRunner};

/// Aggregate of one method over the packets of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodStats {
    /// `10 log10` of the mean linear residual ratio.
    pub mean_residual_db: f64,
    /// Standard deviation of the per-packet residuals in dB.
    pub std_residual_db: f64,
    pub n_ok: usize,
    pub n_failed: usize,
}

impl MethodStats {
    pub fn n_packets(&self) -> usize {
        self.n_ok + self.n_failed
    }

    pub fn failed_fraction(&self) -> f64 {
        self.n_failed as f64 / self.n_packets().max(1) as f64
    }

    fn from_outcomes<'a, I>(outcomes: I) -> Option<Self>
    where
        I: Iterator<Item = &'a Option<core::result::Result<MethodResidual, crate::Error>>>,
    {
        let mut ok = Vec::new();
        let mut n_failed = 0;
        let mut any = false;
        for o in outcomes {
            match o {
                None => {}
                Some(Ok(r)) => {
                    any = true;
                    ok.push(*r);
                }
                Some(Err(_)) => {
                    any = true;
                    n_failed += 1;
                }
            }
        }
        if !any {
            return None;
        }
        let n_ok = ok.len();
        let (mean_residual_db, std_residual_db) = if n_ok == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let mean_lin = ok.iter().map(|r| r.ratio).sum::<f64>() / n_ok as f64;
            let dbs: Vec<f64> = ok.iter().map(MethodResidual::residual_db).collect();
            let mean_db = dbs.iter().sum::<f64>() / n_ok as f64;
            let var = dbs.iter().map(|d| (d - mean_db) * (d - mean_db)).sum::<f64>() / n_ok as f64;
            (10.0 * Float::log10(mean_lin), Float::sqrt(var))
        };
        Some(Self {
            mean_residual_db,
            std_residual_db,
            n_ok,
            n_failed,
        })
    }
}

/// Per-method statistics for a set of packet results.
pub fn summarize(results: &[PacketResult]) -> (Option<MethodStats>, Option<MethodStats>) {
    (
        MethodStats::from_outcomes(results.iter().map(|r| &r.hammerstein)),
        MethodStats::from_outcomes(results.iter().map(|r| &r.learned_mf)),
    )
}

/// Runs packets `0..cfg.n_packets` in packet order.
pub fn run_packets<E: PacketExecutor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<PacketResult>> {
    let runner = PacketRunner::new(cfg)?;
    exec.map_packets(cfg.n_packets as u64, |k| runner.run(k))
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub hammerstein: Option<MethodStats>,
    pub learned_mf: Option<MethodStats>,
}

impl SweepPoint {
    /// Hammerstein residual minus learned-filter residual, in dB.
    pub fn gain_db(&self) -> Option<f64> {
        Some(self.hammerstein?.mean_residual_db - self.learned_mf?.mean_residual_db)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn total_failed(&self) -> usize {
        self.points
            .iter()
            .flat_map(|p| [p.hammerstein, p.learned_mf])
            .flatten()
            .map(|s| s.n_failed)
            .sum()
    }

    pub fn total_fits(&self) -> usize {
        self.points
            .iter()
            .flat_map(|p| [p.hammerstein, p.learned_mf])
            .flatten()
            .map(|s| s.n_packets())
            .sum()
    }
}

/// Evaluates `cfg.n_packets` packets at each value of `param`. Packet `k`
/// reuses the same random streams at every value.
pub fn sweep<E: PacketExecutor>(
    cfg: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    exec: &E,
) -> Result<SweepResult> {
    let mut points = Vec::with_capacity(values.len());
    for &value in values {
        let point_cfg = param.apply(cfg, value)?;
        let results = run_packets(&point_cfg, exec)?;
        let (hammerstein, learned_mf) = summarize(&results);
        points.push(SweepPoint {
            value,
            hammerstein,
            learned_mf,
        });
    }
    Ok(SweepResult { param, points })
}
