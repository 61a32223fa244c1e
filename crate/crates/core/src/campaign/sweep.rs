//! Campaign runner: every drop evaluates every grid point on the same
//! realization (paired seeds). Drops run in parallel; results are merged in
//! drop order so the output does not depend on the worker count.

use std::path::Path;
use std::sync::mpsc;

use crate::kpi::{CdfSeries, DropKpis};
use crate::powerctl::PowerControlMode;
use crate::training::CsiMode;
use crate::{Result, SimError};

use super::config::{CampaignConfig, OperatingPoint};
use super::engine::{run_drop, Network};
use super::output::{DropLog, OutputWriter};

/// Pooled results of one grid point over all drops.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub point: OperatingPoint,
    /// Mean over sectors and drops, bit/s/Hz.
    pub mean_cse: f64,
    /// Half-width of the 95% normal confidence interval of `mean_cse` across drops.
    pub cse_ci95: f64,
    /// 5th percentile of pooled user throughput, Mbit/s.
    pub cbt: f64,
    pub fraction_at_max: f64,
    pub throughput: CdfSeries,
    pub pilot_power: CdfSeries,
    pub estimation_sinr: CdfSeries,
    pub downlink_sinr: CdfSeries,
    /// Per-drop mean CSE, for paired comparisons.
    pub drop_cse: Vec<f64>,
    /// Per-drop 5th-percentile throughput.
    pub drop_cbt: Vec<f64>,
    pub zf_regularized: u64,
}

impl PointResult {
    /// 5th percentile of the estimation SINR (dB), if the point estimates channels.
    pub fn estimation_sinr_p5(&self) -> Option<f64> {
        self.estimation_sinr.percentile(0.05).ok()
    }

    fn from_drops(point: OperatingPoint, drops: &[&DropKpis]) -> Result<Self> {
        let pool = |f: &dyn Fn(&DropKpis) -> &Vec<f64>| CdfSeries::new(drops.iter().flat_map(|d| f(d).iter().copied()).collect());
        let throughput = pool(&|d| &d.throughput_mbps);
        let drop_cse: Vec<f64> = drops.iter().map(|d| d.mean_cse()).collect();
        let n = drop_cse.len() as f64;
        let mean_cse = drop_cse.iter().sum::<f64>() / n;
        let var = if n > 1.0 { drop_cse.iter().map(|x| (x - mean_cse).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        let drop_cbt = drops
            .iter()
            .map(|d| crate::kpi::percentile(&d.throughput_mbps, 0.05))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            point,
            mean_cse,
            cse_ci95: 1.96 * (var / n).sqrt(),
            cbt: throughput.percentile(0.05)?,
            fraction_at_max: drops.iter().map(|d| d.fraction_at_max).sum::<f64>() / n,
            throughput,
            pilot_power: pool(&|d| &d.pilot_power_dbm),
            estimation_sinr: pool(&|d| &d.estimation_sinr_db),
            downlink_sinr: pool(&|d| &d.downlink_sinr_db),
            drop_cse,
            drop_cbt,
            zf_regularized: drops.iter().map(|d| d.zf_regularized as u64).sum(),
        })
    }
}

/// One row per grid point, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub config_hash: String,
    pub master_seed: u64,
    pub drops: usize,
    pub rejected_attempts: u64,
    pub rows: Vec<PointResult>,
}

impl ResultTable {
    pub fn find(&self, point: &OperatingPoint) -> Option<&PointResult> {
        self.rows.iter().find(|r| &r.point == point)
    }

    pub fn by_label(&self, label: &str) -> Option<&PointResult> {
        self.rows.iter().find(|r| r.point.label() == label)
    }
}

fn worker_count(threads: usize) -> usize {
    if threads > 0 {
        threads
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

/// Runs every drop of `cfg` and aggregates per grid point. When `out` is
/// given, per-drop rows are streamed to `out/drops.csv` as drops finish
/// (in drop order) and the summary and CDF files are written at the end.
pub fn run_campaign(cfg: &CampaignConfig, out: Option<&Path>) -> Result<ResultTable> {
    let net = Network::new(&cfg.scenario)?;
    let writer = match out {
        Some(dir) => Some(OutputWriter::create(dir, cfg)?),
        None => None,
    };
    let per_drop = execute_drops(&net, cfg, writer.as_ref().map(|w| w.drop_log()).transpose()?)?;

    let rows = cfg
        .points
        .iter()
        .enumerate()
        .map(|(p, &point)| {
            let drops: Vec<&DropKpis> = per_drop.iter().map(|d| &d[p]).collect();
            PointResult::from_drops(point, &drops)
        })
        .collect::<Result<Vec<_>>>()?;
    let table = ResultTable {
        config_hash: cfg.hash(),
        master_seed: cfg.master_seed,
        drops: cfg.drops,
        rejected_attempts: per_drop.iter().map(|d| d[0].rejected_attempts as u64).sum(),
        rows,
    };
    if let Some(w) = writer {
        w.finish(cfg, &table)?;
    }
    Ok(table)
}

fn execute_drops(net: &Network, cfg: &CampaignConfig, log: Option<DropLog>) -> Result<Vec<Vec<DropKpis>>> {
    let workers = worker_count(cfg.threads);
    let points = &cfg.points;
    let seed = cfg.master_seed;

    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Vec<DropKpis>)>();
        let sink = scope.spawn(move || -> Result<()> {
            let Some(mut log) = log else {
                for _ in rx {}
                return Ok(());
            };
            for (d, kpis) in rx {
                log.push(d, &kpis)?;
            }
            log.close()
        });

        let results = run_indexed(cfg.drops, workers, |d| {
            let r = run_drop(net, seed, d as u64, points)?;
            let _ = tx.send((d, r.clone()));
            Ok(r)
        });
        drop(tx);
        let sunk = sink.join().expect("drop writer panicked");
        let results = results?;
        sunk?;
        Ok(results)
    })
}

#[cfg(feature = "parallel")]
fn run_indexed<T: Send>(n: usize, workers: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    use rayon::prelude::*;
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::config(format!("thread pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

#[cfg(not(feature = "parallel"))]
fn run_indexed<T: Send>(n: usize, _workers: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}

fn tie_key(point: &OperatingPoint) -> (f64, f64) {
    // noPC is the α = 0 limit with an unbounded P0.
    match point.pc {
        PowerControlMode::NoPc => (0.0, f64::INFINITY),
        PowerControlMode::Fpc { p0_dbm, alpha } => (alpha, p0_dbm),
    }
}

fn argmax_by(rows: &[&PointResult], kpi: impl Fn(&PointResult) -> f64) -> usize {
    let mut best = 0;
    for i in 1..rows.len() {
        let (a, b) = (kpi(rows[i]), kpi(rows[best]));
        let (ta, tb) = (tie_key(&rows[i].point), tie_key(&rows[best].point));
        // Ties go to the smaller α, then the larger P0.
        if a > b || (a == b && (ta.0 < tb.0 || (ta.0 == tb.0 && ta.1 > tb.1))) {
            best = i;
        }
    }
    best
}

/// Grid argmax of CSE and of CBT over the estimated-CSI rows (perfect-CSI
/// rows are upper bounds, not operating points).
pub fn best_operating_points(table: &ResultTable) -> Result<(OperatingPoint, OperatingPoint)> {
    let rows: Vec<&PointResult> = table.rows.iter().filter(|r| r.point.csi == CsiMode::Estimated).collect();
    if rows.is_empty() {
        return Err(SimError::EmptyTable);
    }
    Ok((rows[argmax_by(&rows, |r| r.mean_cse)].point, rows[argmax_by(&rows, |r| r.cbt)].point))
}

/// Best CBT among estimated-CSI points whose CSE is at least `cse_floor`.
pub fn best_cbt_with_cse_floor(table: &ResultTable, cse_floor: f64) -> Option<OperatingPoint> {
    let rows: Vec<&PointResult> = table
        .rows
        .iter()
        .filter(|r| r.point.csi == CsiMode::Estimated && r.mean_cse >= cse_floor)
        .collect();
    (!rows.is_empty()).then(|| rows[argmax_by(&rows, |r| r.cbt)].point)
}
