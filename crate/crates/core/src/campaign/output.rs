//! CSV writers. Floats use a fixed number of decimals so reruns are
//! byte-identical.
//!
//! * `drops.csv`: one row per (drop, point), streamed while the campaign runs
//! * `kpi_summary.csv`: one row per grid point
//! * `cdf_<metric>.csv`: `value,cumprob`, one file per metric and point
//! * `campaign_summary.csv`: `key,value` metadata and best points
//! * `config.txt`: the full configuration that produced the run

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::kpi::{CdfSeries, DropKpis};
use crate::powerctl::PowerControlMode;
use crate::Result;

use super::config::{fmt_float, CampaignConfig, OperatingPoint};
use super::sweep::{best_operating_points, PointResult, ResultTable};

pub const KPI_SUMMARY_HEADER: &str =
    "config_hash,p0_dbm,alpha,m,reuse,bf,csi_mode,mean_cse,cbt,fraction_at_max,drops,seed,pc_mode,cse_ci95";

pub const CDF_METRICS: &[&str] = &["ue_throughput", "pilot_power", "est_sinr", "dl_sinr"];

fn f6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn pc_columns(pc: PowerControlMode) -> (String, String, &'static str) {
    match pc {
        PowerControlMode::NoPc => (String::new(), String::new(), "nopc"),
        PowerControlMode::Fpc { p0_dbm, alpha } => (fmt_float(p0_dbm), fmt_float(alpha), "fpc"),
    }
}

/// One `kpi_summary.csv` line (without newline).
pub fn kpi_summary_row(cfg: &CampaignConfig, hash: &str, row: &PointResult) -> String {
    let (p0, alpha, mode) = pc_columns(row.point.pc);
    let s = &cfg.scenario;
    format!(
        "{hash},{p0},{alpha},{},{},{},{},{},{},{},{},{},{mode},{}",
        s.ports,
        s.reuse.as_str(),
        s.criterion.as_str(),
        row.point.csi.as_str(),
        f6(row.mean_cse),
        f6(row.cbt),
        f6(row.fraction_at_max),
        cfg.drops,
        cfg.master_seed,
        f6(row.cse_ci95),
    )
}

pub fn write_cdf(path: &Path, cdf: &CdfSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "value,cumprob")?;
    for (v, p) in cdf.points() {
        writeln!(w, "{},{}", f6(v), f6(p))?;
    }
    w.flush()?;
    Ok(())
}

fn metric_series<'a>(row: &'a PointResult, metric: &str) -> &'a CdfSeries {
    match metric {
        "ue_throughput" => &row.throughput,
        "pilot_power" => &row.pilot_power,
        "est_sinr" => &row.estimation_sinr,
        _ => &row.downlink_sinr,
    }
}

/// Streams per-drop rows in drop order, buffering drops that finish early.
pub struct DropLog {
    out: BufWriter<File>,
    labels: Vec<String>,
    next: usize,
    pending: BTreeMap<usize, Vec<DropKpis>>,
}

impl DropLog {
    fn create(path: &Path, points: &[OperatingPoint]) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "drop,point,mean_cse,cbt,fraction_at_max,rejected_attempts,zf_regularized")?;
        out.flush()?;
        Ok(Self { out, labels: points.iter().map(|p| p.label()).collect(), next: 0, pending: BTreeMap::new() })
    }

    pub fn push(&mut self, drop: usize, kpis: &[DropKpis]) -> Result<()> {
        self.pending.insert(drop, kpis.to_vec());
        while let Some(ready) = self.pending.remove(&self.next) {
            for (label, k) in self.labels.iter().zip(&ready) {
                let cbt = crate::kpi::percentile(&k.throughput_mbps, 0.05)?;
                writeln!(
                    self.out,
                    "{},{label},{},{},{},{},{}",
                    self.next,
                    f6(k.mean_cse()),
                    f6(cbt),
                    f6(k.fraction_at_max),
                    k.rejected_attempts,
                    k.zf_regularized
                )?;
            }
            self.out.flush()?;
            self.next += 1;
        }
        Ok(())
    }

    pub fn close(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Owns an output directory for one campaign.
pub struct OutputWriter {
    dir: PathBuf,
    points: Vec<OperatingPoint>,
}

impl OutputWriter {
    pub fn create(dir: &Path, cfg: &CampaignConfig) -> Result<Self> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.txt"), cfg.to_text())?;
        Ok(Self { dir: dir.to_path_buf(), points: cfg.points.clone() })
    }

    pub fn drop_log(&self) -> Result<DropLog> {
        DropLog::create(&self.dir.join("drops.csv"), &self.points)
    }

    pub fn finish(self, cfg: &CampaignConfig, table: &ResultTable) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.dir.join("kpi_summary.csv"))?);
        writeln!(w, "{KPI_SUMMARY_HEADER}")?;
        for row in &table.rows {
            writeln!(w, "{}", kpi_summary_row(cfg, &table.config_hash, row))?;
        }
        w.flush()?;

        let single = table.rows.len() == 1;
        for row in &table.rows {
            for metric in CDF_METRICS {
                let series = metric_series(row, metric);
                if series.is_empty() {
                    continue;
                }
                let name = if single {
                    format!("cdf_{metric}.csv")
                } else {
                    format!("cdf_{metric}__{}.csv", row.point.label())
                };
                write_cdf(&self.dir.join(name), series)?;
            }
        }

        let mut s = BufWriter::new(File::create(self.dir.join("campaign_summary.csv"))?);
        writeln!(s, "key,value")?;
        writeln!(s, "config_hash,{}", table.config_hash)?;
        writeln!(s, "seed,{}", table.master_seed)?;
        writeln!(s, "drops,{}", table.drops)?;
        writeln!(s, "points,{}", table.rows.len())?;
        writeln!(s, "rejected_drop_attempts,{}", table.rejected_attempts)?;
        let zf: u64 = table.rows.iter().map(|r| r.zf_regularized).sum();
        writeln!(s, "zf_regularized,{zf}")?;
        if let Ok((cse, cbt)) = best_operating_points(table) {
            writeln!(s, "best_cse_point,{}", cse.label())?;
            writeln!(s, "best_cbt_point,{}", cbt.label())?;
        }
        s.flush()?;
        Ok(())
    }
}
