//! Open-loop fractional uplink power control for the pilot phase.
//!
//! `P_k = min(P_max, P0 + 10 log10(N) + α L_k)` in dBm, with `L_k` the
//! (positive) large-scale attenuation towards the anchor sector. The no-PC
//! baseline puts every UE at `P_max`.

use crate::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerControlMode {
    /// Every UE transmits at maximum power.
    NoPc,
    Fpc { p0_dbm: f64, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerControlConfig {
    pub mode: PowerControlMode,
    pub p_max_dbm: f64,
    pub rb_count: usize,
}

/// Named power-control presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PcPreset {
    NoPc,
    /// P0 = -60 dBm, α = 0.5.
    Fpc05,
    /// P0 = -100 dBm, α = 0.8.
    Fpc08,
}

impl PcPreset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nopc" => Some(Self::NoPc),
            "fpc05" => Some(Self::Fpc05),
            "fpc08" => Some(Self::Fpc08),
            _ => None,
        }
    }

    pub fn mode(self) -> PowerControlMode {
        match self {
            Self::NoPc => PowerControlMode::NoPc,
            Self::Fpc05 => PowerControlMode::Fpc { p0_dbm: -60.0, alpha: 0.5 },
            Self::Fpc08 => PowerControlMode::Fpc { p0_dbm: -100.0, alpha: 0.8 },
        }
    }
}

impl PowerControlConfig {
    pub const DEFAULT_P_MAX_DBM: f64 = 23.0;

    pub fn new(mode: PowerControlMode, rb_count: usize) -> Result<Self> {
        let cfg = Self { mode, p_max_dbm: Self::DEFAULT_P_MAX_DBM, rb_count };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn preset(preset: PcPreset, rb_count: usize) -> Self {
        Self { mode: preset.mode(), p_max_dbm: Self::DEFAULT_P_MAX_DBM, rb_count }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rb_count == 0 {
            return Err(SimError::config("rb_count must be positive"));
        }
        if let PowerControlMode::Fpc { p0_dbm, alpha } = self.mode {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(SimError::config(format!("alpha must be in [0, 1], got {alpha}")));
            }
            if !p0_dbm.is_finite() {
                return Err(SimError::config("P0 must be finite"));
            }
        }
        Ok(())
    }

    /// Pilot transmit power in dBm for a UE with attenuation `l_db` to its anchor.
    pub fn fpc_power(&self, l_db: f64) -> f64 {
        match self.mode {
            PowerControlMode::NoPc => self.p_max_dbm,
            PowerControlMode::Fpc { p0_dbm, alpha } => {
                let target = p0_dbm + 10.0 * (self.rb_count as f64).log10() + alpha * l_db;
                target.min(self.p_max_dbm)
            }
        }
    }

    pub fn plan_powers(&self, attenuation_db: &[f64]) -> PowerPlan {
        let total_dbm: Vec<f64> = attenuation_db.iter().map(|&l| self.fpc_power(l)).collect();
        let per_rb_mw = total_dbm
            .iter()
            .map(|&p| 10f64.powf(p / 10.0) / self.rb_count as f64)
            .collect();
        let at_max = total_dbm.iter().filter(|&&p| p >= self.p_max_dbm).count();
        let fraction_at_max = if total_dbm.is_empty() { 0.0 } else { at_max as f64 / total_dbm.len() as f64 };
        PowerPlan { total_dbm, per_rb_mw, fraction_at_max }
    }
}

/// Pilot powers for every user of a drop.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPlan {
    /// `P_k`, dBm.
    pub total_dbm: Vec<f64>,
    /// Linear pilot power per RB `q_k = 10^(P_k/10) / N`, mW.
    pub per_rb_mw: Vec<f64>,
    /// Share of users transmitting at `P_max`.
    pub fraction_at_max: f64,
}
