//! Flat key-value campaign configuration.
//!
//! ```text
//! # comment
//! array.m = 128
//! pilot.reuse = r3
//! sweep.p0 = -120:-60:20      # start:stop:step, or a comma list
//! sweep.alpha = 0,0.5,0.8,1
//! ```
//!
//! Every key has a default. The canonical text is the sorted list of all
//! keys that influence results, with normalized values; its SHA-256 prefix
//! is the configuration hash stamped on every output row.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::channel::{ChannelParams, PortLayout};
use crate::deployment::DropParams;
use crate::powerctl::{PcPreset, PowerControlMode};
use crate::precoding::{Criterion, Normalization};
use crate::radio::RadioParams;
use crate::training::{CsiMode, Reuse};
use crate::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Int,
    Float,
    Bool,
    Choice(&'static [&'static str]),
    FloatList,
    ChoiceList(&'static [&'static str]),
    Path,
}

const PC_PRESETS: &[&str] = &["nopc", "fpc05", "fpc08", "custom"];

/// `(key, default, kind, affects results)`
const KEYS: &[(&str, &str, Kind, bool)] = &[
    ("layout.sites", "19", Kind::Int, true),
    ("layout.isd", "500", Kind::Float, true),
    ("layout.bs_height", "25", Kind::Float, true),
    ("layout.min_distance", "35", Kind::Float, true),
    ("ue.indoor_fraction", "0.8", Kind::Float, true),
    ("ue.indoor_depth_max", "25", Kind::Float, true),
    ("ue.min_floors", "4", Kind::Int, true),
    ("ue.max_floors", "8", Kind::Int, true),
    ("array.m", "128", Kind::Int, true),
    ("array.port_layout", "dual_pol", Kind::Choice(&["dual_pol", "single_pol"]), true),
    ("array.downtilt", "12", Kind::Float, true),
    ("sim.k", "16", Kind::Int, true),
    ("sim.rbs", "50", Kind::Int, true),
    ("sim.drops", "50", Kind::Int, true),
    ("sim.seed", "1", Kind::Int, true),
    ("sim.threads", "0", Kind::Int, false),
    ("pilot.reuse", "r3", Kind::Choice(&["r1", "r3"]), true),
    ("pilot.despread", "true", Kind::Bool, true),
    ("bf.criterion", "zf", Kind::Choice(&["mrt", "zf"]), true),
    ("bf.normalization", "per_user", Kind::Choice(&["per_user", "total"]), true),
    ("csi.mode", "estimated", Kind::ChoiceList(&["estimated", "pcsi"]), true),
    ("pc.preset", "nopc", Kind::ChoiceList(PC_PRESETS), true),
    ("pc.mode", "fpc", Kind::Choice(&["nopc", "fpc"]), true),
    ("pc.p0_dbm", "-100", Kind::Float, true),
    ("pc.alpha", "0.8", Kind::Float, true),
    ("pc.p_max_dbm", "23", Kind::Float, true),
    ("sweep.p0", "", Kind::FloatList, true),
    ("sweep.alpha", "", Kind::FloatList, true),
    ("sweep.include_nopc", "false", Kind::Bool, true),
    ("channel.fc_ghz", "2", Kind::Float, true),
    ("channel.sigma_sf_los", "4", Kind::Float, true),
    ("channel.sigma_sf_nlos", "6", Kind::Float, true),
    ("channel.o2i_wall_db", "20", Kind::Float, true),
    ("channel.o2i_per_m_db", "0.5", Kind::Float, true),
    ("channel.clusters_los", "8", Kind::Int, true),
    ("channel.clusters_nlos", "12", Kind::Int, true),
    ("channel.asd_deg", "10", Kind::Float, true),
    ("channel.zsd_deg", "5", Kind::Float, true),
    ("channel.delay_spread_ns", "300", Kind::Float, true),
    ("channel.xpr_db", "8", Kind::Float, true),
    ("channel.ricean_k_db", "9", Kind::Float, true),
    ("channel.cluster_shadow_db", "3", Kind::Float, true),
    ("radio.bs_power_dbm", "46", Kind::Float, true),
    ("radio.ue_power_dbm", "23", Kind::Float, true),
    ("radio.bs_nf_db", "5", Kind::Float, true),
    ("radio.ue_nf_db", "9", Kind::Float, true),
    ("kpi.se_cap", "7.8", Kind::Float, true),
    ("output.dir", "out", Kind::Path, false),
];

fn kind_of(key: &str) -> Option<(Kind, bool)> {
    KEYS.iter().find(|k| k.0 == key).map(|k| (k.2, k.3))
}

pub(crate) fn fmt_float(x: f64) -> String {
    // Shortest round-trip form, with -0 folded into 0.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

fn parse_float(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| SimError::config(format!("{key}: expected a number, got {s:?}")))
}

fn parse_float_list(key: &str, s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let (a, b, step) = (parse_float(key, parts[0])?, parse_float(key, parts[1])?, parse_float(key, parts[2])?);
        if step == 0.0 || (b - a) * step < 0.0 {
            return Err(SimError::config(format!("{key}: empty or infinite range {s}")));
        }
        let n = ((b - a) / step + 1e-9).floor() as i64;
        // Round to 12 significant decimals so 0.1 steps print cleanly.
        return Ok((0..=n).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12).collect());
    }
    s.split(',').map(|p| parse_float(key, p)).collect()
}

fn canonical_value(key: &str, kind: Kind, raw: &str) -> Result<String> {
    let raw = raw.trim();
    Ok(match kind {
        Kind::Int => raw
            .parse::<u64>()
            .map_err(|_| SimError::config(format!("{key}: expected a non-negative integer, got {raw:?}")))?
            .to_string(),
        Kind::Float => fmt_float(parse_float(key, raw)?),
        Kind::Bool => match raw {
            "true" | "1" | "yes" => "true".into(),
            "false" | "0" | "no" => "false".into(),
            _ => return Err(SimError::config(format!("{key}: expected true/false, got {raw:?}"))),
        },
        Kind::Choice(opts) => {
            let v = raw.to_ascii_lowercase();
            if !opts.contains(&v.as_str()) {
                return Err(SimError::config(format!("{key}: expected one of {opts:?}, got {raw:?}")));
            }
            v
        }
        Kind::ChoiceList(opts) => {
            let mut out = Vec::new();
            for p in raw.split(',') {
                let v = p.trim().to_ascii_lowercase();
                if !opts.contains(&v.as_str()) {
                    return Err(SimError::config(format!("{key}: expected entries from {opts:?}, got {p:?}")));
                }
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            out.join(",")
        }
        Kind::FloatList => parse_float_list(key, raw)?.into_iter().map(fmt_float).collect::<Vec<_>>().join(","),
        Kind::Path => raw.to_string(),
    })
}

/// Everything that defines one Monte Carlo drop except the power-control
/// operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sites: usize,
    pub isd: f64,
    pub radio: RadioParams,
    pub channel: ChannelParams,
    pub drop: DropParams,
    pub ports: usize,
    pub port_layout: PortLayout,
    pub downtilt_deg: f64,
    pub users_per_sector: usize,
    pub reuse: Reuse,
    /// Combine pilot energy over the RB's resource elements before LS.
    pub pilot_despread: bool,
    pub criterion: Criterion,
    pub normalization: Normalization,
    pub se_cap: f64,
}

/// One grid point: a power-control law and a CSI mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub pc: PowerControlMode,
    pub csi: CsiMode,
}

impl OperatingPoint {
    pub fn estimated(pc: PowerControlMode) -> Self {
        Self { pc, csi: CsiMode::Estimated }
    }

    pub fn perfect() -> Self {
        Self { pc: PowerControlMode::NoPc, csi: CsiMode::Perfect }
    }

    /// File-name safe label such as `nopc`, `fpc_p0m100_a0.8` or `pcsi`.
    pub fn label(&self) -> String {
        match (self.csi, self.pc) {
            (CsiMode::Perfect, _) => "pcsi".into(),
            (_, PowerControlMode::NoPc) => "nopc".into(),
            (_, PowerControlMode::Fpc { p0_dbm, alpha }) => {
                let p0 = fmt_float(p0_dbm).replace('-', "m");
                format!("fpc_p0{p0}_a{}", fmt_float(alpha))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    settings: BTreeMap<String, String>,
    pub scenario: Scenario,
    pub points: Vec<OperatingPoint>,
    pub drops: usize,
    pub master_seed: u64,
    /// 0 means one worker per available core.
    pub threads: usize,
    pub output_dir: PathBuf,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self::from_pairs(std::iter::empty::<(&str, &str)>()).expect("defaults are valid")
    }
}

impl CampaignConfig {
    /// Parses the flat `key = value` text format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| SimError::config(format!("line {}: expected key = value", no + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(pairs)
    }

    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: impl IntoIterator<Item = (K, V)>) -> Result<Self> {
        let mut settings: BTreeMap<String, String> = KEYS.iter().map(|k| (k.0.to_string(), k.1.to_string())).collect();
        for (k, v) in pairs {
            let (k, v) = (k.as_ref().trim(), v.as_ref());
            let (kind, _) = kind_of(k).ok_or_else(|| SimError::config(format!("unknown key {k:?}")))?;
            settings.insert(k.to_string(), canonical_value(k, kind, v)?);
        }
        for (k, kind, _) in KEYS.iter().map(|k| (k.0, k.2, k.3)) {
            let v = settings[k].clone();
            settings.insert(k.to_string(), canonical_value(k, kind, &v)?);
        }
        Self::build(settings)
    }

    /// Returns a copy with one key overridden.
    pub fn with(&self, key: &str, value: &str) -> Result<Self> {
        self.with_all([(key, value)])
    }

    /// Returns a copy with several keys overridden, validated together.
    pub fn with_all<K: AsRef<str>, V: AsRef<str>>(&self, overrides: impl IntoIterator<Item = (K, V)>) -> Result<Self> {
        let mut pairs: Vec<(String, String)> = self.settings.clone().into_iter().collect();
        pairs.extend(overrides.into_iter().map(|(k, v)| (k.as_ref().to_string(), v.as_ref().to_string())));
        Self::from_pairs(pairs)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.settings.get(key).map(|s| s.as_str())
    }

    fn build(s: BTreeMap<String, String>) -> Result<Self> {
        let f = |k: &str| s[k].parse::<f64>().unwrap();
        let u = |k: &str| s[k].parse::<u64>().unwrap();
        let sites = u("layout.sites") as usize;
        if ![1, 7, 19].contains(&sites) {
            return Err(SimError::config(format!("layout.sites must be 1, 7 or 19, got {sites}")));
        }
        let rbs = u("sim.rbs") as usize;
        let k = u("sim.k") as usize;
        let m = u("array.m") as usize;
        if rbs == 0 || k == 0 {
            return Err(SimError::config("sim.rbs and sim.k must be positive"));
        }
        let criterion = Criterion::parse(&s["bf.criterion"]).unwrap();
        if criterion == Criterion::Zf && k > m {
            return Err(SimError::config(format!("ZF needs sim.k <= array.m ({k} > {m})")));
        }
        let (min_floors, max_floors) = (u("ue.min_floors") as u32, u("ue.max_floors") as u32);
        if min_floors == 0 || min_floors > max_floors {
            return Err(SimError::config("need 1 <= ue.min_floors <= ue.max_floors"));
        }
        let indoor_fraction = f("ue.indoor_fraction");
        if !(0.0..=1.0).contains(&indoor_fraction) {
            return Err(SimError::config("ue.indoor_fraction must be in [0, 1]"));
        }

        let radio = RadioParams {
            carrier_ghz: f("channel.fc_ghz"),
            rb_count: rbs,
            bs_max_power_dbm: f("radio.bs_power_dbm"),
            ue_max_power_dbm: f("radio.ue_power_dbm"),
            bs_noise_figure_db: f("radio.bs_nf_db"),
            ue_noise_figure_db: f("radio.ue_nf_db"),
            bs_height_m: f("layout.bs_height"),
            ..RadioParams::default()
        };
        let channel = ChannelParams {
            carrier_ghz: f("channel.fc_ghz"),
            sigma_sf_los_db: f("channel.sigma_sf_los"),
            sigma_sf_nlos_db: f("channel.sigma_sf_nlos"),
            o2i_wall_db: f("channel.o2i_wall_db"),
            o2i_per_m_db: f("channel.o2i_per_m_db"),
            clusters_los: u("channel.clusters_los") as usize,
            clusters_nlos: u("channel.clusters_nlos") as usize,
            asd_deg: f("channel.asd_deg"),
            zsd_deg: f("channel.zsd_deg"),
            delay_spread_s: f("channel.delay_spread_ns") * 1e-9,
            xpr_db: f("channel.xpr_db"),
            ricean_k_db: f("channel.ricean_k_db"),
            cluster_shadow_db: f("channel.cluster_shadow_db"),
        };
        let port_layout = match s["array.port_layout"].as_str() {
            "single_pol" => PortLayout::SinglePolarized,
            _ => PortLayout::DualPolarized,
        };
        crate::channel::ArrayGeometry::with_layout(m, port_layout)?;

        let scenario = Scenario {
            sites,
            isd: f("layout.isd"),
            radio,
            channel,
            drop: DropParams {
                indoor_fraction,
                indoor_depth_max: f("ue.indoor_depth_max"),
                min_floors,
                max_floors,
                min_distance: f("layout.min_distance"),
            },
            ports: m,
            port_layout,
            downtilt_deg: f("array.downtilt"),
            users_per_sector: k,
            reuse: Reuse::parse(&s["pilot.reuse"]).unwrap(),
            pilot_despread: s["pilot.despread"] == "true",
            criterion,
            normalization: Normalization::parse(&s["bf.normalization"]).unwrap(),
            se_cap: f("kpi.se_cap"),
        };

        let points = Self::grid(&s)?;
        let drops = u("sim.drops") as usize;
        if drops == 0 {
            return Err(SimError::config("sim.drops must be positive"));
        }
        Ok(Self {
            scenario,
            points,
            drops,
            master_seed: u("sim.seed"),
            threads: u("sim.threads") as usize,
            output_dir: PathBuf::from(&s["output.dir"]),
            settings: s,
        })
    }

    fn grid(s: &BTreeMap<String, String>) -> Result<Vec<OperatingPoint>> {
        let list = |k: &str| parse_float_list(k, &s[k]);
        let (p0s, alphas) = (list("sweep.p0")?, list("sweep.alpha")?);
        let mut pcs = Vec::new();
        if s["sweep.include_nopc"] == "true" {
            pcs.push(PowerControlMode::NoPc);
        }
        if !p0s.is_empty() || !alphas.is_empty() {
            if p0s.is_empty() || alphas.is_empty() {
                return Err(SimError::config("sweep.p0 and sweep.alpha must both be set"));
            }
            for &p0 in &p0s {
                for &alpha in &alphas {
                    pcs.push(PowerControlMode::Fpc { p0_dbm: p0, alpha });
                }
            }
        } else {
            for name in s["pc.preset"].split(',') {
                let mode = match PcPreset::parse(name) {
                    Some(p) => p.mode(),
                    None if s["pc.mode"] == "nopc" => PowerControlMode::NoPc,
                    None => PowerControlMode::Fpc {
                        p0_dbm: s["pc.p0_dbm"].parse().unwrap(),
                        alpha: s["pc.alpha"].parse().unwrap(),
                    },
                };
                if !pcs.contains(&mode) {
                    pcs.push(mode);
                }
            }
        }
        for pc in &pcs {
            if let PowerControlMode::Fpc { alpha, .. } = pc {
                if !(0.0..=1.0).contains(alpha) {
                    return Err(SimError::config(format!("alpha {alpha} outside [0, 1]")));
                }
            }
        }

        let mut points = Vec::new();
        for csi in s["csi.mode"].split(',') {
            match CsiMode::parse(csi).unwrap() {
                CsiMode::Estimated => points.extend(pcs.iter().map(|&pc| OperatingPoint::estimated(pc))),
                CsiMode::Perfect => points.push(OperatingPoint::perfect()),
            }
        }
        Ok(points)
    }

    /// Sorted `key = value` lines of every result-affecting setting.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.settings {
            if kind_of(k).map(|(_, affects)| affects).unwrap_or(false) {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Full settings including runtime-only keys, as config-file text.
    pub fn to_text(&self) -> String {
        self.settings.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
