use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fpcsim::campaign::{best_operating_points, presets, run_campaign, CampaignConfig, Network, ResultTable};
use fpcsim::dump::ChannelDump;
use fpcsim::{Result, SimError};

/// Monte Carlo campaigns for uplink fractional power control in TDD massive MIMO.
#[derive(Parser)]
#[command(name = "sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the grid defined by a config file or a named preset.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Run a (P0, alpha) grid on top of a config file or preset.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma list or start:stop:step, dBm.
        #[arg(long, allow_hyphen_values = true)]
        p0: String,
        /// Comma list or start:stop:step.
        #[arg(long)]
        alpha: String,
        /// Add the no-power-control baseline to the grid.
        #[arg(long)]
        include_nopc: bool,
    },
    /// List the reproduction presets.
    Presets,
    /// Write the large-scale state and per-RB channels of one drop.
    DumpChannels {
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value_t = 0)]
        drop: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset (see `sim presets`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    drops: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to output.dir from the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(path: &Path) -> Result<CampaignConfig> {
    let text = fs::read_to_string(path).map_err(|e| SimError::config(format!("{}: {e}", path.display())))?;
    CampaignConfig::from_text(&text)
}

/// `(label, config)` pairs selected by `--config` or `--preset`.
fn select(config: &Option<PathBuf>, preset: &Option<String>) -> Result<Vec<(String, CampaignConfig)>> {
    match (config, preset) {
        (Some(path), None) => Ok(vec![(String::new(), load_config(path)?)]),
        (None, Some(name)) => {
            let p = presets::find(name).ok_or_else(|| SimError::config(format!("unknown preset {name:?}")))?;
            Ok(p.configs()?.into_iter().map(|(l, c)| (l.to_string(), c)).collect())
        }
        _ => Err(SimError::config("give exactly one of --config or --preset")),
    }
}

fn apply_overrides(cfg: CampaignConfig, common: &Common, extra: &[(&str, String)]) -> Result<CampaignConfig> {
    let mut pairs: Vec<(&str, String)> = extra.to_vec();
    if let Some(d) = common.drops {
        pairs.push(("sim.drops", d.to_string()));
    }
    if let Some(t) = common.threads {
        pairs.push(("sim.threads", t.to_string()));
    }
    if let Some(s) = common.seed {
        pairs.push(("sim.seed", s.to_string()));
    }
    if let Some(o) = &common.out {
        pairs.push(("output.dir", o.display().to_string()));
    }
    cfg.with_all(pairs)
}

fn print_table(label: &str, table: &ResultTable) {
    if !label.is_empty() {
        println!("[{label}]");
    }
    println!("config {}  drops {}  seed {}", table.config_hash, table.drops, table.master_seed);
    println!("{:<24} {:>10} {:>10} {:>10} {:>9}", "point", "cse", "ci95", "cbt_mbps", "at_pmax");
    for r in &table.rows {
        println!(
            "{:<24} {:>10.4} {:>10.4} {:>10.4} {:>9.4}",
            r.point.label(),
            r.mean_cse,
            r.cse_ci95,
            r.cbt,
            r.fraction_at_max
        );
    }
    if let Ok((cse, cbt)) = best_operating_points(table) {
        println!("best CSE: {}  best CBT: {}", cse.label(), cbt.label());
    }
}

fn run_all(common: &Common, extra: &[(&str, String)]) -> Result<()> {
    let runs = select(&common.config, &common.preset)?;
    let multi = runs.len() > 1;
    // Validate every run before starting the first one.
    let configs = runs
        .into_iter()
        .map(|(label, cfg)| Ok((label, apply_overrides(cfg, common, extra)?)))
        .collect::<Result<Vec<_>>>()?;
    for (label, cfg) in configs {
        let out = if multi { cfg.output_dir.join(&label) } else { cfg.output_dir.clone() };
        let table = run_campaign(&cfg, Some(&out))?;
        print_table(&label, &table);
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common } => run_all(&common, &[]),
        Command::Sweep { common, p0, alpha, include_nopc } => {
            let extra = [
                ("sweep.p0", p0),
                ("sweep.alpha", alpha),
                ("sweep.include_nopc", include_nopc.to_string()),
            ];
            run_all(&common, &extra)
        }
        Command::Presets => {
            for p in presets::PRESETS {
                let scale = if p.desk_scale { "desk" } else { "full" };
                println!("{:<7} {scale:<5} {}", p.name, p.description);
                for r in p.runs {
                    println!("              {}", r.label);
                }
            }
            Ok(())
        }
        Command::DumpChannels { config, preset, drop, seed, out } => {
            let (_, mut cfg) = select(&config, &preset)?.remove(0);
            if let Some(s) = seed {
                cfg = cfg.with("sim.seed", &s.to_string())?;
            }
            let net = Network::new(&cfg.scenario)?;
            let dump = ChannelDump::capture(&net, cfg.master_seed, drop)?;
            dump.write_to(BufWriter::new(fs::File::create(&out)?))?;
            println!("wrote {} ({} users, {} sectors)", out.display(), dump.users, dump.sectors);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
