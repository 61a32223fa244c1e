//! Campaign configuration, the per-drop engine, grid runner, outputs and presets.

pub mod config;
pub mod engine;
pub mod output;
pub mod presets;
pub mod sweep;

pub use config::{CampaignConfig, OperatingPoint, Scenario};
pub use engine::{evaluate_drop, realize_drop, run_drop, DropRealization, Network};
pub use sweep::{best_cbt_with_cse_floor, best_operating_points, run_campaign, PointResult, ResultTable};
