//! Named reproduction presets. Full-scale presets (`fig*`) use the default
//! 19-site, M=128, K=16, 50-RB network. Desk-scale presets (`desk*`) shrink
//! it to 7 sites, M=32, K=8, 12 RBs and 20 drops so they finish in minutes.

use crate::Result;

use super::config::CampaignConfig;

/// Overrides that turn the defaults into the desk-scale network.
pub const DESK_SCALE: &[(&str, &str)] =
    &[("layout.sites", "7"), ("array.m", "32"), ("sim.k", "8"), ("sim.rbs", "12"), ("sim.drops", "20")];

const FULL_SWEEP: &[(&str, &str)] =
    &[("sweep.p0", "-120:-60:20"), ("sweep.alpha", "0:1:0.1"), ("sweep.include_nopc", "true")];

const PC_TRIO: &[(&str, &str)] = &[("pc.preset", "nopc,fpc05,fpc08")];
const PC_TRIO_PCSI: &[(&str, &str)] = &[("pc.preset", "nopc,fpc05,fpc08"), ("csi.mode", "estimated,pcsi")];
const PC_PAIR: &[(&str, &str)] = &[("pc.preset", "nopc,fpc08")];

/// One campaign inside a preset.
#[derive(Debug, Clone, Copy)]
pub struct PresetRun {
    pub label: &'static str,
    pub overrides: &'static [&'static [(&'static str, &'static str)]],
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub desk_scale: bool,
    pub runs: &'static [PresetRun],
}

const fn run(label: &'static str, overrides: &'static [&'static [(&'static str, &'static str)]]) -> PresetRun {
    PresetRun { label, overrides }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        description: "CSE surface over (P0, alpha), M=128, ZF, R3",
        desk_scale: false,
        runs: &[run("zf_m128_r3", &[FULL_SWEEP])],
    },
    Preset {
        name: "fig2",
        description: "CBT surface over (P0, alpha), M=128, ZF, R3",
        desk_scale: false,
        runs: &[run("zf_m128_r3", &[FULL_SWEEP])],
    },
    Preset {
        name: "fig3",
        description: "pilot power CDF for noPC, FPC_0.5, FPC_0.8, M=128, ZF, R3",
        desk_scale: false,
        runs: &[run("zf_m128_r3", &[PC_TRIO])],
    },
    Preset {
        name: "fig4",
        description: "estimation SINR CDF for noPC, FPC_0.5, FPC_0.8, M=128, ZF, R3",
        desk_scale: false,
        runs: &[run("zf_m128_r3", &[PC_TRIO])],
    },
    Preset {
        name: "fig5",
        description: "CSE over (P0, alpha), M=64, MRT, R1 and R3",
        desk_scale: false,
        runs: &[
            run("mrt_m64_r1", &[FULL_SWEEP, &[("array.m", "64"), ("bf.criterion", "mrt"), ("pilot.reuse", "r1")]]),
            run("mrt_m64_r3", &[FULL_SWEEP, &[("array.m", "64"), ("bf.criterion", "mrt"), ("pilot.reuse", "r3")]]),
        ],
    },
    Preset {
        name: "fig6",
        description: "CBT over (P0, alpha), M=64, MRT, R1 and R3",
        desk_scale: false,
        runs: &[
            run("mrt_m64_r1", &[FULL_SWEEP, &[("array.m", "64"), ("bf.criterion", "mrt"), ("pilot.reuse", "r1")]]),
            run("mrt_m64_r3", &[FULL_SWEEP, &[("array.m", "64"), ("bf.criterion", "mrt"), ("pilot.reuse", "r3")]]),
        ],
    },
    Preset {
        name: "fig7",
        description: "CSE over (P0, alpha), M=256, MRT, R1 and R3",
        desk_scale: false,
        runs: &[
            run("mrt_m256_r1", &[FULL_SWEEP, &[("array.m", "256"), ("bf.criterion", "mrt"), ("pilot.reuse", "r1")]]),
            run("mrt_m256_r3", &[FULL_SWEEP, &[("array.m", "256"), ("bf.criterion", "mrt"), ("pilot.reuse", "r3")]]),
        ],
    },
    Preset {
        name: "fig8",
        description: "CBT over (P0, alpha), M=256, MRT, R1 and R3",
        desk_scale: false,
        runs: &[
            run("mrt_m256_r1", &[FULL_SWEEP, &[("array.m", "256"), ("bf.criterion", "mrt"), ("pilot.reuse", "r1")]]),
            run("mrt_m256_r3", &[FULL_SWEEP, &[("array.m", "256"), ("bf.criterion", "mrt"), ("pilot.reuse", "r3")]]),
        ],
    },
    Preset {
        name: "fig9",
        description: "CBT versus CSE against perfect CSI, M=128, MRT, R1 and R3",
        desk_scale: false,
        runs: &[
            run("mrt_m128_r1", &[PC_TRIO_PCSI, &[("bf.criterion", "mrt"), ("pilot.reuse", "r1")]]),
            run("mrt_m128_r3", &[PC_TRIO_PCSI, &[("bf.criterion", "mrt"), ("pilot.reuse", "r3")]]),
        ],
    },
    Preset {
        name: "fig10",
        description: "CBT versus CSE against perfect CSI, M=128, ZF, R1 and R3",
        desk_scale: false,
        runs: &[
            run("zf_m128_r1", &[PC_TRIO_PCSI, &[("pilot.reuse", "r1")]]),
            run("zf_m128_r3", &[PC_TRIO_PCSI, &[("pilot.reuse", "r3")]]),
        ],
    },
    Preset {
        name: "desk1",
        description: "noPC, FPC_0.5, FPC_0.8 and perfect CSI, ZF, R3",
        desk_scale: true,
        runs: &[run("zf_m32_r3", &[DESK_SCALE, PC_TRIO_PCSI])],
    },
    Preset {
        name: "desk2",
        description: "FPC_0.8 against noPC under R1 and R3, ZF",
        desk_scale: true,
        runs: &[
            run("zf_m32_r1", &[DESK_SCALE, PC_PAIR, &[("pilot.reuse", "r1")]]),
            run("zf_m32_r3", &[DESK_SCALE, PC_PAIR, &[("pilot.reuse", "r3")]]),
        ],
    },
    Preset {
        name: "desk3",
        description: "FPC_0.8 against noPC at M=64 and M=128, MRT, R3",
        desk_scale: true,
        runs: &[
            run("mrt_m64_r3", &[DESK_SCALE, PC_PAIR, &[("bf.criterion", "mrt"), ("array.m", "64")]]),
            run("mrt_m128_r3", &[DESK_SCALE, PC_PAIR, &[("bf.criterion", "mrt"), ("array.m", "128")]]),
        ],
    },
    Preset {
        name: "desk4",
        description: "coarse (P0, alpha) sweep with noPC, ZF, R3",
        desk_scale: true,
        runs: &[run(
            "zf_m32_r3",
            &[DESK_SCALE, &[("sweep.p0", "-120:-60:20"), ("sweep.alpha", "0.5,0.8,1"), ("sweep.include_nopc", "true")]],
        )],
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl PresetRun {
    /// The run's configuration on top of `base`.
    pub fn config(&self, base: &CampaignConfig) -> Result<CampaignConfig> {
        base.with_all(self.overrides.iter().flat_map(|g| g.iter().copied()))
    }
}

impl Preset {
    /// `(label, config)` per run, each built on the defaults.
    pub fn configs(&self) -> Result<Vec<(&'static str, CampaignConfig)>> {
        let base = CampaignConfig::default();
        self.runs.iter().map(|r| Ok((r.label, r.config(&base)?))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        assert_eq!(PRESETS.len(), 14);
        for p in PRESETS {
            let cfgs = p.configs().unwrap();
            assert!(!cfgs.is_empty());
            for (_, c) in cfgs {
                let expected = if p.desk_scale { 7 } else { 19 };
                assert_eq!(c.scenario.sites, expected, "{}", p.name);
            }
        }
    }

    #[test]
    fn fig1_grid() {
        let (_, c) = &find("fig1").unwrap().configs().unwrap()[0];
        assert_eq!(c.points.len(), 1 + 4 * 11);
        assert_eq!(c.scenario.ports, 128);
        assert_eq!(c.drops, 50);
    }

    #[test]
    fn desk1_points() {
        let (_, c) = &find("desk1").unwrap().configs().unwrap()[0];
        let labels: Vec<_> = c.points.iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["nopc", "fpc_p0m60_a0.5", "fpc_p0m100_a0.8", "pcsi"]);
        assert_eq!((c.scenario.ports, c.scenario.users_per_sector, c.scenario.radio.rb_count, c.drops), (32, 8, 12, 20));
    }
}
