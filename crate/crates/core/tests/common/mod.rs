//! Brute-force oracles shared by the oracle tests and the acceptance suite.
#![allow(dead_code)]

use fpcsim::channel::{ChannelTensor, SectorChannels};
use fpcsim::kpi::downlink_sinr;
use fpcsim::precoding::{build_precoders, Criterion, Normalization};
use fpcsim::training::{ls_estimate_user, ChannelEstimate, CsiMode, PilotPlan, Reuse};
use fpcsim::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const M: usize = 4;
pub const K: usize = 2;
pub const N: usize = 3;

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn cn(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * scale
}

/// Two sectors with K=2 users each and reuse 1, so user i of sector 0 and
/// user i of sector 1 share a pilot.
pub struct Instance {
    pub tensor: ChannelTensor,
    pub plan: PilotPlan,
    pub q: Vec<f64>,
    pub noise: Vec<Vec<C64>>,
    pub sigma2: f64,
}

pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchors = [0, 0, 1, 1];
    let mut sectors = Vec::new();
    for j in 0..2 {
        let mut s = SectorChannels::zeros(j, 4, N, M);
        for u in 0..4 {
            let scale = if anchors[u] == j { 1e-5 } else { 3e-6 };
            for n in 0..N {
                for x in s.row_mut(u, n) {
                    *x = cn(&mut rng, scale);
                }
            }
        }
        sectors.push(s);
    }
    let noise = (0..4).map(|_| (0..N * M).map(|_| cn(&mut rng, 1.0)).collect()).collect();
    Instance {
        tensor: ChannelTensor::new(sectors),
        plan: PilotPlan::new(Reuse::R1, vec![0, 0], &anchors),
        q: vec![2.0, 0.5, 1.3, 0.05],
        noise,
        sigma2: 1e-11,
    }
}

/// LS by explicit pilot transmission: the anchor receives
/// `Y = Σ_i sqrt(q_i) h_i φ_i^T + sqrt(σ²) w φ_k^T` over a length-2
/// orthonormal pilot code and correlates with `φ_k`.
pub fn brute_ls(inst: &Instance, k: usize) -> Vec<C64> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let codes = [[C64::new(s2, 0.0), C64::new(s2, 0.0)], [C64::new(s2, 0.0), C64::new(-s2, 0.0)]];
    let j = inst.plan.anchor[k];
    let at = &inst.tensor.sectors[j];
    let phi_k = codes[inst.plan.pilot_index[k]];
    let mut out = Vec::new();
    for n in 0..N {
        for m in 0..M {
            let mut y = [C64::new(0.0, 0.0); 2];
            for i in 0..4 {
                let phi = codes[inst.plan.pilot_index[i]];
                for t in 0..2 {
                    y[t] += at.row(i, n)[m] * inst.q[i].sqrt() * phi[t];
                }
            }
            for t in 0..2 {
                y[t] += inst.noise[k][n * M + m] * inst.sigma2.sqrt() * phi_k[t];
            }
            let corr: C64 = (0..2).map(|t| y[t] * phi_k[t].conj()).sum();
            out.push(corr / inst.q[k].sqrt());
        }
    }
    out
}

pub fn estimates(inst: &Instance) -> ChannelEstimate {
    let rows = (0..4)
        .map(|k| {
            let at = &inst.tensor.sectors[inst.plan.anchor[k]];
            ls_estimate_user(&inst.plan, k, at, &inst.q, Some(&inst.noise[k]), inst.sigma2).unwrap()
        })
        .collect();
    ChannelEstimate { mode: CsiMode::Estimated, rows }
}

/// Precoder columns by hand: MRT is conj(ĥ_k); ZF uses the closed-form
/// 2×2 inverse of the Gram matrix. Each column is scaled to `p / K`.
pub fn brute_precoder(rows: [&[C64]; 2], zf: bool, p: f64) -> [Vec<C64>; 2] {
    let raw: [Vec<C64>; 2] = if zf {
        let g = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x * y.conj()).sum() };
        let (g00, g01, g10, g11) = (g(rows[0], rows[0]), g(rows[0], rows[1]), g(rows[1], rows[0]), g(rows[1], rows[1]));
        let det = g00 * g11 - g01 * g10;
        let inv = [[g11 / det, -g01 / det], [-g10 / det, g00 / det]];
        let col = |k: usize| (0..M).map(|m| rows[0][m].conj() * inv[0][k] + rows[1][m].conj() * inv[1][k]).collect();
        [col(0), col(1)]
    } else {
        [rows[0].iter().map(|z| z.conj()).collect(), rows[1].iter().map(|z| z.conj()).collect()]
    };
    raw.map(|c| {
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        c.iter().map(|z| z * ((p / K as f64).sqrt() / norm)).collect()
    })
}


/// Largest relative errors of the library LS estimate and downlink SINR
/// (MRT and ZF) against the brute-force expansions on one instance.
pub fn oracle_errors(seed: u64) -> (f64, f64) {
    let p = 0.8;
    let dl_noise = 4e-12;
    let inst = instance(seed);
    let est = estimates(&inst);
    let mut ls_err = 0f64;
    for k in 0..4 {
        for (x, y) in est.rows[k].iter().zip(&brute_ls(&inst, k)) {
            ls_err = ls_err.max((x - y).norm() / y.norm());
        }
    }
    let mut sinr_err = 0f64;
    for (criterion, zf) in [(Criterion::Mrt, false), (Criterion::Zf, true)] {
        let w = build_precoders(&inst.plan, &est, 2, N, M, criterion, Normalization::PerUser, p);
        for n in 0..N {
            let cols: Vec<[Vec<C64>; 2]> = (0..2)
                .map(|j| {
                    let r = |k: usize| &est.rows[2 * j + k][n * M..(n + 1) * M];
                    brute_precoder([r(0), r(1)], zf, p)
                })
                .collect();
            for k in 0..4 {
                let (aj, slot) = (k / 2, k % 2);
                let (mut sig, mut int) = (0.0, 0.0);
                for j in 0..2 {
                    let h = inst.tensor.row(k, j, n);
                    for (s, c) in cols[j].iter().enumerate() {
                        let g: C64 = h.iter().zip(c).map(|(a, b)| a * b).sum();
                        if j == aj && s == slot {
                            sig += g.norm_sqr();
                        } else {
                            int += g.norm_sqr();
                        }
                    }
                }
                let got = downlink_sinr(k, n, &inst.plan, &w, &inst.tensor, dl_noise);
                sinr_err = sinr_err.max(rel(got, sig / (int + dl_noise)));
            }
        }
    }
    (ls_err, sinr_err)
}
