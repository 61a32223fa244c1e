//! MRT and ZF downlink precoders with equal per-user power.
//!
//! With `H` the `K × M` matrix of (estimated) row channels of one sector on
//! one RB:
//!
//! * MRT: `W = H^H D`
//! * ZF:  `W = H^H (H H^H)^{-1} D`
//!
//! where the diagonal `D` scales every column to `‖w_k‖² = P_rb / K`
//! (or, with [`Normalization::Total`], scales all columns by one common
//! factor so that `Σ‖w_k‖² = P_rb`).

use nalgebra::DMatrix;

use crate::training::{ChannelEstimate, PilotPlan};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Mrt,
    Zf,
}

impl Criterion {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mrt" => Some(Self::Mrt),
            "zf" => Some(Self::Zf),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mrt => "mrt",
            Self::Zf => "zf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Every column gets `P_rb / K`.
    PerUser,
    /// One common scale factor; columns keep their relative norms.
    Total,
}

impl Normalization {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "per_user" => Some(Self::PerUser),
            "total" => Some(Self::Total),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::PerUser => "per_user",
            Self::Total => "total",
        }
    }
}

/// Gram matrices with a condition number above this get diagonal loading.
pub const ZF_MAX_CONDITION: f64 = 1e10;
/// Loading factor relative to the mean Gram diagonal.
pub const ZF_LOADING: f64 = 1e-6;

/// `M × K` precoder of one sector on one RB, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingMatrix {
    pub criterion: Criterion,
    ports: usize,
    users: usize,
    columns: Vec<C64>,
    /// Users whose channel row was zero and who receive no power.
    pub zero_columns: Vec<usize>,
    /// The ZF Gram inverse needed diagonal loading.
    pub regularized: bool,
}

impl PrecodingMatrix {
    pub fn users(&self) -> usize {
        self.users
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    pub fn column(&self, k: usize) -> &[C64] {
        &self.columns[k * self.ports..(k + 1) * self.ports]
    }

    /// Total radiated power `Σ‖w_k‖²`.
    pub fn total_power(&self) -> f64 {
        self.columns.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Effective gains `h w_i` of a row channel through every column.
    pub fn apply(&self, h: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.users];
        self.apply_into(h, &mut out);
        out
    }

    pub fn apply_into(&self, h: &[C64], out: &mut [C64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = dot(h, self.column(k));
        }
    }
}

/// Unconjugated row × column product `Σ a_m b_m`.
#[inline]
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re - x.im * y.im;
        im += x.re * y.im + x.im * y.re;
    }
    C64::new(re, im)
}

fn normalize(mut columns: Vec<C64>, ports: usize, users: usize, p_rb: f64, norm: Normalization) -> (Vec<C64>, Vec<usize>) {
    let norms: Vec<f64> = columns.chunks(ports).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    let zero: Vec<usize> = norms.iter().enumerate().filter(|(_, &n)| n == 0.0).map(|(k, _)| k).collect();
    match norm {
        Normalization::PerUser => {
            let target = p_rb / users as f64;
            for (col, &n) in columns.chunks_mut(ports).zip(&norms) {
                if n > 0.0 {
                    let s = (target / n).sqrt();
                    col.iter_mut().for_each(|z| *z *= s);
                }
            }
        }
        Normalization::Total => {
            let total: f64 = norms.iter().sum();
            if total > 0.0 {
                let s = (p_rb / total).sqrt();
                columns.iter_mut().for_each(|z| *z *= s);
            }
        }
    }
    (columns, zero)
}

/// MRT precoder for the `users × ports` row-major channel matrix `h`.
pub fn mrt(h: &[C64], users: usize, ports: usize, p_rb: f64, norm: Normalization) -> PrecodingMatrix {
    assert_eq!(h.len(), users * ports);
    let raw: Vec<C64> = h.iter().map(|z| z.conj()).collect();
    let (columns, zero_columns) = normalize(raw, ports, users, p_rb, norm);
    PrecodingMatrix { criterion: Criterion::Mrt, ports, users, columns, zero_columns, regularized: false }
}

/// ZF precoder for the `users × ports` row-major channel matrix `h`.
/// Requires `users <= ports`.
pub fn zf(h: &[C64], users: usize, ports: usize, p_rb: f64, norm: Normalization) -> PrecodingMatrix {
    assert_eq!(h.len(), users * ports);
    assert!(users <= ports, "ZF needs K <= M");
    let row = |k: usize| &h[k * ports..(k + 1) * ports];

    // G = H H^H
    let mut gram = DMatrix::<C64>::zeros(users, users);
    for a in 0..users {
        for b in a..users {
            let g: C64 = row(a).iter().zip(row(b)).map(|(x, y)| x * y.conj()).sum();
            gram[(a, b)] = g;
            gram[(b, a)] = g.conj();
        }
    }

    let eig = gram.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let regularized = !(lo > 0.0 && hi / lo <= ZF_MAX_CONDITION);
    if regularized {
        let trace: f64 = (0..users).map(|k| gram[(k, k)].re).sum();
        let eps = (ZF_LOADING * trace / users as f64).max(f64::MIN_POSITIVE);
        for k in 0..users {
            gram[(k, k)] += C64::new(eps, 0.0);
        }
        log::debug!("ZF Gram matrix regularized (condition {:.3e})", hi / lo.max(f64::MIN_POSITIVE));
    }
    let inv = match gram.clone().cholesky() {
        Some(ch) => ch.inverse(),
        None => gram.try_inverse().expect("loaded Gram matrix is invertible"),
    };

    // Column k = H^H G^{-1} e_k = Σ_a conj(h_a) (G^{-1})_{a k}
    let mut raw = vec![C64::new(0.0, 0.0); users * ports];
    for k in 0..users {
        let col = &mut raw[k * ports..(k + 1) * ports];
        for a in 0..users {
            let c = inv[(a, k)];
            for (d, x) in col.iter_mut().zip(row(a)) {
                *d += x.conj() * c;
            }
        }
    }
    let (columns, zero_columns) = normalize(raw, ports, users, p_rb, norm);
    PrecodingMatrix { criterion: Criterion::Zf, ports, users, columns, zero_columns, regularized }
}

pub fn precode(criterion: Criterion, h: &[C64], users: usize, ports: usize, p_rb: f64, norm: Normalization) -> PrecodingMatrix {
    match criterion {
        Criterion::Mrt => mrt(h, users, ports, p_rb, norm),
        Criterion::Zf => zf(h, users, ports, p_rb, norm),
    }
}

/// Precoders of every sector on every RB (`[sector][rb]`) from the channels
/// in `csi` (estimated or perfect). Sectors without users get an empty matrix.
pub fn build_precoders(
    plan: &PilotPlan,
    csi: &ChannelEstimate,
    sectors: usize,
    rbs: usize,
    ports: usize,
    criterion: Criterion,
    norm: Normalization,
    p_rb: f64,
) -> Vec<Vec<PrecodingMatrix>> {
    (0..sectors)
        .map(|j| {
            let members: Vec<usize> = (0..plan.users()).filter(|&u| plan.anchor[u] == j).collect();
            (0..rbs)
                .map(|n| {
                    let mut h = Vec::with_capacity(members.len() * ports);
                    for &u in &members {
                        h.extend_from_slice(&csi.rows[u][n * ports..(n + 1) * ports]);
                    }
                    precode(criterion, &h, members.len(), ports, p_rb, norm)
                })
                .collect()
        })
        .collect()
}
