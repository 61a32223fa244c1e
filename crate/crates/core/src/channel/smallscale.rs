//! Reduced clustered fast-fading model.
//!
//! A link carries `C` single-ray clusters. Cluster `c` has power `p_c`
//! (`Σ p_c = 1`), delay `τ_c`, local angles `(θ_c, ϕ_c)`, a unit-modulus ray
//! phase `φ_c` and a polarization response `r_c(ζ)` for a port slanted at ζ.
//! On RB `n` with center offset `f_n` the channel seen on port `m` is
//!
//! ```text
//! h_m = sqrt(10^(-L/10)) Σ_c sqrt(p_c) exp(-i 2π f_n τ_c) φ_c r_c(ζ_m) a_m(θ_c, ϕ_c)
//! ```
//!
//! Delays are exponential with the configured mean, powers decay
//! exponentially with delay and carry a log-normal perturbation. In LOS the
//! first cluster is the specular path at the exact LOS angles with a
//! Ricean share `K/(K+1)` of the power.
//!
//! The UE is a single vertically polarized element. Its field reaches a port
//! slanted at ζ as `cos ζ·e^{iΦ1} + sin ζ·κ^{-1/2}·e^{iΦ2}`, normalized to unit
//! mean power, where κ is the XPR. The specular LOS ray has no cross term.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ArrayGeometry, ChannelParams};
use crate::deployment::LinkGeometry;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterState {
    pub powers: Vec<f64>,
    pub delays_s: Vec<f64>,
    /// Local azimuth, degrees.
    pub azimuths: Vec<f64>,
    /// Local elevation (positive above boresight), degrees.
    pub elevations: Vec<f64>,
    /// Ray phase φ_c.
    pub phases: Vec<C64>,
    /// Phase of the cross-polar term.
    pub cross_phases: Vec<C64>,
    /// Linear XPR per cluster; infinite for the specular LOS ray.
    pub xpr: Vec<f64>,
}

impl ClusterState {
    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    /// A single cluster at boresight with zero delay and unit phase. Useful
    /// for closed-form checks.
    pub fn single_boresight() -> Self {
        Self {
            powers: vec![1.0],
            delays_s: vec![0.0],
            azimuths: vec![0.0],
            elevations: vec![0.0],
            phases: vec![C64::new(1.0, 0.0)],
            cross_phases: vec![C64::new(1.0, 0.0)],
            xpr: vec![f64::INFINITY],
        }
    }

    /// Polarization response of cluster `c` on a port slanted at `slant_deg`.
    pub fn polarization_response(&self, c: usize, slant_deg: f64) -> C64 {
        let (s, co) = slant_deg.to_radians().sin_cos();
        let inv_xpr = 1.0 / self.xpr[c];
        let norm = (co * co + s * s * inv_xpr).sqrt();
        (self.phases[c] * co + self.cross_phases[c] * (s * inv_xpr.sqrt())) / norm
    }
}

fn laplace<R: Rng + ?Sized>(rng: &mut R, rms: f64) -> f64 {
    let b = rms / 2f64.sqrt();
    let u: f64 = rng.gen::<f64>() - 0.5;
    -b * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
}

fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

/// Draws the cluster state of one link. The number and order of random
/// draws does not depend on the array size.
pub fn generate_clusters<R: Rng + ?Sized>(
    geom: &LinkGeometry,
    los: bool,
    params: &ChannelParams,
    rng: &mut R,
) -> ClusterState {
    let n = if los { params.clusters_los } else { params.clusters_nlos }.max(1);
    let los_az = geom.az_offset;
    let los_el = -geom.zen_offset;
    let xpr = 10f64.powf(params.xpr_db / 10.0);

    let mut delays: Vec<f64> = (0..n)
        .map(|_| -params.delay_spread_s * (1.0 - rng.gen::<f64>()).ln())
        .collect();
    delays.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let first = delays[0];
    delays.iter_mut().for_each(|d| *d -= first);

    let mut powers: Vec<f64> = delays
        .iter()
        .map(|&d| {
            let z: f64 = StandardNormal.sample(rng);
            let decay = if params.delay_spread_s > 0.0 { (-d / params.delay_spread_s).exp() } else { 1.0 };
            decay * 10f64.powf(-params.cluster_shadow_db * z / 10.0)
        })
        .collect();
    let total: f64 = powers.iter().sum();
    powers.iter_mut().for_each(|p| *p /= total);

    let mut azimuths = Vec::with_capacity(n);
    let mut elevations = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    let mut cross_phases = Vec::with_capacity(n);
    let mut xprs = Vec::with_capacity(n);
    for _ in 0..n {
        azimuths.push(los_az + laplace(rng, params.asd_deg));
        elevations.push((los_el + laplace(rng, params.zsd_deg)).clamp(-90.0, 90.0));
        phases.push(unit_phase(rng));
        cross_phases.push(unit_phase(rng));
        xprs.push(xpr);
    }

    if los {
        let k = 10f64.powf(params.ricean_k_db / 10.0);
        powers.iter_mut().for_each(|p| *p /= k + 1.0);
        powers[0] += k / (k + 1.0);
        azimuths[0] = los_az;
        elevations[0] = los_el;
        xprs[0] = f64::INFINITY;
    }

    ClusterState {
        powers,
        delays_s: delays,
        azimuths,
        elevations,
        phases,
        cross_phases,
        xpr: xprs,
    }
}

/// Per-cluster spatial signatures of one link, scaled by the large-scale
/// amplitude. Evaluating an RB is then a phase-weighted sum of `C` vectors.
#[derive(Debug, Clone)]
pub struct LinkBasis {
    delays_s: Vec<f64>,
    /// `C × M`, row-major.
    vectors: Vec<C64>,
    ports: usize,
}

impl LinkBasis {
    pub fn new(state: &ClusterState, array: &ArrayGeometry, attenuation_db: f64) -> Self {
        let amp = 10f64.powf(-attenuation_db / 20.0);
        let pols = array.polarizations();
        let mut vectors = Vec::with_capacity(state.len() * array.ports);
        for c in 0..state.len() {
            let a = array.steering(state.azimuths[c], state.elevations[c]);
            let resp: Vec<C64> = pols
                .iter()
                .map(|p| state.polarization_response(c, p.slant_deg) * (amp * state.powers[c].sqrt()))
                .collect();
            for (m, am) in a.iter().enumerate() {
                let (_, _, pol) = array.port_position(m);
                vectors.push(am * resp[pol]);
            }
        }
        Self { delays_s: state.delays_s.clone(), vectors, ports: array.ports }
    }

    pub fn ports(&self) -> usize {
        self.ports
    }

    /// Writes the channel on a subcarrier group with center offset `freq_hz` into `out`.
    pub fn evaluate_into(&self, freq_hz: f64, out: &mut [C64]) {
        debug_assert_eq!(out.len(), self.ports);
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (c, &tau) in self.delays_s.iter().enumerate() {
            let rot = C64::from_polar(1.0, -2.0 * PI * freq_hz * tau);
            let v = &self.vectors[c * self.ports..(c + 1) * self.ports];
            for (o, x) in out.iter_mut().zip(v) {
                *o += rot * x;
            }
        }
    }

    pub fn evaluate(&self, freq_hz: f64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.ports];
        self.evaluate_into(freq_hz, &mut out);
        out
    }
}

/// Channel row vector of one link on the RB whose center is `freq_hz` away
/// from the band center.
pub fn small_scale(state: &ClusterState, array: &ArrayGeometry, attenuation_db: f64, freq_hz: f64) -> Vec<C64> {
    LinkBasis::new(state, array, attenuation_db).evaluate(freq_hz)
}
