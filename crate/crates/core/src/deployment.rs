//! Hexagonal multi-site layout with wraparound, user drops and anchor
//! association.
//!
//! Sites sit on a hexagonal lattice spanned by `a1 = isd·(1, 0)` and
//! `a2 = isd·(1/2, √3/2)`. A cluster of `i² + ij + j²` sites tiles the plane
//! under the translations `i·a1 + j·a2` rotated by multiples of 60°, which
//! gives the six wraparound copies.

use std::f64::consts::PI;

use rand::Rng;

use crate::{Result, SimError};

pub const SECTORS_PER_SITE: usize = 3;

/// Height of one building floor, m.
pub const FLOOR_HEIGHT_M: f64 = 3.0;
/// Height of an outdoor UE, and of a UE on the ground floor, m.
pub const UE_BASE_HEIGHT_M: f64 = 1.5;

pub type Point2 = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub site_positions: Vec<Point2>,
    /// Boresight azimuth of every sector, degrees. Sector `s` belongs to site `s / 3`.
    pub sector_orientations: Vec<f64>,
    pub inter_site_distance: f64,
    pub bs_height: f64,
    /// Zero vector first, then the six cluster translations (none for a single site).
    pub wrap_displacements: Vec<Point2>,
    rings: i64,
    cluster_shift: (i64, i64),
}

/// Wraparound-resolved geometry of one (user, sector) link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d2d: f64,
    pub d3d: f64,
    /// Azimuth of the UE seen in the tilted array frame, degrees in (-180, 180].
    pub az_offset: f64,
    /// Angle below the tilted boresight, degrees. Positive means below.
    pub zen_offset: f64,
    /// Index into `wrap_displacements` of the closest copy of the site.
    pub chosen_wrap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserTerminal {
    /// x, y, height in m.
    pub position: [f64; 3],
    pub indoor: bool,
    /// 1-based floor; 1 for outdoor users.
    pub floor: u32,
    /// Horizontal distance travelled inside the building, m (0 outdoor).
    pub d2d_indoor: f64,
    /// Serving sector. Meaningful once the user has been associated.
    pub anchor_sector: usize,
}

impl UserTerminal {
    pub fn ue_height(&self) -> f64 {
        self.position[2]
    }

    pub fn xy(&self) -> Point2 {
        [self.position[0], self.position[1]]
    }
}

/// Statistics of the user population.
#[derive(Debug, Clone, PartialEq)]
pub struct DropParams {
    pub indoor_fraction: f64,
    /// Indoor penetration depth is uniform in `[0, indoor_depth_max]`.
    pub indoor_depth_max: f64,
    pub min_floors: u32,
    pub max_floors: u32,
    /// Minimum horizontal UE to site distance, m.
    pub min_distance: f64,
}

impl Default for DropParams {
    fn default() -> Self {
        Self {
            indoor_fraction: 0.8,
            indoor_depth_max: 25.0,
            min_floors: 4,
            max_floors: 8,
            min_distance: 35.0,
        }
    }
}

fn lattice(isd: f64, i: f64, j: f64) -> Point2 {
    [isd * (i + 0.5 * j), isd * (j * 3f64.sqrt() / 2.0)]
}

fn rotate(p: Point2, deg: f64) -> Point2 {
    let (s, c) = deg.to_radians().sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

fn hex_distance(i: i64, j: i64) -> i64 {
    (i.abs() + j.abs() + (i + j).abs()) / 2
}

fn norm2(p: Point2) -> f64 {
    p[0].hypot(p[1])
}

/// Builds the standard hexagonal cluster of 1, 7 or 19 sites.
pub fn build_layout(sites: usize, isd: f64, bs_height: f64) -> Result<NetworkLayout> {
    let (rings, cluster_shift) = match sites {
        1 => (0, (1, 0)),
        7 => (1, (2, 1)),
        19 => (2, (3, 2)),
        n => return Err(SimError::config(format!("unsupported site count {n}; expected 1, 7 or 19"))),
    };
    if !(isd > 0.0 && isd.is_finite()) {
        return Err(SimError::config(format!("inter-site distance must be positive, got {isd}")));
    }

    let mut axial: Vec<(i64, i64)> = Vec::new();
    for i in -rings..=rings {
        for j in -rings..=rings {
            if hex_distance(i, j) <= rings {
                axial.push((i, j));
            }
        }
    }
    // Ring by ring, counter-clockwise from the positive x axis.
    axial.sort_by(|a, b| {
        let pa = lattice(1.0, a.0 as f64, a.1 as f64);
        let pb = lattice(1.0, b.0 as f64, b.1 as f64);
        let angle = |p: Point2| {
            let t = p[1].atan2(p[0]);
            if t < -1e-12 {
                t + 2.0 * PI
            } else {
                t.max(0.0)
            }
        };
        hex_distance(a.0, a.1)
            .cmp(&hex_distance(b.0, b.1))
            .then(angle(pa).partial_cmp(&angle(pb)).unwrap())
    });
    let site_positions: Vec<Point2> =
        axial.iter().map(|&(i, j)| lattice(isd, i as f64, j as f64)).collect();

    let sector_orientations = (0..sites * SECTORS_PER_SITE)
        .map(|s| 120.0 * (s % SECTORS_PER_SITE) as f64)
        .collect();

    let mut wrap_displacements = vec![[0.0, 0.0]];
    if sites > 1 {
        let t = lattice(isd, cluster_shift.0 as f64, cluster_shift.1 as f64);
        wrap_displacements.extend((0..6).map(|k| rotate(t, 60.0 * k as f64)));
    }

    Ok(NetworkLayout {
        site_positions,
        sector_orientations,
        inter_site_distance: isd,
        bs_height,
        wrap_displacements,
        rings,
        cluster_shift,
    })
}

impl NetworkLayout {
    pub fn site_count(&self) -> usize {
        self.site_positions.len()
    }

    pub fn sector_count(&self) -> usize {
        self.sector_orientations.len()
    }

    pub fn site_of(&self, sector: usize) -> usize {
        sector / SECTORS_PER_SITE
    }

    /// Position of the sector within its site (0, 1 or 2).
    pub fn sector_index_in_site(&self, sector: usize) -> usize {
        sector % SECTORS_PER_SITE
    }

    /// Closest wraparound copy of `site` to `p`: (displacement index, 2D distance).
    pub fn wrapped_site(&self, site: usize, p: Point2) -> (usize, f64) {
        let s = self.site_positions[site];
        let mut best = (0, f64::INFINITY);
        for (w, d) in self.wrap_displacements.iter().enumerate() {
            let dist = norm2([p[0] - s[0] - d[0], p[1] - s[1] - d[1]]);
            if dist < best.1 {
                best = (w, dist);
            }
        }
        best
    }

    fn nearest_lattice_site(&self, p: Point2) -> (i64, i64, f64) {
        let isd = self.inter_site_distance;
        let j = p[1] / (isd * 3f64.sqrt() / 2.0);
        let i = p[0] / isd - 0.5 * j;
        let (i0, j0) = (i.floor() as i64, j.floor() as i64);
        let mut best = (0, 0, f64::INFINITY);
        for di in -1..=2 {
            for dj in -1..=2 {
                let (ci, cj) = (i0 + di, j0 + dj);
                let q = lattice(isd, ci as f64, cj as f64);
                let d = norm2([p[0] - q[0], p[1] - q[1]]);
                if d < best.2 - 1e-9 {
                    best = (ci, cj, d);
                }
            }
        }
        best
    }

    /// True when `p` lies inside the union of the site hexagons.
    pub fn contains(&self, p: Point2) -> bool {
        let (i, j, _) = self.nearest_lattice_site(p);
        hex_distance(i, j) <= self.rings
    }

    /// Maps any point of the plane onto its representative inside the cluster.
    pub fn wrap_position(&self, p: Point2) -> Point2 {
        let isd = self.inter_site_distance;
        let t1 = lattice(isd, self.cluster_shift.0 as f64, self.cluster_shift.1 as f64);
        let t2 = rotate(t1, 60.0);
        let det = t1[0] * t2[1] - t1[1] * t2[0];
        let x = (p[0] * t2[1] - p[1] * t2[0]) / det;
        let y = (t1[0] * p[1] - t1[1] * p[0]) / det;
        let (x0, y0) = (x.round() as i64, y.round() as i64);
        for r in 0..=2i64 {
            for dx in -r..=r {
                for dy in -r..=r {
                    if dx.abs().max(dy.abs()) != r {
                        continue;
                    }
                    let (m1, m2) = ((x0 + dx) as f64, (y0 + dy) as f64);
                    let q = [p[0] - m1 * t1[0] - m2 * t2[0], p[1] - m1 * t1[1] - m2 * t2[1]];
                    if self.contains(q) {
                        return q;
                    }
                }
            }
        }
        unreachable!("cluster translations tile the plane")
    }

    /// Geometry of the link between `user` and `sector`, with the site taken at
    /// its closest wraparound copy and angles expressed in the array frame of a
    /// panel mechanically tilted down by `downtilt_deg`.
    pub fn link_geometry(&self, user: &UserTerminal, sector: usize, downtilt_deg: f64) -> LinkGeometry {
        let site = self.site_of(sector);
        let (w, d2d) = self.wrapped_site(site, user.xy());
        let s = self.site_positions[site];
        let disp = self.wrap_displacements[w];
        let dx = user.position[0] - s[0] - disp[0];
        let dy = user.position[1] - s[1] - disp[1];
        let dz = user.ue_height() - self.bs_height;
        let d3d = (d2d * d2d + dz * dz).sqrt();

        let phi = dy.atan2(dx) - self.sector_orientations[sector].to_radians();
        let elev = dz.atan2(d2d);
        let u = [elev.cos() * phi.cos(), elev.cos() * phi.sin(), elev.sin()];
        let (st, ct) = downtilt_deg.to_radians().sin_cos();
        let xl = ct * u[0] - st * u[2];
        let yl = u[1];
        let zl = (st * u[0] + ct * u[2]).clamp(-1.0, 1.0);

        LinkGeometry {
            d2d,
            d3d,
            az_offset: yl.atan2(xl).to_degrees(),
            zen_offset: -zl.asin().to_degrees(),
            chosen_wrap: w,
        }
    }

    /// Uniform point over the cluster area at least `min_distance` from its site.
    pub fn sample_position<R: Rng + ?Sized>(&self, rng: &mut R, min_distance: f64) -> Point2 {
        let isd = self.inter_site_distance;
        let circum = isd / 3f64.sqrt();
        let normals: [Point2; 3] = [[1.0, 0.0], rotate([1.0, 0.0], 60.0), rotate([1.0, 0.0], 120.0)];
        loop {
            let site = rng.gen_range(0..self.site_count());
            let x = rng.gen_range(-isd / 2.0..isd / 2.0);
            let y = rng.gen_range(-circum..circum);
            let inside = normals.iter().all(|n| (x * n[0] + y * n[1]).abs() <= isd / 2.0);
            if !inside || x.hypot(y) < min_distance {
                continue;
            }
            let s = self.site_positions[site];
            return [s[0] + x, s[1] + y];
        }
    }
}

/// Draws one unassociated user: uniform position, indoor state and floor.
pub fn sample_user<R: Rng + ?Sized>(layout: &NetworkLayout, params: &DropParams, rng: &mut R) -> UserTerminal {
    let xy = layout.sample_position(rng, params.min_distance);
    let indoor = rng.gen_bool(params.indoor_fraction);
    let (floor, d2d_indoor) = if indoor {
        let floors = rng.gen_range(params.min_floors..=params.max_floors);
        (rng.gen_range(1..=floors), rng.gen_range(0.0..=params.indoor_depth_max))
    } else {
        (1, 0.0)
    };
    let height = UE_BASE_HEIGHT_M + FLOOR_HEIGHT_M * (floor - 1) as f64;
    UserTerminal {
        position: [xy[0], xy[1], height],
        indoor,
        floor,
        d2d_indoor,
        anchor_sector: 0,
    }
}

/// Drops `per_sector × sectors` users uniformly over the cluster. The users
/// are not associated; see [`associate`].
pub fn drop_users<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    per_sector: usize,
    params: &DropParams,
    rng: &mut R,
) -> Vec<UserTerminal> {
    (0..per_sector * layout.sector_count())
        .map(|_| sample_user(layout, params, rng))
        .collect()
}

/// Sector with the smallest attenuation among those holding fewer than
/// `cap` users. Ties go to the lowest sector id. `None` when every sector is full.
pub fn associate(attenuation_db: &[f64], loads: &[usize], cap: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (s, (&l, &load)) in attenuation_db.iter().zip(loads).enumerate() {
        if load >= cap {
            continue;
        }
        match best {
            Some((_, bl)) if l >= bl => {}
            _ => best = Some((s, l)),
        }
    }
    best.map(|(s, _)| s)
}

/// Unconstrained strongest sector (smallest attenuation, lowest id on ties).
pub fn strongest_sector(attenuation_db: &[f64]) -> usize {
    let mut best = 0;
    for (s, &l) in attenuation_db.iter().enumerate() {
        if l < attenuation_db[best] {
            best = s;
        }
    }
    best
}
