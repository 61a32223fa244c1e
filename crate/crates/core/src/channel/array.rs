use std::f64::consts::PI;

use crate::{Result, SimError, C64};

/// How the M ports are laid out on the 4-row panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortLayout {
    /// 4 rows × M/8 column positions, each holding a ±45° slanted pair.
    DualPolarized,
    /// 4 rows × M/4 columns of vertically polarized ports.
    SinglePolarized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization {
    /// Slant angle of the port, degrees.
    pub slant_deg: f64,
}

/// Uniform planar array on the BS panel. The panel lies in the local y-z
/// plane and faces local +x; the local frame already includes the mechanical
/// downtilt.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub ports: usize,
    pub rows: usize,
    pub columns: usize,
    pub layout: PortLayout,
    /// In wavelengths, both directions.
    pub element_spacing: f64,
    pub downtilt_deg: f64,
    pub element_gain_max_dbi: f64,
    pub hpbw_az_deg: f64,
    pub hpbw_zen_deg: f64,
    pub fbr_db: f64,
}

impl ArrayGeometry {
    pub const ROWS: usize = 4;

    /// Dual-polarized panel with the default element parameters.
    pub fn new(ports: usize) -> Result<Self> {
        Self::with_layout(ports, PortLayout::DualPolarized)
    }

    pub fn with_layout(ports: usize, layout: PortLayout) -> Result<Self> {
        let per_row = match layout {
            PortLayout::DualPolarized => 8,
            PortLayout::SinglePolarized => 4,
        };
        if ports == 0 || ports % per_row != 0 {
            return Err(SimError::config(format!(
                "array size {ports} must be a positive multiple of {per_row} for {layout:?}"
            )));
        }
        Ok(Self {
            ports,
            rows: Self::ROWS,
            columns: ports / per_row,
            layout,
            element_spacing: 0.5,
            downtilt_deg: 12.0,
            element_gain_max_dbi: 8.0,
            hpbw_az_deg: 65.0,
            hpbw_zen_deg: 65.0,
            fbr_db: 30.0,
        })
    }

    /// `(row, column, polarization index)` of a port. Polarization index is
    /// 0 for +45° (or vertical) and 1 for -45°.
    pub fn port_position(&self, port: usize) -> (usize, usize, usize) {
        match self.layout {
            PortLayout::DualPolarized => {
                let pol = port % 2;
                let col = (port / 2) % self.columns;
                let row = port / (2 * self.columns);
                (row, col, pol)
            }
            PortLayout::SinglePolarized => (port / self.columns, port % self.columns, 0),
        }
    }

    pub fn polarizations(&self) -> &'static [Polarization] {
        match self.layout {
            PortLayout::DualPolarized => &[Polarization { slant_deg: 45.0 }, Polarization { slant_deg: -45.0 }],
            PortLayout::SinglePolarized => &[Polarization { slant_deg: 0.0 }],
        }
    }

    /// Geometric steering vector for a plane wave from local azimuth `az_deg`
    /// and elevation `el_deg` (positive above the array boresight), without
    /// polarization.
    pub fn steering(&self, az_deg: f64, el_deg: f64) -> Vec<C64> {
        let (az, el) = (az_deg.to_radians(), el_deg.to_radians());
        let ky = 2.0 * PI * self.element_spacing * el.cos() * az.sin();
        let kz = 2.0 * PI * self.element_spacing * el.sin();
        (0..self.ports)
            .map(|p| {
                let (row, col, _) = self.port_position(p);
                C64::from_polar(1.0, ky * col as f64 + kz * row as f64)
            })
            .collect()
    }
}
