//! Radio parameters and link-budget helpers.

/// Boltzmann noise density at 290 K.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// OFDM symbols per 1 ms subframe.
pub const SUBCARRIERS_PER_RB: u32 = 12;
pub const SUBFRAME_SYMBOLS: u32 = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    pub carrier_ghz: f64,
    /// Number of resource blocks N.
    pub rb_count: usize,
    pub rb_bandwidth_hz: f64,
    pub bs_max_power_dbm: f64,
    pub ue_max_power_dbm: f64,
    pub bs_noise_figure_db: f64,
    pub ue_noise_figure_db: f64,
    pub bs_height_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            carrier_ghz: 2.0,
            rb_count: 50,
            rb_bandwidth_hz: 180e3,
            bs_max_power_dbm: 46.0,
            ue_max_power_dbm: 23.0,
            bs_noise_figure_db: 5.0,
            ue_noise_figure_db: 9.0,
            bs_height_m: 25.0,
        }
    }
}

impl RadioParams {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)
    }

    /// Channel bandwidth. 50 RBs of 180 kHz occupy a 10 MHz channel, so the
    /// occupancy ratio of 0.9 is kept when N changes.
    pub fn system_bandwidth_hz(&self) -> f64 {
        self.rb_count as f64 * self.rb_bandwidth_hz / 0.9
    }

    /// Thermal noise over one RB plus receiver noise figure, in dBm.
    pub fn rb_noise_dbm(&self, noise_figure_db: f64) -> f64 {
        THERMAL_NOISE_DBM_PER_HZ + 10.0 * self.rb_bandwidth_hz.log10() + noise_figure_db
    }

    /// Uplink (BS receiver) noise variance per RB per port, mW.
    pub fn uplink_noise_mw(&self) -> f64 {
        dbm_to_mw(self.rb_noise_dbm(self.bs_noise_figure_db))
    }

    /// Noise variance per port left on an LS channel estimate, mW. With
    /// `despread`, the pilot energy of `tau` symbols on every subcarrier of
    /// the RB is combined, which divides the per-RB noise by `12 * tau`.
    pub fn pilot_noise_mw(&self, tau: u32, despread: bool) -> f64 {
        if despread {
            self.uplink_noise_mw() / (SUBCARRIERS_PER_RB * tau) as f64
        } else {
            self.uplink_noise_mw()
        }
    }

    /// Downlink (UE receiver) noise variance per RB, mW.
    pub fn downlink_noise_mw(&self) -> f64 {
        dbm_to_mw(self.rb_noise_dbm(self.ue_noise_figure_db))
    }

    /// BS transmit power available on one RB, mW.
    pub fn bs_power_per_rb_mw(&self) -> f64 {
        dbm_to_mw(self.bs_max_power_dbm) / self.rb_count as f64
    }

    /// Center frequency offset of RB `n` from the band center, Hz.
    pub fn rb_center_offset_hz(&self, n: usize) -> f64 {
        (n as f64 - (self.rb_count as f64 - 1.0) / 2.0) * self.rb_bandwidth_hz
    }
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
