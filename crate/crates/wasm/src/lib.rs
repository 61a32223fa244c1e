//! WebAssembly bindings for the static demo page in `www/`.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js(e: fpcsim::SimError) -> JsError {
    JsError::new(&e.to_string())
}

/// FPC pilot power (dBm) over an attenuation range.
#[wasm_bindgen(js_name = powerCurve)]
pub fn power_curve(p0_dbm: f64, alpha: f64, rb_count: u32, l_min: f64, l_max: f64, points: u32) -> Result<Vec<f64>, JsError> {
    demo::power_curve(p0_dbm, alpha, rb_count as usize, l_min, l_max, points as usize).map_err(js)
}

/// Horizontal beam cut (dBi) from -180 to 180 degrees.
#[wasm_bindgen(js_name = beamCut)]
pub fn beam_cut(ports: u32, steer_az_deg: f64, points: u32) -> Result<Vec<f64>, JsError> {
    demo::beam_cut(ports as usize, steer_az_deg, points as usize).map_err(js)
}

/// Desk-scale drop comparing noPC with one FPC setting.
#[wasm_bindgen]
pub struct DeskDrop(demo::DropSummary);

#[wasm_bindgen]
impl DeskDrop {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, drops: u32, p0_dbm: f64, alpha: f64, reuse: &str, criterion: &str) -> Result<DeskDrop, JsError> {
        demo::desk_drop(seed as u64, drops as u64, p0_dbm, alpha, reuse, criterion).map(DeskDrop).map_err(js)
    }

    /// Site coordinates as `x0, y0, x1, y1, ...` metres.
    pub fn sites(&self) -> Vec<f64> {
        self.0.sites.clone()
    }

    pub fn isd(&self) -> f64 {
        self.0.isd
    }

    /// User coordinates of the first drop, `x, y` pairs.
    pub fn users(&self) -> Vec<f64> {
        self.0.users.clone()
    }

    pub fn anchors(&self) -> Vec<u32> {
        self.0.anchors.clone()
    }

    pub fn orientations(&self) -> Vec<f64> {
        self.0.orientations.clone()
    }

    /// Pilot power of the first drop's users; `point` 0 is noPC, 1 is FPC.
    #[wasm_bindgen(js_name = pilotPower)]
    pub fn pilot_power(&self, point: u32) -> Vec<f64> {
        self.0.pilot_power_dbm[point.min(1) as usize].clone()
    }

    /// Sorted user throughputs pooled over all drops, Mbit/s.
    pub fn throughput(&self, point: u32) -> Vec<f64> {
        self.0.throughput_sorted[point.min(1) as usize].clone()
    }

    pub fn cse(&self, point: u32) -> f64 {
        self.0.cse[point.min(1) as usize]
    }

    pub fn cbt(&self, point: u32) -> f64 {
        self.0.cbt[point.min(1) as usize]
    }
}
