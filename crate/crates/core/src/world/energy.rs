use serde::{Deserialize, Serialize};

/// Per-step energy draw `C = hover + motion * speed^2`, plus the battery
/// capacity. The defaults make top speed (0.0042/step) exceed the 0.004
/// battery-drop penalty threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyModel {
    pub hover: f64,
    pub motion: f64,
    pub b_max: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self { hover: 0.0010, motion: 0.0002, b_max: 1.0 }
    }
}

impl EnergyModel {
    pub fn consumption_rate(&self, speed: f64) -> f64 {
        self.hover + self.motion * speed * speed
    }
}

/// `clip(b - dt * c, 0, b_max)`.
pub fn update_battery(battery: f64, consumption: f64, dt: f64, b_max: f64) -> f64 {
    (battery - dt * consumption).max(0.0).min(b_max)
}
