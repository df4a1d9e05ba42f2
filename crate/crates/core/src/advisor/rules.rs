use super::params::{AdvisorParams, Regime, Weights};

pub fn regime(d_min: f64, p: &AdvisorParams) -> Regime {
    if d_min <= p.r_stop {
        Regime::Emergency
    } else if d_min <= p.r_avoid {
        Regime::Avoidance
    } else {
        Regime::Nominal
    }
}

/// Repulsive, free-space or goal heading depending on clearance.
pub fn advised_heading(d_min: f64, psi_rep: f64, psi_free: f64, psi_goal: f64, p: &AdvisorParams) -> f64 {
    match regime(d_min, p) {
        Regime::Emergency => psi_rep,
        Regime::Avoidance => psi_free,
        Regime::Nominal => psi_goal,
    }
}

/// Clearance cap, then the near-goal cap, then battery moderation. All
/// reductions are `min`s, so their order does not matter.
pub fn advised_speed_cap(d_min: f64, battery: f64, d_goal: f64, p: &AdvisorParams) -> f64 {
    let mut cap = match regime(d_min, p) {
        Regime::Emergency => p.v_stop,
        Regime::Avoidance => p.v_avoid,
        Regime::Nominal => p.v_clear,
    };
    if d_goal <= p.d_near {
        cap = cap.min(p.v_near);
    }
    if battery <= p.b_warn {
        cap = cap.min(p.v_avoid);
    }
    if battery <= p.b_crit {
        cap = cap.min(p.v_stop);
    }
    cap
}

pub fn arbitration_weights(regime: Regime, p: &AdvisorParams) -> Weights {
    match regime {
        Regime::Emergency => p.weights.emergency,
        Regime::Avoidance => p.weights.avoidance,
        Regime::Nominal => p.weights.nominal,
    }
}
