//! Driving protocols and time evolution.
//!
//! [`evolve`] is the production integrator (Crank–Nicolson with a midpoint
//! Hamiltonian). [`rk4_oracle_evolve`] and [`adiabatic_frame_evolve`] are
//! independent integrators used to check it. [`split_phase_analysis`]
//! factors a full drive at its midpoint into interfering amplitudes.

mod adiabatic;
mod phase;
mod propagate;
mod protocol;

pub use adiabatic::{adiabatic_frame_evolve, AdiabaticResult};
pub use phase::{delta_phi_estimate, split_phase_analysis, PhaseDecomposition};
pub use propagate::{
    cn_step, evolve, final_probability, rk4_oracle_evolve, transition_probability, Sample, Trajectory,
    TRAJECTORY_CSV_HEADER,
};
pub use protocol::{Protocol, ProtocolKind};

/// Landau–Zener probability `exp(−πΔ²/c)`.
pub fn lz_probability(delta: f64, c: f64) -> f64 {
    (-std::f64::consts::PI * delta * delta / c).exp()
}
