use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::protocol::{step_ends, Protocol};
use crate::error::{Error, Result};
use crate::matrix::{eigensystem, inner, EigenSystem, HermitianMatrix2, Spinor};
use crate::models::ModelSpec;

/// One recorded state along a drive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub lambda: f64,
    pub psi: Spinor,
    pub p_ground: f64,
    pub p_excited: f64,
}

impl Sample {
    fn new(model: &ModelSpec, t: f64, lambda: f64, psi: Spinor) -> Self {
        let (p_ground, p_excited) = eigensystem(&model.hamiltonian(lambda)).populations(&psi);
        Self { t, lambda, psi, p_ground, p_excited }
    }
}

/// The sampled evolution of one drive. The last sample is always the state
/// at exactly `λ_end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub model: ModelSpec,
    pub protocol: Protocol,
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,lambda,re_psi0,im_psi0,re_psi1,im_psi1,p_ground,p_excited";

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("a trajectory always holds its endpoints")
    }

    pub fn final_state(&self) -> Spinor {
        self.final_sample().psi
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRAJECTORY_CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                s.t, s.lambda, s.psi[0].re, s.psi[0].im, s.psi[1].re, s.psi[1].im, s.p_ground, s.p_excited
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        crate::io::write(path, &self.to_csv())
    }
}

/// One Crank–Nicolson step `ψ' = (I + i·dt/2·H)⁻¹(I − i·dt/2·H)ψ`.
pub fn cn_step(h: &HermitianMatrix2, psi: &Spinor, dt: f64) -> Spinor {
    let ia = C64::new(0.0, 0.5 * dt);
    let one = C64::new(1.0, 0.0);
    let (a00, a01, a10, a11) = (one + ia * h.h00, ia * h.h01, ia * h.h10(), one + ia * h.h11);
    let r0 = (one - ia * h.h00) * psi[0] - ia * h.h01 * psi[1];
    let r1 = (one - ia * h.h11) * psi[1] - ia * h.h10() * psi[0];
    let det = a00 * a11 - a01 * a10;
    [(a11 * r0 - a01 * r1) / det, (a00 * r1 - a10 * r0) / det]
}

pub(crate) fn nondegenerate(model: &ModelSpec, lambda: f64) -> Result<EigenSystem> {
    let es = eigensystem(&model.hamiltonian(lambda));
    if es.degenerate {
        return Err(Error::Degenerate { lambda, gap: es.gap() });
    }
    Ok(es)
}

/// Crank–Nicolson from `λ_a` to `λ_b` on the time grid `anchor + k·dt`,
/// with `H` taken at the midpoint of each step. `record` sees every step
/// end as `(step index, t, λ, ψ)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn propagate_cn(
    model: &ModelSpec,
    c: f64,
    dt: f64,
    anchor_t: f64,
    lambda_a: f64,
    lambda_b: f64,
    mut psi: Spinor,
    mut record: impl FnMut(usize, f64, f64, &Spinor),
) -> Spinor {
    let (t0, t1) = (lambda_a / c, lambda_b / c);
    let mut t = t0;
    for (k, t_next) in step_ends(anchor_t, dt, t0, t1).enumerate() {
        let h = model.hamiltonian(c * (0.5 * (t + t_next)));
        psi = cn_step(&h, &psi, t_next - t);
        t = t_next;
        let lambda = if t_next == t1 { lambda_b } else { c * t };
        record(k + 1, t, lambda, &psi);
    }
    psi
}

/// Drives `model` through `protocol` from the chosen eigenstate at
/// `λ_start`, recording every `sample_every`-th step (`0`: endpoints only)
/// and always the final state at `λ_end`.
pub fn evolve(model: &ModelSpec, protocol: &Protocol, sample_every: usize) -> Result<Trajectory> {
    model.validate()?;
    protocol.validate()?;
    let (a, b) = protocol.endpoints();
    let psi0 = *nondegenerate(model, a)?.vector(protocol.initial);
    let t0 = a / protocol.c;
    let t1 = b / protocol.c;

    let mut samples = vec![Sample::new(model, t0, a, psi0)];
    let mut last = (t0, a, psi0);
    let mut last_recorded = true;
    propagate_cn(model, protocol.c, protocol.dt, t0, a, b, psi0, |k, t, l, psi| {
        last = (t, l, *psi);
        last_recorded = sample_every != 0 && k % sample_every == 0;
        if last_recorded {
            samples.push(Sample::new(model, t, l, *psi));
        }
    });
    if !last_recorded {
        samples.push(Sample::new(model, t1, b, last.2));
    }
    Ok(Trajectory { samples, model: model.clone(), protocol: *protocol })
}

/// `|⟨1(λ_end)|ψ(t_f)⟩|²`.
pub fn transition_probability(traj: &Trajectory) -> Result<f64> {
    let s = traj.final_sample();
    let es = nondegenerate(&traj.model, s.lambda)?;
    Ok(inner(&es.v_excited, &s.psi).norm_sqr().min(1.0))
}

/// Final transition probability of a drive, without keeping samples.
pub fn final_probability(model: &ModelSpec, protocol: &Protocol) -> Result<f64> {
    transition_probability(&evolve(model, protocol, 0)?)
}

fn rhs(h: &HermitianMatrix2, psi: &Spinor) -> Spinor {
    let hp = h.apply(psi);
    [C64::new(hp[0].im, -hp[0].re), C64::new(hp[1].im, -hp[1].re)]
}

fn axpy(psi: &Spinor, k: &Spinor, s: f64) -> Spinor {
    [psi[0] + k[0] * s, psi[1] + k[1] * s]
}

/// Classical fourth-order Runge–Kutta for `i dψ/dt = H(λ(t))ψ` in the fixed
/// basis, with no renormalization. Only the endpoints are recorded.
/// `dt_oracle` must not exceed `protocol.dt / 5`.
pub fn rk4_oracle_evolve(model: &ModelSpec, protocol: &Protocol, dt_oracle: f64) -> Result<Trajectory> {
    model.validate()?;
    protocol.validate()?;
    if !(dt_oracle > 0.0 && dt_oracle <= protocol.dt / 5.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidProtocol(format!(
            "oracle step {dt_oracle} must be positive and at most dt/5 = {}",
            protocol.dt / 5.0
        )));
    }
    let (a, b) = protocol.endpoints();
    let c = protocol.c;
    let mut psi = *nondegenerate(model, a)?.vector(protocol.initial);
    let (t0, t1) = (a / c, b / c);
    let first = Sample::new(model, t0, a, psi);

    let mut t = t0;
    let mut h_start = model.hamiltonian(a);
    for t_next in step_ends(t0, dt_oracle, t0, t1) {
        let h = t_next - t;
        let h_mid = model.hamiltonian(c * (t + 0.5 * h));
        let h_end = model.hamiltonian(if t_next == t1 { b } else { c * t_next });
        let k1 = rhs(&h_start, &psi);
        let k2 = rhs(&h_mid, &axpy(&psi, &k1, 0.5 * h));
        let k3 = rhs(&h_mid, &axpy(&psi, &k2, 0.5 * h));
        let k4 = rhs(&h_end, &axpy(&psi, &k3, h));
        for i in 0..2 {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        h_start = h_end;
        t = t_next;
    }
    let samples = vec![first, Sample::new(model, t1, b, psi)];
    Ok(Trajectory { samples, model: model.clone(), protocol: *protocol })
}
