use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::protocol::{step_ends, Protocol};
use crate::error::{Error, Result};
use crate::matrix::{eigensystem, inner, scale, EigenSystem, Spinor};
use crate::models::ModelSpec;

/// Outcome of [`adiabatic_frame_evolve`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticResult {
    /// `⟨0(λ_end)|ψ⟩` in the gauge-fixed eigenbasis.
    pub c_ground: C64,
    /// `⟨1(λ_end)|ψ⟩` in the gauge-fixed eigenbasis.
    pub c_excited: C64,
    /// Largest `|⟨n|ṅ⟩|` met along the path.
    pub max_berry: f64,
}

impl AdiabaticResult {
    pub fn p_excited(&self) -> f64 {
        self.c_excited.norm_sqr()
    }
}

/// Eigenpairs at one λ, rephased so that `⟨ref_n|v_n⟩ > 0`.
struct Frame {
    e: [f64; 2],
    v: [Spinor; 2],
}

fn aligned(model: &ModelSpec, lambda: f64, reference: &EigenSystem) -> Result<Frame> {
    let es = eigensystem(&model.hamiltonian(lambda));
    if es.degenerate {
        return Err(Error::GapCollapse { lambda });
    }
    let align = |v: &Spinor, r: &Spinor| {
        let p = inner(r, v);
        scale(v, p.conj() / p.norm())
    };
    Ok(Frame {
        e: [es.e_ground, es.e_excited],
        v: [align(&es.v_ground, &reference.v_ground), align(&es.v_excited, &reference.v_excited)],
    })
}

type State = ([C64; 2], [f64; 2]);

fn add(y: &State, k: &State, s: f64) -> State {
    (
        [y.0[0] + k.0[0] * s, y.0[1] + k.0[1] * s],
        [y.1[0] + k.1[0] * s, y.1[1] + k.1[1] * s],
    )
}

/// Integrates the coefficient equations in the instantaneous eigenbasis,
///
/// ```text
/// ċₙ = −Σ_{m≠n} cₘ e^{i(θₙ−θₘ)} λ̇ ⟨n|∂λH|m⟩ / (Eₘ − Eₙ),
/// θ̇ₙ = Eₙ − i⟨n|ṅ⟩,
/// ```
///
/// by RK4 with the protocol's step. Within each step the eigenvectors are
/// rephased against the gauge-fixed frame at the step start, and `⟨n|ṅ⟩` is
/// a centred difference of those vectors.
pub fn adiabatic_frame_evolve(model: &ModelSpec, protocol: &Protocol) -> Result<AdiabaticResult> {
    model.validate()?;
    protocol.validate()?;
    let (a, b) = protocol.endpoints();
    if model.is_gapless() && a <= 0.0 && b >= 0.0 {
        return Err(Error::GapCollapse { lambda: 0.0 });
    }
    let gapless = model.is_gapless();
    let c = protocol.c;
    let (t0, t1) = (a / c, b / c);

    let mut reference = eigensystem(&model.hamiltonian(a));
    if reference.degenerate {
        return Err(Error::GapCollapse { lambda: a });
    }
    let mut coeff = [C64::default(); 2];
    coeff[protocol.initial as usize] = C64::new(1.0, 0.0);
    let mut y: State = (coeff, [0.0, 0.0]);
    let mut max_berry = 0.0f64;

    let mut t = t0;
    for t_next in step_ends(t0, protocol.dt, t0, t1) {
        let mut f = |tau: f64, y: &State| -> Result<State> {
            let lambda = c * tau;
            let fr = aligned(model, lambda, &reference)?;
            let dh = model.hamiltonian_derivative(lambda);
            let m01 = dh.sandwich(&fr.v[0], &fr.v[1]);
            let gap = fr.e[1] - fr.e[0];
            let d = 1e-5 * if gapless { lambda.abs() } else { lambda.abs().max(1.0) };
            let lo = aligned(model, lambda - d, &reference)?;
            let hi = aligned(model, lambda + d, &reference)?;
            let mut theta_dot = [0.0; 2];
            for n in 0..2 {
                let dv = [(hi.v[n][0] - lo.v[n][0]) / (2.0 * d), (hi.v[n][1] - lo.v[n][1]) / (2.0 * d)];
                let conn = inner(&fr.v[n], &dv) * c;
                max_berry = max_berry.max(conn.norm());
                theta_dot[n] = fr.e[n] + conn.im;
            }
            let phase = C64::from_polar(1.0, y.1[0] - y.1[1]);
            let c0_dot = -y.0[1] * phase * m01 * (c / gap);
            let c1_dot = y.0[0] * phase.conj() * m01.conj() * (c / gap);
            Ok(([c0_dot, c1_dot], theta_dot))
        };
        let h = t_next - t;
        let k1 = f(t, &y)?;
        let k2 = f(t + 0.5 * h, &add(&y, &k1, 0.5 * h))?;
        let k3 = f(t + 0.5 * h, &add(&y, &k2, 0.5 * h))?;
        let k4 = f(t_next, &add(&y, &k3, h))?;
        for n in 0..2 {
            y.0[n] += (k1.0[n] + (k2.0[n] + k3.0[n]) * 2.0 + k4.0[n]) * (h / 6.0);
            y.1[n] += (k1.1[n] + 2.0 * (k2.1[n] + k3.1[n]) + k4.1[n]) * (h / 6.0);
        }

        let lambda = if t_next == t1 { b } else { c * t_next };
        let end = aligned(model, lambda, &reference)?;
        let next = eigensystem(&model.hamiltonian(lambda));
        y.0[0] *= inner(&next.v_ground, &end.v[0]);
        y.0[1] *= inner(&next.v_excited, &end.v[1]);
        reference = next;
        t = t_next;
    }

    Ok(AdiabaticResult {
        c_ground: y.0[0] * C64::from_polar(1.0, -y.1[0]),
        c_excited: y.0[1] * C64::from_polar(1.0, -y.1[1]),
        max_berry,
    })
}
