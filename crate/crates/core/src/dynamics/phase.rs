use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::propagate::{nondegenerate, propagate_cn};
use super::protocol::{Protocol, ProtocolKind};
use crate::error::{Error, Result};
use crate::fis::mfp_closed_form;
use crate::matrix::{inner, scale, Level, Spinor};
use crate::models::ModelSpec;

/// Split of a full `−Λ → Λ` drive at its midpoint.
///
/// `α₊ = ⟨1(mid)|ψ(mid)⟩`, `α₋ = ⟨0(mid)|ψ(mid)⟩`; `β_s^±` is the overlap of
/// the evolved midpoint eigenstate `s` (`p`: excited, `m`: ground) with the
/// final excited (`+`) or ground (`−`) state. The transition probability is
/// `|α₊β₊⁺ + α₋β₋⁺|²`, and `delta_phi = arg(α₊β₊⁺ (α₋β₋⁺)*)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDecomposition {
    pub alpha_plus: C64,
    pub alpha_minus: C64,
    pub beta_pp: C64,
    pub beta_pm: C64,
    pub beta_mp: C64,
    pub beta_mm: C64,
    /// In `[−π, π)`.
    pub delta_phi: f64,
    pub p_reconstructed: f64,
    pub p_direct: f64,
    /// λ at which the drive was split.
    pub midpoint: f64,
}

impl PhaseDecomposition {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain numeric struct")
    }
}

/// Principal argument mapped onto `[−π, π)`.
pub(crate) fn wrap_phase(x: f64) -> f64 {
    let w = (x + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Evolves `−Λ → mid → Λ` and decomposes the result into the two paths
/// through the midpoint eigenstates. The midpoint is `λ = 0` for gapped
/// models and `λ = −ε` for gapless ones. Both legs run on the time grid of
/// the single-shot drive, so the reconstruction differs from `p_direct`
/// only by the one step split at the midpoint.
pub fn split_phase_analysis(model: &ModelSpec, protocol: &Protocol) -> Result<PhaseDecomposition> {
    split_with_gauge(model, protocol, |_, _| C64::new(1.0, 0.0))
}

/// As [`split_phase_analysis`], with every eigenvector multiplied by
/// `gauge(λ, level)` (a unit phase) before it is used.
pub(crate) fn split_with_gauge(
    model: &ModelSpec,
    protocol: &Protocol,
    gauge: impl Fn(f64, Level) -> C64,
) -> Result<PhaseDecomposition> {
    model.validate()?;
    protocol.validate()?;
    if protocol.kind != ProtocolKind::Pl2 {
        return Err(Error::InvalidProtocol(format!("split-phase analysis needs a pl2 drive, got {}", protocol.name())));
    }
    let (c, dt, lam) = (protocol.c, protocol.dt, protocol.lambda_inf);
    let mid = if model.is_gapless() { -protocol.epsilon } else { 0.0 };
    let anchor = -lam / c;

    let state = |lambda: f64, level: Level| -> Result<Spinor> {
        let es = nondegenerate(model, lambda)?;
        Ok(scale(es.vector(level), gauge(lambda, level)))
    };
    let leg = |a: f64, b: f64, psi: Spinor| propagate_cn(model, c, dt, anchor, a, b, psi, |_, _, _, _| {});

    let psi0 = state(-lam, protocol.initial)?;
    let psi_mid = leg(-lam, mid, psi0);
    let (up_mid, down_mid) = (state(mid, Level::Excited)?, state(mid, Level::Ground)?);
    let alpha_plus = inner(&up_mid, &psi_mid);
    let alpha_minus = inner(&down_mid, &psi_mid);

    let (up_end, down_end) = (state(lam, Level::Excited)?, state(lam, Level::Ground)?);
    let from_up = leg(mid, lam, up_mid);
    let from_down = leg(mid, lam, down_mid);
    let beta_pp = inner(&up_end, &from_up);
    let beta_pm = inner(&down_end, &from_up);
    let beta_mp = inner(&up_end, &from_down);
    let beta_mm = inner(&down_end, &from_down);

    let direct = leg(-lam, lam, psi0);
    let p_direct = inner(&up_end, &direct).norm_sqr();

    let a = alpha_plus * beta_pp;
    let b = alpha_minus * beta_mp;
    for (which, z) in [("alpha_plus*beta_pp", a), ("alpha_minus*beta_mp", b)] {
        if z.norm() < 1e-12 {
            return Err(Error::VanishingAmplitude { which, magnitude: z.norm() });
        }
    }

    Ok(PhaseDecomposition {
        alpha_plus,
        alpha_minus,
        beta_pp,
        beta_pm,
        beta_mp,
        beta_mm,
        delta_phi: wrap_phase((a * b.conj()).arg()),
        p_reconstructed: (a + b).norm_sqr(),
        p_direct,
        midpoint: mid,
    })
}

/// Flat-region estimate `(4λ₊Δ₂/c) mod 2π − π` of the interference phase
/// of a gapped model, with `λ₊` the positive peak of χ.
pub fn delta_phi_estimate(model: &ModelSpec, c: f64) -> Result<f64> {
    let ModelSpec::Gp { n, delta2 } = model else {
        return Err(Error::UnsupportedFamily { family: model.family(), op: "delta_phi_estimate" });
    };
    if *n < 2 {
        return Err(Error::InvalidModel(format!("delta_phi_estimate needs n >= 2, got {n}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidProtocol(format!("c must be finite and > 0, got {c}")));
    }
    if !(delta2.is_finite() && *delta2 >= 0.0) {
        return Err(Error::InvalidModel(format!("delta2 must be finite and >= 0, got {delta2}")));
    }
    let peak = mfp_closed_form(model).and_then(|v| v.last().copied()).unwrap_or(0.0);
    Ok((4.0 * peak * delta2 / c).rem_euclid(TAU) - PI)
}
