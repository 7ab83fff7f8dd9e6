//! Fidelity susceptibility `χ(λ) = |⟨1|∂λH|0⟩ / (E₁ − E₀)|²`.
//!
//! Two independent routes are provided. [`chi_matrix_element`] works from the
//! instantaneous eigenvectors of any model and is the reference value.
//! [`chi_closed_form`] evaluates the family-specific analytic expressions
//! (the general polynomial formula, and the power-law formula shared by the
//! gapless and gapped families), including the removable point `λ = 0`.
//!
//! [`fis_profile`] samples χ on a grid and locates its peaks (maximum
//! fidelity points, MFP) and the minimum-gap point (MGP).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{HermitianMatrix2, DEGENERACY_TOLERANCE};
use crate::models::{graphene_effective_model, ModelSpec};

/// Tolerance in λ for the golden-section refinement of peaks and gap minima.
pub const REFINE_TOLERANCE: f64 = 1e-10;

/// `⟨1|∂H|0⟩` and the gap `E₁ − E₀`, or `None` at a degenerate point.
///
/// With `H − h̄ = [[δ, b], [b*, −δ]]`, `∂H = [[p, q], [q*, s]]` and `δ ≥ 0`,
/// the unnormalized eigenvectors are `|1⟩ ∝ (δ + r, b*)`, `|0⟩ ∝ (−b, δ + r)`
/// with norm² `2r(r + δ)`. Expanding `⟨1|∂H|0⟩` and using
/// `(δ + r)² − |b|² = 2δ(δ + r)` gives
///
/// ```text
/// ⟨1|∂H|0⟩ = [(s − p)b + 2qδ] / 2r + i·b·Im(q b*) / (r(r + δ))
/// ```
///
/// which is free of the cancellation that the naive vector product suffers
/// close to a touching point. The `δ < 0` branch is the mirror image.
pub fn transition_element(h: &HermitianMatrix2, dh: &HermitianMatrix2) -> Option<(num_complex::Complex64, f64)> {
    let delta = 0.5 * (h.h00 - h.h11);
    let b = h.h01;
    let r = delta.hypot(b.norm());
    if 2.0 * r <= DEGENERACY_TOLERANCE * h.norm().max(1.0) {
        return None;
    }
    let (p, s, q) = (dh.h00, dh.h11, dh.h01);
    let im_qb = (q * b.conj()).im;
    let i = num_complex::Complex64::i();
    let m = if delta >= 0.0 {
        (b * (s - p) + q * (2.0 * delta)) / (2.0 * r) + i * b * im_qb / (r * (r + delta))
    } else {
        (b.conj() * (p - s) - q.conj() * (2.0 * delta)) / (2.0 * r) - i * b.conj() * im_qb / (r * (r - delta))
    };
    Some((m, 2.0 * r))
}

/// χ from a Hamiltonian and its derivative at one point.
pub fn chi_from_matrices(h: &HermitianMatrix2, dh: &HermitianMatrix2) -> Option<f64> {
    transition_element(h, dh).map(|(m, gap)| (m.norm() / gap).powi(2))
}

/// χ from the eigenvector matrix element. Fails at a degenerate point.
pub fn chi_matrix_element(model: &ModelSpec, lambda: f64) -> Result<f64> {
    let h = model.hamiltonian(lambda);
    chi_from_matrices(&h, &model.hamiltonian_derivative(lambda)).ok_or_else(|| Error::Degenerate {
        lambda,
        gap: 2.0 * 0.5 * (h.h00 - h.h11).hypot(h.h01.norm()),
    })
}

/// `k²Δ²λ^{2(k−1)} / (4(Δ² + λ^{2k})²)`; `gl(n)` uses `k = n − 1`,
/// `gp(n)` uses `k = n`.
fn chi_power_law(k: u32, delta: f64, lambda: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    let num = kf * kf * delta * delta * lambda.powi(2 * (k as i32 - 1));
    let den = delta * delta + lambda.powi(2 * k as i32);
    num / (4.0 * den * den)
}

/// `(Δ/2 · (a₂ + λk(λ)) / (Δ² + (g(λ)/λ)²))²` for `g(λ) = Σ aₙλⁿ`.
fn chi_polynomial(coeffs: &[f64], delta: f64, lambda: f64) -> f64 {
    // g(λ)/λ = Σ aₙ λ^{n−1}
    let g_over_l = coeffs.iter().rev().fold(0.0, |acc, a| acc * lambda + a);
    // a₂ + λk(λ) = Σ_{n≥2} (n−1) aₙ λ^{n−2}
    let numer = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, a)| acc * lambda + i as f64 * a);
    (0.5 * delta * numer / (delta * delta + g_over_l * g_over_l)).powi(2)
}

/// Closed-form χ, valid at `λ = 0` as well.
///
/// The p-wave and quadratic-graphene models are evaluated through the
/// general polynomial formula (`a₂ = 1/2m`, resp. `a₂ = γa/2` with coupling
/// `2γ`).
pub fn chi_closed_form(model: &ModelSpec, lambda: f64) -> Result<f64> {
    Ok(match model {
        ModelSpec::Gl { n, delta1 } => chi_power_law(n - 1, *delta1, lambda),
        ModelSpec::Gp { n, delta2 } => chi_power_law(*n, *delta2, lambda),
        ModelSpec::PolyDiag { coeffs, delta } => chi_polynomial(coeffs, *delta, lambda),
        ModelSpec::PWave { m, delta_re, delta_im } => {
            chi_polynomial(&[0.0, 0.5 / m], delta_re.hypot(*delta_im), lambda)
        }
        ModelSpec::GrapheneQuadratic { hopping, lattice } => {
            let gamma = 0.75 * lattice * hopping;
            chi_polynomial(&[0.0, 0.5 * gamma * lattice], 2.0 * gamma, lambda)
        }
        ModelSpec::GrapheneTightBinding { .. } => {
            return Err(Error::UnsupportedFamily { family: model.family(), op: "chi_closed_form" })
        }
    })
}

/// `lim_{λ→0} χ(λ)` from the closed form.
pub fn chi_zero_limit(model: &ModelSpec) -> Result<f64> {
    chi_closed_form(model, 0.0)
}

/// The p-wave susceptibility in the form `(2mΔ / ((2mΔ)² + λ²))²`.
///
/// This expression is four times the eigenvector value everywhere; it is kept
/// for comparison only and never used by the rest of the crate.
pub fn chi_pwave_published(m: f64, delta: f64, lambda: f64) -> f64 {
    let x = 2.0 * m * delta;
    (x / (x * x + lambda * lambda)).powi(2)
}

/// The quadratic-graphene susceptibility in the form `(4a / (a²λ² + 16))²`.
///
/// Like [`chi_pwave_published`], four times the eigenvector value; comparison
/// only.
pub fn chi_graphene_published(lattice: f64, lambda: f64) -> f64 {
    (4.0 * lattice / (lattice * lattice * lambda * lambda + 16.0)).powi(2)
}

/// Closed-form peak locations of χ, when the family has them.
///
/// `gl(n ≥ 3)`: `±((n−2)Δ₁²/n)^{1/(2(n−1))}`; `gp(n ≥ 2)`:
/// `±((n−1)Δ₂²/(n+1))^{1/2n}`. Single-peaked families report `[0]`;
/// `gl(1)` has `χ ≡ 0` and reports no peak.
pub fn mfp_closed_form(model: &ModelSpec) -> Option<Vec<f64>> {
    match model {
        ModelSpec::Gl { n: 1, .. } => Some(vec![]),
        ModelSpec::Gl { n: 2, .. } | ModelSpec::Gp { n: 1, .. } => Some(vec![0.0]),
        ModelSpec::Gl { n, delta1 } => {
            let nf = *n as f64;
            let x = ((nf - 2.0) / nf * delta1 * delta1).powf(1.0 / (2.0 * (nf - 1.0)));
            Some(vec![-x, x])
        }
        ModelSpec::Gp { n, delta2 } => {
            let nf = *n as f64;
            let x = ((nf - 1.0) / (nf + 1.0) * delta2 * delta2).powf(1.0 / (2.0 * nf));
            Some(vec![-x, x])
        }
        ModelSpec::PWave { .. } | ModelSpec::GrapheneQuadratic { .. } => Some(vec![0.0]),
        _ => None,
    }
}

/// χ sampled on a grid, with its peaks and the minimum-gap point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisProfile {
    pub lambdas: Vec<f64>,
    pub chi: Vec<f64>,
    /// Refined local maxima of χ, in increasing λ.
    pub mfp: Vec<f64>,
    pub mgp: f64,
    pub chi_at_zero: f64,
}

/// χ at one point: the matrix element where it is defined, otherwise the
/// closed-form value (which covers the removable touching point).
fn chi_value(model: &ModelSpec, lambda: f64) -> Result<f64> {
    match chi_matrix_element(model, lambda) {
        Ok(v) => Ok(v),
        Err(Error::Degenerate { .. }) => match model {
            ModelSpec::GrapheneTightBinding { .. } if lambda == 0.0 => chi_zero_limit(&graphene_effective_model(model)?),
            _ => chi_closed_form(model, lambda),
        },
        Err(e) => Err(e),
    }
}

/// χ for peak refinement: closed form where the family has one.
fn chi_smooth(model: &ModelSpec, lambda: f64) -> Result<f64> {
    match chi_closed_form(model, lambda) {
        Err(Error::UnsupportedFamily { .. }) => chi_value(model, lambda),
        other => other,
    }
}

/// Evenly spaced samples including both endpoints.
pub fn linspace(min: f64, max: f64, samples: usize) -> Vec<f64> {
    let step = (max - min) / (samples - 1) as f64;
    (0..samples)
        .map(|i| if i + 1 == samples { max } else { min + step * i as f64 })
        .collect()
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Indices `(first, last)` of plateaus in `v` that are strictly higher than
/// both neighbours. Endpoints never qualify.
pub(crate) fn interior_maxima(v: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < v.len() {
        if v[i] > v[i - 1] {
            let mut j = i;
            while j + 1 < v.len() && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < v.len() && v[j + 1] < v[i] {
                out.push((i, j));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Topographic prominence of `v[i]`: its height above the higher of the two
/// lowest points reached before meeting a higher value (or the edge) on
/// either side.
pub(crate) fn prominence(v: &[f64], i: usize) -> f64 {
    let side = |range: &mut dyn Iterator<Item = usize>| {
        let mut low = v[i];
        for j in range {
            if v[j] > v[i] {
                break;
            }
            low = low.min(v[j]);
        }
        low
    };
    let left = side(&mut (0..i).rev());
    let right = side(&mut (i + 1..v.len()));
    v[i] - left.max(right)
}

/// `(E₁ − E₀)² / 4`.
fn gap_squared(model: &ModelSpec, l: f64) -> f64 {
    let h = model.hamiltonian(l);
    let d = 0.5 * (h.h00 - h.h11);
    d * d + h.h01.norm_sqr()
}

/// Bisection on the sign of `d(gap²)/dλ` inside `[a, b]`, which stays
/// well-conditioned on the flat bottom of a high-order minimum. Falls back
/// to `grid_best` when the bracket holds no sign change.
fn minimum_gap_point(model: &ModelSpec, mut a: f64, mut b: f64, grid_best: f64) -> f64 {
    let slope = |l: f64| {
        let (h, dh) = (model.hamiltonian(l), model.hamiltonian_derivative(l));
        0.25 * (h.h00 - h.h11) * (dh.h00 - dh.h11) + (h.h01.conj() * dh.h01).re
    };
    let (fa, fb) = (slope(a), slope(b));
    if !(fa <= 0.0 && fb >= 0.0) {
        return grid_best;
    }
    while b - a > REFINE_TOLERANCE {
        let m = 0.5 * (a + b);
        let fm = slope(m);
        if fm == 0.0 {
            return m;
        }
        if fm < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Samples χ over `[lambda_min, lambda_max]` and locates its peaks and the
/// minimum of the gap.
pub fn fis_profile(model: &ModelSpec, lambda_min: f64, lambda_max: f64, samples: usize) -> Result<FisProfile> {
    model.validate()?;
    if samples < 3 {
        return Err(Error::InvalidGrid(format!("need at least 3 samples, got {samples}")));
    }
    if !(lambda_min.is_finite() && lambda_max.is_finite() && lambda_min < lambda_max) {
        return Err(Error::InvalidGrid(format!("need finite lambda_min < lambda_max, got {lambda_min}..{lambda_max}")));
    }

    let lambdas = linspace(lambda_min, lambda_max, samples);
    let chi = lambdas.iter().map(|&l| chi_value(model, l)).collect::<Result<Vec<_>>>()?;

    let floor = 1e-9 * chi.iter().fold(0.0f64, |m, &c| m.max(c));
    let mut mfp = Vec::new();
    for (i, j) in interior_maxima(&chi).into_iter().filter(|&(i, _)| prominence(&chi, i) > floor) {
        let (a, b) = (lambdas[i - 1], lambdas[j + 1]);
        // chi_smooth only fails for unsupported inputs, which chi_value already ruled out.
        let peak = golden_max(|l| chi_smooth(model, l).unwrap_or(f64::NAN), a, b, REFINE_TOLERANCE);
        mfp.push(peak);
    }

    let gaps: Vec<f64> = lambdas.iter().map(|&l| gap_squared(model, l)).collect();
    let gmin = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let first = gaps.iter().position(|&g| g == gmin).unwrap_or(0);
    let last = gaps.iter().rposition(|&g| g == gmin).unwrap_or(0);
    let mgp = minimum_gap_point(
        model,
        lambdas[first.saturating_sub(1)],
        lambdas[(last + 1).min(samples - 1)],
        0.5 * (lambdas[first] + lambdas[last]),
    );

    let chi_at_zero = match model {
        ModelSpec::GrapheneTightBinding { .. } => chi_zero_limit(&graphene_effective_model(model)?)?,
        _ => chi_zero_limit(model)?,
    };

    Ok(FisProfile { lambdas, chi, mfp, mgp, chi_at_zero })
}
