//! Hamiltonian families with a single band-touching (or minimum-gap) point
//! at `λ = 0`.
//!
//! Every family is a 2×2 Hermitian matrix `H(λ)` written in a fixed
//! (diabatic) basis. Both `H(λ)` and `∂λH(λ)` are evaluated analytically.
//!
//! | family                | diagonal             | off-diagonal                |
//! |-----------------------|----------------------|-----------------------------|
//! | `pw`                  | `±λ²/2m`             | `λΔ` (complex `Δ`)          |
//! | `graphene_quadratic`  | `±γaλ²/2`            | `−2γλ`, `γ = 3ah/4`         |
//! | `graphene_tb`         | `0`                  | `s(K + (λ, 0))`             |
//! | `poly`                | `±Σ aₖλᵏ`            | `Δλ`                        |
//! | `gl`                  | `±λⁿ`                | `Δ₁λ`                       |
//! | `gp`                  | `±λⁿ`                | `Δ₂`                        |

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix2;

/// One Hamiltonian family together with its parameters.
///
/// The JSON form is an object tagged by `"family"`; the parameter key names
/// are part of the command-line contract:
///
/// ```
/// use bandtouch::ModelSpec;
///
/// let m = ModelSpec::from_json(r#"{"family": "gl", "n": 4, "delta1": 0.5}"#).unwrap();
/// assert_eq!(m, ModelSpec::gl(4, 0.5));
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum ModelSpec {
    /// One-dimensional p-wave superconductor at its phase boundary.
    #[serde(rename = "pw")]
    PWave { m: f64, delta_re: f64, delta_im: f64 },
    /// Quadratic expansion of graphene around `K` along `q_y = 0`, in the
    /// real-symmetric gauge.
    #[serde(rename = "graphene_quadratic")]
    GrapheneQuadratic { hopping: f64, lattice: f64 },
    /// Full nearest-neighbour tight-binding graphene on the line through `K`
    /// with `k = K + (λ, 0)`.
    #[serde(rename = "graphene_tb")]
    GrapheneTightBinding { hopping: f64, lattice: f64 },
    /// Polynomial diagonal `g(λ) = Σ aₖλᵏ` (`coeffs[0]` is `a₁`) with linear
    /// coupling `Δλ`.
    #[serde(rename = "poly")]
    PolyDiag {
        coeffs: Vec<f64>,
        #[serde(rename = "delta1")]
        delta: f64,
    },
    /// Gapless family: diagonal `±λⁿ`, off-diagonal `Δ₁λ`.
    #[serde(rename = "gl")]
    Gl { n: u32, delta1: f64 },
    /// Gapped family: diagonal `±λⁿ`, off-diagonal `Δ₂`.
    #[serde(rename = "gp")]
    Gp { n: u32, delta2: f64 },
}

impl ModelSpec {
    pub fn gl(n: u32, delta1: f64) -> Self {
        ModelSpec::Gl { n, delta1 }
    }

    pub fn gp(n: u32, delta2: f64) -> Self {
        ModelSpec::Gp { n, delta2 }
    }

    pub fn pwave(m: f64, delta: C64) -> Self {
        ModelSpec::PWave { m, delta_re: delta.re, delta_im: delta.im }
    }

    pub fn poly(coeffs: Vec<f64>, delta: f64) -> Self {
        ModelSpec::PolyDiag { coeffs, delta }
    }

    pub fn graphene_tb(hopping: f64, lattice: f64) -> Self {
        ModelSpec::GrapheneTightBinding { hopping, lattice }
    }

    pub fn graphene_quadratic(hopping: f64, lattice: f64) -> Self {
        ModelSpec::GrapheneQuadratic { hopping, lattice }
    }

    /// The JSON tag of this family.
    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::PWave { .. } => "pw",
            ModelSpec::GrapheneQuadratic { .. } => "graphene_quadratic",
            ModelSpec::GrapheneTightBinding { .. } => "graphene_tb",
            ModelSpec::PolyDiag { .. } => "poly",
            ModelSpec::Gl { .. } => "gl",
            ModelSpec::Gp { .. } => "gp",
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{name} must be finite and > 0, got {v}")))
            }
        }
        match self {
            ModelSpec::PWave { m, delta_re, delta_im } => {
                positive("m", *m)?;
                if !(delta_re.is_finite() && delta_im.is_finite()) || (*delta_re == 0.0 && *delta_im == 0.0) {
                    return Err(Error::InvalidModel("p-wave coupling must be finite and nonzero".into()));
                }
                Ok(())
            }
            ModelSpec::GrapheneQuadratic { hopping, lattice }
            | ModelSpec::GrapheneTightBinding { hopping, lattice } => {
                positive("hopping", *hopping)?;
                positive("lattice", *lattice)
            }
            ModelSpec::PolyDiag { coeffs, delta } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidModel("poly needs at least one coefficient".into()));
                }
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidModel("poly coefficients must be finite".into()));
                }
                if !delta.is_finite() || *delta == 0.0 {
                    return Err(Error::InvalidModel(format!("poly coupling must be finite and nonzero, got {delta}")));
                }
                Ok(())
            }
            ModelSpec::Gl { n, delta1 } => {
                if *n < 1 {
                    return Err(Error::InvalidModel("gl exponent n must be >= 1".into()));
                }
                positive("delta1", *delta1)
            }
            ModelSpec::Gp { n, delta2 } => {
                if *n < 1 {
                    return Err(Error::InvalidModel("gp exponent n must be >= 1".into()));
                }
                positive("delta2", *delta2)
            }
        }
    }

    /// Parses and validates the JSON form.
    pub fn from_json(s: &str) -> Result<Self> {
        let model: ModelSpec = serde_json::from_str(s)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization is infallible")
    }

    /// True when the two levels touch at `λ = 0`. Only the gapped family
    /// keeps a finite gap everywhere.
    pub fn is_gapless(&self) -> bool {
        !matches!(self, ModelSpec::Gp { .. })
    }

    /// Complex coupling of the p-wave model.
    pub fn pwave_delta(&self) -> Option<C64> {
        match self {
            ModelSpec::PWave { delta_re, delta_im, .. } => Some(C64::new(*delta_re, *delta_im)),
            _ => None,
        }
    }

    /// `γ = 3ah/4` for the graphene families.
    pub fn graphene_gamma(&self) -> Option<f64> {
        match self {
            ModelSpec::GrapheneQuadratic { hopping, lattice }
            | ModelSpec::GrapheneTightBinding { hopping, lattice } => Some(0.75 * lattice * hopping),
            _ => None,
        }
    }

    /// Copy with the coupling replaced: `Δ₁` for `gl`, `Δ₂` for `gp`, `Δ` for
    /// `poly`, and `|Δ|` (phase kept) for `pw`.
    pub fn with_coupling(&self, value: f64) -> Result<Self> {
        let out = match self {
            ModelSpec::Gl { n, .. } => ModelSpec::Gl { n: *n, delta1: value },
            ModelSpec::Gp { n, .. } => ModelSpec::Gp { n: *n, delta2: value },
            ModelSpec::PolyDiag { coeffs, .. } => ModelSpec::PolyDiag { coeffs: coeffs.clone(), delta: value },
            ModelSpec::PWave { m, delta_re, delta_im } => {
                let phase = delta_im.atan2(*delta_re);
                ModelSpec::PWave { m: *m, delta_re: value * phase.cos(), delta_im: value * phase.sin() }
            }
            _ => return Err(Error::UnsupportedFamily { family: self.family(), op: "coupling sweep" }),
        };
        out.validate()?;
        Ok(out)
    }

    /// Copy with the exponent `n` replaced (`gl` and `gp` only).
    pub fn with_exponent(&self, n: u32) -> Result<Self> {
        let out = match self {
            ModelSpec::Gl { delta1, .. } => ModelSpec::Gl { n, delta1: *delta1 },
            ModelSpec::Gp { delta2, .. } => ModelSpec::Gp { n, delta2: *delta2 },
            _ => return Err(Error::UnsupportedFamily { family: self.family(), op: "exponent sweep" }),
        };
        out.validate()?;
        Ok(out)
    }

    /// `H(λ)`.
    pub fn hamiltonian(&self, lambda: f64) -> HermitianMatrix2 {
        let l = lambda;
        match self {
            ModelSpec::PWave { m, delta_re, delta_im } => {
                let d = l * l / (2.0 * m);
                HermitianMatrix2::new(d, -d, C64::new(*delta_re, *delta_im) * l)
            }
            ModelSpec::GrapheneQuadratic { hopping, lattice } => {
                let gamma = 0.75 * lattice * hopping;
                let d = gamma * lattice * l * l / 2.0;
                HermitianMatrix2::real(d, -d, -2.0 * gamma * l)
            }
            ModelSpec::GrapheneTightBinding { hopping, lattice } => {
                let (kx, ky) = dirac_point(*lattice);
                HermitianMatrix2::new(0.0, 0.0, structure_factor(*hopping, *lattice, kx + l, ky))
            }
            ModelSpec::PolyDiag { coeffs, delta } => {
                let g = poly_eval(coeffs, l);
                HermitianMatrix2::real(g, -g, delta * l)
            }
            ModelSpec::Gl { n, delta1 } => {
                let d = l.powi(*n as i32);
                HermitianMatrix2::real(d, -d, delta1 * l)
            }
            ModelSpec::Gp { n, delta2 } => {
                let d = l.powi(*n as i32);
                HermitianMatrix2::real(d, -d, *delta2)
            }
        }
    }

    /// `∂λH(λ)`, entrywise and analytic.
    pub fn hamiltonian_derivative(&self, lambda: f64) -> HermitianMatrix2 {
        let l = lambda;
        match self {
            ModelSpec::PWave { m, delta_re, delta_im } => {
                let d = l / m;
                HermitianMatrix2::new(d, -d, C64::new(*delta_re, *delta_im))
            }
            ModelSpec::GrapheneQuadratic { hopping, lattice } => {
                let gamma = 0.75 * lattice * hopping;
                let d = gamma * lattice * l;
                HermitianMatrix2::real(d, -d, -2.0 * gamma)
            }
            ModelSpec::GrapheneTightBinding { hopping, lattice } => {
                let (kx, ky) = dirac_point(*lattice);
                HermitianMatrix2::new(0.0, 0.0, structure_factor_dkx(*hopping, *lattice, kx + l, ky))
            }
            ModelSpec::PolyDiag { coeffs, delta } => {
                let g = poly_derivative(coeffs, l);
                HermitianMatrix2::real(g, -g, *delta)
            }
            ModelSpec::Gl { n, delta1 } => {
                let d = power_derivative(*n, l);
                HermitianMatrix2::real(d, -d, *delta1)
            }
            ModelSpec::Gp { n, .. } => {
                let d = power_derivative(*n, l);
                HermitianMatrix2::real(d, -d, 0.0)
            }
        }
    }
}

/// `Σ aₖλᵏ` with `coeffs[k-1] = aₖ`.
fn poly_eval(coeffs: &[f64], l: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, a| (acc + a) * l)
}

fn poly_derivative(coeffs: &[f64], l: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, a)| acc * l + (i + 1) as f64 * a)
}

fn power_derivative(n: u32, l: f64) -> f64 {
    n as f64 * l.powi(n as i32 - 1)
}

/// Dirac point `K = (2π/3a)(1, 1/√3)`.
pub fn dirac_point(lattice: f64) -> (f64, f64) {
    let k = 2.0 * PI / (3.0 * lattice);
    (k, k / 3f64.sqrt())
}

fn structure_factor(h: f64, a: f64, kx: f64, ky: f64) -> C64 {
    let c = (0.5 * 3f64.sqrt() * ky * a).cos();
    -h * C64::from_polar(1.0, -kx * a) * (1.0 + 2.0 * C64::from_polar(1.0, 1.5 * kx * a) * c)
}

// s = −h (e^{−ik_x a} + 2C e^{ik_x a/2})
fn structure_factor_dkx(h: f64, a: f64, kx: f64, ky: f64) -> C64 {
    let c = (0.5 * 3f64.sqrt() * ky * a).cos();
    let i = C64::i();
    -h * i * a * (-C64::from_polar(1.0, -kx * a) + c * C64::from_polar(1.0, 0.5 * kx * a))
}

/// Nearest-neighbour graphene structure factor
/// `s(k) = −h e^{−ik_x a}(1 + 2e^{i3k_x a/2} cos(√3 k_y a/2))`.
pub fn graphene_structure_factor(model: &ModelSpec, kx: f64, ky: f64) -> Result<C64> {
    match model {
        ModelSpec::GrapheneTightBinding { hopping, lattice } => Ok(structure_factor(*hopping, *lattice, kx, ky)),
        other => Err(Error::UnsupportedFamily { family: other.family(), op: "graphene_structure_factor" }),
    }
}

/// Second-order expansion of `s(K + (q, 0))`:
/// `ᾱ[(3ha/2)·iq + (3ha²/8)·q²]` with `ᾱ = e^{−i2π/3}`.
pub fn graphene_quadratic_expansion(model: &ModelSpec, q: f64) -> Result<C64> {
    match model {
        ModelSpec::GrapheneTightBinding { hopping, lattice } => {
            let (h, a) = (*hopping, *lattice);
            let alpha = C64::from_polar(1.0, -2.0 * PI / 3.0);
            Ok(alpha * (C64::new(0.0, 1.5 * h * a * q) + 3.0 * h * a * a * q * q / 8.0))
        }
        other => Err(Error::UnsupportedFamily { family: other.family(), op: "graphene_quadratic_expansion" }),
    }
}

/// Effective quadratic model of tight-binding graphene on the line through
/// `K`, after removing the constant phase and rotating to the real-symmetric
/// gauge.
pub fn graphene_effective_model(model: &ModelSpec) -> Result<ModelSpec> {
    match model {
        ModelSpec::GrapheneTightBinding { hopping, lattice } => {
            Ok(ModelSpec::GrapheneQuadratic { hopping: *hopping, lattice: *lattice })
        }
        other => Err(Error::UnsupportedFamily { family: other.family(), op: "graphene_effective_model" }),
    }
}

/// The quadratic graphene Hamiltonian before the global rotation:
/// off-diagonal `γ(2iλ + aλ²/2)`. Returns `(H, ∂λH)`.
pub fn graphene_unrotated(hopping: f64, lattice: f64, lambda: f64) -> (HermitianMatrix2, HermitianMatrix2) {
    let gamma = 0.75 * lattice * hopping;
    let h = HermitianMatrix2::new(0.0, 0.0, gamma * C64::new(lattice * lambda * lambda / 2.0, 2.0 * lambda));
    let dh = HermitianMatrix2::new(0.0, 0.0, gamma * C64::new(lattice * lambda, 2.0));
    (h, dh)
}

/// Rotation `U` taking [`graphene_unrotated`] to the
/// [`ModelSpec::GrapheneQuadratic`] form via `U† H U`.
pub fn graphene_rotation() -> [[C64; 2]; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w = C64::from_polar(s, PI / 4.0);
    [[w, w.conj()], [w, -w.conj()]]
}
