//! 2×2 Hermitian matrices and their closed-form spectral decomposition.
//!
//! Every Hamiltonian in this crate is a two-level operator, so nothing here
//! needs a general eigensolver. The decomposition fixes the phase of each
//! eigenvector deterministically (see [`EigenSystem`]) so that trajectories
//! and interference phases are reproducible run to run.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// A two-component state vector in the fixed (diabatic) basis.
pub type Spinor = [C64; 2];

/// Relative gap below which two levels are treated as coincident.
pub const DEGENERACY_TOLERANCE: f64 = 1e-14;

/// Hermitian 2×2 matrix. The lower off-diagonal entry is always the
/// conjugate of `h01` and is never stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix2 {
    pub h00: f64,
    pub h11: f64,
    pub h01: C64,
}

impl HermitianMatrix2 {
    pub const ZERO: Self = Self { h00: 0.0, h11: 0.0, h01: C64 { re: 0.0, im: 0.0 } };

    pub fn new(h00: f64, h11: f64, h01: C64) -> Self {
        Self { h00, h11, h01 }
    }

    pub fn real(h00: f64, h11: f64, h01: f64) -> Self {
        Self { h00, h11, h01: C64::new(h01, 0.0) }
    }

    pub fn h10(&self) -> C64 {
        self.h01.conj()
    }

    pub fn trace(&self) -> f64 {
        self.h00 + self.h11
    }

    /// Spectral norm, i.e. the largest eigenvalue modulus.
    pub fn norm(&self) -> f64 {
        let mean = 0.5 * (self.h00 + self.h11);
        let half_diff = 0.5 * (self.h00 - self.h11);
        mean.abs() + half_diff.hypot(self.h01.norm())
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        [
            v[0] * self.h00 + self.h01 * v[1],
            self.h10() * v[0] + v[1] * self.h11,
        ]
    }

    /// `⟨a|H|b⟩`.
    pub fn sandwich(&self, a: &Spinor, b: &Spinor) -> C64 {
        inner(a, &self.apply(b))
    }

    pub fn to_full(&self) -> [[C64; 2]; 2] {
        [[C64::new(self.h00, 0.0), self.h01], [self.h10(), C64::new(self.h11, 0.0)]]
    }

    /// Builds from a full matrix, returning `None` unless it is Hermitian to
    /// within `tol` (absolute).
    pub fn from_full(m: [[C64; 2]; 2], tol: f64) -> Option<Self> {
        let hermitian = m[0][0].im.abs() <= tol
            && m[1][1].im.abs() <= tol
            && (m[0][1] - m[1][0].conj()).norm() <= tol;
        hermitian.then(|| Self {
            h00: m[0][0].re,
            h11: m[1][1].re,
            h01: 0.5 * (m[0][1] + m[1][0].conj()),
        })
    }

    /// `U† H U` for a 2×2 matrix `u` (unitarity is the caller's business).
    pub fn conjugate_by(&self, u: &[[C64; 2]; 2]) -> Self {
        let h = self.to_full();
        let mut hu = [[C64::default(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                hu[i][j] = h[i][0] * u[0][j] + h[i][1] * u[1][j];
            }
        }
        let mut out = [[C64::default(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = u[0][i].conj() * hu[0][j] + u[1][i].conj() * hu[1][j];
            }
        }
        Self { h00: out[0][0].re, h11: out[1][1].re, h01: out[0][1] }
    }

    /// Largest absolute difference between corresponding entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.h00 - other.h00)
            .abs()
            .max((self.h11 - other.h11).abs())
            .max((self.h01 - other.h01).norm())
    }

    pub fn is_zero(&self) -> bool {
        self.h00 == 0.0 && self.h11 == 0.0 && self.h01 == C64::default()
    }
}

impl std::ops::Add for HermitianMatrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { h00: self.h00 + rhs.h00, h11: self.h11 + rhs.h11, h01: self.h01 + rhs.h01 }
    }
}

impl std::ops::Sub for HermitianMatrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { h00: self.h00 - rhs.h00, h11: self.h11 - rhs.h11, h01: self.h01 - rhs.h01 }
    }
}

impl std::ops::Mul<f64> for HermitianMatrix2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self { h00: self.h00 * s, h11: self.h11 * s, h01: self.h01 * s }
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &Spinor, b: &Spinor) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm(v: &Spinor) -> f64 {
    v[0].norm().hypot(v[1].norm())
}

pub fn scale(v: &Spinor, s: C64) -> Spinor {
    [v[0] * s, v[1] * s]
}

/// Spectral decomposition of a [`HermitianMatrix2`].
///
/// Gauge: in each eigenvector the component of largest modulus is real and
/// positive; when both moduli agree the first component is made real
/// positive. When the two levels coincide (`degenerate`), the vectors are
/// the standard basis and carry no physical meaning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    pub e_ground: f64,
    pub e_excited: f64,
    pub v_ground: Spinor,
    pub v_excited: Spinor,
    pub degenerate: bool,
}

impl EigenSystem {
    pub fn gap(&self) -> f64 {
        self.e_excited - self.e_ground
    }

    pub fn vector(&self, level: Level) -> &Spinor {
        match level {
            Level::Ground => &self.v_ground,
            Level::Excited => &self.v_excited,
        }
    }

    pub fn energy(&self, level: Level) -> f64 {
        match level {
            Level::Ground => self.e_ground,
            Level::Excited => self.e_excited,
        }
    }

    /// Populations `(|⟨0|ψ⟩|², |⟨1|ψ⟩|²)`.
    pub fn populations(&self, psi: &Spinor) -> (f64, f64) {
        (inner(&self.v_ground, psi).norm_sqr(), inner(&self.v_excited, psi).norm_sqr())
    }
}

/// Instantaneous level label.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    #[default]
    Ground,
    Excited,
}

/// Closed-form diagonalization: `E = h̄ ± √(δ² + |h01|²)` with
/// `h̄ = (h00 + h11)/2`, `δ = (h00 − h11)/2`.
pub fn eigensystem(h: &HermitianMatrix2) -> EigenSystem {
    let mean = 0.5 * (h.h00 + h.h11);
    let delta = 0.5 * (h.h00 - h.h11);
    let b = h.h01;
    let r = delta.hypot(b.norm());

    let scale_ref = h.norm().max(1.0);
    if 2.0 * r <= DEGENERACY_TOLERANCE * scale_ref {
        let one = C64::new(1.0, 0.0);
        let zero = C64::default();
        return EigenSystem {
            e_ground: mean - r,
            e_excited: mean + r,
            v_ground: [zero, one],
            v_excited: [one, zero],
            degenerate: true,
        };
    }

    // Both branches avoid subtracting nearly equal numbers.
    let (excited, ground) = if delta >= 0.0 {
        let big = C64::new(delta + r, 0.0);
        ([big, b.conj()], [-b, big])
    } else {
        let big = C64::new(r - delta, 0.0);
        ([b, big], [big, -b.conj()])
    };

    EigenSystem {
        e_ground: mean - r,
        e_excited: mean + r,
        v_ground: fix_gauge(normalize(ground)),
        v_excited: fix_gauge(normalize(excited)),
        degenerate: false,
    }
}

fn normalize(v: Spinor) -> Spinor {
    let n = norm(&v);
    [v[0] / n, v[1] / n]
}

/// Applies the global phase convention described on [`EigenSystem`].
pub fn fix_gauge(v: Spinor) -> Spinor {
    let k = if v[1].norm() > v[0].norm() * (1.0 + 8.0 * f64::EPSILON) { 1 } else { 0 };
    let m = v[k].norm();
    if m == 0.0 {
        return v;
    }
    let mut out = scale(&v, v[k].conj() / m);
    out[k] = C64::new(m, 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_matrix() {
        let es = eigensystem(&HermitianMatrix2::real(1.0, -1.0, 0.0));
        assert_eq!(es.e_ground, -1.0);
        assert_eq!(es.e_excited, 1.0);
        assert_eq!(es.v_ground, [c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(es.v_excited, [c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(!es.degenerate);
    }

    #[test]
    fn sigma_x_tie_break() {
        let es = eigensystem(&HermitianMatrix2::real(0.0, 0.0, 1.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(es.e_ground, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(es.e_excited, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(es.v_ground[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(es.v_ground[1].re, -s, epsilon = 1e-15);
        assert_eq!(es.v_ground[0].im, 0.0);
        assert_abs_diff_eq!(es.v_excited[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(es.v_excited[1].re, s, epsilon = 1e-15);
    }

    #[test]
    fn zero_matrix_is_degenerate() {
        assert!(eigensystem(&HermitianMatrix2::ZERO).degenerate);
        assert!(eigensystem(&HermitianMatrix2::real(2.0, 2.0, 0.0)).degenerate);
        assert!(!eigensystem(&HermitianMatrix2::real(1e-10, -1e-10, 0.0)).degenerate);
    }

    #[test]
    fn conjugation_by_identity_is_noop() {
        let h = HermitianMatrix2::new(0.3, -1.2, c(0.4, -0.7));
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(h.conjugate_by(&id).max_abs_diff(&h) < 1e-15);
    }

    #[test]
    fn from_full_rejects_non_hermitian() {
        let m = [[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        assert!(HermitianMatrix2::from_full(m, 1e-12).is_none());
    }

    fn matrix() -> impl Strategy<Value = HermitianMatrix2> {
        (-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64)
            .prop_map(|(a, d, re, im)| HermitianMatrix2::new(a, d, C64::new(re, im)))
    }

    proptest! {
        #[test]
        fn eigensystem_invariants(h in matrix()) {
            let es = eigensystem(&h);
            prop_assume!(!es.degenerate);
            let scale = h.norm().max(1.0);
            prop_assert!(es.e_ground <= es.e_excited);
            for (e, v) in [(es.e_ground, es.v_ground), (es.e_excited, es.v_excited)] {
                prop_assert!((norm(&v) - 1.0).abs() < 1e-12);
                let hv = h.apply(&v);
                let res = norm(&[hv[0] - v[0] * e, hv[1] - v[1] * e]);
                prop_assert!(res <= 1e-12 * scale, "residual {res}");
                // gauge: dominant component real positive
                let k = if v[1].norm() > v[0].norm() * (1.0 + 8.0 * f64::EPSILON) { 1 } else { 0 };
                prop_assert!(v[k].im == 0.0 && v[k].re > 0.0);
            }
            prop_assert!(inner(&es.v_ground, &es.v_excited).norm() < 1e-12);
        }

        #[test]
        fn eigenvalues_sum_to_trace(h in matrix()) {
            let es = eigensystem(&h);
            prop_assert!((es.e_ground + es.e_excited - h.trace()).abs() <= 1e-12 * h.norm().max(1.0));
        }
    }
}
