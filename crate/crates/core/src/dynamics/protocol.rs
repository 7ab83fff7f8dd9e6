use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Level;

/// Which stretch of `λ = ct` is driven.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// `−λ₀ → λ₀`
    Pl1,
    /// `−Λ → Λ`
    Pl2,
    /// `−Λ → −ε`
    PlNeg,
    /// `ε → Λ`
    PlPos,
    Custom { start: f64, end: f64 },
}

/// A linear drive `λ(t) = ct` between two endpoints, with `ħ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub kind: ProtocolKind,
    pub c: f64,
    #[serde(default = "defaults::lambda0")]
    pub lambda0: f64,
    #[serde(default = "defaults::lambda_inf")]
    pub lambda_inf: f64,
    #[serde(default = "defaults::epsilon")]
    pub epsilon: f64,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default)]
    pub initial: Level,
}

pub(crate) mod defaults {
    pub fn lambda0() -> f64 {
        0.1
    }
    pub fn lambda_inf() -> f64 {
        10.0
    }
    pub fn epsilon() -> f64 {
        1e-6
    }
    pub fn dt() -> f64 {
        0.001
    }
}

impl Protocol {
    /// A protocol with the default `λ₀ = 0.1`, `Λ = 10`, `ε = 1e−6`,
    /// `dt = 0.001`, starting in the ground state.
    pub fn new(kind: ProtocolKind, c: f64) -> Self {
        Self {
            kind,
            c,
            lambda0: defaults::lambda0(),
            lambda_inf: defaults::lambda_inf(),
            epsilon: defaults::epsilon(),
            dt: defaults::dt(),
            initial: Level::Ground,
        }
    }

    pub fn pl1(c: f64) -> Self {
        Self::new(ProtocolKind::Pl1, c)
    }

    pub fn pl2(c: f64) -> Self {
        Self::new(ProtocolKind::Pl2, c)
    }

    pub fn plneg(c: f64) -> Self {
        Self::new(ProtocolKind::PlNeg, c)
    }

    pub fn plpos(c: f64) -> Self {
        Self::new(ProtocolKind::PlPos, c)
    }

    pub fn custom(start: f64, end: f64, c: f64) -> Self {
        Self::new(ProtocolKind::Custom { start, end }, c)
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_lambda_inf(mut self, lambda_inf: f64) -> Self {
        self.lambda_inf = lambda_inf;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_initial(mut self, initial: Level) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProtocol(msg));
        for (name, v) in [("c", self.c), ("dt", self.dt), ("epsilon", self.epsilon), ("lambda0", self.lambda0), ("lambda_inf", self.lambda_inf)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        if !(self.epsilon < self.lambda0 && self.lambda0 < self.lambda_inf) {
            return bad(format!(
                "need epsilon < lambda0 < lambda_inf, got {} < {} < {}",
                self.epsilon, self.lambda0, self.lambda_inf
            ));
        }
        if let ProtocolKind::Custom { start, end } = self.kind {
            if !(start.is_finite() && end.is_finite() && start < end) {
                return bad(format!("custom drive needs finite start < end, got {start} -> {end}"));
            }
        }
        Ok(())
    }

    /// `(λ_start, λ_end)`.
    pub fn endpoints(&self) -> (f64, f64) {
        match self.kind {
            ProtocolKind::Pl1 => (-self.lambda0, self.lambda0),
            ProtocolKind::Pl2 => (-self.lambda_inf, self.lambda_inf),
            ProtocolKind::PlNeg => (-self.lambda_inf, -self.epsilon),
            ProtocolKind::PlPos => (self.epsilon, self.lambda_inf),
            ProtocolKind::Custom { start, end } => (start, end),
        }
    }

    /// Number of time steps, counting the shortened last one.
    pub fn step_count(&self) -> usize {
        let (a, b) = self.endpoints();
        let t0 = a / self.c;
        step_ends(t0, self.dt, t0, b / self.c).count()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ProtocolKind::Pl1 => "pl1",
            ProtocolKind::Pl2 => "pl2",
            ProtocolKind::PlNeg => "plneg",
            ProtocolKind::PlPos => "plpos",
            ProtocolKind::Custom { .. } => "custom",
        }
    }
}

/// Ends of the steps covering `[t0, t1]` on the grid `anchor + k·dt`.
/// Grid points closer than `1e−9·dt` to `t0` or `t1` are merged into them,
/// and the final end is exactly `t1`.
pub(crate) fn step_ends(anchor: f64, dt: f64, t0: f64, t1: f64) -> impl Iterator<Item = f64> {
    let slack = 1e-9 * dt;
    let mut k = ((t0 - anchor) / dt).floor() as i64 + 1;
    if anchor + k as f64 * dt <= t0 + slack {
        k += 1;
    }
    let mut done = t1 <= t0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let t = anchor + k as f64 * dt;
        k += 1;
        if t >= t1 - slack {
            done = true;
            Some(t1)
        } else {
            Some(t)
        }
    })
}
