use std::path::PathBuf;

use bandtouch::dynamics::{Protocol, ProtocolKind};
use bandtouch::sweep::{Axis, Measure, TableFormat};
use bandtouch::{Complex64, Level, ModelSpec};
use clap::{Args, ValueEnum};

use crate::UsageError;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Gl,
    Gp,
    #[value(alias = "pwave")]
    Pw,
    Poly,
    #[value(name = "graphene-tb", alias = "graphene_tb")]
    GrapheneTb,
    #[value(name = "graphene-quadratic", alias = "graphene_quadratic")]
    GrapheneQuadratic,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Hamiltonian family.
    #[arg(long, value_enum)]
    pub model: Option<Family>,
    /// Exponent of the gl/gp families.
    #[arg(long)]
    pub n: Option<u32>,
    /// Coupling of gl and poly.
    #[arg(long, allow_hyphen_values = true)]
    pub delta1: Option<f64>,
    /// Gap parameter of gp.
    #[arg(long)]
    pub delta2: Option<f64>,
    /// p-wave mass.
    #[arg(long)]
    pub m: Option<f64>,
    /// Real part of the p-wave pairing amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_re: Option<f64>,
    /// Imaginary part of the p-wave pairing amplitude.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub delta_im: f64,
    /// Graphene hopping h.
    #[arg(long, default_value_t = 1.0)]
    pub hopping: f64,
    /// Graphene lattice constant a.
    #[arg(long, default_value_t = 1.0)]
    pub lattice: f64,
    /// Comma-separated a1,a2,... of the poly family.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// JSON file holding a model description (replaces the flags above).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T, UsageError> {
    v.ok_or_else(|| UsageError(format!("--{flag} is required for --model {family}")))
}

impl ModelArgs {
    pub fn resolve(&self) -> anyhow::Result<ModelSpec> {
        let model = match (&self.config, self.model) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| bandtouch::Error::Io { path: path.clone(), source: e })?;
                ModelSpec::from_json(&text).map_err(|e| UsageError(format!("--config {}: {e}", path.display())))?
            }
            (Some(_), Some(_)) => return Err(UsageError("--config and --model are mutually exclusive".into()).into()),
            (None, None) => return Err(UsageError("one of --model or --config is required".into()).into()),
            (None, Some(family)) => match family {
                Family::Gl => ModelSpec::gl(need(self.n, "n", "gl")?, need(self.delta1, "delta1", "gl")?),
                Family::Gp => ModelSpec::gp(need(self.n, "n", "gp")?, need(self.delta2, "delta2", "gp")?),
                Family::Pw => ModelSpec::pwave(
                    need(self.m, "m", "pw")?,
                    Complex64::new(need(self.delta_re, "delta-re", "pw")?, self.delta_im),
                ),
                Family::Poly => ModelSpec::poly(need(self.coeffs.clone(), "coeffs", "poly")?, need(self.delta1, "delta1", "poly")?),
                Family::GrapheneTb => ModelSpec::graphene_tb(self.hopping, self.lattice),
                Family::GrapheneQuadratic => ModelSpec::graphene_quadratic(self.hopping, self.lattice),
            },
        };
        model.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(model)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Pl1,
    Pl2,
    Plneg,
    Plpos,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Initial {
    Ground,
    Excited,
}

#[derive(Args, Debug, Clone)]
pub struct ProtocolArgs {
    /// Driving protocol.
    #[arg(long, value_enum, default_value = "pl2")]
    pub protocol: Kind,
    /// Drive speed c in lambda = c t.
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    /// Time step.
    #[arg(long, default_value_t = 0.001)]
    pub dt: f64,
    /// Half-width of the pl1 drive.
    #[arg(long, default_value_t = 0.1)]
    pub lambda0: f64,
    /// Numerical infinity for pl2, plneg and plpos.
    #[arg(long, default_value_t = 10.0)]
    pub lambda_inf: f64,
    /// Offset from the touching point for plneg and plpos.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Instantaneous eigenstate the drive starts from.
    #[arg(long, value_enum, default_value = "ground")]
    pub initial: Initial,
}

impl ProtocolArgs {
    pub fn resolve(&self) -> anyhow::Result<Protocol> {
        let kind = match self.protocol {
            Kind::Pl1 => ProtocolKind::Pl1,
            Kind::Pl2 => ProtocolKind::Pl2,
            Kind::Plneg => ProtocolKind::PlNeg,
            Kind::Plpos => ProtocolKind::PlPos,
        };
        let mut p = Protocol::new(kind, self.c).with_dt(self.dt).with_lambda_inf(self.lambda_inf).with_epsilon(self.epsilon);
        p.lambda0 = self.lambda0;
        p.initial = match self.initial {
            Initial::Ground => Level::Ground,
            Initial::Excited => Level::Excited,
        };
        p.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(p)
    }
}

/// `min:max:steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, steps] = parts.as_slice() else {
            return Err(format!("expected min:max:steps, got {s:?}"));
        };
        let min: f64 = min.parse().map_err(|e| format!("bad min {min:?}: {e}"))?;
        let max: f64 = max.parse().map_err(|e| format!("bad max {max:?}: {e}"))?;
        let steps: usize = steps.parse().map_err(|e| format!("bad steps {steps:?}: {e}"))?;
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(format!("need finite min < max, got {min}:{max}"));
        }
        if steps < 2 {
            return Err(format!("need at least 2 steps, got {steps}"));
        }
        Ok(Range { min, max, steps })
    }
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        bandtouch::fis::linspace(self.min, self.max, self.steps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TableFormat::Csv,
            Format::Json => TableFormat::Json,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Data file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also write a gnuplot script for the data file (needs --out and csv).
    #[arg(long)]
    pub plot_script: Option<PathBuf>,
}

impl OutputArgs {
    pub fn validate(&self) -> Result<(), UsageError> {
        if self.plot_script.is_some() && (self.out.is_none() || self.format != Format::Csv) {
            return Err(UsageError("--plot-script needs --out with --format csv".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AxisArg {
    Delta,
    Speed,
    Exponent,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Delta => Axis::Delta,
            AxisArg::Speed => Axis::Speed,
            AxisArg::Exponent => Axis::Exponent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    P,
    #[value(name = "delta-phi", alias = "delta_phi")]
    DeltaPhi,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::P => Measure::P,
            MeasureArg::DeltaPhi => Measure::DeltaPhi,
        }
    }
}
