//! Parameter sweeps of the transition probability and interference phase.
//!
//! Grid points run in parallel on a dedicated thread pool; results are
//! assembled in input order, so the table is identical for any worker count.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{final_probability, split_phase_analysis, Protocol, ProtocolKind};
use crate::error::{Error, Result};
use crate::models::ModelSpec;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "BANDTOUCH_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// The family's coupling (`Δ₁`, `Δ₂`, `Δ`, `|Δ|`).
    Delta,
    /// The drive speed `c`.
    Speed,
    /// The exponent `n` of the power-law families.
    Exponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    P,
    DeltaPhi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model_template: ModelSpec,
    pub axis: Axis,
    pub values: Vec<f64>,
    pub protocol: Protocol,
    pub measure: Vec<Measure>,
}

impl SweepSpec {
    /// Builds and validates a spec.
    pub fn new(model_template: ModelSpec, axis: Axis, values: Vec<f64>, protocol: Protocol, measure: Vec<Measure>) -> Result<Self> {
        let spec = Self { model_template, axis, values, protocol, measure };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        if self.values.is_empty() {
            return bad("the grid is empty".into());
        }
        if self.measure.is_empty() {
            return bad("nothing to measure".into());
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return bad(format!("grid value {v} is not finite"));
        }
        if let Some(w) = self.values.windows(2).find(|w| w[1] <= w[0]) {
            return bad(format!("grid must be strictly increasing, got {} then {}", w[0], w[1]));
        }
        if self.wants_phase() && self.protocol.kind != ProtocolKind::Pl2 {
            return bad(format!("delta_phi needs a pl2 drive, got {}", self.protocol.name()));
        }
        if self.axis == Axis::Exponent {
            if let Some(v) = self.values.iter().find(|v| v.fract() != 0.0 || **v < 1.0) {
                return bad(format!("exponent values must be positive integers, got {v}"));
            }
        }
        self.model_template.validate()?;
        self.protocol.validate()
    }

    pub fn wants_phase(&self) -> bool {
        self.measure.contains(&Measure::DeltaPhi)
    }

    /// Model and protocol at one grid value.
    pub fn point(&self, value: f64) -> Result<(ModelSpec, Protocol)> {
        let mut protocol = self.protocol;
        let model = match self.axis {
            Axis::Delta => self.model_template.with_coupling(value)?,
            Axis::Speed => {
                protocol.c = value;
                self.model_template.clone()
            }
            Axis::Exponent => self.model_template.with_exponent(value as u32)?,
        };
        model.validate()?;
        protocol.validate()?;
        Ok((model, protocol))
    }

    fn evaluate(&self, value: f64) -> Result<SweepRow> {
        let (model, protocol) = self.point(value)?;
        if self.wants_phase() {
            let d = split_phase_analysis(&model, &protocol)?;
            Ok(SweepRow { axis_value: value, p: d.p_direct, delta_phi: Some(d.delta_phi) })
        } else {
            Ok(SweepRow { axis_value: value, p: final_probability(&model, &protocol)?, delta_phi: None })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_phi: Option<f64>,
}

/// What produced a table, including the numerical settings in force.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: SweepSpec,
    pub dt: f64,
    pub lambda_inf: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn axis_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.axis_value).collect()
    }

    pub fn p(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.p).collect()
    }

    pub fn delta_phi(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.delta_phi).collect()
    }

    pub fn to_csv(&self) -> String {
        let phase = self.provenance.spec.wants_phase();
        let mut out = String::from(if phase { "axis_value,p,delta_phi\n" } else { "axis_value,p\n" });
        for r in &self.rows {
            let _ = write!(out, "{:?},{:?}", r.axis_value, r.p);
            if phase {
                let _ = write!(out, ",{:?}", r.delta_phi.unwrap_or(f64::NAN));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain numeric struct");
        s.push('\n');
        s
    }
}

/// Worker count: `requested`, else the available parallelism, capped by
/// `BANDTOUCH_THREADS` when that is set to a positive integer.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    let base = requested
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    cap.map_or(base, |c| base.min(c))
}

/// Evaluates every grid point with `workers` threads (`0`: see
/// [`resolve_workers`]). The first failing grid value, in input order, is
/// reported as [`Error::AtAxisValue`].
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    spec.validate()?;
    let workers = resolve_workers(Some(workers));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSweep(format!("cannot start {workers} workers: {e}")))?;
    let results: Vec<Result<SweepRow>> = pool.install(|| spec.values.par_iter().map(|&v| spec.evaluate(v)).collect());
    let rows = results
        .into_iter()
        .zip(&spec.values)
        .map(|(r, &value)| r.map_err(|e| Error::AtAxisValue { value, source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        rows,
        provenance: Provenance {
            spec: spec.clone(),
            dt: spec.protocol.dt,
            lambda_inf: spec.protocol.lambda_inf,
            epsilon: spec.protocol.epsilon,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Json,
}

pub fn write_table(result: &SweepResult, path: impl AsRef<Path>, format: TableFormat) -> Result<()> {
    let text = match format {
        TableFormat::Csv => result.to_csv(),
        TableFormat::Json => result.to_json(),
    };
    crate::io::write(path.as_ref(), &text)
}

/// Rows of a table written by [`write_table`].
pub fn read_table(path: impl AsRef<Path>, format: TableFormat) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let text = crate::io::read(path)?;
    match format {
        TableFormat::Json => Ok(serde_json::from_str::<SweepResult>(&text)?.rows),
        TableFormat::Csv => {
            let mut lines = text.lines();
            let header = lines.next().unwrap_or_default();
            let phase = header.split(',').count() == 3;
            lines
                .map(|line| {
                    let f: Vec<f64> = line
                        .split(',')
                        .map(|x| x.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::InvalidSweep(format!("{}: bad row {line:?}: {e}", path.display())))?;
                    if f.len() != if phase { 3 } else { 2 } {
                        return Err(Error::InvalidSweep(format!("{}: bad row {line:?}", path.display())));
                    }
                    Ok(SweepRow { axis_value: f[0], p: f[1], delta_phi: phase.then(|| f[2]) })
                })
                .collect()
        }
    }
}

/// Indices of interior points strictly above both neighbours with
/// prominence at least `floor`.
pub fn local_maxima(v: &[f64], floor: f64) -> Vec<usize> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] > v[i - 1] && v[i] > v[i + 1] && crate::fis::prominence(v, i) >= floor)
        .collect()
}

/// As [`local_maxima`], for minima.
pub fn local_minima(v: &[f64], floor: f64) -> Vec<usize> {
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    local_maxima(&neg, floor)
}

/// Prominence floor used for counting oscillations.
pub const PROMINENCE_FLOOR: f64 = 1e-4;

/// Mean spacing of successive maxima of `y(x)`, each located by a parabola
/// through the grid maximum and its neighbours. `None` with fewer than two
/// maxima.
pub fn oscillation_period(x: &[f64], y: &[f64]) -> Option<f64> {
    let peaks: Vec<f64> = local_maxima(y, PROMINENCE_FLOOR)
        .into_iter()
        .map(|i| {
            let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
            let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
            let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
            let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
            if den == 0.0 {
                x1
            } else {
                x1 - 0.5 * num / den
            }
        })
        .collect();
    (peaks.len() >= 2).then(|| (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}

/// True when no step decreases by more than `tol`.
pub fn is_nondecreasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - tol)
}

/// True when no step increases by more than `tol`.
pub fn is_nonincreasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fis::linspace;

    fn spec(measure: Vec<Measure>) -> SweepSpec {
        SweepSpec::new(
            ModelSpec::gp(2, 0.5),
            Axis::Delta,
            vec![0.2, 0.5, 0.9],
            Protocol::pl2(1.0).with_lambda_inf(2.0),
            measure,
        )
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        let ok = spec(vec![Measure::P]);
        let with = |f: &dyn Fn(&mut SweepSpec)| {
            let mut s = ok.clone();
            f(&mut s);
            s.validate()
        };
        assert!(with(&|s| s.measure.clear()).is_err());
        assert!(with(&|s| s.values.clear()).is_err());
        assert!(with(&|s| s.values = vec![0.5, 0.5]).is_err());
        assert!(with(&|s| s.values = vec![0.5, f64::NAN]).is_err());
        assert!(with(&|s| {
            s.measure = vec![Measure::DeltaPhi];
            s.protocol = Protocol::plneg(1.0);
        })
        .is_err());
        assert!(with(&|s| {
            s.axis = Axis::Exponent;
            s.values = vec![1.0, 2.5];
        })
        .is_err());
    }

    #[test]
    fn single_point_matches_direct_call() {
        let s = SweepSpec::new(ModelSpec::gp(2, 0.5), Axis::Delta, vec![0.3], Protocol::pl2(1.0).with_lambda_inf(2.0), vec![Measure::P]).unwrap();
        let r = run_sweep(&s, 1).unwrap();
        let direct = final_probability(&ModelSpec::gp(2, 0.3), &s.protocol).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].p, direct);
    }

    #[test]
    fn speed_and_exponent_axes() {
        let base = Protocol::pl2(1.0).with_lambda_inf(2.0);
        let s = SweepSpec::new(ModelSpec::gp(2, 0.5), Axis::Speed, vec![0.5, 1.0], base, vec![Measure::P]).unwrap();
        let r = run_sweep(&s, 2).unwrap();
        assert_eq!(r.rows[1].p, final_probability(&ModelSpec::gp(2, 0.5), &base).unwrap());
        let s = SweepSpec::new(ModelSpec::gp(2, 0.5), Axis::Exponent, vec![1.0, 3.0], base, vec![Measure::P]).unwrap();
        let r = run_sweep(&s, 2).unwrap();
        assert_eq!(r.rows[1].p, final_probability(&ModelSpec::gp(3, 0.5), &base).unwrap());
    }

    #[test]
    fn errors_carry_axis_value() {
        let s = SweepSpec::new(ModelSpec::gl(1, 0.5), Axis::Delta, vec![0.2, 0.4], Protocol::pl2(1.0).with_lambda_inf(2.0), vec![Measure::DeltaPhi]).unwrap();
        let err = run_sweep(&s, 2).unwrap_err();
        assert!(matches!(err, Error::AtAxisValue { value, .. } if value == 0.2));
        assert!(err.is_numerical());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for measure in [vec![Measure::P], vec![Measure::P, Measure::DeltaPhi]] {
            let r = run_sweep(&spec(measure), 3).unwrap();
            for (format, name) in [(TableFormat::Csv, "t.csv"), (TableFormat::Json, "t.json")] {
                let path = dir.path().join(name);
                write_table(&r, &path, format).unwrap();
                assert_eq!(read_table(&path, format).unwrap(), r.rows);
            }
        }
        let r = run_sweep(&spec(vec![Measure::P]), 1).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("axis_value,p\n"));
        assert_eq!(r.provenance.dt, 0.001);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["provenance"]["dt"], 0.001);
    }

    #[test]
    fn write_errors_name_the_path() {
        let r = run_sweep(&spec(vec![Measure::P]), 1).unwrap();
        let err = write_table(&r, "/nonexistent-dir/x.csv", TableFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let s = spec(vec![Measure::P, Measure::DeltaPhi]);
        let one = run_sweep(&s, 1).unwrap().to_json();
        assert_eq!(run_sweep(&s, 4).unwrap().to_json(), one);
        assert_eq!(run_sweep(&s, 16).unwrap().to_json(), one);
    }

    #[test]
    fn maxima_and_period() {
        let x = linspace(0.0, 10.0, 1001);
        let y: Vec<f64> = x.iter().map(|t| (2.0 * std::f64::consts::PI * t / 2.5).cos()).collect();
        assert_eq!(local_maxima(&y, PROMINENCE_FLOOR).len(), 3);
        assert_eq!(local_minima(&y, PROMINENCE_FLOOR).len(), 4);
        let period = oscillation_period(&x, &y).unwrap();
        assert!((period - 2.5).abs() < 1e-6, "{period}");

        let jitter = [0.0, 1.0, 1.00005, 1.0, 2.0];
        assert!(local_maxima(&jitter, PROMINENCE_FLOOR).is_empty());
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0], PROMINENCE_FLOOR), vec![1]);
        assert!(is_nondecreasing(&[0.0, 0.5, 0.4995, 1.0], 1e-3));
        assert!(!is_nondecreasing(&[0.0, 0.5, 0.4, 1.0], 1e-3));
        assert!(is_nonincreasing(&[1.0, 0.5, 0.5005], 1e-3));
    }
}
