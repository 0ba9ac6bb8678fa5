//! JSON file formats.
//!
//! Numbers are written with the shortest decimal representation that
//! parses back to the same `f64`, so matrices round-trip bit-exactly.
//! Infinite values (an unlimited `c_common`) are written as `null`.

use std::fs;
use std::path::Path;

use dmac_core::decomp::{JointFactor, JointTriangularization, Orientation};
use dmac_core::rates::{PowerKind, RateSummary};
use dmac_core::sim::{Dither, Interference, InterferenceKind, LatticeConfig, Scheme, SimReport};
use dmac_core::Matrix;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().to_vec(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<Matrix, String> {
        Matrix::new(self.rows, self.cols, self.data.clone()).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PowerKindJson {
    Total,
    PerAntenna,
}

impl From<PowerKindJson> for PowerKind {
    fn from(k: PowerKindJson) -> Self {
        match k {
            PowerKindJson::Total => PowerKind::Total,
            PowerKindJson::PerAntenna => PowerKind::PerAntenna,
        }
    }
}

/// Two-way relay scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    pub h1: MatrixJson,
    pub h2: MatrixJson,
    pub power: f64,
    pub power_kind: PowerKindJson,
    /// `null` means unlimited.
    pub c_common: Option<f64>,
}

/// Rate instance: channels with their power budgets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesInstanceJson {
    pub channels: Vec<MatrixJson>,
    /// One budget per channel.
    pub powers: Vec<f64>,
    #[serde(default = "total")]
    pub power_kind: PowerKindJson,
    #[serde(default)]
    pub blocks: Option<usize>,
}

fn total() -> PowerKindJson {
    PowerKindJson::Total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeJson {
    SingleUser,
    Dmac,
    Twrc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DitherJson {
    None,
    Uniform,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeJson {
    #[serde(default)]
    pub halfwidth: Option<f64>,
    pub levels: u32,
    pub dither: DitherJson,
}

impl From<&LatticeJson> for LatticeConfig {
    fn from(l: &LatticeJson) -> Self {
        LatticeConfig {
            halfwidth: l.halfwidth,
            levels: l.levels,
            dither: match l.dither {
                DitherJson::None => Dither::None,
                DitherJson::Uniform => Dither::UniformSeeded,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceKindJson {
    Zero,
    Constant,
    Uniform,
    SignFlip,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceJson {
    pub kind: InterferenceKindJson,
    #[serde(default)]
    pub amplitude: f64,
}

impl From<&InterferenceJson> for Interference {
    fn from(s: &InterferenceJson) -> Self {
        let kind = match s.kind {
            InterferenceKindJson::Zero => InterferenceKind::Zero,
            InterferenceKindJson::Constant => InterferenceKind::Constant,
            InterferenceKindJson::Uniform => InterferenceKind::Uniform,
            InterferenceKindJson::SignFlip => InterferenceKind::SignFlip,
        };
        Interference::new(kind, s.amplitude)
    }
}

/// Simulation configuration. The seed comes from the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfigJson {
    pub scheme: SchemeJson,
    /// One channel for `single_user`, two otherwise.
    pub channels: Vec<MatrixJson>,
    /// Symmetric power budget of every transmitter.
    pub power: f64,
    #[serde(default = "total")]
    pub power_kind: PowerKindJson,
    /// Only used by `twrc`; `null` or absent means unlimited.
    #[serde(default)]
    pub c_common: Option<f64>,
    pub lattice: LatticeJson,
    /// One entry per transmitter; missing entries mean no interference.
    #[serde(default)]
    pub interference: Vec<InterferenceJson>,
    pub trials: u64,
    #[serde(default = "unit")]
    pub noise_scale: f64,
}

fn unit() -> f64 {
    1.0
}

/// Reads and deserializes a JSON file, mapping every failure to a parse
/// error.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let m: MatrixJson = read_json(path)?;
    m.to_matrix().map_err(|e| CliError::parse(path, e))
}

pub fn matrix_value(m: &Matrix) -> Value {
    serde_json::to_value(MatrixJson::from(m)).expect("plain numbers serialize")
}

fn orientation_name(o: Orientation) -> &'static str {
    match o {
        Orientation::SharedRight => "shared_right",
        Orientation::SharedLeft => "shared_left",
    }
}

/// `{"shared", "per_matrix": [{"u", "t"}], "diag", "orientation"}`, where
/// `u` is the per-matrix orthogonal factor (`U_k` for the shared-right
/// form, `V_k` for the shared-left form).
pub fn jet_value(jt: &JointTriangularization) -> Value {
    let per_matrix: Vec<Value> = jt
        .per_matrix
        .iter()
        .map(|f| {
            serde_json::json!({
                "u": matrix_value(&f.orthogonal),
                "t": matrix_value(&f.triangular),
            })
        })
        .collect();
    serde_json::json!({
        "shared": matrix_value(&jt.shared),
        "per_matrix": per_matrix,
        "diag": jt.diag,
        "orientation": orientation_name(jt.orientation),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JetFactorJson {
    u: MatrixJson,
    t: MatrixJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JetJson {
    shared: MatrixJson,
    per_matrix: Vec<JetFactorJson>,
    diag: Vec<f64>,
    orientation: String,
}

/// Inverse of [`jet_value`].
pub fn parse_jet(text: &str) -> Result<JointTriangularization, String> {
    let j: JetJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let orientation = match j.orientation.as_str() {
        "shared_right" => Orientation::SharedRight,
        "shared_left" => Orientation::SharedLeft,
        other => return Err(format!("unknown orientation {other:?}")),
    };
    let per_matrix = j
        .per_matrix
        .iter()
        .map(|f| {
            Ok(JointFactor {
                orthogonal: f.u.to_matrix()?,
                triangular: f.t.to_matrix()?,
            })
        })
        .collect::<Result<_, String>>()?;
    Ok(JointTriangularization {
        shared: j.shared.to_matrix()?,
        per_matrix,
        diag: j.diag,
        orientation,
    })
}

/// `{"entries": {label: value}, "metadata": {label: value}}` in the
/// summary's order.
pub fn summary_value(s: &RateSummary) -> Value {
    let pairs = |v: &[(String, f64)]| -> Value {
        Value::Object(
            v.iter()
                .map(|(k, x)| (k.clone(), Value::from(*x)))
                .collect::<Map<_, _>>(),
        )
    };
    serde_json::json!({
        "entries": pairs(&s.entries),
        "metadata": pairs(&s.metadata),
    })
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::SingleUserZfDpc => "single_user",
        Scheme::TwoUserDmac => "dmac",
        Scheme::TwrcPncMac => "twrc",
    }
}

/// The digest is written as a hex string so it survives JSON readers that
/// store numbers as doubles.
pub fn sim_report_value(r: &SimReport) -> Value {
    let subchannels: Vec<Value> = r
        .subchannels
        .iter()
        .map(|s| {
            serde_json::json!({
                "diag": s.diag,
                "gain": s.gain,
                "gain_std_error": s.gain_std_error,
                "noise_variance": s.noise_variance,
                "symbol_errors": s.symbol_errors,
                "symbol_error_rate": s.symbol_errors as f64 / r.trials as f64,
            })
        })
        .collect();
    let terminal = r.terminal.map(|t| {
        serde_json::json!({
            "errors": t.errors,
            "implication_violations": t.implication_violations,
        })
    });
    serde_json::json!({
        "scheme": scheme_name(r.scheme),
        "seed": r.seed,
        "trials": r.trials,
        "halfwidth": r.halfwidth,
        "levels": r.levels,
        "subchannels": subchannels,
        "realized_power": r.realized_power,
        "power_budget": r.power_budget,
        "interference_invariant": r.interference_invariant,
        "residual_self_interference": r.residual_self_interference,
        "signal_scale": r.signal_scale,
        "decision_digest": format!("{:016x}", r.decision_digest),
        "terminal": terminal,
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
