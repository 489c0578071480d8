//! Declarative scenario files and their validation.

use std::f64::consts::PI;

use serde::Deserialize;

use macroreal_core::dynamics::{
    build_closed_model, build_dephasing_model, build_thermal_model, BinEdges, LindbladModel, OperatorMode,
    Representation, ToyModelParams,
};
use macroreal_core::husimi::{AngularRect, Slot, SlotPartition};
use macroreal_core::SpinQuantumNumber;

use crate::CliError;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub engine: Engine,
    pub system: SystemSpec,
    #[serde(default)]
    pub environment: EnvironmentSpec,
    #[serde(default)]
    pub time: TimeSpec,
    pub toy: Option<ToySpec>,
    pub partition: Option<PartitionSpec>,
    #[serde(default)]
    pub bins: BinsSpec,
    pub qsd: Option<QsdSpec>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Unitary evolution under the two-state Hamiltonian with frequency `omega`.
    Closed,
    Toy,
    Master,
    Qsd,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Closed => "closed",
            Self::Toy => "toy",
            Self::Master => "master",
            Self::Qsd => "qsd",
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n_qubits: Option<usize>,
    pub j: Option<f64>,
    pub omega: f64,
    #[serde(default)]
    pub representation: RepresentationSpec,
    #[serde(default)]
    pub operator_mode: ModeSpec,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationSpec {
    #[default]
    Dicke,
    Full,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    #[default]
    Collective,
    Local,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Default)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnvironmentSpec {
    #[default]
    None,
    Dephasing { gamma_dp: f64 },
    Thermal { gamma_th: f64, n_bar: f64 },
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: Option<f64>,
    pub step: Option<f64>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ToySpec {
    pub delta_t: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    WholeSphere,
    Hemispheres,
    ThreeRegion,
    ThetaBands { width: f64 },
    Rectangles { n_theta: usize, n_phi: usize },
    Custom { slots: Vec<SlotSpec> },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SlotSpec {
    pub name: String,
    /// `[theta_lo, theta_hi, phi_lo, phi_hi]` in radians.
    pub regions: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BinsSpec {
    #[default]
    Unit,
    PolesAndMiddle,
    Edges { edges: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QsdSpec {
    pub trajectories: usize,
    pub seed: u64,
    pub dt: Option<f64>,
    #[serde(default)]
    pub compare_master: bool,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    pub decay_fit: Option<DecayFitSpec>,
    pub mr_check: Option<MrSpec>,
    pub continuity: Option<ContinuitySpec>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct DecayFitSpec {
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MrSpec {
    pub pairs: Option<Vec<[f64; 2]>>,
    pub log_grid: Option<LogGridSpec>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LogGridSpec {
    /// Decay rate setting the range `[0.1/ν, 5/ν]`; defaults to the toy rate.
    pub nu: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ContinuitySpec {
    pub eps_mid: Option<f64>,
    pub delta_transfer: Option<f64>,
    #[serde(default)]
    pub slots: SeriesSlots,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum SeriesSlots {
    /// North bin, south bin and everything between, from the histograms.
    #[default]
    Magnetization,
    /// Slot probabilities of the partition POVM; slots named `north` and
    /// `south` are the extremal ones.
    Partition,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_histogram")]
    pub histogram: String,
    #[serde(default = "default_survival")]
    pub survival: String,
    #[serde(default = "default_analysis")]
    pub analysis: String,
    #[serde(default = "default_magnetization")]
    pub magnetization: String,
}

fn default_histogram() -> String {
    "histogram.csv".into()
}
fn default_survival() -> String {
    "survival.csv".into()
}
fn default_analysis() -> String {
    "analysis.json".into()
}
fn default_magnetization() -> String {
    "magnetization.csv".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            histogram: default_histogram(),
            survival: default_survival(),
            analysis: default_analysis(),
            magnetization: default_magnetization(),
        }
    }
}

/// Upper bound on stored trajectory amplitudes (`M × times × dim`).
pub const MAX_QSD_STORAGE: usize = 50_000_000;
/// Upper bound on time-grid points.
pub const MAX_GRID_POINTS: usize = 2_000_000;

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
}

/// Everything a run needs, derived and checked from a scenario.
#[derive(Debug, Clone)]
pub struct Plan {
    pub scenario: Scenario,
    pub spin: SpinQuantumNumber,
    /// Output time grid, ascending, including every snapshot.
    pub times: Vec<f64>,
    /// Indices of the snapshots in `times`.
    pub snapshot_indices: Vec<usize>,
    pub toy: Option<ToyModelParams>,
    pub model: Option<LindbladModel>,
    pub partition: Option<SlotPartition>,
    pub bins: BinEdges,
    pub warnings: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn non_negative(name: &str, v: f64) -> Result<(), CliError> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(invalid(format!("{name} must be non-negative and finite, got {v}")));
    }
    Ok(())
}

fn spin_of(system: &SystemSpec) -> Result<SpinQuantumNumber, CliError> {
    let spin = match (system.n_qubits, system.j) {
        (Some(n), None) => SpinQuantumNumber::from_qubits(n),
        (None, Some(j)) => SpinQuantumNumber::new(j),
        _ => return Err(invalid("system: give exactly one of `n_qubits` or `j`")),
    };
    spin.map_err(|e| invalid(format!("system: {e}")))
}

fn build_partition(spec: &PartitionSpec, spin: SpinQuantumNumber) -> Result<SlotPartition, CliError> {
    let wrap = |r: macroreal_core::Result<SlotPartition>| r.map_err(|e| invalid(format!("partition: {e}")));
    match spec {
        PartitionSpec::WholeSphere => Ok(SlotPartition::whole_sphere(spin)),
        PartitionSpec::Hemispheres => Ok(SlotPartition::hemispheres(spin)),
        PartitionSpec::ThreeRegion => Ok(SlotPartition::three_region(spin)),
        PartitionSpec::ThetaBands { width } => wrap(SlotPartition::theta_bands(spin, *width)),
        PartitionSpec::Rectangles { n_theta, n_phi } => wrap(SlotPartition::rectangles(spin, *n_theta, *n_phi)),
        PartitionSpec::Custom { slots } => {
            let slots = slots
                .iter()
                .map(|s| {
                    let regions = s
                        .regions
                        .iter()
                        .map(|r| AngularRect::new(r[0], r[1], r[2], r[3]))
                        .collect::<macroreal_core::Result<Vec<_>>>()
                        .map_err(|e| invalid(format!("partition slot {}: {e}", s.name)))?;
                    Ok(Slot::new(s.name.clone(), regions))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            wrap(SlotPartition::new(spin, slots))
        }
    }
}

fn build_model(s: &Scenario, spin: SpinQuantumNumber) -> Result<LindbladModel, CliError> {
    let n = spin.n_qubits();
    let omega = s.system.omega;
    let repr = match s.system.representation {
        RepresentationSpec::Dicke => Representation::Dicke,
        RepresentationSpec::Full => Representation::Full,
    };
    let mode = match s.system.operator_mode {
        ModeSpec::Collective => OperatorMode::Collective,
        ModeSpec::Local => OperatorMode::Local,
    };
    let model = match s.environment {
        EnvironmentSpec::None => build_closed_model(n, omega, repr),
        EnvironmentSpec::Dephasing { gamma_dp } => build_dephasing_model(n, omega, gamma_dp, repr, mode),
        EnvironmentSpec::Thermal { gamma_th, n_bar } => build_thermal_model(n, omega, gamma_th, n_bar, repr, mode),
    };
    model.map_err(|e| invalid(format!("model: {e}")))
}

fn uniform_grid(t_end: f64, step: f64, snapshots: &[f64]) -> Result<(Vec<f64>, Vec<usize>), CliError> {
    let n = (t_end / step).round();
    if n < 1.0 || (n * step - t_end).abs() > 1e-9 * t_end {
        return Err(invalid(format!("time: t_end = {t_end} is not a multiple of step = {step}")));
    }
    if n as usize + 1 > MAX_GRID_POINTS {
        return Err(invalid(format!("time: {} grid points exceed the limit {MAX_GRID_POINTS}", n as usize + 1)));
    }
    let n = n as usize;
    let times: Vec<f64> = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
    let mut idx = Vec::with_capacity(snapshots.len());
    for &s in snapshots {
        if !(0.0..=t_end).contains(&s) {
            return Err(invalid(format!("time: snapshot {s} outside [0, {t_end}]")));
        }
        let k = (s / step).round();
        if (k * step - s).abs() > 1e-9 * step.max(s) {
            return Err(invalid(format!("time: snapshot {s} is not on the grid of step {step}")));
        }
        idx.push(k as usize);
    }
    if idx.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("time: snapshots must be strictly ascending"));
    }
    Ok((times, idx))
}

/// Performs every check `run` performs, without executing the dynamics.
pub fn plan(scenario: Scenario) -> Result<Plan, CliError> {
    let s = scenario;
    if s.name.trim().is_empty() {
        return Err(invalid("name must not be empty"));
    }
    positive("system.omega", s.system.omega)?;
    let spin = spin_of(&s.system)?;
    match s.environment {
        EnvironmentSpec::None => {}
        EnvironmentSpec::Dephasing { gamma_dp } => non_negative("environment.gamma_dp", gamma_dp)?,
        EnvironmentSpec::Thermal { gamma_th, n_bar } => {
            non_negative("environment.gamma_th", gamma_th)?;
            non_negative("environment.n_bar", n_bar)?;
        }
    }
    let mut warnings = Vec::new();
    let lindblad_engine = matches!(s.engine, Engine::Master | Engine::Qsd);
    if !lindblad_engine {
        if s.environment != EnvironmentSpec::None {
            return Err(invalid(format!(
                "engine `{}` requires environment `none` (the toy model builds its dephasing in)",
                s.engine.as_str()
            )));
        }
        if s.system.representation != RepresentationSpec::Dicke || s.system.operator_mode != ModeSpec::Collective {
            return Err(invalid(format!("engine `{}` runs in the Dicke representation only", s.engine.as_str())));
        }
    }
    if s.engine != Engine::Toy && s.toy.is_some() {
        return Err(invalid("[toy] is only valid with engine `toy`"));
    }
    if s.engine != Engine::Qsd && s.qsd.is_some() {
        return Err(invalid("[qsd] is only valid with engine `qsd`"));
    }

    let (toy, times, snapshot_indices) = if s.engine == Engine::Toy {
        let spec = s.toy.ok_or_else(|| invalid("engine `toy` requires a [toy] section"))?;
        if s.time.t_end.is_some() || s.time.step.is_some() {
            return Err(invalid("engine `toy`: the time grid follows from [toy]; remove time.t_end and time.step"));
        }
        let params = ToyModelParams::new(s.system.omega, spec.delta_t, spec.n_steps)
            .map_err(|e| invalid(format!("toy: {e}")))?;
        warnings.extend(params.warnings().iter().map(|w| w.to_string()));
        if spec.n_steps == 0 || spec.delta_t == 0.0 {
            let times = vec![0.0];
            if s.time.snapshots.iter().any(|&t| t != 0.0) {
                return Err(invalid("time: snapshots beyond t = 0 need n_steps > 0 and delta_t > 0"));
            }
            (Some(params), times, s.time.snapshots.iter().map(|_| 0).collect())
        } else {
            let (times, idx) = uniform_grid(spec.n_steps as f64 * spec.delta_t, spec.delta_t, &s.time.snapshots)?;
            (Some(params), times, idx)
        }
    } else {
        let t_end = s.time.t_end.ok_or_else(|| invalid("time.t_end is required"))?;
        let step = s.time.step.ok_or_else(|| invalid("time.step is required"))?;
        positive("time.t_end", t_end)?;
        positive("time.step", step)?;
        let (times, idx) = uniform_grid(t_end, step, &s.time.snapshots)?;
        (None, times, idx)
    };

    let model = if lindblad_engine { Some(build_model(&s, spin)?) } else { None };

    if let Some(q) = &s.qsd {
        if q.trajectories == 0 {
            return Err(invalid("qsd.trajectories must be at least 1"));
        }
        if let Some(dt) = q.dt {
            positive("qsd.dt", dt)?;
        }
        let dim = model.as_ref().map_or(0, |m| m.dim());
        let storage = q.trajectories.saturating_mul(times.len()).saturating_mul(dim);
        if storage > MAX_QSD_STORAGE {
            return Err(invalid(format!(
                "qsd: trajectories x grid points x dimension = {storage} exceeds {MAX_QSD_STORAGE}; coarsen time.step"
            )));
        }
    } else if s.engine == Engine::Qsd {
        return Err(invalid("engine `qsd` requires a [qsd] section"));
    }

    let partition = s.partition.as_ref().map(|p| build_partition(p, spin)).transpose()?;

    let bins = match &s.bins {
        BinsSpec::Unit => BinEdges::unit(spin),
        BinsSpec::PolesAndMiddle => BinEdges::poles_and_middle(spin),
        BinsSpec::Edges { edges } => {
            let e = BinEdges::new(edges.clone()).map_err(|e| invalid(format!("bins: {e}")))?;
            let (lo, hi) = (e.edges()[0], e.edges()[e.edges().len() - 1]);
            if lo > -spin.j() || hi < spin.j() {
                return Err(invalid(format!("bins: edges [{lo}, {hi}] do not cover [-{0}, {0}]", spin.j())));
            }
            e
        }
    };

    let a = &s.analysis;
    if let Some(f) = &a.decay_fit {
        if let Some(t) = f.t_max {
            positive("analysis.decay_fit.t_max", t)?;
        }
    }
    if let Some(mr) = &a.mr_check {
        if s.engine == Engine::Qsd {
            return Err(invalid("analysis.mr_check is not available for engine `qsd`"));
        }
        if s.system.representation != RepresentationSpec::Dicke {
            return Err(invalid("analysis.mr_check needs the Dicke representation"));
        }
        if partition.is_none() {
            return Err(invalid("analysis.mr_check requires a [partition]"));
        }
        if let Some(eps) = mr.epsilon {
            non_negative("analysis.mr_check.epsilon", eps)?;
        }
        match (&mr.pairs, &mr.log_grid) {
            (Some(pairs), None) => {
                if pairs.is_empty() {
                    return Err(invalid("analysis.mr_check.pairs must not be empty"));
                }
                for p in pairs {
                    if !(p[0] >= 0.0 && p[1] > p[0] && p[1].is_finite()) {
                        return Err(invalid(format!("analysis.mr_check: invalid pair [{}, {}]", p[0], p[1])));
                    }
                    if let Some(t) = &toy {
                        for &x in p {
                            if t.delta_t() > 0.0 && ((x / t.delta_t()).round() * t.delta_t() - x).abs() > 1e-9 * x.max(t.delta_t()) {
                                return Err(invalid(format!("analysis.mr_check: time {x} is not a multiple of toy.delta_t")));
                            }
                        }
                    }
                }
            }
            (None, Some(g)) => {
                if g.points < 2 {
                    return Err(invalid("analysis.mr_check.log_grid.points must be at least 2"));
                }
                match (g.nu, &toy) {
                    (Some(nu), _) => positive("analysis.mr_check.log_grid.nu", nu)?,
                    (None, Some(t)) if t.delta_t() > 0.0 && t.omega_dt() < PI / 4.0 => {}
                    _ => return Err(invalid("analysis.mr_check.log_grid.nu is required unless the toy rate is defined")),
                }
            }
            _ => return Err(invalid("analysis.mr_check: give exactly one of `pairs` or `log_grid`")),
        }
    }
    if let Some(c) = &a.continuity {
        if let Some(e) = c.eps_mid {
            positive("analysis.continuity.eps_mid", e)?;
        }
        if let Some(d) = c.delta_transfer {
            positive("analysis.continuity.delta_transfer", d)?;
        }
        if c.slots == SeriesSlots::Partition {
            let p = partition
                .as_ref()
                .ok_or_else(|| invalid("analysis.continuity with slots = \"partition\" requires a [partition]"))?;
            if p.index_of("north").is_none() || p.index_of("south").is_none() {
                return Err(invalid("analysis.continuity: the partition needs slots named `north` and `south`"));
            }
            if s.system.representation != RepresentationSpec::Dicke {
                return Err(invalid("analysis.continuity with partition slots needs the Dicke representation"));
            }
        }
    }
    let o = &s.output;
    let names = [&o.histogram, &o.survival, &o.analysis, &o.magnetization];
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || n.contains('/') || n.contains('\\') || *n == "run_record.json" {
            return Err(invalid(format!("output: invalid file name `{n}`")));
        }
        if names[..i].contains(n) {
            return Err(invalid(format!("output: file name `{n}` used twice")));
        }
    }

    Ok(Plan { scenario: s, spin, times, snapshot_indices, toy, model, partition, bins, warnings })
}
