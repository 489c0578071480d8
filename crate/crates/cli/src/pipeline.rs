//! Executes a validated plan.

use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Value};

use macroreal_core::checks::{
    continuity_witness, default_pair_times, mr_condition_check, ordered_pairs, Channel, ClosedChannel,
    ContinuityReport, MRReport, MasterChannel, SlotRoles, SlotTimeSeries, ToyChannel, DEFAULT_DELTA_TRANSFER,
    DEFAULT_EPS_MID, DEFAULT_MR_EPSILON,
};
use macroreal_core::dynamics::{
    ensemble_average, fit_decay_rate, integrate_master, integrate_master_observed, magnetization_distribution,
    magnetization_distribution_full, qsd_step_bound, toy_step, DecayFit, MagnetizationHistogram, MasterOptions,
    QsdOptions, Representation, SurvivalSeries,
};
use macroreal_core::husimi::{build_povm, PovmSet, SphereGrid};
use macroreal_core::linalg::{self, CVec};
use macroreal_core::spin::{nonclassical_propagator, DensityMatrix, DickeState};

use crate::output::{self, RunRecord};
use crate::scenario::{Engine, Plan, SeriesSlots};
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub threads: usize,
}

/// Worst-case state diagnostics over every produced density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub trace_drift: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub states: usize,
}

impl Default for StateDiagnostics {
    fn default() -> Self {
        Self { trace_drift: 0.0, hermiticity: 0.0, min_eigenvalue: f64::INFINITY, states: 0 }
    }
}

impl StateDiagnostics {
    fn observe(&mut self, rho: &DensityMatrix) {
        let m = rho.matrix();
        self.trace_drift = self.trace_drift.max((linalg::trace(m) - 1.0).norm());
        self.hermiticity = self.hermiticity.max(linalg::hermiticity_deviation(m));
        self.min_eigenvalue = self.min_eigenvalue.min(linalg::min_eigenvalue(m));
        self.states += 1;
    }
}

#[derive(Debug, Clone)]
pub struct MagnetizationSeries {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub master: Option<Vec<f64>>,
}

impl MagnetizationSeries {
    /// Largest `|mean − master| / stderr` over times with non-zero error.
    pub fn max_z(&self) -> Option<f64> {
        let master = self.master.as_ref()?;
        Some(
            self.mean
                .iter()
                .zip(&self.stderr)
                .zip(master)
                .map(|((m, s), e)| if *s > 0.0 { (m - e).abs() / s } else if (m - e).abs() < 1e-12 { 0.0 } else { f64::INFINITY })
                .fold(0.0, f64::max),
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunResults {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
    pub histograms: Vec<(f64, MagnetizationHistogram)>,
    pub magnetization: Option<MagnetizationSeries>,
    pub decay_fit: Option<DecayFit>,
    pub mr: Option<MRReport>,
    pub continuity: Option<ContinuityReport>,
    pub series: Option<SlotTimeSeries>,
    pub diagnostics: StateDiagnostics,
    pub integrator: Option<Value>,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

struct Collector<'a> {
    plan: &'a Plan,
    povm: Option<&'a PovmSet>,
    survival: Vec<f64>,
    histograms: Vec<(f64, MagnetizationHistogram)>,
    rows: Vec<Vec<f64>>,
    diag: StateDiagnostics,
    next: usize,
}

impl<'a> Collector<'a> {
    fn new(plan: &'a Plan, povm: Option<&'a PovmSet>) -> Self {
        Self {
            plan,
            povm,
            survival: Vec::with_capacity(plan.times.len()),
            histograms: Vec::new(),
            rows: Vec::new(),
            diag: StateDiagnostics::default(),
            next: 0,
        }
    }

    fn histogram(&self, rho: &DensityMatrix, edges: &macroreal_core::dynamics::BinEdges) -> macroreal_core::Result<MagnetizationHistogram> {
        match self.plan.model.as_ref().map(|m| m.representation()) {
            Some(Representation::Full) => magnetization_distribution_full(rho, self.plan.spin.n_qubits(), edges),
            _ => magnetization_distribution(rho, edges),
        }
    }

    fn visit(&mut self, k: usize, t: f64, rho: &DensityMatrix) -> macroreal_core::Result<()> {
        self.diag.observe(rho);
        self.survival.push(rho.population(0));
        while self.next < self.plan.snapshot_indices.len() && self.plan.snapshot_indices[self.next] == k {
            let h = self.histogram(rho, &self.plan.bins)?;
            self.histograms.push((t, h));
            self.next += 1;
        }
        if let Some(c) = &self.plan.scenario.analysis.continuity {
            let row = match c.slots {
                SeriesSlots::Magnetization => {
                    let spin = self.plan.spin;
                    let h = self.histogram(rho, &macroreal_core::dynamics::BinEdges::poles_and_middle(spin))?;
                    let n = h.edges.bin_of(spin.j()).map_or(0.0, |b| h.probabilities[b]);
                    let s = h.edges.bin_of(-spin.j()).map_or(0.0, |b| h.probabilities[b]);
                    vec![n, h.intermediate_mass(spin), s]
                }
                SeriesSlots::Partition => self.povm.expect("built for partition slots").probabilities(rho)?,
            };
            self.rows.push(row);
        }
        Ok(())
    }
}

fn north_state(plan: &Plan) -> DensityMatrix {
    match &plan.model {
        Some(m) => m.all_up(),
        None => DickeState::north(plan.spin).density(),
    }
}

fn dynamical_rate(plan: &Plan) -> f64 {
    match &plan.model {
        Some(m) => m.hamiltonian_norm(),
        None => plan.scenario.system.omega,
    }
}

/// Runs the dynamics and analyses of a plan without touching the file system.
pub fn execute(plan: &Plan, seed_override: Option<u64>) -> Result<RunResults, CliError> {
    let s = &plan.scenario;
    let needs_povm = s.analysis.mr_check.is_some()
        || s.analysis.continuity.map_or(false, |c| c.slots == SeriesSlots::Partition);
    let (grid, povm) = if needs_povm {
        let partition = plan.partition.as_ref().expect("validated");
        let grid = SphereGrid::for_partition(partition)?;
        let povm = build_povm(partition, &grid)?;
        (Some(grid), Some(povm))
    } else {
        (None, None)
    };
    let mut col = Collector::new(plan, povm.as_ref());
    let mut integrator = None;
    let mut magnetization = None;
    let mut seed = None;
    let rho0 = north_state(plan);

    match s.engine {
        Engine::Closed => {
            for (k, &t) in plan.times.iter().enumerate() {
                let u = nonclassical_propagator(plan.spin, s.system.omega, t);
                let rho = DensityMatrix::new(linalg::hermitian_part(&(&u * rho0.matrix() * u.adjoint())))?;
                col.visit(k, t, &rho)?;
            }
        }
        Engine::Toy => {
            let params = plan.toy.expect("validated");
            let mut rho = rho0.clone();
            for (k, &t) in plan.times.iter().enumerate() {
                if k > 0 {
                    rho = toy_step(&rho, &params)?;
                }
                col.visit(k, t, &rho)?;
            }
        }
        Engine::Master => {
            let model = plan.model.as_ref().expect("validated");
            let d = integrate_master_observed(model, &rho0, &plan.times, &MasterOptions::default(), |k, t, r| {
                col.visit(k, t, r)
            })?;
            integrator = Some(json!({
                "accepted_steps": d.accepted_steps,
                "rejected_steps": d.rejected_steps,
                "min_step": d.min_step,
            }));
        }
        Engine::Qsd => {
            let model = plan.model.as_ref().expect("validated");
            let q = s.qsd.expect("validated");
            let master_seed = seed_override.unwrap_or(q.seed);
            seed = Some(master_seed);
            let mut psi0 = CVec::zeros(model.dim());
            psi0[0] = linalg::c(1.0, 0.0);
            let opts = QsdOptions { max_dt: q.dt, ..Default::default() };
            let ens = ensemble_average(model, &psi0, &plan.times, q.trajectories, master_seed, &opts)?;
            for (k, (&t, r)) in plan.times.iter().zip(&ens.mean_states).enumerate() {
                col.visit(k, t, r)?;
            }
            let master = if q.compare_master {
                Some(integrate_master(model, &rho0, &plan.times)?.expectations(&model.magnetization()))
            } else {
                None
            };
            integrator = Some(json!({
                "trajectories": ens.n_trajectories,
                "dt": ens.dt,
                "step_bound": qsd_step_bound(model),
                "max_mean_norm_drift": ens.max_mean_norm_drift,
            }));
            magnetization = Some(MagnetizationSeries {
                mean: ens.magnetization.mean.clone(),
                stderr: ens.magnetization.stderr.clone(),
                master,
            });
        }
    }

    let decay_fit = match &s.analysis.decay_fit {
        Some(f) => {
            let series = SurvivalSeries::new(plan.times.clone(), col.survival.clone())?;
            let series = match f.t_max {
                Some(t) => series.truncated(t),
                None => series,
            };
            Some(fit_decay_rate(&series)?)
        }
        None => None,
    };

    let mr = match &s.analysis.mr_check {
        Some(spec) => {
            let epsilon = spec.epsilon.unwrap_or(DEFAULT_MR_EPSILON);
            let dicke_north = DickeState::north(plan.spin).density();
            let closed;
            let toy;
            let master;
            let channel: &dyn Channel = match s.engine {
                Engine::Closed => {
                    closed = ClosedChannel { spin: plan.spin, omega: s.system.omega };
                    &closed
                }
                Engine::Toy => {
                    toy = ToyChannel { spin: plan.spin, params: plan.toy.expect("validated") };
                    &toy
                }
                Engine::Master => {
                    master = MasterChannel::new(plan.model.clone().expect("validated"));
                    &master
                }
                Engine::Qsd => unreachable!("rejected during validation"),
            };
            let pairs: Vec<(f64, f64)> = match (&spec.pairs, &spec.log_grid) {
                (Some(p), _) => p.iter().map(|p| (p[0], p[1])).collect(),
                (None, Some(g)) => {
                    let nu = g.nu.unwrap_or_else(|| plan.toy.expect("validated").exact_rate());
                    ordered_pairs(channel, &default_pair_times(nu, g.points)?)
                }
                (None, None) => unreachable!("validated"),
            };
            Some(mr_condition_check(
                channel,
                &dicke_north,
                povm.as_ref().expect("built"),
                &pairs,
                grid.as_ref().expect("built"),
                epsilon,
            )?)
        }
        None => None,
    };

    let (continuity, series) = match &s.analysis.continuity {
        Some(c) => {
            let (names, roles) = match c.slots {
                SeriesSlots::Magnetization => (
                    vec!["north".to_string(), "middle".to_string(), "south".to_string()],
                    SlotRoles { north: 0, south: 2, middle: vec![1] },
                ),
                SeriesSlots::Partition => {
                    let p = plan.partition.as_ref().expect("validated");
                    let north = p.index_of("north").expect("validated");
                    let south = p.index_of("south").expect("validated");
                    let middle = (0..p.len()).filter(|&k| k != north && k != south).collect();
                    (p.slots().iter().map(|s| s.name.clone()).collect(), SlotRoles { north, south, middle })
                }
            };
            let series = SlotTimeSeries::new(plan.times.clone(), names, col.rows.clone(), roles)?
                .with_dynamical_rate(dynamical_rate(plan));
            let report = continuity_witness(
                &series,
                c.eps_mid.unwrap_or(DEFAULT_EPS_MID),
                c.delta_transfer.unwrap_or(DEFAULT_DELTA_TRANSFER),
            )?;
            (Some(report), Some(series))
        }
        None => (None, None),
    };

    let mut warnings = plan.warnings.clone();
    if let Some(c) = &continuity {
        if !c.reliable {
            warnings.push(format!(
                "continuity witness unreliable: time step x rate = {:.3} exceeds 0.1",
                plan.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max) * dynamical_rate(plan)
            ));
        }
    }

    Ok(RunResults {
        times: plan.times.clone(),
        survival: col.survival,
        histograms: col.histograms,
        magnetization,
        decay_fit,
        mr,
        continuity,
        series,
        diagnostics: col.diag,
        integrator,
        seed,
        warnings,
    })
}

fn mr_json(r: &MRReport) -> Value {
    json!({
        "pairs": r.pairs.iter().map(|p| json!({"t_i": p.t_i, "t_j": p.t_j, "delta": p.delta})).collect::<Vec<_>>(),
        "epsilon": r.epsilon,
        "verdict": r.verdict.as_str(),
    })
}

fn continuity_json(c: &ContinuityReport) -> Value {
    json!({
        "witness": c.witness,
        "eps_mid": c.eps_mid,
        "delta_transfer": c.delta_transfer,
        "violation_time": c.violation_time,
    })
}

/// The analysis document written to `analysis.json`.
pub fn analysis_json(plan: &Plan, r: &RunResults) -> Value {
    let s = &plan.scenario;
    let decay = r.decay_fit.as_ref().map(|f| {
        let mut v = json!({
            "nu": f.nu,
            "intercept": f.intercept,
            "rms_residual": f.rms_residual,
            "max_abs_error": f.max_abs_error,
            "points": f.points,
        });
        if let Some(t) = plan.toy {
            v["approximate_nu"] = json!(t.approximate_rate());
            v["exact_nu"] = json!(t.exact_rate());
        }
        v
    });
    let snapshots: Vec<Value> = r
        .histograms
        .iter()
        .map(|(t, h)| json!({"time": t, "intermediate_mass": h.intermediate_mass(plan.spin)}))
        .collect();
    json!({
        "scenario": s.name,
        "engine": s.engine.as_str(),
        "seed": r.seed,
        "warnings": r.warnings,
        "diagnostics": {
            "trace_drift": r.diagnostics.trace_drift,
            "hermiticity": r.diagnostics.hermiticity,
            "min_eigenvalue": r.diagnostics.min_eigenvalue,
            "states": r.diagnostics.states,
            "integrator": r.integrator,
        },
        "snapshots": snapshots,
        "decay_fit": decay,
        "mr_check": r.mr.as_ref().map(mr_json),
        "mr_notes": r.mr.as_ref().map(|m| m.notes.clone()).unwrap_or_default(),
        "continuity": r.continuity.as_ref().map(continuity_json),
        "continuity_reliable": r.continuity.as_ref().map(|c| c.reliable),
        "qsd": r.magnetization.as_ref().map(|m| json!({"max_z_vs_master": m.max_z()})),
    })
}

/// Executes the plan and writes every output plus `run_record.json`.
pub fn run(plan: &Plan, scenario_text: &str, opts: &RunOptions) -> Result<(RunResults, RunRecord), CliError> {
    let start = Instant::now();
    let results = execute(plan, opts.seed)?;
    std::fs::create_dir_all(&opts.out_dir)?;
    let o = &plan.scenario.output;
    let dir = &opts.out_dir;
    let mut files = Vec::new();

    let hist = output::csv(
        &["time", "bin_lo", "bin_hi", "probability"],
        results.histograms.iter().flat_map(|(t, h)| {
            let e = h.edges.edges().to_vec();
            h.probabilities
                .iter()
                .enumerate()
                .map(move |(k, p)| vec![*t, e[k], e[k + 1], *p])
                .collect::<Vec<_>>()
        }),
    );
    files.push(output::write_file(dir, &o.histogram, &hist)?);

    let surv = output::csv(
        &["time", "A"],
        results.times.iter().zip(&results.survival).map(|(t, a)| vec![*t, *a]),
    );
    files.push(output::write_file(dir, &o.survival, &surv)?);

    if let Some(m) = &results.magnetization {
        let text = match &m.master {
            Some(master) => output::csv(
                &["time", "mean", "stderr", "master"],
                (0..results.times.len()).map(|k| vec![results.times[k], m.mean[k], m.stderr[k], master[k]]),
            ),
            None => output::csv(
                &["time", "mean", "stderr"],
                (0..results.times.len()).map(|k| vec![results.times[k], m.mean[k], m.stderr[k]]),
            ),
        };
        files.push(output::write_file(dir, &o.magnetization, &text)?);
    }

    let analysis = serde_json::to_string_pretty(&analysis_json(plan, &results)).expect("serializable") + "\n";
    files.push(output::write_file(dir, &o.analysis, &analysis)?);

    let record = RunRecord {
        scenario: plan.scenario.name.clone(),
        scenario_sha256: output::sha256_hex(scenario_text.as_bytes()),
        code_version: env!("CARGO_PKG_VERSION").to_owned(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        master_seed: results.seed,
        threads: opts.threads,
        outputs: files,
    };
    let rec = serde_json::to_string_pretty(&record).expect("serializable") + "\n";
    std::fs::write(dir.join("run_record.json"), rec)?;
    Ok((results, record))
}
