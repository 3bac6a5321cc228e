//! The verbs behind the command line. Each one validates the whole
//! configuration before touching the output directory, writes its files
//! through a single [`RunDir`], and finishes with a manifest.

use std::path::Path;

use nls_core::evolution::{evolve, fmt, Classification, Model, SplitStep, TrajectoryRecord};
use nls_core::field_io::write_field;
use nls_core::groundstate::{gn_constant, GroundState};
use nls_core::params_well::{
    derive_exponents, well_membership, ExponentSet, FieldStats, WellStatus,
};
use nls_core::spectral::FieldState;
use nls_core::virial::{
    coercivity_check, coercivity_eta, fd_crosscheck, make_weights, rms_radius, sample_virial,
    CoercivityCheck, FdReport, VirialSample,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Family, InitialData, RunConfig};
use crate::failure::Failure;
use crate::gscache::load_or_solve;
use crate::initial::build_initial;
use crate::rundir::{GroundStateRecord, RunDir, RunManifest};

/// What a command hands back to `main`: text for stdout and the manifest.
#[derive(Debug)]
pub struct CommandOutput {
    pub stdout: String,
    pub manifest: RunManifest,
}

fn ground_state(cfg: &RunConfig, out: &Path) -> Result<GroundState, Failure> {
    load_or_solve(out, cfg.dim, cfg.p, &cfg.shooting)
}

fn gs_record(gs: &GroundState, cfg: &RunConfig) -> GroundStateRecord {
    GroundStateRecord {
        q0: gs.profile.q0,
        norms: gs.norms,
        pohozaev: gs.norms.pohozaev_residuals(&gs.exps),
        shooting: cfg.shooting.clone(),
    }
}

fn model(cfg: &RunConfig, exps: &ExponentSet) -> Model {
    Model {
        exps: exps.clone(),
        coupling: cfg.coupling,
    }
}

pub fn exponents(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, Failure> {
    cfg.validate()?;
    let exps = derive_exponents(cfg.dim, cfg.p)?;
    let mut dir = RunDir::create(out)?;
    dir.write_json("exponents.json", &exps)?;
    let stdout =
        serde_json::to_string_pretty(&exps).map_err(|e| Failure::Runtime(e.to_string()))?;
    let manifest = dir.finish("exponents", cfg, exps, None, 0)?;
    Ok(CommandOutput { stdout, manifest })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundStateSummary {
    pub dim: usize,
    pub p: f64,
    pub q0: f64,
    pub match_radius: f64,
    pub ode_residual: f64,
    pub norms: nls_core::groundstate::QNorms,
    pub pohozaev: nls_core::groundstate::PohozaevResiduals,
    pub gn_direct: f64,
    pub gn_identity: f64,
}

pub fn groundstate(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, Failure> {
    cfg.validate()?;
    let gs = ground_state(cfg, out)?;
    let (gn_direct, gn_identity) = gn_constant(&gs.norms, &gs.exps);
    let summary = GroundStateSummary {
        dim: cfg.dim,
        p: cfg.p,
        q0: gs.profile.q0,
        match_radius: gs.profile.match_radius,
        ode_residual: gs.profile.ode_residual(),
        norms: gs.norms,
        pohozaev: gs.norms.pohozaev_residuals(&gs.exps),
        gn_direct,
        gn_identity,
    };
    let mut dir = RunDir::create(out)?;
    let mut csv = Vec::new();
    gs.profile.write_csv(&mut csv)?;
    dir.write("groundstate.csv", &csv)?;
    dir.write_json("groundstate.json", &summary)?;
    let stdout = format!(
        "Q(0) = {}\nM(Q) = {}  |grad Q|^2 = {}  E(Q) = {}\nthresholds: energy {}  gradient {}\nPohozaev max residual {:e}  C_GN {} / {}",
        gs.profile.q0,
        gs.norms.mass,
        gs.norms.grad2,
        gs.norms.energy,
        gs.norms.thr_energy,
        gs.norms.thr_grad,
        summary.pohozaev.max(),
        gn_direct,
        gn_identity
    );
    let manifest = dir.finish(
        "groundstate",
        cfg,
        gs.exps.clone(),
        Some(gs_record(&gs, cfg)),
        0,
    )?;
    Ok(CommandOutput { stdout, manifest })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyRecord {
    pub initial: InitialData,
    pub stats: FieldStats,
    pub status: WellStatus,
}

fn classify_field(
    cfg: &RunConfig,
    gs: &GroundState,
    field: &FieldState,
) -> Result<(FieldStats, WellStatus), Failure> {
    let stepper = SplitStep::new(field.grid, model(cfg, &gs.exps))?;
    let stats = stepper.conserved(field);
    let status = well_membership(&stats, &gs.thresholds(), &gs.exps);
    Ok((stats, status))
}

pub fn classify(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, Failure> {
    cfg.validate()?;
    let grid = cfg.grid_spec()?;
    let gs = ground_state(cfg, out)?;
    let field = build_initial(grid, &cfg.initial, &gs)?;
    let (stats, status) = classify_field(cfg, &gs, &field)?;
    let record = ClassifyRecord {
        initial: cfg.initial.clone(),
        stats,
        status,
    };
    let mut dir = RunDir::create(out)?;
    dir.write_json("classify.json", &record)?;
    let stdout = format!(
        "verdict {}\nomega {}\ngrad_ratio {}",
        status.verdict, status.omega, status.grad_ratio
    );
    let manifest = dir.finish(
        "classify",
        cfg,
        gs.exps.clone(),
        Some(gs_record(&gs, cfg)),
        0,
    )?;
    Ok(CommandOutput { stdout, manifest })
}

/// Evolution of one initial datum, shared by `evolve`, `sweep` and the tests.
pub fn run_trajectory(
    cfg: &RunConfig,
    gs: &GroundState,
    init: &InitialData,
) -> Result<(TrajectoryRecord, FieldState), Failure> {
    let grid = cfg.grid_spec()?;
    let mut field = build_initial(grid, init, gs)?;
    let stepper = SplitStep::new(field.grid, model(cfg, &gs.exps))?;
    let record = evolve(
        &stepper,
        &mut field,
        &cfg.evolve_controls(),
        &gs.thresholds(),
        |_, _| {},
    )?;
    Ok((record, field))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolveSummary {
    pub initial: WellStatus,
    pub classification: Classification,
    pub events: Vec<nls_core::evolution::Event>,
    pub steps: usize,
    pub checkpoints: usize,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub momentum_drift: f64,
}

impl EvolveSummary {
    fn of(record: &TrajectoryRecord) -> Self {
        let (m, e, p) = record.drifts();
        Self {
            initial: record.initial,
            classification: record.classification,
            events: record.events.clone(),
            steps: record.steps,
            checkpoints: record.checkpoints.len(),
            mass_drift: m,
            energy_drift: e,
            momentum_drift: p,
        }
    }
}

pub fn evolve_cmd(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, Failure> {
    cfg.validate()?;
    let gs = ground_state(cfg, out)?;
    let (record, last) = run_trajectory(cfg, &gs, &cfg.initial)?;
    let summary = EvolveSummary::of(&record);
    let mut dir = RunDir::create(out)?;
    let mut csv = Vec::new();
    record.write_csv(&mut csv)?;
    dir.write("trajectory.csv", &csv)?;
    dir.write_json("trajectory.json", &summary)?;
    let mut bin = Vec::new();
    write_field(&mut bin, &last)?;
    dir.write("final.field", &bin)?;
    let ev = record.terminal_event();
    let stdout = format!(
        "initial {} (omega {}, grad_ratio {})\nclassification {}\nevent {} at t = {}\nsteps {}",
        record.initial.verdict,
        record.initial.omega,
        record.initial.grad_ratio,
        record.classification,
        ev.name(),
        ev.time(),
        record.steps
    );
    let manifest = dir.finish(
        "evolve",
        cfg,
        gs.exps.clone(),
        Some(gs_record(&gs, cfg)),
        record.steps as u64,
    )?;
    Ok(CommandOutput { stdout, manifest })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub omega: Option<f64>,
    pub grad_ratio: Option<f64>,
    pub verdict: Option<String>,
    pub classification: Option<Classification>,
    pub event: Option<String>,
    pub t_event: Option<f64>,
    pub steps: Option<usize>,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str =
    "lambda,omega,grad_ratio,verdict,classification,event,t_event,steps,error";

impl SweepRow {
    pub fn csv(&self) -> String {
        let f = |x: Option<f64>| x.map(fmt).unwrap_or_default();
        let err = self
            .error
            .as_deref()
            .unwrap_or("")
            .replace([',', '\n'], ";");
        format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt(self.lambda),
            f(self.omega),
            f(self.grad_ratio),
            self.verdict.as_deref().unwrap_or(""),
            self.classification
                .map(|c| c.to_string())
                .unwrap_or_default(),
            self.event.as_deref().unwrap_or(""),
            f(self.t_event),
            self.steps.map(|s| s.to_string()).unwrap_or_default(),
            err
        )
    }
}

fn sweep_row(
    cfg: &RunConfig,
    gs: &GroundState,
    lambda: f64,
) -> (SweepRow, Option<TrajectoryRecord>) {
    let mut init = cfg.initial.clone();
    init.lambda = lambda;
    match run_trajectory(cfg, gs, &init) {
        Ok((rec, _)) => {
            let ev = rec.terminal_event();
            let row = SweepRow {
                lambda,
                omega: Some(rec.initial.omega),
                grad_ratio: Some(rec.initial.grad_ratio),
                verdict: Some(rec.initial.verdict.to_string()),
                classification: Some(rec.classification),
                event: Some(ev.name().to_string()),
                t_event: Some(ev.time()),
                steps: Some(rec.steps),
                error: None,
            };
            (row, Some(rec))
        }
        Err(e) => (
            SweepRow {
                lambda,
                omega: None,
                grad_ratio: None,
                verdict: None,
                classification: None,
                event: None,
                t_event: None,
                steps: None,
                error: Some(e.to_string()),
            },
            None,
        ),
    }
}

/// Runs every λ, in parallel when `jobs != 1`; rows come back in input
/// order regardless of scheduling.
pub fn sweep_rows(
    cfg: &RunConfig,
    gs: &GroundState,
    lambdas: &[f64],
) -> Result<Vec<(SweepRow, Option<TrajectoryRecord>)>, Failure> {
    if cfg.jobs == 1 {
        return Ok(lambdas.iter().map(|&l| sweep_row(cfg, gs, l)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(pool.install(|| lambdas.par_iter().map(|&l| sweep_row(cfg, gs, l)).collect()))
}

pub fn sweep(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, Failure> {
    cfg.validate()?;
    let lambdas = cfg.sweep.values();
    if lambdas.is_empty() {
        return Err(Failure::Config("sweep list is empty".into()));
    }
    if cfg.initial.family == Family::File {
        return Err(Failure::Config(
            "sweep needs a λ-family, not a field file".into(),
        ));
    }
    let gs = ground_state(cfg, out)?;
    let results = sweep_rows(cfg, &gs, &lambdas)?;

    let mut dir = RunDir::create(out)?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for (row, _) in &results {
        csv.push_str(&row.csv());
        csv.push('\n');
    }
    dir.write("atlas.csv", csv.as_bytes())?;
    let rows: Vec<&SweepRow> = results.iter().map(|(r, _)| r).collect();
    dir.write_json("atlas.json", &rows)?;
    let mut steps = 0u64;
    for (i, (_, rec)) in results.iter().enumerate() {
        if let Some(rec) = rec {
            let mut buf = Vec::new();
            rec.write_csv(&mut buf)?;
            dir.write(&format!("trajectory_{i:03}.csv"), &buf)?;
            steps += rec.steps as u64;
        }
    }
    let mut stdout =
        String::from("lambda      omega       grad_ratio  classification  event           t_event");
    for (row, _) in &results {
        match &row.error {
            Some(e) => stdout.push_str(&format!("\n{:<11} error: {e}", row.lambda)),
            None => stdout.push_str(&format!(
                "\n{:<11} {:<11.6} {:<11.6} {:<15} {:<15} {:.6}",
                row.lambda,
                row.omega.unwrap_or(f64::NAN),
                row.grad_ratio.unwrap_or(f64::NAN),
                row.classification
                    .map(|c| c.to_string())
                    .unwrap_or_default(),
                row.event.as_deref().unwrap_or(""),
                row.t_event.unwrap_or(f64::NAN)
            )),
        }
    }
    let manifest = dir.finish(
        "sweep",
        cfg,
        gs.exps.clone(),
        Some(gs_record(&gs, cfg)),
        steps,
    )?;
    Ok(CommandOutput { stdout, manifest })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VirialSummary {
    pub radius: f64,
    pub rms_radius: f64,
    pub initial: WellStatus,
    pub classification: Classification,
    pub fd: Option<FdReport>,
    pub fd_error: Option<String>,
    /// `η` and `E(u₀)`; absent unless the data start inside the well.
    pub eta: Option<f64>,
    pub energy0: f64,
    pub coercivity_holds: Option<bool>,
    pub coercivity: Vec<CoercivityCheck>,
}

pub struct VirialRun {
    pub samples: Vec<VirialSample>,
    pub summary: VirialSummary,
    pub record: TrajectoryRecord,
}

/// Evolves the configured data and samples the localized virial quantities
/// at every checkpoint.
pub fn run_virial(cfg: &RunConfig, gs: &GroundState) -> Result<VirialRun, Failure> {
    let grid = cfg.grid_spec()?;
    let mut field = build_initial(grid, &cfg.initial, gs)?;
    let rms = rms_radius(&field);
    let radius = cfg.virial.radius.unwrap_or(cfg.virial.radius_factor * rms);
    let weights = make_weights(radius, field.grid)?;
    let m = model(cfg, &gs.exps);
    let stepper = SplitStep::new(field.grid, m.clone())?;
    let mut samples = Vec::new();
    let mut sample_err = None;
    let record = evolve(
        &stepper,
        &mut field,
        &cfg.evolve_controls(),
        &gs.thresholds(),
        |f, _| match sample_virial(&stepper.spec, f, &weights, &m) {
            Ok(s) => samples.push(s),
            Err(e) => sample_err = Some(e),
        },
    )?;
    if let Some(e) = sample_err {
        return Err(e.into());
    }
    // the guard checkpoint breaks uniform spacing
    let uniform: Vec<VirialSample> = {
        let h = cfg.controls.dt * cfg.controls.checkpoint_every as f64;
        samples
            .iter()
            .filter(|s| {
                let k = s.t / h;
                (k - k.round()).abs() < 1e-6
            })
            .cloned()
            .collect()
    };
    let (fd, fd_error) = match fd_crosscheck(&uniform) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let energy0 = record.checkpoints[0].stats.energy;
    let inside = record.initial.verdict == nls_core::Verdict::InsideWell && cfg.coupling == 1.0;
    let eta = inside.then(|| coercivity_eta(record.initial.omega, &gs.exps));
    let coercivity: Vec<CoercivityCheck> = match eta {
        Some(eta) => samples
            .iter()
            .map(|s| coercivity_check(s, eta, energy0))
            .collect(),
        None => Vec::new(),
    };
    let coercivity_holds = eta.map(|_| coercivity.iter().all(|c| c.holds));
    Ok(VirialRun {
        summary: VirialSummary {
            radius,
            rms_radius: rms,
            initial: record.initial,
            classification: record.classification,
            fd,
            fd_error,
            eta,
            energy0,
            coercivity_holds,
            coercivity,
        },
        samples,
        record,
    })
}

pub const VIRIAL_HEADER: &str = "t,z,z_prime,z_second,r_functional,mass,grad2";

pub fn virial(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, Failure> {
    cfg.validate()?;
    let gs = ground_state(cfg, out)?;
    let run = run_virial(cfg, &gs)?;
    let mut csv = String::from(VIRIAL_HEADER);
    csv.push('\n');
    for s in &run.samples {
        csv.push_str(
            &[
                s.t,
                s.big_z,
                s.big_z_prime,
                s.big_z_second,
                s.r_functional,
                s.mass,
                s.grad2,
            ]
            .iter()
            .map(|&x| fmt(x))
            .collect::<Vec<_>>()
            .join(","),
        );
        csv.push('\n');
    }
    let mut dir = RunDir::create(out)?;
    dir.write("virial.csv", csv.as_bytes())?;
    dir.write_json("virial.json", &run.summary)?;
    let s = &run.summary;
    let mut stdout = format!(
        "R = {} (rms radius {})\nclassification {}",
        s.radius, s.rms_radius, s.classification
    );
    match (&s.fd, &s.fd_error) {
        (Some(fd), _) => stdout.push_str(&format!(
            "\nFD check over {} samples: first {:e}, second {:e}",
            fd.samples, fd.first, fd.second
        )),
        (None, Some(e)) => stdout.push_str(&format!("\nFD check skipped: {e}")),
        _ => {}
    }
    if let (Some(eta), Some(holds)) = (s.eta, s.coercivity_holds) {
        stdout.push_str(&format!(
            "\neta {eta}, coercivity {}",
            if holds { "holds" } else { "FAILS" }
        ));
    }
    let manifest = dir.finish(
        "virial",
        cfg,
        gs.exps.clone(),
        Some(gs_record(&gs, cfg)),
        run.record.steps as u64,
    )?;
    Ok(CommandOutput { stdout, manifest })
}

pub fn selftest(
    cfg: &RunConfig,
    out: &Path,
    suites: &[crate::config::Suite],
    fault: Option<crate::selftest::Fault>,
) -> Result<CommandOutput, Failure> {
    cfg.validate()?;
    let exps = derive_exponents(cfg.dim, cfg.p)?;
    let mut results = Vec::new();
    for &suite in suites {
        let res = match crate::selftest::run_suite(suite, cfg, out, fault) {
            Ok(r) => r,
            // a suite that cannot run counts as failed; the others still run
            Err(e) => crate::selftest::SuiteResult {
                suite,
                passed: false,
                checks: 0,
                failures: 1,
                worst: f64::NAN,
                tolerance: f64::NAN,
                detail: serde_json::Value::String(e.to_string()),
            },
        };
        results.push(res);
    }
    let passed = results.iter().all(|r| r.passed);
    let summary = crate::selftest::SelftestSummary {
        seed: cfg.seed,
        passed,
        suites: results,
    };
    let mut dir = RunDir::create(out)?;
    dir.write_json("selftest.json", &summary)?;
    let stdout = summary
        .suites
        .iter()
        .map(|r| r.line())
        .collect::<Vec<_>>()
        .join("\n");
    let manifest = dir.finish("selftest", cfg, exps, None, 0)?;
    if passed {
        Ok(CommandOutput { stdout, manifest })
    } else {
        let failed: Vec<&str> = summary
            .suites
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.suite.name())
            .collect();
        Err(Failure::Checks(format!(
            "{stdout}\nfailed suites: {}",
            failed.join(", ")
        )))
    }
}
