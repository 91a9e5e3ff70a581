use crate::config::{
    check_labels, read_toml, AntisymConfig, ConfigError, Formalism, Observable, RunConfig, SamplingConfig,
};
use crate::output::{emit, ResultDocument, Row};
use crate::{BackendArg, GlobalOpts, ModeArg};
use fermisim::antisym::{self, prepare_ordered_configuration, AntisymLayout, Bank};
use fermisim::fq::{op_count_fq, trotter_evolve_fq_with};
use fermisim::observables::{
    charge_density, correlation, expected_energy, momentum_distribution, required_trials, EnergyReport, Estimate,
    MomentumReport,
};
use fermisim::oracle::slater_antisymmetrize;
use fermisim::sq::{op_count, trotter_evolve};
use fermisim::validate::{run_suite, Check, Suite};
use fermisim::{
    Backend, BasisString, Error, FirstQuantizedLayout, HubbardParams, LatticeSpec, Model, ModeLayout, QuantumState,
    RngSeed, SamplingPlan, Statistics, TrotterPlan,
};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

/// Norm and particle-number drift tolerated before a run is declared broken.
const DRIFT_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Library(Error),
    Invariant(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Library(e) if e.is_user_error() => 2,
            CliError::Library(_) | CliError::Invariant(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

fn backend(arg: BackendArg) -> Backend {
    match arg {
        BackendArg::Dense => Backend::Dense,
        BackendArg::Sparse => Backend::Sparse,
    }
}

fn statistics(arg: ModeArg) -> Statistics {
    match arg {
        ModeArg::Fermi => Statistics::Fermi,
        ModeArg::Bose => Statistics::Bose,
    }
}

// evolve

#[derive(Debug, Serialize)]
struct CorrelationResult {
    modes: Vec<usize>,
    #[serde(flatten)]
    estimate: Estimate,
}

#[derive(Debug, Serialize)]
struct MomentumResult {
    particle: usize,
    #[serde(flatten)]
    report: MomentumReport,
}

#[derive(Debug, Default, Serialize)]
struct EvolveResults {
    /// How the first-quantized input was built.
    #[serde(skip_serializing_if = "Option::is_none")]
    preparation: Option<&'static str>,
    norm: f64,
    support_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<Vec<Estimate>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pair_correlation: Vec<CorrelationResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    correlations: Vec<CorrelationResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    momentum: Vec<MomentumResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<EnergyReport>,
}

fn apply_overrides(config: &mut RunConfig, global: &GlobalOpts) {
    if let Some(b) = global.backend {
        config.backend = backend(b);
    }
    if let Some(seed) = global.seed {
        config.sampling.get_or_insert(SamplingConfig { trials: Some(1000), seed, epsilon: None }).seed = seed;
    }
    config.validation_mode |= global.validation_mode;
    // resolve the trial count so the echoed config is self-contained
    if let Some(s) = &mut config.sampling {
        if s.trials.is_none() {
            s.trials = s.epsilon.and_then(|e| required_trials(e).ok()).map(|n| n as usize);
        }
    }
}

/// Builds the first-quantized input with the reversible antisymmetrizer,
/// falling back to the brute-force reference when the ancilla registers do
/// not fit in a basis string.
fn prepare_first(layout: &FirstQuantizedLayout, labels: &[u32], stats: Statistics, b: Backend) -> Result<(QuantumState, &'static str), CliError> {
    match AntisymLayout::for_labels(labels.len(), layout.num_labels() as u32) {
        Ok(reg) => {
            let mut s = prepare_ordered_configuration(&reg, labels)?;
            antisym::antisymmetrize(&mut s, &reg, stats)?;
            let s = antisym::extract_register_a(&s, &reg, layout.register_layout())?;
            Ok((s.to_backend(b)?, "antisymmetrizer"))
        }
        Err(Error::TooLarge(_)) => {
            let amps = slater_antisymmetrize(labels)?
                .into_iter()
                .map(|(tuple, a)| {
                    let a = if stats == Statistics::Bose { C64::new(a.norm(), 0.0) } else { a };
                    Ok((layout.encode_labels(&tuple)?, a))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok((QuantumState::from_amplitudes(layout.register_layout(), amps, b)?, "reference"))
        }
        Err(e) => Err(e.into()),
    }
}

fn estimate_rows(observable: &str, index: impl ToString, e: &Estimate) -> Row {
    Row { observable: observable.into(), index: index.to_string(), exact: e.exact, sampled: e.sampled, stderr: e.stderr }
}

fn join(modes: &[usize]) -> String {
    modes.iter().map(|q| q.to_string()).collect::<Vec<_>>().join("-")
}

pub fn evolve(path: &Path, global: &GlobalOpts) -> Result<ExitCode, CliError> {
    let start = Instant::now();
    let mut config: RunConfig = read_toml(path)?;
    apply_overrides(&mut config, global);
    config.validate()?;
    fermisim::state::set_validation_mode(config.validation_mode);

    let params = HubbardParams::new(config.params.v0, config.params.t0)?;
    let plan = TrotterPlan::new(config.plan.t, config.plan.r)?;
    let lattice = LatticeSpec::chain(config.lattice.m)?;
    let mut results = EvolveResults::default();

    let (state, model, ops) = match config.formalism {
        Formalism::Second => {
            let modes = ModeLayout::for_lattice(&lattice)?;
            let b = modes.encode_occupation(&config.particles.occupied)?;
            let mut s = QuantumState::basis(modes.register_layout(), b, config.backend)?;
            trotter_evolve(&mut s, &lattice, &params, &plan)?;
            (s, Model::Second(lattice.clone()), op_count(&lattice, &plan)?)
        }
        Formalism::First => {
            let layout = FirstQuantizedLayout::new(config.particles.labels.len(), config.lattice.m)?;
            let (mut s, how) = prepare_first(&layout, &config.particles.labels, config.mode, config.backend)?;
            results.preparation = Some(how);
            trotter_evolve_fq_with(&mut s, &layout, &params, &plan, config.mode)?;
            (s, Model::First(layout), op_count_fq(&layout, &plan))
        }
    };

    results.norm = state.norm_sqr();
    results.support_size = state.support_size();
    if (results.norm - 1.0).abs() > DRIFT_TOL {
        return Err(CliError::Invariant(format!("norm drifted to {}", results.norm)));
    }

    let seed = config.sampling.as_ref().map_or(0, |s| s.seed);
    let sampling = config
        .sampling
        .as_ref()
        .map(|s| SamplingPlan::new(s.trials.unwrap_or(1), RngSeed(s.seed)))
        .transpose()?;
    // an independent stream per observable keeps results stable when the
    // observable list changes
    let stream = |i: u64| sampling.map(|p| SamplingPlan { seed: p.seed.stream(i), ..p });
    let mut rows = Vec::new();

    if config.observables.contains(&Observable::Density) {
        let d = charge_density(&state, &model, stream(0).as_ref())?;
        let total: f64 = d.iter().map(|e| e.exact).sum();
        if (total - config.particle_count() as f64).abs() > DRIFT_TOL {
            return Err(CliError::Invariant(format!(
                "densities sum to {total}, expected {} particles",
                config.particle_count()
            )));
        }
        rows.extend(d.iter().enumerate().map(|(s, e)| estimate_rows("density", s + 1, e)));
        results.density = Some(d);
    }
    if config.observables.contains(&Observable::PairCorrelation) {
        let modes = 2 * config.lattice.m;
        let mut k = 0;
        for i in 0..modes {
            for j in i + 1..modes {
                k += 1;
                let e = correlation(&state, &model, &[i, j], stream(100 + k).as_ref())?;
                rows.push(estimate_rows("pair_correlation", join(&[i, j]), &e));
                results.pair_correlation.push(CorrelationResult { modes: vec![i, j], estimate: e });
            }
        }
    }
    for (k, set) in config.correlations.iter().enumerate() {
        let e = correlation(&state, &model, set, stream(10_000 + k as u64).as_ref())?;
        rows.push(estimate_rows("correlation", join(set), &e));
        results.correlations.push(CorrelationResult { modes: set.clone(), estimate: e });
    }
    if config.observables.contains(&Observable::Momentum) {
        for particle in 0..config.particle_count() {
            let r = momentum_distribution(&state, &model, particle, stream(20_000 + particle as u64).as_ref())?;
            for (bin, &p) in r.exact.iter().enumerate() {
                let (sampled, stderr) = match &r.sampled {
                    Some(h) => {
                        let f = h.frequency(&(bin as u64));
                        (Some(f), Some((f * (1.0 - f) / h.total as f64).sqrt()))
                    }
                    None => (None, None),
                };
                rows.push(Row {
                    observable: "momentum".into(),
                    index: format!("{particle}:{bin}"),
                    exact: p,
                    sampled,
                    stderr,
                });
            }
            results.momentum.push(MomentumResult { particle, report: r });
        }
    }
    if config.observables.contains(&Observable::Energy) {
        let e = expected_energy(&state, &model, &params)?;
        rows.push(Row::exact("energy", "total", e.total));
        rows.push(Row::exact("energy", "potential", e.potential));
        rows.push(Row::exact("energy", "kinetic", e.kinetic));
        results.energy = Some(e);
    }

    let doc = ResultDocument {
        command: "evolve",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        validation_mode: config.validation_mode,
        config,
        results,
        rows,
        op_count: Some(ops),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    emit(&doc, global.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// antisym

#[derive(Debug, Serialize)]
struct AmplitudeEntry {
    labels: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct AntisymResults {
    n: usize,
    word_bits: usize,
    qubits: usize,
    amplitudes: Vec<AmplitudeEntry>,
    /// |⟨reference|output⟩|² against the brute-force (anti)symmetrized tuple.
    fidelity: f64,
    norm: f64,
    /// Every ancilla register was verified zero on every branch.
    ancillas_clean: bool,
}

pub fn antisym(
    labels: &[u32],
    n: Option<usize>,
    mode: Option<ModeArg>,
    config_path: Option<&Path>,
    global: &GlobalOpts,
) -> Result<ExitCode, CliError> {
    let start = Instant::now();
    let mut config = match config_path {
        Some(p) => read_toml::<AntisymConfig>(p)?,
        None => AntisymConfig { labels: labels.to_vec(), mode: Statistics::Fermi, max_label: None },
    };
    if let Some(m) = mode {
        config.mode = statistics(m);
    }
    fermisim::state::set_validation_mode(global.validation_mode);
    if let Some(n) = n {
        if n != config.labels.len() {
            return Err(CliError::Config(format!("`n` is {n} but {} labels were given", config.labels.len())));
        }
    }
    let max_label = config.max_label.unwrap_or_else(|| config.labels.iter().copied().max().unwrap_or(1));
    check_labels("labels", &config.labels, max_label)?;

    let layout = AntisymLayout::for_labels(config.labels.len(), max_label)?;
    let mut state = prepare_ordered_configuration(&layout, &config.labels)?;
    antisym::antisymmetrize(&mut state, &layout, config.mode)?;
    if let Some(b) = global.backend {
        // the register is too wide for the dense backend in general; only
        // convert when asked and it fits
        state = state.to_backend(backend(b))?;
    }

    let a = layout.words(Bank::A);
    let amplitudes: Vec<AmplitudeEntry> = state
        .iter_nonzero()
        .map(|(b, amp)| AmplitudeEntry {
            labels: a.read_all(b).iter().map(|&w| w as u32 + 1).collect(),
            re: amp.re,
            im: amp.im,
        })
        .collect();
    let reference = slater_antisymmetrize(&config.labels)?;
    let overlap: C64 = reference
        .iter()
        .map(|(tuple, r)| {
            let r = if config.mode == Statistics::Bose { C64::new(r.norm(), 0.0) } else { *r };
            let words: Vec<u64> = tuple.iter().map(|&v| u64::from(v) - 1).collect();
            r.conj() * state.amplitude(a.write_all(BasisString(0), &words))
        })
        .sum();
    let fidelity = overlap.norm_sqr();
    if fidelity < 1.0 - 1e-10 {
        return Err(CliError::Invariant(format!("fidelity with the reference is only {fidelity}")));
    }
    let rows = amplitudes
        .iter()
        .flat_map(|e| {
            let idx = e.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("-");
            [Row::exact("amplitude_re", &idx, e.re), Row::exact("amplitude_im", &idx, e.im)]
        })
        .collect();
    let results = AntisymResults {
        n: layout.particles(),
        word_bits: layout.word_bits(),
        qubits: layout.register_layout().width(),
        amplitudes,
        fidelity,
        norm: state.norm_sqr(),
        ancillas_clean: true,
    };
    let doc = ResultDocument {
        command: "antisym",
        version: env!("CARGO_PKG_VERSION"),
        seed: 0,
        validation_mode: global.validation_mode,
        config,
        results,
        rows,
        op_count: None,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    emit(&doc, global.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// validate

#[derive(Debug, Serialize)]
struct ValidateConfig {
    suite: Suite,
}

#[derive(Debug, Serialize)]
struct ValidateResults {
    checks: Vec<Check>,
    all_pass: bool,
}

pub fn validate(suite: &str, global: &GlobalOpts) -> Result<ExitCode, CliError> {
    let start = Instant::now();
    let suite: Suite = suite.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
    fermisim::state::set_validation_mode(global.validation_mode);
    let checks = run_suite(suite)?;

    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    println!("{suite}");
    for c in &checks {
        println!(
            "  {:<width$}  {:>24}  {:<22}  {}",
            c.name,
            format!("{:.6e}", c.measured),
            c.bound.to_string(),
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let all_pass = checks.iter().all(|c| c.pass);
    println!("{}", if all_pass { "all checks passed" } else { "some checks FAILED" });

    if let Some(out) = &global.output {
        let rows = checks.iter().map(|c| Row::exact(suite.name(), &c.name, c.measured)).collect();
        let doc = ResultDocument {
            command: "validate",
            version: env!("CARGO_PKG_VERSION"),
            seed: 0,
            validation_mode: global.validation_mode,
            config: ValidateConfig { suite },
            results: ValidateResults { checks, all_pass },
            rows,
            op_count: None,
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        emit(&doc, Some(out))?;
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
