//! Self-checks against the exact references, grouped into suites.
//!
//! Each suite returns one [`Check`] per property with the measured value
//! and the bound it must satisfy. The helpers behind the suites are public
//! so that tests and tools can report the raw numbers.

use crate::antisym::sort::{SortKind, SortSchedule};
use crate::antisym::{
    antisymmetrize, prepare_ordered_configuration, symmetric_transposition_test, transposition_test,
    unantisymmetrize, AntisymLayout, Bank, Statistics,
};
use crate::error::{Error, Result};
use crate::fq::{kinetic_total, op_count_fq, trotter_evolve_fq, FirstQuantizedLayout};
use crate::lattice::{HubbardParams, LatticeSpec, Spin, TrotterPlan};
use crate::layout::BasisString;
use crate::oracle::{
    antisymmetric_sector_basis, build_fq_hamiltonian, build_sq_hamiltonian, fq_to_sq, hopping_term_matrix,
    number_sector, restrict, slater_antisymmetrize, slater_state, state_to_vector, vector_to_state, HermitianEigen,
};
use crate::sq::{evolve_hopping_pair, hopping_terms, op_count, trotter_evolve, ModeLayout};
use crate::state::{Backend, QuantumState};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Antisym,
    TrotterSq,
    TrotterFq,
    Crossform,
    Scaling,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Antisym, Suite::TrotterSq, Suite::TrotterFq, Suite::Crossform, Suite::Scaling];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Antisym => "antisym",
            Suite::TrotterSq => "trotter-sq",
            Suite::TrotterFq => "trotter-fq",
            Suite::Crossform => "crossform",
            Suite::Scaling => "scaling",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::invalid(format!("unknown suite `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Acceptance region for a measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Between(f64, f64),
}

impl Bound {
    pub fn admits(self, x: f64) -> bool {
        match self {
            Bound::AtMost(hi) => x <= hi,
            Bound::AtLeast(lo) => x >= lo,
            Bound::Between(lo, hi) => (lo..=hi).contains(&x),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(hi) => write!(f, "<= {hi:e}"),
            Bound::AtLeast(lo) => write!(f, ">= {lo}"),
            Bound::Between(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Check { name: name.into(), measured, pass: bound.admits(measured), bound }
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Antisym => antisym_suite(),
        Suite::TrotterSq => trotter_sq_suite(),
        Suite::TrotterFq => trotter_fq_suite(),
        Suite::Crossform => crossform_suite(),
        Suite::Scaling => scaling_suite(),
    }
}

// antisymmetrizer

/// Strictly increasing `n`-tuples over `1..=max_label`.
pub fn increasing_tuples(n: usize, max_label: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                let start = t.last().map_or(1, |&l| l + 1);
                (start..=max_label).map(move |l| {
                    let mut u = t.clone();
                    u.push(l);
                    u
                })
            })
            .collect();
    }
    out
}

/// Quality numbers for one run of the antisymmetrizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntisymOutcome {
    /// |⟨reference|output⟩|² against the Slater (or symmetric) reference.
    pub fidelity: f64,
    pub norm_error: f64,
    /// Largest exchange violation over all particle pairs, with the sign
    /// appropriate to the statistics.
    pub exchange_violation: f64,
    /// Largest amplitude difference after running the pipeline backwards.
    pub round_trip_error: f64,
}

pub fn antisym_case(labels: &[u32], max_label: u32, stats: Statistics) -> Result<AntisymOutcome> {
    let n = labels.len();
    let layout = AntisymLayout::for_labels(n, max_label)?;
    let input = prepare_ordered_configuration(&layout, labels)?;
    let mut state = input.clone();
    antisymmetrize(&mut state, &layout, stats)?;

    let a = layout.words(Bank::A);
    let reference = slater_antisymmetrize(labels)?;
    let overlap: C64 = reference
        .iter()
        .map(|(tuple, r)| {
            let words: Vec<u64> = tuple.iter().map(|&v| u64::from(v) - 1).collect();
            let r = if stats == Statistics::Bose { C64::new(r.norm(), 0.0) } else { *r };
            r.conj() * state.amplitude(a.write_all(BasisString(0), &words))
        })
        .sum();
    let mut exchange_violation = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let v = match stats {
                Statistics::Fermi => transposition_test(&state, &a, i, j)?,
                Statistics::Bose => symmetric_transposition_test(&state, &a, i, j)?,
            };
            exchange_violation = exchange_violation.max(v);
        }
    }
    let norm_error = (state.norm_sqr() - 1.0).abs();
    let mut back = state;
    unantisymmetrize(&mut back, &layout, stats)?;
    Ok(AntisymOutcome {
        fidelity: overlap.norm_sqr(),
        norm_error,
        exchange_violation,
        round_trip_error: back.max_abs_diff(&input)?,
    })
}

/// Number of permutations of up to `max_n` keys whose recorded sort parity
/// disagrees with the inversion parity, over both sort schedules.
pub fn sort_parity_mismatches(max_n: usize) -> usize {
    let mut bad = 0;
    for n in 1..=max_n {
        for perm in permutations(n) {
            let inversions = (0..n).map(|i| (i + 1..n).filter(|&j| perm[i] > perm[j]).count()).sum::<usize>();
            for kind in [SortKind::Heap, SortKind::OddEven] {
                let t = kind.sort(&perm);
                let replay = kind.decode(n, t.record).map(|s| s == t.swaps).unwrap_or(false);
                if t.parity() != (inversions % 2 == 1) || !replay {
                    bad += 1;
                }
            }
        }
    }
    bad
}

fn permutations(n: usize) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![vec![]];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..=p.len()).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, n as u64 - 1);
                q
            })
        })
        .collect()
}

fn antisym_suite() -> Result<Vec<Check>> {
    let mut cases = 0;
    let (mut fid, mut norm, mut viol, mut trip) = (1.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut bose_fid, mut bose_viol) = (1.0f64, 0.0f64);
    for n in 1..=3 {
        for labels in increasing_tuples(n, 8) {
            let f = antisym_case(&labels, 8, Statistics::Fermi)?;
            let b = antisym_case(&labels, 8, Statistics::Bose)?;
            cases += 1;
            fid = fid.min(f.fidelity);
            norm = norm.max(f.norm_error).max(b.norm_error);
            viol = viol.max(f.exchange_violation);
            trip = trip.max(f.round_trip_error).max(b.round_trip_error);
            bose_fid = bose_fid.min(b.fidelity);
            bose_viol = bose_viol.max(b.exchange_violation);
        }
    }
    Ok(vec![
        Check::new("cases (n <= 3, labels 1..8)", cases as f64, Bound::Between(92.0, 92.0)),
        Check::new("min fidelity vs Slater reference", fid, Bound::AtLeast(1.0 - 1e-10)),
        Check::new("max norm error", norm, Bound::AtMost(1e-10)),
        Check::new("max transposition violation", viol, Bound::AtMost(1e-10)),
        Check::new("min bose fidelity vs symmetric reference", bose_fid, Bound::AtLeast(1.0 - 1e-10)),
        Check::new("max bose symmetric violation", bose_viol, Bound::AtMost(1e-10)),
        Check::new("max round-trip error", trip, Bound::AtMost(1e-12)),
        Check::new("sort parity mismatches (n <= 5)", sort_parity_mismatches(5) as f64, Bound::AtMost(0.0)),
    ])
}

// Trotter convergence

/// Parameters shared by the convergence suites.
pub const TROTTER_PARAMS: HubbardParams = HubbardParams { v0: 4.0, t0: 1.0 };
pub const TROTTER_TIME: f64 = 1.0;
pub const TROTTER_STEPS: [usize; 4] = [32, 64, 128, 256];

/// ‖ψ_Trotter(r) − ψ_exact‖ for a two-electron, two-site state (↑ on site
/// 1, ↓ on site 2).
pub fn trotter_errors_sq(steps: &[usize]) -> Result<Vec<f64>> {
    let lattice = LatticeSpec::chain(2)?;
    let modes = ModeLayout::for_lattice(&lattice)?;
    let b = modes.encode_occupation(&[(1, Spin::Up), (2, Spin::Down)])?;
    let init = QuantumState::basis(modes.register_layout(), b, Backend::Sparse)?;
    let h = build_sq_hamiltonian(&lattice, &TROTTER_PARAMS)?;
    let exact = HermitianEigen::new(&h)?.propagate(TROTTER_TIME, &state_to_vector(&init)?)?;
    let exact = vector_to_state(modes.register_layout(), &exact, Backend::Sparse)?;
    steps
        .iter()
        .map(|&r| {
            let mut s = init.clone();
            trotter_evolve(&mut s, &lattice, &TROTTER_PARAMS, &TrotterPlan::new(TROTTER_TIME, r)?)?;
            s.l2_distance(&exact)
        })
        .collect()
}

/// Same as [`trotter_errors_sq`] for two particles on four sites in the
/// first-quantized encoding, starting from the Slater state of labels 1, 4.
pub fn trotter_errors_fq(steps: &[usize]) -> Result<Vec<f64>> {
    let layout = FirstQuantizedLayout::new(2, 4)?;
    let init = slater_state(&layout, &[layout.label(1, Spin::Up)?, layout.label(2, Spin::Down)?], Backend::Sparse)?;
    let h = build_fq_hamiltonian(&layout, &TROTTER_PARAMS)?;
    let exact = HermitianEigen::new(&h)?.propagate(TROTTER_TIME, &state_to_vector(&init)?)?;
    let exact = vector_to_state(layout.register_layout(), &exact, Backend::Sparse)?;
    steps
        .iter()
        .map(|&r| {
            let mut s = init.clone();
            trotter_evolve_fq(&mut s, &layout, &TROTTER_PARAMS, &TrotterPlan::new(TROTTER_TIME, r)?)?;
            s.l2_distance(&exact)
        })
        .collect()
}

fn convergence_checks(errors: &[f64], final_bound: f64) -> Vec<Check> {
    let mut out: Vec<Check> = TROTTER_STEPS
        .windows(2)
        .zip(errors.windows(2))
        .map(|(r, e)| Check::new(format!("e({})/e({})", r[0], r[1]), e[0] / e[1], Bound::Between(1.8, 2.2)))
        .collect();
    out.push(Check::new(format!("e({})", TROTTER_STEPS[3]), errors[3], Bound::AtMost(final_bound)));
    out
}

/// Largest deviation of [`evolve_hopping_pair`] from the exact single-term
/// propagator over every basis state of an `m`-site chain.
pub fn hopping_oracle_error(m: usize, dt: f64) -> Result<f64> {
    let lattice = LatticeSpec::chain(m)?;
    let modes = ModeLayout::for_lattice(&lattice)?;
    let params = HubbardParams::new(0.0, 1.0)?;
    let mut worst = 0.0f64;
    for (i, j, spin) in hopping_terms(&lattice) {
        let eig = HermitianEigen::new(&hopping_term_matrix(&lattice, i, j, spin, params.t0)?)?;
        for b in 0..1u64 << modes.num_modes() {
            let mut s = QuantumState::basis(modes.register_layout(), BasisString(b), Backend::Dense)?;
            let v = state_to_vector(&s)?;
            evolve_hopping_pair(&mut s, &lattice, i, j, spin, &params, dt)?;
            let diff = state_to_vector(&s)? - eig.propagate(dt, &v)?;
            worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    Ok(worst)
}

fn trotter_sq_suite() -> Result<Vec<Check>> {
    let mut out = convergence_checks(&trotter_errors_sq(&TROTTER_STEPS)?, 2e-3);
    out.push(Check::new("hopping term vs fermionic oracle (3 sites)", hopping_oracle_error(3, 0.37)?, Bound::AtMost(1e-12)));
    Ok(out)
}

fn trotter_fq_suite() -> Result<Vec<Check>> {
    Ok(convergence_checks(&trotter_errors_fq(&TROTTER_STEPS)?, 2e-2))
}

// cross-formalism

/// Parameter sets for the intertwining check, as (V0, t0, t).
pub const CROSSFORM_POINTS: [(f64, f64, f64); 3] = [(4.0, 1.0, 1.0), (0.0, 0.7, 2.3), (-1.5, 1.2, 0.4)];

/// Largest |fq_to_sq(e^{−iH_fq t}ψ) − e^{−iH_sq t}·fq_to_sq(ψ)| over a few
/// Slater inputs on `n` particles and `m` sites.
pub fn intertwining_error(n: usize, m: usize) -> Result<f64> {
    let layout = FirstQuantizedLayout::new(n, m)?;
    let lattice = LatticeSpec::chain(m)?;
    let labels = 2 * m as u32;
    let inputs: Vec<Vec<u32>> = {
        let all = increasing_tuples(n, labels);
        let step = (all.len() / 4).max(1);
        all.into_iter().step_by(step).collect()
    };
    let mut worst = 0.0f64;
    for (v0, t0, t) in CROSSFORM_POINTS {
        let params = HubbardParams::new(v0, t0)?;
        let fq_eig = HermitianEigen::new(&build_fq_hamiltonian(&layout, &params)?)?;
        let sq_eig = HermitianEigen::new(&build_sq_hamiltonian(&lattice, &params)?)?;
        for tuple in &inputs {
            let fq0 = slater_state(&layout, tuple, Backend::Dense)?;
            let fq_t = fq_eig.propagate(t, &state_to_vector(&fq0)?)?;
            let fq_t = vector_to_state(layout.register_layout(), &fq_t, Backend::Dense)?;
            let lhs = state_to_vector(&fq_to_sq(&fq_t, &layout)?)?;
            let rhs = sq_eig.propagate(t, &state_to_vector(&fq_to_sq(&fq0, &layout)?)?)?;
            worst = worst.max((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    Ok(worst)
}

/// Largest eigenvalue difference between the antisymmetric sector of H_fq
/// and the n-particle sector of H_sq.
pub fn spectrum_error(n: usize, m: usize, params: &HubbardParams) -> Result<f64> {
    let layout = FirstQuantizedLayout::new(n, m)?;
    let basis = antisymmetric_sector_basis(&layout)?;
    let h_fq = build_fq_hamiltonian(&layout, params)?;
    let reduced = basis.adjoint() * h_fq * &basis;
    // symmetrize away rounding before the Hermitian check
    let reduced = (&reduced + reduced.adjoint()).scale(0.5);
    let a = HermitianEigen::new(&reduced)?.sorted_values();
    let h_sq = build_sq_hamiltonian(&LatticeSpec::chain(m)?, params)?;
    let b = HermitianEigen::new(&restrict(&h_sq, &number_sector(2 * m, n)))?.sorted_values();
    if a.len() != b.len() {
        return Err(Error::InvariantViolation(format!("sector sizes differ: {} vs {}", a.len(), b.len())));
    }
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn crossform_suite() -> Result<Vec<Check>> {
    let mut inter = 0.0f64;
    let mut spectral = 0.0f64;
    for n in 1..=3 {
        for m in [2, 4] {
            inter = inter.max(intertwining_error(n, m)?);
            for (v0, t0, _) in CROSSFORM_POINTS {
                spectral = spectral.max(spectrum_error(n, m, &HubbardParams::new(v0, t0)?)?);
            }
        }
    }
    Ok(vec![
        Check::new("intertwining error (n <= 3, m <= 4)", inter, Bound::AtMost(1e-10)),
        Check::new("antisymmetric-sector spectrum error", spectral, Bound::AtMost(1e-10)),
    ])
}

// scaling

/// Total second-quantized gate count per step, m sites.
pub fn sq_step_cost(m: usize) -> Result<u64> {
    Ok(op_count(&LatticeSpec::chain(m)?, &TrotterPlan::new(1.0, 1)?)?.total())
}

/// First-quantized kinetic gate count per step for one particle on 2^b
/// sites.
pub fn fq_kinetic_cost(position_bits: usize) -> Result<u64> {
    let layout = FirstQuantizedLayout::new(1, 1 << position_bits)?;
    Ok(kinetic_total(&op_count_fq(&layout, &TrotterPlan::new(1.0, 1)?)))
}

fn scaling_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for m in [4, 8, 16] {
        let ratio = sq_step_cost(2 * m)? as f64 / sq_step_cost(m)? as f64;
        out.push(Check::new(format!("second quantized count({})/count({m})", 2 * m), ratio, Bound::AtMost(4.5)));
    }
    for b in [2, 3, 4] {
        let ratio = fq_kinetic_cost(2 * b)? as f64 / fq_kinetic_cost(b)? as f64;
        out.push(Check::new(format!("first quantized kinetic count(b={})/count(b={b})", 2 * b), ratio, Bound::AtMost(4.5)));
    }
    Ok(out)
}
