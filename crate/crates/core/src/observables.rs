//! Densities, correlations, momentum histograms and energies.
//!
//! Every observable has an exact value read straight from the amplitudes
//! and, given a [`SamplingPlan`], a Born-sampled estimate with its standard
//! error. Repeated preparation of the same state is modeled as independent
//! draws from it.

use crate::error::{Error, Result};
use crate::fq::FirstQuantizedLayout;
use crate::lattice::{HubbardParams, LatticeSpec, Spin};
use crate::layout::BasisString;
use crate::oracle::{build_fq_hamiltonian, build_sq_hamiltonian, state_to_vector};
use crate::sq::ModeLayout;
use crate::state::{QuantumState, RngSeed};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Which encoding a state uses, with enough geometry to read it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    /// One qubit per (site, spin) mode.
    Second(LatticeSpec),
    /// One qu-word per particle on an open chain.
    First(FirstQuantizedLayout),
}

impl Model {
    pub fn sites(&self) -> usize {
        match self {
            Model::Second(l) => l.sites(),
            Model::First(l) => l.sites(),
        }
    }

    fn check(&self, state: &QuantumState) -> Result<()> {
        let expected = match self {
            Model::Second(l) => ModeLayout::for_lattice(l)?.register_layout(),
            Model::First(l) => l.register_layout(),
        };
        if *state.layout() != expected {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }

    /// Spin-orbital occupations of a basis string, bit λ − 1 for label λ.
    pub fn occupations(&self, b: BasisString) -> u64 {
        match self {
            Model::Second(_) => b.0,
            Model::First(l) => l.decode_labels(b).iter().fold(0, |acc, &lam| acc | 1 << (lam - 1)),
        }
    }

    /// Particle count per site (1-based sites at index `site − 1`).
    pub fn site_counts(&self, b: BasisString) -> Vec<u32> {
        let mut out = vec![0; self.sites()];
        match self {
            Model::Second(_) => {
                for (s, c) in out.iter_mut().enumerate() {
                    *c = u32::from(b.bit(2 * s)) + u32::from(b.bit(2 * s + 1));
                }
            }
            Model::First(l) => {
                for k in 0..l.particles() {
                    out[l.position(b, k) as usize] += 1;
                }
            }
        }
        out
    }
}

/// How many draws to take and from which stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub trials: usize,
    pub seed: RngSeed,
    /// Target accuracy used for planning.
    pub epsilon: f64,
    /// Histogram bin density for k-point correlations.
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    1.0
}

impl SamplingPlan {
    pub fn new(trials: usize, seed: RngSeed) -> Result<Self> {
        if trials == 0 {
            return Err(Error::invalid("sampling needs at least one trial"));
        }
        Ok(SamplingPlan { trials, seed, epsilon: 1.0 / (trials as f64).sqrt(), delta: 1.0 })
    }

    /// Plan sized by [`required_trials`].
    pub fn for_accuracy(epsilon: f64, seed: RngSeed) -> Result<Self> {
        let trials = required_trials(epsilon)? as usize;
        Ok(SamplingPlan { trials, seed, epsilon, delta: 1.0 })
    }
}

/// N = ⌈1/ε²⌉, the planning rule for an ε-accurate frequency. Not a
/// confidence bound: the constant is pinned to 1.
pub fn required_trials(epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let x = 1.0 / (epsilon * epsilon);
    // 1/0.1² is 100.00000000000001 in floating point
    let nearest = x.round();
    Ok(if (x - nearest).abs() <= 1e-9 * x { nearest as u64 } else { x.ceil() as u64 })
}

/// Trials for a k-point correlation histogram at bin density δ: ε⁻²·δᵏ.
pub fn required_trials_k_point(epsilon: f64, delta: f64, k: u32) -> Result<u64> {
    if !(delta >= 1.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("bin density {delta} must be ≥ 1")));
    }
    Ok((required_trials(epsilon)? as f64 * delta.powi(k as i32)).ceil() as u64)
}

/// Counts over outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram<K: Ord> {
    pub counts: BTreeMap<K, usize>,
    pub total: usize,
}

impl<K: Ord + Clone> Histogram<K> {
    pub fn from_counts(counts: BTreeMap<K, usize>) -> Self {
        let total = counts.values().sum();
        Histogram { counts, total }
    }

    pub fn frequency(&self, key: &K) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn frequencies(&self) -> BTreeMap<K, f64> {
        self.counts.keys().map(|k| (k.clone(), self.frequency(k))).collect()
    }
}

/// Exact value plus optional sampled estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub exact: f64,
    pub sampled: Option<f64>,
    pub stderr: Option<f64>,
}

/// Mean and standard error of a per-draw quantity over a sample.
fn sample_moments(counts: &BTreeMap<BasisString, usize>, f: impl Fn(BasisString) -> f64) -> (f64, f64) {
    let n: usize = counts.values().sum();
    let mean = counts.iter().map(|(b, &c)| c as f64 * f(*b)).sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = counts.iter().map(|(b, &c)| c as f64 * (f(*b) - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn estimate(
    state: &QuantumState,
    plan: Option<&SamplingPlan>,
    f: impl Fn(BasisString) -> f64,
) -> Result<Estimate> {
    let exact = state.iter_nonzero().map(|(b, a)| a.norm_sqr() * f(b)).sum();
    let (sampled, stderr) = match plan {
        Some(p) => {
            let (m, e) = sample_moments(&state.sample(p.seed, p.trials)?, &f);
            (Some(m), Some(e))
        }
        None => (None, None),
    };
    Ok(Estimate { exact, sampled, stderr })
}

/// Expected particle count on each site (both spins).
pub fn charge_density(state: &QuantumState, model: &Model, plan: Option<&SamplingPlan>) -> Result<Vec<Estimate>> {
    model.check(state)?;
    let exact: Vec<f64> = state.iter_nonzero().fold(vec![0.0; model.sites()], |mut acc, (b, a)| {
        for (d, c) in acc.iter_mut().zip(model.site_counts(b)) {
            *d += a.norm_sqr() * f64::from(c);
        }
        acc
    });
    let counts = plan.map(|p| state.sample(p.seed, p.trials)).transpose()?;
    Ok(exact
        .into_iter()
        .enumerate()
        .map(|(s, exact)| {
            let (sampled, stderr) = match &counts {
                Some(c) => {
                    let (m, e) = sample_moments(c, |b| f64::from(model.site_counts(b)[s]));
                    (Some(m), Some(e))
                }
                None => (None, None),
            };
            Estimate { exact, sampled, stderr }
        })
        .collect())
}

/// ⟨n_{i1} ⋯ n_{ik}⟩ over spin-orbital modes (0-based), k ≤ 3, all distinct.
pub fn correlation(state: &QuantumState, model: &Model, modes: &[usize], plan: Option<&SamplingPlan>) -> Result<Estimate> {
    model.check(state)?;
    check_modes(model, modes)?;
    let mask = modes.iter().fold(0u64, |m, &q| m | 1 << q);
    estimate(state, plan, |b| if model.occupations(b) & mask == mask { 1.0 } else { 0.0 })
}

/// ⟨n_i n_j⟩ for two distinct modes.
pub fn pair_correlation(state: &QuantumState, model: &Model, i: usize, j: usize, plan: Option<&SamplingPlan>) -> Result<Estimate> {
    correlation(state, model, &[i, j], plan)
}

/// Joint histogram of the occupations of up to three modes.
pub fn joint_occupation_histogram(
    state: &QuantumState,
    model: &Model,
    modes: &[usize],
    plan: &SamplingPlan,
) -> Result<Histogram<Vec<bool>>> {
    model.check(state)?;
    check_modes(model, modes)?;
    let mut counts = BTreeMap::new();
    for (b, c) in state.sample(plan.seed, plan.trials)? {
        let occ = model.occupations(b);
        let key: Vec<bool> = modes.iter().map(|&q| (occ >> q) & 1 == 1).collect();
        *counts.entry(key).or_insert(0) += c;
    }
    Ok(Histogram::from_counts(counts))
}

fn check_modes(model: &Model, modes: &[usize]) -> Result<()> {
    if modes.is_empty() || modes.len() > 3 {
        return Err(Error::invalid(format!("{}-point correlations are not supported (1 to 3)", modes.len())));
    }
    let total = 2 * model.sites();
    for (i, &q) in modes.iter().enumerate() {
        if q >= total {
            return Err(Error::invalid(format!("mode {q} outside 0..{total}")));
        }
        if modes[..i].contains(&q) {
            return Err(Error::invalid(format!("mode {q} repeated")));
        }
    }
    Ok(())
}

/// Momentum distribution of one particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumReport {
    /// Probability per momentum bin p ∈ 0..m (wavenumber 2πp/m).
    pub exact: Vec<f64>,
    pub sampled: Option<Histogram<u64>>,
}

/// QFT on particle `k`'s position register (of a copy) and read off the
/// marginal. Bin p collects plane waves e^{+2πi·p·x/m}; with the register
/// QFT's sign convention these land on register value (−p) mod m.
///
/// Only first-quantized states are accepted: no mode-space transform is
/// defined for the occupation encoding.
pub fn momentum_distribution(
    state: &QuantumState,
    model: &Model,
    particle: usize,
    plan: Option<&SamplingPlan>,
) -> Result<MomentumReport> {
    let Model::First(layout) = model else {
        return Err(Error::invalid("momentum distributions need a first-quantized state"));
    };
    model.check(state)?;
    if particle >= layout.particles() {
        return Err(Error::invalid(format!("particle {particle} out of range")));
    }
    let m = layout.sites() as u64;
    let bin = |reg_value: u64| (m - reg_value) % m;
    let name = FirstQuantizedLayout::position_register(particle);
    let mut copy = state.clone();
    copy.qft_register(&name)?;
    let mut exact = vec![0.0; m as usize];
    for (v, p) in copy.marginal(&name)? {
        exact[bin(v) as usize] += p;
    }
    let sampled = match plan {
        Some(p) => {
            let reg = copy.layout().register(&name)?;
            let mut counts = BTreeMap::new();
            for (b, c) in copy.sample(p.seed, p.trials)? {
                *counts.entry(bin(reg.read(b))).or_insert(0) += c;
            }
            Some(Histogram::from_counts(counts))
        }
        None => None,
    };
    Ok(MomentumReport { exact, sampled })
}

/// ⟨H⟩ and its split into on-site and hopping parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    /// V0·Σ_i ⟨n_{i↑} n_{i↓}⟩.
    pub potential: f64,
    pub kinetic: f64,
}

fn expectation(h: &crate::oracle::DenseMatrix, state: &QuantumState) -> Result<f64> {
    let v = state_to_vector(state)?;
    if v.len() != h.nrows() {
        return Err(Error::WidthMismatch { expected: h.nrows(), got: v.len() });
    }
    Ok(v.dotc(&(h * &v)).re)
}

/// Exact energy from the dense Hamiltonian of `model`.
pub fn expected_energy(state: &QuantumState, model: &Model, params: &HubbardParams) -> Result<EnergyReport> {
    model.check(state)?;
    let (h, h_kin) = match model {
        Model::Second(l) => (
            build_sq_hamiltonian(l, params)?,
            build_sq_hamiltonian(l, &HubbardParams { v0: 0.0, ..*params })?,
        ),
        Model::First(l) => (
            build_fq_hamiltonian(l, params)?,
            build_fq_hamiltonian(l, &HubbardParams { v0: 0.0, ..*params })?,
        ),
    };
    let double: f64 = state
        .iter_nonzero()
        .map(|(b, a)| {
            let occ = model.occupations(b);
            let d = (0..model.sites()).filter(|s| (occ >> (2 * s)) & 0b11 == 0b11).count();
            a.norm_sqr() * d as f64
        })
        .sum();
    Ok(EnergyReport { total: expectation(&h, state)?, potential: params.v0 * double, kinetic: expectation(&h_kin, state)? })
}

/// ⟨n_{site,spin}⟩, convenience for tables.
pub fn mode_density(state: &QuantumState, model: &Model, site: usize, spin: Spin) -> Result<f64> {
    let mode = ModeLayout::new(model.sites())?.mode(site, spin)?;
    Ok(correlation(state, model, &[mode], None)?.exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{slater_state, vector_to_state, HermitianEigen};
    use crate::state::Backend;
    use num_complex::Complex64 as C64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn sq_model(m: usize) -> (Model, ModeLayout) {
        (Model::Second(LatticeSpec::chain(m).unwrap()), ModeLayout::new(m).unwrap())
    }

    #[test]
    fn basis_state_density_is_exact() {
        let (model, modes) = sq_model(3);
        let b = modes.encode_occupation(&[(1, Spin::Up), (1, Spin::Down), (3, Spin::Up)]).unwrap();
        let s = QuantumState::basis(modes.register_layout(), b, Backend::Sparse).unwrap();
        let d: Vec<f64> = charge_density(&s, &model, None).unwrap().iter().map(|e| e.exact).collect();
        assert_eq!(d, vec![2.0, 0.0, 1.0]);
    }

    #[test]
    fn split_particle_density_and_sampling() {
        let (model, modes) = sq_model(2);
        let a = modes.encode_occupation(&[(1, Spin::Up)]).unwrap();
        let b = modes.encode_occupation(&[(2, Spin::Up)]).unwrap();
        let s = QuantumState::from_amplitudes(
            modes.register_layout(),
            [(a, C64::new(FRAC_1_SQRT_2, 0.0)), (b, C64::new(0.0, FRAC_1_SQRT_2))],
            Backend::Dense,
        )
        .unwrap();
        let plan = SamplingPlan::new(10_000, RngSeed(7)).unwrap();
        let d = charge_density(&s, &model, Some(&plan)).unwrap();
        for e in &d {
            assert!((e.exact - 0.5).abs() < 1e-15);
            assert!((e.sampled.unwrap() - 0.5).abs() < 0.02);
            assert!(e.stderr.unwrap() > 0.0 && e.stderr.unwrap() < 0.01);
        }
        // a single particle never co-occupies
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(pair_correlation(&s, &model, i, j, Some(&plan)).unwrap().exact, 0.0);
            }
        }
    }

    #[test]
    fn full_occupation_correlates() {
        let (model, modes) = sq_model(2);
        let s = QuantumState::basis(modes.register_layout(), BasisString(0b1111), Backend::Sparse).unwrap();
        assert_eq!(pair_correlation(&s, &model, 0, 3, None).unwrap().exact, 1.0);
        assert_eq!(correlation(&s, &model, &[0, 1, 2], None).unwrap().exact, 1.0);
        assert!(correlation(&s, &model, &[0, 1, 2, 3], None).is_err());
        assert!(pair_correlation(&s, &model, 1, 1, None).is_err());
    }

    #[test]
    fn pair_correlation_matches_direct_sum() {
        // two electrons on two sites, a generic real superposition
        let (model, modes) = sq_model(2);
        let strings = [0b0011u64, 0b0110, 0b1001, 0b1100];
        let coef = [0.3, -0.6, 0.6, 0.43];
        let norm = coef.iter().map(|c| c * c).sum::<f64>().sqrt();
        let s = QuantumState::from_amplitudes(
            modes.register_layout(),
            strings.iter().zip(coef).map(|(&b, c)| (BasisString(b), C64::new(c / norm, 0.0))),
            Backend::Sparse,
        )
        .unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                let direct: f64 = strings
                    .iter()
                    .zip(coef)
                    .filter(|(b, _)| (*b >> i) & 1 == 1 && (*b >> j) & 1 == 1)
                    .map(|(_, c)| (c / norm).powi(2))
                    .sum();
                let got = pair_correlation(&s, &model, i, j, None).unwrap().exact;
                assert!((got - direct).abs() < 1e-12);
            }
        }
        let plan = SamplingPlan::new(4000, RngSeed(3)).unwrap();
        let h = joint_occupation_histogram(&s, &model, &[0, 1], &plan).unwrap();
        assert_eq!(h.total, 4000);
        assert!((h.frequencies().values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn required_trials_rule() {
        assert_eq!(required_trials(0.1).unwrap(), 100);
        assert_eq!(required_trials(0.01).unwrap(), 10_000);
        assert_eq!(required_trials(0.05).unwrap() * 4, required_trials(0.025).unwrap());
        assert_eq!(required_trials(0.3).unwrap(), 12);
        assert!(required_trials(0.0).is_err());
        assert!(required_trials(1.0).is_err());
        assert!(required_trials(f64::NAN).is_err());
        assert_eq!(required_trials_k_point(0.1, 2.0, 3).unwrap(), 800);
    }

    fn fq_position_state(layout: &FirstQuantizedLayout, amps: &[C64]) -> QuantumState {
        let pairs = amps.iter().enumerate().map(|(x, a)| (layout.encode_labels(&[layout.label(x + 1, Spin::Up).unwrap()]).unwrap(), *a));
        QuantumState::from_amplitudes(layout.register_layout(), pairs, Backend::Sparse).unwrap()
    }

    #[test]
    fn momentum_examples() {
        let l = FirstQuantizedLayout::new(1, 8).unwrap();
        let model = Model::First(l);
        let flat = fq_position_state(&l, &[C64::new(1.0 / 8f64.sqrt(), 0.0); 8]);
        let r = momentum_distribution(&flat, &model, 0, None).unwrap();
        assert!((r.exact[0] - 1.0).abs() < 1e-12);

        let delta = fq_position_state(&l, &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        let r = momentum_distribution(&delta, &model, 0, None).unwrap();
        assert!(r.exact.iter().all(|p| (p - 0.125).abs() < 1e-12));

        let wave: Vec<C64> = (0..8).map(|x| C64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * 3.0 * x as f64 / 8.0)).collect();
        let s = fq_position_state(&l, &wave);
        let before = s.clone();
        let plan = SamplingPlan::new(500, RngSeed(1)).unwrap();
        let r = momentum_distribution(&s, &model, 0, Some(&plan)).unwrap();
        assert!(r.exact[3] >= 0.999);
        assert_eq!(r.sampled.unwrap().frequency(&3), 1.0);
        assert_eq!(s, before);
    }

    #[test]
    fn momentum_rejects_occupation_states() {
        let (model, modes) = sq_model(2);
        let s = QuantumState::basis(modes.register_layout(), BasisString(1), Backend::Sparse).unwrap();
        assert!(matches!(momentum_distribution(&s, &model, 0, None), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn energy_examples() {
        // hopping eigenstates of one particle on two sites
        let (model, modes) = sq_model(2);
        let p = HubbardParams::new(0.0, 1.7).unwrap();
        let (a, b) = (BasisString(0b0001), BasisString(0b0100));
        for (sign, expect) in [(1.0, 1.7), (-1.0, -1.7)] {
            let s = QuantumState::from_amplitudes(
                modes.register_layout(),
                [(a, C64::new(FRAC_1_SQRT_2, 0.0)), (b, C64::new(sign * FRAC_1_SQRT_2, 0.0))],
                Backend::Sparse,
            )
            .unwrap();
            let e = expected_energy(&s, &model, &p).unwrap();
            assert!((e.total - expect).abs() < 1e-12);
        }

        // d doubly-occupied sites, no hopping
        let (model, modes) = sq_model(3);
        let b = modes.encode_occupation(&[(1, Spin::Up), (1, Spin::Down), (3, Spin::Up), (3, Spin::Down), (2, Spin::Up)]).unwrap();
        let s = QuantumState::basis(modes.register_layout(), b, Backend::Sparse).unwrap();
        let e = expected_energy(&s, &model, &HubbardParams::new(2.5, 0.0).unwrap()).unwrap();
        assert!((e.total - 5.0).abs() < 1e-12 && (e.potential - 5.0).abs() < 1e-12);
    }

    #[test]
    fn energy_parts_add_up_and_are_conserved() {
        let l = FirstQuantizedLayout::new(2, 4).unwrap();
        let model = Model::First(l);
        let p = HubbardParams::new(4.0, 1.0).unwrap();
        let s0 = slater_state(&l, &[1, 4], Backend::Dense).unwrap();
        let h = build_fq_hamiltonian(&l, &p).unwrap();
        let eig = HermitianEigen::new(&h).unwrap();
        let e0 = expected_energy(&s0, &model, &p).unwrap();
        for t in [0.3, 1.0, 2.7] {
            let v = eig.propagate(t, &state_to_vector(&s0).unwrap()).unwrap();
            let v = &v / C64::new(v.norm(), 0.0);
            let s = vector_to_state(l.register_layout(), &v, Backend::Dense).unwrap();
            let e = expected_energy(&s, &model, &p).unwrap();
            assert!((e.total - e0.total).abs() < 1e-10);
            assert!((e.potential + e.kinetic - e.total).abs() < 1e-10);
        }
    }

    #[test]
    fn wrong_model_rejected() {
        let (model, _) = sq_model(2);
        let l = FirstQuantizedLayout::new(1, 2).unwrap();
        let s = slater_state(&l, &[1], Backend::Sparse).unwrap();
        assert_eq!(charge_density(&s, &model, None).unwrap_err(), Error::LayoutMismatch);
    }

    #[test]
    fn fq_and_sq_densities_agree_on_slater_states() {
        let l = FirstQuantizedLayout::new(3, 4).unwrap();
        let fq = slater_state(&l, &[1, 2, 6], Backend::Sparse).unwrap();
        let sq = crate::oracle::fq_to_sq(&fq, &l).unwrap();
        let a = charge_density(&fq, &Model::First(l), None).unwrap();
        let b = charge_density(&sq, &Model::Second(LatticeSpec::chain(4).unwrap()), None).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.exact - y.exact).abs() < 1e-12);
        }
    }
}
