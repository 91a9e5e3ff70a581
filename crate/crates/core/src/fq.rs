//! First-quantized Hubbard chain: one qu-word per particle.
//!
//! Particle `k` owns `b + 1` qubits: a spin bit (least significant) followed
//! by `b` position bits holding `x − 1` for site `x ∈ 1..=2^b`. Read as a
//! whole, the word is `λ − 1` for the single-particle label
//! λ(x, σ) = 2(x − 1) + σ + 1, so label order coincides with the
//! second-quantized mode order.
//!
//! Kinetic evolution splits the chain into the two block-diagonal halves
//!
//! ```text
//! T1 = h(1,2) + h(3,4) + …      T2 = h(2,3) + h(4,5) + …
//! ```
//!
//! and diagonalizes each by relabeling site `x` as a (block, position)
//! pair, rotating the position bit, and relabeling back.

use crate::antisym::{symmetric_transposition_test, transposition_test, Statistics};
use crate::error::{Error, Result};
use crate::gate::Gate2;
use crate::lattice::{HubbardParams, OpCount, Spin, TrotterPlan};
use crate::layout::{BasisString, QuWords, RegisterLayout};
use crate::state::{validation_mode, QuantumState};

/// Antisymmetry tolerance used by the validation-mode input check.
pub const ANTISYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstQuantizedLayout {
    n: usize,
    position_bits: usize,
}

impl FirstQuantizedLayout {
    /// `n` particles on an open chain of `m = 2^b` sites.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one particle"));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::invalid(format!("site count {m} is not a power of two ≥ 2")));
        }
        let position_bits = m.trailing_zeros() as usize;
        if n > 2 * m {
            return Err(Error::invalid(format!("{n} fermions do not fit in {} spin-orbitals", 2 * m)));
        }
        if n * (position_bits + 1) > crate::layout::MAX_QUBITS {
            return Err(Error::TooLarge(format!("{n} particles × {} qubits", position_bits + 1)));
        }
        Ok(FirstQuantizedLayout { n, position_bits })
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        1 << self.position_bits
    }

    pub fn position_bits(&self) -> usize {
        self.position_bits
    }

    pub fn word_bits(&self) -> usize {
        self.position_bits + 1
    }

    /// Number of single-particle labels, 2m.
    pub fn num_labels(&self) -> usize {
        2 * self.sites()
    }

    pub fn words(&self) -> QuWords {
        QuWords { offset: 0, width: self.word_bits(), n: self.n }
    }

    pub fn spin_register(k: usize) -> String {
        format!("spin{k}")
    }

    pub fn position_register(k: usize) -> String {
        format!("pos{k}")
    }

    /// Registers `spin0, pos0, spin1, pos1, …` in increasing qubit order.
    pub fn register_layout(&self) -> RegisterLayout {
        let spec: Vec<(String, usize)> = (0..self.n)
            .flat_map(|k| [(Self::spin_register(k), 1), (Self::position_register(k), self.position_bits)])
            .collect();
        RegisterLayout::contiguous(&spec).expect("width checked in new")
    }

    /// λ(x, σ), 1-based.
    pub fn label(&self, site: usize, spin: Spin) -> Result<u32> {
        if !(1..=self.sites()).contains(&site) {
            return Err(Error::invalid(format!("site {site} outside 1..={}", self.sites())));
        }
        Ok((2 * (site - 1) + spin.index() + 1) as u32)
    }

    pub fn site_spin(&self, label: u32) -> Result<(usize, Spin)> {
        if label == 0 || label as usize > self.num_labels() {
            return Err(Error::invalid(format!("label {label} outside 1..={}", self.num_labels())));
        }
        let w = label as usize - 1;
        Ok((w / 2 + 1, Spin::from_index(w % 2)?))
    }

    /// Basis string with particle `k` carrying `labels[k]`.
    pub fn encode_labels(&self, labels: &[u32]) -> Result<BasisString> {
        if labels.len() != self.n {
            return Err(Error::invalid(format!("expected {} labels, got {}", self.n, labels.len())));
        }
        for &l in labels {
            self.site_spin(l)?;
        }
        let words: Vec<u64> = labels.iter().map(|&l| u64::from(l) - 1).collect();
        Ok(self.words().write_all(BasisString(0), &words))
    }

    pub fn decode_labels(&self, b: BasisString) -> Vec<u32> {
        self.words().read_all(b).into_iter().map(|w| w as u32 + 1).collect()
    }

    /// 0-based position value of particle `k`.
    #[inline]
    pub fn position(&self, b: BasisString, k: usize) -> u64 {
        self.words().get(b, k) >> 1
    }

    #[inline]
    pub fn spin_bit(&self, b: BasisString, k: usize) -> u64 {
        self.words().get(b, k) & 1
    }

    fn check_state(&self, state: &QuantumState) -> Result<()> {
        if *state.layout() != self.register_layout() {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }
}

/// Pairwise on-site interaction: every unordered pair of particles on the
/// same site with opposite spins picks up e^{−i·V0·dt}.
pub fn evolve_potential_fq(
    state: &mut QuantumState,
    layout: &FirstQuantizedLayout,
    params: &HubbardParams,
    dt: f64,
) -> Result<()> {
    layout.check_state(state)?;
    let n = layout.particles();
    for k in 0..n {
        for l in k + 1..n {
            state.apply_phase_if(
                |b| layout.position(b, k) == layout.position(b, l) && layout.spin_bit(b, k) != layout.spin_bit(b, l),
                -params.v0 * dt,
            );
        }
    }
    Ok(())
}

/// Site relabeling that makes `T1` act on one bit:
/// x ↦ ((x+1) div 2, x mod 2), stored as `(block − 1) << 1 | pos`.
pub fn t1_remap(x: u64) -> (u64, u64) {
    (x.div_ceil(2), x % 2)
}

/// Site relabeling for `T2`: x ↦ (x div 2, (x+1) mod 2). Blocks 0 and m/2
/// each hold a single boundary site.
pub fn t2_remap(x: u64) -> (u64, u64) {
    (x / 2, (x + 1) % 2)
}

fn t1_encode(p: u64) -> u64 {
    let (block, pos) = t1_remap(p + 1);
    ((block - 1) << 1) | pos
}

fn t1_decode(v: u64) -> u64 {
    let (block, pos) = ((v >> 1) + 1, v & 1);
    // x = 2·block − pos
    2 * block - pos - 1
}

fn t2_encode(p: u64, m: u64) -> u64 {
    let (block, pos) = t2_remap(p + 1);
    // the two boundary singletons share code block 0
    ((block % (m / 2)) << 1) | pos
}

fn t2_decode(v: u64, m: u64) -> u64 {
    let (block, pos) = (v >> 1, v & 1);
    match (block, pos) {
        (0, 0) => 0,
        (0, _) => m - 1,
        // x = 2·block + 1 − pos
        _ => 2 * block - pos,
    }
}

/// exp(−i·dt·T2)·exp(−i·dt·T1) on particle `k`'s position register.
pub fn evolve_kinetic_particle(
    state: &mut QuantumState,
    layout: &FirstQuantizedLayout,
    k: usize,
    params: &HubbardParams,
    dt: f64,
) -> Result<()> {
    layout.check_state(state)?;
    if k >= layout.particles() {
        return Err(Error::invalid(format!("particle {k} out of range")));
    }
    let name = FirstQuantizedLayout::position_register(k);
    let reg = state.layout().register(&name)?.clone();
    let pos_qubit = reg.qubits()[0];
    let m = layout.sites() as u64;
    let mix = Gate2::exp_sigma_x(params.t0 * dt);
    let relabel = |state: &mut QuantumState, f: &dyn Fn(u64) -> u64| {
        state.apply_basis_permutation(|b| reg.write(b, f(reg.read(b))))
    };

    relabel(state, &t1_encode)?;
    state.apply_single_qubit_unitary(pos_qubit, &mix)?;
    relabel(state, &t1_decode)?;

    relabel(state, &|p| t2_encode(p, m))?;
    let pairing = |b: BasisString| {
        let v = reg.read(b);
        (v >> 1 != 0).then(|| (reg.write(b, v & !1), reg.write(b, v | 1)))
    };
    state.apply_two_level_mix(&pairing, &mix)?;
    relabel(state, &|v| t2_decode(v, m))
}

pub fn trotter_step_fq(
    state: &mut QuantumState,
    layout: &FirstQuantizedLayout,
    params: &HubbardParams,
    dt: f64,
) -> Result<()> {
    evolve_potential_fq(state, layout, params, dt)?;
    for k in 0..layout.particles() {
        evolve_kinetic_particle(state, layout, k, params, dt)?;
    }
    Ok(())
}

/// `r` steps of potential-then-kinetic. In validation mode the input is
/// required to be antisymmetric under every particle exchange.
pub fn trotter_evolve_fq(
    state: &mut QuantumState,
    layout: &FirstQuantizedLayout,
    params: &HubbardParams,
    plan: &TrotterPlan,
) -> Result<()> {
    trotter_evolve_fq_with(state, layout, params, plan, Statistics::Fermi)
}

/// [`trotter_evolve_fq`] for either exchange statistics; the validation-mode
/// input check uses the matching sign.
pub fn trotter_evolve_fq_with(
    state: &mut QuantumState,
    layout: &FirstQuantizedLayout,
    params: &HubbardParams,
    plan: &TrotterPlan,
    stats: Statistics,
) -> Result<()> {
    layout.check_state(state)?;
    if validation_mode() {
        check_exchange_symmetry(state, layout, stats)?;
    }
    let dt = plan.dt();
    for _ in 0..plan.r {
        trotter_step_fq(state, layout, params, dt)?;
    }
    Ok(())
}

/// Rejects states that are not (anti)symmetric under every particle
/// exchange within [`ANTISYMMETRY_TOL`].
pub fn check_exchange_symmetry(state: &QuantumState, layout: &FirstQuantizedLayout, stats: Statistics) -> Result<()> {
    layout.check_state(state)?;
    let words = layout.words();
    for i in 0..layout.particles() {
        for j in i + 1..layout.particles() {
            let v = match stats {
                Statistics::Fermi => transposition_test(state, &words, i, j)?,
                Statistics::Bose => symmetric_transposition_test(state, &words, i, j)?,
            };
            if v > ANTISYMMETRY_TOL {
                let kind = if stats == Statistics::Fermi { "antisymmetric" } else { "symmetric" };
                return Err(Error::invalid(format!(
                    "input is not {kind} under exchange of particles {i} and {j} (violation {v:.3e})"
                )));
            }
        }
    }
    Ok(())
}

/// Weighted cost of an X gate with `controls` controls.
fn controlled_x_cost(controls: usize) -> u64 {
    controls as u64 + 1
}

/// Gate tally for [`trotter_evolve_fq`].
///
/// Kinetic kinds (per particle per step):
/// * `kinetic_relabel`: the `T1` relabel is a single X on the low position
///   bit, twice; the `T2` relabel is an increment of the upper `b − 1`
///   position bits controlled on the low bit, built from one multi-controlled
///   X per bit, twice.
/// * `kinetic_mix`: one rotation for `T1`, one rotation controlled on
///   "block ≠ 0" for `T2`.
///
/// Potential kinds (per unordered pair per step): `potential_compare`
/// counts CNOTs to compare and uncompare both words, `potential_phase` the
/// conditional phase itself.
pub fn op_count_fq(layout: &FirstQuantizedLayout, plan: &TrotterPlan) -> OpCount {
    let b = layout.position_bits();
    let n = layout.particles() as u64;
    let mut step = OpCount::default();

    let t1_relabel = 2 * controlled_x_cost(0);
    let increment: u64 = (0..b.saturating_sub(1)).map(|i| controlled_x_cost(i + 1)).sum();
    step.add("kinetic_relabel", n * (t1_relabel + 2 * increment));
    step.add("kinetic_mix", n * (1 + controlled_x_cost(b.saturating_sub(1))));

    let pairs = n * n.saturating_sub(1) / 2;
    step.add("potential_compare", pairs * 2 * (b as u64 + 1));
    step.add("potential_phase", pairs);
    step.scaled(plan.r as u64)
}

/// Sum of the `kinetic_*` kinds of a tally.
pub fn kinetic_total(count: &OpCount) -> u64 {
    count.0.iter().filter(|(k, _)| k.starts_with("kinetic_")).map(|(_, v)| v).sum()
}
