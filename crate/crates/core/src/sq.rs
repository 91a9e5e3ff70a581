//! Second-quantized Hubbard chain: one qubit per (site, spin) mode.
//!
//! Mode ℓ(s, σ) = 2(s − 1) + σ, so the two spin modes of a site are
//! neighbors in the Jordan–Wigner ordering. A hop between sites `s` and
//! `s + 1` with spin σ therefore crosses exactly one mode, the opposite
//! spin of site `s` (or of site `s + 1` for spin down).
//!
//! A Trotter step applies the on-site phases first, then one two-level
//! rotation per (neighbor pair, spin) in lexicographic order.

use crate::error::{Error, Result};
use crate::gate::Gate2;
use crate::lattice::{HubbardParams, LatticeSpec, OpCount, Spin, TrotterPlan};
use crate::layout::{BasisString, RegisterLayout};
use crate::state::QuantumState;

/// Name of the single register holding all modes.
pub const MODES: &str = "modes";

/// Mode indexing for an `m`-site lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeLayout {
    m: usize,
}

impl ModeLayout {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || 2 * m > crate::layout::MAX_QUBITS {
            return Err(Error::invalid(format!("{m} sites")));
        }
        Ok(ModeLayout { m })
    }

    pub fn for_lattice(lattice: &LatticeSpec) -> Result<Self> {
        Self::new(lattice.sites())
    }

    pub fn sites(&self) -> usize {
        self.m
    }

    pub fn num_modes(&self) -> usize {
        2 * self.m
    }

    /// ℓ(site, spin), sites 1-based.
    pub fn mode(&self, site: usize, spin: Spin) -> Result<usize> {
        if !(1..=self.m).contains(&site) {
            return Err(Error::invalid(format!("site {site} outside 1..={}", self.m)));
        }
        Ok(2 * (site - 1) + spin.index())
    }

    /// Inverse of [`mode`](Self::mode).
    pub fn site_spin(&self, mode: usize) -> (usize, Spin) {
        (mode / 2 + 1, if mode % 2 == 0 { Spin::Up } else { Spin::Down })
    }

    pub fn register_layout(&self) -> RegisterLayout {
        RegisterLayout::contiguous(&[(MODES, self.num_modes())]).expect("mode count checked in new")
    }

    pub fn encode_occupation(&self, occupied: &[(usize, Spin)]) -> Result<BasisString> {
        occupied.iter().try_fold(BasisString(0), |b, &(site, spin)| {
            let q = self.mode(site, spin)?;
            if b.bit(q) {
                return Err(Error::invalid(format!("mode ({site}, {spin}) listed twice")));
            }
            Ok(b.with_bit(q, true))
        })
    }
}

/// Parity of the occupied modes strictly between `mode_a` and `mode_b`.
pub fn jw_parity(b: BasisString, mode_a: usize, mode_b: usize) -> bool {
    let (lo, hi) = (mode_a.min(mode_b), mode_a.max(mode_b));
    if hi - lo < 2 {
        return false;
    }
    let between = ((1u64 << (hi - lo - 1)) - 1) << (lo + 1);
    (b.0 & between).count_ones() % 2 == 1
}

/// exp(−i·dt·V0·Σ_s n_{s↑} n_{s↓}), one conditional phase per site.
pub fn evolve_potential(state: &mut QuantumState, lattice: &LatticeSpec, params: &HubbardParams, dt: f64) -> Result<()> {
    let modes = ModeLayout::for_lattice(lattice)?;
    for site in 1..=lattice.sites() {
        let up = modes.mode(site, Spin::Up)?;
        let down = modes.mode(site, Spin::Down)?;
        state.apply_phase_if(|b| b.bit(up) && b.bit(down), -params.v0 * dt);
    }
    Ok(())
}

/// exp(−i·dt·t0·(c†_{s'σ} c_{sσ} + h.c.)) for one neighbor pair.
///
/// On strings where exactly one of the two modes is occupied the hop is a
/// σx rotation, with its sign flipped when an odd number of occupied modes
/// lies between them.
pub fn evolve_hopping_pair(
    state: &mut QuantumState,
    lattice: &LatticeSpec,
    site_a: usize,
    site_b: usize,
    spin: Spin,
    params: &HubbardParams,
    dt: f64,
) -> Result<()> {
    if !lattice.are_adjacent(site_a, site_b) {
        return Err(Error::invalid(format!("sites {site_a} and {site_b} are not neighbors")));
    }
    let modes = ModeLayout::for_lattice(lattice)?;
    let a = modes.mode(site_a.min(site_b), spin)?;
    let c = modes.mode(site_a.max(site_b), spin)?;
    for odd in [false, true] {
        let pairing = |b: BasisString| {
            if b.bit(a) == b.bit(c) || jw_parity(b, a, c) != odd {
                return None;
            }
            Some((b.with_bit(a, true).with_bit(c, false), b.with_bit(a, false).with_bit(c, true)))
        };
        let sign = if odd { -1.0 } else { 1.0 };
        state.apply_two_level_mix(&pairing, &Gate2::exp_sigma_x(sign * params.t0 * dt))?;
    }
    Ok(())
}

/// Hopping terms in application order: neighbor pairs ascending, spin up
/// before spin down.
pub fn hopping_terms(lattice: &LatticeSpec) -> Vec<(usize, usize, Spin)> {
    lattice
        .edges()
        .iter()
        .flat_map(|&(i, j)| Spin::BOTH.into_iter().map(move |s| (i, j, s)))
        .collect()
}

pub fn trotter_step(state: &mut QuantumState, lattice: &LatticeSpec, params: &HubbardParams, dt: f64) -> Result<()> {
    evolve_potential(state, lattice, params, dt)?;
    for (i, j, spin) in hopping_terms(lattice) {
        evolve_hopping_pair(state, lattice, i, j, spin, params, dt)?;
    }
    Ok(())
}

pub fn trotter_evolve(
    state: &mut QuantumState,
    lattice: &LatticeSpec,
    params: &HubbardParams,
    plan: &TrotterPlan,
) -> Result<()> {
    let dt = plan.dt();
    for _ in 0..plan.r {
        trotter_step(state, lattice, params, dt)?;
    }
    Ok(())
}

/// Gate tally of [`trotter_evolve`] at the circuit level.
///
/// * `controlled_phase`: one doubly-controlled phase per site per step.
/// * `parity_cnot`: one CNOT per intervening mode to compute the parity flag,
///   and again to uncompute it.
/// * `controlled_mix`: one flag-conditioned two-level rotation per hop term.
pub fn op_count(lattice: &LatticeSpec, plan: &TrotterPlan) -> Result<OpCount> {
    let modes = ModeLayout::for_lattice(lattice)?;
    let mut step = OpCount::default();
    step.add("controlled_phase", lattice.sites() as u64);
    for (i, j, spin) in hopping_terms(lattice) {
        let between = modes.mode(j, spin)? - modes.mode(i, spin)? - 1;
        step.add("parity_cnot", 2 * between as u64);
        step.add("controlled_mix", 1);
    }
    Ok(step.scaled(plan.r as u64))
}

/// Number of particles in each spin species.
pub fn spin_counts(b: BasisString, modes: &ModeLayout) -> (u32, u32) {
    let up_mask = (0..modes.sites()).fold(0u64, |m, s| m | 1 << (2 * s));
    ((b.0 & up_mask).count_ones(), (b.0 & (up_mask << 1)).count_ones())
}
