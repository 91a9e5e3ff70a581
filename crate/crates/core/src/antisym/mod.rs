//! Reversible antisymmetrization of an ordered n-tuple of qu-words.
//!
//! Registers A, B and C each hold `n` words; two sort records and a parity
//! bit serve as scratch. Starting from A = Ψ (strictly increasing), the
//! pipeline is
//!
//! 1. put B in the equal superposition of rank tuples
//!    (1..n) × (1..n−1) × … × (1),
//! 2. decode each rank tuple into a permutation of 1..n,
//! 3. set C = (1, …, n),
//! 4. sort B, dragging A and C along and recording every exchange, then
//!    flip the sign of branches with an odd number of exchanges,
//!
//! followed by the erasure that returns every ancilla to zero: uncompute
//! the parity from the record, unsort B, erase the record by recomputing
//! it from B, erase B against C (C is now the inverse permutation), sort C
//! dragging A, erase C, unsort A, and erase the second record by
//! recomputing it from A. The last step only works because A's relative
//! order equals C's, which is where the ordering of Ψ is needed.
//!
//! Except for step 1 every stage permutes basis strings (plus one sign),
//! so it is executed branch by branch and the ancilla-zero condition is
//! checked exactly on every branch.

pub mod sort;

use crate::error::{Error, Result};
use crate::layout::{BasisString, QuWords, Register, RegisterLayout};
use crate::state::QuantumState;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sort::{apply_swaps, undo_swaps, SortKind, SortSchedule};
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub use sort::Transcript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    #[default]
    Fermi,
    Bose,
}

/// One of the three qu-word registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bank {
    A,
    B,
    C,
}

/// One of the two sort records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scratch {
    First,
    Second,
}

/// Register geometry for antisymmetrizing `n` words of `word_bits` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntisymLayout {
    n: usize,
    word_bits: usize,
    schedule: SortKind,
    layout: RegisterLayout,
}

impl AntisymLayout {
    pub fn new(n: usize, word_bits: usize) -> Result<Self> {
        Self::with_schedule(n, word_bits, SortKind::Heap)
    }

    pub fn with_schedule(n: usize, word_bits: usize, schedule: SortKind) -> Result<Self> {
        if n == 0 || word_bits == 0 {
            return Err(Error::invalid("need at least one word of at least one bit"));
        }
        if word_bits < 64 && n as u64 > 1u64 << word_bits {
            return Err(Error::invalid(format!("{n} distinct labels do not fit in {word_bits} bits")));
        }
        let record = schedule.record_bits(n).max(1);
        let words = n * word_bits;
        let layout = RegisterLayout::contiguous(&[
            ("A", words),
            ("B", words),
            ("C", words),
            ("sort1", record),
            ("sort2", record),
            ("parity", 1),
        ])?;
        Ok(AntisymLayout { n, word_bits, schedule, layout })
    }

    /// Smallest word width that holds labels `1..=max_label` and ranks `1..=n`.
    pub fn for_labels(n: usize, max_label: u32) -> Result<Self> {
        let top = (max_label as usize).max(n).max(2);
        let bits = (usize::BITS - (top - 1).leading_zeros()) as usize;
        Self::new(n, bits)
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn word_bits(&self) -> usize {
        self.word_bits
    }

    pub fn schedule(&self) -> SortKind {
        self.schedule
    }

    pub fn register_layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn words(&self, bank: Bank) -> QuWords {
        let idx = match bank {
            Bank::A => 0,
            Bank::B => 1,
            Bank::C => 2,
        };
        QuWords { offset: idx * self.n * self.word_bits, width: self.word_bits, n: self.n }
    }

    fn scratch(&self, which: Scratch) -> &Register {
        let name = match which {
            Scratch::First => "sort1",
            Scratch::Second => "sort2",
        };
        self.layout.register(name).expect("built in constructor")
    }

    fn parity_qubit(&self) -> usize {
        self.layout.register("parity").expect("built in constructor").qubits()[0]
    }

    /// Mask of every ancilla qubit (B, C, both records, parity).
    pub fn ancilla_mask(&self) -> u64 {
        let a = self.words(Bank::A).mask();
        let all = if self.layout.width() == 64 { u64::MAX } else { (1u64 << self.layout.width()) - 1 };
        all & !a
    }

    fn check_state(&self, state: &QuantumState) -> Result<()> {
        if state.layout() != &self.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(())
    }

    fn check_labels(&self, values: &[u32]) -> Result<()> {
        if values.len() != self.n {
            return Err(Error::invalid(format!("expected {} labels, got {}", self.n, values.len())));
        }
        if values.iter().any(|&v| v == 0 || (self.word_bits < 32 && v as u64 > 1u64 << self.word_bits)) {
            return Err(Error::invalid(format!("labels must lie in 1..={}", 1u64 << self.word_bits)));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "labels {values:?} are not strictly increasing (repeated labels violate exclusion)"
            )));
        }
        Ok(())
    }
}

/// Step I: register A holds the given ordered tuples with the given
/// amplitudes; everything else is zero.
pub fn prepare_ordered_input(layout: &AntisymLayout, configs: &[(Vec<u32>, C64)]) -> Result<QuantumState> {
    let a = layout.words(Bank::A);
    let mut amps = Vec::with_capacity(configs.len());
    for (values, amp) in configs {
        layout.check_labels(values)?;
        let words: Vec<u64> = values.iter().map(|&v| u64::from(v) - 1).collect();
        amps.push((a.write_all(BasisString(0), &words), *amp));
    }
    QuantumState::from_amplitudes(layout.register_layout().clone(), amps, crate::state::Backend::Sparse)
}

/// Step I for a single tuple.
pub fn prepare_ordered_configuration(layout: &AntisymLayout, values: &[u32]) -> Result<QuantumState> {
    prepare_ordered_input(layout, &[(values.to_vec(), C64::new(1.0, 0.0))])
}

/// Every tuple (r1, …, rn) with r_i ∈ 1..=n−i+1, in lexicographic order.
pub fn rank_tuples(n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::with_capacity(n)];
    for i in 0..n {
        let range = (n - i) as u64;
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=range).map(move |r| {
                    let mut t = prefix.clone();
                    t.push(r);
                    t
                })
            })
            .collect();
    }
    out
}

/// Rank tuple → permutation of 1..=n: entry i is the r_i-th smallest value
/// not used by earlier entries.
pub fn ranks_to_perm(ranks: &[u64]) -> Result<Vec<u64>> {
    let n = ranks.len();
    let mut unused: Vec<u64> = (1..=n as u64).collect();
    ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if r == 0 || r as usize > n - i {
                return Err(Error::invalid(format!("rank {r} at position {} outside 1..={}", i + 1, n - i)));
            }
            Ok(unused.remove(r as usize - 1))
        })
        .collect()
}

/// Inverse of [`ranks_to_perm`].
pub fn perm_to_ranks(perm: &[u64]) -> Result<Vec<u64>> {
    let n = perm.len();
    let mut unused: Vec<u64> = (1..=n as u64).collect();
    perm.iter()
        .map(|v| {
            let idx = unused
                .iter()
                .position(|u| u == v)
                .ok_or_else(|| Error::invalid(format!("{perm:?} is not a permutation of 1..={n}")))?;
            unused.remove(idx);
            Ok(idx as u64 + 1)
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Step II: B ← (1/√n!) Σ over all rank tuples. B must be zero on every
/// branch.
pub fn superpose_ranks(state: &mut QuantumState, layout: &AntisymLayout) -> Result<()> {
    layout.check_state(state)?;
    let bw = layout.words(Bank::B);
    let tuples = rank_tuples(layout.n);
    let scale = 1.0 / factorial(layout.n).sqrt();
    let mut out = BTreeMap::new();
    for (b, amp) in state.iter_nonzero() {
        if b.0 & bw.mask() != 0 {
            return Err(Error::invalid("register B is not zero"));
        }
        for t in &tuples {
            let enc: Vec<u64> = t.iter().map(|r| r - 1).collect();
            out.insert(bw.write_all(b, &enc), amp * scale);
        }
    }
    let backend = state.backend();
    *state = QuantumState::from_sparse_unchecked(layout.layout.clone(), out).to_backend(backend)?;
    Ok(())
}

/// Adjoint of [`superpose_ranks`]; exact inverse on its image.
fn unsuperpose_ranks(state: &mut QuantumState, layout: &AntisymLayout) -> Result<()> {
    let bw = layout.words(Bank::B);
    let scale = 1.0 / factorial(layout.n).sqrt();
    let mut out: BTreeMap<BasisString, C64> = BTreeMap::new();
    for (b, amp) in state.iter_nonzero() {
        let ranks: Vec<u64> = bw.read_all(b).iter().map(|w| w + 1).collect();
        ranks_to_perm(&ranks)?;
        *out.entry(BasisString(b.0 & !bw.mask())).or_default() += amp * scale;
    }
    out.retain(|_, a| *a != C64::new(0.0, 0.0));
    let backend = state.backend();
    *state = QuantumState::from_sparse_unchecked(layout.layout.clone(), out).to_backend(backend)?;
    Ok(())
}

/// Branch-wise reversible stages after step II.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    RanksToPermutation,
    AssignIdentity,
    SortB,
    ParityPhase,
    UncomputeParity,
    UnsortB,
    EraseFirstRecord,
    EraseB,
    SortC,
    EraseC,
    UnsortA,
    EraseSecondRecord,
}

const STAGES: [Stage; 12] = [
    Stage::RanksToPermutation,
    Stage::AssignIdentity,
    Stage::SortB,
    Stage::ParityPhase,
    Stage::UncomputeParity,
    Stage::UnsortB,
    Stage::EraseFirstRecord,
    Stage::EraseB,
    Stage::SortC,
    Stage::EraseC,
    Stage::UnsortA,
    Stage::EraseSecondRecord,
];

struct Rewriter<'a> {
    layout: &'a AntisymLayout,
}

impl Rewriter<'_> {
    fn bank(&self, bank: Bank) -> QuWords {
        self.layout.words(bank)
    }

    fn identity_words(&self) -> Vec<u64> {
        (0..self.layout.n as u64).collect()
    }

    fn record(&self, b: BasisString, which: Scratch) -> u64 {
        self.layout.scratch(which).read(b)
    }

    fn decode(&self, b: BasisString, which: Scratch) -> Result<Vec<(usize, usize)>> {
        self.layout.schedule.decode(self.layout.n, self.record(b, which))
    }

    fn permute_bank(&self, b: BasisString, bank: Bank, swaps: &[(usize, usize)], undo: bool) -> BasisString {
        let w = self.bank(bank);
        let mut vals = w.read_all(b);
        if undo {
            undo_swaps(&mut vals, swaps);
        } else {
            apply_swaps(&mut vals, swaps);
        }
        w.write_all(b, &vals)
    }

    fn flip_parity(&self, b: BasisString, swaps: usize) -> BasisString {
        if swaps % 2 == 1 {
            b.flip(self.layout.parity_qubit())
        } else {
            b
        }
    }

    /// Sort `key`, drag `co` along, write the record into `which`.
    fn sort(&self, b: BasisString, key: Bank, co: &[Bank], which: Scratch, parity: bool) -> Result<BasisString> {
        let scratch = self.layout.scratch(which);
        if scratch.read(b) != 0 {
            return Err(Error::invalid(format!("scratch `{}` is not zero", scratch.name())));
        }
        let t = self.layout.schedule.sort(&self.bank(key).read_all(b));
        let mut out = b;
        for &bank in std::iter::once(&key).chain(co) {
            out = self.permute_bank(out, bank, &t.swaps, false);
        }
        out = scratch.write(out, t.record);
        Ok(if parity { self.flip_parity(out, t.swaps.len()) } else { out })
    }

    fn unsort(&self, b: BasisString, key: Bank, co: &[Bank], which: Scratch, parity: bool) -> Result<BasisString> {
        let swaps = self.decode(b, which)?;
        let mut out = b;
        for &bank in std::iter::once(&key).chain(co) {
            out = self.permute_bank(out, bank, &swaps, true);
        }
        out = self.layout.scratch(which).write(out, 0);
        Ok(if parity { self.flip_parity(out, swaps.len()) } else { out })
    }

    fn xor_record_of(&self, b: BasisString, key: Bank, which: Scratch) -> BasisString {
        let scratch = self.layout.scratch(which);
        let t = self.layout.schedule.sort(&self.bank(key).read_all(b));
        scratch.write(b, scratch.read(b) ^ t.record)
    }

    fn check_perm(&self, vals: &[u64]) -> Result<()> {
        let mut seen = vec![false; vals.len()];
        for &v in vals {
            let slot = seen.get_mut(v as usize).ok_or_else(|| Error::invalid("register is not a permutation"))?;
            if std::mem::replace(slot, true) {
                return Err(Error::invalid("register is not a permutation"));
            }
        }
        Ok(())
    }

    /// B[C[q]] ^= q, valid while C holds the inverse of B's permutation.
    fn xor_b_from_c(&self, b: BasisString) -> Result<BasisString> {
        let (bw, cw) = (self.bank(Bank::B), self.bank(Bank::C));
        let c = cw.read_all(b);
        self.check_perm(&c)?;
        let mut bvals = bw.read_all(b);
        for (q, &p) in c.iter().enumerate() {
            bvals[p as usize] ^= q as u64;
        }
        Ok(bw.write_all(b, &bvals))
    }

    fn xor_identity(&self, b: BasisString, bank: Bank) -> BasisString {
        let w = self.bank(bank);
        let vals: Vec<u64> = w.read_all(b).iter().zip(self.identity_words()).map(|(v, i)| v ^ i).collect();
        w.write_all(b, &vals)
    }

    fn forward(&self, stage: Stage, b: BasisString) -> Result<BasisString> {
        let bw = self.bank(Bank::B);
        Ok(match stage {
            Stage::RanksToPermutation => {
                let ranks: Vec<u64> = bw.read_all(b).iter().map(|w| w + 1).collect();
                let perm = ranks_to_perm(&ranks)?;
                bw.write_all(b, &perm.iter().map(|v| v - 1).collect::<Vec<_>>())
            }
            Stage::AssignIdentity => {
                if b.0 & self.bank(Bank::C).mask() != 0 {
                    return Err(Error::invalid("register C is not zero"));
                }
                self.xor_identity(b, Bank::C)
            }
            Stage::SortB => self.sort(b, Bank::B, &[Bank::A, Bank::C], Scratch::First, true)?,
            Stage::ParityPhase => b,
            Stage::UncomputeParity => self.flip_parity(b, self.decode(b, Scratch::First)?.len()),
            Stage::UnsortB => self.permute_bank(b, Bank::B, &self.decode(b, Scratch::First)?, true),
            Stage::EraseFirstRecord => self.xor_record_of(b, Bank::B, Scratch::First),
            Stage::EraseB => self.xor_b_from_c(b)?,
            Stage::SortC => self.sort(b, Bank::C, &[Bank::A], Scratch::Second, false)?,
            Stage::EraseC => self.xor_identity(b, Bank::C),
            Stage::UnsortA => self.permute_bank(b, Bank::A, &self.decode(b, Scratch::Second)?, true),
            Stage::EraseSecondRecord => self.xor_record_of(b, Bank::A, Scratch::Second),
        })
    }

    fn backward(&self, stage: Stage, b: BasisString) -> Result<BasisString> {
        let bw = self.bank(Bank::B);
        Ok(match stage {
            Stage::RanksToPermutation => {
                let perm: Vec<u64> = bw.read_all(b).iter().map(|w| w + 1).collect();
                let ranks = perm_to_ranks(&perm)?;
                bw.write_all(b, &ranks.iter().map(|r| r - 1).collect::<Vec<_>>())
            }
            Stage::AssignIdentity => {
                let cw = self.bank(Bank::C);
                if cw.read_all(b) != self.identity_words() {
                    return Err(Error::invalid("register C does not hold 1..n"));
                }
                cw.write_all(b, &vec![0; self.layout.n])
            }
            Stage::SortB => self.unsort(b, Bank::B, &[Bank::A, Bank::C], Scratch::First, true)?,
            Stage::UnsortB => self.permute_bank(b, Bank::B, &self.decode(b, Scratch::First)?, false),
            Stage::SortC => self.unsort(b, Bank::C, &[Bank::A], Scratch::Second, false)?,
            Stage::UnsortA => self.permute_bank(b, Bank::A, &self.decode(b, Scratch::Second)?, false),
            // the remaining stages are involutions
            other => self.forward(other, b)?,
        })
    }
}

fn run_stage(state: &mut QuantumState, layout: &AntisymLayout, stage: Stage, backward: bool) -> Result<()> {
    if stage == Stage::ParityPhase {
        parity_phase(state, layout);
        return Ok(());
    }
    let rw = Rewriter { layout };
    if backward {
        state.try_apply_basis_map(|b| rw.backward(stage, b))
    } else {
        state.try_apply_basis_map(|b| rw.forward(stage, b))
    }
}

/// Step III: decode the rank tuple in B into a permutation of 1..=n.
pub fn ranks_to_permutation(state: &mut QuantumState, layout: &AntisymLayout) -> Result<()> {
    layout.check_state(state)?;
    run_stage(state, layout, Stage::RanksToPermutation, false)
}

/// C ← (1, …, n). C must be zero on every branch.
pub fn assign_identity(state: &mut QuantumState, layout: &AntisymLayout) -> Result<()> {
    layout.check_state(state)?;
    run_stage(state, layout, Stage::AssignIdentity, false)
}

/// Branch-wise sort of `key` ascending, applying the same exchanges to
/// `co_moved`, writing the exchange record into `scratch` and, if
/// `track_parity`, toggling the parity bit once per exchange.
pub fn sort_with_record(
    state: &mut QuantumState,
    layout: &AntisymLayout,
    key: Bank,
    co_moved: &[Bank],
    scratch: Scratch,
    track_parity: bool,
) -> Result<()> {
    layout.check_state(state)?;
    if co_moved.contains(&key) {
        return Err(Error::invalid("key register cannot also be co-moved"));
    }
    let rw = Rewriter { layout };
    state.try_apply_basis_map(|b| rw.sort(b, key, co_moved, scratch, track_parity))
}

/// Negates every branch whose parity bit is set.
pub fn parity_phase(state: &mut QuantumState, layout: &AntisymLayout) {
    let q = layout.parity_qubit();
    state.apply_phase_if(|b| b.bit(q), PI);
}

fn check_clean(state: &QuantumState, layout: &AntisymLayout) -> Result<()> {
    let mask = layout.ancilla_mask();
    if let Some((b, _)) = state.iter_nonzero().find(|(b, _)| b.0 & mask != 0) {
        return Err(Error::InvariantViolation(format!("ancillas not cleared on branch {b}")));
    }
    Ok(())
}

/// Full pipeline. Fermi statistics give (1/√n!) Σ_σ sgn(σ)|σ(Ψ)⟩ in A with
/// the ordered tuple at +1/√n!; Bose statistics skip the sign.
pub fn antisymmetrize(state: &mut QuantumState, layout: &AntisymLayout, stats: Statistics) -> Result<()> {
    layout.check_state(state)?;
    check_clean(state, layout).map_err(|_| Error::invalid("ancilla registers must start at zero"))?;
    let a = layout.words(Bank::A);
    for (b, _) in state.iter_nonzero() {
        let vals = a.read_all(b);
        if vals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!("register A holds an unordered tuple on branch {b}")));
        }
    }
    superpose_ranks(state, layout)?;
    for stage in STAGES {
        if stage == Stage::ParityPhase && stats == Statistics::Bose {
            continue;
        }
        run_stage(state, layout, stage, false)?;
    }
    check_clean(state, layout)
}

/// Inverse of [`antisymmetrize`] on its image.
pub fn unantisymmetrize(state: &mut QuantumState, layout: &AntisymLayout, stats: Statistics) -> Result<()> {
    layout.check_state(state)?;
    check_clean(state, layout).map_err(|_| Error::invalid("ancilla registers must be zero"))?;
    for stage in STAGES.iter().rev().copied() {
        if stage == Stage::ParityPhase && stats == Statistics::Bose {
            continue;
        }
        run_stage(state, layout, stage, true)?;
    }
    unsuperpose_ranks(state, layout)
}

/// Drops the (zero) ancillas and re-expresses register A on `target`, which
/// must have exactly `n · word_bits` qubits.
pub fn extract_register_a(state: &QuantumState, layout: &AntisymLayout, target: RegisterLayout) -> Result<QuantumState> {
    layout.check_state(state)?;
    if target.width() != layout.n * layout.word_bits {
        return Err(Error::LayoutMismatch);
    }
    check_clean(state, layout)?;
    QuantumState::from_amplitudes(target, state.iter_nonzero(), state.backend())
}

/// max_b |ψ(swap_ij b) + ψ(b)| over the words; zero for a state that is
/// antisymmetric under exchanging words `i` and `j`.
pub fn transposition_test(state: &QuantumState, words: &QuWords, i: usize, j: usize) -> Result<f64> {
    exchange_violation(state, words, i, j, 1.0)
}

/// max_b |ψ(swap_ij b) − ψ(b)|; zero for an exchange-symmetric state.
pub fn symmetric_transposition_test(state: &QuantumState, words: &QuWords, i: usize, j: usize) -> Result<f64> {
    exchange_violation(state, words, i, j, -1.0)
}

fn exchange_violation(state: &QuantumState, words: &QuWords, i: usize, j: usize, sign: f64) -> Result<f64> {
    if i == j {
        return Err(Error::invalid("transposition needs two distinct particles"));
    }
    if i >= words.n || j >= words.n {
        return Err(Error::invalid(format!("particle index out of range (n = {})", words.n)));
    }
    Ok(state
        .iter_nonzero()
        .map(|(b, a)| (state.amplitude(words.swap(b, i, j)) + a * sign).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn a_values(layout: &AntisymLayout, b: BasisString) -> Vec<u64> {
        layout.words(Bank::A).read_all(b).iter().map(|w| w + 1).collect()
    }

    #[test]
    fn prepare_input_examples() {
        let l = AntisymLayout::new(1, 2).unwrap();
        let s = prepare_ordered_configuration(&l, &[3]).unwrap();
        let (b, a) = s.iter_nonzero().next().unwrap();
        assert_eq!(a_values(&l, b), vec![3]);
        assert_eq!(b.0 & l.ancilla_mask(), 0);
        assert_eq!(a, C64::new(1.0, 0.0));

        let l = AntisymLayout::new(2, 2).unwrap();
        let s = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        assert_eq!(a_values(&l, s.iter_nonzero().next().unwrap().0), vec![1, 3]);
        assert!(prepare_ordered_configuration(&l, &[3, 1]).is_err());
        assert!(prepare_ordered_configuration(&l, &[2, 2]).is_err());
        assert!(prepare_ordered_configuration(&l, &[1, 5]).is_err());
        assert!(prepare_ordered_configuration(&l, &[0, 2]).is_err());
    }

    #[test]
    fn rank_superposition_shapes() {
        assert_eq!(rank_tuples(1), vec![vec![1]]);
        assert_eq!(rank_tuples(2), vec![vec![1, 1], vec![2, 1]]);
        let l = AntisymLayout::new(3, 3).unwrap();
        let mut s = prepare_ordered_configuration(&l, &[1, 2, 4]).unwrap();
        superpose_ranks(&mut s, &l).unwrap();
        assert_eq!(s.support_size(), 6);
        let bw = l.words(Bank::B);
        let mut seen: Vec<Vec<u64>> = s
            .iter_nonzero()
            .map(|(b, a)| {
                assert!((a.re - 1.0 / 6f64.sqrt()).abs() < 1e-15 && a.im == 0.0);
                bw.read_all(b).iter().map(|w| w + 1).collect()
            })
            .collect();
        seen.sort();
        // direct construction: B1 ∈ 1..3, B2 ∈ 1..2, B3 = 1
        let mut direct = Vec::new();
        for r1 in 1..=3 {
            for r2 in 1..=2 {
                direct.push(vec![r1, r2, 1]);
            }
        }
        assert_eq!(seen, direct);
    }

    #[test]
    fn rank_decoding_examples() {
        assert_eq!(ranks_to_perm(&[2, 2, 1]).unwrap(), vec![2, 3, 1]);
        assert_eq!(ranks_to_perm(&[1, 1, 1, 1]).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(ranks_to_perm(&[4, 3, 2, 1]).unwrap(), vec![4, 3, 2, 1]);
        assert!(ranks_to_perm(&[1, 3, 1]).is_err());
        let mut images: Vec<Vec<u64>> = rank_tuples(3).iter().map(|r| ranks_to_perm(r).unwrap()).collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 6);
        for r in rank_tuples(4) {
            assert_eq!(perm_to_ranks(&ranks_to_perm(&r).unwrap()).unwrap(), r);
        }
    }

    #[test]
    fn out_of_range_rank_rejected_on_state() {
        let l = AntisymLayout::new(2, 2).unwrap();
        let s = prepare_ordered_configuration(&l, &[1, 2]).unwrap();
        // B = (2, 2) is outside (1..2) × (1)
        let bw = l.words(Bank::B);
        let mut s2 = s.clone();
        s2.try_apply_basis_map(|b| Ok(bw.write_all(b, &[1, 1]))).unwrap();
        assert!(ranks_to_permutation(&mut s2, &l).is_err());
    }

    #[test]
    fn identity_assignment() {
        let l = AntisymLayout::new(3, 2).unwrap();
        let mut s = prepare_ordered_configuration(&l, &[1, 2, 3]).unwrap();
        assign_identity(&mut s, &l).unwrap();
        let b = s.iter_nonzero().next().unwrap().0;
        assert_eq!(l.words(Bank::C).read_all(b), vec![0, 1, 2]);
        assert!(assign_identity(&mut s, &l).is_err());
    }

    #[test]
    fn sort_with_record_examples() {
        let l = AntisymLayout::new(2, 2).unwrap();
        let parity = l.register_layout().register("parity").unwrap().qubits()[0];
        // key B = (2, 1), A = (x, y) = (1, 3)
        let mut s = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        let bw = l.words(Bank::B);
        s.try_apply_basis_map(|b| Ok(bw.write_all(b, &[1, 0]))).unwrap();
        sort_with_record(&mut s, &l, Bank::B, &[Bank::A], Scratch::First, true).unwrap();
        let b = s.iter_nonzero().next().unwrap().0;
        assert_eq!(bw.read_all(b), vec![0, 1]);
        assert_eq!(a_values(&l, b), vec![3, 1]);
        assert!(b.bit(parity));

        // already sorted key: nothing moves, no parity
        let mut s = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        s.try_apply_basis_map(|b| Ok(bw.write_all(b, &[0, 1]))).unwrap();
        let before_a = a_values(&l, s.iter_nonzero().next().unwrap().0);
        sort_with_record(&mut s, &l, Bank::B, &[Bank::A], Scratch::First, true).unwrap();
        let b = s.iter_nonzero().next().unwrap().0;
        assert_eq!(a_values(&l, b), before_a);
        assert!(!b.bit(parity));
        // the record slot is now dirty, so sorting into it again is refused
        let mut dirty = s.clone();
        dirty.try_apply_basis_map(|b| Ok(l.scratch(Scratch::First).write(b, 1))).unwrap();
        assert!(sort_with_record(&mut dirty, &l, Bank::B, &[], Scratch::First, true).is_err());
    }

    #[test]
    fn sort_parity_matches_permutation_parity_for_s3() {
        let l = AntisymLayout::new(3, 2).unwrap();
        let parity = l.register_layout().register("parity").unwrap().qubits()[0];
        let bw = l.words(Bank::B);
        for ranks in rank_tuples(3) {
            let perm = ranks_to_perm(&ranks).unwrap();
            let mut inversions = 0;
            for i in 0..3 {
                for j in i + 1..3 {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            let mut s = prepare_ordered_configuration(&l, &[1, 2, 3]).unwrap();
            let enc: Vec<u64> = perm.iter().map(|v| v - 1).collect();
            s.try_apply_basis_map(|b| Ok(bw.write_all(b, &enc))).unwrap();
            sort_with_record(&mut s, &l, Bank::B, &[Bank::A, Bank::C], Scratch::First, true).unwrap();
            let b = s.iter_nonzero().next().unwrap().0;
            assert_eq!(b.bit(parity), inversions % 2 == 1, "{perm:?}");
        }
    }

    #[test]
    fn parity_phase_negates_odd_branches() {
        let l = AntisymLayout::new(2, 2).unwrap();
        let q = l.register_layout().register("parity").unwrap().qubits()[0];
        let s0 = prepare_ordered_configuration(&l, &[1, 2]).unwrap();
        let mut s = s0.clone();
        parity_phase(&mut s, &l);
        assert_eq!(s, s0);
        s.apply_basis_permutation(|b| b.flip(q)).unwrap();
        parity_phase(&mut s, &l);
        assert!((s.iter_nonzero().next().unwrap().1 + C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_particle_antisymmetrization() {
        let l = AntisymLayout::new(2, 2).unwrap();
        let mut s = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        antisymmetrize(&mut s, &l, Statistics::Fermi).unwrap();
        let a = l.words(Bank::A);
        let amp = |v: [u64; 2]| s.amplitude(a.write_all(BasisString(0), &[v[0] - 1, v[1] - 1]));
        assert!((amp([1, 3]) - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((amp([3, 1]) - C64::new(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert_eq!(s.support_size(), 2);
        assert!(transposition_test(&s, &a, 0, 1).unwrap() < 1e-15);

        let mut bose = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        antisymmetrize(&mut bose, &l, Statistics::Bose).unwrap();
        assert!(symmetric_transposition_test(&bose, &a, 0, 1).unwrap() < 1e-15);
    }

    #[test]
    fn single_particle_is_untouched() {
        let l = AntisymLayout::new(1, 3).unwrap();
        let s0 = prepare_ordered_configuration(&l, &[5]).unwrap();
        let mut s = s0.clone();
        antisymmetrize(&mut s, &l, Statistics::Fermi).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn round_trip_is_exact_identity() {
        for kind in [SortKind::Heap, SortKind::OddEven] {
            let l = AntisymLayout::with_schedule(3, 3, kind).unwrap();
            let s0 = prepare_ordered_input(
                &l,
                &[(vec![1, 2, 4], C64::new(0.6, 0.0)), (vec![3, 5, 8], C64::new(0.0, 0.8))],
            )
            .unwrap();
            for stats in [Statistics::Fermi, Statistics::Bose] {
                let mut s = s0.clone();
                antisymmetrize(&mut s, &l, stats).unwrap();
                assert_eq!(s.support_size(), 12);
                unantisymmetrize(&mut s, &l, stats).unwrap();
                assert!(s.max_abs_diff(&s0).unwrap() < 1e-15);
            }
        }
    }

    #[test]
    fn unordered_or_dirty_input_rejected() {
        let l = AntisymLayout::new(2, 2).unwrap();
        let mut s = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        let a = l.words(Bank::A);
        s.try_apply_basis_map(|b| Ok(a.swap(b, 0, 1))).unwrap();
        assert!(antisymmetrize(&mut s, &l, Statistics::Fermi).is_err());

        let mut s = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        assign_identity(&mut s, &l).unwrap();
        assert!(matches!(antisymmetrize(&mut s, &l, Statistics::Fermi), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn transposition_test_on_product_state() {
        let l = AntisymLayout::new(2, 2).unwrap();
        let s = prepare_ordered_configuration(&l, &[1, 3]).unwrap();
        let a = l.words(Bank::A);
        assert!((transposition_test(&s, &a, 0, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(transposition_test(&s, &a, 1, 1).is_err());
    }

    #[test]
    fn layout_limits() {
        assert!(AntisymLayout::new(5, 2).is_err());
        assert!(AntisymLayout::new(0, 2).is_err());
        assert_eq!(AntisymLayout::for_labels(3, 8).unwrap().word_bits(), 3);
        assert_eq!(AntisymLayout::for_labels(3, 9).unwrap().word_bits(), 4);
        assert_eq!(AntisymLayout::for_labels(1, 1).unwrap().word_bits(), 1);
    }
}
