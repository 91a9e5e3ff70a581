//! Statevector with interchangeable dense and sparse storage.
//!
//! Every operation is defined on the abstract amplitude map and has one
//! kernel per backend. The two kernels must agree to rounding; the
//! property tests in this module hold them to 1e-12.

use crate::error::{Error, Result};
use crate::gate::{Gate2, UNITARY_TOL};
use crate::layout::{BasisString, RegisterLayout};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, Ordering};

/// Normalization tolerance for injected states.
pub const NORM_TOL: f64 = 1e-10;

/// Largest qubit count the dense backend accepts.
pub const MAX_DENSE_QUBITS: usize = 26;

/// Exhaustive bijection checks are only attempted up to this width.
pub const MAX_EXHAUSTIVE_QUBITS: usize = 20;

const PAR_THRESHOLD: usize = 1 << 16;

static VALIDATION_MODE: AtomicBool = AtomicBool::new(false);

/// Turns on exhaustive checks (bijectivity of basis maps, antisymmetry of
/// first-quantized inputs). Off by default; the checks are exponential in
/// the qubit count.
pub fn set_validation_mode(on: bool) {
    VALIDATION_MODE.store(on, Ordering::Relaxed);
}

pub fn validation_mode() -> bool {
    VALIDATION_MODE.load(Ordering::Relaxed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Dense,
    #[default]
    Sparse,
}

/// Seed for every random stream in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Derived seed for the `i`-th independent stream.
    pub fn stream(self, i: u64) -> RngSeed {
        RngSeed(self.0.wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Amplitudes {
    Dense(Vec<C64>),
    /// Never holds an exact zero.
    Sparse(BTreeMap<BasisString, C64>),
}

/// A partial matching of basis strings for [`QuantumState::apply_two_level_mix`].
pub trait Pairing {
    /// The pair `(b0, b1)` containing `b`, if any. Must return the same
    /// pair for both of its members.
    fn pair_of(&self, b: BasisString) -> Option<(BasisString, BasisString)>;
}

impl<F> Pairing for F
where
    F: Fn(BasisString) -> Option<(BasisString, BasisString)>,
{
    fn pair_of(&self, b: BasisString) -> Option<(BasisString, BasisString)> {
        self(b)
    }
}

/// An explicit list of disjoint pairs.
#[derive(Debug, Clone, Default)]
pub struct PairList {
    index: BTreeMap<BasisString, (BasisString, BasisString)>,
}

impl PairList {
    pub fn new(pairs: impl IntoIterator<Item = (BasisString, BasisString)>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (b0, b1) in pairs {
            if b0 == b1 {
                return Err(Error::OverlappingPairs(format!("{b0} is paired with itself")));
            }
            for b in [b0, b1] {
                if index.insert(b, (b0, b1)).is_some() {
                    return Err(Error::OverlappingPairs(format!("{b} appears in two pairs")));
                }
            }
        }
        Ok(PairList { index })
    }
}

impl Pairing for PairList {
    fn pair_of(&self, b: BasisString) -> Option<(BasisString, BasisString)> {
        self.index.get(&b).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    amps: Amplitudes,
}

#[inline]
fn store(map: &mut BTreeMap<BasisString, C64>, b: BasisString, a: C64) {
    if a == C64::new(0.0, 0.0) {
        map.remove(&b);
    } else {
        map.insert(b, a);
    }
}

fn check_dense_width(width: usize) -> Result<()> {
    if width > MAX_DENSE_QUBITS {
        return Err(Error::TooLarge(format!(
            "{width} qubits on the dense backend (limit {MAX_DENSE_QUBITS})"
        )));
    }
    Ok(())
}

impl QuantumState {
    /// |bits⟩ on the given layout.
    pub fn basis(layout: RegisterLayout, bits: BasisString, backend: Backend) -> Result<Self> {
        layout.check_basis(bits)?;
        let amps = match backend {
            Backend::Dense => {
                check_dense_width(layout.width())?;
                let mut v = vec![C64::new(0.0, 0.0); 1 << layout.width()];
                v[bits.0 as usize] = C64::new(1.0, 0.0);
                Amplitudes::Dense(v)
            }
            Backend::Sparse => Amplitudes::Sparse(BTreeMap::from([(bits, C64::new(1.0, 0.0))])),
        };
        Ok(QuantumState { layout, amps })
    }

    /// |bits⟩ from a string written most significant bit first; its length
    /// must equal the layout width.
    pub fn basis_from_bits(layout: RegisterLayout, bits: &str, backend: Backend) -> Result<Self> {
        let (b, w) = BasisString::parse_bits(bits)?;
        if w != layout.width() {
            return Err(Error::WidthMismatch { expected: layout.width(), got: w });
        }
        Self::basis(layout, b, backend)
    }

    /// Loads an explicit amplitude map. Repeated keys are summed.
    pub fn from_amplitudes(
        layout: RegisterLayout,
        amplitudes: impl IntoIterator<Item = (BasisString, C64)>,
        backend: Backend,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (b, a) in amplitudes {
            layout.check_basis(b)?;
            *map.entry(b).or_insert(C64::new(0.0, 0.0)) += a;
        }
        map.retain(|_, a| *a != C64::new(0.0, 0.0));
        let norm: f64 = map.values().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let state = QuantumState { layout, amps: Amplitudes::Sparse(map) };
        state.to_backend(backend)
    }

    pub(crate) fn from_sparse_unchecked(
        layout: RegisterLayout,
        map: BTreeMap<BasisString, C64>,
    ) -> Self {
        QuantumState { layout, amps: Amplitudes::Sparse(map) }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn width(&self) -> usize {
        self.layout.width()
    }

    pub fn backend(&self) -> Backend {
        match self.amps {
            Amplitudes::Dense(_) => Backend::Dense,
            Amplitudes::Sparse(_) => Backend::Sparse,
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Result<Self> {
        let amps = match (&self.amps, backend) {
            (Amplitudes::Dense(_), Backend::Dense) | (Amplitudes::Sparse(_), Backend::Sparse) => {
                self.amps.clone()
            }
            (Amplitudes::Dense(v), Backend::Sparse) => Amplitudes::Sparse(
                v.iter()
                    .enumerate()
                    .filter(|(_, a)| **a != C64::new(0.0, 0.0))
                    .map(|(i, a)| (BasisString(i as u64), *a))
                    .collect(),
            ),
            (Amplitudes::Sparse(m), Backend::Dense) => {
                check_dense_width(self.width())?;
                let mut v = vec![C64::new(0.0, 0.0); 1 << self.width()];
                for (b, a) in m {
                    v[b.0 as usize] = *a;
                }
                Amplitudes::Dense(v)
            }
        };
        Ok(QuantumState { layout: self.layout.clone(), amps })
    }

    pub fn amplitude(&self, b: BasisString) -> C64 {
        match &self.amps {
            Amplitudes::Dense(v) => v.get(b.0 as usize).copied().unwrap_or_default(),
            Amplitudes::Sparse(m) => m.get(&b).copied().unwrap_or_default(),
        }
    }

    /// Nonzero amplitudes in ascending basis order.
    pub fn iter_nonzero(&self) -> Box<dyn Iterator<Item = (BasisString, C64)> + '_> {
        match &self.amps {
            Amplitudes::Dense(v) => Box::new(
                v.iter()
                    .enumerate()
                    .filter(|(_, a)| **a != C64::new(0.0, 0.0))
                    .map(|(i, a)| (BasisString(i as u64), *a)),
            ),
            Amplitudes::Sparse(m) => Box::new(m.iter().map(|(b, a)| (*b, *a))),
        }
    }

    /// Number of nonzero amplitudes.
    pub fn support_size(&self) -> usize {
        match &self.amps {
            Amplitudes::Dense(v) => v.iter().filter(|a| **a != C64::new(0.0, 0.0)).count(),
            Amplitudes::Sparse(m) => m.len(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.iter_nonzero().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Full amplitude vector indexed by basis value.
    pub fn to_dense_vec(&self) -> Result<Vec<C64>> {
        match self.to_backend(Backend::Dense)?.amps {
            Amplitudes::Dense(v) => Ok(v),
            Amplitudes::Sparse(_) => unreachable!(),
        }
    }

    /// Probability of each value of one register, marginalizing the rest.
    pub fn marginal(&self, register: &str) -> Result<BTreeMap<u64, f64>> {
        let reg = self.layout.register(register)?;
        let mut out = BTreeMap::new();
        for (b, a) in self.iter_nonzero() {
            *out.entry(reg.read(b)).or_insert(0.0) += a.norm_sqr();
        }
        Ok(out)
    }

    fn check_gate(u: &Gate2) -> Result<()> {
        let defect = u.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NonUnitary(defect));
        }
        Ok(())
    }

    /// Applies `u` to qubit `q`.
    pub fn apply_single_qubit_unitary(&mut self, q: usize, u: &Gate2) -> Result<()> {
        self.apply_controlled_unitary(&[], q, u)
    }

    /// Applies `u` to `target` on the subspace where every `(qubit, value)`
    /// control matches.
    pub fn apply_controlled_unitary(
        &mut self,
        controls: &[(usize, bool)],
        target: usize,
        u: &Gate2,
    ) -> Result<()> {
        self.layout.check_qubit(target)?;
        for &(c, _) in controls {
            self.layout.check_qubit(c)?;
            if c == target {
                return Err(Error::ControlOverlapsTarget(c));
            }
        }
        Self::check_gate(u)?;
        let (ctrl_mask, ctrl_val) = controls.iter().fold((0u64, 0u64), |(m, v), &(q, val)| {
            (m | 1 << q, if val { v | 1 << q } else { v })
        });
        let tbit = 1u64 << target;
        match &mut self.amps {
            Amplitudes::Dense(v) => {
                let kernel = |(lo_index, chunk): (usize, &mut [C64])| {
                    let half = tbit as usize;
                    let base = (lo_index * 2 * half) as u64;
                    let (lo, hi) = chunk.split_at_mut(half);
                    for i in 0..half {
                        let idx = base | i as u64;
                        if idx & ctrl_mask != ctrl_val {
                            continue;
                        }
                        let (a0, a1) = u.apply(lo[i], hi[i]);
                        lo[i] = a0;
                        hi[i] = a1;
                    }
                };
                let chunk = 2 * tbit as usize;
                if v.len() >= PAR_THRESHOLD {
                    v.par_chunks_mut(chunk).enumerate().for_each(kernel);
                } else {
                    v.chunks_mut(chunk).enumerate().for_each(kernel);
                }
            }
            Amplitudes::Sparse(m) => {
                let bases: BTreeSet<u64> = m
                    .keys()
                    .map(|b| b.0 & !tbit)
                    .filter(|b| b & ctrl_mask == ctrl_val)
                    .collect();
                for base in bases {
                    let (b0, b1) = (BasisString(base), BasisString(base | tbit));
                    let a0 = m.get(&b0).copied().unwrap_or_default();
                    let a1 = m.get(&b1).copied().unwrap_or_default();
                    let (n0, n1) = u.apply(a0, a1);
                    store(m, b0, n0);
                    store(m, b1, n1);
                }
            }
        }
        Ok(())
    }

    /// Multiplies the amplitude of every basis string satisfying
    /// `predicate` by e^{iθ}.
    pub fn apply_phase_if<P>(&mut self, predicate: P, theta: f64)
    where
        P: Fn(BasisString) -> bool + Sync,
    {
        let phase = C64::from_polar(1.0, theta);
        match &mut self.amps {
            Amplitudes::Dense(v) => {
                let kernel = |(i, a): (usize, &mut C64)| {
                    if predicate(BasisString(i as u64)) {
                        *a *= phase;
                    }
                };
                if v.len() >= PAR_THRESHOLD {
                    v.par_iter_mut().enumerate().for_each(kernel);
                } else {
                    v.iter_mut().enumerate().for_each(kernel);
                }
            }
            Amplitudes::Sparse(m) => {
                for (b, a) in m.iter_mut() {
                    if predicate(*b) {
                        *a *= phase;
                    }
                }
            }
        }
    }

    /// Moves the amplitude of `b` to `f(b)`. `f` must be a bijection of the
    /// basis; collisions on the support are always detected, and in
    /// validation mode the whole basis is checked for widths up to
    /// [`MAX_EXHAUSTIVE_QUBITS`].
    pub fn apply_basis_permutation<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(BasisString) -> BasisString,
    {
        if validation_mode() && self.width() <= MAX_EXHAUSTIVE_QUBITS {
            let dim = 1usize << self.width();
            let mut hit = vec![false; dim];
            for i in 0..dim as u64 {
                let j = f(BasisString(i));
                self.layout.check_basis(j).map_err(|_| {
                    Error::NotBijective(format!("{i:#b} maps outside the basis"))
                })?;
                if std::mem::replace(&mut hit[j.0 as usize], true) {
                    return Err(Error::NotBijective(format!("{j} has two preimages")));
                }
            }
        }
        self.try_apply_basis_map(|b| Ok(f(b)))
    }

    /// Like [`apply_basis_permutation`](Self::apply_basis_permutation) for a
    /// map that is only defined (and injective) on part of the basis. The
    /// state is left untouched if `f` fails on any supported string.
    pub fn try_apply_basis_map<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(BasisString) -> Result<BasisString>,
    {
        let layout = &self.layout;
        let image = |b: BasisString| -> Result<BasisString> {
            let j = f(b)?;
            layout
                .check_basis(j)
                .map_err(|_| Error::NotBijective(format!("{b} maps outside the basis")))?;
            Ok(j)
        };
        match &mut self.amps {
            Amplitudes::Dense(v) => {
                let mut out = vec![C64::new(0.0, 0.0); v.len()];
                let mut hit = vec![false; v.len()];
                for (i, a) in v.iter().enumerate() {
                    if *a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let j = image(BasisString(i as u64))?.0 as usize;
                    if std::mem::replace(&mut hit[j], true) {
                        return Err(Error::NotBijective(format!("{j:#b} has two preimages")));
                    }
                    out[j] = *a;
                }
                *v = out;
            }
            Amplitudes::Sparse(m) => {
                let mut out = BTreeMap::new();
                for (b, a) in m.iter() {
                    let j = image(*b)?;
                    if out.insert(j, *a).is_some() {
                        return Err(Error::NotBijective(format!("{j} has two preimages")));
                    }
                }
                *m = out;
            }
        }
        Ok(())
    }

    /// Mixes the amplitudes of every pair `(b0, b1)` in `pairing` by `u`,
    /// treating `b0` as the first coordinate. Strings outside the pairing
    /// are untouched.
    pub fn apply_two_level_mix<P: Pairing + ?Sized>(&mut self, pairing: &P, u: &Gate2) -> Result<()> {
        Self::check_gate(u)?;
        let consistent = |b: BasisString| -> Result<Option<(BasisString, BasisString)>> {
            let Some((b0, b1)) = pairing.pair_of(b) else { return Ok(None) };
            if b0 == b1 || (b != b0 && b != b1) {
                return Err(Error::OverlappingPairs(format!("{b} maps to pair ({b0}, {b1})")));
            }
            let other = if b == b0 { b1 } else { b0 };
            if pairing.pair_of(other) != Some((b0, b1)) {
                return Err(Error::OverlappingPairs(format!(
                    "{other} does not agree on its pair ({b0}, {b1})"
                )));
            }
            Ok(Some((b0, b1)))
        };
        match &mut self.amps {
            Amplitudes::Dense(v) => {
                let mut pairs = Vec::new();
                for i in 0..v.len() as u64 {
                    if let Some((b0, b1)) = consistent(BasisString(i))? {
                        if b0.0 == i {
                            self.layout.check_basis(b1)?;
                            pairs.push((b0.0 as usize, b1.0 as usize));
                        }
                    }
                }
                for (i0, i1) in pairs {
                    let (n0, n1) = u.apply(v[i0], v[i1]);
                    v[i0] = n0;
                    v[i1] = n1;
                }
            }
            Amplitudes::Sparse(m) => {
                let mut pairs = BTreeSet::new();
                for b in m.keys() {
                    if let Some(p) = consistent(*b)? {
                        self.layout.check_basis(p.0)?;
                        self.layout.check_basis(p.1)?;
                        pairs.insert(p);
                    }
                }
                for (b0, b1) in pairs {
                    let a0 = m.get(&b0).copied().unwrap_or_default();
                    let a1 = m.get(&b1).copied().unwrap_or_default();
                    let (n0, n1) = u.apply(a0, a1);
                    store(m, b0, n0);
                    store(m, b1, n1);
                }
            }
        }
        Ok(())
    }

    /// `n` independent Born-rule draws. The stream depends only on the seed
    /// and the amplitude map, never on the backend.
    pub fn sample(&self, seed: RngSeed, n: usize) -> Result<BTreeMap<BasisString, usize>> {
        if n == 0 {
            return Err(Error::invalid("sample count must be at least 1"));
        }
        let mut outcomes = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for (b, a) in self.iter_nonzero() {
            total += a.norm_sqr();
            outcomes.push(b);
            cumulative.push(total);
        }
        let mut rng = seed.rng();
        let mut counts = BTreeMap::new();
        for _ in 0..n {
            let u: f64 = rng.gen::<f64>() * total;
            let k = cumulative.partition_point(|&c| c <= u).min(outcomes.len() - 1);
            *counts.entry(outcomes[k]).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &QuantumState) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(match (&self.amps, &other.amps) {
            (Amplitudes::Dense(a), Amplitudes::Dense(b)) => {
                a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
            }
            _ => self.iter_nonzero().map(|(b, a)| a.conj() * other.amplitude(b)).sum(),
        })
    }

    /// Largest amplitude-wise difference between two states on the same
    /// layout.
    pub fn max_abs_diff(&self, other: &QuantumState) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        let keys: BTreeSet<BasisString> =
            self.iter_nonzero().chain(other.iter_nonzero()).map(|(b, _)| b).collect();
        Ok(keys
            .into_iter()
            .map(|b| (self.amplitude(b) - other.amplitude(b)).norm())
            .fold(0.0, f64::max))
    }

    /// Euclidean distance ‖self − other‖.
    pub fn l2_distance(&self, other: &QuantumState) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        let keys: BTreeSet<BasisString> =
            self.iter_nonzero().chain(other.iter_nonzero()).map(|(b, _)| b).collect();
        Ok(keys
            .into_iter()
            .map(|b| (self.amplitude(b) - other.amplitude(b)).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}
