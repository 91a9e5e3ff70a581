//! Brute-force antisymmetrization and the bridge from particle registers to
//! occupation strings.

use super::DenseMatrix;
use crate::antisym::transposition_test;
use crate::error::{Error, Result};
use crate::fq::{FirstQuantizedLayout, ANTISYMMETRY_TOL};
use crate::layout::BasisString;
use crate::sq::ModeLayout;
use crate::state::{Backend, QuantumState};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

/// Label tuple (particle order) → amplitude.
pub type SlaterMap = BTreeMap<Vec<u32>, C64>;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..=p.len()).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                q
            })
        })
        .collect()
}

fn inversions(p: &[usize]) -> usize {
    (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
}

/// Σ_σ sgn(σ)/√n! |σ(values)⟩ for strictly increasing `values`.
pub fn slater_antisymmetrize(values: &[u32]) -> Result<SlaterMap> {
    if values.is_empty() {
        return Err(Error::invalid("need at least one label"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!("labels {values:?} are not strictly increasing")));
    }
    let n = values.len();
    let norm = 1.0 / (1..=n).map(|k| k as f64).product::<f64>().sqrt();
    Ok(permutations(n)
        .into_iter()
        .map(|p| {
            let sign = if inversions(&p) % 2 == 0 { 1.0 } else { -1.0 };
            (p.iter().map(|&i| values[i]).collect(), C64::new(sign * norm, 0.0))
        })
        .collect())
}

/// [`slater_antisymmetrize`] loaded on the particle-register layout.
pub fn slater_state(layout: &FirstQuantizedLayout, values: &[u32], backend: Backend) -> Result<QuantumState> {
    if values.len() != layout.particles() {
        return Err(Error::invalid(format!("expected {} labels, got {}", layout.particles(), values.len())));
    }
    let map = slater_antisymmetrize(values)?;
    let amps = map
        .iter()
        .map(|(labels, a)| Ok((layout.encode_labels(labels)?, *a)))
        .collect::<Result<Vec<_>>>()?;
    QuantumState::from_amplitudes(layout.register_layout(), amps, backend)
}

/// Maps an antisymmetric particle-register state to the occupation basis:
/// the component over label set S becomes the string with modes λ − 1
/// (λ ∈ S) occupied, with coefficient √n! times the amplitude of the sorted
/// tuple.
pub fn fq_to_sq(state: &QuantumState, layout: &FirstQuantizedLayout) -> Result<QuantumState> {
    if *state.layout() != layout.register_layout() {
        return Err(Error::LayoutMismatch);
    }
    let n = layout.particles();
    let words = layout.words();
    for i in 0..n {
        for j in i + 1..n {
            let v = transposition_test(state, &words, i, j)?;
            if v > ANTISYMMETRY_TOL {
                return Err(Error::invalid(format!(
                    "state is not antisymmetric under exchange of particles {i} and {j} (violation {v:.3e})"
                )));
            }
        }
    }
    let scale = (1..=n).map(|k| k as f64).product::<f64>().sqrt();
    let modes = ModeLayout::new(layout.sites())?;
    let amps: Vec<(BasisString, C64)> = state
        .iter_nonzero()
        .filter_map(|(b, a)| {
            let labels = layout.decode_labels(b);
            labels
                .windows(2)
                .all(|w| w[0] < w[1])
                .then(|| (BasisString(labels.iter().fold(0u64, |acc, &l| acc | 1 << (l - 1))), a * scale))
        })
        .collect();
    QuantumState::from_amplitudes(modes.register_layout(), amps, state.backend())
}

/// Columns are the normalized Slater vectors of every increasing label
/// tuple, in lexicographic order; an orthonormal basis of the antisymmetric
/// sector.
pub fn antisymmetric_sector_basis(layout: &FirstQuantizedLayout) -> Result<DenseMatrix> {
    let (n, base) = (layout.particles(), layout.num_labels() as u32);
    let mut sets: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        sets = sets
            .into_iter()
            .flat_map(|s| {
                let start = s.last().map_or(1, |&l| l + 1);
                (start..=base).map(move |l| {
                    let mut t = s.clone();
                    t.push(l);
                    t
                })
            })
            .collect();
    }
    let d = (base as usize).pow(n as u32);
    if d > super::MAX_FQ_DIM {
        return Err(Error::TooLarge(format!("dimension {d} exceeds dense limit {}", super::MAX_FQ_DIM)));
    }
    let mut basis = DenseMatrix::zeros(d, sets.len());
    for (col, set) in sets.iter().enumerate() {
        for (labels, a) in slater_antisymmetrize(set)? {
            basis[(layout.encode_labels(&labels)?.0 as usize, col)] = a;
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn small_slater_maps() {
        let one = slater_antisymmetrize(&[3]).unwrap();
        assert_eq!(one, SlaterMap::from([(vec![3], C64::new(1.0, 0.0))]));
        let two = slater_antisymmetrize(&[1, 3]).unwrap();
        assert!((two[&vec![1, 3]].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((two[&vec![3, 1]].re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(two.len(), 2);
        assert!(slater_antisymmetrize(&[2, 2]).is_err());
    }

    #[test]
    fn three_label_signs() {
        let map = slater_antisymmetrize(&[1, 2, 4]).unwrap();
        assert_eq!(map.len(), 6);
        let even = [vec![1, 2, 4], vec![2, 4, 1], vec![4, 1, 2]];
        for (labels, a) in &map {
            let expect = if even.contains(labels) { 1.0 } else { -1.0 } / 6f64.sqrt();
            assert!((a.re - expect).abs() < 1e-15, "{labels:?}");
        }
    }

    #[test]
    fn slater_to_occupation() {
        let l = FirstQuantizedLayout::new(2, 2).unwrap();
        let s = slater_state(&l, &[1, 3], Backend::Sparse).unwrap();
        let sq = fq_to_sq(&s, &l).unwrap();
        assert_eq!(sq.support_size(), 1);
        assert!((sq.amplitude(BasisString(0b101)) - C64::new(1.0, 0.0)).norm() < 1e-15);

        let l1 = FirstQuantizedLayout::new(1, 4).unwrap();
        let s = slater_state(&l1, &[6], Backend::Dense).unwrap();
        let sq = fq_to_sq(&s, &l1).unwrap();
        assert_eq!(sq.amplitude(BasisString(1 << 5)), C64::new(1.0, 0.0));
    }

    #[test]
    fn round_trip_on_all_increasing_pairs() {
        let l = FirstQuantizedLayout::new(2, 4).unwrap();
        for a in 1..=8u32 {
            for b in a + 1..=8 {
                let sq = fq_to_sq(&slater_state(&l, &[a, b], Backend::Sparse).unwrap(), &l).unwrap();
                let (bits, amp) = sq.iter_nonzero().next().unwrap();
                assert_eq!(bits.0, (1 << (a - 1)) | (1 << (b - 1)));
                assert!((amp - C64::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn product_state_rejected() {
        let l = FirstQuantizedLayout::new(2, 2).unwrap();
        let b = l.encode_labels(&[1, 3]).unwrap();
        let s = QuantumState::basis(l.register_layout(), b, Backend::Sparse).unwrap();
        assert!(matches!(fq_to_sq(&s, &l), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sector_basis_is_orthonormal() {
        let l = FirstQuantizedLayout::new(2, 2).unwrap();
        let basis = antisymmetric_sector_basis(&l).unwrap();
        assert_eq!(basis.ncols(), 6);
        let g = basis.adjoint() * &basis;
        assert!((g - DenseMatrix::identity(6, 6)).camax() < 1e-15);
    }
}
