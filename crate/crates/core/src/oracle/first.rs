//! First-quantized Hubbard Hamiltonian on the product of per-particle label
//! spaces. Basis index Σ_k (λ_k − 1)·(2m)^k, which is exactly the value of
//! the particle registers in [`FirstQuantizedLayout`].

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::fq::FirstQuantizedLayout;
use crate::lattice::HubbardParams;
use num_complex::Complex64 as C64;

/// Largest dimension (2m)^n accepted for a dense first-quantized matrix.
pub const MAX_FQ_DIM: usize = 4096;

fn dim(layout: &FirstQuantizedLayout) -> Result<usize> {
    let base = layout.num_labels();
    let mut d = 1usize;
    for _ in 0..layout.particles() {
        d = d.checked_mul(base).filter(|&d| d <= MAX_FQ_DIM).ok_or_else(|| {
            Error::TooLarge(format!("({base})^{} exceeds dense limit {MAX_FQ_DIM}", layout.particles()))
        })?;
    }
    Ok(d)
}

fn digits(mut idx: usize, base: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let d = idx % base;
            idx /= base;
            d
        })
        .collect()
}

fn undigits(d: &[usize], base: usize) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * base + x)
}

/// One-particle hopping on an open chain of `m` sites, as a 2m×2m matrix
/// over 0-based labels λ − 1 = 2(x − 1) + σ.
pub fn single_particle_kinetic(m: usize, t0: f64) -> DenseMatrix {
    kinetic_on_bonds(m, t0, |_| true)
}

/// The two block-diagonal halves of [`single_particle_kinetic`]: bonds
/// (1,2), (3,4), … and bonds (2,3), (4,5), ….
pub fn kinetic_split(m: usize, t0: f64) -> (DenseMatrix, DenseMatrix) {
    (kinetic_on_bonds(m, t0, |x| x % 2 == 1), kinetic_on_bonds(m, t0, |x| x % 2 == 0))
}

fn kinetic_on_bonds(m: usize, t0: f64, keep: impl Fn(usize) -> bool) -> DenseMatrix {
    let mut t = DenseMatrix::zeros(2 * m, 2 * m);
    for x in 1..m {
        if !keep(x) {
            continue;
        }
        for s in 0..2 {
            let (a, b) = (2 * (x - 1) + s, 2 * x + s);
            t[(a, b)] = C64::new(t0, 0.0);
            t[(b, a)] = C64::new(t0, 0.0);
        }
    }
    t
}

/// H = Σ_k T_k + V0·Σ_{k<l} δ(x_k, x_l)·(1 − δ(σ_k, σ_l)).
pub fn build_fq_hamiltonian(layout: &FirstQuantizedLayout, params: &HubbardParams) -> Result<DenseMatrix> {
    let d = dim(layout)?;
    let (n, base) = (layout.particles(), layout.num_labels());
    let t = single_particle_kinetic(layout.sites(), params.t0);
    let mut h = DenseMatrix::zeros(d, d);
    for col in 0..d {
        let labels = digits(col, base, n);
        let mut pot = 0.0;
        for k in 0..n {
            for l in k + 1..n {
                if labels[k] / 2 == labels[l] / 2 && labels[k] % 2 != labels[l] % 2 {
                    pot += params.v0;
                }
            }
        }
        h[(col, col)] += C64::new(pot, 0.0);
        for k in 0..n {
            for target in 0..base {
                let amp = t[(target, labels[k])];
                if amp != C64::new(0.0, 0.0) {
                    let mut moved = labels.clone();
                    moved[k] = target;
                    h[(undigits(&moved, base), col)] += amp;
                }
            }
        }
    }
    Ok(h)
}

/// Permutation matrix exchanging particles `i` and `j`.
pub fn transposition_matrix(layout: &FirstQuantizedLayout, i: usize, j: usize) -> Result<DenseMatrix> {
    let d = dim(layout)?;
    let (n, base) = (layout.particles(), layout.num_labels());
    if i >= n || j >= n {
        return Err(Error::invalid(format!("particle index out of range (n = {n})")));
    }
    let mut p = DenseMatrix::zeros(d, d);
    for col in 0..d {
        let mut labels = digits(col, base, n);
        labels.swap(i, j);
        p[(undigits(&labels, base), col)] = C64::new(1.0, 0.0);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::super::{expm_propagate, hermiticity_defect, state_to_vector, HermitianEigen};
    use super::*;
    use crate::fq::evolve_kinetic_particle;
    use crate::lattice::Spin;
    use crate::state::{Backend, QuantumState};

    fn max_entry(m: &DenseMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn one_particle_is_tridiagonal_per_spin() {
        let l = FirstQuantizedLayout::new(1, 4).unwrap();
        let h = build_fq_hamiltonian(&l, &HubbardParams::new(5.0, 0.8).unwrap()).unwrap();
        for s in 0..2 {
            for x in 0..4 {
                for y in 0..4 {
                    let v = h[(2 * x + s, 2 * y + s)];
                    let expect = if x.abs_diff(y) == 1 { 0.8 } else { 0.0 };
                    assert_eq!(v, C64::new(expect, 0.0));
                }
                assert_eq!(h[(2 * x + s, 2 * x + 1 - s)], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn non_interacting_pair_is_kronecker_sum() {
        let l = FirstQuantizedLayout::new(2, 2).unwrap();
        let h = build_fq_hamiltonian(&l, &HubbardParams::new(0.0, 1.1).unwrap()).unwrap();
        let t = single_particle_kinetic(2, 1.1);
        let id = DenseMatrix::identity(4, 4);
        assert_eq!(h, t.kronecker(&id) + id.kronecker(&t));
    }

    #[test]
    fn on_site_opposite_spin_diagonal() {
        let l = FirstQuantizedLayout::new(2, 4).unwrap();
        let h = build_fq_hamiltonian(&l, &HubbardParams::new(2.5, 1.0).unwrap()).unwrap();
        let base = l.num_labels();
        for x in 0..4 {
            let (up, down) = (2 * x, 2 * x + 1);
            assert_eq!(h[(up + base * down, up + base * down)], C64::new(2.5, 0.0));
            assert_eq!(h[(up + base * up, up + base * up)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn hermitian_and_exchange_symmetric() {
        let l = FirstQuantizedLayout::new(3, 2).unwrap();
        let h = build_fq_hamiltonian(&l, &HubbardParams::new(3.0, 0.7).unwrap()).unwrap();
        assert!(hermiticity_defect(&h) < 1e-14);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let p = transposition_matrix(&l, i, j).unwrap();
            assert!(max_entry(&(&h * &p - &p * &h)) < 1e-13);
        }
    }

    #[test]
    fn too_large_rejected() {
        let l = FirstQuantizedLayout::new(3, 32).unwrap();
        assert!(matches!(
            build_fq_hamiltonian(&l, &HubbardParams::new(1.0, 1.0).unwrap()),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn split_halves_sum_to_chain() {
        for m in [2, 4, 8] {
            let (t1, t2) = kinetic_split(m, 0.9);
            assert_eq!(t1 + t2, single_particle_kinetic(m, 0.9));
        }
    }

    #[test]
    fn kinetic_circuit_matches_split_propagators() {
        // the relabel-and-rotate circuit must equal exp(−i dt T2)·exp(−i dt T1)
        let dt = 0.41;
        for m in [2, 4, 8] {
            let l = FirstQuantizedLayout::new(1, m).unwrap();
            let (t1, t2) = kinetic_split(m, 1.3);
            let p = HubbardParams::new(0.0, 1.3).unwrap();
            for x in 1..=m {
                for spin in Spin::BOTH {
                    let b = l.encode_labels(&[l.label(x, spin).unwrap()]).unwrap();
                    let mut s = QuantumState::basis(l.register_layout(), b, Backend::Sparse).unwrap();
                    let v0 = state_to_vector(&s).unwrap();
                    evolve_kinetic_particle(&mut s, &l, 0, &p, dt).unwrap();
                    let expect = expm_propagate(&t2, dt, &expm_propagate(&t1, dt, &v0).unwrap()).unwrap();
                    let got = state_to_vector(&s).unwrap();
                    assert!((got - expect).camax() < 1e-12, "m = {m}, x = {x}");
                }
            }
        }
    }

    #[test]
    fn single_particle_spectrum_is_cosine_band() {
        let m = 8;
        let e = HermitianEigen::new(&single_particle_kinetic(m, 1.0)).unwrap().sorted_values();
        let mut expect: Vec<f64> = (1..=m)
            .flat_map(|k| {
                let v = 2.0 * (std::f64::consts::PI * k as f64 / (m as f64 + 1.0)).cos();
                [v, v]
            })
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
