//! Second-quantized operators in the Jordan-Wigner tensor form
//! a_ℓ = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ I ⊗ … ⊗ I, with the Z string on modes below ℓ.

use super::{DenseMatrix, MAX_SQ_MODES};
use crate::error::{Error, Result};
use crate::lattice::{HubbardParams, LatticeSpec, Spin};
use crate::sq::ModeLayout;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

impl Ladder {
    fn mode(self) -> usize {
        match self {
            Ladder::Create(l) | Ladder::Annihilate(l) => l,
        }
    }

    fn dagger(self) -> Self {
        match self {
            Ladder::Create(l) => Ladder::Annihilate(l),
            Ladder::Annihilate(l) => Ladder::Create(l),
        }
    }

    /// Acts on a basis string one tensor factor at a time.
    fn act(self, b: u64, modes: usize) -> Option<(f64, u64)> {
        let l = self.mode();
        let mut sign = 1.0;
        let mut out = b;
        for k in 0..modes {
            let occupied = (b >> k) & 1 == 1;
            if k < l {
                // Z
                if occupied {
                    sign = -sign;
                }
            } else if k == l {
                match (self, occupied) {
                    (Ladder::Annihilate(_), true) | (Ladder::Create(_), false) => out ^= 1 << k,
                    _ => return None,
                }
            }
        }
        Some((sign, out))
    }
}

/// Linear combination of ladder-operator products on a fixed number of
/// modes. In each product the rightmost operator acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionOp {
    modes: usize,
    terms: Vec<(C64, Vec<Ladder>)>,
}

impl FermionOp {
    pub fn new(modes: usize) -> Self {
        FermionOp { modes, terms: Vec::new() }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn add_term(&mut self, coef: C64, product: Vec<Ladder>) -> Result<()> {
        if let Some(op) = product.iter().find(|op| op.mode() >= self.modes) {
            return Err(Error::invalid(format!("mode {} outside 0..{}", op.mode(), self.modes)));
        }
        self.terms.push((coef, product));
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, p)| (c.conj(), p.iter().rev().map(|op| op.dagger()).collect()))
            .collect();
        FermionOp { modes: self.modes, terms }
    }

    /// Column `b` of the operator as (row, value) pairs.
    pub fn apply_basis(&self, b: u64) -> Vec<(u64, C64)> {
        let mut out = Vec::new();
        'terms: for (coef, product) in &self.terms {
            let mut state = b;
            let mut sign = 1.0;
            for op in product.iter().rev() {
                match op.act(state, self.modes) {
                    Some((s, next)) => {
                        sign *= s;
                        state = next;
                    }
                    None => continue 'terms,
                }
            }
            out.push((state, coef * sign));
        }
        out
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        if self.modes > MAX_SQ_MODES {
            return Err(Error::TooLarge(format!("{} modes (dense limit {MAX_SQ_MODES})", self.modes)));
        }
        let d = 1usize << self.modes;
        let mut m = DenseMatrix::zeros(d, d);
        for col in 0..d {
            for (row, v) in self.apply_basis(col as u64) {
                m[(row as usize, col)] += v;
            }
        }
        Ok(m)
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes > MAX_SQ_MODES {
        return Err(Error::TooLarge(format!("{modes} modes (dense limit {MAX_SQ_MODES})")));
    }
    Ok(())
}

/// a_ℓ as an explicit Kronecker product of 2×2 factors.
pub fn annihilation(mode: usize, modes: usize) -> Result<DenseMatrix> {
    check_modes(modes)?;
    if mode >= modes {
        return Err(Error::invalid(format!("mode {mode} outside 0..{modes}")));
    }
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let id = DenseMatrix::identity(2, 2);
    let z = DenseMatrix::from_row_slice(2, 2, &[l, o, o, -l]);
    let lower = DenseMatrix::from_row_slice(2, 2, &[o, l, o, o]);
    // the leftmost factor is the most significant bit
    let mut acc = DenseMatrix::identity(1, 1);
    for k in (0..modes).rev() {
        let f = match k.cmp(&mode) {
            std::cmp::Ordering::Greater => &id,
            std::cmp::Ordering::Equal => &lower,
            std::cmp::Ordering::Less => &z,
        };
        acc = acc.kronecker(f);
    }
    Ok(acc)
}

/// n_ℓ = a_ℓ† a_ℓ.
pub fn number_operator(mode: usize, modes: usize) -> Result<DenseMatrix> {
    let a = annihilation(mode, modes)?;
    Ok(a.adjoint() * a)
}

fn hop(op: &mut FermionOp, t0: f64, a: usize, c: usize) -> Result<()> {
    let t = C64::new(t0, 0.0);
    op.add_term(t, vec![Ladder::Create(c), Ladder::Annihilate(a)])?;
    op.add_term(t, vec![Ladder::Create(a), Ladder::Annihilate(c)])
}

/// H = t0·Σ_{⟨i,j⟩,σ} (c†_{iσ} c_{jσ} + h.c.) + V0·Σ_i n_{i↑} n_{i↓}.
pub fn hubbard_operator(lattice: &LatticeSpec, params: &HubbardParams) -> Result<FermionOp> {
    let modes = ModeLayout::for_lattice(lattice)?;
    let mut op = FermionOp::new(modes.num_modes());
    for s in 1..=lattice.sites() {
        let (u, d) = (modes.mode(s, Spin::Up)?, modes.mode(s, Spin::Down)?);
        op.add_term(
            C64::new(params.v0, 0.0),
            vec![Ladder::Create(u), Ladder::Annihilate(u), Ladder::Create(d), Ladder::Annihilate(d)],
        )?;
    }
    for &(i, j) in lattice.edges() {
        for spin in Spin::BOTH {
            hop(&mut op, params.t0, modes.mode(i, spin)?, modes.mode(j, spin)?)?;
        }
    }
    Ok(op)
}

pub fn build_sq_hamiltonian(lattice: &LatticeSpec, params: &HubbardParams) -> Result<DenseMatrix> {
    check_modes(2 * lattice.sites())?;
    hubbard_operator(lattice, params)?.to_dense()
}

/// t0·(c†_{bσ} c_{aσ} + h.c.) for one neighbor pair.
pub fn hopping_term_matrix(lattice: &LatticeSpec, site_a: usize, site_b: usize, spin: Spin, t0: f64) -> Result<DenseMatrix> {
    if !lattice.are_adjacent(site_a, site_b) {
        return Err(Error::invalid(format!("sites {site_a} and {site_b} are not neighbors")));
    }
    let modes = ModeLayout::for_lattice(lattice)?;
    check_modes(modes.num_modes())?;
    let mut op = FermionOp::new(modes.num_modes());
    hop(&mut op, t0, modes.mode(site_a, spin)?, modes.mode(site_b, spin)?)?;
    op.to_dense()
}
