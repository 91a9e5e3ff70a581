//! 2×2 complex matrices used as single-qubit and two-level operators.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

/// Default tolerance for unitarity checks on 2×2 matrices.
pub const UNITARY_TOL: f64 = 1e-12;

/// A 2×2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2(pub [[C64; 2]; 2]);

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Gate2 {
    pub fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Gate2([[m00, m01], [m10, m11]])
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn pauli_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn pauli_z() -> Self {
        Self::new(ONE, ZERO, ZERO, -ONE)
    }

    pub fn hadamard() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self::new(h, h, h, -h)
    }

    /// diag(1, e^{iθ}).
    pub fn phase(theta: f64) -> Self {
        Self::new(ONE, ZERO, ZERO, C64::from_polar(1.0, theta))
    }

    /// exp(−iθσx) = cos θ · I − i sin θ · σx.
    pub fn exp_sigma_x(theta: f64) -> Self {
        let c = C64::new(theta.cos(), 0.0);
        let s = C64::new(0.0, -theta.sin());
        Self::new(c, s, s, c)
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    /// Largest entry-wise deviation of U†U from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.dagger() * *self;
        let id = Self::identity();
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((p.0[r][c] - id.0[r][c]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    #[inline]
    pub fn apply(&self, a0: C64, a1: C64) -> (C64, C64) {
        let m = &self.0;
        (m[0][0] * a0 + m[0][1] * a1, m[1][0] * a0 + m[1][1] * a1)
    }
}

impl Mul for Gate2 {
    type Output = Gate2;

    fn mul(self, rhs: Gate2) -> Gate2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Gate2(out)
    }
}
