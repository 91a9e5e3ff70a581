//! Quantum Fourier transform on a named register, built from Hadamards,
//! controlled phases and a final bit reversal.

use crate::error::Result;
use crate::gate::Gate2;
use crate::state::QuantumState;
use std::f64::consts::PI;

impl QuantumState {
    /// |x⟩ ↦ 2^{−b/2} Σ_k e^{2πi·kx/2^b} |k⟩ on the `b` qubits of `register`,
    /// independently for every setting of the other qubits.
    pub fn qft_register(&mut self, register: &str) -> Result<()> {
        let qubits = self.layout().register(register)?.qubits().to_vec();
        let b = qubits.len();
        for j in (0..b).rev() {
            self.apply_single_qubit_unitary(qubits[j], &Gate2::hadamard())?;
            for l in (0..j).rev() {
                let angle = 2.0 * PI / f64::from(1u32 << (j - l + 1));
                self.apply_controlled_unitary(&[(qubits[l], true)], qubits[j], &Gate2::phase(angle))?;
            }
        }
        let reg = self.layout().register(register)?.clone();
        self.apply_basis_permutation(|s| {
            let v = reg.read(s);
            let reversed = (0..b).fold(0, |acc, i| acc | (((v >> i) & 1) << (b - 1 - i)));
            reg.write(s, reversed)
        })
    }
}
