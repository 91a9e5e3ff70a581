//! Statevector simulation of the Hubbard model in both the occupation
//! (second-quantized) and particle-register (first-quantized) encodings,
//! with a reversible antisymmetrizer for preparing fermionic inputs and
//! dense classical references for checking all of it.
//!
//! ```
//! use fermisim::{Backend, HubbardParams, LatticeSpec, ModeLayout, QuantumState, Spin, TrotterPlan};
//!
//! let lattice = LatticeSpec::chain(2)?;
//! let modes = ModeLayout::for_lattice(&lattice)?;
//! let b = modes.encode_occupation(&[(1, Spin::Up), (2, Spin::Down)])?;
//! let mut psi = QuantumState::basis(modes.register_layout(), b, Backend::Sparse)?;
//! let params = HubbardParams::new(4.0, 1.0)?;
//! fermisim::sq::trotter_evolve(&mut psi, &lattice, &params, &TrotterPlan::new(1.0, 64)?)?;
//! assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
//! # Ok::<(), fermisim::Error>(())
//! ```

pub mod antisym;
pub mod error;
pub mod fq;
pub mod gate;
pub mod lattice;
pub mod layout;
pub mod observables;
pub mod oracle;
mod qft;
pub mod sq;
pub mod state;
pub mod validate;

pub use antisym::{AntisymLayout, Statistics};
pub use error::{Error, Result};
pub use fq::FirstQuantizedLayout;
pub use gate::Gate2;
pub use lattice::{HubbardParams, LatticeSpec, OpCount, Spin, TrotterPlan};
pub use layout::{BasisString, QuWords, Register, RegisterLayout};
pub use observables::{Model, SamplingPlan};
pub use sq::ModeLayout;
pub use state::{Backend, QuantumState, RngSeed};

// The guide's listings run as doctests. One module per chapter keeps
// failures traceable to their page.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/statevector.md")]
    mod statevector {}
    #[doc = include_str!("../../../book/src/second-quantized.md")]
    mod second_quantized {}
    #[doc = include_str!("../../../book/src/antisymmetrizer.md")]
    mod antisymmetrizer {}
    #[doc = include_str!("../../../book/src/first-quantized.md")]
    mod first_quantized {}
    #[doc = include_str!("../../../book/src/observables.md")]
    mod observables {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
