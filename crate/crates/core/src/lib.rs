//! Bell-diagonal entanglement witnesses.
//!
//! Witnesses of the form `W = r I/D + (1-r) sum_k q_k |psi_k><psi_k|` over a
//! generalized Bell basis. The critical parameter `r_c` follows from the
//! minimum of `C(gamma) = sum_k q_k |<gamma|psi_k>|^2` over product states,
//! obtained exactly by linear programming and checked by a numeric oracle.

pub mod bell;
pub mod choi;
pub mod error;
pub mod lp;
pub mod product;
pub mod rational;
pub mod region;
pub mod spectral;
pub mod tensor;
pub mod witness;

pub use error::{Error, Result};
