//! Heisenberg-Lorentz quantum group at desk scale: exact symbolic engine for
//! the generator relations and Hopf structure, plus a numerical operator
//! laboratory for truncated Fock-space representations, smearing kernels,
//! and the tensor-product comultiplication.

pub mod config;
pub mod heisen;
pub mod hlrep;
pub mod hopf;
pub mod kernels;
pub mod linalg;
pub mod ncalg;
pub mod par;
pub mod parse;
pub mod quad;
pub mod report;
pub mod scalar;
pub mod slpoly;
pub mod tensor;
pub mod zcalc;
