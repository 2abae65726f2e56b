//! Exact refined topological recursion on genus-zero hyperelliptic spectral
//! curves: multidifferentials, loop-equation certification, the Q-top
//! recursion, quantum curves, and free energies, all over exact rational
//! arithmetic.

pub mod algebra;
pub mod cache;
pub mod curve;
pub mod diff;
pub mod energy;
pub mod oracle;
pub mod qtop;
pub mod recursion;
pub mod validator;
pub mod wkb;

#[cfg(test)]
pub(crate) mod testcurves;
