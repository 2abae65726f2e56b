//! The Q-top recursion: the self-closed recursion for the top
//! `Q`-coefficients `w_{g,n+1}^(2g)`, stored under `Flavor::QTop` with the
//! `Q` symbol stripped.
//!
//! Its recursion numerator has no diagonal `omega_{g-1,n+2}` term, which
//! makes the `(g,1)` tower recursive in `g` alone.

use std::sync::Arc;

use crate::diff::{Flavor, MultiDiff};
use crate::recursion::{compute_alt_by_flavor, compute_by_residues, EngineError, RecursionStore};
use crate::validator::CheckReport;

/// Evaluate the Q-top recursion for one entry (dependencies on demand).
pub fn compute_qtop(
    store: &RecursionStore,
    two_g: u32,
    arity: u32,
) -> Result<Arc<MultiDiff>, EngineError> {
    compute_by_residues(store, two_g, arity, Flavor::QTop)
}

/// Same entry through recursion 2; must agree exactly.
pub fn compute_qtop_alt(
    store: &RecursionStore,
    two_g: u32,
    arity: u32,
) -> Result<Arc<MultiDiff>, EngineError> {
    compute_alt_by_flavor(store, two_g, arity, Flavor::QTop)
}

/// `varpi_{g,n+1} = [Q^{2g}] omega_{g,n+1}`, exactly.
pub fn check_qtop_consistency(
    store: &RecursionStore,
    two_g: u32,
    arity: u32,
) -> Result<CheckReport, EngineError> {
    let full = store.omega(two_g, arity, Flavor::Full)?;
    let qtop = store.omega(two_g, arity, Flavor::QTop)?;
    let top_of_full = full.q_coefficient(two_g);
    let residual = &top_of_full - &qtop.expr;
    Ok(CheckReport::on_identity(
        "qtop-consistency",
        two_g,
        arity,
        residual,
    ))
}
