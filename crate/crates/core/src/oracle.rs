//! Independent unrefined (Chekhov-Eynard-Orantin) recursion, used as the
//! `Q = 0` oracle. Deliberately a second implementation: it rebuilds its own
//! unstable differentials and recursion sum from the curve data and touches
//! only `Flavor::Unrefined` store entries, sharing nothing with the refined
//! evaluation path beyond the exact-arithmetic substrate.
//!
//! The integrand is written in the same conventions as the refined engine
//! (`omega02 = -B(p0, sigma(p1))`, cross terms included), where it is
//! sigma-invariant; the contour difference then collapses to residues at the
//! effective ramification points with an overall minus sign fixed by the
//! unrefined linear loop equation.

use std::sync::Arc;

use crate::algebra::num::rat_int;
use crate::algebra::residue::residue_at;
use crate::algebra::{Point, RatFunc, Var, INTEG};
use crate::diff::{certify, Flavor, MultiDiff};
use crate::recursion::{EngineError, RecursionStore};

fn z(i: u16) -> Var {
    Var::Z(i)
}

/// Oracle's own `omega_{0,1} = (1/2) Delta y dx` at the variable `v`.
fn eo_omega01(store: &RecursionStore, v: Var) -> RatFunc {
    let c = &store.curve;
    let y_sig = c
        .y
        .subst(z(0), &c.sigma)
        .expect("sigma substitution")
        .remap(|w| if w == z(0) { v } else { w });
    let y_v = c.y.remap(|w| if w == z(0) { v } else { w });
    let dx_v = c.x.derivative(z(0)).remap(|w| if w == z(0) { v } else { w });
    (&(&y_v - &y_sig) * &dx_v).scale(&crate::algebra::rat(1, 2))
}

/// Oracle's own `omega_{0,2}(a, b) = -B(a, sigma(b))`.
fn eo_omega02(store: &RecursionStore, a: Var, b: Var) -> RatFunc {
    let sig_b = store.curve.sigma.remap(|w| if w == z(0) { b } else { w });
    let diff = &RatFunc::var(a) - &sig_b;
    -&(&sig_b.derivative(b) / &(&diff * &diff))
}

fn eo_expr_at(
    store: &RecursionStore,
    two_g: u32,
    arity: u32,
    slots: &[Var],
) -> Result<RatFunc, EngineError> {
    if (two_g, arity) == (0, 1) {
        return Ok(eo_omega01(store, slots[0]));
    }
    if (two_g, arity) == (0, 2) {
        return Ok(eo_omega02(store, slots[0], slots[1]));
    }
    let d = oracle_omega(store, two_g, arity)?;
    let injective = slots
        .iter()
        .enumerate()
        .all(|(i, v)| slots[..i].iter().all(|w| w != v));
    let map = |v: Var| -> Var {
        match v {
            Var::Z(i) if (i as usize) < slots.len() => slots[i as usize],
            other => other,
        }
    };
    if injective {
        Ok(d.expr.remap_injective(map))
    } else {
        Ok(d.expr.remap(map))
    }
}

fn subsets(items: &[Var]) -> Vec<(Vec<Var>, Vec<Var>)> {
    let n = items.len();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u32..(1 << n) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, &v) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a.push(v);
            } else {
                b.push(v);
            }
        }
        out.push((a, b));
    }
    out
}

/// The unrefined recursion numerator at `Q = 0`.
fn eo_rec(
    store: &RecursionStore,
    two_g: u32,
    arity: u32,
    p: Var,
    j_vars: &[Var],
) -> Result<RatFunc, EngineError> {
    let mut total = RatFunc::zero();
    for two_g1 in (0..=two_g).step_by(2) {
        let two_g2 = two_g - two_g1;
        for (j1, j2) in subsets(j_vars) {
            if two_g1 == 0 && j1.is_empty() || two_g2 == 0 && j2.is_empty() {
                continue;
            }
            let mut s1 = vec![p];
            s1.extend(&j1);
            let mut s2 = vec![p];
            s2.extend(&j2);
            let a = eo_expr_at(store, two_g1, j1.len() as u32 + 1, &s1)?;
            if a.is_zero() {
                continue;
            }
            let b = eo_expr_at(store, two_g2, j2.len() as u32 + 1, &s2)?;
            total = &total + &(&a * &b);
        }
    }
    if !j_vars.is_empty() {
        let xp = store.curve.x_at(p);
        let dxp = store.curve.dx_at(p);
        for (ti, &t) in j_vars.iter().enumerate() {
            let rest: Vec<Var> = j_vars
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != ti)
                .map(|(_, &v)| v)
                .collect();
            let mut slots = vec![p];
            slots.extend(&rest);
            let w = eo_expr_at(store, two_g, rest.len() as u32 + 1, &slots)?;
            if w.is_zero() {
                continue;
            }
            let xt = store.curve.x_at(t);
            let dxt = store.curve.dx_at(t);
            let dxx = &xp - &xt;
            total = &total + &(&(&(&dxp * &dxt) / &(&dxx * &dxx)) * &w);
        }
    }
    if two_g >= 2 {
        let mut slots = vec![p, p];
        slots.extend(j_vars);
        let diag = eo_expr_at(store, two_g - 2, arity + 1, &slots)?;
        total = &total + &diag;
    }
    Ok(total)
}

/// `omega^EO_{g,n+1}(z0,J) = - sum_{r in R*} Res_{p=r}
/// eta^p(z0)/(4 omega01(p)) Rec^EO(p, J)`, memoized under
/// `Flavor::Unrefined`. Only integer genus is nonzero.
pub fn oracle_omega(
    store: &RecursionStore,
    two_g: u32,
    arity: u32,
) -> Result<Arc<MultiDiff>, EngineError> {
    assert!(two_g % 2 == 0, "the unrefined recursion has integer genus only");
    if let Some(d) = store.get(two_g, arity, Flavor::Unrefined) {
        return Ok(d);
    }
    if (two_g, arity) == (0, 1) || (two_g, arity) == (0, 2) {
        let expr = if arity == 1 {
            eo_omega01(store, z(0))
        } else {
            eo_omega02(store, z(0), z(1))
        };
        return Ok(store.insert(MultiDiff {
            two_g,
            arity,
            flavor: Flavor::Unrefined,
            expr,
            pole_locus: Vec::new(),
        }));
    }

    let j_vars: Vec<Var> = (1..arity).map(|i| z(i as u16)).collect();
    let rec = eo_rec(store, two_g, arity, INTEG, &j_vars)?;

    // eta^p(z0) rebuilt in place.
    let sig_p = store.curve.sigma_at(INTEG);
    let z0 = RatFunc::var(z(0));
    let eta = &(&z0 - &RatFunc::var(INTEG)).recip().unwrap() - &(&z0 - &sig_p).recip().unwrap();

    let integrand = &(&eta * &rec) / &eo_omega01(store, INTEG).scale(&rat_int(4));
    let mut expr = RatFunc::zero();
    for r in &store.ram.effective {
        expr = &expr - &residue_at(&integrand, INTEG, r)?;
    }

    let locus = certify(&store.curve, &store.ram, Flavor::Unrefined, two_g, arity, &expr)
        .map_err(|what| EngineError::InvariantViolation {
            two_g,
            arity,
            flavor: Flavor::Unrefined,
            what,
        })?;
    Ok(store.insert(MultiDiff {
        two_g,
        arity,
        flavor: Flavor::Unrefined,
        expr,
        pole_locus: locus,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testcurves::{airy_store, expr_z};
    use num_traits::Zero;

    #[test]
    fn airy_oracle_omega_1_1_is_a_fourth_order_pole() {
        let store = airy_store();
        let w = oracle_omega(&store, 2, 1).unwrap();
        // A nonzero rational multiple of dz0/z0^4.
        let m = &w.expr * &RatFunc::var(Var::Z(0)).pow(4).unwrap();
        let c = m.as_constant().expect("pure fourth-order pole");
        assert!(!c.is_zero());
    }

    #[test]
    fn airy_oracle_omega_0_3() {
        // Hand computation: the kernel is 1/(4p(z0^2-p^2)), Rec(0) =
        // 2/(z1^2 z2^2), the cross terms are regular at p = 0, so the residue
        // is 1/(2 z0^2 z1^2 z2^2) and the contour collapse contributes the
        // overall minus (fixed by holomorphy of R at the branch point).
        let store = airy_store();
        let w = oracle_omega(&store, 0, 3).unwrap();
        assert_eq!(w.expr, expr_z("-1/(2*z0^2*z1^2*z2^2)"));
    }
}
