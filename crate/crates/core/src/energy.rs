//! Primitive pairings, the dilaton equation, and free energies.
//!
//! The primitive `phi` of `omega_{0,1}` (and the optional shift
//! `U(x) = alpha log x`) are never materialized: only their pairing residues
//! against residue-free differentials exist, realized by parts as
//! `Res_r phi omega = -Res_r I_r[omega] omega_{0,1}` with `I_r` the local
//! antiderivative germ. Everything stays inside rational arithmetic.

use crate::algebra::num::{rat_int, Rat};
use crate::algebra::residue::{diff_valuation, local_antiderivative, residue_at};
use crate::algebra::{AlgebraError, Point, RatFunc, Var, INTEG};
use crate::diff::{Flavor, PoleSite};
use crate::recursion::{EngineError, RecursionStore};
use crate::validator::CheckReport;

/// The primitive data: `phi` is implicit; `u_alpha` switches on the shift
/// `U(x) = alpha log x` with the given coefficient (rational or a parameter).
#[derive(Clone, Debug, Default)]
pub struct PrimitiveSpec {
    pub u_alpha: Option<RatFunc>,
}

impl PrimitiveSpec {
    pub fn plain() -> PrimitiveSpec {
        PrimitiveSpec { u_alpha: None }
    }

    pub fn with_log_shift(alpha: RatFunc) -> PrimitiveSpec {
        PrimitiveSpec { u_alpha: Some(alpha) }
    }
}

/// `(1/2pi i) oint phi(p) omega(p)` over a contour enclosing exactly `poles`,
/// computed by parts. `omega` is the coefficient of `dp` in the integration
/// variable `p = INTEG`; spectator variables ride along.
///
/// Preconditions checked here: `omega` is residue-free at every listed pole,
/// and neither `omega_{0,1}` nor `dU` is singular there (a pole of
/// `omega_{0,1}` or a zero/pole of `x` would make the primitive multivalued).
pub fn pairing_with_primitive(
    store: &RecursionStore,
    omega: &RatFunc,
    poles: &[Point],
    spec: &PrimitiveSpec,
) -> Result<RatFunc, EngineError> {
    let curve = &store.curve;
    let omega01_p = store
        .unstable
        .omega01
        .remap_injective(|v| if v == Var::Z(0) { INTEG } else { v });
    // dU = alpha dx / x in the integration variable.
    let du = match &spec.u_alpha {
        None => None,
        Some(alpha) => {
            let xp = curve.x_at(INTEG);
            let dxp = curve.dx_at(INTEG);
            Some(alpha * &(&dxp / &xp))
        }
    };

    let mut total = RatFunc::zero();
    for pole in poles {
        let res = residue_at(omega, INTEG, pole)?;
        if !res.is_zero() {
            return Err(EngineError::Algebra(AlgebraError::NoRationalPrimitive(
                format!("residue {res} present at pairing pole {pole}"),
            )));
        }
        for lambda in std::iter::once(&omega01_p).chain(du.as_ref()) {
            if let Some(v) = diff_valuation(lambda, INTEG, pole) {
                if v < 0 {
                    return Err(EngineError::BadRequest(format!(
                        "pairing contour may not enclose {pole}: the primitive is singular there"
                    )));
                }
            }
        }
        // Res phi omega = -Res I[omega] omega01, and likewise for U.
        let germ = local_antiderivative(omega, INTEG, pole, -1)?;
        if germ.is_zero() {
            continue;
        }
        let mut contribution = -&residue_at(&(&germ * &omega01_p), INTEG, pole)?;
        if let Some(du) = &du {
            contribution = &contribution - &residue_at(&(&germ * du), INTEG, pole)?;
        }
        total = &total + &contribution;
    }
    Ok(total)
}

/// The pairing pole set of an entry in its first slot: the certified locus
/// with the spectators shifted down one slot (stored `z_{j}` becomes the
/// spectator `z_{j-1}`).
fn pairing_poles(store: &RecursionStore, locus: &[(PoleSite, u32)]) -> Vec<Point> {
    let mut out = Vec::new();
    for (site, _) in locus {
        let pt = match site {
            PoleSite::At(p) => p.clone(),
            PoleSite::SigmaOfVar(j) => {
                let down = Var::Z((*j - 1) as u16);
                store
                    .curve
                    .sigma_point(&Point::Finite(RatFunc::var(down)))
                    .expect("sigma of a spectator variable")
            }
        };
        if !out.contains(&pt) {
            out.push(pt);
        }
    }
    out
}

/// The stored `omega_{g,n+2}` arranged for pairing in its first slot:
/// slot 0 becomes the integration variable, the spectators become
/// `z0..z_n`. Returns the expression and its pairing poles.
fn arranged_for_pairing(
    store: &RecursionStore,
    two_g: u32,
    arity: u32,
) -> Result<(RatFunc, Vec<Point>), EngineError> {
    let d = store.omega(two_g, arity, Flavor::Full)?;
    let expr = d.expr.remap_injective(|v| match v {
        Var::Z(0) => INTEG,
        Var::Z(i) => Var::Z(i - 1),
        other => other,
    });
    let poles = pairing_poles(store, &d.pole_locus[0]);
    Ok((expr, poles))
}

/// The dilaton equation `(2 - 2g - n - 1) omega_{g,n+1}(z0,..) =
/// (1/2pi i) oint phi omega_{g,n+2}`, checked exactly. The labels follow the
/// identity: `n` counts the spectator variables of the left-hand side.
pub fn check_dilaton(
    store: &RecursionStore,
    two_g: u32,
    n: u32,
    spec: &PrimitiveSpec,
) -> Result<CheckReport, EngineError> {
    let name = if spec.u_alpha.is_some() { "dilaton-shifted" } else { "dilaton" };
    let (rhs_expr, rhs_poles) = arranged_for_pairing(store, two_g, n + 2)?;
    let rhs = pairing_with_primitive(store, &rhs_expr, &rhs_poles, spec)?;
    // 2 - 2g - n - 1 with two_g = 2g.
    let coeff = Rat::from_integer((1 - n as i64 - two_g as i64).into());
    let lhs = store.omega(two_g, n + 1, Flavor::Full)?.expr.scale(&coeff);
    Ok(CheckReport::on_identity(name, two_g, n + 1, &lhs - &rhs))
}

/// `F_g = omega_{g,0} = (1/(2-2g)) (1/2pi i) oint phi omega_{g,1}` for
/// `g > 1` (integer or half-integer). With the log shift the same pairing
/// defines the modified free energy.
pub fn free_energy(
    store: &RecursionStore,
    two_g: u32,
    spec: &PrimitiveSpec,
) -> Result<RatFunc, EngineError> {
    if two_g <= 2 {
        return Err(EngineError::BadRequest(
            "free energy is defined for g > 1 (F_0, F_1/2, F_1 are out of scope)".into(),
        ));
    }
    let (expr, poles) = arranged_for_pairing(store, two_g, 1)?;
    let paired = pairing_with_primitive(store, &expr, &poles, spec)?;
    Ok(paired.scale(&Rat::new(1.into(), (2 - two_g as i64).into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::rat;
    use crate::testcurves::{airy_store, appendix_store};

    #[test]
    fn pairing_with_omega02_returns_omega01() {
        // oint phi(p) omega_{0,2}(p, z0) over sigma(z0) = omega_{0,1}(z0),
        // on both test curves.
        for store in [airy_store(), appendix_store(rat(2, 3), rat_int(3), None)] {
            let (expr, _) = arranged_for_pairing(&store, 0, 2).unwrap();
            let pole = store
                .curve
                .sigma_point(&Point::Finite(RatFunc::var(Var::Z(0))))
                .unwrap();
            let got =
                pairing_with_primitive(&store, &expr, &[pole], &PrimitiveSpec::plain()).unwrap();
            assert_eq!(got, store.unstable.omega01);
        }
    }

    #[test]
    fn pairing_with_omega03_vanishes() {
        let store = airy_store();
        let (expr, poles) = arranged_for_pairing(&store, 0, 3).unwrap();
        let got = pairing_with_primitive(&store, &expr, &poles, &PrimitiveSpec::plain()).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn empty_pole_list_pairs_to_zero() {
        let store = airy_store();
        let (expr, _) = arranged_for_pairing(&store, 0, 2).unwrap();
        let got = pairing_with_primitive(&store, &expr, &[], &PrimitiveSpec::plain()).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn unstable_dilaton_instances() {
        let store = airy_store();
        // (g,n) = (0,0): omega_{0,1} = oint phi omega_{0,2}, the nonzero case.
        let r = check_dilaton(&store, 0, 0, &PrimitiveSpec::plain()).unwrap();
        assert!(r.pass, "{r}");
        // (0,1): 0 * omega_{0,2} = oint phi omega_{0,3}.
        let r = check_dilaton(&store, 0, 1, &PrimitiveSpec::plain()).unwrap();
        assert!(r.pass, "{r}");
        // (1/2, 0): 0 = oint phi omega_{1/2,2}.
        let r = check_dilaton(&store, 1, 0, &PrimitiveSpec::plain()).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn stable_dilaton_1_0_airy() {
        // Coefficient (2 - 2 - 0 - 1) = -1 against omega_{1,1}.
        let store = airy_store();
        let r = check_dilaton(&store, 2, 0, &PrimitiveSpec::plain()).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn primitive_shift_by_constant_is_invisible() {
        // Adding a symbolic constant to the germ changes nothing because the
        // paired differential is residue-free.
        let store = airy_store();
        let (expr, poles) = arranged_for_pairing(&store, 0, 3).unwrap();
        let base = pairing_with_primitive(&store, &expr, &poles, &PrimitiveSpec::plain()).unwrap();
        // Shift contribution: -Res (c) omega01 summed over poles = -c * sum
        // of residues of omega01 over the poles, all zero here.
        let omega01_p = store
            .unstable
            .omega01
            .remap_injective(|v| if v == Var::Z(0) { INTEG } else { v });
        let mut shift = RatFunc::zero();
        for p in &poles {
            shift = &shift + &residue_at(&omega01_p, INTEG, p).unwrap();
        }
        assert!(shift.is_zero());
        let _ = base;
    }
}
