//! Shared curve fixtures for unit tests.

use std::collections::BTreeMap;

use crate::algebra::num::Rat;
use crate::algebra::{parse_expr, ExprNames, ParamTable, Point, RatFunc};
use crate::curve::{validate_curve, Binding, CurveConfig, PtildePlusDecl, SpectralCurve};
use crate::recursion::RecursionStore;

pub fn expr_z(s: &str) -> RatFunc {
    let names = ExprNames { coord: Some("z"), params: None, allow_geometry: true };
    parse_expr(s, 1, &names).unwrap()
}

pub fn airy_config() -> CurveConfig {
    CurveConfig {
        coord_name: "z".into(),
        params: ParamTable::new(Vec::<String>::new()),
        bindings: BTreeMap::new(),
        x: expr_z("z^2"),
        y: expr_z("z"),
        sigma: expr_z("-z"),
        relation: Some([expr_z("1"), expr_z("0"), expr_z("-x")]),
        ptilde_plus: vec![],
    }
}

pub fn airy_curve() -> SpectralCurve {
    validate_curve(&airy_config()).unwrap()
}

pub fn airy_store() -> RecursionStore {
    RecursionStore::new(airy_curve()).unwrap()
}

fn rat_str(r: &Rat) -> String {
    format!("({}/{})", r.numer(), r.denom())
}

/// The genus-zero curve `4 x^2 y^2 - (x^2 + 4 lam_inf x + 4 lam0^2) = 0`
/// parametrized with branch points at `z = 0, oo`:
///
///   x(z) = 2 lam0 rho (z^2 - 1)/(z^2 - rho^2),
///   y(z) = (rho^2 - 1) z / (2 rho (z^2 - 1)),   sigma(z) = -z,
///
/// which forces `lam_inf = -lam0 (rho^2 + 1)/(2 rho)`. `Ptilde^(inf)` is
/// `{1, -1, rho, -rho}`; the declared half is `{1, rho}` with weights
/// `mu0` (at the zero of x) and `muP` (at the pole of x).
pub fn appendix_config(l0: Rat, rho: Rat, mus: Option<(Rat, Rat)>) -> CurveConfig {
    let params = ParamTable::new(["mu0", "muP"]);
    let l = rat_str(&l0);
    let r = rat_str(&rho);
    let lam_inf = -&(&l0 * (&rho * &rho + Rat::from_integer(1.into()))
        / (Rat::from_integer(2.into()) * &rho));
    let li = rat_str(&lam_inf);
    let names = ExprNames { coord: Some("z"), params: Some(&params), allow_geometry: true };
    let e = |s: &str| parse_expr(s, 1, &names).unwrap();

    let mut bindings = BTreeMap::new();
    if let Some((m0, mp)) = &mus {
        bindings.insert(params.index("mu0").unwrap(), Binding::Pinned(m0.clone()));
        bindings.insert(params.index("muP").unwrap(), Binding::Pinned(mp.clone()));
    } else {
        bindings.insert(params.index("mu0").unwrap(), Binding::Symbolic);
        bindings.insert(params.index("muP").unwrap(), Binding::Symbolic);
    }

    CurveConfig {
        coord_name: "z".into(),
        params: params.clone(),
        bindings,
        x: e(&format!("2*{l}*{r}*(z^2 - 1)/(z^2 - {r}^2)")),
        y: e(&format!("({r}^2 - 1)*z/(2*{r}*(z^2 - 1))")),
        sigma: e("-z"),
        relation: Some([
            e("4*x^2"),
            e("0"),
            e(&format!("-(x^2 + 4*{li}*x + 4*{l}^2)")),
        ]),
        ptilde_plus: vec![
            PtildePlusDecl { point: Point::int(1), mu: e("mu0") },
            PtildePlusDecl {
                point: Point::Finite(e(&r.to_string())),
                mu: e("muP"),
            },
        ],
    }
}

pub fn appendix_curve(l0: Rat, rho: Rat, mus: Option<(Rat, Rat)>) -> SpectralCurve {
    validate_curve(&appendix_config(l0, rho, mus)).unwrap()
}

pub fn appendix_store(l0: Rat, rho: Rat, mus: Option<(Rat, Rat)>) -> RecursionStore {
    RecursionStore::new(appendix_curve(l0, rho, mus)).unwrap()
}

/// Standard small sample used across tests: `lam0 = 2/3`, `rho = 3`.
pub fn appendix_store_default() -> RecursionStore {
    appendix_store(crate::algebra::rat(2, 3), crate::algebra::rat_int(3), None)
}
