use refrec::algebra::{parse_expr, ExprNames, Point, RatFunc, Var, INTEG};
use refrec::algebra::{local_antiderivative, residue_at};
use refrec::diff::Flavor;
use refrec::recursion::RecursionStore;
use refrec::curve::validate_curve;
use std::collections::BTreeMap;

fn main() {
    let names = ExprNames { coord: Some("z"), params: None, allow_geometry: true };
    let e = |s: &str| parse_expr(s, 1, &names).unwrap();
    let cfg = refrec::curve::CurveConfig {
        coord_name: "z".into(),
        params: refrec::algebra::ParamTable::new(Vec::<String>::new()),
        bindings: BTreeMap::new(),
        x: e("z^2"), y: e("z"), sigma: e("-z"),
        relation: Some([e("1"), e("0"), e("-x")]),
        ptilde_plus: vec![],
    };
    let store = RecursionStore::new(validate_curve(&cfg).unwrap()).unwrap();
    let w = store.omega(1, 2, Flavor::Full).unwrap();
    let arranged = w.expr.remap_injective(|v| match v {
        Var::Z(0) => INTEG,
        Var::Z(1) => Var::Z(0),
        o => o,
    });
    let om01p = store.unstable.omega01.remap_injective(|v| if v == Var::Z(0) { INTEG } else { v });
    for pole in [Point::int(0), Point::Finite(-&RatFunc::var(Var::Z(0)))] {
        let germ = local_antiderivative(&arranged, INTEG, &pole, -1).unwrap();
        eprintln!("germ at {pole}: {germ}");
        let r = residue_at(&(&germ * &om01p), INTEG, &pole).unwrap();
        eprintln!("  Res(I*w01) = {r}");
    }
}
