// Temporary profiling probe (removed before release).
use refrec::algebra::{rat, rat_int};
use refrec::diff::Flavor;
use refrec::recursion::RecursionStore;
use refrec::curve::validate_curve;
use std::time::Instant;

fn main() {
    // Airy tower to Euler weight 3.
    let airy = {
        use refrec::algebra::{parse_expr, ExprNames, ParamTable};
        use refrec::curve::CurveConfig;
        use std::collections::BTreeMap;
        let names = ExprNames { coord: Some("z"), params: None, allow_geometry: true };
        let e = |s: &str| parse_expr(s, 1, &names).unwrap();
        CurveConfig {
            coord_name: "z".into(),
            params: ParamTable::new(Vec::<String>::new()),
            bindings: BTreeMap::new(),
            x: e("z^2"),
            y: e("z"),
            sigma: e("-z"),
            relation: Some([e("1"), e("0"), e("-x")]),
            ptilde_plus: vec![],
        }
    };
    let store = RecursionStore::new(validate_curve(&airy).unwrap()).unwrap();
    let t0 = Instant::now();
    for (g2, ar) in [
        (0u32, 3u32), (1, 2), (2, 1),
        (0, 4), (1, 3), (2, 2), (3, 1),
        (0, 5), (1, 4), (2, 3), (3, 2), (4, 1),
        (0, 6), (1, 5), (2, 4), (3, 3), (4, 2), (5, 1),
    ] {
        let t = Instant::now();
        let w = store.omega(g2, ar, Flavor::Full).unwrap();
        eprintln!("airy omega(2g={g2}, n+1={ar}): {:?} num={}", t.elapsed(), w.expr.num().num_terms());
    }
    eprintln!("airy full tower: {:?}", t0.elapsed());

    // Appendix curve with pinned mus, tower to weight 3.
    let t0 = Instant::now();
    let cfg = refrec_probe_appendix();
    let store = RecursionStore::new(validate_curve(&cfg).unwrap()).unwrap();
    for (g2, ar) in [
        (0u32, 3u32), (1, 2), (2, 1),
        (0, 4), (1, 3), (2, 2), (3, 1),
        (0, 5), (1, 4), (2, 3), (3, 2), (4, 1),
        (0, 6), (1, 5), (2, 4), (3, 3), (4, 2), (5, 1),
    ] {
        let t = Instant::now();
        let w = store.omega(g2, ar, Flavor::Full).unwrap();
        eprintln!("appx omega(2g={g2}, n+1={ar}): {:?} num={}", t.elapsed(), w.expr.num().num_terms());
    }
    eprintln!("appendix full tower: {:?}", t0.elapsed());
}

fn refrec_probe_appendix() -> refrec::curve::CurveConfig {
    use refrec::algebra::{parse_expr, ExprNames, ParamTable, Point};
    use refrec::curve::{Binding, CurveConfig, PtildePlusDecl};
    use std::collections::BTreeMap;
    let params = ParamTable::new(["mu0", "muP"]);
    let names = ExprNames { coord: Some("z"), params: Some(&params), allow_geometry: true };
    let e = |s: &str| parse_expr(s, 1, &names).unwrap();
    let mut bindings = BTreeMap::new();
    bindings.insert(params.index("mu0").unwrap(), Binding::Pinned(rat(3, 5)));
    bindings.insert(params.index("muP").unwrap(), Binding::Pinned(rat(-7, 4)));
    CurveConfig {
        coord_name: "z".into(),
        params: params.clone(),
        bindings,
        x: e("2*(2/3)*3*(z^2 - 1)/(z^2 - 9)"),
        y: e("(9 - 1)*z/(2*3*(z^2 - 1))"),
        sigma: e("-z"),
        relation: Some([e("4*x^2"), e("0"), e("-(x^2 + 4*(-10/9)*x + 4*(2/3)^2)")]),
        ptilde_plus: vec![
            PtildePlusDecl { point: Point::int(1), mu: e("mu0") },
            PtildePlusDecl { point: Point::Finite(e("3")), mu: e("muP") },
        ],
    }
}
