//! Genus-zero hyperelliptic refined spectral curves: validation of the
//! user-supplied parametrization, classification of distinguished points, and
//! the unstable differentials feeding the recursion.
//!
//! The curve lives on the `z`-sphere (`Var::Z(0)` internally); `x`, `y`, and
//! the sheet involution `sigma` are rational in `z`, with `sigma` a Mobius
//! involution. Every distinguished point must be rational or `oo` in this
//! chart.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::num::{rat_sqrt, Rat};
use crate::algebra::residue::{diff_valuation, linear_factor, rational_roots_in, root_multiplicity};
use crate::algebra::{AlgebraError, MultiPoly, ParamTable, Point, RatFunc, Var};

/// Binding state of a named parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Pinned(Rat),
    Symbolic,
}

/// A declared member of `Ptilde_+` with its `mu` weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtildePlusDecl {
    pub point: Point,
    pub mu: RatFunc,
}

/// User-declared curve data, prior to validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveConfig {
    pub coord_name: String,
    pub params: ParamTable,
    pub bindings: BTreeMap<u16, Binding>,
    pub x: RatFunc,
    pub y: RatFunc,
    pub sigma: RatFunc,
    /// Optional defining polynomial data `a(x) y^2 + b(x) y + c(x) = 0`,
    /// each entry rational in `Var::X`.
    pub relation: Option<[RatFunc; 3]>,
    pub ptilde_plus: Vec<PtildePlusDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveError {
    /// `sigma` is not an involution of the sphere.
    Involution(String),
    /// `x` is not a degree-two cover invariant under `sigma`.
    Cover(String),
    /// Supplied `a, b, c` are not satisfied by `(x(z), y(z))`.
    Relation(String),
    /// A distinguished point is not rational (or `oo`) in this chart.
    IrrationalPoint(String),
    /// The declared `Ptilde_+` is not a valid half of `Ptilde`.
    PtildeSplit(String),
    /// The two sheets coincide (`Delta y = 0`) or `sigma` is the identity.
    Degenerate(String),
    Algebra(AlgebraError),
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::Involution(s) => write!(f, "involution failure: {s}"),
            CurveError::Cover(s) => write!(f, "cover failure: {s}"),
            CurveError::Relation(s) => write!(f, "relation failure: {s}"),
            CurveError::IrrationalPoint(s) => write!(f, "irrational distinguished point: {s}"),
            CurveError::PtildeSplit(s) => write!(f, "invalid Ptilde_+ declaration: {s}"),
            CurveError::Degenerate(s) => write!(f, "degenerate curve: {s}"),
            CurveError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CurveError {}

impl From<AlgebraError> for CurveError {
    fn from(e: AlgebraError) -> CurveError {
        CurveError::Algebra(e)
    }
}

/// A validated spectral curve; all parameter pinning already applied.
#[derive(Clone, Debug)]
pub struct SpectralCurve {
    pub config: CurveConfig,
    pub params: ParamTable,
    pub x: RatFunc,
    pub y: RatFunc,
    pub sigma: RatFunc,
    pub relation: Option<[RatFunc; 3]>,
    pub ptilde_plus: Vec<(Point, RatFunc)>,
    /// x'(z), the coefficient of `dx`.
    pub dx: RatFunc,
    /// `Delta y = y - y(sigma(z))`.
    pub delta_y: RatFunc,
    /// Coefficient of the anchor differential `Delta y * dx`.
    pub dydx: RatFunc,
}

const Z: Var = Var::Z(0);

impl CurveConfig {
    /// Deterministic text form of the parsed configuration; the cache key
    /// and manifest. Whitespace of the original source is irrelevant here.
    pub fn canonical_text(&self) -> String {
        use crate::algebra::ratfunc_to_string as render;
        let p = Some(&self.params);
        let mut out = String::new();
        out.push_str(&format!("coord = {}\n", self.coord_name));
        out.push_str(&format!("x = {}\n", render(&self.x, p)));
        out.push_str(&format!("y = {}\n", render(&self.y, p)));
        out.push_str(&format!("sigma = {}\n", render(&self.sigma, p)));
        if let Some([a, b, c]) = &self.relation {
            out.push_str(&format!("relation.a = {}\n", render(a, p)));
            out.push_str(&format!("relation.b = {}\n", render(b, p)));
            out.push_str(&format!("relation.c = {}\n", render(c, p)));
        }
        for (idx, name) in self.params.names().iter().enumerate() {
            let b = match self.bindings.get(&(idx as u16)) {
                Some(Binding::Pinned(v)) => format!("{v}"),
                _ => "symbolic".into(),
            };
            out.push_str(&format!("param {name} = {b}\n"));
        }
        for decl in &self.ptilde_plus {
            let pt = match &decl.point {
                Point::Infinity => "oo".into(),
                Point::Finite(v) => render(v, p),
            };
            out.push_str(&format!("ptilde+ {} with mu = {}\n", pt, render(&decl.mu, p)));
        }
        out
    }

    fn pin(&self, f: &RatFunc) -> Result<RatFunc, AlgebraError> {
        let mut out = f.clone();
        for (&idx, b) in &self.bindings {
            if let Binding::Pinned(v) = b {
                out = out.eval_var(Var::Par(idx), v)?;
            }
        }
        Ok(out)
    }

    fn pin_point(&self, p: &Point) -> Result<Point, AlgebraError> {
        match p {
            Point::Infinity => Ok(Point::Infinity),
            Point::Finite(v) => Ok(Point::Finite(self.pin(v)?)),
        }
    }
}

/// Check every structural invariant of the configuration and produce the
/// validated curve handle used by all downstream operations.
pub fn validate_curve(cfg: &CurveConfig) -> Result<SpectralCurve, CurveError> {
    let x = cfg.pin(&cfg.x)?;
    let y = cfg.pin(&cfg.y)?;
    let sigma = cfg.pin(&cfg.sigma)?;

    for (name, f) in [("x", &x), ("y", &y), ("sigma", &sigma)] {
        for v in f.variables() {
            match v {
                Var::Z(0) | Var::Par(_) => {}
                other => {
                    return Err(CurveError::Cover(format!(
                        "{name} uses unexpected variable {other}"
                    )))
                }
            }
        }
    }

    // sigma must be a Mobius involution distinct from the identity.
    let zvar = RatFunc::var(Z);
    if sigma == zvar {
        return Err(CurveError::Involution("sigma is the identity".into()));
    }
    let sig_sig = sigma
        .subst(Z, &sigma)
        .map_err(|_| CurveError::Involution("sigma(sigma(z)) undefined".into()))?;
    if sig_sig != zvar {
        return Err(CurveError::Involution(format!(
            "sigma(sigma(z)) = {sig_sig} is not z"
        )));
    }

    // x is sigma-invariant of degree two.
    let x_sig = x.subst(Z, &sigma)?;
    if x_sig != x {
        return Err(CurveError::Cover(format!("x(sigma(z)) = {x_sig} differs from x(z)")));
    }
    let deg = x.num().degree_in(Z).max(x.den().degree_in(Z));
    if deg != 2 {
        return Err(CurveError::Cover(format!(
            "x has degree {deg} in z; a hyperelliptic cover needs degree 2"
        )));
    }

    // Optional defining relation a(x) y^2 + b(x) y + c(x) = 0, exactly.
    let relation = match &cfg.relation {
        None => None,
        Some([a, b, c]) => {
            let a = cfg.pin(a)?;
            let b = cfg.pin(b)?;
            let c = cfg.pin(c)?;
            let ax = a.subst(Var::X, &x)?;
            let bx = b.subst(Var::X, &x)?;
            let cx = c.subst(Var::X, &x)?;
            let y2 = &y * &y;
            let lhs = &(&(&ax * &y2) + &(&bx * &y)) + &cx;
            if !lhs.is_zero() {
                return Err(CurveError::Relation(format!(
                    "a(x) y^2 + b(x) y + c(x) = {lhs}, not 0"
                )));
            }
            Some([a, b, c])
        }
    };

    let y_sig = y.subst(Z, &sigma)?;
    let delta_y = &y - &y_sig;
    if delta_y.is_zero() {
        return Err(CurveError::Degenerate("Delta y vanishes identically".into()));
    }

    let dx = x.derivative(Z);
    let dydx = &delta_y * &dx;

    let mut ptilde_plus = Vec::new();
    for decl in &cfg.ptilde_plus {
        let p = cfg.pin_point(&decl.point)?;
        if let Point::Finite(v) = &p {
            if v.contains_var(Z) {
                return Err(CurveError::IrrationalPoint(format!(
                    "declared point {v} depends on the coordinate"
                )));
            }
        }
        ptilde_plus.push((p, cfg.pin(&decl.mu)?));
    }

    Ok(SpectralCurve {
        config: cfg.clone(),
        params: cfg.params.clone(),
        x,
        y,
        sigma,
        relation,
        ptilde_plus,
        dx,
        delta_y,
        dydx,
    })
}

impl SpectralCurve {
    /// Mobius coefficients of sigma: `(a, b, c, d)` with
    /// `sigma(z) = (a z + b)/(c z + d)`, entries rational in parameters.
    fn mobius(&self) -> Result<[RatFunc; 4], CurveError> {
        let nc = self.sigma.num().coeffs_in(Z);
        let dc = self.sigma.den().coeffs_in(Z);
        if nc.len() > 2 || dc.len() > 2 {
            return Err(CurveError::Involution("sigma is not a Mobius map".into()));
        }
        let get = |v: &[MultiPoly], k: usize| -> RatFunc {
            v.get(k).map(|p| RatFunc::from_poly(p.clone())).unwrap_or_else(RatFunc::zero)
        };
        Ok([get(&nc, 1), get(&nc, 0), get(&dc, 1), get(&dc, 0)])
    }

    /// Image of a point of the sphere under the sheet involution.
    pub fn sigma_point(&self, p: &Point) -> Result<Point, CurveError> {
        let [a, b, c, d] = self.mobius()?;
        match p {
            Point::Infinity => {
                if c.is_zero() {
                    Ok(Point::Infinity)
                } else {
                    Ok(Point::Finite(&a / &c))
                }
            }
            Point::Finite(v) => {
                let den = &(&c * v) + &d;
                if den.is_zero() {
                    Ok(Point::Infinity)
                } else {
                    Ok(Point::Finite(&(&(&a * v) + &b) / &den))
                }
            }
        }
    }

    /// Fixed points of sigma on the sphere (the ramification points).
    pub fn sigma_fixed_points(&self) -> Result<Vec<Point>, CurveError> {
        let [a, b, c, d] = self.mobius()?;
        let mut out = Vec::new();
        if c.is_zero() {
            // sigma = (a z + b)/d fixes oo; finite fixed point from
            // (a/d - 1) z = -b/d. sigma != id guarantees a/d != 1.
            out.push(Point::Infinity);
            let slope = &(&a / &d) - &RatFunc::one();
            if slope.is_zero() {
                return Err(CurveError::Involution("translation has order > 2".into()));
            }
            out.push(Point::Finite(&(-&(&b / &d)) / &slope));
        } else {
            // c z^2 + (d - a) z - b = 0.
            let a2 = c.clone();
            let a1 = &d - &a;
            let a0 = -&b;
            let (Some(ca2), Some(ca1), Some(ca0)) =
                (a2.as_constant(), a1.as_constant(), a0.as_constant())
            else {
                return Err(CurveError::IrrationalPoint(
                    "sigma fixed points depend on unpinned parameters".into(),
                ));
            };
            let disc = &ca1 * &ca1 + Rat::from_integer(4.into()) * &ca2 * &ca0;
            let Some(root) = rat_sqrt(&disc) else {
                return Err(CurveError::IrrationalPoint(format!(
                    "sigma fixed points solve {ca2}*z^2 + {ca1}*z + {}, irrational discriminant {disc}",
                    -ca0.clone()
                )));
            };
            let two_a2 = Rat::from_integer(2.into()) * &ca2;
            let r1 = (-&ca1 + &root) / &two_a2;
            let r2 = (-&ca1 - &root) / &two_a2;
            if r1 == r2 {
                return Err(CurveError::Involution(
                    "sigma has a double fixed point; not an involution of the sphere".into(),
                ));
            }
            out.push(Point::rat(r1));
            out.push(Point::rat(r2));
        }
        Ok(out)
    }

    /// sigma'(z) as a rational function of `z`.
    pub fn sigma_prime(&self) -> RatFunc {
        self.sigma.derivative(Z)
    }

    /// Pull a differential coefficient in `v` back along sigma:
    /// `f(sigma(v)) sigma'(v)`.
    pub fn pullback_diff(&self, f: &RatFunc, v: Var) -> RatFunc {
        let sig_v = self.sigma.remap(|w| if w == Z { v } else { w });
        let f_s = f.subst(v, &sig_v).expect("sigma substitution");
        &f_s * &sig_v.derivative(v)
    }

    /// Pull a plain function in `v` back along sigma: `f(sigma(v))`.
    pub fn pullback_fn(&self, f: &RatFunc, v: Var) -> RatFunc {
        let sig_v = self.sigma.remap(|w| if w == Z { v } else { w });
        f.subst(v, &sig_v).expect("sigma substitution")
    }

    /// The curve functions re-expressed in another variable.
    pub fn x_at(&self, v: Var) -> RatFunc {
        self.x.remap(|w| if w == Z { v } else { w })
    }

    pub fn dx_at(&self, v: Var) -> RatFunc {
        self.dx.remap(|w| if w == Z { v } else { w })
    }

    pub fn dydx_at(&self, v: Var) -> RatFunc {
        self.dydx.remap(|w| if w == Z { v } else { w })
    }

    pub fn sigma_at(&self, v: Var) -> RatFunc {
        self.sigma.remap(|w| if w == Z { v } else { w })
    }
}

/// Zero-type or pole-type membership in `Ptilde`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PtKind {
    Zero,
    Pole,
}

#[derive(Clone, Debug)]
pub struct PtildePoint {
    pub point: Point,
    pub kind: PtKind,
    /// Signed valuation of `Delta y * dx` there.
    pub valuation: i64,
}

/// Classified distinguished points of a validated curve.
#[derive(Clone, Debug)]
pub struct RamificationData {
    /// All sigma-fixed points.
    pub fixed: Vec<Point>,
    /// Effective ramification points (`Delta y * dx` regular there).
    pub effective: Vec<Point>,
    pub ineffective: Vec<Point>,
    /// All of `Ptilde` with zero/pole tags.
    pub ptilde: Vec<PtildePoint>,
    /// The honored user split, with `mu` weights.
    pub ptilde_plus: Vec<(Point, RatFunc)>,
    pub ptilde_minus: Vec<Point>,
}

impl RamificationData {
    pub fn ptilde_kind(&self, p: &Point) -> Option<PtKind> {
        self.ptilde.iter().find(|q| &q.point == p).map(|q| q.kind)
    }

    /// Members of `Ptilde_+` of the given kind.
    pub fn ptilde_plus_of(&self, kind: PtKind) -> Vec<Point> {
        self.ptilde_plus
            .iter()
            .filter(|(p, _)| self.ptilde_kind(p) == Some(kind))
            .map(|(p, _)| p.clone())
            .collect()
    }
}

/// Classify sigma-fixed points into effective/ineffective and determine
/// `Ptilde` with the user split honored.
pub fn classify_points(curve: &SpectralCurve) -> Result<RamificationData, CurveError> {
    let fixed = curve.sigma_fixed_points()?;
    let dydx = &curve.dydx;

    let mut effective = Vec::new();
    let mut ineffective = Vec::new();
    for r in &fixed {
        match diff_valuation(dydx, Z, r) {
            Some(v) if v < 0 => ineffective.push(r.clone()),
            _ => effective.push(r.clone()),
        }
    }

    // Candidate zero/pole locations of Delta y dx beyond the fixed points:
    // declared points, their sigma images, rational roots, and oo.
    let mut candidates: Vec<Point> = Vec::new();
    let push = |cands: &mut Vec<Point>, p: Point| {
        if !cands.contains(&p) {
            cands.push(p);
        }
    };
    for (p, _) in &curve.ptilde_plus {
        push(&mut candidates, p.clone());
        push(&mut candidates, curve.sigma_point(p)?);
    }
    for r in rational_roots_in(dydx.num(), Z) {
        push(&mut candidates, Point::rat(r));
    }
    for r in rational_roots_in(dydx.den(), Z) {
        push(&mut candidates, Point::rat(r));
    }
    push(&mut candidates, Point::Infinity);

    // Every root of numerator and denominator must be accounted for by the
    // fixed points plus the candidates; otherwise some zero or pole of
    // Delta y dx sits at an irrational point of this chart.
    let mut num_rem = dydx.num().clone();
    let mut den_rem = dydx.den().clone();
    for p in fixed.iter().chain(candidates.iter()) {
        if let Point::Finite(c) = p {
            for poly in [&mut num_rem, &mut den_rem] {
                let m = root_multiplicity(poly, Z, c);
                if m > 0 {
                    *poly = poly.div_exact(&linear_factor(Z, c).pow(m)).unwrap();
                }
            }
        }
    }
    if num_rem.degree_in(Z) > 0 || den_rem.degree_in(Z) > 0 {
        return Err(CurveError::IrrationalPoint(format!(
            "unaccounted factor of Delta y dx: ({num_rem})/({den_rem})"
        )));
    }

    let mut ptilde: Vec<PtildePoint> = Vec::new();
    for p in candidates {
        if fixed.contains(&p) {
            continue;
        }
        match diff_valuation(dydx, Z, &p) {
            Some(0) | None => continue,
            Some(v) => ptilde.push(PtildePoint {
                point: p,
                kind: if v > 0 { PtKind::Zero } else { PtKind::Pole },
                valuation: v,
            }),
        }
    }

    // Honor the declared split.
    let declared: Vec<Point> = curve.ptilde_plus.iter().map(|(p, _)| p.clone()).collect();
    for p in &declared {
        if fixed.contains(p) {
            return Err(CurveError::PtildeSplit(format!(
                "declared point {p} is a ramification point"
            )));
        }
        if !ptilde.iter().any(|q| &q.point == p) {
            return Err(CurveError::PtildeSplit(format!(
                "declared point {p} is not a zero or pole of Delta y dx"
            )));
        }
    }
    for p in &declared {
        let s = curve.sigma_point(p)?;
        if declared.contains(&s) {
            return Err(CurveError::PtildeSplit(format!(
                "declared points {p} and {s} are sigma-conjugate"
            )));
        }
    }
    if ptilde.len() != 2 * declared.len() {
        return Err(CurveError::PtildeSplit(format!(
            "Ptilde has {} points but the declaration covers {}",
            ptilde.len(),
            2 * declared.len()
        )));
    }
    let ptilde_minus: Vec<Point> = declared
        .iter()
        .map(|p| curve.sigma_point(p))
        .collect::<Result<_, _>>()?;

    Ok(RamificationData {
        fixed,
        effective,
        ineffective,
        ptilde,
        ptilde_plus: curve.ptilde_plus.clone(),
        ptilde_minus,
    })
}

/// The third-kind differential with residue `+1` at `p`, `-1` at `sigma(p)`,
/// expressed in the variable `p0`.
pub fn eta_point(curve: &SpectralCurve, p: &Point, p0: Var) -> Result<RatFunc, CurveError> {
    let sp = curve.sigma_point(p)?;
    if &sp == p {
        return Err(CurveError::PtildeSplit(format!("eta is undefined at the fixed point {p}")));
    }
    let z0 = RatFunc::var(p0);
    let term = |q: &Point| -> RatFunc {
        match q {
            Point::Infinity => RatFunc::zero(),
            Point::Finite(c) => (&z0 - c).recip().expect("distinct points"),
        }
    };
    Ok(&term(p) - &term(&sp))
}

/// `eta^p(p0)` with a symbolic location `p`: both arguments are variables.
pub fn eta_symbolic(curve: &SpectralCurve, p0: Var, p: Var) -> RatFunc {
    let z0 = RatFunc::var(p0);
    let zp = RatFunc::var(p);
    let sig_p = curve.sigma_at(p);
    let a = (&z0 - &zp).recip().expect("distinct variables");
    let b = (&z0 - &sig_p).recip().expect("generic");
    &a - &b
}

/// Invariant and anti-invariant parts `(I omega, Delta omega)` of a
/// differential coefficient in `v`.
pub fn involution_split(curve: &SpectralCurve, f: &RatFunc, v: Var) -> (RatFunc, RatFunc) {
    let pb = curve.pullback_diff(f, v);
    (&f.clone() + &pb, &f.clone() - &pb)
}

/// The unstable differentials of the refined recursion.
#[derive(Clone, Debug)]
pub struct UnstableSet {
    /// Coefficient of `omega_{0,1} = (1/2) Delta y dx` in `z0`.
    pub omega01: RatFunc,
    /// Coefficient of `omega_{0,2}(z0, z1) = -B(z0, sigma(z1))`.
    pub omega02: RatFunc,
    /// Coefficient of `omega_{1/2,1}`, linear in the refinement symbol `Q`.
    pub omega_half: RatFunc,
}

pub fn unstable_differentials(
    curve: &SpectralCurve,
    ram: &RamificationData,
) -> Result<UnstableSet, CurveError> {
    let half = RatFunc::constant(Rat::new(1.into(), 2.into()));
    let omega01 = (&half * &curve.dydx).remap(|w| if w == Z { Var::Z(0) } else { w });

    // -B(z0, sigma(z1)): substitute z1 -> sigma(z1) into dz0 dz1/(z0-z1)^2,
    // Jacobian included.
    let sig1 = curve.sigma_at(Var::Z(1));
    let diff = &RatFunc::var(Var::Z(0)) - &sig1;
    let omega02 = -&(&sig1.derivative(Var::Z(1)) / &(&diff * &diff));

    // (Q/2) ( -d(Delta y)/Delta y + sum mu_p eta^p ).
    let dlog = &curve.delta_y.derivative(Z) / &curve.delta_y;
    let mut bracket = -&dlog;
    for (p, mu) in &ram.ptilde_plus {
        let eta = eta_point(curve, p, Z)?;
        bracket = &bracket + &(mu * &eta);
    }
    let q = RatFunc::var(Var::RefQ);
    let omega_half = &(&q * &half) * &bracket;

    Ok(UnstableSet { omega01, omega02, omega_half })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::num::rat_int;
    use crate::algebra::parse_expr;
    use crate::algebra::ExprNames;

    fn expr(s: &str) -> RatFunc {
        let names = ExprNames { coord: Some("z"), params: None, allow_geometry: true };
        parse_expr(s, 1, &names).unwrap()
    }

    pub fn airy_config() -> CurveConfig {
        CurveConfig {
            coord_name: "z".into(),
            params: ParamTable::new(Vec::<String>::new()),
            bindings: BTreeMap::new(),
            x: expr("z^2"),
            y: expr("z"),
            sigma: expr("-z"),
            relation: Some([expr("1"), expr("0"), expr("-x")]),
            ptilde_plus: vec![],
        }
    }

    #[test]
    fn airy_validates() {
        let c = validate_curve(&airy_config()).unwrap();
        assert_eq!(c.delta_y, expr("2*z"));
        assert_eq!(c.dydx, expr("4*z^2"));
    }

    #[test]
    fn translation_fails_involution() {
        let mut cfg = airy_config();
        cfg.sigma = expr("z + 1");
        match validate_curve(&cfg) {
            Err(CurveError::Involution(_)) => {}
            other => panic!("expected involution failure, got {other:?}"),
        }
    }

    #[test]
    fn inversion_fails_cover() {
        let mut cfg = airy_config();
        cfg.sigma = expr("1/z");
        match validate_curve(&cfg) {
            Err(CurveError::Cover(_)) => {}
            other => panic!("expected cover failure, got {other:?}"),
        }
    }

    #[test]
    fn relation_mismatch_is_reported() {
        let mut cfg = airy_config();
        cfg.relation = Some([expr("1"), expr("0"), expr("x")]);
        match validate_curve(&cfg) {
            Err(CurveError::Relation(_)) => {}
            other => panic!("expected relation failure, got {other:?}"),
        }
    }

    #[test]
    fn airy_classification() {
        let c = validate_curve(&airy_config()).unwrap();
        let ram = classify_points(&c).unwrap();
        assert_eq!(ram.fixed, vec![Point::Infinity, Point::int(0)]);
        assert_eq!(ram.effective, vec![Point::int(0)]);
        assert_eq!(ram.ineffective, vec![Point::Infinity]);
        assert!(ram.ptilde.is_empty());
    }

    #[test]
    fn rescaled_y_grows_zero_type_ptilde() {
        // y = z(z^2 - 4) keeps sigma-anti-invariance; Delta y dx gains simple
        // zeros at z = +-2 away from the ramification points.
        let mut cfg = airy_config();
        cfg.y = expr("z^3 - 4*z");
        cfg.relation = Some([expr("1"), expr("0"), expr("-x*(x-4)^2")]);
        cfg.ptilde_plus = vec![PtildePlusDecl {
            point: Point::int(2),
            mu: RatFunc::constant(rat_int(1)),
        }];
        let c = validate_curve(&cfg).unwrap();
        let ram = classify_points(&c).unwrap();
        assert_eq!(ram.effective, vec![Point::int(0)]);
        let kinds: Vec<(Point, PtKind)> =
            ram.ptilde.iter().map(|p| (p.point.clone(), p.kind)).collect();
        assert!(kinds.contains(&(Point::int(2), PtKind::Zero)));
        assert!(kinds.contains(&(Point::int(-2), PtKind::Zero)));
        assert_eq!(ram.ptilde.len(), 2);
        assert_eq!(ram.ptilde_minus, vec![Point::int(-2)]);
    }

    #[test]
    fn undeclared_ptilde_is_rejected() {
        let mut cfg = airy_config();
        cfg.y = expr("z^3 - 4*z");
        cfg.relation = None;
        match validate_curve(&cfg).and_then(|c| classify_points(&c)) {
            Err(CurveError::PtildeSplit(_)) => {}
            other => panic!("expected split failure, got {other:?}"),
        }
    }

    #[test]
    fn airy_unstable_set() {
        let c = validate_curve(&airy_config()).unwrap();
        let ram = classify_points(&c).unwrap();
        let u = unstable_differentials(&c, &ram).unwrap();
        assert_eq!(u.omega01, expr("2*z^2"));
        // omega02 = dz0 dz1/(z0+z1)^2
        assert_eq!(u.omega02, expr("1/(z0 + z1)^2"));
        // omega_{1/2,1} = -(Q/2) dz/z
        assert_eq!(u.omega_half, expr("-Q/(2*z)"));
    }

    #[test]
    fn eta_has_unit_residues() {
        use crate::algebra::residue_at;
        let c = validate_curve(&airy_config()).unwrap();
        let p = Point::int(3);
        let eta = eta_point(&c, &p, Z).unwrap();
        assert_eq!(eta, expr("1/(z - 3) - 1/(z + 3)"));
        assert_eq!(residue_at(&eta, Z, &p).unwrap(), RatFunc::one());
        assert_eq!(
            residue_at(&eta, Z, &Point::int(-3)).unwrap(),
            -&RatFunc::one()
        );
        // Anti-invariance under p0 -> sigma(p0).
        let pb = c.pullback_diff(&eta, Z);
        assert_eq!(pb, -&eta);
    }

    #[test]
    fn split_examples() {
        let c = validate_curve(&airy_config()).unwrap();
        let ram = classify_points(&c).unwrap();
        let u = unstable_differentials(&c, &ram).unwrap();
        // omega01 is anti-invariant: invariant part 0, anti part doubles.
        let (inv, anti) = involution_split(&c, &u.omega01, Z);
        assert!(inv.is_zero());
        assert_eq!(anti, u.omega01.scale(&rat_int(2)));
        // dx is invariant.
        let (inv, anti) = involution_split(&c, &c.dx, Z);
        assert_eq!(inv, c.dx.scale(&rat_int(2)));
        assert!(anti.is_zero());
        // On Airy the mu-sum is empty and omega_{1/2,1} = -(Q/2) d log Delta y
        // is sigma-invariant: sigma^*(dz/z) = d(-z)/(-z) = dz/z.
        let (inv, anti) = involution_split(&c, &u.omega_half, Z);
        assert_eq!(inv, u.omega_half.scale(&rat_int(2)));
        assert!(anti.is_zero());
    }
}
