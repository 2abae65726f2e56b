//! Computed multidifferentials and their structural certification.
//!
//! A stored `omega_{g,n+1}` is the coefficient of `dz0 ... dzn` as a rational
//! function of `z0..zn`, the refinement symbol `Q`, and any unpinned
//! parameters. Certification pins down exactly where its poles are, that all
//! residues vanish, that it is symmetric, and that the `Q`-dependence has the
//! right degree and parity; the engine refuses to store anything that fails.

use std::fmt;

use crate::algebra::num::Rat;
use crate::algebra::residue::{diff_valuation, partial_fractions, residue_at};
use crate::algebra::{Point, RatFunc, Var};
use crate::curve::{PtKind, RamificationData, SpectralCurve};

/// Which recursion produced an entry.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Flavor {
    /// The refined topological recursion (full `Q` dependence).
    Full,
    /// The Q-top recursion (top `Q`-coefficients, stored `Q`-free).
    QTop,
    /// The independently coded unrefined recursion used as an oracle.
    Unrefined,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Full => write!(f, "full"),
            Flavor::QTop => write!(f, "qtop"),
            Flavor::Unrefined => write!(f, "unrefined"),
        }
    }
}

/// Where a pole of one variable slot may sit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PoleSite {
    /// A fixed point of the sphere (rational or `oo`).
    At(Point),
    /// The moving point `z_i = sigma(z_j)`.
    SigmaOfVar(u32),
}

impl fmt::Display for PoleSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoleSite::At(p) => write!(f, "{p}"),
            PoleSite::SigmaOfVar(j) => write!(f, "sigma(z{j})"),
        }
    }
}

impl PoleSite {
    /// The concrete point of the sphere this site describes, as seen from a
    /// given variable slot.
    pub fn to_point(&self, curve: &SpectralCurve) -> Point {
        match self {
            PoleSite::At(p) => p.clone(),
            PoleSite::SigmaOfVar(j) => curve
                .sigma_point(&Point::Finite(RatFunc::var(Var::Z(*j as u16))))
                .expect("sigma of a free variable is finite"),
        }
    }
}

/// A computed multidifferential with certified pole data.
#[derive(Clone, Debug)]
pub struct MultiDiff {
    /// Stores `2g` (so half-integer genus stays integral).
    pub two_g: u32,
    pub arity: u32,
    pub flavor: Flavor,
    pub expr: RatFunc,
    /// Certified poles per variable slot, with orders.
    pub pole_locus: Vec<Vec<(PoleSite, u32)>>,
}

impl MultiDiff {
    pub fn genus_label(&self) -> String {
        if self.two_g % 2 == 0 {
            format!("{}", self.two_g / 2)
        } else {
            format!("{}/2", self.two_g)
        }
    }

    pub fn euler_weight(&self) -> i64 {
        // 2g - 2 + n with arity = n + 1.
        self.two_g as i64 - 2 + (self.arity as i64 - 1)
    }

    /// Coefficient of `Q^k`. Stored denominators are certified `Q`-free.
    pub fn q_coefficient(&self, k: u32) -> RatFunc {
        q_coefficient(&self.expr, k)
    }
}

pub fn q_coefficient(expr: &RatFunc, k: u32) -> RatFunc {
    assert!(
        !expr.den().contains_var(Var::RefQ),
        "denominator unexpectedly depends on Q"
    );
    let coeffs = expr.num().coeffs_in(Var::RefQ);
    match coeffs.get(k as usize) {
        None => RatFunc::zero(),
        Some(c) => RatFunc::new(c.clone(), expr.den().clone()),
    }
}

/// Replace `Q` by an exact rational value.
pub fn q_slice(expr: &RatFunc, value: &Rat) -> RatFunc {
    expr.eval_var(Var::RefQ, value).expect("Q-free denominator")
}

/// Structural requirements for an entry of the given flavor.
fn q_rules(flavor: Flavor, two_g: u32, expr: &RatFunc) -> Result<(), String> {
    if expr.den().contains_var(Var::RefQ) {
        return Err("denominator depends on Q".into());
    }
    match flavor {
        Flavor::Full => {
            let coeffs = expr.num().coeffs_in(Var::RefQ);
            if coeffs.len() as u32 > two_g + 1 {
                return Err(format!(
                    "Q-degree {} exceeds 2g = {}",
                    coeffs.len() - 1,
                    two_g
                ));
            }
            for (k, c) in coeffs.iter().enumerate() {
                if !c.is_zero() && (k as u32 % 2) != (two_g % 2) {
                    return Err(format!("Q^{k} term violates parity for 2g = {two_g}"));
                }
            }
        }
        Flavor::QTop | Flavor::Unrefined => {
            if expr.contains_var(Var::RefQ) {
                return Err(format!("{flavor} entry mentions Q"));
            }
        }
    }
    Ok(())
}

/// Certify a stable entry: symmetry, Q-structure, pole locus containment,
/// and residue-freeness. Returns the certified per-variable pole data.
pub fn certify(
    curve: &SpectralCurve,
    ram: &RamificationData,
    flavor: Flavor,
    two_g: u32,
    arity: u32,
    expr: &RatFunc,
) -> Result<Vec<Vec<(PoleSite, u32)>>, String> {
    q_rules(flavor, two_g, expr)?;

    // Symmetry under all permutations, generated by adjacent transpositions.
    for i in 0..arity.saturating_sub(1) {
        let a = Var::Z(i as u16);
        let b = Var::Z(i as u16 + 1);
        let swapped = expr.remap_injective(|v| {
            if v == a {
                b
            } else if v == b {
                a
            } else {
                v
            }
        });
        if &swapped != expr {
            return Err(format!("not symmetric under z{i} <-> z{}", i + 1));
        }
    }

    // Allowed pole sites for slot i.
    let allowed_sites = |i: u32| -> Vec<PoleSite> {
        let mut out: Vec<PoleSite> = Vec::new();
        for r in &ram.effective {
            out.push(PoleSite::At(r.clone()));
        }
        let sigma_plus: Vec<Point> = if flavor == Flavor::QTop && arity == 1 {
            // The (g,1) tower of the Q-top recursion only reaches
            // sigma(Ptilde_+^{(0)}).
            ram.ptilde_plus_of(PtKind::Zero)
        } else {
            ram.ptilde_plus.iter().map(|(p, _)| p.clone()).collect()
        };
        for p in &sigma_plus {
            let s = curve.sigma_point(p).expect("sigma of a Ptilde point");
            out.push(PoleSite::At(s));
        }
        for j in 0..arity {
            if j != i {
                out.push(PoleSite::SigmaOfVar(j));
            }
        }
        out
    };

    let mut locus = Vec::new();
    for i in 0..arity {
        let v = Var::Z(i as u16);
        // Hints are deliberately broader than the allowed set so that a pole
        // in a forbidden place is found and reported, not mistaken for an
        // unfactorable denominator.
        let mut hints: Vec<Point> = Vec::new();
        for r in &ram.fixed {
            hints.push(r.clone());
        }
        for q in &ram.ptilde {
            hints.push(q.point.clone());
            hints.push(curve.sigma_point(&q.point).map_err(|e| e.to_string())?);
        }
        for j in 0..arity {
            if j != i {
                let zj = Point::Finite(RatFunc::var(Var::Z(j as u16)));
                hints.push(zj.clone());
                hints.push(curve.sigma_point(&zj).map_err(|e| e.to_string())?);
            }
        }
        let pf = partial_fractions(expr, v, &hints).map_err(|e| e.to_string())?;

        let allowed = allowed_sites(i);
        let classify = |p: &Point| -> Option<PoleSite> {
            allowed
                .iter()
                .find(|site| match site {
                    PoleSite::At(q) => q == p,
                    PoleSite::SigmaOfVar(j) => {
                        let s = curve
                            .sigma_point(&Point::Finite(RatFunc::var(Var::Z(*j as u16))))
                            .expect("sigma of a free variable");
                        &s == p
                    }
                })
                .cloned()
        };

        let mut slot = Vec::new();
        for pole in &pf.poles {
            let site = classify(&pole.pole).ok_or_else(|| {
                format!("slot z{i} has a pole at {} outside the allowed locus", pole.pole)
            })?;
            // Residue-free: coefficient of (z - c)^-1 vanishes.
            let res = pole.coeffs.last().expect("order >= 1");
            if !res.is_zero() {
                return Err(format!(
                    "slot z{i} has residue {res} at {}",
                    pole.pole
                ));
            }
            slot.push((site, pole.order));
        }
        // Behaviour at oo: the polynomial part must be constant unless oo is
        // an allowed site, and the residue there must vanish too.
        if let Some(val) = diff_valuation(expr, v, &Point::Infinity) {
            if val < 0 {
                let site = classify(&Point::Infinity).ok_or_else(|| {
                    format!("slot z{i} has a pole at oo outside the allowed locus")
                })?;
                let res = residue_at(expr, v, &Point::Infinity).map_err(|e| e.to_string())?;
                if !res.is_zero() {
                    return Err(format!("slot z{i} has residue {res} at oo"));
                }
                slot.push((site, (-val) as u32));
            }
        }
        locus.push(slot);
    }
    Ok(locus)
}

/// Pole data for unstable entries, where the stability pole constraints do
/// not apply: report what is there without passing judgement.
pub fn describe_poles(
    curve: &SpectralCurve,
    ram: &RamificationData,
    arity: u32,
    expr: &RatFunc,
) -> Result<Vec<Vec<(PoleSite, u32)>>, String> {
    let mut locus = Vec::new();
    for i in 0..arity {
        let v = Var::Z(i as u16);
        let mut hints: Vec<Point> = ram.fixed.clone();
        for q in &ram.ptilde {
            hints.push(q.point.clone());
            hints.push(curve.sigma_point(&q.point).map_err(|e| e.to_string())?);
        }
        for j in 0..arity {
            if j != i {
                let zj = Point::Finite(RatFunc::var(Var::Z(j as u16)));
                hints.push(zj.clone());
                hints.push(curve.sigma_point(&zj).map_err(|e| e.to_string())?);
            }
        }
        let pf = partial_fractions(expr, v, &hints).map_err(|e| e.to_string())?;
        // Classify moving poles (z_i = z_j or z_i = sigma(z_j)) by site so
        // slot renaming downstream stays meaningful.
        let site_of = |p: &Point| -> PoleSite {
            for j in 0..arity {
                if j == i {
                    continue;
                }
                let zj = Point::Finite(RatFunc::var(Var::Z(j as u16)));
                if let Ok(s) = curve.sigma_point(&zj) {
                    if &s == p {
                        return PoleSite::SigmaOfVar(j);
                    }
                }
            }
            PoleSite::At(p.clone())
        };
        let mut slot: Vec<(PoleSite, u32)> =
            pf.poles.iter().map(|p| (site_of(&p.pole), p.order)).collect();
        if let Some(val) = diff_valuation(expr, v, &Point::Infinity) {
            if val < 0 {
                slot.push((PoleSite::At(Point::Infinity), (-val) as u32));
            }
        }
        locus.push(slot);
    }
    Ok(locus)
}
