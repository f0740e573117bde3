//! Zariski decomposition `D = P + N` relative to the tracked curves of a
//! model, and the asymptotic orders of vanishing `σ_E` read off from it.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::birational::{blow_up_chain, PointSpec, SurfaceModel};
use crate::error::{Error, Result};
use crate::lattice::{linalg, DivisorClass, NegDefCertificate};
use crate::rational::{format_rational, one, Rational};

/// How far the nefness of `P` is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NefScope {
    /// `P` is a nonnegative combination of the model's nef axioms.
    AxiomCone,
    /// `P` is only known to be nonnegative on every tracked curve.
    TrackedCurves,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZariskiDecomp {
    pub positive: DivisorClass,
    /// Nonzero coefficients of the negative part, by curve name.
    #[serde(serialize_with = "crate::rational::serde_rational::map::serialize")]
    pub negative: BTreeMap<String, Rational>,
    pub negative_class: DivisorClass,
    /// Negative definiteness of `Supp N`, in the order of [`Self::negative`].
    pub support_certificate: NegDefCertificate,
    pub nef_scope: NefScope,
    /// Rounds of the support-growing loop.
    pub iterations: usize,
}

impl ZariskiDecomp {
    pub fn coefficient(&self, curve: &str) -> Rational {
        self.negative
            .get(curve)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Equality of `P` and `N`, ignoring how they were obtained.
    pub fn same_parts(&self, other: &ZariskiDecomp) -> bool {
        self.positive == other.positive && self.negative == other.negative
    }

    pub fn support(&self) -> Vec<&str> {
        self.negative.keys().map(String::as_str).collect()
    }
}

/// Computes the Zariski decomposition of `d` among the tracked curves.
///
/// Starting from an empty support, solve `(D - N)·C = 0` on the support and
/// add every curve on which `D - N` is still negative, until none is left.
pub fn zariski_decompose(model: &SurfaceModel, d: &DivisorClass) -> Result<ZariskiDecomp> {
    zariski_decompose_from(model, d, &[])
}

/// As [`zariski_decompose`], with the support loop started from `seed`.
/// The seed must be contained in the true support of `N`.
pub fn zariski_decompose_from(
    model: &SurfaceModel,
    d: &DivisorClass,
    seed: &[&str],
) -> Result<ZariskiDecomp> {
    if d.len() != model.rank() {
        return Err(Error::DimensionMismatch {
            expected: model.rank(),
            found: d.len(),
        });
    }
    let curves = model.curves();
    let mut support: BTreeSet<usize> = seed
        .iter()
        .map(|n| {
            model
                .curve_index(n)
                .ok_or_else(|| Error::UnknownCurve(n.to_string()))
        })
        .collect::<Result<_>>()?;
    let d_dot: Vec<Rational> = curves.iter().map(|c| model.dot(d, &c.cls)).collect();
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut iterations = 0;
    loop {
        let idx: Vec<usize> = support.iter().copied().collect();
        let classes: Vec<&DivisorClass> = idx.iter().map(|&i| &curves[i].cls).collect();
        if !idx.is_empty() {
            let gram = model.lattice().gram_of(&classes)?;
            let cert = NegDefCertificate::for_matrix(idx.clone(), &gram);
            if !cert.is_valid() {
                return Err(Error::NoZariskiDecomposition(format!(
                    "support {:?} is not negative definite",
                    idx.iter().map(|&i| &curves[i].name).collect::<Vec<_>>()
                )));
            }
            let targets: Vec<Rational> = idx.iter().map(|&i| d_dot[i].clone()).collect();
            coeffs = linalg::solve_square(&gram, &targets).ok_or_else(|| Error::Singular {
                support: idx.iter().map(|&i| curves[i].name.clone()).collect(),
            })?;
        }
        iterations += 1;
        let mut n = DivisorClass::zero(model.rank());
        for (x, c) in coeffs.iter().zip(&classes) {
            n.add_scaled(x, c);
        }
        let grow: Vec<usize> = (0..curves.len())
            .filter(|i| !support.contains(i))
            .filter(|&i| (&d_dot[i] - model.dot(&n, &curves[i].cls)).is_negative())
            .collect();
        if grow.is_empty() {
            let negative: BTreeMap<String, Rational> = idx
                .iter()
                .zip(&coeffs)
                .filter(|(_, x)| !x.is_zero())
                .map(|(&i, x)| (curves[i].name.clone(), x.clone()))
                .collect();
            if let Some((name, x)) = negative.iter().find(|(_, x)| x.is_negative()) {
                return Err(Error::NoZariskiDecomposition(format!(
                    "negative coefficient {} on `{name}`",
                    format_rational(x)
                )));
            }
            return finish(model, d, negative, n, iterations);
        }
        support.extend(grow);
    }
}

fn finish(
    model: &SurfaceModel,
    d: &DivisorClass,
    negative: BTreeMap<String, Rational>,
    negative_class: DivisorClass,
    iterations: usize,
) -> Result<ZariskiDecomp> {
    let positive = d - &negative_class;
    let names: Vec<&str> = negative.keys().map(String::as_str).collect();
    let support_certificate = model.negative_definite(&names)?;
    let nef_scope = nef_scope(model, &positive);
    Ok(ZariskiDecomp {
        positive,
        negative,
        negative_class,
        support_certificate,
        nef_scope,
        iterations,
    })
}

/// [`NefScope::AxiomCone`] if the solution found for `p = Σ λ_i A_i` has all
/// `λ_i ≥ 0`.
pub fn nef_scope(model: &SurfaceModel, p: &DivisorClass) -> NefScope {
    let axioms = model.nef_axioms();
    if p.is_zero() {
        return NefScope::AxiomCone;
    }
    if axioms.is_empty() {
        return NefScope::TrackedCurves;
    }
    let rows: Vec<Vec<Rational>> = (0..p.len())
        .map(|i| axioms.iter().map(|a| a.coords()[i].clone()).collect())
        .collect();
    match linalg::solve_any(&rows, p.coords()) {
        Some(lambda) if lambda.iter().all(|x| !x.is_negative()) => NefScope::AxiomCone,
        _ => NefScope::TrackedCurves,
    }
}

/// Checks the defining properties of a decomposition of `d`.
pub fn validate(model: &SurfaceModel, d: &DivisorClass, zd: &ZariskiDecomp) -> Result<()> {
    let n = model.class_from_curves(&zd.negative)?;
    if n != zd.negative_class || &(&zd.positive + &n) != d {
        return Err(Error::invariant("D != P + N"));
    }
    for c in model.curves() {
        let pc = model.dot(&zd.positive, &c.cls);
        if pc.is_negative() {
            return Err(Error::invariant(format!("P is negative on `{}`", c.name)));
        }
        if let Some(x) = zd.negative.get(&c.name) {
            if !x.is_positive() {
                return Err(Error::invariant(format!(
                    "N has coefficient {x} on `{}`",
                    c.name
                )));
            }
            if !pc.is_zero() {
                return Err(Error::invariant(format!("P·{} != 0", c.name)));
            }
        }
    }
    if !zd.support_certificate.is_valid() {
        return Err(Error::invariant("Supp N is not negative definite"));
    }
    Ok(())
}

/// The decomposition `P̃ = f*P`, `Ñ = f*N + (mult_p Δ - 1) E` on a model `up`
/// whose last event blew up `p`, without re-solving and without checking
/// that `Ñ` is effective.
pub fn transported_decomposition(
    up: &SurfaceModel,
    down: &ZariskiDecomp,
    boundary_mult: &Rational,
) -> Result<ZariskiDecomp> {
    let record = match up.history().last() {
        Some(crate::birational::ModelEvent::BlowUp(r)) => r,
        _ => return Err(Error::invariant("model was not produced by a blow-up")),
    };
    let mut negative = up.pullback_divisor(&down.negative)?;
    let e = &record.exceptional_name;
    let coeff = negative.get(e).cloned().unwrap_or_else(Rational::zero) + boundary_mult - one();
    if coeff.is_zero() {
        negative.remove(e);
    } else {
        negative.insert(e.clone(), coeff);
    }
    let negative_class = up.class_from_curves(&negative)?;
    let positive = up.pullback_from_parent(&down.positive)?;
    let names: Vec<&str> = negative.keys().map(String::as_str).collect();
    let support_certificate = up.negative_definite(&names)?;
    let nef_scope = nef_scope(up, &positive);
    Ok(ZariskiDecomp {
        positive,
        negative,
        negative_class,
        support_certificate,
        nef_scope,
        iterations: 0,
    })
}

/// [`transported_decomposition`], failing with [`Error::NotRedundant`] when
/// `mult_p(N + Δ) < 1`.
pub fn transport_redundant(
    up: &SurfaceModel,
    down: &ZariskiDecomp,
    boundary_mult: &Rational,
) -> Result<ZariskiDecomp> {
    let zd = transported_decomposition(up, down, boundary_mult)?;
    if let Some((_, x)) = zd.negative.iter().find(|(_, x)| x.is_negative()) {
        return Err(Error::NotRedundant {
            mult: format_rational(&(x + one())),
        });
    }
    Ok(zd)
}

/// A prime divisor over a model: a tracked curve, or the last exceptional
/// divisor of a chain of blow-ups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorOver {
    Curve(String),
    Chain(Vec<PointSpec>),
}

/// `σ_E(D)`: the coefficient of `E` in the negative part of the pullback of
/// `D` to a model where `E` lives.
///
/// For a chain, `N(f*D) = f*N(D)`, so the coefficient is carried through the
/// blow-ups by `coeff(E_k) = mult_{p_k}(current N)`.
pub fn sigma(model: &SurfaceModel, zd: &ZariskiDecomp, e: &DivisorOver) -> Result<Rational> {
    match e {
        DivisorOver::Curve(name) => {
            model.curve(name)?;
            Ok(zd.coefficient(name))
        }
        DivisorOver::Chain(chain) => {
            if chain.is_empty() {
                return Err(Error::invariant("empty blow-up chain"));
            }
            blow_up_chain(model, &BTreeMap::new(), chain)?;
            Ok(sigma_along(&zd.negative, chain))
        }
    }
}

/// Carries a divisor on tracked curves through a chain, returning the
/// coefficient of the last exceptional. The chain is not validated.
pub(crate) fn sigma_along(divisor: &BTreeMap<String, Rational>, chain: &[PointSpec]) -> Rational {
    let mut current = divisor.clone();
    let mut last = Rational::zero();
    for (k, p) in chain.iter().enumerate() {
        last = p.mult_of(&current);
        current.insert(crate::birational::chain_name(k + 1), last.clone());
    }
    last
}

/// `σ_E(D)` computed by decomposing the pullback of `D` on the chain model.
pub fn sigma_by_decomposition(
    model: &SurfaceModel,
    d: &DivisorClass,
    chain: &[PointSpec],
) -> Result<Rational> {
    let cm = blow_up_chain(model, &BTreeMap::new(), chain)?;
    let pulled = d.padded(chain.len());
    let zd = zariski_decompose(&cm.model, &pulled)?;
    Ok(cm
        .exceptional
        .map_or_else(Rational::zero, |e| zd.coefficient(&e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birational::TrackedCurve;
    use crate::lattice::IntersectionLattice;
    use crate::rational::int;

    /// P² blown up at two points of a line `L`, so `L'² = -1`.
    fn line_through_two_points() -> SurfaceModel {
        let lattice = IntersectionLattice::new(vec![vec![int(1)]], vec!["H".into()]).unwrap();
        let s = SurfaceModel::new(
            lattice,
            DivisorClass::from_ints(&[-3]),
            vec![TrackedCurve::new("L", DivisorClass::from_ints(&[1]))],
            vec![DivisorClass::from_ints(&[1])],
        )
        .unwrap();
        s.blow_up(&"L".parse().unwrap(), "E1")
            .unwrap()
            .blow_up(&"L".parse().unwrap(), "E2")
            .unwrap()
    }

    fn combo(m: &SurfaceModel, terms: &[(&str, i64)]) -> DivisorClass {
        let map = terms
            .iter()
            .map(|(n, x)| (n.to_string(), int(*x)))
            .collect();
        m.class_from_curves(&map).unwrap()
    }

    #[test]
    fn negative_curve_is_its_own_negative_part() {
        let m = line_through_two_points();
        let d = combo(&m, &[("L", 1)]);
        let zd = zariski_decompose(&m, &d).unwrap();
        assert_eq!(zd.negative, BTreeMap::from([("L".to_string(), int(1))]));
        assert!(zd.positive.is_zero());
        validate(&m, &d, &zd).unwrap();
    }

    #[test]
    fn nef_divisor_has_empty_negative_part() {
        let m = line_through_two_points();
        let d = combo(&m, &[("L", 1), ("E1", 1)]);
        let zd = zariski_decompose(&m, &d).unwrap();
        assert!(zd.negative.is_empty());
        assert_eq!(zd.iterations, 1);
        validate(&m, &d, &zd).unwrap();
    }

    #[test]
    fn partial_negative_part() {
        let m = line_through_two_points();
        let d = combo(&m, &[("L", 2), ("E1", 1)]);
        let zd = zariski_decompose(&m, &d).unwrap();
        assert_eq!(zd.coefficient("L"), int(1));
        assert_eq!(zd.positive, combo(&m, &[("L", 1), ("E1", 1)]));
        validate(&m, &d, &zd).unwrap();
        // P = H - E2 is not in the cone of the pulled-back hyperplane class.
        assert_eq!(zd.nef_scope, NefScope::TrackedCurves);
    }

    #[test]
    fn axiom_cone_scope() {
        let m = line_through_two_points();
        let h = DivisorClass::from_ints(&[2, 0, 0]);
        let zd = zariski_decompose(&m, &h).unwrap();
        assert_eq!(zd.nef_scope, NefScope::AxiomCone);
    }

    #[test]
    fn not_pseudoeffective_fails() {
        let m = line_through_two_points();
        let d = combo(&m, &[("L", -1)]);
        assert!(zariski_decompose(&m, &d).is_err());
    }

    #[test]
    fn sigma_transport_matches_redecomposition() {
        let m = line_through_two_points();
        let d = combo(&m, &[("L", 3), ("E1", 1)]);
        let zd = zariski_decompose(&m, &d).unwrap();
        for chain in ["L", "L,E1", "L;L,~1", "E2;~1", "-"] {
            let chain = crate::birational::parse_chain(chain).unwrap();
            assert_eq!(
                sigma(&m, &zd, &DivisorOver::Chain(chain.clone())).unwrap(),
                sigma_by_decomposition(&m, &d, &chain).unwrap(),
            );
        }
    }
}
