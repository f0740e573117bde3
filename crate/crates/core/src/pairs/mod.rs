//! Pairs `(X, Δ)` with `D = -(K_X + Δ)` pseudoeffective: (potential) log
//! discrepancies, redundant points, the anticanonical MMP and σ-estimates.

mod estimate;
mod mmp;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use estimate::{
    enumerate_chains, enumerate_chains_after, lct_sigma_estimate, EnumeratedDivisor, LctEstimate,
};
pub use mmp::{
    check_mmp_redundant_factorization, pklt_certificate, run_anticanonical_mmp,
    FactorizationReport, FactorizationStep, MMPStep, MMPTrace, PkltCertificate, StepKind,
};

use crate::birational::{blow_up_chain, PointSpec, SurfaceModel};
use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::rational::{format_rational, serde_rational, Rational};
use crate::zariski::{self, zariski_decompose, DivisorOver, ZariskiDecomp};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairModel {
    surface: SurfaceModel,
    #[serde(serialize_with = "serde_rational::map::serialize")]
    boundary: BTreeMap<String, Rational>,
    #[serde(skip)]
    decomposition: ZariskiDecomp,
}

impl PairModel {
    /// Boundary coefficients must lie in `[0, 1]` and `-(K + Δ)` must have a
    /// Zariski decomposition among the tracked curves. Zero coefficients are
    /// dropped.
    pub fn new(surface: SurfaceModel, boundary: BTreeMap<String, Rational>) -> Result<Self> {
        let mut boundary = boundary;
        boundary.retain(|_, x| !x.is_zero());
        for (name, x) in &boundary {
            surface.curve(name)?;
            if x.is_negative() || x > &Rational::one() {
                return Err(Error::invariant(format!(
                    "boundary coefficient {} of `{name}` is outside [0, 1]",
                    format_rational(x)
                )));
            }
        }
        let d = anticanonical(&surface, &boundary)?;
        let decomposition = zariski_decompose(&surface, &d)?;
        Ok(PairModel {
            surface,
            boundary,
            decomposition,
        })
    }

    pub fn without_boundary(surface: SurfaceModel) -> Result<Self> {
        PairModel::new(surface, BTreeMap::new())
    }

    pub fn surface(&self) -> &SurfaceModel {
        &self.surface
    }

    pub fn boundary(&self) -> &BTreeMap<String, Rational> {
        &self.boundary
    }

    pub fn boundary_coefficient(&self, curve: &str) -> Rational {
        self.boundary
            .get(curve)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn boundary_class(&self) -> DivisorClass {
        self.surface
            .class_from_curves(&self.boundary)
            .expect("boundary curves are tracked")
    }

    /// `D = -(K + Δ)`.
    pub fn anticanonical(&self) -> DivisorClass {
        anticanonical(&self.surface, &self.boundary).expect("boundary curves are tracked")
    }

    /// Zariski decomposition of `-(K + Δ)`.
    pub fn decomposition(&self) -> &ZariskiDecomp {
        &self.decomposition
    }

    /// `A_{X,Δ}(E)`. A tracked curve has `1 - coeff_Δ`.
    pub fn log_discrepancy(&self, e: &DivisorOver) -> Result<Rational> {
        match e {
            DivisorOver::Curve(name) => {
                self.surface.curve(name)?;
                Ok(Rational::one() - self.boundary_coefficient(name))
            }
            DivisorOver::Chain(chain) => {
                crate::birational::log_discrepancy_chain(&self.surface, &self.boundary, chain)
            }
        }
    }

    /// `σ_E(-(K + Δ))`.
    pub fn sigma(&self, e: &DivisorOver) -> Result<Rational> {
        zariski::sigma(&self.surface, &self.decomposition, e)
    }

    /// `ā(E) = A_{X,Δ}(E) - σ_E(-(K + Δ))`.
    pub fn potential_log_discrepancy(&self, e: &DivisorOver) -> Result<Rational> {
        Ok(self.log_discrepancy(e)? - self.sigma(e)?)
    }

    /// Whether `mult_p(N + Δ) ≥ 1`.
    pub fn is_redundant_point(&self, p: &PointSpec) -> Result<RedundancyReport> {
        for c in p.incidences().keys() {
            self.surface.curve(c)?;
        }
        let mult_n = p.mult_of(&self.decomposition.negative);
        let mult_boundary = p.mult_of(&self.boundary);
        Ok(RedundancyReport {
            redundant: &mult_n + &mult_boundary >= Rational::one(),
            mult_n,
            mult_boundary,
        })
    }

    /// Blows up a redundant point. Returns the new pair, whose boundary is
    /// the strict transform of `Δ`, and the decomposition transported from
    /// below. The pair's own decomposition is recomputed independently.
    pub fn redundant_blow_up(
        &self,
        p: &PointSpec,
        name: &str,
    ) -> Result<(PairModel, ZariskiDecomp)> {
        let report = self.is_redundant_point(p)?;
        if !report.redundant {
            return Err(Error::NotRedundant {
                mult: format_rational(&(report.mult_n + report.mult_boundary)),
            });
        }
        let up = self.surface.blow_up(p, name)?;
        let transported =
            zariski::transport_redundant(&up, &self.decomposition, &report.mult_boundary)?;
        let pair = PairModel::new(up, self.boundary.clone())?;
        Ok((pair, transported))
    }

    /// Plain blow-up of any point, boundary by strict transform.
    pub fn blow_up(&self, p: &PointSpec, name: &str) -> Result<PairModel> {
        PairModel::new(self.surface.blow_up(p, name)?, self.boundary.clone())
    }

    /// Chains of blow-ups over the pair with their log discrepancies.
    pub fn blow_up_chain(&self, chain: &[PointSpec]) -> Result<crate::birational::ChainModel> {
        blow_up_chain(&self.surface, &self.boundary, chain)
    }
}

fn anticanonical(
    surface: &SurfaceModel,
    boundary: &BTreeMap<String, Rational>,
) -> Result<DivisorClass> {
    let delta = surface.class_from_curves(boundary)?;
    Ok(-&(surface.canonical() + &delta))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RedundancyReport {
    pub redundant: bool,
    #[serde(with = "serde_rational")]
    pub mult_n: Rational,
    #[serde(with = "serde_rational")]
    pub mult_boundary: Rational,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birational::TrackedCurve;
    use crate::lattice::IntersectionLattice;
    use crate::rational::{int, q};

    fn plane_with_line(coeff: Rational) -> PairModel {
        let lattice = IntersectionLattice::new(vec![vec![int(1)]], vec!["H".into()]).unwrap();
        let s = SurfaceModel::new(
            lattice,
            DivisorClass::from_ints(&[-3]),
            vec![TrackedCurve::new("L", DivisorClass::from_ints(&[1]))],
            vec![DivisorClass::from_ints(&[1])],
        )
        .unwrap();
        PairModel::new(s, BTreeMap::from([("L".to_string(), coeff)])).unwrap()
    }

    #[test]
    fn point_on_a_reduced_line_is_redundant() {
        let pair = plane_with_line(int(1));
        assert!(pair.decomposition().negative.is_empty());
        let p: PointSpec = "L".parse().unwrap();
        let r = pair.is_redundant_point(&p).unwrap();
        assert!(r.redundant);
        assert_eq!(r.mult_boundary, int(1));
        let (up, transported) = pair.redundant_blow_up(&p, "E").unwrap();
        assert!(transported.same_parts(up.decomposition()));
        assert_eq!(transported.coefficient("E"), int(0));
        assert_eq!(transported.positive, DivisorClass::from_ints(&[2, 0]));
    }

    #[test]
    fn non_redundant_point_is_refused() {
        let pair = plane_with_line(q(1, 2));
        let p: PointSpec = "L".parse().unwrap();
        assert!(!pair.is_redundant_point(&p).unwrap().redundant);
        assert!(matches!(
            pair.redundant_blow_up(&p, "E"),
            Err(Error::NotRedundant { .. })
        ));
        let up = pair.surface().blow_up(&p, "E").unwrap();
        let raw = zariski::transported_decomposition(&up, pair.decomposition(), &q(1, 2)).unwrap();
        assert_eq!(raw.coefficient("E"), q(-1, 2));
    }

    #[test]
    fn boundary_out_of_range_rejected() {
        let lattice = IntersectionLattice::new(vec![vec![int(1)]], vec!["H".into()]).unwrap();
        let s = SurfaceModel::new(
            lattice,
            DivisorClass::from_ints(&[-3]),
            vec![TrackedCurve::new("L", DivisorClass::from_ints(&[1]))],
            vec![],
        )
        .unwrap();
        assert!(PairModel::new(s.clone(), BTreeMap::from([("L".to_string(), q(3, 2))])).is_err());
        assert!(PairModel::new(s, BTreeMap::from([("M".to_string(), q(1, 2))])).is_err());
    }

    #[test]
    fn potential_log_discrepancy_of_a_boundary_curve() {
        let pair = plane_with_line(q(1, 3));
        let l = DivisorOver::Curve("L".into());
        assert_eq!(pair.log_discrepancy(&l).unwrap(), q(2, 3));
        assert_eq!(pair.potential_log_discrepancy(&l).unwrap(), q(2, 3));
        let e = DivisorOver::Chain(vec!["L".parse().unwrap()]);
        assert_eq!(pair.log_discrepancy(&e).unwrap(), q(5, 3));
    }
}
