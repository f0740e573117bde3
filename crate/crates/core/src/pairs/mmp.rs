use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{PairModel, RedundancyReport};
use crate::birational::PointSpec;
use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::rational::{serde_rational, Rational};
use crate::zariski::ZariskiDecomp;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MMPStep {
    pub contracted: String,
    pub rank_before: usize,
    #[serde(with = "serde_rational")]
    pub self_intersection: Rational,
    /// `-(K + Δ)·C`, strictly negative.
    #[serde(with = "serde_rational")]
    pub anticanonical_degree: Rational,
    /// `a` in `K + Δ = g*(K_Y + Δ_Y) + a C`.
    #[serde(with = "serde_rational")]
    pub discrepancy: Rational,
    /// `y > 0` in `D = g*(g_* D) + y C`.
    #[serde(with = "serde_rational")]
    pub exceptional_coefficient: Rational,
    /// For a `(-1)`-curve on a smooth model: the image point, described by
    /// its multiplicities on the remaining curves.
    pub blow_down: Option<PointSpec>,
    pub decomposition_before: ZariskiDecomp,
    #[serde(skip)]
    pub pair_before: PairModel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MMPTrace {
    pub steps: Vec<MMPStep>,
    pub final_pair: PairModel,
    /// Log discrepancies over the end model of every contracted curve,
    /// computed in one shot on the starting model.
    #[serde(serialize_with = "serde_rational::map::serialize")]
    pub total_log_discrepancies: BTreeMap<String, Rational>,
    pub final_klt: bool,
    pub final_terminal: bool,
    pub final_model_nef: bool,
}

impl MMPTrace {
    pub fn contracted(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.contracted.as_str()).collect()
    }

    /// The pair each step lands on.
    pub fn pair_after(&self, step: usize) -> &PairModel {
        self.steps
            .get(step + 1)
            .map_or(&self.final_pair, |s| &s.pair_before)
    }
}

/// Contracts, one at a time, the curve of `Supp N` on which `-(K + Δ)` is
/// most negative (lowest index on ties) until `N = 0`.
pub fn run_anticanonical_mmp(pair: &PairModel) -> Result<MMPTrace> {
    let max_steps = pair.surface().rank();
    let mut current = pair.clone();
    let mut steps = Vec::new();
    while !current.decomposition().negative.is_empty() {
        if steps.len() >= max_steps {
            return Err(Error::invariant(
                "MMP did not terminate within the Picard rank",
            ));
        }
        let step = mmp_step(&current)?;
        let surface = current.surface();
        let contraction = surface.contract(&[step.contracted.as_str()])?;
        let mut boundary = current.boundary().clone();
        boundary.remove(&step.contracted);
        let next = PairModel::new(contraction.model, boundary)?;
        steps.push(step);
        current = next;
    }

    let contracted: Vec<&str> = steps.iter().map(|s| s.contracted.as_str()).collect();
    let total_log_discrepancies = one_shot_log_discrepancies(pair, &contracted)?;
    let all_positive = total_log_discrepancies.values().all(Signed::is_positive);
    let final_klt = pair.surface().is_smooth()
        && all_positive
        && current.boundary().values().all(|x| x < &Rational::one());
    let final_terminal = final_klt
        && total_log_discrepancies
            .values()
            .all(|a| a > &Rational::one());
    let d = current.anticanonical();
    let final_model_nef = current
        .surface()
        .curves()
        .iter()
        .all(|c| !current.surface().dot(&d, &c.cls).is_negative());
    Ok(MMPTrace {
        steps,
        final_pair: current,
        total_log_discrepancies,
        final_klt,
        final_terminal,
        final_model_nef,
    })
}

fn mmp_step(pair: &PairModel) -> Result<MMPStep> {
    let surface = pair.surface();
    let zd = pair.decomposition();
    let d = pair.anticanonical();
    let mut best: Option<(usize, Rational)> = None;
    for (i, c) in surface.curves().iter().enumerate() {
        if !zd.negative.contains_key(&c.name) {
            continue;
        }
        let deg = surface.dot(&d, &c.cls);
        if best.as_ref().is_none_or(|(_, b)| &deg < b) {
            best = Some((i, deg));
        }
    }
    let (i, deg) = best.ok_or_else(|| Error::invariant("empty negative part"))?;
    if !deg.is_negative() {
        return Err(Error::invariant("no curve of Supp N is D-negative"));
    }
    let curve = &surface.curves()[i];
    let c2 = surface.dot(&curve.cls, &curve.cls);
    let k_c = surface.dot(surface.canonical(), &curve.cls);
    let blow_down = if surface.is_smooth() && c2 == -Rational::one() && k_c == -Rational::one() {
        image_point(pair, &curve.name)?
    } else {
        None
    };
    Ok(MMPStep {
        contracted: curve.name.clone(),
        rank_before: surface.rank(),
        discrepancy: -&deg / &c2,
        exceptional_coefficient: &deg / &c2,
        anticanonical_degree: deg,
        self_intersection: c2,
        blow_down,
        decomposition_before: zd.clone(),
        pair_before: pair.clone(),
    })
}

/// The point `E` maps to: each other curve passes through it with
/// multiplicity `C·E`. `None` if some intersection is not a nonnegative
/// integer.
fn image_point(pair: &PairModel, e: &str) -> Result<Option<PointSpec>> {
    let surface = pair.surface();
    let e_cls = surface.class_of(e)?;
    let mut incidences = BTreeMap::new();
    for c in surface.curves() {
        if c.name == e {
            continue;
        }
        let m = surface.dot(&c.cls, e_cls);
        if m.is_negative() || !m.is_integer() {
            return Ok(None);
        }
        if !m.is_zero() {
            let m: u32 = match m.to_integer().try_into() {
                Ok(m) => m,
                Err(_) => return Ok(None),
            };
            incidences.insert(c.name.clone(), m);
        }
    }
    Ok(Some(PointSpec::from_map(incidences)))
}

/// `1 + a_i - δ_i` where `(K + Δ - Σ a_i C_i)·C_j = 0` over all of `curves`.
pub(crate) fn one_shot_log_discrepancies(
    pair: &PairModel,
    curves: &[&str],
) -> Result<BTreeMap<String, Rational>> {
    if curves.is_empty() {
        return Ok(BTreeMap::new());
    }
    let surface = pair.surface();
    let classes: Vec<&DivisorClass> = curves
        .iter()
        .map(|n| surface.class_of(n))
        .collect::<Result<_>>()?;
    let k_delta = surface.canonical() + &pair.boundary_class();
    let targets: Vec<Rational> = classes.iter().map(|c| surface.dot(&k_delta, c)).collect();
    let a = surface.lattice().solve_on_support(&classes, &targets)?;
    Ok(curves
        .iter()
        .zip(a)
        .map(|(n, a)| {
            (
                n.to_string(),
                Rational::one() + a - pair.boundary_coefficient(n),
            )
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PkltCertificate {
    pub certified: bool,
    /// Largest coefficient of `N + Δ` along the run.
    #[serde(with = "serde_rational")]
    pub max_coefficient: Rational,
    pub witness: MMPTrace,
}

/// Certifies potential klt-ness when the MMP ends model-nef on a klt pair
/// and every coefficient of `N + Δ` met along the way is below 1.
pub fn pklt_certificate(pair: &PairModel) -> Result<PkltCertificate> {
    let witness = run_anticanonical_mmp(pair)?;
    let mut max_coefficient = Rational::zero();
    let pairs = witness
        .steps
        .iter()
        .map(|s| &s.pair_before)
        .chain(std::iter::once(&witness.final_pair));
    for p in pairs {
        let mut total = p.boundary().clone();
        for (c, x) in &p.decomposition().negative {
            *total.entry(c.clone()).or_insert_with(Rational::zero) += x;
        }
        if let Some(m) = total.into_values().max() {
            max_coefficient = max_coefficient.max(m);
        }
    }
    let certified =
        witness.final_model_nef && witness.final_klt && max_coefficient < Rational::one();
    Ok(PkltCertificate {
        certified,
        max_coefficient,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// A `(-1)`-curve on a smooth model; the inverse is a blow-up.
    BlowDown,
    /// The contraction creates a singular point, and the upstairs surface is
    /// already its minimal resolution.
    ResolutionIdentical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationStep {
    pub contracted: String,
    pub kind: StepKind,
    pub point: Option<PointSpec>,
    pub redundancy: Option<RedundancyReport>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub ok: bool,
    pub steps: Vec<FactorizationStep>,
}

/// For every blow-down step, checks that the image point is a redundant
/// point of the pair below, so the inverse map is a redundant blow-up.
pub fn check_mmp_redundant_factorization(trace: &MMPTrace) -> Result<FactorizationReport> {
    let mut steps = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        let report = match &step.blow_down {
            Some(p) => {
                let r = trace.pair_after(i).is_redundant_point(p)?;
                FactorizationStep {
                    contracted: step.contracted.clone(),
                    kind: StepKind::BlowDown,
                    point: Some(p.clone()),
                    ok: r.redundant,
                    redundancy: Some(r),
                }
            }
            None => FactorizationStep {
                contracted: step.contracted.clone(),
                kind: StepKind::ResolutionIdentical,
                point: None,
                redundancy: None,
                ok: true,
            },
        };
        steps.push(report);
    }
    Ok(FactorizationReport {
        ok: steps.iter().all(|s| s.ok),
        steps,
    })
}
