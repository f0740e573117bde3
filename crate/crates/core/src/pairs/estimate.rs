use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::PairModel;
use crate::birational::{chain_name, format_chain, PointSpec};
use crate::error::{Error, Result};
use crate::rational::{serde_rational, Extended, Rational};
use crate::zariski::DivisorOver;

/// A divisor over the pair with its log discrepancy and `σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumeratedDivisor {
    /// Tracked curve name for depth 0, `None` for chains.
    pub curve: Option<String>,
    pub chain: Vec<PointSpec>,
    #[serde(with = "serde_rational")]
    pub log_discrepancy: Rational,
    #[serde(with = "serde_rational")]
    pub sigma: Rational,
}

impl EnumeratedDivisor {
    pub fn depth(&self) -> usize {
        self.chain.len()
    }

    pub fn divisor_over(&self) -> DivisorOver {
        match &self.curve {
            Some(c) => DivisorOver::Curve(c.clone()),
            None => DivisorOver::Chain(self.chain.clone()),
        }
    }

    pub fn potential_log_discrepancy(&self) -> Rational {
        &self.log_discrepancy - &self.sigma
    }

    pub fn label(&self) -> String {
        match &self.curve {
            Some(c) => c.clone(),
            None => format_chain(&self.chain),
        }
    }
}

/// Intersection numbers, crepant boundary and `N`-coefficients of the curves
/// on a model reached by multiplicity-one blow-ups.
#[derive(Clone)]
struct Incidence {
    names: Vec<String>,
    meet: Vec<Vec<Rational>>,
    boundary: Vec<Rational>,
    sigma: Vec<Rational>,
}

impl Incidence {
    fn candidates(&self) -> Vec<Vec<usize>> {
        let n = self.names.len();
        let mut out: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for i in 0..n {
            for j in i + 1..n {
                if self.meet[i][j] >= Rational::one() {
                    out.push(vec![i, j]);
                }
            }
        }
        out
    }

    fn blow_up(&self, through: &[usize], name: String) -> (Incidence, Rational, Rational) {
        let mut next = self.clone();
        let n = self.names.len();
        for (a, &i) in through.iter().enumerate() {
            for &j in &through[a + 1..] {
                next.meet[i][j] -= Rational::one();
                next.meet[j][i] -= Rational::one();
            }
        }
        for (i, row) in next.meet.iter_mut().enumerate() {
            row.push(if through.contains(&i) {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
        let mut last: Vec<Rational> = (0..n).map(|i| next.meet[i][n].clone()).collect();
        last.push(-Rational::one());
        next.meet.push(last);
        let mult_b: Rational = through.iter().map(|&i| &self.boundary[i]).sum();
        let sigma: Rational = through.iter().map(|&i| &self.sigma[i]).sum();
        next.names.push(name);
        next.boundary.push(&mult_b - Rational::one());
        next.sigma.push(sigma.clone());
        (next, Rational::from_integer(2.into()) - mult_b, sigma)
    }

    fn point(&self, through: &[usize]) -> PointSpec {
        PointSpec::on(
            &through
                .iter()
                .map(|&i| (self.names[i].as_str(), 1))
                .collect::<Vec<_>>(),
        )
    }
}

fn root_incidence(pair: &PairModel) -> Incidence {
    let surface = pair.surface();
    let curves = surface.curves();
    let zd = pair.decomposition();
    Incidence {
        names: curves.iter().map(|c| c.name.clone()).collect(),
        meet: curves
            .iter()
            .map(|a| curves.iter().map(|b| surface.dot(&a.cls, &b.cls)).collect())
            .collect(),
        boundary: curves
            .iter()
            .map(|c| pair.boundary_coefficient(&c.name))
            .collect(),
        sigma: curves.iter().map(|c| zd.coefficient(&c.name)).collect(),
    }
}

/// Every tracked curve, and every chain of at most `max_depth` blow-ups
/// whose points are general points of one curve or nodes `C ∩ C'` with
/// `C·C' ≥ 1`, all with multiplicity one.
///
/// Log discrepancies and `σ` are carried through the chain by the
/// multiplicity formulas rather than by building each model.
pub fn enumerate_chains(pair: &PairModel, max_depth: usize) -> Result<Vec<EnumeratedDivisor>> {
    let surface = pair.surface();
    if max_depth > 0 && !surface.is_smooth() {
        return Err(Error::NotSmooth);
    }
    let root = root_incidence(pair);
    let mut out: Vec<EnumeratedDivisor> = surface
        .curves()
        .iter()
        .enumerate()
        .map(|(i, c)| EnumeratedDivisor {
            curve: Some(c.name.clone()),
            chain: Vec::new(),
            log_discrepancy: Rational::one() - &root.boundary[i],
            sigma: root.sigma[i].clone(),
        })
        .collect();
    let mut chain = Vec::new();
    descend(&root, max_depth, &mut chain, &mut out);
    Ok(out)
}

/// The chains of [`enumerate_chains`] that start by blowing up `first`, with
/// up to `max_depth` further points. `first` must have multiplicity one on
/// every curve through it.
pub fn enumerate_chains_after(
    pair: &PairModel,
    first: &PointSpec,
    max_depth: usize,
) -> Result<Vec<EnumeratedDivisor>> {
    let surface = pair.surface();
    if !surface.is_smooth() {
        return Err(Error::NotSmooth);
    }
    surface.blow_up(first, &chain_name(1))?;
    if first.incidences().values().any(|&m| m != 1) {
        return Err(Error::InconsistentIncidence(format!(
            "`{first}` has a multiplicity other than one"
        )));
    }
    let root = root_incidence(pair);
    let through: Vec<usize> = first
        .incidences()
        .keys()
        .map(|c| surface.curve_index(c).expect("validated by the blow-up"))
        .collect();
    let (next, a, sigma) = root.blow_up(&through, chain_name(1));
    let mut chain = vec![first.clone()];
    let mut out = vec![EnumeratedDivisor {
        curve: None,
        chain: chain.clone(),
        log_discrepancy: a,
        sigma,
    }];
    descend(&next, max_depth, &mut chain, &mut out);
    Ok(out)
}

fn descend(
    state: &Incidence,
    remaining: usize,
    chain: &mut Vec<PointSpec>,
    out: &mut Vec<EnumeratedDivisor>,
) {
    if remaining == 0 {
        return;
    }
    for through in state.candidates() {
        let point = state.point(&through);
        let (next, a, sigma) = state.blow_up(&through, chain_name(chain.len() + 1));
        chain.push(point);
        out.push(EnumeratedDivisor {
            curve: None,
            chain: chain.clone(),
            log_discrepancy: a,
            sigma,
        });
        descend(&next, remaining - 1, chain, out);
        chain.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LctEstimate {
    /// Minimum of `A/σ` over enumerated divisors with `σ > 0`.
    pub min_ratio: Extended,
    /// Where the minimum is attained.
    pub binding: Option<String>,
    /// Minimum of `(A - σ)/σ` over tracked curves with `σ > 0`.
    pub epsilon: Extended,
    pub certified_lower_bound: Extended,
    /// Whether `A - σ ≥ ε σ` held for every enumerated divisor.
    pub gap_holds: bool,
    pub divisors_examined: usize,
}

/// Estimates `lct_σ(X, Δ; -(K + Δ))` from the divisors of
/// [`enumerate_chains`]. `ε` is taken over the tracked curves only.
pub fn lct_sigma_estimate(pair: &PairModel, depth: usize) -> Result<LctEstimate> {
    let divisors = enumerate_chains(pair, depth)?;
    let mut epsilon = Extended::Infinite;
    for d in divisors
        .iter()
        .filter(|d| d.curve.is_some() && d.sigma.is_positive())
    {
        let ratio = (&d.log_discrepancy - &d.sigma) / &d.sigma;
        epsilon = epsilon.min(Extended::Finite(ratio));
    }
    let mut min_ratio = Extended::Infinite;
    let mut binding = None;
    let mut gap_holds = true;
    for d in &divisors {
        if !d.sigma.is_positive() {
            continue;
        }
        let ratio = Extended::Finite(&d.log_discrepancy / &d.sigma);
        if ratio < min_ratio {
            min_ratio = ratio;
            binding = Some(d.label());
        }
        if let Extended::Finite(eps) = &epsilon {
            if &d.log_discrepancy - &d.sigma < eps * &d.sigma {
                gap_holds = false;
            }
        }
    }
    let certified_lower_bound = match &epsilon {
        Extended::Finite(e) => Extended::Finite(e + Rational::one()),
        Extended::Infinite => Extended::Infinite,
    };
    Ok(LctEstimate {
        min_ratio,
        binding,
        epsilon,
        certified_lower_bound,
        gap_holds,
        divisors_examined: divisors.len(),
    })
}
