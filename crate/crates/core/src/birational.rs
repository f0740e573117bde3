//! Smooth surface models as intersection lattices, and the birational moves
//! between them.
//!
//! Classes are stored in the *pullback basis*: blowing up appends one
//! coordinate for the new exceptional curve `E` with `E² = -1`, every old
//! class is pulled back by padding with a zero, and a strict transform is
//! `f*C - m E`. Contraction passes to the orthogonal complement of the
//! contracted curves with the induced rational pairing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{linalg, DivisorClass, IntersectionLattice, NegDefCertificate};
use crate::rational::{format_rational, int, serde_rational, Rational};

/// A prime curve whose class is tracked by the model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrackedCurve {
    pub name: String,
    pub cls: DivisorClass,
    /// Index into the model history of the blow-up that created this curve.
    pub is_exceptional_of: Option<usize>,
}

impl TrackedCurve {
    pub fn new(name: impl Into<String>, cls: DivisorClass) -> Self {
        TrackedCurve {
            name: name.into(),
            cls,
            is_exceptional_of: None,
        }
    }
}

/// A point described only by which tracked curves pass through it and with
/// what multiplicity. The empty map is a point off every tracked curve.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PointSpec {
    incidences: BTreeMap<String, u32>,
}

impl PointSpec {
    pub fn free() -> Self {
        PointSpec::default()
    }

    pub fn on<S: AsRef<str>>(incidences: &[(S, u32)]) -> Self {
        PointSpec {
            incidences: incidences
                .iter()
                .map(|(c, m)| (c.as_ref().to_string(), *m))
                .collect(),
        }
    }

    pub fn from_map(incidences: BTreeMap<String, u32>) -> Self {
        PointSpec { incidences }
    }

    pub fn incidences(&self) -> &BTreeMap<String, u32> {
        &self.incidences
    }

    pub fn multiplicity(&self, curve: &str) -> u32 {
        self.incidences.get(curve).copied().unwrap_or(0)
    }

    pub fn is_free(&self) -> bool {
        self.incidences.is_empty()
    }

    /// `Σ m_C(p) · coeff(C)`: the multiplicity at `p` of a divisor supported
    /// on tracked curves.
    pub fn mult_of(&self, divisor: &BTreeMap<String, Rational>) -> Rational {
        self.incidences
            .iter()
            .filter_map(|(c, m)| divisor.get(c).map(|x| x * int(*m as i64)))
            .sum()
    }

    /// Renames curves through the point (used to translate chains between
    /// models).
    pub fn renamed(&self, f: impl Fn(&str) -> String) -> PointSpec {
        PointSpec {
            incidences: self.incidences.iter().map(|(c, m)| (f(c), *m)).collect(),
        }
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.incidences.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self
            .incidences
            .iter()
            .map(|(c, m)| format!("{c}:{m}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PointSpec {
    type Err = Error;

    /// `C:1,E:2`, a bare name for multiplicity one, or `-` for a free point.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(PointSpec::free());
        }
        let mut incidences = BTreeMap::new();
        for (i, part) in s.split(',').enumerate() {
            let part = part.trim();
            let (name, mult) = match part.split_once(':') {
                Some((n, m)) => {
                    let m: u32 = m.trim().parse().map_err(|_| Error::Parse {
                        position: format!("point `{s}`, entry {}", i + 1),
                        message: format!("bad multiplicity in `{part}`"),
                    })?;
                    (n.trim(), m)
                }
                None => (part, 1),
            };
            if name.is_empty() || mult == 0 {
                return Err(Error::Parse {
                    position: format!("point `{s}`, entry {}", i + 1),
                    message: "expected NAME or NAME:MULT with MULT >= 1".into(),
                });
            }
            if incidences.insert(name.to_string(), mult).is_some() {
                return Err(Error::Parse {
                    position: format!("point `{s}`, entry {}", i + 1),
                    message: format!("curve `{name}` listed twice"),
                });
            }
        }
        Ok(PointSpec { incidences })
    }
}

/// Parses `p1;p2;...` into a chain of infinitely near points.
pub fn parse_chain(s: &str) -> Result<Vec<PointSpec>> {
    s.split(';').map(str::parse).collect()
}

pub fn format_chain(chain: &[PointSpec]) -> String {
    chain
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// Name given to the `k`-th exceptional curve of a blow-up chain (1-based).
/// Later points of a chain refer to earlier exceptionals by these names.
pub fn chain_name(k: usize) -> String {
    format!("~{k}")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowUpRecord {
    pub point: PointSpec,
    pub exceptional_name: String,
    /// Log discrepancy of the new exceptional over the first model in the
    /// history, with empty boundary.
    #[serde(with = "serde_rational")]
    pub log_discrepancy_over_root: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionRecord {
    pub curves: Vec<String>,
    #[serde(serialize_with = "serde_rational::map::serialize")]
    pub discrepancies: BTreeMap<String, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelEvent {
    BlowUp(BlowUpRecord),
    Contraction(ContractionRecord),
}

/// Numerical model of a projective surface: lattice, canonical class,
/// tracked prime curves, classes declared nef, and how it was built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceModel {
    lattice: IntersectionLattice,
    canonical: DivisorClass,
    curves: Vec<TrackedCurve>,
    nef_axioms: Vec<DivisorClass>,
    history: Vec<ModelEvent>,
    smooth: bool,
}

impl SurfaceModel {
    /// A smooth model. Validates the class lengths, curve-name uniqueness,
    /// adjunction integrality and that nef axioms are nonnegative on every
    /// tracked curve.
    pub fn new(
        lattice: IntersectionLattice,
        canonical: DivisorClass,
        curves: Vec<TrackedCurve>,
        nef_axioms: Vec<DivisorClass>,
    ) -> Result<Self> {
        for c in &curves {
            if c.name.starts_with('~') {
                return Err(Error::invariant(format!(
                    "curve name `{}` uses the reserved prefix `~`",
                    c.name
                )));
            }
        }
        let model = SurfaceModel {
            lattice,
            canonical,
            curves,
            nef_axioms,
            history: Vec::new(),
            smooth: true,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks every structural invariant of the model.
    pub fn validate(&self) -> Result<()> {
        let rank = self.rank();
        let check_len = |c: &DivisorClass| {
            if c.len() != rank {
                Err(Error::DimensionMismatch {
                    expected: rank,
                    found: c.len(),
                })
            } else {
                Ok(())
            }
        };
        check_len(&self.canonical)?;
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.curves {
            check_len(&c.cls)?;
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateCurve(c.name.clone()));
            }
            if c.cls.is_zero() {
                return Err(Error::invariant(format!(
                    "curve `{}` has zero class",
                    c.name
                )));
            }
            if self.smooth {
                let g = self.arithmetic_genus_of(&c.cls);
                if !g.is_integer() || g.is_negative() {
                    return Err(Error::invariant(format!(
                        "adjunction: curve `{}` has arithmetic genus {}",
                        c.name,
                        format_rational(&g)
                    )));
                }
            }
        }
        for (i, a) in self.nef_axioms.iter().enumerate() {
            check_len(a)?;
            for c in &self.curves {
                if self.lattice.dot(a, &c.cls).is_negative() {
                    return Err(Error::invariant(format!(
                        "nef axiom #{i} is negative on `{}`",
                        c.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &IntersectionLattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn curves(&self) -> &[TrackedCurve] {
        &self.curves
    }

    pub fn nef_axioms(&self) -> &[DivisorClass] {
        &self.nef_axioms
    }

    pub fn history(&self) -> &[ModelEvent] {
        &self.history
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn curve_index(&self, name: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.name == name)
    }

    pub fn curve(&self, name: &str) -> Result<&TrackedCurve> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn class_of(&self, name: &str) -> Result<&DivisorClass> {
        Ok(&self.curve(name)?.cls)
    }

    pub fn intersect(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Rational> {
        self.lattice.intersect(a, b)
    }

    pub(crate) fn dot(&self, a: &DivisorClass, b: &DivisorClass) -> Rational {
        self.lattice.dot(a, b)
    }

    pub fn curve_intersection(&self, a: &str, b: &str) -> Result<Rational> {
        Ok(self.dot(self.class_of(a)?, self.class_of(b)?))
    }

    /// `(C² + K·C)/2 + 1`.
    pub fn arithmetic_genus_of(&self, cls: &DivisorClass) -> Rational {
        let two = int(2);
        (self.dot(cls, cls) + self.dot(&self.canonical, cls)) / two + Rational::one()
    }

    /// The class `Σ coeff_C · C` of a divisor supported on tracked curves.
    pub fn class_from_curves(&self, divisor: &BTreeMap<String, Rational>) -> Result<DivisorClass> {
        let mut d = DivisorClass::zero(self.rank());
        for (name, x) in divisor {
            d.add_scaled(x, self.class_of(name)?);
        }
        Ok(d)
    }

    /// Negative-definiteness certificate for the named curves, in the order
    /// given; certificate indices are positions in [`Self::curves`].
    pub fn negative_definite(&self, names: &[&str]) -> Result<NegDefCertificate> {
        let mut idx = Vec::with_capacity(names.len());
        let mut classes = Vec::with_capacity(names.len());
        for n in names {
            let i = self
                .curve_index(n)
                .ok_or_else(|| Error::UnknownCurve(n.to_string()))?;
            idx.push(i);
            classes.push(&self.curves[i].cls);
        }
        self.lattice.negative_definite(&idx, &classes)
    }

    /// Log discrepancy over the root model (empty boundary) of an exceptional
    /// curve created by this model's history; `1` for any other curve.
    pub fn root_log_discrepancy(&self, name: &str) -> Result<Rational> {
        let curve = self.curve(name)?;
        Ok(match curve.is_exceptional_of {
            Some(h) => match &self.history[h] {
                ModelEvent::BlowUp(r) => r.log_discrepancy_over_root.clone(),
                ModelEvent::Contraction(_) => Rational::one(),
            },
            None => Rational::one(),
        })
    }

    /// Blows up a smooth point.
    ///
    /// Fails if the model is singular, the name is taken, a curve is
    /// unknown, two curves through `p` would be forced to meet negatively
    /// (`C·C' < m_C m_C'`), or a strict transform would get negative genus.
    pub fn blow_up(&self, p: &PointSpec, name: &str) -> Result<SurfaceModel> {
        if !self.smooth {
            return Err(Error::NotSmooth);
        }
        if self.curve_index(name).is_some() || self.lattice.basis_names().iter().any(|b| b == name)
        {
            return Err(Error::DuplicateCurve(name.to_string()));
        }
        let through: Vec<(usize, u32)> = p
            .incidences()
            .iter()
            .map(|(c, &m)| {
                if m == 0 {
                    return Err(Error::InconsistentIncidence(format!(
                        "zero multiplicity for `{c}`"
                    )));
                }
                self.curve_index(c)
                    .map(|i| (i, m))
                    .ok_or_else(|| Error::UnknownCurve(c.clone()))
            })
            .collect::<Result<_>>()?;

        for (a, &(i, mi)) in through.iter().enumerate() {
            let ci = &self.curves[i].cls;
            let drop = int((mi as i64) * (mi as i64 - 1) / 2);
            if self.arithmetic_genus_of(ci) < drop {
                return Err(Error::InconsistentIncidence(format!(
                    "`{}` cannot have a point of multiplicity {mi}",
                    self.curves[i].name
                )));
            }
            for &(j, mj) in &through[a + 1..] {
                let meet = self.dot(ci, &self.curves[j].cls);
                if meet < int(mi as i64 * mj as i64) {
                    return Err(Error::InconsistentIncidence(format!(
                        "`{}` and `{}` meet with multiplicity {} but the point needs {}",
                        self.curves[i].name,
                        self.curves[j].name,
                        format_rational(&meet),
                        mi * mj
                    )));
                }
            }
        }

        let rank = self.rank();
        let mut gram: Vec<Vec<Rational>> = self
            .lattice
            .gram()
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(Rational::zero());
                r
            })
            .collect();
        let mut last = vec![Rational::zero(); rank + 1];
        last[rank] = -Rational::one();
        gram.push(last);
        let mut names = self.lattice.basis_names().to_vec();
        names.push(name.to_string());
        let lattice = IntersectionLattice::new(gram, names)?;

        let e = DivisorClass::basis(rank + 1, rank);
        let mut curves: Vec<TrackedCurve> = self
            .curves
            .iter()
            .map(|c| TrackedCurve {
                name: c.name.clone(),
                cls: c.cls.padded(1),
                is_exceptional_of: c.is_exceptional_of,
            })
            .collect();
        for &(i, m) in &through {
            curves[i].cls.coords_mut()[rank] = int(-(m as i64));
        }

        // A(E) = 2 + Σ m_C (A(C) - 1) over earlier exceptionals through p.
        let mut log_disc = int(2);
        for &(i, m) in &through {
            let a = self.root_log_discrepancy(&self.curves[i].name)?;
            log_disc += int(m as i64) * (a - Rational::one());
        }

        let history_index = self.history.len();
        curves.push(TrackedCurve {
            name: name.to_string(),
            cls: e.clone(),
            is_exceptional_of: Some(history_index),
        });
        let mut canonical = self.canonical.padded(1);
        canonical += &e;

        let mut history = self.history.clone();
        history.push(ModelEvent::BlowUp(BlowUpRecord {
            point: p.clone(),
            exceptional_name: name.to_string(),
            log_discrepancy_over_root: log_disc,
        }));

        let child = SurfaceModel {
            lattice,
            canonical,
            curves,
            nef_axioms: self.nef_axioms.iter().map(|a| a.padded(1)).collect(),
            history,
            smooth: true,
        };
        child.validate()?;
        Ok(child)
    }

    fn last_blow_up(&self) -> Result<&BlowUpRecord> {
        match self.history.last() {
            Some(ModelEvent::BlowUp(r)) => Ok(r),
            _ => Err(Error::invariant("model was not produced by a blow-up")),
        }
    }

    /// `f*D` for a class `D` on the model this one was blown up from.
    pub fn pullback_from_parent(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.last_blow_up()?;
        if d.len() + 1 != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank() - 1,
                found: d.len(),
            });
        }
        Ok(d.padded(1))
    }

    /// `f*D` as a divisor on tracked curves, for `D` a combination of curves
    /// of the parent: each `C` becomes `C' + m_C(p) E`.
    pub fn pullback_divisor(
        &self,
        divisor: &BTreeMap<String, Rational>,
    ) -> Result<BTreeMap<String, Rational>> {
        let record = self.last_blow_up()?;
        let mut out = BTreeMap::new();
        let mut e_coeff = Rational::zero();
        for (name, x) in divisor {
            if name == &record.exceptional_name || self.curve_index(name).is_none() {
                return Err(Error::UnknownCurve(name.clone()));
            }
            out.insert(name.clone(), x.clone());
            e_coeff += x * int(record.point.multiplicity(name) as i64);
        }
        if !e_coeff.is_zero() {
            out.insert(record.exceptional_name.clone(), e_coeff);
        }
        Ok(out)
    }

    /// Contracts a set of curves with negative definite intersection matrix.
    pub fn contract(&self, names: &[&str]) -> Result<ContractionResult> {
        let mut sorted: Vec<&str> = names.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::invariant("contracted curves must be distinct"));
        }
        if names.is_empty() {
            return Err(Error::invariant("nothing to contract"));
        }
        let cert = self.negative_definite(names)?;
        if !cert.is_valid() {
            return Err(Error::NotNegativeDefinite {
                curves: names.iter().map(|s| s.to_string()).collect(),
            });
        }
        let classes: Vec<DivisorClass> = names
            .iter()
            .map(|n| self.class_of(n).cloned())
            .collect::<Result<_>>()?;
        let projector = Projector::new(self.lattice.clone(), classes);

        // (K - Σ a_i C_i)·C_j = 0
        let a = projector.coefficients(&self.canonical);
        let discrepancies: BTreeMap<String, Rational> = names
            .iter()
            .map(|n| n.to_string())
            .zip(a.iter().cloned())
            .collect();
        let minus_one = -Rational::one();
        let is_klt = a.iter().all(|x| x > &minus_one);
        let is_terminal = a.iter().all(Signed::is_positive);

        // Greedy basis of the orthogonal complement among projected basis
        // vectors. After a blow-up this is exactly the old basis.
        let rank = self.rank();
        let mut chosen: Vec<usize> = Vec::new();
        let mut basis_in_source: Vec<DivisorClass> = Vec::new();
        for i in 0..rank {
            let v = projector.project(&DivisorClass::basis(rank, i));
            if v.is_zero() {
                continue;
            }
            let mut rows: Vec<Vec<Rational>> = basis_in_source
                .iter()
                .map(|b| b.coords().to_vec())
                .collect();
            rows.push(v.coords().to_vec());
            if linalg::rank(&rows) == rows.len() {
                chosen.push(i);
                basis_in_source.push(v);
            }
        }
        let expected = rank - names.len();
        if basis_in_source.len() != expected {
            return Err(Error::invariant(format!(
                "complement has rank {} instead of {expected}",
                basis_in_source.len()
            )));
        }

        let gram: Vec<Vec<Rational>> = basis_in_source
            .iter()
            .map(|u| basis_in_source.iter().map(|v| self.dot(u, v)).collect())
            .collect();
        let basis_names = chosen
            .iter()
            .map(|&i| self.lattice.basis_names()[i].clone())
            .collect();
        let lattice = IntersectionLattice::new(gram, basis_names)?;

        let descend = Descent {
            projector,
            basis_in_source,
        };

        let mut curves = Vec::new();
        for c in &self.curves {
            if names.contains(&c.name.as_str()) {
                continue;
            }
            let cls = descend.pushforward(&c.cls)?;
            if cls.is_zero() {
                return Err(Error::invariant(format!(
                    "curve `{}` becomes numerically trivial",
                    c.name
                )));
            }
            curves.push(TrackedCurve {
                name: c.name.clone(),
                cls,
                is_exceptional_of: c.is_exceptional_of,
            });
        }
        let canonical = descend.pushforward(&self.canonical)?;
        let nef_axioms = self
            .nef_axioms
            .iter()
            .map(|a| descend.pushforward(a))
            .collect::<Result<_>>()?;

        let smooth_blow_down = names.len() == 1 && {
            let c = &self.curve(names[0])?.cls;
            self.dot(c, c) == -Rational::one() && self.dot(&self.canonical, c) == -Rational::one()
        };

        let mut history = self.history.clone();
        history.push(ModelEvent::Contraction(ContractionRecord {
            curves: names.iter().map(|s| s.to_string()).collect(),
            discrepancies: discrepancies.clone(),
        }));

        let model = SurfaceModel {
            lattice,
            canonical,
            curves,
            nef_axioms,
            history,
            smooth: self.smooth && smooth_blow_down,
        };
        model.validate()?;

        Ok(ContractionResult {
            model,
            discrepancies,
            is_klt,
            is_terminal,
            descent: descend,
        })
    }
}

/// Orthogonal projection away from a negative definite span of curves.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Projector {
    lattice: IntersectionLattice,
    classes: Vec<DivisorClass>,
    gram: Vec<Vec<Rational>>,
}

impl Projector {
    fn new(lattice: IntersectionLattice, classes: Vec<DivisorClass>) -> Self {
        let gram = classes
            .iter()
            .map(|a| classes.iter().map(|b| lattice.dot(a, b)).collect())
            .collect();
        Projector {
            lattice,
            classes,
            gram,
        }
    }

    /// `y` with `(v - Σ y_i C_i)·C_j = 0`.
    fn coefficients(&self, v: &DivisorClass) -> Vec<Rational> {
        let targets: Vec<Rational> = self
            .classes
            .iter()
            .map(|c| self.lattice.dot(v, c))
            .collect();
        linalg::solve_square(&self.gram, &targets)
            .expect("negative definite Gram matrix is invertible")
    }

    fn project(&self, v: &DivisorClass) -> DivisorClass {
        let y = self.coefficients(v);
        let mut out = v.clone();
        for (yi, c) in y.iter().zip(&self.classes) {
            out.add_scaled(&-yi, c);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Descent {
    projector: Projector,
    basis_in_source: Vec<DivisorClass>,
}

impl Descent {
    fn pushforward(&self, v: &DivisorClass) -> Result<DivisorClass> {
        if v.len() != self.projector.lattice.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.projector.lattice.rank(),
                found: v.len(),
            });
        }
        let target = self.projector.project(v);
        let n = target.len();
        let columns: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                self.basis_in_source
                    .iter()
                    .map(|b| b.coords()[i].clone())
                    .collect()
            })
            .collect();
        linalg::solve_any(&columns, target.coords())
            .map(DivisorClass::new)
            .ok_or_else(|| Error::invariant("projection left the complement"))
    }

    fn pullback(&self, y: &DivisorClass) -> Result<DivisorClass> {
        if y.len() != self.basis_in_source.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis_in_source.len(),
                found: y.len(),
            });
        }
        let mut out = DivisorClass::zero(self.projector.lattice.rank());
        for (c, b) in y.coords().iter().zip(&self.basis_in_source) {
            out.add_scaled(c, b);
        }
        Ok(out)
    }
}

/// A contraction `g: X → Y` together with the quotient model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionResult {
    pub model: SurfaceModel,
    /// `a_i` in `K_X = g*K_Y + Σ a_i C_i`.
    pub discrepancies: BTreeMap<String, Rational>,
    pub is_klt: bool,
    pub is_terminal: bool,
    descent: Descent,
}

impl ContractionResult {
    /// `g_* D`, as a class on the quotient.
    pub fn pushforward(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.descent.pushforward(d)
    }

    /// Mumford pullback `g* D` of a class on the quotient.
    pub fn pullback(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.descent.pullback(d)
    }

    /// Log discrepancies `1 + a_i` of the contracted curves over the quotient.
    pub fn log_discrepancies(&self) -> BTreeMap<String, Rational> {
        self.discrepancies
            .iter()
            .map(|(k, a)| (k.clone(), a + Rational::one()))
            .collect()
    }
}

/// A chain of blow-ups over a model, with log discrepancy bookkeeping.
#[derive(Clone, Debug)]
pub struct ChainModel {
    pub model: SurfaceModel,
    /// Name of the last exceptional curve; empty chains have none.
    pub exceptional: Option<String>,
    /// `A_{X,Δ}` of the last exceptional.
    pub log_discrepancy: Rational,
    /// `A_X` of the last exceptional with empty boundary.
    pub log_discrepancy_without_boundary: Rational,
    /// Crepant boundary `B` with `K_Y + B = f*(K_X + Δ)`, on tracked curves.
    pub crepant_boundary: BTreeMap<String, Rational>,
}

impl ChainModel {
    /// `ord_E(Δ) = A_X(E) - A_{X,Δ}(E)`.
    pub fn boundary_order(&self) -> Rational {
        &self.log_discrepancy_without_boundary - &self.log_discrepancy
    }
}

/// Blows up the points of `chain` one after another; the `k`-th exceptional
/// is named [`chain_name`]`(k)`. At each step the new exceptional enters the
/// crepant boundary with coefficient `mult_p(B) - 1`, so its log discrepancy
/// is `2 - mult_p(B)`.
pub fn blow_up_chain(
    model: &SurfaceModel,
    boundary: &BTreeMap<String, Rational>,
    chain: &[PointSpec],
) -> Result<ChainModel> {
    let mut current = model.clone();
    let mut crepant = boundary.clone();
    let mut crepant_plain: BTreeMap<String, Rational> = BTreeMap::new();
    let mut last = None;
    let mut a = Rational::one();
    let mut a_plain = Rational::one();
    for (k, p) in chain.iter().enumerate() {
        let name = chain_name(k + 1);
        current = current.blow_up(p, &name)?;
        let mult = p.mult_of(&crepant);
        let mult_plain = p.mult_of(&crepant_plain);
        a = int(2) - &mult;
        a_plain = int(2) - &mult_plain;
        crepant.insert(name.clone(), mult - Rational::one());
        crepant_plain.insert(name.clone(), mult_plain - Rational::one());
        last = Some(name);
    }
    crepant.retain(|_, x| !x.is_zero());
    Ok(ChainModel {
        model: current,
        exceptional: last,
        log_discrepancy: a,
        log_discrepancy_without_boundary: a_plain,
        crepant_boundary: crepant,
    })
}

/// `A_{X,Δ}(E)` for the last exceptional divisor of a nonempty chain.
pub fn log_discrepancy_chain(
    model: &SurfaceModel,
    boundary: &BTreeMap<String, Rational>,
    chain: &[PointSpec],
) -> Result<Rational> {
    if chain.is_empty() {
        return Err(Error::invariant("empty blow-up chain"));
    }
    Ok(blow_up_chain(model, boundary, chain)?.log_discrepancy)
}
