//! Scene files: a base lattice with curves, a list of blow-ups to replay, a
//! boundary and nef axioms. Also the built-in scenes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::birational::{PointSpec, SurfaceModel, TrackedCurve};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, IntersectionLattice};
use crate::pairs::PairModel;
use crate::rational::{format_rational, int, parse_rational, Rational};

pub const FORMAT: &str = "surface-scene/1";

/// A rational written as a canonical `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rat(pub Rational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(Rat)
            .map_err(serde::de::Error::custom)
    }
}

fn rats(xs: &[i64]) -> Vec<Rat> {
    xs.iter().map(|&x| Rat(int(x))).collect()
}

fn class(xs: &[Rat]) -> DivisorClass {
    DivisorClass::new(xs.iter().map(|r| r.0.clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub format: String,
    #[serde(default)]
    pub meta: String,
    pub base: BaseSpec,
    #[serde(default)]
    pub blowups: Vec<BlowUpSpec>,
    #[serde(default)]
    pub boundary: Vec<BoundaryEntry>,
    /// In base coordinates; pulled back through the blow-ups.
    #[serde(default)]
    pub nef_axioms: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_names: Option<Vec<String>>,
    pub gram: Vec<Vec<Rat>>,
    pub canonical: Vec<Rat>,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub name: String,
    pub class: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowUpSpec {
    pub name: String,
    #[serde(default)]
    pub point: Vec<IncidenceSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidenceSpec {
    pub curve: String,
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryEntry {
    pub curve: String,
    pub coeff: Rat,
}

impl BlowUpSpec {
    pub fn point_spec(&self) -> Result<PointSpec> {
        let mut map = BTreeMap::new();
        for inc in &self.point {
            if inc.mult == 0 {
                return Err(Error::InconsistentIncidence(format!(
                    "blow-up `{}`: zero multiplicity on `{}`",
                    self.name, inc.curve
                )));
            }
            if map.insert(inc.curve.clone(), inc.mult).is_some() {
                return Err(Error::InconsistentIncidence(format!(
                    "blow-up `{}`: `{}` listed twice",
                    self.name, inc.curve
                )));
            }
        }
        Ok(PointSpec::from_map(map))
    }
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Scene> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            position: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Scene> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            position: path.display().to_string(),
            message: e.to_string(),
        })?;
        Scene::from_json(&text)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenes always serialize");
        s.push('\n');
        s
    }

    /// The base surface alone, before any blow-up.
    pub fn base_model(&self) -> Result<SurfaceModel> {
        if self.format != FORMAT {
            return Err(Error::Parse {
                position: "format".into(),
                message: format!("expected \"{FORMAT}\", found \"{}\"", self.format),
            });
        }
        let b = &self.base;
        if b.gram.len() != b.rank {
            return Err(Error::DimensionMismatch {
                expected: b.rank,
                found: b.gram.len(),
            });
        }
        let names = match &b.basis_names {
            Some(n) => n.clone(),
            None => (0..b.rank).map(|i| format!("b{i}")).collect(),
        };
        let gram = b
            .gram
            .iter()
            .map(|row| row.iter().map(|r| r.0.clone()).collect())
            .collect();
        let lattice = IntersectionLattice::new(gram, names)?;
        let curves = b
            .curves
            .iter()
            .map(|c| TrackedCurve::new(c.name.clone(), class(&c.class)))
            .collect();
        let axioms = self.nef_axioms.iter().map(|a| class(a)).collect();
        SurfaceModel::new(lattice, class(&b.canonical), curves, axioms)
    }

    /// Replays the first `count` blow-ups.
    pub fn model_after(&self, count: usize) -> Result<SurfaceModel> {
        let mut model = self.base_model()?;
        for b in self.blowups.iter().take(count) {
            model = model.blow_up(&b.point_spec()?, &b.name)?;
        }
        Ok(model)
    }

    pub fn model(&self) -> Result<SurfaceModel> {
        self.model_after(self.blowups.len())
    }

    pub fn boundary_map(&self) -> Result<BTreeMap<String, Rational>> {
        let mut map = BTreeMap::new();
        for e in &self.boundary {
            if map.insert(e.curve.clone(), e.coeff.0.clone()).is_some() {
                return Err(Error::DuplicateCurve(e.curve.clone()));
            }
        }
        Ok(map)
    }

    /// Builds the pair, validating every invariant along the way.
    pub fn build(&self) -> Result<PairModel> {
        PairModel::new(self.model()?, self.boundary_map()?)
    }
}

/// Names of the built-in scenes.
pub const BUILTIN: &[&str] = &[
    "example-4.1",
    "example-4.2",
    "example-4.3",
    "example-trivial",
];

pub fn builtin(name: &str) -> Option<Scene> {
    match name {
        "example-4.1" => Some(hesse_configuration()),
        "example-4.2" => Some(affine_e8()),
        "example-4.3" => Some(cuspidal_cubic()),
        "example-trivial" => Some(plane_with_line()),
        _ => None,
    }
}

fn plane_base(curves: Vec<CurveSpec>) -> BaseSpec {
    BaseSpec {
        rank: 1,
        basis_names: Some(vec!["h".into()]),
        gram: vec![rats(&[1])],
        canonical: rats(&[-3]),
        curves,
    }
}

/// `P²` blown up at nine points: basis `h, e1, ..., e9`.
fn nine_point_base(curves: Vec<CurveSpec>) -> BaseSpec {
    let mut names = vec!["h".to_string()];
    names.extend((1..=9).map(|i| format!("e{i}")));
    let gram = (0..10)
        .map(|i| {
            (0..10)
                .map(|j| match (i, j) {
                    (0, 0) => 1,
                    (i, j) if i == j => -1,
                    _ => 0,
                })
                .collect::<Vec<i64>>()
        })
        .map(|row| rats(&row))
        .collect();
    let mut k = vec![-3];
    k.extend([1; 9]);
    BaseSpec {
        rank: 10,
        basis_names: Some(names),
        gram,
        canonical: rats(&k),
        curves,
    }
}

/// The class `h_coeff·h + Σ x_i e_i` on the nine-point base.
fn nine_point_class(h_coeff: i64, es: &[(usize, i64)]) -> Vec<Rat> {
    let mut v = vec![0; 10];
    v[0] = h_coeff;
    for &(i, x) in es {
        v[i] += x;
    }
    rats(&v)
}

fn blow_up(name: &str, point: &[(&str, u32)]) -> BlowUpSpec {
    BlowUpSpec {
        name: name.into(),
        point: point
            .iter()
            .map(|&(c, m)| IncidenceSpec {
                curve: c.into(),
                mult: m,
            })
            .collect(),
    }
}

fn plane_with_line() -> Scene {
    Scene {
        format: FORMAT.into(),
        meta: "P2 with one line; the anticanonical class is nef".into(),
        base: plane_base(vec![CurveSpec {
            name: "L".into(),
            class: rats(&[1]),
        }]),
        blowups: vec![],
        boundary: vec![],
        nef_axioms: vec![rats(&[1])],
    }
}

/// A cuspidal cubic through the nine blown-up points, then the cusp.
fn cuspidal_cubic() -> Scene {
    let anti = nine_point_class(3, &(1..=9).map(|i| (i, -1)).collect::<Vec<_>>());
    Scene {
        format: FORMAT.into(),
        meta:
            "rational elliptic surface with a cuspidal anticanonical curve C, blown up at the cusp"
                .into(),
        base: nine_point_base(vec![CurveSpec {
            name: "C".into(),
            class: anti.clone(),
        }]),
        blowups: vec![blow_up("E", &[("C", 2)])],
        boundary: vec![],
        nef_axioms: vec![anti],
    }
}

/// Nine `(-2)`-curves forming an affine E8 configuration on a rational
/// elliptic surface, blown up at the node of the curves with marks 5 and 6.
fn affine_e8() -> Scene {
    let curves = vec![
        ("C1", nine_point_class(0, &[(8, 1), (9, -1)])),
        ("C2", nine_point_class(0, &[(7, 1), (8, -1)])),
        ("C3", nine_point_class(0, &[(6, 1), (7, -1)])),
        ("C4", nine_point_class(0, &[(5, 1), (6, -1)])),
        ("C5", nine_point_class(0, &[(4, 1), (5, -1)])),
        ("C6", nine_point_class(0, &[(3, 1), (4, -1)])),
        ("C7", nine_point_class(0, &[(2, 1), (3, -1)])),
        ("C8", nine_point_class(1, &[(1, -1), (2, -1), (3, -1)])),
        ("C9", nine_point_class(0, &[(1, 1), (2, -1)])),
    ]
    .into_iter()
    .map(|(n, c)| CurveSpec {
        name: n.into(),
        class: c,
    })
    .collect();
    let anti = nine_point_class(3, &(1..=9).map(|i| (i, -1)).collect::<Vec<_>>());
    Scene {
        format: FORMAT.into(),
        meta: "affine E8 fibre of a rational elliptic surface, marks 1,2,3,4,5,6,4,3,2 on C1..C9, blown up at C5 meet C6"
            .into(),
        base: nine_point_base(curves),
        blowups: vec![blow_up("E", &[("C5", 1), ("C6", 1)])],
        boundary: vec![],
        nef_axioms: vec![anti],
    }
}

/// Marks of the affine E8 curves `C1..C9` in the built-in scene.
pub const AFFINE_E8_MARKS: [i64; 9] = [1, 2, 3, 4, 5, 6, 4, 3, 2];

/// The dual Hesse configuration: nine lines `A_k, B_j, C_i` and twelve
/// points, each line through four points and each point on three lines.
/// `O1, O2, O3` are the triple points of the three pencils; `P_ij` lies on
/// `A_{(j-i) mod 3}`, `B_j` and `C_i`.
pub fn hesse_incidences() -> Vec<(String, Vec<String>)> {
    let mut out = Vec::new();
    for (o, family) in [("O1", "A"), ("O2", "B"), ("O3", "C")] {
        out.push((
            o.to_string(),
            (0..3).map(|k| format!("{family}{k}")).collect(),
        ));
    }
    for i in 0..3 {
        for j in 0..3 {
            let a = (j + 3 - i) % 3;
            out.push((
                format!("P{i}{j}"),
                vec![format!("A{a}"), format!("B{j}"), format!("C{i}")],
            ));
        }
    }
    out
}

fn hesse_configuration() -> Scene {
    let lines: Vec<CurveSpec> = ["A", "B", "C"]
        .iter()
        .flat_map(|f| (0..3).map(move |k| format!("{f}{k}")))
        .map(|name| CurveSpec {
            name,
            class: rats(&[1]),
        })
        .collect();
    let blowups = hesse_incidences()
        .into_iter()
        .map(|(p, through)| BlowUpSpec {
            name: p,
            point: through
                .into_iter()
                .map(|curve| IncidenceSpec { curve, mult: 1 })
                .collect(),
        })
        .collect();
    Scene {
        format: FORMAT.into(),
        meta: "dual Hesse configuration of nine lines and twelve points in P2, all points blown up"
            .into(),
        base: plane_base(lines),
        blowups,
        boundary: vec![],
        nef_axioms: vec![rats(&[1])],
    }
}
