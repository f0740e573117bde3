//! Reproduces the stated invariants of the built-in scenes, check by check.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::birational::{parse_chain, PointSpec};
use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::pairs::{
    check_mmp_redundant_factorization, lct_sigma_estimate, pklt_certificate, PairModel, StepKind,
};
use crate::rational::{format_rational, int, q, Extended, Rational};
use crate::scene::{builtin, hesse_incidences, AFFINE_E8_MARKS};
use crate::zariski::DivisorOver;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub scene: String,
    pub checks: Vec<Check>,
    pub ok: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, expected: T, actual: T) {
        let ok = expected == actual;
        self.0.push(Check {
            name: name.into(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            ok,
        });
    }

    fn rat(&mut self, name: &str, expected: Rational, actual: Rational) {
        let ok = expected == actual;
        self.0.push(Check {
            name: name.into(),
            expected: format_rational(&expected),
            actual: format_rational(&actual),
            ok,
        });
    }

    fn holds(&mut self, name: &str, ok: bool, actual: String) {
        self.0.push(Check {
            name: name.into(),
            expected: "true".into(),
            actual,
            ok,
        });
    }

    fn finish(self, scene: &str) -> VerificationReport {
        let ok = self.0.iter().all(|c| c.ok);
        VerificationReport {
            scene: scene.into(),
            checks: self.0,
            ok,
        }
    }
}

fn fmt_map(m: &BTreeMap<String, Rational>) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|(k, v)| format!("{k}: {}", format_rational(v)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn scene_pair(name: &str) -> Result<PairModel> {
    builtin(name)
        .ok_or_else(|| Error::invariant(format!("missing built-in scene {name}")))?
        .build()
}

/// Runs the checks for `4.1`, `4.2` or `4.3`.
pub fn verify_example(which: &str) -> Result<VerificationReport> {
    match which {
        "4.1" => verify_hesse(),
        "4.2" => verify_affine_e8(),
        "4.3" => verify_cuspidal_cubic(),
        other => Err(Error::Parse {
            position: "example".into(),
            message: format!("unknown example `{other}`; expected 4.1, 4.2 or 4.3"),
        }),
    }
}

fn verify_cuspidal_cubic() -> Result<VerificationReport> {
    let name = "example-4.3";
    let pair = scene_pair(name)?;
    let x = pair.surface();
    let mut c = Checks::default();
    let d = pair.anticanonical();
    let cls = |n: &str| x.class_of(n).cloned();

    c.rat("C^2", int(-4), x.curve_intersection("C", "C")?);
    c.rat("C.E", int(2), x.curve_intersection("C", "E")?);
    c.rat("-K.C", int(-2), x.intersect(&d, &cls("C")?)?);
    c.eq("-K = C + E", &cls("C")? + &cls("E")?, d.clone());

    let zd = pair.decomposition();
    c.eq(
        "N(-K)",
        fmt_map(&BTreeMap::from([("C".into(), q(1, 2))])),
        fmt_map(&zd.negative),
    );
    let half = q(1, 2);
    let p_expected = &(&half * &cls("C")?) + &cls("E")?;
    c.eq("P(-K) = C/2 + E", p_expected, zd.positive.clone());
    c.eq(
        "P(-K) = f*D/2",
        &half * &x.nef_axioms()[0],
        zd.positive.clone(),
    );
    let pulled = x.pullback_divisor(&BTreeMap::from([("C".into(), int(1))]))?;
    c.eq(
        "f*C",
        fmt_map(&BTreeMap::from([
            ("C".into(), int(1)),
            ("E".into(), int(2)),
        ])),
        fmt_map(&pulled),
    );

    let contraction = x.contract(&["C"])?;
    c.rat(
        "discrepancy of C",
        q(-1, 2),
        contraction.discrepancies["C"].clone(),
    );
    c.eq("contraction of C is klt", true, contraction.is_klt);

    let chain = parse_chain("C:1,E:1;C:1,E:1,~1:1")?;
    let plain = pair.blow_up_chain(&chain)?;
    c.rat("A_X(F)", int(3), plain.log_discrepancy.clone());
    let boundary = BTreeMap::from([("C".to_string(), int(1)), ("E".to_string(), int(1))]);
    let with_d = crate::birational::blow_up_chain(x, &boundary, &chain)?;
    c.rat("A_(X,C+E)(F)", int(-1), with_d.log_discrepancy.clone());
    c.rat("ord_F(C+E)", int(4), with_d.boundary_order());

    let curve_c = DivisorOver::Curve("C".into());
    c.rat("sigma_C(-K)", q(1, 2), pair.sigma(&curve_c)?);
    c.rat(
        "potential log discrepancy of C",
        q(1, 2),
        pair.potential_log_discrepancy(&curve_c)?,
    );

    let cert = pklt_certificate(&pair)?;
    let trace = &cert.witness;
    c.eq("MMP contractions", vec!["C"], trace.contracted());
    c.rat(
        "MMP step discrepancy",
        q(-1, 2),
        trace
            .steps
            .first()
            .map_or_else(Rational::zero, |s| s.discrepancy.clone()),
    );
    c.eq("MMP end is klt", true, trace.final_klt);
    c.eq("MMP end is model-nef", true, trace.final_model_nef);
    c.eq("pklt certificate", true, cert.certified);
    c.rat(
        "largest coefficient of N",
        q(1, 2),
        cert.max_coefficient.clone(),
    );
    let fact = check_mmp_redundant_factorization(trace)?;
    c.eq(
        "factorization step kinds",
        vec![StepKind::ResolutionIdentical],
        fact.steps.iter().map(|s| s.kind.clone()).collect(),
    );

    let est = lct_sigma_estimate(&pair, 2)?;
    c.eq("epsilon", Extended::Finite(int(1)), est.epsilon.clone());
    c.holds(
        "min ratio >= 1 + epsilon > 1",
        est.min_ratio >= est.certified_lower_bound
            && est.certified_lower_bound > Extended::Finite(int(1)),
        format!("{} >= {}", est.min_ratio, est.certified_lower_bound),
    );
    Ok(c.finish(name))
}

fn verify_affine_e8() -> Result<VerificationReport> {
    let name = "example-4.2";
    let scene = builtin(name).expect("built-in");
    let pair = scene.build()?;
    let base = PairModel::without_boundary(scene.base_model()?)?;
    let x = pair.surface();
    let s = base.surface();
    let mut c = Checks::default();
    let marks: BTreeMap<String, Rational> = AFFINE_E8_MARKS
        .iter()
        .enumerate()
        .map(|(i, &a)| (format!("C{}", i + 1), int(a)))
        .collect();
    let d_s = base.anticanonical();

    c.eq(
        "sum of marked curves = -K_S",
        d_s.clone(),
        s.class_from_curves(&marks)?,
    );
    c.eq(
        "-K_S has no negative part",
        0,
        base.decomposition().negative.len(),
    );
    let p: PointSpec = "C5,C6".parse()?;
    let r = base.is_redundant_point(&p)?;
    c.eq("C5 meet C6 is not redundant on S", false, r.redundant);
    c.rat("mult of N at C5 meet C6 on S", int(0), r.mult_n);

    let pulled = x.pullback_divisor(&marks)?;
    c.rat("E-coefficient of f*D", int(11), pulled["E"].clone());
    let d = pair.anticanonical();
    for n in ["C5", "C6"] {
        c.rat(
            &format!("-K_X.{n}"),
            int(-1),
            x.intersect(&d, x.class_of(n)?)?,
        );
    }

    let zd = pair.decomposition();
    let expected_n: BTreeMap<String, Rational> = marks
        .iter()
        .map(|(k, a)| (k.clone(), a / int(11)))
        .collect();
    c.eq(
        "N(-K_X) = sum a_i C_i / 11",
        fmt_map(&expected_n),
        fmt_map(&zd.negative),
    );
    let f_d = x.pullback_from_parent(&d_s)?;
    c.eq(
        "P(-K_X) = 10/11 f*D",
        &q(10, 11) * &f_d,
        zd.positive.clone(),
    );

    let r = pair.is_redundant_point(&"C4,C5".parse()?)?;
    c.rat("mult of N at C4 meet C5 on X", q(9, 11), r.mult_n);
    c.eq("C4 meet C5 is not redundant on X", false, r.redundant);

    let cert = pklt_certificate(&pair)?;
    let trace = &cert.witness;
    c.eq("MMP contractions", 9, trace.steps.len());
    c.eq(
        "rank before and after",
        (11, 2),
        (x.rank(), trace.final_pair.surface().rank()),
    );
    c.eq("MMP end is klt", true, trace.final_klt);
    c.eq("MMP end is model-nef", true, trace.final_model_nef);
    c.eq("pklt certificate", true, cert.certified);
    c.rat(
        "largest coefficient of N",
        q(6, 11),
        cert.max_coefficient.clone(),
    );

    let est = lct_sigma_estimate(&pair, 2)?;
    c.eq("epsilon", Extended::Finite(q(5, 6)), est.epsilon.clone());
    c.holds(
        "min ratio >= 11/6",
        est.min_ratio >= Extended::Finite(q(11, 6)),
        est.min_ratio.to_string(),
    );
    Ok(c.finish(name))
}

fn verify_hesse() -> Result<VerificationReport> {
    let name = "example-4.1";
    let pair = scene_pair(name)?;
    let x = pair.surface();
    let mut c = Checks::default();
    let lines: Vec<String> = ["A", "B", "C"]
        .iter()
        .flat_map(|f| (0..3).map(move |k| format!("{f}{k}")))
        .collect();

    c.eq("twelve points, each on three lines", (12, true), {
        let inc = hesse_incidences();
        (inc.len(), inc.iter().all(|(_, l)| l.len() == 3))
    });
    c.eq("rank", 13, x.rank());
    let mut squares_ok = true;
    let mut products_ok = true;
    for (i, a) in lines.iter().enumerate() {
        squares_ok &= x.curve_intersection(a, a)? == int(-3);
        for b in &lines[i + 1..] {
            products_ok &= x.curve_intersection(a, b)?.is_zero();
        }
    }
    c.eq("every strict transform has square -3", true, squares_ok);
    c.eq("strict transforms are pairwise disjoint", true, products_ok);

    let mut sum = DivisorClass::zero(x.rank());
    for l in &lines {
        sum += x.class_of(l)?;
    }
    let k3 = x.canonical().scaled(&int(3));
    c.eq("sum of lines + 3K = 0", true, (&sum + &k3).is_zero());

    let names: Vec<&str> = lines.iter().map(String::as_str).collect();
    let r = x.contract(&names)?;
    let all_third = r.discrepancies.values().all(|a| a == &q(-1, 3));
    c.eq(
        "nine discrepancies -1/3",
        (9, true),
        (r.discrepancies.len(), all_third),
    );
    c.eq("contraction is klt", true, r.is_klt);
    c.eq("quotient rank", 4, r.model.rank());
    let minus_3k = x.canonical().scaled(&int(-3));
    let descended = r.pushforward(&minus_3k)?;
    c.eq(
        "pullback of -3K_Y is zero",
        true,
        r.pullback(&descended)?.is_zero(),
    );
    c.eq("K_Y = 0", true, r.model.canonical().is_zero());
    Ok(c.finish(name))
}
