//! Independent oracles and seeded random instances for the integration
//! tests. Nothing here calls the library's linear algebra.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surfmmp::birational::format_chain;
use surfmmp::pairs::enumerate_chains_after;
use surfmmp::zariski::{sigma_by_decomposition, transported_decomposition, validate};
use surfmmp::{
    chain_name, check_mmp_redundant_factorization, enumerate_chains, run_anticanonical_mmp,
    zariski_decompose, DivisorClass, DivisorOver, IntersectionLattice, PairModel, PointSpec,
    Rational, SurfaceModel, TrackedCurve,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rq(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

// ---------------------------------------------------------------- oracles

pub fn pair_form(gram: &[Vec<Rational>], x: &[Rational], y: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            s += xi * &gram[i][j] * yj;
        }
    }
    s
}

/// Gauss-Jordan elimination; `None` if `a` is singular.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut row = row.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = Rational::one() / &m[col][col];
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for row in 0..n {
            if row != col && !m[row][col].is_zero() {
                let f = m[row][col].clone();
                for k in col..=n {
                    let sub = &f * &m[col][k];
                    m[row][k] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= &m[col][col];
        for row in col + 1..n {
            let f = &m[row][col] / &m[col][col];
            for k in col..n {
                let sub = &f * &m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

/// Coefficients `[1, c1, .., cn]` of `det(tI - A)` by Faddeev-LeVerrier.
pub fn charpoly(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let mut coeffs = vec![Rational::one()];
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for l in 0..n {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &coeffs[k - 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut trace = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                trace += &a[i][l] * &m[l][i];
            }
        }
        coeffs.push(-trace / r(k as i64));
    }
    coeffs
}

/// A real symmetric matrix has only negative eigenvalues iff every
/// coefficient of its characteristic polynomial is positive.
pub fn negative_definite_by_charpoly(a: &[Vec<Rational>]) -> bool {
    charpoly(a).iter().all(|c| c.is_positive())
}

pub fn sub_gram(gram: &[Vec<Rational>], classes: &[&[Rational]]) -> Vec<Vec<Rational>> {
    classes
        .iter()
        .map(|x| classes.iter().map(|y| pair_form(gram, x, y)).collect())
        .collect()
}

/// Every curve subset `S` such that `N = Σ_S a_i C_i` has all `a_i > 0`,
/// `Supp N` is negative definite, `(D - N)·C_i = 0` on `S` and `D - N` is
/// nonnegative on every curve. The decomposition is the unique such `S`.
pub fn zariski_by_subsets(
    gram: &[Vec<Rational>],
    curves: &[Vec<Rational>],
    d: &[Rational],
) -> Vec<(Vec<usize>, Vec<Rational>)> {
    let refs: Vec<&[Rational]> = curves.iter().map(Vec::as_slice).collect();
    let cg = sub_gram(gram, &refs);
    let dc: Vec<Rational> = refs.iter().map(|c| pair_form(gram, d, c)).collect();
    let mut found = Vec::new();
    let mut s = Vec::new();
    grow(&cg, &dc, 0, &mut s, &mut found);
    found
}

fn grow(
    cg: &[Vec<Rational>],
    dc: &[Rational],
    from: usize,
    s: &mut Vec<usize>,
    found: &mut Vec<(Vec<usize>, Vec<Rational>)>,
) {
    let g: Vec<Vec<Rational>> = s
        .iter()
        .map(|&i| s.iter().map(|&j| cg[i][j].clone()).collect())
        .collect();
    let det = determinant(&g);
    let expected_negative = s.len() % 2 == 1;
    if det.is_zero() || det.is_negative() != expected_negative {
        return;
    }
    let rhs: Vec<Rational> = s.iter().map(|&i| dc[i].clone()).collect();
    if let Some(a) = solve_unique(&g, &rhs) {
        let p_nonnegative = || {
            (0..dc.len()).all(|c| {
                let mut pc = dc[c].clone();
                for (x, &i) in a.iter().zip(s.iter()) {
                    pc -= x * &cg[i][c];
                }
                !pc.is_negative()
            })
        };
        if a.iter().all(|x| x.is_positive()) && p_nonnegative() {
            found.push((s.clone(), a));
        }
    }
    for i in from..dc.len() {
        s.push(i);
        grow(cg, dc, i + 1, s, found);
        s.pop();
    }
}

// ------------------------------------------------------ random instances

/// `P²` blown up at `k ≤ 7` points, with a random selection of at most
/// `max_curves` curves among the exceptional curves, lines through two
/// points, conics through five, cubics through seven singular at one, and
/// a general line. With `collinear`, points 1, 2, 3 lie on a line `M123`.
pub fn random_blown_up_plane(
    rng: &mut ChaCha8Rng,
    k: usize,
    collinear: bool,
    max_curves: usize,
) -> SurfaceModel {
    assert!((1..=7).contains(&k));
    let rank = k + 1;
    let mut names = vec!["h".to_string()];
    names.extend((1..=k).map(|i| format!("e{i}")));
    let mut diag = vec![r(1)];
    diag.extend((0..k).map(|_| r(-1)));
    let lattice = IntersectionLattice::diagonal(&diag, names).unwrap();
    let class = |h: i64, es: &[(usize, i64)]| {
        let mut v = vec![0i64; rank];
        v[0] = h;
        for &(i, m) in es {
            v[i] = -m;
        }
        DivisorClass::from_ints(&v)
    };
    let collinear = collinear && k >= 3;
    let on_m = |i: usize| collinear && i <= 3;
    let mut pool: Vec<TrackedCurve> = vec![TrackedCurve::new("H", class(1, &[]))];
    for i in 1..=k {
        pool.push(TrackedCurve::new(
            format!("E{i}"),
            DivisorClass::basis(rank, i),
        ));
    }
    if collinear {
        pool.push(TrackedCurve::new(
            "M123",
            class(1, &[(1, 1), (2, 1), (3, 1)]),
        ));
    }
    for i in 1..=k {
        for j in i + 1..=k {
            if !(on_m(i) && on_m(j)) {
                pool.push(TrackedCurve::new(
                    format!("L{i}{j}"),
                    class(1, &[(i, 1), (j, 1)]),
                ));
            }
        }
    }
    if k >= 5 {
        for skip in subsets_of_size(k, k - 5) {
            let five: Vec<usize> = (1..=k).filter(|i| !skip.contains(i)).collect();
            if five.iter().filter(|&&i| on_m(i)).count() <= 2 {
                let label: String = five.iter().map(|i| i.to_string()).collect();
                let es: Vec<(usize, i64)> = five.iter().map(|&i| (i, 1)).collect();
                pool.push(TrackedCurve::new(format!("Q{label}"), class(2, &es)));
            }
        }
    }
    if k == 7 && !collinear {
        for i in 1..=7 {
            let es: Vec<(usize, i64)> = (1..=7).map(|j| (j, if j == i { 2 } else { 1 })).collect();
            pool.push(TrackedCurve::new(format!("T{i}"), class(3, &es)));
        }
    }
    pool.shuffle(rng);
    pool.truncate(max_curves.max(1));
    pool.sort_by(|a, b| a.name.cmp(&b.name));
    let mut canonical = vec![1i64; rank];
    canonical[0] = -3;
    SurfaceModel::new(
        lattice,
        DivisorClass::from_ints(&canonical),
        pool,
        vec![class(1, &[])],
    )
    .unwrap()
}

fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize == size {
            out.push((1..=k).filter(|i| mask & (1 << (i - 1)) != 0).collect());
        }
    }
    out
}

/// A nonnegative combination of tracked curves, hence pseudoeffective.
pub fn random_effective(rng: &mut ChaCha8Rng, model: &SurfaceModel) -> DivisorClass {
    loop {
        let mut d = DivisorClass::zero(model.rank());
        for c in model.curves() {
            if rng.random_bool(0.5) {
                let x = rq(rng.random_range(1..=6), rng.random_range(1..=3));
                d.add_scaled(&x, &c.cls);
            }
        }
        if !d.is_zero() {
            return d;
        }
    }
}

const COEFFICIENTS: [(i64, i64); 7] = [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1), (1, 1)];

/// A pair on a random blown-up plane whose `-(K + Δ)` decomposes.
pub fn random_pair(rng: &mut ChaCha8Rng) -> PairModel {
    loop {
        let k = rng.random_range(1..=5);
        let collinear = rng.random_bool(0.3);
        let model = random_blown_up_plane(rng, k, collinear, 9);
        let mut boundary = BTreeMap::new();
        for c in model.curves() {
            if c.name != "H" && rng.random_bool(0.35) {
                let (n, d) = COEFFICIENTS[rng.random_range(0..COEFFICIENTS.len())];
                boundary.insert(c.name.clone(), rq(n, d));
            }
        }
        if let Ok(pair) = PairModel::new(model, boundary) {
            return pair;
        }
    }
}

/// General points of single curves and transverse meeting points of two.
pub fn candidate_points(model: &SurfaceModel) -> Vec<PointSpec> {
    let curves = model.curves();
    let mut out: Vec<PointSpec> = curves
        .iter()
        .map(|c| PointSpec::on(&[(c.name.as_str(), 1)]))
        .collect();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            if model.curve_intersection(&a.name, &b.name).unwrap() >= r(1) {
                out.push(PointSpec::on(&[(a.name.as_str(), 1), (b.name.as_str(), 1)]));
            }
        }
    }
    out
}

/// A random pair and a redundant point on it.
pub fn random_redundant_instance(rng: &mut ChaCha8Rng) -> (PairModel, PointSpec) {
    loop {
        let pair = random_pair(rng);
        let redundant: Vec<PointSpec> = candidate_points(pair.surface())
            .into_iter()
            .filter(|p| pair.is_redundant_point(p).unwrap().redundant)
            .collect();
        if let Some(p) = redundant.choose(rng) {
            return (pair, p.clone());
        }
    }
}

/// Name of a divisor over the blow-up `Y → X` at `p` as a divisor over
/// `X`: the exceptional `e` becomes `~1` and `~k` becomes `~(k+1)`.
pub fn relabel_over_base(e: &str) -> impl Fn(&str) -> String + '_ {
    move |name: &str| {
        if name == e {
            chain_name(1)
        } else if let Some(k) = name.strip_prefix('~') {
            chain_name(k.parse::<usize>().unwrap() + 1)
        } else {
            name.to_string()
        }
    }
}

// ------------------------------------------------------- shared checks

/// Compares [`zariski_decompose`] with [`zariski_by_subsets`], which must
/// find exactly one decomposition.
pub fn check_zariski_oracle(model: &SurfaceModel, d: &DivisorClass) -> Result<(), String> {
    let gram = model.lattice().gram();
    let curves: Vec<Vec<Rational>> = model
        .curves()
        .iter()
        .map(|c| c.cls.coords().to_vec())
        .collect();
    let found = zariski_by_subsets(gram, &curves, d.coords());
    let [(support, coeffs)] = found.as_slice() else {
        return Err(format!("oracle found {} decompositions", found.len()));
    };
    let zd = zariski_decompose(model, d).map_err(|e| e.to_string())?;
    validate(model, d, &zd).map_err(|e| e.to_string())?;
    let expected: Vec<(String, Rational)> = support
        .iter()
        .zip(coeffs)
        .map(|(&i, a)| (model.curves()[i].name.clone(), a.clone()))
        .collect();
    let actual: Vec<(String, Rational)> = zd.negative.clone().into_iter().collect();
    if expected != actual {
        return Err(format!("oracle {expected:?}, library {actual:?}"));
    }
    Ok(())
}

fn err(e: surfmmp::Error) -> String {
    e.to_string()
}

/// Redundancy of `p`, effectiveness of the transported negative part, and
/// the transported decomposition being the decomposition upstairs must
/// all agree. Returns whether `p` was redundant.
pub fn check_redundancy_equivalence(pair: &PairModel, p: &PointSpec) -> Result<bool, String> {
    let report = pair.is_redundant_point(p).map_err(err)?;
    let up = pair.surface().blow_up(p, "R").map_err(err)?;
    let raw =
        transported_decomposition(&up, pair.decomposition(), &report.mult_boundary).map_err(err)?;
    let effective = raw.negative.values().all(|x| !x.is_negative());
    let upstairs = PairModel::new(up.clone(), pair.boundary().clone());
    let matches = match &upstairs {
        Ok(y) => {
            validate(&up, &y.anticanonical(), &raw).is_ok()
                && raw.negative == y.decomposition().negative
                && raw.positive == y.decomposition().positive
        }
        Err(_) => false,
    };
    let refused = pair.redundant_blow_up(p, "R").is_err();
    if report.redundant != effective || effective != matches || refused == report.redundant {
        return Err(format!(
            "point {p}: redundant {}, effective {effective}, matches {matches}, refused {refused}",
            report.redundant
        ));
    }
    Ok(report.redundant)
}

/// Checks that `ā` of every divisor over the redundant blow-up at `p`,
/// enumerated to `depth`, equals `ā` of the same divisor over `pair`.
/// Every `sample`-th chain is also recomputed on full lattice models, with
/// `σ` re-solved on the chain model. Returns the number of divisors compared.
pub fn check_abar_preserved(
    pair: &PairModel,
    p: &PointSpec,
    depth: usize,
    sample: usize,
) -> Result<usize, String> {
    let (y, transported) = pair.redundant_blow_up(p, "R").map_err(err)?;
    if !transported.same_parts(y.decomposition()) {
        return Err(format!("point {p}: transported decomposition differs"));
    }
    let below: BTreeMap<String, Rational> = enumerate_chains_after(pair, p, depth)
        .map_err(err)?
        .into_iter()
        .map(|d| (d.label(), d.potential_log_discrepancy()))
        .collect();
    let above = enumerate_chains(&y, depth).map_err(err)?;
    let relabel = relabel_over_base("R");
    let mut over_point = 0;
    for (n, d) in above.iter().enumerate() {
        let abar = d.potential_log_discrepancy();
        let (expected, below_chain) = match &d.curve {
            Some(c) if c != "R" => {
                let e = DivisorOver::Curve(c.clone());
                (pair.potential_log_discrepancy(&e).map_err(err)?, None)
            }
            _ => {
                let mut chain = vec![p.clone()];
                chain.extend(d.chain.iter().map(|q| q.renamed(&relabel)));
                over_point += 1;
                let label = format_chain(&chain);
                let x = below
                    .get(&label)
                    .ok_or_else(|| format!("{label} missing below"))?;
                (x.clone(), Some(chain))
            }
        };
        if abar != expected {
            return Err(format!(
                "point {p}, divisor {}: above {abar}, below {expected}",
                d.label()
            ));
        }
        if let (Some(chain), true) = (below_chain, n % sample == 0 && d.curve.is_none()) {
            let e_above = DivisorOver::Chain(d.chain.clone());
            let full_above = y.potential_log_discrepancy(&e_above).map_err(err)?;
            let full_below = pair
                .potential_log_discrepancy(&DivisorOver::Chain(chain))
                .map_err(err)?;
            let resolved =
                sigma_by_decomposition(y.surface(), &y.anticanonical(), &d.chain).map_err(err)?;
            if full_above != abar || full_below != abar || resolved != d.sigma {
                return Err(format!(
                    "point {p}, divisor {}: enumerated {abar}, full models {full_above} / {full_below}, sigma {} vs re-solved {resolved}",
                    d.label(),
                    d.sigma
                ));
            }
        }
    }
    if over_point != below.len() {
        return Err(format!(
            "point {p}: {over_point} divisors over the point above, {} below",
            below.len()
        ));
    }
    Ok(above.len())
}

/// Runs the anticanonical MMP and checks its redundant factorization.
/// Returns the number of steps.
pub fn check_factorization(pair: &PairModel) -> Result<usize, String> {
    let trace = run_anticanonical_mmp(pair).map_err(err)?;
    let report = check_mmp_redundant_factorization(&trace).map_err(err)?;
    if !report.ok {
        return Err(format!("factorization failed: {report:?}"));
    }
    if !trace.final_model_nef {
        return Err("MMP ended on a model where -(K + Δ) is not model-nef".into());
    }
    Ok(trace.steps.len())
}
