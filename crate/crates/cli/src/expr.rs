//! Linear combinations of curve names and `K`, such as `-K`, `1/2*C+E` or
//! `2C - 3/4*E`.

use std::collections::BTreeMap;

use surfmmp::rational::parse_rational_lenient;
use surfmmp::{DivisorClass, Error, Rational, Result, SurfaceModel};

pub fn parse_terms(expr: &str) -> Result<Vec<(Rational, String)>> {
    let err = |msg: String| Error::Parse {
        position: format!("expression `{expr}`"),
        message: msg,
    };
    let word = |c: char| c.is_alphanumeric() || c == '~' || c == '/';
    let chars: Vec<char> = expr.chars().collect();
    for (i, w) in chars.windows(3).enumerate() {
        if word(w[0]) && w[1].is_whitespace() {
            if let Some(next) = chars[i + 1..].iter().find(|c| !c.is_whitespace()) {
                if word(*next) {
                    return Err(err(format!("missing operator in `{expr}`")));
                }
            }
        }
    }
    let s: String = chars.iter().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty expression".into()));
    }
    let mut terms = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        } else if !terms.is_empty() {
            return Err(err(format!("expected `+` or `-` before `{rest}`")));
        }
        let end = rest[1..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
        let term = &rest[..end];
        rest = &rest[end..];
        let split = term
            .find(|c: char| c.is_alphabetic() || c == '~')
            .ok_or_else(|| err(format!("term `{term}` names no curve")))?;
        let (coeff, name) = term.split_at(split);
        let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
        let mut x = if coeff.is_empty() {
            Rational::from_integer(1.into())
        } else {
            parse_rational_lenient(coeff).map_err(err)?
        };
        if negative {
            x = -x;
        }
        terms.push((x, name.to_string()));
    }
    Ok(terms)
}

/// The class of an expression on `model`; `K` is the canonical class.
pub fn divisor_class(model: &SurfaceModel, expr: &str) -> Result<DivisorClass> {
    let mut d = DivisorClass::zero(model.rank());
    for (x, name) in parse_terms(expr)? {
        let cls = if name == "K" {
            model.canonical()
        } else {
            model.class_of(&name)?
        };
        d.add_scaled(&x, cls);
    }
    Ok(d)
}

/// An expression in tracked curves only, as coefficients by name.
pub fn curve_combination(expr: &str) -> Result<BTreeMap<String, Rational>> {
    let mut out: BTreeMap<String, Rational> = BTreeMap::new();
    for (x, name) in parse_terms(expr)? {
        if name == "K" {
            return Err(Error::Parse {
                position: format!("expression `{expr}`"),
                message: "K is not a curve".into(),
            });
        }
        *out.entry(name)
            .or_insert_with(|| Rational::from_integer(0.into())) += x;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use surfmmp::{int, q};

    #[test]
    fn parses_combinations() {
        assert_eq!(parse_terms("-K").unwrap(), vec![(int(-1), "K".into())]);
        assert_eq!(
            parse_terms("1/2*C + E").unwrap(),
            vec![(q(1, 2), "C".into()), (int(1), "E".into())]
        );
        assert_eq!(
            parse_terms("2C-3/4~1").unwrap(),
            vec![(int(2), "C".into()), (q(-3, 4), "~1".into())]
        );
        assert!(parse_terms("").is_err());
        assert!(parse_terms("3").is_err());
        assert!(parse_terms("C E").is_err());
        assert!(parse_terms("1/2 C").is_err());
        assert_eq!(parse_terms(" C +  E ").unwrap().len(), 2);
        assert!(parse_terms("1/0*C").is_err());
    }

    #[test]
    fn combination_rejects_canonical() {
        assert!(curve_combination("C+K").is_err());
        assert_eq!(curve_combination("C+C").unwrap()["C"], int(2));
    }
}
