//! Plain-text LP format.
//!
//! ```text
//! # comments run to end of line
//! ground Y1 Y2 U1
//! minimize 1*h{U1}
//! 1*h{Y1,U1} -1*h{U1} = 0      # h(Y1|U1) = 0
//! 1*h{U1} <= 1
//! ```
//!
//! A term is `[+|-][coeff*]h{name,name,...}` where `coeff` is an integer,
//! `a/b`, or a decimal. Relations are `>=`, `<=` and `=`. The right-hand
//! side is a single rational. A trailing comment on a row becomes its label.

use super::system::{LinearConstraint, LinearSystem, Relation};
use crate::entropy::{GroundSet, LinearFunctional};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

pub(crate) struct NamedRow {
    pub terms: Vec<(Vec<String>, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
    pub label: Option<String>,
}

fn parse_terms(text: &str, location: &str) -> Result<Vec<(Vec<String>, Rational)>> {
    let err = |m: String| Error::parse(location, m);
    let mut terms = Vec::new();
    let compact: String = text.split_whitespace().collect();
    if compact == "0" || compact.is_empty() {
        return Ok(terms);
    }
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ if terms.is_empty() => (1, rest),
            _ => return Err(err(format!("expected '+' or '-' before {rest:?}"))),
        };
        let h = body.find("h{").ok_or_else(|| err(format!("expected h{{...}} in {body:?}")))?;
        let coeff_text = body[..h].trim_end_matches('*');
        let coeff = if coeff_text.is_empty() {
            Rational::from_integer(1.into())
        } else {
            parse_rational(coeff_text).map_err(|_| err(format!("bad coefficient {coeff_text:?}")))?
        };
        let close = body[h..].find('}').ok_or_else(|| err("unterminated h{".into()))? + h;
        let names: Vec<String> = body[h + 2..close]
            .split(',')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if names.is_empty() {
            return Err(err("empty variable set in h{}".into()));
        }
        terms.push((names, coeff * Rational::from_integer(sign.into())));
        rest = &body[close + 1..];
    }
    Ok(terms)
}

pub(crate) fn parse_named_row(line: &str, location: &str) -> Result<NamedRow> {
    let (body, label) = match line.split_once('#') {
        Some((b, l)) => (b, Some(l.trim().to_string()).filter(|l| !l.is_empty())),
        None => (line, None),
    };
    let (lhs, relation, rhs) = [(">=", Relation::Ge), ("<=", Relation::Le), ("=", Relation::Eq)]
        .iter()
        .find_map(|(sym, rel)| body.split_once(sym).map(|(l, r)| (l, *rel, r)))
        .ok_or_else(|| Error::parse(location, "missing relation (>=, <= or =)"))?;
    let rhs = parse_rational(rhs).map_err(|_| Error::parse(location, format!("bad right-hand side {:?}", rhs.trim())))?;
    Ok(NamedRow { terms: parse_terms(lhs, location)?, relation, rhs, label })
}

pub(crate) fn resolve(ground: &GroundSet, row: &NamedRow, location: &str) -> Result<LinearConstraint> {
    let mut terms = Vec::with_capacity(row.terms.len());
    for (names, c) in &row.terms {
        let s = ground
            .subset(names)
            .map_err(|e| Error::parse(location, e.to_string()))?;
        terms.push((s, c.clone()));
    }
    let mut c = LinearConstraint::new(LinearFunctional::from_terms(terms), row.relation, row.rhs.clone());
    c.label = row.label.clone();
    Ok(c)
}

/// Parses a single row against `ground`.
pub fn parse_row(ground: &GroundSet, line: &str) -> Result<LinearConstraint> {
    resolve(ground, &parse_named_row(line, "row")?, "row")
}

/// Renders a system in the text format; the inverse of [`parse_lp`].
pub fn render_lp(sys: &LinearSystem) -> String {
    let g = sys.ground();
    let mut out = format!("ground {}\n", g.names().join(" "));
    if let Some(obj) = sys.objective() {
        out.push_str(&format!("minimize {}\n", obj.render(g)));
    }
    for c in sys.constraints() {
        out.push_str(&c.render(g));
        if let Some(l) = &c.label {
            out.push_str(&format!("  # {l}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_lp(text: &str) -> Result<LinearSystem> {
    let mut sys: Option<LinearSystem> = None;
    for (k, raw) in text.lines().enumerate() {
        let location = format!("line {}", k + 1);
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(names) = trimmed.strip_prefix("ground ") {
            if sys.is_some() {
                return Err(Error::parse(location, "duplicate ground line"));
            }
            let g = GroundSet::new(names.split_whitespace()).map_err(|e| Error::parse(&location, e.to_string()))?;
            sys = Some(LinearSystem::new(g));
            continue;
        }
        let s = sys
            .as_mut()
            .ok_or_else(|| Error::parse(&location, "expected 'ground' line first"))?;
        if let Some(obj) = trimmed.strip_prefix("minimize ") {
            let terms = parse_terms(obj.split('#').next().unwrap_or(""), &location)?;
            let mut resolved = Vec::new();
            for (names, c) in terms {
                resolved.push((s.ground().subset(&names).map_err(|e| Error::parse(&location, e.to_string()))?, c));
            }
            s.set_objective(LinearFunctional::from_terms(resolved))?;
            continue;
        }
        let row = parse_named_row(trimmed, &location)?;
        let c = resolve(s.ground(), &row, &location)?;
        s.push(c)?;
    }
    sys.ok_or_else(|| Error::parse("input", "no 'ground' line"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parses_rows() {
        let g = GroundSet::new(["Y1", "U2"]).unwrap();
        let c = parse_row(&g, "1*h{Y1,U2} -h{U2} = 0 # h(Y1|U2) = 0").unwrap();
        assert_eq!(c.relation, Relation::Eq);
        assert_eq!(c.functional.terms().len(), 2);
        assert_eq!(c.label.as_deref(), Some("h(Y1|U2) = 0"));
        let c = parse_row(&g, "1/2*h{U2} <= 3/4").unwrap();
        assert_eq!(c.functional.terms()[0].1, ratio(1, 2));
        assert_eq!(c.rhs, ratio(3, 4));
        assert!(parse_row(&g, "1*h{Y9} = 0").is_err());
        assert!(parse_row(&g, "1*h{Y1}").is_err());
    }

    #[test]
    fn error_carries_line() {
        let err = parse_lp("ground A\n1*h{A} >= 0\n1*h{B} >= 0\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn round_trip_with_objective() {
        let text = "ground A B\nminimize 1*h{A} +2*h{A,B}\n1*h{A} -1*h{B} >= -1  # label\n0 >= -3\n";
        let sys = parse_lp(text).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.constraints()[1].rhs, int(-3));
        let again = parse_lp(&render_lp(&sys)).unwrap();
        assert_eq!(again, sys);
    }
}
