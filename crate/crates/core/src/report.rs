//! Machine-readable run reports: command echo, verdict payload, input
//! digests, tool version and timings.
//!
//! Everything except the `timings_ms` field is a deterministic function of
//! the inputs and seeds, and serialisation uses sorted keys, so two runs can
//! be compared byte for byte after dropping that field.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use num_traits::One;

use crate::entropy::{EntropyVector, GroundSet, SubsetIndex};
use crate::error::{Error, Result};
use crate::lp::{render_lp, FarkasCertificate, LinearConstraint, LinearSystem};
use crate::network::{BoundReport, BoundVerdict};
use crate::rational::{format_rational, Rational};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of the canonical text rendering of a system.
pub fn system_digest(sys: &LinearSystem) -> String {
    sha256_hex(render_lp(sys).as_bytes())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub status: String,
    pub version: String,
    /// input name -> sha256 of its bytes
    pub inputs: BTreeMap<String, String>,
    pub result: Value,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            status: "ok".into(),
            version: VERSION.into(),
            inputs: BTreeMap::new(),
            result: Value::Null,
            timings_ms: BTreeMap::new(),
        }
    }

    /// Reads a file, records its digest and returns its text.
    pub fn read_input(&mut self, name: &str, path: impl AsRef<Path>) -> Result<String> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        self.inputs.insert(name.into(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    pub fn record_input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.insert(name.into(), sha256_hex(bytes));
    }

    /// Runs `f` and records its wall time under `label`.
    pub fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings_ms.insert(label.into(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serialises")
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serialises")
    }

    /// The report without timings, for determinism checks.
    pub fn deterministic_json(&self) -> Value {
        let mut v = self.to_json();
        if let Some(o) = v.as_object_mut() {
            o.remove("timings_ms");
        }
        v
    }
}

/// A row in information notation when it has one of the elemental shapes,
/// e.g. `h(U1|Z0 Z1) >= 0` or `I(Y1;Y2|Y3) >= 0`; its label or dump
/// rendering otherwise.
pub fn info_notation(c: &LinearConstraint, g: &GroundSet) -> String {
    if let Some(l) = &c.label {
        return l.clone();
    }
    let one = Rational::one();
    let t = c.functional.terms();
    let tail = format!("{} {}", c.relation, format_rational(&c.rhs));
    let cond = |a: SubsetIndex, b: SubsetIndex| {
        if b.is_empty() {
            format!("h({})", g.display(a))
        } else {
            format!("h({}|{})", g.display(a), g.display(b))
        }
    };
    match t {
        [(a, x)] if *x == one => return format!("{} {tail}", cond(*a, SubsetIndex::EMPTY)),
        [(a, x), (b, y)] | [(b, y), (a, x)] if *x == one && *y == -&one && b.is_subset_of(*a) => {
            return format!("{} {tail}", cond(*a - *b, *b))
        }
        _ => {}
    }
    if t.len() >= 3 && t.len() <= 4 {
        let pos: Vec<SubsetIndex> = t.iter().filter(|(_, x)| *x == one).map(|(s, _)| *s).collect();
        let neg: Vec<SubsetIndex> = t.iter().filter(|(_, x)| *x == -&one).map(|(s, _)| *s).collect();
        if pos.len() == 2 && pos.len() + neg.len() == t.len() {
            let (p, q) = (pos[0], pos[1]);
            let (union, meet) = (p | q, p & q);
            let expect: Vec<SubsetIndex> = if meet.is_empty() { vec![union] } else { vec![union, meet] };
            let mut got = neg.clone();
            got.sort();
            let mut want = expect.clone();
            want.sort();
            if got == want && !(p - q).is_empty() && !(q - p).is_empty() {
                let given = if meet.is_empty() { String::new() } else { format!("|{}", g.display(meet)) };
                return format!("I({};{}{given}) {tail}", g.display(p - q), g.display(q - p));
            }
        }
    }
    c.render(g)
}

/// Nonzero entries of an entropy vector keyed by subset.
pub fn witness_json(h: &EntropyVector) -> Value {
    let g = h.ground();
    let mut m = serde_json::Map::new();
    for (k, v) in h.values().iter().enumerate() {
        let s = SubsetIndex::from_coordinate(k);
        m.insert(g.display(s), Value::String(format_rational(v)));
    }
    Value::Object(m)
}

/// Certificate rows with nonzero multipliers, as text rows of `sys`.
pub fn certificate_json(sys: &LinearSystem, cert: &FarkasCertificate) -> Value {
    let g = sys.ground();
    let rows: Vec<Value> = cert
        .support()
        .into_iter()
        .map(|i| {
            let c = &sys.constraints()[i];
            json!({
                "row": i,
                "multiplier": format_rational(&cert.multipliers[i]),
                "constraint": c.render(g),
                "notation": info_notation(c, g),
            })
        })
        .collect();
    json!({ "rows": sys.len(), "support": rows })
}

/// Verdict, system digest and the witness or certificate of a bound run.
pub fn bound_json(r: &BoundReport) -> Value {
    let mut v = json!({
        "system_digest": system_digest(&r.lp.system),
        "rows": r.lp.system.len(),
        "ground": r.lp.system.ground().names(),
        "verified": r.verify(),
        "solver": {
            "float_hint": r.stats.hinted,
            "rounds": r.stats.rounds,
            "active_rows": r.stats.active_rows,
            "distinct_rows": r.stats.distinct_rows,
            "presolved_coordinates": r.stats.presolved_coordinates,
        },
    });
    let o = v.as_object_mut().expect("object");
    match &r.verdict {
        BoundVerdict::MaybeAchievable { witness } => {
            o.insert("verdict".into(), json!("Feasible"));
            o.insert("witness".into(), witness_json(witness));
        }
        BoundVerdict::NotAchievable { certificate } => {
            o.insert("verdict".into(), json!("Infeasible"));
            o.insert("certificate".into(), certificate_json(&r.lp.system, certificate));
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::parse_row;

    #[test]
    fn notation_of_elemental_rows() {
        let g = GroundSet::new(["A", "B", "C"]).unwrap();
        let row = |s: &str| info_notation(&parse_row(&g, s).unwrap(), &g);
        assert_eq!(row("h{A,B,C} -h{B,C} >= 0"), "h(A|B C) >= 0");
        assert_eq!(row("h{A,C} +h{B,C} -h{A,B,C} -h{C} >= 0"), "I(A;B|C) >= 0");
        assert_eq!(row("h{A} +h{B} -h{A,B} >= 0"), "I(A;B) >= 0");
        assert_eq!(row("h{A} <= 1"), "h(A) <= 1");
        assert_eq!(row("2*h{A} -h{B} >= 0"), "2*h{A} -1*h{B} >= 0");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn timings_are_dropped_for_comparison() {
        let mut a = RunReport::new(vec!["x".into()]);
        let mut b = a.clone();
        a.time("step", || ());
        b.time("step", || std::thread::sleep(std::time::Duration::from_millis(1)));
        assert_eq!(a.deterministic_json(), b.deterministic_json());
        assert!(a.to_json_string().contains("\"version\""));
    }
}
