//! Auxiliary variables for linearly correlated sources: a global basis of
//! the source subspaces, one uniform symbol per basis vector.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entropy::{JointDistribution, Variable};
use crate::error::{Error, Result};
use crate::network::{AuxSpec, AuxVariable, Fixing};

use super::field::Field;

/// Sources that are linear maps of a uniform vector `U` over `GF(q)^ambient`:
/// component `l` of source `i` is `<columns[l], U>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSources {
    pub q: usize,
    pub ambient: usize,
    pub sources: Vec<LinearSource>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSource {
    pub id: String,
    pub columns: Vec<Vec<u16>>,
}

/// Each source as `Y_i = [K_1 .. K_m] A^i` over a common basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceModel {
    pub q: usize,
    pub m: usize,
    /// `(source id, A^i)` with `A^i` stored row by row (`m` rows)
    pub generators: Vec<(String, Vec<Vec<u16>>)>,
}

impl SubspaceModel {
    /// Basis indices whose row of `A^i` is nonzero.
    pub fn support_of(&self, i: usize) -> Vec<usize> {
        let a = &self.generators[i].1;
        (0..self.m).filter(|&j| a[j].iter().any(|&v| v != 0)).collect()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.generators[i].1.first().map_or(0, Vec::len)
    }
}

#[derive(Clone, Debug)]
pub struct LinearAux {
    pub model: SubspaceModel,
    /// basis vectors of the span of all columns, in the ambient space
    pub basis: Vec<Vec<u16>>,
    pub spec: AuxSpec,
    pub warnings: Vec<String>,
}

impl LinearSources {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let s: LinearSources =
            serde_json::from_str(text).map_err(|e| Error::Json { context: "linear sources".into(), source: e })?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        Self::from_json_str(&text)
    }

    fn validate(&self) -> Result<Field> {
        let f = Field::new(self.q)?;
        for s in &self.sources {
            if s.columns.is_empty() {
                return Err(Error::domain(format!("source {} has no columns", s.id)));
            }
            for c in &s.columns {
                if c.len() != self.ambient {
                    return Err(Error::domain(format!(
                        "source {}: column of length {} in ambient dimension {}",
                        s.id,
                        c.len(),
                        self.ambient
                    )));
                }
                if c.iter().any(|&v| v as usize >= self.q) {
                    return Err(Error::domain(format!("source {}: entry outside GF({})", s.id, self.q)));
                }
            }
        }
        Ok(f)
    }

    fn label(&self, symbols: &[u16]) -> String {
        let sep = if self.q <= 10 { "" } else { "." };
        symbols.iter().map(u16::to_string).collect::<Vec<_>>().join(sep)
    }

    /// Joint distribution of the sources, uniform over `U`.
    pub fn distribution(&self) -> Result<JointDistribution> {
        let f = self.validate()?;
        let points = self.q.checked_pow(self.ambient as u32).filter(|&n| n <= 1 << 20).ok_or_else(|| {
            Error::domain("ambient space too large to enumerate")
        })?;
        let mut alphabets: Vec<Vec<String>> = Vec::new();
        let mut outcomes: Vec<Vec<String>> = Vec::with_capacity(points);
        for n in 0..points {
            let u: Vec<u16> = (0..self.ambient).map(|i| (n / self.q.pow(i as u32) % self.q) as u16).collect();
            outcomes.push(
                self.sources
                    .iter()
                    .map(|s| self.label(&s.columns.iter().map(|c| dot(&f, c, &u)).collect::<Vec<_>>()))
                    .collect(),
            );
        }
        for i in 0..self.sources.len() {
            let mut a: Vec<String> = outcomes.iter().map(|o| o[i].clone()).collect();
            a.sort();
            a.dedup();
            alphabets.push(a);
        }
        let variables: Vec<Variable> = self
            .sources
            .iter()
            .zip(alphabets)
            .map(|(s, alphabet)| Variable { name: s.id.clone(), alphabet })
            .collect();
        let idx: Vec<Vec<usize>> = outcomes
            .iter()
            .map(|o| {
                o.iter()
                    .zip(&variables)
                    .map(|(l, v)| v.alphabet.binary_search(l).expect("label collected"))
                    .collect()
            })
            .collect();
        JointDistribution::uniform_over(variables, idx)
    }
}

fn dot(f: &Field, a: &[u16], b: &[u16]) -> u16 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Row-reduces `vectors`; returns the indices of a maximal independent
/// prefix-greedy subset and, for every vector, its coordinates in that basis.
fn basis_coordinates(f: &Field, vectors: &[Vec<u16>]) -> (Vec<usize>, Vec<Vec<u16>>) {
    // each basis vector kept with its echelon form and the combination of
    // basis vectors producing it
    let mut chosen: Vec<usize> = Vec::new();
    let mut echelon: Vec<(usize, Vec<u16>, Vec<u16>)> = Vec::new(); // (pivot, reduced, combo over chosen)
    let mut coords = Vec::with_capacity(vectors.len());
    for (vi, v) in vectors.iter().enumerate() {
        let mut r = v.clone();
        let mut combo = vec![0u16; chosen.len()];
        for (pivot, row, rc) in &echelon {
            let c = r[*pivot];
            if c != 0 {
                for (x, y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, *y));
                }
                for (x, y) in combo.iter_mut().zip(rc) {
                    *x = f.add(*x, f.mul(c, *y));
                }
            }
        }
        match r.iter().position(|&x| x != 0) {
            None => coords.push(combo),
            Some(pivot) => {
                // r = v - Σ combo·b ; normalise so r[pivot] = 1
                let inv = f.inv(r[pivot]);
                let k = chosen.len();
                chosen.push(vi);
                let mut rc: Vec<u16> = combo.iter().map(|&x| f.neg(f.mul(inv, x))).collect();
                rc.push(inv);
                let row: Vec<u16> = r.iter().map(|&x| f.mul(inv, x)).collect();
                // keep earlier rows reduced at the new pivot
                for (_, prow, pc) in echelon.iter_mut() {
                    let c = prow[pivot];
                    if c != 0 {
                        for (x, y) in prow.iter_mut().zip(&row) {
                            *x = f.sub(*x, f.mul(c, *y));
                        }
                        pc.resize(k + 1, 0);
                        for (x, y) in pc.iter_mut().zip(&rc) {
                            *x = f.sub(*x, f.mul(c, *y));
                        }
                    }
                }
                echelon.push((pivot, row, rc));
                let mut unit = vec![0u16; k + 1];
                unit[k] = 1;
                coords.push(unit);
            }
        }
    }
    let m = chosen.len();
    for c in coords.iter_mut() {
        c.resize(m, 0);
    }
    (chosen, coords)
}

/// Independent subset of `columns`, greedily in order.
fn independent_columns(f: &Field, columns: &[Vec<u16>]) -> Vec<usize> {
    basis_coordinates(f, columns).0
}

/// Builds the global basis and the auxiliary spec `K1..Km`: each `K_a` set
/// is uniform with entropy `|a|·log2 q`, each source is a function of the
/// `K_j` its coefficient matrix uses, and when those `K_j` are exactly as
/// many as the source's dimension their joint entropy equals the source's.
pub fn linear_basis_aux(src: &LinearSources) -> Result<LinearAux> {
    let f = src.validate()?;
    let mut warnings = Vec::new();
    let mut reduced: Vec<(String, Vec<Vec<u16>>)> = Vec::new();
    for s in &src.sources {
        let keep = independent_columns(&f, &s.columns);
        if keep.len() < s.columns.len() {
            warnings.push(format!(
                "source {}: {} of {} columns are dependent and were dropped",
                s.id,
                s.columns.len() - keep.len(),
                s.columns.len()
            ));
        }
        reduced.push((s.id.clone(), keep.iter().map(|&i| s.columns[i].clone()).collect()));
    }
    let all: Vec<Vec<u16>> = reduced.iter().flat_map(|(_, c)| c.iter().cloned()).collect();
    let (chosen, coords) = basis_coordinates(&f, &all);
    let m = chosen.len();
    let basis: Vec<Vec<u16>> = chosen.iter().map(|&i| all[i].clone()).collect();
    let mut generators = Vec::new();
    let mut next = 0;
    for (id, cols) in &reduced {
        let a: Vec<Vec<u16>> = (0..m).map(|j| (0..cols.len()).map(|l| coords[next + l][j]).collect()).collect();
        next += cols.len();
        generators.push((id.clone(), a));
    }
    let model = SubspaceModel { q: src.q, m, generators };

    let k = |j: usize| format!("K{}", j + 1);
    let log_q = crate::rational::exact_log2(&crate::rational::int(src.q as i64));
    let mut rows = Vec::new();
    for mask in 1u32..(1 << m) {
        let members: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let names: Vec<String> = members.iter().map(|&j| k(j)).collect();
        match log_q {
            Some(bits) => rows.push(format!("h{{{}}} = {}", names.join(","), bits * members.len() as i64)),
            None if members.len() > 1 || members[0] != 0 => {
                rows.push(format!("h{{{}}} -{}*h{{K1}} = 0", names.join(","), members.len()))
            }
            None => {}
        }
    }
    for (i, (id, _)) in model.generators.iter().enumerate() {
        let support: Vec<String> = model.support_of(i).into_iter().map(k).collect();
        let ks = support.join(",");
        rows.push(format!("h{{{id},{ks}}} -h{{{ks}}} = 0  # h({id}|{}) = 0", support.join(" ")));
        if support.len() == model.dim(i) {
            rows.push(format!("h{{{ks}}} -h{{{id}}} = 0  # h({}) = h({id})", support.join(" ")));
        }
    }
    let spec = AuxSpec {
        aux: (0..m).map(|j| AuxVariable { id: k(j), function: None }).collect(),
        constraints: rows,
        fixing: Fixing::All,
    };
    Ok(LinearAux { model, basis, spec, warnings })
}

impl LinearAux {
    /// Joint distribution of the sources followed by `K1..Km`, uniform over
    /// the ambient space.
    pub fn joint(&self, src: &LinearSources) -> Result<JointDistribution> {
        let mut with_k = src.clone();
        for (j, b) in self.basis.iter().enumerate() {
            with_k.sources.push(LinearSource { id: format!("K{}", j + 1), columns: vec![b.clone()] });
        }
        with_k.distribution()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy_vector_of;
    use crate::lp::parse_row;

    fn unit(i: usize, n: usize) -> Vec<u16> {
        (0..n).map(|j| u16::from(i == j)).collect()
    }

    fn example1() -> LinearSources {
        let s = |id: &str, a: usize, b: usize| LinearSource { id: id.into(), columns: vec![unit(a, 3), unit(b, 3)] };
        LinearSources { q: 2, ambient: 3, sources: vec![s("Y1", 0, 1), s("Y2", 0, 2), s("Y3", 1, 2)] }
    }

    fn rows_hold(src: &LinearSources, la: &LinearAux) -> bool {
        let h = entropy_vector_of(&la.joint(src).unwrap());
        la.spec.constraints.iter().all(|r| parse_row(h.ground(), r).unwrap().is_satisfied_by(&h))
    }

    #[test]
    fn example_basis_is_the_three_bits() {
        let src = example1();
        let la = linear_basis_aux(&src).unwrap();
        assert_eq!(la.model.m, 3);
        assert_eq!(la.model.support_of(0), vec![0, 1]);
        assert_eq!(la.model.support_of(2), vec![1, 2]);
        assert!(la.spec.constraints.contains(&"h{K1,K2,K3} = 3".to_string()));
        assert!(rows_hold(&src, &la));
        assert!(la.warnings.is_empty());
        assert_eq!(src.distribution().unwrap(), crate::network::example1_sources());
    }

    #[test]
    fn single_source_single_symbol() {
        let src = LinearSources { q: 4, ambient: 1, sources: vec![LinearSource { id: "Y".into(), columns: vec![vec![1]] }] };
        let la = linear_basis_aux(&src).unwrap();
        assert_eq!(la.spec.constraints[0], "h{K1} = 2");
        assert!(rows_hold(&src, &la));
    }

    #[test]
    fn ternary_sum_has_no_entropy_row() {
        let src = LinearSources {
            q: 3,
            ambient: 2,
            sources: vec![
                LinearSource { id: "A".into(), columns: vec![unit(0, 2)] },
                LinearSource { id: "B".into(), columns: vec![unit(1, 2)] },
                LinearSource { id: "Y1".into(), columns: vec![vec![1, 1]] },
            ],
        };
        let la = linear_basis_aux(&src).unwrap();
        assert_eq!(la.model.support_of(2), vec![0, 1]);
        assert!(la.spec.constraints.iter().any(|r| r.starts_with("h{Y1,K1,K2} -h{K1,K2} = 0")));
        assert!(!la.spec.constraints.iter().any(|r| r.starts_with("h{K1,K2} -h{Y1}")));
        let h = entropy_vector_of(&src.distribution().unwrap());
        let y1 = h.get_named(["Y1"]).unwrap();
        assert!((crate::rational::to_f64(y1) - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn dependent_columns_warned() {
        let src = LinearSources {
            q: 2,
            ambient: 2,
            sources: vec![LinearSource { id: "Y".into(), columns: vec![vec![1, 0], vec![1, 0]] }],
        };
        let la = linear_basis_aux(&src).unwrap();
        assert_eq!(la.warnings.len(), 1);
        assert_eq!(la.model.m, 1);
    }

    #[test]
    fn bad_dimensions_rejected() {
        let src = LinearSources { q: 2, ambient: 2, sources: vec![LinearSource { id: "Y".into(), columns: vec![vec![1]] }] };
        assert!(linear_basis_aux(&src).is_err());
    }
}
