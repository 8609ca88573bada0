//! CNF and 1-in-3 encodings of colourability, basis completion and an
//! adapter for external DIMACS solvers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::{Command, Stdio};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{max_cliques, Graph};
use crate::orthorep::{inner, is_parallel, orthogonality_graph_lenient, VectorSet};

/// Prefix reserved for vectors added by basis completion.
pub const COMPLETION_PREFIX: &str = "~c";

/// Environment variable naming the external solver executable.
pub const SOLVER_ENV: &str = "KSGK_SAT_SOLVER";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseSemantics {
    /// Ordinary disjunctions.
    Cnf,
    /// Every clause must have exactly one true literal.
    OneInThree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnfInstance {
    pub variable_map: Vec<(String, u32)>,
    pub clauses: Vec<Vec<i32>>,
    pub semantics: ClauseSemantics,
}

impl CnfInstance {
    pub fn num_vars(&self) -> usize {
        self.variable_map.len()
    }

    pub fn var(&self, label: &str) -> Option<u32> {
        self.variable_map.iter().find(|(l, _)| l == label).map(|&(_, v)| v)
    }

    /// Adds unit clauses forcing the given labels to the given values.
    pub fn with_units(mut self, units: &[(&str, bool)]) -> Result<Self> {
        for &(l, b) in units {
            let v = self.var(l).ok_or_else(|| Error::LabelMismatch(format!("no variable for {l}")))? as i32;
            self.clauses.push(vec![if b { v } else { -v }]);
        }
        Ok(self)
    }

    /// For 1-in-3 instances, the equivalent plain CNF (pairwise exclusions added).
    pub fn to_plain(&self) -> CnfInstance {
        let mut clauses = Vec::new();
        for c in &self.clauses {
            clauses.push(c.clone());
            if self.semantics == ClauseSemantics::OneInThree && c.len() > 1 {
                for i in 0..c.len() {
                    for j in i + 1..c.len() {
                        clauses.push(vec![-c[i], -c[j]]);
                    }
                }
            }
        }
        clauses.sort();
        clauses.dedup();
        CnfInstance { variable_map: self.variable_map.clone(), clauses, semantics: ClauseSemantics::Cnf }
    }

    /// DIMACS text: `c map` comments, the problem line, zero-terminated clauses.
    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        if self.semantics == ClauseSemantics::OneInThree {
            s.push_str("c semantics one-in-three\n");
        }
        for (l, v) in &self.variable_map {
            let _ = writeln!(s, "c map {l} {v}");
        }
        let _ = writeln!(s, "p cnf {} {}", self.num_vars(), self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                let _ = write!(s, "{lit} ");
            }
            s.push_str("0\n");
        }
        s
    }

    /// Checks a full assignment (`model[v-1]` is variable `v`).
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        let lit = |l: i32| {
            let v = model[(l.unsigned_abs() - 1) as usize];
            if l > 0 { v } else { !v }
        };
        self.clauses.iter().all(|c| match self.semantics {
            ClauseSemantics::Cnf => c.iter().any(|&l| lit(l)),
            ClauseSemantics::OneInThree => c.iter().filter(|&&l| lit(l)).count() == 1,
        })
    }

    /// Exhaustive satisfiability check for small instances (testing aid).
    pub fn brute_force(&self) -> Option<Vec<bool>> {
        let n = self.num_vars();
        assert!(n <= 24, "brute force limited to 24 variables");
        (0..1u64 << n)
            .map(|x| (0..n).map(|i| (x >> i) & 1 == 1).collect::<Vec<bool>>())
            .find(|m| self.satisfied_by(m))
    }
}

fn variable_map(g: &Graph) -> Vec<(String, u32)> {
    g.labels().iter().enumerate().map(|(i, l)| (l.clone(), i as u32 + 1)).collect()
}

/// One `(¬u ∨ ¬v)` per edge and one "at least one" clause per maximum clique.
pub fn export_cnf(g: &Graph) -> CnfInstance {
    let mut clauses: Vec<Vec<i32>> =
        g.edges().into_iter().map(|(i, j)| vec![-(i as i32 + 1), -(j as i32 + 1)]).collect();
    for c in max_cliques(g) {
        clauses.push(c.iter().map(|&v| v as i32 + 1).collect());
    }
    CnfInstance { variable_map: variable_map(g), clauses, semantics: ClauseSemantics::Cnf }
}

/// One exactly-one clause per triangle, for completed sets in dimension three.
pub fn export_one_in_three(g: &Graph, vs: &VectorSet) -> Result<CnfInstance> {
    if vs.dimension() != 3 {
        return Err(Error::NotDimensionThree(vs.dimension()));
    }
    let tris = max_cliques(g);
    let omega = tris.first().map_or(0, Vec::len);
    let mut in_tri = vec![false; g.n() * g.n()];
    if omega == 3 {
        for t in &tris {
            for a in 0..3 {
                for b in 0..3 {
                    in_tri[t[a] * g.n() + t[b]] = true;
                }
            }
        }
    }
    for (i, j) in g.edges() {
        if !in_tri[i * g.n() + j] {
            return Err(Error::CompletionRequired(g.label(i).into(), g.label(j).into()));
        }
    }
    let clauses = if omega == 3 {
        tris.iter().map(|t| t.iter().map(|&v| v as i32 + 1).collect()).collect()
    } else {
        vec![]
    };
    Ok(CnfInstance { variable_map: variable_map(g), clauses, semantics: ClauseSemantics::OneInThree })
}

fn cross(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    // Conjugated so the result is orthogonal to both under <.|.>.
    let (a, b): (Vec<Complex64>, Vec<Complex64>) =
        (a.iter().map(|z| z.conj()).collect(), b.iter().map(|z| z.conj()).collect());
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalized(v: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = crate::orthorep::norm(&v);
    (n > 1e-12).then(|| v.into_iter().map(|z| z / n).collect())
}

/// Orthonormal completion of `span(vs)` via Gram-Schmidt against the standard basis.
pub fn complement_basis(vs: &[Vec<Complex64>], d: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for b in &basis {
            let c = inner(b, &w);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        if let Some(w) = normalized(w) {
            basis.push(w);
        }
    }
    let start = basis.len();
    for e in 0..d {
        if basis.len() == d {
            break;
        }
        let mut w = vec![Complex64::new(0.0, 0.0); d];
        w[e] = Complex64::new(1.0, 0.0);
        for b in &basis {
            let c = inner(b, &w);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        if crate::orthorep::norm(&w) > 1e-6 {
            basis.push(normalized(w).expect("nonzero"));
        }
    }
    basis.split_off(start)
}

/// Adds the missing members of every incomplete basis. In dimension three
/// each orthogonal pair lacking a common orthogonal partner gains its
/// normalized cross product; in general dimension every maximal clique
/// smaller than `d` is completed by an orthonormal complement. New vectors
/// parallel to existing ones are dropped. Repeats until nothing changes.
pub fn complete_bases(vs: &VectorSet) -> VectorSet {
    let d = vs.dimension();
    let tol = vs.tolerance();
    let mut out = vs.clone();
    let mut counter = 0usize;
    for _round in 0..16 {
        let g = orthogonality_graph_lenient(&out);
        let mut fresh: Vec<Vec<Complex64>> = Vec::new();
        if d == 3 {
            for (i, j) in g.edges() {
                if g.neighbors(i).intersection(g.neighbors(j)).next().is_some() {
                    continue;
                }
                let a = out.get(g.label(i)).expect("present");
                let b = out.get(g.label(j)).expect("present");
                if let Some(w) = normalized(cross(a, b)) {
                    fresh.push(w);
                }
            }
        } else {
            for c in maximal_cliques(&g) {
                if c.len() >= d {
                    continue;
                }
                let members: Vec<Vec<Complex64>> =
                    c.iter().map(|&v| out.get(g.label(v)).expect("present").to_vec()).collect();
                fresh.extend(complement_basis(&members, d));
            }
        }
        let mut added = false;
        for w in fresh {
            if out.iter().any(|(_, v)| is_parallel(v, &w, tol)) {
                continue;
            }
            let label = loop {
                let l = format!("{COMPLETION_PREFIX}{counter}");
                counter += 1;
                if out.get(&l).is_none() {
                    break l;
                }
            };
            out.insert(label, w).expect("fresh label");
            added = true;
        }
        if !added {
            break;
        }
    }
    out
}

/// Maximal cliques (Bron-Kerbosch with pivoting), each sorted.
pub fn maximal_cliques(g: &Graph) -> Vec<Vec<usize>> {
    use fixedbitset::FixedBitSet;
    fn bk(g: &Graph, r: &mut Vec<usize>, p: FixedBitSet, x: FixedBitSet, out: &mut Vec<Vec<usize>>) {
        if p.is_clear() && x.is_clear() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| g.neighbors(u).intersection(&p).count())
            .expect("nonempty");
        let mut p = p;
        let mut x = x;
        let cands: Vec<usize> = p.difference(g.neighbors(pivot)).collect();
        for v in cands {
            let mut np = p.clone();
            np.intersect_with(g.neighbors(v));
            let mut nx = x.clone();
            nx.intersect_with(g.neighbors(v));
            r.push(v);
            bk(g, r, np, nx, out);
            r.pop();
            p.set(v, false);
            x.insert(v);
        }
    }
    let n = g.n();
    let mut p = FixedBitSet::with_capacity(n);
    p.insert_range(..);
    let mut out = Vec::new();
    if n > 0 {
        bk(g, &mut vec![], p, FixedBitSet::with_capacity(n), &mut out);
    }
    out.sort();
    out
}

/// Verdict returned by an external solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverVerdict {
    pub satisfiable: bool,
    pub model: Option<BTreeMap<String, bool>>,
}

/// Runs an external solver: DIMACS on stdin, `SAT`/`UNSAT` on the first
/// non-comment stdout line, optionally followed by a model line of signed
/// literals. A returned model is checked against the instance.
pub fn run_external_solver(program: &str, cnf: &CnfInstance) -> Result<SolverVerdict> {
    let plain = cnf.to_plain();
    let mut child = Command::new(program)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| Error::Solver(format!("cannot start {program}: {e}")))?;
    child
        .stdin
        .take()
        .expect("piped")
        .write_all(plain.to_dimacs().as_bytes())
        .map_err(|e| Error::Solver(format!("write failed: {e}")))?;
    let out = child.wait_with_output().map_err(|e| Error::Solver(e.to_string()))?;
    let text = String::from_utf8_lossy(&out.stdout);
    parse_verdict(&text, &plain)
}

/// Uses the solver named by `KSGK_SAT_SOLVER`, if set.
pub fn solver_from_env() -> Option<String> {
    std::env::var(SOLVER_ENV).ok().filter(|s| !s.is_empty())
}

pub fn parse_verdict(text: &str, cnf: &CnfInstance) -> Result<SolverVerdict> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('c'));
    let head = lines.next().ok_or_else(|| Error::Solver("empty solver output".into()))?;
    let head = head.trim_start_matches("s ").trim();
    let satisfiable = match head {
        "SAT" | "SATISFIABLE" => true,
        "UNSAT" | "UNSATISFIABLE" => false,
        other => return Err(Error::Solver(format!("unrecognised verdict line {other:?}"))),
    };
    let mut model = None;
    if satisfiable {
        let lits: Vec<i32> = lines
            .flat_map(|l| l.trim_start_matches("v ").split_whitespace().map(str::to_owned).collect::<Vec<_>>())
            .filter_map(|t| t.parse().ok())
            .filter(|&x: &i32| x != 0)
            .collect();
        if !lits.is_empty() {
            let mut m = vec![false; cnf.num_vars()];
            for l in lits {
                let k = l.unsigned_abs() as usize;
                if k == 0 || k > m.len() {
                    return Err(Error::Solver(format!("model literal {l} out of range")));
                }
                m[k - 1] = l > 0;
            }
            if !cnf.satisfied_by(&m) {
                return Err(Error::Solver("returned model does not satisfy the instance".into()));
            }
            model = Some(cnf.variable_map.iter().map(|(l, v)| (l.clone(), m[*v as usize - 1])).collect());
        }
    }
    Ok(SolverVerdict { satisfiable, model })
}
